//! JSON model documents and their translation to coalgebras.

use std::collections::BTreeMap;
use std::collections::HashMap;

use relift::functor::first_up_closure_gap;
use relift::{Coalgebra, Error, FiniteSet, Functor, Result, Value};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// The image of one state, in the shape its functor expects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Image {
    /// `Id`: a single state.
    State(String),
    /// `Const(k)`: an index below `k`.
    Index(u32),
    /// `P`: a set of states.
    States(Vec<String>),
    /// `N` and `M`: a family of sets of states.
    Family(Vec<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub functor: String,
    pub states: Vec<String>,
    pub structure: BTreeMap<String, Image>,
}

/// A coalgebra together with the labels of its states; label `i` names
/// atom `a<i>`.
#[derive(Clone, Debug)]
pub struct Model {
    pub coalgebra: Coalgebra,
    pub labels: Vec<String>,
}

impl Model {
    /// Labels each state by its canonical atom text.
    pub fn unlabelled(coalgebra: Coalgebra) -> Self {
        let labels = coalgebra.states().iter().map(|x| x.to_string()).collect();
        Model { coalgebra, labels }
    }

    pub fn label(&self, v: &Value) -> String {
        render(v, &self.labels)
    }
}

/// Renders a value with atoms replaced by state labels.
pub fn render(v: &Value, labels: &[String]) -> String {
    match v {
        Value::Atom(i) => labels.get(*i as usize).cloned().unwrap_or_else(|| v.to_string()),
        Value::Pair(p) => format!("({},{})", render(&p.0, labels), render(&p.1, labels)),
        Value::Set(_) => {
            let inner: Vec<String> = v.as_set().unwrap_or(&[]).iter().map(|e| render(e, labels)).collect();
            format!("{{{}}}", inner.join(","))
        }
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let doc: ModelDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid model document: {e}")))?;
    doc.to_model()
}

impl ModelDocument {
    pub fn to_model(&self) -> Result<Model> {
        if let Some(v) = self.version.filter(|&v| v != SCHEMA_VERSION) {
            return Err(Error::Parse(format!("unsupported model version {v} (expected {SCHEMA_VERSION})")));
        }
        let functor: Functor = self.functor.parse()?;
        let mut index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.as_str(), i as u32).is_some() {
                return Err(Error::Parse(format!("duplicate state label '{s}'")));
            }
        }
        if let Some(extra) = self.structure.keys().find(|k| !index.contains_key(k.as_str())) {
            return Err(Error::Parse(format!("structure mentions unknown state '{extra}'")));
        }
        let atom = |s: &str| {
            index
                .get(s)
                .map(|&i| Value::atom(i))
                .ok_or_else(|| Error::Parse(format!("unknown state label '{s}'")))
        };
        let subset = |ss: &[String]| ss.iter().map(|s| atom(s)).collect::<Result<Vec<_>>>().map(Value::set);
        let states = FiniteSet::atoms(self.states.len() as u32);
        let mut structure = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let image = self
                .structure
                .get(s)
                .ok_or_else(|| Error::Parse(format!("structure has no entry for state '{s}'")))?;
            let shape_error = || Error::Parse(format!("image of '{s}' does not have the shape {functor} expects"));
            let v = match (functor, image) {
                (Functor::Identity, Image::State(t)) => atom(t)?,
                (Functor::Constant(_), Image::Index(k)) => Value::atom(*k),
                (Functor::Powerset, Image::States(ts)) => subset(ts)?,
                (Functor::Neighbourhood | Functor::MonotoneNeighbourhood, Image::Family(fam)) => {
                    Value::set(fam.iter().map(|u| subset(u)).collect::<Result<Vec<_>>>()?)
                }
                (Functor::Neighbourhood | Functor::MonotoneNeighbourhood, Image::States(ts)) if ts.is_empty() => {
                    Value::empty_set()
                }
                _ => return Err(shape_error()),
            };
            if functor == Functor::MonotoneNeighbourhood {
                if let Some((u, w)) = first_up_closure_gap(&states, &v) {
                    return Err(Error::Parse(format!(
                        "image of '{s}' is not up-closed: contains {} but not {}",
                        render(&u, &self.states),
                        render(&w, &self.states)
                    )));
                }
            }
            structure.push(v);
        }
        let coalgebra = Coalgebra::new(functor, states, structure)?;
        Ok(Model { coalgebra, labels: self.states.clone() })
    }

    pub fn from_model(model: &Model) -> Self {
        let c = &model.coalgebra;
        let label = |v: &Value| model.label(v);
        let names = |v: &Value| v.as_set().unwrap_or(&[]).iter().map(label).collect::<Vec<_>>();
        let structure = model
            .labels
            .iter()
            .zip(c.structure())
            .map(|(s, v)| {
                let image = match c.functor() {
                    Functor::Identity => Image::State(label(v)),
                    Functor::Constant(_) => Image::Index(v.as_atom().unwrap_or(0)),
                    Functor::Powerset => Image::States(names(v)),
                    Functor::Neighbourhood | Functor::MonotoneNeighbourhood => {
                        Image::Family(v.as_set().unwrap_or(&[]).iter().map(names).collect())
                    }
                };
                (s.clone(), image)
            })
            .collect();
        ModelDocument {
            version: Some(SCHEMA_VERSION),
            functor: c.functor().to_string(),
            states: model.labels.clone(),
            structure,
        }
    }
}
