use super::catalogue::mtilde_lift;
use crate::error::{Error, Result};
use crate::functor::{ensure_within_limit, Functor};
use crate::relation::Relation;
use crate::value::Value;

/// A span witness `W ∈ M(R)` for `(U, V) ∈ M̃(R)`, where `R` is total and
/// surjective: the up-closure of the restrictions of `R` to the members of
/// `U` (on the left) and of `V` (on the right).
pub fn mtilde_witness(r: &Relation, u: &Value, v: &Value) -> Result<Value> {
    let m = Functor::MonotoneNeighbourhood;
    if !r.is_total() {
        return Err(Error::contract(format!("witness needs a total relation, {r} is not")));
    }
    if !r.is_surjective() {
        return Err(Error::contract(format!("witness needs a surjective relation, {r} is not")));
    }
    if !m.is_element(r.source(), u) {
        return Err(Error::contract(format!("{u} is not in M{}", r.source())));
    }
    if !m.is_element(r.target(), v) {
        return Err(Error::contract(format!("{v} is not in M{}", r.target())));
    }
    if !mtilde_lift().relates(r, u, v)? {
        return Err(Error::contract(format!("({u}, {v}) is not in M̃R: the forth or back clause fails")));
    }
    let pairs = r.as_set();
    if pairs.len() >= 64 {
        return Err(Error::contract("witness construction needs fewer than 64 pairs"));
    }
    ensure_within_limit(
        || format!("P of a {}-pair relation", pairs.len()),
        (pairs.len() < usize::BITS as usize - 1).then(|| 1usize << pairs.len()),
        || format!("2^{}", pairs.len()),
    )?;
    let restrict = |sub: &Value, left: bool| -> u64 {
        pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                let (x, y) = p.as_pair().expect("pair");
                sub.has_element(if left { x } else { y })
            })
            .fold(0, |acc, (k, _)| acc | 1 << k)
    };
    let mut generators: Vec<u64> = Vec::new();
    generators.extend(u.as_set().expect("family").iter().map(|s| restrict(s, true)));
    generators.extend(v.as_set().expect("family").iter().map(|s| restrict(s, false)));
    let members = (0..1u64 << pairs.len())
        .filter(|w| generators.iter().any(|g| g & !w == 0))
        .map(|w| pairs.value_of_mask(w));
    Ok(Value::set(members))
}
