use super::catalogue::{barr_lift, lj_lift, mtilde_lift, sim_lift, top_lift};
use super::combinators::{meet_lift, transport_lift, twiddle_lift};
use super::LiftingRef;
use crate::distlaw::{lifting_from_law, parse_law};
use crate::error::{Error, Result};
use crate::functor::{Functor, NatTrans};

/// A member of the finite family of liftings used by the minimality and
/// correspondence checks.
#[derive(Clone, Debug)]
pub struct Registered {
    pub lifting: LiftingRef,
    /// Reported but excluded from minimality families and pass/fail totals.
    pub informational: bool,
}

fn member(lifting: LiftingRef) -> Registered {
    Registered { lifting, informational: false }
}

/// The registered liftings of a functor, in a fixed order.
pub fn registered_liftings(functor: Functor) -> Vec<Registered> {
    let lj = |m: u8| lj_lift(m).expect("4-bit mask");
    let iota = |m: u8| transport_lift(NatTrans::Inclusion, lj(m)).expect("N-lifting");
    let meet = |ls: &[LiftingRef]| meet_lift(ls).expect("same functor");
    let mut out = vec![member(top_lift(functor))];
    match functor {
        Functor::Powerset => {
            let s = sim_lift();
            out.push(member(barr_lift(functor)));
            out.push(member(s.clone()));
            out.push(member(twiddle_lift(s.clone())));
            out.push(member(meet(&[s.clone(), twiddle_lift(s)])));
        }
        Functor::Neighbourhood => {
            out.extend((0..16).map(|m| member(lj(m))));
            out.push(member(twiddle_lift(lj(1))));
            out.push(member(twiddle_lift(lj(3))));
            out.push(member(meet(&[lj(1), twiddle_lift(lj(1))])));
            out.push(Registered { lifting: barr_lift(functor), informational: true });
        }
        Functor::MonotoneNeighbourhood => {
            out.push(member(mtilde_lift()));
            out.extend((0..16).map(|m| member(iota(m))));
            out.push(member(meet(&[mtilde_lift(), iota(15)])));
            out.push(member(meet(&[iota(1), iota(8)])));
            out.push(member(twiddle_lift(iota(1))));
            out.push(Registered { lifting: barr_lift(functor), informational: true });
        }
        Functor::Identity | Functor::Constant(_) => out.push(member(barr_lift(functor))),
    }
    out
}

/// Parses a lifting expression such as `barr`, `LJ:5`, `meet(sim,top)`,
/// `twiddle(LJ:1)`, `transport(iota,LJ:15)` or `lifting(law(barr))`.
pub fn parse_lifting(functor: Functor, text: &str) -> Result<LiftingRef> {
    let s = text.trim();
    if let Some(args) = call_args(s, "meet")? {
        let parts = args.iter().map(|a| parse_lifting(functor, a)).collect::<Result<Vec<_>>>()?;
        return meet_lift(&parts);
    }
    if let Some(args) = call_args(s, "twiddle")? {
        let [inner] = args.as_slice() else {
            return Err(Error::Parse(format!("twiddle takes one argument in '{s}'")));
        };
        return Ok(twiddle_lift(parse_lifting(functor, inner)?));
    }
    if let Some(args) = call_args(s, "transport")? {
        let [eta, inner] = args.as_slice() else {
            return Err(Error::Parse(format!("transport takes two arguments in '{s}'")));
        };
        let eta = match eta.trim() {
            "iota" => NatTrans::Inclusion,
            "id" => NatTrans::Identity(functor),
            other => return Err(Error::Parse(format!("unknown natural transformation '{other}'"))),
        };
        if eta.source_functor() != functor {
            return Err(Error::Parse(format!("{} starts at {}, not {functor}", eta.name(), eta.source_functor())));
        }
        return transport_lift(eta, parse_lifting(eta.target_functor(), inner)?);
    }
    if let Some(args) = call_args(s, "lifting")? {
        let [law] = args.as_slice() else {
            return Err(Error::Parse(format!("lifting takes one argument in '{s}'")));
        };
        return Ok(lifting_from_law(parse_law(functor, law)?));
    }
    let need = |f: Functor, l: LiftingRef| {
        if functor == f {
            Ok(l)
        } else {
            Err(Error::Parse(format!("'{s}' is a lifting of {f}, not of {functor}")))
        }
    };
    match s {
        "top" => Ok(top_lift(functor)),
        "barr" => Ok(barr_lift(functor)),
        "sim" => need(Functor::Powerset, sim_lift()),
        "mtilde" => need(Functor::MonotoneNeighbourhood, mtilde_lift()),
        _ => match s.strip_prefix("LJ:") {
            Some(m) => {
                let mask: u8 = m
                    .trim()
                    .parse()
                    .ok()
                    .filter(|&m| m < 16)
                    .ok_or_else(|| Error::Parse(format!("'{s}': LJ takes a mask between 0 and 15")))?;
                need(Functor::Neighbourhood, lj_lift(mask)?)
            }
            None => Err(Error::Parse(format!(
                "unknown lifting '{s}' (expected top, barr, sim, mtilde, LJ:<0-15>, meet(..), twiddle(..), transport(iota,..) or lifting(law(..)))"
            ))),
        },
    }
}

/// If `s` is `name(args)`, the top-level comma-separated arguments.
pub(crate) fn call_args<'a>(s: &'a str, name: &str) -> Result<Option<Vec<&'a str>>> {
    let Some(rest) = s.strip_prefix(name).map(str::trim_start) else {
        return Ok(None);
    };
    let Some(body) = rest.strip_prefix('(') else {
        return Ok(None);
    };
    let mut depth = 1usize;
    let mut args = Vec::new();
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    if !body[i + 1..].trim().is_empty() {
                        return Err(Error::Parse(format!("trailing text after '{}'", &s[..s.len() - body.len() + i + 1])));
                    }
                    args.push(body[start..i].trim());
                    if args.iter().any(|a| a.is_empty()) {
                        return Err(Error::Parse(format!("empty argument in '{s}'")));
                    }
                    return Ok(Some(args));
                }
            }
            ',' if depth == 1 => {
                args.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    Err(Error::Parse(format!("unbalanced parentheses in '{s}'")))
}
