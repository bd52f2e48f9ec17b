//! Lax relation liftings, lax distributive laws over the powerset monad, and
//! lifting-parameterized bisimilarity on finite sets.

pub mod bisim;
pub mod distlaw;
pub mod error;
pub mod functor;
pub mod lifting;
pub mod relation;
pub mod universe;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use bisim::Coalgebra;
pub use distlaw::{DistLaw, LawRef};
pub use functor::{Functor, NatTrans};
pub use lifting::{Lifting, LiftingRef};
pub use relation::{Function, Relation};
pub use universe::Universe;
pub use value::{FiniteSet, Value};
