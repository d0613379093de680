//! Frameworks, worlds, formulas, labellings and the distributions over worlds
//! that connect them.

mod baf;
mod formula;
pub mod info;
mod labelling;
mod world;

pub use baf::{Argument, Baf};
pub(crate) use baf::is_identifier;
pub use formula::{eval_formula, Formula};
pub use labelling::Labelling;
pub use world::{World, WorldDistribution, DEFAULT_WORLD_LIMIT, MAX_WORLD_ARGS};
pub(crate) use world::check_world_limit;
