//! Epistemic probabilistic argumentation over bipolar argumentation
//! frameworks.
//!
//! Degrees of belief are probability labellings: one value in `[0, 1]` per
//! argument. Semantic postulates and user statements become linear atomic
//! constraints over those values, which keeps satisfiability, entailment and
//! maximum-entropy reasoning polynomial. The [`oracle`] module solves the
//! same problems over all `2^n` possible worlds for cross-checking.
//!
//! ```
//! use probarg::{compile_semantics, entail, Baf, SemanticsFlag};
//!
//! let baf = Baf::new(
//!     ["A", "B", "C", "D"],
//!     [("A", "B"), ("B", "A"), ("D", "B")],
//!     [("C", "A"), ("D", "C")],
//! )?;
//! let cs = compile_semantics(&baf, [SemanticsFlag::Coh, SemanticsFlag::Fou]);
//! let b = entail(&cs, &baf, "B")?;
//! assert!(b.upper < 1e-9);
//! # Ok::<(), probarg::Error>(())
//! ```

pub mod constraints;
mod error;
pub mod lp;
pub mod maxent;
pub mod model;
pub mod oracle;
pub mod reasoner;

pub use constraints::{
    compile_semantics, normalize, satisfies, ConstraintSet, LinearAtomicConstraint, Provenance,
    RawConstraint, Relation, SemanticsFlag,
};
pub use error::{Error, Result};
pub use maxent::{
    conditional_query, conjunctive_query, exclusive_dnf_query, maxent_labelling,
    maxent_labelling_with, ConjunctiveQuery, MaxEntConfig, MaxEntResult, DEFAULT_DNF_LIMIT,
};
pub use model::info;
pub use model::{
    eval_formula, Argument, Baf, Formula, Labelling, World, WorldDistribution,
};
pub use oracle::{world_lp_entail, world_lp_sat, world_maxent, OracleConfig};
pub use reasoner::{check_sat, entail, entail_all, EntailmentBounds, SatResult};
