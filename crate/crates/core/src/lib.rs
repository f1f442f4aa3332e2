//! Purification of separation-logic entailments driven by user strategies.
//!
//! A strategy program rewrites an entailment until no spatial conjunct is
//! left (or none of its strategies applies). Each strategy also yields a
//! soundness condition that, once proved, justifies every rewrite it makes.

pub mod corpus;
pub mod engine;
pub mod frontend;
pub mod logic;
pub mod matcher;
pub mod smt;
pub mod soundness;

pub use engine::{run, run_batch, step, Exec, ReductionTrace, SideCondition, TraceStep, Verdict, DEFAULT_MAX_STEPS};
pub use frontend::{ParseError, Program, Strategy};
pub use logic::{Entailment, Signature};
pub use soundness::soundness_of;
