//! The object language and its structural utilities.

pub mod ast;
pub mod equiv;
pub mod normalize;
pub mod signature;
pub mod subst;
pub mod wf;

pub use ast::*;
pub use equiv::{assertion_equiv, entailment_equiv, heap_multiset_eq};
pub use normalize::normalize;
pub use signature::{DeclareError, Signature, SymbolInfo, SymbolKind, RESERVED};
pub use subst::{fresh_name, CaptureError, Substitute, Vars};
pub use wf::{check_well_formed, well_formed, WfViolation};
