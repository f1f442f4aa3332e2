//! Strategy libraries and entailments shipped with the crate.

use crate::engine::Verdict;
use crate::frontend::{parse_entailments, parse_signature, parse_strategies, ParseError, Program};
use crate::logic::{Entailment, Signature};

pub const SLL_SIG: &str = include_str!("../corpus/sll.sig");
pub const SLL_STG: &str = include_str!("../corpus/sll.stg");
pub const ARRAY_SIG: &str = include_str!("../corpus/array.sig");
pub const ARRAY_STG: &str = include_str!("../corpus/array.stg");
pub const COMMON_STG: &str = include_str!("../corpus/common.stg");

pub const SLL_CONCAT: &str = include_str!("../corpus/sll_concat.sle");
pub const SLL_CYCLE: &str = include_str!("../corpus/sll_cycle.sle");
pub const ARRAY_ACCESS: &str = include_str!("../corpus/array_access.sle");
pub const ARRAY_FRAME: &str = include_str!("../corpus/array_frame.sle");
pub const ARRAY_LOOP: &str = include_str!("../corpus/array_loop.sle");
pub const CELLS: &str = include_str!("../corpus/cells.sle");

/// An entailment file together with the library it is meant for.
#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub name: &'static str,
    pub sig: &'static str,
    pub strategies: &'static str,
    pub entailments: &'static str,
    /// One verdict per entailment in the file.
    pub expect: &'static [Verdict],
}

pub const CASES: &[Case] = &[
    Case {
        name: "sll_concat",
        sig: SLL_SIG,
        strategies: SLL_STG,
        entailments: SLL_CONCAT,
        expect: &[Verdict::Purified],
    },
    Case {
        name: "sll_cycle",
        sig: SLL_SIG,
        strategies: SLL_STG,
        entailments: SLL_CYCLE,
        expect: &[Verdict::Stuck],
    },
    Case {
        name: "array_access",
        sig: ARRAY_SIG,
        strategies: ARRAY_STG,
        entailments: ARRAY_ACCESS,
        expect: &[Verdict::FrameInferred, Verdict::Purified],
    },
    Case {
        name: "array_frame",
        sig: ARRAY_SIG,
        strategies: ARRAY_STG,
        entailments: ARRAY_FRAME,
        expect: &[Verdict::FrameInferred],
    },
    Case {
        name: "array_loop",
        sig: ARRAY_SIG,
        strategies: ARRAY_STG,
        entailments: ARRAY_LOOP,
        expect: &[Verdict::Purified, Verdict::Purified, Verdict::Purified],
    },
    Case {
        name: "cells",
        sig: "",
        strategies: COMMON_STG,
        entailments: CELLS,
        expect: &[Verdict::Purified],
    },
];

pub struct Loaded {
    pub sig: Signature,
    pub program: Program,
    pub entailments: Vec<Entailment>,
}

impl Case {
    pub fn load(&self) -> Result<Loaded, ParseError> {
        let sig = parse_signature(self.sig)?;
        let program = parse_strategies(self.strategies, &sig)?;
        let entailments = parse_entailments(self.entailments, &sig)?;
        Ok(Loaded {
            sig,
            program,
            entailments,
        })
    }
}

pub fn case(name: &str) -> Option<&'static Case> {
    CASES.iter().find(|c| c.name == name)
}
