use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::Ident;

/// Names the parser treats specially; they cannot be declared.
pub const RESERVED: &[&str] = &["emp", "data_at", "field_addr", "True", "forall", "exists", "strategy"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    SpatialPred,
    PurePred,
    Function,
}

impl SymbolKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SymbolKind::SpatialPred => "spatial",
            SymbolKind::PurePred => "pure",
            SymbolKind::Function => "func",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolInfo {
    pub kind: SymbolKind,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclareError {
    #[error("`{0}` is a reserved built-in")]
    Reserved(Ident),
    #[error("`{0}` is already declared")]
    Duplicate(Ident),
}

/// Vocabulary of user predicates and function symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    entries: BTreeMap<Ident, SymbolInfo>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<Ident>, kind: SymbolKind, arity: usize) -> Result<(), DeclareError> {
        let name = name.into();
        if RESERVED.contains(&name.as_str()) {
            return Err(DeclareError::Reserved(name));
        }
        if self.entries.contains_key(&name) {
            return Err(DeclareError::Duplicate(name));
        }
        self.entries.insert(name, SymbolInfo { kind, arity });
        Ok(())
    }

    pub fn with(mut self, name: &str, kind: SymbolKind, arity: usize) -> Self {
        self.declare(name, kind, arity)
            .expect("builder declarations must be fresh");
        self
    }

    pub fn get(&self, name: &str) -> Option<SymbolInfo> {
        self.entries.get(name).copied()
    }

    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        self.get(name).map(|info| info.kind)
    }

    pub fn is_predicate(&self, name: &str) -> bool {
        matches!(self.kind_of(name), Some(SymbolKind::SpatialPred | SymbolKind::PurePred))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, SymbolInfo)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Union of two signatures; fails on any name declared in both.
    pub fn merge(&self, other: &Signature) -> Result<Signature, DeclareError> {
        let mut out = self.clone();
        for (name, info) in other.iter() {
            out.declare(name, info.kind, info.arity)?;
        }
        Ok(out)
    }
}
