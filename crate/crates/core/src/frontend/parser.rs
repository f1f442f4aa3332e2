//! Recursive-descent parsers for signatures, entailments, strategies and
//! assertions.
//!
//! `*` inside a term is multiplication unless the next token starts a
//! formula atom (`emp`, `data_at`, `True`, `!`, `~`, or a declared
//! predicate), in which case it separates conjuncts.

use std::collections::BTreeSet;

use super::error::{ErrorKind, ParseError};
use super::lexer::{lex, Tok, Token};
use super::strategy::*;
use crate::logic::*;

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, Default)]
struct Scope {
    bound: BTreeSet<Ident>,
    /// `?x` is legal only inside patterns.
    allow_binding: bool,
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    sig: &'a Signature,
    /// Present while parsing a strategy; bare variables must then be bound.
    scope: Option<Scope>,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], sig: &'a Signature) -> Self {
        Parser {
            toks,
            pos: 0,
            sig,
            scope: None,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError::new(kind, tok.line, tok.col, message)
    }

    fn error(&self, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        self.error_at(self.here(), kind, message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(
            ErrorKind::Syntax,
            format!("expected {expected}, found {}", self.peek().describe()),
        )
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<Token> {
        if self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of input")),
        }
    }

    /// A plain identifier usable as a variable or strategy name.
    fn binder_name(&mut self) -> PResult<(Ident, Token)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if RESERVED.contains(&name.as_str()) {
                    return Err(self.error(ErrorKind::Syntax, format!("`{name}` is reserved")));
                }
                if self.sig.get(&name).is_some() {
                    return Err(self.error(
                        ErrorKind::Syntax,
                        format!("`{name}` is a declared symbol, not a variable"),
                    ));
                }
                Ok((name, self.bump()))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    /// Runs `f`, rewinding position and scope on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let pos = self.pos;
        let scope = self.scope.clone();
        let result = f(self);
        if result.is_err() {
            self.pos = pos;
            self.scope = scope;
        }
        result
    }

    fn at_section_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Colon
            || self.is_keyword("strategy")
            || self.peek() == &Tok::Eof
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    t = Term::add(t, self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    t = Term::sub(t, self.product()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn star_separates_conjuncts(&self) -> bool {
        match self.peek_at(1) {
            Tok::Bang | Tok::Tilde => true,
            Tok::Ident(s) => matches!(s.as_str(), "emp" | "data_at" | "True") || self.sig.is_predicate(s),
            _ => false,
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut t = self.unary_term()?;
        while self.peek() == &Tok::Star && !self.star_separates_conjuncts() {
            self.bump();
            t = Term::mul(t, self.unary_term()?);
        }
        Ok(t)
    }

    fn int_literal(&self, value: u64, negative: bool, tok: &Token) -> PResult<i64> {
        let wide = if negative { -(value as i128) } else { value as i128 };
        i64::try_from(wide).map_err(|_| self.error_at(tok, ErrorKind::Syntax, "integer literal out of range"))
    }

    fn unary_term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                if let Tok::Int(value) = *self.peek() {
                    let tok = self.bump();
                    return Ok(Term::Int(self.int_literal(value, true, &tok)?));
                }
                Ok(Term::sub(Term::Int(0), self.unary_term()?))
            }
            Tok::Int(value) => {
                let tok = self.bump();
                Ok(Term::Int(self.int_literal(value, false, &tok)?))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Question => {
                let q = self.bump();
                let allowed = self.scope.as_ref().is_some_and(|s| s.allow_binding);
                if !allowed {
                    return Err(self.error_at(&q, ErrorKind::Syntax, "`?` binders are only allowed in patterns"));
                }
                let (name, _) = self.binder_name()?;
                // A repeated `?x` constrains like a bare occurrence.
                self.scope.as_mut().unwrap().bound.insert(name.clone());
                Ok(Term::Var(name))
            }
            Tok::Ident(name) => self.ident_term(name),
            _ => Err(self.unexpected("term")),
        }
    }

    fn ident_term(&mut self, name: String) -> PResult<Term> {
        let tok = self.bump();
        if name == "field_addr" {
            self.expect(&Tok::LParen, "`(`")?;
            let base = self.term()?;
            self.expect(&Tok::Comma, "`,`")?;
            let field = match self.peek().clone() {
                Tok::Ident(f) => {
                    self.bump();
                    f
                }
                _ => return Err(self.unexpected("field name")),
            };
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(Term::field_addr(base, field));
        }
        if RESERVED.contains(&name.as_str()) {
            return Err(self.error_at(&tok, ErrorKind::Syntax, format!("expected term, found `{name}`")));
        }
        match self.sig.get(&name) {
            Some(SymbolInfo {
                kind: SymbolKind::Function,
                arity,
            }) => {
                let args = if self.peek() == &Tok::LParen {
                    self.args()?
                } else {
                    Vec::new()
                };
                self.check_arity(&tok, &name, arity, args.len())?;
                Ok(Term::Apply(name, args))
            }
            Some(info) => Err(self.error_at(
                &tok,
                ErrorKind::Syntax,
                format!("`{name}` is a {} predicate, not a function", info.kind.keyword()),
            )),
            None if self.peek() == &Tok::LParen => {
                Err(self.error_at(&tok, ErrorKind::UnknownIdentifier, format!("`{name}` is not declared")))
            }
            None => {
                if let Some(scope) = &self.scope {
                    if !scope.bound.contains(&name) {
                        return Err(self.error_at(
                            &tok,
                            ErrorKind::Scope,
                            format!("variable `{name}` is used before any binding occurrence"),
                        ));
                    }
                }
                Ok(Term::Var(name))
            }
        }
    }

    fn check_arity(&self, tok: &Token, name: &str, expected: usize, found: usize) -> PResult<()> {
        if expected == found {
            Ok(())
        } else {
            Err(self.error_at(
                tok,
                ErrorKind::ArityMismatch,
                format!("`{name}` expects {expected} argument(s), found {found}"),
            ))
        }
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RParen, "`,` or `)`")?;
            return Ok(out);
        }
    }

    fn predicate_args(&mut self, tok: &Token, name: &str, arity: usize) -> PResult<Vec<Term>> {
        let args = if self.peek() == &Tok::LParen {
            self.args()?
        } else {
            Vec::new()
        };
        self.check_arity(tok, name, arity, args.len())?;
        Ok(args)
    }

    // ---- pure formulas ----

    fn pure_expr(&mut self) -> PResult<PureFormula> {
        let mut l = self.pure_implies()?;
        while self.eat(&Tok::Iff) {
            l = PureFormula::bin(BinOp::Iff, l, self.pure_implies()?);
        }
        Ok(l)
    }

    fn pure_implies(&mut self) -> PResult<PureFormula> {
        let l = self.pure_or()?;
        if self.eat(&Tok::Arrow) {
            return Ok(PureFormula::bin(BinOp::Implies, l, self.pure_implies()?));
        }
        Ok(l)
    }

    fn pure_or(&mut self) -> PResult<PureFormula> {
        let mut l = self.pure_and()?;
        while self.eat(&Tok::OrOr) {
            l = PureFormula::bin(BinOp::Or, l, self.pure_and()?);
        }
        Ok(l)
    }

    fn pure_and(&mut self) -> PResult<PureFormula> {
        let mut l = self.pure_unary()?;
        while self.eat(&Tok::AndAnd) {
            l = PureFormula::bin(BinOp::And, l, self.pure_unary()?);
        }
        Ok(l)
    }

    fn pure_unary(&mut self) -> PResult<PureFormula> {
        match self.peek().clone() {
            Tok::Bang | Tok::Tilde => {
                self.bump();
                Ok(PureFormula::not(self.pure_unary()?))
            }
            Tok::LParen => {
                let grouped = self.attempt(|p| {
                    p.bump();
                    let inner = p.pure_expr()?;
                    p.expect(&Tok::RParen, "`)`")?;
                    Ok(inner)
                });
                match grouped {
                    Ok(f) => Ok(f),
                    Err(_) => self.relation(),
                }
            }
            Tok::Ident(name) if name == "True" => {
                self.bump();
                Ok(PureFormula::True)
            }
            Tok::Ident(name) => match self.sig.get(&name) {
                Some(SymbolInfo {
                    kind: SymbolKind::PurePred,
                    arity,
                }) => {
                    let tok = self.bump();
                    let args = self.predicate_args(&tok, &name, arity)?;
                    Ok(PureFormula::Pred(name, args))
                }
                Some(SymbolInfo {
                    kind: SymbolKind::SpatialPred,
                    ..
                }) => Err(self.error(
                    ErrorKind::Syntax,
                    format!("spatial predicate `{name}` where a pure formula is expected"),
                )),
                _ if name == "emp" || name == "data_at" => Err(self.error(
                    ErrorKind::Syntax,
                    format!("spatial `{name}` where a pure formula is expected"),
                )),
                _ => self.relation(),
            },
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> PResult<PureFormula> {
        let l = self.term()?;
        let op = match self.peek() {
            Tok::EqEq => None,
            Tok::Ne => Some(RelOp::Ne),
            Tok::Lt => Some(RelOp::Lt),
            Tok::Le => Some(RelOp::Le),
            Tok::Gt => Some(RelOp::Gt),
            Tok::Ge => Some(RelOp::Ge),
            _ => return Err(self.unexpected("relational operator")),
        };
        self.bump();
        let r = self.term()?;
        Ok(match op {
            None => PureFormula::Eq(l, r),
            Some(op) => PureFormula::Rel(op, l, r),
        })
    }

    // ---- formulas and heaps ----

    /// A spatial atom if the next token begins one.
    fn spatial_atom(&mut self) -> PResult<Option<SpatialAtom>> {
        let name = match self.peek() {
            Tok::Ident(name) => name.clone(),
            _ => return Ok(None),
        };
        if name == "emp" {
            self.bump();
            return Ok(Some(SpatialAtom::Emp));
        }
        if name == "data_at" {
            self.bump();
            self.expect(&Tok::LParen, "`(`")?;
            let addr = self.term()?;
            self.expect(&Tok::Comma, "`,`")?;
            let value = self.term()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(Some(SpatialAtom::DataAt(addr, value)));
        }
        if let Some(SymbolInfo {
            kind: SymbolKind::SpatialPred,
            arity,
        }) = self.sig.get(&name)
        {
            let tok = self.bump();
            let args = self.predicate_args(&tok, &name, arity)?;
            return Ok(Some(SpatialAtom::Pred(name, args)));
        }
        Ok(None)
    }

    /// A conjunct at heap level: spatial atom or unary pure formula.
    fn formula_atom(&mut self) -> PResult<Formula> {
        match self.spatial_atom()? {
            Some(s) => Ok(Formula::Spatial(s)),
            None => Ok(Formula::Pure(self.pure_unary()?)),
        }
    }

    /// A formula inside delimiters, where full pure syntax is allowed.
    fn formula_full(&mut self) -> PResult<Formula> {
        match self.spatial_atom()? {
            Some(s) => Ok(Formula::Spatial(s)),
            None => Ok(Formula::Pure(self.pure_expr()?)),
        }
    }

    fn heap(&mut self) -> PResult<SymbolicHeap> {
        let mut heap = SymbolicHeap::new();
        loop {
            heap.insert(self.formula_atom()?);
            if !(self.eat(&Tok::Star) || self.eat(&Tok::AndAnd)) {
                return Ok(heap);
            }
        }
    }

    fn binder_list(&mut self) -> PResult<Vec<Ident>> {
        let mut names = Vec::new();
        loop {
            let (name, _) = self.binder_name()?;
            names.push(name);
            if self.eat(&Tok::Comma) {
                return Ok(names);
            }
            if !matches!(self.peek(), Tok::Ident(_)) {
                return Err(self.unexpected("identifier or `,`"));
            }
        }
    }

    fn entailment(&mut self) -> PResult<Entailment> {
        let start = self.here().clone();
        let universals = if self.is_keyword("forall") {
            self.bump();
            self.binder_list()?
        } else {
            Vec::new()
        };
        let lhs = self.heap()?;
        self.expect(&Tok::Turnstile, "`|--`")?;
        let existentials = if self.is_keyword("exists") {
            self.bump();
            self.binder_list()?
        } else {
            Vec::new()
        };
        let rhs = self.heap()?;
        let e = Entailment {
            universals,
            lhs,
            existentials,
            rhs,
        };
        let violations = check_well_formed(&e);
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(self.error_at(&start, ErrorKind::IllFormedEntailment, text.join("; ")));
        }
        Ok(e)
    }

    // ---- signatures ----

    fn signature(&mut self) -> PResult<Signature> {
        let mut sig = Signature::new();
        while self.peek() != &Tok::Eof {
            let kind = match self.peek() {
                Tok::Ident(k) if k == "spatial" => SymbolKind::SpatialPred,
                Tok::Ident(k) if k == "pure" => SymbolKind::PurePred,
                Tok::Ident(k) if k == "func" => SymbolKind::Function,
                _ => return Err(self.unexpected("`spatial`, `pure` or `func`")),
            };
            self.bump();
            let name_tok = self.here().clone();
            let name = match self.peek().clone() {
                Tok::Ident(n) => {
                    self.bump();
                    n
                }
                _ => return Err(self.unexpected("symbol name")),
            };
            self.expect(&Tok::Slash, "`/`")?;
            let arity = match *self.peek() {
                Tok::Int(n) => {
                    self.bump();
                    n as usize
                }
                _ => return Err(self.unexpected("arity")),
            };
            self.expect(&Tok::Semi, "`;`")?;
            sig.declare(name, kind, arity)
                .map_err(|e| self.error_at(&name_tok, ErrorKind::DuplicateDeclaration, e.to_string()))?;
        }
        Ok(sig)
    }

    // ---- strategies ----

    fn scope_mut(&mut self) -> &mut Scope {
        self.scope.as_mut().expect("strategy scope")
    }

    fn is_bound(&self, name: &str) -> bool {
        self.scope.as_ref().is_some_and(|s| s.bound.contains(name))
    }

    fn section_keyword(&mut self) -> PResult<(String, Token)> {
        match self.peek().clone() {
            Tok::Ident(kw) => {
                let tok = self.bump();
                self.expect(&Tok::Colon, "`:`")?;
                Ok((kw, tok))
            }
            _ => Err(self.unexpected("section keyword")),
        }
    }

    fn strategy(&mut self) -> PResult<Strategy> {
        if !self.is_keyword("strategy") {
            return Err(self.unexpected("`strategy`"));
        }
        self.bump();
        let name_tok = self.here().clone();
        let name = match self.peek().clone() {
            Tok::Ident(n) if !RESERVED.contains(&n.as_str()) => {
                self.bump();
                n
            }
            _ => return Err(self.unexpected("strategy name")),
        };
        self.scope = Some(Scope::default());
        let mut strategy = Strategy {
            name,
            priority: DEFAULT_PRIORITY,
            patterns: Vec::new(),
            checks: Vec::new(),
            action: Action::default(),
        };
        // 0 start, 1 priority seen, 2 patterns, 3 checks, 4 action
        let mut phase = 0;
        while !(self.is_keyword("strategy") || self.peek() == &Tok::Eof) {
            let (kw, kw_tok) = self.section_keyword()?;
            let order_error =
                |p: &Self| p.error_at(&kw_tok, ErrorKind::Syntax, format!("section `{kw}` is out of order"));
            match kw.as_str() {
                "priority" => {
                    if phase != 0 {
                        return Err(order_error(self));
                    }
                    phase = 1;
                    let negative = self.eat(&Tok::Minus);
                    strategy.priority = match *self.peek() {
                        Tok::Int(n) => {
                            let tok = self.bump();
                            self.int_literal(n, negative, &tok)?
                        }
                        _ => return Err(self.unexpected("priority number")),
                    };
                }
                "left" | "right" => {
                    if phase > 2 {
                        return Err(order_error(self));
                    }
                    phase = 2;
                    let side = if kw == "left" { Side::Left } else { Side::Right };
                    self.patterns(side, &mut strategy.patterns)?;
                }
                "check" => {
                    if phase != 2 {
                        return Err(order_error(self));
                    }
                    phase = 3;
                    self.checks(&mut strategy.checks)?;
                }
                "action" => {
                    if !(phase == 2 || phase == 3) {
                        return Err(order_error(self));
                    }
                    phase = 4;
                    strategy.action = self.action()?;
                }
                _ => {
                    return Err(self.error_at(&kw_tok, ErrorKind::Syntax, format!("unknown section `{kw}`")));
                }
            }
        }
        self.scope = None;
        if strategy.patterns.is_empty() {
            return Err(self.error_at(
                &name_tok,
                ErrorKind::Syntax,
                format!("strategy `{}` has no patterns", strategy.name),
            ));
        }
        Ok(strategy)
    }

    fn patterns(&mut self, side: Side, out: &mut Vec<Pattern>) -> PResult<()> {
        let mut count = 0;
        let mut binders: Vec<(Ident, Token)> = Vec::new();
        while !self.at_section_start() {
            if self.is_keyword("exists") {
                let tok = self.bump();
                if side == Side::Left {
                    return Err(self.error_at(
                        &tok,
                        ErrorKind::Syntax,
                        "`exists` binders are only allowed in right patterns",
                    ));
                }
                let (name, name_tok) = self.binder_name()?;
                self.expect(&Tok::Comma, "`,`")?;
                binders.push((name, name_tok));
                continue;
            }
            self.scope_mut().allow_binding = true;
            let atom = self.formula_atom();
            self.scope_mut().allow_binding = false;
            let atom = atom?;
            for (name, tok) in &binders {
                if !self.is_bound(name) {
                    return Err(self.error_at(
                        tok,
                        ErrorKind::Scope,
                        format!("exists binder `{name}` has no binding occurrence"),
                    ));
                }
            }
            out.push(Pattern {
                side,
                exists_binders: binders.drain(..).map(|(n, _)| n).collect(),
                atom,
            });
            count += 1;
            let _ = self.eat(&Tok::Star) || self.eat(&Tok::AndAnd);
        }
        if !binders.is_empty() {
            return Err(self.unexpected("pattern after `exists` binder"));
        }
        if count == 0 {
            return Err(self.unexpected("pattern"));
        }
        Ok(())
    }

    fn checks(&mut self, out: &mut Vec<Check>) -> PResult<()> {
        while !self.at_section_start() {
            let kw = match self.peek().clone() {
                Tok::Ident(kw) => kw,
                _ => return Err(self.unexpected("check")),
            };
            let build: fn(PureFormula) -> Check = match kw.as_str() {
                "left_absent" => Check::LeftAbsent,
                "right_absent" => Check::RightAbsent,
                "infer" => Check::Infer,
                _ => return Err(self.unexpected("`left_absent`, `right_absent` or `infer`")),
            };
            self.bump();
            self.expect(&Tok::LParen, "`(`")?;
            let p = self.pure_expr()?;
            self.expect(&Tok::RParen, "`)`")?;
            out.push(build(p));
            if !self.eat(&Tok::Semi) && !self.at_section_start() {
                return Err(self.unexpected("`;`"));
            }
        }
        Ok(())
    }

    fn action(&mut self) -> PResult<Action> {
        let mut ops = Vec::new();
        let mut instantiate: Option<(Ident, Term, Token)> = None;
        let mut first_tok: Option<Token> = None;
        while !self.at_section_start() {
            let kw = match self.peek().clone() {
                Tok::Ident(kw) => kw,
                _ => return Err(self.unexpected("action item")),
            };
            let tok = self.bump();
            first_tok.get_or_insert_with(|| tok.clone());
            self.expect(&Tok::LParen, "`(`")?;
            match kw.as_str() {
                "left_add" | "right_add" | "left_erase" | "right_erase" => {
                    let f = self.formula_full()?;
                    ops.push(match kw.as_str() {
                        "left_add" => Operation::left_add(f),
                        "right_add" => Operation::right_add(f),
                        "left_erase" => Operation::left_erase(f),
                        _ => Operation::right_erase(f),
                    });
                }
                "forall_add" | "exist_add" => {
                    let name_tok = self.here().clone();
                    let (name, _) = self.binder_name()?;
                    if self.is_bound(&name) {
                        return Err(self.error_at(
                            &name_tok,
                            ErrorKind::Scope,
                            format!("`{name}` is already bound in this strategy"),
                        ));
                    }
                    self.scope_mut().bound.insert(name.clone());
                    ops.push(if kw == "forall_add" {
                        Operation::ForallAdd(name)
                    } else {
                        Operation::ExistAdd(name)
                    });
                }
                "instantiate" => {
                    let name_tok = self.here().clone();
                    let (name, _) = self.binder_name()?;
                    if !self.is_bound(&name) {
                        return Err(self.error_at(
                            &name_tok,
                            ErrorKind::Scope,
                            format!("instantiate target `{name}` is not bound"),
                        ));
                    }
                    self.expect(&Tok::Arrow, "`->`")?;
                    let t = self.term()?;
                    if instantiate.is_some() {
                        return Err(self.error_at(
                            &tok,
                            ErrorKind::MixedInstantiate,
                            "only one instantiate is allowed",
                        ));
                    }
                    instantiate = Some((name, t, tok.clone()));
                }
                _ => {
                    return Err(self.error_at(&tok, ErrorKind::Syntax, format!("unknown action `{kw}`")));
                }
            }
            self.expect(&Tok::RParen, "`)`")?;
            if !self.eat(&Tok::Semi) && !self.at_section_start() {
                return Err(self.unexpected("`;`"));
            }
        }
        match instantiate {
            Some((_, _, tok)) if !ops.is_empty() => Err(self.error_at(
                &tok,
                ErrorKind::MixedInstantiate,
                "instantiate cannot be combined with other operations",
            )),
            Some((x, t, _)) => Ok(Action::Instantiate(x, t)),
            None => Ok(Action::Ops(ops)),
        }
    }

    // ---- assertions ----

    fn assertion(&mut self) -> PResult<Assertion> {
        if (self.is_keyword("forall") || self.is_keyword("exists")) && matches!(self.peek_at(1), Tok::Ident(_)) {
            let universal = self.is_keyword("forall");
            self.bump();
            let vars = self.binder_list()?;
            let body = self.assertion()?;
            return Ok(if universal {
                Assertion::forall(vars, body)
            } else {
                Assertion::exists(vars, body)
            });
        }
        let l = self.assertion_conj()?;
        if self.eat(&Tok::Wand) {
            return Ok(Assertion::wand(l, self.assertion()?));
        }
        Ok(l)
    }

    fn assertion_conj(&mut self) -> PResult<Assertion> {
        let mut parts = vec![self.assertion_sep()?];
        while self.eat(&Tok::AndAnd) {
            parts.push(self.assertion_sep()?);
        }
        Ok(flatten_if_many(parts, Assertion::And))
    }

    fn assertion_sep(&mut self) -> PResult<Assertion> {
        let mut parts = vec![self.assertion_prim()?];
        while self.eat(&Tok::Star) {
            parts.push(self.assertion_prim()?);
        }
        Ok(flatten_if_many(parts, Assertion::SepConj))
    }

    fn assertion_prim(&mut self) -> PResult<Assertion> {
        if self.peek() == &Tok::LParen {
            let pure = self.attempt(|p| {
                p.bump();
                let inner = p.pure_expr()?;
                p.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            });
            if let Ok(f) = pure {
                return Ok(Assertion::pure(f));
            }
            let grouped = self.attempt(|p| {
                p.bump();
                let inner = p.assertion()?;
                p.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            });
            if let Ok(a) = grouped {
                return Ok(a);
            }
        }
        Ok(Assertion::formula(self.formula_atom()?))
    }
}

fn flatten_if_many(mut parts: Vec<Assertion>, build: fn(Vec<Assertion>) -> Assertion) -> Assertion {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        build(parts)
    }
}

fn tokens(text: &str) -> PResult<Vec<Token>> {
    Ok(lex(text)?.tokens)
}

pub fn parse_signature(text: &str) -> PResult<Signature> {
    let toks = tokens(text)?;
    let empty = Signature::new();
    Parser::new(&toks, &empty).signature()
}

/// Splits the token stream at whitespace-only lines.
fn blocks(text: &str) -> PResult<Vec<Vec<Token>>> {
    let lexed = lex(text)?;
    let mut out: Vec<Vec<Token>> = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut prev_line = 0;
    for tok in lexed.tokens {
        if tok.tok == Tok::Eof {
            if !current.is_empty() {
                current.push(tok);
                out.push(current);
            }
            break;
        }
        let separated = !current.is_empty()
            && tok.line > prev_line + 1
            && lexed.blank_lines.range(prev_line + 1..tok.line).next().is_some();
        if separated {
            let eof = Token {
                tok: Tok::Eof,
                line: tok.line,
                col: tok.col,
            };
            current.push(eof);
            out.push(std::mem::take(&mut current));
        }
        prev_line = tok.line;
        current.push(tok);
    }
    Ok(out)
}

pub fn parse_entailments(text: &str, sig: &Signature) -> PResult<Vec<Entailment>> {
    blocks(text)?
        .iter()
        .map(|block| {
            let mut p = Parser::new(block, sig);
            let e = p.entailment()?;
            p.expect_eof()?;
            Ok(e)
        })
        .collect()
}

fn parse_whole<T>(text: &str, sig: &Signature, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let toks = tokens(text)?;
    let mut p = Parser::new(&toks, sig);
    let out = f(&mut p)?;
    p.expect_eof()?;
    Ok(out)
}

pub fn parse_entailment(text: &str, sig: &Signature) -> PResult<Entailment> {
    parse_whole(text, sig, |p| p.entailment())
}

pub fn parse_heap(text: &str, sig: &Signature) -> PResult<SymbolicHeap> {
    parse_whole(text, sig, |p| p.heap())
}

pub fn parse_term(text: &str, sig: &Signature) -> PResult<Term> {
    parse_whole(text, sig, |p| p.term())
}

pub fn parse_pure(text: &str, sig: &Signature) -> PResult<PureFormula> {
    parse_whole(text, sig, |p| p.pure_expr())
}

pub fn parse_formula(text: &str, sig: &Signature) -> PResult<Formula> {
    parse_whole(text, sig, |p| p.formula_full())
}

pub fn parse_assertion(text: &str, sig: &Signature) -> PResult<Assertion> {
    parse_whole(text, sig, |p| p.assertion())
}

/// `hypothesis |-- conclusion`.
pub fn parse_condition(text: &str, sig: &Signature) -> PResult<(Assertion, Assertion)> {
    parse_whole(text, sig, |p| {
        let hyp = p.assertion()?;
        p.expect(&Tok::Turnstile, "`|--`")?;
        Ok((hyp, p.assertion()?))
    })
}

/// Parses every strategy block, collecting all diagnostics. Blocks with
/// errors are skipped; parsing resumes at the next `strategy` header.
pub fn validate_strategies(text: &str, sig: &Signature) -> (Program, Vec<ParseError>) {
    let toks = match tokens(text) {
        Ok(t) => t,
        Err(e) => return (Program::default(), vec![e]),
    };
    let mut p = Parser::new(&toks, sig);
    let mut program = Program::default();
    let mut errors = Vec::new();
    while p.peek() != &Tok::Eof {
        let header = p.here().clone();
        match p.strategy() {
            Ok(s) => {
                if program.get(&s.name).is_some() {
                    errors.push(ParseError::new(
                        ErrorKind::DuplicateStrategy,
                        header.line,
                        header.col,
                        format!("strategy `{}` is defined twice", s.name),
                    ));
                } else {
                    program.strategies.push(s);
                }
            }
            Err(e) => {
                errors.push(e);
                p.scope = None;
                if p.pos == 0 || p.here() == &header {
                    p.bump();
                }
                while !(p.is_keyword("strategy") || p.peek() == &Tok::Eof) {
                    p.bump();
                }
            }
        }
    }
    (program, errors)
}

pub fn parse_strategies(text: &str, sig: &Signature) -> PResult<Program> {
    let (program, mut errors) = validate_strategies(text, sig);
    if errors.is_empty() {
        Ok(program)
    } else {
        Err(errors.remove(0))
    }
}
