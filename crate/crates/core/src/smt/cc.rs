//! Hash-consed term graph with union-find and congruence closure.

use std::collections::HashMap;

use crate::logic::{ArithOp, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Op {
    Var(String),
    Int(i64),
    Fun(String),
    Field(String),
    Arith(ArithOp),
    Pred(String),
    /// The class of true predicate applications.
    Top,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub op: Op,
    pub children: Vec<usize>,
}

/// Raised when interning would exceed the node budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded;

#[derive(Debug, Clone)]
pub struct EGraph {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    parent: Vec<usize>,
    budget: usize,
}

impl EGraph {
    pub fn new(budget: usize) -> Self {
        EGraph {
            nodes: Vec::new(),
            index: HashMap::new(),
            parent: Vec::new(),
            budget,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn add(&mut self, node: Node) -> Result<usize, BudgetExceeded> {
        if let Some(&id) = self.index.get(&node) {
            return Ok(id);
        }
        if self.nodes.len() >= self.budget {
            return Err(BudgetExceeded);
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        self.parent.push(id);
        Ok(id)
    }

    pub fn top(&mut self) -> Result<usize, BudgetExceeded> {
        self.add(Node {
            op: Op::Top,
            children: Vec::new(),
        })
    }

    pub fn intern(&mut self, t: &Term) -> Result<usize, BudgetExceeded> {
        let node = match t {
            Term::Int(k) => Node {
                op: Op::Int(*k),
                children: Vec::new(),
            },
            Term::Var(v) => Node {
                op: Op::Var(v.clone()),
                children: Vec::new(),
            },
            Term::FieldAddr(base, field) => Node {
                op: Op::Field(field.clone()),
                children: vec![self.intern(base)?],
            },
            Term::Apply(f, args) => Node {
                op: Op::Fun(f.clone()),
                children: args.iter().map(|a| self.intern(a)).collect::<Result<_, _>>()?,
            },
            Term::Arith(op, l, r) => Node {
                op: Op::Arith(*op),
                children: vec![self.intern(l)?, self.intern(r)?],
            },
        };
        self.add(node)
    }

    pub fn intern_pred(&mut self, name: &str, args: &[Term]) -> Result<usize, BudgetExceeded> {
        let children = args.iter().map(|a| self.intern(a)).collect::<Result<_, _>>()?;
        self.add(Node {
            op: Op::Pred(name.to_string()),
            children,
        })
    }

    pub fn find(&self, mut id: usize) -> usize {
        while self.parent[id] != id {
            id = self.parent[id];
        }
        id
    }

    fn compress(&mut self, id: usize) -> usize {
        let root = self.find(id);
        let mut cur = id;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns true if the classes were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.compress(a), self.compress(b));
        if ra == rb {
            return false;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep;
        true
    }

    /// Merges congruent applications until a fixpoint.
    pub fn close(&mut self) {
        loop {
            let mut table: HashMap<(Op, Vec<usize>), usize> = HashMap::new();
            let mut pending = Vec::new();
            for id in 0..self.nodes.len() {
                let node = &self.nodes[id];
                if node.children.is_empty() {
                    continue;
                }
                let key = (node.op.clone(), node.children.iter().map(|&c| self.find(c)).collect());
                match table.get(&key) {
                    Some(&other) => pending.push((other, id)),
                    None => {
                        table.insert(key, id);
                    }
                }
            }
            let mut changed = false;
            for (a, b) in pending {
                changed |= self.union(a, b);
            }
            if !changed {
                return;
            }
        }
    }

    /// Distinct integer literals sharing a class.
    pub fn literal_clash(&self) -> bool {
        let mut seen: HashMap<usize, i64> = HashMap::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if let Op::Int(k) = node.op {
                let root = self.find(id);
                if let Some(&other) = seen.get(&root) {
                    if other != k {
                        return true;
                    }
                } else {
                    seen.insert(root, k);
                }
            }
        }
        false
    }

    /// An integer literal in the class of `id`, if any.
    pub fn literal_of(&self, id: usize) -> Option<i64> {
        let root = self.find(id);
        self.nodes.iter().enumerate().find_map(|(n, node)| match node.op {
            Op::Int(k) if self.find(n) == root => Some(k),
            _ => None,
        })
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&id| self.find(id) == id).collect()
    }
}
