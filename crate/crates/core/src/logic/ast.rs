use std::collections::HashSet;
use std::fmt;

use crate::structures::Signature;

use super::LogicError;

/// Dense variable index into a formula's variable table.
pub type VarId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    True,
    False,
    Eq(VarId, VarId),
    Atom(String, Vec<VarId>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(VarId, Box<Node>),
    Forall(VarId, Box<Node>),
}

impl Node {
    pub fn not(self) -> Node {
        Node::Not(Box::new(self))
    }

    pub fn and(parts: Vec<Node>) -> Node {
        match parts.len() {
            0 => Node::True,
            1 => parts.into_iter().next().expect("one part"),
            _ => Node::And(parts),
        }
    }

    pub fn or(parts: Vec<Node>) -> Node {
        match parts.len() {
            0 => Node::False,
            1 => parts.into_iter().next().expect("one part"),
            _ => Node::Or(parts),
        }
    }

    pub fn implies(a: Node, b: Node) -> Node {
        Node::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Node, b: Node) -> Node {
        Node::Iff(Box::new(a), Box::new(b))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Node::True | Node::False | Node::Eq(..) | Node::Atom(..) => true,
            Node::Not(a) => a.is_quantifier_free(),
            Node::And(v) | Node::Or(v) => v.iter().all(Node::is_quantifier_free),
            Node::Implies(a, b) | Node::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Node::Exists(..) | Node::Forall(..) => false,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Node::True | Node::False | Node::Eq(..) | Node::Atom(..) => 0,
            Node::Not(a) | Node::Exists(_, a) | Node::Forall(_, a) => a.size(),
            Node::And(v) | Node::Or(v) => v.iter().map(Node::size).sum(),
            Node::Implies(a, b) | Node::Iff(a, b) => a.size() + b.size(),
        }
    }

    /// Unbound variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<VarId>, out: &mut Vec<VarId>) {
        let note = |v: VarId, bound: &Vec<VarId>, out: &mut Vec<VarId>| {
            if !bound.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        };
        match self {
            Node::True | Node::False => {}
            Node::Eq(a, b) => {
                note(*a, bound, out);
                note(*b, bound, out);
            }
            Node::Atom(_, args) => args.iter().for_each(|&v| note(v, bound, out)),
            Node::Not(a) => a.collect_free(bound, out),
            Node::And(v) | Node::Or(v) => v.iter().for_each(|n| n.collect_free(bound, out)),
            Node::Implies(a, b) | Node::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Node::Exists(x, a) | Node::Forall(x, a) => {
                bound.push(*x);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Checks every atom against `signature` (existence and arity).
    pub fn check_atoms(&self, signature: &Signature) -> Result<(), LogicError> {
        match self {
            Node::Atom(sym, args) => match signature.arity_of(sym) {
                None => Err(LogicError::UnknownSymbol {
                    symbol: sym.clone(),
                    position: None,
                }),
                Some(a) if a != args.len() => Err(LogicError::ArityMismatch {
                    symbol: sym.clone(),
                    expected: a,
                    got: args.len(),
                    position: None,
                }),
                Some(_) => Ok(()),
            },
            Node::True | Node::False | Node::Eq(..) => Ok(()),
            Node::Not(a) | Node::Exists(_, a) | Node::Forall(_, a) => a.check_atoms(signature),
            Node::And(v) | Node::Or(v) => v.iter().try_for_each(|n| n.check_atoms(signature)),
            Node::Implies(a, b) | Node::Iff(a, b) => {
                a.check_atoms(signature)?;
                b.check_atoms(signature)
            }
        }
    }

    /// Renames variables through `map`; `map` must cover every variable.
    pub fn map_vars(&self, map: &impl Fn(VarId) -> VarId) -> Node {
        match self {
            Node::True => Node::True,
            Node::False => Node::False,
            Node::Eq(a, b) => Node::Eq(map(*a), map(*b)),
            Node::Atom(s, args) => Node::Atom(s.clone(), args.iter().map(|&v| map(v)).collect()),
            Node::Not(a) => Node::Not(Box::new(a.map_vars(map))),
            Node::And(v) => Node::And(v.iter().map(|n| n.map_vars(map)).collect()),
            Node::Or(v) => Node::Or(v.iter().map(|n| n.map_vars(map)).collect()),
            Node::Implies(a, b) => Node::implies(a.map_vars(map), b.map_vars(map)),
            Node::Iff(a, b) => Node::iff(a.map_vars(map), b.map_vars(map)),
            Node::Exists(x, a) => Node::Exists(map(*x), Box::new(a.map_vars(map))),
            Node::Forall(x, a) => Node::Forall(map(*x), Box::new(a.map_vars(map))),
        }
    }

    /// Renames relation symbols through `rename` (identity when `None`).
    pub fn rename_symbols(&self, rename: &impl Fn(&str) -> Option<String>) -> Node {
        match self {
            Node::Atom(s, args) => Node::Atom(rename(s).unwrap_or_else(|| s.clone()), args.clone()),
            Node::True | Node::False | Node::Eq(..) => self.clone(),
            Node::Not(a) => Node::Not(Box::new(a.rename_symbols(rename))),
            Node::And(v) => Node::And(v.iter().map(|n| n.rename_symbols(rename)).collect()),
            Node::Or(v) => Node::Or(v.iter().map(|n| n.rename_symbols(rename)).collect()),
            Node::Implies(a, b) => Node::implies(a.rename_symbols(rename), b.rename_symbols(rename)),
            Node::Iff(a, b) => Node::iff(a.rename_symbols(rename), b.rename_symbols(rename)),
            Node::Exists(x, a) => Node::Exists(*x, Box::new(a.rename_symbols(rename))),
            Node::Forall(x, a) => Node::Forall(*x, Box::new(a.rename_symbols(rename))),
        }
    }

    fn collect_bound(&self, out: &mut Vec<VarId>) {
        match self {
            Node::True | Node::False | Node::Eq(..) | Node::Atom(..) => {}
            Node::Not(a) => a.collect_bound(out),
            Node::And(v) | Node::Or(v) => v.iter().for_each(|n| n.collect_bound(out)),
            Node::Implies(a, b) | Node::Iff(a, b) => {
                a.collect_bound(out);
                b.collect_bound(out);
            }
            Node::Exists(x, a) | Node::Forall(x, a) => {
                out.push(*x);
                a.collect_bound(out);
            }
        }
    }
}

/// Allocator of uniquely named variables, used when formulas are assembled
/// from pieces of other formulas.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    names: Vec<String>,
    taken: HashSet<String>,
}

impl VarPool {
    pub fn new() -> Self {
        VarPool::default()
    }

    /// A new variable named `base`, or `base'`, `base''`, … if taken.
    pub fn fresh(&mut self, base: &str) -> VarId {
        let mut name = base.to_string();
        while self.taken.contains(&name) {
            name.push('\'');
        }
        self.taken.insert(name.clone());
        self.names.push(name);
        self.names.len() - 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}

/// A first-order formula bound against a signature, with an ordered list of
/// free variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    node: Node,
    var_names: Vec<String>,
    free: Vec<VarId>,
    signature: Signature,
}

impl Formula {
    /// Assembles a formula. `free` must list every unbound variable of
    /// `node` exactly once; it may also list variables that do not occur.
    pub fn new(
        node: Node,
        var_names: Vec<String>,
        free: Vec<VarId>,
        signature: Signature,
    ) -> Result<Self, LogicError> {
        node.check_atoms(&signature)?;
        let actual = node.free_vars();
        for v in &actual {
            if !free.contains(v) {
                return Err(LogicError::UndeclaredVariable {
                    name: var_names.get(*v).cloned().unwrap_or_default(),
                    position: None,
                });
            }
        }
        let mut seen = HashSet::new();
        for v in &free {
            if *v >= var_names.len() || !seen.insert(*v) {
                return Err(LogicError::Syntax {
                    position: 0,
                    message: format!("free variable list repeats or overflows at index {v}"),
                });
            }
        }
        let mut bound = Vec::new();
        node.collect_bound(&mut bound);
        if bound.iter().any(|&v| v >= var_names.len()) {
            return Err(LogicError::Syntax {
                position: 0,
                message: "bound variable outside the variable table".into(),
            });
        }
        Ok(Formula {
            node,
            var_names,
            free,
            signature,
        })
    }

    /// Builds from a pool-allocated node.
    pub fn from_pool(
        node: Node,
        pool: VarPool,
        free: Vec<VarId>,
        signature: Signature,
    ) -> Result<Self, LogicError> {
        Formula::new(node, pool.into_names(), free, signature)
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.var_names[v]
    }

    pub fn free_vars(&self) -> &[VarId] {
        &self.free
    }

    pub fn free_var_names(&self) -> Vec<&str> {
        self.free.iter().map(|&v| self.var_names[v].as_str()).collect()
    }

    /// Number of free variables.
    pub fn arity(&self) -> usize {
        self.free.len()
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.node.is_quantifier_free()
    }

    /// Copies this formula's tree into `pool`: free variable `i` becomes
    /// `args[i]`, bound variables get fresh pool variables.
    pub fn instantiate(&self, pool: &mut VarPool, args: &[VarId]) -> Node {
        assert_eq!(args.len(), self.free.len(), "one argument per free variable");
        let mut map = vec![usize::MAX; self.var_names.len()];
        for (&f, &a) in self.free.iter().zip(args) {
            map[f] = a;
        }
        let mut bound = Vec::new();
        self.node.collect_bound(&mut bound);
        for b in bound {
            if map[b] == usize::MAX {
                map[b] = pool.fresh(&self.var_names[b]);
            }
        }
        self.node.map_vars(&|v| map[v])
    }

    /// Same formula over another signature (atoms are re-checked).
    pub fn with_signature(&self, signature: Signature) -> Result<Formula, LogicError> {
        self.node.check_atoms(&signature)?;
        Ok(Formula {
            signature,
            ..self.clone()
        })
    }

    /// Renames relation symbols and rebinds to `signature`.
    pub fn rename_symbols(
        &self,
        rename: &impl Fn(&str) -> Option<String>,
        signature: Signature,
    ) -> Result<Formula, LogicError> {
        Formula::new(
            self.node.rename_symbols(rename),
            self.var_names.clone(),
            self.free.clone(),
            signature,
        )
    }

    /// Free variables' names joined by commas, as used in scheme headers.
    pub fn header(&self) -> String {
        self.free_var_names().join(",")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.node, &self.var_names, 0)
    }
}

/// Precedence levels, loosest first: iff, implies, or, and, unary.
fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, names: &[String], ctx: u8) -> fmt::Result {
    let level = match node {
        Node::Iff(..) => 0,
        Node::Implies(..) => 1,
        Node::Or(..) => 2,
        Node::And(..) => 3,
        _ => 4,
    };
    let paren = level < ctx;
    if paren {
        write!(f, "(")?;
    }
    match node {
        Node::True => write!(f, "true")?,
        Node::False => write!(f, "false")?,
        Node::Eq(a, b) => write!(f, "{} = {}", names[*a], names[*b])?,
        Node::Atom(s, args) => {
            write!(f, "{s}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", names[*a])?;
            }
            write!(f, ")")?;
        }
        Node::Not(a) => {
            write!(f, "!")?;
            write_node(f, a, names, 4)?;
        }
        Node::And(v) | Node::Or(v) => {
            let op = if level == 3 { " & " } else { " | " };
            if v.is_empty() {
                write!(f, "{}", if level == 3 { "true" } else { "false" })?;
            }
            for (i, n) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, "{op}")?;
                }
                // Nested operators of the same kind are parenthesised so the
                // printed tree re-parses to the same shape.
                write_node(f, n, names, level + 1)?;
            }
        }
        // Chains of -> and <-> parse left-associatively.
        Node::Implies(a, b) | Node::Iff(a, b) => {
            let op = if level == 1 { " -> " } else { " <-> " };
            write_node(f, a, names, level)?;
            write!(f, "{op}")?;
            write_node(f, b, names, level + 1)?;
        }
        Node::Exists(x, a) | Node::Forall(x, a) => {
            let q = if matches!(node, Node::Exists(..)) { "exists" } else { "forall" };
            write!(f, "{q} {} (", names[*x])?;
            write_node(f, a, names, 0)?;
            write!(f, ")")?;
        }
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}
