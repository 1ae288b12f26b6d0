use crate::logic::{Formula, Node, VarId, VarPool};
use crate::structures::Signature;

use super::{InterpError, InterpretationScheme};

struct Translator<'a> {
    scheme: &'a InterpretationScheme,
    pool: VarPool,
    /// Each variable of the target formula becomes `p` source variables.
    map: Vec<Vec<VarId>>,
}

impl Translator<'_> {
    fn domain(&mut self, vars: &[VarId]) -> Node {
        self.scheme.domain_formula().instantiate(&mut self.pool, vars)
    }

    fn node(&mut self, node: &Node) -> Node {
        match node {
            Node::True => Node::True,
            Node::False => Node::False,
            Node::Eq(a, b) => Node::and(
                self.map[*a]
                    .iter()
                    .zip(&self.map[*b])
                    .map(|(&x, &y)| Node::Eq(x, y))
                    .collect(),
            ),
            Node::Atom(name, args) => {
                let vars: Vec<VarId> = args.iter().flat_map(|&a| self.map[a].clone()).collect();
                let rho = self
                    .scheme
                    .relation_formula(name)
                    .expect("atoms checked against the target signature");
                rho.instantiate(&mut self.pool, &vars)
            }
            Node::Not(a) => self.node(a).not(),
            Node::And(v) => Node::And(v.iter().map(|n| self.node(n)).collect()),
            Node::Or(v) => Node::Or(v.iter().map(|n| self.node(n)).collect()),
            Node::Implies(a, b) => Node::implies(self.node(a), self.node(b)),
            Node::Iff(a, b) => Node::iff(self.node(a), self.node(b)),
            Node::Exists(x, body) => {
                let guard = self.domain(&self.map[*x].clone());
                let inner = Node::and(vec![guard, self.node(body)]);
                self.map[*x].iter().rev().fold(inner, |acc, &v| Node::Exists(v, Box::new(acc)))
            }
            Node::Forall(x, body) => {
                let guard = self.domain(&self.map[*x].clone());
                let inner = Node::implies(guard, self.node(body));
                self.map[*x].iter().rev().fold(inner, |acc, &v| Node::Forall(v, Box::new(acc)))
            }
        }
    }
}

/// `Ĩ(φ)`: a source formula with `p` free variables per free variable of
/// `φ`, satisfied exactly by the concatenated tuples of `φ(I(A))`.
pub fn translate_formula(i: &InterpretationScheme, phi: &Formula) -> Result<Formula, InterpError> {
    let phi = phi.with_signature(i.target().clone())?;
    let p = i.exponent();
    let mut pool = VarPool::new();
    let mut map = vec![Vec::new(); phi.var_count()];
    // Free variables first so their names stay clean.
    let mut order: Vec<VarId> = phi.free_vars().to_vec();
    order.extend((0..phi.var_count()).filter(|v| !phi.free_vars().contains(v)));
    for v in order {
        let base = phi.var_name(v).to_string();
        map[v] = (1..=p).map(|k| pool.fresh(&format!("{base}_{k}"))).collect();
    }
    let mut t = Translator { scheme: i, pool, map };
    let mut parts = vec![t.node(phi.node())];
    for &x in phi.free_vars() {
        let vars = t.map[x].clone();
        parts.push(t.domain(&vars));
    }
    let free: Vec<VarId> = phi.free_vars().iter().flat_map(|&x| t.map[x].clone()).collect();
    Ok(Formula::from_pool(Node::and(parts), t.pool, free, i.source().clone())?)
}

/// The scheme applying `first` and then `second`, of exponent `p_1·p_2`.
pub fn compose(
    first: &InterpretationScheme,
    second: &InterpretationScheme,
) -> Result<InterpretationScheme, InterpError> {
    if first.target() != second.source() {
        return Err(InterpError::Composition {
            expected: first.target().to_string(),
            got: second.source().to_string(),
        });
    }
    let domain = translate_formula(first, second.domain_formula())?;
    let relations = second
        .relation_formulas()
        .iter()
        .map(|f| translate_formula(first, f))
        .collect::<Result<_, _>>()?;
    InterpretationScheme::new(
        format!("{}_then_{}", first.name(), second.name()),
        first.exponent() * second.exponent(),
        first.source().clone(),
        second.target().clone(),
        domain,
        relations,
    )
}

/// One scheme acting as `schemes[i]` on the summand marked by `marks[i]`:
/// applied to `A_1 ⊕ … ⊕ A_k` it yields `I_1(A_1) ⊕ … ⊕ I_k(A_k)`.
/// Shorter tuples are padded by repeating their last entry.
pub fn merge_marked_schemes(
    schemes: &[InterpretationScheme],
    marks: &[String],
) -> Result<InterpretationScheme, InterpError> {
    assert_eq!(schemes.len(), marks.len(), "one mark per scheme");
    let mut source = Signature::default();
    for (s, mark) in schemes.iter().zip(marks) {
        if s.source().arity_of(mark) != Some(1) {
            return Err(InterpError::MissingMark(mark.clone()));
        }
        for sym in s.source().symbols() {
            if source.index_of(&sym.name).is_some() {
                return Err(InterpError::NameClash(sym.name.clone()));
            }
            source.push(sym.name.clone(), sym.arity)?;
        }
    }
    let mut target = Signature::default();
    for s in schemes {
        target = target.disjoint_union(s.target()).0;
    }
    let p = schemes.iter().map(InterpretationScheme::exponent).max().unwrap_or(1);

    // Membership of a padded p-tuple in summand i.
    let member = |pool: &mut VarPool, s: &InterpretationScheme, mark: &str, vars: &[VarId], with_domain: bool| {
        let pi = s.exponent();
        let mut parts: Vec<Node> = vars[..pi].iter().map(|&v| Node::Atom(mark.to_string(), vec![v])).collect();
        parts.extend(vars[pi..].iter().map(|&v| Node::Eq(v, vars[pi - 1])));
        if with_domain {
            parts.push(s.domain_formula().instantiate(pool, &vars[..pi]));
        }
        Node::and(parts)
    };

    let mut pool = VarPool::new();
    let xs: Vec<VarId> = (1..=p).map(|k| pool.fresh(&format!("x{k}"))).collect();
    let disjuncts: Vec<Node> = schemes
        .iter()
        .zip(marks)
        .map(|(s, mark)| member(&mut pool, s, mark, &xs, true))
        .collect();
    let domain = Formula::from_pool(Node::or(disjuncts), pool, xs, source.clone())?;

    let mut relations = Vec::new();
    for (s, mark) in schemes.iter().zip(marks) {
        let pi = s.exponent();
        for (sym, rho) in s.target().symbols().iter().zip(s.relation_formulas()) {
            let mut pool = VarPool::new();
            let groups: Vec<Vec<VarId>> = (1..=sym.arity)
                .map(|t| (1..=p).map(|k| pool.fresh(&format!("x{t}_{k}"))).collect())
                .collect();
            let mut parts: Vec<Node> = groups
                .iter()
                .map(|g| member(&mut pool, s, mark, g, false))
                .collect();
            let args: Vec<VarId> = groups.iter().flat_map(|g| g[..pi].to_vec()).collect();
            parts.push(rho.instantiate(&mut pool, &args));
            let free = groups.concat();
            relations.push(Formula::from_pool(Node::and(parts), pool, free, source.clone())?);
        }
    }
    let name = schemes.iter().map(InterpretationScheme::name).collect::<Vec<_>>().join("_and_");
    InterpretationScheme::new(name, p, source, target, domain, relations)
}
