//! Text format for schemes.
//!
//! ```text
//! interpretation NAME {
//!   source: basic(k=1,l=2) | graph | sig{E:2, U:1};
//!   target: graph | sig{…};
//!   p: 2;
//!   loops: drop | keep;                      # graph targets only
//!   domain(x1,x2): FORMULA;
//!   REL(x1,x2; y1,y2): FORMULA;              # one per target symbol
//!   equiv(x1,x2; y1,y2): FORMULA;            # optional
//!   class NAME: eta=FORMULA, size=POLY;      # optional, repeatable
//! }
//! ```
//!
//! `#` starts a comment. A graph target without `equiv` gives a graphical
//! scheme; `equiv` gives a quotient scheme.

use std::fmt::Write as _;

use crate::logic::{parse_formula, Formula, LogicError};
use crate::sequences::{IntPolynomial, PolyError};
use crate::structures::{is_identifier, BasicStructureSpec, Signature, Structure};

use super::{
    apply_graphical, apply_interpretation, apply_quotient, Certificate, GraphicalScheme, InterpError,
    InterpretationScheme, LoopPolicy, QuotientScheme,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheme {
    Plain(InterpretationScheme),
    Graphical(GraphicalScheme),
    Quotient(QuotientScheme),
}

impl Scheme {
    pub fn name(&self) -> &str {
        match self {
            Scheme::Plain(s) => s.name(),
            Scheme::Graphical(g) => g.name(),
            Scheme::Quotient(q) => q.base().name(),
        }
    }

    pub fn exponent(&self) -> usize {
        match self {
            Scheme::Plain(s) => s.exponent(),
            Scheme::Graphical(g) => g.exponent(),
            Scheme::Quotient(q) => q.base().exponent(),
        }
    }

    pub fn source(&self) -> &Signature {
        match self {
            Scheme::Plain(s) => s.source(),
            Scheme::Graphical(g) => g.source(),
            Scheme::Quotient(q) => q.base().source(),
        }
    }

    pub fn target(&self) -> Signature {
        match self {
            Scheme::Plain(s) => s.target().clone(),
            Scheme::Graphical(_) => Signature::graph(),
            Scheme::Quotient(q) => q.base().target().clone(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Scheme::Plain(s) => s.is_quantifier_free(),
            Scheme::Graphical(g) => g.iota().is_quantifier_free() && g.rho().is_quantifier_free(),
            Scheme::Quotient(q) => q.is_quantifier_free(),
        }
    }

    /// Largest certificate degree of a quotient scheme, else 0.
    pub fn certificate_degree(&self) -> usize {
        match self {
            Scheme::Quotient(q) => q.certificate_degree(),
            _ => 0,
        }
    }

    /// Applies the scheme. `index` is the sequence index used to check
    /// quotient certificates, `seed` drives compatibility sampling.
    pub fn apply(&self, a: &Structure, index: Option<u64>, seed: u64) -> Result<Structure, InterpError> {
        Ok(match self {
            Scheme::Plain(s) => apply_interpretation(s, a)?.structure,
            Scheme::Graphical(g) => apply_graphical(g, a)?.structure,
            Scheme::Quotient(q) => apply_quotient(q, a, index, seed)?.structure,
        })
    }

    /// The scheme as a plain interpretation, when it has no equivalence.
    pub fn to_plain(&self) -> Option<InterpretationScheme> {
        match self {
            Scheme::Plain(s) => Some(s.clone()),
            Scheme::Graphical(g) => g.to_scheme().ok(),
            Scheme::Quotient(_) => None,
        }
    }

    /// Canonical text; `parse_scheme(&s.to_text())` returns `s`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "interpretation {} {{", self.name());
        let _ = writeln!(out, "  source: {};", signature_text(self.source()));
        let graph_target = !matches!(self, Scheme::Plain(_)) && self.target() == Signature::graph();
        let target = if graph_target {
            "graph".to_string()
        } else {
            format!("sig{}", self.target())
        };
        let _ = writeln!(out, "  target: {target};");
        let _ = writeln!(out, "  p: {};", self.exponent());
        let line = |out: &mut String, head: &str, f: &Formula, groups: usize| {
            let names = f.free_var_names();
            let per = names.len() / groups.max(1);
            let vars = names.chunks(per.max(1)).map(|c| c.join(",")).collect::<Vec<_>>().join("; ");
            let _ = writeln!(out, "  {head}({vars}): {f};");
        };
        match self {
            Scheme::Graphical(g) => {
                if g.loops() == LoopPolicy::Keep {
                    let _ = writeln!(out, "  loops: keep;");
                }
                line(&mut out, "domain", g.iota(), 1);
                line(&mut out, "E", g.rho(), 2);
            }
            Scheme::Plain(s) => write_plain(&mut out, s, &line),
            Scheme::Quotient(q) => {
                write_plain(&mut out, q.base(), &line);
                line(&mut out, "equiv", q.varpi(), 2);
                for c in q.certificates() {
                    let _ = writeln!(out, "  class {}: eta={}, size={};", c.name, c.eta, c.size);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn write_plain(out: &mut String, s: &InterpretationScheme, line: &impl Fn(&mut String, &str, &Formula, usize)) {
    line(out, "domain", s.domain_formula(), 1);
    for (sym, f) in s.target().symbols().iter().zip(s.relation_formulas()) {
        line(out, &sym.name, f, sym.arity);
    }
}

fn signature_text(sig: &Signature) -> String {
    if *sig == Signature::graph() {
        return "graph".into();
    }
    let count = |prefix: &str| {
        sig.symbols()
            .iter()
            .filter(|s| s.name.starts_with(prefix) && s.name[prefix.len()..].parse::<usize>().is_ok())
            .count()
    };
    let (k, l) = (count("UT"), count("UE"));
    if *sig == BasicStructureSpec::signature(k, l) {
        format!("basic(k={k},l={l})")
    } else {
        format!("sig{sig}")
    }
}

impl serde::Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> serde::Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_scheme(&text).map_err(serde::de::Error::custom)
    }
}

/// A `;`-terminated statement: text and the char offset where it starts.
struct Stmt {
    text: Vec<char>,
    at: usize,
}

struct Ctx<'a> {
    chars: &'a [char],
}

impl Ctx<'_> {
    fn err(&self, at: usize, message: impl Into<String>) -> InterpError {
        let before = &self.chars[..at.min(self.chars.len())];
        let line = before.iter().filter(|&&c| c == '\n').count() + 1;
        let column = before.iter().rev().take_while(|&&c| c != '\n').count() + 1;
        InterpError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn logic(&self, at: usize, e: LogicError) -> InterpError {
        let pos = match &e {
            LogicError::Syntax { position, .. } => Some(*position),
            LogicError::UnknownSymbol { position, .. }
            | LogicError::ArityMismatch { position, .. }
            | LogicError::UndeclaredVariable { position, .. } => *position,
            _ => None,
        };
        self.err(at + pos.map_or(0, |p| p.saturating_sub(1)), e.to_string())
    }
}

fn skip_ws(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    i
}

fn word(chars: &[char], i: usize) -> (String, usize) {
    let mut j = i;
    while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
        j += 1;
    }
    (chars[i..j].iter().collect(), j)
}

fn trim(chars: &[char], at: usize) -> (String, usize) {
    let start = skip_ws(chars, 0);
    let s: String = chars[start..].iter().collect();
    (s.trim_end().to_string(), at + start)
}

/// Parses a scheme file.
pub fn parse_scheme(text: &str) -> Result<Scheme, InterpError> {
    // Comments become spaces so offsets stay valid.
    let mut chars: Vec<char> = text.chars().collect();
    let mut in_comment = false;
    for c in chars.iter_mut() {
        if *c == '\n' {
            in_comment = false;
        } else if *c == '#' || in_comment {
            in_comment = true;
            *c = ' ';
        }
    }
    let cx = Ctx { chars: &chars };
    let mut i = skip_ws(&chars, 0);
    let (kw, j) = word(&chars, i);
    if kw != "interpretation" {
        return Err(cx.err(i, "expected `interpretation`"));
    }
    i = skip_ws(&chars, j);
    let (name, j) = word(&chars, i);
    if !is_identifier(&name) {
        return Err(cx.err(i, "expected a scheme name"));
    }
    i = skip_ws(&chars, j);
    if chars.get(i) != Some(&'{') {
        return Err(cx.err(i, "expected `{`"));
    }
    i += 1;
    let mut stmts = Vec::new();
    let mut depth = 0i32;
    let mut start = i;
    loop {
        match chars.get(i) {
            None => return Err(cx.err(i, "missing closing `}`")),
            Some('(') | Some('{') => depth += 1,
            Some(')') => depth -= 1,
            Some('}') if depth == 0 => break,
            Some('}') => depth -= 1,
            Some(';') if depth == 0 => {
                stmts.push(Stmt {
                    text: chars[start..i].to_vec(),
                    at: start,
                });
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(cx.err(i, "unbalanced `)`"));
        }
        i += 1;
    }
    if chars[start..i].iter().any(|c| !c.is_whitespace()) {
        return Err(cx.err(skip_ws(&chars, start), "statement is missing its `;`"));
    }
    let rest = skip_ws(&chars, i + 1);
    if rest < chars.len() {
        return Err(cx.err(rest, "unexpected text after the closing `}`"));
    }
    build(&cx, name, stmts)
}

struct Header {
    word: String,
    at: usize,
    groups: Vec<Vec<String>>,
    body: String,
    body_at: usize,
}

fn header(cx: &Ctx, s: &Stmt) -> Result<Header, InterpError> {
    let t = &s.text;
    let i = skip_ws(t, 0);
    let (w, mut j) = word(t, i);
    if w.is_empty() {
        return Err(cx.err(s.at + i, "expected a statement keyword or relation name"));
    }
    let mut groups = Vec::new();
    if w == "class" {
        let k = skip_ws(t, j);
        let (name, e) = word(t, k);
        if !is_identifier(&name) {
            return Err(cx.err(s.at + k, "expected a class name"));
        }
        groups.push(vec![name]);
        j = e;
    } else {
        j = skip_ws(t, j);
        if t.get(j) == Some(&'(') {
            let close = (j..t.len()).find(|&k| t[k] == ')').ok_or_else(|| cx.err(s.at + j, "missing `)`"))?;
            let inner: String = t[j + 1..close].iter().collect();
            for g in inner.split(';') {
                let vars: Vec<String> = g.split(',').map(|v| v.trim().to_string()).collect();
                if vars.iter().any(|v| !is_identifier(v)) {
                    return Err(cx.err(s.at + j + 1, format!("malformed variable list `{}`", inner.trim())));
                }
                groups.push(vars);
            }
            j = close + 1;
        }
    }
    j = skip_ws(t, j);
    if t.get(j) != Some(&':') {
        return Err(cx.err(s.at + j, "expected `:`"));
    }
    let (body, body_at) = trim(&t[j + 1..], s.at + j + 1);
    Ok(Header {
        word: w,
        at: s.at + i,
        groups,
        body,
        body_at,
    })
}

fn parse_signature(cx: &Ctx, body: &str, at: usize) -> Result<Signature, InterpError> {
    if body == "graph" {
        return Ok(Signature::graph());
    }
    if let Some(args) = body.strip_prefix("basic(").and_then(|r| r.strip_suffix(')')) {
        let mut k = None;
        let mut l = None;
        for part in args.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(|| cx.err(at, "expected `k=…,l=…`"))?;
            let value: usize = value.trim().parse().map_err(|_| cx.err(at, format!("bad number `{}`", value.trim())))?;
            match key.trim() {
                "k" => k = Some(value),
                "l" => l = Some(value),
                other => return Err(cx.err(at, format!("unknown basic parameter `{other}`"))),
            }
        }
        return Ok(BasicStructureSpec::signature(k.unwrap_or(0), l.unwrap_or(0)));
    }
    if let Some(inner) = body.strip_prefix("sig{").and_then(|r| r.strip_suffix('}')) {
        let mut symbols = Vec::new();
        for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
            let (name, arity) = part.split_once(':').ok_or_else(|| cx.err(at, format!("expected `NAME:ARITY`, got `{}`", part.trim())))?;
            let arity: usize = arity.trim().parse().map_err(|_| cx.err(at, format!("bad arity `{}`", arity.trim())))?;
            symbols.push((name.trim().to_string(), arity));
        }
        return Signature::new(symbols).map_err(|e| cx.err(at, e.to_string()));
    }
    Err(cx.err(at, format!("expected `graph`, `basic(k=…,l=…)` or `sig{{…}}`, got `{body}`")))
}

fn build(cx: &Ctx, name: String, stmts: Vec<Stmt>) -> Result<Scheme, InterpError> {
    let mut source = None;
    let mut target: Option<(Signature, bool)> = None;
    let mut p = None;
    let mut loops = LoopPolicy::Drop;
    let mut domain = None;
    let mut relations: Vec<Header> = Vec::new();
    let mut equiv = None;
    let mut classes = Vec::new();
    for s in &stmts {
        if s.text.iter().all(|c| c.is_whitespace()) {
            continue;
        }
        let h = header(cx, s)?;
        let plain = h.groups.is_empty();
        match h.word.as_str() {
            "source" if plain => source = Some(parse_signature(cx, &h.body, h.body_at)?),
            "target" if plain => {
                target = Some((parse_signature(cx, &h.body, h.body_at)?, h.body == "graph"));
            }
            "p" if plain => {
                p = Some(h.body.parse::<usize>().map_err(|_| cx.err(h.body_at, "expected a positive exponent"))?);
            }
            "loops" if plain => {
                loops = match h.body.as_str() {
                    "drop" => LoopPolicy::Drop,
                    "keep" => LoopPolicy::Keep,
                    _ => return Err(cx.err(h.body_at, "expected `drop` or `keep`")),
                }
            }
            "domain" => domain = Some(h),
            "equiv" => equiv = Some(h),
            "class" => classes.push(h),
            _ if plain => return Err(cx.err(h.at, format!("unknown setting `{}`", h.word))),
            _ => relations.push(h),
        }
    }
    let first = stmts.first().map_or(0, |s| s.at);
    let source = source.ok_or_else(|| cx.err(first, "missing `source`"))?;
    let (target, graph_target) = target.ok_or_else(|| cx.err(first, "missing `target`"))?;
    let p = p.ok_or_else(|| cx.err(first, "missing `p`"))?;
    if p == 0 {
        return Err(InterpError::ZeroExponent);
    }
    let formula = |h: &Header, groups: usize| -> Result<Formula, InterpError> {
        if h.groups.len() != groups || h.groups.iter().any(|g| g.len() != p) {
            return Err(cx.err(
                h.at,
                format!("`{}` takes {groups} group(s) of {p} variables", h.word),
            ));
        }
        let vars: Vec<&str> = h.groups.iter().flatten().map(String::as_str).collect();
        parse_formula(&h.body, &source, Some(&vars)).map_err(|e| cx.logic(h.body_at, e))
    };
    let domain_h = domain.ok_or_else(|| cx.err(first, "missing `domain`"))?;
    let domain = formula(&domain_h, 1)?;
    let mut rel_formulas = vec![None; target.len()];
    for h in &relations {
        let idx = target
            .index_of(&h.word)
            .ok_or_else(|| cx.err(h.at, format!("unknown target relation `{}`", h.word)))?;
        if rel_formulas[idx].is_some() {
            return Err(cx.err(h.at, format!("relation `{}` defined twice", h.word)));
        }
        rel_formulas[idx] = Some(formula(h, target.symbols()[idx].arity)?);
    }
    let mut rels = Vec::with_capacity(target.len());
    for (sym, f) in target.symbols().iter().zip(rel_formulas) {
        rels.push(f.ok_or_else(|| cx.err(first, format!("missing formula for target relation `{}`", sym.name)))?);
    }
    let at_end = |e: InterpError| match e {
        e @ InterpError::Parse { .. } => e,
        e => cx.err(first, e.to_string()),
    };
    match equiv {
        None if graph_target => {
            if !classes.is_empty() {
                return Err(cx.err(classes[0].at, "`class` requires `equiv`"));
            }
            let rho = rels.pop().expect("graph target has one relation");
            Ok(Scheme::Graphical(
                GraphicalScheme::new(name, p, source, domain, rho).map_err(at_end)?.with_loops(loops),
            ))
        }
        None => {
            if !classes.is_empty() {
                return Err(cx.err(classes[0].at, "`class` requires `equiv`"));
            }
            Ok(Scheme::Plain(
                InterpretationScheme::new(name, p, source, target, domain, rels).map_err(at_end)?,
            ))
        }
        Some(eh) => {
            let varpi = formula(&eh, 2)?;
            let mut certs = Vec::new();
            for h in &classes {
                certs.push(certificate(cx, h, p, &source)?);
            }
            let base = InterpretationScheme::new(name, p, source, target, domain, rels).map_err(at_end)?;
            Ok(Scheme::Quotient(QuotientScheme::new(base, varpi, certs).map_err(at_end)?))
        }
    }
}

/// `eta=FORMULA, size=POLY`; the formula's free variables are `x1..xp`.
fn certificate(cx: &Ctx, h: &Header, p: usize, source: &Signature) -> Result<Certificate, InterpError> {
    let body: Vec<char> = h.body.chars().collect();
    let find = |key: &str| {
        let k: Vec<char> = key.chars().collect();
        let mut depth = 0;
        (0..body.len()).find(|&i| {
            match body[i] {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            depth == 0 && body[i..].starts_with(&k)
        })
    };
    let eta_at = find("eta=").ok_or_else(|| cx.err(h.body_at, "expected `eta=`"))?;
    let size_at = find("size=").ok_or_else(|| cx.err(h.body_at, "expected `size=`"))?;
    let comma = (eta_at..size_at)
        .rev()
        .find(|&i| body[i] == ',')
        .ok_or_else(|| cx.err(h.body_at + size_at, "expected `,` before `size=`"))?;
    let (eta_text, eta_off) = trim(&body[eta_at + 4..comma], h.body_at + eta_at + 4);
    let (size_text, size_off) = trim(&body[size_at + 5..], h.body_at + size_at + 5);
    let vars = super::numbered("x", p);
    let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
    let eta = parse_formula(&eta_text, source, Some(&vars)).map_err(|e| cx.logic(eta_off, e))?;
    let size: IntPolynomial = size_text.parse().map_err(|e: PolyError| match e {
        PolyError::Parse { position, message } => cx.err(size_off + position - 1, message),
        other => cx.err(size_off, other.to_string()),
    })?;
    Ok(Certificate {
        name: h.groups[0][0].clone(),
        eta,
        size,
    })
}
