//! Recursive-descent parser for the formula language.
//!
//! ```text
//! formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" or)* ;
//! or := and ("|" and)* ; and := unary ("&" unary)* ;
//! unary := "!" unary | "(" formula ")" | atom ;
//! atom := IDENT "(" var ("," var)* ")" | var "=" var | "true" | "false"
//!       | ("exists"|"forall") var "(" formula ")" ;
//! ```
//!
//! Positions in errors are 1-based character columns.

use std::collections::HashMap;

use crate::structures::{is_identifier, Signature};

use super::ast::{Formula, Node, VarId};
use super::LogicError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: String| LogicError::Syntax {
        position: pos + 1,
        message: msg,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            ',' => out.push((Tok::Comma, start)),
            '=' => out.push((Tok::Eq, start)),
            '!' => out.push((Tok::Not, start)),
            '&' => out.push((Tok::And, start)),
            '|' => out.push((Tok::Or, start)),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    out.push((Tok::Implies, start));
                    i += 1;
                } else {
                    return Err(err(start, "expected `->`".into()));
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    out.push((Tok::Iff, start));
                    i += 2;
                } else {
                    return Err(err(start, "expected `<->`".into()));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                debug_assert!(is_identifier(&word));
                out.push((Tok::Ident(word), start));
                i = j;
                continue;
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    signature: &'a Signature,
    names: Vec<String>,
    /// Innermost binding first per name.
    scopes: HashMap<String, Vec<VarId>>,
    /// Free variable ids by name.
    free_by_name: HashMap<String, VarId>,
    declared: Option<Vec<String>>,
}

const KEYWORDS: [&str; 4] = ["true", "false", "exists", "forall"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1 + 1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, message: String) -> Result<T, LogicError> {
        Err(LogicError::Syntax {
            position: self.pos(),
            message,
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), LogicError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    fn formula(&mut self) -> Result<Node, LogicError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Node::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Node, LogicError> {
        let mut lhs = self.disjunction()?;
        while *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.disjunction()?;
            lhs = Node::implies(lhs, rhs);
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Node, LogicError> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Node::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Node, LogicError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Node::And(parts) })
    }

    fn unary(&mut self) -> Result<Node, LogicError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Node::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(_) => self.atom(),
            other => self.syntax(format!("expected a formula, found {}", other.describe())),
        }
    }

    fn atom(&mut self) -> Result<Node, LogicError> {
        let start = self.pos();
        let Tok::Ident(word) = self.bump() else {
            unreachable!("atom starts with an identifier")
        };
        match word.as_str() {
            "true" => return Ok(Node::True),
            "false" => return Ok(Node::False),
            "exists" | "forall" => {
                let var_pos = self.pos();
                let name = match self.bump() {
                    Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => n,
                    other => {
                        return Err(LogicError::Syntax {
                            position: var_pos,
                            message: format!("expected a variable, found {}", other.describe()),
                        })
                    }
                };
                self.expect(Tok::LParen)?;
                let id = self.names.len();
                self.names.push(name.clone());
                self.scopes.entry(name.clone()).or_default().push(id);
                let body = self.formula();
                self.scopes.get_mut(&name).expect("scope").pop();
                let body = body?;
                self.expect(Tok::RParen)?;
                return Ok(if word == "exists" {
                    Node::Exists(id, Box::new(body))
                } else {
                    Node::Forall(id, Box::new(body))
                });
            }
            _ => {}
        }
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let mut args = vec![self.var()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.var()?);
                }
                self.expect(Tok::RParen)?;
                match self.signature.arity_of(&word) {
                    None => Err(LogicError::UnknownSymbol {
                        symbol: word,
                        position: Some(start),
                    }),
                    Some(a) if a != args.len() => Err(LogicError::ArityMismatch {
                        symbol: word,
                        expected: a,
                        got: args.len(),
                        position: Some(start),
                    }),
                    Some(_) => Ok(Node::Atom(word, args)),
                }
            }
            Tok::Eq => {
                let lhs = self.resolve(&word, start)?;
                self.bump();
                let rhs = self.var()?;
                Ok(Node::Eq(lhs, rhs))
            }
            other => self.syntax(format!(
                "expected `(` or `=` after `{word}`, found {}",
                other.describe()
            )),
        }
    }

    fn var(&mut self) -> Result<VarId, LogicError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()) => self.resolve(&n, pos),
            other => Err(LogicError::Syntax {
                position: pos,
                message: format!("expected a variable, found {}", other.describe()),
            }),
        }
    }

    fn resolve(&mut self, name: &str, position: usize) -> Result<VarId, LogicError> {
        if KEYWORDS.contains(&name) {
            return Err(LogicError::Syntax {
                position,
                message: format!("`{name}` is a keyword"),
            });
        }
        if let Some(&id) = self.scopes.get(name).and_then(|s| s.last()) {
            return Ok(id);
        }
        if let Some(&id) = self.free_by_name.get(name) {
            return Ok(id);
        }
        if let Some(declared) = &self.declared {
            if !declared.iter().any(|d| d == name) {
                return Err(LogicError::UndeclaredVariable {
                    name: name.to_string(),
                    position: Some(position),
                });
            }
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.free_by_name.insert(name.to_string(), id);
        Ok(id)
    }
}

/// Parses `text` against `signature`. With `declared`, the free variables
/// are exactly the declared ones, in that order (unused ones included).
pub fn parse_formula(
    text: &str,
    signature: &Signature,
    declared: Option<&[&str]>,
) -> Result<Formula, LogicError> {
    let toks = tokenize(text)?;
    let declared: Option<Vec<String>> = declared.map(|d| d.iter().map(|s| s.to_string()).collect());
    if let Some(d) = &declared {
        for (i, name) in d.iter().enumerate() {
            if !is_identifier(name) || KEYWORDS.contains(&name.as_str()) || d[..i].contains(name) {
                return Err(LogicError::Syntax {
                    position: 0,
                    message: format!("bad declared variable `{name}`"),
                });
            }
        }
    }
    let mut p = Parser {
        toks,
        at: 0,
        signature,
        names: Vec::new(),
        scopes: HashMap::new(),
        free_by_name: HashMap::new(),
        declared: declared.clone(),
    };
    // Declared variables get the first ids, in order.
    if let Some(d) = &declared {
        for name in d {
            let id = p.names.len();
            p.names.push(name.clone());
            p.free_by_name.insert(name.clone(), id);
        }
    }
    let node = p.formula()?;
    if *p.peek() != Tok::End {
        return p.syntax(format!("unexpected {} after formula", p.peek().describe()));
    }
    let free = match &declared {
        Some(d) => (0..d.len()).collect(),
        None => node.free_vars(),
    };
    Formula::new(node, p.names, free, signature.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::BasicStructureSpec;

    fn graph_sig() -> Signature {
        Signature::graph()
    }

    #[test]
    fn crown_domain_formula() {
        let sig = BasicStructureSpec::signature(1, 2);
        let f = parse_formula("UT1(x1) & !UT1(x2)", &sig, None).unwrap();
        assert!(f.is_quantifier_free());
        assert_eq!(f.free_var_names(), ["x1", "x2"]);
    }

    #[test]
    fn reflexive_equality() {
        let f = parse_formula("x1 = x1", &graph_sig(), None).unwrap();
        assert!(f.is_quantifier_free());
        assert_eq!(f.arity(), 1);
    }

    #[test]
    fn unterminated_atom_reports_position() {
        let sig = BasicStructureSpec::signature(1, 0);
        let err = parse_formula("S1(x1,x2", &sig, None).unwrap_err();
        match err {
            LogicError::Syntax { position, .. } => assert_eq!(position, 9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn symbol_errors() {
        assert!(matches!(
            parse_formula("R(x,y)", &graph_sig(), None),
            Err(LogicError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_formula("E(x)", &graph_sig(), None),
            Err(LogicError::ArityMismatch { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            parse_formula("E(x,z)", &graph_sig(), Some(&["x", "y"])),
            Err(LogicError::UndeclaredVariable { .. })
        ));
    }

    #[test]
    fn declared_order_and_unused_vars() {
        let f = parse_formula("E(y,x)", &graph_sig(), Some(&["x", "y", "z"])).unwrap();
        assert_eq!(f.free_var_names(), ["x", "y", "z"]);
        assert_eq!(f.arity(), 3);
    }

    #[test]
    fn naming_conventions() {
        let f = parse_formula("E(x1,y2) | x1_2 = y2", &graph_sig(), None).unwrap();
        assert_eq!(f.free_var_names(), ["x1", "y2", "x1_2"]);
    }

    #[test]
    fn quantifiers_bind() {
        let sig = BasicStructureSpec::signature(1, 0);
        let f = parse_formula("exists z (S1(x,z))", &sig, None).unwrap();
        assert!(!f.is_quantifier_free());
        assert_eq!(f.free_var_names(), ["x"]);
        // shadowing: the inner x is a different variable
        let g = parse_formula("S1(x,y) & exists x (S1(x,y))", &sig, None).unwrap();
        assert_eq!(g.free_var_names(), ["x", "y"]);
        assert_eq!(g.var_count(), 3);
    }

    #[test]
    fn precedence() {
        let f = parse_formula("a = b | b = c & c = a -> a = a <-> true", &graph_sig(), None).unwrap();
        match f.node() {
            Node::Iff(lhs, _) => match lhs.as_ref() {
                Node::Implies(l, _) => assert!(matches!(l.as_ref(), Node::Or(v) if v.len() == 2)),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        let sig = BasicStructureSpec::signature(2, 2);
        for text in [
            "UT1(x1) & !UT1(x2)",
            "!(x1 = y1) & !(UE1(x2) <-> UE1(y2))",
            "S1(a,b) & (S2(b,c) | a = c) -> !(S1(c,a) & UT2(a))",
            "a = b -> b = c -> c = a",
            "a = b -> (b = c -> c = a)",
            "forall z (exists w (S1(z,w) | UE2(w)))",
            "(a = b & b = c) & true | false",
        ] {
            let f = parse_formula(text, &sig, None).unwrap();
            let printed = f.to_string();
            let g = parse_formula(&printed, &sig, None).unwrap();
            assert_eq!(f.node(), g.node(), "{text} -> {printed}");
        }
    }

    #[test]
    fn trailing_garbage() {
        assert!(matches!(
            parse_formula("x = y )", &graph_sig(), None),
            Err(LogicError::Syntax { position: 7, .. })
        ));
        assert!(parse_formula("x = ", &graph_sig(), None).is_err());
        assert!(parse_formula("x # y", &graph_sig(), None).is_err());
    }
}
