//! Plain-text instance format.
//!
//! ```text
//! csp 1                                   # optional header
//! var x 0..2
//! var y in {1,3,5}
//! con ext allowed (x,y) : (0,1) (2,5)
//! con ext forbidden (x,y) : (1,1)
//! con int (x,y) : ne(x,y)
//! ```
//!
//! One declaration per line, `#` starts a comment, LF or CRLF line endings.
//! Variables must be declared before use. Expressions are prefix calls over
//! `neg abs` (unary) and `add sub mul div mod min max eq ne lt le gt ge and or
//! dist` (binary).

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::{BinaryOp, Expr, UnaryOp};
use crate::model::{Constraint, ModelError, Problem, Relation, Table, Value, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: undeclared variable `{name}`")]
    UndeclaredVariable { line: usize, name: String },
    #[error("line {line}: expected {expected} values, found {got}")]
    ArityMismatch { line: usize, expected: usize, got: usize },
    #[error("line {line}: value {value} is outside the domain of `{var}`")]
    ValueOutsideDomain { line: usize, var: String, value: Value },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: ModelError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(Value),
    DotDot,
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(line: usize, text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| ParseError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col });
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<Value>().map_err(|_| err(col, format!("integer `{s}` out of range")))?;
            out.push(Token { tok: Tok::Int(v), col });
        } else if c == '.' && chars.get(i + 1) == Some(&'.') {
            out.push(Token { tok: Tok::DotDot, col });
            i += 2;
        } else if "(){},:".contains(c) {
            out.push(Token { tok: Tok::Punct(c), col });
            i += 1;
        } else {
            return Err(err(col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    line: usize,
    toks: &'a [Token],
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col(), msg: msg.into() }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{c}`"))),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn int(&mut self) -> Result<Value, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(*v)
            }
            _ => Err(self.err("expected an integer")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    /// Comma-separated list inside the given delimiters.
    fn list<T>(
        &mut self,
        open: char,
        close: char,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        self.expect_punct(open)?;
        let mut out = Vec::new();
        if self.eat_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_punct(close) {
                return Ok(out);
            }
            self.expect_punct(',')?;
        }
    }
}

struct Parser {
    names: Vec<String>,
    domains: Vec<Vec<Value>>,
    by_name: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
}

/// Parses an instance. Variable and constraint ids follow declaration order.
pub fn parse_instance(text: &str) -> Result<Problem, ParseError> {
    let mut p = Parser { names: Vec::new(), domains: Vec::new(), by_name: HashMap::new(), constraints: Vec::new() };
    let mut seen_decl = false;
    for (idx, raw) in text.split('\n').enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let body = raw.split('#').next().unwrap_or("");
        let toks = lex(line, body)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { line, toks: &toks, pos: 0, end_col: body.chars().count() + 1 };
        match cur.ident()? {
            "csp" if !seen_decl => {
                let version = cur.int()?;
                if version != 1 {
                    return Err(ParseError::Syntax { line, col: toks[1].col, msg: format!("unsupported version {version}") });
                }
                cur.finish()?;
            }
            "var" => p.var_line(&mut cur)?,
            "con" => p.con_line(&mut cur)?,
            other => {
                return Err(ParseError::Syntax { line, col: toks[0].col, msg: format!("unknown declaration `{other}`") });
            }
        }
        seen_decl = true;
    }
    Problem::new(p.names, p.domains, p.constraints).map_err(|source| ParseError::Invalid { line: 0, source })
}

impl Parser {
    fn var_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let line = cur.line;
        let name = cur.ident()?.to_string();
        let domain: Vec<Value> = if cur.peek() == Some(&Tok::Ident("in".into())) {
            cur.pos += 1;
            let mut values = cur.list('{', '}', Cursor::int)?;
            if values.is_empty() {
                return Err(ParseError::Invalid { line, source: ModelError::EmptyDomain(name) });
            }
            values.sort_unstable();
            if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
                return Err(ParseError::Invalid { line, source: ModelError::DuplicateValue { var: name, value: w[0] } });
            }
            values
        } else {
            let lo = cur.int()?;
            match cur.next() {
                Some(Tok::DotDot) => {}
                _ => return Err(cur.err("expected `..`")),
            }
            let hi = cur.int()?;
            if lo > hi {
                return Err(ParseError::Invalid { line, source: ModelError::EmptyDomain(name) });
            }
            if (hi as i128 - lo as i128) >= 1 << 24 {
                return Err(ParseError::Syntax { line, col: cur.col(), msg: "domain too large".into() });
            }
            (lo..=hi).collect()
        };
        cur.finish()?;
        if self.by_name.contains_key(&name) {
            return Err(ParseError::Invalid { line, source: ModelError::DuplicateName(name) });
        }
        self.by_name.insert(name.clone(), self.names.len());
        self.names.push(name);
        self.domains.push(domain);
        Ok(())
    }

    fn con_line(&mut self, cur: &mut Cursor) -> Result<(), ParseError> {
        let line = cur.line;
        let kind = cur.ident()?;
        let mode = match kind {
            "ext" => match cur.ident()? {
                "allowed" => Some(true),
                "forbidden" => Some(false),
                other => return Err(cur.err(format!("expected `allowed` or `forbidden`, found `{other}`"))),
            },
            "int" => None,
            other => return Err(cur.err(format!("expected `ext` or `int`, found `{other}`"))),
        };
        let scope_names = cur.list('(', ')', |c| c.ident().map(str::to_string))?;
        if scope_names.is_empty() {
            return Err(ParseError::Invalid { line, source: ModelError::EmptyScope(self.constraints.len()) });
        }
        let mut scope = Vec::with_capacity(scope_names.len());
        for n in &scope_names {
            let x = *self
                .by_name
                .get(n)
                .ok_or_else(|| ParseError::UndeclaredVariable { line, name: n.clone() })?;
            if scope.contains(&x) {
                return Err(ParseError::Invalid {
                    line,
                    source: ModelError::RepeatedScopeVar { constraint: self.constraints.len(), var: x },
                });
            }
            scope.push(x);
        }
        cur.expect_punct(':')?;
        let relation = match mode {
            Some(allowed) => {
                let mut tuples = Vec::new();
                while cur.peek().is_some() {
                    let t = cur.list('(', ')', Cursor::int)?;
                    if t.len() != scope.len() {
                        return Err(ParseError::ArityMismatch { line, expected: scope.len(), got: t.len() });
                    }
                    for (&v, &x) in t.iter().zip(&scope) {
                        if self.domains[x].binary_search(&v).is_err() {
                            return Err(ParseError::ValueOutsideDomain { line, var: self.names[x].clone(), value: v });
                        }
                    }
                    tuples.push(t);
                }
                let table = Table::new(tuples);
                if allowed {
                    Relation::Allowed(table)
                } else {
                    Relation::Forbidden(table)
                }
            }
            None => {
                let expr = self.expr(cur, &scope_names)?;
                cur.finish()?;
                Relation::Intensional(expr)
            }
        };
        self.constraints.push(Constraint::new(scope, relation));
        Ok(())
    }

    fn expr(&self, cur: &mut Cursor, scope: &[String]) -> Result<Expr, ParseError> {
        self.expr_at(cur, scope, 0)
    }

    fn expr_at(&self, cur: &mut Cursor, scope: &[String], depth: usize) -> Result<Expr, ParseError> {
        if depth > 256 {
            return Err(cur.err("expression nested too deeply"));
        }
        match cur.peek() {
            Some(Tok::Int(v)) => {
                cur.pos += 1;
                Ok(Expr::Const(*v))
            }
            Some(Tok::Ident(name)) => {
                let col = cur.col();
                cur.pos += 1;
                if cur.peek() == Some(&Tok::Punct('(')) {
                    let mut args = cur.list('(', ')', |c| self.expr_at(c, scope, depth + 1))?;
                    let arity_err = |want: usize, got: usize| ParseError::Syntax {
                        line: cur.line,
                        col,
                        msg: format!("`{name}` takes {want} argument(s), found {got}"),
                    };
                    if let Some(op) = UnaryOp::from_name(name) {
                        if args.len() != 1 {
                            return Err(arity_err(1, args.len()));
                        }
                        Ok(Expr::unary(op, args.pop().expect("one arg")))
                    } else if let Some(op) = BinaryOp::from_name(name) {
                        if args.len() != 2 {
                            return Err(arity_err(2, args.len()));
                        }
                        let b = args.pop().expect("two args");
                        let a = args.pop().expect("two args");
                        Ok(Expr::binary(op, a, b))
                    } else {
                        Err(ParseError::Syntax { line: cur.line, col, msg: format!("unknown operator `{name}`") })
                    }
                } else if let Some(pos) = scope.iter().position(|s| s == name) {
                    Ok(Expr::Var(pos))
                } else if self.by_name.contains_key(name) {
                    Err(ParseError::Syntax { line: cur.line, col, msg: format!("variable `{name}` is not in the constraint scope") })
                } else {
                    Err(ParseError::UndeclaredVariable { line: cur.line, name: name.clone() })
                }
            }
            _ => Err(cur.err("expected an expression")),
        }
    }
}

/// Writes `problem` in the format accepted by [`parse_instance`].
pub fn serialize_instance(problem: &Problem) -> String {
    let mut out = String::new();
    for (name, dom) in problem.names().iter().zip(problem.original_domains()) {
        let (lo, hi) = (dom[0], dom[dom.len() - 1]);
        if (hi as i128 - lo as i128 + 1) == dom.len() as i128 {
            let _ = writeln!(out, "var {name} {lo}..{hi}");
        } else {
            let _ = writeln!(out, "var {name} in {{{}}}", join(dom.iter()));
        }
    }
    for c in problem.constraints() {
        let names: Vec<&str> = c.scope().iter().map(|&x| problem.name(x)).collect();
        let scope = names.join(",");
        match c.relation() {
            Relation::Allowed(t) | Relation::Forbidden(t) => {
                let kind = if matches!(c.relation(), Relation::Allowed(_)) { "allowed" } else { "forbidden" };
                let _ = write!(out, "con ext {kind} ({scope}) :");
                for row in t.rows() {
                    let _ = write!(out, " ({})", join(row.iter()));
                }
                out.push('\n');
            }
            Relation::Intensional(e) => {
                let _ = writeln!(out, "con int ({scope}) : {}", e.display_with(&names));
            }
        }
    }
    out
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_var_intensional() {
        let p = parse_instance("var x 0..2\nvar y 0..2\ncon int (x,y): ne(x,y)").unwrap();
        assert_eq!(p.num_vars(), 2);
        assert_eq!(p.num_constraints(), 1);
        assert!(matches!(p.constraint(0).relation(), Relation::Intensional(_)));
    }

    #[test]
    fn unary_extensional() {
        let p = parse_instance("var x in {1,3,5}\ncon ext allowed (x): (1) (5)").unwrap();
        assert_eq!(p.original_domain(0), &[1, 3, 5]);
        match p.constraint(0).relation() {
            Relation::Allowed(t) => assert_eq!(t.rows(), &[vec![1], vec![5]]),
            r => panic!("unexpected relation {r:?}"),
        }
    }

    #[test]
    fn serialize_single_var() {
        let p = Problem::new(vec!["x0".into()], vec![vec![0]], vec![]).unwrap();
        assert_eq!(serialize_instance(&p), "var x0 0..0\n");
        assert_eq!(parse_instance(&serialize_instance(&p)).unwrap(), p);
    }

    #[test]
    fn serialize_prefix_form() {
        let p = parse_instance("var x 0..2\nvar y 0..2\ncon int (x , y) : ne( x ,y )").unwrap();
        assert_eq!(serialize_instance(&p), "var x 0..2\nvar y 0..2\ncon int (x,y) : ne(x,y)\n");
    }

    #[test]
    fn comments_crlf_and_header() {
        let text = "csp 1\r\n# a comment\r\nvar a -2..1 # trailing\r\n\r\nvar b in {7}\r\ncon ext forbidden (a,b) : (0,7)\r\n";
        let p = parse_instance(text).unwrap();
        assert_eq!(p.original_domain(0), &[-2, -1, 0, 1]);
        let round = parse_instance(&serialize_instance(&p)).unwrap();
        assert_eq!(round, p);
    }

    #[test]
    fn nested_expression_roundtrip() {
        let text = "var x 0..3\nvar y 0..3\nvar z in {1,4}\ncon int (x,y,z) : or(le(add(x,-3),y),eq(abs(neg(z)),dist(x,mod(y,2))))\n";
        let p = parse_instance(text).unwrap();
        assert_eq!(serialize_instance(&p), text);
    }

    #[test]
    fn error_cases() {
        let e = parse_instance("var x 0..2\ncon int (x,y) : ne(x,y)").unwrap_err();
        assert_eq!(e, ParseError::UndeclaredVariable { line: 2, name: "y".into() });
        let e = parse_instance("var x 0..2\ncon ext allowed (x) : (1,2)").unwrap_err();
        assert_eq!(e, ParseError::ArityMismatch { line: 2, expected: 1, got: 2 });
        let e = parse_instance("var x 0..2\ncon ext allowed (x) : (9)").unwrap_err();
        assert_eq!(e, ParseError::ValueOutsideDomain { line: 2, var: "x".into(), value: 9 });
        let e = parse_instance("var x 0..2\nvar y 0..2\ncon int (x) : ne(x,y)").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 3, .. }), "{e}");
        let e = parse_instance("var x 0..2 junk").unwrap_err();
        assert_eq!(e, ParseError::Syntax { line: 1, col: 12, msg: "unexpected trailing input".into() });
        let e = parse_instance("var x 0..2\ncon int (x) : foo(x)").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, col: 15, .. }), "{e}");
        let e = parse_instance("var x 0..2\ncon int (x) : ne(x)").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 2, .. }), "{e}");
        assert!(matches!(parse_instance("var x 3..1"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse_instance("var x 0..1\nvar x 0..1"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse_instance("var x in {1,1}"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse_instance("var x 0..1\ncon int (x,x) : 1"), Err(ParseError::Invalid { .. })));
        assert!(matches!(parse_instance("csp 2"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_instance("var x 0..99999999999999999999"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_instance("var x 0..1 $"), Err(ParseError::Syntax { col: 12, .. })));
    }

    #[test]
    fn empty_table_is_legal() {
        let p = parse_instance("var x 0..1\nvar y 0..1\ncon ext allowed (x,y) :").unwrap();
        assert_eq!(serialize_instance(&p), "var x 0..1\nvar y 0..1\ncon ext allowed (x,y) :\n");
    }
}
