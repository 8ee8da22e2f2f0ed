use thiserror::Error;

use super::ast::{ConnDecl, Formula, FuncDecl, Pos, SequentAst, Signature, Term, Theory, Warning};
use crate::connective::{
    classify, parse_expr, ClassifierVerdict, Connective, DEFAULT_GRID_EXPONENT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSort,
    UnknownSymbol,
    Arity,
    SortMismatch,
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

type PResult<T> = std::result::Result<T, ParseError>;

const KEYWORDS: [&str; 8] = ["sort", "func", "rel", "conn", "top", "bot", "E", "A"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Equals,
    Turnstile,
    BiTurnstile,
    And,
    Or,
    Arrow,
    Assign,
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of line".into(),
        Some(Tok::Ident(s)) => format!("{s:?}"),
        Some(t) => format!(
            "'{}'",
            match t {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBrack => "[",
                Tok::RBrack => "]",
                Tok::Comma => ",",
                Tok::Colon => ":",
                Tok::Dot => ".",
                Tok::Equals => "=",
                Tok::Turnstile => "|-",
                Tok::BiTurnstile => "-||-",
                Tok::And => "/\\",
                Tok::Or => "\\/",
                Tok::Arrow => "->",
                Tok::Assign => ":=",
                Tok::Ident(_) => unreachable!(),
            }
        ),
    }
}

/// Tokens with their 1-based column and byte offset.
fn lex_line(line: &str, lineno: usize) -> PResult<Vec<(usize, usize, Tok)>> {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |k: usize| chars.get(k).map(|c| c.1);
    while i < chars.len() {
        let (byte, c) = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = |a: char, b: char| c == a && at(i + 1) == Some(b);
        let (tok, len) = if line[byte..].starts_with("-||-") {
            (Tok::BiTurnstile, 4)
        } else if two('|', '-') {
            (Tok::Turnstile, 2)
        } else if two('/', '\\') {
            (Tok::And, 2)
        } else if two('\\', '/') {
            (Tok::Or, 2)
        } else if two('-', '>') {
            (Tok::Arrow, 2)
        } else if two(':', '=') {
            (Tok::Assign, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                ',' => (Tok::Comma, 1),
                ':' => (Tok::Colon, 1),
                '.' => (Tok::Dot, 1),
                '=' => (Tok::Equals, 1),
                c if c.is_alphanumeric() || c == '_' => {
                    let mut j = i;
                    while j < chars.len()
                        && (chars[j].1.is_alphanumeric() || matches!(chars[j].1, '_' | '\''))
                    {
                        j += 1;
                    }
                    let end = chars.get(j).map_or(line.len(), |c| c.0);
                    (Tok::Ident(line[byte..end].to_string()), j - i)
                }
                other => {
                    return Err(ParseError {
                        line: lineno,
                        column: col,
                        kind: ParseErrorKind::Syntax,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        };
        out.push((col, byte, tok));
        i += len;
    }
    Ok(out)
}

struct LineParser<'a> {
    sig: &'a Signature,
    text: &'a str,
    toks: Vec<(usize, usize, Tok)>,
    pos: usize,
    line: usize,
    /// Variables in scope, innermost last.
    scope: Vec<(String, String)>,
}

impl<'a> LineParser<'a> {
    fn new(sig: &'a Signature, text: &'a str, line: usize) -> PResult<Self> {
        Ok(LineParser {
            sig,
            text,
            toks: lex_line(text, line)?,
            pos: 0,
            line,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.2)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.text.chars().count() + 1, |t| t.0)
    }

    fn here(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column(),
        }
    }

    fn fail_at<T>(&self, pos: Pos, kind: ParseErrorKind, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            line: pos.line,
            column: pos.column,
            kind,
            message: message.into(),
        })
    }

    fn fail<T>(&self, kind: ParseErrorKind, message: impl Into<String>) -> PResult<T> {
        self.fail_at(self.here(), kind, message)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            let found = describe(self.peek());
            self.fail(
                ParseErrorKind::Syntax,
                format!("expected {}, found {found}", describe(Some(&t))),
            )
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        let pos = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok((s, pos))
            }
            t => self.fail(
                ParseErrorKind::Syntax,
                format!("expected {what}, found {}", describe(t.as_ref())),
            ),
        }
    }

    fn name(&mut self, what: &str) -> PResult<(String, Pos)> {
        let (s, pos) = self.ident(what)?;
        if KEYWORDS.contains(&s.as_str()) {
            return self.fail_at(pos, ParseErrorKind::Syntax, format!("{s:?} is a keyword"));
        }
        Ok((s, pos))
    }

    fn sort(&mut self) -> PResult<String> {
        let (s, pos) = self.name("a sort")?;
        if !self.sig.has_sort(&s) {
            return self.fail_at(
                pos,
                ParseErrorKind::UnknownSort,
                format!("unknown sort {s:?}"),
            );
        }
        Ok(s)
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.toks.len() {
            return self.fail(
                ParseErrorKind::Syntax,
                format!("unexpected {}", describe(self.peek())),
            );
        }
        Ok(())
    }

    fn sort_list(&mut self, stop: &[Tok]) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if self.peek().is_none_or(|t| stop.contains(t)) {
            return Ok(out);
        }
        loop {
            out.push(self.sort()?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    // ------------------------------------------------------------ terms

    fn term(&mut self) -> PResult<Term> {
        let (name, pos) = self.name("a term")?;
        if let Some(decl) = self.sig.functions.get(&name) {
            let args = if self.eat(&Tok::LParen) {
                let mut args = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                args
            } else {
                Vec::new()
            };
            self.check_args(&name, pos, &decl.args, &args)?;
            return Ok(Term::App {
                func: name,
                args,
                sort: decl.result.clone(),
                pos,
            });
        }
        if let Some(kind) = self.sig.symbol_kind(&name) {
            return self.fail_at(
                pos,
                ParseErrorKind::SortMismatch,
                format!("{kind} {name:?} used as a term"),
            );
        }
        match self.scope.iter().rev().find(|(v, _)| *v == name) {
            Some((_, sort)) => Ok(Term::Var {
                name,
                sort: sort.clone(),
                pos,
            }),
            None => self.fail_at(
                pos,
                ParseErrorKind::UnknownSymbol,
                format!("unbound variable {name:?}"),
            ),
        }
    }

    fn check_args(&self, name: &str, pos: Pos, expected: &[String], args: &[Term]) -> PResult<()> {
        if expected.len() != args.len() {
            return self.fail_at(
                pos,
                ParseErrorKind::Arity,
                format!(
                    "{name} expects {} argument(s), found {}",
                    expected.len(),
                    args.len()
                ),
            );
        }
        for (want, t) in expected.iter().zip(args) {
            if t.sort() != want {
                return self.fail_at(
                    t.pos(),
                    ParseErrorKind::SortMismatch,
                    format!("argument of {name} has sort {}, expected {want}", t.sort()),
                );
            }
        }
        Ok(())
    }

    // --------------------------------------------------------- formulas

    fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let pos = self.here();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(k)) if k == "top" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Ident(k)) if k == "bot" => {
                self.pos += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::Ident(k)) if k == "E" || k == "A" => {
                self.pos += 1;
                let (var, _) = self.name("a variable")?;
                self.expect(Tok::Colon)?;
                let sort = self.sort()?;
                self.expect(Tok::Dot)?;
                self.scope.push((var.clone(), sort.clone()));
                let body = self.formula();
                self.scope.pop();
                let body = Box::new(body?);
                Ok(if k == "E" {
                    Formula::Exists {
                        var,
                        sort,
                        body,
                        pos,
                    }
                } else {
                    Formula::Forall {
                        var,
                        sort,
                        body,
                        pos,
                    }
                })
            }
            Some(Tok::Ident(name)) if self.sig.relations.contains_key(&name) => {
                self.pos += 1;
                let expected = self.sig.relations[&name].clone();
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                self.check_args(&name, pos, &expected, &args)?;
                Ok(Formula::Rel { name, args, pos })
            }
            Some(Tok::Ident(name)) if self.sig.connectives.contains_key(&name) => {
                self.pos += 1;
                let connective = self.sig.connectives[&name].connective.clone();
                self.expect(Tok::LParen)?;
                let mut args = vec![self.formula()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.formula()?);
                }
                self.expect(Tok::RParen)?;
                if args.len() != connective.arity() {
                    return self.fail_at(
                        pos,
                        ParseErrorKind::Arity,
                        format!(
                            "{name} expects {} argument(s), found {}",
                            connective.arity(),
                            args.len()
                        ),
                    );
                }
                Ok(Formula::Conn {
                    name,
                    connective,
                    args,
                    pos,
                })
            }
            Some(Tok::Ident(_)) => {
                let s = self.term()?;
                self.expect(Tok::Equals)?;
                let t = self.term()?;
                if s.sort() != t.sort() {
                    return self.fail_at(
                        t.pos(),
                        ParseErrorKind::SortMismatch,
                        format!("equation between sorts {} and {}", s.sort(), t.sort()),
                    );
                }
                Ok(Formula::Eq(s, t))
            }
            t => self.fail(
                ParseErrorKind::Syntax,
                format!("expected a formula, found {}", describe(t.as_ref())),
            ),
        }
    }

    fn context(&mut self) -> PResult<Vec<(String, String)>> {
        let mut ctx: Vec<(String, String)> = Vec::new();
        if !self.eat(&Tok::LBrack) {
            return Ok(ctx);
        }
        if self.eat(&Tok::RBrack) {
            return Ok(ctx);
        }
        loop {
            let (v, pos) = self.name("a variable")?;
            if self.sig.symbol_kind(&v).is_some() {
                return self.fail_at(
                    pos,
                    ParseErrorKind::Duplicate,
                    format!("{v:?} is already a symbol"),
                );
            }
            if ctx.iter().any(|(w, _)| *w == v) {
                return self.fail_at(
                    pos,
                    ParseErrorKind::Duplicate,
                    format!("variable {v:?} repeated in context"),
                );
            }
            self.expect(Tok::Colon)?;
            let s = self.sort()?;
            ctx.push((v, s));
            if self.eat(&Tok::RBrack) {
                return Ok(ctx);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn sequent(&mut self) -> PResult<SequentAst> {
        let context = self.context()?;
        self.scope = context.clone();
        let lhs = self.formula()?;
        let bidirectional = match self.peek() {
            Some(Tok::Turnstile) => false,
            Some(Tok::BiTurnstile) => true,
            t => {
                let found = describe(t);
                return self.fail(
                    ParseErrorKind::Syntax,
                    format!("expected '|-' or '-||-', found {found}"),
                );
            }
        };
        self.pos += 1;
        let rhs = self.formula()?;
        self.finish()?;
        Ok(SequentAst {
            context,
            lhs,
            rhs,
            bidirectional,
            line: self.line,
        })
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn declare(sig: &Signature, name: &str, pos: Pos) -> PResult<()> {
    let clash = KEYWORDS.contains(&name) || sig.symbol_kind(name).is_some();
    if clash {
        return Err(ParseError {
            line: pos.line,
            column: pos.column,
            kind: ParseErrorKind::Duplicate,
            message: format!("{name:?} is already declared or reserved"),
        });
    }
    Ok(())
}

/// Parses a theory: declarations and sequents, one per line, `#` comments.
pub fn parse_theory(text: &str) -> PResult<Theory> {
    let mut theory = Theory::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        // connective bodies use their own expression syntax
        let head = match line.trim_start().strip_prefix("conn") {
            Some(rest) if rest.starts_with(char::is_whitespace) => {
                line.find(":=").map_or(line, |i| &line[..i + 2])
            }
            _ => line,
        };
        let mut p = LineParser::new(&theory.signature, head, lineno)?;
        match p.peek().cloned() {
            Some(Tok::Ident(k)) if k == "sort" => {
                p.pos += 1;
                let mut new = Vec::new();
                loop {
                    let (s, pos) = p.name("a sort name")?;
                    if theory.signature.has_sort(&s) || new.contains(&s) {
                        return p.fail_at(
                            pos,
                            ParseErrorKind::Duplicate,
                            format!("sort {s:?} already declared"),
                        );
                    }
                    new.push(s);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
                p.finish()?;
                theory.signature.sorts.extend(new);
            }
            Some(Tok::Ident(k)) if k == "func" => {
                p.pos += 1;
                let (name, pos) = p.name("a function name")?;
                declare(&theory.signature, &name, pos)?;
                p.expect(Tok::Colon)?;
                let args = p.sort_list(&[Tok::Arrow])?;
                p.expect(Tok::Arrow)?;
                let result = p.sort()?;
                p.finish()?;
                theory
                    .signature
                    .functions
                    .insert(name, FuncDecl { args, result });
            }
            Some(Tok::Ident(k)) if k == "rel" => {
                p.pos += 1;
                let (name, pos) = p.name("a relation name")?;
                declare(&theory.signature, &name, pos)?;
                let args = if p.eat(&Tok::Colon) {
                    p.sort_list(&[])?
                } else {
                    Vec::new()
                };
                p.finish()?;
                theory.signature.relations.insert(name, args);
            }
            Some(Tok::Ident(k)) if k == "conn" => {
                p.pos += 1;
                let (name, pos) = p.name("a connective name")?;
                declare(&theory.signature, &name, pos)?;
                p.expect(Tok::LParen)?;
                let mut params = Vec::new();
                loop {
                    let (v, vpos) = p.name("a parameter")?;
                    if params.contains(&v) {
                        return p.fail_at(
                            vpos,
                            ParseErrorKind::Duplicate,
                            format!("parameter {v:?} repeated"),
                        );
                    }
                    params.push(v);
                    if p.eat(&Tok::RParen) {
                        break;
                    }
                    p.expect(Tok::Comma)?;
                }
                let assign_col = p.column();
                p.expect(Tok::Assign)?;
                let body_start = p.toks[p.pos - 1].1 + 2;
                let body = &line[body_start..];
                let expr = parse_expr(body, &params).map_err(|e| ParseError {
                    line: lineno,
                    column: assign_col + 2 + body[..e.offset.min(body.len())].chars().count(),
                    kind: ParseErrorKind::Syntax,
                    message: e.message,
                })?;
                let connective = Connective::new(params, expr).map_err(|e| ParseError {
                    line: lineno,
                    column: pos.column,
                    kind: ParseErrorKind::Arity,
                    message: e.to_string(),
                })?;
                match classify(&connective, DEFAULT_GRID_EXPONENT) {
                    Ok(ClassifierVerdict::Preserves { .. }) => {}
                    Ok(ClassifierVerdict::Violates { p, q, .. }) => theory.warnings.push(Warning {
                        line: lineno,
                        message: format!(
                            "connective {name} does not preserve equivalence: u({}) = 0 but u({}) > 0",
                            join_values(&p),
                            join_values(&q)
                        ),
                    }),
                    Ok(ClassifierVerdict::Unknown { reason, .. }) => theory.warnings.push(Warning {
                        line: lineno,
                        message: format!("connective {name} could not be classified: {reason}"),
                    }),
                    Err(e) => theory.warnings.push(Warning { line: lineno, message: e.to_string() }),
                }
                theory.signature.connectives.insert(
                    name,
                    ConnDecl {
                        connective,
                        line: lineno,
                    },
                );
            }
            _ => {
                let seq = p.sequent()?;
                theory.sequents.push(seq);
            }
        }
    }
    Ok(theory)
}

fn join_values(v: &[crate::value::Value]) -> String {
    v.iter()
        .map(|x| x.ratio().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Parses one sequent line against an existing signature.
pub fn parse_sequent(sig: &Signature, text: &str) -> PResult<SequentAst> {
    let mut p = LineParser::new(sig, text, 1)?;
    p.sequent()
}

/// Parses a formula in the given context.
pub fn parse_formula(
    sig: &Signature,
    context: &[(String, String)],
    text: &str,
) -> PResult<Formula> {
    let mut p = LineParser::new(sig, text, 1)?;
    p.scope = context.to_vec();
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "sort S\nrel R : S\n";

    #[test]
    fn smallest_theory() {
        let t = parse_theory(&format!("{BASE}[x:S] R(x) |- (x=x)\n")).unwrap();
        assert_eq!(t.sequents.len(), 1);
        let s = &t.sequents[0];
        assert_eq!(s.context, vec![("x".to_string(), "S".to_string())]);
        assert!(matches!(s.lhs, Formula::Rel { .. }));
        assert!(matches!(s.rhs, Formula::Eq(..)));
        assert!(!s.bidirectional);
    }

    #[test]
    fn existential_formula() {
        let t = parse_theory(&format!("{BASE}E y:S. R(y) |- top")).unwrap();
        let s = &t.sequents[0];
        assert!(s.context.is_empty());
        let Formula::Exists {
            var, sort, body, ..
        } = &s.lhs
        else {
            panic!("{:?}", s.lhs)
        };
        assert_eq!((var.as_str(), sort.as_str()), ("y", "S"));
        assert!(matches!(**body, Formula::Rel { .. }));
        assert_eq!(s.rhs, Formula::Top);
    }

    #[test]
    fn truncated_input_reports_column() {
        let e = parse_theory(&format!("{BASE}R(")).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (3, 3, ParseErrorKind::Syntax));
    }

    #[test]
    fn error_kinds() {
        let kind = |src: &str| parse_theory(&format!("{BASE}{src}")).unwrap_err().kind;
        assert_eq!(kind("[x:T] R(x) |- top"), ParseErrorKind::UnknownSort);
        assert_eq!(kind("[x:S] R(y) |- top"), ParseErrorKind::UnknownSymbol);
        assert_eq!(kind("[x:S] R(x, x) |- top"), ParseErrorKind::Arity);
        assert_eq!(
            kind("sort T\n[x:S, y:T] x = y |- top"),
            ParseErrorKind::SortMismatch
        );
        assert_eq!(kind("rel R : S"), ParseErrorKind::Duplicate);
        assert_eq!(kind("[x:S] R(x) top"), ParseErrorKind::Syntax);
        assert_eq!(kind("[x:S] R(x) |- top extra"), ParseErrorKind::Syntax);
        assert_eq!(kind("[x:S] R(x) $ top"), ParseErrorKind::Syntax);
    }

    #[test]
    fn functions_and_precedence() {
        let src = "sort S, T\nfunc f : S -> T\nfunc c : -> S\nrel P : S, T\n\
                   [x:S] P(x, f(x)) \\/ P(c, f(c)) /\\ top -||- E y:T. A z:S. P(z, y)  # trailing\n";
        let t = parse_theory(src).unwrap();
        let s = &t.sequents[0];
        assert!(s.bidirectional);
        let Formula::Or(_, rhs) = &s.lhs else {
            panic!()
        };
        assert!(matches!(**rhs, Formula::And(..)));
        let again = parse_sequent(&t.signature, &s.to_string()).unwrap();
        assert_eq!(again.to_string(), s.to_string());
    }

    #[test]
    fn connectives_are_declared_and_flagged() {
        let t = parse_theory(&format!("{BASE}conn neg(x) := 1-x\nconn both(x, y) := max(x, y)\n[x:S] neg(R(x)) |- both(R(x), top)"))
            .unwrap();
        assert_eq!(t.warnings.len(), 1);
        assert_eq!(t.warnings[0].line, 3);
        assert!(matches!(t.sequents[0].lhs, Formula::Conn { .. }));
        let e = parse_theory(&format!("{BASE}conn neg(x) := 1-y")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.column, 18);
    }

    #[test]
    fn bound_variables_shadow() {
        let t = parse_theory(&format!("{BASE}sort T\n[x:T] E x:S. R(x) |- top")).unwrap();
        assert_eq!(t.sequents.len(), 1);
    }
}
