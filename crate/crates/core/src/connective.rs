//! Connectives `u : [0,1]ⁿ → [0,1]` and the test for whether they preserve
//! logical equivalence.
//!
//! `u` preserves `≃` exactly when its zero set is a union of strata
//! `Z_K = {z : zᵢ = 0 ⟺ i ∈ K}`. [`classify`] samples every stratum on a
//! dyadic grid; any stratum holding both a zero and a nonzero sample yields
//! a genuine counterexample pair. A sign abstraction over the expression
//! upgrades a clean scan to a certified verdict when it decides every
//! stratum on its own.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::order::equivalent;
use crate::predicate::Predicate;
use crate::value::{parse_rational, Value};

/// Expression grammar for connectives. Variables are 0-based here.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConnectiveExpr {
    Const(Value),
    Var(usize),
    Min(Box<ConnectiveExpr>, Box<ConnectiveExpr>),
    Max(Box<ConnectiveExpr>, Box<ConnectiveExpr>),
    /// `max(a - b, 0)`
    TSub(Box<ConnectiveExpr>, Box<ConnectiveExpr>),
    /// `min(a + b, 1)`
    TAdd(Box<ConnectiveExpr>, Box<ConnectiveExpr>),
    Scale(Value, Box<ConnectiveExpr>),
    /// `1 - e`
    Negate(Box<ConnectiveExpr>),
}

use ConnectiveExpr as E;

impl ConnectiveExpr {
    pub fn var(i: usize) -> Self {
        E::Var(i)
    }
    pub fn min(a: E, b: E) -> Self {
        E::Min(Box::new(a), Box::new(b))
    }
    pub fn max(a: E, b: E) -> Self {
        E::Max(Box::new(a), Box::new(b))
    }
    pub fn tsub(a: E, b: E) -> Self {
        E::TSub(Box::new(a), Box::new(b))
    }
    pub fn tadd(a: E, b: E) -> Self {
        E::TAdd(Box::new(a), Box::new(b))
    }
    pub fn scale(q: Value, e: E) -> Self {
        E::Scale(q, Box::new(e))
    }
    pub fn negate(e: E) -> Self {
        E::Negate(Box::new(e))
    }

    /// One more than the largest variable index used.
    pub fn min_arity(&self) -> usize {
        match self {
            E::Const(_) => 0,
            E::Var(i) => i + 1,
            E::Min(a, b) | E::Max(a, b) | E::TSub(a, b) | E::TAdd(a, b) => {
                a.min_arity().max(b.min_arity())
            }
            E::Scale(_, e) | E::Negate(e) => e.min_arity(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            E::Const(_) | E::Var(_) => 0,
            E::Min(a, b) | E::Max(a, b) | E::TSub(a, b) | E::TAdd(a, b) => {
                1 + a.depth().max(b.depth())
            }
            E::Scale(_, e) | E::Negate(e) => 1 + e.depth(),
        }
    }

    /// Exact evaluation; the point's length is not checked here beyond
    /// the variables actually used.
    pub fn eval(&self, point: &[Value]) -> Result<Value> {
        Ok(match self {
            E::Const(c) => *c,
            E::Var(i) => *point.get(*i).ok_or(Error::Arity {
                expected: i + 1,
                found: point.len(),
            })?,
            E::Min(a, b) => a.eval(point)?.min(b.eval(point)?),
            E::Max(a, b) => a.eval(point)?.max(b.eval(point)?),
            E::TSub(a, b) => a.eval(point)?.truncated_sub(b.eval(point)?)?,
            E::TAdd(a, b) => a.eval(point)?.truncated_add(b.eval(point)?)?,
            E::Scale(q, e) => q.mul(e.eval(point)?)?,
            E::Negate(e) => e.eval(point)?.complement(),
        })
    }

    fn render(&self, names: &[String], out: &mut String) {
        let name = |i: usize| {
            names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i + 1))
        };
        match self {
            E::Const(c) => out.push_str(&c.ratio().to_string()),
            E::Var(i) => out.push_str(&name(*i)),
            E::Min(a, b) | E::Max(a, b) | E::TSub(a, b) | E::TAdd(a, b) => {
                out.push_str(match self {
                    E::Min(..) => "min(",
                    E::Max(..) => "max(",
                    E::TSub(..) => "tsub(",
                    _ => "tadd(",
                });
                a.render(names, out);
                out.push_str(", ");
                b.render(names, out);
                out.push(')');
            }
            E::Scale(q, e) => {
                out.push_str(&format!("scale({}, ", q.ratio()));
                e.render(names, out);
                out.push(')');
            }
            E::Negate(e) => {
                out.push_str("negate(");
                e.render(names, out);
                out.push(')');
            }
        }
    }
}

/// A connective together with its ordered parameter names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Connective {
    params: Vec<String>,
    expr: ConnectiveExpr,
}

impl Connective {
    pub fn new(params: Vec<String>, expr: ConnectiveExpr) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Precondition(
                "a connective needs at least one argument".into(),
            ));
        }
        if expr.min_arity() > params.len() {
            return Err(Error::Arity {
                expected: params.len(),
                found: expr.min_arity(),
            });
        }
        Ok(Connective { params, expr })
    }

    /// Parameters named `x1 .. xn`.
    pub fn with_arity(n: usize, expr: ConnectiveExpr) -> Result<Self> {
        Connective::new((1..=n).map(|i| format!("x{i}")).collect(), expr)
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn expr(&self) -> &ConnectiveExpr {
        &self.expr
    }

    pub fn eval(&self, point: &[Value]) -> Result<Value> {
        if point.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                found: point.len(),
            });
        }
        self.expr.eval(point)
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.expr.render(&self.params, &mut s);
        f.write_str(&s)
    }
}

pub fn eval_connective(u: &Connective, point: &[Value]) -> Result<Value> {
    u.eval(point)
}

// ---------------------------------------------------------------- parsing

/// Error position is a 0-based byte offset into the expression text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Slash,
    Star,
    Minus,
    DotMinus,
    DotPlus,
}

fn lex(src: &str) -> std::result::Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '/' => Tok::Slash,
            '*' => Tok::Star,
            '-' if bytes.get(i + 1) == Some(&b'.') => {
                i += 1;
                Tok::DotMinus
            }
            '-' => Tok::Minus,
            '+' if bytes.get(i + 1) == Some(&b'.') => {
                i += 1;
                Tok::DotPlus
            }
            d if d.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..=i].parse().map_err(|_| ExprError {
                    offset: start,
                    message: "number too large".into(),
                })?;
                Tok::Num(n)
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(src[start..=i].to_string())
            }
            other => {
                return Err(ExprError {
                    offset: start,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    params: &'a [String],
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> std::result::Result<T, ExprError> {
        Err(ExprError {
            offset: self.offset(),
            message: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> std::result::Result<(), ExprError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn additive(&mut self) -> std::result::Result<E, ExprError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Some(Tok::DotPlus) => {
                    self.pos += 1;
                    lhs = E::tadd(lhs, self.multiplicative()?);
                }
                Some(Tok::DotMinus) => {
                    self.pos += 1;
                    lhs = E::tsub(lhs, self.multiplicative()?);
                }
                Some(Tok::Minus) => {
                    if lhs != E::Const(Value::ONE) {
                        return Err(ExprError {
                            offset: at,
                            message:
                                "plain '-' is only allowed as 1-e; use -. for truncated subtraction"
                                    .into(),
                        });
                    }
                    self.pos += 1;
                    lhs = E::negate(self.multiplicative()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn multiplicative(&mut self) -> std::result::Result<E, ExprError> {
        let at = self.offset();
        let lhs = self.atom()?;
        if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let E::Const(q) = lhs else {
                return Err(ExprError {
                    offset: at,
                    message: "scale factor must be a rational constant".into(),
                });
            };
            let rhs = self.multiplicative()?;
            return Ok(E::scale(q, rhs));
        }
        Ok(lhs)
    }

    fn number(&mut self) -> std::result::Result<Value, ExprError> {
        let at = self.offset();
        let Some(Tok::Num(p)) = self.peek().cloned() else {
            return self.err("expected a number");
        };
        self.pos += 1;
        let mut text = p.to_string();
        if self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            let Some(Tok::Num(q)) = self.peek().cloned() else {
                return self.err("expected a denominator");
            };
            self.pos += 1;
            text = format!("{p}/{q}");
        }
        let r = parse_rational(&text).map_err(|e| ExprError {
            offset: at,
            message: e.to_string(),
        })?;
        Value::from_ratio(r).map_err(|e| ExprError {
            offset: at,
            message: e.to_string(),
        })
    }

    fn atom(&mut self) -> std::result::Result<E, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(_)) => Ok(E::Const(self.number()?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.additive()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let at = self.offset();
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    return self.call(&name, at);
                }
                match self.params.iter().position(|p| *p == name) {
                    Some(i) => Ok(E::Var(i)),
                    None => Err(ExprError {
                        offset: at,
                        message: format!("unknown variable {name:?}"),
                    }),
                }
            }
            _ => self.err("expected an expression"),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> std::result::Result<E, ExprError> {
        self.expect(Tok::LParen, "'('")?;
        if name == "scale" {
            let q = self.number()?;
            self.expect(Tok::Comma, "','")?;
            let e = self.additive()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(E::scale(q, e));
        }
        let mut args = vec![self.additive()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.additive()?);
        }
        self.expect(Tok::RParen, "')'")?;
        let arity_err = |n: &str| ExprError {
            offset: at,
            message: format!("{name} takes {n} argument(s)"),
        };
        let binary = |args: Vec<E>, f: fn(E, E) -> E| -> std::result::Result<E, ExprError> {
            let mut it = args.into_iter();
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => Ok(f(a, b)),
                _ => Err(arity_err("2")),
            }
        };
        match name {
            "min" | "max" => {
                if args.len() < 2 {
                    return Err(arity_err("at least 2"));
                }
                let f: fn(E, E) -> E = if name == "min" { E::min } else { E::max };
                let mut it = args.into_iter();
                let first = it.next().expect("nonempty");
                Ok(it.fold(first, f))
            }
            "tsub" => binary(args, E::tsub),
            "tadd" => binary(args, E::tadd),
            "negate" => {
                if args.len() != 1 {
                    return Err(arity_err("1"));
                }
                Ok(E::negate(args.pop_first()))
            }
            other => Err(ExprError {
                offset: at,
                message: format!("unknown function {other:?}"),
            }),
        }
    }
}

trait PopFirst<T> {
    fn pop_first(self) -> T;
}

impl<T> PopFirst<T> for Vec<T> {
    fn pop_first(self) -> T {
        self.into_iter().next().expect("nonempty")
    }
}

const RESERVED: [&str; 6] = ["min", "max", "tsub", "tadd", "scale", "negate"];

/// Distinct identifiers of `src` that are not function names, ordered by
/// name with numeric suffixes compared numerically (`x2 < x10`).
fn free_names(src: &str) -> std::result::Result<Vec<String>, ExprError> {
    let toks = lex(src)?;
    let mut names: Vec<String> = Vec::new();
    for (i, (_, t)) in toks.iter().enumerate() {
        if let Tok::Ident(n) = t {
            let is_call = matches!(toks.get(i + 1), Some((_, Tok::LParen)));
            if !is_call && !RESERVED.contains(&n.as_str()) && !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    names.sort_by_key(|n| {
        let digits = n.len() - n.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (stem, num) = n.split_at(n.len() - digits);
        (stem.to_string(), num.parse::<u64>().ok(), n.clone())
    });
    Ok(names)
}

/// Parses an expression with explicitly ordered parameters.
pub fn parse_expr(src: &str, params: &[String]) -> std::result::Result<ConnectiveExpr, ExprError> {
    let toks = lex(src)?;
    let mut p = ExprParser {
        toks,
        pos: 0,
        end: src.len(),
        params,
    };
    let e = p.additive()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a connective whose parameters are the free variables of `src`.
pub fn parse_connective(src: &str) -> std::result::Result<Connective, ExprError> {
    let params = free_names(src)?;
    let expr = parse_expr(src, &params)?;
    if params.is_empty() {
        return Err(ExprError {
            offset: 0,
            message: "a connective needs at least one variable".into(),
        });
    }
    Ok(Connective { params, expr })
}

// ---------------------------------------------------------------- strata

/// The stratum `Z_K` of points whose zero coordinates are exactly `K`
/// (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stratum {
    pub zeros: BTreeSet<usize>,
}

impl Stratum {
    /// All `2ⁿ` strata, by size of `K` and then lexicographically.
    pub fn all(n: usize) -> Vec<Stratum> {
        let mut v: Vec<Stratum> = (0u64..(1u64 << n))
            .map(|mask| Stratum {
                zeros: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
            })
            .collect();
        v.sort_by(|a, b| {
            a.zeros
                .len()
                .cmp(&b.zeros.len())
                .then_with(|| a.zeros.cmp(&b.zeros))
        });
        v
    }

    pub fn contains(&self, point: &[Value]) -> bool {
        point
            .iter()
            .enumerate()
            .all(|(i, v)| v.is_zero() == self.zeros.contains(&i))
    }

    pub fn of(point: &[Value]) -> Stratum {
        Stratum {
            zeros: point
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_zero())
                .map(|(i, _)| i)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StratumStatus {
    AllZero,
    NoZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    /// 1-based indices of the zero coordinates.
    pub zeros: Vec<usize>,
    pub status: StratumStatus,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ClassifierVerdict {
    Preserves {
        grid: Value,
        certified: bool,
        strata: Vec<StratumReport>,
    },
    Violates {
        p: Vec<Value>,
        q: Vec<Value>,
        u_p: Value,
        u_q: Value,
    },
    Unknown {
        grid: Value,
        reason: String,
    },
}

impl ClassifierVerdict {
    pub fn preserves(&self) -> bool {
        matches!(self, ClassifierVerdict::Preserves { .. })
    }
    pub fn violates(&self) -> bool {
        matches!(self, ClassifierVerdict::Violates { .. })
    }
}

/// Three-valued answer of the sign abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    Always,
    Never,
    Unknown,
}

use Tri::{Always, Never, Unknown};

fn tri_or(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Always, _) | (_, Always) => Always,
        (Never, Never) => Never,
        _ => Unknown,
    }
}

fn tri_and(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Never, _) | (_, Never) => Never,
        (Always, Always) => Always,
        _ => Unknown,
    }
}

/// Whether the expression is zero, and whether it is one, on a stratum.
#[derive(Clone, Copy, Debug)]
struct Sign {
    zero: Tri,
    one: Tri,
}

fn abstract_sign(e: &E, k: &Stratum) -> Sign {
    match e {
        E::Const(c) => Sign {
            zero: if c.is_zero() { Always } else { Never },
            one: if c.is_one() { Always } else { Never },
        },
        E::Var(i) if k.zeros.contains(i) => Sign {
            zero: Always,
            one: Never,
        },
        E::Var(_) => Sign {
            zero: Never,
            one: Unknown,
        },
        E::Min(a, b) => {
            let (a, b) = (abstract_sign(a, k), abstract_sign(b, k));
            Sign {
                zero: tri_or(a.zero, b.zero),
                one: tri_and(a.one, b.one),
            }
        }
        E::Max(a, b) => {
            let (a, b) = (abstract_sign(a, k), abstract_sign(b, k));
            Sign {
                zero: tri_and(a.zero, b.zero),
                one: tri_or(a.one, b.one),
            }
        }
        E::TAdd(a, b) => {
            let (a, b) = (abstract_sign(a, k), abstract_sign(b, k));
            let one = if a.one == Always || b.one == Always {
                Always
            } else if (a.zero == Always && b.one == Never) || (b.zero == Always && a.one == Never) {
                Never
            } else {
                Unknown
            };
            Sign {
                zero: tri_and(a.zero, b.zero),
                one,
            }
        }
        E::TSub(a, b) => {
            let (a, b) = (abstract_sign(a, k), abstract_sign(b, k));
            let zero = if a.zero == Always || b.one == Always {
                Always
            } else if b.zero == Always && a.zero == Never {
                Never
            } else {
                Unknown
            };
            let one = match (a.one, b.zero) {
                (Always, Always) => Always,
                (Never, _) | (_, Never) => Never,
                _ => Unknown,
            };
            Sign { zero, one }
        }
        E::Scale(q, e) => {
            if q.is_zero() {
                return Sign {
                    zero: Always,
                    one: Never,
                };
            }
            let s = abstract_sign(e, k);
            Sign {
                zero: s.zero,
                one: if q.is_one() { s.one } else { Never },
            }
        }
        E::Negate(e) => {
            let s = abstract_sign(e, k);
            Sign {
                zero: s.one,
                one: s.zero,
            }
        }
    }
}

/// Symbolic zero status of `u` on each stratum, where the abstraction
/// decides it (`None` otherwise). Same order as [`Stratum::all`].
pub fn symbolic_strata(u: &Connective) -> Vec<(Stratum, Option<StratumStatus>)> {
    Stratum::all(u.arity())
        .into_iter()
        .map(|k| {
            let status = match abstract_sign(u.expr(), &k).zero {
                Always => Some(StratumStatus::AllZero),
                Never => Some(StratumStatus::NoZero),
                Unknown => None,
            };
            (k, status)
        })
        .collect()
}

/// Upper bound on the number of sampled points.
pub const SAMPLE_BUDGET: u64 = 1 << 22;

/// Default grid resolution exponent: `h = 1/16`.
pub const DEFAULT_GRID_EXPONENT: u32 = 4;

/// Classifies `u` on the stratum grids of resolution `h = 1/2^k`, `k ≥ 1`.
pub fn classify(u: &Connective, k: u32) -> Result<ClassifierVerdict> {
    if k == 0 || k > 30 {
        return Err(Error::Precondition(
            "grid resolution must be 1/2^k with 1 <= k <= 30".into(),
        ));
    }
    let h = Value::dyadic(k);
    let n = u.arity();
    let per_axis = (1u64 << k) + 1;
    if per_axis
        .checked_pow(n as u32)
        .is_none_or(|t| t > SAMPLE_BUDGET)
    {
        return Ok(ClassifierVerdict::Unknown {
            grid: h,
            reason: format!("sample budget exceeded for arity {n}"),
        });
    }
    let symbolic = symbolic_strata(u);
    let mut reports = Vec::with_capacity(symbolic.len());
    let mut certified_all = true;
    for (stratum, sym) in symbolic {
        let mut status = None;
        for level in 0..=k {
            match scan_stratum(u, &stratum, level) {
                Ok(Scan::Mixed { p, q, u_q }) => {
                    return Ok(ClassifierVerdict::Violates {
                        p,
                        q,
                        u_p: Value::ZERO,
                        u_q,
                    });
                }
                Ok(Scan::Uniform(s)) => status = Some(s),
                Err(Error::Overflow(what)) => {
                    return Ok(ClassifierVerdict::Unknown {
                        grid: h,
                        reason: format!("overflow in {what}"),
                    })
                }
                Err(e) => return Err(e),
            }
        }
        let status = status.expect("at least one level scanned");
        debug_assert!(
            sym.is_none_or(|s| s == status),
            "sign abstraction disagrees with sampling"
        );
        let certified = sym == Some(status);
        certified_all &= certified;
        reports.push(StratumReport {
            zeros: stratum.zeros.iter().map(|i| i + 1).collect(),
            status,
            certified,
        });
    }
    Ok(ClassifierVerdict::Preserves {
        grid: h,
        certified: certified_all,
        strata: reports,
    })
}

enum Scan {
    Uniform(StratumStatus),
    Mixed {
        p: Vec<Value>,
        q: Vec<Value>,
        u_q: Value,
    },
}

/// Scans the points of a stratum whose nonzero coordinates lie in
/// `{1/2^level, 2/2^level, …, 1}`, in lexicographic order.
fn scan_stratum(u: &Connective, stratum: &Stratum, level: u32) -> Result<Scan> {
    let n = u.arity();
    let steps = 1i64 << level;
    let free: Vec<usize> = (0..n).filter(|i| !stratum.zeros.contains(i)).collect();
    let mut counter = vec![1i64; free.len()];
    let mut first_zero: Option<Vec<Value>> = None;
    let mut first_pos: Option<(Vec<Value>, Value)> = None;
    loop {
        let mut point = vec![Value::ZERO; n];
        for (slot, &c) in free.iter().zip(&counter) {
            point[*slot] = Value::new(c, steps)?;
        }
        let val = u.eval(&point)?;
        if val.is_zero() {
            first_zero.get_or_insert(point);
        } else if first_pos.is_none() {
            first_pos = Some((point, val));
        }
        // advance the odometer, last coordinate fastest
        let mut i = counter.len();
        loop {
            if i == 0 {
                return Ok(match (first_zero, first_pos) {
                    (Some(p), Some((q, u_q))) => Scan::Mixed { p, q, u_q },
                    (Some(_), None) => Scan::Uniform(StratumStatus::AllZero),
                    _ => Scan::Uniform(StratumStatus::NoZero),
                });
            }
            i -= 1;
            if counter[i] < steps {
                counter[i] += 1;
                counter[i + 1..].iter_mut().for_each(|c| *c = 1);
                break;
            }
        }
    }
}

/// `u(φ₁, …, φₙ)` computed pointwise.
pub fn apply_connective(u: &Connective, args: &[Predicate]) -> Result<Predicate> {
    if args.len() != u.arity() {
        return Err(Error::Arity {
            expected: u.arity(),
            found: args.len(),
        });
    }
    let Some(first) = args.first() else {
        return Err(Error::Arity {
            expected: u.arity(),
            found: 0,
        });
    };
    for a in &args[1..] {
        first.carrier().ensure_eq(a.carrier())?;
    }
    let mut point = vec![Value::ZERO; args.len()];
    Predicate::try_from_fn(first.carrier(), |e| {
        for (slot, a) in point.iter_mut().zip(args) {
            *slot = a.at(e);
        }
        u.eval(&point)
    })
}

/// Constant predicates built from a violating witness pair: the inputs are
/// pairwise `≃` but the outputs are not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationDemo {
    pub phis: Vec<Predicate>,
    pub phis_prime: Vec<Predicate>,
    pub output: Predicate,
    pub output_prime: Predicate,
    pub inputs_equivalent: bool,
    pub outputs_equivalent: bool,
}

pub fn demonstrate_violation(
    u: &Connective,
    p: &[Value],
    q: &[Value],
    x: &Carrier,
) -> Result<ViolationDemo> {
    let bad = |m: &str| Err(Error::InvalidWitness(m.to_string()));
    if p.len() != u.arity() || q.len() != u.arity() {
        return bad("witness length differs from the arity");
    }
    if Stratum::of(p) != Stratum::of(q) {
        return bad("witnesses have different zero patterns");
    }
    if !u.eval(p)?.is_zero() || u.eval(q)?.is_zero() {
        return bad("need u(p) = 0 and u(q) > 0");
    }
    if x.is_empty() {
        return bad("the carrier must be nonempty");
    }
    let phis: Vec<Predicate> = p.iter().map(|&v| Predicate::constant(x, v)).collect();
    let phis_prime: Vec<Predicate> = q.iter().map(|&v| Predicate::constant(x, v)).collect();
    let inputs_equivalent = phis
        .iter()
        .zip(&phis_prime)
        .map(|(a, b)| equivalent(a, b))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    let output = apply_connective(u, &phis)?;
    let output_prime = apply_connective(u, &phis_prime)?;
    let outputs_equivalent = equivalent(&output, &output_prime)?;
    Ok(ViolationDemo {
        phis,
        phis_prime,
        output,
        output_prime,
        inputs_equivalent,
        outputs_equivalent,
    })
}

/// [`demonstrate_violation`] driven by a verdict; only `violates` verdicts
/// are accepted.
pub fn demonstrate(
    u: &Connective,
    verdict: &ClassifierVerdict,
    x: &Carrier,
) -> Result<ViolationDemo> {
    match verdict {
        ClassifierVerdict::Violates { p, q, .. } => demonstrate_violation(u, p, q, x),
        _ => Err(Error::Precondition(
            "demonstration needs a violates verdict".into(),
        )),
    }
}
