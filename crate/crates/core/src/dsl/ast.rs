use std::collections::BTreeMap;
use std::fmt;

use crate::connective::Connective;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub args: Vec<String>,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnDecl {
    pub connective: Connective,
    pub line: usize,
}

/// Sorts, function symbols, relation symbols and named connectives.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub functions: BTreeMap<String, FuncDecl>,
    pub relations: BTreeMap<String, Vec<String>>,
    pub connectives: BTreeMap<String, ConnDecl>,
}

impl Signature {
    pub fn has_sort(&self, s: &str) -> bool {
        self.sorts.iter().any(|x| x == s)
    }

    pub(crate) fn symbol_kind(&self, name: &str) -> Option<&'static str> {
        if self.functions.contains_key(name) {
            Some("function")
        } else if self.relations.contains_key(name) {
            Some("relation")
        } else if self.connectives.contains_key(name) {
            Some("connective")
        } else {
            None
        }
    }
}

/// A well-sorted term. Every node records its sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var {
        name: String,
        sort: String,
        pos: Pos,
    },
    App {
        func: String,
        args: Vec<Term>,
        sort: String,
        pos: Pos,
    },
}

impl Term {
    pub fn sort(&self) -> &str {
        match self {
            Term::Var { sort, .. } | Term::App { sort, .. } => sort,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Term::Var { pos, .. } | Term::App { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    Rel {
        name: String,
        args: Vec<Term>,
        pos: Pos,
    },
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists {
        var: String,
        sort: String,
        body: Box<Formula>,
        pos: Pos,
    },
    Forall {
        var: String,
        sort: String,
        body: Box<Formula>,
        pos: Pos,
    },
    Conn {
        name: String,
        connective: Connective,
        args: Vec<Formula>,
        pos: Pos,
    },
}

impl Formula {
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Rel { .. } | Formula::Eq(..) => 0,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Exists { body, .. } | Formula::Forall { body, .. } => 1 + body.depth(),
            Formula::Conn { args, .. } => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }
}

/// `[x̄] lhs |- rhs`, or `-||-` when bidirectional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentAst {
    pub context: Vec<(String, String)>,
    pub lhs: Formula,
    pub rhs: Formula,
    pub bidirectional: bool,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub sequents: Vec<SequentAst>,
    pub warnings: Vec<Warning>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { name, .. } => f.write_str(name),
            Term::App { func, args, .. } => {
                write!(f, "{func}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("top"),
            Formula::Bot => f.write_str("bot"),
            Formula::Rel { name, args, .. } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(s, t) => write!(f, "{s} = {t}"),
            Formula::And(a, b) => write!(f, "({a} /\\ {b})"),
            Formula::Or(a, b) => write!(f, "({a} \\/ {b})"),
            Formula::Exists {
                var, sort, body, ..
            } => write!(f, "(E {var}:{sort}. {body})"),
            Formula::Forall {
                var, sort, body, ..
            } => write!(f, "(A {var}:{sort}. {body})"),
            Formula::Conn { name, args, .. } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for SequentAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, s)) in self.context.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}:{s}")?;
        }
        let turnstile = if self.bidirectional { "-||-" } else { "|-" };
        write!(f, "] {} {turnstile} {}", self.lhs, self.rhs)
    }
}
