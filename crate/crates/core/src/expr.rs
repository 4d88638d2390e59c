//! Structural equation bodies: the expression AST, its type checker and evaluator.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// An explicit lookup table applied to a list of variables.
///
/// Each row maps one tuple of argument values (in argument order) to a value
/// of the target domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableExpr {
    pub args: Vec<String>,
    pub rows: Vec<(Vec<String>, String)>,
}

/// Expression AST for structural equation bodies.
///
/// Names are split into variable references and value literals by the
/// parser; a name that is both refers to the variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Lit(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    Table(TableExpr),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn lit(value: impl Into<String>) -> Self {
        Expr::Lit(value.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Self {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn ite(c: Expr, a: Expr, b: Expr) -> Self {
        Expr::Ite(Box::new(c), Box::new(a), Box::new(b))
    }

    /// Variables the expression reads: its parents when used as an equation body.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Lit(_) => {}
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Cmp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Ite(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Min(args) | Expr::Max(args) => args.iter().for_each(|e| e.collect_vars(out)),
            Expr::Table(t) => out.extend(t.args.iter().cloned()),
        }
    }

    /// Turns references to non-variables that name a known value into literals.
    pub(crate) fn resolve_names(&mut self, is_var: &dyn Fn(&str) -> bool, is_value: &dyn Fn(&str) -> bool) {
        match self {
            Expr::Var(v) => {
                if !is_var(v) && is_value(v) {
                    *self = Expr::Lit(std::mem::take(v));
                }
            }
            Expr::Lit(_) | Expr::Table(_) => {}
            Expr::Not(e) => e.resolve_names(is_var, is_value),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Cmp(_, a, b) => {
                a.resolve_names(is_var, is_value);
                b.resolve_names(is_var, is_value);
            }
            Expr::Ite(c, a, b) => {
                c.resolve_names(is_var, is_value);
                a.resolve_names(is_var, is_value);
                b.resolve_names(is_var, is_value);
            }
            Expr::Min(args) | Expr::Max(args) => {
                args.iter_mut().for_each(|e| e.resolve_names(is_var, is_value))
            }
        }
    }

    pub(crate) fn tables_mut(&mut self, f: &mut dyn FnMut(&mut TableExpr)) {
        match self {
            Expr::Var(_) | Expr::Lit(_) => {}
            Expr::Table(t) => f(t),
            Expr::Not(e) => e.tables_mut(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Cmp(_, a, b) => {
                a.tables_mut(f);
                b.tables_mut(f);
            }
            Expr::Ite(c, a, b) => {
                c.tables_mut(f);
                a.tables_mut(f);
                b.tables_mut(f);
            }
            Expr::Min(args) | Expr::Max(args) => args.iter_mut().for_each(|e| e.tables_mut(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Ite(..) => 0,
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Not(_) => 3,
            Expr::Cmp(..) => 4,
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_prec(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Var(v) | Expr::Lit(v) => f.write_str(v),
            Expr::Not(e) => {
                f.write_str("not ")?;
                e.write_prec(f, 3)
            }
            Expr::And(a, b) => {
                a.write_prec(f, 2)?;
                f.write_str(" and ")?;
                b.write_prec(f, 3)
            }
            Expr::Or(a, b) => {
                a.write_prec(f, 1)?;
                f.write_str(" or ")?;
                b.write_prec(f, 2)
            }
            Expr::Cmp(op, a, b) => {
                a.write_prec(f, 5)?;
                write!(f, " {} ", op.symbol())?;
                b.write_prec(f, 5)
            }
            Expr::Ite(c, a, b) => {
                f.write_str("if ")?;
                c.write_prec(f, 1)?;
                f.write_str(" then ")?;
                a.write_prec(f, 0)?;
                f.write_str(" else ")?;
                b.write_prec(f, 0)
            }
            Expr::Min(args) | Expr::Max(args) => {
                f.write_str(if matches!(self, Expr::Min(_)) { "min(" } else { "max(" })?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write_prec(f, 0)?;
                }
                f.write_str(")")
            }
            Expr::Table(t) => {
                write!(f, "table({}) {{", t.args.join(", "))?;
                for (i, (key, out)) in t.rows.iter().enumerate() {
                    f.write_str(if i == 0 { "\n" } else { ",\n" })?;
                    write!(f, "  ({}) -> {}", key.join(", "), out)?;
                }
                f.write_str(if t.rows.is_empty() { "}" } else { "\n}" })
            }
        }
    }
}

/// Prints the expression in concrete syntax with the minimal parentheses
/// needed to re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

/// A type error or unresolved reference found while compiling an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CompileError {
    UnknownVariable(String),
    UndeclaredValue(String),
    Type { message: String, path: Vec<usize> },
    Table(String),
}

/// What the compiler knows about the variables in scope.
pub(crate) struct Scope<'a> {
    pub domains: &'a [Domain],
    /// variable name -> (variable index, domain index)
    pub vars: &'a HashMap<String, (usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Bool,
    Dom(usize),
}

/// Domain-valued compiled expression; evaluates to a value index.
#[derive(Debug, Clone)]
pub(crate) enum Term {
    Var(usize),
    Lit(usize),
    FromCond {
        cond: Box<Cond>,
        zero: usize,
        one: usize,
    },
    Ite(Box<Cond>, Box<Term>, Box<Term>),
    Min(Vec<Term>, Vec<usize>),
    Max(Vec<Term>, Vec<usize>),
    Table {
        args: Vec<usize>,
        radices: Vec<usize>,
        rows: Vec<usize>,
    },
}

/// Boolean compiled expression.
#[derive(Debug, Clone)]
pub(crate) enum Cond {
    Const(bool),
    Truth(Box<Term>, usize),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Ite(Box<Cond>, Box<Cond>, Box<Cond>),
    Cmp(CmpOp, Box<Term>, Box<Term>, usize),
    BoolCmp(CmpOp, Box<Cond>, Box<Cond>),
}

impl Term {
    pub(crate) fn eval(&self, env: &[usize], domains: &[Domain]) -> usize {
        match self {
            Term::Var(i) => env[*i],
            Term::Lit(v) => *v,
            Term::FromCond { cond, zero, one } => {
                if cond.eval(env, domains) {
                    *one
                } else {
                    *zero
                }
            }
            Term::Ite(c, a, b) => {
                if c.eval(env, domains) {
                    a.eval(env, domains)
                } else {
                    b.eval(env, domains)
                }
            }
            Term::Min(args, rank) => args
                .iter()
                .map(|a| a.eval(env, domains))
                .min_by_key(|v| rank[*v])
                .expect("min has at least one argument"),
            Term::Max(args, rank) => args
                .iter()
                .map(|a| a.eval(env, domains))
                .max_by_key(|v| rank[*v])
                .expect("max has at least one argument"),
            Term::Table { args, radices, rows } => {
                let mut idx = 0;
                for (a, r) in args.iter().zip(radices) {
                    idx = idx * r + env[*a];
                }
                rows[idx]
            }
        }
    }
}

fn cmp_bools(op: CmpOp, a: bool, b: bool) -> bool {
    match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        CmpOp::Lt => !a && b,
        CmpOp::Le => !a || b,
        CmpOp::Gt => a && !b,
        CmpOp::Ge => a || !b,
    }
}

impl Cond {
    pub(crate) fn eval(&self, env: &[usize], domains: &[Domain]) -> bool {
        match self {
            Cond::Const(b) => *b,
            Cond::Truth(t, one) => t.eval(env, domains) == *one,
            Cond::Not(c) => !c.eval(env, domains),
            Cond::And(a, b) => a.eval(env, domains) && b.eval(env, domains),
            Cond::Or(a, b) => a.eval(env, domains) || b.eval(env, domains),
            Cond::Ite(c, a, b) => {
                if c.eval(env, domains) {
                    a.eval(env, domains)
                } else {
                    b.eval(env, domains)
                }
            }
            Cond::Cmp(op, a, b, d) => {
                let (x, y) = (a.eval(env, domains), b.eval(env, domains));
                let dom = &domains[*d];
                match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Lt => dom.less_idx(x, y),
                    CmpOp::Le => dom.leq_idx(x, y),
                    CmpOp::Gt => dom.less_idx(y, x),
                    CmpOp::Ge => dom.leq_idx(y, x),
                }
            }
            Cond::BoolCmp(op, a, b) => cmp_bools(*op, a.eval(env, domains), b.eval(env, domains)),
        }
    }
}

struct Compiler<'a> {
    scope: &'a Scope<'a>,
    path: Vec<usize>,
}

impl Compiler<'_> {
    fn type_error(&self, message: impl Into<String>) -> CompileError {
        CompileError::Type {
            message: message.into(),
            path: self.path.clone(),
        }
    }

    fn at<T>(&mut self, child: usize, f: impl FnOnce(&mut Self) -> Result<T, CompileError>) -> Result<T, CompileError> {
        self.path.push(child);
        let out = f(self);
        self.path.pop();
        out
    }

    fn domain(&self, d: usize) -> &Domain {
        &self.scope.domains[d]
    }

    fn is_boolish(&self, t: Ty) -> bool {
        match t {
            Ty::Bool => true,
            Ty::Dom(d) => self.domain(d).is_binary(),
        }
    }

    fn lookup_var(&self, name: &str) -> Result<(usize, usize), CompileError> {
        self.scope
            .vars
            .get(name)
            .copied()
            .ok_or_else(|| CompileError::UnknownVariable(name.to_string()))
    }

    /// Type of an expression without looking at literals.
    fn infer_structural(&self, e: &Expr) -> Option<Ty> {
        match e {
            Expr::Var(v) => self.scope.vars.get(v).map(|&(_, d)| Ty::Dom(d)),
            Expr::Lit(_) | Expr::Table(_) => None,
            Expr::Not(_) | Expr::And(..) | Expr::Or(..) | Expr::Cmp(..) => Some(Ty::Bool),
            Expr::Ite(_, a, b) => self.infer_structural(a).or_else(|| self.infer_structural(b)),
            Expr::Min(args) | Expr::Max(args) => args.iter().find_map(|a| self.infer_structural(a)),
        }
    }

    /// Type of an expression, using a literal only if exactly one domain declares it.
    fn infer(&self, e: &Expr) -> Option<Ty> {
        if let Some(t) = self.infer_structural(e) {
            return Some(t);
        }
        match e {
            Expr::Lit(v) => {
                let mut owners = self
                    .scope
                    .domains
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.contains(v));
                match (owners.next(), owners.next()) {
                    (Some((i, _)), None) => Some(Ty::Dom(i)),
                    _ => None,
                }
            }
            Expr::Ite(_, a, b) => self.infer(a).or_else(|| self.infer(b)),
            Expr::Min(args) | Expr::Max(args) => args.iter().find_map(|a| self.infer(a)),
            _ => None,
        }
    }

    fn describe(&self, t: Ty) -> String {
        match t {
            Ty::Bool => "boolean".to_string(),
            Ty::Dom(d) => format!("domain `{}`", self.domain(d).name()),
        }
    }

    fn value_in_any_domain(&self, v: &str) -> bool {
        self.scope.domains.iter().any(|d| d.contains(v))
    }

    fn term(&mut self, e: &Expr, expected: usize) -> Result<Term, CompileError> {
        let dom = self.domain(expected).clone();
        match e {
            Expr::Var(v) => {
                let (idx, d) = self.lookup_var(v)?;
                if d == expected {
                    Ok(Term::Var(idx))
                } else if self.domain(d).is_binary() && dom.is_binary() {
                    let one = self.domain(d).binary_indices().expect("binary").one;
                    let bits = dom.binary_indices().expect("binary");
                    Ok(Term::FromCond {
                        cond: Box::new(Cond::Truth(Box::new(Term::Var(idx)), one)),
                        zero: bits.zero,
                        one: bits.one,
                    })
                } else {
                    Err(self.type_error(format!(
                        "`{v}` has domain `{}` but domain `{}` is required",
                        self.domain(d).name(),
                        dom.name()
                    )))
                }
            }
            Expr::Lit(v) => match dom.index_of(v) {
                Some(i) => Ok(Term::Lit(i)),
                None if self.value_in_any_domain(v) => Err(self.type_error(format!(
                    "value `{v}` is not in domain `{}`",
                    dom.name()
                ))),
                None => Err(CompileError::UndeclaredValue(v.clone())),
            },
            Expr::Not(_) | Expr::And(..) | Expr::Or(..) | Expr::Cmp(..) => {
                let Some(bits) = dom.binary_indices() else {
                    return Err(self.type_error(format!(
                        "boolean expression used where domain `{}` is required",
                        dom.name()
                    )));
                };
                Ok(Term::FromCond {
                    cond: Box::new(self.cond(e)?),
                    zero: bits.zero,
                    one: bits.one,
                })
            }
            Expr::Ite(c, a, b) => {
                let c = self.at(0, |s| s.cond(c))?;
                let a = self.at(1, |s| s.term(a, expected))?;
                let b = self.at(2, |s| s.term(b, expected))?;
                Ok(Term::Ite(Box::new(c), Box::new(a), Box::new(b)))
            }
            Expr::Min(args) | Expr::Max(args) => {
                let op = if matches!(e, Expr::Min(_)) { "min" } else { "max" };
                if args.is_empty() {
                    return Err(self.type_error(format!("`{op}` needs at least one argument")));
                }
                if !dom.is_total() {
                    return Err(self.type_error(format!(
                        "`{op}` requires a totally ordered domain, `{}` is not",
                        dom.name()
                    )));
                }
                let terms = args
                    .iter()
                    .enumerate()
                    .map(|(i, a)| self.at(i, |s| s.term(a, expected)))
                    .collect::<Result<Vec<_>, _>>()?;
                let rank = (0..dom.len()).map(|v| dom.rank(v)).collect();
                Ok(if op == "min" {
                    Term::Min(terms, rank)
                } else {
                    Term::Max(terms, rank)
                })
            }
            Expr::Table(t) => self.table(t, &dom),
        }
    }

    fn table(&mut self, t: &TableExpr, target: &Domain) -> Result<Term, CompileError> {
        let mut args = Vec::with_capacity(t.args.len());
        let mut arg_domains = Vec::with_capacity(t.args.len());
        for (i, a) in t.args.iter().enumerate() {
            if t.args[..i].contains(a) {
                return Err(CompileError::Table(format!("argument `{a}` is repeated")));
            }
            let (idx, d) = self.lookup_var(a)?;
            args.push(idx);
            arg_domains.push(self.domain(d).clone());
        }
        let radices: Vec<usize> = arg_domains.iter().map(Domain::len).collect();
        let size: usize = radices.iter().product();
        let mut rows: Vec<Option<usize>> = vec![None; size];
        for (key, out) in &t.rows {
            if key.len() != args.len() {
                return Err(CompileError::Table(format!(
                    "row ({}) has {} values but the table has {} arguments",
                    key.join(", "),
                    key.len(),
                    args.len()
                )));
            }
            let mut idx = 0;
            for (v, d) in key.iter().zip(&arg_domains) {
                let Some(i) = d.index_of(v) else {
                    return Err(if self.value_in_any_domain(v) {
                        CompileError::Table(format!("value `{v}` is not in domain `{}`", d.name()))
                    } else {
                        CompileError::UndeclaredValue(v.clone())
                    });
                };
                idx = idx * d.len() + i;
            }
            let Some(o) = target.index_of(out) else {
                return Err(if self.value_in_any_domain(out) {
                    CompileError::Table(format!(
                        "result `{out}` is not in domain `{}`",
                        target.name()
                    ))
                } else {
                    CompileError::UndeclaredValue(out.clone())
                });
            };
            if rows[idx].replace(o).is_some() {
                return Err(CompileError::Table(format!(
                    "row ({}) is defined more than once",
                    key.join(", ")
                )));
            }
        }
        let missing = rows.iter().filter(|r| r.is_none()).count();
        if missing > 0 {
            return Err(CompileError::Table(format!(
                "table is partial: {missing} of {size} argument combinations have no row"
            )));
        }
        Ok(Term::Table {
            args,
            radices,
            rows: rows.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Rejects operands of `op` that are known to be non-binary, reporting at the operator.
    fn check_operand(&self, op: &str, e: &Expr) -> Result<(), CompileError> {
        match self.infer_structural(e) {
            Some(t) if !self.is_boolish(t) => Err(self.type_error(format!(
                "operator `{op}` requires binary operands, found {}",
                self.describe(t)
            ))),
            _ => Ok(()),
        }
    }

    fn cond(&mut self, e: &Expr) -> Result<Cond, CompileError> {
        match e {
            Expr::Var(v) => {
                let (idx, d) = self.lookup_var(v)?;
                match self.domain(d).binary_indices() {
                    Some(bits) => Ok(Cond::Truth(Box::new(Term::Var(idx)), bits.one)),
                    None => Err(self.type_error(format!(
                        "`{v}` has non-binary domain `{}` but a boolean is required",
                        self.domain(d).name()
                    ))),
                }
            }
            Expr::Lit(v) => match v.as_str() {
                "0" => Ok(Cond::Const(false)),
                "1" => Ok(Cond::Const(true)),
                _ if self.value_in_any_domain(v) => {
                    Err(self.type_error(format!("value `{v}` is not a boolean")))
                }
                _ => Err(CompileError::UndeclaredValue(v.clone())),
            },
            Expr::Not(a) => {
                self.check_operand("not", a)?;
                let a = self.at(0, |s| s.cond(a))?;
                Ok(Cond::Not(Box::new(a)))
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                let op = if matches!(e, Expr::And(..)) { "and" } else { "or" };
                self.check_operand(op, a)?;
                self.check_operand(op, b)?;
                let a = self.at(0, |s| s.cond(a))?;
                let b = self.at(1, |s| s.cond(b))?;
                Ok(if op == "and" {
                    Cond::And(Box::new(a), Box::new(b))
                } else {
                    Cond::Or(Box::new(a), Box::new(b))
                })
            }
            Expr::Cmp(op, a, b) => {
                let ty = self
                    .infer_structural(a)
                    .or_else(|| self.infer_structural(b))
                    .or_else(|| self.infer(a))
                    .or_else(|| self.infer(b));
                match ty {
                    None => Err(self.type_error(format!(
                        "cannot determine the domain compared by `{}`",
                        op.symbol()
                    ))),
                    Some(t) if self.is_boolish(t) => {
                        let a = self.at(0, |s| s.cond(a))?;
                        let b = self.at(1, |s| s.cond(b))?;
                        Ok(Cond::BoolCmp(*op, Box::new(a), Box::new(b)))
                    }
                    Some(Ty::Dom(d)) => {
                        let a = self.at(0, |s| s.term(a, d))?;
                        let b = self.at(1, |s| s.term(b, d))?;
                        Ok(Cond::Cmp(*op, Box::new(a), Box::new(b), d))
                    }
                    Some(Ty::Bool) => unreachable!("boolean is boolish"),
                }
            }
            Expr::Ite(c, a, b) => {
                let c = self.at(0, |s| s.cond(c))?;
                let a = self.at(1, |s| s.cond(a))?;
                let b = self.at(2, |s| s.cond(b))?;
                Ok(Cond::Ite(Box::new(c), Box::new(a), Box::new(b)))
            }
            Expr::Min(_) | Expr::Max(_) => match self.infer(e) {
                Some(Ty::Dom(d)) if self.domain(d).is_binary() => {
                    let one = self.domain(d).binary_indices().expect("binary").one;
                    Ok(Cond::Truth(Box::new(self.term(e, d)?), one))
                }
                Some(t) => Err(self.type_error(format!(
                    "{} used where a boolean is required",
                    self.describe(t)
                ))),
                None => Err(self.type_error("cannot determine the domain of min/max")),
            },
            Expr::Table(_) => Err(self.type_error(
                "a table used as a condition needs a target domain; compare it with a value",
            )),
        }
    }
}

/// Type-checks `body` against the target domain and compiles it for evaluation.
pub(crate) fn compile(body: &Expr, target: usize, scope: &Scope<'_>) -> Result<Term, CompileError> {
    let mut c = Compiler {
        scope,
        path: Vec::new(),
    };
    c.term(body, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope_fixture() -> (Vec<Domain>, HashMap<String, (usize, usize)>) {
        let domains = vec![
            Domain::binary("Bool"),
            Domain::chain("Level", ["low", "mid", "high"]),
        ];
        let vars = HashMap::from([
            ("A".to_string(), (0, 0)),
            ("B".to_string(), (1, 0)),
            ("L".to_string(), (2, 1)),
            ("M".to_string(), (3, 1)),
        ]);
        (domains, vars)
    }

    fn eval_bool(e: &Expr, env: &[usize]) -> Result<usize, CompileError> {
        let (domains, vars) = scope_fixture();
        let scope = Scope {
            domains: &domains,
            vars: &vars,
        };
        compile(e, 0, &scope).map(|t| t.eval(env, &domains))
    }

    #[test]
    fn boolean_connectives() {
        let e = Expr::and(Expr::var("A"), Expr::not(Expr::var("B")));
        assert_eq!(eval_bool(&e, &[1, 0, 0, 0]).unwrap(), 1);
        assert_eq!(eval_bool(&e, &[1, 1, 0, 0]).unwrap(), 0);
        let e = Expr::or(Expr::var("A"), Expr::var("B"));
        assert_eq!(eval_bool(&e, &[0, 0, 0, 0]).unwrap(), 0);
        assert_eq!(eval_bool(&e, &[0, 1, 0, 0]).unwrap(), 1);
    }

    #[test]
    fn comparisons_follow_declared_order() {
        let e = Expr::cmp(CmpOp::Lt, Expr::var("L"), Expr::lit("high"));
        assert_eq!(eval_bool(&e, &[0, 0, 1, 0]).unwrap(), 1);
        assert_eq!(eval_bool(&e, &[0, 0, 2, 0]).unwrap(), 0);
        let e = Expr::cmp(CmpOp::Ge, Expr::var("L"), Expr::var("M"));
        assert_eq!(eval_bool(&e, &[0, 0, 2, 1]).unwrap(), 1);
        let e = Expr::cmp(CmpOp::Eq, Expr::var("A"), Expr::lit("1"));
        assert_eq!(eval_bool(&e, &[1, 0, 0, 0]).unwrap(), 1);
    }

    #[test]
    fn min_max_and_ite() {
        let (domains, vars) = scope_fixture();
        let scope = Scope {
            domains: &domains,
            vars: &vars,
        };
        let e = Expr::Min(vec![Expr::var("L"), Expr::var("M")]);
        let t = compile(&e, 1, &scope).unwrap();
        assert_eq!(t.eval(&[0, 0, 2, 1], &domains), 1);
        let e = Expr::Max(vec![Expr::var("L"), Expr::lit("mid")]);
        let t = compile(&e, 1, &scope).unwrap();
        assert_eq!(t.eval(&[0, 0, 0, 0], &domains), 1);
        let e = Expr::ite(Expr::var("A"), Expr::lit("high"), Expr::var("L"));
        let t = compile(&e, 1, &scope).unwrap();
        assert_eq!(t.eval(&[1, 0, 0, 0], &domains), 2);
        assert_eq!(t.eval(&[0, 0, 1, 0], &domains), 1);
    }

    #[test]
    fn boolean_operator_on_non_binary_points_at_operator() {
        let e = Expr::and(Expr::var("A"), Expr::var("L"));
        match eval_bool(&e, &[0; 4]) {
            Err(CompileError::Type { message, path }) => {
                assert!(path.is_empty(), "error should sit on the `and`: {path:?}");
                assert!(message.contains("and"), "{message}");
            }
            other => panic!("expected type error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_names() {
        assert_eq!(
            eval_bool(&Expr::var("W"), &[0; 4]).unwrap_err(),
            CompileError::UnknownVariable("W".into())
        );
        assert_eq!(
            eval_bool(&Expr::lit("zzz"), &[0; 4]).unwrap_err(),
            CompileError::UndeclaredValue("zzz".into())
        );
        assert!(matches!(
            eval_bool(&Expr::lit("mid"), &[0; 4]).unwrap_err(),
            CompileError::Type { .. }
        ));
    }

    #[test]
    fn table_must_be_total() {
        let t = Expr::Table(TableExpr {
            args: vec!["A".into()],
            rows: vec![(vec!["0".into()], "1".into())],
        });
        assert!(matches!(eval_bool(&t, &[0; 4]), Err(CompileError::Table(_))));
        let t = Expr::Table(TableExpr {
            args: vec!["A".into()],
            rows: vec![
                (vec!["1".into()], "0".into()),
                (vec!["0".into()], "1".into()),
            ],
        });
        assert_eq!(eval_bool(&t, &[0, 0, 0, 0]).unwrap(), 1);
        assert_eq!(eval_bool(&t, &[1, 0, 0, 0]).unwrap(), 0);
    }

    #[test]
    fn display_parenthesises_minimally() {
        let e = Expr::and(Expr::var("U1"), Expr::not(Expr::var("U2")));
        assert_eq!(e.to_string(), "U1 and not U2");
        let e = Expr::and(Expr::var("a"), Expr::and(Expr::var("b"), Expr::var("c")));
        assert_eq!(e.to_string(), "a and (b and c)");
        let e = Expr::not(Expr::or(Expr::var("a"), Expr::var("b")));
        assert_eq!(e.to_string(), "not (a or b)");
        let e = Expr::or(Expr::ite(Expr::var("a"), Expr::var("b"), Expr::var("c")), Expr::var("d"));
        assert_eq!(e.to_string(), "(if a then b else c) or d");
    }
}
