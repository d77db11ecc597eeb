//! Typing derivations in the relevant system with intersection and union
//! types, a checker, derived rules, and constructive decompositions.
//!
//! Environments always contain exactly the free variables of the subject
//! and are combined disjointly. The union elimination rule is
//!
//! ```text
//! Γ1, x:σ∧θ ⊢ M:ρ    Γ1, x:τ∧θ ⊢ M:ρ    Γ2 ⊢ N:(σ∨τ)∧θ
//! ─────────────────────────────────────────────────────── (∨E)
//!                 Γ1, Γ2 ⊢ M[N/x] : ρ
//! ```
//!
//! with exactly one free occurrence of `x` in `M`.

use crate::lambda::{fresh, is_linear, recognize_normal, subst, Term};
use crate::type_core::{self, arrow, cnf_conjuncts, dnf_disjuncts, TypeExpr};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;
use thiserror::Error;

pub type Env = BTreeMap<String, TypeExpr>;

#[derive(Clone, Debug, PartialEq)]
pub struct Judgment {
    pub env: Env,
    pub term: Term,
    pub ty: TypeExpr,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let env: Vec<String> = self.env.iter().map(|(x, t)| format!("{x}:{t}")).collect();
        write!(f, "{} ⊢ {} : {}", env.join(", "), self.term, self.ty)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Ax,
    ArrowI,
    ArrowE,
    AndI,
    AndEL,
    AndER,
    OrIL,
    OrIR,
    OrE,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "Ax",
            Rule::ArrowI => "ArrowI",
            Rule::ArrowE => "ArrowE",
            Rule::AndI => "AndI",
            Rule::AndEL => "AndEL",
            Rule::AndER => "AndER",
            Rule::OrIL => "OrIL",
            Rule::OrIR => "OrIR",
            Rule::OrE => "OrE",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Some(match s {
            "Ax" => Rule::Ax,
            "ArrowI" => Rule::ArrowI,
            "ArrowE" => Rule::ArrowE,
            "AndI" => Rule::AndI,
            "AndEL" => Rule::AndEL,
            "AndER" => Rule::AndER,
            "OrIL" => Rule::OrIL,
            "OrIR" => Rule::OrIR,
            "OrE" => Rule::OrE,
            _ => return None,
        })
    }
}

/// Parameters of a union elimination: the eliminated variable and the
/// types `σ`, `τ`, `θ` of the rule.
#[derive(Clone, Debug, PartialEq)]
pub struct OrEInfo {
    pub var: String,
    pub sigma: TypeExpr,
    pub tau: TypeExpr,
    pub theta: TypeExpr,
}

#[derive(Clone, Debug)]
pub struct TypingDerivation {
    pub rule: Rule,
    pub concl: Judgment,
    pub premises: Vec<Rc<TypingDerivation>>,
    pub or_e: Option<OrEInfo>,
}

type D = TypingDerivation;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("{rule}: {reason}")]
    Rule { rule: &'static str, reason: String },
    #[error("environments share the variable {0}")]
    NonDisjointEnv(String),
    #[error("environment does not match the free variables of {0}")]
    NotRelevant(String),
    #[error("subject {0} is not linear")]
    NotLinear(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DeriveError {
    /// The conjunct with this index in the disjunctive form of the source
    /// has no conjunct of the target below it.
    #[error("no derivation: disjunct {0} of the source covers no disjunct of the target")]
    NotDerivable(usize),
    #[error("premises do not fit the rule: {0}")]
    ShapeMismatch(String),
    #[error("subject is not a finite hereditary permutation: {0}")]
    NotFhp(String),
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("derivation has an unexpected form: {0}")]
    Unsupported(String),
}

fn shape(msg: impl Into<String>) -> DeriveError {
    DeriveError::ShapeMismatch(msg.into())
}

impl TypingDerivation {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(|p| p.height()).max().unwrap_or(0)
    }

    fn names_into(&self, out: &mut BTreeSet<String>) {
        out.extend(self.concl.env.keys().cloned());
        self.concl.term.collect_vars(out);
        if let Some(info) = &self.or_e {
            out.insert(info.var.clone());
        }
        for p in &self.premises {
            p.names_into(out);
        }
    }

    /// Every variable name used anywhere in the derivation.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.names_into(&mut out);
        out
    }

    /// Indented rendering, conclusion first.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(0, &mut s);
        s
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("[{}] {}", self.rule.name(), self.concl));
        if let Some(i) = &self.or_e {
            out.push_str(&format!("  {{{} : ({} | {}) & {}}}", i.var, i.sigma, i.tau, i.theta));
        }
        out.push('\n');
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    pub fn ty(&self) -> &TypeExpr {
        &self.concl.ty
    }

    pub fn term(&self) -> &Term {
        &self.concl.term
    }

    pub fn env(&self) -> &Env {
        &self.concl.env
    }
}

fn node(rule: Rule, env: Env, term: Term, ty: TypeExpr, premises: Vec<D>, or_e: Option<OrEInfo>) -> D {
    TypingDerivation { rule, concl: Judgment { env, term, ty }, premises: premises.into_iter().map(Rc::new).collect(), or_e }
}

fn disjoint_union(a: &Env, b: &Env) -> Result<Env, DeriveError> {
    let mut out = a.clone();
    for (k, v) in b {
        if out.insert(k.clone(), v.clone()).is_some() {
            return Err(shape(format!("environments share {k}")));
        }
    }
    Ok(out)
}

pub fn ax(x: &str, ty: &TypeExpr) -> D {
    node(Rule::Ax, [(x.to_string(), ty.clone())].into_iter().collect(), Term::var(x), ty.clone(), vec![], None)
}

pub fn arrow_i(x: &str, d: D) -> Result<D, DeriveError> {
    let sigma = d.concl.env.get(x).cloned().ok_or_else(|| shape(format!("{x} is not in the environment")))?;
    let mut env = d.concl.env.clone();
    env.remove(x);
    let term = Term::abs(x, d.concl.term.clone());
    let ty = arrow(sigma, d.concl.ty.clone());
    Ok(node(Rule::ArrowI, env, term, ty, vec![d], None))
}

pub fn arrow_e(d1: D, d2: D) -> Result<D, DeriveError> {
    let TypeExpr::Arrow(a, b) = &d1.concl.ty else {
        return Err(shape(format!("{} is not an arrow", d1.concl.ty)));
    };
    if **a != d2.concl.ty {
        return Err(shape(format!("argument type {} does not match {}", d2.concl.ty, a)));
    }
    let env = disjoint_union(&d1.concl.env, &d2.concl.env)?;
    let term = Term::app(d1.concl.term.clone(), d2.concl.term.clone());
    let ty = (**b).clone();
    Ok(node(Rule::ArrowE, env, term, ty, vec![d1, d2], None))
}

pub fn and_i(d1: D, d2: D) -> Result<D, DeriveError> {
    if d1.concl.env != d2.concl.env || d1.concl.term != d2.concl.term {
        return Err(shape(format!("∧I premises differ: {} and {}", d1.concl, d2.concl)));
    }
    let ty = type_core::and(d1.concl.ty.clone(), d2.concl.ty.clone());
    let (env, term) = (d1.concl.env.clone(), d1.concl.term.clone());
    Ok(node(Rule::AndI, env, term, ty, vec![d1, d2], None))
}

fn and_e(d: D, left: bool) -> Result<D, DeriveError> {
    let TypeExpr::And(l, r) = &d.concl.ty else {
        return Err(shape(format!("{} is not an intersection", d.concl.ty)));
    };
    let ty = if left { (**l).clone() } else { (**r).clone() };
    let (env, term) = (d.concl.env.clone(), d.concl.term.clone());
    Ok(node(if left { Rule::AndEL } else { Rule::AndER }, env, term, ty, vec![d], None))
}

pub fn and_el(d: D) -> Result<D, DeriveError> {
    and_e(d, true)
}

pub fn and_er(d: D) -> Result<D, DeriveError> {
    and_e(d, false)
}

pub fn or_il(d: D, right: &TypeExpr) -> D {
    let ty = type_core::or(d.concl.ty.clone(), right.clone());
    let (env, term) = (d.concl.env.clone(), d.concl.term.clone());
    node(Rule::OrIL, env, term, ty, vec![d], None)
}

pub fn or_ir(left: &TypeExpr, d: D) -> D {
    let ty = type_core::or(left.clone(), d.concl.ty.clone());
    let (env, term) = (d.concl.env.clone(), d.concl.term.clone());
    node(Rule::OrIR, env, term, ty, vec![d], None)
}

/// Union elimination on the variable `x`.
pub fn or_e(x: &str, sigma: &TypeExpr, tau: &TypeExpr, theta: &TypeExpr, d1: D, d2: D, d3: D) -> Result<D, DeriveError> {
    let s1 = type_core::and(sigma.clone(), theta.clone());
    let s2 = type_core::and(tau.clone(), theta.clone());
    let s3 = type_core::and(type_core::or(sigma.clone(), tau.clone()), theta.clone());
    if d1.concl.env.get(x) != Some(&s1) || d2.concl.env.get(x) != Some(&s2) {
        return Err(shape(format!("∨E: {x} must have types {s1} and {s2}")));
    }
    if d3.concl.ty != s3 {
        return Err(shape(format!("∨E: third premise must have type {s3}, found {}", d3.concl.ty)));
    }
    if d1.concl.ty != d2.concl.ty || d1.concl.term != d2.concl.term {
        return Err(shape("∨E: first two premises differ"));
    }
    let mut g1 = d1.concl.env.clone();
    g1.remove(x);
    let mut g1b = d2.concl.env.clone();
    g1b.remove(x);
    if g1 != g1b {
        return Err(shape("∨E: first two environments differ"));
    }
    let env = disjoint_union(&g1, &d3.concl.env)?;
    let term = subst(&d1.concl.term, x, &d3.concl.term);
    let ty = d1.concl.ty.clone();
    let info = OrEInfo { var: x.to_string(), sigma: sigma.clone(), tau: tau.clone(), theta: theta.clone() };
    Ok(node(Rule::OrE, env, term, ty, vec![d1, d2, d3], Some(info)))
}

/// Checks every node of a derivation.
pub fn check(d: &TypingDerivation) -> Result<(), CheckError> {
    check_node(d)?;
    for p in &d.premises {
        check(p)?;
    }
    Ok(())
}

fn bad(rule: Rule, reason: impl Into<String>) -> CheckError {
    CheckError::Rule { rule: rule.name(), reason: reason.into() }
}

fn check_node(d: &D) -> Result<(), CheckError> {
    let j = &d.concl;
    let fv = j.term.free_vars();
    let keys: BTreeSet<String> = j.env.keys().cloned().collect();
    if fv != keys {
        return Err(CheckError::NotRelevant(j.to_string()));
    }
    if !is_linear(&j.term) {
        return Err(CheckError::NotLinear(j.term.to_string()));
    }
    let r = d.rule;
    let arity = match r {
        Rule::Ax => 0,
        Rule::ArrowI | Rule::AndEL | Rule::AndER | Rule::OrIL | Rule::OrIR => 1,
        Rule::ArrowE | Rule::AndI => 2,
        Rule::OrE => 3,
    };
    if d.premises.len() != arity {
        return Err(bad(r, format!("expected {arity} premises, found {}", d.premises.len())));
    }
    let p = |i: usize| &d.premises[i].concl;
    match r {
        Rule::Ax => match &j.term {
            Term::Var(x) if j.env.get(&**x) == Some(&j.ty) => Ok(()),
            _ => Err(bad(r, "axiom must be x:σ ⊢ x:σ")),
        },
        Rule::ArrowI => {
            let Term::Abs(x, body) = &j.term else { return Err(bad(r, "subject is not an abstraction")) };
            let Some(sigma) = p(0).env.get(&**x) else { return Err(bad(r, "bound variable missing from premise")) };
            let mut env = p(0).env.clone();
            env.remove(&**x);
            if env != j.env {
                return Err(bad(r, "environment mismatch"));
            }
            if **body != p(0).term {
                return Err(bad(r, "body mismatch"));
            }
            if j.ty != arrow(sigma.clone(), p(0).ty.clone()) {
                return Err(bad(r, "type mismatch"));
            }
            Ok(())
        }
        Rule::ArrowE => {
            let (a, b) = (p(0), p(1));
            for k in a.env.keys() {
                if b.env.contains_key(k) {
                    return Err(CheckError::NonDisjointEnv(k.clone()));
                }
            }
            let mut env = a.env.clone();
            env.extend(b.env.clone());
            if env != j.env {
                return Err(bad(r, "environment mismatch"));
            }
            if j.term != Term::app(a.term.clone(), b.term.clone()) {
                return Err(bad(r, "subject mismatch"));
            }
            if a.ty != arrow(b.ty.clone(), j.ty.clone()) {
                return Err(bad(r, "type mismatch"));
            }
            Ok(())
        }
        Rule::AndI => {
            let (a, b) = (p(0), p(1));
            if a.env != j.env || b.env != j.env || a.term != j.term || b.term != j.term {
                return Err(bad(r, "premises must share environment and subject"));
            }
            if j.ty != type_core::and(a.ty.clone(), b.ty.clone()) {
                return Err(bad(r, "type mismatch"));
            }
            Ok(())
        }
        Rule::AndEL | Rule::AndER | Rule::OrIL | Rule::OrIR => {
            let a = p(0);
            if a.env != j.env || a.term != j.term {
                return Err(bad(r, "premise must share environment and subject"));
            }
            let ok = match (r, &a.ty, &j.ty) {
                (Rule::AndEL, TypeExpr::And(l, _), t) => **l == *t,
                (Rule::AndER, TypeExpr::And(_, rr), t) => **rr == *t,
                (Rule::OrIL, s, TypeExpr::Or(l, _)) => **l == *s,
                (Rule::OrIR, s, TypeExpr::Or(_, rr)) => **rr == *s,
                _ => false,
            };
            if ok {
                Ok(())
            } else {
                Err(bad(r, "type mismatch"))
            }
        }
        Rule::OrE => {
            let Some(info) = &d.or_e else { return Err(bad(r, "missing rule parameters")) };
            let x = info.var.as_str();
            let (a, b, c) = (p(0), p(1), p(2));
            if a.env.get(x) != Some(&type_core::and(info.sigma.clone(), info.theta.clone())) {
                return Err(bad(r, "first premise must assume x:σ∧θ"));
            }
            if b.env.get(x) != Some(&type_core::and(info.tau.clone(), info.theta.clone())) {
                return Err(bad(r, "second premise must assume x:τ∧θ"));
            }
            if c.ty != type_core::and(type_core::or(info.sigma.clone(), info.tau.clone()), info.theta.clone()) {
                return Err(bad(r, "third premise must have type (σ∨τ)∧θ"));
            }
            let mut g1 = a.env.clone();
            g1.remove(x);
            let mut g1b = b.env.clone();
            g1b.remove(x);
            if g1 != g1b {
                return Err(bad(r, "first two environments differ"));
            }
            if a.term != b.term || a.ty != b.ty || a.ty != j.ty {
                return Err(bad(r, "first two premises must share subject and type with the conclusion"));
            }
            if a.term.occurrences(x) != 1 {
                return Err(bad(r, "eliminated variable must occur once"));
            }
            for k in g1.keys() {
                if c.env.contains_key(k) {
                    return Err(CheckError::NonDisjointEnv(k.clone()));
                }
            }
            let mut env = g1.clone();
            env.extend(c.env.clone());
            if env != j.env {
                return Err(bad(r, "environment mismatch"));
            }
            if j.term != subst(&a.term, x, &c.term) {
                return Err(bad(r, "subject must be M[N/x]"));
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// JSON form: `{"rule", "env": [[name, type], …], "term", "type", "premises": […]}`
// plus `"or_e": {"var", "sigma", "tau", "theta"}` on union eliminations.

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("missing or malformed field {0:?}")]
    Field(&'static str),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error(transparent)]
    Parse(#[from] crate::syntax::ParseError),
}

pub fn derivation_to_json(d: &TypingDerivation) -> serde_json::Value {
    use serde_json::json;
    let env: Vec<serde_json::Value> = d.concl.env.iter().map(|(x, t)| json!([x, t.to_string()])).collect();
    let mut v = json!({
        "rule": d.rule.name(),
        "env": env,
        "term": d.concl.term.to_string(),
        "type": d.concl.ty.to_string(),
        "premises": d.premises.iter().map(|p| derivation_to_json(p)).collect::<Vec<_>>(),
    });
    if let Some(i) = &d.or_e {
        v["or_e"] = json!({"var": i.var, "sigma": i.sigma.to_string(), "tau": i.tau.to_string(), "theta": i.theta.to_string()});
    }
    v
}

/// Reads the JSON form without validating it; run [`check`] afterwards.
pub fn derivation_from_json(v: &serde_json::Value) -> Result<TypingDerivation, JsonError> {
    use crate::syntax::{parse_term, parse_type};
    let text = |v: &serde_json::Value, f: &'static str| -> Result<String, JsonError> {
        v.get(f).and_then(|x| x.as_str()).map(str::to_string).ok_or(JsonError::Field(f))
    };
    let name = text(v, "rule")?;
    let rule = Rule::from_name(&name).ok_or(JsonError::UnknownRule(name))?;
    let mut env = Env::new();
    for pair in v.get("env").and_then(|e| e.as_array()).ok_or(JsonError::Field("env"))? {
        match pair.as_array().map(Vec::as_slice) {
            Some([x, t]) => {
                let x = x.as_str().ok_or(JsonError::Field("env"))?;
                env.insert(x.to_string(), parse_type(t.as_str().ok_or(JsonError::Field("env"))?)?);
            }
            _ => return Err(JsonError::Field("env")),
        }
    }
    let term = parse_term(&text(v, "term")?)?;
    let ty = parse_type(&text(v, "type")?)?;
    let premises = v
        .get("premises")
        .and_then(|p| p.as_array())
        .ok_or(JsonError::Field("premises"))?
        .iter()
        .map(derivation_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    let or_e = match v.get("or_e") {
        None | Some(serde_json::Value::Null) => None,
        Some(o) => Some(OrEInfo {
            var: text(o, "var")?,
            sigma: parse_type(&text(o, "sigma")?)?,
            tau: parse_type(&text(o, "tau")?)?,
            theta: parse_type(&text(o, "theta")?)?,
        }),
    };
    Ok(node(rule, env, term, ty, premises, or_e))
}

// ---------------------------------------------------------------------------
// Admissible rules.

/// Rule C: from `Γ1, x:σ ⊢ M:τ` and `Γ2 ⊢ N:σ` build `Γ1, Γ2 ⊢ M[N/x] : τ`.
pub fn subst_c(d: &D, x: &str, n: &D) -> Result<D, DeriveError> {
    if d.concl.env.get(x) != Some(&n.concl.ty) {
        return Err(shape(format!("C: {x} must have type {} in {}", n.concl.ty, d.concl)));
    }
    let fv_n = n.concl.term.free_vars();
    c_rec(d, x, n, &fv_n)
}

fn c_rec(d: &D, x: &str, n: &D, fv_n: &BTreeSet<String>) -> Result<D, DeriveError> {
    if !d.concl.env.contains_key(x) {
        return Ok(d.clone());
    }
    let prem = |i: usize| -> &D { &d.premises[i] };
    match d.rule {
        Rule::Ax => Ok(n.clone()),
        Rule::ArrowI => {
            let Term::Abs(y, _) = &d.concl.term else { unreachable!() };
            let mut p = prem(0).clone();
            let mut y = y.to_string();
            if fv_n.contains(&y) {
                let mut avoid = p.names();
                avoid.extend(n.names());
                let y2 = fresh(&y, &avoid);
                p = rename(&p, &y, &y2)?;
                y = y2;
            }
            arrow_i(&y, c_rec(&p, x, n, fv_n)?)
        }
        Rule::ArrowE => {
            if prem(0).concl.env.contains_key(x) {
                arrow_e(c_rec(prem(0), x, n, fv_n)?, prem(1).clone())
            } else {
                arrow_e(prem(0).clone(), c_rec(prem(1), x, n, fv_n)?)
            }
        }
        Rule::AndI => and_i(c_rec(prem(0), x, n, fv_n)?, c_rec(prem(1), x, n, fv_n)?),
        Rule::AndEL => and_el(c_rec(prem(0), x, n, fv_n)?),
        Rule::AndER => and_er(c_rec(prem(0), x, n, fv_n)?),
        Rule::OrIL => {
            let TypeExpr::Or(_, r) = &d.concl.ty else { unreachable!() };
            Ok(or_il(c_rec(prem(0), x, n, fv_n)?, r))
        }
        Rule::OrIR => {
            let TypeExpr::Or(l, _) = &d.concl.ty else { unreachable!() };
            Ok(or_ir(l, c_rec(prem(0), x, n, fv_n)?))
        }
        Rule::OrE => {
            let info = d.or_e.as_ref().unwrap();
            if prem(2).concl.env.contains_key(x) {
                return or_e(&info.var, &info.sigma, &info.tau, &info.theta, prem(0).clone(), prem(1).clone(), c_rec(prem(2), x, n, fv_n)?);
            }
            let (mut p1, mut p2) = (prem(0).clone(), prem(1).clone());
            let mut z = info.var.clone();
            if fv_n.contains(&z) {
                let mut avoid = d.names();
                avoid.extend(n.names());
                let z2 = fresh(&z, &avoid);
                p1 = rename(&p1, &z, &z2)?;
                p2 = rename(&p2, &z, &z2)?;
                z = z2;
            }
            or_e(&z, &info.sigma, &info.tau, &info.theta, c_rec(&p1, x, n, fv_n)?, c_rec(&p2, x, n, fv_n)?, prem(2).clone())
        }
    }
}

/// Renames a free variable throughout a derivation.
pub fn rename(d: &D, old: &str, new: &str) -> Result<D, DeriveError> {
    if old == new {
        return Ok(d.clone());
    }
    let ty = d.concl.env.get(old).ok_or_else(|| shape(format!("{old} is not free")))?;
    subst_c(d, old, &ax(new, ty))
}

/// Rule L: from `x:σ ⊢ x:τ` and `Γ, x:τ ⊢ M:ρ` build `Γ, x:σ ⊢ M:ρ`.
pub fn rule_l(var: &D, d: &D) -> Result<D, DeriveError> {
    let Term::Var(x) = &var.concl.term else { return Err(shape("L: first premise must type a variable")) };
    subst_c(d, x, var)
}

/// `∨I′`: from `Γ, x:σ ⊢ M:ρ` and `Γ, x:τ ⊢ M:ρ` build `Γ, x:σ∨τ ⊢ M:ρ`.
pub fn or_i_prime(x: &str, d1: &D, d2: &D) -> Result<D, DeriveError> {
    let sigma = d1.concl.env.get(x).ok_or_else(|| shape(format!("∨I′: {x} missing")))?.clone();
    let tau = d2.concl.env.get(x).ok_or_else(|| shape(format!("∨I′: {x} missing")))?.clone();
    let theta = type_core::or(sigma.clone(), tau.clone());
    let l1 = and_el(ax(x, &type_core::and(sigma.clone(), theta.clone())))?;
    let l2 = and_el(ax(x, &type_core::and(tau.clone(), theta.clone())))?;
    let p1 = subst_c(d1, x, &l1)?;
    let p2 = subst_c(d2, x, &l2)?;
    let p3 = and_i(ax(x, &theta), ax(x, &theta))?;
    or_e(x, &sigma, &tau, &theta, p1, p2, p3)
}

/// `∨E′`: from `Γ1, x:σ ⊢ M:ρ`, `Γ1, x:τ ⊢ M:ρ` and `Γ2 ⊢ N:σ∨τ` build `Γ1, Γ2 ⊢ M[N/x]:ρ`.
pub fn or_e_prime(x: &str, d1: &D, d2: &D, d3: &D) -> Result<D, DeriveError> {
    let expected = match (d1.concl.env.get(x), d2.concl.env.get(x)) {
        (Some(s), Some(t)) => type_core::or(s.clone(), t.clone()),
        _ => return Err(shape(format!("∨E′: {x} missing"))),
    };
    if d3.concl.ty != expected {
        return Err(shape(format!("∨E′: third premise must have type {expected}")));
    }
    subst_c(&or_i_prime(x, d1, d2)?, x, d3)
}

/// The admissible rules, addressed uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admissible {
    L,
    C,
    OrIPrime,
    OrEPrime,
}

/// Applies an admissible rule. `var` names the substituted or eliminated
/// variable; it is ignored by `L`.
pub fn admissible(rule: Admissible, premises: &[TypingDerivation], var: &str) -> Result<TypingDerivation, DeriveError> {
    match (rule, premises) {
        (Admissible::L, [a, b]) => rule_l(a, b),
        (Admissible::C, [a, b]) => subst_c(a, var, b),
        (Admissible::OrIPrime, [a, b]) => or_i_prime(var, a, b),
        (Admissible::OrEPrime, [a, b, c]) => or_e_prime(var, a, b, c),
        _ => Err(shape("wrong number of premises")),
    }
}

// ---------------------------------------------------------------------------
// Variable judgments.

fn support(mu: &TypeExpr) -> BTreeSet<TypeExpr> {
    mu.and_components().into_iter().collect()
}

/// For every disjunct of `w(σ)` the index of a disjunct of `w(τ)` whose
/// components it contains.
fn var_cover(sigma: &TypeExpr, tau: &TypeExpr) -> Result<Vec<usize>, DeriveError> {
    let targets: Vec<BTreeSet<TypeExpr>> = dnf_disjuncts(tau).iter().map(support).collect();
    dnf_disjuncts(sigma)
        .iter()
        .enumerate()
        .map(|(i, mu)| {
            let s = support(mu);
            targets.iter().position(|t| t.is_subset(&s)).ok_or(DeriveError::NotDerivable(i))
        })
        .collect()
}

/// Whether `x:σ ⊢ x:τ` is derivable.
pub fn var_derivable(sigma: &TypeExpr, tau: &TypeExpr) -> bool {
    var_cover(sigma, tau).is_ok()
}

/// A derivation of `x:σ ⊢ x:τ`.
pub fn derive_var(sigma: &TypeExpr, tau: &TypeExpr) -> Result<TypingDerivation, DeriveError> {
    derive_var_named(sigma, tau, "x")
}

pub fn derive_var_named(sigma: &TypeExpr, tau: &TypeExpr, x: &str) -> Result<D, DeriveError> {
    if sigma == tau {
        return Ok(ax(x, sigma));
    }
    let cover = var_cover(sigma, tau)?;
    let mus = dnf_disjuncts(sigma);
    let nus = dnf_disjuncts(tau);
    let w = type_core::or_all(&mus);
    // x : w(σ) ⊢ x : τ, by cases on the disjuncts.
    let leaves: Vec<D> = mus
        .iter()
        .zip(&cover)
        .map(|(mu, &j)| {
            let to_nu = project_conj(mu, &nus[j], x)?;
            let from_nu = from_disjunct(tau, j, x)?;
            subst_c(&from_nu, x, &to_nu)
        })
        .collect::<Result<_, _>>()?;
    let elim = combine_or_tree(&w, x, &mut leaves.into_iter())?;
    if sigma == &w {
        return Ok(elim);
    }
    subst_c(&elim, x, &dnf_intro(sigma, x)?)
}

/// `x:U ⊢ M:ρ` from one derivation per leaf of the union spine `U`, in order.
fn combine_or_tree(u: &TypeExpr, x: &str, leaves: &mut impl Iterator<Item = D>) -> Result<D, DeriveError> {
    match u {
        TypeExpr::Or(l, r) => {
            let dl = combine_or_tree(l, x, leaves)?;
            let dr = combine_or_tree(r, x, leaves)?;
            or_i_prime(x, &dl, &dr)
        }
        _ => leaves.next().ok_or_else(|| shape("too few leaves")),
    }
}

/// `x:μ ⊢ x:α` for a component `α` of the intersection spine `μ`.
fn pick(mu: &TypeExpr, alpha: &TypeExpr, x: &str) -> Result<D, DeriveError> {
    let mut d = ax(x, mu);
    let mut cur = mu.clone();
    while &cur != alpha {
        let TypeExpr::And(l, r) = &cur else { return Err(shape(format!("{alpha} is not a component of {mu}"))) };
        if l.and_components().contains(alpha) {
            let l = (**l).clone();
            d = and_el(d)?;
            cur = l;
        } else {
            let r = (**r).clone();
            d = and_er(d)?;
            cur = r;
        }
    }
    Ok(d)
}

/// `x:μ ⊢ x:ν` when every component of `ν` is a component of `μ`.
fn project_conj(mu: &TypeExpr, nu: &TypeExpr, x: &str) -> Result<D, DeriveError> {
    match nu {
        TypeExpr::And(a, b) => and_i(project_conj(mu, a, x)?, project_conj(mu, b, x)?),
        _ => pick(mu, nu, x),
    }
}

/// `x:ν_j ⊢ x:τ` where `ν_j` is disjunct `j` of `w(τ)`.
fn from_disjunct(tau: &TypeExpr, j: usize, x: &str) -> Result<D, DeriveError> {
    let nus = dnf_disjuncts(tau);
    let nu = nus.get(j).ok_or(DeriveError::BadIndex(j))?;
    match tau {
        TypeExpr::Atom(_) | TypeExpr::Arrow(..) => Ok(ax(x, tau)),
        TypeExpr::Or(l, r) => {
            let nl = dnf_disjuncts(l).len();
            if j < nl {
                Ok(or_il(from_disjunct(l, j, x)?, r))
            } else {
                Ok(or_ir(l, from_disjunct(r, j - nl, x)?))
            }
        }
        TypeExpr::And(l, r) => {
            let nr = dnf_disjuncts(r).len();
            let hyp = ax(x, nu);
            let left = subst_c(&from_disjunct(l, j / nr, x)?, x, &and_el(hyp.clone())?)?;
            let right = subst_c(&from_disjunct(r, j % nr, x)?, x, &and_er(hyp)?)?;
            and_i(left, right)
        }
    }
}

/// `x:σ ⊢ x:w(σ)`.
fn dnf_intro(sigma: &TypeExpr, x: &str) -> Result<D, DeriveError> {
    let w = type_core::top_dnf(sigma);
    match sigma {
        TypeExpr::Atom(_) | TypeExpr::Arrow(..) => Ok(ax(x, sigma)),
        TypeExpr::Or(l, r) => {
            let nl = dnf_disjuncts(l).len();
            let left = subst_c(&inject(l, 0, &w, x)?, x, &dnf_intro(l, x)?)?;
            let right = subst_c(&inject(r, nl, &w, x)?, x, &dnf_intro(r, x)?)?;
            or_i_prime(x, &left, &right)
        }
        TypeExpr::And(l, r) => {
            let wl = type_core::top_dnf(l);
            let nr = dnf_disjuncts(r).len();
            // x : l ∧ r ⊢ x : w(l) ∧ r
            let hyp = ax(x, sigma);
            let step = and_i(subst_c(&dnf_intro(l, x)?, x, &and_el(hyp.clone())?)?, and_er(hyp)?)?;
            let outer = peel(&wl, r, x, &mut |a_k, k| {
                // x : a_k ∧ r ⊢ x : w(r) ∧ a_k
                let wr = type_core::top_dnf(r);
                let hyp = ax(x, &type_core::and(a_k.clone(), (**r).clone()));
                let swap = and_i(subst_c(&dnf_intro(r, x)?, x, &and_er(hyp.clone())?)?, and_el(hyp)?)?;
                let inner = peel(&wr, a_k, x, &mut |b_l, l| {
                    let hyp = ax(x, &type_core::and(b_l.clone(), a_k.clone()));
                    let back = and_i(and_er(hyp.clone())?, and_el(hyp)?)?;
                    subst_c(&from_disjunct(&w, k * nr + l, x)?, x, &back)
                })?;
                subst_c(&inner, x, &swap)
            })?;
            subst_c(&outer, x, &step)
        }
    }
}

/// `x : or_all(w(τ)) ⊢ x : w` where `w(τ)` sits in `w` starting at `offset`.
fn inject(tau: &TypeExpr, offset: usize, w: &TypeExpr, x: &str) -> Result<D, DeriveError> {
    let src = type_core::top_dnf(tau);
    let n = dnf_disjuncts(tau).len();
    let leaves: Vec<D> = (0..n).map(|k| from_disjunct(w, offset + k, x)).collect::<Result<_, _>>()?;
    combine_or_tree(&src, x, &mut leaves.into_iter())
}

/// `x : U ∧ θ ⊢ M : ρ` from, for each leaf `u_k` of the union spine `U`,
/// a derivation of `x : u_k ∧ θ ⊢ M : ρ`.
fn peel(
    u: &TypeExpr,
    theta: &TypeExpr,
    x: &str,
    leaf: &mut dyn FnMut(&TypeExpr, usize) -> Result<D, DeriveError>,
) -> Result<D, DeriveError> {
    fn go(
        u: &TypeExpr,
        theta: &TypeExpr,
        x: &str,
        idx: &mut usize,
        leaf: &mut dyn FnMut(&TypeExpr, usize) -> Result<D, DeriveError>,
    ) -> Result<D, DeriveError> {
        match u {
            TypeExpr::Or(a, b) => {
                let d1 = go(a, theta, x, idx, leaf)?;
                let d2 = go(b, theta, x, idx, leaf)?;
                let d3 = ax(x, &type_core::and(u.clone(), theta.clone()));
                or_e(x, a, b, theta, d1, d2, d3)
            }
            _ => {
                let k = *idx;
                *idx += 1;
                leaf(u, k)
            }
        }
    }
    go(u, theta, x, &mut 0, leaf)
}

// ---------------------------------------------------------------------------
// Inversion and the combinators built on it.

/// `Γ ⊢ λx.M : σ→τ` gives `Γ, x:σ ⊢ M:τ`. Returns the bound name used.
pub fn invert_abs(d: &D) -> Result<(String, D), DeriveError> {
    let TypeExpr::Arrow(s, t) = &d.concl.ty else { return Err(shape("inversion needs an arrow type")) };
    let Term::Abs(x, _) = &d.concl.term else { return Err(shape("inversion needs an abstraction")) };
    let (b, body) = invert_to(d, &arrow((**s).clone(), (**t).clone()))?;
    if b == **x {
        return Ok((b, body));
    }
    if body.concl.env.contains_key(&**x) {
        return Ok((b, body));
    }
    Ok((x.to_string(), rename(&body, &b, x)?))
}

fn invert_to(d: &D, target: &TypeExpr) -> Result<(String, D), DeriveError> {
    let p = |i: usize| -> &D { &d.premises[i] };
    match d.rule {
        Rule::ArrowI => {
            if &d.concl.ty != target {
                return Err(shape(format!("inversion: {} differs from {}", d.concl.ty, target)));
            }
            let Term::Abs(x, _) = &d.concl.term else { unreachable!() };
            Ok((x.to_string(), p(0).clone()))
        }
        Rule::AndEL | Rule::AndER | Rule::OrIL | Rule::OrIR => invert_to(p(0), target),
        Rule::AndI => {
            for i in 0..2 {
                if var_derivable(&p(i).concl.ty, target) {
                    return invert_to(p(i), target);
                }
            }
            Err(shape("inversion: neither conjunct reaches the arrow"))
        }
        Rule::OrE => {
            let info = d.or_e.as_ref().unwrap();
            if matches!(&p(0).concl.term, Term::Var(z) if **z == *info.var) {
                return invert_to(p(2), target);
            }
            let (b1, q1) = invert_to(p(0), target)?;
            let (b2, q2) = invert_to(p(1), target)?;
            let clash = |b: &str| b == info.var || p(2).concl.env.contains_key(b);
            let (b, q1, q2) = if b1 == b2 && !clash(&b1) {
                (b1, q1, q2)
            } else {
                let mut avoid = q1.names();
                avoid.extend(q2.names());
                avoid.extend(p(2).names());
                let b = fresh("x", &avoid);
                let q1 = rename(&q1, &b1, &b)?;
                let q2 = rename(&q2, &b2, &b)?;
                (b, q1, q2)
            };
            Ok((b, or_e(&info.var, &info.sigma, &info.tau, &info.theta, q1, q2, p(2).clone())?))
        }
        Rule::Ax | Rule::ArrowE => Err(shape("inversion: subject is not an abstraction")),
    }
}

/// Inverts two derivations of the same abstraction with a shared bound name.
fn invert_pair(d1: &D, d2: &D) -> Result<(String, D, D), DeriveError> {
    let (b1, q1) = invert_abs(d1)?;
    let (b2, q2) = invert_abs(d2)?;
    if b1 == b2 {
        return Ok((b1, q1, q2));
    }
    let mut avoid = q1.names();
    avoid.extend(q2.names());
    let b = fresh("x", &avoid);
    Ok((b.clone(), rename(&q1, &b1, &b)?, rename(&q2, &b2, &b)?))
}

/// `M : σ→τ1` and `M : σ→τ2` give `M : σ → τ1∧τ2`.
pub fn combine_and_right(d1: &D, d2: &D) -> Result<D, DeriveError> {
    let (b, q1, q2) = invert_pair(d1, d2)?;
    arrow_i(&b, and_i(q1, q2)?)
}

/// `M : σ1→τ` and `M : σ2→τ` give `M : σ1∨σ2 → τ`.
pub fn combine_or_left(d1: &D, d2: &D) -> Result<D, DeriveError> {
    let (b, q1, q2) = invert_pair(d1, d2)?;
    arrow_i(&b, or_i_prime(&b, &q1, &q2)?)
}

/// `M : σ→ρ` and `M : τ→θ` give `M : σ∧τ → ρ∧θ`.
pub fn combine_and(d1: &D, d2: &D) -> Result<D, DeriveError> {
    let (b, q1, q2) = invert_pair(d1, d2)?;
    let (s, t) = (q1.concl.env[&b].clone(), q2.concl.env[&b].clone());
    let st = type_core::and(s, t);
    let q1 = subst_c(&q1, &b, &and_el(ax(&b, &st))?)?;
    let q2 = subst_c(&q2, &b, &and_er(ax(&b, &st))?)?;
    arrow_i(&b, and_i(q1, q2)?)
}

/// `M : σ→ρ` and `M : τ→θ` give `M : σ∨τ → ρ∨θ`.
pub fn combine_or(d1: &D, d2: &D) -> Result<D, DeriveError> {
    let (b, q1, q2) = invert_pair(d1, d2)?;
    let (r, th) = (q1.concl.ty.clone(), q2.concl.ty.clone());
    let q1 = or_il(q1, &th);
    let q2 = or_ir(&r, q2);
    arrow_i(&b, or_i_prime(&b, &q1, &q2)?)
}

/// `M : α→β` and `x:σ ⊢ x:α` give `M : σ→β`.
pub fn weaken_left(d: &D, sigma: &TypeExpr) -> Result<D, DeriveError> {
    let (b, q) = invert_abs(d)?;
    let alpha = q.concl.env[&b].clone();
    if &alpha == sigma {
        return Ok(d.clone());
    }
    let v = derive_var_named(sigma, &alpha, &b)?;
    arrow_i(&b, subst_c(&q, &b, &v)?)
}

/// `M : α→β` and `z:β ⊢ z:τ` give `M : α→τ`.
pub fn weaken_right(d: &D, tau: &TypeExpr) -> Result<D, DeriveError> {
    let (b, q) = invert_abs(d)?;
    if &q.concl.ty == tau {
        return Ok(d.clone());
    }
    let mut avoid = q.names();
    avoid.insert(b.clone());
    let z = fresh("z", &avoid);
    let v = derive_var_named(&q.concl.ty, tau, &z)?;
    arrow_i(&b, subst_c(&v, &z, &q)?)
}

/// Weakens both sides: `M : α→β` gives `M : σ→τ` when `σ ⊢ α` and `β ⊢ τ`.
pub fn weaken(d: &D, sigma: &TypeExpr, tau: &TypeExpr) -> Result<D, DeriveError> {
    weaken_right(&weaken_left(d, sigma)?, tau)
}

/// `⊢ A : σ→ρ` and `⊢ B : ρ→τ` give `⊢ λx. B (A x) : σ→τ`.
pub fn compose(da: &D, db: &D) -> Result<D, DeriveError> {
    let TypeExpr::Arrow(sigma, _) = &da.concl.ty else { return Err(shape("compose needs arrows")) };
    let mut avoid = da.concl.term.all_vars();
    db.concl.term.collect_vars(&mut avoid);
    let x = fresh("x", &avoid);
    let inner = arrow_e(da.clone(), ax(&x, sigma))?;
    arrow_i(&x, arrow_e(db.clone(), inner)?)
}

// ---------------------------------------------------------------------------
// Decompositions of derivations for finite hereditary permutations.

fn closed_fhp(d: &D) -> Result<(TypeExpr, TypeExpr), DeriveError> {
    if !d.concl.env.is_empty() {
        return Err(DeriveError::NotFhp(d.concl.term.to_string()));
    }
    recognize_normal(&d.concl.term).map_err(|_| DeriveError::NotFhp(d.concl.term.to_string()))?;
    match &d.concl.ty {
        TypeExpr::Arrow(s, t) => Ok(((**s).clone(), (**t).clone())),
        other => Err(shape(format!("{other} is not an arrow"))),
    }
}

/// From `⊢ P : σ→τ` and a disjunct `μ_i` of `w(σ)`, a derivation of
/// `⊢ P : μ_i → ν_j` for a disjunct `ν_j` of `w(τ)`. Returns `j` too.
pub fn p1_decompose(d: &TypingDerivation, i: usize) -> Result<(usize, TypingDerivation), DeriveError> {
    let (sigma, _) = closed_fhp(d)?;
    if i >= dnf_disjuncts(&sigma).len() {
        return Err(DeriveError::BadIndex(i));
    }
    let (x, body) = invert_abs(d)?;
    let (j, q) = p1_open(&body, &x, i)?;
    Ok((j, arrow_i(&x, q)?))
}

/// From `⊢ P : σ→τ` and a conjunct `κ_j` of `cw(τ)`, a derivation of
/// `⊢ P : χ_i → κ_j` for a conjunct `χ_i` of `cw(σ)`. Returns `i` too.
pub fn p2_decompose(d: &TypingDerivation, j: usize) -> Result<(usize, TypingDerivation), DeriveError> {
    let (_, tau) = closed_fhp(d)?;
    if j >= cnf_conjuncts(&tau).len() {
        return Err(DeriveError::BadIndex(j));
    }
    let (x, body) = invert_abs(d)?;
    let (i, q) = p2_open(&body, &x, j, &BTreeMap::new())?;
    Ok((i, arrow_i(&x, q)?))
}

/// `h:σ ⊢ Q:τ` and disjunct `i` of `w(σ)` give `h:μ_i ⊢ Q:ν_j`.
fn p1_open(d: &D, h: &str, i: usize) -> Result<(usize, D), DeriveError> {
    let sigma = d.concl.env.get(h).ok_or_else(|| shape(format!("{h} is not in the environment")))?;
    let mus = dnf_disjuncts(sigma);
    let mu = mus.get(i).ok_or(DeriveError::BadIndex(i))?.clone();
    let p = |k: usize| -> &D { &d.premises[k] };
    match d.rule {
        Rule::Ax => Ok((i, ax(h, &mu))),
        Rule::ArrowI => {
            let v = derive_var_named(&mu, sigma, h)?;
            Ok((0, subst_c(d, h, &v)?))
        }
        Rule::AndEL | Rule::AndER => {
            let TypeExpr::And(l, r) = &p(0).concl.ty else { unreachable!() };
            let (j, q) = p1_open(p(0), h, i)?;
            let nr = dnf_disjuncts(r).len();
            let _ = l;
            if d.rule == Rule::AndEL {
                Ok((j / nr, and_el(q)?))
            } else {
                Ok((j % nr, and_er(q)?))
            }
        }
        Rule::AndI => {
            let (j1, q1) = p1_open(p(0), h, i)?;
            let (j2, q2) = p1_open(p(1), h, i)?;
            let n2 = dnf_disjuncts(&p(1).concl.ty).len();
            Ok((j1 * n2 + j2, and_i(q1, q2)?))
        }
        Rule::OrIL => p1_open(p(0), h, i),
        Rule::OrIR => {
            let TypeExpr::Or(l, _) = &d.concl.ty else { unreachable!() };
            let (j, q) = p1_open(p(0), h, i)?;
            Ok((dnf_disjuncts(l).len() + j, q))
        }
        Rule::OrE => {
            let info = d.or_e.as_ref().unwrap();
            if !p(2).concl.env.contains_key(h) {
                return Err(DeriveError::Unsupported("∨E whose substituted term misses the head variable".into()));
            }
            let (c, q3) = p1_open(p(2), h, i)?;
            let n1 = dnf_disjuncts(&type_core::and(info.sigma.clone(), info.theta.clone())).len();
            let (prem, c) = if c < n1 { (p(0), c) } else { (p(1), c - n1) };
            let (j, qz) = p1_open(prem, &info.var, c)?;
            Ok((j, subst_c(&qz, &info.var, &q3)?))
        }
        Rule::ArrowE => Err(DeriveError::Unsupported("application under a single-variable environment".into())),
    }
}

/// `Γ ⊢ R:τ` with head variable `h`, a conjunct index `j` of `cw(τ)`, and
/// for every other variable `y` a disjunct index `ks[y]` of `w(Γ(y))`,
/// give `h:χ_i, y:μ_{ks[y]} ⊢ R : κ_j`.
fn p2_open(d: &D, h: &str, j: usize, ks: &BTreeMap<String, usize>) -> Result<(usize, D), DeriveError> {
    let env = &d.concl.env;
    let p = |k: usize| -> &D { &d.premises[k] };
    let restrict = |e: &Env| -> BTreeMap<String, usize> { ks.iter().filter(|(k, _)| e.contains_key(*k)).map(|(k, v)| (k.clone(), *v)).collect() };
    let kappas = cnf_conjuncts(&d.concl.ty);
    if j >= kappas.len() {
        return Err(DeriveError::BadIndex(j));
    }
    match d.rule {
        Rule::Ax => {
            let chis = cnf_conjuncts(&env[h]);
            Ok((j, ax(h, &chis[j])))
        }
        Rule::ArrowI => {
            let Term::Abs(y, _) = &d.concl.term else { unreachable!() };
            let TypeExpr::Arrow(rho, _) = &d.concl.ty else { unreachable!() };
            let nk = dnf_disjuncts(rho).len();
            let mut ks2 = ks.clone();
            ks2.insert(y.to_string(), j % nk);
            let (i, q) = p2_open(p(0), h, j / nk, &ks2)?;
            Ok((i, arrow_i(y, q)?))
        }
        Rule::ArrowE => {
            let (d1, d2) = (p(0), p(1));
            if !d1.concl.env.contains_key(h) {
                return Err(DeriveError::Unsupported("head variable in argument position".into()));
            }
            let ys: Vec<&String> = d2.concl.env.keys().collect();
            let [y] = ys.as_slice() else {
                return Err(DeriveError::Unsupported("argument with several free variables".into()));
            };
            let k = *ks.get(*y).ok_or_else(|| shape(format!("no disjunct chosen for {y}")))?;
            let (u, q2) = p1_open(d2, y, k)?;
            let nu = dnf_disjuncts(&d2.concl.ty).len();
            let (i, q1) = p2_open(d1, h, j * nu + u, &restrict(&d1.concl.env))?;
            Ok((i, arrow_e(q1, q2)?))
        }
        Rule::AndEL => p2_open(p(0), h, j, ks),
        Rule::AndER => {
            let TypeExpr::And(l, _) = &p(0).concl.ty else { unreachable!() };
            p2_open(p(0), h, cnf_conjuncts(l).len() + j, ks)
        }
        Rule::AndI => {
            let n1 = cnf_conjuncts(&p(0).concl.ty).len();
            if j < n1 {
                p2_open(p(0), h, j, ks)
            } else {
                p2_open(p(1), h, j - n1, ks)
            }
        }
        Rule::OrIL | Rule::OrIR => {
            let TypeExpr::Or(l, r) = &d.concl.ty else { unreachable!() };
            let (ls, rs) = (cnf_conjuncts(l), cnf_conjuncts(r));
            let (a, b) = (j / rs.len(), j % rs.len());
            if d.rule == Rule::OrIL {
                let (i, q) = p2_open(p(0), h, a, ks)?;
                Ok((i, or_il(q, &rs[b])))
            } else {
                let (i, q) = p2_open(p(0), h, b, ks)?;
                Ok((i, or_ir(&ls[a], q)))
            }
        }
        Rule::OrE => {
            let info = d.or_e.as_ref().unwrap();
            let z = info.var.as_str();
            let (e1, e2, e3) = (p(0), p(1), p(2));
            if e3.concl.env.contains_key(h) {
                let mut g1 = e1.concl.env.clone();
                g1.remove(z);
                let (i1, q1) = p2_open(e1, z, j, &restrict(&g1))?;
                let (i2, q2) = p2_open(e2, z, j, &restrict(&g1))?;
                let n_s = cnf_conjuncts(&info.sigma).len();
                let n_t = cnf_conjuncts(&info.tau).len();
                let ks3 = restrict(&e3.concl.env);
                if i1 >= n_s {
                    let (i, q3) = p2_open(e3, h, n_s * n_t + (i1 - n_s), &ks3)?;
                    return Ok((i, subst_c(&q1, z, &q3)?));
                }
                if i2 >= n_t {
                    let (i, q3) = p2_open(e3, h, n_s * n_t + (i2 - n_t), &ks3)?;
                    return Ok((i, subst_c(&q2, z, &q3)?));
                }
                let (i, q3) = p2_open(e3, h, i1 * n_t + i2, &ks3)?;
                Ok((i, or_e_prime(z, &q1, &q2, &q3)?))
            } else {
                let ys: Vec<&String> = e3.concl.env.keys().collect();
                let [y] = ys.as_slice() else {
                    return Err(DeriveError::Unsupported("∨E on a term with several free variables".into()));
                };
                let k = *ks.get(*y).ok_or_else(|| shape(format!("no disjunct chosen for {y}")))?;
                let (c, q3) = p1_open(e3, y, k)?;
                let n1 = dnf_disjuncts(&type_core::and(info.sigma.clone(), info.theta.clone())).len();
                let (prem, c) = if c < n1 { (e1, c) } else { (e2, c - n1) };
                let mut ks1 = restrict(&prem.concl.env);
                ks1.insert(z.to_string(), c);
                let (i, q1) = p2_open(prem, h, j, &ks1)?;
                Ok((i, subst_c(&q1, z, &q3)?))
            }
        }
    }
}
