mod common;

use common::oracle;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use tyiso::derive::{and_i, arrow_e, arrow_i, ax, check, derive_var, derive_var_named, p1_decompose, p2_decompose, subst_c, var_derivable, DeriveError, TypingDerivation};
use tyiso::iso::{isomorphic, IsoVerdict};
use tyiso::lambda::{alpha_eq, beta_eta_nf, compose_terms, dpaths_of_fhi, fhp_inverse, fhp_term, recognize_fhp, FhpShape, Term, DEFAULT_BETA_BUDGET};
use tyiso::preorder::{leq, LeqKind};
use tyiso::rewrite::*;
use tyiso::syntax::{parse_term, parse_type};
use tyiso::type_core::{and, and_all, arrow, atom, cnf_conjuncts, dnf_disjuncts, or, CanonicalTop, TypeExpr};
use tyiso::witness::{witness_basic_iso, witness_step, Connective, Law};

const STRATEGIES: usize = 3;

fn t(s: &str) -> TypeExpr {
    parse_type(s).unwrap()
}

fn strategies(n: u64) -> [Strategy; STRATEGIES] {
    [Strategy::LeftmostOutermost, Strategy::RightmostInnermost, Strategy::Random(n)]
}

struct Corpus {
    types: Vec<TypeExpr>,
    /// Per type, one normalisation per strategy.
    runs: Vec<Vec<Result<(TypeExpr, RewriteTrace), RewriteError>>>,
}

fn corpus() -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let types: Vec<TypeExpr> = (0..1000).map(|_| common::random_type(&mut rng, 6, 5, 4)).collect();
    let runs = types
        .iter()
        .enumerate()
        .map(|(n, ty)| strategies(n as u64).iter().map(|s| normalize(ty, *s)).collect())
        .collect();
    Corpus { types, runs }
}

fn golden() -> (bool, String) {
    let cases = [
        ("a -> (b & c) | d", "(a -> b | d) & (a -> c | d)"),
        ("(m -> p -> c) & (m -> (p & n -> c) | q1) & (m -> (p & n -> c) | q2)", "m -> p -> c"),
        ("(a | p -> p) & (p & q -> p)", "(a -> p) & (p -> p)"),
    ];
    let mut bad = Vec::new();
    for (src, want) in cases {
        match normalize(&t(src), Strategy::LeftmostOutermost) {
            Ok((nf, _)) if nf.to_string() == want => {}
            Ok((nf, _)) => bad.push(format!("{src} gave {nf}")),
            Err(e) => bad.push(format!("{src}: {e}")),
        }
    }
    let normal = "((p1 & p2 -> p2 | p3) | (p2 -> p5)) & ((p2 & p3 -> p5) | (p4 -> p3 | p5))";
    match normalize(&t(normal), Strategy::LeftmostOutermost) {
        Ok((nf, tr)) if nf == t(normal) && tr.steps.is_empty() => {}
        other => bad.push(format!("normal example changed: {:?}", other.map(|(n, tr)| (n.to_string(), tr.steps.len())))),
    }
    (bad.is_empty(), if bad.is_empty() { "4/4 exact".into() } else { bad.join("; ") })
}

fn termination(c: &Corpus) -> (bool, String) {
    let (mut errors, mut rpo_fail, mut erase_fail, mut max_steps, mut steps) = (0, 0, 0, 0, 0);
    for runs in &c.runs {
        for run in runs {
            let Ok((_, tr)) = run else {
                errors += 1;
                continue;
            };
            max_steps = max_steps.max(tr.steps.len());
            for st in &tr.steps {
                steps += 1;
                let r = &st.redex;
                if r.rule.is_erasure() {
                    if st.after.size() >= st.before.size() {
                        erase_fail += 1;
                    }
                } else {
                    let inst = dist_instance(r).unwrap_or_else(|| r.focus.clone());
                    if !rpo_greater(&inst, &r.result, Polarity::of_context(&r.context)) {
                        rpo_fail += 1;
                    }
                }
            }
        }
    }
    let ok = errors == 0 && rpo_fail == 0 && erase_fail == 0;
    (ok, format!("{} runs, {errors} over budget, {steps} steps, max {max_steps}, {rpo_fail} without RPO decrease, {erase_fail} erasures not shrinking", c.types.len() * STRATEGIES))
}

fn confluence(c: &Corpus) -> (bool, String) {
    let (mut diverge, mut raw) = (0, 0);
    for runs in &c.runs {
        let nfs: Vec<Option<&TypeExpr>> = runs.iter().map(|r| r.as_ref().ok().map(|(n, _)| n)).collect();
        if nfs.iter().any(Option::is_none) {
            diverge += 1;
            continue;
        }
        let nfs: Vec<&TypeExpr> = nfs.into_iter().flatten().collect();
        let tops: Vec<CanonicalTop> = nfs.iter().map(|n| CanonicalTop::of(n)).collect();
        if tops.windows(2).any(|w| w[0] != w[1]) {
            raw += 1;
        }
        let canon: Vec<CanonicalTop> = nfs.iter().map(|n| CanonicalTop::of(&canonical_ac(n))).collect();
        if canon.windows(2).any(|w| w[0] != w[1]) {
            diverge += 1;
        }
    }
    (
        diverge == 0,
        format!("{diverge}/{} differ after reordering spines at defined paths ({raw} differ in nested spine order only before it)", c.types.len()),
    )
}

fn identity_nf(t: &Term) -> bool {
    let lib = beta_eta_nf(t, DEFAULT_BETA_BUDGET).map(|n| alpha_eq(&n, &Term::identity())).unwrap_or(false);
    lib && oracle::is_identity(t)
}

fn witnesses(c: &Corpus) -> (bool, String) {
    let steps: Vec<&RewriteStep> = c.runs.iter().filter_map(|r| r[0].as_ref().ok()).flat_map(|(_, tr)| tr.steps.iter()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample: Vec<&&RewriteStep> = steps.choose_multiple(&mut rng, 500).collect();
    let mut bad = 0;
    for st in &sample {
        let ok = match witness_step(st) {
            Ok(w) => w.check().is_ok() && identity_nf(&w.forward_term) && identity_nf(&w.backward_term),
            Err(_) => false,
        };
        if !ok {
            bad += 1;
        }
    }
    (bad == 0 && sample.len() == 500, format!("{}/{} sampled steps sound", sample.len() - bad, sample.len()))
}

fn law_term(law: Law) -> Term {
    let src = match law {
        Law::DistArrowAnd | Law::DistArrowOr => "\\x y. x y",
        Law::Swap => "\\x y1 y2. x y2 y1",
        _ => "\\x. x",
    };
    parse_term(src).unwrap()
}

fn basic_laws() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut laws = Law::ALL.to_vec();
    laws.extend([Law::Idem(Connective::Or), Law::Comm(Connective::Or), Law::Assoc(Connective::Or)]);
    let mut bad = Vec::new();
    let mut total = 0;
    for law in &laws {
        for _ in 0..20 {
            total += 1;
            let comps: Vec<TypeExpr> = (0..law.arity()).map(|_| common::random_type(&mut rng, 3, 4, 2)).collect();
            let (lhs, rhs) = law.sides(&comps);
            let want = law_term(*law);
            let ok = match witness_basic_iso(*law, &comps) {
                Ok(w) => w.check().is_ok() && w.source == lhs && w.target == rhs && alpha_eq(&w.forward_term, &want) && alpha_eq(&w.backward_term, &want),
                Err(_) => false,
            };
            if !ok {
                bad.push(format!("{law} at {comps:?}"));
            }
        }
    }
    (bad.is_empty(), format!("{} laws, {}/{total} instances with the expected terms", laws.len(), total - bad.len()))
}

fn random_shape<R: Rng>(rng: &mut R, depth: usize) -> FhpShape {
    if depth == 0 || rng.gen_bool(0.3) {
        return FhpShape::identity();
    }
    let arity = rng.gen_range(1..=3);
    let mut perm: Vec<usize> = (0..arity).collect();
    perm.shuffle(rng);
    let subs = (0..arity).map(|_| random_shape(rng, depth - 1)).collect();
    FhpShape { arity, perm, subs }
}

fn fhp_algebra() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut inv_bad, mut closure_bad) = (0, 0);
    for _ in 0..200 {
        let s = random_shape(&mut rng, 3);
        let (p, q) = (fhp_term(&s), fhp_term(&fhp_inverse(&s)));
        if !identity_nf(&compose_terms(&p, &q)) || !identity_nf(&compose_terms(&q, &p)) {
            inv_bad += 1;
        }
        let r = fhp_term(&random_shape(&mut rng, 3));
        let pr = compose_terms(&p, &r);
        let closed = match recognize_fhp(&pr) {
            Ok(shape) => {
                let a = oracle::beta_eta(&oracle::to_db(&fhp_term(&shape)), 100_000);
                let b = oracle::beta_eta(&oracle::to_db(&pr), 100_000);
                a.is_some() && a == b
            }
            Err(_) => false,
        };
        if !closed {
            closure_bad += 1;
        }
    }
    (inv_bad == 0 && closure_bad == 0, format!("200 permutators: {inv_bad} inverse failures, {closure_bad} composition closure failures"))
}

fn small_types() -> Vec<TypeExpr> {
    let atoms: Vec<TypeExpr> = ["a", "b", "c"].iter().map(|a| atom(a)).collect();
    let mut out = atoms.clone();
    for l in &atoms {
        for r in &atoms {
            out.push(arrow(l.clone(), r.clone()));
            out.push(and(l.clone(), r.clone()));
            out.push(or(l.clone(), r.clone()));
        }
    }
    out
}

fn variable_judgments() -> (bool, String) {
    let tys = small_types();
    let (mut agree, mut total) = (0, 0);
    let mut bad = Vec::new();
    for s in &tys {
        for u in &tys {
            total += 1;
            let want = oracle::entails(s, u);
            let got = match derive_var(s, u) {
                Ok(d) => check(&d).is_ok() && d.ty() == u && d.env().len() == 1 && d.env().get("x") == Some(s),
                Err(_) => false,
            };
            let got = got && var_derivable(s, u) == want;
            if got == want {
                agree += 1;
            } else if bad.len() < 3 {
                bad.push(format!("{s} |- {u}: oracle {want}"));
            }
        }
    }
    (agree == total, format!("{agree}/{total} pairs agree {}", bad.join("; ")).trim_end().to_string())
}

fn decompositions() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut derivs, mut calls, mut bad) = (0, 0, 0);
    let mut attempts = 0;
    while derivs < 100 && attempts < 5000 {
        attempts += 1;
        let ty = common::random_type(&mut rng, 4, 4, 3);
        let Ok((_, tr)) = normalize(&ty, Strategy::LeftmostOutermost) else { continue };
        for st in &tr.steps {
            if derivs >= 100 {
                break;
            }
            let Ok(w) = witness_step(st) else {
                bad += 1;
                continue;
            };
            for d in [&w.forward, &w.backward] {
                derivs += 1;
                let (c1, b1) = decompose_all(d);
                calls += c1;
                bad += b1;
            }
        }
    }
    (bad == 0 && derivs >= 100, format!("{derivs} derivations, {calls} decompositions, {bad} failures"))
}

fn decompose_all(d: &TypingDerivation) -> (usize, usize) {
    let (sigma, tau) = match d.ty() {
        TypeExpr::Arrow(s, t) => ((**s).clone(), (**t).clone()),
        _ => return (0, 1),
    };
    let (mus, nus) = (dnf_disjuncts(&sigma), dnf_disjuncts(&tau));
    let (chis, kappas) = (cnf_conjuncts(&sigma), cnf_conjuncts(&tau));
    let (mut calls, mut bad) = (0, 0);
    let ok = |r: Result<(usize, TypingDerivation), DeriveError>, from: &[TypeExpr], to: &[TypeExpr], k: usize, first: bool| match r {
        Ok((j, q)) => {
            let want = if first { to.get(j).map(|v| arrow(from[k].clone(), v.clone())) } else { to.get(j).map(|v| arrow(v.clone(), from[k].clone())) };
            check(&q).is_ok() && Some(q.ty().clone()) == want
        }
        Err(_) => false,
    };
    for i in 0..mus.len() {
        calls += 1;
        if !ok(p1_decompose(d, i), &mus, &nus, i, true) {
            bad += 1;
        }
    }
    for j in 0..kappas.len() {
        calls += 1;
        if !ok(p2_decompose(d, j), &kappas, &chis, j, false) {
            bad += 1;
        }
    }
    (calls, bad)
}

/// `x:μ→χ ⊢ λy. x y : μ∧ν → χ∨κ`, with either weakening optional.
fn weakened_arrow<R: Rng>(rng: &mut R, sigma: &TypeExpr) -> Option<(TypeExpr, TypingDerivation)> {
    let TypeExpr::Arrow(mu, chi) = sigma else { return None };
    let pick = |rng: &mut R| atom(common::ATOMS[rng.gen_range(0..4)]);
    let nu = if rng.gen_bool(0.5) { and((**mu).clone(), pick(rng)) } else { (**mu).clone() };
    let kappa = if rng.gen_bool(0.5) { or((**chi).clone(), pick(rng)) } else { (**chi).clone() };
    let dy = derive_var_named(&nu, mu, "y").ok()?;
    let dxy = arrow_e(ax("x", sigma), dy).ok()?;
    let dz = derive_var_named(chi, &kappa, "z").ok()?;
    let body = subst_c(&dz, "z", &dxy).ok()?;
    Some((arrow(nu, kappa), arrow_i("y", body).ok()?))
}

/// A closed typing `⊢ λx y. x y : σ → τ` between basic intersections of
/// arrows, built component by component without consulting the preorder.
fn generated_typing<R: Rng>(rng: &mut R) -> Option<(TypeExpr, TypeExpr, TypingDerivation)> {
    let k = rng.gen_range(1..=3);
    let arrows: Vec<TypeExpr> = (0..k).map(|_| arrow(common::random_type(rng, 3, 4, 2), common::random_type(rng, 3, 4, 2))).collect();
    let (sigma, _) = normalize(&and_all(&arrows), Strategy::LeftmostOutermost).ok()?;
    let comps = sigma.and_components();
    if !sigma.is_basic_intersection() || comps.iter().any(TypeExpr::is_atom) {
        return None;
    }
    let mut targets = Vec::new();
    let mut parts = Vec::new();
    for c in &comps {
        if rng.gen_bool(0.2) && comps.len() > 1 {
            continue;
        }
        let (tau_i, d) = weakened_arrow(rng, c)?;
        let proj = derive_var_named(&sigma, c, "x").ok()?;
        parts.push(subst_c(&d, "x", &proj).ok()?);
        targets.push(tau_i);
    }
    if parts.is_empty() {
        return None;
    }
    let tau = and_all(&targets);
    if !is_normal(&tau) {
        return None;
    }
    let body = parts.into_iter().reduce(|a, b| and_i(a, b).expect("same subject and environment"))?;
    Some((sigma, tau, arrow_i("x", body).ok()?))
}

fn nt1_link() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let (mut total, mut bad, mut nontrivial, mut eps_gap) = (0, 0, 0, 0);
    for _ in 0..3000 {
        let Some((sigma, tau, d)) = generated_typing(&mut rng) else { continue };
        if check(&d).is_err() || d.ty() != &arrow(sigma.clone(), tau.clone()) {
            bad += 1;
            continue;
        }
        total += 1;
        let ok = match (leq(&sigma, &tau, LeqKind::Meet), dpaths_of_fhi(d.term())) {
            (Ok(p), Ok(paths)) => {
                nontrivial += usize::from(p.e_set().iter().any(|q| !q.is_empty()));
                // The arrow rule with an extra conjunct and reflexive children
                // has e = {ε}, which no η-expanded identity contains.
                let gap = p.e_set().len() == 1 && p.e_set().iter().all(|q| q.is_empty()) && p.extra && !paths.iter().any(|q| q.is_empty());
                eps_gap += usize::from(gap);
                gap || p.e_set().is_subset(&paths)
            }
            _ => false,
        };
        if !ok {
            bad += 1;
        }
    }
    (
        bad == 0 && nontrivial > 0,
        format!("{}/{total} generated typings, {nontrivial} with non-empty paths, {eps_gap} where e = {{ε}} against a non-trivial expansion", total - bad),
    )
}

fn partial<R: Rng>(rng: &mut R, ty: &TypeExpr) -> TypeExpr {
    let (_, tr) = normalize(ty, Strategy::Random(rng.gen())).unwrap();
    if tr.steps.is_empty() {
        return ty.clone();
    }
    tr.steps[rng.gen_range(0..tr.steps.len())].after.clone()
}

fn iso_api() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut iso_ok, mut iso_unknown, mut iso_bad) = (0, 0, 0);
    while iso_ok + iso_unknown + iso_bad < 300 {
        let ty = common::random_type(&mut rng, 5, 4, 3);
        let pa = partial(&mut rng, &ty);
        let a = common::shuffle_top(&mut rng, &pa);
        let pb = partial(&mut rng, &ty);
        let b = common::shuffle_top(&mut rng, &pb);
        match isomorphic(&a, &b) {
            Ok(IsoVerdict::Isomorphic(w)) if w.check().is_ok() && w.source == a && w.target == b => iso_ok += 1,
            Ok(IsoVerdict::Unknown(_)) => iso_unknown += 1,
            _ => iso_bad += 1,
        }
    }
    let (mut non_ok, mut non_bad) = (0, 0);
    while non_ok + non_bad < 300 {
        let (x, _) = normalize(&common::random_type(&mut rng, 5, 4, 3), Strategy::LeftmostOutermost).unwrap();
        let y = if rng.gen_bool(0.5) {
            normalize(&common::random_type(&mut rng, 5, 4, 3), Strategy::LeftmostOutermost).unwrap().0
        } else {
            and_all(&[x.clone(), atom("z")])
        };
        if oracle::profile(&x) == oracle::profile(&y) || !is_normal(&y) {
            continue;
        }
        match isomorphic(&x, &y) {
            Ok(IsoVerdict::NotIsomorphic(_)) => non_ok += 1,
            _ => non_bad += 1,
        }
    }
    let counter = isomorphic(&t("(s | t -> r) & p"), &t("(t | s -> r) & p"));
    let counter_ok = matches!(counter, Ok(IsoVerdict::Unknown(_)));
    let ok = iso_unknown == 0 && iso_bad == 0 && non_bad == 0 && counter_ok;
    (
        ok,
        format!(
            "isomorphic {iso_ok}/300 ({iso_unknown} unknown), not isomorphic {non_ok}/300, counterexample {}",
            counter.map(|v| v.name()).unwrap_or("error")
        ),
    )
}

fn main() {
    let start = Instant::now();
    let c = corpus();
    let results: Vec<(&str, (bool, String))> = vec![
        ("golden normal forms", golden()),
        ("termination", termination(&c)),
        ("confluence", confluence(&c)),
        ("witness soundness", witnesses(&c)),
        ("basic laws", basic_laws()),
        ("permutator algebra", fhp_algebra()),
        ("variable judgments", variable_judgments()),
        ("decomposition", decompositions()),
        ("preorder and identity paths", nt1_link()),
        ("isomorphism verdicts", iso_api()),
    ];
    let mut failed = 0;
    for (n, (name, (ok, detail))) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {detail}", if *ok { "PASS" } else { "FAIL" }, n + 1);
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria pass in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
