//! Property suites, each run with a fixed-seed proptest runner.

use std::collections::BTreeSet;

use cullen_core::baker::{lambda1_certificate, resolve_fixpoint, fibonacci_chain, Mode, ProblemInstance, Target};
use cullen_core::height::{height_compose, log_height, matveev_lower_bound, rational_height, AlgebraicNumberRef};
use cullen_core::height::{HeightExpr, LinearFormInstance};
use cullen_core::interval::{Complex, Real};
use cullen_core::lattice::{default_delta, lll_reduce, shortest_vector_floor, IntegerLattice};
use cullen_core::poly::IntegerPolynomial;
use cullen_core::recurrence::{decompose, growth_constant, RecurrenceSpec};
use cullen_core::reduction::{evaluate_form, reduce_inhomogeneous, ReductionProblem};
use cullen_core::roots::isolate_roots;
use cullen_core::search::{certify_solution, search_fibonacci, search_general, SolutionTuple};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use crate::Outcome;

pub const ALL: &[(&str, fn() -> Outcome)] = &[
    ("height axioms", heights),
    ("Matveev monotonicity", matveev_monotone),
    ("LLL preservation and 2-dim oracle", lll),
    ("interval precision monotonicity", precision_monotone),
    ("Binet reconstruction n <= 500", binet),
    ("search vs naive oracle", search_oracle),
    ("kappa non-vanishing n1 <= 50", kappa_oracle),
    ("fixpoint verification", fixpoints),
    ("reduction soundness", reduction),
    ("bounds vs direct search", bounds_vs_search),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(cases).run(&s, f).map_err(|e| e.to_string())
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

const P: u32 = 256;

fn heights() -> Outcome {
    run(200, (-1_000_000i64..1_000_000, 1i64..1_000_000, 1i64..6), |(p, q, n)| {
        let r = BigRational::new(big(p), big(q));
        let m = r.numer().abs().max(r.denom().clone()).to_f64().unwrap();
        let h = rational_height(&r, P);
        prop_assert!(!h.lo().is_negative());
        prop_assert!((h.mid_f64() - m.ln()).abs() <= 1e-12 * m.ln().max(1.0));
        let hp = height_compose(&HeightExpr::ratio(p, q).pow(n), P).unwrap();
        let nh = &h * &Real::from_int(n, P);
        prop_assert!(hp.intersect(&nh).is_some(), "power rule");
        if p != 0 {
            let poly = IntegerPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]).unwrap();
            let z = Complex::from_real(Real::from_rational(&r, P));
            let a = AlgebraicNumberRef::from_minpoly(poly, &z).unwrap();
            let la = log_height(&a).unwrap();
            prop_assert!(la.intersect(&h).is_some(), "degree-1 height");
            prop_assert!(!la.lo().is_negative());
        }
        Ok(())
    })?;
    let one = height_compose(&HeightExpr::int(1), P).map_err(|e| e.to_string())?;
    if !one.contains(&cullen_core::interval::Dyadic::zero()) {
        return Err("h(1) != 0".into());
    }
    Ok("200 cases".into())
}

fn matveev(a: &[f64], b: u64, d: u32) -> f64 {
    let inst = LinearFormInstance {
        gammas: vec![],
        exponent_bound: BigInt::from(b),
        exponents: None,
        field_degree: d,
        a_values: Some(a.iter().map(|&x| Real::from_f64(x, P)).collect()),
    };
    matveev_lower_bound(&inst, P).unwrap().mid_f64()
}

fn matveev_monotone() -> Outcome {
    let s = (prop::collection::vec(0.16f64..100.0, 2..5), 2u64..1_000_000_000, 1u64..1000, 1u32..4, 0usize..4, 1.0f64..10.0);
    run(200, s, |(a, b, db, d, j, factor)| {
        let base = matveev(&a, b, d);
        prop_assert!(matveev(&a, b + db, d) <= base);
        let mut bigger = a.clone();
        let j = j % a.len();
        bigger[j] *= factor;
        prop_assert!(matveev(&bigger, b, d) <= base);
        Ok(())
    })?;
    Ok("200 cases".into())
}

fn lattice_of(v: &[i64], m: usize) -> Option<IntegerLattice> {
    IntegerLattice::new(v.chunks(m).map(|c| c.iter().map(|&x| big(x)).collect()).collect()).ok()
}

fn lll() -> Outcome {
    for m in [2usize, 3] {
        run(100, prop::collection::vec(-1000i64..1000, m * m), |v| {
            let Some(l) = lattice_of(&v, m) else { return Ok(()) };
            let r = lll_reduce(&l, &default_delta()).unwrap();
            prop_assert_eq!(r.det_sqr(), l.det_sqr());
            for b in r.basis() {
                prop_assert!(l.contains(b));
            }
            for b in l.basis() {
                prop_assert!(r.contains(b));
            }
            Ok(())
        })?;
    }
    run(60, prop::collection::vec(-60i64..60, 4), |v| {
        let Some(l) = lattice_of(&v, 2) else { return Ok(()) };
        let r = lll_reduce(&l, &default_delta()).unwrap();
        let floor = shortest_vector_floor(&r);
        let b = l.basis();
        let mut best: Option<BigInt> = None;
        for c1 in -50i64..=50 {
            for c2 in -50i64..=50 {
                if c1 == 0 && c2 == 0 {
                    continue;
                }
                let x = &b[0][0] * c1 + &b[1][0] * c2;
                let y = &b[0][1] * c1 + &b[1][1] * c2;
                let n = &x * &x + &y * &y;
                best = Some(best.map_or(n.clone(), |bb: BigInt| bb.min(n)));
            }
        }
        let best = BigRational::from_integer(best.unwrap());
        prop_assert!(&floor * &floor <= best);
        Ok(())
    })?;
    Ok("2- and 3-dim bases".into())
}

fn precision_monotone() -> Outcome {
    run(60, (-20i64..20, -20i64..20, -20i64..20), |(a, b, c)| {
        let Ok(p) = IntegerPolynomial::from_i64s(&[c, b, a, 1]) else { return Ok(()) };
        if !cullen_core::poly::is_squarefree(&p) {
            return Ok(());
        }
        let lo = isolate_roots(&p, 128);
        let hi = isolate_roots(&p, 256);
        let (Ok(lo), Ok(hi)) = (lo, hi) else { return Ok(()) };
        prop_assert_eq!(lo.len(), hi.len());
        for r in &hi {
            let partner = lo.iter().find(|q| !q.disjoint_from(r));
            prop_assert!(partner.is_some());
            prop_assert!(r.radius <= partner.unwrap().radius);
        }
        for (i, x) in hi.iter().enumerate() {
            for y in &hi[i + 1..] {
                prop_assert!(x.disjoint_from(y));
            }
        }
        Ok(())
    })?;
    run(100, (1i64..1_000_000, 1i64..1000), |(p, q)| {
        let x = BigRational::new(big(p), big(q));
        for f in [Real::ln, Real::sqrt, Real::exp] {
            let a = f(&Real::from_rational(&x, 128).mul_pow2(-12));
            let b = f(&Real::from_rational(&x, 256).mul_pow2(-12));
            prop_assert!(b.width() <= a.width());
            prop_assert!(a.intersect(&b).is_some());
        }
        Ok(())
    })?;
    Ok("roots and elementary functions".into())
}

fn reconstruct_all(spec: &RecurrenceSpec) -> Result<(), TestCaseError> {
    let Ok(d) = decompose(spec) else { return Ok(()) };
    let terms = spec.eval_terms(0, 500);
    let growth = d.dominance_gap.is_some().then(|| (growth_constant(&d).hi_f64(), d.dominant_root().modulus.hi_f64()));
    for (n, t) in terms.iter().enumerate() {
        let z = d.reconstruct(n as u32);
        prop_assert!(z.re.contains_int(t), "U_{} not enclosed", n);
        prop_assert!(z.im.contains_zero());
        if let Some((c1, a)) = growth {
            let bound = c1 * a.powi(n as i32);
            if bound.is_finite() {
                prop_assert!(t.abs().to_f64().unwrap() <= bound * (1.0 + 1e-12));
            }
        }
    }
    Ok(())
}

fn binet() -> Outcome {
    for spec in [
        RecurrenceSpec::fibonacci(),
        RecurrenceSpec::counterexample(),
        RecurrenceSpec::from_i64s(&[2, 1], &[0, 1]).unwrap(),
        RecurrenceSpec::from_i64s(&[1, 1, 1], &[0, 0, 1]).unwrap(),
    ] {
        reconstruct_all(&spec).map_err(|e| e.to_string())?;
    }
    run(12, (1i64..6, 1i64..6, -5i64..6, -5i64..6), |(a1, a2, u0, u1)| {
        let Ok(spec) = RecurrenceSpec::from_i64s(&[a1, a2], &[u0, u1]) else { return Ok(()) };
        reconstruct_all(&spec)
    })?;
    Ok("4 fixed + 12 random recurrences".into())
}

fn naive_fib(ell_max: u64, n1_max: u64) -> Vec<SolutionTuple> {
    let f = RecurrenceSpec::fibonacci().eval_terms(0, n1_max as usize);
    let mut out = Vec::new();
    for ell in 0..=ell_max {
        let rhs = BigInt::from(ell) * num_traits::pow(big(2), ell as usize) + 1;
        for n1 in 0..=n1_max {
            for n2 in 0..=n1 {
                if &f[n1 as usize] + &f[n2 as usize] == rhs {
                    out.push(SolutionTuple::new(vec![n1, n2], ell, 2));
                }
            }
        }
    }
    cullen_core::search::sort_canonical(&mut out);
    out
}

fn naive_general(inst: &ProblemInstance, n1_max: u64, ell_max: u64) -> BTreeSet<SolutionTuple> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<Vec<u64>> = (0..=n1_max).map(|n| vec![n]).collect();
    while let Some(t) = stack.pop() {
        if t.len() == inst.k {
            for ell in 0..=ell_max {
                let s = SolutionTuple { indices: t.clone(), ell, x: inst.x.clone() };
                if certify_solution(inst, &s) {
                    out.insert(s);
                }
            }
        } else {
            for n in 0..*t.last().unwrap() {
                let mut u = t.clone();
                u.push(n);
                stack.push(u);
            }
        }
    }
    out
}

fn search_oracle() -> Outcome {
    if search_fibonacci(40, 40) != naive_fib(40, 40) {
        return Err("fibonacci box 40 x 40 differs from the naive loop".into());
    }
    run(20, (0u64..=40, 0u64..=40), |(e, n)| {
        prop_assert_eq!(search_fibonacci(e, n), naive_fib(e, n));
        Ok(())
    })?;
    let strat = (-3i64..4, 1i64..4, -3i64..4, -3i64..4, 2i64..4, -3i64..4, 1usize..4);
    run(30, strat, |(a1, a2, u0, u1, x, c, k)| {
        let Ok(spec) = RecurrenceSpec::from_i64s(&[a1, a2], &[u0, u1]) else { return Ok(()) };
        let Ok(q) = IntegerPolynomial::constant(c) else { return Ok(()) };
        let inst = ProblemInstance::new(spec, q, x, k).unwrap();
        let got = search_general(&inst, 12, 5);
        for t in &got {
            prop_assert!(certify_solution(&inst, t));
        }
        let got: BTreeSet<SolutionTuple> = got.into_iter().collect();
        prop_assert_eq!(got, naive_general(&inst, 12, 5));
        Ok(())
    })?;
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().map_err(|e| e.to_string())?;
    if one.install(|| search_fibonacci(135, 200)) != four.install(|| search_fibonacci(135, 200)) {
        return Err("search depends on worker count".into());
    }
    Ok("fibonacci and general boxes".into())
}

fn kappa_oracle() -> Outcome {
    if !lambda1_certificate(50).verified {
        return Err("certificate not verified".into());
    }
    // alpha^(2n) = (L_2n + F_2n sqrt5)/2 must equal the rational 5 l^2 4^l for Lambda_1 = 0.
    let f = RecurrenceSpec::fibonacci().eval_terms(0, 100);
    let lucas = RecurrenceSpec::from_i64s(&[1, 1], &[2, 1]).unwrap().eval_terms(0, 100);
    for n in 0..=50usize {
        for ell in 0..=60u64 {
            let rhs = BigInt::from(5) * BigInt::from(ell * ell) * num_traits::pow(big(4), ell as usize);
            if f[2 * n].is_zero() && lucas[2 * n] == &rhs * 2 {
                return Err(format!("Lambda_1 vanishes at n1 = {n}, l = {ell}"));
            }
        }
    }
    Ok("no vanishing for n1 <= 50, l <= 60".into())
}

fn fixpoints() -> Outcome {
    run(60, (1.0f64..1e30, 0u32..5), |(c, b)| {
        let cr = Real::from_f64(c, P);
        let n = resolve_fixpoint(&cr, b).unwrap();
        let nr = Real::from_int(n.clone(), P);
        prop_assert!(nr.gt(&(&cr * &nr.ln().powi(b))));
        Ok(())
    })?;
    Ok("60 cases".into())
}

fn reduction() -> Outcome {
    let prob = ReductionProblem {
        thetas: vec![cullen_core::interval::ln2(P), -Real::from_int(3, P).ln()],
        bounds: vec![big(1000), big(1000)],
        beta: Real::from_int(5, P).ln(),
        decay: Some((Real::one(P), Real::from_int(2, P))),
        initial_scale: None,
    };
    let out = reduce_inhomogeneous(&prob).map_err(|e| e.to_string())?;
    let lambda = out.lambda_lower.clone().ok_or("reduction failed")?;
    let nb = out.new_bound.clone().ok_or("no new bound")?;
    run(10_000, (-1000i64..=1000, -1000i64..=1000), |(a, b)| {
        let v = evaluate_form(&prob, &[big(a), big(b)]).abs();
        prop_assert!(lambda.lo() <= v.lo());
        Ok(())
    })?;
    for t in 1..=50u32 {
        let tt = &nb + t;
        let decay = Real::from_int(2, P).powi(tt.to_u32().unwrap()).recip();
        if !decay.lt(&lambda) {
            return Err(format!("K rho^-T not below lambda at T = {tt}"));
        }
    }
    Ok(format!("lambda >= {:.3e}, T <= {nb}, 10000 samples", lambda.lo_f64()))
}

fn bounds_vs_search() -> Outcome {
    let sols = search_fibonacci(750, 1000);
    for mode in [Mode::Replay, Mode::Rigorous] {
        let l = fibonacci_chain(mode).map_err(|e| e.to_string())?;
        let mut names: Vec<&str> = l.entries.iter().map(|e| e.name.as_str()).collect();
        for c in ["c_1", "c_3", "c_6", "c_8", "kappa", "n_min"] {
            if !names.contains(&c) {
                return Err(format!("{c} missing from the {} ledger", mode.as_str()));
            }
        }
        names.sort();
        let n = names.len();
        names.dedup();
        if n != names.len() {
            return Err("duplicate ledger names".into());
        }
        for s in &l.stage_bounds {
            if !s.coefficient.is_positive() || !s.folded.hi_f64().is_finite() {
                return Err(format!("stage {} not a finite positive bound", s.target.label()));
            }
        }
        let n1 = l.stage(&Target::Absolute).and_then(|s| s.resolved.clone()).ok_or("unresolved")?;
        let gap = l.stage(&Target::Gap(2)).and_then(|s| s.resolved.clone()).ok_or("unresolved gap")?;
        for t in &sols {
            if BigInt::from(t.indices[0]) >= n1 || BigInt::from(t.indices[0] - t.indices[1]) > gap {
                return Err(format!("{t:?} violates the {} bounds", mode.as_str()));
            }
        }
    }
    Ok(format!("{} solutions with n1 <= 1000 respect both ledgers", sols.len()))
}
