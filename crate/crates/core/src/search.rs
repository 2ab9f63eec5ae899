//! Exhaustive solution search, exact certification and the periodic counterexample.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baker::{Certificate, ProblemInstance};
use crate::error::{Error, Result};
use crate::factor::Irreducibility;
use crate::recurrence::{check_hypotheses, decompose, RecurrenceSpec};

/// `U_{n_1} + ... + U_{n_k} = l x^l + Q(x)` with `n_1 >= ... >= n_k >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TupleJson", into = "TupleJson")]
pub struct SolutionTuple {
    pub indices: Vec<u64>,
    pub ell: u64,
    pub x: BigInt,
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    indices: Vec<String>,
    ell: String,
    x: String,
}

impl From<SolutionTuple> for TupleJson {
    fn from(t: SolutionTuple) -> Self {
        TupleJson {
            indices: t.indices.iter().map(ToString::to_string).collect(),
            ell: t.ell.to_string(),
            x: t.x.to_string(),
        }
    }
}

impl TryFrom<TupleJson> for SolutionTuple {
    type Error = String;

    fn try_from(j: TupleJson) -> std::result::Result<Self, String> {
        let num = |s: &str, field: &str| s.trim().parse::<u64>().map_err(|_| format!("{field}: not a non-negative integer: {s}"));
        let indices = j.indices.iter().map(|s| num(s, "indices")).collect::<std::result::Result<Vec<_>, _>>()?;
        let ell = num(&j.ell, "ell")?;
        let x = j.x.trim().parse::<BigInt>().map_err(|_| format!("x: not an integer: {}", j.x))?;
        Ok(SolutionTuple { indices, ell, x })
    }
}

impl SolutionTuple {
    pub fn new(indices: Vec<u64>, ell: u64, x: impl Into<BigInt>) -> Self {
        SolutionTuple { indices, ell, x: x.into() }
    }

    /// Canonical order: by `l`, then by the indices.
    pub fn canonical_key(&self) -> (u64, &[u64]) {
        (self.ell, &self.indices)
    }

    pub fn tsv_row(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        format!("{}\t{}\t{}", idx.join(","), self.ell, self.x)
    }
}

pub fn sort_canonical(v: &mut [SolutionTuple]) {
    v.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
}

/// `l x^l + c`.
pub fn rhs(ell: u64, x: &BigInt, c: &BigInt) -> BigInt {
    BigInt::from(ell) * num_traits::pow(x.clone(), ell as usize) + c
}

/// Exact check of both sides; indices must be non-increasing and `k` in number.
pub fn certify_solution(instance: &ProblemInstance, tuple: &SolutionTuple) -> bool {
    if tuple.indices.is_empty() || tuple.indices.len() != instance.k {
        return false;
    }
    if tuple.indices.windows(2).any(|w| w[0] < w[1]) {
        return false;
    }
    let terms = instance.spec.eval_terms(0, tuple.indices[0] as usize);
    let lhs: BigInt = tuple.indices.iter().map(|&n| &terms[n as usize]).sum();
    let q = instance.q.eval_int(&tuple.x);
    lhs == rhs(tuple.ell, &tuple.x, &q)
}

fn fib_table(n1_max: u64) -> Vec<BigInt> {
    RecurrenceSpec::fibonacci().eval_terms(0, n1_max as usize)
}

/// All `(n_1, n_2, l)` with `F_{n_1} + F_{n_2} = l 2^l + 1`, `n_1 >= n_2 >= 0`, `n_1 <= n1_max`, `l <= ell_max`.
pub fn search_fibonacci(ell_max: u64, n1_max: u64) -> Vec<SolutionTuple> {
    let table = fib_table(n1_max);
    let mut index: HashMap<&BigInt, Vec<u64>> = HashMap::new();
    for (n, f) in table.iter().enumerate() {
        index.entry(f).or_default().push(n as u64);
    }
    let two = BigInt::from(2);
    let mut out: Vec<SolutionTuple> = (0..=ell_max)
        .into_par_iter()
        .flat_map_iter(|ell| {
            let target = rhs(ell, &two, &BigInt::one());
            // F_{n_1} >= target / 2 and F_{n_1} <= target.
            let lo = table.partition_point(|f| f * 2u32 < target);
            let hi = table.partition_point(|f| f <= &target);
            let mut hits = Vec::new();
            for n1 in lo..hi {
                let rest = &target - &table[n1];
                for &n2 in index.get(&rest).map(Vec::as_slice).unwrap_or(&[]) {
                    if n2 as usize > n1 {
                        continue;
                    }
                    debug_assert!(n2 as usize != n1, "equal indices excluded by parity");
                    hits.push(SolutionTuple::new(vec![n1 as u64, n2], ell, 2));
                }
            }
            hits
        })
        .collect();
    sort_canonical(&mut out);
    out
}

/// `2 F_n = l 2^l + 1` has no solution: the left side is even and the right side odd.
pub fn parity_excludes_equal_indices() -> Certificate {
    let table = fib_table(60);
    let two = BigInt::from(2);
    let hits = (0..=60u64)
        .flat_map(|ell| table.iter().map(move |f| (ell, f)))
        .filter(|(ell, f)| *f * 2u32 == rhs(*ell, &two, &BigInt::one()))
        .count();
    Certificate {
        name: "parity_excludes_equal_indices".into(),
        statement: "2 F_n is even while l 2^l + 1 is odd for l >= 1 and equals 1 for l = 0; brute force over n, l <= 60 finds no equality".into(),
        verified: hits == 0,
    }
}

struct Enumerator<'a> {
    terms: &'a [BigInt],
    /// `prefix_min[b]`, `prefix_max[b]`: extremes of `U_0 .. U_{b-1}`.
    prefix_min: Vec<BigInt>,
    prefix_max: Vec<BigInt>,
    by_value: HashMap<&'a BigInt, Vec<u64>>,
    k: usize,
}

impl<'a> Enumerator<'a> {
    fn new(terms: &'a [BigInt], k: usize) -> Self {
        let mut prefix_min = vec![BigInt::zero()];
        let mut prefix_max = vec![BigInt::zero()];
        for (i, t) in terms.iter().enumerate() {
            prefix_min.push(if i == 0 { t.clone() } else { prefix_min[i].clone().min(t.clone()) });
            prefix_max.push(if i == 0 { t.clone() } else { prefix_max[i].clone().max(t.clone()) });
        }
        let mut by_value: HashMap<&BigInt, Vec<u64>> = HashMap::new();
        for (n, t) in terms.iter().enumerate() {
            by_value.entry(t).or_default().push(n as u64);
        }
        Enumerator { terms, prefix_min, prefix_max, by_value, k }
    }

    /// Picks `r` strictly descending indices below `bound` summing to `target`.
    fn go(&self, target: &BigInt, bound: usize, r: usize, chosen: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if r == 0 {
            if target.is_zero() {
                out.push(chosen.clone());
            }
            return;
        }
        if bound < r {
            return;
        }
        let rb = BigInt::from(r);
        if &rb * &self.prefix_min[bound] > *target || &rb * &self.prefix_max[bound] < *target {
            return;
        }
        if r == 1 {
            for &n in self.by_value.get(target).map(Vec::as_slice).unwrap_or(&[]).iter().rev() {
                if (n as usize) < bound {
                    chosen.push(n);
                    out.push(chosen.clone());
                    chosen.pop();
                }
            }
            return;
        }
        for n in (r - 1..bound).rev() {
            chosen.push(n as u64);
            self.go(&(target - &self.terms[n]), n, r - 1, chosen, out);
            chosen.pop();
        }
    }

    fn solve(&self, target: &BigInt) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        self.go(target, self.terms.len(), self.k, &mut Vec::with_capacity(self.k), &mut out);
        out
    }
}

/// All strictly descending `n_1 > ... > n_k >= 0` with `n_1 <= n1_max` and `ell_min <= l <= ell_max`.
pub fn search_general_range(instance: &ProblemInstance, n1_max: u64, ell_min: u64, ell_max: u64) -> Vec<SolutionTuple> {
    let terms = instance.spec.eval_terms(0, n1_max as usize);
    let en = Enumerator::new(&terms, instance.k);
    let q = instance.q_value();
    let mut out: Vec<SolutionTuple> = (ell_min..=ell_max)
        .into_par_iter()
        .flat_map_iter(|ell| {
            let target = rhs(ell, &instance.x, &q);
            en.solve(&target)
                .into_iter()
                .map(move |indices| SolutionTuple { indices, ell, x: instance.x.clone() })
        })
        .collect();
    sort_canonical(&mut out);
    out
}

pub fn search_general(instance: &ProblemInstance, n1_max: u64, ell_max: u64) -> Vec<SolutionTuple> {
    search_general_range(instance, n1_max, 0, ell_max)
}

/// One of the equalities `G_{6+i} = G_i`.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodCheck {
    pub n: u64,
    pub value: String,
    pub base: u64,
    pub base_value: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleCertificate {
    pub base_period_checks: Vec<PeriodCheck>,
    /// `gcd(M, f)` vanishing at the dominant root, when the Binet decomposition exists.
    pub dominant_coefficient_zero: bool,
    pub dominant_witness: Option<String>,
    pub factorization: Option<String>,
    pub irreducible: String,
    /// `G_{6k+1} = G_{6k+2} = 1 * 2^1 - 1` checked for `k <= verified_k_range`.
    pub verified_k_range: u64,
    pub families_hold: bool,
    pub bounded_values: bool,
}

impl CounterexampleCertificate {
    pub fn complete(&self) -> bool {
        self.base_period_checks.iter().all(|c| c.holds)
            && self.dominant_coefficient_zero
            && self.families_hold
            && self.bounded_values
            && self.irreducible == "false"
    }
}

pub fn verify_counterexample(k_max: u64) -> CounterexampleCertificate {
    verify_counterexample_spec(&RecurrenceSpec::counterexample(), k_max)
}

/// Periodicity, dominant-coefficient and family checks for an order-3 sequence claimed to be 6-periodic.
pub fn verify_counterexample_spec(spec: &RecurrenceSpec, k_max: u64) -> CounterexampleCertificate {
    let n_max = (6 * k_max + 2).max(8) as usize;
    let g = spec.eval_terms(0, n_max);
    let base_period_checks = (0..3u64)
        .map(|i| {
            let (a, b) = (&g[6 + i as usize], &g[i as usize]);
            PeriodCheck { n: 6 + i, value: a.to_string(), base: i, base_value: b.to_string(), holds: a == b }
        })
        .collect();
    let one = BigInt::one();
    let target = rhs(1, &BigInt::from(2), &-&one);
    let families_hold = (0..=k_max as usize).all(|k| g[6 * k + 1] == target && g[6 * k + 2] == target);
    let bounded_values = g.iter().all(|v| v >= &-&one && v <= &one);
    let (dominant_coefficient_zero, dominant_witness) = match decompose(spec) {
        Ok(d) if d.degenerate => {
            let gcd = d.numerator.gcd(&d.char_poly.to_rational()).to_primitive_integer();
            let gcd = gcd.map(|g| g.to_string()).unwrap_or_default();
            (true, Some(format!("gcd(M, f) = {gcd} vanishes at alpha_1")))
        }
        _ => (false, None),
    };
    let report = check_hypotheses(spec);
    let factorization = match &report.irreducible {
        Irreducibility::Reducible(factor) => {
            let f = spec.char_poly();
            f.exact_div(factor).map(|co| format!("{f} = ({factor})({co})"))
        }
        _ => None,
    };
    CounterexampleCertificate {
        base_period_checks,
        dominant_coefficient_zero,
        dominant_witness,
        factorization,
        irreducible: report.irreducible.label().to_string(),
        verified_k_range: k_max,
        families_hold,
        bounded_values,
    }
}

/// Loads an expected solution list from JSON.
pub fn parse_solutions(json: &str) -> Result<Vec<SolutionTuple>> {
    serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("solutions: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntegerPolynomial;

    fn fib(list: &[(u64, u64, u64)]) -> Vec<SolutionTuple> {
        let mut v: Vec<_> = list.iter().map(|&(a, b, l)| SolutionTuple::new(vec![a, b], l, 2)).collect();
        sort_canonical(&mut v);
        v
    }

    #[test]
    fn known_solution_list() {
        let got = search_fibonacci(135, 200);
        let want = fib(&[(1, 0, 0), (2, 0, 0), (4, 0, 1), (3, 1, 1), (3, 2, 1), (6, 1, 2), (6, 2, 2), (14, 6, 6)]);
        assert_eq!(got, want);
        assert_eq!(search_fibonacci(0, 2), fib(&[(1, 0, 0), (2, 0, 0)]));
        assert!(search_fibonacci(135, 200).iter().all(|t| t.ell != 3));
    }

    #[test]
    fn certify() {
        let inst = crate::baker::fib_instance();
        assert!(certify_solution(&inst, &SolutionTuple::new(vec![14, 6], 6, 2)));
        assert!(!certify_solution(&inst, &SolutionTuple::new(vec![14, 5], 6, 2)));
        assert!(!certify_solution(&inst, &SolutionTuple::new(vec![14], 6, 2)));
    }

    #[test]
    fn parity() {
        assert!(parity_excludes_equal_indices().verified);
    }

    #[test]
    fn general_fibonacci_k1() {
        let inst = ProblemInstance::new(
            RecurrenceSpec::fibonacci(),
            IntegerPolynomial::from_i64s(&[1]).unwrap(),
            2,
            1,
        )
        .unwrap();
        let got: Vec<(u64, u64)> = search_general(&inst, 200, 135).iter().map(|t| (t.indices[0], t.ell)).collect();
        assert_eq!(got, vec![(1, 0), (2, 0), (4, 1)]);
    }

    #[test]
    fn counterexample_family() {
        let inst = ProblemInstance::new(
            RecurrenceSpec::counterexample(),
            IntegerPolynomial::from_i64s(&[-1]).unwrap(),
            2,
            1,
        )
        .unwrap();
        let got: Vec<u64> = search_general_range(&inst, 100, 1, 1).iter().map(|t| t.indices[0]).collect();
        let want: Vec<u64> = (0..=100).filter(|n| n % 6 == 1 || n % 6 == 2).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn empty_range() {
        let inst = crate::baker::fib_instance();
        assert!(search_general(&inst, 0, 5).is_empty());
    }

    #[test]
    fn counterexample_certificate() {
        let c = verify_counterexample(100);
        assert!(c.complete(), "{c:?}");
        assert_eq!(c.factorization.as_deref(), Some("x^3 - 3x^2 + 3x - 2 = (x - 2)(x^2 - x + 1)"));
        let tampered = RecurrenceSpec::from_i64s(&[3, -3, 1], &[0, 1, 1]).unwrap();
        assert!(!verify_counterexample_spec(&tampered, 10).complete());
        assert!(verify_counterexample(0).complete());
    }

    #[test]
    fn json_round_trip() {
        let t = SolutionTuple::new(vec![14, 6], 6, 2);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"indices":["14","6"],"ell":"6","x":"2"}"#);
        assert_eq!(serde_json::from_str::<SolutionTuple>(&s).unwrap(), t);
    }
}
