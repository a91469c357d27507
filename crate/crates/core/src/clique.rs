//! Clique counts in `G(n, 1/2)`: Poisson mean, overlap terms, the variance
//! and total-variation bounds, and the planted-clique certification run.

use serde::Serialize;

use crate::certifier::{certify, CertifyConfig};
use crate::combinatorics::{ln_binomial, log_sum_exp, pairs};
use crate::error::{invalid, Result};
use crate::exec;
use crate::generators::{gen_er, plant_clique};
use crate::rng;

const LN_2: f64 = std::f64::consts::LN_2;

fn check_r(n: u64, r: u64) -> Result<()> {
    if r < 2 || r > n {
        return Err(invalid(format!("clique size must lie in 2..=n, got r = {r}, n = {n}")));
    }
    Ok(())
}

/// `ln μ` with `μ = C(n, r) 2^{−C(r,2)}`, the expected number of `r`-cliques.
pub fn poisson_mu(n: u64, r: u64) -> Result<f64> {
    check_r(n, r)?;
    Ok(ln_binomial(n as f64, r as f64) - pairs(r as usize) as f64 * LN_2)
}

fn check_overlap(n: u64, r: u64, s: u64) -> Result<()> {
    check_r(n, r)?;
    if s < 2 || s + 1 > r {
        return Err(invalid(format!("overlap size must lie in 2..r, got s = {s}, r = {r}")));
    }
    if r - s > n - r {
        return Err(invalid(format!("overlap term vanishes: r - s = {} exceeds n - r = {}", r - s, n - r)));
    }
    Ok(())
}

/// `ln a_s` with `a_s = C(r,s) C(n−r, r−s) 2^{−(C(r,2) − C(s,2))}`.
pub fn overlap_term(n: u64, r: u64, s: u64) -> Result<f64> {
    check_overlap(n, r, s)?;
    Ok(ln_binomial(r as f64, s as f64) + ln_binomial((n - r) as f64, (r - s) as f64)
        - (pairs(r as usize) - pairs(s as usize)) as f64 * LN_2)
}

/// `ρ_s = a_{s+1} / a_s = (r−s)² 2^s / ((s+1)(n−2r+s+1))`.
pub fn consecutive_ratio(n: u64, r: u64, s: u64) -> Result<f64> {
    check_r(n, r)?;
    if s >= r {
        return Err(invalid(format!("ratio needs s < r, got s = {s}, r = {r}")));
    }
    let denom = n as f64 - 2.0 * r as f64 + s as f64 + 1.0;
    if !(denom > 0.0) {
        return Err(invalid(format!("n - 2r + s + 1 must be positive, got {denom}")));
    }
    let gap = (r - s) as f64;
    Ok(gap * gap * 2f64.powi(s as i32) / ((s as f64 + 1.0) * denom))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapTerm {
    pub s: u64,
    pub ln_a: f64,
}

/// Non-vanishing overlap terms for `s = 2..r−1`.
fn overlap_terms(n: u64, r: u64) -> Vec<OverlapTerm> {
    (2..r)
        .filter(|&s| r - s <= n - r)
        .map(|s| OverlapTerm { s, ln_a: overlap_term(n, r, s).expect("range checked") })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnimodalityProfile {
    pub n: u64,
    pub r: u64,
    pub a_s_log: Vec<OverlapTerm>,
    /// `argmin_s ln a_s`
    pub s_star: u64,
    /// Every `s` where `ρ_s` points the wrong way for a single valley at `s*`.
    pub violations: Vec<u64>,
    /// Violations outside the tolerated `{r−3, r−2}`.
    pub unexpected_violations: Vec<u64>,
    /// No unexpected violations.
    pub decreasing_then_increasing: bool,
}

/// Locates the minimum `s*` of `a_s` and checks `ρ_s < 1` before it and
/// `ρ_s > 1` after it.
pub fn unimodality_profile(n: u64, r: u64) -> Result<UnimodalityProfile> {
    check_r(n, r)?;
    if r < 3 || 4 * r > n {
        return Err(invalid(format!("profile needs 3 <= r <= n/4, got r = {r}, n = {n}")));
    }
    let a_s_log = overlap_terms(n, r);
    let s_star = a_s_log
        .iter()
        .min_by(|a, b| a.ln_a.total_cmp(&b.ln_a))
        .map(|t| t.s)
        .expect("r >= 3 gives at least one term");
    let mut violations = Vec::new();
    for s in 2..r.saturating_sub(1) {
        if s == s_star {
            continue;
        }
        let rho = consecutive_ratio(n, r, s)?;
        let ok = if s < s_star { rho < 1.0 } else { rho > 1.0 };
        if !ok {
            violations.push(s);
        }
    }
    let unexpected_violations: Vec<u64> =
        violations.iter().copied().filter(|&s| s + 3 != r && s + 2 != r).collect();
    Ok(UnimodalityProfile {
        n,
        r,
        a_s_log,
        s_star,
        decreasing_then_increasing: unexpected_violations.is_empty(),
        violations,
        unexpected_violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceBound {
    /// `ln(2^{−C(r,2)} + Σ_{s=2}^{r−1} a_s)`
    pub full_log: f64,
    pub full: f64,
    /// `ln(2^{−C(r,2)} + r · max_{s ∈ {2, r−3, r−2, r−1}} a_s)`
    pub refined_log: f64,
    pub refined: f64,
}

/// Upper bounds on `Var/μ − 1 + 2·2^{−C(r,2)}` for the `r`-clique count.
pub fn variance_ratio_bound(n: u64, r: u64) -> Result<VarianceBound> {
    check_r(n, r)?;
    let base = -(pairs(r as usize) as f64) * LN_2;
    let terms = overlap_terms(n, r);
    let full_log = log_sum_exp(std::iter::once(base).chain(terms.iter().map(|t| t.ln_a)));
    let edge_terms = [2, r.saturating_sub(3), r.saturating_sub(2), r.saturating_sub(1)];
    let max_edge = terms
        .iter()
        .filter(|t| edge_terms.contains(&t.s))
        .map(|t| t.ln_a)
        .fold(f64::NEG_INFINITY, f64::max);
    let refined_log = log_sum_exp([base, (r as f64).ln() + max_edge]);
    Ok(VarianceBound { full_log, full: full_log.exp(), refined_log, refined: refined_log.exp() })
}

/// `(1 − e^{−μ}) (2^{−C(r,2)} + Σ a_s)`, bounding the total-variation distance
/// between the `r`-clique count and `Poisson(μ)`.
pub fn tv_bound(n: u64, r: u64) -> Result<f64> {
    let mu = poisson_mu(n, r)?.exp();
    let var = variance_ratio_bound(n, r)?;
    Ok((-(-mu).exp_m1()).max(0.0) * var.full)
}

/// Everything above for one `(n, r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueRegime {
    pub n: u64,
    pub r: u64,
    pub mu_log: f64,
    pub a_s_log: Vec<OverlapTerm>,
    pub variance: VarianceBound,
    pub tv_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<UnimodalityProfile>,
}

pub fn clique_regime(n: u64, r: u64) -> Result<CliqueRegime> {
    let mu_log = poisson_mu(n, r)?;
    let profile = if r >= 3 && 4 * r <= n { Some(unimodality_profile(n, r)?) } else { None };
    Ok(CliqueRegime {
        n,
        r,
        mu_log,
        a_s_log: overlap_terms(n, r),
        variance: variance_ratio_bound(n, r)?,
        tv_bound: tv_bound(n, r)?,
        profile,
    })
}

/// `⌈c n^{1/2 − ε}⌉`
pub fn planted_size(n: usize, epsilon: f64, c: f64) -> usize {
    (c * (n as f64).powf(0.5 - epsilon)).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlantedRun {
    pub seed: u64,
    pub order1_deviation: f64,
    pub order2_deviation: f64,
    /// `C n^δ`
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlantedReport {
    pub n: usize,
    pub epsilon: f64,
    pub c: f64,
    pub delta: f64,
    pub certify_c: f64,
    pub clique_size: usize,
    /// Cliques are planted into `G(n, 1/2)` in place of conditioning on one.
    pub method: &'static str,
    pub runs: Vec<PlantedRun>,
    pub pass_rate: f64,
}

/// For each seed: `G(n, 1/2)` with a planted clique of size `⌈c n^{1/2−ε}⌉`,
/// certified at `p = 1/2`; passes when degree and co-degree deviations are at
/// most `C n^δ`. Requires `δ + ε > 1`.
pub fn planted_certification_experiment(
    n: usize,
    epsilon: f64,
    c: f64,
    delta: f64,
    certify_c: f64,
    seeds: &[u64],
) -> Result<PlantedReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if delta + epsilon <= 1.0 {
        return Err(invalid(format!(
            "the deviation level needs delta + epsilon > 1, got {delta} + {epsilon}"
        )));
    }
    if !(c >= 0.0) || !(certify_c > 0.0) || n < 2 {
        return Err(invalid(format!("need c >= 0, C > 0 and n >= 2, got ({c}, {certify_c}, {n})")));
    }
    let clique_size = planted_size(n, epsilon, c);
    if clique_size > n {
        return Err(invalid(format!("clique of size {clique_size} does not fit in {n} vertices")));
    }
    let threshold = certify_c * (n as f64).powf(delta);
    let config = CertifyConfig { p: Some(0.5), c: certify_c, max_order: 2, ..CertifyConfig::default() };
    let runs = exec::map_collect(0..seeds.len(), |i| -> Result<PlantedRun> {
        let seed = seeds[i];
        let g = gen_er(n, 0.5, seed)?;
        let g = plant_clique(&g, clique_size, rng::derive_seed(seed, 1))?;
        let cert = certify(&g, &CertifyConfig { seed, ..config })?;
        let dev = |k| cert.order(k).map_or(0.0, |o| o.max_deviation);
        let (d1, d2) = (dev(1), dev(2));
        Ok(PlantedRun { seed, order1_deviation: d1, order2_deviation: d2, threshold, pass: d1 <= threshold && d2 <= threshold })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let passed = runs.iter().filter(|r| r.pass).count();
    let pass_rate = if runs.is_empty() { 0.0 } else { passed as f64 / runs.len() as f64 };
    Ok(PlantedReport {
        n,
        epsilon,
        c,
        delta,
        certify_c,
        clique_size,
        method: "planted surrogate",
        runs,
        pass_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn binom(n: u64, k: u64) -> BigInt {
        BigInt::from(crate::combinatorics::binomial_big(n, k))
    }

    fn pow2(e: usize) -> BigInt {
        BigInt::one() << e
    }

    /// `2^{−C(r,2)} + Σ a_s` in exact rationals.
    fn full_sum_rational(n: u64, r: u64) -> BigRational {
        let pr = pairs(r as usize);
        let mut total = BigRational::new(BigInt::one(), pow2(pr));
        for s in 2..r {
            let num = binom(r, s) * binom(n - r, r - s);
            total += BigRational::new(num, pow2(pr - pairs(s as usize)));
        }
        total
    }

    #[test]
    fn mu_examples() {
        assert!((poisson_mu(10, 3).unwrap() - 15f64.ln()).abs() < 1e-12);
        assert!(poisson_mu(1_000_000, 501).unwrap() < 0.0);
        assert!((poisson_mu(50, 2).unwrap() - (1225.0f64 / 2.0).ln()).abs() < 1e-12);
        assert!(poisson_mu(5, 6).is_err());
        assert!(poisson_mu(5, 1).is_err());
    }

    #[test]
    fn mu_matches_big_integers() {
        for n in 2..=40u64 {
            for r in 2..=n {
                let exact = BigRational::new(binom(n, r), pow2(pairs(r as usize)));
                let want = exact.to_f64().unwrap();
                let got = poisson_mu(n, r).unwrap().exp();
                assert!(((got - want) / want).abs() < 1e-12, "({n},{r}) {got} vs {want}");
            }
        }
    }

    #[test]
    fn overlap_examples() {
        assert!((overlap_term(20, 4, 2).unwrap() - 22.5f64.ln()).abs() < 1e-12);
        assert!((overlap_term(100, 10, 9).unwrap() - (900.0f64 / 512.0).ln()).abs() < 1e-12);
        assert!(overlap_term(20, 4, 4).is_err());
        assert!(overlap_term(10, 8, 2).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert!((consecutive_ratio(100, 10, 5).unwrap() - 800.0 / 516.0).abs() < 1e-12);
        // (r−s)² 2^s / ((s+1)(n−2r+s+1)) = 64·4 / (3·83)
        assert!((consecutive_ratio(100, 10, 2).unwrap() - 256.0 / 249.0).abs() < 1e-12);
        assert!(consecutive_ratio(10, 8, 2).is_err());
    }

    #[test]
    fn profile_examples() {
        let p = unimodality_profile(1_000_000, 501).unwrap();
        assert!(p.decreasing_then_increasing, "{:?}", p.unexpected_violations);
        assert!(p.s_star as f64 >= 0.05 * (1e6f64).log2());
        let p = unimodality_profile(100, 6).unwrap();
        assert!(p.unexpected_violations.is_empty(), "{p:?}");
        let p = unimodality_profile(100, 3).unwrap();
        assert_eq!(p.a_s_log.len(), 1);
        assert!(unimodality_profile(100, 26).is_err());
    }

    #[test]
    fn variance_examples() {
        let v = variance_ratio_bound(20, 4).unwrap();
        let direct = 2f64.powi(-6) + 22.5 + 4.0 * 16.0 * 2f64.powi(-3);
        assert!(((v.full - direct) / direct).abs() < 1e-12);
        assert!(variance_ratio_bound(1_000_000, 501).unwrap().refined < 1e-6);
        let v = variance_ratio_bound(10, 2).unwrap();
        assert!((v.full - 0.5).abs() < 1e-15);
    }

    #[test]
    fn variance_matches_rationals() {
        for n in 4..=30u64 {
            for r in 2..=8u64.min(n) {
                let want = full_sum_rational(n, r).to_f64().unwrap();
                let got = variance_ratio_bound(n, r).unwrap().full;
                assert!(((got - want) / want).abs() < 1e-12, "({n},{r}) {got} vs {want}");
            }
        }
        assert!(full_sum_rational(20, 4) > BigRational::zero());
    }

    #[test]
    fn tv_examples() {
        assert!(tv_bound(1_000_000, 501).unwrap() < 1e-6);
        let t = tv_bound(30, 25).unwrap();
        assert!(t.is_finite() && t >= 0.0);
        let regime = clique_regime(1_000_000, 501).unwrap();
        assert!(regime.a_s_log.iter().all(|t| t.ln_a.is_finite()));
        assert!(serde_json::to_string(&regime).is_ok());
    }

    #[test]
    fn planted_examples() {
        // 4096^0.45 = 2^5.4 ≈ 42.2
        assert_eq!(planted_size(4096, 0.05, 1.0), 43);
        assert_eq!(planted_size(4096, 0.4, 0.0), 0);
        assert!(planted_certification_experiment(256, 0.3, 1.0, 0.6, 3.0, &[1]).is_err());
        let rep = planted_certification_experiment(256, 0.4, 1.0, 0.62, 3.0, &[1, 2]).unwrap();
        assert_eq!(rep.runs.len(), 2);
        assert_eq!(rep.method, "planted surrogate");
    }

    proptest! {
        #[test]
        fn ratio_identity(n in 40u64..5000, r in 4u64..10, s in 2u64..8) {
            prop_assume!(s + 2 <= r);
            let lhs = (overlap_term(n, r, s + 1).unwrap() - overlap_term(n, r, s).unwrap()).exp();
            let rho = consecutive_ratio(n, r, s).unwrap();
            prop_assert!(((lhs - rho) / rho).abs() < 1e-9);
        }

        #[test]
        fn tv_non_negative(n in 10u64..10_000, r in 2u64..10) {
            prop_assume!(r <= n);
            prop_assert!(tv_bound(n, r).unwrap() >= 0.0);
        }
    }
}
