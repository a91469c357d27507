//! Random geometric graph numerics: the exact edge threshold, its Gaussian
//! asymptotics, the bivariate normal tail bounds and Monte Carlo validators.

use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::rng;
pub use crate::special::{normal_cdf, normal_quantile};
use crate::special::{beta_quantile, beta_reg};

const MC_BATCH: usize = 1 << 14;

/// Inner-product threshold giving marginal edge probability `p` in dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdSpec {
    pub p: f64,
    pub d: usize,
    pub t: f64,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(invalid(format!("edge probability must lie in (0, 1/2], got {p}")));
    }
    Ok(())
}

/// `t` with `P(<X, Y> >= t) = p` for independent uniform points on the sphere
/// in `R^d`. Uses `T² ~ Beta(1/2, (d-1)/2)` for one coordinate `T` of a
/// uniform point together with the symmetry of `T`.
pub fn threshold_tpd(p: f64, d: usize) -> Result<ThresholdSpec> {
    check_p(p)?;
    if d < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {d}")));
    }
    let t = if p == 0.5 { 0.0 } else { beta_quantile(1.0 - 2.0 * p, 0.5, (d as f64 - 1.0) / 2.0)?.sqrt() };
    Ok(ThresholdSpec { p, d, t })
}

/// `P(<X, Y> >= t)` for `t` in `[0, 1]`.
pub fn edge_probability(t: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) || d < 2 {
        return Err(invalid(format!("edge_probability needs t in [0, 1] and d >= 2, got ({t}, {d})")));
    }
    Ok(0.5 * (1.0 - beta_reg(0.5, (d as f64 - 1.0) / 2.0, t * t)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DgluCheck {
    pub p: f64,
    pub d: usize,
    pub kappa: f64,
    /// `| t √d − Φ⁻¹(1−p) |`
    pub lhs: f64,
    /// `κ √(ln d / d)`
    pub rhs: f64,
    pub holds: bool,
    /// Smallest `κ` for which the inequality holds at this `(p, d)`.
    pub kappa_min: f64,
}

/// Compares the exact threshold with its Gaussian approximation
/// `| t √d − Φ⁻¹(1−p) | <= κ √(ln d / d)`, valid for `d >= max(4/p², 27)`.
pub fn dglu_check(p: f64, d: usize, kappa: f64) -> Result<DgluCheck> {
    check_p(p)?;
    if !(kappa >= 0.0) {
        return Err(invalid(format!("kappa must be non-negative, got {kappa}")));
    }
    let df = d as f64;
    let min_d = (4.0 / (p * p)).max(27.0);
    if df < min_d {
        return Err(Error::PreconditionFailed {
            index: None,
            reason: format!("dimension {d} is below max(4/p^2, 27) = {min_d:.3}"),
        });
    }
    let spec = threshold_tpd(p, d)?;
    let z = if p == 0.5 { 0.0 } else { normal_quantile(1.0 - p)? };
    let lhs = (spec.t * df.sqrt() - z).abs();
    let scale = (df.ln() / df).sqrt();
    let rhs = kappa * scale;
    Ok(DgluCheck { p, d, kappa, lhs, rhs, holds: lhs <= rhs, kappa_min: lhs / scale })
}

/// `κ [ √(max(ln n, ln d) / d) + 1/n² ]`.
pub fn tau_n(n: f64, d: f64, kappa: f64) -> Result<f64> {
    if !(n >= 2.0 && d >= 2.0) || !n.is_finite() || !d.is_finite() || !(kappa > 0.0) {
        return Err(invalid(format!("tau_n needs n, d >= 2 and kappa > 0, got ({n}, {d}, {kappa})")));
    }
    Ok(kappa * ((n.ln().max(d.ln()) / d).sqrt() + 1.0 / (n * n)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBounds {
    pub lower: f64,
    pub upper: f64,
    /// `√((1−ρ)/(1+ρ))`
    pub theta: f64,
}

fn theta(rho: f64) -> f64 {
    ((1.0 - rho) / (1.0 + rho)).sqrt()
}

/// Bounds on `P(Z₁ >= h, Z₂ >= h)` for a standard bivariate normal with
/// correlation `0 <= ρ < 1`: `A <= P <= (1+ρ) A` where `A = Φ(−h) Φ(−θh)`.
pub fn willink_bounds(h: f64, rho: f64) -> Result<TailBounds> {
    if !(h > 0.0) || !h.is_finite() || !(0.0..1.0).contains(&rho) {
        return Err(invalid(format!("willink_bounds needs h > 0 and 0 <= rho < 1, got ({h}, {rho})")));
    }
    let theta = theta(rho);
    let a = normal_cdf(-h) * normal_cdf(-theta * h);
    Ok(TailBounds { lower: a, upper: (1.0 + rho) * a, theta })
}

/// `P(Z₁ >= h, Z₂ >= h)` at correlation `ρ` from the tail at the reflected
/// point: `2 Φ(−h) Φ(−θh) − P(θh, θh, −ρ)`.
pub fn reflected_tail(h: f64, rho: f64, tail_at_reflection: f64) -> Result<f64> {
    if !h.is_finite() || !(rho > -1.0 && rho < 1.0) {
        return Err(invalid(format!("reflected_tail needs finite h and |rho| < 1, got ({h}, {rho})")));
    }
    let theta = theta(rho);
    Ok(2.0 * normal_cdf(-h) * normal_cdf(-theta * h) - tail_at_reflection)
}

/// Bounds for `−1 < ρ <= 0`, from [`willink_bounds`] at `(θh, −ρ)` pushed
/// through [`reflected_tail`]: `(1+ρ) A <= P <= A`.
pub fn negative_rho_bounds(h: f64, rho: f64) -> Result<TailBounds> {
    if !(h > 0.0) || !h.is_finite() || !(rho > -1.0 && rho <= 0.0) {
        return Err(invalid(format!("negative_rho_bounds needs h > 0 and -1 < rho <= 0, got ({h}, {rho})")));
    }
    let theta = theta(rho);
    let reflected = willink_bounds(theta * h, -rho)?;
    Ok(TailBounds {
        lower: reflected_tail(h, rho, reflected.upper)?,
        upper: reflected_tail(h, rho, reflected.lower)?,
        theta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    fn from_hits(hits: u64, samples: usize) -> Self {
        let q = hits as f64 / samples as f64;
        McEstimate { estimate: q, stderr: (q * (1.0 - q) / samples as f64).sqrt(), samples }
    }

    /// Whether `value` lies within `k` standard errors, with a floor for
    /// estimates of exactly 0 or 1.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        let floor = 1.0 / self.samples as f64;
        (self.estimate - value).abs() <= k * self.stderr.max(floor)
    }
}

/// Counts successes of `trial` over `samples` draws split into fixed-size
/// batches, each with its own RNG stream.
fn mc_hits<F>(samples: usize, seed: u64, trial: F) -> u64
where
    F: Fn(&mut rng::Rng) -> bool + Sync,
{
    let batches = exec::chunks(samples, MC_BATCH);
    exec::map_sum(0..batches.len(), |b| {
        let mut r = rng::stream(seed, b as u64);
        batches[b].clone().filter(|_| trial(&mut r)).count() as u128
    }) as u64
}

/// Monte Carlo estimate of `P(Z >= h, ρZ + √(1−ρ²) Z' >= h)`.
pub fn bivariate_tail_mc(h: f64, rho: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples < 1000 {
        return Err(invalid(format!("bivariate_tail_mc needs at least 1000 samples, got {samples}")));
    }
    if !h.is_finite() || !(rho > -1.0 && rho < 1.0) {
        return Err(invalid(format!("bivariate_tail_mc needs finite h and |rho| < 1, got ({h}, {rho})")));
    }
    let s = (1.0 - rho * rho).sqrt();
    let hits = mc_hits(samples, seed, |r| {
        let z: f64 = r.sample(StandardNormal);
        let w: f64 = r.sample(StandardNormal);
        z >= h && rho * z + s * w >= h
    });
    Ok(McEstimate::from_hits(hits, samples))
}

/// Monte Carlo edge probability for two independent uniform points on the
/// sphere at threshold `t`, sampling full `d`-dimensional Gaussian vectors.
pub fn edge_probability_mc(t: f64, d: usize, pairs: usize, seed: u64) -> Result<McEstimate> {
    if d < 2 || pairs == 0 {
        return Err(invalid(format!("edge_probability_mc needs d >= 2 and pairs > 0, got ({d}, {pairs})")));
    }
    let hits = mc_hits(pairs, seed, |r| {
        let (mut xx, mut yy, mut xy) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..d {
            let x: f64 = r.sample(StandardNormal);
            let y: f64 = r.sample(StandardNormal);
            xx += x * x;
            yy += y * y;
            xy += x * y;
        }
        xy >= t * (xx * yy).sqrt()
    });
    Ok(McEstimate::from_hits(hits, pairs))
}

pub const NORM_CHECK_EPSILON: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormCheck {
    pub d: usize,
    pub samples: usize,
    pub epsilon: f64,
    /// Fraction of samples with `| ‖Z‖ − √d | > ε + 1/(2√d)`.
    pub failure_rate: f64,
    /// `2 e^{−ε²/2}` plus five Monte Carlo standard errors.
    pub allowed: f64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Empirical check of the Gaussian norm concentration bound at `ε = 3`.
/// `‖Z‖²` is drawn directly from its chi-squared law.
pub fn gaussian_norm_check(d: usize, samples: usize, seed: u64) -> Result<NormCheck> {
    if d < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {d}")));
    }
    let eps = NORM_CHECK_EPSILON;
    let bound = 2.0 * (-eps * eps / 2.0).exp();
    if samples == 0 {
        return Ok(NormCheck {
            d,
            samples,
            epsilon: eps,
            failure_rate: 0.0,
            allowed: bound,
            holds: true,
            warning: Some("no samples drawn; check is vacuous".into()),
        });
    }
    let root = (d as f64).sqrt();
    let radius = eps + 1.0 / (2.0 * root);
    let chi = ChiSquared::new(d as f64).map_err(|e| invalid(e.to_string()))?;
    let failures = mc_hits(samples, seed, |r| (chi.sample(r).sqrt() - root).abs() > radius);
    let failure_rate = failures as f64 / samples as f64;
    let allowed = bound + 5.0 * (bound * (1.0 - bound) / samples as f64).sqrt();
    let holds = failure_rate <= allowed;
    let warning = (!holds).then(|| format!("failure rate {failure_rate} exceeds {allowed} at d = {d}"));
    Ok(NormCheck { d, samples, epsilon: eps, failure_rate, allowed, holds, warning })
}
