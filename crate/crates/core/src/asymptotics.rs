//! Finite-depth diagnostics for the asymptotic pressure: last-row ratios,
//! the `log s` sandwich, limit estimates and sweeps over the number of
//! generators.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interaction::InteractionSpec;
use crate::numeric::ratio_to_f64;
use crate::restriction::{classify, fibonacci_lambda, level_counts, spectral, RestrictionMatrix, SpectralInfo};
use crate::transfer::{pressure_series, Backend, Mode, PressureSeries};

/// `L[n] / Δ[n]` against its limit `(λ - 1) / λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub n: usize,
    pub ratio: f64,
    pub target: f64,
    pub gap: f64,
}

/// Last-row ratios for `n = 1..=n_max`, from exact counts.
pub fn lemma_ratio_check(r: &RestrictionMatrix, n_max: usize) -> Result<Vec<RatioPoint>> {
    let info = spectral(r)?;
    let target = (info.lambda - 1.0) / info.lambda;
    let counts = level_counts(r, n_max);
    Ok((1..=n_max)
        .map(|n| {
            let ratio = ratio_to_f64(&counts.l[n], &counts.delta[n]);
            RatioPoint { n, ratio, target, gap: (ratio - target).abs() }
        })
        .collect())
}

/// Splits ratio points into the subsequences `n ≡ c (mod p)`, `c = 0..p`.
pub fn residue_class_subsequences(points: &[RatioPoint], period: usize) -> Vec<Vec<RatioPoint>> {
    let mut classes = vec![Vec::new(); period];
    for p in points {
        classes[p.n % period].push(*p);
    }
    classes
}

/// `log s · (λ - 1)/λ <= lim P_n <= log s`, kept as the pair `(log s, (λ-1)/λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremBounds {
    pub log_s: f64,
    pub lambda: f64,
    /// `(λ - 1) / λ`, clamped at 0 for `λ <= 1`.
    pub factor: f64,
    pub lower: f64,
    pub upper: f64,
    /// `λ <= 1`: the lower bound carries no information.
    pub degenerate: bool,
}

/// Bounds on the limiting pressure from `log s` and the Perron value `λ`.
///
/// When `log s < 0` the product `log s · factor` exceeds `log s`; the lower
/// bound is then reported as `log s` so that `lower <= upper` holds.
pub fn theorem_bounds(spec: &InteractionSpec, lambda: f64) -> TheoremBounds {
    bounds_from(spec.log_s(), lambda)
}

pub fn bounds_from(log_s: f64, lambda: f64) -> TheoremBounds {
    let degenerate = lambda <= 1.0;
    let factor = if degenerate { 0.0 } else { (lambda - 1.0) / lambda };
    let lower = (log_s * factor).min(log_s);
    TheoremBounds { log_s, lambda, factor, lower, upper: log_s, degenerate }
}

/// Last computed `P_n` with a Cauchy-style convergence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub estimate: f64,
    pub n_used: usize,
    pub last_increment: f64,
    pub converged: bool,
}

/// `P_{n_max}` as the estimate; converged iff the last three increments
/// `|P_n - P_{n-1}|` (or both, for a three-record series) are `<= tau`.
pub fn estimate_limit_pressure(series: &PressureSeries, tau: f64) -> Result<LimitEstimate> {
    let recs = &series.records;
    if recs.len() < 3 {
        return Err(Error::InvalidParameter("limit estimate needs at least 3 records".into()));
    }
    let increments: Vec<f64> = recs.windows(2).map(|w| (w[1].pressure - w[0].pressure).abs()).collect();
    let tail = &increments[increments.len().saturating_sub(3)..];
    let last = recs.last().unwrap();
    Ok(LimitEstimate {
        estimate: last.pressure,
        n_used: last.n,
        last_increment: *increments.last().unwrap(),
        converged: tail.iter().all(|&inc| inc <= tau),
    })
}

/// A pressure series with its bounds and limit estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesAnalysis {
    pub series: PressureSeries,
    /// Present when `R` is irreducible.
    pub spectral: Option<SpectralInfo>,
    pub bounds: Option<TheoremBounds>,
    /// Present when the series has at least 3 records.
    pub limit: Option<LimitEstimate>,
}

pub fn analyze_series(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n_max: usize,
    mode: Mode,
    backend: Backend,
    tau: f64,
) -> Result<SeriesAnalysis> {
    let series = pressure_series(r, spec, n_max, mode, backend)?;
    let info = if classify(r).is_irreducible() { Some(spectral(r)?) } else { None };
    let bounds = info.as_ref().map(|s| theorem_bounds(spec, s.lambda));
    let limit = if series.records.len() >= 3 { Some(estimate_limit_pressure(&series, tau)?) } else { None };
    Ok(SeriesAnalysis { series, spectral: info, bounds, limit })
}

/// How `r_k` is chosen along a Fibonacci family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RRule {
    Fixed(usize),
    /// `r_k = k - c`
    KMinus(usize),
}

impl RRule {
    pub fn r_for(&self, k: usize) -> i64 {
        match *self {
            RRule::Fixed(r) => r as i64,
            RRule::KMinus(c) => k as i64 - c as i64,
        }
    }
}

/// A sequence of restriction matrices indexed by `k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Full { k_min: usize, k_max: usize },
    Fibonacci { k_min: usize, k_max: usize, rule: RRule },
    /// `period` blocks of `b` generators, `b` ranging over the given bounds.
    BlockCyclic { period: usize, b_min: usize, b_max: usize },
    Explicit(Vec<RestrictionMatrix>),
}

impl Family {
    /// Members in ascending `k`, each with its construction result.
    pub fn members(&self) -> Vec<(usize, Result<RestrictionMatrix>)> {
        match self {
            Family::Full { k_min, k_max } => (*k_min..=*k_max).map(|k| (k, RestrictionMatrix::full(k))).collect(),
            Family::Fibonacci { k_min, k_max, rule } => (*k_min..=*k_max)
                .map(|k| (k, RestrictionMatrix::generalized_fibonacci(k, rule.r_for(k))))
                .collect(),
            Family::BlockCyclic { period, b_min, b_max } => (*b_min..=*b_max)
                .map(|b| (period * b, RestrictionMatrix::block_cyclic(*period, b)))
                .collect(),
            Family::Explicit(list) => list.iter().map(|r| (r.k(), Ok(r.clone()))).collect(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Family::Full { k_min, k_max } => format!("full k={}..{}", k_min, k_max),
            Family::Fibonacci { k_min, k_max, rule } => match rule {
                RRule::Fixed(r) => format!("fibonacci k={}..{} r={}", k_min, k_max, r),
                RRule::KMinus(c) => format!("fibonacci k={}..{} r=k-{}", k_min, k_max, c),
            },
            Family::BlockCyclic { period, b_min, b_max } => {
                format!("block-cyclic period={} block={}..{}", period, b_min, b_max)
            }
            Family::Explicit(list) => format!("explicit ({} matrices)", list.len()),
        }
    }

    /// Closed-form Perron value where the family has one.
    pub fn closed_form_lambda(&self, k: usize) -> Option<f64> {
        match self {
            Family::Full { .. } => Some(k as f64),
            Family::Fibonacci { rule, .. } => Some(fibonacci_lambda(k, rule.r_for(k).max(0) as usize)),
            Family::BlockCyclic { period, .. } => Some((k / period) as f64),
            Family::Explicit(_) => None,
        }
    }
}

/// One `k` of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub k: usize,
    pub n_max: usize,
    pub outcome: std::result::Result<SweepValues, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepValues {
    pub lambda: f64,
    pub bounds: TheoremBounds,
    pub log_z: f64,
    pub limit: LimitEstimate,
    /// `upper - estimate`
    pub gap: f64,
    /// `log s / λ`, the width of the sandwich.
    pub sandwich_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub family: String,
    pub log_s: f64,
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn successes(&self) -> impl Iterator<Item = (usize, &SweepValues)> {
        self.entries.iter().filter_map(|e| e.outcome.as_ref().ok().map(|v| (e.k, v)))
    }
}

/// Parameters shared by every entry of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub n_max: usize,
    pub tau: f64,
    pub mode: Mode,
    pub backend: Backend,
}

fn sweep_one(r: &RestrictionMatrix, spec: &InteractionSpec, p: &SweepParams) -> Result<SweepValues> {
    let a = analyze_series(r, spec, p.n_max, p.mode, p.backend, p.tau)?;
    let info = a.spectral.ok_or_else(|| Error::Hypothesis(format!("restriction matrix {:?} is reducible", r)))?;
    let bounds = a.bounds.expect("bounds exist with spectral data");
    let limit = a.limit.ok_or_else(|| Error::InvalidParameter("sweep needs n_max >= 2".into()))?;
    Ok(SweepValues {
        lambda: info.lambda,
        bounds,
        log_z: a.series.last().log_z,
        limit,
        gap: bounds.upper - limit.estimate,
        sandwich_width: spec.log_s() / info.lambda,
    })
}

/// Limit estimates and bounds for each member of `family`. Entries are
/// computed in parallel and returned in family order; failures are recorded
/// per entry.
pub fn sweep_k(family: &Family, spec: &InteractionSpec, params: &SweepParams) -> SweepResult {
    let members = family.members();
    let entries = members
        .par_iter()
        .map(|(k, r)| SweepEntry {
            k: *k,
            n_max: params.n_max,
            outcome: r
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|r| sweep_one(r, spec, params).map_err(|e| e.to_string())),
        })
        .collect();
    SweepResult { family: family.describe(), log_s: spec.log_s(), entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{full_shift, golden_mean, integer_spec};

    #[test]
    fn ratio_examples() {
        let pts = lemma_ratio_check(&RestrictionMatrix::full(2).unwrap(), 20).unwrap();
        let p20 = pts[19];
        assert_eq!(p20.n, 20);
        assert!((p20.ratio - 2f64.powi(20) / (2f64.powi(21) - 1.0)).abs() < 1e-15);
        assert!(p20.gap < 1e-6);

        let fib = RestrictionMatrix::generalized_fibonacci(2, 1).unwrap();
        let pts = lemma_ratio_check(&fib, 40).unwrap();
        assert!((pts[0].target - 0.381_966_0).abs() < 1e-7);
        assert!(pts[39].gap < 1e-6);

        let cyc = RestrictionMatrix::cycle(3).unwrap();
        let pts = lemma_ratio_check(&cyc, 30).unwrap();
        assert!(pts.iter().all(|p| p.target.abs() < 1e-12));
        for p in &pts {
            assert!((p.ratio - 3.0 / (1.0 + 3.0 * p.n as f64)).abs() < 1e-15);
        }
        assert!(lemma_ratio_check(&RestrictionMatrix::from_rows(&[vec![1u8, 1], vec![0, 1]]).unwrap(), 5).is_err());
    }

    #[test]
    fn bounds_examples() {
        let b = theorem_bounds(&golden_mean(), 4.0);
        assert!((b.lower - 0.519_860).abs() < 1e-6);
        assert!((b.upper - 0.693_147).abs() < 1e-6);
        let b = theorem_bounds(&full_shift(3).unwrap(), 5.0);
        assert!((b.lower - 3f64.ln() * 0.8).abs() < 1e-15);
        let s3 = integer_spec(&[&[1, 2], &[1, 0]], &[1, 1]).unwrap();
        let b = theorem_bounds(&s3, 2.0);
        assert!((b.lower - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((b.upper - 3f64.ln()).abs() < 1e-15);
        let b = bounds_from(2f64.ln(), 1.0);
        assert!(b.degenerate);
        assert_eq!(b.lower, 0.0);
        let b = bounds_from(-1.0, 3.0);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn limit_estimate_examples() {
        let r = RestrictionMatrix::full(2).unwrap();
        let s = pressure_series(&r, &full_shift(2).unwrap(), 2, Mode::Extendable, Backend::Log).unwrap();
        assert!(estimate_limit_pressure(&s, 0.0).unwrap().converged);

        let g = golden_mean();
        let s = pressure_series(&r, &g, 15, Mode::Extendable, Backend::Log).unwrap();
        let est = estimate_limit_pressure(&s, 1e-3).unwrap();
        let b = theorem_bounds(&g, 2.0);
        assert!(est.estimate >= b.lower - 1e-3 && est.estimate <= b.upper + 1e-3);
        assert_eq!(est.n_used, 15);

        let s = pressure_series(&r, &g, 2, Mode::Extendable, Backend::Log).unwrap();
        assert!(!estimate_limit_pressure(&s, 1e-9).unwrap().converged);
        let s = pressure_series(&r, &g, 1, Mode::Extendable, Backend::Log).unwrap();
        assert!(estimate_limit_pressure(&s, 1e-9).is_err());
    }

    #[test]
    fn sweep_full_shift_constant() {
        let params = SweepParams { n_max: 6, tau: 1e-3, mode: Mode::Extendable, backend: Backend::Log };
        let res = sweep_k(&Family::Full { k_min: 1, k_max: 5 }, &full_shift(2).unwrap(), &params);
        for (_, v) in res.successes() {
            assert!((v.limit.estimate - 2f64.ln()).abs() < 1e-12);
        }
        assert_eq!(res.successes().count(), 5);
    }

    #[test]
    fn sweep_records_failures() {
        let params = SweepParams { n_max: 4, tau: 1e-3, mode: Mode::Extendable, backend: Backend::Log };
        let fam = Family::Explicit(vec![
            RestrictionMatrix::full(2).unwrap(),
            RestrictionMatrix::from_rows(&[vec![1u8, 1], vec![0, 1]]).unwrap(),
        ]);
        let res = sweep_k(&fam, &golden_mean(), &params);
        assert!(res.entries[0].outcome.is_ok());
        assert!(res.entries[1].outcome.as_ref().unwrap_err().contains("reducible"));
        let fam = Family::Fibonacci { k_min: 1, k_max: 3, rule: RRule::Fixed(1) };
        let res = sweep_k(&fam, &golden_mean(), &params);
        assert!(res.entries[0].outcome.is_err());
        assert!(res.entries[1].outcome.is_ok());
    }

    #[test]
    fn bounded_lambda_family_visible() {
        let params = SweepParams { n_max: 8, tau: 1e-3, mode: Mode::Extendable, backend: Backend::Log };
        let fam = Family::Explicit((2..=5).map(|k| RestrictionMatrix::cycle(k).unwrap()).collect());
        let res = sweep_k(&fam, &golden_mean(), &params);
        for (_, v) in res.successes() {
            assert!((v.lambda - 1.0).abs() < 1e-12);
            assert!(v.bounds.degenerate);
        }
    }

    #[test]
    fn family_closed_forms() {
        let fam = Family::Fibonacci { k_min: 2, k_max: 8, rule: RRule::KMinus(1) };
        for (k, r) in fam.members() {
            let lam = spectral(&r.unwrap()).unwrap().lambda;
            let expect = (1.0 + ((4 * k - 3) as f64).sqrt()) / 2.0;
            assert!((lam - expect).abs() < 1e-10);
            assert!((fam.closed_form_lambda(k).unwrap() - expect).abs() < 1e-12);
        }
        let bc = Family::BlockCyclic { period: 2, b_min: 1, b_max: 4 };
        for (k, r) in bc.members() {
            let info = spectral(&r.unwrap()).unwrap();
            assert!((info.lambda - bc.closed_form_lambda(k).unwrap()).abs() < 1e-10);
        }
    }
}
