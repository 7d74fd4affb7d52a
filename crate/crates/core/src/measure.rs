//! Seeded Monte Carlo and grid estimators for amoeba volume and for the
//! multiplicity-weighted volumes of amoeba and rolled coamoeba.
//!
//! Every sample index draws its own random stream ([`crate::rng`]), fiber
//! counts land in a vector indexed by sample, and reductions run in fixed
//! index order, so estimates are bit-identical for any worker count. Counts
//! come from the exact curve solver when `n = 1` and from the multistart
//! solver otherwise; non-regular queries are resampled with derived seeds
//! (at most 16 attempts per index) and the non-regular rate is reported.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibers::{curve_fiber_exact, FiberSolver, SolverConfig, Space};
use crate::laurent::PolySystem;
use crate::par;
use crate::polytope::{conj_degrees, Degrees};
use crate::rng::{mix, SampleRng};

const MAX_RESAMPLES: u64 = 16;
/// Estimates with a higher non-regular rate carry a warning flag.
const NON_REGULAR_WARN_RATE: f64 = 0.01;

/// A product of finite intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain(pub Vec<[f64; 2]>);

impl BoxDomain {
    /// Symmetric box `[-h, h]^dim`.
    pub fn symmetric(dim: usize, h: f64) -> Self {
        BoxDomain(vec![[-h, h]; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn volume(&self) -> f64 {
        self.0.iter().map(|[lo, hi]| (hi - lo).max(0.0)).product()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "box of dimension {} for a system in {} variables",
                self.dim(),
                dim
            )));
        }
        for [lo, hi] in &self.0 {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidInput(format!(
                    "invalid interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SampleRng) -> Vec<f64> {
        self.0
            .iter()
            .map(|[lo, hi]| rng.uniform(*lo, *hi))
            .collect()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|[lo, hi]| format!("[{lo},{hi}]"))
            .collect();
        parts.join("x")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateKind {
    #[serde(rename = "volA")]
    VolA,
    #[serde(rename = "multiVolA")]
    MultiVolA,
    #[serde(rename = "multiVolB")]
    MultiVolB,
}

/// A seeded volume estimate with its sampling metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VolumeEstimate {
    pub kind: EstimateKind,
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Human-readable integration domain.
    pub domain: String,
    /// True whenever the domain truncates an unbounded amoeba integral.
    pub truncated: bool,
    /// Fraction of query draws rejected as non-regular (and resampled).
    pub non_regular_rate: f64,
    /// Set when the non-regular rate exceeds 1%.
    pub warning: bool,
}

/// Where fiber counts come from: the exact curve solver when `n = 1`, the
/// multistart solver otherwise.
enum CountSource<'a> {
    Exact {
        sys: &'a PolySystem,
        cfg: SolverConfig,
    },
    Solver(FiberSolver<'a>),
}

impl<'a> CountSource<'a> {
    fn new(sys: &'a PolySystem, cfg: &SolverConfig) -> Result<Self> {
        if sys.n() == 1 {
            Ok(CountSource::Exact {
                sys,
                cfg: cfg.clone(),
            })
        } else {
            Ok(CountSource::Solver(FiberSolver::new(sys, cfg.clone())?))
        }
    }

    /// `Ok(Some(count))` at a regular query, `Ok(None)` when the query must
    /// be resampled.
    fn count(&self, space: Space, query: &[f64]) -> Result<Option<usize>> {
        let report = match self {
            CountSource::Exact { sys, cfg } => match curve_fiber_exact(sys, space, query, cfg) {
                Ok(r) => r,
                Err(Error::NonGenericQuery) => return Ok(None),
                Err(e) => return Err(e),
            },
            CountSource::Solver(solver) => match space {
                Space::Amoeba => solver.amoeba_fiber(query)?,
                Space::Coamoeba => solver.coamoeba_fiber(query)?,
            },
        };
        Ok(report.regular.then_some(report.count))
    }
}

struct SampledCounts {
    counts: Vec<u32>,
    non_regular_draws: u64,
    total_draws: u64,
}

/// One count per sample index, resampling non-regular queries with derived
/// seeds. The query domain is a box (angles use `[0, pi)^dim`).
fn sample_counts(
    source: &CountSource,
    space: Space,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
) -> Result<SampledCounts> {
    let raw: Vec<Result<(u32, u64)>> = par::map_indexed(samples as usize, |idx| {
        let mut rejected = 0u64;
        for attempt in 0..=MAX_RESAMPLES {
            let mut rng = SampleRng::new(mix(mix(seed, idx as u64), attempt));
            let query = domain.sample(&mut rng);
            match source.count(space, &query)? {
                Some(count) => return Ok((count as u32, rejected)),
                None => rejected += 1,
            }
        }
        // every attempt hit the non-regular set; report a zero count and
        // let the caller's warning flag surface it
        Ok((0, rejected))
    });
    let mut counts = Vec::with_capacity(samples as usize);
    let mut non_regular_draws = 0;
    let mut total_draws = 0;
    for item in raw {
        let (count, rejected) = item?;
        counts.push(count);
        non_regular_draws += rejected;
        total_draws += rejected + 1;
    }
    Ok(SampledCounts {
        counts,
        non_regular_draws,
        total_draws,
    })
}

/// Mean and standard error of the sample mean, accumulated in index order.
fn mean_and_se(counts: &[u32]) -> (f64, f64) {
    let n = counts.len() as f64;
    let sum: u64 = counts.iter().map(|&c| c as u64).sum();
    let mean = sum as f64 / n;
    if counts.len() < 2 {
        return (mean, 0.0);
    }
    let mut ss = 0.0;
    for &c in counts {
        let d = c as f64 - mean;
        ss += d * d;
    }
    let variance = ss / (n - 1.0);
    (mean, (variance / n).sqrt())
}

fn assemble_estimate(
    kind: EstimateKind,
    scale: f64,
    sampled: &SampledCounts,
    seed: u64,
    domain: String,
    truncated: bool,
) -> VolumeEstimate {
    let (mean, se) = mean_and_se(&sampled.counts);
    let non_regular_rate = if sampled.total_draws == 0 {
        0.0
    } else {
        sampled.non_regular_draws as f64 / sampled.total_draws as f64
    };
    VolumeEstimate {
        kind,
        value: scale * mean,
        std_error: scale * se,
        samples: sampled.counts.len() as u64,
        seed,
        domain,
        truncated,
        non_regular_rate,
        warning: non_regular_rate > NON_REGULAR_WARN_RATE,
    }
}

fn require_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    Ok(())
}

/// Multiplicity-weighted volume of the rolled coamoeba: `pi^{2n}` times the
/// mean fiber count over uniform arguments mod pi.
pub fn multivol_coamoeba(
    sys: &PolySystem,
    samples: u64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<VolumeEstimate> {
    require_samples(samples)?;
    let dim = sys.num_vars();
    let source = CountSource::new(sys, cfg)?;
    let domain = BoxDomain(vec![[0.0, PI]; dim]);
    let sampled = sample_counts(&source, Space::Coamoeba, &domain, samples, seed)?;
    Ok(assemble_estimate(
        EstimateKind::MultiVolB,
        PI.powi(dim as i32),
        &sampled,
        seed,
        format!("T_pi^{dim}"),
        false,
    ))
}

/// Multiplicity-weighted volume of the amoeba restricted to a box (a lower
/// bound for the full integral; the amoeba may extend beyond any box).
pub fn multivol_amoeba_box(
    sys: &PolySystem,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<VolumeEstimate> {
    require_samples(samples)?;
    domain.validate(sys.num_vars())?;
    let source = CountSource::new(sys, cfg)?;
    let sampled = sample_counts(&source, Space::Amoeba, domain, samples, seed)?;
    Ok(assemble_estimate(
        EstimateKind::MultiVolA,
        domain.volume(),
        &sampled,
        seed,
        domain.describe(),
        true,
    ))
}

/// Plain amoeba volume in a box by Monte Carlo membership sampling.
pub fn amoeba_volume_box(
    sys: &PolySystem,
    domain: &BoxDomain,
    samples: u64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<VolumeEstimate> {
    require_samples(samples)?;
    domain.validate(sys.num_vars())?;
    let source = CountSource::new(sys, cfg)?;
    let mut sampled = sample_counts(&source, Space::Amoeba, domain, samples, seed)?;
    for c in &mut sampled.counts {
        *c = (*c >= 1) as u32;
    }
    Ok(assemble_estimate(
        EstimateKind::VolA,
        domain.volume(),
        &sampled,
        seed,
        domain.describe(),
        true,
    ))
}

/// Plain amoeba volume in a box by cell counting on a grid of pixel
/// centers. Deterministic; the reported standard error is zero.
pub fn amoeba_volume_grid(
    sys: &PolySystem,
    domain: &BoxDomain,
    resolution: &[usize],
    cfg: &SolverConfig,
) -> Result<VolumeEstimate> {
    let dim = sys.num_vars();
    domain.validate(dim)?;
    if resolution.len() != dim || resolution.contains(&0) {
        return Err(Error::InvalidInput(
            "grid resolution must give a positive cell count per axis".into(),
        ));
    }
    let total: usize = resolution.iter().product();
    if total > 100_000_000 {
        return Err(Error::InvalidInput(format!(
            "grid of {total} cells exceeds the desk-scale guard"
        )));
    }
    if domain.volume() == 0.0 {
        return Ok(VolumeEstimate {
            kind: EstimateKind::VolA,
            value: 0.0,
            std_error: 0.0,
            samples: 0,
            seed: 0,
            domain: domain.describe(),
            truncated: true,
            non_regular_rate: 0.0,
            warning: false,
        });
    }
    let source = CountSource::new(sys, cfg)?;
    let cell_volume: f64 = domain
        .0
        .iter()
        .zip(resolution)
        .map(|([lo, hi], r)| (hi - lo) / *r as f64)
        .product();

    let hits: Vec<Result<u32>> = par::map_indexed(total, |flat| {
        let mut idx = flat;
        let mut query = Vec::with_capacity(dim);
        for (a, r) in resolution.iter().enumerate() {
            let k = idx % r;
            idx /= r;
            let [lo, hi] = domain.0[a];
            query.push(lo + (k as f64 + 0.5) * (hi - lo) / *r as f64);
        }
        // membership only: any solution counts, regular or not
        let count = match &source {
            CountSource::Exact { sys, cfg } => {
                match curve_fiber_exact(sys, Space::Amoeba, &query, cfg) {
                    Ok(r) => r.count,
                    Err(Error::NonGenericQuery) => 0,
                    Err(e) => return Err(e),
                }
            }
            CountSource::Solver(solver) => solver.amoeba_fiber(&query)?.count,
        };
        Ok((count >= 1) as u32)
    });
    let mut inside: u64 = 0;
    for h in hits {
        inside += h? as u64;
    }
    Ok(VolumeEstimate {
        kind: EstimateKind::VolA,
        value: inside as f64 * cell_volume,
        std_error: 0.0,
        samples: total as u64,
        seed: 0,
        domain: format!(
            "{} grid {}",
            domain.describe(),
            resolution
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("x")
        ),
        truncated: true,
        non_regular_rate: 0.0,
        warning: false,
    })
}

/// Result of the extremal-volume test `MultiVol(coamoeba) ~ pi^{2n} alpha`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiHarnackReport {
    pub is_multiharnack: bool,
    pub estimate: VolumeEstimate,
    pub target: f64,
    pub degrees: Degrees,
    pub tol: f64,
}

/// Check whether the system attains the extremal multiplicity-weighted
/// volume `pi^{2n} * alpha` within a relative tolerance (default 0.05),
/// using the coamoeba side of the volume identity.
pub fn multiharnack_check(
    sys: &PolySystem,
    tol: f64,
    samples: u64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<MultiHarnackReport> {
    let degrees = conj_degrees(sys)?;
    if degrees.alpha == 0 {
        return Err(Error::InvalidInput(
            "multiHarnack test needs a system with positive conj-degree".into(),
        ));
    }
    let estimate = multivol_coamoeba(sys, samples, seed, cfg)?;
    let target = PI.powi(sys.num_vars() as i32) * degrees.alpha as f64;
    let is_multiharnack = (estimate.value - target).abs() <= tol * target;
    Ok(MultiHarnackReport {
        is_multiharnack,
        estimate,
        target,
        degrees,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{parse_system, ParseOptions};

    fn line() -> PolySystem {
        parse_system("vars: x, y\nf1: 1 + x + y\n", &ParseOptions::default()).unwrap()
    }

    #[test]
    fn zero_samples_is_an_error() {
        let sys = line();
        assert!(matches!(
            multivol_coamoeba(&sys, 0, 1, &SolverConfig::default()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn empty_box_gives_zero() {
        let sys = line();
        let domain = BoxDomain(vec![[1.0, 1.0], [-2.0, 2.0]]);
        let est = amoeba_volume_box(&sys, &domain, 100, 7, &SolverConfig::default()).unwrap();
        assert_eq!(est.value, 0.0);
        let est = amoeba_volume_grid(&sys, &domain, &[10, 10], &SolverConfig::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn coamoeba_multivol_of_line_small_run() {
        // MultiVol(B_pi) = pi^2 for the line; a.e. fiber count is exactly 1
        let sys = line();
        let est = multivol_coamoeba(&sys, 400, 11, &SolverConfig::default()).unwrap();
        let target = PI * PI;
        assert!(
            (est.value - target).abs() <= (3.0 * est.std_error).max(0.02 * target),
            "value {} target {target} se {}",
            est.value,
            est.std_error
        );
        assert!(!est.truncated);
    }

    #[test]
    fn amoeba_multivol_of_line_small_run() {
        let sys = line();
        let domain = BoxDomain::symmetric(2, 10.0);
        let est = multivol_amoeba_box(&sys, &domain, 4000, 3, &SolverConfig::default()).unwrap();
        let target = PI * PI;
        assert!(
            (est.value - target).abs() <= 4.0 * est.std_error,
            "value {} target {target} se {}",
            est.value,
            est.std_error
        );
        assert!(est.truncated);
    }

    #[test]
    fn estimates_are_bit_deterministic() {
        let sys = line();
        let a = multivol_coamoeba(&sys, 200, 5, &SolverConfig::default()).unwrap();
        let b = multivol_coamoeba(&sys, 200, 5, &SolverConfig::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn multiharnack_line_is_true() {
        let sys = line();
        let report = multiharnack_check(&sys, 0.05, 600, 2, &SolverConfig::default()).unwrap();
        assert!(report.is_multiharnack);
        assert_eq!(report.degrees.alpha, 1);
    }
}
