//! Fibers of the log-modulus and argument maps restricted to the variety.
//!
//! [`FiberSolver`] runs multistart Newton in the appropriate chart and
//! classifies every solution (residual, smallest singular value of the
//! fiber Jacobian, orientation sign, critical rank). For curves (`n = 1`)
//! the resultant-based [`curve_fiber_exact`] solves the enclosing complex
//! intersection exactly and is used as the ground-truth oracle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LogPolarPoint, PolySystem};
use crate::par;
use crate::polytope::{conj_degrees, Degrees};
use crate::rng::{mix, SampleRng};

mod newton;
mod oracle;
mod tangent;

pub use oracle::{curve_conj_intersections, curve_fiber_exact};
pub use tangent::{
    critical_rank, omega_residual, omega_residual_of_frame, orientation_sign, tangent_basis,
};

use newton::Chart;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Knobs for the multistart Newton solvers. All fields have defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SolverConfig {
    /// Acceptance threshold on the scaled residual.
    pub tol: f64,
    /// A solution with a smaller scaled fiber-Jacobian singular value is
    /// classified non-regular.
    pub regularity_threshold: f64,
    /// Sup-distance below which two solutions are identified.
    pub dedupe_tol: f64,
    /// Seeded random starts (per sign sector for coamoeba fibers).
    pub random_starts: usize,
    /// Half-width of the log-modulus search box for coamoeba fibers.
    pub search_box: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            regularity_threshold: 1e-8,
            dedupe_tol: 1e-7,
            random_starts: 32,
            search_box: 12.0,
            max_iters: 50,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Amoeba,
    Coamoeba,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::Amoeba => "amoeba",
            Space::Coamoeba => "coamoeba",
        })
    }
}

/// One solution of a fiber, with its diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiberSolution {
    pub point: LogPolarPoint,
    /// Scaled residual of the defining system at the point.
    pub residual: f64,
    /// Smallest singular value of the scaled `2n x 2n` real fiber Jacobian.
    pub min_singular: f64,
    /// Orientation sign of the covering map; `0` at critical points.
    pub sign: i8,
    /// Critical rank: `0` at regular points, up to `n` on the critical locus.
    pub rank: usize,
}

/// All solutions of one fiber query.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiberReport {
    pub space: Space,
    /// `q` for amoeba fibers, `p mod pi` for coamoeba fibers.
    pub query: Vec<f64>,
    pub solutions: Vec<FiberSolution>,
    pub count: usize,
    pub signed_count: i64,
    /// True when every solution is regular (safely away from the critical
    /// locus); bound and parity statements apply only to regular fibers.
    pub regular: bool,
    /// True when the report was produced by the exact curve solver.
    pub exhaustive: bool,
}

impl FiberReport {
    fn assemble(
        space: Space,
        query: Vec<f64>,
        mut solutions: Vec<FiberSolution>,
        exhaustive: bool,
        cfg: &SolverConfig,
    ) -> FiberReport {
        solutions.sort_by(|a, b| {
            point_key(&a.point)
                .partial_cmp(&point_key(&b.point))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let count = solutions.len();
        let signed_count = solutions.iter().map(|s| s.sign as i64).sum();
        let regular = solutions
            .iter()
            .all(|s| s.min_singular > cfg.regularity_threshold && s.sign != 0);
        FiberReport {
            space,
            query,
            solutions,
            count,
            signed_count,
            regular,
            exhaustive,
        }
    }
}

fn point_key(p: &LogPolarPoint) -> Vec<f64> {
    p.q().iter().chain(p.theta()).copied().collect()
}

/// Sup-distance of two points, arguments compared on the circle.
fn point_distance(a: &LogPolarPoint, b: &LogPolarPoint) -> f64 {
    let mut d: f64 = 0.0;
    for (x, y) in a.q().iter().zip(b.q()) {
        d = d.max((x - y).abs());
    }
    for (x, y) in a.theta().iter().zip(b.theta()) {
        let raw = (x - y).abs();
        d = d.max(raw.min(TWO_PI - raw));
    }
    d
}

/// Classify a solved point: residual, fiber-Jacobian conditioning, sign and
/// rank. A rank-deficient system Jacobian degrades to `sign 0, rank n`
/// rather than failing the whole fiber.
pub(crate) fn classify_solution(
    sys: &PolySystem,
    point: LogPolarPoint,
    cfg: &SolverConfig,
) -> Result<FiberSolution> {
    let residual = sys.scaled_residual(&point)?;
    let n = sys.n();
    let dim = sys.num_vars();
    let jac_w = sys.jacobian_w(&point)?;
    let mut stacked = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for j in 0..n {
        let scale = sys.polys()[j]
            .term_magnitude_sum(point.q())
            .max(f64::MIN_POSITIVE);
        for k in 0..dim {
            let g = jac_w[(j, k)] / scale;
            stacked[(2 * j, k)] = g.re;
            stacked[(2 * j + 1, k)] = g.im;
        }
    }
    let sv = stacked.singular_values();
    let min_singular = sv[sv.len() - 1];

    let (sign, rank) = match (
        orientation_sign(sys, &point, cfg.regularity_threshold),
        critical_rank(sys, &point),
    ) {
        (Ok(s), Ok(r)) => (s, r),
        _ => (0, n),
    };
    Ok(FiberSolution {
        point,
        residual,
        min_singular,
        sign,
        rank,
    })
}

/// Deduplicate candidate points: sort by residual then coordinates, accept
/// greedily anything farther than `dedupe_tol` from every accepted point.
fn dedupe(mut candidates: Vec<(f64, LogPolarPoint)>, dedupe_tol: f64) -> Vec<LogPolarPoint> {
    candidates.sort_by(|a, b| {
        (a.0, point_key(&a.1))
            .partial_cmp(&(b.0, point_key(&b.1)))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut accepted: Vec<LogPolarPoint> = Vec::new();
    for (_, p) in candidates {
        if accepted.iter().all(|a| point_distance(a, &p) >= dedupe_tol) {
            accepted.push(p);
        }
    }
    accepted
}

/// Hash a fiber query into the start-point stream seed.
fn query_seed(seed: u64, space: Space, query: &[f64]) -> u64 {
    let mut h = mix(seed, space as u64);
    for v in query {
        h = mix(h, v.to_bits());
    }
    h
}

/// Multistart fiber solver with the intersection degrees cached.
pub struct FiberSolver<'a> {
    sys: &'a PolySystem,
    degrees: Degrees,
    cfg: SolverConfig,
}

impl<'a> FiberSolver<'a> {
    pub fn new(sys: &'a PolySystem, cfg: SolverConfig) -> Result<Self> {
        let degrees = conj_degrees(sys)?;
        Ok(FiberSolver { sys, degrees, cfg })
    }

    pub fn with_degrees(sys: &'a PolySystem, degrees: Degrees, cfg: SolverConfig) -> Self {
        FiberSolver { sys, degrees, cfg }
    }

    pub fn degrees(&self) -> Degrees {
        self.degrees
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// All isolated solutions over the fiber `Log = q`, found by multistart
    /// Newton over the arguments (a grid of about `8 beta` starts plus the
    /// configured random starts).
    pub fn amoeba_fiber(&self, q: &[f64]) -> Result<FiberReport> {
        self.check_query(q)?;
        let dim = self.sys.num_vars();
        let budget = 8 * self.degrees.beta.max(1);
        let per_axis = ((budget as f64).powf(1.0 / dim as f64).ceil() as usize).max(2);
        let grid_total = per_axis.pow(dim as u32);
        let seed = query_seed(self.cfg.seed, Space::Amoeba, q);
        let total = grid_total + self.cfg.random_starts;

        let chart = Chart::AmoebaTheta { q };
        let found: Vec<Option<Vec<f64>>> = par::map_indexed(total, |i| {
            let start: Vec<f64> = if i < grid_total {
                let mut idx = i;
                let mut theta = Vec::with_capacity(dim);
                for _ in 0..dim {
                    theta.push(((idx % per_axis) as f64 + 0.5) * TWO_PI / per_axis as f64);
                    idx /= per_axis;
                }
                theta
            } else {
                let mut rng = SampleRng::for_index(seed, (i - grid_total) as u64);
                (0..dim).map(|_| rng.uniform(0.0, TWO_PI)).collect()
            };
            newton::newton_run(self.sys, &chart, start, &self.cfg)
        });

        self.collect_report(Space::Amoeba, q.to_vec(), &chart, found)
    }

    /// All isolated solutions over the fiber `Arg_pi = p`, found by
    /// multistart Newton in the signed-radius chart: per sign sector, a
    /// coarse deterministic grid of radii plus the configured random
    /// starts.
    pub fn coamoeba_fiber(&self, p: &[f64]) -> Result<FiberReport> {
        self.check_query(p)?;
        let dim = self.sys.num_vars();
        let p_rolled: Vec<f64> = p
            .iter()
            .map(|t| {
                let r = t.rem_euclid(PI);
                if r >= PI {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        let sectors = 1usize << dim;
        // per-axis log-radius levels sized like the amoeba grid (about 8
        // starts per expected solution) and spread over the range where
        // fiber points concentrate; random starts cover the rest of the
        // search box
        let budget = 8 * self.degrees.alpha.max(1);
        let levels = ((budget as f64).powf(1.0 / dim as f64).ceil() as usize).clamp(2, 8);
        let spread = 6.0f64.min(self.cfg.search_box);
        let level = |k: usize| -spread + (k as f64 + 0.5) * (2.0 * spread / levels as f64);
        let grid_per_sector = levels.pow(dim as u32);
        let per_sector = grid_per_sector + self.cfg.random_starts.max(1);
        let seed = query_seed(self.cfg.seed, Space::Coamoeba, &p_rolled);

        let chart = Chart::CoamoebaRadial { p: &p_rolled };
        let found: Vec<Option<Vec<f64>>> = par::map_indexed(sectors * per_sector, |i| {
            let sector = i / per_sector;
            let within = i % per_sector;
            let start: Vec<f64> = if within < grid_per_sector {
                let mut idx = within;
                (0..dim)
                    .map(|k| {
                        let radius = level(idx % levels).exp();
                        idx /= levels;
                        let sign = if sector & (1 << k) != 0 { -1.0 } else { 1.0 };
                        sign * radius
                    })
                    .collect()
            } else {
                let mut rng = SampleRng::for_index(seed, i as u64);
                (0..dim)
                    .map(|k| {
                        let sign = if sector & (1 << k) != 0 { -1.0 } else { 1.0 };
                        sign * rng.uniform(-self.cfg.search_box, self.cfg.search_box).exp()
                    })
                    .collect()
            };
            newton::newton_run(self.sys, &chart, start, &self.cfg)
        });

        self.collect_report(Space::Coamoeba, p_rolled.clone(), &chart, found)
    }

    fn collect_report(
        &self,
        space: Space,
        query: Vec<f64>,
        chart: &Chart,
        found: Vec<Option<Vec<f64>>>,
    ) -> Result<FiberReport> {
        let mut candidates = Vec::new();
        for x in found.into_iter().flatten() {
            if let Some(z) = chart.point(&x) {
                if let Ok(res) = self.sys.scaled_residual(&z) {
                    if res <= self.cfg.tol {
                        candidates.push((res, z));
                    }
                }
            }
        }
        let solutions = dedupe(candidates, self.cfg.dedupe_tol)
            .into_iter()
            .map(|z| classify_solution(self.sys, z, &self.cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiberReport::assemble(
            space, query, solutions, false, &self.cfg,
        ))
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.sys.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "query of dimension {} for a system in {} variables",
                query.len(),
                self.sys.num_vars()
            )));
        }
        if query.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite fiber query".into()));
        }
        Ok(())
    }
}

/// One-shot amoeba fiber (computes the degrees first).
pub fn amoeba_fiber(sys: &PolySystem, q: &[f64], cfg: &SolverConfig) -> Result<FiberReport> {
    FiberSolver::new(sys, cfg.clone())?.amoeba_fiber(q)
}

/// One-shot coamoeba fiber.
pub fn coamoeba_fiber(sys: &PolySystem, p: &[f64], cfg: &SolverConfig) -> Result<FiberReport> {
    FiberSolver::new(sys, cfg.clone())?.coamoeba_fiber(p)
}
