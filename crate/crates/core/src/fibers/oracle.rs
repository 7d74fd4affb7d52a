//! Exact fiber solving for curves (`n = 1`) by resultant elimination.
//!
//! A fiber of either map on a curve `V = {f = 0}` in `(C*)^2` sits inside a
//! zero-dimensional complex intersection: rotate/scale coordinates so the
//! query is at the origin (`z = eps * u` with `eps = e^q` or `e^{ip}`), and
//! the fiber becomes the set of solutions of `{g = 0, g* = 0}` with real
//! (coamoeba) or unit-modulus (amoeba) coordinates, where `g = f(eps * u)`
//! and `g*` is its conjugate (coamoeba) or conjugate-reciprocal (amoeba)
//! partner. The pair is solved completely: eliminate `y` by a Sylvester
//! resultant (sampled on roots of unity and interpolated), read `x` roots
//! off balanced companion eigenvalues, back-substitute for `y`, polish with
//! a 2x2 complex Newton, and filter the fiber condition.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPolynomial, LogPolarPoint, PolySystem};

use super::newton::Chart;
use super::{classify_solution, FiberReport, SolverConfig, Space};

type C64 = Complex64;

/// Relative magnitude below which an interpolated resultant is treated as
/// identically zero (shared component; the query is non-generic).
const NONGENERIC_TOL: f64 = 1e-12;

/// Relative coefficient cutoff when trimming univariate polynomials.
const TRIM_TOL: f64 = 1e-12;

/// Scaled residual bound for accepting a polished intersection point.
const ACCEPT_TOL: f64 = 1e-9;

/// Relative tolerance of the fiber-membership filters.
const FIBER_TOL: f64 = 1e-9;

/// Upper edge of the ambiguous membership zone. A root this close to the
/// fiber condition (but above [`FIBER_TOL`]) is either a real solution the
/// enclosing-system polish resolved poorly (near-tangential intersection)
/// or a conjugate pair hugging the real locus; the fiber-chart Newton
/// decides, and anything it cannot certify marks the report non-regular.
const FIBER_GRAY: f64 = 1e-6;

/// Solutions with any `|coordinate|` outside this log range are artifacts of
/// denominator clearing (zero or infinite coordinates), never torus points
/// of the normalized systems solved here.
const TORUS_GUARD: f64 = 1e6;

/// Dense bivariate polynomial `sum c[i][j] x^i y^j`, obtained from a Laurent
/// polynomial by clearing monomial denominators (harmless on the torus).
struct BiPoly {
    c: Vec<Vec<C64>>, // c[i][j], i = x-degree, j = y-degree
}

impl BiPoly {
    fn from_laurent(f: &LaurentPolynomial) -> BiPoly {
        assert_eq!(f.num_vars(), 2);
        let min_x = f.terms().map(|(e, _)| e.entries()[0]).min().unwrap();
        let min_y = f.terms().map(|(e, _)| e.entries()[1]).min().unwrap();
        let max_x = f.terms().map(|(e, _)| e.entries()[0]).max().unwrap();
        let max_y = f.terms().map(|(e, _)| e.entries()[1]).max().unwrap();
        let dx = (max_x - min_x) as usize;
        let dy = (max_y - min_y) as usize;
        let mut c = vec![vec![C64::new(0.0, 0.0); dy + 1]; dx + 1];
        let mut max_mag: f64 = 0.0;
        for (_, coeff) in f.terms() {
            max_mag = max_mag.max(coeff.norm());
        }
        for (e, coeff) in f.terms() {
            let i = (e.entries()[0] - min_x) as usize;
            let j = (e.entries()[1] - min_y) as usize;
            c[i][j] = coeff / max_mag;
        }
        BiPoly { c }
    }

    fn deg_x(&self) -> usize {
        self.c.len() - 1
    }

    fn deg_y(&self) -> usize {
        self.c[0].len() - 1
    }

    /// Coefficients in `y` after substituting `x`.
    fn at_x(&self, x: C64) -> Vec<C64> {
        (0..=self.deg_y())
            .map(|j| {
                let mut acc = C64::new(0.0, 0.0);
                for row in self.c.iter().rev() {
                    acc = acc * x + row[j];
                }
                acc
            })
            .collect()
    }

    fn eval(&self, x: C64, y: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for row in self.c.iter().rev() {
            let mut inner = C64::new(0.0, 0.0);
            for v in row.iter().rev() {
                inner = inner * y + v;
            }
            acc = acc * x + inner;
        }
        acc
    }

    /// `sum |c_ij| |x|^i |y|^j`, the residual scale at `(x, y)`.
    fn magnitude(&self, x: C64, y: C64) -> f64 {
        let (ax, ay) = (x.norm(), y.norm());
        let mut acc = 0.0;
        let mut px = 1.0;
        for row in &self.c {
            let mut py = 1.0;
            for v in row {
                acc += v.norm() * px * py;
                py *= ay;
            }
            px *= ax;
        }
        acc.max(f64::MIN_POSITIVE)
    }

    fn gradient(&self, x: C64, y: C64) -> (C64, C64) {
        let mut gx = C64::new(0.0, 0.0);
        let mut gy = C64::new(0.0, 0.0);
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.norm() == 0.0 {
                    continue;
                }
                if i > 0 {
                    gx += v * (i as f64) * x.powu(i as u32 - 1) * y.powu(j as u32);
                }
                if j > 0 {
                    gy += v * (j as f64) * x.powu(i as u32) * y.powu(j as u32 - 1);
                }
            }
        }
        (gx, gy)
    }
}

/// Determinant of the Sylvester matrix in `y` of two coefficient vectors
/// (nominal degrees taken from the vector lengths).
fn sylvester_det(fy: &[C64], gy: &[C64]) -> C64 {
    let df = fy.len() - 1;
    let dg = gy.len() - 1;
    let size = df + dg;
    if size == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut m = DMatrix::<C64>::zeros(size, size);
    for r in 0..dg {
        for (k, v) in fy.iter().enumerate() {
            m[(r, r + k)] = *v;
        }
    }
    for r in 0..df {
        for (k, v) in gy.iter().enumerate() {
            m[(dg + r, r + k)] = *v;
        }
    }
    m.lu().determinant()
}

/// Coefficients (ascending) of `Res_y(F, G)` as a polynomial in `x`, by
/// sampling on roots of unity and inverse DFT.
fn resultant_x(f: &BiPoly, g: &BiPoly) -> Vec<C64> {
    let degree_bound = f.deg_x() * g.deg_y() + g.deg_x() * f.deg_y();
    let samples = degree_bound + 1;
    let dets: Vec<C64> = (0..samples)
        .map(|s| {
            let angle = TWO_PI * s as f64 / samples as f64;
            let x = C64::from_polar(1.0, angle);
            sylvester_det(&f.at_x(x), &g.at_x(x))
        })
        .collect();
    let mut coeffs = Vec::with_capacity(samples);
    for k in 0..samples {
        let mut acc = C64::new(0.0, 0.0);
        for (s, d) in dets.iter().enumerate() {
            let angle = -TWO_PI * (k * s) as f64 / samples as f64;
            acc += d * C64::from_polar(1.0, angle);
        }
        coeffs.push(acc / samples as f64);
    }
    coeffs
}

const TWO_PI: f64 = std::f64::consts::TAU;

/// All roots of a dense univariate polynomial (ascending coefficients),
/// dropping roots at zero; balanced companion eigenvalues polished by
/// Newton.
fn univariate_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Err(Error::NonGenericQuery);
    }
    let mut c: Vec<C64> = coeffs.iter().map(|v| v / max_mag).collect();
    while c.len() > 1 && c.last().unwrap().norm() < TRIM_TOL {
        c.pop();
    }
    // roots at the origin are never torus points; drop them
    let mut low = 0;
    while low < c.len() && c[low].norm() < TRIM_TOL {
        low += 1;
    }
    let c = &c[low..];
    let d = c.len() - 1;
    match d {
        0 => Ok(Vec::new()),
        1 => Ok(vec![-c[0] / c[1]]),
        _ => {
            // balance by scaling the variable so first and last coefficients
            // have equal magnitude
            let s = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64).max(1e-8);
            let mut monic: Vec<C64> = Vec::with_capacity(d);
            let lead = c[d] * s.powi(d as i32);
            for (k, v) in c.iter().take(d).enumerate() {
                monic.push(v * s.powi(k as i32) / lead);
            }
            let mut companion = DMatrix::<C64>::zeros(d, d);
            for r in 1..d {
                companion[(r, r - 1)] = C64::new(1.0, 0.0);
            }
            for r in 0..d {
                companion[(r, d - 1)] = -monic[r];
            }
            let schur = companion
                .try_schur(1e-14, 0)
                .ok_or(Error::NonGenericQuery)?;
            let t = schur.unpack().1;
            let mut roots = Vec::with_capacity(d);
            for i in 0..d {
                let mut root = t[(i, i)] * s;
                // Newton polish on the original polynomial
                for _ in 0..3 {
                    let mut p = C64::new(0.0, 0.0);
                    let mut dp = C64::new(0.0, 0.0);
                    for v in c.iter().rev() {
                        dp = dp * root + p;
                        p = p * root + v;
                    }
                    if dp.norm() > 0.0 {
                        let step = p / dp;
                        if step.norm() < 1.0 + root.norm() {
                            root -= step;
                        }
                    }
                }
                roots.push(root);
            }
            Ok(roots)
        }
    }
}

/// All isolated common zeros of `F` and `G` with both coordinates in the
/// torus guard range, deduplicated.
fn common_torus_roots(f: &BiPoly, g: &BiPoly) -> Result<Vec<(C64, C64)>> {
    if f.deg_y() + g.deg_y() == 0 || f.deg_x() + g.deg_x() == 0 {
        return Err(Error::NonGenericQuery);
    }
    let res = resultant_x(f, g);
    let res_mag = res.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if res_mag < NONGENERIC_TOL {
        return Err(Error::NonGenericQuery);
    }
    let xs = univariate_roots(&res)?;

    let mut candidates: Vec<(C64, C64)> = Vec::new();
    for x in xs {
        if !(1.0 / TORUS_GUARD..=TORUS_GUARD).contains(&x.norm()) {
            continue;
        }
        let mut fy = f.at_x(x);
        let fy_mag = fy.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let gy = g.at_x(x);
        let gy_mag = gy.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // back-substitute through whichever section is better conditioned
        let use_g = fy_mag < 1e-6 || (gy_mag > fy_mag && g.deg_y() >= f.deg_y());
        if use_g {
            fy = gy;
        }
        let Ok(ys) = univariate_roots(&fy) else {
            continue;
        };
        for y in ys {
            if !(1.0 / TORUS_GUARD..=TORUS_GUARD).contains(&y.norm()) {
                continue;
            }
            candidates.push(polish_pair(f, g, x, y));
        }
    }

    let mut accepted: Vec<(C64, C64)> = Vec::new();
    for (x, y) in candidates {
        let res_f = f.eval(x, y).norm() / f.magnitude(x, y);
        let res_g = g.eval(x, y).norm() / g.magnitude(x, y);
        if res_f > ACCEPT_TOL || res_g > ACCEPT_TOL {
            continue;
        }
        if x.norm() < 1.0 / TORUS_GUARD || y.norm() < 1.0 / TORUS_GUARD {
            continue;
        }
        let duplicate = accepted.iter().any(|(ax, ay)| {
            (ax - x).norm() <= 1e-7 * (1.0 + x.norm()) && (ay - y).norm() <= 1e-7 * (1.0 + y.norm())
        });
        if !duplicate {
            accepted.push((x, y));
        }
    }
    Ok(accepted)
}

/// A few steps of 2x2 complex Newton on `(F, G)`.
fn polish_pair(f: &BiPoly, g: &BiPoly, mut x: C64, mut y: C64) -> (C64, C64) {
    for _ in 0..6 {
        let fv = f.eval(x, y);
        let gv = g.eval(x, y);
        let (fx, fy) = f.gradient(x, y);
        let (gx, gy) = g.gradient(x, y);
        let det = fx * gy - fy * gx;
        if det.norm() < 1e-300 {
            break;
        }
        let dx = (fv * gy - fy * gv) / det;
        let dy = (fx * gv - fv * gx) / det;
        let step = dx.norm().max(dy.norm());
        if !step.is_finite() || step > 1.0 + x.norm().max(y.norm()) {
            break;
        }
        x -= dx;
        y -= dy;
        if step < 1e-15 * (1.0 + x.norm().max(y.norm())) {
            break;
        }
    }
    (x, y)
}

fn ensure_curve(sys: &PolySystem) -> Result<&LaurentPolynomial> {
    if sys.n() != 1 {
        return Err(Error::Unsupported(format!(
            "exact curve solver requires n = 1, system has n = {}",
            sys.n()
        )));
    }
    Ok(&sys.polys()[0])
}

fn roll_pi(p: &[f64]) -> Vec<f64> {
    p.iter()
        .map(|t| {
            let r = t.rem_euclid(PI);
            if r >= PI {
                0.0
            } else {
                r
            }
        })
        .collect()
}

/// Number of complex intersection points of the curve with its rotated
/// conjugate (the enclosing system of a coamoeba fiber), counting all torus
/// solutions whether or not they lie on the fiber; for generic `p` this is
/// the conj-degree.
pub fn curve_conj_intersections(sys: &PolySystem, p: &[f64]) -> Result<u64> {
    let f = ensure_curve(sys)?;
    if p.len() != 2 || p.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "query must be two finite angles".into(),
        ));
    }
    let p = roll_pi(p);
    let eps = LogPolarPoint::new(vec![0.0, 0.0], p)?;
    let rotated = f.translated(&eps)?;
    let big_f = BiPoly::from_laurent(&rotated);
    let big_g = BiPoly::from_laurent(&rotated.conjugate());
    Ok(common_torus_roots(&big_f, &big_g)?.len() as u64)
}

/// Exact fiber of a curve via the enclosing complex intersection: solve it
/// completely, keep the solutions that satisfy the fiber condition (real
/// rotated coordinates for coamoeba fibers, unit rotated moduli for amoeba
/// fibers), and classify them. The report is marked `exhaustive`.
pub fn curve_fiber_exact(
    sys: &PolySystem,
    space: Space,
    query: &[f64],
    cfg: &SolverConfig,
) -> Result<FiberReport> {
    let f = ensure_curve(sys)?;
    if query.len() != 2 || query.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "query must be a vector of two finite reals".into(),
        ));
    }

    let (eps, query_out) = match space {
        Space::Amoeba => (
            LogPolarPoint::new(query.to_vec(), vec![0.0, 0.0])?,
            query.to_vec(),
        ),
        Space::Coamoeba => {
            let p = roll_pi(query);
            (LogPolarPoint::new(vec![0.0, 0.0], p.clone())?, p)
        }
    };
    let moved = f.translated(&eps)?;
    let partner = match space {
        Space::Amoeba => moved.conjugate_reciprocal(),
        Space::Coamoeba => moved.conjugate(),
    };
    let big_f = BiPoly::from_laurent(&moved);
    let big_g = BiPoly::from_laurent(&partner);
    let roots = common_torus_roots(&big_f, &big_g)?;

    let mut solutions: Vec<(f64, LogPolarPoint)> = Vec::new();
    let mut uncertified = false;
    for (u1, u2) in roots {
        let distance = match space {
            Space::Amoeba => (u1.norm() - 1.0).abs().max((u2.norm() - 1.0).abs()),
            Space::Coamoeba => (u1.im.abs() / u1.norm()).max(u2.im.abs() / u2.norm()),
        };
        if distance > FIBER_GRAY {
            continue;
        }
        let strict = distance <= FIBER_TOL;
        // project to the fiber chart and certify with Newton there; the
        // chart enforces the fiber condition exactly
        let (start, polished): (Vec<f64>, Option<Vec<f64>>) = match space {
            Space::Amoeba => {
                let chart = Chart::AmoebaTheta { q: &query_out };
                let start = vec![u1.arg(), u2.arg()];
                let polished = super::newton::newton_run(sys, &chart, start.clone(), cfg);
                (start, polished)
            }
            Space::Coamoeba => {
                let chart = Chart::CoamoebaRadial { p: &query_out };
                let start = vec![u1.re, u2.re];
                let polished = super::newton::newton_run(sys, &chart, start.clone(), cfg);
                (start, polished)
            }
        };
        let close_enough = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= 1e-3 * (1.0 + x.abs().max(y.abs())))
        };
        let accepted = match &polished {
            Some(x) if close_enough(x, &start) => Some(x.clone()),
            _ if strict => Some(start.clone()),
            _ => {
                // a gray root the chart Newton could not certify: the query
                // sits too close to the critical locus for a trustworthy
                // count
                uncertified = true;
                None
            }
        };
        let Some(coords) = accepted else { continue };
        let point = match space {
            Space::Amoeba => Chart::AmoebaTheta { q: &query_out }.point(&coords),
            Space::Coamoeba => Chart::CoamoebaRadial { p: &query_out }.point(&coords),
        }
        .ok_or_else(|| Error::InvalidInput("degenerate fiber point".into()))?;
        let residual = sys.scaled_residual(&point)?;
        solutions.push((residual, point));
    }
    // distinct enclosing roots can certify onto one fiber point (near-real
    // conjugate pairs); merge them like the multistart path does
    let solutions = super::dedupe(solutions, cfg.dedupe_tol)
        .into_iter()
        .map(|point| classify_solution(sys, point, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut report = FiberReport::assemble(space, query_out, solutions, true, cfg);
    if uncertified {
        report.regular = false;
    }
    Ok(report)
}
