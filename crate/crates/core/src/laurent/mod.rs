//! Laurent polynomial systems on the complex torus, evaluated in log-polar
//! coordinates.
//!
//! A point of `(C*)^N` is stored as `(q, theta)` with `z_j = exp(q_j + i theta_j)`,
//! so a monomial `z^a` evaluates as `exp(<a,q>) * cis(<a,theta>)` and nothing
//! overflows until `<a,q>` itself leaves the safe exponent range. Both fiber
//! charts used by the solvers (fixed `q`, fixed `theta mod pi`) are native in
//! these coordinates.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::LatticePolytope;

mod parse;
mod text;

pub use parse::{parse_polynomial, parse_system, system_from_json, ParseOptions};

/// Largest `|<a,q>|` accepted by [`LaurentPolynomial::evaluate`]; `exp` of
/// anything beyond this is outside (or deep in the subnormals of) f64 range.
pub const SAFE_EXP: f64 = 700.0;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Exponent vector of one Laurent monomial. Ordering is lexicographic, which
/// makes `BTreeMap<ExponentVector, _>` iteration canonical.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        ExponentVector(self.0.iter().map(|e| -e).collect())
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `<a, v>` as f64.
    pub fn dot(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(self.0.len(), v.len());
        self.0.iter().zip(v).map(|(&a, &x)| a as f64 * x).sum()
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// A point of `(C*)^N` in log-polar coordinates: `z_j = exp(q_j + i theta_j)`.
///
/// `theta` is normalized into `[0, 2*pi)` on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogPolarPoint {
    q: Vec<f64>,
    theta: Vec<f64>,
}

impl LogPolarPoint {
    pub fn new(q: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if q.len() != theta.len() {
            return Err(Error::DimensionMismatch(format!(
                "log-polar point with {} moduli and {} arguments",
                q.len(),
                theta.len()
            )));
        }
        if q.iter().chain(theta.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "non-finite coordinate in log-polar point".into(),
            ));
        }
        let theta = theta.into_iter().map(normalize_angle).collect();
        Ok(LogPolarPoint { q, theta })
    }

    /// The multiplicative identity `(1, ..., 1)`.
    pub fn identity(dim: usize) -> Self {
        LogPolarPoint {
            q: vec![0.0; dim],
            theta: vec![0.0; dim],
        }
    }

    pub fn from_complex(zs: &[Complex64]) -> Result<Self> {
        let mut q = Vec::with_capacity(zs.len());
        let mut theta = Vec::with_capacity(zs.len());
        for z in zs {
            let r = z.norm();
            if r == 0.0 || !r.is_finite() {
                return Err(Error::InvalidInput(
                    "point has a zero or non-finite coordinate".into(),
                ));
            }
            q.push(r.ln());
            theta.push(normalize_angle(z.arg()));
        }
        Ok(LogPolarPoint { q, theta })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn coordinate(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.q[k].exp(), self.theta[k])
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|k| self.coordinate(k)).collect()
    }

    /// Coordinatewise product (multiplicative translation).
    pub fn componentwise_mul(&self, other: &LogPolarPoint) -> Result<LogPolarPoint> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "product of points of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        LogPolarPoint::new(
            self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
            self.theta
                .iter()
                .zip(&other.theta)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Arguments rolled mod pi.
    pub fn arg_pi(&self) -> Vec<f64> {
        self.theta
            .iter()
            .map(|t| {
                let r = t.rem_euclid(std::f64::consts::PI);
                if r >= std::f64::consts::PI {
                    0.0
                } else {
                    r
                }
            })
            .collect()
    }
}

/// A Laurent polynomial with complex coefficients.
///
/// Terms are kept merged and free of exact-zero coefficients; there is always
/// at least one term.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolynomial {
    num_vars: usize,
    terms: BTreeMap<ExponentVector, Complex64>,
}

impl LaurentPolynomial {
    /// Build from raw terms, merging duplicate exponents and dropping exact
    /// zero coefficients.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Complex64)>,
    {
        let mut merged: BTreeMap<ExponentVector, Complex64> = BTreeMap::new();
        for (exp, coeff) in terms {
            if exp.len() != num_vars {
                return Err(Error::DimensionMismatch(format!(
                    "exponent vector of length {} in a polynomial in {} variables",
                    exp.len(),
                    num_vars
                )));
            }
            if !coeff.re.is_finite() || !coeff.im.is_finite() {
                return Err(Error::NonFiniteCoefficient);
            }
            *merged.entry(exp).or_insert(Complex64::new(0.0, 0.0)) += coeff;
        }
        merged.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        if merged.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        Ok(LaurentPolynomial {
            num_vars,
            terms: merged,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> {
        self.terms.iter()
    }

    /// Largest coefficient magnitude.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sum_a c_a exp(<a,q> + i<a,theta>)`.
    pub fn evaluate(&self, z: &LogPolarPoint) -> Result<Complex64> {
        self.check_dim(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (exp, coeff) in &self.terms {
            let log_mod = exp.dot(z.q());
            if log_mod.abs() > SAFE_EXP {
                return Err(Error::EvalOverflow(log_mod, SAFE_EXP));
            }
            acc += coeff * Complex64::from_polar(log_mod.exp(), exp.dot(z.theta()));
        }
        Ok(acc)
    }

    /// Value together with the gradient row in logarithmic coordinates:
    /// entry `k` is `z_k df/dz_k = sum_a a_k c_a z^a`.
    pub fn eval_with_gradient(&self, z: &LogPolarPoint) -> Result<(Complex64, Vec<Complex64>)> {
        self.check_dim(z)?;
        let mut value = Complex64::new(0.0, 0.0);
        let mut grad = vec![Complex64::new(0.0, 0.0); self.num_vars];
        for (exp, coeff) in &self.terms {
            let log_mod = exp.dot(z.q());
            if log_mod.abs() > SAFE_EXP {
                return Err(Error::EvalOverflow(log_mod, SAFE_EXP));
            }
            let term = coeff * Complex64::from_polar(log_mod.exp(), exp.dot(z.theta()));
            value += term;
            for (g, &a) in grad.iter_mut().zip(exp.entries()) {
                if a != 0 {
                    *g += term * a as f64;
                }
            }
        }
        Ok((value, grad))
    }

    /// `sum_a |c_a| exp(<a,q>)`: the natural scale for backward-error
    /// residuals at modulus `exp(q)`.
    pub fn term_magnitude_sum(&self, q: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exp, coeff)| {
                let log_mod = exp.dot(q).clamp(-SAFE_EXP, SAFE_EXP);
                coeff.norm() * log_mod.exp()
            })
            .sum()
    }

    /// Defining polynomial of the coordinatewise-conjugated zero set:
    /// coefficients conjugated, exponents unchanged.
    pub fn conjugate(&self) -> Self {
        LaurentPolynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.conj()))
                .collect(),
        }
    }

    /// Defining polynomial of the zero set under `z -> 1/conj(z)`:
    /// coefficients conjugated and exponents negated.
    pub fn conjugate_reciprocal(&self) -> Self {
        LaurentPolynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.negated(), c.conj()))
                .collect(),
        }
    }

    /// `g` with `g(z) = f(eps * z)`, i.e. `c_a -> c_a * eps^a`.
    pub fn translated(&self, eps: &LogPolarPoint) -> Result<Self> {
        if eps.dim() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "translation point of dimension {} for a polynomial in {} variables",
                eps.dim(),
                self.num_vars
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exp, coeff) in &self.terms {
            let log_mod = exp.dot(eps.q());
            if log_mod.abs() > SAFE_EXP {
                return Err(Error::EvalOverflow(log_mod, SAFE_EXP));
            }
            let factor = Complex64::from_polar(log_mod.exp(), exp.dot(eps.theta()));
            terms.push((exp.clone(), coeff * factor));
        }
        LaurentPolynomial::from_terms(self.num_vars, terms)
    }

    /// Convex hull of the exponent vectors.
    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        let points: Vec<Vec<i64>> = self.terms.keys().map(|e| e.entries().to_vec()).collect();
        crate::polytope::convex_hull(&points)
    }

    fn check_dim(&self, z: &LogPolarPoint) -> Result<()> {
        if z.dim() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} for a polynomial in {} variables",
                z.dim(),
                self.num_vars
            )));
        }
        Ok(())
    }
}

/// A half-dimensional system: `n` Laurent polynomials in `2n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    polys: Vec<LaurentPolynomial>,
    var_names: Vec<String>,
}

impl PolySystem {
    pub fn new(polys: Vec<LaurentPolynomial>, var_names: Vec<String>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::InvalidInput("system with no polynomials".into()));
        }
        let n = polys.len();
        if var_names.len() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "{} polynomials require {} variables (half-dimensional setting), got {}",
                n,
                2 * n,
                var_names.len()
            )));
        }
        for p in &polys {
            if p.num_vars() != 2 * n {
                return Err(Error::DimensionMismatch(format!(
                    "polynomial in {} variables inside a system over {} variables",
                    p.num_vars(),
                    2 * n
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &var_names {
            if !seen.insert(name) {
                return Err(Error::InvalidInput(format!("duplicate variable `{name}`")));
            }
        }
        Ok(PolySystem { polys, var_names })
    }

    /// Number of equations; the ambient torus has dimension `2n`.
    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn polys(&self) -> &[LaurentPolynomial] {
        &self.polys
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn evaluate(&self, z: &LogPolarPoint) -> Result<Vec<Complex64>> {
        self.polys.iter().map(|p| p.evaluate(z)).collect()
    }

    /// Values and the holomorphic Jacobian in logarithmic coordinates
    /// `w_k = log z_k`: entry `(j,k)` is `z_k df_j/dz_k`.
    pub fn eval_with_jacobian_w(
        &self,
        z: &LogPolarPoint,
    ) -> Result<(Vec<Complex64>, DMatrix<Complex64>)> {
        let n = self.n();
        let m = self.num_vars();
        let mut values = Vec::with_capacity(n);
        let mut jac = DMatrix::from_element(n, m, Complex64::new(0.0, 0.0));
        for (j, p) in self.polys.iter().enumerate() {
            let (v, grad) = p.eval_with_gradient(z)?;
            values.push(v);
            for (k, g) in grad.into_iter().enumerate() {
                jac[(j, k)] = g;
            }
        }
        Ok((values, jac))
    }

    pub fn jacobian_w(&self, z: &LogPolarPoint) -> Result<DMatrix<Complex64>> {
        Ok(self.eval_with_jacobian_w(z)?.1)
    }

    /// `max_j |f_j(z)| / sum_a |c_{j,a}| exp(<a,q>)`: a dimensionless
    /// backward-error residual.
    pub fn scaled_residual(&self, z: &LogPolarPoint) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in &self.polys {
            let v = p.evaluate(z)?;
            let scale = p.term_magnitude_sum(z.q()).max(f64::MIN_POSITIVE);
            worst = worst.max(v.norm() / scale);
        }
        Ok(worst)
    }

    pub fn conjugate(&self) -> Self {
        PolySystem {
            polys: self.polys.iter().map(|p| p.conjugate()).collect(),
            var_names: self.var_names.clone(),
        }
    }

    pub fn conjugate_reciprocal(&self) -> Self {
        PolySystem {
            polys: self
                .polys
                .iter()
                .map(|p| p.conjugate_reciprocal())
                .collect(),
            var_names: self.var_names.clone(),
        }
    }

    pub fn translated(&self, eps: &LogPolarPoint) -> Result<Self> {
        Ok(PolySystem {
            polys: self
                .polys
                .iter()
                .map(|p| p.translated(eps))
                .collect::<Result<_>>()?,
            var_names: self.var_names.clone(),
        })
    }

    pub fn newton_polytopes(&self) -> Result<Vec<LatticePolytope>> {
        self.polys.iter().map(|p| p.newton_polytope()).collect()
    }
}

#[cfg(test)]
mod tests;
