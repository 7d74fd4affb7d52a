//! Tangent-space diagnostics at a point of the variety.
//!
//! All of these work in logarithmic coordinates `w = log z`, where the
//! log-modulus map is the projection to `Re w` and the argument map the
//! projection to `Im w`. The tangent space of `V` is the complex kernel of
//! the holomorphic Jacobian; realified with the interleaved basis
//! `(v_1, i v_1, ..., v_n, i v_n)` it gives the `2n x 2n` real matrices
//! whose determinants control both maps:
//!
//! * `det(Re U)` is the local Jacobian sign of the log-modulus map,
//! * `det(Im U)` the same for the argument map,
//! * holomorphy forces `det(Re U) == det(Im U)` at every smooth point, which
//!   is the vanishing of the difference form checked by [`omega_residual`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laurent::{LogPolarPoint, PolySystem};

/// Relative singular-value cutoff below which the holomorphic Jacobian is
/// treated as rank-deficient (a singular point of the variety).
const COMPLEX_RANK_TOL: f64 = 1e-10;

/// Relative cutoff for treating a singular value of the realified Jacobian
/// as zero in [`critical_rank`].
const REAL_RANK_TOL: f64 = 1e-8;

fn scaled_jacobian(sys: &PolySystem, z: &LogPolarPoint) -> Result<DMatrix<Complex64>> {
    let mut jac = sys.jacobian_w(z)?;
    for (j, poly) in sys.polys().iter().enumerate() {
        let scale = poly.term_magnitude_sum(z.q()).max(f64::MIN_POSITIVE);
        for k in 0..jac.ncols() {
            jac[(j, k)] /= scale;
        }
    }
    Ok(jac)
}

/// Hermitian inner product `<a, b> = sum conj(a_i) b_i`.
fn herm(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.dotc(b)
}

fn project_out(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for u in basis {
        let coeff = herm(u, v);
        v.axpy(-coeff, u, Complex64::new(1.0, 0.0));
    }
}

/// Orthonormal (Hermitian) basis of the kernel of the holomorphic Jacobian
/// at `z`, spanning the tangent space of `V` in logarithmic coordinates.
///
/// Fails with [`Error::SingularPoint`] when the Jacobian does not have full
/// rank `n`.
pub fn tangent_basis(sys: &PolySystem, z: &LogPolarPoint) -> Result<Vec<DVector<Complex64>>> {
    let jac = scaled_jacobian(sys, z)?;
    let n = jac.nrows();
    let dim = jac.ncols();

    // Orthonormalize the conjugated rows; the kernel is their Hermitian
    // orthocomplement.
    let mut row_basis: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: DVector<Complex64> = jac.row(j).transpose().map(|c| c.conj());
        let original = v.norm();
        project_out(&mut v, &row_basis);
        project_out(&mut v, &row_basis); // re-orthogonalize
        let norm = v.norm();
        if norm <= COMPLEX_RANK_TOL * original.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularPoint);
        }
        row_basis.push(v / Complex64::new(norm, 0.0));
    }

    // Extend by coordinate vectors, largest residual first.
    let mut kernel: Vec<DVector<Complex64>> = Vec::with_capacity(dim - n);
    while kernel.len() < dim - n {
        let mut best: Option<(f64, DVector<Complex64>)> = None;
        for k in 0..dim {
            let mut e = DVector::from_element(dim, Complex64::new(0.0, 0.0));
            e[k] = Complex64::new(1.0, 0.0);
            project_out(&mut e, &row_basis);
            project_out(&mut e, &kernel);
            let norm = e.norm();
            if best.as_ref().map(|(b, _)| norm > *b).unwrap_or(true) {
                best = Some((norm, e));
            }
        }
        let (norm, mut v) = best.expect("dimension count guarantees a candidate");
        if norm < 1e-6 {
            return Err(Error::SingularPoint);
        }
        project_out(&mut v, &row_basis);
        project_out(&mut v, &kernel);
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        kernel.push(v);
    }
    Ok(kernel)
}

/// The pair `(det(Re U), det(Im U))` for the interleaved real tangent basis.
fn realified_determinants(basis: &[DVector<Complex64>]) -> (f64, f64) {
    let dim = basis[0].len();
    debug_assert_eq!(2 * basis.len(), dim);
    let mut re = DMatrix::<f64>::zeros(dim, dim);
    let mut im = DMatrix::<f64>::zeros(dim, dim);
    for (i, v) in basis.iter().enumerate() {
        for r in 0..dim {
            // column 2i is v, column 2i+1 is i*v
            re[(r, 2 * i)] = v[r].re;
            im[(r, 2 * i)] = v[r].im;
            re[(r, 2 * i + 1)] = -v[r].im;
            im[(r, 2 * i + 1)] = v[r].re;
        }
    }
    (re.determinant(), im.determinant())
}

/// `|det(Re U) - det(Im U)|` for an orthonormal tangent basis; vanishes at
/// every smooth point by holomorphy.
pub fn omega_residual(sys: &PolySystem, z: &LogPolarPoint) -> Result<f64> {
    let basis = tangent_basis(sys, z)?;
    let (re, im) = realified_determinants(&basis);
    Ok((re - im).abs())
}

/// Same residual for an externally supplied (not necessarily holomorphic)
/// realified frame; used by control experiments.
pub fn omega_residual_of_frame(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    (re.determinant() - im.determinant()).abs()
}

/// Orientation sign of the log-modulus map at `z`: the sign of `det(Re U)`,
/// or `0` when its magnitude is at most `threshold` (critical point).
///
/// The sign is independent of the chosen kernel basis: a complex change of
/// basis multiplies the determinant by a positive factor.
pub fn orientation_sign(sys: &PolySystem, z: &LogPolarPoint, threshold: f64) -> Result<i8> {
    let basis = tangent_basis(sys, z)?;
    let (re, _) = realified_determinants(&basis);
    Ok(if re.abs() <= threshold {
        0
    } else if re > 0.0 {
        1
    } else {
        -1
    })
}

/// Dimension of the real kernel `{ r real : J r = 0 }` of the holomorphic
/// Jacobian: the dimension of the intersection of the tangent space of `V`
/// with the tangent space of the real-torus orbit through `z`. Zero exactly
/// at regular points of the log-modulus map; at most `n` at smooth points.
pub fn critical_rank(sys: &PolySystem, z: &LogPolarPoint) -> Result<usize> {
    let jac = scaled_jacobian(sys, z)?;
    let n = jac.nrows();
    let dim = jac.ncols();

    let complex_sv = jac.clone().singular_values();
    let sv_max = complex_sv[0].max(f64::MIN_POSITIVE);
    if complex_sv[n - 1] <= COMPLEX_RANK_TOL * sv_max {
        return Err(Error::SingularPoint);
    }

    let mut stacked = DMatrix::<f64>::zeros(2 * n, dim);
    for j in 0..n {
        for k in 0..dim {
            stacked[(j, k)] = jac[(j, k)].re;
            stacked[(n + j, k)] = jac[(j, k)].im;
        }
    }
    let sv = stacked.singular_values();
    let top = sv[0].max(f64::MIN_POSITIVE);
    let rank = sv.iter().filter(|s| **s > REAL_RANK_TOL * top).count();
    Ok((dim - rank).min(n))
}
