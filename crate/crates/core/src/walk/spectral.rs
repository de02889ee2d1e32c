//! Dense spectral audits of walk operators.
//!
//! The walk operator is real orthogonal, so its spectrum is read off the
//! symmetric matrix `H = (U + U^T)/2`: an eigenvector of `H` with eigenvalue
//! `cos(a)` spans, together with its image under `U`, an invariant plane on
//! which `U` rotates by `a`. Overlap queries and eigenpair extraction both
//! reduce to one symmetric eigendecomposition.

use super::{WalkError, WalkOperator, WalkState};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Dense audits get refused above this dimension.
pub const DENSE_LIMIT: usize = 4_000;

/// Eigenvalues of `H` within this distance of 1 count as the 1-eigenspace.
const ONE_EIGENSPACE_TOL: f64 = 1e-9;

/// The operator as a dense matrix (column `i` is the image of basis arc `i`).
pub fn dense_matrix(op: &WalkOperator) -> Result<DMatrix<f64>, WalkError> {
    let n = op.dimension();
    if n > DENSE_LIMIT {
        return Err(WalkError::DimensionTooLarge(n, DENSE_LIMIT));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut col = vec![0.0f64; n];
    for i in 0..n {
        col.iter_mut().for_each(|x| *x = 0.0);
        col[i] = 1.0;
        op.step_in_place(&mut col);
        for (r, &v) in col.iter().enumerate() {
            m[(r, i)] = v;
        }
    }
    Ok(m)
}

/// Largest deviation of `U^T U` from the identity.
pub fn unitarity_defect(op: &WalkOperator) -> Result<f64, WalkError> {
    let u = dense_matrix(op)?;
    let gram = u.transpose() * &u;
    let n = op.dimension();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - expect).abs());
        }
    }
    Ok(worst)
}

struct Spectrum {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

fn symmetric_part_spectrum(op: &WalkOperator) -> Result<Spectrum, WalkError> {
    let u = dense_matrix(op)?;
    let h = (&u + u.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    Ok(Spectrum { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors })
}

fn sigma_overlap_above(op: &WalkOperator, threshold: f64) -> Result<f64, WalkError> {
    let spec = symmetric_part_spectrum(op)?;
    let sigma = op.sigma_state();
    let s: DVector<f64> = DVector::from_iterator(
        sigma.amplitudes.len(),
        sigma.amplitudes.iter().map(|a| a.re),
    );
    let mut acc = 0.0;
    for (k, &lam) in spec.eigenvalues.iter().enumerate() {
        if lam >= threshold {
            let dot = spec.eigenvectors.column(k).dot(&s);
            acc += dot * dot;
        }
    }
    Ok(acc.sqrt())
}

/// Norm of the projection of the start state onto the 1-eigenspace.
pub fn overlap_one_eigenspace(op: &WalkOperator) -> Result<f64, WalkError> {
    sigma_overlap_above(op, 1.0 - ONE_EIGENSPACE_TOL)
}

/// Norm of the projection of the start state onto the span of eigenvectors
/// with phase magnitude at most `theta`.
pub fn overlap_low_phase(op: &WalkOperator, theta: f64) -> Result<f64, WalkError> {
    sigma_overlap_above(op, theta.cos() - 1e-12)
}

/// All unit eigenpairs `(alpha, eigenvector)` with phases in `(-pi, pi]`.
///
/// Real eigenvalues (`alpha` 0 or pi) yield real eigenvectors; every rotation
/// plane yields the conjugate pair `(+alpha, -alpha)`.
pub fn unit_eigenpairs(op: &WalkOperator) -> Result<Vec<(f64, Vec<Complex64>)>, WalkError> {
    let spec = symmetric_part_spectrum(op)?;
    let n = op.dimension();
    let mut out = Vec::new();
    for k in 0..n {
        let lam = spec.eigenvalues[k].clamp(-1.0, 1.0);
        let alpha = lam.acos();
        let v: Vec<f64> = spec.eigenvectors.column(k).iter().copied().collect();
        if alpha < 1e-7 {
            out.push((0.0, v.iter().map(|&x| Complex64::new(x, 0.0)).collect()));
            continue;
        }
        if alpha > std::f64::consts::PI - 1e-7 {
            out.push((
                std::f64::consts::PI,
                v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            ));
            continue;
        }
        // w = (U v - cos(a) v)/sin(a) completes the rotation plane of v.
        let mut uv = v.clone();
        op.step_in_place(&mut uv);
        let (c, s) = (alpha.cos(), alpha.sin());
        let w: Vec<f64> = uv.iter().zip(&v).map(|(&a, &b)| (a - c * b) / s).collect();
        let inv = 0.5f64.sqrt();
        let plus: Vec<Complex64> =
            v.iter().zip(&w).map(|(&a, &b)| Complex64::new(a * inv, -b * inv)).collect();
        let minus: Vec<Complex64> =
            v.iter().zip(&w).map(|(&a, &b)| Complex64::new(a * inv, b * inv)).collect();
        out.push((alpha, plus));
        out.push((-alpha, minus));
    }
    Ok(out)
}

/// Residual `||U x - e^{i a} x||` of a claimed eigenpair.
pub fn eigenpair_residual(op: &WalkOperator, alpha: f64, vec: &[Complex64]) -> f64 {
    let mut image = vec.to_vec();
    op.step_in_place(&mut image);
    let phase = Complex64::from_polar(1.0, alpha);
    image
        .iter()
        .zip(vec)
        .map(|(u, x)| (u - phase * x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Wraps an eigenvector slice as a state.
pub fn state_from(vec: &[Complex64]) -> WalkState {
    WalkState { amplitudes: vec.to_vec() }
}
