//! Closed-form two-qubit entanglement of formation via the concurrence.
//! Used as an independent oracle for the numerical optimizer.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::qstate::QState;

fn sigma_y_sigma_y() -> CMatrix {
    // σy ⊗ σy is real: antidiagonal (-1, 1, 1, -1)
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = c(-1.0, 0.0);
    m[(1, 2)] = c(1.0, 0.0);
    m[(2, 1)] = c(1.0, 0.0);
    m[(3, 0)] = c(-1.0, 0.0);
    m
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::eigh(m);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Two-qubit concurrence `max(0, λ1 - λ2 - λ3 - λ4)`.
pub fn concurrence(state: &QState) -> Result<f64> {
    if state.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a two-qubit state, got dims {:?}",
            state.dims()
        )));
    }
    let rho = state.matrix();
    let yy = sigma_y_sigma_y();
    let tilde = &yy * rho.map(|z| z.conj()) * &yy;
    let s = psd_sqrt(rho);
    let r = linalg::hermitian_part(&(&s * tilde * &s));
    let lam: Vec<f64> = linalg::eigvalsh(&r).iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// `h((1 + √(1 - C²)) / 2)` with `h` the binary entropy.
pub fn wootters_eof(state: &QState) -> Result<f64> {
    let cc = concurrence(state)?;
    let x = (1.0 + (1.0 - cc * cc).max(0.0).sqrt()) / 2.0;
    Ok(linalg::binary_entropy(x))
}
