//! Dense complex linear algebra shared by every module: Hermitian
//! eigendecomposition, Kronecker products, subsystem index arithmetic and
//! random matrix ensembles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues below this are treated as zero everywhere (rank, entropy, purification).
pub const EIG_CUTOFF: f64 = 1e-12;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Eigenvalues of a Hermitian matrix, sorted descending. 1x1 and 2x2 inputs use
/// closed forms; everything else goes through the Hermitian QR eigensolver.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
            let mean = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let r = (half * half + b.norm_sqr()).sqrt();
            vec![mean + r, mean - r]
        }
        _ => {
            let mut vals: Vec<f64> = SymmetricEigen::new(hermitian_part(m))
                .eigenvalues
                .iter()
                .copied()
                .collect();
            vals.sort_by(|x, y| y.total_cmp(x));
            vals
        }
    }
}

/// Full Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// Each eigenvector is rotated so that its first component of maximal modulus
/// is real and positive, which makes the output independent of the solver's
/// phase conventions.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut vecs = CMatrix::zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        let mut v = eig.eigenvectors.column(src).clone_owned();
        let pivot = v
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, z)| {
                if z.norm() > best.1 + 1e-12 {
                    (i, z.norm())
                } else {
                    best
                }
            })
            .0;
        let p = v[pivot];
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            v *= phase;
        }
        vecs.set_column(col, &v);
    }
    (vals, vecs)
}

/// Shannon entropy in bits of a probability vector, ignoring entries `<= EIG_CUTOFF`.
pub fn shannon_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > EIG_CUTOFF)
        .map(|p| -p * p.log2())
        .sum()
}

/// `Tr(σ) · S(σ / Tr σ)` for a positive semidefinite, possibly unnormalized `σ`.
///
/// This is the weighted entropy `p · S(ρ)` that appears in ensemble averages.
pub fn weighted_entropy_bits(sigma: &CMatrix) -> f64 {
    let t = trace(sigma).re;
    if t <= EIG_CUTOFF {
        return 0.0;
    }
    t * shannon_bits(eigvalsh(sigma).into_iter().map(|l| l / t))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_bits([p, 1.0 - p])
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * scale, im * scale)
    })
}

/// Orthonormalizes the columns of `m` with a QR factorization whose `R` has a
/// positive real diagonal. Requires `rows >= cols`.
pub fn qf(m: &CMatrix) -> CMatrix {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// Haar-distributed isometry: a `rows x cols` matrix with orthonormal columns.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    qf(&ginibre(rng, rows, cols))
}

pub fn column_orthonormality_error(v: &CMatrix) -> f64 {
    let gram = v.adjoint() * v;
    max_abs_diff(&gram, &CMatrix::identity(v.ncols(), v.ncols()))
}

/// Row-major strides for a product basis, leftmost factor most significant.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// For every basis index of the full space, its index inside the `keep`
/// factors and inside the complementary factors.
fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&k| dims[k]).collect();
    let ks = strides(&keep_dims);
    let rs = strides(&rest_dims);
    let total: usize = dims.iter().product();
    let mut kidx = Vec::with_capacity(total);
    let mut ridx = Vec::with_capacity(total);
    for i in 0..total {
        let d = digits(i, dims);
        kidx.push(keep.iter().zip(&ks).map(|(&k, s)| d[k] * s).sum());
        ridx.push(rest.iter().zip(&rs).map(|(&k, s)| d[k] * s).sum());
    }
    (
        kidx,
        ridx,
        keep_dims.iter().product(),
        rest_dims.iter().product(),
    )
}

/// Partial trace of an arbitrary square operator, keeping the factors listed
/// in `keep` in the given order.
pub fn partial_trace(dims: &[usize], m: &CMatrix, keep: &[usize]) -> CMatrix {
    let (kidx, ridx, dk, dr) = split_indices(dims, keep);
    // full index for (kept, rest)
    let mut full = vec![0usize; dk * dr];
    for (i, (&k, &r)) in kidx.iter().zip(&ridx).enumerate() {
        full[k * dr + r] = i;
    }
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for r in 0..dr {
                acc += m[(full[a * dr + r], full[b * dr + r])];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Reduced operator `Tr_rest |v><v|` of a vector, keeping `keep` in order.
pub fn partial_trace_vector(dims: &[usize], v: &CVector, keep: &[usize]) -> CMatrix {
    let x = reshape_bipartite(dims, v, keep);
    &x * x.adjoint()
}

/// Rearranges a vector into a matrix whose rows index the `rows` factors and
/// whose columns index the remaining factors.
pub fn reshape_bipartite(dims: &[usize], v: &CVector, rows: &[usize]) -> CMatrix {
    let (kidx, ridx, dk, dr) = split_indices(dims, rows);
    let mut x = CMatrix::zeros(dk, dr);
    for (i, z) in v.iter().enumerate() {
        x[(kidx[i], ridx[i])] = *z;
    }
    x
}

/// Basis permutation matrix taking factor order `dims` to `order`.
pub fn permutation_indices(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let ns = strides(&new_dims);
    let total: usize = dims.iter().product();
    (0..total)
        .map(|i| {
            let d = digits(i, dims);
            order.iter().zip(&ns).map(|(&k, s)| d[k] * s).sum()
        })
        .collect()
}

pub fn permute_matrix(dims: &[usize], m: &CMatrix, order: &[usize]) -> CMatrix {
    let p = permutation_indices(dims, order);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(p[i], p[j])] = m[(i, j)];
        }
    }
    out
}

pub fn permute_vector(dims: &[usize], v: &CVector, order: &[usize]) -> CVector {
    let p = permutation_indices(dims, order);
    let mut out = CVector::zeros(v.len());
    for (i, z) in v.iter().enumerate() {
        out[p[i]] = *z;
    }
    out
}

/// Embeds a single-factor operator as `I ⊗ op ⊗ I` acting on factor `site`.
pub fn embed_local(dims: &[usize], site: usize, op: &CMatrix) -> CMatrix {
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    kron(
        &kron(&CMatrix::identity(left, left), op),
        &CMatrix::identity(right, right),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_2x2_matches_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = ginibre(&mut rng, 2, 2);
            let h = &g * g.adjoint();
            let fast = eigvalsh(&h);
            let (slow, _) = eigh(&h);
            assert_abs_diff_eq!(fast[0], slow[0], epsilon = 1e-12);
            assert_abs_diff_eq!(fast[1], slow[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn eigh_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = ginibre(&mut rng, 5, 5);
        let h = &g * g.adjoint();
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let d = CMatrix::from_diagonal(&DVector::from_iterator(5, vals.iter().map(|&x| c(x, 0.0))));
        let rebuilt = &vecs * d * vecs.adjoint();
        assert!(max_abs_diff(&rebuilt, &h) < 1e-12);
    }

    #[test]
    fn haar_isometry_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = haar_isometry(&mut rng, 7, 3);
        assert!(column_orthonormality_error(&v) < 1e-13);
    }

    #[test]
    fn partial_trace_of_product_keeps_factor_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = ginibre(&mut rng, 2, 2);
        let b = ginibre(&mut rng, 3, 3);
        let cc = ginibre(&mut rng, 2, 2);
        let full = kron(&kron(&a, &b), &cc);
        let kept = partial_trace(&[2, 3, 2], &full, &[2, 0]);
        let expect = kron(&cc, &a) * trace(&b);
        assert!(max_abs_diff(&kept, &expect) < 1e-12);
    }

    #[test]
    fn permutation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = ginibre(&mut rng, 12, 12);
        let dims = [2, 3, 2];
        let p = permute_matrix(&dims, &m, &[1, 2, 0]);
        let back = permute_matrix(&[3, 2, 2], &p, &[2, 0, 1]);
        assert!(max_abs_diff(&back, &m) < 1e-15);
    }
}
