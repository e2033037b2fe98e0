//! Squashed entanglement upper bounds.
//!
//! Every extension handled here satisfies its marginal contract exactly (up to
//! `1e-9`), so each objective value is a certified upper bound on `E_sq`.

use serde::Serialize;

use crate::entropy::{self, INEQUALITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, EIG_CUTOFF};
use crate::qstate::QState;
use crate::variational::stiefel::{minimize, pad_rows, Budget, Objective};
use crate::variational::{BoundDirection, OptimizationResult};

pub const MARGINAL_TOL: f64 = 1e-9;

/// An extension `ρ_ABE` of a base state `ρ_AB`. The first base label is the
/// `A` side of the objective, the remaining base labels form `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    base: QState,
    state: QState,
    ancilla: Vec<String>,
    isometry: Option<CMatrix>,
}

impl Extension {
    /// Validates `Tr_ancilla(state) = base` within `1e-9`. `state` must contain
    /// every base label; its other labels form the ancilla.
    pub fn new(base: &QState, state: QState) -> Result<Self> {
        if base.dims().len() < 2 {
            return Err(Error::InvalidExtension(
                "base state needs at least two subsystems".into(),
            ));
        }
        let base_labels = base.label_refs();
        for l in &base_labels {
            let here = state.indices(&[l]).map_err(|_| {
                Error::InvalidExtension(format!("extension is missing base subsystem {l}"))
            })?;
            let there = base.indices(&[l])?;
            if state.dims()[here[0]] != base.dims()[there[0]] {
                return Err(Error::InvalidExtension(format!("dimension of {l} differs")));
            }
        }
        let marginal = state.partial_trace(&base_labels)?.reorder(&base_labels)?;
        let dev = linalg::max_abs_diff(marginal.matrix(), base.matrix());
        if dev > MARGINAL_TOL {
            return Err(Error::InvalidExtension(format!(
                "marginal deviates from the base state by {dev:.3e}"
            )));
        }
        let ancilla = state
            .labels()
            .iter()
            .filter(|l| !base.labels().contains(l))
            .cloned()
            .collect();
        Ok(Extension {
            base: base.clone(),
            state,
            ancilla,
            isometry: None,
        })
    }

    /// `ρ_AB ⊗ |0><0|_E`.
    pub fn trivial(base: &QState, ancilla: &str) -> Result<Self> {
        let e = QState::with_labels(vec![1], &[ancilla], CMatrix::identity(1, 1))?;
        Extension::new(base, base.tensor(&e)?)
    }

    pub fn base(&self) -> &QState {
        &self.base
    }

    pub fn state(&self) -> &QState {
        &self.state
    }

    pub fn ancilla(&self) -> &[String] {
        &self.ancilla
    }

    pub fn ancilla_dim(&self) -> usize {
        let refs: Vec<&str> = self.ancilla.iter().map(String::as_str).collect();
        self.state.dim_of(&refs).unwrap_or(1)
    }

    /// The purification isometry that produced this extension, if any.
    pub fn isometry(&self) -> Option<&CMatrix> {
        self.isometry.as_ref()
    }
}

/// `½ I(A;B|E)` for an extension.
pub fn squashed_objective(ext: &Extension) -> Result<f64> {
    let labels = ext.base.label_refs();
    let e: Vec<&str> = ext.ancilla.iter().map(String::as_str).collect();
    Ok(0.5 * entropy::conditional_mutual_information(&ext.state, &labels[..1], &labels[1..], &e)?)
}

/// `Σ_i p_i ρ_i ⊗ |i><i|_E` for product terms `ρ_i = ρ_A^i ⊗ ρ_B^i`
/// (two-party states sharing labels and dimensions).
pub fn flag_extension(terms: &[(f64, QState)]) -> Result<Extension> {
    let first = &terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty decomposition".into()))?
        .1;
    if first.dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "flag extension needs bipartite terms, got dims {:?}",
            first.dims()
        )));
    }
    let total: f64 = terms.iter().map(|t| t.0).sum();
    if (total - 1.0).abs() > 1e-9 || terms.iter().any(|t| t.0 < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decomposition weights must be non-negative and sum to 1 (sum {total})"
        )));
    }
    let n = terms.len();
    let dim = first.dim();
    let mut base = CMatrix::zeros(dim, dim);
    let mut ext = CMatrix::zeros(dim * n, dim * n);
    for (i, (p, rho)) in terms.iter().enumerate() {
        if rho.dims() != first.dims() || rho.labels() != first.labels() {
            return Err(Error::DimensionMismatch(format!(
                "term {i} has dims {:?}, expected {:?}",
                rho.dims(),
                first.dims()
            )));
        }
        let l = rho.label_refs();
        let product = rho.partial_trace(&l[..1])?.tensor(&rho.partial_trace(&l[1..])?)?;
        if linalg::max_abs_diff(product.matrix(), rho.matrix()) > 1e-9 {
            return Err(Error::NonProductTerm(i));
        }
        let w = c(*p, 0.0);
        base += rho.matrix() * w;
        let mut flag = CMatrix::zeros(n, n);
        flag[(i, i)] = w;
        ext += linalg::kron(rho.matrix(), &flag);
    }
    let base = QState::new(first.dims().to_vec(), first.labels().to_vec(), base)?;
    let mut dims = first.dims().to_vec();
    dims.push(n);
    let mut labels = first.labels().to_vec();
    labels.push(fresh_label(&labels, "E"));
    Extension::new(&base, QState::new(dims, labels, ext)?)
}

fn fresh_label(taken: &[String], base: &str) -> String {
    let mut l = base.to_string();
    while taken.contains(&l) {
        l.push('\'');
    }
    l
}

/// Extensions `Tr_E' [(1 ⊗ W) |ψ><ψ| (1 ⊗ W)†]` with `ψ` the purification of
/// `ρ_AB` on `R` and `W: R → E ⊗ E'` an isometry, `dim E' = dim R`.
struct SquashedSearch {
    /// `dim(AB) x r`, column `k` is `√λ_k v_k`.
    psi: CMatrix,
    dims: [usize; 2],
    cap: usize,
}

impl SquashedSearch {
    fn new(state: &QState) -> Result<Self> {
        let pure = state.purify("R")?;
        let r = *pure.dims().last().unwrap_or(&1);
        let n = state.dim();
        let psi = CMatrix::from_fn(n, r, |i, k| pure.vector()[i * r + k]);
        let da = state.dims()[0];
        Ok(SquashedSearch {
            psi,
            dims: [da, n / da],
            cap: 1,
        })
    }

    fn rank(&self) -> usize {
        self.psi.ncols()
    }

    /// `Ξ` with `ρ_ABE = Ξ Ξ†`, rows indexed `(ab, e)`, columns by `E'`.
    fn xi(&self, w: &CMatrix) -> CMatrix {
        let r = self.rank();
        let n = self.psi.nrows();
        // W rows are indexed (e, e') with e most significant
        let mut xi = CMatrix::zeros(n * self.cap, r);
        for e in 0..self.cap {
            let block = w.rows(e * r, r);
            // (Ψ Bᵀ)[x, e'] = Σ_k Ψ[x,k] W[(e,e'),k]
            let part = &self.psi * block.transpose();
            for x in 0..n {
                for ep in 0..r {
                    xi[(x * self.cap + e, ep)] = part[(x, ep)];
                }
            }
        }
        xi
    }

    fn extension_matrix(&self, w: &CMatrix) -> CMatrix {
        let xi = self.xi(w);
        linalg::hermitian_part(&(&xi * xi.adjoint()))
    }

    fn trivial_start(&self) -> CMatrix {
        let r = self.rank();
        pad_rows(&CMatrix::identity(r, r), self.cap * r)
    }
}

impl Objective for SquashedSearch {
    fn shape(&self) -> (usize, usize) {
        (self.cap * self.rank(), self.rank())
    }

    fn value(&self, w: &CMatrix) -> f64 {
        let xi = self.xi(w);
        let rho = linalg::hermitian_part(&(&xi * xi.adjoint()));
        let dims = [self.dims[0], self.dims[1], self.cap];
        let s = |keep: &[usize]| {
            linalg::weighted_entropy_bits(&linalg::partial_trace(&dims, &rho, keep))
        };
        // S(ABE) from the small Gram matrix
        let s_abe = linalg::weighted_entropy_bits(&linalg::hermitian_part(&(xi.adjoint() * &xi)));
        0.5 * (s(&[0, 2]) + s(&[1, 2]) - s(&[2]) - s_abe)
    }
}

/// Embeds an isometry found with a smaller extension cap into a larger one
/// (`E` grows, the extension state is unchanged up to zero padding).
pub fn embed_isometry(w: &CMatrix, from_cap: usize, to_cap: usize) -> Result<CMatrix> {
    let r = w.ncols();
    if w.nrows() != from_cap * r || to_cap < from_cap {
        return Err(Error::DimensionMismatch(format!(
            "cannot embed a {}x{} isometry from cap {from_cap} into cap {to_cap}",
            w.nrows(),
            r
        )));
    }
    Ok(pad_rows(w, to_cap * r))
}

/// Upper bound on `E_sq(ρ_AB)`: minimizes `½ I(A;B|E)` over extensions with
/// `dim E <= ext_dim_cap` (default `rank(ρ_AB)²`). The trivial extension and
/// any `seeds` (isometries of shape `cap·r x r`, see [`embed_isometry`]) are
/// searched first, so the value never exceeds `½ I(A;B)`.
pub fn optimize_squashed_ub(
    state: &QState,
    ext_dim_cap: Option<usize>,
    budget: &Budget,
    seeds: &[CMatrix],
) -> Result<OptimizationResult<Extension>> {
    if state.dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "squashed search needs a bipartite state, got dims {:?}",
            state.dims()
        )));
    }
    let mut search = SquashedSearch::new(state)?;
    let r = search.rank();
    let cap = ext_dim_cap.unwrap_or(r * r);
    if cap == 0 {
        return Err(Error::InvalidParameter("ext_dim_cap must be at least 1".into()));
    }
    search.cap = cap;
    let mut starts = vec![search.trivial_start()];
    for s in seeds {
        if s.shape() != (cap * r, r) {
            return Err(Error::DimensionMismatch(format!(
                "seed isometry has shape {:?}, expected ({}, {r})",
                s.shape(),
                cap * r
            )));
        }
        starts.push(s.clone());
    }
    let out = minimize(&search, budget, &starts);
    let ancilla = fresh_label(state.labels(), "E");
    let mut dims = state.dims().to_vec();
    dims.push(cap);
    let mut labels = state.labels().to_vec();
    labels.push(ancilla);
    let ext_state = QState::repaired(dims, labels, search.extension_matrix(&out.point))?;
    let mut argument = Extension::new(state, ext_state)?;
    argument.isometry = Some(out.point.clone());
    let value = squashed_objective(&argument)?;
    Ok(OptimizationResult {
        value,
        argument,
        direction: BoundDirection::Upper,
        restarts_used: out.restarts_used,
        evaluations: out.evaluations,
        converged: out.converged,
        gap_estimate: out.restart_spread(),
        best_so_far: out.best_so_far,
    })
}

/// The chain-rule split `½I(A;BC|E) = ½I(A;B|E) + ½I(A;C|BE)` for an
/// extension of `ρ_A(BC)`, with each summand certified as a squashed
/// objective value of its own extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquashedAudit {
    /// `½ I(A;BC|E)`.
    pub total: f64,
    /// `½ I(A;B|E)`, an upper bound on `E_sq(ρ_AB)`.
    pub u_ab: f64,
    /// `½ I(A;C|BE)`, an upper bound on `E_sq(ρ_AC)`.
    pub u_ac: f64,
    /// `total - u_ab - u_ac`.
    pub residual: f64,
    pub holds: bool,
}

/// Audits the split for a tripartite `state` (labels `A, B, C` in order) and an
/// extension of it.
pub fn squashed_monogamy_audit(state: &QState, ext: &Extension) -> Result<SquashedAudit> {
    if state.dims().len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "audit needs a tripartite state, got dims {:?}",
            state.dims()
        )));
    }
    let checked = Extension::new(state, ext.state.clone())?;
    let l = state.label_refs();
    let (a, b, cc) = (l[0], l[1], l[2]);
    let e: Vec<&str> = checked.ancilla.iter().map(String::as_str).collect();
    let full = &checked.state;
    let total = 0.5 * entropy::conditional_mutual_information(full, &[a], &[b, cc], &e)?;

    let mut abe_labels = vec![a, b];
    abe_labels.extend(&e);
    let ab_ext = Extension::new(&state.partial_trace(&[a, b])?, full.partial_trace(&abe_labels)?)?;
    let u_ab = squashed_objective(&ab_ext)?;

    let ac_base = state.partial_trace(&[a, cc])?;
    let mut order = vec![a, cc, b];
    order.extend(&e);
    let ac_ext = Extension::new(&ac_base, full.reorder(&order)?)?;
    let u_ac = squashed_objective(&ac_ext)?;

    let residual = total - u_ab - u_ac;
    Ok(SquashedAudit {
        total,
        u_ab,
        u_ac,
        residual,
        holds: residual.abs() <= INEQUALITY_TOL
            && u_ab >= -INEQUALITY_TOL
            && u_ac >= -INEQUALITY_TOL,
    })
}

/// A random extension of `state` through a Haar isometry on its purifying
/// system, with ancilla dimension `ext_dim`.
pub fn random_extension(state: &QState, ext_dim: usize, seed: u64) -> Result<Extension> {
    use rand::SeedableRng;
    let pure = state.purify("R")?;
    let r = *pure.dims().last().unwrap_or(&1);
    let n = state.dim();
    let psi = CMatrix::from_fn(n, r, |i, k| pure.vector()[i * r + k]);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let w = linalg::haar_isometry(&mut rng, ext_dim * r, r);
    let mut xi = CMatrix::zeros(n * ext_dim, r);
    for e in 0..ext_dim {
        let part = &psi * w.rows(e * r, r).transpose();
        for x in 0..n {
            for ep in 0..r {
                xi[(x * ext_dim + e, ep)] = part[(x, ep)];
            }
        }
    }
    let mut dims = state.dims().to_vec();
    dims.push(ext_dim);
    let mut labels = state.labels().to_vec();
    labels.push(fresh_label(&labels, "E"));
    let m = linalg::hermitian_part(&(&xi * xi.adjoint()));
    let ext = Extension::new(state, QState::repaired(dims, labels, m)?)?;
    debug_assert!(ext.state.eigenvalues().iter().all(|&l| l > -EIG_CUTOFF));
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{catalog, random_state, CatalogEntry, PureState};
    use approx::assert_abs_diff_eq;

    fn density(e: CatalogEntry) -> QState {
        catalog(&e).unwrap().to_density()
    }

    fn product_term(seed: u64) -> QState {
        let a = random_state(&[2], 1 + (seed as usize % 2), seed).unwrap();
        let b = random_state(&[2], 2, seed + 100).unwrap().relabel("A", "B").unwrap();
        a.tensor(&b).unwrap()
    }

    #[test]
    fn trivial_extension_gives_half_mutual_information() {
        let s = random_state(&[2, 3], 3, 4).unwrap();
        let ext = Extension::trivial(&s, "E").unwrap();
        assert_abs_diff_eq!(
            squashed_objective(&ext).unwrap(),
            0.5 * entropy::mutual_information(&s, &["A"], &["B"]).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn bell_state_objective_is_one_for_any_extension() {
        let bell = density(CatalogEntry::BellPhi);
        for seed in 0..4 {
            let ext = random_extension(&bell, 3, seed).unwrap();
            assert_abs_diff_eq!(squashed_objective(&ext).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn marginal_contract_is_enforced() {
        let s = density(CatalogEntry::MaxClassicalCorr);
        let other = density(CatalogEntry::BellPhi)
            .tensor(&QState::maximally_mixed(vec![2], &["E"]).unwrap())
            .unwrap();
        assert!(matches!(Extension::new(&s, other), Err(Error::InvalidExtension(_))));
    }

    #[test]
    fn flag_extensions_reach_zero() {
        let mut e0 = CMatrix::zeros(4, 4);
        e0[(0, 0)] = c(1.0, 0.0);
        let mut e1 = CMatrix::zeros(4, 4);
        e1[(3, 3)] = c(1.0, 0.0);
        let t0 = QState::with_labels(vec![2, 2], &["A", "B"], e0).unwrap();
        let t1 = QState::with_labels(vec![2, 2], &["A", "B"], e1).unwrap();
        let ext = flag_extension(&[(0.5, t0), (0.5, t1)]).unwrap();
        assert_eq!(ext.base(), &density(CatalogEntry::MaxClassicalCorr));
        assert!(squashed_objective(&ext).unwrap().abs() <= 1e-9);

        let single = flag_extension(&[(1.0, product_term(1))]).unwrap();
        assert!(squashed_objective(&single).unwrap().abs() <= 1e-9);

        let w = [0.1, 0.2, 0.3, 0.4];
        let terms: Vec<(f64, QState)> = (0..4).map(|i| (w[i], product_term(10 + i as u64))).collect();
        let ext = flag_extension(&terms).unwrap();
        assert!(squashed_objective(&ext).unwrap().abs() <= 1e-9);
        assert!(entropy::mutual_information(ext.base(), &["A"], &["B"]).unwrap() > 1e-6);

        let bad = flag_extension(&[(1.0, density(CatalogEntry::BellPhi))]);
        assert!(matches!(bad, Err(Error::NonProductTerm(0))));
    }

    #[test]
    fn search_matches_direct_evaluation_and_stays_below_trivial() {
        let s = density(CatalogEntry::Werner(0.9));
        let r = optimize_squashed_ub(&s, Some(2), &Budget::new(3_000), &[]).unwrap();
        let half_mi = 0.5 * entropy::mutual_information(&s, &["A"], &["B"]).unwrap();
        assert!(r.value <= half_mi + 1e-9);
        assert_eq!(r.argument.ancilla_dim(), 2);
        let search = {
            let mut q = SquashedSearch::new(&s).unwrap();
            q.cap = 2;
            q
        };
        assert_abs_diff_eq!(search.value(r.argument.isometry().unwrap()), r.value, epsilon = 1e-9);
    }

    #[test]
    fn pure_state_floor() {
        let psi = PureState::normalized(
            vec![2, 2],
            vec!["A".into(), "B".into()],
            nalgebra::DVector::from_vec(vec![c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)]),
        )
        .unwrap()
        .to_density();
        let r = optimize_squashed_ub(&psi, Some(3), &Budget::new(500), &[]).unwrap();
        let sa = entropy::marginal_entropy(&psi, &["A"]).unwrap();
        assert_abs_diff_eq!(r.value, sa, epsilon = 1e-6);
    }

    #[test]
    fn seeded_larger_cap_is_no_worse() {
        let s = random_state(&[2, 2], 2, 17).unwrap();
        let small = optimize_squashed_ub(&s, Some(2), &Budget::new(2_000), &[]).unwrap();
        let seed = embed_isometry(small.argument.isometry().unwrap(), 2, 4).unwrap();
        let big = optimize_squashed_ub(&s, Some(4), &Budget::new(2_000), &[seed]).unwrap();
        assert!(big.value <= small.value + 1e-9);
    }

    #[test]
    fn audit_splits_exactly() {
        let ghz = density(CatalogEntry::Ghz);
        let ext = Extension::trivial(&ghz, "E").unwrap();
        let a = squashed_monogamy_audit(&ghz, &ext).unwrap();
        // ½I(A;BC) = 1, ½I(A;B) = ½, ½I(A;C|B) = ½
        assert_abs_diff_eq!(a.total, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.u_ab, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a.u_ac, 0.5, epsilon = 1e-12);
        assert!(a.holds);
        for seed in 0..5 {
            let s = random_state(&[2, 2, 2], 3, seed).unwrap();
            let ext = random_extension(&s, 2, seed + 50).unwrap();
            let a = squashed_monogamy_audit(&s, &ext).unwrap();
            assert!(a.residual.abs() <= 1e-9 && a.holds);
        }
    }
}
