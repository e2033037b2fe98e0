//! The two dual optimizers relating entanglement of formation and the
//! one-way classical correlation `I←`, the maps between their arguments, and
//! a driver that certifies `E_f(ρ_AB) + I←(ρ_AB') = S(ρ_A)` numerically.
//!
//! Both searches run over rank-1 POVMs written as isometries `V` (rows are
//! outcomes). An ensemble of `ρ_AB = Σ_k λ_k |v_k><v_k|` is the steered
//! ensemble `√p_i |ψ_i> = Σ_k V_ik √λ_k |v_k>`, which is exactly the result of
//! measuring the rank-1 POVM with isometry `V` on the purifying system.

pub mod stiefel;
pub mod wootters;

use serde::Serialize;

use crate::entropy;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, EIG_CUTOFF};
use crate::povm::{self, LabeledEnsemble, MeasuredLast, Povm};
use crate::qstate::{PureState, QState, State};

pub use stiefel::Budget;
use stiefel::{minimize, pad_rows, Objective, SearchOutcome};
pub use wootters::{concurrence, wootters_eof};

/// Which side of the true value a reported number lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundDirection {
    #[serde(rename = "upper_bound")]
    Upper,
    #[serde(rename = "lower_bound")]
    Lower,
    #[serde(rename = "exact")]
    Exact,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult<T> {
    /// Objective value of `argument`, in bits.
    pub value: f64,
    pub argument: T,
    pub direction: BoundDirection,
    pub restarts_used: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Distance from the best to the median restart value; a ruggedness
    /// indicator, not a certificate.
    pub gap_estimate: f64,
    pub best_so_far: Vec<f64>,
}

/// `Σ_i p_i S(Tr_rest |ψ_i><ψ_i|)` with the reduced state taken on the first
/// subsystem. Every member must be pure to within `1e-8`.
pub fn ensemble_cost(e: &LabeledEnsemble) -> Result<f64> {
    let members = e.pure_members()?;
    let first = e.labels()[0].clone();
    let mut total = 0.0;
    for (p, psi) in &members {
        if *p <= 0.0 {
            continue;
        }
        let reduced = psi.partial_trace(&[first.as_str()])?;
        total += p * entropy::von_neumann(&reduced);
    }
    Ok(total)
}

fn bipartite_labels(state: &QState) -> Result<(String, String)> {
    match state.labels() {
        [a, b] => Ok((a.clone(), b.clone())),
        other => Err(Error::DimensionMismatch(format!(
            "expected a bipartite state, got labels {other:?}"
        ))),
    }
}

/// Objective of the ensemble search: weighted marginal entropies of the
/// steered members.
struct EofObjective {
    /// Column `k` is `√λ_k |v_k>`.
    columns: CMatrix,
    dims: [usize; 2],
}

impl EofObjective {
    fn member(&self, v: &CMatrix, i: usize) -> CVector {
        &self.columns * v.row(i).transpose()
    }

    fn member_entropy(&self, psi: &CVector) -> f64 {
        let [da, db] = self.dims;
        // reshape |ψ> into a da x db coefficient matrix
        let y = CMatrix::from_fn(da, db, |a, b| psi[a * db + b]);
        let sigma = if da <= db {
            &y * y.adjoint()
        } else {
            y.adjoint() * &y
        };
        linalg::weighted_entropy_bits(&sigma)
    }
}

impl Objective for EofObjective {
    fn shape(&self) -> (usize, usize) {
        let r = self.columns.ncols();
        (r * r, r)
    }

    fn value(&self, v: &CMatrix) -> f64 {
        (0..v.nrows())
            .map(|i| self.member_entropy(&self.member(v, i)))
            .sum()
    }
}

/// Spectral data of `ρ_AB` shared by the ensemble search and the maps
/// between ensembles and isometries.
struct Spectral {
    lambdas: Vec<f64>,
    vecs: CMatrix,
}

impl Spectral {
    fn new(state: &QState) -> Self {
        let (vals, vecs) = linalg::eigh(state.matrix());
        let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > EIG_CUTOFF).collect();
        let mut v = CMatrix::zeros(vecs.nrows(), kept.len());
        for (j, &k) in kept.iter().enumerate() {
            v.set_column(j, &vecs.column(k));
        }
        Spectral {
            lambdas: kept.iter().map(|&k| vals[k]).collect(),
            vecs: v,
        }
    }

    fn rank(&self) -> usize {
        self.lambdas.len()
    }

    fn columns(&self) -> CMatrix {
        let mut x = self.vecs.clone();
        for (k, l) in self.lambdas.iter().enumerate() {
            let mut col = x.column_mut(k);
            col *= c(l.sqrt(), 0.0);
        }
        x
    }

    /// Isometry rows `V_ik = <v_k|√p_i ψ_i> / √λ_k` of an ensemble.
    fn isometry_of(&self, e: &LabeledEnsemble) -> Result<CMatrix> {
        let members = e.pure_members()?;
        let r = self.rank();
        let mut v = CMatrix::zeros(members.len(), r);
        for (i, (p, psi)) in members.iter().enumerate() {
            let w = psi.vector() * c(p.sqrt(), 0.0);
            for k in 0..r {
                v[(i, k)] = self.vecs.column(k).dotc(&w) / c(self.lambdas[k].sqrt(), 0.0);
            }
        }
        Ok(v)
    }
}

fn ensemble_from_isometry(
    columns: &CMatrix,
    v: &CMatrix,
    dims: &[usize],
    labels: &[String],
) -> Result<LabeledEnsemble> {
    let mut items = Vec::new();
    for i in 0..v.nrows() {
        let psi = columns * v.row(i).transpose();
        let p = psi.norm_squared();
        if p > povm::ZERO_PROBABILITY {
            items.push((
                i,
                p,
                PureState::from_trusted(dims.to_vec(), labels.to_vec(), psi / c(p.sqrt(), 0.0)),
            ));
        }
    }
    let total: f64 = items.iter().map(|t| t.1).sum();
    LabeledEnsemble::new(
        items
            .into_iter()
            .map(|(outcome, p, s)| povm::EnsembleMember {
                outcome,
                probability: p / total,
                state: State::Pure(s),
            })
            .collect(),
    )
}

fn pure_short_circuit(state: &QState) -> Result<OptimizationResult<LabeledEnsemble>> {
    let (a, _) = bipartite_labels(state)?;
    let (_, vecs) = linalg::eigh(state.matrix());
    let psi = PureState::from_trusted(
        state.dims().to_vec(),
        state.labels().to_vec(),
        vecs.column(0).into_owned(),
    );
    let value = entropy::marginal_entropy(state, &[a.as_str()])?;
    Ok(OptimizationResult {
        value,
        argument: LabeledEnsemble::from_pure(vec![(1.0, psi)])?,
        direction: BoundDirection::Upper,
        restarts_used: 0,
        evaluations: 0,
        converged: true,
        gap_estimate: 0.0,
        best_so_far: vec![value],
    })
}

/// Upper bound on `E_f(ρ_AB)` from the best ensemble found.
pub fn optimize_eof(state: &QState, budget: &Budget) -> Result<OptimizationResult<LabeledEnsemble>> {
    optimize_eof_seeded(state, budget, &[])
}

/// [`optimize_eof`] with extra starting ensembles (each must reconstruct the
/// state). The result is never worse than the best seed.
pub fn optimize_eof_seeded(
    state: &QState,
    budget: &Budget,
    seeds: &[LabeledEnsemble],
) -> Result<OptimizationResult<LabeledEnsemble>> {
    bipartite_labels(state)?;
    let spectral = Spectral::new(state);
    let r = spectral.rank();
    if r <= 1 {
        return pure_short_circuit(state);
    }
    let obj = EofObjective {
        columns: spectral.columns(),
        dims: [state.dims()[0], state.dims()[1]],
    };
    let rows = r * r;
    let mut starts = vec![pad_rows(&CMatrix::identity(r, r), rows)];
    for s in seeds {
        if s.reconstruction_error(state) > 1e-9 {
            return Err(Error::InconsistentEnsemble(
                "seed ensemble does not reconstruct the state".into(),
            ));
        }
        let v = spectral.isometry_of(s)?;
        if v.nrows() <= rows {
            starts.push(pad_rows(&v, rows));
        }
    }
    let out: SearchOutcome = minimize(&obj, budget, &starts);
    let ensemble = ensemble_from_isometry(&obj.columns, &out.point, state.dims(), state.labels())?;
    let value = ensemble_cost(&ensemble)?;
    Ok(OptimizationResult {
        value,
        argument: ensemble,
        direction: BoundDirection::Upper,
        restarts_used: out.restarts_used,
        evaluations: out.evaluations,
        converged: out.converged,
        gap_estimate: out.restart_spread(),
        best_so_far: out.best_so_far,
    })
}

/// Objective of the measurement search: `Σ_x p_x S(ρ_x)` for the rank-1 POVM
/// whose isometry is `V`.
struct HolevoObjective {
    measured: MeasuredLast,
}

impl Objective for HolevoObjective {
    fn shape(&self) -> (usize, usize) {
        let d = self.measured.d;
        (d * d, d)
    }

    fn value(&self, v: &CMatrix) -> f64 {
        (0..v.nrows())
            .map(|i| linalg::weighted_entropy_bits(&self.measured.reduce_row(v, i)))
            .sum()
    }
}

/// Lower bound on `I←(ρ_AB)`: the best Holevo quantity over rank-1 POVMs
/// with at most `d²` outcomes on the second subsystem.
pub fn optimize_holevo(state: &QState, budget: &Budget) -> Result<OptimizationResult<Povm>> {
    let (_, b) = bipartite_labels(state)?;
    optimize_holevo_on(state, &b, budget, &[])
}

/// Holevo maximization for a POVM on `target`, with every other subsystem as
/// the quantum side. Seed POVMs are rank-1 refined before use.
pub fn optimize_holevo_on(
    state: &QState,
    target: &str,
    budget: &Budget,
    seeds: &[Povm],
) -> Result<OptimizationResult<Povm>> {
    let measured = MeasuredLast::new(state, target)?;
    let d = measured.d;
    let rest: Vec<&str> = measured.rest_labels.iter().map(String::as_str).collect();
    if rest.is_empty() {
        return Err(Error::InvalidParameter(
            "measured subsystem is the whole state".into(),
        ));
    }
    let s_rest = entropy::marginal_entropy(state, &rest)?;
    if d == 1 {
        return Ok(OptimizationResult {
            value: 0.0,
            argument: Povm::trivial(target, 1),
            direction: BoundDirection::Lower,
            restarts_used: 0,
            evaluations: 0,
            converged: true,
            gap_estimate: 0.0,
            best_so_far: vec![0.0],
        });
    }
    let rows = d * d;
    let mut starts = vec![pad_rows(&CMatrix::identity(d, d), rows)];
    for s in seeds {
        if s.target() != target || s.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "seed POVM on `{}` does not fit `{target}`",
                s.target()
            )));
        }
        let refined = povm::rank1_refine(s)?.povm;
        let v = refined.to_isometry()?;
        if v.nrows() <= rows {
            starts.push(pad_rows(&v, rows));
        }
    }
    let obj = HolevoObjective { measured };
    let out = minimize(&obj, budget, &starts);
    let argument = Povm::from_isometry_rows(target, &out.point);
    let value = povm::holevo_quantity(state, &argument)?;
    Ok(OptimizationResult {
        value,
        argument,
        direction: BoundDirection::Lower,
        restarts_used: out.restarts_used,
        evaluations: out.evaluations,
        converged: out.converged,
        gap_estimate: out.restart_spread(),
        best_so_far: out.best_so_far.iter().map(|f| s_rest - f).collect(),
    })
}

/// Splits a purification into the ensemble's subsystems and the single
/// remaining purifying label.
fn purifier_label(purification: &PureState, ensemble_labels: &[String]) -> Result<String> {
    let extra: Vec<&String> = purification
        .labels()
        .iter()
        .filter(|l| !ensemble_labels.contains(l))
        .collect();
    match extra.as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(Error::InvalidParameter(format!(
            "purification labels {:?} must extend {:?} by exactly one subsystem",
            purification.labels(),
            ensemble_labels
        ))),
    }
}

/// The POVM on the purifying system that steers `purification` into the
/// ensemble `e` of its marginal.
///
/// Writing the purification as `Σ_j |x_j> ⊗ |j>`, the element for member `i`
/// is `|m_i><m_i|` with `conj(m_i) = X⁺ √p_i |ψ_i>`. If the purifying system is
/// larger than the rank of the marginal, the unused subspace is added as one
/// more (never triggered) element.
pub fn ensemble_to_measurement(purification: &PureState, e: &LabeledEnsemble) -> Result<Povm> {
    let labels = e.labels().to_vec();
    let purifier = purifier_label(purification, &labels)?;
    let rows: Vec<usize> = {
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        purification.indices(&refs)?
    };
    let x = linalg::reshape_bipartite(purification.dims(), purification.vector(), &rows);
    // ensemble member vectors live in the order of `labels`, which `rows` follows
    let pinv = x
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-9)
        .map_err(|m| Error::InconsistentEnsemble(m.to_string()))?;
    let d = x.ncols();
    let mut elements = Vec::new();
    for (i, (p, psi)) in e.pure_members()?.iter().enumerate() {
        let w = psi.vector() * c(p.sqrt(), 0.0);
        if w.len() != x.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "member {i} has dimension {}, marginal has {}",
                w.len(),
                x.nrows()
            )));
        }
        let cm = &pinv * &w;
        let resid = (&x * &cm - &w).norm();
        if resid > 1e-8 {
            return Err(Error::InconsistentEnsemble(format!(
                "member {i} leaves the support of the marginal (residual {resid:.3e})"
            )));
        }
        let m = cm.map(|z| z.conj());
        elements.push(linalg::outer(&m));
    }
    let sum: CMatrix = elements.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m);
    let rest = CMatrix::identity(d, d) - sum;
    if linalg::max_abs(&rest) > 1e-8 {
        let min = linalg::eigvalsh(&rest).last().copied().unwrap_or(0.0);
        if min < -1e-8 {
            return Err(Error::InconsistentEnsemble(format!(
                "ensemble does not average to the marginal (excess {:.3e})",
                -min
            )));
        }
        elements.push(linalg::hermitian_part(&rest));
    }
    Povm::new(purifier, elements)
}

/// Steers `purification` with a rank-1 POVM on its purifying system, giving
/// a pure-state ensemble of the marginal.
pub fn measurement_to_ensemble(purification: &PureState, p: &Povm) -> Result<LabeledEnsemble> {
    if !p.is_rank_one() {
        return Err(Error::InvalidPovm(
            "measurement_to_ensemble needs rank-1 elements; refine first".into(),
        ));
    }
    povm::steer(purification, p)
}

/// Outcome of [`duality_drive`].
#[derive(Debug, Clone)]
pub struct DualityReport {
    /// Best `E_f` upper bound.
    pub f_best: f64,
    /// Best `I←` lower bound on the complement.
    pub g_best: f64,
    pub s_a: f64,
    /// `S(ρ_A) - F - G`; negative beyond `-1e-8` would mean a soundness bug.
    pub duality_gap: f64,
    /// Gap between the first two independent (unseeded) runs.
    pub independent_gap: f64,
    pub converged: bool,
    pub rounds: usize,
    pub evaluations: usize,
    pub ensemble: LabeledEnsemble,
    pub povm: Povm,
    pub complement: QState,
    pub purification: PureState,
}

fn fresh_label(taken: &[String], base: &str) -> String {
    let mut l = format!("{base}'");
    while taken.contains(&l) {
        l.push('\'');
    }
    l
}

/// Alternates the ensemble search on `ρ_AB` with the measurement search on
/// its complement, feeding each the other's mapped argument, until
/// `S(ρ_A) - F_best - G_best <= gap_tol` or the budget is spent.
pub fn duality_drive(state: &QState, budget: &Budget, gap_tol: f64) -> Result<DualityReport> {
    let (a, b) = bipartite_labels(state)?;
    let anc = fresh_label(state.labels(), &b);
    let s_a = entropy::marginal_entropy(state, &[a.as_str()])?;
    let purification = state.purify(&anc)?;
    let complement = purification.partial_trace(&[a.as_str(), anc.as_str()])?;

    if state.rank() <= 1 {
        let eof = pure_short_circuit(state)?;
        return Ok(DualityReport {
            f_best: eof.value,
            g_best: 0.0,
            s_a,
            duality_gap: s_a - eof.value,
            independent_gap: s_a - eof.value,
            converged: true,
            rounds: 0,
            evaluations: 0,
            ensemble: eof.argument,
            povm: Povm::trivial(anc, 1),
            complement,
            purification,
        });
    }

    let quarter = (budget.evaluations / 4).max(1);
    let eof = optimize_eof(state, &budget.scaled(quarter))?;
    let hol = optimize_holevo_on(&complement, &anc, &budget.scaled(quarter).with_seed(budget.seed ^ 0x5eed), &[])?;
    let mut evaluations = eof.evaluations + hol.evaluations;
    let independent_gap = s_a - eof.value - hol.value;

    let mut f_best = eof.value;
    let mut ensemble = eof.argument;
    let mut g_best = hol.value;
    let mut best_povm = hol.argument;
    let mut rounds = 1;
    let mut remaining = budget.evaluations.saturating_sub(evaluations);

    loop {
        // cross-map both incumbents
        let mapped_povm = ensemble_to_measurement(&purification, &ensemble)?;
        let g_mapped = povm::holevo_quantity(&complement, &mapped_povm)?;
        if g_mapped > g_best {
            g_best = g_mapped;
            best_povm = mapped_povm;
        }
        let refined = povm::rank1_refine(&best_povm)?.povm;
        let mapped_ens = measurement_to_ensemble(&purification, &refined)?;
        let f_mapped = ensemble_cost(&mapped_ens)?;
        if f_mapped < f_best {
            f_best = f_mapped;
            ensemble = mapped_ens;
        }
        let gap = s_a - f_best - g_best;
        if gap <= gap_tol || remaining < 2 * 64 {
            return Ok(DualityReport {
                f_best,
                g_best,
                s_a,
                duality_gap: gap,
                independent_gap,
                converged: gap <= gap_tol,
                rounds,
                evaluations,
                ensemble,
                povm: best_povm,
                complement,
                purification,
            });
        }
        let share = remaining / 2;
        let seed = budget.seed.wrapping_add(rounds as u64);
        let e2 = optimize_eof_seeded(state, &budget.scaled(share / 2).with_seed(seed), &[ensemble.clone()])?;
        let h2 = optimize_holevo_on(
            &complement,
            &anc,
            &budget.scaled(share / 2).with_seed(seed ^ 0x5eed),
            &[best_povm.clone()],
        )?;
        evaluations += e2.evaluations + h2.evaluations;
        remaining = remaining.saturating_sub(e2.evaluations + h2.evaluations).min(remaining / 2);
        if e2.value < f_best {
            f_best = e2.value;
            ensemble = e2.argument;
        }
        if h2.value > g_best {
            g_best = h2.value;
            best_povm = h2.argument;
        }
        rounds += 1;
    }
}
