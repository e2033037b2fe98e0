//! Single-letter one-way rate functionals: Holevo information between
//! measurement outcomes and quantum systems, the one-shot secret-key
//! functional `I(X;A) - I(X;E)`, the coherent-information functional under a
//! local instrument, and the chain inequality that makes secret key
//! monogamous.
//!
//! Classical outcomes are embedded as diagonal register subsystems, so every
//! `I(X;·)` is an ordinary quantum mutual information.

use serde::Serialize;

use crate::entropy::{self, INEQUALITY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, EIG_CUTOFF};
use crate::povm::{self, measure_into_register, random_povm, MeasuredLast, Povm};
use crate::qstate::QState;
use crate::variational::stiefel::{minimize, pad_rows, Budget, Objective};
use crate::variational::{BoundDirection, OptimizationResult};

/// A measurement applied to the source state and the register holding its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub povm: Povm,
    pub register: String,
}

/// The classical-quantum state left after measuring some subsystems of a
/// source state, with each outcome stored in a register.
#[derive(Debug, Clone, PartialEq)]
pub struct CqExtensionRecord {
    state: QState,
    measurements: Vec<MeasurementRecord>,
}

impl CqExtensionRecord {
    /// Applies the measurements in order; each register replaces its measured
    /// subsystem in place.
    pub fn new(source: &QState, measurements: Vec<MeasurementRecord>) -> Result<Self> {
        let mut state = source.clone();
        for m in &measurements {
            state = measure_into_register(&state, &m.povm, &m.register)?;
        }
        Ok(CqExtensionRecord {
            state,
            measurements,
        })
    }

    pub fn state(&self) -> &QState {
        &self.state
    }

    pub fn measurements(&self) -> &[MeasurementRecord] {
        &self.measurements
    }

    fn check_registers(&self, outcome: &[&str]) -> Result<()> {
        for o in outcome {
            if !self.measurements.iter().any(|m| m.register == *o) {
                return Err(Error::UnknownLabel((*o).to_string()));
            }
        }
        Ok(())
    }

    /// Joint outcome distribution of the named registers, in the registers'
    /// product basis.
    pub fn distribution(&self, outcome: &[&str]) -> Result<Vec<f64>> {
        self.check_registers(outcome)?;
        let reduced = self.state.partial_trace(outcome)?;
        // reduced keeps state order; reorder to the caller's order
        let reduced = reduced.reorder(outcome)?;
        Ok((0..reduced.dim()).map(|i| reduced.matrix()[(i, i)].re).collect())
    }
}

/// `I(X;Q) = S(Σ p_x ρ_x) - Σ p_x S(ρ_x)` between the named registers and a
/// quantum selector, computed as the mutual information of the embedded state.
pub fn classical_quantum_mi(record: &CqExtensionRecord, outcome: &[&str], quantum: &[&str]) -> Result<f64> {
    record.check_registers(outcome)?;
    if quantum.is_empty() {
        return Ok(0.0);
    }
    entropy::mutual_information(&record.state, outcome, quantum)
}

fn fresh(taken: &[String], base: &str) -> String {
    let mut l = base.to_string();
    while taken.contains(&l) {
        l.push('#');
    }
    l
}

/// `I(X;A) - I(X;E)` for the outcome `X` of `p` on its target subsystem.
/// An empty `e` is the trivial eavesdropper.
pub fn csecret1_value(state: &QState, p: &Povm, a: &[&str], e: &[&str]) -> Result<f64> {
    let x = fresh(state.labels(), "X");
    let record = CqExtensionRecord::new(
        state,
        vec![MeasurementRecord {
            povm: p.clone(),
            register: x.clone(),
        }],
    )?;
    let i_xa = classical_quantum_mi(&record, &[x.as_str()], a)?;
    let i_xe = classical_quantum_mi(&record, &[x.as_str()], e)?;
    Ok(i_xa - i_xe)
}

/// Search objective for `-(I(X;A) - I(X;E))` up to constants:
/// `Σ_x [p_x S(ρ_x^A) - p_x S(ρ_x^E)]`.
struct SecretKeyObjective {
    measured: MeasuredLast,
    a: Vec<usize>,
    e: Vec<usize>,
}

impl Objective for SecretKeyObjective {
    fn shape(&self) -> (usize, usize) {
        let d = self.measured.d;
        (d * d, d)
    }

    fn value(&self, v: &CMatrix) -> f64 {
        let dims = &self.measured.rest_dims;
        (0..v.nrows())
            .map(|i| {
                let post = self.measured.reduce_row(v, i);
                let sa = linalg::weighted_entropy_bits(&linalg::partial_trace(dims, &post, &self.a));
                let se = if self.e.is_empty() {
                    0.0
                } else {
                    linalg::weighted_entropy_bits(&linalg::partial_trace(dims, &post, &self.e))
                };
                sa - se
            })
            .sum()
    }
}

/// Lower bound on the one-shot secret key `max_X [I(X;A) - I(X;E)]` over
/// rank-1 POVMs on `target` with at most `d²` outcomes.
pub fn optimize_csecret1(
    state: &QState,
    target: &str,
    a: &[&str],
    e: &[&str],
    budget: &Budget,
) -> Result<OptimizationResult<Povm>> {
    let measured = MeasuredLast::new(state, target)?;
    let rest: Vec<&str> = measured.rest_labels.iter().map(String::as_str).collect();
    let lookup = |sel: &[&str]| -> Result<Vec<usize>> {
        sel.iter()
            .map(|l| {
                rest.iter()
                    .position(|r| r == l)
                    .ok_or_else(|| Error::UnknownLabel((*l).to_string()))
            })
            .collect()
    };
    let mut ai = lookup(a)?;
    let mut ei = lookup(e)?;
    ai.sort_unstable();
    ei.sort_unstable();
    if ai.iter().any(|k| ei.contains(k)) {
        return Err(Error::OverlappingSelectors(format!("{a:?} / {e:?}")));
    }
    let d = measured.d;
    let obj = SecretKeyObjective {
        measured,
        a: ai,
        e: ei,
    };
    let start = pad_rows(&CMatrix::identity(d, d), d * d);
    let out = minimize(&obj, budget, &[start]);
    let argument = Povm::from_isometry_rows(target, &out.point);
    let value = csecret1_value(state, &argument, a, e)?;
    Ok(OptimizationResult {
        value,
        argument,
        direction: BoundDirection::Lower,
        restarts_used: out.restarts_used,
        evaluations: out.evaluations,
        converged: out.converged,
        gap_estimate: out.restart_spread(),
        best_so_far: out.best_so_far.iter().map(|f| -f).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop1Trial {
    pub outcomes: usize,
    /// `I(X;A)`: the classical-correlation side.
    pub cr_value: f64,
    /// `I(X;A) - I(X;E)`: the secret-key side.
    pub key_value: f64,
    /// `I(X;E)`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop1Report {
    pub trials: Vec<Prop1Trial>,
    pub min_slack: f64,
    pub holds: bool,
}

/// For random POVMs on the second subsystem of a bipartite state, with the
/// purifying system as eavesdropper, checks `I(X;A) >= I(X;A) - I(X;E)`.
pub fn proposition1_check(state: &QState, trials: usize, seed: u64) -> Result<Prop1Report> {
    let (a, b) = match state.labels() {
        [a, b] => (a.clone(), b.clone()),
        other => {
            return Err(Error::DimensionMismatch(format!(
                "expected a bipartite state, got {other:?}"
            )))
        }
    };
    let e = fresh(state.labels(), "E");
    let abe = state.purify(&e)?.to_density();
    let db = state.dims()[1];
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let n = 1 + (t % (db * db));
        let p = random_povm(&b, db, n, seed.wrapping_add(t as u64))?;
        let x = fresh(abe.labels(), "X");
        let record = CqExtensionRecord::new(
            &abe,
            vec![MeasurementRecord {
                povm: p,
                register: x.clone(),
            }],
        )?;
        let cr = classical_quantum_mi(&record, &[x.as_str()], &[a.as_str()])?;
        let leak = classical_quantum_mi(&record, &[x.as_str()], &[e.as_str()])?;
        out.push(Prop1Trial {
            outcomes: n,
            cr_value: cr,
            key_value: cr - leak,
            slack: cr - (cr - leak),
        });
    }
    let min_slack = out.iter().map(|t| t.slack).fold(f64::INFINITY, f64::min);
    Ok(Prop1Report {
        holds: out.iter().all(|t| t.slack >= -INEQUALITY_TOL),
        min_slack: if out.is_empty() { 0.0 } else { min_slack },
        trials: out,
    })
}

/// A local instrument on `target`: one list of Kraus operators per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    target: String,
    maps: Vec<Vec<CMatrix>>,
}

impl Instrument {
    /// Validates that the maps sum to a trace-preserving map within `1e-9`.
    pub fn new(target: impl Into<String>, maps: Vec<Vec<CMatrix>>) -> Result<Self> {
        let d = maps
            .iter()
            .flatten()
            .next()
            .map(|k| k.ncols())
            .ok_or_else(|| Error::InvalidInstrument("no Kraus operators".into()))?;
        let mut sum = CMatrix::zeros(d, d);
        for k in maps.iter().flatten() {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::InvalidInstrument(format!(
                    "Kraus operator of shape {:?}, expected {d}x{d}",
                    k.shape()
                )));
            }
            sum += k.adjoint() * k;
        }
        let dev = linalg::max_abs_diff(&sum, &CMatrix::identity(d, d));
        if dev > 1e-9 {
            return Err(Error::InvalidInstrument(format!(
                "not trace preserving (deviation {dev:.3e})"
            )));
        }
        Ok(Instrument {
            target: target.into(),
            maps,
        })
    }

    pub fn identity(target: impl Into<String>, dim: usize) -> Self {
        Instrument {
            target: target.into(),
            maps: vec![vec![CMatrix::identity(dim, dim)]],
        }
    }

    /// Single-Kraus instrument from the `d x d` row blocks of an isometry.
    pub fn from_isometry_blocks(target: impl Into<String>, v: &CMatrix) -> Self {
        let d = v.ncols();
        Instrument {
            target: target.into(),
            maps: (0..v.nrows() / d)
                .map(|i| vec![v.rows(i * d, d).into_owned()])
                .collect(),
        }
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn maps(&self) -> &[Vec<CMatrix>] {
        &self.maps
    }
}

fn branch_value(state_dims: &[usize], a: &[usize], rho: &CMatrix) -> f64 {
    // p·[S(ρ_A) - S(ρ_AB)] for an unnormalized branch
    linalg::weighted_entropy_bits(&linalg::partial_trace(state_dims, rho, a))
        - linalg::weighted_entropy_bits(rho)
}

/// `Σ_i p_i [S(ρ_A^(i)) - S(ρ_AB^(i))]` after applying `inst` to its target
/// subsystem; `A` is every other subsystem. A lower bound on the one-shot
/// one-way distillable entanglement.
pub fn ed1_value(state: &QState, inst: &Instrument) -> Result<f64> {
    let site = state.indices(&[inst.target.as_str()])?[0];
    let d = state.dims()[site];
    if inst.maps.iter().flatten().any(|k| k.nrows() != d) {
        return Err(Error::DimensionMismatch(format!(
            "instrument acts on dimension {}, subsystem has {d}",
            inst.maps[0][0].nrows()
        )));
    }
    let a: Vec<usize> = (0..state.dims().len()).filter(|&k| k != site).collect();
    let mut total = 0.0;
    for map in &inst.maps {
        let mut branch = CMatrix::zeros(state.dim(), state.dim());
        for k in map {
            let big = linalg::embed_local(state.dims(), site, k);
            branch += &big * state.matrix() * big.adjoint();
        }
        if linalg::trace(&branch).re > povm::ZERO_PROBABILITY {
            total += branch_value(state.dims(), &a, &linalg::hermitian_part(&branch));
        }
    }
    Ok(total)
}

struct InstrumentObjective {
    state: QState,
    site: usize,
    a: Vec<usize>,
}

impl Objective for InstrumentObjective {
    fn shape(&self) -> (usize, usize) {
        let d = self.state.dims()[self.site];
        (d * d, d)
    }

    fn value(&self, v: &CMatrix) -> f64 {
        let d = v.ncols();
        let dims = self.state.dims();
        -(0..v.nrows() / d)
            .map(|i| {
                let k = v.rows(i * d, d).into_owned();
                let big = linalg::embed_local(dims, self.site, &k);
                let branch = linalg::hermitian_part(&(&big * self.state.matrix() * big.adjoint()));
                if linalg::trace(&branch).re > EIG_CUTOFF {
                    branch_value(dims, &self.a, &branch)
                } else {
                    0.0
                }
            })
            .sum::<f64>()
    }
}

/// Lower bound on the one-shot one-way distillable entanglement, searching
/// single-Kraus instruments with `d` outcomes on `target` (the identity
/// instrument is the first start, so the result is at least the coherent
/// information).
pub fn optimize_ed1(state: &QState, target: &str, budget: &Budget) -> Result<OptimizationResult<Instrument>> {
    let site = state.indices(&[target])?[0];
    let d = state.dims()[site];
    let a: Vec<usize> = (0..state.dims().len()).filter(|&k| k != site).collect();
    if a.is_empty() {
        return Err(Error::InvalidParameter(
            "instrument target is the whole state".into(),
        ));
    }
    let obj = InstrumentObjective {
        state: state.clone(),
        site,
        a,
    };
    let start = pad_rows(&CMatrix::identity(d, d), d * d);
    let out = minimize(&obj, budget, &[start]);
    let argument = Instrument::from_isometry_blocks(target, &out.point);
    let value = ed1_value(state, &argument)?;
    Ok(OptimizationResult {
        value,
        argument,
        direction: BoundDirection::Lower,
        restarts_used: out.restarts_used,
        evaluations: out.evaluations,
        converged: out.converged,
        gap_estimate: out.restart_spread(),
        best_so_far: out.best_so_far.iter().map(|f| -f).collect(),
    })
}

/// Every term of the secret-key chain inequality
/// `[I(X;A)-I(X;E)] + [I(Y;A)-I(Y;BE)] <= I(XY;A) - I(XY;E)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub i_x_a: f64,
    pub i_x_e: f64,
    pub i_y_a: f64,
    pub i_y_be: f64,
    pub i_y_a_given_x: f64,
    pub i_xy_a: f64,
    pub i_xy_e: f64,
    pub left: f64,
    pub right: f64,
    pub slack: f64,
    /// `I(X;A) + I(Y;A|X) - I(XY;A)`, zero by the chain rule.
    pub chain_identity_residual: f64,
    /// Largest deviation between the joint outcome distribution's marginals
    /// and the single-measurement distributions.
    pub marginal_consistency: f64,
    pub holds: bool,
}

/// Measures `p_b` (outcome X) and `p_c` (outcome Y) on a state containing
/// `a` and the optional eavesdropper `e`, and evaluates both sides of the
/// chain inequality together with the chain-rule identity behind it.
pub fn chain_inequality_check(state: &QState, p_b: &Povm, p_c: &Povm, a: &[&str], e: &[&str]) -> Result<ChainReport> {
    let b = p_b.target().to_string();
    if b == p_c.target() {
        return Err(Error::OverlappingSelectors(b));
    }
    for l in a.iter().chain(e) {
        if *l == b || *l == p_c.target() {
            return Err(Error::OverlappingSelectors((*l).to_string()));
        }
    }
    let x = fresh(state.labels(), "X");
    let y = fresh(&[state.labels(), std::slice::from_ref(&x)].concat(), "Y");
    let mx = MeasurementRecord {
        povm: p_b.clone(),
        register: x.clone(),
    };
    let my = MeasurementRecord {
        povm: p_c.clone(),
        register: y.clone(),
    };
    let both = CqExtensionRecord::new(state, vec![mx.clone(), my.clone()])?;
    let only_y = CqExtensionRecord::new(state, vec![my])?;
    let only_x = CqExtensionRecord::new(state, vec![mx])?;
    let xs = [x.as_str()];
    let ys = [y.as_str()];
    let xy = [x.as_str(), y.as_str()];

    let i_x_a = classical_quantum_mi(&both, &xs, a)?;
    let i_x_e = classical_quantum_mi(&both, &xs, e)?;
    let i_xy_a = classical_quantum_mi(&both, &xy, a)?;
    let i_xy_e = classical_quantum_mi(&both, &xy, e)?;
    let i_y_a_given_x = entropy::conditional_mutual_information(both.state(), &ys, a, &xs)?;
    let i_y_a = classical_quantum_mi(&only_y, &ys, a)?;
    let be: Vec<&str> = std::iter::once(b.as_str()).chain(e.iter().copied()).collect();
    let i_y_be = classical_quantum_mi(&only_y, &ys, &be)?;

    let joint = both.distribution(&xy)?;
    let px = only_x.distribution(&xs)?;
    let py = only_y.distribution(&ys)?;
    let ny = py.len();
    let mut consistency: f64 = 0.0;
    for (i, p) in px.iter().enumerate() {
        let s: f64 = joint[i * ny..(i + 1) * ny].iter().sum();
        consistency = consistency.max((s - p).abs());
    }
    for (j, p) in py.iter().enumerate() {
        let s: f64 = (0..px.len()).map(|i| joint[i * ny + j]).sum();
        consistency = consistency.max((s - p).abs());
    }

    let left = (i_x_a - i_x_e) + (i_y_a - i_y_be);
    let right = i_xy_a - i_xy_e;
    let slack = right - left;
    Ok(ChainReport {
        i_x_a,
        i_x_e,
        i_y_a,
        i_y_be,
        i_y_a_given_x,
        i_xy_a,
        i_xy_e,
        left,
        right,
        slack,
        chain_identity_residual: i_x_a + i_y_a_given_x - i_xy_a,
        marginal_consistency: consistency,
        holds: slack >= -INEQUALITY_TOL,
    })
}

/// Single-letter secret-key / common-randomness trade-off for a tripartite
/// state: with X from `p_b` on B and Y from `p_c` on C,
/// `[I(X;A) - I(X;C)] + I(Y;A) <= I(XY;A)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecretCrReport {
    /// `I(X;A) - I(X;C)`.
    pub key_term: f64,
    /// `I(Y;A)`.
    pub cr_term: f64,
    /// `I(XY;A)`.
    pub joint_term: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn secret_cr_monogamy_check(state: &QState, p_b: &Povm, p_c: &Povm, a: &[&str]) -> Result<SecretCrReport> {
    // the chain with E trivial, the C measurement first and B second
    let chain = chain_inequality_check(state, p_c, p_b, a, &[])?;
    let key_term = chain.i_y_a - chain.i_y_be;
    let cr_term = chain.i_x_a;
    let joint_term = chain.i_xy_a;
    let slack = joint_term - key_term - cr_term;
    Ok(SecretCrReport {
        key_term,
        cr_term,
        joint_term,
        slack,
        holds: slack >= -INEQUALITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::coherent_information;
    use crate::qstate::{catalog, random_state, CatalogEntry};
    use approx::assert_abs_diff_eq;

    fn density(e: CatalogEntry) -> QState {
        catalog(&e).unwrap().to_density()
    }

    fn trivial(label: &str) -> QState {
        QState::with_labels(vec![1], &[label], CMatrix::identity(1, 1)).unwrap()
    }

    #[test]
    fn cq_mutual_information_examples() {
        let cc = density(CatalogEntry::MaxClassicalCorr);
        let rec = CqExtensionRecord::new(
            &cc,
            vec![MeasurementRecord {
                povm: Povm::computational_basis("B", 2),
                register: "X".into(),
            }],
        )
        .unwrap();
        assert_abs_diff_eq!(classical_quantum_mi(&rec, &["X"], &["A"]).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            classical_quantum_mi(&rec, &["Q"], &["A"]),
            Err(Error::UnknownLabel(_))
        ));

        let a = random_state(&[2], 2, 1).unwrap();
        let b = random_state(&[2], 2, 2).unwrap().relabel("A", "B").unwrap();
        let rec = CqExtensionRecord::new(
            &a.tensor(&b).unwrap(),
            vec![MeasurementRecord {
                povm: random_povm("B", 2, 3, 4).unwrap(),
                register: "X".into(),
            }],
        )
        .unwrap();
        assert!(classical_quantum_mi(&rec, &["X"], &["A"]).unwrap().abs() < 1e-12);

        let singlet = density(CatalogEntry::Singlet).tensor(&trivial("E")).unwrap();
        let rec = CqExtensionRecord::new(
            &singlet,
            vec![MeasurementRecord {
                povm: Povm::computational_basis("B", 2),
                register: "X".into(),
            }],
        )
        .unwrap();
        assert!(classical_quantum_mi(&rec, &["X"], &["E"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn csecret_examples() {
        // E trivial: the key equals I(X;A)
        let s = random_state(&[2, 2], 4, 5).unwrap();
        let p = random_povm("B", 2, 3, 6).unwrap();
        let with_e = s.tensor(&trivial("E")).unwrap();
        let key = csecret1_value(&with_e, &p, &["A"], &["E"]).unwrap();
        let cr = povm::holevo_quantity(&s, &p).unwrap();
        assert_abs_diff_eq!(key, cr, epsilon = 1e-12);

        let singlet = density(CatalogEntry::Singlet).tensor(&trivial("E")).unwrap();
        assert_abs_diff_eq!(
            csecret1_value(&singlet, &Povm::computational_basis("B", 2), &["A"], &["E"]).unwrap(),
            1.0,
            epsilon = 1e-12
        );

        // E holds a copy of B's outcome: (|000><000| + |111><111|)/2
        let mut m = CMatrix::zeros(8, 8);
        m[(0, 0)] = linalg::c(0.5, 0.0);
        m[(7, 7)] = linalg::c(0.5, 0.0);
        let copy = QState::with_labels(vec![2, 2, 2], &["A", "B", "E"], m).unwrap();
        assert!(csecret1_value(&copy, &Povm::computational_basis("B", 2), &["A"], &["E"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn optimized_key_is_at_least_basis_key() {
        let s = random_state(&[2, 2, 2], 8, 31).unwrap();
        let basis = csecret1_value(&s, &Povm::computational_basis("B", 2), &["A"], &["C"]).unwrap();
        let r = optimize_csecret1(&s, "B", &["A"], &["C"], &Budget::new(3_000)).unwrap();
        assert!(r.value >= basis - 1e-12);
        assert!(r.value <= povm::holevo_quantity(&s.trace_out(&["C"]).unwrap(), &r.argument).unwrap() + 1e-9);
    }

    #[test]
    fn proposition1_examples() {
        let pure = density(CatalogEntry::Singlet);
        let r = proposition1_check(&pure, 8, 1).unwrap();
        assert!(r.trials.iter().all(|t| t.slack.abs() < 1e-10));
        let cc = density(CatalogEntry::MaxClassicalCorr);
        let abe = cc.purify("E").unwrap().to_density();
        let rec = CqExtensionRecord::new(
            &abe,
            vec![MeasurementRecord {
                povm: Povm::computational_basis("B", 2),
                register: "X".into(),
            }],
        )
        .unwrap();
        assert_abs_diff_eq!(classical_quantum_mi(&rec, &["X"], &["E"]).unwrap(), 1.0, epsilon = 1e-12);
        let r = proposition1_check(&random_state(&[2, 3], 6, 2).unwrap(), 30, 3).unwrap();
        assert!(r.holds, "min slack {}", r.min_slack);
    }

    #[test]
    fn ed1_examples() {
        let bell = density(CatalogEntry::BellPhi);
        assert_abs_diff_eq!(ed1_value(&bell, &Instrument::identity("B", 2)).unwrap(), 1.0, epsilon = 1e-12);
        let cc = density(CatalogEntry::MaxClassicalCorr);
        assert!(ed1_value(&cc, &Instrument::identity("B", 2)).unwrap().abs() < 1e-12);
        for p in [0.3, 0.8, 0.95] {
            let w = density(CatalogEntry::Werner(p));
            assert_abs_diff_eq!(
                ed1_value(&w, &Instrument::identity("B", 2)).unwrap(),
                coherent_information(&w, &["A"], &["B"]).unwrap(),
                epsilon = 1e-12
            );
        }
        let bad = Instrument::new("B", vec![vec![CMatrix::identity(2, 2).scale(0.5)]]);
        assert!(matches!(bad, Err(Error::InvalidInstrument(_))));
    }

    #[test]
    fn ed1_search_is_at_least_coherent_information() {
        let s = random_state(&[2, 2], 2, 7).unwrap();
        let ci = coherent_information(&s, &["A"], &["B"]).unwrap();
        let r = optimize_ed1(&s, "B", &Budget::new(2_000)).unwrap();
        assert!(r.value >= ci - 1e-12);
        let inst = Instrument::new("B", r.argument.maps().to_vec()).unwrap();
        assert_abs_diff_eq!(ed1_value(&s, &inst).unwrap(), r.value, epsilon = 1e-12);
    }

    #[test]
    fn chain_with_trivial_parties() {
        let s = random_state(&[2, 2], 4, 9).unwrap();
        let full = s.tensor(&trivial("C")).unwrap().tensor(&trivial("E")).unwrap();
        let p = random_povm("B", 2, 3, 10).unwrap();
        let r = chain_inequality_check(&full, &p, &Povm::trivial("C", 1), &["A"], &["E"]).unwrap();
        assert_abs_diff_eq!(r.left, r.i_x_a, epsilon = 1e-12);
        assert_abs_diff_eq!(r.right, r.i_x_a, epsilon = 1e-12);
        assert!(r.slack.abs() < 1e-12);
    }

    #[test]
    fn chain_on_ghz() {
        let ghz = density(CatalogEntry::Ghz);
        let r = chain_inequality_check(
            &ghz,
            &Povm::computational_basis("B", 2),
            &Povm::computational_basis("C", 2),
            &["A"],
            &[],
        )
        .unwrap();
        // X = Y = A's bit: I(X;A) = I(Y;A) = I(Y;B) = I(XY;A) = 1
        assert_abs_diff_eq!(r.i_x_a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.i_y_a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.i_y_be, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.i_xy_a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.slack, 0.0, epsilon = 1e-12);
        assert!(r.chain_identity_residual.abs() < 1e-12);
    }

    #[test]
    fn secret_cr_examples() {
        let a = random_state(&[2], 2, 1).unwrap();
        let bc = random_state(&[2, 2], 4, 2).unwrap().relabel("B", "C").unwrap().relabel("A", "B").unwrap();
        let prod = a.tensor(&bc).unwrap();
        let r = secret_cr_monogamy_check(&prod, &random_povm("B", 2, 2, 3).unwrap(), &random_povm("C", 2, 4, 4).unwrap(), &["A"]).unwrap();
        assert!(r.cr_term.abs() < 1e-12 && r.joint_term.abs() < 1e-12);
        assert!(r.key_term <= 1e-12 && r.holds);

        // classical perfectly correlated bits on A, B, C
        let mut m = CMatrix::zeros(8, 8);
        m[(0, 0)] = linalg::c(0.5, 0.0);
        m[(7, 7)] = linalg::c(0.5, 0.0);
        let cls = QState::with_labels(vec![2, 2, 2], &["A", "B", "C"], m).unwrap();
        let r = secret_cr_monogamy_check(
            &cls,
            &Povm::computational_basis("B", 2),
            &Povm::computational_basis("C", 2),
            &["A"],
        )
        .unwrap();
        // key 1 - 1 = 0, cr 1, joint 1
        assert_abs_diff_eq!(r.slack, 0.0, epsilon = 1e-12);
    }
}
