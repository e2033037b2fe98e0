//! Measurements on a single labelled subsystem: validation, rank-1
//! refinement, steering through purifications and Holevo quantities.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entropy;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, EIG_CUTOFF};
use crate::qstate::{PureState, QState, State};

pub const ELEMENT_PSD_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Outcomes less likely than this are dropped before normalizing post-states.
pub const ZERO_PROBABILITY: f64 = 1e-12;
pub const RANK_ONE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum PovmViolation {
    Shape { element: usize, found: usize, expected: usize },
    Hermiticity { element: usize, deviation: f64 },
    Positivity { element: usize, deviation: f64 },
    Completeness { deviation: f64 },
    Empty,
}

impl fmt::Display for PovmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PovmViolation::Shape {
                element,
                found,
                expected,
            } => write!(f, "element {element} has dimension {found}, expected {expected}"),
            PovmViolation::Hermiticity { element, deviation } => {
                write!(f, "element {element} hermiticity deviation {deviation:.3e}")
            }
            PovmViolation::Positivity { element, deviation } => {
                write!(f, "element {element} negative eigenvalue {deviation:.3e}")
            }
            PovmViolation::Completeness { deviation } => {
                write!(f, "elements miss the identity by {deviation:.3e}")
            }
            PovmViolation::Empty => write!(f, "no elements"),
        }
    }
}

/// Checks that `elements` are PSD `dim x dim` matrices summing to the identity.
pub fn validate_elements(elements: &[CMatrix], dim: usize) -> Vec<PovmViolation> {
    if elements.is_empty() {
        return vec![PovmViolation::Empty];
    }
    let mut out = Vec::new();
    let mut sum = CMatrix::zeros(dim, dim);
    for (i, m) in elements.iter().enumerate() {
        if m.nrows() != dim || m.ncols() != dim {
            out.push(PovmViolation::Shape {
                element: i,
                found: m.nrows(),
                expected: dim,
            });
            continue;
        }
        let herm = linalg::max_abs_diff(m, &m.adjoint());
        if herm > ELEMENT_PSD_TOL {
            out.push(PovmViolation::Hermiticity {
                element: i,
                deviation: herm,
            });
        }
        let min = linalg::eigvalsh(m).last().copied().unwrap_or(0.0);
        if min < -ELEMENT_PSD_TOL {
            out.push(PovmViolation::Positivity {
                element: i,
                deviation: -min,
            });
        }
        sum += m;
    }
    let dev = linalg::max_abs_diff(&sum, &CMatrix::identity(dim, dim));
    if dev > COMPLETENESS_TOL {
        out.push(PovmViolation::Completeness { deviation: dev });
    }
    out
}

/// A POVM acting on the subsystem labelled `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    target: String,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(target: impl Into<String>, elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements.first().map(|m| m.nrows()).unwrap_or(0);
        let v = validate_elements(&elements, dim);
        if !v.is_empty() {
            let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidPovm(msg.join("; ")));
        }
        Ok(Povm {
            target: target.into(),
            elements,
        })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(target: impl Into<String>, dim: usize) -> Self {
        Povm {
            target: target.into(),
            elements: vec![CMatrix::identity(dim, dim)],
        }
    }

    pub fn computational_basis(target: impl Into<String>, dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(k, k)] = c(1.0, 0.0);
                m
            })
            .collect();
        Povm {
            target: target.into(),
            elements,
        }
    }

    /// Rank-1 POVM read off the rows of an isometry `v` (`n x d`, orthonormal
    /// columns): `M_i[k, l] = conj(v[i, k]) v[i, l]`.
    pub fn from_isometry_rows(target: impl Into<String>, v: &CMatrix) -> Self {
        Povm::from_isometry_blocks(target, v, 1)
    }

    /// POVM from consecutive `block x d` row blocks `V_i` of an isometry:
    /// `M_i = V_i† V_i`.
    pub fn from_isometry_blocks(target: impl Into<String>, v: &CMatrix, block: usize) -> Self {
        let d = v.ncols();
        let elements = (0..v.nrows() / block)
            .map(|i| {
                let vi = v.rows(i * block, block);
                linalg::hermitian_part(&(vi.adjoint() * vi))
            })
            .collect::<Vec<_>>();
        debug_assert!(elements.iter().all(|m| m.nrows() == d));
        Povm {
            target: target.into(),
            elements,
        }
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn with_target(&self, target: impl Into<String>) -> Povm {
        Povm {
            target: target.into(),
            elements: self.elements.clone(),
        }
    }

    pub fn is_rank_one(&self) -> bool {
        self.elements
            .iter()
            .all(|m| linalg::eigvalsh(m).get(1).copied().unwrap_or(0.0) <= RANK_ONE_TOL)
    }

    /// Inverse of [`Povm::from_isometry_rows`] for a rank-1 POVM.
    pub fn to_isometry(&self) -> Result<CMatrix> {
        let d = self.dim();
        let mut v = CMatrix::zeros(self.len(), d);
        for (i, m) in self.elements.iter().enumerate() {
            let vec = rank_one_vector(m)
                .ok_or_else(|| Error::InvalidPovm(format!("element {i} is not rank 1")))?;
            for k in 0..d {
                v[(i, k)] = vec[k].conj();
            }
        }
        Ok(v)
    }
}

/// `m` with `M = m m†` when `M` is rank 1 (or zero), `None` otherwise.
fn rank_one_vector(m: &CMatrix) -> Option<CVector> {
    let (vals, vecs) = linalg::eigh(m);
    if vals.get(1).copied().unwrap_or(0.0) > RANK_ONE_TOL {
        return None;
    }
    let w = vals[0].max(0.0).sqrt();
    Some(vecs.column(0).into_owned() * c(w, 0.0))
}

pub fn validate_povm(p: &Povm, dim: usize) -> Vec<PovmViolation> {
    validate_elements(&p.elements, dim)
}

/// Rank-1 refinement together with the parent index of every new element.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedPovm {
    pub povm: Povm,
    pub parents: Vec<usize>,
}

/// Splits each element into rank-1 pieces along its eigenvectors, keeping
/// eigenvalues above `1e-12`.
pub fn rank1_refine(p: &Povm) -> Result<RefinedPovm> {
    let v = validate_povm(p, p.dim());
    if !v.is_empty() {
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidPovm(msg.join("; ")));
    }
    let mut elements = Vec::new();
    let mut parents = Vec::new();
    for (i, m) in p.elements.iter().enumerate() {
        let (vals, vecs) = linalg::eigh(m);
        for (k, &l) in vals.iter().enumerate() {
            if l > EIG_CUTOFF {
                let u = vecs.column(k).into_owned();
                elements.push(linalg::outer(&u).scale(l));
                parents.push(i);
            }
        }
    }
    Ok(RefinedPovm {
        povm: Povm {
            target: p.target.clone(),
            elements,
        },
        parents,
    })
}

/// A weighted member of an ensemble, tagged with the outcome that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub outcome: usize,
    pub probability: f64,
    pub state: State,
}

/// Probability-weighted states on a common set of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEnsemble {
    members: Vec<EnsembleMember>,
}

impl LabeledEnsemble {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InconsistentEnsemble("empty ensemble".into()));
        }
        let dims = members[0].state.dims().to_vec();
        let mut total = 0.0;
        for (i, m) in members.iter().enumerate() {
            if m.probability < 0.0 || !m.probability.is_finite() {
                return Err(Error::InconsistentEnsemble(format!(
                    "member {i} has probability {}",
                    m.probability
                )));
            }
            if m.state.dims() != dims.as_slice() {
                return Err(Error::InconsistentEnsemble(format!(
                    "member {i} has dims {:?}, expected {dims:?}",
                    m.state.dims()
                )));
            }
            total += m.probability;
        }
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::InconsistentEnsemble(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(LabeledEnsemble { members })
    }

    /// Ensemble of pure states with the given weights.
    pub fn from_pure(items: Vec<(f64, PureState)>) -> Result<Self> {
        LabeledEnsemble::new(
            items
                .into_iter()
                .enumerate()
                .map(|(i, (p, s))| EnsembleMember {
                    outcome: i,
                    probability: p,
                    state: State::Pure(s),
                })
                .collect(),
        )
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.members[0].state.dims()
    }

    pub fn labels(&self) -> &[String] {
        self.members[0].state.labels()
    }

    /// `Σ p_i ρ_i`.
    pub fn average(&self) -> CMatrix {
        let n: usize = self.dims().iter().product();
        let mut acc = CMatrix::zeros(n, n);
        for m in &self.members {
            let rho = match &m.state {
                State::Pure(p) => linalg::outer(p.vector()),
                State::Mixed(q) => q.matrix().clone(),
            };
            acc += rho.scale(m.probability);
        }
        acc
    }

    pub fn reconstruction_error(&self, target: &QState) -> f64 {
        linalg::max_abs_diff(&self.average(), target.matrix())
    }

    /// Pure members, or an error naming the first mixed one.
    pub fn pure_members(&self) -> Result<Vec<(f64, PureState)>> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| match &m.state {
                State::Pure(p) => Ok((m.probability, p.clone())),
                State::Mixed(q) => {
                    let purity = q.purity();
                    if purity >= 1.0 - 1e-8 {
                        let (_, vecs) = linalg::eigh(q.matrix());
                        Ok((
                            m.probability,
                            PureState::from_trusted(
                                q.dims().to_vec(),
                                q.labels().to_vec(),
                                vecs.column(0).into_owned(),
                            ),
                        ))
                    } else {
                        Err(Error::MixedMember { index: i, purity })
                    }
                }
            })
            .collect()
    }
}

fn target_site(labels: &[String], target: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == target)
        .ok_or_else(|| Error::UnknownLabel(target.to_string()))
}

fn rest_labels(labels: &[String], site: usize) -> Vec<String> {
    labels
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != site)
        .map(|(_, l)| l.clone())
        .collect()
}

fn check_dim(p: &Povm, dims: &[usize], site: usize) -> Result<()> {
    if p.dim() != dims[site] {
        return Err(Error::DimensionMismatch(format!(
            "POVM on `{}` has dimension {}, subsystem has {}",
            p.target,
            p.dim(),
            dims[site]
        )));
    }
    Ok(())
}

/// The state with the measured factor moved last, ready for repeated
/// `Tr_L[(I ⊗ M) ρ]` evaluations.
#[derive(Debug, Clone)]
pub(crate) struct MeasuredLast {
    pub rest_dims: Vec<usize>,
    pub rest_labels: Vec<String>,
    pub d: usize,
    pub matrix: CMatrix,
}

impl MeasuredLast {
    pub fn new(state: &QState, target: &str) -> Result<Self> {
        let site = target_site(state.labels(), target)?;
        let n = state.dims().len();
        let order: Vec<usize> = (0..n).filter(|&k| k != site).chain([site]).collect();
        let matrix = linalg::permute_matrix(state.dims(), state.matrix(), &order);
        Ok(MeasuredLast {
            rest_dims: state
                .dims()
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != site)
                .map(|(_, &d)| d)
                .collect(),
            rest_labels: rest_labels(state.labels(), site),
            d: state.dims()[site],
            matrix,
        })
    }

    pub fn rest_dim(&self) -> usize {
        self.matrix.nrows() / self.d
    }

    /// Unnormalized `Tr_L[(I ⊗ M) ρ]`.
    pub fn reduce(&self, m: &CMatrix) -> CMatrix {
        let d = self.d;
        let n = self.rest_dim();
        let mut out = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut acc = c(0.0, 0.0);
                for l in 0..d {
                    for lp in 0..d {
                        acc += m[(l, lp)] * self.matrix[(a * d + lp, b * d + l)];
                    }
                }
                out[(a, b)] = acc;
            }
        }
        linalg::hermitian_part(&out)
    }

    /// Unnormalized post-measurement operator for the rank-1 element given by
    /// isometry row `row` (`M[l, l'] = conj(row[l]) row[l']`).
    pub fn reduce_row(&self, v: &CMatrix, i: usize) -> CMatrix {
        let d = self.d;
        let n = self.rest_dim();
        let mut out = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let mut acc = c(0.0, 0.0);
                for l in 0..d {
                    let cl = v[(i, l)].conj();
                    for lp in 0..d {
                        acc += cl * v[(i, lp)] * self.matrix[(a * d + lp, b * d + l)];
                    }
                }
                out[(a, b)] = acc;
                out[(b, a)] = acc.conj();
            }
        }
        out
    }
}

/// One outcome of a measurement: its probability and the normalized state
/// of the unmeasured subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub outcome: usize,
    pub probability: f64,
    pub state: QState,
}

/// Applies `p` to `state`. Outcomes with probability below `1e-12` are
/// dropped and the remaining probabilities renormalized.
pub fn measure(state: &QState, p: &Povm) -> Result<Vec<Outcome>> {
    let ml = MeasuredLast::new(state, &p.target)?;
    let site = target_site(state.labels(), &p.target)?;
    check_dim(p, state.dims(), site)?;
    if ml.rest_dims.is_empty() {
        return Err(Error::InvalidParameter(
            "measured subsystem is the whole state".into(),
        ));
    }
    let mut out = Vec::new();
    for (x, m) in p.elements.iter().enumerate() {
        let sigma = ml.reduce(m);
        let prob = linalg::trace(&sigma).re;
        if prob > ZERO_PROBABILITY {
            out.push(Outcome {
                outcome: x,
                probability: prob,
                state: QState::from_trusted(
                    ml.rest_dims.clone(),
                    ml.rest_labels.clone(),
                    sigma.scale(1.0 / prob),
                ),
            });
        }
    }
    let total: f64 = out.iter().map(|o| o.probability).sum();
    for o in &mut out {
        o.probability /= total;
    }
    Ok(out)
}

/// Replaces the measured factor by a classical register holding the outcome:
/// `Σ_x |x><x| ⊗ Tr_L[(I ⊗ M_x) ρ]`, with the register at the measured
/// factor's position. Zero-probability outcomes are kept so the register
/// dimension equals the outcome count.
pub fn measure_into_register(state: &QState, p: &Povm, register: &str) -> Result<QState> {
    let site = target_site(state.labels(), &p.target)?;
    check_dim(p, state.dims(), site)?;
    if register != p.target && state.labels().iter().any(|l| l == register) {
        return Err(Error::LabelCollision(register.to_string()));
    }
    let ml = MeasuredLast::new(state, &p.target)?;
    let n = ml.rest_dim();
    let k = p.len();
    let mut block = CMatrix::zeros(k * n, k * n);
    for (x, m) in p.elements.iter().enumerate() {
        let sigma = ml.reduce(m);
        block.view_mut((x * n, x * n), (n, n)).copy_from(&sigma);
    }
    // block is ordered (register, rest...); move the register back to `site`
    let mut dims = vec![k];
    dims.extend(&ml.rest_dims);
    let mut labels = vec![register.to_string()];
    labels.extend(ml.rest_labels.iter().cloned());
    let total = dims.len();
    let order: Vec<usize> = (1..=site).chain([0]).chain(site + 1..total).collect();
    let permuted = linalg::permute_matrix(&dims, &block, &order);
    Ok(QState::from_trusted(
        order.iter().map(|&i| dims[i]).collect(),
        order.iter().map(|&i| labels[i].clone()).collect(),
        permuted,
    ))
}

/// Measures `p` on a pure global state. Rank-1 elements leave pure
/// post-states; higher-rank elements leave mixed ones.
pub fn steer(pure: &PureState, p: &Povm) -> Result<LabeledEnsemble> {
    let site = target_site(pure.labels(), &p.target)?;
    check_dim(p, pure.dims(), site)?;
    let rest: Vec<usize> = (0..pure.dims().len()).filter(|&k| k != site).collect();
    if rest.is_empty() {
        return Err(Error::InvalidParameter(
            "measured subsystem is the whole state".into(),
        ));
    }
    let rest_dims: Vec<usize> = rest.iter().map(|&k| pure.dims()[k]).collect();
    let rest_labels = rest_labels(pure.labels(), site);
    let x = linalg::reshape_bipartite(pure.dims(), pure.vector(), &rest);

    let mut raw: Vec<(usize, f64, State)> = Vec::new();
    for (i, m) in p.elements.iter().enumerate() {
        if let Some(mv) = rank_one_vector(m) {
            let post = &x * mv.map(|z| z.conj());
            let prob = post.norm_squared();
            if prob > ZERO_PROBABILITY {
                raw.push((
                    i,
                    prob,
                    State::Pure(PureState::from_trusted(
                        rest_dims.clone(),
                        rest_labels.clone(),
                        post / c(prob.sqrt(), 0.0),
                    )),
                ));
            }
        } else {
            let sigma = linalg::hermitian_part(&(&x * m.transpose() * x.adjoint()));
            let prob = linalg::trace(&sigma).re;
            if prob > ZERO_PROBABILITY {
                raw.push((
                    i,
                    prob,
                    State::Mixed(QState::from_trusted(
                        rest_dims.clone(),
                        rest_labels.clone(),
                        sigma.scale(1.0 / prob),
                    )),
                ));
            }
        }
    }
    let total: f64 = raw.iter().map(|r| r.1).sum();
    LabeledEnsemble::new(
        raw.into_iter()
            .map(|(outcome, prob, state)| EnsembleMember {
                outcome,
                probability: prob / total,
                state,
            })
            .collect(),
    )
}

/// `S(ρ_rest) - Σ_x p_x S(ρ_x)` for `p` measured on its target subsystem,
/// where `ρ_rest` is the reduced state of every other subsystem.
pub fn holevo_quantity(state: &QState, p: &Povm) -> Result<f64> {
    let ml = MeasuredLast::new(state, &p.target)?;
    let site = target_site(state.labels(), &p.target)?;
    check_dim(p, state.dims(), site)?;
    let rest_refs: Vec<&str> = ml.rest_labels.iter().map(String::as_str).collect();
    if rest_refs.is_empty() {
        return Ok(0.0);
    }
    let s_rest = entropy::marginal_entropy(state, &rest_refs)?;
    let avg: f64 = p
        .elements
        .iter()
        .map(|m| linalg::weighted_entropy_bits(&ml.reduce(m)))
        .sum();
    Ok(s_rest - avg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementReport {
    pub before: f64,
    pub after: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Holevo quantity before and after rank-1 refinement; refinement must not
/// decrease it.
pub fn refine_monotonicity_check(state: &QState, p: &Povm) -> Result<RefinementReport> {
    let before = holevo_quantity(state, p)?;
    let after = holevo_quantity(state, &rank1_refine(p)?.povm)?;
    let slack = after - before;
    Ok(RefinementReport {
        before,
        after,
        slack,
        holds: slack >= -entropy::INEQUALITY_TOL,
    })
}

/// Random POVM with exactly `n_outcomes` elements on a `dim`-dimensional
/// subsystem, deterministic per seed.
///
/// With `n_outcomes >= dim` the elements are rank 1, read off the rows of a
/// Haar isometry `C^dim -> C^n_outcomes`. With fewer outcomes no rank-1 POVM
/// exists, and the elements are `V_i† V_i` for the `dim x dim` blocks of a
/// Haar isometry `C^dim -> C^(dim·n_outcomes)`.
pub fn random_povm(target: &str, dim: usize, n_outcomes: usize, seed: u64) -> Result<Povm> {
    if n_outcomes == 0 || dim == 0 {
        return Err(Error::InvalidParameter(
            "random POVM needs at least one outcome and dimension".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n_outcomes >= dim {
        let v = linalg::haar_isometry(&mut rng, n_outcomes, dim);
        Ok(Povm::from_isometry_rows(target, &v))
    } else {
        let v = linalg::haar_isometry(&mut rng, dim * n_outcomes, dim);
        Ok(Povm::from_isometry_blocks(target, &v, dim))
    }
}
