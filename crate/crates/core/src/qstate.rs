//! Density operators and pure states over labelled tensor factors.
//!
//! Every state carries its subsystem dimensions and a distinct label per
//! factor. Basis order is lexicographic with the leftmost factor most
//! significant, so `|01>` on `[A, B]` is basis index 1.

use std::collections::HashSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, EIG_CUTOFF};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;

/// A broken state invariant and how far off it is.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "invariant", content = "deviation", rename_all = "snake_case")]
pub enum Violation {
    Hermiticity(f64),
    Trace(f64),
    Positivity(f64),
}

impl Violation {
    pub fn deviation(&self) -> f64 {
        match *self {
            Violation::Hermiticity(d) | Violation::Trace(d) | Violation::Positivity(d) => d,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Hermiticity(d) => write!(f, "hermiticity deviation {d:.3e}"),
            Violation::Trace(d) => write!(f, "trace deviation {d:.3e}"),
            Violation::Positivity(d) => write!(f, "negative eigenvalue {d:.3e}"),
        }
    }
}

/// Numerical invariants of a would-be density matrix. Empty means valid.
pub fn validate_matrix(matrix: &CMatrix) -> Vec<Violation> {
    let mut out = Vec::new();
    let herm = linalg::max_abs_diff(matrix, &matrix.adjoint());
    if herm > HERMITICITY_TOL {
        out.push(Violation::Hermiticity(herm));
    }
    let tr = linalg::trace(matrix);
    let dev = (tr - c(1.0, 0.0)).norm();
    if dev > TRACE_TOL {
        out.push(Violation::Trace(dev));
    }
    let min = linalg::eigvalsh(matrix).last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        out.push(Violation::Positivity(-min));
    }
    out
}

fn check_structure(dims: &[usize], labels: &[String], len: usize) -> Result<()> {
    if dims.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} dims but {} labels",
            dims.len(),
            labels.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch("zero subsystem dimension".into()));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if l.is_empty() {
            return Err(Error::InvalidState("empty label".into()));
        }
        if !seen.insert(l.as_str()) {
            return Err(Error::LabelCollision(l.clone()));
        }
    }
    let total: usize = dims.iter().product();
    if total != len {
        return Err(Error::DimensionMismatch(format!(
            "dims multiply to {total} but data has dimension {len}"
        )));
    }
    Ok(())
}

fn resolve(labels: &[String], sel: &[&str]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(sel.len());
    for s in sel {
        let idx = labels
            .iter()
            .position(|l| l == s)
            .ok_or_else(|| Error::UnknownLabel((*s).to_string()))?;
        if out.contains(&idx) {
            return Err(Error::OverlappingSelectors((*s).to_string()));
        }
        out.push(idx);
    }
    Ok(out)
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|k| {
            if k < 26 {
                ((b'A' + k as u8) as char).to_string()
            } else {
                format!("S{k}")
            }
        })
        .collect()
}

/// A density operator over labelled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    dims: Vec<usize>,
    labels: Vec<String>,
    matrix: CMatrix,
}

impl QState {
    /// Builds a state, rejecting structural errors and any invariant violation.
    pub fn new(dims: Vec<usize>, labels: Vec<String>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        check_structure(&dims, &labels, matrix.nrows())?;
        let violations = validate_matrix(&matrix);
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidState(msg.join("; ")));
        }
        Ok(QState {
            dims,
            labels,
            matrix,
        })
    }

    /// Clip-and-renormalize ingestion for states carrying rounding noise:
    /// takes the Hermitian part, zeroes negative eigenvalues and rescales to
    /// unit trace.
    pub fn repaired(dims: Vec<usize>, labels: Vec<String>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("matrix is not square".into()));
        }
        check_structure(&dims, &labels, matrix.nrows())?;
        let (vals, vecs) = linalg::eigh(&matrix);
        let clipped: Vec<f64> = vals.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("no positive spectrum to renormalize".into()));
        }
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            clipped.len(),
            clipped.iter().map(|&l| c(l / total, 0.0)),
        ));
        let m = linalg::hermitian_part(&(&vecs * d * vecs.adjoint()));
        QState::new(dims, labels, m)
    }

    /// Construction path for matrices produced by operations that preserve
    /// validity; only structure is checked.
    pub(crate) fn from_trusted(dims: Vec<usize>, labels: Vec<String>, matrix: CMatrix) -> Self {
        debug_assert!(check_structure(&dims, &labels, matrix.nrows()).is_ok());
        QState {
            dims,
            labels,
            matrix: linalg::hermitian_part(&matrix),
        }
    }

    pub fn with_labels(dims: Vec<usize>, labels: &[&str], matrix: CMatrix) -> Result<Self> {
        QState::new(dims, labels.iter().map(|s| s.to_string()).collect(), matrix)
    }

    pub fn maximally_mixed(dims: Vec<usize>, labels: &[&str]) -> Result<Self> {
        let n: usize = dims.iter().product();
        QState::with_labels(dims, labels, CMatrix::identity(n, n).scale(1.0 / n as f64))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_matrix(&self.matrix)
    }

    pub fn indices(&self, sel: &[&str]) -> Result<Vec<usize>> {
        resolve(&self.labels, sel)
    }

    pub fn dim_of(&self, sel: &[&str]) -> Result<usize> {
        Ok(self.indices(sel)?.iter().map(|&k| self.dims[k]).product())
    }

    pub fn label_refs(&self) -> Vec<&str> {
        self.labels.iter().map(String::as_str).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > EIG_CUTOFF).count()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Kronecker product; `self`'s factors are most significant.
    pub fn tensor(&self, other: &QState) -> Result<QState> {
        for l in &other.labels {
            if self.labels.contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        let dims = [self.dims.as_slice(), other.dims.as_slice()].concat();
        let labels = [self.labels.as_slice(), other.labels.as_slice()].concat();
        Ok(QState::from_trusted(
            dims,
            labels,
            linalg::kron(&self.matrix, &other.matrix),
        ))
    }

    /// Reduced state on `keep`. The kept factors appear in the order they have
    /// in `self`, regardless of the order of `keep`.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<QState> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one subsystem".into(),
            ));
        }
        let mut idx = self.indices(keep)?;
        idx.sort_unstable();
        Ok(self.keep_indices(&idx))
    }

    pub(crate) fn keep_indices(&self, idx: &[usize]) -> QState {
        if idx.len() == self.dims.len() && idx.iter().enumerate().all(|(i, &k)| i == k) {
            return self.clone();
        }
        let m = linalg::partial_trace(&self.dims, &self.matrix, idx);
        QState::from_trusted(
            idx.iter().map(|&k| self.dims[k]).collect(),
            idx.iter().map(|&k| self.labels[k].clone()).collect(),
            m,
        )
    }

    /// Reduced state after tracing out `drop`.
    pub fn trace_out(&self, drop: &[&str]) -> Result<QState> {
        let d = self.indices(drop)?;
        let keep: Vec<usize> = (0..self.dims.len()).filter(|k| !d.contains(k)).collect();
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "cannot trace out every subsystem".into(),
            ));
        }
        Ok(self.keep_indices(&keep))
    }

    /// Reorders the tensor factors; `order` must list every label once.
    pub fn reorder(&self, order: &[&str]) -> Result<QState> {
        let idx = self.indices(order)?;
        if idx.len() != self.dims.len() {
            return Err(Error::InvalidParameter(
                "reorder must name every subsystem".into(),
            ));
        }
        Ok(QState::from_trusted(
            idx.iter().map(|&k| self.dims[k]).collect(),
            idx.iter().map(|&k| self.labels[k].clone()).collect(),
            linalg::permute_matrix(&self.dims, &self.matrix, &idx),
        ))
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<QState> {
        let k = self.indices(&[from])?[0];
        if from != to && self.labels.iter().any(|l| l == to) {
            return Err(Error::LabelCollision(to.to_string()));
        }
        let mut labels = self.labels.clone();
        labels[k] = to.to_string();
        Ok(QState {
            dims: self.dims.clone(),
            labels,
            matrix: self.matrix.clone(),
        })
    }

    /// Groups consecutive factors into a single factor with a new label.
    pub fn merge(&self, group: &[&str], label: &str) -> Result<QState> {
        let idx = self.indices(group)?;
        let first = *idx.iter().min().unwrap_or(&0);
        let contiguous = idx.iter().enumerate().all(|(i, &k)| k == first + i);
        if group.is_empty() || !contiguous {
            return Err(Error::InvalidParameter(format!(
                "merge group {group:?} must be consecutive and in order"
            )));
        }
        let mut dims = Vec::new();
        let mut labels = Vec::new();
        for k in 0..self.dims.len() {
            if k == first {
                dims.push(idx.iter().map(|&j| self.dims[j]).product());
                labels.push(label.to_string());
            } else if !idx.contains(&k) {
                dims.push(self.dims[k]);
                labels.push(self.labels[k].clone());
            }
        }
        check_structure(&dims, &labels, self.dim())?;
        Ok(QState {
            dims,
            labels,
            matrix: self.matrix.clone(),
        })
    }

    /// Purification `Σ_k √λ_k |v_k> ⊗ |k>` with eigenvalues sorted descending
    /// and those below `1e-12` dropped; the ancilla is appended last.
    pub fn purify(&self, ancilla: &str) -> Result<PureState> {
        if self.labels.iter().any(|l| l == ancilla) {
            return Err(Error::LabelCollision(ancilla.to_string()));
        }
        let (vals, vecs) = linalg::eigh(&self.matrix);
        let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > EIG_CUTOFF).collect();
        let r = kept.len().max(1);
        let n = self.dim();
        let mut psi = CVector::zeros(n * r);
        for (anc, &k) in kept.iter().enumerate() {
            let w = vals[k].sqrt();
            for i in 0..n {
                psi[i * r + anc] = vecs[(i, k)] * w;
            }
        }
        let norm = psi.norm();
        psi /= c(norm, 0.0);
        let mut dims = self.dims.clone();
        dims.push(r);
        let mut labels = self.labels.clone();
        labels.push(ancilla.to_string());
        Ok(PureState {
            dims,
            labels,
            vector: psi,
        })
    }

    /// The `traced`-complement: trace `traced` out of a purification whose
    /// purifying system is labelled `new_label`.
    pub fn complement_state(&self, traced: &str, new_label: &str) -> Result<QState> {
        self.indices(&[traced])?;
        let pure = self.purify(new_label)?;
        let keep: Vec<&str> = pure
            .labels()
            .iter()
            .map(String::as_str)
            .filter(|l| *l != traced)
            .collect();
        pure.partial_trace(&keep)
    }
}

/// A normalized state vector over labelled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    labels: Vec<String>,
    vector: CVector,
}

impl PureState {
    pub fn new(dims: Vec<usize>, labels: Vec<String>, vector: CVector) -> Result<Self> {
        check_structure(&dims, &labels, vector.len())?;
        let dev = (vector.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::InvalidState(format!("norm deviation {dev:.3e}")));
        }
        Ok(PureState {
            dims,
            labels,
            vector,
        })
    }

    /// Rescales `vector` to unit norm.
    pub fn normalized(dims: Vec<usize>, labels: Vec<String>, vector: CVector) -> Result<Self> {
        let n = vector.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        PureState::new(dims, labels, vector / c(n, 0.0))
    }

    pub(crate) fn from_trusted(dims: Vec<usize>, labels: Vec<String>, vector: CVector) -> Self {
        PureState {
            dims,
            labels,
            vector,
        }
    }

    pub fn with_labels(dims: Vec<usize>, labels: &[&str], vector: CVector) -> Result<Self> {
        PureState::new(dims, labels.iter().map(|s| s.to_string()).collect(), vector)
    }

    /// Computational basis state `|digits>`.
    pub fn basis(dims: Vec<usize>, labels: &[&str], digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return Err(Error::DimensionMismatch("basis digits out of range".into()));
        }
        let s = linalg::strides(&dims);
        let n: usize = dims.iter().product();
        let mut v = CVector::zeros(n);
        v[digits.iter().zip(&s).map(|(d, s)| d * s).sum::<usize>()] = c(1.0, 0.0);
        PureState::with_labels(dims, labels, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn indices(&self, sel: &[&str]) -> Result<Vec<usize>> {
        resolve(&self.labels, sel)
    }

    pub fn to_density(&self) -> QState {
        QState::from_trusted(
            self.dims.clone(),
            self.labels.clone(),
            linalg::outer(&self.vector),
        )
    }

    /// Reduced state on `keep`, computed from the vector without forming the
    /// full density matrix.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<QState> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one subsystem".into(),
            ));
        }
        let mut idx = self.indices(keep)?;
        idx.sort_unstable();
        Ok(QState::from_trusted(
            idx.iter().map(|&k| self.dims[k]).collect(),
            idx.iter().map(|&k| self.labels[k].clone()).collect(),
            linalg::partial_trace_vector(&self.dims, &self.vector, &idx),
        ))
    }

    pub fn reorder(&self, order: &[&str]) -> Result<PureState> {
        let idx = self.indices(order)?;
        if idx.len() != self.dims.len() {
            return Err(Error::InvalidParameter(
                "reorder must name every subsystem".into(),
            ));
        }
        Ok(PureState {
            dims: idx.iter().map(|&k| self.dims[k]).collect(),
            labels: idx.iter().map(|&k| self.labels[k].clone()).collect(),
            vector: linalg::permute_vector(&self.dims, &self.vector, &idx),
        })
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        for l in &other.labels {
            if self.labels.contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        Ok(PureState {
            dims: [self.dims.as_slice(), other.dims.as_slice()].concat(),
            labels: [self.labels.as_slice(), other.labels.as_slice()].concat(),
            vector: self.vector.kronecker(&other.vector),
        })
    }

    /// Overlap `|<self|other>|²`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        if self.vector.len() != other.vector.len() {
            return 0.0;
        }
        self.vector.dotc(&other.vector).norm_sqr()
    }
}

/// Either kind of state, as produced by the catalog and file ingestion.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Mixed(QState),
    Pure(PureState),
}

impl State {
    pub fn to_density(&self) -> QState {
        match self {
            State::Mixed(s) => s.clone(),
            State::Pure(p) => p.to_density(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            State::Mixed(s) => s.dims(),
            State::Pure(p) => p.dims(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            State::Mixed(s) => s.labels(),
            State::Pure(p) => p.labels(),
        }
    }
}

/// Named fixture states.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogEntry {
    /// `(|01> - |10>)/√2` on A,B.
    Singlet,
    /// `(|00> + |11>)/√2` on A,B.
    BellPhi,
    /// `(|000> + |111>)/√2` on A,B,C.
    Ghz,
    /// `(|001> + |010> + |100>)/√3` on A,B,C.
    W,
    /// Three-qutrit purification of the two-qutrit antisymmetric state.
    AntisymQutrit,
    /// `(|00><00| + |11><11|)/2` on A,B.
    MaxClassicalCorr,
    Product(Box<QState>, Box<QState>),
    /// `p |singlet><singlet| + (1-p) I/4`.
    Werner(f64),
    /// Full-rank Ginibre state, deterministic in the seed.
    Ginibre { dims: Vec<usize>, seed: u64 },
    /// Ginibre-induced state of the given rank.
    GinibreRank {
        dims: Vec<usize>,
        rank: usize,
        seed: u64,
    },
}

impl CatalogEntry {
    /// Names accepted by [`catalog_by_name`].
    pub const NAMES: [&'static str; 8] = [
        "singlet",
        "bell_phi",
        "ghz",
        "w",
        "antisym_qutrit",
        "max_classical_corr",
        "werner",
        "ginibre",
    ];
}

fn amps(dims: Vec<usize>, labels: &[&str], terms: &[(&[usize], f64)]) -> PureState {
    let s = linalg::strides(&dims);
    let n: usize = dims.iter().product();
    let mut v = CVector::zeros(n);
    for (digits, a) in terms {
        let i: usize = digits.iter().zip(&s).map(|(d, s)| d * s).sum();
        v[i] += c(*a, 0.0);
    }
    let norm = v.norm();
    PureState::from_trusted(
        dims,
        labels.iter().map(|s| s.to_string()).collect(),
        v / c(norm, 0.0),
    )
}

/// Random state `G G† / Tr(G G†)` with `G` a `dim x rank` Ginibre matrix.
pub fn random_state(dims: &[usize], rank: usize, seed: u64) -> Result<QState> {
    let n: usize = dims.iter().product();
    if rank == 0 || rank > n {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} outside 1..={n}"
        )));
    }
    check_structure(dims, &default_labels(dims.len()), n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = linalg::ginibre(&mut rng, n, rank);
    let m = &g * g.adjoint();
    let t = linalg::trace(&m).re;
    Ok(QState::from_trusted(
        dims.to_vec(),
        default_labels(dims.len()),
        m.scale(1.0 / t),
    ))
}

/// Haar-random pure state, deterministic in the seed.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    let n: usize = dims.iter().product();
    check_structure(dims, &default_labels(dims.len()), n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = linalg::ginibre(&mut rng, n, 1);
    PureState::normalized(dims.to_vec(), default_labels(dims.len()), g.column(0).into_owned())
}

pub fn catalog(entry: &CatalogEntry) -> Result<State> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match entry {
        CatalogEntry::Singlet => State::Pure(amps(
            vec![2, 2],
            &["A", "B"],
            &[(&[0, 1], r), (&[1, 0], -r)],
        )),
        CatalogEntry::BellPhi => State::Pure(amps(
            vec![2, 2],
            &["A", "B"],
            &[(&[0, 0], r), (&[1, 1], r)],
        )),
        CatalogEntry::Ghz => State::Pure(amps(
            vec![2, 2, 2],
            &["A", "B", "C"],
            &[(&[0, 0, 0], r), (&[1, 1, 1], r)],
        )),
        CatalogEntry::W => {
            let a = 1.0 / 3.0_f64.sqrt();
            State::Pure(amps(
                vec![2, 2, 2],
                &["A", "B", "C"],
                &[(&[0, 0, 1], a), (&[0, 1, 0], a), (&[1, 0, 0], a)],
            ))
        }
        CatalogEntry::AntisymQutrit => {
            // |123> - |132> + |231> - |213> + |312> - |321>, levels 1..3 -> 0..2
            let a = 1.0 / 6.0_f64.sqrt();
            State::Pure(amps(
                vec![3, 3, 3],
                &["A", "B", "C"],
                &[
                    (&[0, 1, 2], a),
                    (&[0, 2, 1], -a),
                    (&[1, 2, 0], a),
                    (&[1, 0, 2], -a),
                    (&[2, 0, 1], a),
                    (&[2, 1, 0], -a),
                ],
            ))
        }
        CatalogEntry::MaxClassicalCorr => {
            let mut m = CMatrix::zeros(4, 4);
            m[(0, 0)] = c(0.5, 0.0);
            m[(3, 3)] = c(0.5, 0.0);
            State::Mixed(QState::with_labels(vec![2, 2], &["A", "B"], m)?)
        }
        CatalogEntry::Product(a, b) => State::Mixed(a.tensor(b)?),
        CatalogEntry::Werner(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidParameter(format!(
                    "werner parameter {p} outside [0, 1]"
                )));
            }
            let singlet = match catalog(&CatalogEntry::Singlet)? {
                State::Pure(s) => s.to_density().into_matrix(),
                State::Mixed(_) => unreachable!(),
            };
            if *p == 1.0 {
                return catalog(&CatalogEntry::Singlet);
            }
            let m = singlet.scale(*p) + CMatrix::identity(4, 4).scale((1.0 - p) / 4.0);
            State::Mixed(QState::with_labels(vec![2, 2], &["A", "B"], m)?)
        }
        CatalogEntry::Ginibre { dims, seed } => {
            let n = dims.iter().product();
            State::Mixed(random_state(dims, n, *seed)?)
        }
        CatalogEntry::GinibreRank { dims, rank, seed } => {
            State::Mixed(random_state(dims, *rank, *seed)?)
        }
    })
}

/// Looks up a catalog entry by name. `p` parameterizes `werner`; `dims`,
/// `rank` and `seed` parameterize `ginibre`.
pub fn catalog_by_name(
    name: &str,
    p: Option<f64>,
    dims: Option<Vec<usize>>,
    rank: Option<usize>,
    seed: u64,
) -> Result<State> {
    let entry = match name {
        "singlet" => CatalogEntry::Singlet,
        "bell_phi" => CatalogEntry::BellPhi,
        "ghz" => CatalogEntry::Ghz,
        "w" => CatalogEntry::W,
        "antisym_qutrit" => CatalogEntry::AntisymQutrit,
        "max_classical_corr" => CatalogEntry::MaxClassicalCorr,
        "werner" => CatalogEntry::Werner(p.ok_or_else(|| {
            Error::InvalidParameter("werner requires a parameter p".into())
        })?),
        "ginibre" => {
            let dims = dims.unwrap_or_else(|| vec![2, 2]);
            match rank {
                Some(rank) => CatalogEntry::GinibreRank { dims, rank, seed },
                None => CatalogEntry::Ginibre { dims, seed },
            }
        }
        other => return Err(Error::UnknownCatalog(other.to_string())),
    };
    catalog(&entry)
}
