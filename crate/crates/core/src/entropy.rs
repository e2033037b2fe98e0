//! Entropic functionals in bits and the exact entropy identities used by the
//! monogamy checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::QState;

/// Slack tolerated on inequalities that hold exactly in exact arithmetic.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// `-Σ λ log₂ λ` over eigenvalues above `1e-12`.
pub fn von_neumann(state: &QState) -> f64 {
    linalg::shannon_bits(state.eigenvalues())
}

/// Entropy of the reduced state on `part`. An empty selector is the trivial
/// system with zero entropy.
pub fn marginal_entropy(state: &QState, part: &[&str]) -> Result<f64> {
    if part.is_empty() {
        return Ok(0.0);
    }
    Ok(von_neumann(&state.partial_trace(part)?))
}

fn disjoint(parts: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for part in parts {
        for l in *part {
            if seen.contains(l) {
                return Err(Error::OverlappingSelectors((*l).to_string()));
            }
            seen.push(l);
        }
    }
    Ok(())
}

fn union<'a>(parts: &[&[&'a str]]) -> Vec<&'a str> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// `I(A;B) = S(A) + S(B) - S(AB)`. Labels outside `a ∪ b` are traced out.
pub fn mutual_information(state: &QState, a: &[&str], b: &[&str]) -> Result<f64> {
    conditional_mutual_information(state, a, b, &[])
}

/// `I(A;B|E) = S(AE) + S(BE) - S(ABE) - S(E)`. `e` may be empty; labels outside
/// the three selectors are traced out.
pub fn conditional_mutual_information(
    state: &QState,
    a: &[&str],
    b: &[&str],
    e: &[&str],
) -> Result<f64> {
    disjoint(&[a, b, e])?;
    if a.is_empty() || b.is_empty() {
        // validate labels even for the degenerate case
        state.indices(&union(&[a, b, e]))?;
        return Ok(0.0);
    }
    let abe = state.partial_trace(&union(&[a, b, e]))?;
    let s_ae = marginal_entropy(&abe, &union(&[a, e]))?;
    let s_be = marginal_entropy(&abe, &union(&[b, e]))?;
    let s_abe = von_neumann(&abe);
    let s_e = marginal_entropy(&abe, e)?;
    Ok(s_ae + s_be - s_abe - s_e)
}

/// `S(A) - S(AB)`; negative values are meaningful.
pub fn coherent_information(state: &QState, a: &[&str], b: &[&str]) -> Result<f64> {
    disjoint(&[a, b])?;
    let ab = state.partial_trace(&union(&[a, b]))?;
    Ok(marginal_entropy(&ab, a)? - von_neumann(&ab))
}

/// Both sides of `[S(A)-S(AB)] + [S(A)-S(AC)] <= S(A) - S(ABC)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SsaReport {
    pub left: f64,
    pub right: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Strong-subadditivity form of the coherent-information monogamy bound for a
/// state over `a, b, c`.
pub fn ssa_monogamy_check(state: &QState, a: &[&str], b: &[&str], c: &[&str]) -> Result<SsaReport> {
    disjoint(&[a, b, c])?;
    let abc = state.partial_trace(&union(&[a, b, c]))?;
    let s_a = marginal_entropy(&abc, a)?;
    let s_ab = marginal_entropy(&abc, &union(&[a, b]))?;
    let s_ac = marginal_entropy(&abc, &union(&[a, c]))?;
    let s_abc = von_neumann(&abc);
    let left = (s_a - s_ab) + (s_a - s_ac);
    let right = s_a - s_abc;
    let slack = right - left;
    Ok(SsaReport {
        left,
        right,
        slack,
        holds: slack >= -INEQUALITY_TOL,
    })
}

/// `I(A;BC|E) - I(A;B|E) - I(A;C|BE)`, which vanishes identically.
pub fn chain_rule_residual(
    state: &QState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    e: &[&str],
) -> Result<f64> {
    disjoint(&[a, b, c, e])?;
    let bc = union(&[b, c]);
    let be = union(&[b, e]);
    let whole = conditional_mutual_information(state, a, &bc, e)?;
    let first = conditional_mutual_information(state, a, b, e)?;
    let second = conditional_mutual_information(state, a, c, &be)?;
    Ok(whole - first - second)
}
