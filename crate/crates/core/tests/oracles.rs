//! Comparisons against values frozen in `data/oracles.json`, produced by the
//! standalone numpy script `data/oracles.py`.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use monogamy_core::entropy;
use monogamy_core::keyrates::chain_inequality_check;
use monogamy_core::linalg::{c, outer, CMatrix, CVector};
use monogamy_core::povm::{holevo_quantity, Povm};
use monogamy_core::qstate::{catalog, CatalogEntry, QState};
use monogamy_core::variational::{concurrence, optimize_eof, optimize_holevo_on, wootters_eof, Budget};
use serde_json::Value;

fn oracle() -> Value {
    serde_json::from_str(include_str!("data/oracles.json")).unwrap()
}

fn get(v: &Value, state: &str, key: &str) -> f64 {
    v[state][key].as_f64().unwrap_or_else(|| panic!("missing {state}.{key}"))
}

fn ket(amps: &[(f64, f64)]) -> CVector {
    let v = CVector::from_iterator(amps.len(), amps.iter().map(|&(re, im)| c(re, im)));
    let n = v.norm();
    v / c(n, 0.0)
}

fn real_ket(amps: &[f64]) -> CVector {
    ket(&amps.iter().map(|&x| (x, 0.0)).collect::<Vec<_>>())
}

fn mix(terms: &[(f64, CMatrix)]) -> CMatrix {
    let n = terms[0].1.nrows();
    terms.iter().fold(CMatrix::zeros(n, n), |acc, (p, m)| acc + m * c(*p, 0.0))
}

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n) / c(n as f64, 0.0)
}

fn s1() -> QState {
    let m = mix(&[
        (0.6, outer(&real_ket(&[1.0, 0.0, 0.0, 1.0]))),
        (0.3, outer(&real_ket(&[0.0, 1.0, 0.0, 0.0]))),
        (0.1, outer(&real_ket(&[0.0, 0.0, 1.0, 0.0]))),
    ]);
    QState::with_labels(vec![2, 2], &["A", "B"], m).unwrap()
}

fn s2() -> QState {
    let psi = ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 2.0)]);
    let m = mix(&[(0.7, outer(&psi)), (0.3, identity(4))]);
    QState::with_labels(vec![2, 2], &["A", "B"], m).unwrap()
}

fn s3() -> QState {
    let ghz = real_ket(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let w = real_ket(&[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let m = mix(&[(0.5, outer(&ghz)), (0.3, outer(&w)), (0.2, identity(8))]);
    QState::with_labels(vec![2, 2, 2], &["A", "B", "C"], m).unwrap()
}

fn s4() -> QState {
    // (|0,0> + |1,1> + |2,0>)/√3 on a qutrit and a qubit
    let chi = real_ket(&[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
    let m = mix(&[(0.5, outer(&chi)), (0.5, identity(6))]);
    QState::with_labels(vec![3, 2], &["A", "B"], m).unwrap()
}

fn trine(target: &str) -> Povm {
    let elements = (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0;
            outer(&real_ket(&[(t / 2.0).cos(), (t / 2.0).sin()])) * c(2.0 / 3.0, 0.0)
        })
        .collect();
    Povm::new(target, elements).unwrap()
}

#[test]
fn two_qubit_exact_values() {
    let o = oracle();
    for (name, s) in [("s1", s1()), ("s2", s2())] {
        assert_abs_diff_eq!(concurrence(&s).unwrap(), get(&o, name, "concurrence"), epsilon = 1e-9);
        assert_abs_diff_eq!(wootters_eof(&s).unwrap(), get(&o, name, "eof"), epsilon = 1e-9);
        assert_abs_diff_eq!(entropy::marginal_entropy(&s, &["A"]).unwrap(), get(&o, name, "s_a"), epsilon = 1e-10);
        assert_abs_diff_eq!(entropy::marginal_entropy(&s, &["B"]).unwrap(), get(&o, name, "s_b"), epsilon = 1e-10);
        assert_abs_diff_eq!(entropy::von_neumann(&s), get(&o, name, "s_ab"), epsilon = 1e-10);
        assert_abs_diff_eq!(
            entropy::coherent_information(&s, &["A"], &["B"]).unwrap(),
            get(&o, name, "coherent_information"),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            holevo_quantity(&s, &Povm::computational_basis("B", 2)).unwrap(),
            get(&o, name, "holevo_basis_b"),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(holevo_quantity(&s, &trine("B")).unwrap(), get(&o, name, "holevo_trine_b"), epsilon = 1e-10);
    }
}

#[test]
fn optimizers_approach_oracles_from_the_certified_side() {
    let o = oracle();
    let budget = Budget::new(8_000).with_restarts(12);
    let werner = catalog(&CatalogEntry::Werner(0.9)).unwrap().to_density();
    let w_ab = catalog(&CatalogEntry::W).unwrap().to_density().partial_trace(&["A", "B"]).unwrap();
    for (name, key, s) in [
        ("s1", "eof", s1()),
        ("s2", "eof", s2()),
        ("werner_0_9", "eof", werner),
        ("w", "eof_ab", w_ab),
    ] {
        let exact = get(&o, name, key);
        let r = optimize_eof(&s, &budget).unwrap();
        assert!(r.value >= exact - 1e-8, "{name}: {} below {exact}", r.value);
        assert!(r.value - exact <= 1e-3, "{name}: {} vs {exact}", r.value);
    }
    for name in ["s1", "s2"] {
        let s = if name == "s1" { s1() } else { s2() };
        let comp = s.purify("B'").unwrap().partial_trace(&["A", "B'"]).unwrap();
        let exact = get(&o, name, "i_back_complement");
        let r = optimize_holevo_on(&comp, "B'", &budget, &[]).unwrap();
        assert!(r.value <= exact + 1e-8, "{name}: {} above {exact}", r.value);
        assert!(exact - r.value <= 1e-3, "{name}: {} vs {exact}", r.value);
    }
}

#[test]
fn three_qubit_entropic_values() {
    let o = oracle();
    let s = s3();
    let cmi = |a: &str, b: &str, e: &str| entropy::conditional_mutual_information(&s, &[a], &[b], &[e]).unwrap();
    assert_abs_diff_eq!(cmi("A", "B", "C"), get(&o, "s3", "cmi_a_b_given_c"), epsilon = 1e-10);
    assert_abs_diff_eq!(cmi("A", "C", "B"), get(&o, "s3", "cmi_a_c_given_b"), epsilon = 1e-10);
    assert_abs_diff_eq!(
        entropy::mutual_information(&s, &["A"], &["B", "C"]).unwrap(),
        get(&o, "s3", "mi_a_bc"),
        epsilon = 1e-10
    );
    let ssa = entropy::ssa_monogamy_check(&s, &["A"], &["B"], &["C"]).unwrap();
    assert_abs_diff_eq!(ssa.slack, get(&o, "s3", "ssa_slack"), epsilon = 1e-10);
}

#[test]
fn chain_terms_match_holevo_formula() {
    let o = oracle();
    let r = chain_inequality_check(
        &s3(),
        &Povm::computational_basis("B", 2),
        &Povm::computational_basis("C", 2),
        &["A"],
        &[],
    )
    .unwrap();
    assert_abs_diff_eq!(r.i_x_a, get(&o, "s3", "i_x_a"), epsilon = 1e-10);
    assert_abs_diff_eq!(r.i_y_a, get(&o, "s3", "i_y_a"), epsilon = 1e-10);
    assert_abs_diff_eq!(r.i_y_be, get(&o, "s3", "i_y_b"), epsilon = 1e-10);
    assert_abs_diff_eq!(r.i_xy_a, get(&o, "s3", "i_xy_a"), epsilon = 1e-10);
    assert!(r.holds);
}

#[test]
fn qutrit_qubit_values() {
    let o = oracle();
    let s = s4();
    assert_abs_diff_eq!(entropy::marginal_entropy(&s, &["A"]).unwrap(), get(&o, "s4", "s_a"), epsilon = 1e-10);
    assert_abs_diff_eq!(entropy::von_neumann(&s), get(&o, "s4", "s_ab"), epsilon = 1e-10);
    assert_abs_diff_eq!(
        entropy::mutual_information(&s, &["A"], &["B"]).unwrap(),
        get(&o, "s4", "mutual_information"),
        epsilon = 1e-10
    );
    assert_abs_diff_eq!(
        holevo_quantity(&s, &Povm::computational_basis("B", 2)).unwrap(),
        get(&o, "s4", "holevo_basis_b"),
        epsilon = 1e-10
    );
    assert_abs_diff_eq!(holevo_quantity(&s, &trine("B")).unwrap(), get(&o, "s4", "holevo_trine_b"), epsilon = 1e-10);
}

#[test]
fn w_and_werner_closed_forms() {
    let o = oracle();
    let w = catalog(&CatalogEntry::W).unwrap().to_density();
    let ab = w.partial_trace(&["A", "B"]).unwrap();
    assert_abs_diff_eq!(concurrence(&ab).unwrap(), get(&o, "w", "concurrence_ab"), epsilon = 1e-9);
    assert_abs_diff_eq!(wootters_eof(&ab).unwrap(), get(&o, "w", "eof_ab"), epsilon = 1e-9);
    assert_abs_diff_eq!(entropy::marginal_entropy(&w, &["A"]).unwrap(), get(&o, "w", "s_a"), epsilon = 1e-10);
    let werner = catalog(&CatalogEntry::Werner(0.9)).unwrap().to_density();
    assert_abs_diff_eq!(concurrence(&werner).unwrap(), get(&o, "werner_0_9", "concurrence"), epsilon = 1e-9);
    assert_abs_diff_eq!(
        entropy::coherent_information(&werner, &["A"], &["B"]).unwrap(),
        get(&o, "werner_0_9", "coherent_information"),
        epsilon = 1e-10
    );
}
