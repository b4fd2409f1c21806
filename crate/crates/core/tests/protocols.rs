use std::f64::consts::PI;

use floquet_core::analysis::{gauge_real_reducible, total_variation, trs_asymmetry};
use floquet_core::linalg::StateVector;
use floquet_core::magnus::{heff_numeric, rotated_effective_couplings};
use floquet_core::model::PeriodicHamiltonian;
use floquet_core::propagate::{
    converged_period_propagator, evolve_hermitian, evolve_static, stroboscopic_from_unitary,
};
use floquet_core::protocols::{
    build_1d_nnn_protocol, build_star_cbg_protocol, build_switch, build_triangle_chain, effective_phase,
    switch_effective_model, triangle_chain_effective_model, triangle_effective_coupling, TriangleKind,
    TriangleProtocol,
};
use floquet_core::NumericsSettings;

fn rotated_couplings(p: &TriangleProtocol<f64>) -> [num_complex::Complex<f64>; 3] {
    let h = p.hamiltonian().unwrap();
    let e = rotated_effective_couplings(h.skeleton(), h.onsite_drives(), p.period).unwrap();
    [e.entry(0, 1), e.entry(1, 2), e.entry(2, 0)]
}

#[test]
fn closed_forms_match_generic_rotating_frame() {
    for kind in [TriangleKind::Step, TriangleKind::Sine] {
        for &(a, t) in &[(5.0, 0.3), (20.0, 0.3), (63.12, 0.2), (35.0, 0.5), (90.0, 0.5)] {
            let p = TriangleProtocol::new(kind, 1.0, a, t).unwrap();
            let closed = p.effective_coupling();
            let tol = if kind == TriangleKind::Step { 1e-10 } else { 1e-9 };
            for z in rotated_couplings(&p) {
                assert!((z - closed).norm() < tol, "{kind:?} A={a} T={t}: {z} vs {closed}");
            }
        }
    }
}

#[test]
fn sine_phase_near_quarter_turn_at_35() {
    let phi = effective_phase(triangle_effective_coupling(TriangleKind::Sine, 1.0, 35.0, 0.5)).unwrap();
    // The phase rises by about 0.22 rad per unit amplitude here.
    assert!((phi - PI / 2.0).abs() < 0.35, "{phi}");
    let at = |a: f64| effective_phase(triangle_effective_coupling(TriangleKind::Sine, 1.0, a, 0.5)).unwrap();
    assert!(at(33.0) < PI / 2.0 && at(37.0) > PI / 2.0);
}

#[test]
fn step_phase_exceeds_sine_phase() {
    for k in 1..=30 {
        let a = k as f64;
        let s = effective_phase(triangle_effective_coupling(TriangleKind::Step, 1.0, a, 0.5)).unwrap();
        let w = effective_phase(triangle_effective_coupling(TriangleKind::Sine, 1.0, a, 0.5)).unwrap();
        assert!(s > w, "A={a}: step {s} sine {w}");
    }
}

#[test]
fn numeric_coupling_approaches_closed_form_at_small_period() {
    // T=0.3, A=20 from the spec; the discrepancy must shrink with J'T.
    let closed = triangle_effective_coupling(TriangleKind::Step, 1.0f64, 20.0, 0.3);
    let mut prev = f64::INFINITY;
    for &j in &[1.0, 0.5, 0.25] {
        let p = TriangleProtocol::new(TriangleKind::Step, j, 20.0, 0.3).unwrap();
        let h = heff_numeric(&p.hamiltonian().unwrap(), 1).unwrap();
        let z = h.entry(0, 1) * h.entry(1, 2) * h.entry(2, 0);
        let loop_closed = (closed * j).powu(3);
        let d: f64 = (z.arg() - loop_closed.arg()).abs();
        assert!(d < prev, "J'={j}: {d}");
        prev = d;
    }
}

#[test]
fn switch_without_drive_is_balanced() {
    let sw = build_switch(0.0, 0.2, 2).unwrap();
    let (u, d) = (sw.index_of("U").unwrap(), sw.index_of("D").unwrap());
    let times: Vec<f64> = (0..200).map(|k| k as f64 * 0.05).collect();
    let rec = evolve_static(sw.hamiltonian.skeleton(), &StateVector::basis(8, 0), &times).unwrap();
    for k in 0..times.len() {
        assert!((rec.probabilities[k][u] - rec.probabilities[k][d]).abs() < 1e-12);
    }
}

fn switch_bias(a: f64) -> (f64, f64) {
    let sw = build_switch(a, 0.2, 2).unwrap();
    let h = &sw.hamiltonian;
    let unitary = converged_period_propagator(h, &NumericsSettings::default())
        .unwrap()
        .unitary;
    let rec = stroboscopic_from_unitary(&unitary, 0.2, &StateVector::basis(8, 0), 40).unwrap();
    let max = |node: &str| {
        rec.site_trace(sw.index_of(node).unwrap())
            .into_iter()
            .fold(0.0, f64::max)
    };
    (max("U"), max("D"))
}

#[test]
fn switch_biases_mirror() {
    let (u1, d1) = switch_bias(63.12);
    let (u2, d2) = switch_bias(80.2575);
    assert!(u1 > d1 + 0.1, "A=63.12: U {u1} D {d1}");
    assert!(d2 > u2 + 0.1, "A=80.2575: U {u2} D {d2}");
    assert!((0.6..1.0).contains(&u1));
}

#[test]
fn ideal_switch_mirror_is_exact() {
    let times: Vec<f64> = (0..400).map(|k| k as f64 * 0.05).collect();
    let a = evolve_static(
        &switch_effective_model(PI / 2.0, 3).unwrap(),
        &StateVector::basis(10, 0),
        &times,
    )
    .unwrap();
    let b = evolve_static(
        &switch_effective_model(1.5 * PI, 3).unwrap(),
        &StateVector::basis(10, 0),
        &times,
    )
    .unwrap();
    for k in 0..times.len() {
        assert!((a.probabilities[k][6] - b.probabilities[k][9]).abs() < 1e-12);
        assert!((a.probabilities[k][9] - b.probabilities[k][6]).abs() < 1e-12);
    }
}

fn first_peak(trace: &[f64]) -> f64 {
    for k in 1..trace.len() - 1 {
        if trace[k] > 0.05 && trace[k] >= trace[k - 1] && trace[k] > trace[k + 1] {
            return trace[k];
        }
    }
    panic!("no peak");
}

#[test]
fn chain_phase_enhances_transport() {
    let n = 3;
    let times: Vec<f64> = (0..=3000).map(|k| k as f64 * 0.005).collect();
    let e = 2 * n;
    let peak = |phi: f64| {
        let h = triangle_chain_effective_model(n, phi).unwrap();
        let rec = evolve_static(&h, &StateVector::basis(2 * n + 1, 0), &times).unwrap();
        first_peak(&rec.site_trace(e))
    };
    let (chiral, plain) = (peak(PI / 2.0), peak(0.0));
    assert!(chiral > plain, "phi=pi/2: {chiral}, phi=0: {plain}");
}

#[test]
fn chain_without_drive_is_three_triangles() {
    let c = build_triangle_chain(3, 0.0, 0.2).unwrap();
    let plain = triangle_chain_effective_model(3, 0.0).unwrap();
    assert_eq!(c.labels.first().map(String::as_str), Some("S"));
    assert_eq!(c.labels.last().map(String::as_str), Some("E"));
    assert!(c.hamiltonian.skeleton().matrix().max_abs_diff(&plain.matrix()) < 1e-15);
}

#[test]
fn chain_drive_tracks_effective_model() {
    let c = build_triangle_chain(2, 63.12, 0.2).unwrap();
    let h = &c.hamiltonian;
    let rotated = rotated_effective_couplings(h.skeleton(), h.onsite_drives(), 0.2).unwrap();
    let unitary = converged_period_propagator(h, &NumericsSettings::default())
        .unwrap()
        .unitary;
    let psi = StateVector::basis(5, 0);
    // First-order agreement only holds before the higher-order drift builds up.
    let real = stroboscopic_from_unitary(&unitary, 0.2, &psi, 5).unwrap();
    let eff = evolve_hermitian(&rotated.matrix, &psi, &real.times).unwrap();
    for k in 0..real.len() {
        let tv = total_variation(&real.probabilities[k], &eff.probabilities[k]).unwrap();
        assert!(tv < 0.15, "period {k}: {tv}");
    }
}

#[test]
fn star_target_is_gauge_trivial() {
    let plan = build_star_cbg_protocol(7, &[1, 2, 4, 6], 1.0f64, 0.5).unwrap();
    let (ok, witness) = gauge_real_reducible(&plan.target);
    assert!(ok);
    let w = witness.unwrap();
    // Leaves outside P pick up a relative quarter turn.
    assert!((w.0[3] - w.0[5]).abs() < 1e-12f64);
    let grid: Vec<f64> = (1..=50).map(|k| k as f64 * 0.5).collect();
    assert!(trs_asymmetry(&plan.target, &grid).unwrap() < 1e-10);
}

#[test]
fn periodic_hamiltonian_json_round_trip() {
    let plan = build_1d_nnn_protocol(6, 1.0, 0.2, 0.5, 7.0).unwrap();
    let text = serde_json::to_string(&plan.drive).unwrap();
    let back: PeriodicHamiltonian<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, plan.drive);
    let sw = build_switch(63.12, 0.2, 2).unwrap().hamiltonian;
    let text = serde_json::to_string(&sw).unwrap();
    let back: PeriodicHamiltonian<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, sw);
    let proto = TriangleProtocol::new(TriangleKind::Sine, 1.0, 35.0, 0.5).unwrap();
    let back: TriangleProtocol<f64> = serde_json::from_str(&serde_json::to_string(&proto).unwrap()).unwrap();
    assert_eq!(back, proto);
}
