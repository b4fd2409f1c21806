//! Strategies and invariant checks shared by the property suite and the
//! acceptance runner.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use floquet_core::analysis::{gauge_transform, transition_matrix, GaugePhases};
use floquet_core::linalg::{unitarity_residual, StateVector};
use floquet_core::magnus::{coupling_renormalization, heff_order1, pair_symmetry_check};
use floquet_core::model::{Drive, Harmonic, PeriodicHamiltonian, StaticHamiltonian};
use floquet_core::propagate::{converged_period_propagator, stroboscopic_from_unitary};
use floquet_core::protocols::{
    nnn_edge_drive, waveguide_coupling, waveguide_positions, waveguide_reconstructed_coupling,
};
use floquet_core::NumericsSettings;
use num_complex::Complex;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type Check = Result<(), TestCaseError>;

fn fail(msg: String) -> Check {
    Err(TestCaseError::fail(msg))
}

/// Random complex coupling graph with on-site energies.
pub fn static_hamiltonian() -> impl Strategy<Value = StaticHamiltonian<f64>> {
    (2usize..7)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                prop::collection::vec((any::<bool>(), -2.0..2.0f64, -2.0..2.0f64), pairs),
                prop::collection::vec(-1.0..1.0f64, n),
            )
        })
        .prop_map(|(n, edges, onsite)| {
            let mut h = StaticHamiltonian::new(n).unwrap();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    let (on, re, im) = edges[k];
                    k += 1;
                    if on || j == i + 1 {
                        h.set_coupling(i, j, Complex::new(re, im)).unwrap();
                    }
                }
                h.set_onsite(i, onsite[i]).unwrap();
            }
            h
        })
}

/// `dc + sum a_l cos(l Omega t + phi_l)` with up to three harmonics.
pub fn harmonic_drive(max_amp: f64) -> impl Strategy<Value = Drive<f64>> {
    (
        -max_amp..max_amp,
        prop::collection::btree_map(1u32..4, (-max_amp..max_amp, -PI..PI), 0..3),
    )
        .prop_map(|(dc, hs)| {
            Drive::harmonic(dc, hs.into_iter().map(|(l, (a, p))| Harmonic::new(l, a, p)).collect()).unwrap()
        })
}

/// Equal-length steps with up to four segments.
pub fn step_drive(max_amp: f64) -> impl Strategy<Value = Drive<f64>> {
    prop::collection::vec(-max_amp..max_amp, 1..5).prop_map(|v| Drive::steps(v).unwrap())
}

pub fn any_drive(max_amp: f64) -> impl Strategy<Value = Drive<f64>> {
    prop_oneof![harmonic_drive(max_amp), step_drive(max_amp)]
}

/// Real path-plus-chords skeleton with random edge and on-site drives.
pub fn periodic_hamiltonian() -> impl Strategy<Value = PeriodicHamiltonian<f64>> {
    (2usize..6, 0.1..1.0f64)
        .prop_flat_map(|(n, period)| {
            (
                Just(n),
                Just(period),
                prop::collection::vec(-1.5..1.5f64, n - 1),
                prop::collection::vec(prop::option::of(any_drive(3.0)), n - 1),
                prop::collection::vec(prop::option::of(any_drive(3.0)), n),
            )
        })
        .prop_map(|(n, period, couplings, edge_drives, onsite_drives)| {
            let mut s = StaticHamiltonian::new(n).unwrap();
            for (k, &c) in couplings.iter().enumerate() {
                s.set_coupling(k, k + 1, Complex::new(c, 0.0)).unwrap();
            }
            let mut h = PeriodicHamiltonian::new(s, period).unwrap();
            for (k, d) in edge_drives.into_iter().enumerate() {
                if let Some(d) = d {
                    h = h.with_edge_drive(k, k + 1, d).unwrap();
                }
            }
            for (k, d) in onsite_drives.into_iter().enumerate() {
                if let Some(d) = d {
                    h = h.with_onsite_drive(k, d).unwrap();
                }
            }
            h
        })
}

/// Period propagators are unitary and stroboscopic evolution keeps the norm.
pub fn check_unitarity(h: &PeriodicHamiltonian<f64>) -> Check {
    let u = converged_period_propagator(h, &NumericsSettings::default())
        .map_err(|e| TestCaseError::fail(e.to_string()))?
        .unitary;
    let r = unitarity_residual(&u);
    if r > 1e-9 {
        return fail(format!("unitarity residual {r:e}"));
    }
    let psi = StateVector::basis(h.dim(), 0);
    let rec = stroboscopic_from_unitary(&u, h.period(), &psi, 50).unwrap();
    for s in &rec.states {
        if (s.norm() - 1.0).abs() > 1e-9 {
            return fail(format!("norm drift {:e}", s.norm() - 1.0));
        }
    }
    Ok(())
}

/// Transition probabilities do not depend on the gauge.
pub fn check_gauge_invariance(h: &StaticHamiltonian<f64>, phases: &[f64], t: f64) -> Check {
    let g = gauge_transform(h, &GaugePhases(phases[..h.dim()].to_vec())).unwrap();
    let p = transition_matrix(h, t).unwrap();
    let q = transition_matrix(&g, t).unwrap();
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            if (p[i][j] - q[i][j]).abs() > 1e-12 {
                return fail(format!("P[{i}][{j}] changed by {:e}", p[i][j] - q[i][j]));
            }
        }
    }
    Ok(())
}

/// Real drives on a real skeleton give a purely imaginary first-order term
/// with zero diagonal.
pub fn check_order1_imaginary(h: &PeriodicHamiltonian<f64>) -> Check {
    let h1 = heff_order1(h).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let scale = h1.matrix.max_abs().max(1.0);
    for i in 0..h1.dim() {
        if h1.entry(i, i).norm() > 1e-12 * scale {
            return fail(format!("diagonal {i}: {}", h1.entry(i, i)));
        }
        for j in 0..h1.dim() {
            if h1.entry(i, j).re.abs() > 1e-10 * scale {
                return fail(format!("real part at ({i},{j}): {}", h1.entry(i, j)));
            }
        }
    }
    Ok(())
}

fn two_frequency_chain(n: usize, period: f64, j0: f64, j1: f64) -> PeriodicHamiltonian<f64> {
    let mut s = StaticHamiltonian::new(n).unwrap();
    for k in 0..n - 1 {
        s.set_coupling(k, k + 1, Complex::new(1.0, 0.0)).unwrap();
    }
    let mut h = PeriodicHamiltonian::new(s, period).unwrap();
    for k in 0..n - 1 {
        h = h
            .with_edge_drive(k, k + 1, nnn_edge_drive(k + 1, j0, j1).unwrap())
            .unwrap();
    }
    h
}

/// With the two-frequency drive the first-order term does not see `J0`.
pub fn check_j0_independence(n: usize, period: f64, j0a: f64, j0b: f64, j1: f64) -> Check {
    let a = heff_order1(&two_frequency_chain(n, period, j0a, j1)).unwrap();
    let b = heff_order1(&two_frequency_chain(n, period, j0b, j1)).unwrap();
    let d = a.matrix.max_abs_diff(&b.matrix);
    if d > 1e-12 * a.matrix.max_abs().max(1.0) {
        return fail(format!("order-1 term moved by {d:e}"));
    }
    Ok(())
}

/// `|<exp(i V_ij)>| <= 1`.
pub fn check_renormalization_bound(bi: Option<&Drive<f64>>, bj: Option<&Drive<f64>>, period: f64) -> Check {
    let z = coupling_renormalization(bi, bj, period);
    if z.norm() > 1.0 + 1e-12 {
        return fail(format!("|J_eff / J| = {}", z.norm()));
    }
    Ok(())
}

/// Even drives (cosines with phase 0 or pi) pass the inversion test; odd
/// harmonics alone pass the shift test. Either way `Im J_eff = 0`.
pub fn symmetric_pair() -> impl Strategy<Value = (Drive<f64>, Drive<f64>)> {
    let even = || {
        prop::collection::btree_map(1u32..5, (-3.0..3.0f64, any::<bool>()), 1..4).prop_map(|hs| {
            Drive::harmonic(
                0.0,
                hs.into_iter()
                    .map(|(l, (a, flip))| Harmonic::new(l, a, if flip { PI } else { 0.0 }))
                    .collect(),
            )
            .unwrap()
        })
    };
    let odd = || {
        prop::collection::btree_map(0u32..3, (-3.0..3.0f64, -PI..PI), 1..4).prop_map(|hs| {
            Drive::harmonic(
                0.0,
                hs.into_iter()
                    .map(|(k, (a, p))| Harmonic::new(2 * k + 1, a, p))
                    .collect(),
            )
            .unwrap()
        })
    };
    prop_oneof![(even(), even()), (odd(), odd())]
}

pub fn check_symmetric_pair_real(bi: &Drive<f64>, bj: &Drive<f64>, period: f64) -> Check {
    let report = pair_symmetry_check(Some(bi), Some(bj), period, 512).unwrap();
    if report.breaks_inversion && report.breaks_shift_inversion {
        return fail(format!("generator produced a fully asymmetric pair: {report:?}"));
    }
    let z = coupling_renormalization(Some(bi), Some(bj), period);
    if z.im.abs() > 1e-9 {
        return fail(format!("Im J_eff = {:e}", z.im));
    }
    Ok(())
}

/// Couplings rebuilt from the solved positions reproduce the drive.
pub fn check_waveguide_round_trip(n: usize, kappa: f64, gamma: f64, j0: f64, j1: f64, omega: f64) -> Check {
    let z: Vec<f64> = (0..64).map(|k| k as f64 * 0.1).collect();
    let x = waveguide_positions(n, kappa, gamma, j0, j1, omega, &z).unwrap();
    for j in 1..n {
        for (k, &zk) in z.iter().enumerate() {
            let back = waveguide_reconstructed_coupling(&x, kappa, gamma, j, k);
            let want = waveguide_coupling(j, zk, j0, j1, omega);
            if (back - want).abs() > 1e-12 {
                return fail(format!("edge {j} z={zk}: {back} vs {want}"));
            }
        }
    }
    Ok(())
}

pub fn waveguide_params() -> impl Strategy<Value = (usize, f64, f64, f64, f64, f64)> {
    (
        2usize..8,
        3.0..6.0f64,
        0.5..3.0f64,
        0.5..1.5f64,
        0.0..0.1f64,
        0.2..3.0f64,
    )
}

pub fn renormalization_case() -> impl Strategy<Value = (Option<Drive<f64>>, Option<Drive<f64>>, f64)> {
    (
        prop::option::of(any_drive(20.0)),
        prop::option::of(any_drive(20.0)),
        0.05..1.0f64,
    )
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Runs every property with a fixed seed; returns one line per failure.
pub fn run_all(cases: u32) -> Vec<String> {
    let results = [
        (
            "unitarity",
            runner(cases)
                .run(&periodic_hamiltonian(), |h| check_unitarity(&h))
                .map_err(|e| e.to_string()),
        ),
        (
            "gauge invariance",
            runner(cases)
                .run(
                    &(static_hamiltonian(), prop::collection::vec(-PI..PI, 7), 0.0..5.0f64),
                    |(h, p, t)| check_gauge_invariance(&h, &p, t),
                )
                .map_err(|e| e.to_string()),
        ),
        (
            "order-1 imaginary",
            runner(cases)
                .run(&periodic_hamiltonian(), |h| check_order1_imaginary(&h))
                .map_err(|e| e.to_string()),
        ),
        (
            "J0 independence",
            runner(cases)
                .run(
                    &(3usize..9, 0.05..1.0f64, -3.0..3.0f64, -3.0..3.0f64, 0.0..2.0f64),
                    |(n, t, a, b, j1)| check_j0_independence(n, t, a, b, j1),
                )
                .map_err(|e| e.to_string()),
        ),
        (
            "|J_eff| <= |J|",
            runner(cases)
                .run(&renormalization_case(), |(a, b, t)| {
                    check_renormalization_bound(a.as_ref(), b.as_ref(), t)
                })
                .map_err(|e| e.to_string()),
        ),
        (
            "Im J_eff = 0 under symmetry",
            runner(cases)
                .run(&(symmetric_pair(), 0.1..1.0f64), |((a, b), t)| {
                    check_symmetric_pair_real(&a, &b, t)
                })
                .map_err(|e| e.to_string()),
        ),
        (
            "waveguide round trip",
            runner(cases)
                .run(&waveguide_params(), |(n, k, g, j0, j1, w)| {
                    check_waveguide_round_trip(n, k, g, j0, j1, w)
                })
                .map_err(|e| e.to_string()),
        ),
    ];
    results
        .into_iter()
        .filter_map(|(name, r)| r.err().map(|e| format!("{name}: {e}")))
        .collect()
}
