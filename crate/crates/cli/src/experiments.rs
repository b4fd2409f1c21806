//! One function per experiment. Each returns its tables and a summary of
//! derived scalars for the manifest.

use std::f64::consts::PI;

use floquet_core::analysis::{
    default_trs_grid, gauge_real_reducible, h_1d_open, reflection_asymmetry, total_variation, trs_asymmetry,
};
use floquet_core::linalg::{expm_hermitian_with, logm_unitary_with, operator_norm, ComplexMatrix, StateVector};
use floquet_core::magnus::{
    heff_first_order, heff_order0, heff_order1, lab_frame_effective, period_bound, rotated_effective_couplings,
};
use floquet_core::model::{PeriodicHamiltonian, StaticHamiltonian};
use floquet_core::propagate::{
    converged_period_propagator, distribution_at, evolve_hermitian, period_propagator_magnus4,
    stroboscopic_from_unitary,
};
use floquet_core::protocols::{
    build_1d_nnn_protocol, build_star_cbg_protocol, build_switch_with, build_triangle_chain_with, effective_phase,
    nnn_edge_drive, switch_effective_model, triangle_chain_effective_model, triangle_effective_coupling,
    waveguide_coupling, waveguide_positions, waveguide_reconstructed_coupling, TriangleKind, TriangleProtocol,
};
use floquet_core::scalar::wrap_two_pi;
use floquet_core::Error;
use num_complex::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Chain, ErrorScaling, Nnn1d, Numerics, PeriodBound, StarCbg, Switch, TriangleSweep, Waveguides};
use crate::table::Table;
use crate::CliError;

pub(crate) struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub summary: Value,
    /// Largest steps per period used by any propagator; 0 when every drive
    /// was piecewise constant and propagated exactly.
    pub steps_used: usize,
}

fn numerical(context: &str) -> impl Fn(Error) -> CliError + '_ {
    move |source| CliError::Numerical {
        context: context.to_string(),
        source,
    }
}

fn core<E: Into<Error>>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| numerical(context)(e.into())
}

/// One-period propagator: exact for piecewise-constant drives, fixed-step
/// fourth order when `steps_per_period` is set, adaptive otherwise.
fn period_unitary(h: &PeriodicHamiltonian<f64>, numerics: &Numerics) -> Result<(ComplexMatrix<f64>, usize), Error> {
    if h.is_piecewise_constant() {
        let c = converged_period_propagator(h, &numerics.tolerances)?;
        return Ok((c.unitary, 0));
    }
    match numerics.steps_per_period {
        Some(n) => Ok((period_propagator_magnus4(h, n)?, n)),
        None => {
            let c = converged_period_propagator(h, &numerics.tolerances)?;
            Ok((c.unitary, c.steps_per_period))
        }
    }
}

/// `i log U(T) / T`.
fn numeric_heff(h: &PeriodicHamiltonian<f64>, numerics: &Numerics) -> Result<(ComplexMatrix<f64>, usize), Error> {
    let (u, steps) = period_unitary(h, numerics)?;
    let log = logm_unitary_with(&u, &numerics.tolerances)?;
    Ok((log.scale_real(1.0 / h.period()), steps))
}

fn push(table: &mut Table, row: Vec<f64>) {
    table.push_row(row).expect("row length fixed by construction");
}

fn loop_phase(m: &ComplexMatrix<f64>) -> f64 {
    wrap_two_pi((m[(0, 1)] * m[(1, 2)] * m[(2, 0)]).arg())
}

fn phase_or_nan(z: Complex<f64>) -> f64 {
    effective_phase(z).unwrap_or(f64::NAN)
}

pub(crate) fn triangle_sweep(p: &TriangleSweep, numerics: &Numerics) -> Result<Outcome, CliError> {
    let amplitudes = p.amplitude.values();
    let jobs: Vec<(f64, f64)> = p
        .periods
        .iter()
        .flat_map(|&t| amplitudes.iter().map(move |&a| (a, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(a, t)| -> Result<(Vec<f64>, usize), CliError> {
            let ctx = "triangle sweep";
            let proto = TriangleProtocol::new(p.kind, p.j_prime, a, t).map_err(core(ctx))?;
            let h = proto.hamiltonian().map_err(core(ctx))?;
            let (m, steps) = numeric_heff(&h, numerics).map_err(numerical(ctx))?;
            let closed = proto.effective_coupling();
            Ok((
                vec![
                    a,
                    t,
                    phase_or_nan(closed),
                    loop_phase(&m),
                    closed.norm(),
                    m[(0, 1)].norm(),
                ],
                steps,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["A", "T", "phi_closed", "phi_numeric", "absJ_closed", "absJ_numeric"]);
    let mut worst_phase: f64 = 0.0;
    let mut worst_mod: f64 = 0.0;
    let mut steps_used = 0;
    for (row, steps) in rows {
        let d = (row[2] - row[3] + PI).rem_euclid(2.0 * PI) - PI;
        if d.is_finite() {
            worst_phase = worst_phase.max(d.abs());
        }
        worst_mod = worst_mod.max((row[4] - row[5]).abs());
        steps_used = steps_used.max(steps);
        push(&mut table, row);
    }
    Ok(Outcome {
        tables: vec![("triangle_sweep".into(), table)],
        summary: json!({
            "rows": jobs.len(),
            "max_phase_deviation": worst_phase,
            "max_modulus_deviation": worst_mod,
        }),
        steps_used,
    })
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Real stroboscopic record and the first-order effective record at the
/// same times, both started on node 0.
fn stroboscopic_pair(
    h: &PeriodicHamiltonian<f64>,
    t_max: f64,
    numerics: &Numerics,
    ctx: &str,
) -> Result<(floquet_core::EvolutionRecord, floquet_core::EvolutionRecord, usize), CliError> {
    let t = h.period();
    let periods = (t_max / t + 1e-9).floor() as usize;
    let psi = StateVector::basis(h.dim(), 0);
    let (u, steps) = period_unitary(h, numerics).map_err(numerical(ctx))?;
    let real = stroboscopic_from_unitary(&u, t, &psi, periods).map_err(core(ctx))?;
    let rotated = rotated_effective_couplings(h.skeleton(), h.onsite_drives(), t).map_err(core(ctx))?;
    let eff = lab_frame_effective(&rotated, h.onsite_drives());
    let eff_rec = evolve_hermitian(&eff.matrix, &psi, &real.times).map_err(core(ctx))?;
    Ok((real, eff_rec, steps))
}

pub(crate) fn switch(p: &Switch, numerics: &Numerics) -> Result<Outcome, CliError> {
    let ctx = "switch";
    let sw = build_switch_with(p.kind, p.amplitude, p.period, p.arm_length).map_err(core(ctx))?;
    let (u_idx, d_idx) = (
        sw.index_of("U").expect("switch has U"),
        sw.index_of("D").expect("switch has D"),
    );
    let (real, eff, steps_used) = stroboscopic_pair(&sw.hamiltonian, p.t_max, numerics, ctx)?;
    let phi = phase_or_nan(triangle_effective_coupling(p.kind, 1.0, p.amplitude, p.period));
    let ideal = if phi.is_finite() {
        let h = switch_effective_model(phi, p.arm_length).map_err(core(ctx))?;
        Some(evolve_hermitian(&h.matrix(), &StateVector::basis(h.dim(), 0), &real.times).map_err(core(ctx))?)
    } else {
        None
    };
    let mut table = Table::new(&[
        "t",
        "P_U_real",
        "P_D_real",
        "P_U_effective",
        "P_D_effective",
        "P_U_ideal",
        "P_D_ideal",
    ]);
    let mut tv_max: f64 = 0.0;
    for k in 0..real.len() {
        let (pr, pe) = (&real.probabilities[k], &eff.probabilities[k]);
        tv_max = tv_max.max(total_variation(pr, pe).map_err(core(ctx))?);
        let (iu, id) = match &ideal {
            Some(rec) => (rec.probabilities[k][u_idx], rec.probabilities[k][d_idx]),
            None => (f64::NAN, f64::NAN),
        };
        push(
            &mut table,
            vec![real.times[k], pr[u_idx], pr[d_idx], pe[u_idx], pe[d_idx], iu, id],
        );
    }
    Ok(Outcome {
        summary: json!({
            "effective_phase": phi,
            "periods": real.len().saturating_sub(1),
            "max_P_U_real": max_of(&real.site_trace(u_idx)),
            "max_P_D_real": max_of(&real.site_trace(d_idx)),
            "max_total_variation_real_vs_effective": tv_max,
            "labels": sw.labels,
        }),
        tables: vec![("switch".into(), table)],
        steps_used,
    })
}

/// First local maximum above 0.05, if any.
fn first_peak(trace: &[f64]) -> Option<(usize, f64)> {
    (1..trace.len().saturating_sub(1))
        .find(|&k| trace[k] > 0.05 && trace[k] >= trace[k - 1] && trace[k] > trace[k + 1])
        .map(|k| (k, trace[k]))
}

pub(crate) fn chain(p: &Chain, numerics: &Numerics) -> Result<Outcome, CliError> {
    let ctx = "chain";
    let c = build_triangle_chain_with(p.kind, p.n_triangles, p.amplitude, p.period).map_err(core(ctx))?;
    let e_idx = c.index_of("E").expect("chain has E");
    let (real, eff, steps_used) = stroboscopic_pair(&c.hamiltonian, p.t_max, numerics, ctx)?;
    let plain = triangle_chain_effective_model(p.n_triangles, 0.0).map_err(core(ctx))?;
    let plain_rec =
        evolve_hermitian(&plain.matrix(), &StateVector::basis(plain.dim(), 0), &real.times).map_err(core(ctx))?;
    let mut table = Table::new(&["t", "P_E_real", "P_E_effective", "P_E_untwisted"]);
    for k in 0..real.len() {
        push(
            &mut table,
            vec![
                real.times[k],
                real.probabilities[k][e_idx],
                eff.probabilities[k][e_idx],
                plain_rec.probabilities[k][e_idx],
            ],
        );
    }
    let peak = |trace: Vec<f64>| match first_peak(&trace) {
        Some((k, v)) => json!({ "t": real.times[k], "P_E": v }),
        None => Value::Null,
    };
    Ok(Outcome {
        summary: json!({
            "effective_phase": phase_or_nan(triangle_effective_coupling(p.kind, 1.0, p.amplitude, p.period)),
            "first_peak_real": peak(real.site_trace(e_idx)),
            "first_peak_effective": peak(eff.site_trace(e_idx)),
            "first_peak_untwisted": peak(plain_rec.site_trace(e_idx)),
            "labels": c.labels,
        }),
        tables: vec![("chain".into(), table)],
        steps_used,
    })
}

pub(crate) fn nnn_1d(p: &Nnn1d, numerics: &Numerics) -> Result<Outcome, CliError> {
    let ctx = "nnn-1d";
    let plan = build_1d_nnn_protocol(p.n, p.k1, p.k2, p.period, p.t_evol).map_err(core(ctx))?;
    let start = p.start - 1;
    let psi = StateVector::basis(p.n, start);
    let (u, steps_used) = period_unitary(&plan.drive, numerics).map_err(numerical(ctx))?;
    let m = plan.periods();
    let real = stroboscopic_from_unitary(&u, plan.period(), &psi, m).map_err(core(ctx))?;
    let p_real = real.final_distribution().to_vec();
    let t_eff = plan.matched_time();
    let p_eff = distribution_at(&plan.target.matrix(), &psi, t_eff).map_err(core(ctx))?;
    let reference = h_1d_open(p.n, Complex::new(p.k1, 0.0), Complex::new(p.k2, 0.0)).map_err(core(ctx))?;
    let p_ref = distribution_at(&reference.matrix(), &psi, t_eff).map_err(core(ctx))?;
    let mut table = Table::new(&["p_effective", "p_protocol", "p_reference"]);
    for k in 0..p.n {
        push(&mut table, vec![p_eff[k], p_real[k], p_ref[k]]);
    }
    Ok(Outcome {
        summary: json!({
            "periods": m,
            "scale": plan.scale,
            "t_sim": plan.t_sim,
            "matched_time": t_eff,
            "total_variation": total_variation(&p_real, &p_eff).map_err(core(ctx))?,
            "reflection_asymmetry_effective": reflection_asymmetry(&p_eff, start).map_err(core(ctx))?,
            "reflection_asymmetry_protocol": reflection_asymmetry(&p_real, start).map_err(core(ctx))?,
            "reflection_asymmetry_reference": reflection_asymmetry(&p_ref, start).map_err(core(ctx))?,
        }),
        tables: vec![("nnn_1d".into(), table)],
        steps_used,
    })
}

pub(crate) fn star_cbg(p: &StarCbg, numerics: &Numerics) -> Result<Outcome, CliError> {
    let ctx = "star-cbg";
    let plan = build_star_cbg_protocol(p.n, &p.partition, p.j1, p.period).map_err(core(ctx))?;
    let h1 = heff_order1(&plan.drive).map_err(core(ctx))?;
    let (numeric, steps_used) = numeric_heff(&plan.drive, numerics).map_err(numerical(ctx))?;
    let target = plan.target.matrix();
    let mut table = Table::new(&[
        "i",
        "j",
        "target_re",
        "target_im",
        "order1_re",
        "order1_im",
        "numeric_re",
        "numeric_im",
    ]);
    let mut order1_err: f64 = 0.0;
    let mut numeric_err: f64 = 0.0;
    for i in 0..=p.n {
        for j in i + 1..=p.n {
            let (a, b, c) = (target[(i, j)], h1.entry(i, j), numeric[(i, j)]);
            order1_err = order1_err.max((a - b).norm());
            numeric_err = numeric_err.max((a - c).norm());
            push(&mut table, vec![i as f64, j as f64, a.re, a.im, b.re, b.im, c.re, c.im]);
        }
    }
    let graph = h1.to_static(1e-12).map_err(core(ctx))?;
    let (reducible, witness) = gauge_real_reducible(&graph);
    let trs = trs_asymmetry(&graph, &default_trs_grid(&graph)).map_err(core(ctx))?;
    Ok(Outcome {
        summary: json!({
            "max_order1_deviation": order1_err,
            "max_numeric_deviation": numeric_err,
            "gauge_real_reducible": reducible,
            "gauge_witness": witness,
            "trs_asymmetry": trs,
        }),
        tables: vec![("star_cbg".into(), table)],
        steps_used,
    })
}

pub(crate) fn waveguides(p: &Waveguides) -> Result<Outcome, CliError> {
    let ctx = "waveguides";
    let z = p.z.values();
    let x = waveguide_positions(p.n, p.kappa, p.gamma, p.j0, p.j1, p.omega, &z).map_err(core(ctx))?;
    let mut names = vec!["z".to_string()];
    names.extend((1..=p.n).map(|j| format!("x_{j}")));
    names.extend((1..p.n).map(|j| format!("J_{j}")));
    let mut table = Table::new(&names);
    let mut worst: f64 = 0.0;
    for (k, &zk) in z.iter().enumerate() {
        let mut row = vec![zk];
        row.extend(x.iter().map(|xj| xj[k]));
        for j in 1..p.n {
            let want = waveguide_coupling(j, zk, p.j0, p.j1, p.omega);
            let got = waveguide_reconstructed_coupling(&x, p.kappa, p.gamma, j, k);
            worst = worst.max((want - got).abs());
            row.push(want);
        }
        push(&mut table, row);
    }
    Ok(Outcome {
        summary: json!({ "max_reconstruction_error": worst }),
        tables: vec![("waveguides".into(), table)],
        steps_used: 0,
    })
}

fn one_d_drive(n: usize, j0: f64, j1: f64, t: f64) -> Result<PeriodicHamiltonian<f64>, Error> {
    let mut s = StaticHamiltonian::new(n)?;
    for k in 0..n - 1 {
        s.set_coupling(k, k + 1, Complex::new(1.0, 0.0))?;
    }
    let mut h = PeriodicHamiltonian::new(s, t)?;
    for k in 0..n - 1 {
        h = h.with_edge_drive(k, k + 1, nnn_edge_drive(k + 1, j0, j1)?)?;
    }
    Ok(h)
}

/// `||U(T) - e^{-i H T}||` for the order-0 and order-0+1 truncations.
fn truncation_errors(h: &PeriodicHamiltonian<f64>, numerics: &Numerics) -> Result<([f64; 2], usize), Error> {
    let (u, steps) = period_unitary(h, numerics)?;
    let mut out = [0.0; 2];
    for (k, heff) in [heff_order0(h), heff_first_order(h)?].into_iter().enumerate() {
        let approx = expm_hermitian_with(&heff.matrix.hermitian_part(), h.period(), &numerics.tolerances)?;
        out[k] = operator_norm(&(&u - &approx));
    }
    Ok((out, steps))
}

/// Least-squares slope of `ln y` against `ln x`.
pub(crate) fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub(crate) fn error_scaling(p: &ErrorScaling, numerics: &Numerics) -> Result<Outcome, CliError> {
    let ctx = "error-scaling";
    let rows = p
        .periods
        .par_iter()
        .map(|&t| -> Result<(Vec<f64>, usize), Error> {
            let tri = TriangleProtocol::new(TriangleKind::Step, 1.0, p.triangle_amplitude, t)?.hamiltonian()?;
            let (a, s1) = truncation_errors(&tri, numerics)?;
            let (b, s2) = truncation_errors(&one_d_drive(p.chain_sites, p.j0, p.j1, t)?, numerics)?;
            Ok((vec![t, a[0], a[1], b[0], b[1]], s1.max(s2)))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical(ctx))?;
    let mut table = Table::new(&[
        "T",
        "triangle_order0",
        "triangle_order1",
        "chain_order0",
        "chain_order1",
    ]);
    let mut steps_used = 0;
    for (row, steps) in rows {
        steps_used = steps_used.max(steps);
        push(&mut table, row);
    }
    let ts = table.column("T").expect("column exists");
    let slope = |name: &str| log_log_slope(&ts, &table.column(name).expect("column exists"));
    Ok(Outcome {
        summary: json!({
            "slope_triangle_order0": slope("triangle_order0"),
            "slope_triangle_order1": slope("triangle_order1"),
            "slope_chain_order0": slope("chain_order0"),
            "slope_chain_order1": slope("chain_order1"),
        }),
        tables: vec![("error_scaling".into(), table)],
        steps_used,
    })
}

pub(crate) fn period_bound_table(p: &PeriodBound, numerics: &Numerics) -> Result<Outcome, CliError> {
    let ctx = "period-bound";
    if let Some(h_max) = p.h_max {
        let mut table = Table::new(&["order", "period"]);
        for order in [0u8, 1] {
            let t = period_bound(p.eps, p.t_evol, h_max, order).map_err(core(ctx))?;
            push(&mut table, vec![order as f64, t]);
        }
        return Ok(Outcome {
            summary: json!({}),
            tables: vec![("period_bound".into(), table)],
            steps_used: 0,
        });
    }
    let a = p.switch_amplitude.expect("validated");
    let rows = [0u8, 1]
        .par_iter()
        .map(|&order| -> Result<Vec<f64>, Error> {
            // h_max depends on T through the compensation factors.
            let mut t = 0.2;
            for _ in 0..p.iterations {
                let h = build_switch_with(TriangleKind::Step, a, t, p.arm_length)?.hamiltonian;
                t = period_bound(p.eps, p.t_evol, h.h_max(), order)?;
            }
            let h = build_switch_with(TriangleKind::Step, a, t, p.arm_length)?.hamiltonian;
            let m = (p.t_evol / t - 1e-9).ceil().max(1.0) as u64;
            let (u, _) = period_unitary(&h, numerics)?;
            let heff = if order == 0 {
                heff_order0(&h)
            } else {
                heff_first_order(&h)?
            };
            let approx = expm_hermitian_with(&heff.matrix.hermitian_part(), m as f64 * t, &numerics.tolerances)?;
            let err = operator_norm(&(&u.powu(m) - &approx));
            Ok(vec![order as f64, t, h.h_max(), m as f64, err])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical(ctx))?;
    let mut table = Table::new(&["order", "period", "h_max", "periods", "measured_error"]);
    for row in rows {
        push(&mut table, row);
    }
    Ok(Outcome {
        summary: json!({}),
        tables: vec![("period_bound".into(), table)],
        steps_used: 0,
    })
}
