use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use crate::magnus::coupling_renormalization;
use crate::model::{Drive, PeriodicHamiltonian, StaticHamiltonian};
use crate::protocols::{triangle_drives, ProtocolError, TriangleKind};
use crate::scalar::{cis, lit, Real};

/// A driven graph with human-readable node names.
#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Real")]
pub struct LabeledProtocol<T> {
    pub hamiltonian: PeriodicHamiltonian<T>,
    pub labels: Vec<String>,
}

impl<T: Real> LabeledProtocol<T> {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Scales every edge touching a driven node by `1 / |<exp(i V_ij)>_T|`, so
/// the rotating-frame couplings keep the skeleton magnitudes.
pub fn compensate_couplings<T: Real>(
    skeleton: &StaticHamiltonian<T>,
    onsite_drives: &BTreeMap<usize, Drive<T>>,
    period: T,
) -> Result<StaticHamiltonian<T>, ProtocolError> {
    let mut out = skeleton.clone();
    for (i, j, jij) in skeleton.edges() {
        let (di, dj) = (onsite_drives.get(&i), onsite_drives.get(&j));
        if di.is_none() && dj.is_none() {
            continue;
        }
        let r = coupling_renormalization(di, dj, period).norm();
        if !(r > lit(1e-12)) {
            return Err(ProtocolError::CompensationSingular { i, j });
        }
        out.set_coupling(i, j, jij / r)?;
    }
    Ok(out)
}

fn arm_labels(root: &str, end: &str, arm_length: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..arm_length).map(|k| format!("{root}{}", "'".repeat(k))).collect();
    v.push(end.to_string());
    v
}

/// Switch with step drives; see [`build_switch_with`].
pub fn build_switch<T: Real>(amplitude: T, period: T, arm_length: usize) -> Result<LabeledProtocol<T>, ProtocolError> {
    build_switch_with(TriangleKind::Step, amplitude, period, arm_length)
}

/// `S - 1`, triangle `{1, 2, 3}` with drives on 2 and 3, and paths of
/// `arm_length` edges `2 -> U` and `3 -> D`. Node order: `S, 1, 2, 3`, the
/// upper arm, then the lower arm.
pub fn build_switch_with<T: Real>(
    kind: TriangleKind,
    amplitude: T,
    period: T,
    arm_length: usize,
) -> Result<LabeledProtocol<T>, ProtocolError> {
    let skel = switch_skeleton(arm_length)?;
    let labels = switch_labels(arm_length);
    let (b2, b3) = triangle_drives(kind, amplitude, period)?;
    let drives: BTreeMap<usize, Drive<T>> = [(2, b2), (3, b3)].into_iter().collect();
    let compensated = compensate_couplings(&skel, &drives, period)?;
    let mut h = PeriodicHamiltonian::new(compensated, period)?;
    for (i, d) in drives {
        h = h.with_onsite_drive(i, d)?;
    }
    Ok(LabeledProtocol { hamiltonian: h, labels })
}

fn switch_labels(arm_length: usize) -> Vec<String> {
    let mut labels: Vec<String> = ["S", "1", "2", "3"].iter().map(|s| s.to_string()).collect();
    labels.extend(arm_labels("2", "U", arm_length));
    labels.extend(arm_labels("3", "D", arm_length));
    labels
}

fn switch_skeleton<T: Real>(arm_length: usize) -> Result<StaticHamiltonian<T>, ProtocolError> {
    if arm_length == 0 {
        return Err(ProtocolError::InvalidParameter("arm_length must be at least 1".into()));
    }
    let n = 4 + 2 * arm_length;
    let mut s = StaticHamiltonian::new(n)?;
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 1)] {
        s.set_coupling(i, j, Complex::new(T::one(), T::zero()))?;
    }
    for (root, start) in [(2, 4), (3, 4 + arm_length)] {
        let mut prev = root;
        for k in 0..arm_length {
            s.set_coupling(prev, start + k, Complex::new(T::one(), T::zero()))?;
            prev = start + k;
        }
    }
    Ok(s)
}

/// Ideal switch: unit couplings, `J_23 = e^{i phi}` so the loop
/// `1 -> 2 -> 3 -> 1` carries phase `phi`.
pub fn switch_effective_model<T: Real>(phi: T, arm_length: usize) -> Result<StaticHamiltonian<T>, ProtocolError> {
    let mut s = switch_skeleton(arm_length)?;
    s.set_coupling(2, 3, cis(phi))?;
    Ok(s)
}

fn corner(k: usize) -> usize {
    2 * k
}

fn apex(k: usize) -> usize {
    2 * k + 1
}

fn chain_labels(n: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(2 * n + 1);
    for k in 0..=n {
        labels.push(match k {
            0 => "S".to_string(),
            k if k == n => "E".to_string(),
            k => format!("p{k}"),
        });
        if k < n {
            labels.push(format!("q{k}"));
        }
    }
    labels
}

fn chain_skeleton<T: Real>(n: usize) -> Result<StaticHamiltonian<T>, ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::InvalidParameter("need at least one triangle".into()));
    }
    let mut s = StaticHamiltonian::new(2 * n + 1)?;
    let one = Complex::new(T::one(), T::zero());
    for k in 0..n {
        s.set_coupling(corner(k), corner(k + 1), one)?;
        s.set_coupling(corner(k + 1), apex(k), one)?;
        s.set_coupling(apex(k), corner(k), one)?;
    }
    Ok(s)
}

/// Chain with step drives; see [`build_triangle_chain_with`].
pub fn build_triangle_chain<T: Real>(
    n_triangles: usize,
    amplitude: T,
    period: T,
) -> Result<LabeledProtocol<T>, ProtocolError> {
    build_triangle_chain_with(TriangleKind::Step, n_triangles, amplitude, period)
}

/// Corner-sharing chain: triangle `k` is `(p_k, p_{k+1}, q_k)` and
/// consecutive triangles share `p_{k+1}`. Node order `S = p_0, q_0, p_1, q_1,
/// ..., E = p_n`. `p_k` takes drive role `k mod 3` and `q_k` role
/// `(k + 2) mod 3`, where role 0 is undriven, 1 is `beta_2` and 2 is
/// `beta_3`; every loop `p_k -> p_{k+1} -> q_k` then carries the triangle's
/// effective phase.
pub fn build_triangle_chain_with<T: Real>(
    kind: TriangleKind,
    n_triangles: usize,
    amplitude: T,
    period: T,
) -> Result<LabeledProtocol<T>, ProtocolError> {
    let n = n_triangles;
    let skel = chain_skeleton(n)?;
    let (b2, b3) = triangle_drives(kind, amplitude, period)?;
    let mut drives = BTreeMap::new();
    let mut assign = |node: usize, role: usize| match role {
        1 => {
            drives.insert(node, b2.clone());
        }
        2 => {
            drives.insert(node, b3.clone());
        }
        _ => {}
    };
    for k in 0..=n {
        assign(corner(k), k % 3);
        if k < n {
            assign(apex(k), (k + 2) % 3);
        }
    }
    let compensated = compensate_couplings(&skel, &drives, period)?;
    let mut h = PeriodicHamiltonian::new(compensated, period)?;
    for (i, d) in drives {
        h = h.with_onsite_drive(i, d)?;
    }
    Ok(LabeledProtocol {
        hamiltonian: h,
        labels: chain_labels(n),
    })
}

/// Ideal chain: unit couplings with `e^{i phi}` on `p_{k+1} -> q_k`.
pub fn triangle_chain_effective_model<T: Real>(
    n_triangles: usize,
    phi: T,
) -> Result<StaticHamiltonian<T>, ProtocolError> {
    let mut s = chain_skeleton(n_triangles)?;
    for k in 0..n_triangles {
        s.set_coupling(corner(k + 1), apex(k), cis(phi))?;
    }
    Ok(s)
}
