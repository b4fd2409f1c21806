use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{operator_norm, ComplexMatrix};
use crate::model::drive::{fraction_to, reduced_phase, Drive, Fraction};
use crate::model::ModelError;
use crate::scalar::{from_usize, lit, re, Real};

/// `H = sum_i eps_i |i><i| + sum_{i<j} (J_ij |i><j| + h.c.)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StaticDoc<T>", into = "StaticDoc<T>", bound = "T: Real")]
pub struct StaticHamiltonian<T> {
    dim: usize,
    edges: BTreeMap<(usize, usize), Complex<T>>,
    onsite: Vec<T>,
}

impl<T: Real> StaticHamiltonian<T> {
    pub fn new(dim: usize) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::EmptyGraph);
        }
        Ok(Self {
            dim,
            edges: BTreeMap::new(),
            onsite: vec![T::zero(); dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_node(&self, i: usize) -> Result<(), ModelError> {
        if i < self.dim {
            Ok(())
        } else {
            Err(ModelError::NodeOutOfRange { node: i, dim: self.dim })
        }
    }

    /// Sets `<i|H|j> = coupling` (and its conjugate at `<j|H|i>`).
    pub fn set_coupling(&mut self, i: usize, j: usize, coupling: Complex<T>) -> Result<(), ModelError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(ModelError::SelfEdge(i));
        }
        if !(coupling.re.is_finite() && coupling.im.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        let (key, value) = if i < j {
            ((i, j), coupling)
        } else {
            ((j, i), coupling.conj())
        };
        self.edges.insert(key, value);
        Ok(())
    }

    pub fn with_coupling(mut self, i: usize, j: usize, coupling: Complex<T>) -> Result<Self, ModelError> {
        self.set_coupling(i, j, coupling)?;
        Ok(self)
    }

    pub fn with_real_coupling(self, i: usize, j: usize, coupling: T) -> Result<Self, ModelError> {
        self.with_coupling(i, j, re(coupling))
    }

    pub fn set_onsite(&mut self, i: usize, energy: T) -> Result<(), ModelError> {
        self.check_node(i)?;
        if !energy.is_finite() {
            return Err(ModelError::NonFinite);
        }
        self.onsite[i] = energy;
        Ok(())
    }

    pub fn remove_coupling(&mut self, i: usize, j: usize) {
        self.edges.remove(&(i.min(j), i.max(j)));
    }

    /// `<i|H|j>` for `i != j`; zero when no edge.
    pub fn coupling(&self, i: usize, j: usize) -> Complex<T> {
        if i < j {
            self.edges.get(&(i, j)).copied().unwrap_or_else(Complex::zero)
        } else {
            self.edges.get(&(j, i)).map(|z| z.conj()).unwrap_or_else(Complex::zero)
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains_key(&(i.min(j), i.max(j)))
    }

    /// Stored edges `(i, j, J_ij)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        self.edges.iter().map(|(&(i, j), &z)| (i, j, z))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn onsite(&self) -> &[T] {
        &self.onsite
    }

    /// Neighbours of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .keys()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn matrix(&self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(self.dim);
        for (i, &e) in self.onsite.iter().enumerate() {
            m[(i, i)] = re(e);
        }
        for (&(i, j), &z) in &self.edges {
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        m
    }

    /// Reads the upper triangle of a Hermitian matrix; entries with modulus
    /// at most `drop_tol` are not stored as edges.
    pub fn from_matrix(m: &ComplexMatrix<T>, drop_tol: T) -> Result<Self, ModelError> {
        let tol = lit::<T>(1e-10) * m.max_abs().max(T::one());
        if m.hermiticity_residual() > tol {
            return Err(ModelError::NonHermitian);
        }
        let mut h = Self::new(m.dim())?;
        for i in 0..m.dim() {
            h.onsite[i] = m[(i, i)].re;
            for j in (i + 1)..m.dim() {
                let z = (m[(i, j)] + m[(j, i)].conj()) * lit::<T>(0.5);
                if z.norm() > drop_tol {
                    h.edges.insert((i, j), z);
                }
            }
        }
        Ok(h)
    }

    /// Scales every coupling and on-site energy.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            edges: self.edges.iter().map(|(&k, &z)| (k, z * factor)).collect(),
            onsite: self.onsite.iter().map(|&e| e * factor).collect(),
        }
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.edges.values().all(|z| z.im.abs() <= tol)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct EdgeDoc<T> {
    i: usize,
    j: usize,
    re: T,
    #[serde(default)]
    im: T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct StaticDoc<T> {
    dim: usize,
    #[serde(default)]
    edges: Vec<EdgeDoc<T>>,
    #[serde(default)]
    onsite: Option<Vec<T>>,
}

impl<T: Real> TryFrom<StaticDoc<T>> for StaticHamiltonian<T> {
    type Error = ModelError;

    fn try_from(doc: StaticDoc<T>) -> Result<Self, ModelError> {
        let mut h = Self::new(doc.dim)?;
        for e in doc.edges {
            if h.has_edge(e.i, e.j) {
                return Err(ModelError::DuplicateEdge(e.i, e.j));
            }
            h.set_coupling(e.i, e.j, Complex::new(e.re, e.im))?;
        }
        if let Some(onsite) = doc.onsite {
            if onsite.len() != doc.dim {
                return Err(ModelError::LengthMismatch {
                    expected: doc.dim,
                    got: onsite.len(),
                });
            }
            for (i, e) in onsite.into_iter().enumerate() {
                h.set_onsite(i, e)?;
            }
        }
        Ok(h)
    }
}

impl<T: Real> From<StaticHamiltonian<T>> for StaticDoc<T> {
    fn from(h: StaticHamiltonian<T>) -> Self {
        StaticDoc {
            dim: h.dim,
            edges: h
                .edges
                .iter()
                .map(|(&(i, j), z)| EdgeDoc {
                    i,
                    j,
                    re: z.re,
                    im: z.im,
                })
                .collect(),
            onsite: Some(h.onsite),
        }
    }
}

/// Static skeleton plus real periodic drives. An edge drive replaces the
/// skeleton coupling value; an on-site drive replaces `eps_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PeriodicDoc<T>", into = "PeriodicDoc<T>", bound = "T: Real")]
pub struct PeriodicHamiltonian<T> {
    skeleton: StaticHamiltonian<T>,
    edge_drives: BTreeMap<(usize, usize), Drive<T>>,
    onsite_drives: BTreeMap<usize, Drive<T>>,
    period: T,
}

impl<T: Real> PeriodicHamiltonian<T> {
    pub fn new(skeleton: StaticHamiltonian<T>, period: T) -> Result<Self, ModelError> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(ModelError::InvalidPeriod);
        }
        Ok(Self {
            skeleton,
            edge_drives: BTreeMap::new(),
            onsite_drives: BTreeMap::new(),
            period,
        })
    }

    pub fn with_edge_drive(mut self, i: usize, j: usize, drive: Drive<T>) -> Result<Self, ModelError> {
        if !self.skeleton.has_edge(i, j) {
            return Err(ModelError::MissingEdge(i, j));
        }
        self.edge_drives.insert((i.min(j), i.max(j)), drive);
        Ok(self)
    }

    pub fn with_onsite_drive(mut self, i: usize, drive: Drive<T>) -> Result<Self, ModelError> {
        self.skeleton.check_node(i)?;
        self.onsite_drives.insert(i, drive);
        Ok(self)
    }

    pub fn skeleton(&self) -> &StaticHamiltonian<T> {
        &self.skeleton
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn omega(&self) -> T {
        T::TAU() / self.period
    }

    pub fn dim(&self) -> usize {
        self.skeleton.dim()
    }

    pub fn edge_drives(&self) -> &BTreeMap<(usize, usize), Drive<T>> {
        &self.edge_drives
    }

    pub fn onsite_drives(&self) -> &BTreeMap<usize, Drive<T>> {
        &self.onsite_drives
    }

    pub fn is_static(&self) -> bool {
        self.edge_drives.is_empty() && self.onsite_drives.is_empty()
    }

    /// True when `H(t)` is constant between drive breakpoints.
    pub fn is_piecewise_constant(&self) -> bool {
        self.drives().all(Drive::is_piecewise_constant)
    }

    fn drives(&self) -> impl Iterator<Item = &Drive<T>> {
        self.edge_drives.values().chain(self.onsite_drives.values())
    }

    /// Same Hamiltonian with a different period; drives are functions of
    /// `t/T` and keep their shape.
    pub fn with_period(&self, period: T) -> Result<Self, ModelError> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(ModelError::InvalidPeriod);
        }
        let mut out = self.clone();
        out.period = period;
        Ok(out)
    }

    /// Sorted union of all drive breakpoints as period fractions, including 0 and 1.
    pub fn breakpoints(&self) -> Vec<Fraction> {
        let mut b: Vec<Fraction> = vec![Fraction::from_integer(0), Fraction::from_integer(1)];
        for d in self.drives() {
            b.extend(d.breakpoints());
        }
        b.sort();
        b.dedup();
        b
    }

    /// `H` at period fraction `s` in `[0, 1)`.
    pub fn at_phase(&self, s: T) -> ComplexMatrix<T> {
        let mut m = self.skeleton.matrix();
        for (&i, d) in &self.onsite_drives {
            m[(i, i)] = re(d.at_phase(s));
        }
        for (&(i, j), d) in &self.edge_drives {
            let v = re(d.at_phase(s));
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    pub fn evaluate_at(&self, t: T) -> ComplexMatrix<T> {
        self.at_phase(reduced_phase(t, self.period))
    }

    /// Constant pieces `(H_k, duration_k)` in time order; `None` unless
    /// every drive is piecewise constant.
    pub fn segments(&self) -> Option<Vec<(ComplexMatrix<T>, T)>> {
        if !self.is_piecewise_constant() {
            return None;
        }
        let half = lit::<T>(0.5);
        Some(
            self.breakpoints()
                .windows(2)
                .map(|w| {
                    let (a, b) = (fraction_to::<T>(w[0]), fraction_to::<T>(w[1]));
                    (self.at_phase((a + b) * half), (b - a) * self.period)
                })
                .collect(),
        )
    }

    /// `max_t ||H(t)||`: exact over constant segments, otherwise sampled on
    /// 1000 points per period plus every breakpoint.
    pub fn h_max(&self) -> T {
        if let Some(segs) = self.segments() {
            return segs.iter().map(|(h, _)| operator_norm(h)).fold(T::zero(), T::max);
        }
        let n = 1000;
        let mut phases: Vec<T> = (0..n).map(|k| from_usize::<T>(k) / from_usize(n)).collect();
        phases.extend(
            self.breakpoints()
                .iter()
                .map(|&b| fraction_to::<T>(b))
                .filter(|&b| b < T::one()),
        );
        phases
            .into_iter()
            .map(|s| operator_norm(&self.at_phase(s)))
            .fold(T::zero(), T::max)
    }

    /// `H_l = (1/T) int_0^T H(t) e^{-i l Omega t} dt`.
    pub fn fourier_coefficient(&self, l: i64) -> ComplexMatrix<T> {
        let mut m = if l == 0 {
            self.skeleton.matrix()
        } else {
            ComplexMatrix::zeros(self.dim())
        };
        for (&i, d) in &self.onsite_drives {
            m[(i, i)] = d.fourier(l);
        }
        for (&(i, j), d) in &self.edge_drives {
            m[(i, j)] = d.fourier(l);
            m[(j, i)] = d.fourier(-l).conj();
        }
        m
    }

    /// `[H_{-l_max}, ..., H_0, ..., H_{l_max}]`.
    pub fn fourier_coefficients(&self, l_max: usize) -> Vec<ComplexMatrix<T>> {
        let lm = l_max as i64;
        (-lm..=lm).map(|l| self.fourier_coefficient(l)).collect()
    }

    /// Highest harmonic present, or `None` when some drive has an infinite
    /// Fourier series.
    pub fn harmonic_bandwidth(&self) -> Option<u32> {
        let mut top = 0;
        for d in self.drives() {
            match d {
                Drive::HarmonicSeries(h) => top = top.max(h.max_harmonic()),
                Drive::PiecewiseConstant(p) if p.values().len() == 1 => {}
                _ => return None,
            }
        }
        Some(top)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct EdgeDriveDoc<T> {
    i: usize,
    j: usize,
    drive: Drive<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct OnsiteDriveDoc<T> {
    node: usize,
    drive: Drive<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct PeriodicDoc<T> {
    skeleton: StaticHamiltonian<T>,
    period: T,
    #[serde(default)]
    edge_drives: Vec<EdgeDriveDoc<T>>,
    #[serde(default)]
    onsite_drives: Vec<OnsiteDriveDoc<T>>,
}

impl<T: Real> TryFrom<PeriodicDoc<T>> for PeriodicHamiltonian<T> {
    type Error = ModelError;

    fn try_from(doc: PeriodicDoc<T>) -> Result<Self, ModelError> {
        let mut h = Self::new(doc.skeleton, doc.period)?;
        for e in doc.edge_drives {
            h = h.with_edge_drive(e.i, e.j, e.drive)?;
        }
        for o in doc.onsite_drives {
            h = h.with_onsite_drive(o.node, o.drive)?;
        }
        Ok(h)
    }
}

impl<T: Real> From<PeriodicHamiltonian<T>> for PeriodicDoc<T> {
    fn from(h: PeriodicHamiltonian<T>) -> Self {
        PeriodicDoc {
            skeleton: h.skeleton,
            period: h.period,
            edge_drives: h
                .edge_drives
                .into_iter()
                .map(|((i, j), drive)| EdgeDriveDoc { i, j, drive })
                .collect(),
            onsite_drives: h
                .onsite_drives
                .into_iter()
                .map(|(node, drive)| OnsiteDriveDoc { node, drive })
                .collect(),
        }
    }
}
