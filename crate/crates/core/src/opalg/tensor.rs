use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::boson::{render_ladder, render_sum, BosonOperator};
use super::spin::{render_sz_power, Spin, SpinOperator};
use crate::error::{Error, Result};
use crate::symcore::GaussRational;

/// Kind of one tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    Boson,
    Spin(Spin),
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemKind::Boson => write!(f, "boson"),
            SystemKind::Spin(s) => write!(f, "spin:{}", s),
        }
    }
}

/// Basis monomial of one subsystem: `ad^p a^q` or `Sz^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalMono {
    Ladder(u32, u32),
    SzPow(u32),
}

impl LocalMono {
    pub fn is_identity(&self) -> bool {
        matches!(self, LocalMono::Ladder(0, 0) | LocalMono::SzPow(0))
    }

    fn identity(kind: SystemKind) -> Self {
        match kind {
            SystemKind::Boson => LocalMono::Ladder(0, 0),
            SystemKind::Spin(_) => LocalMono::SzPow(0),
        }
    }

    fn render(&self, kind: SystemKind) -> String {
        match (self, kind) {
            (LocalMono::Ladder(p, q), _) => render_ladder(*p, *q),
            (LocalMono::SzPow(j), SystemKind::Spin(s)) => render_sz_power(s, *j as usize),
            (LocalMono::SzPow(_), SystemKind::Boson) => {
                unreachable!("spin monomial on boson system")
            }
        }
    }
}

/// Operator on a single subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalOperator {
    Boson(BosonOperator),
    Spin(SpinOperator),
}

impl LocalOperator {
    pub fn kind(&self) -> SystemKind {
        match self {
            LocalOperator::Boson(_) => SystemKind::Boson,
            LocalOperator::Spin(s) => SystemKind::Spin(s.spin()),
        }
    }

    pub fn zero(kind: SystemKind) -> Self {
        match kind {
            SystemKind::Boson => LocalOperator::Boson(BosonOperator::zero()),
            SystemKind::Spin(s) => LocalOperator::Spin(SpinOperator::new(s, vec![])),
        }
    }

    pub fn identity(kind: SystemKind) -> Self {
        Self::from_mono(kind, LocalMono::identity(kind), GaussRational::one())
    }

    pub fn from_mono(kind: SystemKind, mono: LocalMono, c: GaussRational) -> Self {
        match (kind, mono) {
            (SystemKind::Boson, LocalMono::Ladder(p, q)) => {
                LocalOperator::Boson(BosonOperator::from_terms([((p, q), c)]))
            }
            (SystemKind::Spin(s), LocalMono::SzPow(j)) => {
                let mut coeffs = vec![GaussRational::zero(); j as usize + 1];
                coeffs[j as usize] = c;
                LocalOperator::Spin(SpinOperator::new(s, coeffs))
            }
            _ => unreachable!("monomial kind mismatch"),
        }
    }

    pub fn monomials(&self) -> Vec<(LocalMono, GaussRational)> {
        match self {
            LocalOperator::Boson(b) => b
                .terms()
                .iter()
                .map(|(&(p, q), c)| (LocalMono::Ladder(p, q), c.clone()))
                .collect(),
            LocalOperator::Spin(s) => s
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (LocalMono::SzPow(j as u32), c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (LocalOperator::Boson(a), LocalOperator::Boson(b)) => Ok(LocalOperator::Boson(a * b)),
            (LocalOperator::Spin(a), LocalOperator::Spin(b)) => Ok(LocalOperator::Spin(a.mul(b)?)),
            _ => Err(Error::InvalidInput(
                "cannot multiply boson and spin operators on one subsystem".into(),
            )),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (LocalOperator::Boson(a), LocalOperator::Boson(b)) => Ok(LocalOperator::Boson(a + b)),
            (LocalOperator::Spin(a), LocalOperator::Spin(b)) => Ok(LocalOperator::Spin(a.add(b)?)),
            _ => Err(Error::InvalidInput(
                "cannot add boson and spin operators on one subsystem".into(),
            )),
        }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        match self {
            LocalOperator::Boson(b) => LocalOperator::Boson(b.scale(c)),
            LocalOperator::Spin(s) => LocalOperator::Spin(s.scale(c)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LocalOperator::Boson(b) => b.is_zero(),
            LocalOperator::Spin(s) => s.is_zero(),
        }
    }

    pub fn as_scalar(&self) -> Option<GaussRational> {
        match self {
            LocalOperator::Boson(b) => b.as_scalar(),
            LocalOperator::Spin(s) => match s.coeffs().len() {
                0 => Some(GaussRational::zero()),
                1 => Some(s.coeffs()[0].clone()),
                _ => None,
            },
        }
    }

    pub fn is_hermitian(&self) -> bool {
        match self {
            LocalOperator::Boson(b) => b.is_hermitian(),
            LocalOperator::Spin(s) => s.is_hermitian(),
        }
    }
}

impl fmt::Display for LocalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalOperator::Boson(b) => write!(f, "{}", b),
            LocalOperator::Spin(s) => write!(f, "{}", s),
        }
    }
}

/// Sum of tensor products of single-subsystem monomials, canonically keyed by
/// the monomial on every subsystem (identity factors explicit).
#[derive(Clone, PartialEq, Eq)]
pub struct TensorOperator {
    systems: Vec<SystemKind>,
    terms: BTreeMap<Vec<LocalMono>, GaussRational>,
}

impl TensorOperator {
    pub fn zero(systems: Vec<SystemKind>) -> Self {
        Self {
            systems,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(systems: Vec<SystemKind>, c: GaussRational) -> Self {
        let key = systems.iter().map(|k| LocalMono::identity(*k)).collect();
        let mut op = Self::zero(systems);
        op.add_term(key, c);
        op
    }

    pub fn from_terms<I>(systems: Vec<SystemKind>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<LocalMono>, GaussRational)>,
    {
        let mut op = Self::zero(systems);
        for (k, c) in terms {
            assert_eq!(k.len(), op.systems.len(), "one monomial per subsystem");
            op.add_term(k, c);
        }
        op
    }

    pub fn from_local(op: LocalOperator) -> Self {
        let kind = op.kind();
        Self::from_terms(
            vec![kind],
            op.monomials().into_iter().map(|(m, c)| (vec![m], c)),
        )
    }

    pub fn from_boson(op: BosonOperator) -> Self {
        Self::from_local(LocalOperator::Boson(op))
    }

    pub fn from_spin(op: SpinOperator) -> Self {
        Self::from_local(LocalOperator::Spin(op))
    }

    fn add_term(&mut self, key: Vec<LocalMono>, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let e = self
            .terms
            .entry(key.clone())
            .or_insert_with(GaussRational::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn systems(&self) -> &[SystemKind] {
        &self.systems
    }

    pub fn terms(&self) -> &BTreeMap<Vec<LocalMono>, GaussRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Tensor product `parts[0] ⊗ parts[1] ⊗ ...`.
    pub fn kron(parts: &[TensorOperator]) -> Self {
        let mut systems = Vec::new();
        let mut terms: Vec<(Vec<LocalMono>, GaussRational)> =
            vec![(Vec::new(), GaussRational::one())];
        for p in parts {
            systems.extend_from_slice(&p.systems);
            let mut next = Vec::new();
            for (k1, c1) in &terms {
                for (k2, c2) in &p.terms {
                    let mut k = k1.clone();
                    k.extend_from_slice(k2);
                    next.push((k, c1 * c2));
                }
            }
            terms = next;
        }
        Self::from_terms(systems, terms)
    }

    fn check_systems(&self, other: &Self) -> Result<()> {
        if self.systems != other.systems {
            return Err(Error::InvalidInput(format!(
                "subsystem structure differs: [{}] vs [{}]",
                join_kinds(&self.systems),
                join_kinds(&other.systems)
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_systems(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&GaussRational::from_int(-1)))
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self::from_terms(
            self.systems.clone(),
            self.terms.iter().map(|(k, v)| (k.clone(), v * c)),
        )
    }

    /// Operator product with factorwise normal ordering.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_systems(other)?;
        let mut out = Self::zero(self.systems.clone());
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut expansions: Vec<(Vec<LocalMono>, GaussRational)> =
                    vec![(Vec::new(), c1 * c2)];
                for (j, kind) in self.systems.iter().enumerate() {
                    let f1 = LocalOperator::from_mono(*kind, k1[j], GaussRational::one());
                    let f2 = LocalOperator::from_mono(*kind, k2[j], GaussRational::one());
                    let prod = f1.mul(&f2)?.monomials();
                    let mut next = Vec::new();
                    for (prefix, c) in &expansions {
                        for (m, pc) in &prod {
                            let mut key = prefix.clone();
                            key.push(*m);
                            next.push((key, c * pc));
                        }
                    }
                    expansions = next;
                }
                for (k, c) in expansions {
                    out.add_term(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::scalar(self.systems.clone(), GaussRational::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(
            self.systems.clone(),
            self.terms.iter().map(|(k, c)| {
                let key = k
                    .iter()
                    .map(|m| match m {
                        LocalMono::Ladder(p, q) => LocalMono::Ladder(*q, *p),
                        other => *other,
                    })
                    .collect();
                (key, c.conj())
            }),
        )
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    /// The single-subsystem operator, if there is exactly one subsystem.
    pub fn local(&self) -> Option<LocalOperator> {
        if self.systems.len() != 1 {
            return None;
        }
        let kind = self.systems[0];
        let mut acc = LocalOperator::zero(kind);
        for (k, c) in &self.terms {
            acc = acc
                .add(&LocalOperator::from_mono(kind, k[0], c.clone()))
                .ok()?;
        }
        Some(acc)
    }

    /// Groups terms by their monomials on subsystems `1..`, returning the
    /// operator on subsystem 0 that multiplies each tail.
    pub fn split_first(&self) -> BTreeMap<Vec<LocalMono>, LocalOperator> {
        let kind = self.systems[0];
        let mut out: BTreeMap<Vec<LocalMono>, LocalOperator> = BTreeMap::new();
        for (k, c) in &self.terms {
            let tail = k[1..].to_vec();
            let piece = LocalOperator::from_mono(kind, k[0], c.clone());
            let slot = out.entry(tail).or_insert_with(|| LocalOperator::zero(kind));
            *slot = slot.add(&piece).expect("same subsystem kind");
        }
        out
    }

    /// Operators acting on subsystem `j`, one per distinct assignment of
    /// monomials on the other subsystems.
    pub fn local_slices(&self, j: usize) -> Vec<LocalOperator> {
        let kind = self.systems[j];
        let mut out: BTreeMap<Vec<LocalMono>, LocalOperator> = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut others = k.clone();
            others.remove(j);
            let piece = LocalOperator::from_mono(kind, k[j], c.clone());
            let slot = out
                .entry(others)
                .or_insert_with(|| LocalOperator::zero(kind));
            *slot = slot.add(&piece).expect("same subsystem kind");
        }
        out.into_values().collect()
    }

    /// `(coefficient, factors)` view with one monomial operator per subsystem.
    pub fn summands(&self) -> Vec<(GaussRational, Vec<LocalOperator>)> {
        self.terms
            .iter()
            .map(|(k, c)| {
                let factors = k
                    .iter()
                    .zip(&self.systems)
                    .map(|(m, kind)| LocalOperator::from_mono(*kind, *m, GaussRational::one()))
                    .collect();
                (c.clone(), factors)
            })
            .collect()
    }

    /// Highest ladder degree `p + q` over all bosonic factors.
    pub fn boson_degree(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter())
            .map(|m| match m {
                LocalMono::Ladder(p, q) => p + q,
                LocalMono::SzPow(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// True when every term conserves every boson number.
    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().flat_map(|k| k.iter()).all(|m| match m {
            LocalMono::Ladder(p, q) => p == q,
            LocalMono::SzPow(_) => true,
        })
    }

    /// Dimension per subsystem at boson truncation `d`.
    pub fn local_dims(&self, d: usize) -> Vec<usize> {
        self.systems
            .iter()
            .map(|k| match k {
                SystemKind::Boson => d,
                SystemKind::Spin(s) => s.dim(),
            })
            .collect()
    }

    /// Highest single-sided ladder power `max(p, q)` over all bosonic factors.
    pub fn ladder_reach(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter())
            .map(|m| match m {
                LocalMono::Ladder(p, q) => *p.max(q),
                LocalMono::SzPow(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn check_truncation(&self, d: usize) -> Result<()> {
        let needed = self.ladder_reach() as usize + 2;
        if self.systems.contains(&SystemKind::Boson) && d < needed {
            return Err(Error::TruncationTooSmall(format!(
                "boson truncation {} below ladder reach + 2 = {}",
                d, needed
            )));
        }
        Ok(())
    }

    fn local_entries(kind: SystemKind, mono: LocalMono, d: usize) -> Vec<(usize, usize, f64)> {
        match (kind, mono) {
            (SystemKind::Boson, LocalMono::Ladder(p, q)) => (0..d)
                .filter_map(|n| BosonOperator::mono_element(p, q, n).map(|(m, v)| (m, n, v)))
                .filter(|(m, _, _)| *m < d)
                .collect(),
            (SystemKind::Spin(s), LocalMono::SzPow(j)) => s
                .twice_m_values()
                .enumerate()
                .map(|(i, tm)| (i, i, (tm as f64 / 2.0).powi(j as i32)))
                .collect(),
            _ => unreachable!("monomial kind mismatch"),
        }
    }

    /// Matrix in the product basis `Fock ⊗ |s, m>` (first subsystem most
    /// significant; spin states ordered `m = s, ..., -s`). Bosonic factors are the
    /// exact compression of the normal-ordered operator to the first `d` Fock
    /// states.
    pub fn to_matrix(&self, d: usize) -> Result<DMatrix<Complex64>> {
        self.check_truncation(d)?;
        let dims = self.local_dims(d);
        let total: usize = dims.iter().product();
        let mut mat = DMatrix::<Complex64>::zeros(total, total);
        for (k, c) in &self.terms {
            let cv = c.to_c64();
            let mut entries: Vec<(usize, usize, f64)> = vec![(0, 0, 1.0)];
            for (j, kind) in self.systems.iter().enumerate() {
                let local = Self::local_entries(*kind, k[j], dims[j]);
                let mut next = Vec::with_capacity(entries.len() * local.len());
                for &(r0, c0, v0) in &entries {
                    for &(r1, c1, v1) in &local {
                        next.push((r0 * dims[j] + r1, c0 * dims[j] + c1, v0 * v1));
                    }
                }
                entries = next;
            }
            for (r, col, v) in entries {
                mat[(r, col)] += cv * v;
            }
        }
        Ok(mat)
    }

    /// Diagonal of the matrix realization; only valid for diagonal operators.
    pub fn diagonal_values(&self, d: usize) -> Result<Vec<Complex64>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal(self.to_string()));
        }
        self.check_truncation(d)?;
        let dims = self.local_dims(d);
        let total: usize = dims.iter().product();
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        for (k, c) in &self.terms {
            let cv = c.to_c64();
            let mut vals: Vec<f64> = vec![1.0];
            for (j, kind) in self.systems.iter().enumerate() {
                let local = Self::local_entries(*kind, k[j], dims[j]);
                let mut diag = vec![0.0; dims[j]];
                for (r, _, v) in local {
                    diag[r] = v;
                }
                vals = vals
                    .iter()
                    .flat_map(|v0| diag.iter().map(move |v1| v0 * v1))
                    .collect();
            }
            for (slot, v) in out.iter_mut().zip(vals) {
                *slot += cv * v;
            }
        }
        Ok(out)
    }
}

fn join_kinds(kinds: &[SystemKind]) -> String {
    kinds
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for TensorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.systems.len() == 1 {
            return match self.local() {
                Some(op) => write!(f, "{}", op),
                None => write!(f, "0"),
            };
        }
        let items: Vec<(GaussRational, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| {
                if k.iter().all(|m| m.is_identity()) {
                    return (c.clone(), String::new());
                }
                let factors: Vec<String> = k
                    .iter()
                    .zip(&self.systems)
                    .map(|(m, kind)| {
                        if m.is_identity() {
                            identity_text(*kind)
                        } else {
                            m.render(*kind)
                        }
                    })
                    .collect();
                (c.clone(), format!("kron({})", factors.join(", ")))
            })
            .collect();
        write!(f, "{}", render_sum(&items))
    }
}

fn identity_text(kind: SystemKind) -> String {
    match kind {
        SystemKind::Boson => "I{boson}".to_string(),
        SystemKind::Spin(s) => format!("I{{s={}}}", s),
    }
}

impl fmt::Debug for TensorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorOperator[{}]({})", join_kinds(&self.systems), self)
    }
}
