//! The Wiener-Hopf groupoid of `ℕ ⊂ ℤ`: units `ℕ ∪ {∞}`, arrows `(X, g)`
//! with `X + g ≥ 0`, and the convolution algebra of finitely supported
//! sections of a fiber bundle over it.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fell::{omega_qset, Ext, GroupElement, OmegaPoint};
use crate::spectra::{operator_norm, ComplexMatrix};
use crate::toeplitz::{EndomorphismAction, SymbolFunction, TruncatedOperator};

/// A point of the discrete compactification: `n ↔ (−∞, n] ∩ ℤ`, and `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Finite(i64),
    Infinity,
}

impl Unit {
    pub fn translate(self, g: i64) -> Self {
        match self {
            Self::Finite(n) => Self::Finite(n + g),
            Self::Infinity => Self::Infinity,
        }
    }

    pub fn to_omega(self) -> OmegaPoint {
        match self {
            Self::Finite(n) => OmegaPoint::Discrete(Ext::Finite(n)),
            Self::Infinity => OmegaPoint::Discrete(Ext::Infinite),
        }
    }

    fn is_valid(self) -> bool {
        !matches!(self, Self::Finite(n) if n < 0)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(n) => write!(f, "{n}"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

/// Arrow `(X, g)` from `X·g` to `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub x: Unit,
    pub g: i64,
}

impl Arrow {
    pub fn new(x: Unit, g: i64) -> Result<Self> {
        let arrow = Self { x, g };
        if !arrow.is_valid() {
            return Err(Error::Domain(format!("({x}, {g}) is not an arrow of the groupoid")));
        }
        Ok(arrow)
    }

    pub fn unit(x: Unit) -> Self {
        Self { x, g: 0 }
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_valid() && self.source().is_valid()
    }

    pub fn range(&self) -> Unit {
        self.x
    }

    pub fn source(&self) -> Unit {
        self.x.translate(self.g)
    }

    pub fn inverse(&self) -> Self {
        Self {
            x: self.source(),
            g: -self.g,
        }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.g)
    }
}

/// Arrow membership checked against the order-compactification model.
pub fn arrow_agrees_with_omega(x: Unit, g: i64) -> Result<bool> {
    let direct = Arrow { x, g }.is_valid();
    let via_omega = omega_qset(&x.to_omega(), GroupElement::Int(g))?;
    Ok(direct == via_omega)
}

/// Finite units `0..=max_unit` together with `∞`, and shifts `|g| ≤ max_shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub max_unit: i64,
    pub max_shift: i64,
}

impl Window {
    pub fn new(max_unit: i64, max_shift: i64) -> Self {
        Self { max_unit, max_shift }
    }

    pub fn contains(&self, a: &Arrow) -> bool {
        let unit_ok = match a.x {
            Unit::Finite(n) => (0..=self.max_unit).contains(&n),
            Unit::Infinity => true,
        };
        unit_ok && a.g.abs() <= self.max_shift
    }

    pub fn units(&self) -> impl Iterator<Item = Unit> {
        (0..=self.max_unit).map(Unit::Finite).chain(std::iter::once(Unit::Infinity))
    }

    /// Every arrow of the groupoid inside the window.
    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out = Vec::new();
        for x in self.units() {
            for g in -self.max_shift..=self.max_shift {
                let a = Arrow { x, g };
                if a.is_valid() {
                    out.push(a);
                }
            }
        }
        out
    }

    fn check(&self, a: &Arrow) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::Range(format!("arrow {a} leaves the window")))
        }
    }
}

/// Fibers over the units together with the action `α_(X,g)` of arrows,
/// mapping the fiber over `X·g` to the fiber over `X`.
pub trait FiberBundle {
    type Value: Clone + fmt::Debug;

    fn zero(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn adjoint(&self, a: &Self::Value) -> Self::Value;
    fn norm(&self, a: &Self::Value) -> Result<f64>;
    fn act(&self, arrow: Arrow, value: &Self::Value) -> Result<Self::Value>;
    fn distance(&self, a: &Self::Value, b: &Self::Value) -> f64;
}

/// Constant fiber `M_k` with `α_(X,g) = α_g` for an automorphism action.
/// Injective *-endomorphisms of `M_k` are automorphisms, so no generality
/// is lost by requiring invertibility.
#[derive(Clone, Debug)]
pub struct MatrixBundle {
    act: EndomorphismAction,
}

impl MatrixBundle {
    pub fn new(act: EndomorphismAction) -> Result<Self> {
        if !act.is_invertible() {
            return Err(Error::InvalidInput("matrix bundle needs an invertible action".into()));
        }
        Ok(Self { act })
    }

    pub fn trivial(k: usize) -> Self {
        Self {
            act: EndomorphismAction::trivial(k),
        }
    }

    pub fn action(&self) -> &EndomorphismAction {
        &self.act
    }

    pub fn k(&self) -> usize {
        self.act.k()
    }
}

impl FiberBundle for MatrixBundle {
    type Value = ComplexMatrix;

    fn zero(&self) -> ComplexMatrix {
        ComplexMatrix::zeros(self.k())
    }

    fn add(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        a + b
    }

    fn mul(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        a * b
    }

    fn adjoint(&self, a: &ComplexMatrix) -> ComplexMatrix {
        a.adjoint()
    }

    fn norm(&self, a: &ComplexMatrix) -> Result<f64> {
        operator_norm(a)
    }

    fn act(&self, arrow: Arrow, value: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.act.apply_group(arrow.g, value)
    }

    fn distance(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).max_abs()
    }
}

/// Finitely supported section; zero off the support.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidSection<V> {
    values: BTreeMap<Arrow, V>,
}

impl<V: Clone> Default for GroupoidSection<V> {
    fn default() -> Self {
        Self { values: BTreeMap::new() }
    }
}

impl<V: Clone> GroupoidSection<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn delta(arrow: Arrow, value: V) -> Self {
        let mut s = Self::new();
        s.values.insert(arrow, value);
        s
    }

    pub fn insert(&mut self, arrow: Arrow, value: V) -> Result<()> {
        if !arrow.is_valid() {
            return Err(Error::Domain(format!("{arrow} is not an arrow of the groupoid")));
        }
        self.values.insert(arrow, value);
        Ok(())
    }

    pub fn get(&self, arrow: &Arrow) -> Option<&V> {
        self.values.get(arrow)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arrow, &V)> {
        self.values.iter()
    }

    pub fn support(&self) -> Vec<Arrow> {
        self.values.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_window(&self, window: &Window) -> Result<()> {
        self.values.keys().try_for_each(|a| window.check(a))
    }
}

/// Largest fiber distance between two sections, treating missing points as 0.
pub fn section_distance<B: FiberBundle>(bundle: &B, a: &GroupoidSection<B::Value>, b: &GroupoidSection<B::Value>) -> f64 {
    let zero = bundle.zero();
    a.values
        .keys()
        .chain(b.values.keys())
        .map(|k| bundle.distance(a.values.get(k).unwrap_or(&zero), b.values.get(k).unwrap_or(&zero)))
        .fold(0.0, f64::max)
}

/// `(φ * ψ)(X, s) = Σ_t φ(X, t) α_(X,t)(ψ(X·t, s − t))`.
pub fn convolve<B: FiberBundle>(
    bundle: &B,
    phi: &GroupoidSection<B::Value>,
    psi: &GroupoidSection<B::Value>,
    window: &Window,
) -> Result<GroupoidSection<B::Value>> {
    phi.check_window(window)?;
    psi.check_window(window)?;
    let mut by_range: BTreeMap<Unit, Vec<(&Arrow, &B::Value)>> = BTreeMap::new();
    for (a, v) in psi.iter() {
        by_range.entry(a.x).or_default().push((a, v));
    }
    let mut out: BTreeMap<Arrow, B::Value> = BTreeMap::new();
    for (eta, f) in phi.iter() {
        let Some(column) = by_range.get(&eta.source()) else {
            continue;
        };
        for (zeta, h) in column {
            let gamma = Arrow {
                x: eta.x,
                g: eta.g + zeta.g,
            };
            if !window.contains(&gamma) {
                return Err(Error::Range(format!("product arrow {gamma} overflows the window")));
            }
            let term = bundle.mul(f, &bundle.act(*eta, h)?);
            let slot = out.entry(gamma).or_insert_with(|| bundle.zero());
            *slot = bundle.add(slot, &term);
        }
    }
    Ok(GroupoidSection { values: out })
}

/// `φ*(γ) = α_γ(φ(γ⁻¹)*)`.
pub fn involute<B: FiberBundle>(bundle: &B, phi: &GroupoidSection<B::Value>) -> Result<GroupoidSection<B::Value>> {
    let mut out = BTreeMap::new();
    for (a, v) in phi.iter() {
        let gamma = a.inverse();
        out.insert(gamma, bundle.act(gamma, &bundle.adjoint(v))?);
    }
    Ok(GroupoidSection { values: out })
}

/// `max(sup_X Σ_{r(γ)=X} ‖φ(γ)‖, sup_X Σ_{s(γ)=X} ‖φ(γ)‖)`.
pub fn i_norm<B: FiberBundle>(bundle: &B, phi: &GroupoidSection<B::Value>) -> Result<f64> {
    let mut rows: BTreeMap<Unit, f64> = BTreeMap::new();
    let mut cols: BTreeMap<Unit, f64> = BTreeMap::new();
    for (a, v) in phi.iter() {
        let n = bundle.norm(v)?;
        *rows.entry(a.range()).or_default() += n;
        *cols.entry(a.source()).or_default() += n;
    }
    Ok(rows.values().chain(cols.values()).copied().fold(0.0, f64::max))
}

/// `R_a(ψ)(X, s) = α_(X,a)(ψ(X·a, s − a))`.
pub fn shift_r<B: FiberBundle>(
    bundle: &B,
    a: i64,
    psi: &GroupoidSection<B::Value>,
    window: &Window,
) -> Result<GroupoidSection<B::Value>> {
    if a < 0 {
        return Err(Error::Domain(format!("shift {a} is not in ℕ")));
    }
    let mut out = BTreeMap::new();
    for (arrow, v) in psi.iter() {
        let x = arrow.x.translate(-a);
        if !x.is_valid() {
            continue;
        }
        let gamma = Arrow { x, g: arrow.g + a };
        window.check(&gamma)?;
        out.insert(gamma, bundle.act(Arrow { x, g: a }, v)?);
    }
    Ok(GroupoidSection { values: out })
}

/// `f̃(X, s) = f(s)` on every arrow of the window, and `f̂(g) = f(−g)`.
pub fn lift_and_hat(f: &SymbolFunction, window: &Window) -> Result<(GroupoidSection<ComplexMatrix>, SymbolFunction)> {
    if f.radius() > window.max_shift as u64 {
        return Err(Error::Range("symbol support exceeds the window".into()));
    }
    let mut lifted = GroupoidSection::new();
    for x in window.units() {
        for (s, v) in f.iter() {
            let a = Arrow { x, g: s };
            if a.is_valid() {
                lifted.values.insert(a, v.clone());
            }
        }
    }
    Ok((lifted, f.reflect()))
}

/// Truncated matrix of the regular representation at the unit `0`: block
/// `(b, a)` equals `α_b(φ(b, a − b))`.
pub fn lambda_rep(bundle: &MatrixBundle, phi: &GroupoidSection<ComplexMatrix>, n: usize, window: &Window) -> Result<TruncatedOperator> {
    if (n as i64) > window.max_unit {
        return Err(Error::Range(format!("truncation {n} exceeds the window's units")));
    }
    phi.check_window(window)?;
    let mut out = TruncatedOperator::zeros(n, bundle.k());
    for (arrow, v) in phi.iter() {
        let Unit::Finite(b) = arrow.x else { continue };
        let a = b + arrow.g;
        if b as usize > n || a as usize > n {
            continue;
        }
        out.set_block(b as usize, a as usize, &bundle.act.apply(b as u64, v));
    }
    Ok(out)
}
