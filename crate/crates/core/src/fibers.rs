//! Fibers of the groupoid bundle for two concrete desk actions of `ℕ`:
//!
//! * surjective: real piecewise-linear functions on `[0, 1]` with
//!   `α₁(x)(t) = x(t/2)`; the fiber over `X` is the quotient by the ideal
//!   `I_X`, and its norm is computed in closed form;
//! * injective: trigonometric polynomials with `α₁(f)(z) = f(z²)`; fibers
//!   live in the dilation, modelled by level-tagged pairs `(n, x) ≅ α_n⁻¹(x)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{Arrow, Unit};
use crate::spectra::C64;

/// Ideal-membership threshold on breakpoint sups.
pub const IDEAL_TOL: f64 = 1e-9;

fn dyadic(n: u32) -> f64 {
    2f64.powi(-(n as i32))
}

/// Continuous piecewise-linear real function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    breaks: Vec<f64>,
    vals: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(breaks: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || breaks.len() != vals.len() {
            return Err(Error::InvalidInput(
                "need at least two breakpoints and one value per breakpoint".into(),
            ));
        }
        if breaks[0] != 0.0 || *breaks.last().expect("non-empty") != 1.0 {
            return Err(Error::InvalidInput("breakpoints must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("values must be finite".into()));
        }
        Ok(Self { breaks, vals })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            breaks: vec![0.0, 1.0],
            vals: vec![c, c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let i = self.breaks.partition_point(|&b| b <= t);
        if i == 0 {
            return self.vals[0];
        }
        if i >= self.breaks.len() {
            return *self.vals.last().expect("non-empty");
        }
        let (b0, b1) = (self.breaks[i - 1], self.breaks[i]);
        let (v0, v1) = (self.vals[i - 1], self.vals[i]);
        v0 + (v1 - v0) * (t - b0) / (b1 - b0)
    }

    fn merged_breaks(&self, other: &Self) -> Vec<f64> {
        let mut b: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let breaks = self.merged_breaks(other);
        let vals = breaks.iter().map(|&t| op(self.eval(t), other.eval(t))).collect();
        Self { breaks, vals }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            breaks: self.breaks.clone(),
            vals: self.vals.iter().map(|v| v * c).collect(),
        }
    }

    /// `sup |x|` over `[lo, hi]`, attained at a breakpoint or an endpoint.
    pub fn sup_abs_on(&self, lo: f64, hi: f64) -> f64 {
        self.breaks
            .iter()
            .zip(&self.vals)
            .filter(|(&b, _)| lo <= b && b <= hi)
            .map(|(_, v)| v.abs())
            .fold(self.eval(lo).abs().max(self.eval(hi).abs()), f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs_on(0.0, 1.0)
    }

    /// `α_n(x)(t) = x(t / 2ⁿ)`.
    pub fn alpha(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let scale = 2f64.powi(n as i32);
        let mut breaks = Vec::new();
        let mut vals = Vec::new();
        for (&b, &v) in self.breaks.iter().zip(&self.vals) {
            if b * scale < 1.0 {
                breaks.push(b * scale);
                vals.push(v);
            }
        }
        breaks.push(1.0);
        vals.push(self.eval(dyadic(n)));
        Self { breaks, vals }
    }

    /// A preimage under `α_n`: `y(s) = x(2ⁿ s)` on `[0, 2⁻ⁿ]`, continued by
    /// the constant `x(1)`.
    pub fn section(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let d = dyadic(n);
        let mut breaks: Vec<f64> = self.breaks.iter().map(|b| b * d).collect();
        let mut vals = self.vals.clone();
        breaks.push(1.0);
        vals.push(*self.vals.last().expect("non-empty"));
        Self { breaks, vals }
    }

    /// Exact `sup |x·y|` over `[lo, hi]`: the product is quadratic between
    /// merged breakpoints, so endpoints and vertices suffice.
    pub fn sup_abs_product_on(&self, other: &Self, lo: f64, hi: f64) -> f64 {
        let mut pts: Vec<f64> = self
            .merged_breaks(other)
            .into_iter()
            .filter(|&b| lo < b && b < hi)
            .collect();
        pts.insert(0, lo);
        pts.push(hi);
        let mut best = 0.0_f64;
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (xp, xq) = (self.eval(p), self.eval(q));
            let (yp, yq) = (other.eval(p), other.eval(q));
            best = best.max((xp * yp).abs()).max((xq * yq).abs());
            let (dx, dy) = (xq - xp, yq - yp);
            let quad = dx * dy;
            if quad != 0.0 {
                let s = -(xp * dy + yp * dx) / (2.0 * quad);
                if (0.0..=1.0).contains(&s) {
                    best = best.max(((xp + dx * s) * (yp + dy * s)).abs());
                }
            }
        }
        best
    }
}

/// `‖x + I_X‖`: `sup_{[0, 2⁻ⁿ]} |x|` at a finite unit `n`, and `|x(0)|` at `∞`.
pub fn quotient_norm(x_unit: Unit, x: &PiecewiseLinear) -> Result<f64> {
    match x_unit {
        Unit::Finite(n) if n < 0 => Err(Error::InvalidInput(format!("{n} is not a unit"))),
        Unit::Finite(n) => Ok(x.sup_abs_on(0.0, dyadic(n as u32))),
        Unit::Infinity => Ok(x.eval(0.0).abs()),
    }
}

/// Quotient seminorm of the product `x·y`.
pub fn quotient_norm_product(x_unit: Unit, x: &PiecewiseLinear, y: &PiecewiseLinear) -> Result<f64> {
    match x_unit {
        Unit::Finite(n) if n < 0 => Err(Error::InvalidInput(format!("{n} is not a unit"))),
        Unit::Finite(n) => Ok(x.sup_abs_product_on(y, 0.0, dyadic(n as u32))),
        Unit::Infinity => Ok((x.eval(0.0) * y.eval(0.0)).abs()),
    }
}

pub fn ideal_contains(x_unit: Unit, x: &PiecewiseLinear) -> Result<bool> {
    Ok(quotient_norm(x_unit, x)? <= IDEAL_TOL)
}

/// Element of the fiber `A / I_X`.
#[derive(Clone, Debug)]
pub struct QuotientElement {
    unit: Unit,
    representative: PiecewiseLinear,
    seminorm: f64,
}

impl QuotientElement {
    pub fn new(unit: Unit, representative: PiecewiseLinear) -> Result<Self> {
        let seminorm = quotient_norm(unit, &representative)?;
        Ok(Self {
            unit,
            representative,
            seminorm,
        })
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn representative(&self) -> &PiecewiseLinear {
        &self.representative
    }

    pub fn seminorm(&self) -> f64 {
        self.seminorm
    }

    pub fn is_zero(&self) -> bool {
        self.seminorm <= IDEAL_TOL
    }

    /// Quotient distance to another element of the same fiber.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.unit != other.unit {
            return Err(Error::InvalidInput("elements live in different fibers".into()));
        }
        quotient_norm(self.unit, &self.representative.sub(&other.representative))
    }
}

/// `α_(X,g)` computed through the decomposition `g = a − b`: lift along
/// `α_b` by the explicit section, then push forward along `α_a`.
pub fn fiber_action_via(x_unit: Unit, a: u32, b: u32, q: &QuotientElement) -> Result<QuotientElement> {
    let g = a as i64 - b as i64;
    let arrow = Arrow::new(x_unit, g)?;
    if q.unit != arrow.source() {
        return Err(Error::Domain(format!(
            "element lives over {}, arrow starts at {}",
            q.unit,
            arrow.source()
        )));
    }
    QuotientElement::new(x_unit, q.representative.section(b).alpha(a))
}

/// `α_(X,g)` with the shortest decomposition `g = max(g, 0) − max(−g, 0)`.
pub fn fiber_action(x_unit: Unit, g: i64, q: &QuotientElement) -> Result<QuotientElement> {
    let a = g.max(0) as u32;
    let b = (-g).max(0) as u32;
    fiber_action_via(x_unit, a, b, q)
}

/// Random piecewise-linear function on dyadic breakpoints, sometimes
/// vanishing on a neighbourhood `[0, 2⁻ᵐ]` of the origin.
pub fn random_piecewise_linear<R: Rng + ?Sized>(rng: &mut R) -> PiecewiseLinear {
    let mut breaks = vec![0.0, 1.0];
    for j in 1..=12 {
        if rng.random_bool(0.4) {
            breaks.push(dyadic(j));
        }
    }
    for k in 1..16 {
        if rng.random_bool(0.25) {
            breaks.push(k as f64 / 16.0);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut vals: Vec<f64> = breaks.iter().map(|_| rng.random_range(-2.0..2.0)).collect();
    if rng.random_bool(0.4) {
        let m = rng.random_range(1..=12);
        let cut = dyadic(m);
        if !breaks.contains(&cut) {
            let v = PiecewiseLinear {
                breaks: breaks.clone(),
                vals: vals.clone(),
            }
            .eval(cut);
            let pos = breaks.partition_point(|&b| b < cut);
            breaks.insert(pos, cut);
            vals.insert(pos, v);
        }
        for (b, v) in breaks.iter().zip(vals.iter_mut()) {
            if *b <= cut {
                *v = 0.0;
            }
        }
    }
    PiecewiseLinear { breaks, vals }
}

/// Trigonometric polynomial `Σ c_j z^j` on the unit circle.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, C64>,
}

/// Grid maximum and a rigorous upper bound for the sup norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub grid_max: f64,
    pub upper: f64,
}

impl TrigPoly {
    pub fn new(coeffs: BTreeMap<i64, C64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn monomial(j: i64, c: C64) -> Self {
        Self::new(BTreeMap::from([(j, c)]))
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    fn trim(&mut self) {
        self.coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, C64> {
        &self.coeffs
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|j| j.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().map(|(&j, &c)| c * z.powi(j as i32)).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.coeffs.clone();
        for (&j, &c) in &other.coeffs {
            *out.entry(j).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::new(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|(&j, &c)| (j, c * s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<i64, C64> = BTreeMap::new();
        for (&i, &a) in &self.coeffs {
            for (&j, &b) in &other.coeffs {
                *out.entry(i + j).or_insert(C64::new(0.0, 0.0)) += a * b;
            }
        }
        Self::new(out)
    }

    /// Pointwise conjugate: `c_j ↦ conj(c_{−j})`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.coeffs.iter().map(|(&j, &c)| (-j, c.conj())).collect())
    }

    /// `α_n(f)(z) = f(z^{2ⁿ})`.
    pub fn alpha(&self, n: u32) -> Self {
        let m = 1i64 << n;
        Self::new(self.coeffs.iter().map(|(&j, &c)| (j * m, c)).collect())
    }

    /// Largest coefficient difference.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        let zero = C64::new(0.0, 0.0);
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|j| (self.coeffs.get(j).unwrap_or(&zero) - other.coeffs.get(j).unwrap_or(&zero)).norm())
            .fold(0.0, f64::max)
    }

    /// Sup norm from an `M`-point grid, `M = max(1024, 8·degree)` rounded up
    /// to a power of two. Bernstein's inequality bounds the gap between grid
    /// points: `‖f‖ ≤ grid_max / (1 − π d / M)`.
    pub fn norm_estimate(&self) -> NormEstimate {
        let d = self.degree();
        let m = (8 * d).max(1024).next_power_of_two();
        let grid_max = (0..m)
            .map(|k| self.eval(C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).norm())
            .fold(0.0, f64::max);
        let slack = PI * d as f64 / m as f64;
        NormEstimate {
            grid_max,
            upper: grid_max / (1.0 - slack),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_estimate().grid_max
    }
}

/// `(level, x)` standing for `α_level⁻¹(x)` in the dilation.
#[derive(Clone, Debug, PartialEq)]
pub struct DilationElement {
    level: u32,
    payload: TrigPoly,
}

impl DilationElement {
    pub fn new(level: u32, payload: TrigPoly) -> Self {
        Self { level, payload }
    }

    pub fn zero() -> Self {
        Self::new(0, TrigPoly::default())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn payload(&self) -> &TrigPoly {
        &self.payload
    }

    /// Same element written at level `m ≥ level`.
    pub fn promote(&self, m: u32) -> Result<Self> {
        if m < self.level {
            return Err(Error::Domain(format!("cannot lower level {} to {m}", self.level)));
        }
        Ok(Self::new(m, self.payload.alpha(m - self.level)))
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = self.level.max(other.level);
        (
            self.promote(m).expect("m is an upper bound"),
            other.promote(m).expect("m is an upper bound"),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        Self::new(a.level, a.payload.add(&b.payload))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        Self::new(a.level, a.payload.mul(&b.payload))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.level, self.payload.scale(s))
    }

    /// Injective *-homomorphisms are isometric, so the norm is read at the
    /// element's own level.
    pub fn norm(&self) -> f64 {
        self.payload.norm()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let (a, b) = self.common(other);
        a.payload.coeff_distance(&b.payload)
    }
}

pub fn dilation_embed(n: u32, x: TrigPoly) -> DilationElement {
    DilationElement::new(n, x)
}

pub fn dilation_equal(e1: &DilationElement, e2: &DilationElement, tol: f64) -> bool {
    e1.distance(e2) <= tol
}

/// `α_g⁻¹(x)` for `g ∈ ℤ`: `(g, x)` when `g ≥ 0` and `(0, α_{−g}(x))` otherwise.
pub fn generator(g: i64, x: &TrigPoly) -> DilationElement {
    if g >= 0 {
        DilationElement::new(g as u32, x.clone())
    } else {
        DilationElement::new(0, x.alpha(g.unsigned_abs() as u32))
    }
}

/// Evidence that an element belongs to `A_X`: a finite combination of
/// generators `α_g⁻¹(x)` with every `g ∈ X`.
#[derive(Clone, Debug)]
pub struct FiberMembershipCertificate {
    pub unit: Unit,
    pub element: DilationElement,
    pub witness: Vec<(i64, C64, TrigPoly)>,
}

impl FiberMembershipCertificate {
    /// Checks that every witness level lies in `Y` and that the witness
    /// reproduces the element.
    pub fn valid_over(&self, y: Unit, tol: f64) -> bool {
        let levels_ok = self.witness.iter().all(|(g, _, _)| match y {
            Unit::Finite(n) => *g <= n,
            Unit::Infinity => true,
        });
        let total = self
            .witness
            .iter()
            .fold(DilationElement::zero(), |acc, (g, c, x)| acc.add(&generator(*g, x).scale(*c)));
        levels_ok && dilation_equal(&total, &self.element, tol)
    }
}

/// `F_{x,f}(X) = Σ_{g ∈ X} f(g) α_g⁻¹(x)`.
pub fn fiber_section_f(x: &TrigPoly, f: &BTreeMap<i64, C64>, unit: Unit) -> FiberMembershipCertificate {
    let mut element = DilationElement::zero();
    let mut witness = Vec::new();
    for (&g, &c) in f {
        let in_x = match unit {
            Unit::Finite(n) => g <= n,
            Unit::Infinity => true,
        };
        if in_x {
            element = element.add(&generator(g, x).scale(c));
            witness.push((g, c, x.clone()));
        }
    }
    FiberMembershipCertificate {
        unit,
        element,
        witness,
    }
}

pub fn random_trig_poly<R: Rng + ?Sized>(rng: &mut R, degree: i64) -> TrigPoly {
    let mut coeffs = BTreeMap::new();
    for j in -degree..=degree {
        if rng.random_bool(0.7) {
            coeffs.insert(j, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        }
    }
    TrigPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pl(breaks: &[f64], vals: &[f64]) -> PiecewiseLinear {
        PiecewiseLinear::new(breaks.to_vec(), vals.to_vec()).unwrap()
    }

    #[test]
    fn rejects_malformed_functions() {
        assert!(PiecewiseLinear::new(vec![0.0, 0.5], vec![1.0, 2.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn quotient_norm_examples() {
        for u in [Unit::Finite(0), Unit::Finite(3), Unit::Infinity] {
            assert_eq!(quotient_norm(u, &PiecewiseLinear::zero()).unwrap(), 0.0);
        }
        let x = pl(&[0.0, 0.5, 1.0], &[0.0, 0.0, 4.0]);
        assert_eq!(quotient_norm(Unit::Finite(1), &x).unwrap(), 0.0);
        assert_eq!(quotient_norm(Unit::Finite(0), &x).unwrap(), 4.0);
        let y = pl(&[0.0, 0.25, 1.0], &[-1.5, 3.0, 0.0]);
        assert_eq!(quotient_norm(Unit::Infinity, &y).unwrap(), 1.5);
    }

    #[test]
    fn ideal_examples() {
        let x = pl(&[0.0, 0.125, 1.0], &[0.0, 0.0, 1.0]);
        assert!(!ideal_contains(Unit::Finite(0), &x).unwrap());
        assert!(ideal_contains(Unit::Finite(3), &x).unwrap());
        assert!(!ideal_contains(Unit::Infinity, &PiecewiseLinear::constant(1.0)).unwrap());
    }

    #[test]
    fn section_inverts_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let x = random_piecewise_linear(&mut rng);
            for n in 0..6 {
                let back = x.section(n).alpha(n);
                for k in 0..=64 {
                    let t = k as f64 / 64.0;
                    assert!((back.eval(t) - x.eval(t)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fiber_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_piecewise_linear(&mut rng);
        let q = QuotientElement::new(Unit::Finite(2), x.clone()).unwrap();
        let same = fiber_action(Unit::Finite(2), 0, &q).unwrap();
        assert!(same.distance(&q).unwrap() <= 1e-12);

        let over_xa = QuotientElement::new(Unit::Finite(4), x.clone()).unwrap();
        let moved = fiber_action(Unit::Finite(1), 3, &over_xa).unwrap();
        assert!((moved.seminorm() - over_xa.seminorm()).abs() < 1e-12);

        let q = QuotientElement::new(Unit::Finite(3), x).unwrap();
        let r1 = fiber_action_via(Unit::Finite(2), 1, 0, &q).unwrap();
        let r2 = fiber_action_via(Unit::Finite(2), 3, 2, &q).unwrap();
        assert!(r1.distance(&r2).unwrap() <= 1e-9);
        assert!(matches!(fiber_action(Unit::Finite(0), -1, &q), Err(Error::Domain(_))));
    }

    #[test]
    fn product_sup_is_exact_on_a_parabola() {
        // x(t) = y(t) = 2t − 1 gives (2t − 1)², with interior minimum 0 and
        // maximum 1 at the endpoints; x·(−x) has the same modulus.
        let x = pl(&[0.0, 1.0], &[-1.0, 1.0]);
        assert_eq!(x.sup_abs_product_on(&x, 0.0, 1.0), 1.0);
        let y = pl(&[0.0, 1.0], &[1.0, 1.0]);
        let z = pl(&[0.0, 1.0], &[-1.0, 3.0]);
        // (−1 + 4t)(1) peaks at t = 1.
        assert_eq!(y.sup_abs_product_on(&z, 0.0, 1.0), 3.0);
        let up = pl(&[0.0, 1.0], &[0.0, 1.0]);
        let down = pl(&[0.0, 1.0], &[1.0, 0.0]);
        assert!((up.sup_abs_product_on(&down, 0.0, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dilation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = random_trig_poly(&mut rng, 3);
        let y = x.add(&TrigPoly::constant(C64::new(0.5, 0.0)));
        assert!(dilation_equal(&dilation_embed(0, x.clone()), &dilation_embed(1, x.alpha(1)), 1e-12));
        assert!(!dilation_equal(&dilation_embed(0, x.clone()), &dilation_embed(0, y), 1e-12));
        let e = dilation_embed(5, x.clone());
        assert!((e.norm() - x.norm()).abs() < 1e-12);
        assert!((x.alpha(2).norm() - x.norm()).abs() < 1e-6 * x.norm().max(1.0));
    }

    #[test]
    fn norm_estimate_brackets_known_sup() {
        // |1 + z| peaks at 2 on the circle.
        let p = TrigPoly::new(BTreeMap::from([(0, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]));
        let est = p.norm_estimate();
        assert!(est.grid_max <= 2.0 + 1e-12 && est.upper >= 2.0 - 1e-12);
    }

    #[test]
    fn fiber_section_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let x = random_trig_poly(&mut rng, 2);
        let one = C64::new(1.0, 0.0);
        let f0 = BTreeMap::from([(0, one)]);
        for u in [Unit::Finite(0), Unit::Finite(4), Unit::Infinity] {
            let cert = fiber_section_f(&x, &f0, u);
            assert!(dilation_equal(&cert.element, &dilation_embed(0, x.clone()), 1e-12));
            assert!(cert.valid_over(u, 1e-12));
        }
        let far = BTreeMap::from([(5, one)]);
        let cert = fiber_section_f(&x, &far, Unit::Finite(3));
        assert!(dilation_equal(&cert.element, &DilationElement::zero(), 1e-12));
        let f = BTreeMap::from([(-2, one), (1, C64::new(0.0, 2.0)), (3, one)]);
        let cert = fiber_section_f(&x, &f, Unit::Infinity);
        let direct = generator(-2, &x)
            .add(&generator(1, &x).scale(C64::new(0.0, 2.0)))
            .add(&generator(3, &x));
        assert!(dilation_equal(&cert.element, &direct, 1e-12));
        assert!(!cert.valid_over(Unit::Finite(2), 1e-12));
    }
}
