//! Verification of the contracting-homotopy hypothesis on the half-line
//! model and on unitaries with spectrum in the upper half circle.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fell::Ext;
use crate::moebius::{ZClassification, ZPoint};
use crate::sampling;
use crate::spectra::{
    functional_calculus, unitary_eig, ComplexMatrix, HermitianMatrix, UnitaryMatrix, C64, CLUSTER_THRESHOLD,
    DEFAULT_TOL,
};

/// Default time grid: 65 uniform points on `[0, 1]`.
pub const DEFAULT_T_POINTS: usize = 65;

/// Largest jump in the model metric tolerated between adjacent grid times.
pub const CONTINUITY_BOUND: f64 = 0.5;

pub fn uniform_grid(points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// A homotopy of `Ω` together with the tests the hypothesis is phrased in.
pub trait HomotopyModel {
    type Point: Clone + fmt::Debug;

    fn name(&self) -> &str;
    fn phi(&self, t: f64, x: &Self::Point) -> Result<Self::Point>;
    fn in_omega(&self, x: &Self::Point) -> bool;
    fn is_boundary(&self, x: &Self::Point) -> bool;
    /// Membership in the orbit `{P⁻¹a : a ∈ P}`.
    fn in_orbit(&self, x: &Self::Point) -> bool;
    /// `y ⊂ x` as closed sets, in model coordinates.
    fn contained_in(&self, y: &Self::Point, x: &Self::Point) -> Result<bool>;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClauseOutcome {
    pub checks: usize,
    pub violations: usize,
    pub max_error: f64,
}

impl ClauseOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, ok: bool, error: f64) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
        }
        if error.is_finite() {
            self.max_error = self.max_error.max(error);
        } else {
            self.max_error = f64::INFINITY;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyReport {
    pub model: String,
    pub clauses: BTreeMap<String, ClauseOutcome>,
    pub failures: Vec<String>,
}

impl HomotopyReport {
    pub fn passed(&self) -> bool {
        self.clauses.values().all(ClauseOutcome::passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseOutcome> {
        self.clauses.get(name)
    }
}

pub const BOUNDARY_INVARIANCE: &str = "boundary_invariance";
pub const ORBIT_AND_ORDER: &str = "orbit_and_order";
pub const ENDPOINTS: &str = "endpoints";
pub const CONTINUITY: &str = "continuity";

const MAX_FAILURE_LINES: usize = 20;

/// Checks, for every sample and grid time: boundary points stay on the
/// boundary; for `t > 0` the image lies in the orbit and below the sample;
/// `φ₀ = id` and `φ₁` lands on the boundary; adjacent times stay close.
pub fn verify_condition_h<M: HomotopyModel>(
    model: &M,
    t_grid: &[f64],
    samples: &[M::Point],
    tol: f64,
) -> Result<HomotopyReport> {
    if t_grid.first() != Some(&0.0) || t_grid.last() != Some(&1.0) {
        return Err(Error::InvalidInput("time grid must start at 0 and end at 1".into()));
    }
    if let Some(bad) = samples.iter().find(|x| !model.in_omega(x)) {
        return Err(Error::InvalidInput(format!("sample {bad:?} is outside the model")));
    }
    let mut boundary = ClauseOutcome::default();
    let mut orbit = ClauseOutcome::default();
    let mut endpoints = ClauseOutcome::default();
    let mut continuity = ClauseOutcome::default();
    let mut failures = Vec::new();
    let note = |failures: &mut Vec<String>, msg: String| {
        if failures.len() < MAX_FAILURE_LINES {
            failures.push(msg);
        }
    };
    for (i, x) in samples.iter().enumerate() {
        let on_boundary = model.is_boundary(x);
        let mut prev: Option<M::Point> = None;
        for &t in t_grid {
            let y = model.phi(t, x)?;
            if on_boundary {
                let ok = model.is_boundary(&y);
                boundary.record(ok, 0.0);
                if !ok {
                    note(&mut failures, format!("{BOUNDARY_INVARIANCE}: sample {i} leaves the boundary at t = {t}"));
                }
            }
            if t > 0.0 {
                let in_orbit = model.in_orbit(&y);
                let below = model.contained_in(&y, x)?;
                orbit.record(in_orbit && below, 0.0);
                if !in_orbit {
                    note(&mut failures, format!("{ORBIT_AND_ORDER}: sample {i} leaves the orbit at t = {t}"));
                } else if !below {
                    note(&mut failures, format!("{ORBIT_AND_ORDER}: sample {i} not contained at t = {t}"));
                }
            } else {
                let err = model.distance(&y, x);
                let ok = err <= tol;
                endpoints.record(ok, err);
                if !ok {
                    note(&mut failures, format!("{ENDPOINTS}: φ₀ moves sample {i} by {err:e}"));
                }
            }
            if t == 1.0 {
                let ok = model.is_boundary(&y);
                endpoints.record(ok, 0.0);
                if !ok {
                    note(&mut failures, format!("{ENDPOINTS}: φ₁ of sample {i} is not on the boundary"));
                }
            }
            if let Some(p) = &prev {
                let jump = model.distance(p, &y);
                let ok = jump <= CONTINUITY_BOUND;
                continuity.record(ok, jump);
                if !ok {
                    note(&mut failures, format!("{CONTINUITY}: sample {i} jumps by {jump:e} before t = {t}"));
                }
            }
            prev = Some(y);
        }
    }
    let clauses = BTreeMap::from([
        (BOUNDARY_INVARIANCE.to_string(), boundary),
        (ORBIT_AND_ORDER.to_string(), orbit),
        (ENDPOINTS.to_string(), endpoints),
        (CONTINUITY.to_string(), continuity),
    ]);
    Ok(HomotopyReport {
        model: model.name().to_string(),
        clauses,
        failures,
    })
}

/// `[0, ∞]` with `x ↔ (−∞, x]`; the boundary is `{0}` and the orbit is the
/// finite part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalflineHomotopy {
    Normalised,
    /// `φ_t(x) = (1 − t)x`, which never brings `∞` back into the orbit.
    Unnormalised,
}

fn arctan_ext(x: Ext<f64>) -> f64 {
    match x {
        Ext::Finite(v) => v.atan(),
        Ext::Infinite => PI / 2.0,
    }
}

/// `φ_t(x) = (1 − t)x / √((1 − (1 − t)²)x² + 1)`, with the `x → ∞` limit
/// `(1 − t)/√(1 − (1 − t)²)` for `t > 0`.
pub fn halfline_phi(t: f64, x: Ext<f64>) -> Ext<f64> {
    let s = 1.0 - t;
    let k = 1.0 - s * s;
    match x {
        Ext::Finite(v) => Ext::Finite(s * v / (k * v * v + 1.0).sqrt()),
        Ext::Infinite if t == 0.0 => Ext::Infinite,
        Ext::Infinite => Ext::Finite(s / k.sqrt()),
    }
}

impl HomotopyModel for HalflineHomotopy {
    type Point = Ext<f64>;

    fn name(&self) -> &str {
        match self {
            Self::Normalised => "halfline",
            Self::Unnormalised => "halfline_unnormalised",
        }
    }

    fn phi(&self, t: f64, x: &Ext<f64>) -> Result<Ext<f64>> {
        Ok(match self {
            Self::Normalised => halfline_phi(t, *x),
            Self::Unnormalised => match *x {
                Ext::Finite(v) => Ext::Finite((1.0 - t) * v),
                Ext::Infinite if t < 1.0 => Ext::Infinite,
                Ext::Infinite => Ext::Finite(0.0),
            },
        })
    }

    fn in_omega(&self, x: &Ext<f64>) -> bool {
        match *x {
            Ext::Finite(v) => v >= 0.0,
            Ext::Infinite => true,
        }
    }

    fn is_boundary(&self, x: &Ext<f64>) -> bool {
        *x == Ext::Finite(0.0)
    }

    fn in_orbit(&self, x: &Ext<f64>) -> bool {
        matches!(x, Ext::Finite(v) if *v >= 0.0)
    }

    fn contained_in(&self, y: &Ext<f64>, x: &Ext<f64>) -> Result<bool> {
        Ok(match (*y, *x) {
            (_, Ext::Infinite) => true,
            (Ext::Infinite, Ext::Finite(_)) => false,
            (Ext::Finite(a), Ext::Finite(b)) => a <= b,
        })
    }

    fn distance(&self, a: &Ext<f64>, b: &Ext<f64>) -> f64 {
        (arctan_ext(*a) - arctan_ext(*b)).abs()
    }
}

/// Boundary, infinity and log-uniform interior samples.
pub fn halfline_samples<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Ext<f64>> {
    let mut out = vec![Ext::Finite(0.0), Ext::Infinite];
    while out.len() < count.max(2) {
        out.push(Ext::Finite(10f64.powf(rng.random_range(-3.0..3.0))));
    }
    out
}

/// Angle branch `g(e^{iθ}) = θ ∈ [0, π]`; arguments a hair below the real
/// axis are clamped onto the nearer endpoint.
fn clamped_angle(lambda: C64, tol: f64) -> Result<f64> {
    if lambda.im < -tol {
        return Err(Error::Domain("not in Z: eigenvalue below the real axis".into()));
    }
    if lambda.im < 0.0 {
        return Ok(if lambda.re > 0.0 { 0.0 } else { PI });
    }
    Ok(lambda.arg().clamp(0.0, PI))
}

/// `g(U)` for the inverse `g` of `[0, π] ∋ θ ↦ e^{iθ}`.
pub fn angle_log(u: &UnitaryMatrix) -> Result<HermitianMatrix> {
    let dec = unitary_eig(u)?;
    for lambda in dec.eigenvalues() {
        clamped_angle(*lambda, u.tol())?;
    }
    let m = functional_calculus(&dec, |l| C64::new(clamped_angle(l, u.tol()).unwrap_or(f64::NAN), 0.0))?;
    Ok(HermitianMatrix::from_hermitian_part(&m, u.tol()))
}

/// `Re μ_k ≤ Re λ_k + tol` on every spectral projection `E_k` of `U2`,
/// where `μ_k` is the value of `U1` on the range of `E_k`.
pub fn order_containment_unitary(u1: &UnitaryMatrix, u2: &ZPoint) -> Result<bool> {
    let tol = u1.tol().max(u2.unitary().tol());
    let frame_tol = 1e3 * tol;
    for (lambda, e) in u2.decomposition().iter() {
        let rank = e.trace().re;
        let mu = (e * u1.matrix()).trace() / rank;
        let restricted = u1.matrix() * e;
        if (&restricted - &e.scale(mu)).max_abs() > frame_tol {
            return Err(Error::Domain("not comparable via shared frame".into()));
        }
        if mu.re > lambda.re + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `φ_t(U) = e^{i(1−t)g(U) + itπ}` on `Z`; the mutated variant drops the
/// `itπ` term and rotates towards 1 instead of −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitaryHomotopy {
    TowardsMinusOne,
    TowardsOne,
}

impl UnitaryHomotopy {
    fn rotate(&self, t: f64, theta: f64) -> f64 {
        match self {
            Self::TowardsMinusOne => (1.0 - t) * theta + t * PI,
            Self::TowardsOne => (1.0 - t) * theta,
        }
    }
}

impl HomotopyModel for UnitaryHomotopy {
    type Point = ZPoint;

    fn name(&self) -> &str {
        match self {
            Self::TowardsMinusOne => "unitary",
            Self::TowardsOne => "unitary_towards_one",
        }
    }

    fn phi(&self, t: f64, x: &ZPoint) -> Result<ZPoint> {
        let tol = x.unitary().tol();
        let m = functional_calculus(x.decomposition(), |l| match clamped_angle(l, tol) {
            Ok(theta) => C64::from_polar(1.0, self.rotate(t, theta)),
            Err(_) => C64::new(f64::NAN, 0.0),
        })?;
        ZPoint::new(UnitaryMatrix::new(m, 1e3 * tol.max(DEFAULT_TOL))?)
    }

    fn in_omega(&self, _x: &ZPoint) -> bool {
        true
    }

    fn is_boundary(&self, x: &ZPoint) -> bool {
        x.classify() == ZClassification::Boundary
    }

    fn in_orbit(&self, x: &ZPoint) -> bool {
        x.classify() != ZClassification::Outside
            && x
                .decomposition()
                .eigenvalues()
                .iter()
                .all(|l| (l - C64::new(1.0, 0.0)).norm() > CLUSTER_THRESHOLD)
    }

    fn contained_in(&self, y: &ZPoint, x: &ZPoint) -> Result<bool> {
        order_containment_unitary(y.unitary(), x)
    }

    fn distance(&self, a: &ZPoint, b: &ZPoint) -> f64 {
        (a.matrix() - b.matrix()).frobenius_norm()
    }
}

/// `V diag(e^{iθ_j}) V*` with Haar `V` and the given angles.
pub fn unitary_with_angles<R: Rng + ?Sized>(rng: &mut R, angles: &[f64]) -> Result<ZPoint> {
    let v = sampling::unitary(rng, angles.len());
    let d = ComplexMatrix::from_diag(&angles.iter().map(|&a| C64::from_polar(1.0, a)).collect::<Vec<_>>());
    let u = &(v.matrix() * &d) * &v.matrix().adjoint();
    ZPoint::new(UnitaryMatrix::new(u, 1e3 * DEFAULT_TOL)?)
}

/// `±1`, points with an eigenvalue at −1 or at 1, and generic points with
/// angles drawn from `[0, π]`.
pub fn unitary_samples<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> Result<Vec<ZPoint>> {
    let mut out = vec![
        ZPoint::new(UnitaryMatrix::identity(dim))?,
        ZPoint::new(UnitaryMatrix::scalar_multiple_of_identity(dim, C64::new(-1.0, 0.0))?)?,
    ];
    while out.len() < count.max(2) {
        let mut angles: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..=PI)).collect();
        match out.len() % 3 {
            0 => angles[0] = PI,
            1 => angles[0] = 0.0,
            _ => {}
        }
        out.push(unitary_with_angles(rng, &angles)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn halfline_homotopy_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples = halfline_samples(&mut rng, 50);
        let report = verify_condition_h(&HalflineHomotopy::Normalised, &uniform_grid(DEFAULT_T_POINTS), &samples, 1e-12).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        let at_inf = halfline_phi(0.5, Ext::Infinite);
        assert!((at_inf.finite().unwrap() - 0.5 / 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(halfline_phi(1.0, Ext::Infinite), Ext::Finite(0.0));
    }

    #[test]
    fn unnormalised_halfline_fails_orbit_clause() {
        let samples = vec![Ext::Finite(0.0), Ext::Finite(2.0), Ext::Infinite];
        let report = verify_condition_h(&HalflineHomotopy::Unnormalised, &uniform_grid(9), &samples, 1e-12).unwrap();
        assert!(!report.clause(ORBIT_AND_ORDER).unwrap().passed());
        assert!(report.clause(BOUNDARY_INVARIANCE).unwrap().passed());
    }

    #[test]
    fn angle_log_examples() {
        assert!(angle_log(&UnitaryMatrix::identity(2)).unwrap().matrix().max_abs() < 1e-12);
        let minus = UnitaryMatrix::scalar_multiple_of_identity(2, C64::new(-1.0, 0.0)).unwrap();
        let g = angle_log(&minus).unwrap();
        assert!((g.matrix() - &ComplexMatrix::identity(2).scale_real(PI)).max_abs() < 1e-12);
        let d = UnitaryMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let g = angle_log(&d).unwrap();
        assert!((g.matrix() - &ComplexMatrix::from_real_diag(&[0.0, PI / 2.0])).max_abs() < 1e-12);
        let below = UnitaryMatrix::from_diag(&[C64::new(0.0, -1.0)]).unwrap();
        assert!(matches!(angle_log(&below), Err(Error::Domain(_))));
    }

    #[test]
    fn order_containment_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = unitary_with_angles(&mut rng, &[0.3, 1.2, 2.0]).unwrap();
        assert!(order_containment_unitary(u.unitary(), &u).unwrap());
        let h = UnitaryHomotopy::TowardsMinusOne;
        for t in [0.25, 0.5, 1.0] {
            let y = h.phi(t, &u).unwrap();
            assert!(order_containment_unitary(y.unitary(), &u).unwrap());
            if t < 1.0 {
                assert!(!order_containment_unitary(u.unitary(), &y).unwrap());
            }
        }
        let other = unitary_with_angles(&mut rng, &[0.3, 1.2, 2.0]).unwrap();
        assert!(matches!(
            order_containment_unitary(other.unitary(), &u),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unitary_homotopies() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = unitary_samples(&mut rng, 3, 12).unwrap();
        let grid = uniform_grid(17);
        let good = verify_condition_h(&UnitaryHomotopy::TowardsMinusOne, &grid, &samples, 1e-9).unwrap();
        assert!(good.passed(), "{:?}", good.failures);
        let bad = verify_condition_h(&UnitaryHomotopy::TowardsOne, &grid, &samples, 1e-9).unwrap();
        assert!(!bad.passed());
        assert!(!bad.clause(BOUNDARY_INVARIANCE).unwrap().passed());
        assert!(!bad.clause(ENDPOINTS).unwrap().passed());
    }
}
