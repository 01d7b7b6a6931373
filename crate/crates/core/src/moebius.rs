//! The fractional-linear action of Hermitian matrices on the unitary group
//! and the geometry of unitaries with spectrum in the closed upper half
//! circle.

use rand::Rng;

use crate::error::{Error, Result};
use crate::jordan::{order_compare, JordanAlgebra, Order};
use crate::sampling;
use crate::spectra::{
    cayley, functional_calculus, lambda_min, smallest_singular_value, unitary_eig, ComplexMatrix, HermitianMatrix,
    SpectralDecomposition, UnitaryMatrix, C64, CLUSTER_THRESHOLD, DEFAULT_TOL, I,
};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `U ⊞ B = ((2i + B)U − B)(BU + 2i − B)⁻¹`.
pub fn boxplus(u: &UnitaryMatrix, b: &HermitianMatrix) -> Result<UnitaryMatrix> {
    u.matrix().check_same_dim(b.matrix())?;
    let tol = u.tol().max(b.tol());
    let bu = b.matrix() * u.matrix();
    let den = &bu.shift(2.0 * I) - b.matrix();
    if smallest_singular_value(&den)? < tol {
        return Err(Error::Numerical("BU + 2i − B is singular; input is corrupted".into()));
    }
    let num = &(&u.matrix().scale(2.0 * I) + &bu) - b.matrix();
    Ok(UnitaryMatrix::new_unchecked(den.right_divide(&num)?, tol))
}

/// Smallest singular value of `BU + 2i − B`, the quantity that keeps
/// [`boxplus`] well defined.
pub fn boxplus_margin(u: &UnitaryMatrix, b: &HermitianMatrix) -> Result<f64> {
    u.matrix().check_same_dim(b.matrix())?;
    let den = &(b.matrix() * u.matrix()).shift(2.0 * I) - b.matrix();
    smallest_singular_value(&den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZClassification {
    /// No eigenvalue at −1.
    InteriorOrbit,
    /// −1 is an eigenvalue.
    Boundary,
    /// Some eigenvalue lies in the open lower half circle.
    Outside,
}

pub fn classify_spectrum(dec: &SpectralDecomposition, tol: f64) -> ZClassification {
    if dec.eigenvalues().iter().any(|l| l.im < -tol) {
        ZClassification::Outside
    } else if dec.eigenvalues().iter().any(|l| (l + one()).norm() <= CLUSTER_THRESHOLD) {
        ZClassification::Boundary
    } else {
        ZClassification::InteriorOrbit
    }
}

pub fn classify_zpoint(u: &UnitaryMatrix) -> Result<ZClassification> {
    Ok(classify_spectrum(&unitary_eig(u)?, u.tol()))
}

/// A unitary whose spectrum lies in the closed upper half circle, together
/// with its cached spectral decomposition.
#[derive(Clone, Debug)]
pub struct ZPoint {
    u: UnitaryMatrix,
    dec: SpectralDecomposition,
}

impl ZPoint {
    pub fn new(u: UnitaryMatrix) -> Result<Self> {
        let dec = unitary_eig(&u)?;
        if classify_spectrum(&dec, u.tol()) == ZClassification::Outside {
            return Err(Error::Domain("spectrum leaves the upper half circle".into()));
        }
        Ok(Self { u, dec })
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.u
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.u.matrix()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.dec
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn classify(&self) -> ZClassification {
        classify_spectrum(&self.dec, self.u.tol())
    }
}

fn require_positive(a: &HermitianMatrix, what: &str) -> Result<()> {
    let l = a.lambda_min()?;
    if l < -a.tol() {
        return Err(Error::Domain(format!("{what} is not positive (λ_min = {l:e})")));
    }
    Ok(())
}

/// `ψ(A) = (−A + i)(A + i)⁻¹` on the positive cone.
pub fn psi(a: &HermitianMatrix) -> Result<UnitaryMatrix> {
    require_positive(a, "A")?;
    let num = (-a.matrix()).shift(I);
    let den = a.matrix().shift(I);
    Ok(UnitaryMatrix::new_unchecked(den.right_divide(&num)?, a.tol()))
}

/// `ψ⁻¹(U) = i(1 − U)(1 + U)⁻¹`, defined away from −1.
pub fn psi_inv(u: &UnitaryMatrix) -> Result<HermitianMatrix> {
    let den = u.matrix().shift(one());
    if smallest_singular_value(&den)? <= CLUSTER_THRESHOLD {
        return Err(Error::Domain("not in Z₀: −1 is an eigenvalue".into()));
    }
    let num = (-u.matrix()).shift(one()).scale(I);
    let a = den.right_divide(&num)?;
    Ok(HermitianMatrix::from_hermitian_part(&a, u.tol()))
}

/// `A(BA + 1)⁻¹` for `A, B` positive.
pub fn moebius_contraction(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.matrix().check_same_dim(b.matrix())?;
    require_positive(a, "A")?;
    require_positive(b, "B")?;
    let den = (b.matrix() * a.matrix()).shift(one());
    let c = den.right_divide(a.matrix())?;
    Ok(HermitianMatrix::from_hermitian_part(&c, a.tol().max(b.tol())))
}

/// Inverse of `A ↦ A(BA + 1)⁻¹`: `A = (1 − CB)⁻¹ C`, defined for positive
/// `C` strictly below `B⁻¹`.
pub fn contraction_inverse(c: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    c.matrix().check_same_dim(b.matrix())?;
    let tol = c.tol().max(b.tol());
    if b.lambda_min()? <= tol {
        return Err(Error::Domain("B is not in the interior of the cone".into()));
    }
    require_positive(c, "C")?;
    let b_inv = HermitianMatrix::from_hermitian_part(&b.matrix().inverse()?, tol);
    if order_compare(c, &b_inv, tol)? != Order::Lt {
        return Err(Error::Domain("C not strictly below B⁻¹".into()));
    }
    let lhs = (-&(c.matrix() * b.matrix())).shift(one());
    let a = lhs.solve(c.matrix())?;
    Ok(HermitianMatrix::from_hermitian_part(&a, tol))
}

/// Pair `(E, A)`: a projection and a positive matrix supported on its
/// complement.
#[derive(Clone, Debug)]
pub struct PairRep {
    e: ComplexMatrix,
    a: HermitianMatrix,
    tol: f64,
}

impl PairRep {
    pub fn new(e: ComplexMatrix, a: HermitianMatrix, tol: f64) -> Result<Self> {
        e.check_same_dim(a.matrix())?;
        if (&(&e * &e) - &e).max_abs() > tol || (&e - &e.adjoint()).max_abs() > tol {
            return Err(Error::InvalidInput("E is not an orthogonal projection".into()));
        }
        if a.lambda_min()? < -tol {
            return Err(Error::InvalidInput("A is not positive".into()));
        }
        let f = complement(&e);
        if (&(&(&f * a.matrix()) * &f) - a.matrix()).max_abs() > tol {
            return Err(Error::InvalidInput("(1 − E)A(1 − E) ≠ A".into()));
        }
        Ok(Self { e, a, tol })
    }

    /// Builds `(E, (1 − E) P (1 − E))` from any positive `P`.
    pub fn compressing(e: ComplexMatrix, p: &HermitianMatrix, tol: f64) -> Result<Self> {
        let a = p.congruence(&complement(&e));
        Self::new(e, a, tol)
    }

    /// The pair of a point in a Jordan algebra: both parts must lie in it.
    pub fn in_algebra(&self, v: &JordanAlgebra) -> bool {
        v.contains(&self.e) && v.contains(self.a.matrix())
    }

    pub fn e(&self) -> &ComplexMatrix {
        &self.e
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.e.dim()
    }

    /// Distance between parameters, max-entry norm over both parts.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.e - &other.e).max_abs().max((self.a.matrix() - other.a.matrix()).max_abs())
    }
}

fn complement(e: &ComplexMatrix) -> ComplexMatrix {
    (-e).shift(one())
}

/// `E` is the eigenprojection at 1; `A` is the inverse Cayley transform of
/// the rest, extended by 0 on the range of `E`.
pub fn pair_encode(z: &ZPoint) -> Result<PairRep> {
    let dec = z.decomposition();
    let tol = z.unitary().tol();
    let mut e = ComplexMatrix::zeros(z.dim());
    for (lambda, p) in dec.iter() {
        if (lambda - one()).norm() <= CLUSTER_THRESHOLD {
            e = &e + p;
        }
    }
    let a = functional_calculus(dec, |lambda| {
        if (lambda - one()).norm() <= CLUSTER_THRESHOLD {
            C64::new(0.0, 0.0)
        } else {
            // i(λ + 1)/(λ − 1) is real on the circle.
            C64::new((I * (lambda + one()) / (lambda - one())).re, 0.0)
        }
    })?;
    PairRep::new(e, HermitianMatrix::from_hermitian_part(&a, tol), 10.0 * tol)
}

/// `U = E + (1 − E) cayley(A) (1 − E)`.
pub fn pair_unitary(p: &PairRep) -> Result<UnitaryMatrix> {
    let f = complement(&p.e);
    let c = cayley(&p.a)?;
    let u = &p.e + &(&(&f * c.matrix()) * &f);
    Ok(UnitaryMatrix::new_unchecked(u, p.tol))
}

pub fn pair_decode(p: &PairRep) -> Result<ZPoint> {
    ZPoint::new(pair_unitary(p)?)
}

/// `λ_min(A + (1 − E)B(1 − E)) ≥ −tol`, for `B` in the algebra.
pub fn qset_contains(p: &PairRep, b: &HermitianMatrix, v: &JordanAlgebra) -> Result<bool> {
    if !v.contains(b.matrix()) {
        return Err(Error::Domain("probe lies outside the Jordan algebra".into()));
    }
    qset_contains_unchecked(p, b)
}

fn qset_contains_unchecked(p: &PairRep, b: &HermitianMatrix) -> Result<bool> {
    let f = complement(&p.e);
    let m = p.a.matrix() + &(&(&f * b.matrix()) * &f);
    Ok(lambda_min(&m)? >= -p.tol)
}

#[derive(Clone, Debug)]
pub enum Separation {
    Equal,
    Witness(HermitianMatrix),
}

/// Exponents of the probe grid `α ∈ ±{2⁻⁸, …, 2⁸}`.
pub const PROBE_EXPONENTS: std::ops::RangeInclusive<i32> = -8..=8;

/// Finds `B` in the algebra that lies in exactly one of the two Q-sets, by
/// probing scaled projections `αE` and then `−A`.
pub fn separate_points(p1: &PairRep, p2: &PairRep, v: &JordanAlgebra) -> Result<Separation> {
    let tol = p1.tol.max(p2.tol);
    if p1.distance(p2) <= tol.max(CLUSTER_THRESHOLD) {
        return Ok(Separation::Equal);
    }
    let differs = |b: &HermitianMatrix| -> Result<bool> {
        Ok(qset_contains(p1, b, v)? != qset_contains(p2, b, v)?)
    };
    let mut probes = Vec::new();
    for e in [&p1.e, &p2.e] {
        for sign in [-1.0, 1.0] {
            for k in PROBE_EXPONENTS {
                let alpha = sign * 2f64.powi(k);
                probes.push(HermitianMatrix::from_hermitian_part(&e.scale_real(alpha), tol));
            }
        }
    }
    probes.push(p1.a.scale(-1.0));
    probes.push(p2.a.scale(-1.0));
    for b in probes {
        if differs(&b)? {
            return Ok(Separation::Witness(b));
        }
    }
    Err(Error::WitnessNotFound(format!(
        "pairs differ by {:e} but no probe separates their Q-sets",
        p1.distance(p2)
    )))
}

/// Random pair with `E` a union of eigenprojections of a random Hermitian
/// matrix and `A` a compressed random positive matrix.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PairRep {
    let h = sampling::hermitian(rng, dim);
    let e = sampling::spectral_projection(rng, &h);
    let p = sampling::positive(rng, dim);
    PairRep::compressing(e, &p, 1e3 * DEFAULT_TOL).expect("compressed positive pair is valid")
}

pub fn random_zpoint<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<ZPoint> {
    pair_decode(&random_pair(rng, dim))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar_u(z: C64) -> UnitaryMatrix {
        UnitaryMatrix::from_diag(&[z]).unwrap()
    }

    fn scalar_h(x: f64) -> HermitianMatrix {
        HermitianMatrix::from_real_diag(&[x])
    }

    #[test]
    fn boxplus_scalar_examples() {
        for b in [-2.0, 0.0, 0.5, 3.0] {
            let r = boxplus(&scalar_u(c(-1.0, 0.0)), &scalar_h(b)).unwrap();
            let expected = c(b, 1.0) / c(b, -1.0);
            assert!((r.matrix()[(0, 0)] - expected).norm() < 1e-14);
            let r = boxplus(&scalar_u(c(1.0, 0.0)), &scalar_h(b)).unwrap();
            assert!((r.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        }
        let u = UnitaryMatrix::from_diag(&[c(0.0, 1.0), c(-0.6, 0.8)]).unwrap();
        let r = boxplus(&u, &HermitianMatrix::zeros(2)).unwrap();
        assert!((r.matrix() - u.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_zpoint(&UnitaryMatrix::identity(2)).unwrap(), ZClassification::InteriorOrbit);
        assert_eq!(
            classify_zpoint(&UnitaryMatrix::scalar_multiple_of_identity(2, c(-1.0, 0.0)).unwrap()).unwrap(),
            ZClassification::Boundary
        );
        let d = UnitaryMatrix::from_diag(&[c(0.0, 1.0), C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]).unwrap();
        assert_eq!(classify_zpoint(&d).unwrap(), ZClassification::Outside);
    }

    #[test]
    fn psi_examples() {
        assert!((psi(&scalar_h(0.0)).unwrap().matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((psi(&scalar_h(1.0)).unwrap().matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((psi_inv(&scalar_u(c(0.0, 1.0))).unwrap().matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(psi_inv(&scalar_u(c(-1.0, 0.0))), Err(Error::Domain(_))));
        assert!(matches!(psi(&scalar_h(-1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn contraction_examples() {
        let c_half = moebius_contraction(&scalar_h(1.0), &scalar_h(1.0)).unwrap();
        assert!((c_half.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        let a = contraction_inverse(&scalar_h(0.5), &scalar_h(1.0)).unwrap();
        assert!((a.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        let z = contraction_inverse(&HermitianMatrix::zeros(2), &HermitianMatrix::identity(2)).unwrap();
        assert!(z.matrix().max_abs() < 1e-15);
        assert!(matches!(
            contraction_inverse(&scalar_h(1.0), &scalar_h(1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pair_examples() {
        let minus = ZPoint::new(UnitaryMatrix::scalar_multiple_of_identity(2, c(-1.0, 0.0)).unwrap()).unwrap();
        let p = pair_encode(&minus).unwrap();
        assert!(p.e().max_abs() < 1e-12 && p.a().matrix().max_abs() < 1e-12);

        let id = ZPoint::new(UnitaryMatrix::identity(2)).unwrap();
        let p = pair_encode(&id).unwrap();
        assert!((p.e() - &ComplexMatrix::identity(2)).max_abs() < 1e-12 && p.a().matrix().max_abs() < 1e-12);

        let z = ZPoint::new(UnitaryMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap()).unwrap();
        let p = pair_encode(&z).unwrap();
        assert!((p.e() - &ComplexMatrix::from_real_diag(&[1.0, 0.0])).max_abs() < 1e-12);
        assert!((p.a().matrix() - &ComplexMatrix::from_real_diag(&[0.0, 1.0])).max_abs() < 1e-12);
        let back = pair_decode(&p).unwrap();
        assert!((back.matrix() - z.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn pair_rejects_uncompressed_a() {
        let e = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let a = HermitianMatrix::identity(2);
        assert!(matches!(PairRep::new(e, a, DEFAULT_TOL), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn separation_examples() {
        let v = JordanAlgebra::diagonal(2);
        let zero = PairRep::new(ComplexMatrix::zeros(2), HermitianMatrix::zeros(2), DEFAULT_TOL).unwrap();
        assert!(matches!(separate_points(&zero, &zero, &v).unwrap(), Separation::Equal));

        let e = PairRep::new(ComplexMatrix::from_real_diag(&[1.0, 0.0]), HermitianMatrix::zeros(2), DEFAULT_TOL).unwrap();
        let Separation::Witness(b) = separate_points(&e, &zero, &v).unwrap() else {
            panic!("expected witness");
        };
        assert_ne!(qset_contains(&e, &b, &v).unwrap(), qset_contains(&zero, &b, &v).unwrap());

        let a1 = PairRep::new(ComplexMatrix::zeros(2), HermitianMatrix::from_real_diag(&[0.0, 1.0]), DEFAULT_TOL).unwrap();
        let a2 = PairRep::new(ComplexMatrix::zeros(2), HermitianMatrix::from_real_diag(&[0.0, 2.0]), DEFAULT_TOL).unwrap();
        let Separation::Witness(b) = separate_points(&a1, &a2, &v).unwrap() else {
            panic!("expected witness");
        };
        assert!(!qset_contains(&a1, &b, &v).unwrap());
        assert!(qset_contains(&a2, &b, &v).unwrap());
    }

    #[test]
    fn qset_rejects_probe_outside_algebra() {
        let v = JordanAlgebra::diagonal(2);
        let zero = PairRep::new(ComplexMatrix::zeros(2), HermitianMatrix::zeros(2), DEFAULT_TOL).unwrap();
        let b = HermitianMatrix::new(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), DEFAULT_TOL).unwrap();
        assert!(matches!(qset_contains(&zero, &b, &v), Err(Error::Domain(_))));
    }
}
