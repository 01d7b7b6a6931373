//! Cayley transform between Hermitian matrices and unitaries without
//! eigenvalue 1, plus functional calculus over a spectral decomposition.

use super::eig::{smallest_singular_value, HermitianMatrix, SpectralDecomposition, UnitaryMatrix, CLUSTER_THRESHOLD};
use super::matrix::{ComplexMatrix, C64, I};
use crate::error::{Error, Result};

/// `(A + i)(A − i)⁻¹`.
pub fn cayley(a: &HermitianMatrix) -> Result<UnitaryMatrix> {
    let m = a.matrix();
    let num = m.shift(I);
    let den = m.shift(-I);
    let u = den.right_divide(&num).map_err(|_| {
        Error::Numerical("A − iI is singular; input is not Hermitian".into())
    })?;
    Ok(UnitaryMatrix::new_unchecked(u, a.tol()))
}

/// `i(U + 1)(U − 1)⁻¹`, defined when 1 is not an eigenvalue of `U`.
pub fn inverse_cayley(u: &UnitaryMatrix) -> Result<HermitianMatrix> {
    let m = u.matrix();
    let den = m.shift(C64::new(-1.0, 0.0));
    if smallest_singular_value(&den)? <= CLUSTER_THRESHOLD {
        return Err(Error::Domain("not in Cayley image: 1 is an eigenvalue".into()));
    }
    let num = m.shift(C64::new(1.0, 0.0)).scale(I);
    let a = den.right_divide(&num)?;
    Ok(HermitianMatrix::from_hermitian_part(&a, u.tol()))
}

/// `Σ f(λ_k) E_k`.
pub fn functional_calculus(dec: &SpectralDecomposition, f: impl Fn(C64) -> C64) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(dec.dim());
    for (lambda, e) in dec.iter() {
        let value = f(lambda);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Evaluation {
                re: lambda.re,
                im: lambda.im,
            });
        }
        out = &out + &e.scale(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::eig::{hermitian_eig, unitary_eig, DEFAULT_TOL};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar_h(x: f64) -> HermitianMatrix {
        HermitianMatrix::from_real_diag(&[x])
    }

    #[test]
    fn scalar_cayley_values() {
        let u0 = cayley(&scalar_h(0.0)).unwrap();
        assert!((u0.matrix()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        let u1 = cayley(&scalar_h(1.0)).unwrap();
        assert!((u1.matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
        let d = cayley(&HermitianMatrix::from_real_diag(&[0.0, 1.0])).unwrap();
        let expected = ComplexMatrix::from_diag(&[c(-1.0, 0.0), c(0.0, 1.0)]);
        assert!((d.matrix() - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn inverse_cayley_values() {
        let a = inverse_cayley(&UnitaryMatrix::from_diag(&[c(-1.0, 0.0), c(0.0, 1.0)]).unwrap()).unwrap();
        assert!((a.matrix() - &ComplexMatrix::from_real_diag(&[0.0, 1.0])).max_abs() < 1e-14);
        let a = inverse_cayley(&UnitaryMatrix::from_diag(&[c(0.0, 1.0)]).unwrap()).unwrap();
        assert!((a.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_is_outside_cayley_image() {
        assert!(matches!(inverse_cayley(&UnitaryMatrix::identity(2)), Err(Error::Domain(_))));
    }

    #[test]
    fn cayley_of_all_ones() {
        let a = HermitianMatrix::new(ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]), DEFAULT_TOL).unwrap();
        let u = cayley(&a).unwrap();
        let dec = unitary_eig(&u).unwrap();
        let herm = hermitian_eig(&a).unwrap();
        assert_eq!(dec.len(), 2);
        let target = [(c(-1.0, 0.0), &herm.projections()[0]), (c(0.6, 0.8), &herm.projections()[1])];
        for (lambda, proj) in target {
            let (_, e) = dec.iter().find(|(mu, _)| (mu - lambda).norm() < 1e-10).expect("eigenvalue present");
            assert!((e - proj).max_abs() < 1e-10);
        }
    }

    #[test]
    fn functional_calculus_examples() {
        let dec = unitary_eig(&UnitaryMatrix::from_diag(&[c(-1.0, 0.0), c(0.0, 1.0)]).unwrap()).unwrap();
        let sq = functional_calculus(&dec, |z| z * z).unwrap();
        assert!((&sq - &ComplexMatrix::from_real_diag(&[1.0, -1.0])).max_abs() < 1e-12);
        let one = functional_calculus(&dec, |_| c(1.0, 0.0)).unwrap();
        assert!((&one - &ComplexMatrix::identity(2)).max_abs() < 1e-12);
        let err = functional_calculus(&dec, |z| if z.re < -0.5 { c(f64::NAN, 0.0) } else { z });
        assert!(matches!(err, Err(Error::Evaluation { .. })));
    }
}
