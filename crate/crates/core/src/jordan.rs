//! Special Euclidean Jordan algebras of Hermitian matrices and their
//! positive cones.

use crate::error::{Error, Result};
use crate::spectra::{lambda_min, ComplexMatrix, HermitianMatrix, C64, DEFAULT_TOL};

/// Real subspace of Hermitian matrices containing the identity and closed
/// under `a ∘ b = (ab + ba)/2`. The basis is orthonormal for `Re tr(AB)`.
#[derive(Clone, Debug)]
pub struct JordanAlgebra {
    dim: usize,
    basis: Vec<ComplexMatrix>,
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConeClassification {
    Interior,
    Boundary,
    OutsideCone,
    OutsideAlgebra,
}

impl ConeClassification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Interior => "interior",
            Self::Boundary => "boundary",
            Self::OutsideCone => "outside_cone",
            Self::OutsideAlgebra => "outside_algebra",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Lt,
    Leq,
    IncomparableOrGt,
}

/// Adds `m` to an orthonormal family if its residual exceeds `tol`.
/// Returns whether the family grew.
fn extend_orthonormal(basis: &mut Vec<ComplexMatrix>, m: &ComplexMatrix, tol: f64) -> bool {
    let mut r = m.hermitian_part();
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.real_inner(&r);
            r = &r - &b.scale_real(c);
        }
    }
    let norm = r.frobenius_norm();
    if norm <= tol {
        return false;
    }
    basis.push(r.scale_real(1.0 / norm));
    true
}

impl JordanAlgebra {
    /// Smallest Jordan algebra containing `1` and the generators.
    pub fn generate(dim: usize, generators: &[HermitianMatrix], tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut basis = Vec::new();
        extend_orthonormal(&mut basis, &ComplexMatrix::identity(dim), tol);
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
            extend_orthonormal(&mut basis, g.matrix(), tol);
        }
        Self::close(dim, basis, tol)
    }

    /// Validates a user-supplied basis: entries must be Hermitian within
    /// `tol`, and the span is closed under the Jordan product after adding 1.
    pub fn from_generators_checked(dim: usize, generators: &[ComplexMatrix], tol: f64) -> Result<Self> {
        let herm = generators
            .iter()
            .map(|g| HermitianMatrix::new(g.clone(), tol))
            .collect::<Result<Vec<_>>>()?;
        Self::generate(dim, &herm, tol)
    }

    fn close(dim: usize, mut basis: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        // The span lives in a real space of dimension dim², so at most dim²
        // rounds can add anything.
        for _ in 0..dim * dim {
            let n = basis.len();
            let mut grew = false;
            for i in 0..n {
                for j in i..n {
                    let p = basis[i].jordan_product(&basis[j]);
                    grew |= extend_orthonormal(&mut basis, &p, tol);
                }
            }
            if !grew {
                return Ok(Self { dim, basis, tol });
            }
        }
        Ok(Self { dim, basis, tol })
    }

    /// All `d × d` Hermitian matrices.
    pub fn full(dim: usize) -> Self {
        let mut basis = Vec::with_capacity(dim * dim);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for r in 0..dim {
            basis.push(ComplexMatrix::from_fn(dim, |i, j| {
                if i == r && j == r {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }));
            for c in r + 1..dim {
                basis.push(ComplexMatrix::from_fn(dim, |i, j| match (i, j) {
                    (i, j) if (i, j) == (r, c) || (i, j) == (c, r) => C64::new(s, 0.0),
                    _ => C64::new(0.0, 0.0),
                }));
                basis.push(ComplexMatrix::from_fn(dim, |i, j| match (i, j) {
                    (i, j) if (i, j) == (r, c) => C64::new(0.0, -s),
                    (i, j) if (i, j) == (c, r) => C64::new(0.0, s),
                    _ => C64::new(0.0, 0.0),
                }));
            }
        }
        Self {
            dim,
            basis,
            tol: DEFAULT_TOL,
        }
    }

    /// Real diagonal matrices.
    pub fn diagonal(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|k| {
                let mut d = vec![0.0; dim];
                d[k] = 1.0;
                ComplexMatrix::from_real_diag(&d)
            })
            .collect();
        Self {
            dim,
            basis,
            tol: DEFAULT_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Real dimension of the algebra.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Orthogonal projection onto the span in the trace inner product.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for b in &self.basis {
            out = &out + &b.scale_real(b.real_inner(m));
        }
        out
    }

    /// Frobenius distance from `m` to the algebra.
    pub fn distance(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.project(m)).frobenius_norm()
    }

    /// Membership up to `tol`, relative to the size of `m` once it exceeds 1.
    pub fn contains(&self, m: &ComplexMatrix) -> bool {
        m.dim() == self.dim && self.distance(m) <= self.tol * m.frobenius_norm().max(1.0)
    }

    /// Mutual containment of spans.
    pub fn same_span(&self, other: &Self) -> bool {
        self.rank() == other.rank()
            && self.basis.iter().all(|b| other.contains(b))
            && other.basis.iter().all(|b| self.contains(b))
    }

    pub fn classify(&self, m: &HermitianMatrix) -> Result<ConeClassification> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        if !self.contains(m.matrix()) {
            return Ok(ConeClassification::OutsideAlgebra);
        }
        let lmin = lambda_min(m.matrix())?;
        Ok(if lmin > self.tol {
            ConeClassification::Interior
        } else if lmin >= -self.tol {
            ConeClassification::Boundary
        } else {
            ConeClassification::OutsideCone
        })
    }

    /// Membership in the closed cone `Q`.
    pub fn in_cone(&self, m: &HermitianMatrix) -> Result<bool> {
        Ok(matches!(
            self.classify(m)?,
            ConeClassification::Interior | ConeClassification::Boundary
        ))
    }
}

/// Compares `a` against `b` in the Loewner order.
pub fn order_compare(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<Order> {
    a.matrix().check_same_dim(b.matrix())?;
    let lmin = lambda_min(&(b.matrix() - a.matrix()))?;
    Ok(if lmin > tol {
        Order::Lt
    } else if lmin >= -tol {
        Order::Leq
    } else {
        Order::IncomparableOrGt
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_real_rows(rows), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn generated_dimensions() {
        assert_eq!(JordanAlgebra::generate(2, &[], DEFAULT_TOL).unwrap().rank(), 1);
        let diag = JordanAlgebra::generate(2, &[HermitianMatrix::from_real_diag(&[1.0, 0.0])], DEFAULT_TOL).unwrap();
        assert_eq!(diag.rank(), 2);
        let all: Vec<HermitianMatrix> = JordanAlgebra::full(2)
            .basis()
            .iter()
            .map(|b| HermitianMatrix::from_hermitian_part(b, DEFAULT_TOL))
            .collect();
        assert_eq!(JordanAlgebra::generate(2, &all, DEFAULT_TOL).unwrap().rank(), 4);
    }

    #[test]
    fn off_diagonal_generator_gives_spin_factor_closure() {
        // σ_x ∘ σ_x = 1, so {1, σ_x} is already closed.
        let v = JordanAlgebra::generate(2, &[h(&[&[0.0, 1.0], &[1.0, 0.0]])], DEFAULT_TOL).unwrap();
        assert_eq!(v.rank(), 2);
    }

    #[test]
    fn classify_examples() {
        let diag = JordanAlgebra::generate(2, &[HermitianMatrix::from_real_diag(&[1.0, 0.0])], DEFAULT_TOL).unwrap();
        assert_eq!(diag.classify(&HermitianMatrix::identity(2)).unwrap(), ConeClassification::Interior);
        assert_eq!(
            diag.classify(&HermitianMatrix::from_real_diag(&[1.0, 0.0])).unwrap(),
            ConeClassification::Boundary
        );
        assert_eq!(
            diag.classify(&h(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap(),
            ConeClassification::OutsideAlgebra
        );
        assert_eq!(
            diag.classify(&HermitianMatrix::from_real_diag(&[1.0, -1.0])).unwrap(),
            ConeClassification::OutsideCone
        );
    }

    #[test]
    fn order_examples() {
        let tol = DEFAULT_TOL;
        assert_eq!(order_compare(&HermitianMatrix::zeros(2), &HermitianMatrix::identity(2), tol).unwrap(), Order::Lt);
        let a = h(&[&[2.0, 1.0], &[1.0, 0.5]]);
        assert_eq!(order_compare(&a, &a, tol).unwrap(), Order::Leq);
        assert_eq!(
            order_compare(
                &HermitianMatrix::from_real_diag(&[1.0, 0.0]),
                &HermitianMatrix::from_real_diag(&[0.0, 1.0]),
                tol
            )
            .unwrap(),
            Order::IncomparableOrGt
        );
    }

    #[test]
    fn full_basis_is_orthonormal() {
        let v = JordanAlgebra::full(3);
        for (i, a) in v.basis().iter().enumerate() {
            for (j, b) in v.basis().iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.real_inner(b) - expected).abs() < 1e-14);
            }
        }
    }
}
