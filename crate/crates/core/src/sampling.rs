//! Random test matrices. Every generator draws from an explicit RNG so that
//! suites are reproducible from a single seed.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::spectra::{hermitian_eig, ComplexMatrix, HermitianMatrix, UnitaryMatrix, C64, DEFAULT_TOL};

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with unit-variance complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian_complex(rng))
}

/// GUE-like Hermitian matrix scaled so its spectrum is O(1).
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, dim).scale_real(1.0 / (dim as f64).sqrt());
    HermitianMatrix::from_hermitian_part(&g, DEFAULT_TOL)
}

/// Positive semidefinite `G G* / d`, typically of full rank.
pub fn positive<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, dim);
    let p = (&g * &g.adjoint()).scale_real(1.0 / dim as f64);
    HermitianMatrix::from_hermitian_part(&p, DEFAULT_TOL)
}

/// Positive definite with smallest eigenvalue at least `floor`.
pub fn positive_definite<R: Rng + ?Sized>(rng: &mut R, dim: usize, floor: f64) -> HermitianMatrix {
    positive(rng, dim).shift(floor)
}

/// Haar-distributed unitary from Gram-Schmidt on a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryMatrix {
    let g = gaussian_matrix(rng, dim);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut v = g.column(c);
        // Two passes keep the columns orthogonal to machine precision.
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let m = ComplexMatrix::from_fn(dim, |r, c| cols[c][r]);
    UnitaryMatrix::new(m, DEFAULT_TOL).expect("Gram-Schmidt output is unitary")
}

/// Orthogonal projection of uniformly random rank in `0..=dim` onto a
/// Haar-random subspace.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let rank = rng.random_range(0..=dim);
    projection_of_rank(rng, dim, rank)
}

pub fn projection_of_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    let u = unitary(rng, dim);
    let mut e = ComplexMatrix::zeros(dim);
    for c in 0..rank {
        e = &e + &ComplexMatrix::outer(&u.matrix().column(c));
    }
    e.hermitian_part()
}

/// Random element of the algebra spanned by the given orthonormal basis.
pub fn combination<R: Rng + ?Sized>(rng: &mut R, basis: &[ComplexMatrix]) -> HermitianMatrix {
    let dim = basis[0].dim();
    let mut out = ComplexMatrix::zeros(dim);
    for b in basis {
        let w: f64 = rng.sample(StandardNormal);
        out = &out + &b.scale_real(w);
    }
    HermitianMatrix::from_hermitian_part(&out, DEFAULT_TOL)
}

/// Spectral projections of a random Hermitian matrix, each kept with
/// probability one half.
pub fn spectral_projection<R: Rng + ?Sized>(rng: &mut R, h: &HermitianMatrix) -> ComplexMatrix {
    let dec = hermitian_eig(h).expect("Jacobi converges on random input");
    let mut e = ComplexMatrix::zeros(h.dim());
    for p in dec.projections() {
        if rng.random::<bool>() {
            e = &e + p;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{lambda_min, unitarity_defect};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..=5 {
            let u = unitary(&mut rng, dim);
            assert!(unitarity_defect(u.matrix()).unwrap() < 1e-13);
            let p = positive(&mut rng, dim);
            assert!(lambda_min(p.matrix()).unwrap() > -1e-13);
            let e = projection(&mut rng, dim);
            assert!((&(&e * &e) - &e).max_abs() < 1e-13);
        }
    }
}
