//! Cyclic Jacobi eigensolver for Hermitian matrices and the spectral
//! decompositions built on it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues closer than this are merged into one spectral projection.
pub const CLUSTER_THRESHOLD: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// Seed used by [`unitary_eig`] when the caller does not supply one.
pub const DEFAULT_PHASE_SEED: u64 = 0x5eed_cafe;

const MAX_PHASE_DRAWS: usize = 32;

/// Raw Jacobi output: unsorted eigenvalues and (optionally) the unitary whose
/// columns are the eigenvectors.
struct JacobiOutput {
    values: Vec<f64>,
    vectors: Option<ComplexMatrix>,
}

/// Diagonalises the Hermitian part of `m` by cyclic complex Jacobi rotations.
fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<JacobiOutput> {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let frob = a.frobenius_norm();
    if n == 1 || frob == 0.0 {
        return Ok(JacobiOutput {
            values: (0..n).map(|k| a[(k, k)].re).collect(),
            vectors: v,
        });
    }
    let off_norm = |a: &ComplexMatrix| {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let target = 1e-15 * frob;
    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase that makes the (p, q) entry real, then a real rotation.
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] acting on (p, q).
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                }
                // A <- G* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * gpp + vkq * gqp;
                        v[(k, q)] = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
    }
    Ok(JacobiOutput {
        values: (0..n).map(|k| a[(k, k)].re).collect(),
        vectors: v,
    })
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut values = jacobi(m, false)?.values;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn lambda_min(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Operator norm, `sqrt(λ_max(M* M))`.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = &m.adjoint() * m;
    let values = hermitian_eigenvalues(&gram)?;
    Ok(values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Smallest singular value, read off the Hermitian dilation
/// `[[0, M], [M*, 0]]` whose spectrum is `±σ_k`. This keeps absolute accuracy
/// near zero, unlike the square root of `λ_min(M* M)`.
pub fn smallest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let n = m.dim();
    let mut dilation = ComplexMatrix::zeros(2 * n);
    let adj = m.adjoint();
    for r in 0..n {
        for c in 0..n {
            dilation[(r, n + c)] = m[(r, c)];
            dilation[(n + r, c)] = adj[(r, c)];
        }
    }
    let values = hermitian_eigenvalues(&dilation)?;
    // The n largest values are the singular values.
    Ok(values[n].max(0.0))
}

/// A matrix known to be Hermitian up to `tol` in operator norm. The stored
/// matrix is the exact Hermitian part of the input.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
    tol: f64,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let skew = &m - &m.adjoint();
        if skew.frobenius_norm() > tol {
            let dev = operator_norm(&skew)?;
            if dev > tol {
                return Err(Error::InvalidInput(format!(
                    "matrix is not Hermitian: ‖M − M*‖ = {dev:e} > {tol:e}"
                )));
            }
        }
        Ok(Self {
            m: m.hermitian_part(),
            tol,
        })
    }

    /// Takes the Hermitian part of `m` without checking how far `m` was from it.
    pub fn from_hermitian_part(m: &ComplexMatrix, tol: f64) -> Self {
        Self {
            m: m.hermitian_part(),
            tol,
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            m: ComplexMatrix::from_real_diag(diag),
            tol: DEFAULT_TOL,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim),
            tol: DEFAULT_TOL,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(dim),
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: &self.m + &other.m,
            tol: self.tol.max(other.tol),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            m: &self.m - &other.m,
            tol: self.tol.max(other.tol),
        }
    }

    pub fn scale(&self, x: f64) -> Self {
        Self {
            m: self.m.scale_real(x),
            tol: self.tol,
        }
    }

    /// `self + x I`.
    pub fn shift(&self, x: f64) -> Self {
        Self {
            m: self.m.shift(C64::new(x, 0.0)),
            tol: self.tol,
        }
    }

    /// `C M C*`, Hermitian whenever `M` is.
    pub fn congruence(&self, c: &ComplexMatrix) -> Self {
        Self::from_hermitian_part(&(&(c * &self.m) * &c.adjoint()), self.tol)
    }

    pub fn lambda_min(&self) -> Result<f64> {
        lambda_min(&self.m)
    }
}

/// A matrix known to be unitary up to `tol`: `‖U*U − I‖ ≤ tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    m: ComplexMatrix,
    tol: f64,
}

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = unitarity_defect(&m)?;
        if defect > tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not unitary: ‖U*U − I‖ = {defect:e} > {tol:e}"
            )));
        }
        Ok(Self { m, tol })
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix, tol: f64) -> Self {
        Self { m, tol }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim),
            tol: DEFAULT_TOL,
        }
    }

    pub fn scalar_multiple_of_identity(dim: usize, z: C64) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim).scale(z), DEFAULT_TOL)
    }

    pub fn from_diag(diag: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(diag), DEFAULT_TOL)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// `‖U*U − I‖` in operator norm.
pub fn unitarity_defect(m: &ComplexMatrix) -> Result<f64> {
    let gram = (&m.adjoint() * m).shift(C64::new(-1.0, 0.0));
    let values = hermitian_eigenvalues(&gram)?;
    Ok(values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

/// Distinct eigenvalues with their orthogonal spectral projections.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<C64>,
    projections: Vec<ComplexMatrix>,
    tol: f64,
}

impl SpectralDecomposition {
    /// Builds a decomposition from explicit parts and validates the
    /// resolution-of-identity and orthogonality invariants.
    pub fn from_parts(eigenvalues: Vec<C64>, projections: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != projections.len() {
            return Err(Error::InvalidInput(
                "eigenvalue and projection lists must be non-empty and of equal length".into(),
            ));
        }
        let dec = Self {
            eigenvalues,
            projections,
            tol,
        };
        dec.check_projections(tol)?;
        Ok(dec)
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn projections(&self) -> &[ComplexMatrix] {
        &self.projections
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.projections[0].dim()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (C64, &ComplexMatrix)> {
        self.eigenvalues.iter().copied().zip(self.projections.iter())
    }

    /// `Σ λ_k E_k`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (lambda, e) in self.iter() {
            out = &out + &e.scale(lambda);
        }
        out
    }

    /// Rank of each projection, read off its trace.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.projections
            .iter()
            .map(|e| e.trace().re.round() as usize)
            .collect()
    }

    /// Checks `Σ E_k = I`, `E_j E_k = δ_jk E_k` and `E_k* = E_k` to `tol`
    /// in max-entry norm.
    pub fn check_projections(&self, tol: f64) -> Result<()> {
        let dim = self.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (j, ej) in self.projections.iter().enumerate() {
            if ej.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: ej.dim(),
                });
            }
            total = &total + ej;
            if (ej - &ej.adjoint()).max_abs() > tol {
                return Err(Error::Invariant(format!("projection {j} is not self-adjoint")));
            }
            for (k, ek) in self.projections.iter().enumerate() {
                let prod = ej * ek;
                let expected = if j == k { ej.clone() } else { ComplexMatrix::zeros(dim) };
                if (&prod - &expected).max_abs() > tol {
                    return Err(Error::Invariant(format!(
                        "projections {j} and {k} violate E_j E_k = δ_jk E_k"
                    )));
                }
            }
        }
        if (&total - &ComplexMatrix::identity(dim)).max_abs() > tol {
            return Err(Error::Invariant("projections do not sum to the identity".into()));
        }
        Ok(())
    }
}

/// Groups indices whose values lie within `threshold` of each other
/// (transitively). Returns groups in first-appearance order.
fn cluster_indices(values: &[C64], threshold: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(i),
            None => groups.push((root, vec![i])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Merges eigenpairs into spectral projections. `normalise` maps the mean of
/// a cluster back onto the admissible set (real line or unit circle).
fn assemble(
    values: &[C64],
    vectors: &ComplexMatrix,
    threshold: f64,
    tol: f64,
    normalise: impl Fn(C64) -> C64,
) -> SpectralDecomposition {
    let dim = vectors.dim();
    let mut parts: Vec<(C64, ComplexMatrix)> = cluster_indices(values, threshold)
        .into_iter()
        .map(|group| {
            let mean = group.iter().map(|&i| values[i]).sum::<C64>() / group.len() as f64;
            let mut proj = ComplexMatrix::zeros(dim);
            for &i in &group {
                proj = &proj + &ComplexMatrix::outer(&vectors.column(i));
            }
            (normalise(mean), proj)
        })
        .collect();
    parts.sort_by(|a, b| sort_key(a.0).total_cmp(&sort_key(b.0)));
    let (eigenvalues, projections) = parts.into_iter().unzip();
    SpectralDecomposition {
        eigenvalues,
        projections,
        tol,
    }
}

/// Ascending order on the real line; for unit-modulus values this is the
/// argument in (−π, π] whenever the imaginary parts are not all zero.
fn sort_key(z: C64) -> f64 {
    if z.im == 0.0 {
        z.re
    } else {
        z.arg()
    }
}

/// Hermitian eigendecomposition with eigenvalues ascending and clusters
/// closer than [`CLUSTER_THRESHOLD`] merged.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    hermitian_eig_with_threshold(a, CLUSTER_THRESHOLD)
}

pub fn hermitian_eig_with_threshold(a: &HermitianMatrix, threshold: f64) -> Result<SpectralDecomposition> {
    let out = jacobi(a.matrix(), true)?;
    let vectors = out.vectors.expect("vectors requested");
    let values: Vec<C64> = out.values.iter().map(|&x| C64::new(x, 0.0)).collect();
    let dec = assemble(&values, &vectors, threshold, a.tol(), |z| C64::new(z.re, 0.0));
    // Sort key for real values must be the value itself.
    Ok(sort_real(dec))
}

fn sort_real(mut dec: SpectralDecomposition) -> SpectralDecomposition {
    let mut parts: Vec<(C64, ComplexMatrix)> = dec.eigenvalues.drain(..).zip(dec.projections.drain(..)).collect();
    parts.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let (eigenvalues, projections) = parts.into_iter().unzip();
    SpectralDecomposition {
        eigenvalues,
        projections,
        tol: dec.tol,
    }
}

/// Spectral decomposition of a unitary matrix using the default phase seed.
pub fn unitary_eig(u: &UnitaryMatrix) -> Result<SpectralDecomposition> {
    unitary_eig_seeded(u, DEFAULT_PHASE_SEED)
}

/// Spectral decomposition of a unitary matrix.
///
/// A phase `θ` is drawn until `e^{iθ}U` keeps its spectrum well away from 1;
/// the rotated matrix is then pulled back to a Hermitian matrix by the inverse
/// Cayley transform, diagonalised by Jacobi, and the eigenvalues are pushed
/// forward again. Only normal matrices are needed, so no Schur form is used.
pub fn unitary_eig_seeded(u: &UnitaryMatrix, seed: u64) -> Result<SpectralDecomposition> {
    let dim = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Any d points on the circle leave an arc of length 2π/d free, so a
    // margin of π/(4d) is met with probability at least 3/4 per draw.
    let min_margin = CLUSTER_THRESHOLD.max(PI / (4.0 * dim as f64));
    for _ in 0..MAX_PHASE_DRAWS {
        let theta: f64 = rng.random::<f64>() * 2.0 * PI;
        let phase = C64::from_polar(1.0, theta);
        let w = u.matrix().scale(phase);
        let w_minus_one = w.shift(C64::new(-1.0, 0.0));
        if smallest_singular_value(&w_minus_one)? < min_margin {
            continue;
        }
        // A = i (W + 1)(W − 1)⁻¹
        let numerator = w.shift(C64::new(1.0, 0.0)).scale(super::matrix::I);
        let a = w_minus_one.right_divide(&numerator)?;
        let a = HermitianMatrix::from_hermitian_part(&a, u.tol());
        let out = jacobi(a.matrix(), true)?;
        let vectors = out.vectors.expect("vectors requested");
        let values: Vec<C64> = out
            .values
            .iter()
            .map(|&x| {
                let mu = (C64::new(x, 1.0)) / (C64::new(x, -1.0));
                mu / phase
            })
            .collect();
        return Ok(assemble(&values, &vectors, CLUSTER_THRESHOLD, u.tol(), |z| z / z.norm()));
    }
    Err(Error::Numerical(format!(
        "no spectrum-avoiding phase found in {MAX_PHASE_DRAWS} draws"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_single_projection() {
        let dec = hermitian_eig(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.eigenvalues()[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((&dec.projections()[0] - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn diagonal_gives_coordinate_projections() {
        let dec = hermitian_eig(&HermitianMatrix::from_real_diag(&[0.0, 1.0])).unwrap();
        assert_eq!(dec.len(), 2);
        assert!((&dec.projections()[0] - &ComplexMatrix::from_real_diag(&[1.0, 0.0])).max_abs() < 1e-14);
        assert!((&dec.projections()[1] - &ComplexMatrix::from_real_diag(&[0.0, 1.0])).max_abs() < 1e-14);
    }

    #[test]
    fn all_ones_two_by_two() {
        // Characteristic polynomial λ² − 2λ = 0 gives λ ∈ {0, 2} with
        // eigenvectors (1, −1)/√2 and (1, 1)/√2.
        let a = HermitianMatrix::new(ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]), DEFAULT_TOL).unwrap();
        let dec = hermitian_eig(&a).unwrap();
        assert!((dec.eigenvalues()[0] - c(0.0, 0.0)).norm() < 1e-14);
        assert!((dec.eigenvalues()[1] - c(2.0, 0.0)).norm() < 1e-14);
        let minus = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((&dec.projections()[0] - &minus).max_abs() < 1e-14);
        assert!((&dec.projections()[1] - &plus).max_abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(HermitianMatrix::new(m, DEFAULT_TOL), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn near_degenerate_values_merge() {
        let a = HermitianMatrix::from_real_diag(&[1.0, 1.0 + 1e-12, 3.0]);
        let dec = hermitian_eig(&a).unwrap();
        assert_eq!(dec.multiplicities(), vec![2, 1]);
    }

    #[test]
    fn unitary_diagonal() {
        let u = UnitaryMatrix::from_diag(&[c(-1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let dec = unitary_eig(&u).unwrap();
        assert_eq!(dec.len(), 2);
        for (lambda, e) in dec.iter() {
            assert!((lambda.norm() - 1.0).abs() < 1e-12);
            let expected = if (lambda - c(-1.0, 0.0)).norm() < 1e-9 {
                ComplexMatrix::from_real_diag(&[1.0, 0.0])
            } else {
                assert!((lambda - c(0.0, 1.0)).norm() < 1e-9);
                ComplexMatrix::from_real_diag(&[0.0, 1.0])
            };
            assert!((e - &expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_identity() {
        let dec = unitary_eig(&UnitaryMatrix::identity(3)).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.eigenvalues()[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = ComplexMatrix::from_diag(&[c(3.0, 4.0), c(0.0, -0.5)]);
        assert!((smallest_singular_value(&m).unwrap() - 0.5).abs() < 1e-14);
        assert!((operator_norm(&m).unwrap() - 5.0).abs() < 1e-13);
    }

    #[test]
    fn from_parts_rejects_incomplete_resolution() {
        let e = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert!(SpectralDecomposition::from_parts(vec![c(1.0, 0.0)], vec![e], 1e-10).is_err());
    }
}
