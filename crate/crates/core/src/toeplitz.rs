//! Truncated Wiener-Hopf operators on `ℓ²({0..N}) ⊗ M_k` for the semigroup
//! `ℕ ⊂ ℤ` acting on `M_k` by *-endomorphisms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::spectra::{operator_norm, smallest_singular_value, ComplexMatrix, UnitaryMatrix, C64};

fn vectorise(x: &ComplexMatrix) -> Vec<C64> {
    x.as_slice().to_vec()
}

fn apply_super(s: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let v = vectorise(x);
    let n = v.len();
    let out: Vec<C64> = (0..n).map(|r| (0..n).map(|c| s[(r, c)] * v[c]).sum()).collect();
    ComplexMatrix::new(x.dim(), out).expect("superoperator preserves shape")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActionFlags {
    pub injective: bool,
    pub surjective: bool,
    pub unital: bool,
}

/// Action of `ℕ` on `M_k` generated by one *-endomorphism `α₁`, stored as a
/// `k² × k²` matrix acting on row-major vectorised matrices.
#[derive(Clone, Debug)]
pub struct EndomorphismAction {
    k: usize,
    generator: ComplexMatrix,
    inverse: Option<ComplexMatrix>,
    flags: ActionFlags,
}

impl EndomorphismAction {
    /// Validates that the generator is a *-homomorphism on the matrix units.
    pub fn new(k: usize, generator: ComplexMatrix, tol: f64) -> Result<Self> {
        if generator.dim() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: generator.dim(),
            });
        }
        let unit = |i: usize, j: usize| {
            let mut m = ComplexMatrix::zeros(k);
            m[(i, j)] = C64::new(1.0, 0.0);
            m
        };
        let images: Vec<Vec<ComplexMatrix>> = (0..k)
            .map(|i| (0..k).map(|j| apply_super(&generator, &unit(i, j))).collect())
            .collect();
        for i in 0..k {
            for j in 0..k {
                if (&images[i][j].adjoint() - &images[j][i]).max_abs() > tol {
                    return Err(Error::InvalidInput("generator does not preserve adjoints".into()));
                }
                for l in 0..k {
                    for m in 0..k {
                        let lhs = &images[i][j] * &images[l][m];
                        let diff = if j == l {
                            (&lhs - &images[i][m]).max_abs()
                        } else {
                            lhs.max_abs()
                        };
                        if diff > tol {
                            return Err(Error::InvalidInput("generator is not multiplicative".into()));
                        }
                    }
                }
            }
        }
        let injective = smallest_singular_value(&generator)? > tol;
        let inverse = if injective { Some(generator.inverse()?) } else { None };
        let one = apply_super(&generator, &ComplexMatrix::identity(k));
        let flags = ActionFlags {
            injective,
            surjective: injective,
            unital: (&one - &ComplexMatrix::identity(k)).max_abs() <= tol,
        };
        Ok(Self {
            k,
            generator,
            inverse,
            flags,
        })
    }

    pub fn trivial(k: usize) -> Self {
        Self {
            k,
            generator: ComplexMatrix::identity(k * k),
            inverse: Some(ComplexMatrix::identity(k * k)),
            flags: ActionFlags {
                injective: true,
                surjective: true,
                unital: true,
            },
        }
    }

    /// `α₁(x) = u* x u`, so that `α_a(x) = u⁻ᵃ x uᵃ`.
    pub fn conjugation(u: &UnitaryMatrix) -> Self {
        let k = u.dim();
        let a = u.matrix().adjoint();
        let b = u.matrix();
        // vec(A X B) = (A ⊗ Bᵀ) vec(X) for row-major vec.
        let generator = ComplexMatrix::from_fn(k * k, |r, c| a[(r / k, c / k)] * b[(c % k, r % k)]);
        let inverse = ComplexMatrix::from_fn(k * k, |r, c| b[(r / k, c / k)] * a[(c % k, r % k)]);
        Self {
            k,
            generator,
            inverse: Some(inverse),
            flags: ActionFlags {
                injective: true,
                surjective: true,
                unital: true,
            },
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn flags(&self) -> ActionFlags {
        self.flags
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    /// `α_a(x)` by `a`-fold application of the generator.
    pub fn apply(&self, a: u64, x: &ComplexMatrix) -> ComplexMatrix {
        (0..a).fold(x.clone(), |acc, _| apply_super(&self.generator, &acc))
    }

    /// `α_g(x)` for `g ∈ ℤ`; negative `g` needs an invertible generator.
    pub fn apply_group(&self, g: i64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if g >= 0 {
            return Ok(self.apply(g as u64, x));
        }
        let inv = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::Domain("α is not invertible; negative powers undefined".into()))?;
        Ok((0..g.unsigned_abs()).fold(x.clone(), |acc, _| apply_super(inv, &acc)))
    }

    /// `[x, α₁(x), …, α_n(x)]`.
    pub fn orbit(&self, x: &ComplexMatrix, n: usize) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        for m in 1..=n {
            let next = apply_super(&self.generator, &out[m - 1]);
            out.push(next);
        }
        out
    }
}

/// Operator on `ℓ²({0..N}) ⊗ ℂᵏ`, stored as one dense matrix of
/// `(N+1) × (N+1)` blocks of size `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    n: usize,
    k: usize,
    data: ComplexMatrix,
}

impl TruncatedOperator {
    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            data: ComplexMatrix::zeros((n + 1) * k),
        }
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            data: ComplexMatrix::identity((n + 1) * k),
        }
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn block(&self, row: usize, col: usize) -> ComplexMatrix {
        self.data.get_block(row, col, self.k)
    }

    pub fn set_block(&mut self, row: usize, col: usize, block: &ComplexMatrix) {
        self.data.set_block(row, col, block);
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::DimensionMismatch {
                expected: (self.n + 1) * self.k,
                found: (other.n + 1) * other.k,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            k: self.k,
            data: self.data.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            n: self.n,
            k: self.k,
            data: &self.data * &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            n: self.n,
            k: self.k,
            data: &self.data - &other.data,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.max_abs()
    }

    pub fn operator_norm(&self) -> Result<f64> {
        operator_norm(&self.data)
    }

    /// Top-left corner on positions `{0..m}`.
    pub fn compress(&self, m: usize) -> Result<Self> {
        if m > self.n {
            return Err(Error::Range(format!("cannot compress level {} to {m}", self.n)));
        }
        let mut out = Self::zeros(m, self.k);
        for r in 0..=m {
            for c in 0..=m {
                out.set_block(r, c, &self.block(r, c));
            }
        }
        Ok(out)
    }

    /// Largest entry of `self − other` over block rows `rows`.
    pub fn row_difference(&self, other: &Self, rows: std::ops::RangeInclusive<usize>) -> Result<f64> {
        self.check_shape(other)?;
        let k = self.k;
        let dim = self.data.dim();
        let mut worst = 0.0_f64;
        for br in rows {
            if br > self.n {
                break;
            }
            for r in br * k..(br + 1) * k {
                for c in 0..dim {
                    worst = worst.max((self.data[(r, c)] - other.data[(r, c)]).norm());
                }
            }
        }
        Ok(worst)
    }
}

/// Finitely supported `M_k`-valued function on `ℤ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolFunction {
    k: usize,
    values: BTreeMap<i64, ComplexMatrix>,
}

impl SymbolFunction {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            values: BTreeMap::new(),
        }
    }

    pub fn delta(g: i64, x: ComplexMatrix) -> Self {
        let mut f = Self::new(x.dim());
        f.values.insert(g, x);
        f
    }

    pub fn from_map(k: usize, values: BTreeMap<i64, ComplexMatrix>) -> Result<Self> {
        for x in values.values() {
            if x.dim() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: x.dim(),
                });
            }
        }
        Ok(Self { k, values })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn insert(&mut self, g: i64, x: ComplexMatrix) -> Result<()> {
        if x.dim() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: x.dim(),
            });
        }
        self.values.insert(g, x);
        Ok(())
    }

    pub fn get(&self, g: i64) -> Option<&ComplexMatrix> {
        self.values.get(&g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ComplexMatrix)> {
        self.values.iter().map(|(&g, x)| (g, x))
    }

    pub fn support(&self) -> Vec<i64> {
        self.values.keys().copied().collect()
    }

    /// `max |g|` over the support, 0 when empty.
    pub fn radius(&self) -> u64 {
        self.values.keys().map(|g| g.unsigned_abs()).max().unwrap_or(0)
    }

    /// `g ↦ f(−g)`.
    pub fn reflect(&self) -> Self {
        Self {
            k: self.k,
            values: self.values.iter().map(|(&g, x)| (-g, x.clone())).collect(),
        }
    }

    pub fn max_difference(&self, other: &Self) -> f64 {
        let zero = ComplexMatrix::zeros(self.k);
        self.values
            .keys()
            .chain(other.values.keys())
            .map(|g| {
                let a = self.values.get(g).unwrap_or(&zero);
                let b = other.values.get(g).unwrap_or(&zero);
                (a - b).max_abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Block-diagonal `π(x)` with block `α_a(x)` at position `a`.
pub fn rep_pi(x: &ComplexMatrix, act: &EndomorphismAction, n: usize) -> Result<TruncatedOperator> {
    if x.dim() != act.k() {
        return Err(Error::DimensionMismatch {
            expected: act.k(),
            found: x.dim(),
        });
    }
    let mut out = TruncatedOperator::zeros(n, act.k());
    for (a, block) in act.orbit(x, n).iter().enumerate() {
        out.set_block(a, a, block);
    }
    Ok(out)
}

/// Block shift `(V_a ξ)(m) = ξ(m − a)`.
pub fn isometry_v(a: usize, n: usize, k: usize) -> Result<TruncatedOperator> {
    if a > n {
        return Err(Error::Range(format!("shift {a} exceeds truncation level {n}")));
    }
    let mut out = TruncatedOperator::zeros(n, k);
    let id = ComplexMatrix::identity(k);
    for m in a..=n {
        out.set_block(m, m - a, &id);
    }
    Ok(out)
}

/// `W_f = Σ_g π(f(g)) W_g`: block `(m, m − g)` equals `α_m(f(g))`.
pub fn wiener_hopf(f: &SymbolFunction, act: &EndomorphismAction, n: usize) -> Result<TruncatedOperator> {
    if f.k() != act.k() {
        return Err(Error::DimensionMismatch {
            expected: act.k(),
            found: f.k(),
        });
    }
    if f.radius() > n as u64 {
        return Err(Error::Range(format!("symbol support radius {} exceeds N = {n}", f.radius())));
    }
    let mut out = TruncatedOperator::zeros(n, act.k());
    for (g, x) in f.iter() {
        for (m, block) in act.orbit(x, n).iter().enumerate() {
            let col = m as i64 - g;
            if (0..=n as i64).contains(&col) {
                out.set_block(m, col as usize, block);
            }
        }
    }
    Ok(out)
}

/// Evaluates a product of operators built at level `n + margin` and
/// compresses the result to level `n`, so that factors which move mass
/// across the top edge of the window see the positions they need.
pub fn compress_product(
    n: usize,
    margin: usize,
    build: impl FnOnce(usize) -> Result<TruncatedOperator>,
) -> Result<TruncatedOperator> {
    build(n + margin)?.compress(n)
}

/// `‖V_a* π(x) V_a − π(α_a(x))‖`, evaluated with a margin of `a` positions.
pub fn covariance_residual(x: &ComplexMatrix, a: usize, act: &EndomorphismAction, n: usize) -> Result<f64> {
    let lhs = compress_product(n, a, |big| {
        let v = isometry_v(a, big, act.k())?;
        v.adjoint().mul(&rep_pi(x, act, big)?)?.mul(&v)
    })?;
    let rhs = rep_pi(&act.apply(a as u64, x), act, n)?;
    Ok(lhs.sub(&rhs)?.max_abs())
}

/// Twisted convolution `(f * h)(g) = Σ_t f(t) α_{−t}(h(g − t))`, the symbol
/// of `W_f W_h` away from the edges.
pub fn convolve_symbols(f: &SymbolFunction, h: &SymbolFunction, act: &EndomorphismAction) -> Result<SymbolFunction> {
    let mut out: BTreeMap<i64, ComplexMatrix> = BTreeMap::new();
    for (t, ft) in f.iter() {
        for (s, hs) in h.iter() {
            let term = ft * &act.apply_group(-t, hs)?;
            let slot = out.entry(t + s).or_insert_with(|| ComplexMatrix::zeros(f.k()));
            *slot = &*slot + &term;
        }
    }
    SymbolFunction::from_map(f.k(), out)
}

/// `f°(g) = α_{−g}(f(−g)*)`, the symbol of `W_f*`.
pub fn adjoint_symbol(f: &SymbolFunction, act: &EndomorphismAction) -> Result<SymbolFunction> {
    let mut out = SymbolFunction::new(f.k());
    for (g, x) in f.iter() {
        out.insert(-g, act.apply_group(g, &x.adjoint())?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pi_examples() {
        let act = EndomorphismAction::trivial(2);
        let p = rep_pi(&ComplexMatrix::identity(2), &act, 4).unwrap();
        assert_eq!(p, TruncatedOperator::identity(4, 2));
        let p = rep_pi(&ComplexMatrix::scalar(c(3.0)), &EndomorphismAction::trivial(1), 5).unwrap();
        assert!((p.matrix() - &ComplexMatrix::identity(6).scale(c(3.0))).max_abs() == 0.0);
    }

    #[test]
    fn pi_under_conjugation_matches_direct_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = sampling::unitary(&mut rng, 2);
        let act = EndomorphismAction::conjugation(&u);
        let x = sampling::gaussian_matrix(&mut rng, 2);
        let p = rep_pi(&x, &act, 6).unwrap();
        let mut ua = ComplexMatrix::identity(2);
        for a in 0..=6 {
            let direct = &(&ua.adjoint() * &x) * &ua;
            assert!((&p.block(a, a) - &direct).max_abs() < 1e-12);
            ua = &ua * u.matrix();
        }
    }

    #[test]
    fn conjugation_generator_is_a_star_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = sampling::unitary(&mut rng, 3);
        let act = EndomorphismAction::conjugation(&u);
        let checked = EndomorphismAction::new(3, act.generator().clone(), 1e-10).unwrap();
        assert!(checked.flags().injective && checked.flags().unital);
        let bad = ComplexMatrix::identity(9).scale(c(2.0));
        assert!(EndomorphismAction::new(3, bad, 1e-10).is_err());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(isometry_v(0, 5, 1).unwrap(), TruncatedOperator::identity(5, 1));
        let n = 6;
        let vv = compress_product(n, 1, |big| {
            let v = isometry_v(1, big, 1)?;
            v.adjoint().mul(&v)
        })
        .unwrap();
        assert_eq!(vv, TruncatedOperator::identity(n, 1));
        let v = isometry_v(1, n, 1).unwrap();
        let vvs = v.mul(&v.adjoint()).unwrap();
        let mut expected = TruncatedOperator::identity(n, 1);
        expected.set_block(0, 0, &ComplexMatrix::zeros(1));
        assert_eq!(vvs, expected);
        assert!(matches!(isometry_v(7, 6, 1), Err(Error::Range(_))));
    }

    #[test]
    fn wiener_hopf_examples() {
        let act = EndomorphismAction::trivial(1);
        let n = 5;
        let id = wiener_hopf(&SymbolFunction::delta(0, ComplexMatrix::identity(1)), &act, n).unwrap();
        assert_eq!(id, TruncatedOperator::identity(n, 1));
        let shift = wiener_hopf(&SymbolFunction::delta(1, ComplexMatrix::identity(1)), &act, n).unwrap();
        assert_eq!(shift, isometry_v(1, n, 1).unwrap());
        let mut f = SymbolFunction::new(1);
        f.insert(-1, ComplexMatrix::scalar(c(2.0))).unwrap();
        f.insert(1, ComplexMatrix::scalar(c(5.0))).unwrap();
        let w = wiener_hopf(&f, &act, n).unwrap();
        for r in 0..=n {
            for col in 0..=n {
                let expected = match r as i64 - col as i64 {
                    1 => 5.0,
                    -1 => 2.0,
                    _ => 0.0,
                };
                assert_eq!(w.matrix()[(r, col)], c(expected));
            }
        }
        let wide = SymbolFunction::delta(9, ComplexMatrix::identity(1));
        assert!(matches!(wiener_hopf(&wide, &act, n), Err(Error::Range(_))));
    }

    #[test]
    fn covariance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = sampling::gaussian_matrix(&mut rng, 1);
        assert_eq!(covariance_residual(&x, 0, &EndomorphismAction::trivial(1), 8).unwrap(), 0.0);
        assert!(covariance_residual(&x, 3, &EndomorphismAction::trivial(1), 8).unwrap() < 1e-15);
        let u = sampling::unitary(&mut rng, 2);
        let act = EndomorphismAction::conjugation(&u);
        for a in 0..=5 {
            let x = sampling::gaussian_matrix(&mut rng, 2);
            assert!(covariance_residual(&x, a, &act, 16).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn adjoint_symbol_matches_blockwise_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = sampling::unitary(&mut rng, 2);
        let act = EndomorphismAction::conjugation(&u);
        let mut f = SymbolFunction::new(2);
        for g in [-2, 0, 1, 3] {
            f.insert(g, sampling::gaussian_matrix(&mut rng, 2)).unwrap();
        }
        let n = 10;
        let lhs = wiener_hopf(&f, &act, n).unwrap().adjoint();
        let rhs = wiener_hopf(&adjoint_symbol(&f, &act).unwrap(), &act, n).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
    }
}
