use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use whlab::fibers::{quotient_norm, quotient_norm_product, random_piecewise_linear, random_trig_poly};
use whlab::groupoid::Unit;
use whlab::jordan::{ConeClassification, JordanAlgebra};
use whlab::moebius::{boxplus, pair_decode, pair_encode, random_pair};
use whlab::sampling;
use whlab::spectra::{cayley, functional_calculus, hermitian_eig, inverse_cayley, unitary_eig, C64};
use whlab::toeplitz::{convolve_symbols, wiener_hopf, EndomorphismAction, SymbolFunction};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_round_trip(seed in any::<u64>(), d in 1usize..=5) {
        let a = sampling::hermitian(&mut rng(seed), d);
        let back = inverse_cayley(&cayley(&a).unwrap()).unwrap();
        prop_assert!((back.matrix() - a.matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn functional_calculus_composes(seed in any::<u64>(), d in 1usize..=4) {
        let u = sampling::unitary(&mut rng(seed), d);
        let dec = unitary_eig(&u).unwrap();
        let square = functional_calculus(&dec, |z| z * z).unwrap();
        prop_assert!((&square - &(u.matrix() * u.matrix())).max_abs() < 1e-9);
        prop_assert!((&dec.reconstruct() - u.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn hermitian_projections_are_orthogonal(seed in any::<u64>(), d in 1usize..=5) {
        let h = sampling::hermitian(&mut rng(seed), d);
        let dec = hermitian_eig(&h).unwrap();
        prop_assert!(dec.check_projections(1e-9).is_ok());
        let total: usize = dec.multiplicities().iter().sum();
        prop_assert_eq!(total, d);
    }

    #[test]
    fn boxplus_is_an_action(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let u = sampling::unitary(&mut r, d);
        let a = sampling::hermitian(&mut r, d).scale(3.0);
        let b = sampling::hermitian(&mut r, d).scale(3.0);
        let lhs = boxplus(&boxplus(&u, &a).unwrap(), &b).unwrap();
        let rhs = boxplus(&u, &a.add(&b)).unwrap();
        prop_assert!((lhs.matrix() - rhs.matrix()).max_abs() < 1e-9);
        let zero = boxplus(&u, &whlab::spectra::HermitianMatrix::zeros(d)).unwrap();
        prop_assert!((zero.matrix() - u.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn pair_encode_inverts_decode(seed in any::<u64>(), d in 1usize..=4) {
        let p = random_pair(&mut rng(seed), d);
        let back = pair_encode(&pair_decode(&p).unwrap()).unwrap();
        prop_assert!(back.distance(&p) < 1e-8);
    }

    #[test]
    fn cone_is_closed_under_squares_and_sums(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let v = JordanAlgebra::generate(d, &[sampling::hermitian(&mut r, d)], 1e-9).unwrap();
        let x = sampling::combination(&mut r, v.basis());
        let y = sampling::combination(&mut r, v.basis());
        let sq = |m: &whlab::spectra::HermitianMatrix| {
            whlab::spectra::HermitianMatrix::from_hermitian_part(&m.matrix().jordan_product(m.matrix()), 1e-9)
        };
        let s = sq(&x).add(&sq(&y));
        prop_assert!(v.in_cone(&s).unwrap());
        prop_assert_eq!(v.classify(&s.shift(0.5)).unwrap(), ConeClassification::Interior);
        let p = v.project(x.matrix());
        prop_assert!((&v.project(&p) - &p).max_abs() < 1e-10);
    }

    #[test]
    fn toeplitz_products_are_symbol_products_inside(seed in any::<u64>(), k in 1usize..=2) {
        let mut r = rng(seed);
        let act = if k == 1 {
            EndomorphismAction::trivial(1)
        } else {
            EndomorphismAction::conjugation(&sampling::unitary(&mut r, k))
        };
        let n = 16;
        let mut f = SymbolFunction::new(k);
        let mut h = SymbolFunction::new(k);
        for g in -2..=2 {
            f.insert(g, sampling::gaussian_matrix(&mut r, k)).unwrap();
            h.insert(g, sampling::gaussian_matrix(&mut r, k)).unwrap();
        }
        let lhs = wiener_hopf(&f, &act, n).unwrap().mul(&wiener_hopf(&h, &act, n).unwrap()).unwrap();
        let rhs = wiener_hopf(&convolve_symbols(&f, &h, &act).unwrap(), &act, n).unwrap();
        prop_assert!(lhs.row_difference(&rhs, 2..=n - 2).unwrap() < 1e-10);
    }

    #[test]
    fn quotient_seminorm_is_a_cstar_seminorm(seed in any::<u64>(), n in 0i64..=12) {
        let mut r = rng(seed);
        let x = random_piecewise_linear(&mut r);
        let y = random_piecewise_linear(&mut r);
        for u in [Unit::Finite(n), Unit::Infinity] {
            let nx = quotient_norm(u, &x).unwrap();
            let ny = quotient_norm(u, &y).unwrap();
            prop_assert!((quotient_norm_product(u, &x, &x).unwrap() - nx * nx).abs() <= 1e-12 * (1.0 + nx * nx));
            prop_assert!(quotient_norm_product(u, &x, &y).unwrap() <= nx * ny + 1e-12);
        }
        prop_assert!(quotient_norm(Unit::Finite(n + 1), &x).unwrap() <= quotient_norm(Unit::Finite(n), &x).unwrap());
    }

    #[test]
    fn dilation_is_isometric(seed in any::<u64>(), m in 0u32..=3) {
        let x = random_trig_poly(&mut rng(seed), 3);
        let est = x.norm_estimate();
        let dilated = x.alpha(m).norm_estimate();
        prop_assert!(est.grid_max <= est.upper);
        prop_assert!(dilated.grid_max <= est.upper + 1e-12 && est.grid_max <= dilated.upper + 1e-12);
        prop_assert!(x.mul(&x.adjoint()).eval(C64::new(1.0, 0.0)).re >= -1e-12);
    }
}
