//! Invariant suites run by `whlab verify`. Every suite threads the one
//! generator it is given, so a report is a function of the configuration.

use std::collections::BTreeMap;

use rand::Rng;

use super::report::Case;
use super::{ModelChoice, SuiteConfig};
use crate::error::{Error, Result};
use crate::fell::{
    classify_omega, fell_limit, omega_qset, Ambient, ClosedSetModel, Ext, FellOutcome, GroupElement, Grid,
    OmegaPoint, SetShape,
};
use crate::fibers::{
    dilation_embed, dilation_equal, fiber_action, fiber_action_via, fiber_section_f, ideal_contains, quotient_norm,
    quotient_norm_product, random_piecewise_linear, random_trig_poly, PiecewiseLinear, QuotientElement,
};
use crate::groupoid::{
    arrow_agrees_with_omega, convolve, i_norm, involute, lambda_rep, lift_and_hat, section_distance, shift_r, Arrow,
    GroupoidSection, MatrixBundle, Unit, Window,
};
use crate::homotopy::{
    halfline_samples, unitary_samples, uniform_grid, verify_condition_h, HalflineHomotopy, HomotopyModel,
    HomotopyReport, UnitaryHomotopy, DEFAULT_T_POINTS,
};
use crate::jordan::{order_compare, ConeClassification, JordanAlgebra, Order};
use crate::moebius::{
    boxplus, boxplus_margin, contraction_inverse, moebius_contraction, pair_decode, pair_encode, pair_unitary,
    qset_contains, random_pair, random_zpoint, separate_points, PairRep, Separation,
};
use crate::sampling;
use crate::spectra::{
    cayley, functional_calculus, hermitian_eig, hermitian_eigenvalues, ComplexMatrix, HermitianMatrix,
    UnitaryMatrix, C64, I,
};
use crate::toeplitz::{
    adjoint_symbol, compress_product, convolve_symbols, covariance_residual, isometry_v, rep_pi, wiener_hopf,
    EndomorphismAction, SymbolFunction, TruncatedOperator,
};

/// Runs `f`, turning an error into a failed case under `name`.
fn attempt(name: &str, f: impl FnOnce() -> Result<Case>) -> Case {
    f().unwrap_or_else(|e| Case::errored(name, &e))
}

fn fro(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}

// ---------------------------------------------------------------- moebius

/// `⊞` with the sign of the trailing `B` flipped in the numerator.
fn boxplus_wrong_sign(u: &UnitaryMatrix, b: &HermitianMatrix) -> Result<ComplexMatrix> {
    let bu = b.matrix() * u.matrix();
    let den = &bu.shift(2.0 * I) - b.matrix();
    let num = &(&u.matrix().scale(2.0 * I) + &bu) + b.matrix();
    den.right_divide(&num)
}

fn sqrt_positive(b: &HermitianMatrix) -> Result<ComplexMatrix> {
    functional_calculus(&hermitian_eig(b)?, |l| C64::new(l.re.max(0.0).sqrt(), 0.0))
}

/// Positive `C` with `B^{1/2} C B^{1/2} ≤ r < 1`, so `C < B⁻¹`.
fn below_inverse<R: Rng + ?Sized>(rng: &mut R, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = b.dim();
    let p = sampling::positive_definite(rng, d, 1e-3);
    let sb = sqrt_positive(b)?;
    let top = *hermitian_eigenvalues(&(&(&sb * p.matrix()) * &sb))?.last().expect("dim ≥ 1");
    Ok(p.scale(rng.random_range(0.05..0.95) / top))
}

/// Two random pairs at parameter distance above `1e-6`.
fn distinct_pairs<R: Rng + ?Sized>(rng: &mut R, d: usize) -> (PairRep, PairRep) {
    loop {
        let p1 = random_pair(rng, d);
        let p2 = random_pair(rng, d);
        if p1.distance(&p2) > 1e-6 {
            return (p1, p2);
        }
    }
}

pub fn moebius<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let (lo, hi) = cfg.dim_range(1, 4);
    let tol = cfg.tol;
    let mut cases = Vec::new();

    cases.push(attempt("action_law", || {
        let mut err = 0.0_f64;
        for d in lo..=hi {
            for _ in 0..cfg.trials {
                let u = sampling::unitary(rng, d);
                let a = sampling::hermitian(rng, d);
                let b = sampling::hermitian(rng, d);
                let lhs = boxplus(&boxplus(&u, &a)?, &b)?;
                let rhs = boxplus(&u, &a.add(&b))?;
                err = err.max(fro(lhs.matrix(), rhs.matrix()));
            }
        }
        Ok(Case::measured("action_law", err, 10.0 * tol, "(U ⊞ A) ⊞ B against U ⊞ (A + B)"))
    }));

    cases.push(attempt("cayley_equivariance", || {
        let mut err = 0.0_f64;
        for d in lo..=hi {
            for _ in 0..cfg.trials {
                let a = sampling::hermitian(rng, d);
                let b = sampling::hermitian(rng, d);
                let lhs = boxplus(&cayley(&a)?, &b)?;
                err = err.max(fro(lhs.matrix(), cayley(&a.add(&b))?.matrix()));
            }
        }
        Ok(Case::measured("cayley_equivariance", err, 10.0 * tol, "cayley(A) ⊞ B against cayley(A + B)"))
    }));

    cases.push(attempt("invertibility_margin", || {
        let mut min_sigma = f64::INFINITY;
        for d in lo..=hi {
            for _ in 0..cfg.trials {
                let u = sampling::unitary(rng, d);
                let scale = 10f64.powf(rng.random_range(-3.0..3.0));
                let b = sampling::hermitian(rng, d).scale(scale);
                min_sigma = min_sigma.min(boxplus_margin(&u, &b)?);
            }
        }
        let floor = 1e-6;
        Ok(Case::measured(
            "invertibility_margin",
            (floor - min_sigma).max(0.0),
            0.0,
            format!("smallest singular value of BU + 2i − B is {min_sigma:.6e}, floor {floor:e}"),
        ))
    }));

    cases.push(attempt("contraction_range", || {
        let mut err = 0.0_f64;
        let mut order_violations = 0;
        let mut checks = 0;
        for d in lo..=hi {
            for _ in 0..cfg.trials.div_ceil(4) {
                let b = sampling::positive_definite(rng, d, 0.1);
                let b_inv = HermitianMatrix::from_hermitian_part(&b.matrix().inverse()?, b.tol());
                for _ in 0..4 {
                    let a = sampling::positive(rng, d);
                    let c = moebius_contraction(&a, &b)?;
                    err = err.max(fro(contraction_inverse(&c, &b)?.matrix(), a.matrix()));
                    checks += 1;
                    if order_compare(&c, &b_inv, 1e-12)? != Order::Lt {
                        order_violations += 1;
                    }
                    let c = below_inverse(rng, &b)?;
                    let back = moebius_contraction(&contraction_inverse(&c, &b)?, &b)?;
                    err = err.max(fro(back.matrix(), c.matrix()));
                }
            }
        }
        let mut case = Case::measured(
            "contraction_range",
            err,
            100.0 * tol,
            format!("round trips both ways; {order_violations} of {checks} images not strictly below B⁻¹"),
        );
        if order_violations > 0 {
            case.status = super::report::Status::Fail;
        }
        Ok(case)
    }));

    cases.push(attempt("pair_round_trip", || {
        let mut err = 0.0_f64;
        for d in lo..=hi {
            for _ in 0..cfg.trials {
                let z = random_zpoint(rng, d)?;
                let back = pair_decode(&pair_encode(&z)?)?;
                err = err.max(fro(back.matrix(), z.matrix()));
                let p = random_pair(rng, d);
                err = err.max(pair_encode(&pair_decode(&p)?)?.distance(&p));
            }
        }
        Ok(Case::measured("pair_round_trip", err, 100.0 * tol, "decode ∘ encode and encode ∘ decode"))
    }));

    cases.push(attempt("pair_translation", || {
        let mut err = 0.0_f64;
        for d in lo..=hi {
            for _ in 0..cfg.trials {
                let p = random_pair(rng, d);
                let f = (-p.e()).shift(C64::new(1.0, 0.0));
                let mut b = sampling::hermitian(rng, d);
                let lmin = p.a().add(&b.congruence(&f)).lambda_min()?;
                if lmin < 0.1 {
                    b = b.shift(0.1 - lmin);
                }
                let moved = PairRep::new(p.e().clone(), p.a().add(&b.congruence(&f)), p.tol())?;
                let lhs = boxplus(&pair_unitary(&p)?, &b)?;
                err = err.max(fro(lhs.matrix(), pair_unitary(&moved)?.matrix()));
            }
        }
        Ok(Case::measured("pair_translation", err, 100.0 * tol, "U_(E,A) ⊞ B against U_(E, A + (1−E)B(1−E))"))
    }));

    cases.push(attempt("qset_at_origin", || {
        let mut bad = 0;
        let mut checks = 0;
        for d in lo..=hi {
            let v = JordanAlgebra::full(d);
            let origin = PairRep::new(ComplexMatrix::zeros(d), HermitianMatrix::zeros(d), 1e-9)?;
            for i in 0..cfg.trials {
                let b = if i % 2 == 0 {
                    sampling::hermitian(rng, d)
                } else {
                    sampling::positive(rng, d)
                };
                checks += 1;
                if qset_contains(&origin, &b, &v)? != v.in_cone(&b)? {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("qset_at_origin", bad, checks, "probes of Q_(0,0) = Q"))
    }));

    cases.push(attempt("separation", || {
        let mut bad = 0;
        let mut checks = 0;
        for d in lo..=hi {
            let v = JordanAlgebra::full(d);
            for _ in 0..cfg.trials {
                let (p1, p2) = distinct_pairs(rng, d);
                checks += 2;
                match separate_points(&p1, &p2, &v) {
                    Ok(Separation::Witness(b)) => {
                        if qset_contains(&p1, &b, &v)? == qset_contains(&p2, &b, &v)? {
                            bad += 1;
                        }
                    }
                    Ok(Separation::Equal) | Err(Error::WitnessNotFound(_)) => bad += 1,
                    Err(e) => return Err(e),
                }
                if !matches!(separate_points(&p1, &p1, &v)?, Separation::Equal) {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("separation", bad, checks, "separation verdicts"))
    }));

    cases.push(attempt("mutant_boxplus_sign", || {
        let mut err = 0.0_f64;
        for d in lo..=hi {
            for _ in 0..cfg.trials.min(20) {
                let u = sampling::unitary(rng, d);
                let a = sampling::hermitian(rng, d);
                let b = sampling::hermitian(rng, d);
                let first = UnitaryMatrix::new(boxplus_wrong_sign(&u, &a)?, 1e6)?;
                let lhs = boxplus_wrong_sign(&first, &b)?;
                err = err.max(fro(&lhs, &boxplus_wrong_sign(&u, &a.add(&b))?));
            }
        }
        Ok(Case::mutant("mutant_boxplus_sign", err, 10.0 * tol, "action law with the sign of B flipped"))
    }));

    cases
}

// ----------------------------------------------------------------- jordan

fn random_algebra<R: Rng + ?Sized>(rng: &mut R, d: usize, tol: f64) -> Result<JordanAlgebra> {
    match rng.random_range(0..3) {
        0 => Ok(JordanAlgebra::full(d)),
        1 => JordanAlgebra::generate(d, &[sampling::hermitian(rng, d)], tol),
        _ => {
            let h = sampling::hermitian(rng, d);
            let p = sampling::spectral_projection(rng, &h);
            JordanAlgebra::generate(d, &[HermitianMatrix::from_hermitian_part(&p, tol), h], tol)
        }
    }
}

/// Square of a random element: always in the cone of its algebra.
fn cone_element<R: Rng + ?Sized>(rng: &mut R, v: &JordanAlgebra) -> HermitianMatrix {
    let x = sampling::combination(rng, v.basis());
    HermitianMatrix::from_hermitian_part(&x.matrix().jordan_product(x.matrix()), v.tol())
}

pub fn jordan<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let (lo, hi) = cfg.dim_range(1, 4);
    let tol = cfg.tol;
    let alg_tol = 1e-9;
    let trials = cfg.trials.div_ceil(5);
    let mut cases = Vec::new();

    cases.push(attempt("product_closure", || {
        let mut err = 0.0_f64;
        for d in lo..=hi {
            for _ in 0..trials {
                let v = random_algebra(rng, d, alg_tol)?;
                for _ in 0..5 {
                    let x = sampling::combination(rng, v.basis());
                    let y = sampling::combination(rng, v.basis());
                    let p = x.matrix().jordan_product(y.matrix());
                    let scale = x.matrix().frobenius_norm() * y.matrix().frobenius_norm();
                    err = err.max(v.distance(&p) / scale.max(1.0));
                }
            }
        }
        Ok(Case::measured("product_closure", err, 10.0 * tol, "distance of x ∘ y from the algebra"))
    }));

    cases.push(attempt("projection_idempotent", || {
        let mut err = 0.0_f64;
        let mut missing_identity = 0;
        for d in lo..=hi {
            for _ in 0..trials {
                let v = random_algebra(rng, d, alg_tol)?;
                if !v.contains(&ComplexMatrix::identity(d)) {
                    missing_identity += 1;
                }
                for _ in 0..5 {
                    let m = sampling::hermitian(rng, d);
                    let p = v.project(m.matrix());
                    err = err.max(fro(&v.project(&p), &p));
                }
            }
        }
        let mut case = Case::measured("projection_idempotent", err, 10.0 * tol, "P(P(m)) against P(m)");
        if missing_identity > 0 {
            case.status = super::report::Status::Fail;
            case.details = format!("{missing_identity} algebras miss the identity");
        }
        Ok(case)
    }));

    cases.push(attempt("cone_axioms", || {
        let mut bad = 0;
        let mut checks = 0;
        for d in lo..=hi {
            for _ in 0..trials {
                let v = random_algebra(rng, d, alg_tol)?;
                for _ in 0..5 {
                    let a = cone_element(rng, &v);
                    let b = cone_element(rng, &v);
                    let s = rng.random_range(0.1..10.0);
                    let interior = a.shift(1.0);
                    let outcomes = [
                        v.in_cone(&a.add(&b))?,
                        v.in_cone(&a.scale(s))?,
                        v.classify(&interior)? == ConeClassification::Interior,
                        v.classify(&interior.scale(-1.0))? == ConeClassification::OutsideCone,
                    ];
                    checks += outcomes.len();
                    bad += outcomes.iter().filter(|ok| !**ok).count();
                }
            }
        }
        Ok(Case::counted("cone_axioms", bad, checks, "cone axioms"))
    }));

    cases.push(attempt("order_consistency", || {
        let mut bad = 0;
        let mut checks = 0;
        for d in lo..=hi {
            for _ in 0..cfg.trials {
                let a = sampling::hermitian(rng, d);
                let p = sampling::positive_definite(rng, d, 0.1);
                checks += 3;
                bad += usize::from(order_compare(&a, &a.add(&p), tol)? != Order::Lt);
                bad += usize::from(order_compare(&a, &a, tol)? != Order::Leq);
                bad += usize::from(order_compare(&a.add(&p), &a, tol)? != Order::IncomparableOrGt);
            }
        }
        Ok(Case::counted("order_consistency", bad, checks, "order comparisons"))
    }));

    cases.push(attempt("mutant_cone_sign", || {
        let mut disagreements = 0;
        for d in lo..=hi {
            let v = JordanAlgebra::full(d);
            for _ in 0..cfg.trials.min(20) {
                let m = sampling::hermitian(rng, d);
                let top = *hermitian_eigenvalues(m.matrix())?.last().expect("dim ≥ 1");
                if (top >= 0.0) != v.in_cone(&m)? {
                    disagreements += 1;
                }
            }
        }
        Ok(Case::mutant(
            "mutant_cone_sign",
            disagreements as f64,
            0.0,
            "cone test reading λ_max instead of λ_min",
        ))
    }));

    cases
}

// ------------------------------------------------------------------- fell

fn ray(grid: &Grid, x: f64) -> ClosedSetModel {
    ClosedSetModel::from_shape(grid.clone(), SetShape::Ray { endpoint: x })
}

/// Compares `omega_qset` with membership of `g⁻¹` in the gridded set, and
/// counts disagreements; `mutate` flips the direction of the translation.
fn qset_disagreements(points: &[OmegaPoint], shifts: &[GroupElement], grid: &Grid, mutate: bool) -> Result<(usize, usize)> {
    let mut bad = 0;
    let mut checks = 0;
    for x in points {
        let set = x.to_closed_set(grid.clone());
        for &g in shifts {
            let inverse = match g {
                GroupElement::Real(t) => vec![-t],
                GroupElement::Int(k) => vec![-k as f64],
                GroupElement::Plane(s, t) => vec![-s, -t],
            };
            let claimed = if mutate {
                let neg = match g {
                    GroupElement::Real(t) => GroupElement::Real(-t),
                    GroupElement::Int(k) => GroupElement::Int(-k),
                    GroupElement::Plane(s, t) => GroupElement::Plane(-s, -t),
                };
                x.translate(neg)?.in_omega()
            } else {
                omega_qset(x, g)?
            };
            checks += 1;
            if claimed != set.contains(&inverse) {
                bad += 1;
            }
        }
    }
    Ok((bad, checks))
}

fn halfline_points(grid: &Grid) -> (Vec<OmegaPoint>, Vec<GroupElement>) {
    let pts: Vec<f64> = (0..grid.len()).map(|i| grid.point(i)[0]).collect();
    let mut omega: Vec<OmegaPoint> = pts.iter().filter(|&&x| x >= 0.0).map(|&x| OmegaPoint::halfline(x)).collect();
    omega.push(OmegaPoint::Halfline(Ext::Infinite));
    (omega, pts.into_iter().map(GroupElement::Real).collect())
}

pub fn fell<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let h = cfg.grid_step;
    let mut cases = Vec::new();

    cases.push(attempt("qset_discrete", || {
        let w = 12;
        let grid = Grid::new(Ambient::Integers, vec![(-w as f64, w as f64)], 1.0)?;
        let mut points: Vec<OmegaPoint> = (0..=w).map(OmegaPoint::discrete).collect();
        points.push(OmegaPoint::Discrete(Ext::Infinite));
        let shifts: Vec<GroupElement> = (-w..=w).map(GroupElement::Int).collect();
        let (bad, checks) = qset_disagreements(&points, &shifts, &grid, false)?;
        Ok(Case::counted("qset_discrete", bad, checks, "Q_X = X⁻¹ checks"))
    }));

    cases.push(attempt("qset_halfline", || {
        let grid = Grid::new(Ambient::Line, vec![(-4.0, 4.0)], h)?;
        let (mut points, mut shifts) = halfline_points(&grid);
        for _ in 0..cfg.trials {
            points.push(OmegaPoint::halfline(rng.random_range(0.0..4.0)));
            shifts.push(GroupElement::Real(rng.random_range(-4.0..4.0)));
        }
        let (bad, checks) = qset_disagreements(&points, &shifts, &grid, false)?;
        Ok(Case::counted("qset_halfline", bad, checks, "Q_X = X⁻¹ checks"))
    }));

    cases.push(attempt("qset_quadrant", || {
        let grid = Grid::new(Ambient::Plane, vec![(-2.0, 2.0), (-2.0, 2.0)], 0.5_f64.max(h))?;
        let coords: Vec<Ext<f64>> = (0..=4).map(|i| Ext::Finite(i as f64 * 0.5)).chain([Ext::Infinite]).collect();
        let mut points = Vec::new();
        for &a in &coords {
            for &b in &coords {
                points.push(OmegaPoint::Cone2d(a, b));
            }
        }
        let shifts: Vec<GroupElement> = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                GroupElement::Plane(p[0], p[1])
            })
            .collect();
        let (bad, checks) = qset_disagreements(&points, &shifts, &grid, false)?;
        Ok(Case::counted("qset_quadrant", bad, checks, "Q_X = X⁻¹ checks"))
    }));

    cases.push(attempt("p_action_closure", || {
        let mut bad = 0;
        let mut checks = 0;
        for _ in 0..cfg.trials {
            let x = OmegaPoint::halfline(rng.random_range(0.0..10.0));
            let a = rng.random_range(0.0..10.0);
            let n = OmegaPoint::discrete(rng.random_range(0..20));
            let k = rng.random_range(0..20);
            for (p, g) in [(x, GroupElement::Real(a)), (n, GroupElement::Int(k))] {
                let moved = p.translate(g)?;
                checks += 1;
                if !moved.in_omega() || classify_omega(&moved).is_err() {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("p_action_closure", bad, checks, "translations by P"))
    }));

    cases.push(attempt("limit_constant", || {
        let mut bad = 0;
        let grids = [
            Grid::new(Ambient::Line, vec![(-4.0, 4.0)], h)?,
            Grid::new(Ambient::Integers, vec![(-8.0, 8.0)], 1.0)?,
        ];
        for grid in &grids {
            let x = rng.random_range(-2.0..2.0_f64).round();
            let seq: Vec<_> = (0..10).map(|_| ray(grid, x)).collect();
            match fell_limit(&seq)?.limit() {
                Some(lim) if lim.agrees_within_step(&ray(grid, x)) => {}
                _ => bad += 1,
            }
        }
        Ok(Case::counted("limit_constant", bad, grids.len(), "constant sequences"))
    }));

    cases.push(attempt("limit_escaping", || {
        let mut bad = 0;
        let grids = [
            Grid::new(Ambient::Line, vec![(-4.0, 4.0)], h)?,
            Grid::new(Ambient::Integers, vec![(-8.0, 8.0)], 1.0)?,
        ];
        for grid in &grids {
            let up: Vec<_> = (0..24).map(|n| ray(grid, n as f64)).collect();
            match fell_limit(&up)?.limit() {
                Some(lim) if lim.count() == grid.len() => {}
                _ => bad += 1,
            }
            let down: Vec<_> = (0..24).map(|n| ray(grid, -(n as f64))).collect();
            match fell_limit(&down)?.limit() {
                Some(lim) if lim.count() == 0 => {}
                _ => bad += 1,
            }
        }
        Ok(Case::counted("limit_escaping", bad, 2 * grids.len(), "escaping sequences"))
    }));

    cases.push(attempt("limit_alternating", || {
        let mut bad = 0;
        let grids = [
            Grid::new(Ambient::Line, vec![(-4.0, 4.0)], h)?,
            Grid::new(Ambient::Integers, vec![(-8.0, 8.0)], 1.0)?,
        ];
        for grid in &grids {
            let seq: Vec<_> = (0..24).map(|n| ray(grid, 2.0 * (n % 2) as f64)).collect();
            match fell_limit(&seq)? {
                FellOutcome::Diverges { liminf, limsup } if limsup.contains(&[2.0]) && !liminf.contains(&[2.0]) => {}
                _ => bad += 1,
            }
        }
        Ok(Case::counted("limit_alternating", bad, grids.len(), "alternating sequences"))
    }));

    cases.push(attempt("limit_converging", || {
        let grid = Grid::new(Ambient::Line, vec![(-4.0, 4.0)], h)?;
        let mut bad = 0;
        for sign in [-1.0, 1.0] {
            let seq: Vec<_> = (1..64).map(|n| ray(&grid, 1.0 + sign / n as f64)).collect();
            match fell_limit(&seq)?.limit() {
                Some(lim) if lim.agrees_within_step(&ray(&grid, 1.0)) => {}
                _ => bad += 1,
            }
        }
        Ok(Case::counted("limit_converging", bad, 2, "rays converging from either side"))
    }));

    cases.push(attempt("mutant_qset_direction", || {
        let grid = Grid::new(Ambient::Line, vec![(-4.0, 4.0)], h)?;
        let (points, shifts) = halfline_points(&grid);
        let (bad, _) = qset_disagreements(&points, &shifts, &grid, true)?;
        Ok(Case::mutant("mutant_qset_direction", bad as f64, 0.0, "Q-set computed from X·g⁻¹"))
    }));

    cases
}

// --------------------------------------------------------------- toeplitz

fn random_action<R: Rng + ?Sized>(rng: &mut R, k: usize) -> EndomorphismAction {
    if k == 1 {
        EndomorphismAction::trivial(1)
    } else {
        EndomorphismAction::conjugation(&sampling::unitary(rng, k))
    }
}

fn random_symbol<R: Rng + ?Sized>(rng: &mut R, k: usize, radius: i64) -> Result<SymbolFunction> {
    let mut f = SymbolFunction::new(k);
    for g in -radius..=radius {
        if rng.random_bool(0.6) {
            f.insert(g, sampling::gaussian_matrix(rng, k))?;
        }
    }
    if f.support().is_empty() {
        f.insert(0, sampling::gaussian_matrix(rng, k))?;
    }
    Ok(f)
}

fn op_diff(a: &TruncatedOperator, b: &TruncatedOperator) -> Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

pub fn toeplitz<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let (lo, hi) = cfg.dim_range(1, 2);
    let n = cfg.n;
    let tol = cfg.tol;
    let trials = cfg.trials.div_ceil(5);
    let mut cases = Vec::new();

    cases.push(attempt("covariance", || {
        let mut err = 0.0_f64;
        for k in lo..=hi {
            for _ in 0..trials {
                let act = random_action(rng, k);
                for a in 0..=8.min(n) {
                    let x = sampling::gaussian_matrix(rng, k);
                    err = err.max(covariance_residual(&x, a, &act, n)?);
                }
            }
        }
        Ok(Case::measured("covariance", err, tol / 100.0, "V_a* π(x) V_a against π(α_a(x)), a ≤ 8"))
    }));

    cases.push(attempt("isometry_relations", || {
        let mut err = 0.0_f64;
        for k in lo..=hi {
            for a in 0..=4.min(n) {
                let vv = compress_product(n, a, |big| {
                    let v = isometry_v(a, big, k)?;
                    v.adjoint().mul(&v)
                })?;
                err = err.max(op_diff(&vv, &TruncatedOperator::identity(n, k))?);
                for b in 0..=4.min(n - a) {
                    let prod = isometry_v(a, n, k)?.mul(&isometry_v(b, n, k)?)?;
                    err = err.max(op_diff(&prod, &isometry_v(a + b, n, k)?)?);
                }
            }
        }
        Ok(Case::measured("isometry_relations", err, tol / 100.0, "V_a* V_a = 1 and V_a V_b = V_(a+b)"))
    }));

    cases.push(attempt("semi_multiplicativity", || {
        let mut err = 0.0_f64;
        let radius = 3.min(n as i64 / 4);
        for k in lo..=hi {
            for _ in 0..trials {
                let act = random_action(rng, k);
                let f = random_symbol(rng, k, radius)?;
                let g = random_symbol(rng, k, radius)?;
                let lhs = wiener_hopf(&f, &act, n)?.mul(&wiener_hopf(&g, &act, n)?)?;
                let rhs = wiener_hopf(&convolve_symbols(&f, &g, &act)?, &act, n)?;
                let r = f.radius() as usize;
                err = err.max(lhs.row_difference(&rhs, r..=n - r)?);
            }
        }
        Ok(Case::measured("semi_multiplicativity", err, 10.0 * tol, "W_f W_h against W_(f*h) on interior rows"))
    }));

    cases.push(attempt("adjoint_symbol", || {
        let mut err = 0.0_f64;
        for k in lo..=hi {
            for _ in 0..trials {
                let act = random_action(rng, k);
                let f = random_symbol(rng, k, 4.min(n as i64))?;
                let lhs = wiener_hopf(&f, &act, n)?.adjoint();
                err = err.max(op_diff(&lhs, &wiener_hopf(&adjoint_symbol(&f, &act)?, &act, n)?)?);
            }
        }
        Ok(Case::measured("adjoint_symbol", err, tol / 100.0, "W_f* against W_f°"))
    }));

    cases.push(attempt("mutant_shift_direction", || {
        let mut err = 0.0_f64;
        for k in lo..=hi {
            let act = random_action(rng, k);
            for a in 1..=3.min(n) {
                let x = sampling::gaussian_matrix(rng, k);
                let v = isometry_v(a, n, k)?;
                let lhs = v.mul(&rep_pi(&x, &act, n)?)?.mul(&v.adjoint())?;
                err = err.max(op_diff(&lhs, &rep_pi(&act.apply(a as u64, &x), &act, n)?)?);
            }
        }
        Ok(Case::mutant("mutant_shift_direction", err, tol / 100.0, "covariance with V_a and V_a* swapped"))
    }));

    cases
}

// --------------------------------------------------------------- groupoid

fn random_bundle<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Result<MatrixBundle> {
    MatrixBundle::new(random_action(rng, k))
}

fn random_section<R: Rng + ?Sized>(rng: &mut R, window: &Window, k: usize, count: usize) -> Result<GroupoidSection<ComplexMatrix>> {
    let arrows = window.arrows();
    let mut s = GroupoidSection::new();
    for _ in 0..count {
        let a = arrows[rng.random_range(0..arrows.len())];
        s.insert(a, sampling::gaussian_matrix(rng, k))?;
    }
    Ok(s)
}

pub fn groupoid<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let (lo, hi) = cfg.dim_range(1, 2);
    let tol = cfg.tol;
    let trials = cfg.trials.div_ceil(2);
    let small = Window::new(12, 2);
    let wide = Window::new(20, 8);
    let mut cases = Vec::new();

    cases.push(attempt("associativity", || {
        let mut err = 0.0_f64;
        for k in lo..=hi {
            let b = random_bundle(rng, k)?;
            for _ in 0..trials {
                let [p, q, r] = [0; 3].map(|_| random_section(rng, &small, k, 6));
                let (p, q, r) = (p?, q?, r?);
                let left = convolve(&b, &convolve(&b, &p, &q, &wide)?, &r, &wide)?;
                let right = convolve(&b, &p, &convolve(&b, &q, &r, &wide)?, &wide)?;
                err = err.max(section_distance(&b, &left, &right));
            }
        }
        Ok(Case::measured("associativity", err, 10.0 * tol, "(φψ)χ against φ(ψχ)"))
    }));

    cases.push(attempt("involution", || {
        let mut err = 0.0_f64;
        for k in lo..=hi {
            let b = random_bundle(rng, k)?;
            for _ in 0..trials {
                let p = random_section(rng, &small, k, 6)?;
                let q = random_section(rng, &small, k, 6)?;
                let ps = involute(&b, &p)?;
                err = err.max(section_distance(&b, &involute(&b, &ps)?, &p));
                err = err.max((i_norm(&b, &ps)? - i_norm(&b, &p)?).abs());
                let lhs = involute(&b, &convolve(&b, &p, &q, &wide)?)?;
                let rhs = convolve(&b, &involute(&b, &q)?, &ps, &wide)?;
                err = err.max(section_distance(&b, &lhs, &rhs));
            }
        }
        Ok(Case::measured("involution", err, 10.0 * tol, "φ** = φ, (φψ)* = ψ*φ*, ‖φ*‖_I = ‖φ‖_I"))
    }));

    cases.push(attempt("regular_norm_bound", || {
        let mut bad = 0;
        let mut checks = 0;
        let n = small.max_unit as usize;
        for k in lo..=hi {
            let b = random_bundle(rng, k)?;
            for _ in 0..trials {
                let p = random_section(rng, &small, k, 8)?;
                let lam = lambda_rep(&b, &p, n, &small)?.operator_norm()?;
                checks += 1;
                if lam > i_norm(&b, &p)? * (1.0 + 1e-12) + tol {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("regular_norm_bound", bad, checks, "bounds ‖Λ(φ)‖ ≤ ‖φ‖_I"))
    }));

    cases.push(attempt("regular_homomorphism", || {
        let mut err = 0.0_f64;
        let n = small.max_unit as usize;
        let window = Window::new(small.max_unit, 8);
        for k in lo..=hi {
            let b = random_bundle(rng, k)?;
            for _ in 0..trials {
                let p = random_section(rng, &small, k, 6)?;
                let q = random_section(rng, &small, k, 6)?;
                let lhs = lambda_rep(&b, &convolve(&b, &p, &q, &window)?, n, &window)?;
                let rhs = lambda_rep(&b, &p, n, &window)?.mul(&lambda_rep(&b, &q, n, &window)?)?;
                err = err.max(op_diff(&lhs, &rhs)?);
            }
        }
        Ok(Case::measured("regular_homomorphism", err, 10.0 * tol, "Λ(φψ) against Λ(φ)Λ(ψ)"))
    }));

    cases.push(attempt("central_identity", || {
        let mut err = 0.0_f64;
        let n = cfg.n;
        let window = Window::new(n as i64, 8.min(n as i64));
        for k in lo..=hi {
            for _ in 0..trials {
                let b = random_bundle(rng, k)?;
                let f = random_symbol(rng, k, window.max_shift)?;
                let (lift, hat) = lift_and_hat(&f, &window)?;
                let lhs = lambda_rep(&b, &lift, n, &window)?;
                err = err.max(op_diff(&lhs, &wiener_hopf(&hat, b.action(), n)?)?);
            }
        }
        Ok(Case::measured("central_identity", err, tol / 100.0, "Λ(f̃) against W_f̂"))
    }));

    cases.push(attempt("shift_composition", || {
        let mut err = 0.0_f64;
        let window = Window::new(12, 12);
        for k in lo..=hi {
            let b = random_bundle(rng, k)?;
            for _ in 0..trials {
                let p = random_section(rng, &small, k, 8)?;
                let (s, t) = (rng.random_range(0..4), rng.random_range(0..4));
                let twice = shift_r(&b, s, &shift_r(&b, t, &p, &window)?, &window)?;
                err = err.max(section_distance(&b, &twice, &shift_r(&b, s + t, &p, &window)?));
            }
        }
        Ok(Case::measured("shift_composition", err, 10.0 * tol, "R_s R_t against R_(s+t)"))
    }));

    cases.push(attempt("arrows_match_omega", || {
        let mut bad = 0;
        let mut checks = 0;
        for x in wide.units() {
            for g in -2 * wide.max_shift..=2 * wide.max_shift {
                checks += 1;
                if !arrow_agrees_with_omega(x, g)? {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("arrows_match_omega", bad, checks, "arrow validity checks"))
    }));

    cases.push(attempt("mutant_unreflected_hat", || {
        let mut err = 0.0_f64;
        let n = cfg.n;
        let window = Window::new(n as i64, 8.min(n as i64));
        for k in lo..=hi {
            let b = random_bundle(rng, k)?;
            let mut f = random_symbol(rng, k, 3.min(window.max_shift))?;
            f.insert(1, sampling::gaussian_matrix(rng, k))?;
            let (lift, _) = lift_and_hat(&f, &window)?;
            let lhs = lambda_rep(&b, &lift, n, &window)?;
            err = err.max(op_diff(&lhs, &wiener_hopf(&f, b.action(), n)?)?);
        }
        Ok(Case::mutant("mutant_unreflected_hat", err, tol / 100.0, "central identity without the reflection"))
    }));

    cases
}

// ----------------------------------------------------------------- fibers

/// `sup |x|` over `[0, 2⁻ⁿ]` read off the dyadic grid of mesh `2⁻¹⁴`, which
/// contains every breakpoint of the sampled functions.
fn direct_sup(unit: Unit, x: &PiecewiseLinear) -> f64 {
    match unit {
        Unit::Infinity => x.eval(0.0).abs(),
        Unit::Finite(n) => {
            let steps = 1_u32 << 14_u32.saturating_sub(n as u32);
            let hi = 0.5_f64.powi(n as i32);
            (0..=steps)
                .map(|i| x.eval(hi * i as f64 / steps as f64).abs())
                .fold(0.0, f64::max)
        }
    }
}

fn fiber_units() -> impl Iterator<Item = Unit> {
    (0..=12).map(Unit::Finite).chain(std::iter::once(Unit::Infinity))
}

pub fn fibers<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let tol = cfg.tol;
    let mut cases = Vec::new();

    cases.push(attempt("kernel_identity", || {
        let mut bad = 0;
        let mut checks = 0;
        for _ in 0..cfg.trials {
            let x = random_piecewise_linear(rng);
            for n in 0..=10 {
                checks += 1;
                let in_ideal = ideal_contains(Unit::Finite(n as i64), &x)?;
                let in_kernel = x.alpha(n).sup_abs() <= crate::fibers::IDEAL_TOL;
                if in_ideal != in_kernel {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("kernel_identity", bad, checks, "checks of I_(P⁻¹n) = Ker α_n"))
    }));

    cases.push(attempt("quotient_norm_oracle", || {
        let mut err = 0.0_f64;
        for _ in 0..cfg.trials {
            let x = random_piecewise_linear(rng);
            for u in fiber_units() {
                err = err.max((quotient_norm(u, &x)? - direct_sup(u, &x)).abs());
            }
        }
        Ok(Case::measured("quotient_norm_oracle", err, tol / 100.0, "quotient norm against a direct sup"))
    }));

    cases.push(attempt("seminorm_axioms", || {
        let mut bad = 0;
        let mut checks = 0;
        let slack = 1e-12;
        for _ in 0..cfg.trials {
            let x = random_piecewise_linear(rng);
            let y = random_piecewise_linear(rng);
            for u in fiber_units() {
                let (nx, ny) = (quotient_norm(u, &x)?, quotient_norm(u, &y)?);
                let outcomes = [
                    (quotient_norm_product(u, &x, &x)? - nx * nx).abs() <= slack * (1.0 + nx * nx),
                    quotient_norm_product(u, &x, &y)? <= nx * ny + slack,
                    quotient_norm(u, &x.add(&y))? <= nx + ny + slack,
                ];
                checks += outcomes.len();
                bad += outcomes.iter().filter(|ok| !**ok).count();
            }
        }
        Ok(Case::counted("seminorm_axioms", bad, checks, "C*-seminorm checks"))
    }));

    cases.push(attempt("upper_semicontinuity", || {
        let mut bad = 0;
        let mut checks = 0;
        for _ in 0..cfg.trials {
            let x = random_piecewise_linear(rng);
            let norms: Vec<f64> = fiber_units().map(|u| quotient_norm(u, &x)).collect::<Result<_>>()?;
            checks += norms.len() - 1;
            bad += norms.windows(2).filter(|w| w[1] > w[0] + 1e-15).count();
        }
        Ok(Case::counted("upper_semicontinuity", bad, checks, "monotonicity checks towards ∞"))
    }));

    cases.push(attempt("fiber_action_independence", || {
        let mut err = 0.0_f64;
        let mut isometry = 0.0_f64;
        for _ in 0..cfg.trials.div_ceil(10) {
            let x = random_piecewise_linear(rng);
            for g in -5_i64..=5 {
                for u in fiber_units() {
                    if !Arrow::new(u, g).is_ok_and(|a| a.is_valid()) {
                        continue;
                    }
                    let q = QuotientElement::new(u.translate(g), x.clone())?;
                    let reference = fiber_action(u, g, &q)?;
                    isometry = isometry.max((reference.seminorm() - q.seminorm()).abs());
                    let b0 = (-g).max(0) as u32;
                    for b in b0..b0 + 5 {
                        let a = (g + b as i64) as u32;
                        err = err.max(fiber_action_via(u, a, b, &q)?.distance(&reference)?);
                    }
                }
            }
        }
        Ok(Case::measured(
            "fiber_action_independence",
            err.max(isometry),
            10.0 * tol,
            "α_(X,g) across five decompositions g = a − b, and isometry",
        ))
    }));

    cases.push(attempt("dilation_consistency", || {
        let mut err = 0.0_f64;
        let mut bad = 0;
        for _ in 0..cfg.trials.div_ceil(10) {
            let x = random_trig_poly(rng, 3);
            let y = random_trig_poly(rng, 2);
            for n in 0..3 {
                let e = dilation_embed(n, x.clone());
                if !dilation_equal(&e, &dilation_embed(n + 1, x.alpha(1)), tol) {
                    bad += 1;
                }
                err = err.max((e.norm() - x.norm()).abs());
                let prod = e.mul(&dilation_embed(n + 1, y.clone()));
                let direct = dilation_embed(n + 1, x.alpha(1).mul(&y));
                err = err.max(prod.distance(&direct));
            }
        }
        let mut case = Case::measured("dilation_consistency", err, 10.0 * tol, "levels, products and norms");
        if bad > 0 {
            case.status = super::report::Status::Fail;
            case.details = format!("{bad} level identifications failed");
        }
        Ok(case)
    }));

    cases.push(attempt("certificate_monotonicity", || {
        let mut bad = 0;
        let mut checks = 0;
        for _ in 0..cfg.trials.div_ceil(10) {
            let x = random_trig_poly(rng, 2);
            let mut f = BTreeMap::new();
            for g in -3..=3_i64 {
                if rng.random_bool(0.5) {
                    f.insert(g, C64::new(rng.random_range(-1.0..1.0), 0.0));
                }
            }
            for n in 0..4_i64 {
                let cert = fiber_section_f(&x, &f, Unit::Finite(n));
                for m in n..6 {
                    checks += 1;
                    if !cert.valid_over(Unit::Finite(m), tol) {
                        bad += 1;
                    }
                }
                checks += 1;
                if !cert.valid_over(Unit::Infinity, tol) {
                    bad += 1;
                }
            }
        }
        Ok(Case::counted("certificate_monotonicity", bad, checks, "certificates over larger units"))
    }));

    cases.push(attempt("mutant_section_order", || {
        let mut err = 0.0_f64;
        for _ in 0..cfg.trials.div_ceil(10).max(3) {
            let x = random_piecewise_linear(rng);
            for g in -3_i64..=3 {
                let u = Unit::Finite(3);
                if !Arrow::new(u, g).is_ok_and(|a| a.is_valid()) {
                    continue;
                }
                let q = QuotientElement::new(u.translate(g), x.clone())?;
                let reference = fiber_action(u, g, &q)?;
                let b0 = (-g).max(0) as u32;
                for b in b0..b0 + 5 {
                    let a = (g + b as i64) as u32;
                    let wrong = QuotientElement::new(u, x.alpha(a).section(b))?;
                    err = err.max(wrong.distance(&reference)?);
                }
            }
        }
        Ok(Case::mutant("mutant_section_order", err, 10.0 * tol, "fiber action pushing forward before lifting"))
    }));

    cases
}

// --------------------------------------------------------------- homotopy

fn clause_cases(prefix: &str, report: &HomotopyReport, expect_pass: bool) -> Vec<Case> {
    if expect_pass {
        report
            .clauses
            .iter()
            .map(|(clause, outcome)| {
                let name = format!("{prefix}_{clause}");
                let mut case = Case::counted(&name, outcome.violations, outcome.checks, "clause checks");
                case.details = format!("{}; largest measured error {:.3e}", case.details, outcome.max_error);
                case
            })
            .collect()
    } else {
        let failing: Vec<&str> = report
            .clauses
            .iter()
            .filter(|(_, o)| !o.passed())
            .map(|(c, _)| c.as_str())
            .collect();
        let name = format!("mutant_{prefix}");
        let mut case = Case::mutant(&name, failing.len() as f64, 0.0, &format!("mutated {} homotopy", report.model));
        if !failing.is_empty() {
            case.details = format!("{}; failing clauses: {}", case.details, failing.join(", "));
        }
        vec![case]
    }
}

fn run_model<M: HomotopyModel>(
    prefix: &str,
    model: &M,
    samples: &[M::Point],
    grid: &[f64],
    tol: f64,
    expect_pass: bool,
) -> Vec<Case> {
    match verify_condition_h(model, grid, samples, tol) {
        Ok(report) => clause_cases(prefix, &report, expect_pass),
        Err(e) => vec![Case::errored(format!("{prefix}_verifier"), &e)],
    }
}

const CLAUSES: [&str; 4] = ["boundary_invariance", "continuity", "endpoints", "orbit_and_order"];

fn skipped_model(prefix: &str) -> Vec<Case> {
    CLAUSES
        .iter()
        .map(|c| format!("{prefix}_{c}"))
        .chain([format!("mutant_{prefix}")])
        .map(|name| Case::skipped(name, "model not selected"))
        .collect()
}

pub fn homotopy<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> Vec<Case> {
    let grid = uniform_grid(DEFAULT_T_POINTS);
    let samples = cfg.trials.max(50);
    let tol = 1e3 * cfg.tol;
    let mut cases = Vec::new();

    if cfg.model.includes_halfline() {
        let pts = halfline_samples(rng, samples);
        cases.extend(run_model("halfline", &HalflineHomotopy::Normalised, &pts, &grid, tol, true));
        cases.extend(run_model("halfline", &HalflineHomotopy::Unnormalised, &pts, &grid, tol, false));
    } else {
        cases.extend(skipped_model("halfline"));
    }

    if cfg.model.includes_unitary() {
        let (lo, hi) = cfg.dim_range(1, 3);
        let per_dim = samples.div_ceil(hi - lo + 1).max(3);
        let mut pts = Vec::new();
        for d in lo..=hi {
            match unitary_samples(rng, d, per_dim) {
                Ok(mut s) => pts.append(&mut s),
                Err(e) => return vec![Case::errored("unitary_samples", &e)],
            }
        }
        // Points are grouped by dimension; the verifier only relates a point
        // to its own images, so mixed dimensions are fine.
        cases.extend(run_model("unitary", &UnitaryHomotopy::TowardsMinusOne, &pts, &grid, tol, true));
        cases.extend(run_model("unitary", &UnitaryHomotopy::TowardsOne, &pts, &grid, tol, false));
    } else {
        cases.extend(skipped_model("unitary"));
    }
    cases
}

impl ModelChoice {
    fn includes_halfline(self) -> bool {
        matches!(self, Self::Both | Self::Halfline)
    }

    fn includes_unitary(self) -> bool {
        matches!(self, Self::Both | Self::Unitary)
    }
}
