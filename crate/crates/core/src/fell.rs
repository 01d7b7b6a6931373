//! Grid-discretised Fell convergence of closed sets and explicit models of
//! the order compactification for the half-line, `ℕ ⊂ ℤ` and the quadrant.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ambient {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "R")]
    Line,
    #[serde(rename = "R2")]
    Plane,
}

impl Ambient {
    pub fn rank(self) -> usize {
        match self {
            Self::Integers | Self::Line => 1,
            Self::Plane => 2,
        }
    }
}

/// Uniform grid over a bounded box. On `ℤ` the step is forced to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    ambient: Ambient,
    window: Vec<(f64, f64)>,
    step: f64,
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(ambient: Ambient, window: Vec<(f64, f64)>, step: f64) -> Result<Self> {
        if window.len() != ambient.rank() {
            return Err(Error::InvalidInput(format!(
                "window has {} axes, ambient needs {}",
                window.len(),
                ambient.rank()
            )));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidInput("grid step must be positive".into()));
        }
        let step = if ambient == Ambient::Integers { 1.0 } else { step };
        let mut axes = Vec::with_capacity(window.len());
        for &(lo, hi) in &window {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidInput(format!("bad window [{lo}, {hi}]")));
            }
            let axis: Vec<f64> = if ambient == Ambient::Integers {
                (lo.ceil() as i64..=hi.floor() as i64).map(|k| k as f64).collect()
            } else {
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| lo + i as f64 * step).collect()
            };
            if axis.is_empty() {
                return Err(Error::InvalidInput("window contains no grid points".into()));
            }
            axes.push(axis);
        }
        Ok(Self {
            ambient,
            window,
            step,
            axes,
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn window(&self) -> &[(f64, f64)] {
        &self.window
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rest = flat;
        let mut out = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            out[k] = rest % axis.len();
            rest /= axis.len();
        }
        out
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, axis)| acc * axis.len() + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    }

    /// Grid points within one step in every coordinate, including itself.
    fn neighbours(&self, flat: usize) -> Vec<usize> {
        let centre = self.multi_index(flat);
        let mut out = vec![Vec::new()];
        for (k, axis) in self.axes.iter().enumerate() {
            let lo = centre[k].saturating_sub(1);
            let hi = (centre[k] + 1).min(axis.len() - 1);
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    (lo..=hi).map(move |i| {
                        let mut p = prefix.clone();
                        p.push(i);
                        p
                    })
                })
                .collect();
        }
        out.iter().map(|m| self.flat_index(m)).collect()
    }

    fn nearest(&self, p: &[f64]) -> Option<usize> {
        let mut idx = Vec::with_capacity(p.len());
        for (x, axis) in p.iter().zip(&self.axes) {
            let i = ((x - axis[0]) / self.step).round();
            if i < 0.0 || i as usize >= axis.len() {
                return None;
            }
            idx.push(i as usize);
        }
        Some(self.flat_index(&idx))
    }
}

type Oracle = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A closed subset of the ambient space seen through a membership oracle
/// on a bounded grid.
#[derive(Clone)]
pub struct ClosedSetModel {
    grid: Grid,
    membership: Oracle,
}

impl fmt::Debug for ClosedSetModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedSetModel")
            .field("grid", &self.grid)
            .field("members", &self.sample().iter().filter(|&&b| b).count())
            .finish()
    }
}

/// Shapes accepted in set-sequence files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetShape {
    /// `(−∞, endpoint]`, or the lower-left quadrant at `corner` in the plane.
    Ray { endpoint: f64 },
    Quadrant { corner: [f64; 2] },
    Interval { lo: f64, hi: f64 },
    Points { points: Vec<f64> },
    Empty,
    All,
}

impl SetShape {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Self::Ray { endpoint } => p.iter().all(|x| x <= endpoint),
            Self::Quadrant { corner } => p.len() == 2 && p[0] <= corner[0] && p[1] <= corner[1],
            Self::Interval { lo, hi } => p.iter().all(|x| lo <= x && x <= hi),
            Self::Points { points } => p.len() == 1 && points.iter().any(|q| (q - p[0]).abs() <= 1e-12),
            Self::Empty => false,
            Self::All => true,
        }
    }
}

impl ClosedSetModel {
    pub fn new(grid: Grid, membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            grid,
            membership: Arc::new(membership),
        }
    }

    pub fn from_shape(grid: Grid, shape: SetShape) -> Self {
        Self::new(grid, move |p| shape.contains(p))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (self.membership)(p)
    }

    /// Membership at every grid point, in flat order.
    pub fn sample(&self) -> Vec<bool> {
        (0..self.grid.len()).map(|i| self.contains(&self.grid.point(i))).collect()
    }
}

/// A set recorded only through its grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSet {
    grid: Grid,
    members: Vec<bool>,
}

impl DiscreteSet {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.grid.len())
            .filter(|&i| self.members[i])
            .map(|i| self.grid.point(i))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    /// Membership of the nearest grid point.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.grid.nearest(p).is_some_and(|i| self.members[i])
    }

    /// Agreement with `model` at every grid point.
    pub fn matches(&self, model: &ClosedSetModel) -> bool {
        self.grid == model.grid && self.members == model.sample()
    }

    /// Agreement with `model` up to grid resolution: every member of the
    /// model is a member here, and every member here lies within one step
    /// of a member of the model.
    pub fn agrees_within_step(&self, model: &ClosedSetModel) -> bool {
        if self.grid != model.grid {
            return false;
        }
        let target = model.sample();
        (0..self.grid.len()).all(|i| {
            (!target[i] || self.members[i])
                && (!self.members[i] || self.grid.neighbours(i).iter().any(|&j| target[j]))
        })
    }

    pub fn into_model(self) -> ClosedSetModel {
        let grid = self.grid.clone();
        ClosedSetModel::new(grid, move |p| self.contains(p))
    }
}

#[derive(Clone, Debug)]
pub enum FellOutcome {
    Limit(DiscreteSet),
    Diverges { liminf: DiscreteSet, limsup: DiscreteSet },
}

impl FellOutcome {
    pub fn limit(&self) -> Option<&DiscreteSet> {
        match self {
            Self::Limit(s) => Some(s),
            Self::Diverges { .. } => None,
        }
    }
}

/// Fell limit with the tail taken to be the second half of the sequence.
pub fn fell_limit(seq: &[ClosedSetModel]) -> Result<FellOutcome> {
    fell_limit_with_tail(seq, seq.len() / 2)
}

/// Discretised `liminf` and `limsup` over `seq[tail_start..]`. A grid point
/// is near a set when some member lies within one step of it; `liminf` asks
/// this for every set in the tail, `limsup` for at least one.
pub fn fell_limit_with_tail(seq: &[ClosedSetModel], tail_start: usize) -> Result<FellOutcome> {
    let first = seq
        .first()
        .ok_or_else(|| Error::InvalidInput("empty set sequence".into()))?;
    let grid = first.grid.clone();
    if seq.iter().any(|s| s.grid != grid) {
        return Err(Error::InvalidInput("sets do not share ambient, window and grid".into()));
    }
    if tail_start >= seq.len() {
        return Err(Error::InvalidInput("tail start beyond the sequence".into()));
    }
    let n = grid.len();
    let neighbours: Vec<Vec<usize>> = (0..n).map(|i| grid.neighbours(i)).collect();
    let mut liminf = vec![true; n];
    let mut limsup = vec![false; n];
    for set in &seq[tail_start..] {
        let members = set.sample();
        for i in 0..n {
            let near = neighbours[i].iter().any(|&j| members[j]);
            liminf[i] &= near;
            limsup[i] |= near;
        }
    }
    let liminf = DiscreteSet {
        grid: grid.clone(),
        members: liminf,
    };
    let limsup = DiscreteSet { grid, members: limsup };
    Ok(if liminf == limsup {
        FellOutcome::Limit(liminf)
    } else {
        FellOutcome::Diverges { liminf, limsup }
    })
}

/// Real or integer coordinate, possibly the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ext<T> {
    Finite(T),
    Infinite,
}

impl<T: Copy + PartialOrd + Default> Ext<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(x) => Some(x),
            Self::Infinite => None,
        }
    }

    fn nonnegative(&self) -> bool {
        match *self {
            Self::Finite(x) => x >= T::default(),
            Self::Infinite => true,
        }
    }
}

/// A closed set of the form `X = P⁻¹a` or a limit of such. Coordinates
/// record the upper-right corner: `x ↔ (−∞, x]`, `∞ ↔` the whole line.
/// Values below zero are the extra translates `Ω a⁻¹` allowed in `Ω̃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OmegaPoint {
    Halfline(Ext<f64>),
    Discrete(Ext<i64>),
    Cone2d(Ext<f64>, Ext<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupElement {
    Real(f64),
    Int(i64),
    Plane(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaClass {
    Interior,
    Boundary,
}

fn shift_ext_f(x: Ext<f64>, g: f64) -> Ext<f64> {
    match x {
        Ext::Finite(v) => Ext::Finite(v + g),
        Ext::Infinite => Ext::Infinite,
    }
}

/// `−g ≤ x` with `x = ∞` containing every element.
fn contains_ext<T: Copy + PartialOrd>(x: Ext<T>, neg_g: T) -> bool {
    match x {
        Ext::Finite(v) => neg_g <= v,
        Ext::Infinite => true,
    }
}

impl OmegaPoint {
    pub fn halfline(x: f64) -> Self {
        Self::Halfline(Ext::Finite(x))
    }

    pub fn discrete(n: i64) -> Self {
        Self::Discrete(Ext::Finite(n))
    }

    /// Membership in `Ω` itself rather than `Ω̃`.
    pub fn in_omega(&self) -> bool {
        match *self {
            Self::Halfline(x) => x.nonnegative(),
            Self::Discrete(n) => n.nonnegative(),
            Self::Cone2d(x, y) => x.nonnegative() && y.nonnegative(),
        }
    }

    /// Right translate `X·g = X + g`.
    pub fn translate(&self, g: GroupElement) -> Result<Self> {
        match (*self, g) {
            (Self::Halfline(x), GroupElement::Real(t)) => Ok(Self::Halfline(shift_ext_f(x, t))),
            (Self::Discrete(n), GroupElement::Int(k)) => Ok(Self::Discrete(match n {
                Ext::Finite(v) => Ext::Finite(
                    v.checked_add(k)
                        .ok_or_else(|| Error::Range("integer overflow in translate".into()))?,
                ),
                Ext::Infinite => Ext::Infinite,
            })),
            (Self::Cone2d(x, y), GroupElement::Plane(s, t)) => Ok(Self::Cone2d(shift_ext_f(x, s), shift_ext_f(y, t))),
            _ => Err(Error::InvalidInput("group element does not match the model".into())),
        }
    }

    /// `g⁻¹ ∈ X`, read directly off the set.
    pub fn contains_inverse(&self, g: GroupElement) -> Result<bool> {
        match (*self, g) {
            (Self::Halfline(x), GroupElement::Real(t)) => Ok(contains_ext(x, -t)),
            (Self::Discrete(n), GroupElement::Int(k)) => Ok(contains_ext(n, -k)),
            (Self::Cone2d(x, y), GroupElement::Plane(s, t)) => Ok(contains_ext(x, -s) && contains_ext(y, -t)),
            _ => Err(Error::InvalidInput("group element does not match the model".into())),
        }
    }

    /// The closed set this point stands for, on a grid of the ambient group.
    pub fn to_closed_set(&self, grid: Grid) -> ClosedSetModel {
        let point = *self;
        ClosedSetModel::new(grid, move |p| match point {
            OmegaPoint::Halfline(x) => contains_ext(x, p[0]),
            OmegaPoint::Discrete(n) => contains_ext(n.finite().map(|v| v as f64).map_or(Ext::Infinite, Ext::Finite), p[0]),
            OmegaPoint::Cone2d(x, y) => contains_ext(x, p[0]) && contains_ext(y, p[1]),
        })
    }
}

/// `X·g ∈ Ω` for `X ∈ Ω̃`; checked against the independent test `g⁻¹ ∈ X`.
pub fn omega_translate_membership(a: &OmegaPoint, g: GroupElement) -> Result<bool> {
    let via_translate = a.translate(g)?.in_omega();
    let via_set = a.contains_inverse(g)?;
    if via_translate != via_set {
        return Err(Error::Invariant(format!(
            "translate test {via_translate} and set test {via_set} disagree at {a:?}, {g:?}"
        )));
    }
    Ok(via_translate)
}

/// Membership of `g` in `Q_X`, for `X ∈ Ω`.
pub fn omega_qset(x: &OmegaPoint, g: GroupElement) -> Result<bool> {
    if !x.in_omega() {
        return Err(Error::InvalidInput(format!("{x:?} is not a point of Ω")));
    }
    omega_translate_membership(x, g)
}

/// Interior points meet the interior of `P`; for the discrete model the
/// interior of `ℕ` is taken to be `{1, 2, …}`.
pub fn classify_omega(x: &OmegaPoint) -> Result<OmegaClass> {
    if !x.in_omega() {
        return Err(Error::InvalidInput(format!("{x:?} is not a point of Ω")));
    }
    let boundary = match *x {
        OmegaPoint::Halfline(v) => v == Ext::Finite(0.0),
        OmegaPoint::Discrete(n) => n == Ext::Finite(0),
        OmegaPoint::Cone2d(a, b) => a == Ext::Finite(0.0) || b == Ext::Finite(0.0),
    };
    Ok(if boundary {
        OmegaClass::Boundary
    } else {
        OmegaClass::Interior
    })
}
