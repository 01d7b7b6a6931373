//! JSON encodings of matrices, algebras, set sequences, symbols, sections
//! and desk-algebra elements.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fell::{Ambient, ClosedSetModel, Grid, SetShape};
use crate::fibers::TrigPoly;
use crate::groupoid::{Arrow, GroupoidSection, Unit};
use crate::jordan::JordanAlgebra;
use crate::spectra::{ComplexMatrix, C64, DEFAULT_TOL};
use crate::toeplitz::SymbolFunction;

/// `{"d": n, "re": [[…]], "im": [[…]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let d = self.d;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !shape_ok(&self.re) || !self.im.as_ref().is_none_or(shape_ok) {
            return Err(Error::InvalidInput(format!("matrix rows do not match d = {d}")));
        }
        let mut data = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let im = self.im.as_ref().map_or(0.0, |m| m[r][c]);
                data.push(C64::new(self.re[r][c], im));
            }
        }
        ComplexMatrix::new(d, data)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        Self {
            d,
            re: (0..d).map(|r| (0..d).map(|c| m[(r, c)].re).collect()).collect(),
            im: Some((0..d).map(|r| (0..d).map(|c| m[(r, c)].im).collect()).collect()),
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixJson::deserialize(d)?.to_matrix().map_err(D::Error::custom)
    }
}

/// `{"d": n, "basis": [matrix, …]}`; the span is closed up on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub d: usize,
    pub basis: Vec<ComplexMatrix>,
}

impl AlgebraJson {
    pub fn to_algebra(&self, tol: f64) -> Result<JordanAlgebra> {
        JordanAlgebra::from_generators_checked(self.d, &self.basis, tol)
    }

    pub fn from_algebra(v: &JordanAlgebra) -> Self {
        Self {
            d: v.dim(),
            basis: v.basis().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowJson {
    Line([f64; 2]),
    Box(Vec<[f64; 2]>),
}

/// `{"ambient": "R", "window": [lo, hi], "step": h, "sets": [shape, …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSequenceJson {
    pub ambient: Ambient,
    pub window: WindowJson,
    #[serde(default = "default_step")]
    pub step: f64,
    pub sets: Vec<SetShape>,
}

fn default_step() -> f64 {
    1.0
}

impl SetSequenceJson {
    pub fn grid(&self) -> Result<Grid> {
        let window = match &self.window {
            WindowJson::Line([lo, hi]) => vec![(*lo, *hi)],
            WindowJson::Box(axes) => axes.iter().map(|[lo, hi]| (*lo, *hi)).collect(),
        };
        Grid::new(self.ambient, window, self.step)
    }

    pub fn to_models(&self) -> Result<Vec<ClosedSetModel>> {
        let grid = self.grid()?;
        Ok(self
            .sets
            .iter()
            .map(|s| ClosedSetModel::from_shape(grid.clone(), s.clone()))
            .collect())
    }
}

/// `{"k": 2, "support": [-1, 0, 1], "values": {"-1": matrix, …}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolJson {
    pub k: usize,
    #[serde(default)]
    pub support: Option<Vec<i64>>,
    pub values: BTreeMap<String, ComplexMatrix>,
}

impl SymbolJson {
    pub fn to_symbol(&self) -> Result<SymbolFunction> {
        let mut values = BTreeMap::new();
        for (key, m) in &self.values {
            let g: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("symbol key {key:?} is not an integer")))?;
            values.insert(g, m.clone());
        }
        if let Some(support) = &self.support {
            let mut declared = support.clone();
            declared.sort_unstable();
            declared.dedup();
            if declared != values.keys().copied().collect::<Vec<_>>() {
                return Err(Error::InvalidInput("declared support does not match the values".into()));
            }
        }
        SymbolFunction::from_map(self.k, values)
    }

    pub fn from_symbol(f: &SymbolFunction) -> Self {
        Self {
            k: f.k(),
            support: Some(f.support()),
            values: f.iter().map(|(g, m)| (g.to_string(), m.clone())).collect(),
        }
    }
}

impl Serialize for Unit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Unit::Finite(n) => s.serialize_i64(*n),
            Unit::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Unit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) if n >= 0 => Ok(Unit::Finite(n)),
            Raw::Int(n) => Err(D::Error::custom(format!("unit {n} is negative"))),
            Raw::Text(t) if t == "inf" => Ok(Unit::Infinity),
            Raw::Text(t) => Err(D::Error::custom(format!("unknown unit {t:?}"))),
        }
    }
}

/// One entry of a section file: `{"X": 3 | "inf", "g": -1, "value": matrix}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionEntryJson {
    #[serde(rename = "X")]
    pub x: Unit,
    pub g: i64,
    pub value: ComplexMatrix,
}

pub fn section_from_json(entries: &[SectionEntryJson]) -> Result<GroupoidSection<ComplexMatrix>> {
    let mut s = GroupoidSection::new();
    for e in entries {
        s.insert(Arrow::new(e.x, e.g)?, e.value.clone())?;
    }
    Ok(s)
}

pub fn section_to_json(s: &GroupoidSection<ComplexMatrix>) -> Vec<SectionEntryJson> {
    s.iter()
        .map(|(a, v)| SectionEntryJson {
            x: a.x,
            g: a.g,
            value: v.clone(),
        })
        .collect()
}

/// `{"coeffs": {"-2": [re, im], …}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrigPolyJson {
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

impl TrigPolyJson {
    pub fn to_poly(&self) -> Result<TrigPoly> {
        let mut coeffs = BTreeMap::new();
        for (key, [re, im]) in &self.coeffs {
            let j: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("coefficient key {key:?} is not an integer")))?;
            coeffs.insert(j, C64::new(*re, *im));
        }
        Ok(TrigPoly::new(coeffs))
    }

    pub fn from_poly(p: &TrigPoly) -> Self {
        Self {
            coeffs: p.coeffs().iter().map(|(j, c)| (j.to_string(), [c.re, c.im])).collect(),
        }
    }
}

/// Default tolerance for parsing user matrices that must be Hermitian.
pub const PARSE_TOL: f64 = DEFAULT_TOL;
