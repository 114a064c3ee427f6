// SPDX-License-Identifier: Apache-2.0
//! JSON documents for matrices, tensors, points and tangents.
//!
//! Floats are written with 17 significant digits so every value survives a
//! round trip. Matrices and tensors share the layout
//! `{"shape": [...], "data": [...]}` with row-major data.

use std::io::{self, Write};
use std::path::Path;

use homtensor_core::cp::CpShape;
use homtensor_core::gl::{HorizontalBlocks, ModeBlocks};
use homtensor_core::homogeneous::{HomogeneousShape, Point, Tangent};
use homtensor_core::tt::TtShape;
use homtensor_core::tucker::TuckerShape;
use homtensor_core::{DenseTensor, Matrix, Permutation};
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

use crate::error::{ToolError, ToolResult};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArrayDoc {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl ArrayDoc {
    pub fn from_matrix(m: &Matrix) -> Self {
        Self { shape: vec![m.rows(), m.cols()], data: m.data().to_vec() }
    }
    pub fn from_tensor(t: &DenseTensor) -> Self {
        Self { shape: t.shape().to_vec(), data: t.data().to_vec() }
    }
    pub fn to_matrix(&self, location: &str) -> ToolResult<Matrix> {
        match self.shape[..] {
            [r, c] => Matrix::from_vec(r, c, self.data.clone()).map_err(|e| ToolError::parse(location, e)),
            _ => Err(ToolError::parse(location, format!("matrix needs a 2-entry shape, got {:?}", self.shape))),
        }
    }
    pub fn to_tensor(&self, location: &str) -> ToolResult<DenseTensor> {
        DenseTensor::new(self.shape.clone(), self.data.clone()).map_err(|e| ToolError::parse(location, e))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModeDoc {
    pub k: usize,
    pub perm: Vec<usize>,
    pub g11: ArrayDoc,
    pub g21: ArrayDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub manifold: String,
    pub dims: Vec<usize>,
    /// `[r]` for CP, `t₁…t_d` for Tucker, `s₁…s_{d−1}` for TT.
    pub ranks: Vec<usize>,
    pub modes: Vec<ModeDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TangentModeDoc {
    pub x11: ArrayDoc,
    pub x21: ArrayDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TangentDoc {
    pub manifold: String,
    pub modes: Vec<TangentModeDoc>,
}

/// Shapes that can be named in a point file.
pub trait FileShape: HomogeneousShape + Sized {
    fn file_ranks(&self) -> Vec<usize>;
    fn from_file(dims: Vec<usize>, ranks: Vec<usize>) -> homtensor_core::Result<Self>;
}

impl FileShape for CpShape {
    fn file_ranks(&self) -> Vec<usize> {
        vec![self.rank()]
    }
    fn from_file(dims: Vec<usize>, ranks: Vec<usize>) -> homtensor_core::Result<Self> {
        match ranks[..] {
            [r] => CpShape::new(dims, r),
            _ => Err(homtensor_core::Error::InvalidShape("CP files carry one rank".into())),
        }
    }
}

impl FileShape for TuckerShape {
    fn file_ranks(&self) -> Vec<usize> {
        self.ranks().to_vec()
    }
    fn from_file(dims: Vec<usize>, ranks: Vec<usize>) -> homtensor_core::Result<Self> {
        TuckerShape::new(dims, ranks)
    }
}

impl FileShape for TtShape {
    fn file_ranks(&self) -> Vec<usize> {
        self.ranks().to_vec()
    }
    fn from_file(dims: Vec<usize>, ranks: Vec<usize>) -> homtensor_core::Result<Self> {
        TtShape::new(dims, ranks)
    }
}

pub fn point_doc<S: FileShape>(p: &Point<S>) -> PointDoc {
    PointDoc {
        manifold: p.shape().tag().into(),
        dims: p.shape().dims().to_vec(),
        ranks: p.shape().file_ranks(),
        modes: p
            .modes()
            .iter()
            .map(|m| ModeDoc {
                k: m.k(),
                perm: m.perm().image().to_vec(),
                g11: ArrayDoc::from_matrix(&m.g11()),
                g21: ArrayDoc::from_matrix(&m.g21()),
            })
            .collect(),
    }
}

pub fn tangent_doc<S: FileShape>(p: &Point<S>, x: &Tangent) -> TangentDoc {
    TangentDoc {
        manifold: p.shape().tag().into(),
        modes: x
            .modes()
            .iter()
            .map(|h| TangentModeDoc { x11: ArrayDoc::from_matrix(&h.x11()), x21: ArrayDoc::from_matrix(&h.x21()) })
            .collect(),
    }
}

fn point_from_doc<S: FileShape>(doc: &PointDoc) -> ToolResult<Point<S>> {
    let shape = S::from_file(doc.dims.clone(), doc.ranks.clone()).map_err(|e| ToolError::parse("dims/ranks", e))?;
    let ks = shape.leading();
    if doc.modes.len() != ks.len() {
        return Err(ToolError::parse("modes", format!("expected {} modes, found {}", ks.len(), doc.modes.len())));
    }
    let mut modes = Vec::with_capacity(ks.len());
    for (i, (m, &k)) in doc.modes.iter().zip(&ks).enumerate() {
        let at = |field: &str| format!("modes[{i}].{field}");
        if m.k != k {
            return Err(ToolError::parse(at("k"), format!("expected {k}, found {}", m.k)));
        }
        let perm = Permutation::from_vec(m.perm.clone()).map_err(|e| ToolError::parse(at("perm"), e))?;
        let n = doc.dims[i];
        if perm.len() != n {
            return Err(ToolError::parse(at("perm"), format!("length {} for extent {n}", perm.len())));
        }
        let g11 = m.g11.to_matrix(&at("g11"))?;
        let g21 = m.g21.to_matrix(&at("g21"))?;
        if g11.shape() != (k, k) || g21.shape() != (n - k, k) {
            return Err(ToolError::parse(at("g11/g21"), format!("blocks must be {k}x{k} and {}x{k}", n - k)));
        }
        modes.push(ModeBlocks::from_parts(perm, g11, g21).map_err(|e| ToolError::parse(at("g11"), e))?);
    }
    Point::from_modes(shape, modes).map_err(|e| ToolError::parse("modes", e))
}

fn tangent_from_doc<S: HomogeneousShape>(p: &Point<S>, doc: &TangentDoc) -> ToolResult<Tangent> {
    if doc.manifold != p.shape().tag() {
        return Err(ToolError::parse("manifold", format!("tangent is for {}, point is {}", doc.manifold, p.shape().tag())));
    }
    if doc.modes.len() != p.modes().len() {
        return Err(ToolError::parse("modes", format!("expected {} modes, found {}", p.modes().len(), doc.modes.len())));
    }
    let modes = doc
        .modes
        .iter()
        .zip(p.modes())
        .enumerate()
        .map(|(i, (m, b))| {
            let x11 = m.x11.to_matrix(&format!("modes[{i}].x11"))?;
            let x21 = m.x21.to_matrix(&format!("modes[{i}].x21"))?;
            if x11.shape() != (b.k(), b.k()) || x21.shape() != (b.n() - b.k(), b.k()) {
                return Err(ToolError::parse(format!("modes[{i}]"), "block sizes do not match the point"));
            }
            HorizontalBlocks::new(b, Matrix::vstack(&x11, &x21)).map_err(|e| ToolError::parse(format!("modes[{i}]"), e))
        })
        .collect::<ToolResult<Vec<_>>>()?;
    Ok(Tangent::from_modes(modes))
}

/// A point of any of the three manifolds, as read from a file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoint {
    Cp(Point<CpShape>),
    Tucker(Point<TuckerShape>),
    Tt(Point<TtShape>),
}

macro_rules! each {
    ($v:expr, $p:ident => $e:expr) => {
        match $v {
            AnyPoint::Cp($p) => $e,
            AnyPoint::Tucker($p) => $e,
            AnyPoint::Tt($p) => $e,
        }
    };
}

macro_rules! each_wrap {
    ($v:expr, $p:ident => $e:expr) => {
        match $v {
            AnyPoint::Cp($p) => AnyPoint::Cp($e),
            AnyPoint::Tucker($p) => AnyPoint::Tucker($e),
            AnyPoint::Tt($p) => AnyPoint::Tt($e),
        }
    };
}

impl AnyPoint {
    pub fn from_doc(doc: &PointDoc) -> ToolResult<Self> {
        Ok(match doc.manifold.as_str() {
            "cp" => Self::Cp(point_from_doc(doc)?),
            "tucker" => Self::Tucker(point_from_doc(doc)?),
            "tt" => Self::Tt(point_from_doc(doc)?),
            other => return Err(ToolError::parse("manifold", format!("unknown manifold {other:?}"))),
        })
    }
    pub fn to_doc(&self) -> PointDoc {
        each!(self, p => point_doc(p))
    }
    pub fn tag(&self) -> &'static str {
        each!(self, p => p.shape().tag())
    }
    pub fn embed(&self) -> DenseTensor {
        each!(self, p => p.embed())
    }
    pub fn tangent_from_doc(&self, doc: &TangentDoc) -> ToolResult<Tangent> {
        each!(self, p => tangent_from_doc(p, doc))
    }
    pub fn tangent_doc(&self, x: &Tangent) -> TangentDoc {
        each!(self, p => tangent_doc(p, x))
    }
    pub fn horizontal_residual(&self, x: &Tangent) -> ToolResult<f64> {
        Ok(each!(self, p => p.horizontal_residual(x))?)
    }
    pub fn geodesic(&self, x: &Tangent, t: f64) -> ToolResult<Self> {
        let mut ledger = homtensor_core::FlopLedger::new();
        Ok(each_wrap!(self, p => p.geodesic(x, t, &mut ledger)?))
    }
}

/// Writes floats with 17 significant digits.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoundTripFormatter;

impl Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        CompactFormatter.write_f32(writer, value)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTripFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn from_json_str<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> ToolResult<T> {
    serde_json::from_str(text).map_err(|e| {
        ToolError::parse(format!("{what}:{}:{}", e.line(), e.column()), e)
    })
}

pub fn read_point(path: &Path) -> ToolResult<AnyPoint> {
    let text = std::fs::read_to_string(path)?;
    AnyPoint::from_doc(&from_json_str(&text, &path.display().to_string())?).map_err(|e| match e {
        ToolError::Parse { location, message } => {
            ToolError::Parse { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}

pub fn read_tangent(path: &Path, at: &AnyPoint) -> ToolResult<Tangent> {
    let text = std::fs::read_to_string(path)?;
    at.tangent_from_doc(&from_json_str(&text, &path.display().to_string())?).map_err(|e| match e {
        ToolError::Parse { location, message } => {
            ToolError::Parse { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> ToolResult<()> {
    std::fs::write(path, to_json_string(value))?;
    Ok(())
}
