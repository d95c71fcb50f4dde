//! JSON instance files.
//!
//! Layout: integer fields `"n"`, `"s"`, `"k"`, `"m"`, `"m_eq"`; `"objective"` and each
//! entry of `"quad_constraints"` as `{"Q": [n·n row-major], "q": [n], "c": real}`;
//! `"A"`/`"b"` and `"A_eq"`/`"b_eq"` with row-major matrices; `"box"` with `"lower"` and
//! `"upper"` arrays where the strings `"-inf"` and `"inf"` stand for unbounded ends;
//! optional `"x_star"` and free-form `"meta"`.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::generators::InstanceBundle;
use crate::linalg::Matrix;
use crate::problem::{BoxSet, PrimalDualPoint, ProblemParts, QuadraticForm, SqcqpProblem};

/// A box bound that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Bound(f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            v if v == f64::INFINITY => s.serialize_str("inf"),
            v if v == f64::NEG_INFINITY => s.serialize_str("-inf"),
            v => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Bound(v)),
            Raw::Str(s) if s == "inf" => Ok(Bound(f64::INFINITY)),
            Raw::Str(s) if s == "-inf" => Ok(Bound(f64::NEG_INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number, \"inf\" or \"-inf\", got {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFile {
    #[serde(rename = "Q")]
    q_mat: Vec<f64>,
    q: Vec<f64>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxFile {
    lower: Vec<Bound>,
    upper: Vec<Bound>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    s: usize,
    k: usize,
    m: usize,
    m_eq: usize,
    objective: FormFile,
    quad_constraints: Vec<FormFile>,
    #[serde(rename = "A")]
    a: Vec<f64>,
    b: Vec<f64>,
    #[serde(rename = "A_eq")]
    a_eq: Vec<f64>,
    b_eq: Vec<f64>,
    #[serde(rename = "box")]
    bounds: BoxFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_star: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    meta: Map<String, Value>,
}

/// A problem read from or written to an instance file.
#[derive(Clone, Debug)]
pub struct Instance {
    pub problem: SqcqpProblem<f64>,
    pub x_star: Option<Vec<f64>>,
    pub meta: Map<String, Value>,
}

impl From<InstanceBundle> for Instance {
    fn from(b: InstanceBundle) -> Self {
        let mut meta = b.meta;
        if let Some(split) = b.cca_split {
            meta.insert("cca_split".into(), split.into());
        }
        Self { problem: b.problem, x_star: b.x_star, meta }
    }
}

impl Instance {
    /// `"recommended_tau"` from the metadata, if present.
    pub fn recommended_tau(&self) -> Option<f64> {
        self.meta.get("recommended_tau").and_then(Value::as_f64)
    }

    /// `"cca_split"` from the metadata, if present.
    pub fn cca_split(&self) -> Option<usize> {
        self.meta.get("cca_split").and_then(Value::as_u64).map(|v| v as usize)
    }
}

fn form_to_file(f: &QuadraticForm<f64>) -> FormFile {
    FormFile { q_mat: f.q_mat().data().to_vec(), q: f.q_vec().to_vec(), c: f.constant() }
}

fn matrix(rows: usize, cols: usize, data: Vec<f64>, field: &str) -> Result<Matrix<f64>> {
    if data.len() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "{field}: expected {rows}x{cols} = {} entries, got {}",
            rows * cols,
            data.len()
        )));
    }
    Matrix::from_row_major(rows, cols, data)
}

fn vector(len: usize, data: Vec<f64>, field: &str) -> Result<Vec<f64>> {
    if data.len() != len {
        return Err(Error::ShapeMismatch(format!("{field}: expected {len} entries, got {}", data.len())));
    }
    Ok(data)
}

fn form_from_file(f: FormFile, n: usize, field: &str) -> Result<QuadraticForm<f64>> {
    let q = matrix(n, n, f.q_mat, &format!("{field}.Q"))?;
    let v = vector(n, f.q, &format!("{field}.q"))?;
    QuadraticForm::new(q, v, f.c)
}

impl InstanceFile {
    fn into_instance(self) -> Result<Instance> {
        let n = self.n;
        if self.quad_constraints.len() != self.k {
            return Err(Error::ShapeMismatch(format!(
                "quad_constraints: \"k\" is {} but {} forms are given",
                self.k,
                self.quad_constraints.len()
            )));
        }
        let lower = self.bounds.lower.into_iter().map(|b| b.0).collect();
        let upper = self.bounds.upper.into_iter().map(|b| b.0).collect();
        let mut parts = ProblemParts::new(form_from_file(self.objective, n, "objective")?, self.s)
            .with_linear(matrix(self.m, n, self.a, "A")?, vector(self.m, self.b, "b")?)
            .with_equality(matrix(self.m_eq, n, self.a_eq, "A_eq")?, vector(self.m_eq, self.b_eq, "b_eq")?)
            .with_bounds(BoxSet::new(vector(n, lower, "box.lower")?, vector(n, upper, "box.upper")?)?);
        for (i, f) in self.quad_constraints.into_iter().enumerate() {
            parts = parts.with_quad_constraint(form_from_file(f, n, &format!("quad_constraints[{i}]"))?);
        }
        let x_star = self.x_star.map(|x| vector(n, x, "x_star")).transpose()?;
        Ok(Instance { problem: parts.build()?, x_star, meta: self.meta })
    }
}

fn instance_file(inst: &Instance) -> InstanceFile {
    let p = &inst.problem;
    InstanceFile {
        n: p.n(),
        s: p.s(),
        k: p.k(),
        m: p.m(),
        m_eq: p.m_eq(),
        objective: form_to_file(p.objective()),
        quad_constraints: p.quad_constraints().iter().map(form_to_file).collect(),
        a: p.a().data().to_vec(),
        b: p.b().to_vec(),
        a_eq: p.a_eq().data().to_vec(),
        b_eq: p.b_eq().to_vec(),
        bounds: BoxFile {
            lower: p.bounds().lower().iter().map(|&v| Bound(v)).collect(),
            upper: p.bounds().upper().iter().map(|&v| Bound(v)).collect(),
        },
        x_star: inst.x_star.clone(),
        meta: inst.meta.clone(),
    }
}

/// Parses an instance; errors name the offending field.
pub fn instance_from_str(text: &str) -> Result<Instance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile =
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse(format!("at `{}`: {}", e.path(), e.inner())))?;
    file.into_instance()
}

pub fn instance_to_string(inst: &Instance) -> Result<String> {
    serde_json::to_string(&instance_file(inst)).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    std::fs::write(path, instance_to_string(inst)?)?;
    Ok(())
}

/// Parses a point for `p`: a bare array of `n` reals (zero multipliers), an object
/// with `"x"` and optionally `"nu"`, `"mu"`, `"lambda"`, `"zeta"`, or a solve report
/// holding such an object under `"final_point"`.
pub fn point_from_str(text: &str, p: &SqcqpProblem<f64>) -> Result<PrimalDualPoint<f64>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let entries = |v: &Value, field: &str| -> Result<Vec<f64>> {
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("point field {field}: {e}")))
    };
    let point = match &v {
        Value::Array(_) => PrimalDualPoint::from_x(p, entries(&v, "x")?),
        Value::Object(o) => {
            let obj = o.get("final_point").and_then(Value::as_object).unwrap_or(o);
            let x = obj.get("x").ok_or_else(|| Error::Parse("point object has no \"x\" field".into()))?;
            let mut y = PrimalDualPoint::from_x(p, entries(x, "x")?);
            for (name, slot) in [("nu", &mut y.nu), ("mu", &mut y.mu), ("lambda", &mut y.lambda), ("zeta", &mut y.zeta)]
            {
                if let Some(val) = obj.get(name) {
                    *slot = entries(val, name)?;
                }
            }
            y
        }
        _ => return Err(Error::Parse("point must be an array or an object".into())),
    };
    point.check_dims(p)?;
    Ok(point)
}
