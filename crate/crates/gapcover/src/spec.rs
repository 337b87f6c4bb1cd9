//! Instance and GAP documents.
//!
//! Instance schema:
//!
//! ```text
//! {"dim": int, "body": {...}, "eps": rat?, "phi": [int]?, "budget": int?,
//!  "kind": str?, "seed": int?, "params": {...}?}
//! body: {"type":"vertices","points":[[rat,...],...]}
//!     | {"type":"ellipsoid","form":[[rat,...],...]}
//!     | {"type":"box","halfwidths":[rat,...]}
//!     | {"type":"ball","radius":rat}
//! ```
//!
//! A rational is a JSON integer or a string `"p/q"`, `"p"` or a decimal
//! such as `"3.5"`. GAP schema: `{"base":[int],"diffs":[[int]],"halfsides":[int]}`.

use std::fmt;

use gapcover_core::enumerate::Gap;
use gapcover_core::exactalg::{Int, Mat, Rat};
use gapcover_core::geomcore::{ConvexBody, Ellipsoid};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

/// Structured parse error with a JSON path such as `body.form[1]`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl ParseError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> ParseError {
        ParseError {
            path: path.into(),
            message: message.into(),
        }
    }
}

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
pub enum BodySpec {
    Vertices(Vec<Vec<Rat>>),
    Ellipsoid(Vec<Vec<Rat>>),
    Box(Vec<Rat>),
    Ball(Rat),
}

impl BodySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            BodySpec::Vertices(_) => "vertices",
            BodySpec::Ellipsoid(_) => "ellipsoid",
            BodySpec::Box(_) => "box",
            BodySpec::Ball(_) => "ball",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub dim: usize,
    pub body: BodySpec,
    pub eps: Option<Rat>,
    pub phi: Option<Vec<i64>>,
    pub budget: Option<u128>,
    /// Generator kind, when produced by [`crate::generate`].
    pub kind: Option<String>,
    pub seed: Option<u64>,
    pub params: Option<Value>,
}

impl InstanceSpec {
    pub fn new(body: BodySpec, dim: usize) -> InstanceSpec {
        InstanceSpec {
            dim,
            body,
            eps: None,
            phi: None,
            budget: None,
            kind: None,
            seed: None,
            params: None,
        }
    }

    /// Label for reports: the generator kind, else the body type.
    pub fn label(&self) -> String {
        self.kind.clone().unwrap_or_else(|| self.body.kind().to_string())
    }

    pub fn to_body(&self) -> PResult<ConvexBody> {
        let err = |e: gapcover_core::Error| ParseError::new("body", e.to_string());
        match &self.body {
            BodySpec::Vertices(p) => ConvexBody::vertices(p.clone()).map_err(err),
            BodySpec::Ellipsoid(f) => {
                let m = Mat::from_rows(f.clone()).map_err(err)?;
                Ellipsoid::new(m)
                    .map(ConvexBody::ellipsoid)
                    .map_err(|e| ParseError::new("body.form", e.to_string()))
            }
            BodySpec::Box(h) => ConvexBody::cube(h.clone()).map_err(err),
            BodySpec::Ball(r) => ConvexBody::ball(self.dim, r).map_err(err),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("dim".into(), json!(self.dim));
        let body = match &self.body {
            BodySpec::Vertices(p) => json!({"type": "vertices", "points": rat_rows(p)}),
            BodySpec::Ellipsoid(f) => json!({"type": "ellipsoid", "form": rat_rows(f)}),
            BodySpec::Box(h) => json!({"type": "box", "halfwidths": rat_list(h)}),
            BodySpec::Ball(r) => json!({"type": "ball", "radius": rat_str(r)}),
        };
        m.insert("body".into(), body);
        if let Some(e) = &self.eps {
            m.insert("eps".into(), rat_str(e));
        }
        if let Some(p) = &self.phi {
            m.insert("phi".into(), json!(p));
        }
        if let Some(b) = self.budget {
            m.insert("budget".into(), json!(b as u64));
        }
        if let Some(k) = &self.kind {
            m.insert("kind".into(), json!(k));
        }
        if let Some(s) = self.seed {
            m.insert("seed".into(), json!(s));
        }
        if let Some(p) = &self.params {
            m.insert("params".into(), p.clone());
        }
        Value::Object(m)
    }
}

pub fn rat_str(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn rat_list(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_str).collect())
}

pub fn rat_rows(v: &[Vec<Rat>]) -> Value {
    Value::Array(v.iter().map(|r| rat_list(r)).collect())
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: Int = p.trim().parse().ok()?;
        let q: Int = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| Rat::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = ip.starts_with('-');
        let whole: Int = if ip.is_empty() || ip == "-" || ip == "+" {
            Int::zero()
        } else {
            ip.parse().ok()?
        };
        let scale = num_bigint::BigInt::from(10).pow(fp.len() as u32);
        let frac: Int = fp.parse().ok()?;
        let mag = whole.abs() * &scale + frac;
        let v = Rat::new(mag, scale);
        return Some(if neg { -v } else { v });
    }
    s.parse::<Int>().ok().map(Rat::from_integer)
}

fn at(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn idx(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn rat_value(v: &Value, path: &str) -> PResult<Rat> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(Rat::from_integer(u.into()))
            } else {
                Err(ParseError::new(path, "non-integer number; write rationals as \"p/q\" strings"))
            }
        }
        Value::String(s) => parse_rat(s).ok_or_else(|| ParseError::new(path, format!("invalid rational {s:?}"))),
        _ => Err(ParseError::new(path, "expected a rational")),
    }
}

fn int_value(v: &Value, path: &str) -> PResult<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| ParseError::new(path, "expected a 64-bit integer")),
        Value::String(s) => s.trim().parse().map_err(|_| ParseError::new(path, "expected an integer")),
        _ => Err(ParseError::new(path, "expected an integer")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> PResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| ParseError::new(path, "expected an array"))
}

fn rat_vec(v: &Value, path: &str, len: Option<usize>) -> PResult<Vec<Rat>> {
    let a = array(v, path)?;
    if let Some(n) = len {
        if a.len() != n {
            return Err(ParseError::new(path, format!("expected {n} entries, found {}", a.len())));
        }
    }
    a.iter().enumerate().map(|(i, x)| rat_value(x, &idx(path, i))).collect()
}

fn int_vec(v: &Value, path: &str, len: Option<usize>) -> PResult<Vec<i64>> {
    let a = array(v, path)?;
    if let Some(n) = len {
        if a.len() != n {
            return Err(ParseError::new(path, format!("expected {n} entries, found {}", a.len())));
        }
    }
    a.iter().enumerate().map(|(i, x)| int_value(x, &idx(path, i))).collect()
}

fn rat_matrix(v: &Value, path: &str, cols: usize, rows: Option<usize>) -> PResult<Vec<Vec<Rat>>> {
    let a = array(v, path)?;
    if let Some(n) = rows {
        if a.len() != n {
            return Err(ParseError::new(path, format!("expected {n} rows, found {}", a.len())));
        }
    }
    a.iter()
        .enumerate()
        .map(|(i, r)| rat_vec(r, &idx(path, i), Some(cols)))
        .collect()
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> PResult<&'a Map<String, Value>> {
    let o = v.as_object().ok_or_else(|| ParseError::new(path, "expected an object"))?;
    if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(ParseError::new(at(path, k), "unknown field"));
    }
    Ok(o)
}

fn field<'a>(o: &'a Map<String, Value>, path: &str, key: &str) -> PResult<&'a Value> {
    o.get(key).ok_or_else(|| ParseError::new(at(path, key), "missing field"))
}

pub fn parse_json(text: &str) -> PResult<Value> {
    serde_json::from_str(text).map_err(|e| ParseError::new("$", e.to_string()))
}

pub fn parse_instance(text: &str) -> PResult<InstanceSpec> {
    parse_instance_value(&parse_json(text)?, "")
}

const INSTANCE_FIELDS: &[&str] = &["dim", "body", "eps", "phi", "budget", "kind", "seed", "params"];

pub fn parse_instance_value(v: &Value, path: &str) -> PResult<InstanceSpec> {
    let o = object(v, path, INSTANCE_FIELDS)?;
    let dpath = at(path, "dim");
    let dim = field(o, path, "dim")?
        .as_u64()
        .filter(|&d| d >= 1)
        .ok_or_else(|| ParseError::new(&dpath, "expected a positive integer"))? as usize;
    let bpath = at(path, "body");
    let bo = object(
        field(o, path, "body")?,
        &bpath,
        &["type", "points", "form", "halfwidths", "radius"],
    )?;
    let ty = field(bo, &bpath, "type")?
        .as_str()
        .ok_or_else(|| ParseError::new(at(&bpath, "type"), "expected a string"))?;
    let body = match ty {
        "vertices" => {
            let p = at(&bpath, "points");
            let pts = rat_matrix(field(bo, &bpath, "points")?, &p, dim, None)?;
            if pts.is_empty() {
                return Err(ParseError::new(p, "at least one point required"));
            }
            BodySpec::Vertices(pts)
        }
        "ellipsoid" => {
            let p = at(&bpath, "form");
            let f = rat_matrix(field(bo, &bpath, "form")?, &p, dim, Some(dim))?;
            for i in 0..dim {
                for j in 0..i {
                    if f[i][j] != f[j][i] {
                        return Err(ParseError::new(
                            format!("{p}[{i}][{j}]"),
                            "form is not symmetric",
                        ));
                    }
                }
            }
            BodySpec::Ellipsoid(f)
        }
        "box" => {
            let p = at(&bpath, "halfwidths");
            let h = rat_vec(field(bo, &bpath, "halfwidths")?, &p, Some(dim))?;
            if let Some(i) = h.iter().position(Signed::is_negative) {
                return Err(ParseError::new(idx(&p, i), "negative half-width"));
            }
            BodySpec::Box(h)
        }
        "ball" => {
            let p = at(&bpath, "radius");
            let r = rat_value(field(bo, &bpath, "radius")?, &p)?;
            if !r.is_positive() {
                return Err(ParseError::new(p, "radius must be positive"));
            }
            BodySpec::Ball(r)
        }
        other => {
            return Err(ParseError::new(at(&bpath, "type"), format!("unknown body type {other:?}")))
        }
    };
    let eps = match o.get("eps") {
        None => None,
        Some(e) => {
            let p = at(path, "eps");
            let r = rat_value(e, &p)?;
            if !r.is_positive() || r >= Rat::one() {
                return Err(ParseError::new(p, "eps must lie in (0, 1)"));
            }
            Some(r)
        }
    };
    let phi = o.get("phi").map(|v| int_vec(v, &at(path, "phi"), Some(dim))).transpose()?;
    let budget = o
        .get("budget")
        .map(|v| {
            v.as_u64()
                .map(u128::from)
                .ok_or_else(|| ParseError::new(at(path, "budget"), "expected a nonnegative integer"))
        })
        .transpose()?;
    let kind = o
        .get("kind")
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| ParseError::new(at(path, "kind"), "expected a string"))
        })
        .transpose()?;
    let seed = o
        .get("seed")
        .map(|v| v.as_u64().ok_or_else(|| ParseError::new(at(path, "seed"), "expected an integer")))
        .transpose()?;
    let spec = InstanceSpec {
        dim,
        body,
        eps,
        phi,
        budget,
        kind,
        seed,
        params: o.get("params").cloned(),
    };
    spec.to_body().map_err(|e| ParseError::new(at(path, &e.path), e.message))?;
    Ok(spec)
}

pub fn parse_gap_value(v: &Value, path: &str, dim: usize) -> PResult<Gap> {
    let o = object(v, path, &["base", "diffs", "halfsides"])?;
    let base = int_vec(field(o, path, "base")?, &at(path, "base"), Some(dim))?;
    let dp = at(path, "diffs");
    let diffs: Vec<Vec<i64>> = array(field(o, path, "diffs")?, &dp)?
        .iter()
        .enumerate()
        .map(|(i, w)| int_vec(w, &idx(&dp, i), Some(dim)))
        .collect::<PResult<_>>()?;
    let hp = at(path, "halfsides");
    let hs = int_vec(field(o, path, "halfsides")?, &hp, Some(diffs.len()))?;
    let halfsides = hs
        .iter()
        .enumerate()
        .map(|(i, &n)| u64::try_from(n).map_err(|_| ParseError::new(idx(&hp, i), "negative half-side")))
        .collect::<PResult<_>>()?;
    Gap::new(base, diffs, halfsides).map_err(|e| ParseError::new(path, e.to_string()))
}

pub fn gap_json(g: &Gap) -> Value {
    json!({
        "base": g.base(),
        "diffs": g.diffs(),
        "halfsides": g.halfsides(),
    })
}

/// One batch or verify item: an instance, optionally with a claimed GAP.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub instance: InstanceSpec,
    pub gap: Option<Gap>,
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={}", self.instance.label(), self.instance.dim)
    }
}

/// Accepts a bare instance or `{"instance": ..., "gap": ...}`.
pub fn parse_item_value(v: &Value, path: &str) -> PResult<Item> {
    if v.get("instance").is_some() {
        let o = object(v, path, &["instance", "gap"])?;
        let instance = parse_instance_value(&o["instance"], &at(path, "instance"))?;
        let gap = o
            .get("gap")
            .map(|g| parse_gap_value(g, &at(path, "gap"), instance.dim))
            .transpose()?;
        Ok(Item { instance, gap })
    } else {
        Ok(Item {
            instance: parse_instance_value(v, path)?,
            gap: None,
        })
    }
}

/// A JSON array of items, `{"instances": [...]}`, or a single item.
pub fn parse_items(text: &str) -> PResult<Vec<Item>> {
    let v = parse_json(text)?;
    let (list, path) = match &v {
        Value::Array(a) => (a.as_slice(), String::new()),
        Value::Object(o) if o.contains_key("instances") => (
            array(&o["instances"], "instances")?.as_slice(),
            "instances".to_string(),
        ),
        _ => return Ok(vec![parse_item_value(&v, "")?]),
    };
    list.iter()
        .enumerate()
        .map(|(i, x)| parse_item_value(x, &idx(&path, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rat("3/6"), Some(Rat::new(1.into(), 2.into())));
        assert_eq!(parse_rat("-3.25"), Some(Rat::new((-13).into(), 4.into())));
        assert_eq!(parse_rat("7"), Some(Rat::from_integer(7.into())));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
    }
}
