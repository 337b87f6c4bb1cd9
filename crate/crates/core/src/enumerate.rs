//! Exact lattice-point enumeration and counting.
//!
//! Point sets are kept deduplicated in descending lexicographic order; the
//! body scan walks its bounding box in the same order, so the first
//! counterexample reported by [`subset_check`] is deterministic.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{self, Int, IntMat, Mat, Rat};
use crate::geomcore::{BodyRep, ConvexBody, Facets, lp};

/// Default enumeration budget.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

pub type Point = Vec<i64>;

fn desc(a: &[i64], b: &[i64]) -> Ordering {
    b.cmp(a)
}

/// Deduplicated integer points of a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(dim: usize, mut points: Vec<Point>) -> Result<PointSet> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: p.len(),
            });
        }
        points.sort_by(|a, b| desc(a, b));
        points.dedup();
        Ok(PointSet { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| desc(q, p)).is_ok()
    }

    /// Whether `x ∈ S ⇔ −x ∈ S`.
    pub fn is_symmetric(&self) -> bool {
        self.points.iter().all(|p| {
            let neg: Vec<i64> = p.iter().map(|x| -x).collect();
            self.contains(&neg)
        })
    }
}

/// Exact membership test for integer points, compiled from a body.
#[derive(Clone, Debug)]
pub enum Membership {
    /// `|c·p| ≤ den` for every `(c, den)`.
    Facets(Vec<(Vec<Int>, Int)>),
    Hull(Vec<Vec<Rat>>),
    /// `pᵀ·num·p ≤ den`
    Quadratic { num: IntMat, den: Int },
    Box(Vec<Int>),
}

impl Membership {
    pub fn compile(b: &ConvexBody) -> Result<Membership> {
        Ok(match b.rep() {
            BodyRep::Vertices(vs) => match Facets::of_vertices(vs) {
                Ok(f) => Membership::Facets(
                    f.normals()
                        .iter()
                        .map(|c| {
                            let den = exactalg::common_denominator(c);
                            let r = Rat::from_integer(den.clone());
                            (c.iter().map(|x| (x * &r).to_integer()).collect(), den)
                        })
                        .collect(),
                ),
                Err(Error::Rank { .. }) => Membership::Hull(vs.clone()),
                Err(e) => return Err(e),
            },
            BodyRep::Ellipsoid(e) => {
                let (num, den) = e.form().integerize();
                Membership::Quadratic { num, den }
            }
            BodyRep::Box(h) => Membership::Box(h.iter().map(|x| x.floor().to_integer()).collect()),
        })
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        match self {
            Membership::Facets(fs) => {
                let x = to_int(p);
                fs.iter().all(|(c, den)| {
                    let s: Int = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                    s.abs() <= *den
                })
            }
            Membership::Hull(vs) => lp::in_symmetric_hull(vs, &to_rat(p)),
            Membership::Quadratic { num, den } => quad_int(num, &to_int(p)) <= *den,
            Membership::Box(t) => p.iter().zip(t).all(|(x, t)| Int::from(x.abs()) <= *t),
        }
    }
}

fn quad_int(num: &IntMat, x: &[Int]) -> Int {
    let mut s = Int::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let row: Int = num.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        s += xi * row;
    }
    s
}

/// Integer points of `{x : xᵀAx ≤ 1}` coordinate by coordinate.
///
/// Level `j` holds the form of the projection onto the first `j + 1`
/// coordinates, `((A⁻¹)_{≤j})⁻¹`, integerized. With the prefix fixed, the
/// admissible values `t` of coordinate `j` solve `a·t² + 2b·t + c ≤ den`,
/// i.e. `|a·t + b| ≤ isqrt(b² − a(c − den))`, which is exact in integers.
fn scan_ellipsoid(form: &Mat, out: &mut Vec<Point>) -> Result<()> {
    let d = form.rows();
    let inv = exactalg::inverse(form)?;
    let levels: Vec<(IntMat, Int)> = (1..=d)
        .map(|j| {
            let block = Mat::from_rows((0..j).map(|i| inv.row(i)[..j].to_vec()).collect())?;
            Ok(exactalg::inverse(&block)?.integerize())
        })
        .collect::<Result<_>>()?;
    let mut prefix: Vec<i64> = Vec::with_capacity(d);
    descend(&levels, &mut prefix, out)
}

fn descend(levels: &[(IntMat, Int)], prefix: &mut Vec<i64>, out: &mut Vec<Point>) -> Result<()> {
    let j = prefix.len();
    if j == levels.len() {
        out.push(prefix.clone());
        return Ok(());
    }
    let (num, den) = &levels[j];
    let x = to_int(prefix);
    let a = &num[(j, j)];
    let b: Int = (0..j).map(|i| &num[(j, i)] * &x[i]).sum();
    let mut c = Int::zero();
    for i in 0..j {
        let row: Int = (0..j).map(|k| &num[(i, k)] * &x[k]).sum();
        c += &x[i] * row;
    }
    let disc = &b * &b - a * (c - den);
    if disc.is_negative() {
        return Ok(());
    }
    let s = disc.sqrt();
    let lo = -(&b + &s).div_floor(a);
    let hi = (&s - &b).div_floor(a);
    let lo = lo.to_i64().ok_or(Error::Overflow("ellipsoid scan"))?;
    let hi = hi.to_i64().ok_or(Error::Overflow("ellipsoid scan"))?;
    let mut t = hi;
    while t >= lo {
        prefix.push(t);
        descend(levels, prefix, out)?;
        prefix.pop();
        t -= 1;
    }
    Ok(())
}

pub fn to_rat(p: &[i64]) -> Vec<Rat> {
    p.iter().map(|&x| exactalg::rat(x)).collect()
}

pub fn to_int(p: &[i64]) -> Vec<Int> {
    p.iter().map(|&x| Int::from(x)).collect()
}

/// Every point of `[-t₀, t₀] × … × [-t_{d−1}, t_{d−1}]` in descending
/// lexicographic order, passed to `f`.
fn scan_box(bounds: &[i64], mut f: impl FnMut(&[i64])) {
    let d = bounds.len();
    if d == 0 {
        f(&[]);
        return;
    }
    let mut p: Vec<i64> = bounds.to_vec();
    loop {
        f(&p);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if p[i] > -bounds[i] {
                p[i] -= 1;
                break;
            }
            p[i] = bounds[i];
        }
    }
}

fn box_volume(bounds: &[i64]) -> u128 {
    bounds
        .iter()
        .try_fold(1u128, |acc, &b| acc.checked_mul(2 * b as u128 + 1))
        .unwrap_or(u128::MAX)
}

/// Integer points of `b`. Fails fast when the bounding box exceeds `cap`.
pub fn enum_body(b: &ConvexBody, cap: u128) -> Result<PointSet> {
    let bounds: Vec<i64> = b
        .integer_bounds()?
        .iter()
        .map(|t| t.to_i64().ok_or(Error::Overflow("bounding box")))
        .collect::<Result<_>>()?;
    let volume = box_volume(&bounds);
    if volume > cap {
        return Err(Error::Budget { needed: volume, cap });
    }
    let mut points = Vec::new();
    if let BodyRep::Ellipsoid(e) = b.rep() {
        scan_ellipsoid(e.form(), &mut points)?;
    } else {
        let m = Membership::compile(b)?;
        scan_box(&bounds, |p| {
            if m.contains(p) {
                points.push(p.to_vec());
            }
        });
    }
    Ok(PointSet {
        dim: b.dim(),
        points,
    })
}

/// `{base + Σ mᵢwᵢ : |mᵢ| ≤ nᵢ}`; symmetric about `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gap {
    base: Point,
    diffs: Vec<Point>,
    halfsides: Vec<u64>,
}

impl Gap {
    pub fn new(base: Point, diffs: Vec<Point>, halfsides: Vec<u64>) -> Result<Gap> {
        let d = base.len();
        if let Some(w) = diffs.iter().find(|w| w.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                found: w.len(),
            });
        }
        if diffs.len() != halfsides.len() {
            return Err(Error::Dimension {
                expected: diffs.len(),
                found: halfsides.len(),
            });
        }
        Ok(Gap {
            base,
            diffs,
            halfsides,
        })
    }

    /// The single point `{0}` in dimension `dim`.
    pub fn origin(dim: usize) -> Gap {
        Gap {
            base: vec![0; dim],
            diffs: Vec::new(),
            halfsides: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Number of difference vectors.
    pub fn rank(&self) -> usize {
        self.diffs.len()
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    pub fn diffs(&self) -> &[Point] {
        &self.diffs
    }

    pub fn halfsides(&self) -> &[u64] {
        &self.halfsides
    }

    /// `Π(2nᵢ + 1)`, the cardinality when the GAP is proper.
    pub fn nominal_size(&self) -> u128 {
        self.halfsides
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(2 * n as u128 + 1))
            .unwrap_or(u128::MAX)
    }

    pub fn diffs_independent(&self) -> bool {
        if self.diffs.is_empty() {
            return true;
        }
        let m = Mat::from_rows(self.diffs.iter().map(|w| to_rat(w)).collect()).expect("checked");
        exactalg::rank(&m) == self.diffs.len()
    }

    /// `P + P`, i.e. the same GAP around `2·base` with doubled half-sides.
    pub fn doubled(&self) -> Gap {
        Gap {
            base: self.base.iter().map(|x| 2 * x).collect(),
            diffs: self.diffs.clone(),
            halfsides: self.halfsides.iter().map(|n| 2 * n).collect(),
        }
    }
}

/// Result of expanding a GAP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapPoints {
    pub points: PointSet,
    /// No two coefficient vectors gave the same point.
    pub proper: bool,
}

pub fn enum_gap(p: &Gap, budget: u128) -> Result<GapPoints> {
    let size = p.nominal_size();
    if size > budget {
        return Err(Error::Budget {
            needed: size,
            cap: budget,
        });
    }
    let bounds: Vec<i64> = p
        .halfsides
        .iter()
        .map(|&n| i64::try_from(n).map_err(|_| Error::Overflow("gap half-side")))
        .collect::<Result<_>>()?;
    let d = p.dim();
    let mut out = Vec::with_capacity(size as usize);
    let mut overflow = false;
    scan_box(&bounds, |m| {
        let mut x = p.base.clone();
        for (mi, w) in m.iter().zip(&p.diffs) {
            for j in 0..d {
                match w[j].checked_mul(*mi).and_then(|v| v.checked_add(x[j])) {
                    Some(v) => x[j] = v,
                    None => overflow = true,
                }
            }
        }
        out.push(x);
    });
    if overflow {
        return Err(Error::Overflow("gap point"));
    }
    let total = out.len();
    let points = PointSet::new(d, out)?;
    Ok(GapPoints {
        proper: points.len() == total,
        points,
    })
}

/// Exact GAP membership by solving for the coefficients.
///
/// For independent differences the coefficients are unique: pick `k` rows
/// of the difference matrix `W` forming an invertible block `S`, solve
/// `m = S⁻¹·(x − base)` on those rows, and accept iff `m` is integral,
/// reproduces `x` on all rows and satisfies `|mᵢ| ≤ nᵢ`. For square `W`
/// this is the test `|(T·x)ⱼ| ≤ nⱼ` with `T = W⁻¹`.
#[derive(Clone, Debug)]
pub struct GapMembership {
    gap: Gap,
    kind: GapTest,
}

#[derive(Clone, Debug)]
enum GapTest {
    Solve {
        rows: Vec<usize>,
        inv_num: IntMat,
        inv_den: Int,
    },
    Listed(PointSet),
}

impl GapMembership {
    pub fn new(gap: &Gap, budget: u128) -> Result<GapMembership> {
        let kind = if gap.diffs_independent() {
            let k = gap.rank();
            let w = Mat::from_cols(gap.diffs.iter().map(|v| to_rat(v)).collect())
                .unwrap_or_else(|_| Mat::zeros(gap.dim(), 0));
            let rows = independent_rows(&w, k);
            let s = Mat::from_rows(rows.iter().map(|&i| w.row(i).to_vec()).collect())
                .unwrap_or_else(|_| Mat::zeros(0, 0));
            let (inv_num, inv_den) = exactalg::inverse(&s)?.integerize();
            GapTest::Solve {
                rows,
                inv_num,
                inv_den,
            }
        } else {
            GapTest::Listed(enum_gap(gap, budget)?.points)
        };
        Ok(GapMembership {
            gap: gap.clone(),
            kind,
        })
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        match &self.kind {
            GapTest::Listed(s) => s.contains(x),
            GapTest::Solve {
                rows,
                inv_num,
                inv_den,
            } => {
                let y: Vec<Int> = x
                    .iter()
                    .zip(&self.gap.base)
                    .map(|(a, b)| Int::from(*a) - Int::from(*b))
                    .collect();
                let ys: Vec<Int> = rows.iter().map(|&i| y[i].clone()).collect();
                let num = inv_num.mul_vec(&ys).expect("square block");
                let mut m = Vec::with_capacity(num.len());
                for (v, &n) in num.iter().zip(&self.gap.halfsides) {
                    if !(v % inv_den).is_zero() {
                        return false;
                    }
                    let q = v / inv_den;
                    if q.abs() > Int::from(n) {
                        return false;
                    }
                    m.push(q);
                }
                // Rows outside the block must match as well.
                (0..x.len()).all(|j| {
                    let s: Int = m
                        .iter()
                        .zip(&self.gap.diffs)
                        .map(|(mi, w)| mi * Int::from(w[j]))
                        .sum();
                    s == y[j]
                })
            }
        }
    }

    /// Coefficient vector of `x` when the differences are independent.
    pub fn coefficients(&self, x: &[i64]) -> Option<Vec<Int>> {
        match &self.kind {
            GapTest::Listed(_) => None,
            GapTest::Solve {
                rows,
                inv_num,
                inv_den,
            } => {
                let ys: Vec<Int> = rows
                    .iter()
                    .map(|&i| Int::from(x[i]) - Int::from(self.gap.base[i]))
                    .collect();
                let num = inv_num.mul_vec(&ys).ok()?;
                num.iter()
                    .map(|v| (v % inv_den).is_zero().then(|| v / inv_den))
                    .collect()
            }
        }
    }
}

/// Greedy choice of `k` row indices of `w` that are linearly independent.
pub(crate) fn independent_rows(w: &Mat, k: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for i in 0..w.rows() {
        if chosen.len() == k {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        let sub = Mat::from_rows(trial.iter().map(|&r| w.row(r).to_vec()).collect())
            .expect("same width");
        if exactalg::rank(&sub) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

/// Outcome of [`subset_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subset {
    Holds,
    /// First point (in set order) outside the target.
    Fails(Point),
}

impl Subset {
    pub fn holds(&self) -> bool {
        matches!(self, Subset::Holds)
    }

    pub fn witness(&self) -> Option<&[i64]> {
        match self {
            Subset::Holds => None,
            Subset::Fails(p) => Some(p),
        }
    }
}

pub fn subset_check(a: &PointSet, mut member: impl FnMut(&[i64]) -> bool) -> Subset {
    match a.points.iter().find(|p| !member(p)) {
        None => Subset::Holds,
        Some(p) => Subset::Fails(p.clone()),
    }
}

/// Image size and largest fiber of an integer linear functional on a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Projection {
    pub image: usize,
    pub max_fiber: usize,
}

pub fn fibers(s: &PointSet, phi: &[i64]) -> Result<BTreeMap<i128, usize>> {
    if phi.len() != s.dim {
        return Err(Error::Dimension {
            expected: s.dim,
            found: phi.len(),
        });
    }
    let mut map = BTreeMap::new();
    for p in &s.points {
        let v: i128 = p.iter().zip(phi).map(|(&x, &c)| x as i128 * c as i128).sum();
        *map.entry(v).or_insert(0usize) += 1;
    }
    Ok(map)
}

pub fn project_count(s: &PointSet, phi: &[i64]) -> Result<Projection> {
    let f = fibers(s, phi)?;
    Ok(Projection {
        image: f.len(),
        max_fiber: f.values().copied().max().unwrap_or(0),
    })
}

/// Explicit sumset `a + b`; fails if `|a|·|b|` exceeds the budget.
pub fn sumset(a: &PointSet, b: &PointSet, budget: u128) -> Result<PointSet> {
    if a.dim != b.dim {
        return Err(Error::Dimension {
            expected: a.dim,
            found: b.dim,
        });
    }
    let pairs = a.len() as u128 * b.len() as u128;
    if pairs > budget {
        return Err(Error::Budget {
            needed: pairs,
            cap: budget,
        });
    }
    let mut out = Vec::with_capacity(pairs as usize);
    for p in &a.points {
        for q in &b.points {
            let s: Option<Point> = p.iter().zip(q).map(|(x, y)| x.checked_add(*y)).collect();
            out.push(s.ok_or(Error::Overflow("sumset"))?);
        }
    }
    PointSet::new(a.dim, out)
}

/// Integer vector as `i64`s, if it fits.
pub fn int_point(v: &[Int]) -> Option<Point> {
    v.iter().map(ToPrimitive::to_i64).collect()
}

impl Gap {
    /// Fails with `Overflow` if an entry does not fit in `i64`.
    pub fn from_int(base: &[Int], diffs: &[Vec<Int>], halfsides: &[Int]) -> Result<Gap> {
        let base = int_point(base).ok_or(Error::Overflow("gap base"))?;
        let diffs = diffs
            .iter()
            .map(|w| int_point(w).ok_or(Error::Overflow("gap difference")))
            .collect::<Result<_>>()?;
        let halfsides = halfsides
            .iter()
            .map(|n| {
                if n.is_negative() {
                    Err(Error::Representation("negative half-side".into()))
                } else {
                    n.to_u64().ok_or(Error::Overflow("gap half-side"))
                }
            })
            .collect::<Result<_>>()?;
        Gap::new(base, diffs, halfsides)
    }
}
