use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::ellipsoid::Ellipsoid;
use super::lp;
use crate::error::{Error, Result};
use crate::exactalg::{self, Int, Mat, Rat, dot, rank};

/// Representation of a centrally symmetric convex body.
#[derive(Clone, Debug, PartialEq)]
pub enum BodyRep {
    /// `conv(±v₁, …, ±v_m)`.
    Vertices(Vec<Vec<Rat>>),
    Ellipsoid(Ellipsoid),
    /// `∏ [−hᵢ, hᵢ]`.
    Box(Vec<Rat>),
}

/// A centrally symmetric convex body in `dim` dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    rep: BodyRep,
}

impl ConvexBody {
    pub fn new(dim: usize, rep: BodyRep) -> Result<ConvexBody> {
        if dim == 0 {
            return Err(Error::Representation("dimension must be at least 1".into()));
        }
        match &rep {
            BodyRep::Vertices(vs) => {
                if vs.is_empty() {
                    return Err(Error::Representation("empty vertex list".into()));
                }
                for v in vs {
                    check_dim(dim, v.len())?;
                }
            }
            BodyRep::Ellipsoid(e) => check_dim(dim, e.dim())?,
            BodyRep::Box(h) => {
                check_dim(dim, h.len())?;
                if h.iter().any(Signed::is_negative) {
                    return Err(Error::Representation("negative box half-width".into()));
                }
            }
        }
        Ok(ConvexBody { dim, rep })
    }

    pub fn vertices(points: Vec<Vec<Rat>>) -> Result<ConvexBody> {
        let dim = points.first().map_or(0, Vec::len);
        ConvexBody::new(dim, BodyRep::Vertices(points))
    }

    pub fn ellipsoid(e: Ellipsoid) -> ConvexBody {
        ConvexBody {
            dim: e.dim(),
            rep: BodyRep::Ellipsoid(e),
        }
    }

    pub fn cube(half_widths: Vec<Rat>) -> Result<ConvexBody> {
        ConvexBody::new(half_widths.len(), BodyRep::Box(half_widths))
    }

    /// Euclidean ball of the given radius.
    pub fn ball(dim: usize, radius: &Rat) -> Result<ConvexBody> {
        if !radius.is_positive() {
            return Err(Error::Representation("radius must be positive".into()));
        }
        let form = Mat::identity(dim).scale(&(Rat::one() / (radius * radius)));
        Ok(ConvexBody::ellipsoid(Ellipsoid::new(form)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &BodyRep {
        &self.rep
    }

    /// Whether the body spans its ambient space.
    pub fn is_full_dimensional(&self) -> bool {
        match &self.rep {
            BodyRep::Vertices(vs) => rank(&Mat::from_rows(vs.clone()).expect("checked")) == self.dim,
            BodyRep::Ellipsoid(_) => true,
            BodyRep::Box(h) => h.iter().all(Signed::is_positive),
        }
    }

    /// Exact membership. Boundary points are inside.
    pub fn contains_point(&self, x: &[Rat]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(match &self.rep {
            BodyRep::Vertices(vs) => lp::in_symmetric_hull(vs, x),
            BodyRep::Ellipsoid(e) => e.contains(x),
            BodyRep::Box(h) => x.iter().zip(h).all(|(xi, hi)| xi.abs() <= *hi),
        })
    }

    /// Per-axis integer bound `t` with every integer point of the body in
    /// `[-t, t]`.
    pub fn integer_bounds(&self) -> Result<Vec<Int>> {
        Ok(match &self.rep {
            BodyRep::Vertices(vs) => (0..self.dim)
                .map(|i| {
                    vs.iter()
                        .map(|v| v[i].abs().floor().to_integer())
                        .max()
                        .unwrap_or_else(Int::zero)
                })
                .collect(),
            BodyRep::Ellipsoid(e) => {
                let inv = e.inverse_form()?;
                (0..self.dim)
                    .map(|i| inv[(i, i)].floor().to_integer().sqrt())
                    .collect()
            }
            BodyRep::Box(h) => h.iter().map(|x| x.floor().to_integer()).collect(),
        })
    }

    /// The box corners `(±h₁, …, ±h_d)` up to global sign.
    pub fn box_corners(half_widths: &[Rat]) -> Vec<Vec<Rat>> {
        let d = half_widths.len();
        if d == 0 {
            return Vec::new();
        }
        (0..1usize << (d - 1))
            .map(|mask| {
                half_widths
                    .iter()
                    .enumerate()
                    .map(|(i, h)| if i > 0 && mask >> (i - 1) & 1 == 1 { -h } else { h.clone() })
                    .collect()
            })
            .collect()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// Facet normals `c` of a full-dimensional symmetric polytope
/// `conv(±v)`, so that the polytope is `{x : |c·x| ≤ 1 for all c}`.
///
/// Every facet plane misses the origin and therefore passes through `d`
/// linearly independent vertices; the candidates are all such `d`-subsets
/// (with signs), kept when every vertex satisfies `|c·v| ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Facets {
    normals: Vec<Vec<Rat>>,
}

impl Facets {
    pub fn of_vertices(vertices: &[Vec<Rat>]) -> Result<Facets> {
        let Some(d) = vertices.first().map(Vec::len) else {
            return Err(Error::Representation("empty vertex list".into()));
        };
        let all = Mat::from_rows(vertices.to_vec())?;
        let r = rank(&all);
        if r < d {
            return Err(Error::Rank { rank: r, expected: d });
        }
        let gens: Vec<&Vec<Rat>> = {
            // Drop exact duplicates and ± pairs.
            let mut out: Vec<&Vec<Rat>> = Vec::new();
            for v in vertices {
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                let neg: Vec<Rat> = v.iter().map(|x| -x).collect();
                if !out.iter().any(|w| **w == *v || **w == neg) {
                    out.push(v);
                }
            }
            out
        };
        let mut normals: Vec<Vec<Rat>> = Vec::new();
        let mut idx: Vec<usize> = (0..d).collect();
        let m = gens.len();
        loop {
            for signs in 0..1usize << (d - 1) {
                let rows: Vec<Vec<Rat>> = idx
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| {
                        if k > 0 && signs >> (k - 1) & 1 == 1 {
                            gens[i].iter().map(|x| -x).collect()
                        } else {
                            gens[i].clone()
                        }
                    })
                    .collect();
                let sys = Mat::from_rows(rows)?;
                let Ok(inv) = exactalg::inverse(&sys) else {
                    continue;
                };
                // c solves sys·c = 1.
                let ones: Vec<Rat> = (0..d).map(|_| Rat::one()).collect();
                let c = inv.mul_vec(&ones)?;
                if gens.iter().all(|v| dot(&c, v).abs() <= Rat::one()) {
                    let neg: Vec<Rat> = c.iter().map(|x| -x).collect();
                    if !normals.iter().any(|n| *n == c || *n == neg) {
                        normals.push(c);
                    }
                }
            }
            // next combination
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(Facets { normals });
                }
                i -= 1;
                if idx[i] < m - d + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..d {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    pub fn normals(&self) -> &[Vec<Rat>] {
        &self.normals
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.normals.iter().all(|c| dot(c, x).abs() <= Rat::one())
    }
}

impl core::fmt::Display for BodyRep {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            BodyRep::Vertices(_) => "vertices",
            BodyRep::Ellipsoid(_) => "ellipsoid",
            BodyRep::Box(_) => "box",
        };
        f.write_str(s)
    }
}

impl BodyRep {
    pub fn kind(&self) -> alloc::string::String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, ratio};
    use alloc::vec;

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn contains_point_examples() {
        let square = ConvexBody::cube(v(&[1, 1])).unwrap();
        assert!(square.contains_point(&v(&[1, 1])).unwrap());
        let disk = ConvexBody::ball(2, &rat(1)).unwrap();
        assert!(!disk.contains_point(&v(&[1, 1])).unwrap());
        let hull = ConvexBody::vertices(vec![v(&[2, 1]), v(&[1, 2])]).unwrap();
        assert!(hull.contains_point(&v(&[1, 1])).unwrap());
        assert!(matches!(
            hull.contains_point(&v(&[1, 1, 1])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn facets_of_rhombus() {
        let verts = vec![v(&[2, 1]), v(&[1, 2])];
        let f = Facets::of_vertices(&verts).unwrap();
        assert_eq!(f.normals().len(), 2);
        // |x + y| ≤ 3 and |x − y| ≤ 1
        let mut got: Vec<Vec<Rat>> = f
            .normals()
            .iter()
            .map(|c| if c[0].is_negative() { c.iter().map(|x| -x).collect() } else { c.clone() })
            .collect();
        got.sort();
        assert_eq!(got, vec![vec![ratio(1, 3), ratio(1, 3)], vec![rat(1), rat(-1)]]);
    }

    #[test]
    fn facets_agree_with_lp() {
        let verts = vec![v(&[3, 0, 1]), v(&[1, 2, -1]), v(&[0, 1, 2]), v(&[1, 1, 1])];
        let f = Facets::of_vertices(&verts).unwrap();
        for x in -4..=4 {
            for y in -4..=4 {
                for z in -4..=4 {
                    let p = v(&[x, y, z]);
                    assert_eq!(f.contains(&p), lp::in_symmetric_hull(&verts, &p), "{p:?}");
                }
            }
        }
    }

    #[test]
    fn integer_bounds_per_rep() {
        let disk = ConvexBody::ball(2, &rat(2)).unwrap();
        assert_eq!(disk.integer_bounds().unwrap(), vec![Int::from(2), Int::from(2)]);
        let b = ConvexBody::cube(vec![ratio(7, 2), rat(1)]).unwrap();
        assert_eq!(b.integer_bounds().unwrap(), vec![Int::from(3), Int::from(1)]);
        let h = ConvexBody::vertices(vec![v(&[2, -1]), v(&[-1, 3])]).unwrap();
        assert_eq!(h.integer_bounds().unwrap(), vec![Int::from(2), Int::from(3)]);
    }

    #[test]
    fn corners_cover_all_sign_classes() {
        let c = ConvexBody::box_corners(&v(&[1, 2, 3]));
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|p| p[0] == rat(1)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ConvexBody::cube(vec![rat(-1)]).is_err());
        assert!(ConvexBody::new(0, BodyRep::Box(vec![])).is_err());
        assert!(ConvexBody::ball(2, &rat(0)).is_err());
    }
}
