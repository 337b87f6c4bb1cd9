//! Seeded instance generators and the fixed acceptance corpus.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with
//! integers drawn by `Rng::gen_range` over inclusive ranges.

use std::fmt;
use std::str::FromStr;

use gapcover_core::exactalg::{self, Int, Mat, Rat};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::spec::{rat_str, BodySpec, InstanceSpec};

/// Draws per instance before giving up on a non-degenerate sample.
pub const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// `B(0, r) ∩ L` for a random integer lattice `L`, in lattice coordinates.
    LatticeBall,
    RandomVertices,
    RandomEllipsoid,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::LatticeBall, Kind::RandomVertices, Kind::RandomEllipsoid];

    pub fn name(self) -> &'static str {
        match self {
            Kind::LatticeBall => "lattice-ball",
            Kind::RandomVertices => "random-vertices",
            Kind::RandomEllipsoid => "random-ellipsoid",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Kind, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind {s:?} (expected lattice-ball, random-vertices or random-ellipsoid)"))
    }
}

/// Size parameters. Unused fields are ignored by a kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Matrix entries are uniform in `[−h, h]`.
    pub h: i64,
    /// Ball radius (lattice-ball) or scale (random-ellipsoid).
    pub radius: Rat,
    /// Number of vertices (random-vertices).
    pub points: usize,
    /// Coordinate bound for vertices.
    pub bound: i64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            h: 3,
            radius: Rat::from_integer(4.into()),
            points: 6,
            bound: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("dimension must be at least 1")]
    Dimension,
    #[error("invalid parameter: {0}")]
    Param(&'static str),
    #[error("{kind}: no non-degenerate draw after {MAX_REJECTIONS} attempts")]
    Degenerate { kind: Kind },
}

fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, h: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-h..=h)).collect())
        .collect()
}

fn to_mat(m: &[Vec<i64>]) -> Mat {
    Mat::from_rows(
        m.iter()
            .map(|r| r.iter().map(|&x| exactalg::rat(x)).collect())
            .collect(),
    )
    .expect("rectangular")
}

pub fn gen_random(kind: Kind, dim: usize, seed: u64, p: &Params) -> Result<InstanceSpec, GenError> {
    if dim == 0 {
        return Err(GenError::Dimension);
    }
    if p.h < 1 || p.bound < 1 || p.points == 0 || p.radius <= Rat::zero() {
        return Err(GenError::Param("h, bound and points must be positive, radius > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (body, params) = match kind {
        Kind::LatticeBall => {
            // Basis rows b_i of M; x = Mᵀz lies in the ball iff zᵀ(MMᵀ)z ≤ r².
            let m = (0..MAX_REJECTIONS)
                .map(|_| to_mat(&int_matrix(&mut rng, dim, dim, p.h)))
                .find(|m| !exactalg::det(m).expect("square").is_zero())
                .ok_or(GenError::Degenerate { kind })?;
            let r2 = &p.radius * &p.radius;
            let form = m.mul(&m.transpose()).expect("square").scale(&(Rat::from_integer(1.into()) / r2));
            (
                BodySpec::Ellipsoid(form.row_vecs()),
                json!({"h": p.h, "radius": rat_str(&p.radius), "lattice": "uniform-integer-basis",
                       "basis": m.row_vecs().iter().map(|r| r.iter().map(|x| x.to_integer().to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()}),
            )
        }
        Kind::RandomVertices => {
            let pts = (0..MAX_REJECTIONS)
                .map(|_| int_matrix(&mut rng, p.points, dim, p.bound))
                .find(|pts| exactalg::rank(&to_mat(pts)) == dim)
                .ok_or(GenError::Degenerate { kind })?;
            (
                BodySpec::Vertices(to_mat(&pts).row_vecs()),
                json!({"points": p.points, "bound": p.bound}),
            )
        }
        Kind::RandomEllipsoid if dim == 1 => {
            let num = rng.gen_range(1..=p.h * 8);
            let half = &p.radius * Rat::new(Int::from(num), Int::from(4));
            (
                BodySpec::Box(vec![half]),
                json!({"h": p.h, "radius": rat_str(&p.radius)}),
            )
        }
        Kind::RandomEllipsoid => {
            // A = (MᵀM + I)/r², positive definite for every draw.
            let m = to_mat(&int_matrix(&mut rng, dim, dim, p.h));
            let g = m.transpose().mul(&m).expect("square");
            let mut rows = g.row_vecs();
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] += exactalg::rat(1);
            }
            let r2 = &p.radius * &p.radius;
            let form = Mat::from_rows(rows).expect("square").scale(&(Rat::from_integer(1.into()) / r2));
            (
                BodySpec::Ellipsoid(form.row_vecs()),
                json!({"h": p.h, "radius": rat_str(&p.radius)}),
            )
        }
    };
    let mut spec = InstanceSpec::new(body, dim);
    spec.kind = Some(kind.name().to_string());
    spec.seed = Some(seed);
    spec.params = Some(params);
    Ok(spec)
}

/// Corpus parameters per dimension and kind.
pub fn corpus_params(kind: Kind, dim: usize) -> Params {
    let r = |n: i64| Rat::from_integer(n.into());
    match (kind, dim) {
        (Kind::LatticeBall, 1 | 2) => Params { h: 3, radius: r(6), ..Params::default() },
        (Kind::LatticeBall, 3) => Params { h: 3, radius: r(6), ..Params::default() },
        (Kind::LatticeBall, _) => Params { h: 2, radius: r(4), ..Params::default() },
        (Kind::RandomVertices, 1 | 2) => Params { points: 5, bound: 6, ..Params::default() },
        (Kind::RandomVertices, 3) => Params { points: 6, bound: 5, ..Params::default() },
        (Kind::RandomVertices, _) => Params { points: 7, bound: 4, ..Params::default() },
        (Kind::RandomEllipsoid, 1 | 2) => Params { h: 2, radius: r(8), ..Params::default() },
        (Kind::RandomEllipsoid, 3) => Params { h: 2, radius: r(7), ..Params::default() },
        (Kind::RandomEllipsoid, _) => Params { h: 2, radius: r(6), ..Params::default() },
    }
}

/// `count` instances per dimension, kinds cycling, seeds `base_seed + i`.
pub fn corpus(dims: &[usize], count: usize, base_seed: u64) -> Result<Vec<InstanceSpec>, GenError> {
    let mut out = Vec::with_capacity(dims.len() * count);
    for &d in dims {
        for i in 0..count {
            let kind = Kind::ALL[i % Kind::ALL.len()];
            let seed = base_seed + 1000 * d as u64 + i as u64;
            out.push(gen_random(kind, d, seed, &corpus_params(kind, d))?);
        }
    }
    Ok(out)
}

/// The 150-instance acceptance corpus: 50 each at `d = 2, 3, 4`.
pub fn acceptance_corpus() -> Vec<InstanceSpec> {
    corpus(&[2, 3, 4], 50, 0).expect("fixed parameters are valid")
}
