//! Lattice basis reduction and a brute-force successive-minima oracle.
//!
//! Reduction is textbook LLL over exact rationals: the Gram–Schmidt data
//! (`μ` coefficients and squared norms `B`) is kept as `Rat` and updated in
//! place on swaps, while the basis itself is integerized so that the
//! unimodular transform can be tracked as an integer matrix.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{self, Int, IntMat, Mat, Rat, UnimodularMat, dot, norm_sq, rat, ratio};
use crate::geomcore::sqrt_upper;

/// Default Lovász parameter.
pub fn default_delta() -> Rat {
    ratio(99, 100)
}

/// Largest dimension accepted by [`successive_minima_bruteforce`].
pub const MINIMA_MAX_DIM: usize = 4;

/// Cap on the number of coefficient vectors scanned by the minima oracle.
pub const MINIMA_BUDGET: u128 = 20_000_000;

/// Full-rank square basis; rows are the basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis {
    vectors: Mat,
}

impl LatticeBasis {
    pub fn new(vectors: Mat) -> Result<LatticeBasis> {
        if !vectors.is_square() {
            return Err(Error::NotSquare {
                rows: vectors.rows(),
                cols: vectors.cols(),
            });
        }
        if exactalg::det(&vectors)?.is_zero() {
            return Err(Error::Rank {
                rank: exactalg::rank(&vectors),
                expected: vectors.rows(),
            });
        }
        Ok(LatticeBasis { vectors })
    }

    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Result<LatticeBasis> {
        LatticeBasis::new(Mat::from_i64(rows))
    }

    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[Rat] {
        self.vectors.row(i)
    }

    pub fn det_abs(&self) -> Rat {
        exactalg::det(&self.vectors).expect("square").abs()
    }
}

/// Exact Gram–Schmidt data of a list of row vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSchmidt {
    pub mu: Vec<Vec<Rat>>,
    /// Squared norms of the orthogonalized vectors.
    pub b: Vec<Rat>,
}

pub fn gram_schmidt(rows: &[Vec<Rat>]) -> GramSchmidt {
    let n = rows.len();
    let mut star: Vec<Vec<Rat>> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            if b[j] == Rat::zero() {
                continue;
            }
            let m = dot(&rows[i], &star[j]) / &b[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &m * y;
            }
            mu[i][j] = m;
        }
        mu[i][i] = Rat::one();
        b.push(norm_sq(&v));
        star.push(v);
    }
    GramSchmidt { mu, b }
}

/// Checks size reduction (`|μᵢⱼ| ≤ 1/2`) and the Lovász condition with
/// parameter `delta` at every index, by recomputing Gram–Schmidt.
pub fn is_lll_reduced(basis: &LatticeBasis, delta: &Rat) -> bool {
    let gs = gram_schmidt(&basis.vectors.row_vecs());
    let half = ratio(1, 2);
    let n = basis.dim();
    for i in 0..n {
        for j in 0..i {
            if gs.mu[i][j].abs() > half {
                return false;
            }
        }
    }
    (1..n).all(|k| {
        let m = &gs.mu[k][k - 1];
        gs.b[k] >= (delta - m * m) * &gs.b[k - 1]
    })
}

/// Nearest integer, halves rounded up.
fn round_rat(x: &Rat) -> Int {
    (x + ratio(1, 2)).floor().to_integer()
}

struct Lll {
    b: Vec<Vec<Int>>,
    t: Vec<Vec<Int>>,
    mu: Vec<Vec<Rat>>,
    bn: Vec<Rat>,
}

impl Lll {
    fn size_reduce(&mut self, k: usize, j: usize) {
        if self.mu[k][j].abs() <= ratio(1, 2) {
            return;
        }
        let q = round_rat(&self.mu[k][j]);
        let (bj, tj) = (self.b[j].clone(), self.t[j].clone());
        for (x, y) in self.b[k].iter_mut().zip(&bj) {
            *x -= &q * y;
        }
        for (x, y) in self.t[k].iter_mut().zip(&tj) {
            *x -= &q * y;
        }
        let qr = Rat::from_integer(q);
        for i in 0..j {
            let delta = &qr * &self.mu[j][i];
            self.mu[k][i] -= delta;
        }
        self.mu[k][j] -= qr;
    }

    fn swap(&mut self, k: usize) {
        let n = self.b.len();
        self.b.swap(k, k - 1);
        self.t.swap(k, k - 1);
        for j in 0..k - 1 {
            let tmp = core::mem::take(&mut self.mu[k][j]);
            self.mu[k][j] = core::mem::replace(&mut self.mu[k - 1][j], tmp);
        }
        let m = self.mu[k][k - 1].clone();
        let big = &self.bn[k] + &m * &m * &self.bn[k - 1];
        let new_m = &m * &self.bn[k - 1] / &big;
        let new_bk = &self.bn[k - 1] * &self.bn[k] / &big;
        self.mu[k][k - 1] = new_m.clone();
        self.bn[k - 1] = big;
        self.bn[k] = new_bk;
        for i in k + 1..n {
            let t = self.mu[i][k].clone();
            self.mu[i][k] = &self.mu[i][k - 1] - &m * &t;
            self.mu[i][k - 1] = t + &new_m * &self.mu[i][k];
        }
    }
}

/// LLL-reduces `basis`. Returns the reduced basis `V` and the unimodular
/// `T` with `T·basis = V`.
pub fn lll_reduce(basis: &LatticeBasis, delta: &Rat) -> Result<(LatticeBasis, UnimodularMat)> {
    if *delta <= ratio(1, 4) || *delta >= Rat::one() {
        return Err(Error::Representation("delta must lie in (1/4, 1)".into()));
    }
    let n = basis.dim();
    let (ib, den) = basis.vectors.integerize();
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| ib.row(i).iter().map(exactalg::int_to_rat).collect())
        .collect();
    let gs = gram_schmidt(&rows);
    let mut st = Lll {
        b: ib.row_vecs(),
        t: IntMat::identity(n).row_vecs(),
        mu: gs.mu,
        bn: gs.b,
    };
    let mut k = 1;
    while k < n {
        st.size_reduce(k, k - 1);
        let m = &st.mu[k][k - 1];
        if st.bn[k] < (delta - m * m) * &st.bn[k - 1] {
            st.swap(k);
            k = k.saturating_sub(1).max(1);
        } else {
            for j in (0..k.saturating_sub(1)).rev() {
                st.size_reduce(k, j);
            }
            k += 1;
        }
    }
    let dr = Rat::from_integer(den);
    let v = Mat::from_rows(
        st.b
            .iter()
            .map(|r| r.iter().map(|x| Rat::from_integer(x.clone()) / &dr).collect())
            .collect(),
    )?;
    let t = UnimodularMat::new(IntMat::from_rows(st.t)?)?;
    Ok((LatticeBasis { vectors: v }, t))
}

/// Vectors attaining the successive minima, with their squared norms.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessiveMinima {
    pub vectors: Vec<Vec<Rat>>,
    pub norms_sq: Vec<Rat>,
}

/// Successive minima by exhaustive enumeration, for `d ≤ 4`.
///
/// The basis is LLL-reduced first; its longest vector bounds `λ_d`, and the
/// dual basis turns that radius into per-coordinate bounds on the integer
/// coefficients. All short vectors are sorted by (norm, lexicographic) and
/// the minima are picked greedily, which is exact since linear independence
/// forms a matroid.
pub fn successive_minima_bruteforce(basis: &LatticeBasis) -> Result<SuccessiveMinima> {
    let d = basis.dim();
    if d > MINIMA_MAX_DIM {
        return Err(Error::Unsupported(d));
    }
    let (red, _) = lll_reduce(basis, &default_delta())?;
    let r = red.matrix();
    let radius_sq = (0..d).map(|i| norm_sq(r.row(i))).max().expect("d ≥ 1");
    let rinv = exactalg::inverse(r)?;
    // x = c·R, so c = x·R⁻¹ and |c_i| ≤ ‖x‖·‖col_i(R⁻¹)‖.
    let bounds: Vec<i64> = (0..d)
        .map(|i| {
            let col = rinv.col(i);
            let b2 = (&radius_sq * norm_sq(&col)).floor().to_integer();
            b2.sqrt().to_i64().ok_or(Error::Overflow("minima coefficient bound"))
        })
        .collect::<Result<_>>()?;
    let volume: u128 = bounds.iter().map(|&b| 2 * b as u128 + 1).product();
    if volume > MINIMA_BUDGET {
        return Err(Error::Budget {
            needed: volume,
            cap: MINIMA_BUDGET,
        });
    }
    let mut short: Vec<(Rat, Vec<Rat>)> = Vec::new();
    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if c.iter().any(|&x| x != 0) {
            let mut x = vec![Rat::zero(); d];
            for (ci, i) in c.iter().zip(0..d) {
                if *ci != 0 {
                    let cr = rat(*ci);
                    for (xj, rij) in x.iter_mut().zip(r.row(i)) {
                        *xj += &cr * rij;
                    }
                }
            }
            let n2 = norm_sq(&x);
            if n2 <= radius_sq {
                short.push((n2, x));
            }
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(pick_minima(short, d));
            }
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
    }
}

fn pick_minima(mut short: Vec<(Rat, Vec<Rat>)>, d: usize) -> SuccessiveMinima {
    short.sort();
    let mut vectors: Vec<Vec<Rat>> = Vec::with_capacity(d);
    let mut norms_sq = Vec::with_capacity(d);
    for (n2, x) in short {
        let mut trial = vectors.clone();
        trial.push(x.clone());
        if exactalg::rank(&Mat::from_rows(trial).expect("same length")) == vectors.len() + 1 {
            vectors.push(x);
            norms_sq.push(n2);
            if vectors.len() == d {
                break;
            }
        }
    }
    SuccessiveMinima { vectors, norms_sq }
}

/// Orthogonality-defect certificate `Π‖vʲ‖₂ / |det V|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionCert {
    /// Exact `Π‖vʲ‖₂²`.
    pub norm_product_sq: Rat,
    /// Rational upper bound on `Π‖vʲ‖₂` (rounded up, relative slack ~1e-12).
    pub norm_product: Rat,
    pub det_abs: Rat,
    /// Exact `(Π‖vʲ‖₂ / |det|)²`.
    pub ratio_sq: Rat,
    /// Rational upper bound on the ratio.
    pub ratio: Rat,
}

impl ReductionCert {
    /// Whether `ratio ≤ bound`, decided exactly on squares.
    pub fn ratio_at_most(&self, bound: &Rat) -> bool {
        !bound.is_negative() && self.ratio_sq <= bound * bound
    }
}

pub fn certify_reduction(v: &LatticeBasis) -> ReductionCert {
    let norm_product_sq = (0..v.dim())
        .map(|i| norm_sq(v.vector(i)))
        .fold(Rat::one(), |acc, x| acc * x);
    let det_abs = v.det_abs();
    let ratio_sq = &norm_product_sq / (&det_abs * &det_abs);
    ReductionCert {
        norm_product: sqrt_upper(&norm_product_sq),
        ratio: sqrt_upper(&ratio_sq),
        norm_product_sq,
        det_abs,
        ratio_sq,
    }
}

/// `(2^{d(d−1)/4})² = 2^{d(d−1)/2}`: the classical LLL bound on the squared
/// orthogonality defect (valid for any `delta ≥ 3/4`).
pub fn lll_defect_bound_sq(d: usize) -> Rat {
    Rat::from_integer(BigInt::from(2).pow((d * d.saturating_sub(1) / 2) as u32))
}
