//! Exact integer and rational linear algebra.
//!
//! Everything here is exact: determinants and inverses use fraction-free
//! (Bareiss) elimination over integerized rows, Hermite normal forms are
//! computed with unimodular row operations, and no operation rounds.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// `n / d`, reduced. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn int_to_rat(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Least common multiple of the denominators in `xs` (1 for an empty slice).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Int {
    xs.into_iter()
        .fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Mat> {
        if rows * cols != data.len() {
            return Err(Error::Dimension {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: Vec<Vec<Rat>>) -> Result<Mat> {
        Ok(Mat::from_rows(cols)?.transpose())
    }

    /// Convenience constructor for small literal matrices. Panics on ragged input.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Mat {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| rat(x)).collect())
            .collect();
        Mat::from_rows(rows).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if self.cols != v.len() {
            return Err(Error::Dimension {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    pub fn scale(&self, s: &Rat) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn to_int(&self) -> Option<IntMat> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.to_integer()).collect(),
        })
    }

    /// Returns `(D·self, D)` with `D` the least common denominator of all entries.
    pub fn integerize(&self) -> (IntMat, Int) {
        let den = common_denominator(&self.data);
        let scaled = self.scale(&Rat::from_integer(den.clone()));
        (scaled.to_int().expect("scaled by common denominator"), den)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Rat;

    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.rows {
            let row: Vec<_> = self.row(i).iter().map(|x| format!("{x}")).collect();
            l.entry(&row);
        }
        l.finish()
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Result<IntMat> {
        if rows * cols != data.len() {
            return Err(Error::Dimension {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(IntMat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> IntMat {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Result<IntMat> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(IntMat {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Panics on ragged input.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> IntMat {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Int::from(x)).collect())
            .collect();
        IntMat::from_rows(rows).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [Int] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> Result<IntMat> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Int]) -> Result<Vec<Int>> {
        if self.cols != v.len() {
            return Err(Error::Dimension {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Int::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn to_rat(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(int_to_rat).collect(),
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += delta;
        }
    }

    /// Replaces rows `(a, b)` by `(p·a + q·b, r·a + s·b)`.
    fn combine_rows(&mut self, a: usize, b: usize, [p, q, r, s]: [&Int; 4]) {
        for j in 0..self.cols {
            let x = self.data[a * self.cols + j].clone();
            let y = self.data[b * self.cols + j].clone();
            self.data[a * self.cols + j] = p * &x + q * &y;
            self.data[b * self.cols + j] = r * &x + s * &y;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.row_mut(i) {
            *x = -core::mem::take(x);
        }
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = Int;

    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.rows {
            l.entry(&self.row(i));
        }
        l.finish()
    }
}

/// Square integer matrix with determinant exactly ±1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnimodularMat(IntMat);

impl UnimodularMat {
    pub fn new(m: IntMat) -> Result<UnimodularMat> {
        let d = det_int(&m)?;
        if d.abs().is_one() {
            Ok(UnimodularMat(m))
        } else {
            Err(Error::LatticesDiffer(format!("determinant {d} is not ±1")))
        }
    }

    pub fn identity(n: usize) -> UnimodularMat {
        UnimodularMat(IntMat::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_int(&self) -> &IntMat {
        &self.0
    }

    pub fn into_inner(self) -> IntMat {
        self.0
    }

    pub fn to_rat(&self) -> Mat {
        self.0.to_rat()
    }

    /// The integer inverse.
    pub fn inverse(&self) -> UnimodularMat {
        let inv = inverse(&self.0.to_rat()).expect("unimodular matrices are invertible");
        UnimodularMat(inv.to_int().expect("inverse of a unimodular matrix is integral"))
    }

    pub fn det(&self) -> Int {
        det_int(&self.0).expect("square by construction")
    }

    pub fn mul(&self, other: &UnimodularMat) -> UnimodularMat {
        UnimodularMat(self.0.mul(&other.0).expect("equal dimensions"))
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(v: &[Rat]) -> Rat {
    dot(v, v)
}

/// Fraction-free determinant of an integer matrix.
pub fn det_int(m: &IntMat) -> Result<Int> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a = m.clone();
    let mut prev = Int::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    negate = !negate;
                }
                None => return Ok(Int::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a.data[i * n + j] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    Ok(if negate { -d } else { d })
}

/// Scales each row by the lcm of its denominators. Returns the integer
/// matrix and the per-row scale factors.
fn integerize_rows(m: &Mat) -> (IntMat, Vec<Int>) {
    let mut scales = Vec::with_capacity(m.rows);
    let mut data = Vec::with_capacity(m.rows * m.cols);
    for i in 0..m.rows {
        let l = common_denominator(m.row(i));
        let lr = Rat::from_integer(l.clone());
        data.extend(m.row(i).iter().map(|x| (x * &lr).to_integer()));
        scales.push(l);
    }
    (
        IntMat {
            rows: m.rows,
            cols: m.cols,
            data,
        },
        scales,
    )
}

/// Exact determinant.
pub fn det(m: &Mat) -> Result<Rat> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let (im, scales) = integerize_rows(m);
    let d = det_int(&im)?;
    let s = scales.iter().fold(Int::one(), |acc, x| acc * x);
    Ok(Rat::new(d, s))
}

/// Exact inverse by fraction-free Gauss–Jordan elimination on the
/// row-integerized matrix.
pub fn inverse(m: &Mat) -> Result<Mat> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Mat::identity(0));
    }
    let (im, scales) = integerize_rows(m);
    let w = 2 * n;
    let mut a = IntMat::zeros(n, w);
    for i in 0..n {
        for j in 0..n {
            a.data[i * w + j] = im[(i, j)].clone();
        }
        a.data[i * w + n + i] = Int::one();
    }
    let mut prev = Int::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => a.swap_rows(i, k),
                None => return Err(Error::Singular),
            }
        }
        let pivot = a[(k, k)].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = a[(i, k)].clone();
            for j in 0..w {
                if j == k {
                    continue;
                }
                let v = (&pivot * &a[(i, j)] - &factor * &a[(k, j)]) / &prev;
                a.data[i * w + j] = v;
            }
            a.data[i * w + k] = Int::zero();
        }
        prev = pivot;
    }
    // Left block is now prev·I, right block prev·M⁻¹. Undo the row scaling:
    // X = diag(scales)⁻¹·M, so X⁻¹ = M⁻¹·diag(scales).
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = Rat::new(&a[(i, n + j)] * &scales[j], prev.clone());
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Solves `m·x = b` for square nonsingular `m`.
pub fn solve(m: &Mat, b: &[Rat]) -> Result<Vec<Rat>> {
    if b.len() != m.rows {
        return Err(Error::Dimension {
            expected: m.rows,
            found: b.len(),
        });
    }
    let inv = inverse(m)?;
    inv.mul_vec(b)
}

/// Rank over the rationals.
pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let piv = a[(r, c)].clone();
        for i in r + 1..rows {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &piv;
            for j in c..cols {
                let delta = &f * &a[(r, j)];
                a.data[i * cols + j] -= delta;
            }
        }
        r += 1;
    }
    r
}

/// Result of reducing an integer matrix to lower echelon form with
/// unimodular row operations.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub h: IntMat,
    pub u: IntMat,
    /// Number of leading zero rows; `u`'s first `zero_rows` rows span the left kernel.
    pub zero_rows: usize,
}

/// Lower echelon form `H = U·m`: each nonzero row ends at its pivot, pivots
/// increase down the rows, zero rows sit on top, pivots are positive and the
/// entries of later rows in a pivot column are reduced into `[0, pivot)`.
pub(crate) fn echelon(m: &IntMat) -> Echelon {
    let (rows, cols) = (m.rows, m.cols);
    let mut h = m.clone();
    let mut u = IntMat::identity(rows);
    let mut pivots_rev = Vec::new();
    let mut target = rows;
    let mut col = cols;
    while target > 0 && col > 0 {
        col -= 1;
        let t = target - 1;
        if (0..=t).all(|i| h[(i, col)].is_zero()) {
            continue;
        }
        if h[(t, col)].is_zero() {
            let i = (0..t).find(|&i| !h[(i, col)].is_zero()).expect("nonzero entry");
            h.swap_rows(i, t);
            u.swap_rows(i, t);
        }
        for i in 0..t {
            if h[(i, col)].is_zero() {
                continue;
            }
            let x = h[(t, col)].clone();
            let y = h[(i, col)].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, q) = (eg.gcd, eg.x, eg.y);
            let r = -(&y / &g);
            let w = &x / &g;
            h.combine_rows(t, i, [&s, &q, &r, &w]);
            u.combine_rows(t, i, [&s, &q, &r, &w]);
        }
        if h[(t, col)].is_negative() {
            h.negate_row(t);
            u.negate_row(t);
        }
        pivots_rev.push(col);
        target -= 1;
    }
    let zero_rows = target;
    let pivots: Vec<usize> = pivots_rev.into_iter().rev().collect();
    // Reduce each row's entries in earlier pivot columns.
    for (ri, _) in pivots.iter().enumerate() {
        let i = zero_rows + ri;
        for rj in (0..ri).rev() {
            let j = zero_rows + rj;
            let pc = pivots[rj];
            let q = h[(i, pc)].div_floor(&h[(j, pc)]);
            if !q.is_zero() {
                let neg = -q;
                h.add_row_multiple(i, j, &neg);
                u.add_row_multiple(i, j, &neg);
            }
        }
    }
    Echelon { h, u, zero_rows }
}

/// Row-style Hermite normal form: `H = U·m` with `U` unimodular and `H`
/// lower triangular (for square input) with positive pivots and entries
/// below each pivot reduced modulo it.
pub fn hnf(m: &IntMat) -> Result<(IntMat, UnimodularMat)> {
    let e = echelon(m);
    if e.zero_rows > 0 {
        return Err(Error::Rank {
            rank: m.rows - e.zero_rows,
            expected: m.rows,
        });
    }
    Ok((e.h, UnimodularMat(e.u)))
}

/// Basis (as rows) of the integer left kernel `{y : yᵀ·m = 0}`.
pub fn left_kernel(m: &IntMat) -> IntMat {
    let e = echelon(m);
    let rows = (0..e.zero_rows).map(|i| e.u.row(i).to_vec()).collect();
    IntMat::from_rows(rows).unwrap_or_else(|_| IntMat::zeros(0, m.rows))
}

/// Whether the rows of `a` and `b` generate the same lattice.
pub fn same_lattice(a: &Mat, b: &Mat) -> Result<bool> {
    if a.cols != b.cols {
        return Err(Error::Dimension {
            expected: a.cols,
            found: b.cols,
        });
    }
    let den = common_denominator(a.data.iter().chain(&b.data));
    let s = Rat::from_integer(den);
    let ha = echelon(&a.scale(&s).to_int().expect("integerized"));
    let hb = echelon(&b.scale(&s).to_int().expect("integerized"));
    let nz = |e: &Echelon| -> Vec<Vec<Int>> {
        (e.zero_rows..e.h.rows).map(|i| e.h.row(i).to_vec()).collect()
    };
    Ok(nz(&ha) == nz(&hb))
}

/// Finds the unimodular `T` with `T·x = x2`, certifying that the rows of
/// `x` and `x2` generate the same full-rank lattice.
pub fn unimodular_solve(x: &Mat, x2: &Mat) -> Result<UnimodularMat> {
    for m in [x, x2] {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
    }
    if x.rows != x2.rows {
        return Err(Error::Dimension {
            expected: x.rows,
            found: x2.rows,
        });
    }
    let t = x2.mul(&inverse(x)?)?;
    let Some(ti) = t.to_int() else {
        return Err(Error::LatticesDiffer("transform is not integral".into()));
    };
    let t = UnimodularMat::new(ti)?;
    if t.to_rat().mul(x)? != *x2 {
        return Err(Error::Certification("T·X ≠ X′".into()));
    }
    Ok(t)
}
