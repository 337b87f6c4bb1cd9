use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::ellipsoid::Ellipsoid;
use super::float::{FMat, MAX_DENOMINATOR, rat_to_f64, rationalize};
use crate::error::{Error, Result};
use crate::exactalg::{self, Mat, Rat, rat};

/// `{Σ λᵢuᵢ : λᵢ ∈ [−1, 1]}` for linearly independent generators `uᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Parallelotope {
    gens: Vec<Vec<Rat>>,
    /// Columns are the generators.
    matrix: Mat,
    /// Rows are the facet normals: `x ∈ Q ⇔ |row_i · x| ≤ 1`.
    inv: Mat,
}

impl Parallelotope {
    pub fn new(gens: Vec<Vec<Rat>>) -> Result<Parallelotope> {
        let d = gens.len();
        for g in &gens {
            if g.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    found: g.len(),
                });
            }
        }
        let matrix = Mat::from_cols(gens.clone())?;
        let inv = exactalg::inverse(&matrix).map_err(|_| Error::Rank {
            rank: exactalg::rank(&matrix),
            expected: d,
        })?;
        Ok(Parallelotope { gens, matrix, inv })
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &[Vec<Rat>] {
        &self.gens
    }

    /// The matrix `U` whose columns are the generators.
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// Coordinates `λ` of `x` in the generator basis.
    pub fn coords(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.inv.mul_vec(x)
    }

    pub fn contains(&self, x: &[Rat]) -> Result<bool> {
        Ok(self.coords(x)?.iter().all(|l| l.abs() <= Rat::one()))
    }

    /// `2ᵈ·|det U|`.
    pub fn volume(&self) -> Rat {
        let det = exactalg::det(&self.matrix).expect("square");
        det.abs() * Rat::from_integer(num_bigint::BigInt::from(2).pow(self.dim() as u32))
    }

    /// Exact certificate that `scale·E ⊆ Q`: for each facet normal `c`,
    /// the support of `scale·E` in direction `c` is at most 1.
    pub fn contains_scaled_ellipsoid(&self, e: &Ellipsoid, scale: &Rat) -> Result<bool> {
        Ok(self.max_support_sq(e)? * scale * scale <= Rat::one())
    }

    /// `max_c cᵀA⁻¹c` over the facet normals.
    fn max_support_sq(&self, e: &Ellipsoid) -> Result<Rat> {
        if e.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: e.dim(),
            });
        }
        let ainv = e.inverse_form()?;
        Ok((0..self.dim())
            .map(|i| e.support_sq(&ainv, self.inv.row(i)))
            .max()
            .unwrap_or_else(Rat::zero))
    }
}

/// Parallelotope spanned by the principal axes of `inflation·E`.
///
/// Axes come from a floating-point eigen-decomposition and are rationalized,
/// so the result is then certified exactly; if rounding left some facet
/// slab too narrow, all generators are scaled up by a rational factor just
/// above the required square root and the certificate is re-checked.
pub fn circumscribe_parallelotope(e: &Ellipsoid, inflation: &Rat) -> Result<Parallelotope> {
    if *inflation < Rat::one() {
        return Err(Error::Representation("inflation must be at least 1".into()));
    }
    let d = e.dim();
    let (values, vectors) = FMat::from_rat(e.form()).symmetric_eigen();
    let mut gens = Vec::with_capacity(d);
    for (lam, w) in values.iter().zip(&vectors) {
        if !(*lam > 0.0) || !lam.is_finite() {
            return Err(Error::Certification("non-positive eigenvalue".into()));
        }
        let r = 1.0 / libm::sqrt(*lam);
        let g: Vec<Rat> = w
            .iter()
            .map(|x| rationalize(r * x, MAX_DENOMINATOR) * inflation)
            .collect();
        gens.push(g);
    }
    let q = Parallelotope::new(gens)
        .map_err(|_| Error::Certification("rationalized axes are dependent".into()))?;
    let need = q.max_support_sq(e)? * inflation * inflation;
    if need <= Rat::one() {
        return Ok(q);
    }
    // Scale factor f with f² ≥ need.
    let f = sqrt_upper(&need);
    let scaled: Vec<Vec<Rat>> = q
        .gens
        .iter()
        .map(|g| g.iter().map(|x| x * &f).collect())
        .collect();
    let q = Parallelotope::new(scaled)?;
    if !q.contains_scaled_ellipsoid(e, inflation)? {
        return Err(Error::Certification("parallelotope does not contain the ellipsoid".into()));
    }
    Ok(q)
}

/// A rational `f ≥ sqrt(x)` with small denominator, within about `1e-12`
/// relative of the true root.
pub fn sqrt_upper(x: &Rat) -> Rat {
    if !x.is_positive() {
        return Rat::zero();
    }
    let guess = rationalize(libm::sqrt(rat_to_f64(x)), 1 << 40);
    if &guess * &guess >= *x {
        return guess;
    }
    let mut f = guess * (Rat::one() + Rat::new(1.into(), (1u64 << 40).into()));
    let two = rat(2);
    while &f * &f < *x {
        f = &f * &two;
    }
    f
}
