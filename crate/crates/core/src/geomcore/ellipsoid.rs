use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::float::{FMat, MAX_DENOMINATOR, rat_to_f64, rationalize};
use crate::error::{Error, Result};
use crate::exactalg::{self, Mat, Rat, rank};

/// Default relative tolerance for [`mvee`].
pub const DEFAULT_EPS: (i64, i64) = (1, 100);

/// Iteration cap for Khachiyan's algorithm.
pub const MVEE_MAX_ITER: usize = 100_000;

/// `{x : xᵀAx ≤ 1}` for a symmetric positive-definite rational `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    form: Mat,
}

impl Ellipsoid {
    /// Checks symmetry and positive definiteness (all leading principal
    /// minors positive, exactly).
    pub fn new(form: Mat) -> Result<Ellipsoid> {
        if !form.is_square() {
            return Err(Error::NotSquare {
                rows: form.rows(),
                cols: form.cols(),
            });
        }
        if form.rows() == 0 {
            return Err(Error::Representation("empty form".into()));
        }
        if !form.is_symmetric() {
            return Err(Error::Representation("form is not symmetric".into()));
        }
        let n = form.rows();
        for k in 1..=n {
            let minor = Mat::from_rows(
                (0..k).map(|i| form.row(i)[..k].to_vec()).collect(),
            )?;
            if !exactalg::det(&minor)?.is_positive() {
                return Err(Error::Representation(format!(
                    "form is not positive definite (leading minor {k})"
                )));
            }
        }
        Ok(Ellipsoid { form })
    }

    pub fn dim(&self) -> usize {
        self.form.rows()
    }

    pub fn form(&self) -> &Mat {
        &self.form
    }

    pub fn quad(&self, x: &[Rat]) -> Rat {
        let ax = self.form.mul_vec(x).expect("dimension checked by caller");
        exactalg::dot(x, &ax)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.quad(x) <= Rat::one()
    }

    pub fn inverse_form(&self) -> Result<Mat> {
        exactalg::inverse(&self.form)
    }

    /// Squared support function `(sup_{x∈E} c·x)² = cᵀA⁻¹c`, given `A⁻¹`.
    pub fn support_sq(&self, inv_form: &Mat, c: &[Rat]) -> Rat {
        let y = inv_form.mul_vec(c).expect("dimension checked by caller");
        exactalg::dot(c, &y)
    }

    /// Approximate volume `ω_d / sqrt(det A)`.
    pub fn volume_approx(&self) -> f64 {
        let det = exactalg::det(&self.form).expect("square");
        unit_ball_volume(self.dim()) / libm::sqrt(rat_to_f64(&det))
    }
}

/// Volume of the Euclidean unit ball in dimension `d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // ω_0 = 1, ω_1 = 2, ω_d = ω_{d-2}·2π/d
    let mut w = [1.0, 2.0];
    for k in 2..=d {
        w[k % 2] = w[k % 2] * 2.0 * core::f64::consts::PI / k as f64;
    }
    w[d % 2]
}

/// Approximate minimum-volume ellipsoid centred at the origin containing
/// `±points`, computed with Khachiyan's barycentric coordinate ascent and
/// then rescaled exactly so that every point satisfies `xᵀAx ≤ 1` with
/// equality for the outermost one.
pub fn mvee(points: &[Vec<Rat>], eps: &Rat) -> Result<Ellipsoid> {
    let Some(d) = points.first().map(Vec::len) else {
        return Err(Error::Representation("empty point set".into()));
    };
    if !eps.is_positive() || *eps >= Rat::one() {
        return Err(Error::Representation("eps must lie in (0, 1)".into()));
    }
    let r = rank(&Mat::from_rows(points.to_vec())?);
    if r < d {
        return Err(Error::Rank { rank: r, expected: d });
    }
    let fp: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().map(rat_to_f64).collect())
        .collect();
    let n = fp.len();
    let df = d as f64;
    let target = df * (1.0 + rat_to_f64(eps));
    let mut u = alloc::vec![1.0 / n as f64; n];
    let mut converged = None;
    for _ in 0..MVEE_MAX_ITER {
        let mut x = FMat::zeros(d);
        for (w, p) in u.iter().zip(&fp) {
            for i in 0..d {
                for j in 0..d {
                    x.data[i * d + j] += w * p[i] * p[j];
                }
            }
        }
        let xinv = x
            .inverse()
            .ok_or_else(|| Error::Certification("scatter matrix is singular".into()))?;
        let (j, max_m) = fp
            .iter()
            .map(|p| xinv.quad(p))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, m)| if m > acc.1 { (i, m) } else { acc });
        if max_m <= target {
            converged = Some((xinv, max_m));
            break;
        }
        let step = (max_m - df) / (df * (max_m - 1.0));
        for w in u.iter_mut() {
            *w *= 1.0 - step;
        }
        u[j] += step;
    }
    let Some((xinv, max_m)) = converged else {
        return Err(Error::Convergence(MVEE_MAX_ITER));
    };
    let mut form = Mat::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let a = 0.5 * (xinv.get(i, j) + xinv.get(j, i)) / max_m;
            let q = rationalize(a, MAX_DENOMINATOR);
            form.set(i, j, q.clone());
            form.set(j, i, q);
        }
    }
    let e = Ellipsoid::new(form)
        .map_err(|_| Error::Certification("rationalized form is not positive definite".into()))?;
    let s = points
        .iter()
        .map(|p| e.quad(p))
        .max()
        .expect("nonempty");
    if s.is_zero() {
        return Err(Error::Certification("degenerate scaling".into()));
    }
    let scaled = e.form.scale(&(Rat::one() / s));
    Ellipsoid::new(scaled)
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
    fn rejects_indefinite_and_asymmetric() {
        assert!(Ellipsoid::new(Mat::from_i64(&[[1, 0], [0, -1]])).is_err());
        assert!(Ellipsoid::new(Mat::from_i64(&[[2, 1], [0, 2]])).is_err());
        assert!(Ellipsoid::new(Mat::from_i64(&[[1, 2], [2, 1]])).is_err());
        assert!(Ellipsoid::new(Mat::from_i64(&[[2, 1], [1, 2]])).is_ok());
    }

    #[test]
    fn mvee_of_unit_vectors_is_the_disk() {
        let e = mvee(&[v(&[1, 0]), v(&[0, 1])], &ratio(1, 100)).unwrap();
        assert_eq!(e.form(), &Mat::identity(2));
    }

    #[test]
    fn mvee_of_square_corners() {
        let e = mvee(&[v(&[1, 1]), v(&[1, -1])], &ratio(1, 100)).unwrap();
        assert_eq!(e.form(), &Mat::identity(2).scale(&ratio(1, 2)));
    }

    #[test]
    fn mvee_one_dimensional() {
        let e = mvee(&[v(&[1])], &ratio(1, 100)).unwrap();
        assert_eq!(e.form(), &Mat::identity(1));
        let e = mvee(&[v(&[3]), v(&[-2])], &ratio(1, 100)).unwrap();
        assert_eq!(e.form(), &Mat::from_rows(vec![vec![ratio(1, 9)]]).unwrap());
    }

    #[test]
    fn mvee_errors() {
        assert!(matches!(
            mvee(&[v(&[1, 1]), v(&[2, 2])], &ratio(1, 100)),
            Err(Error::Rank { rank: 1, expected: 2 })
        ));
        assert!(mvee(&[v(&[1])], &rat(1)).is_err());
        assert!(mvee(&[], &ratio(1, 100)).is_err());
    }

    #[test]
    fn mvee_contains_points_exactly() {
        let pts = vec![v(&[3, 1, 0]), v(&[-1, 2, 2]), v(&[0, -1, 4]), v(&[2, 2, 2]), v(&[1, 0, -3])];
        let e = mvee(&pts, &ratio(1, 100)).unwrap();
        let mut touching = 0;
        for p in &pts {
            let q = e.quad(p);
            assert!(q <= rat(1));
            if q == rat(1) {
                touching += 1;
            }
        }
        assert!(touching >= 1);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-12);
        assert!((unit_ball_volume(2) - core::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * core::f64::consts::PI).abs() < 1e-12);
    }
}
