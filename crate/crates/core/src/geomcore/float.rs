//! Small dense `f64` routines used by the approximate stages. Nothing here is
//! trusted: every result is re-certified exactly by the caller.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::exactalg::{Int, Mat, Rat};

/// Denominator cap for rationalization.
pub const MAX_DENOMINATOR: u64 = 1 << 48;

/// Relative accuracy at which the continued-fraction expansion stops early.
const REL_TOL: f64 = 1e-13;

/// Square row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct FMat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl FMat {
    pub fn zeros(n: usize) -> FMat {
        FMat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> FMat {
        let mut m = FMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rat(m: &Mat) -> FMat {
        debug_assert!(m.is_square());
        FMat {
            n: m.rows(),
            data: m.entries().iter().map(rat_to_f64).collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn quad(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            let mut r = 0.0;
            for j in 0..n {
                r += self.data[i * n + j] * x[j];
            }
            s += x[i] * r;
        }
        s
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` if numerically singular.
    pub fn inverse(&self) -> Option<FMat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = FMat::identity(n);
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| {
                a.get(i, k)
                    .abs()
                    .partial_cmp(&a.get(j, k).abs())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })?;
            if a.get(p, k).abs() < 1e-300 || !a.get(p, k).is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                    inv.data.swap(p * n + j, k * n + j);
                }
            }
            let piv = a.get(k, k);
            for j in 0..n {
                a.data[k * n + j] /= piv;
                inv.data[k * n + j] /= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a.get(i, k);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.data[i * n + j] -= f * a.data[k * n + j];
                    inv.data[i * n + j] -= f * inv.data[k * n + j];
                }
            }
        }
        Some(inv)
    }

    /// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns the
    /// eigenvalues and the eigenvectors as rows, in matching order.
    pub fn symmetric_eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = FMat::identity(n);
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a.get(i, j) * a.get(i, j))
                .sum();
            let total: f64 = a.data.iter().map(|x| x * x).sum();
            if off <= 1e-30 * total || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / libm::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let values = (0..n).map(|i| a.get(i, i)).collect();
        let vectors = (0..n).map(|j| (0..n).map(|i| v.get(i, j)).collect()).collect();
        (values, vectors)
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale both down to avoid overflow.
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Continued-fraction rational approximation of `x` with denominator at most
/// `max_den`. Expansion stops once the convergent is within a relative
/// `1e-13` of `x`. Non-finite input maps to zero.
pub fn rationalize(x: f64, max_den: u64) -> Rat {
    if !x.is_finite() || x == 0.0 {
        return Rat::zero();
    }
    let neg = x < 0.0;
    let target = x.abs();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = target;
    let cap = BigInt::from(max_den);
    let mut best = Rat::zero();
    for _ in 0..64 {
        let a = libm::floor(rem);
        let ai: BigInt = match FromPrimitive::from_f64(a) {
            Some(v) => v,
            None => break,
        };
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > cap {
            break;
        }
        best = Rat::new(h2.clone(), k2.clone());
        let approx = rat_to_f64(&best);
        if libm::fabs(approx - target) <= REL_TOL * target {
            break;
        }
        h0 = core::mem::replace(&mut h1, h2);
        k0 = core::mem::replace(&mut k1, k2);
        let frac = rem - a;
        if frac <= 0.0 {
            break;
        }
        rem = 1.0 / frac;
        if !rem.is_finite() {
            break;
        }
    }
    if best.is_zero() {
        // Smaller than 1/max_den: round to the nearest multiple.
        let n = libm::round(target * max_den as f64);
        best = Rat::new(Int::from(n as u64), Int::from(max_den));
    }
    if neg {
        -best
    } else {
        best
    }
}
