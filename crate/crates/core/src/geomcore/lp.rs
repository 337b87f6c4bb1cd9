//! Exact rational simplex (phase one only) for feasibility questions.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::exactalg::{Rat, rat};

/// Decides whether `{y ≥ 0 : a·y = b}` is nonempty. `a` is given as rows.
///
/// Two-phase simplex restricted to phase one with artificial variables and
/// Bland's anti-cycling rule, so it always terminates.
pub fn feasible(a: &[Vec<Rat>], b: &[Rat]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();
    let width = n + m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r = vec![Rat::zero(); width];
        for (j, x) in row.iter().enumerate() {
            r[j] = if flip { -x } else { x.clone() };
        }
        r[n + i] = rat(1);
        r[rhs] = if flip { -bi } else { bi.clone() };
        t.push(r);
    }
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut obj = vec![Rat::zero(); width];
    for r in &t {
        for j in 0..n {
            obj[j] -= &r[j];
        }
        obj[rhs] -= &r[rhs];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rat)> = None;
        for (i, r) in t.iter().enumerate() {
            if !r[enter].is_positive() {
                continue;
            }
            let q = &r[rhs] / &r[enter];
            leave = match leave {
                None => Some((i, q)),
                Some((li, lq)) => {
                    if q < lq || (q == lq && basis[i] < basis[li]) {
                        Some((i, q))
                    } else {
                        Some((li, lq))
                    }
                }
            };
        }
        // Phase one is bounded below by zero, so a leaving row always exists.
        let Some((p, _)) = leave else { break };
        pivot(&mut t, &mut obj, p, enter);
        basis[p] = enter;
    }
    obj[rhs].is_zero()
}

fn pivot(t: &mut [Vec<Rat>], obj: &mut [Rat], p: usize, q: usize) {
    let piv = t[p][q].clone();
    for x in t[p].iter_mut() {
        *x /= &piv;
    }
    let prow = t[p].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == p || r[q].is_zero() {
            continue;
        }
        let f = r[q].clone();
        for (x, y) in r.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
    if !obj[q].is_zero() {
        let f = obj[q].clone();
        for (x, y) in obj.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}

/// Whether `x ∈ conv(±v₁, …, ±v_m)`: some `λ` with `Σ|λᵢ| ≤ 1` and `Σλᵢvᵢ = x`.
pub fn in_symmetric_hull(vertices: &[Vec<Rat>], x: &[Rat]) -> bool {
    let d = x.len();
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    let m = vertices.len();
    // Columns: λ⁺ (m), λ⁻ (m), slack (1). Rows: d coordinates + the ℓ₁ budget.
    let mut a = vec![vec![Rat::zero(); 2 * m + 1]; d + 1];
    for (k, v) in vertices.iter().enumerate() {
        for i in 0..d {
            a[i][k] = v[i].clone();
            a[i][m + k] = -&v[i];
        }
        a[d][k] = rat(1);
        a[d][m + k] = rat(1);
    }
    a[d][2 * m] = rat(1);
    let mut b: Vec<Rat> = x.to_vec();
    b.push(rat(1));
    feasible(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::ratio;

    fn v(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn simple_systems() {
        // y1 + y2 = 1, y ≥ 0
        assert!(feasible(&[v(&[1, 1])], &[rat(1)]));
        // y1 + y2 = -1 has no nonnegative solution
        assert!(!feasible(&[v(&[1, 1])], &[rat(-1)]));
        // y1 - y2 = -3 is fine
        assert!(feasible(&[v(&[1, -1])], &[rat(-3)]));
        // y1 = 1, y1 = 2
        assert!(!feasible(&[v(&[1]), v(&[1])], &[rat(1), rat(2)]));
    }

    #[test]
    fn hull_membership() {
        let verts = [v(&[2, 1]), v(&[1, 2])];
        // (1,1) = (2,1)/3 + (1,2)/3
        assert!(in_symmetric_hull(&verts, &v(&[1, 1])));
        assert!(in_symmetric_hull(&verts, &v(&[-1, -1])));
        assert!(in_symmetric_hull(&verts, &v(&[2, 1])));
        assert!(!in_symmetric_hull(&verts, &v(&[2, 2])));
        assert!(in_symmetric_hull(&verts, &[ratio(1, 2), ratio(-1, 2)]));
        assert!(!in_symmetric_hull(&verts, &[rat(1), rat(-1)]));
        assert!(in_symmetric_hull(&verts, &v(&[0, 0])));
    }

    #[test]
    fn hull_of_lower_dimensional_set() {
        let verts = [v(&[2, 2])];
        assert!(in_symmetric_hull(&verts, &v(&[1, 1])));
        assert!(in_symmetric_hull(&verts, &v(&[-2, -2])));
        assert!(!in_symmetric_hull(&verts, &v(&[1, 0])));
        assert!(!in_symmetric_hull(&verts, &v(&[3, 3])));
    }
}
