use gapcover_core::cover::{cover, verify_cover, CoverOptions};
use gapcover_core::enumerate::{enum_body, enum_gap, project_count, sumset, Gap, PointSet, DEFAULT_BUDGET};
use gapcover_core::exactalg::{self, det, hnf, inverse, rank, unimodular_solve, IntMat, Mat, Rat};
use gapcover_core::geomcore::{mvee, ConvexBody, DEFAULT_EPS};
use gapcover_core::latred::{
    certify_reduction, default_delta, is_lll_reduced, lll_defect_bound_sq, lll_reduce, LatticeBasis,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn square(max_d: usize, h: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_d).prop_flat_map(move |d| prop::collection::vec(prop::collection::vec(-h..=h, d), d))
}

fn nonsingular(max_d: usize, h: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    square(max_d, h).prop_filter("singular", |m| !det(&Mat::from_i64(m)).unwrap().is_zero())
}

fn points(max_d: usize, max_n: usize, h: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_d).prop_flat_map(move |d| {
        prop::collection::vec(prop::collection::vec(-h..=h, d), d..=d + max_n)
            .prop_filter("rank", move |p| rank(&Mat::from_i64(p)) == d)
    })
}

fn to_rows(p: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    p.iter().map(|r| r.iter().map(|&x| exactalg::rat(x)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_times_inverse_det_is_one(m in nonsingular(5, 9)) {
        let a = Mat::from_i64(&m);
        let inv = inverse(&a).unwrap();
        prop_assert_eq!(det(&a).unwrap() * det(&inv).unwrap(), Rat::one());
        prop_assert_eq!(a.mul(&inv).unwrap(), Mat::identity(m.len()));
    }

    #[test]
    fn hnf_is_idempotent(m in nonsingular(5, 9)) {
        let a = IntMat::from_i64(&m);
        let (h, u) = hnf(&a).unwrap();
        prop_assert_eq!(u.as_int().mul(&a).unwrap(), h.clone());
        let (h2, _) = hnf(&h).unwrap();
        prop_assert_eq!(h2, h);
    }

    #[test]
    fn unimodular_solve_agrees_with_hnf(m in nonsingular(4, 9), seed in any::<u64>()) {
        let a = Mat::from_i64(&m);
        let d = m.len();
        // Scramble by a product of elementary unimodular row operations.
        let mut rows = IntMat::identity(d).row_vecs();
        let mut s = seed;
        for _ in 0..2 * d {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let (i, j) = ((s >> 33) as usize % d, (s >> 17) as usize % d);
            if i != j {
                let c = ((s >> 5) % 5) as i64 - 2;
                let add: Vec<_> = rows[j].iter().map(|x| x * c).collect();
                for (x, y) in rows[i].iter_mut().zip(add) { *x += y; }
            }
        }
        let u = IntMat::from_rows(rows).unwrap();
        let b = u.to_rat().mul(&a).unwrap();
        prop_assert!(exactalg::same_lattice(&a, &b).unwrap());
        let t = unimodular_solve(&a, &b).unwrap();
        prop_assert_eq!(t.to_rat().mul(&a).unwrap(), b);
        prop_assert_eq!(t.det().magnitude().clone(), num_bigint::BigUint::one());
    }

    #[test]
    fn lll_preserves_lattice_and_meets_bound(m in nonsingular(5, 30)) {
        let basis = LatticeBasis::from_i64(&m).unwrap();
        let (v, t) = lll_reduce(&basis, &default_delta()).unwrap();
        prop_assert!(is_lll_reduced(&v, &default_delta()));
        prop_assert_eq!(t.to_rat().mul(basis.matrix()).unwrap(), v.matrix().clone());
        prop_assert!(exactalg::same_lattice(basis.matrix(), v.matrix()).unwrap());
        prop_assert!(certify_reduction(&v).ratio_sq <= lll_defect_bound_sq(m.len()));
    }

    #[test]
    fn mvee_contains_its_points(p in points(4, 5, 12)) {
        let e = mvee(&to_rows(&p), &exactalg::ratio(DEFAULT_EPS.0, DEFAULT_EPS.1)).unwrap();
        for q in to_rows(&p) {
            prop_assert!(e.contains(&q));
            let neg: Vec<Rat> = q.iter().map(|x| -x).collect();
            prop_assert!(e.contains(&neg));
        }
    }

    #[test]
    fn proper_gap_has_nominal_size(base in prop::collection::vec(-5i64..=5, 2),
                                   n in prop::collection::vec(0u64..=4, 2),
                                   w in nonsingular(2, 6).prop_filter("d=2", |m| m.len() == 2)) {
        let g = Gap::new(base, w, n).unwrap();
        let out = enum_gap(&g, DEFAULT_BUDGET).unwrap();
        prop_assert!(out.proper);
        prop_assert_eq!(out.points.len() as u128, g.nominal_size());
    }

    #[test]
    fn projection_counts_are_consistent(p in points(3, 4, 4), phi in prop::collection::vec(-4i64..=4, 3)) {
        let d = p[0].len();
        let body = ConvexBody::vertices(to_rows(&p)).unwrap();
        let set = enum_body(&body, DEFAULT_BUDGET).unwrap();
        let pr = project_count(&set, &phi[..d]).unwrap();
        prop_assert!(pr.image * pr.max_fiber >= set.len());
        prop_assert!(pr.image <= set.len());
        let pp = sumset(&set, &set, DEFAULT_BUDGET).unwrap();
        prop_assert!(pp.len() >= set.len());
        prop_assert!(pp.len() <= (1usize << d) * set.len() * set.len());
    }

    #[test]
    fn enumeration_of_symmetric_bodies_is_symmetric(p in points(3, 4, 5)) {
        let body = ConvexBody::vertices(to_rows(&p)).unwrap();
        let set: PointSet = enum_body(&body, DEFAULT_BUDGET).unwrap();
        prop_assert!(set.is_symmetric());
        prop_assert!(set.contains(&vec![0; p[0].len()]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cover_contains_and_verifies(p in points(3, 3, 5)) {
        let body = ConvexBody::vertices(to_rows(&p)).unwrap();
        let c = cover(&body, &CoverOptions::default()).unwrap();
        prop_assert!(c.report.contained);
        prop_assert!(verify_cover(&body, &c.gap, DEFAULT_BUDGET).unwrap().contained);
        prop_assert!(c.report.card_p >= c.report.card_c);
    }
}
