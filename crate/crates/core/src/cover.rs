//! Covering a symmetric convex progression `C = K ∩ Zᵈ` by a GAP.
//!
//! The pipeline, on the lattice spanned by `C`:
//!
//! 1. enclosing ellipsoid `E ⊇ K` and circumscribed parallelotope
//!    `Q = U·[−1, 1]ᵈ ⊇ E`, certified `K ⊆ Q` exactly;
//! 2. the lattice generated by the coordinate rows `uʲ` of `U`;
//! 3. LLL on those rows giving `V = T·U`, re-derived and certified by
//!    [`unimodular_solve`](crate::exactalg::unimodular_solve);
//! 4. box half-widths `aⱼ = ‖vʲ‖₁` of `Q′ = T·Q`;
//! 5. `P = T⁻¹(B ∩ Zᵈ)`, i.e. differences are the columns of `T⁻¹` and
//!    half-sides `nⱼ = ⌊aⱼ⌋`. A point `p` lies in `P` iff `|(T·p)ⱼ| ≤ nⱼ`.
//!
//! Containment `C ⊆ P` is then checked point by point.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enumerate::{
    self, Gap, GapMembership, Point, PointSet, Subset, enum_body, enum_gap, project_count,
    subset_check, sumset,
};
use crate::error::{Error, Result, Stage};
use crate::exactalg::{self, Int, IntMat, Mat, Rat, UnimodularMat, rat, ratio};
use crate::geomcore::{
    BodyRep, ConvexBody, DEFAULT_EPS, Ellipsoid, circumscribe_parallelotope, mvee,
};
use crate::latred::{LatticeBasis, certify_reduction, default_delta, lll_reduce};

/// Ratio constant: every certified cover satisfies `#P/#C ≤ k^{3k}·c₁`
/// (with `k` the dimension of `span C`).
pub fn c1() -> Rat {
    ratio(C1.0, C1.1)
}

/// Box constant: `|B| ≤ (c₂·k)^{2k}·|Q′|`.
pub fn c2() -> Rat {
    ratio(C2.0, C2.1)
}

/// Parallelotope constant: `|Q| ≤ (c₃·k)^k·#C`.
pub fn c3() -> Rat {
    ratio(C3.0, C3.1)
}

pub const C1: (i64, i64) = (1, 1);
pub const C2: (i64, i64) = (3, 4);
pub const C3: (i64, i64) = (1, 1);

/// `k^{3k}·c₁`, or 1 when `k = 0`.
pub fn ratio_bound(k: usize) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let kk = BigInt::from(k).pow(3 * k as u32);
    Rat::from_integer(kk) * c1()
}

/// Monotonic time source for per-stage timings.
pub trait StageClock {
    fn now_ns(&self) -> u64;
}

/// Clock that always reads zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl StageClock for NoClock {
    fn now_ns(&self) -> u64 {
        0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverOptions {
    pub eps: Rat,
    pub delta: Rat,
    pub budget: u128,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            eps: ratio(DEFAULT_EPS.0, DEFAULT_EPS.1),
            delta: default_delta(),
            budget: enumerate::DEFAULT_BUDGET,
        }
    }
}

/// `C` expressed inside the lattice `Zᵈ ∩ span(C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceReduction {
    /// Dimension of `span(C)`.
    pub k: usize,
    /// `d × k`; columns form a basis of `Zᵈ ∩ span(C)`.
    pub embed: IntMat,
    /// Preimage of the body in `Rᵏ`; `None` when `k = 0`.
    pub body: Option<ConvexBody>,
    /// `C` in embedded coordinates.
    pub points: PointSet,
    /// `C` in ambient coordinates.
    pub ambient: PointSet,
}

impl SubspaceReduction {
    pub fn is_identity(&self) -> bool {
        self.embed.is_square() && self.embed == IntMat::identity(self.k)
    }

    /// `embed · y`.
    pub fn lift(&self, y: &[Int]) -> Vec<Int> {
        self.embed.mul_vec(y).expect("k-vector")
    }
}

pub fn restrict_to_span(body: &ConvexBody, budget: u128) -> Result<SubspaceReduction> {
    let d = body.dim();
    let c = enum_body(body, budget)?;
    let nonzero: Vec<Vec<Int>> = c
        .iter()
        .filter(|p| p.iter().any(|&x| x != 0))
        .map(|p| enumerate::to_int(p))
        .collect();
    if nonzero.is_empty() {
        return Ok(SubspaceReduction {
            k: 0,
            embed: IntMat::zeros(d, 0),
            body: None,
            points: PointSet::new(0, vec![Vec::new()])?,
            ambient: c,
        });
    }
    let m = IntMat::from_rows(nonzero)?;
    let r = exactalg::rank(&m.to_rat());
    if r == d {
        return Ok(SubspaceReduction {
            k: d,
            embed: IntMat::identity(d),
            body: Some(body.clone()),
            points: c.clone(),
            ambient: c,
        });
    }
    // Integer normals of span(C), then the integer vectors they annihilate.
    let normals = exactalg::left_kernel(&m.transpose());
    let basis = exactalg::left_kernel(&normals.transpose());
    if basis.rows() != r {
        return Err(Error::Certification("saturated lattice has wrong rank".into()));
    }
    let embed = basis.transpose();
    let e = embed.to_rat();
    let et = e.transpose();
    let pinv = exactalg::inverse(&et.mul(&e)?)?.mul(&et)?;
    let pull = |x: &[Rat]| -> Result<Option<Vec<Rat>>> {
        let y = pinv.mul_vec(x)?;
        Ok((e.mul_vec(&y)? == x).then_some(y))
    };
    let mut pts = Vec::with_capacity(c.len());
    for p in c.iter() {
        let y = pull(&enumerate::to_rat(p))?
            .ok_or_else(|| Error::Certification("lattice point outside span".into()))?;
        let yi: Option<Point> = y
            .iter()
            .map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None })
            .collect();
        pts.push(yi.ok_or_else(|| Error::Certification("lattice point not in sublattice".into()))?);
    }
    let points = PointSet::new(r, pts)?;
    let hull_of_points = || -> Result<ConvexBody> {
        ConvexBody::vertices(
            points
                .iter()
                .filter(|p| p.iter().any(|&x| x != 0))
                .map(|p| enumerate::to_rat(p))
                .collect(),
        )
    };
    let restricted = match body.rep() {
        BodyRep::Ellipsoid(a) => {
            ConvexBody::ellipsoid(Ellipsoid::new(et.mul(a.form())?.mul(&e)?)?)
        }
        BodyRep::Vertices(vs) => {
            let pulled: Option<Vec<Vec<Rat>>> =
                vs.iter().map(|v| pull(v).ok().flatten()).collect();
            match pulled {
                Some(p) => ConvexBody::vertices(p)?,
                None => hull_of_points()?,
            }
        }
        BodyRep::Box(_) => hull_of_points()?,
    };
    Ok(SubspaceReduction {
        k: r,
        embed,
        body: Some(restricted),
        points,
        ambient: c,
    })
}

/// Approximate per-instance constants, for reporting only.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MeasuredConstants {
    /// `(#P/#C) / k^{3k}`
    pub c1: f64,
    /// `(|B|/|Q′|)^{1/2k} / k`
    pub c2: f64,
    /// `(|Q|/#C)^{1/k} / k`
    pub c3: f64,
}

/// Exact stage quantities of one pipeline run.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub eps: Rat,
    pub q_volume: Rat,
    pub q_prime_volume: Rat,
    pub b_volume: Rat,
    /// Upper bound on `Π‖vʲ‖₂ / |det V|`.
    pub reduction_ratio: Rat,
    pub reduction_ratio_sq: Rat,
    pub halfwidths: Vec<Rat>,
    pub halfsides: Vec<u64>,
    pub a_min: Rat,
    pub a_below_one: bool,
    pub det_t: Int,
    pub tu_equals_v: bool,
    pub body_in_q: bool,
    /// Floating diagnostics.
    pub ellipsoid_volume_approx: f64,
    pub constants: MeasuredConstants,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport {
    pub dim: usize,
    pub intrinsic_dim: usize,
    pub card_c: u128,
    pub card_p: u128,
    pub proper: bool,
    pub ratio: Rat,
    pub bound_value: Rat,
    pub within_bound: bool,
    pub contained: bool,
    pub witness: Option<Point>,
    pub diagnostics: Option<Diagnostics>,
    pub timings_ns: Vec<(Stage, u64)>,
}

/// Matrices of the run, in `span(C)` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub embed: IntMat,
    pub u: Mat,
    pub v: Mat,
    pub t: UnimodularMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    pub gap: Gap,
    pub report: CoverReport,
    pub certificate: Option<Certificate>,
}

struct Timer<'a, C: StageClock + ?Sized> {
    clock: &'a C,
    last: u64,
    out: Vec<(Stage, u64)>,
}

impl<'a, C: StageClock + ?Sized> Timer<'a, C> {
    fn new(clock: &'a C) -> Self {
        Timer {
            clock,
            last: clock.now_ns(),
            out: Vec::new(),
        }
    }

    fn lap(&mut self, stage: Stage) {
        let now = self.clock.now_ns();
        self.out.push((stage, now.saturating_sub(self.last)));
        self.last = now;
    }
}

pub fn cover(body: &ConvexBody, opts: &CoverOptions) -> Result<Cover> {
    cover_timed(body, opts, &NoClock)
}

pub fn cover_timed<C: StageClock + ?Sized>(
    body: &ConvexBody,
    opts: &CoverOptions,
    clock: &C,
) -> Result<Cover> {
    let d = body.dim();
    let mut timer = Timer::new(clock);
    let red = restrict_to_span(body, opts.budget).map_err(|e| e.at(Stage::Subspace))?;
    timer.lap(Stage::Subspace);
    let card_c = red.ambient.len() as u128;
    let Some(kbody) = red.body.as_ref() else {
        return Ok(Cover {
            gap: Gap::origin(d),
            report: CoverReport {
                dim: d,
                intrinsic_dim: 0,
                card_c,
                card_p: 1,
                proper: true,
                ratio: Rat::one(),
                bound_value: Rat::one(),
                within_bound: true,
                contained: true,
                witness: None,
                diagnostics: None,
                timings_ns: timer.out,
            },
            certificate: None,
        });
    };
    let k = red.k;

    let e = enclosing_ellipsoid(kbody, &opts.eps).map_err(|e| e.at(Stage::Ellipsoid))?;
    timer.lap(Stage::Ellipsoid);

    let q = circumscribe_parallelotope(&e, &Rat::one()).map_err(|e| e.at(Stage::Parallelotope))?;
    let body_in_q = body_in_parallelotope(kbody, &e, &q).map_err(|e| e.at(Stage::Parallelotope))?;
    if !body_in_q {
        return Err(Error::Certification("body not contained in Q".into()).at(Stage::Parallelotope));
    }
    timer.lap(Stage::Parallelotope);

    let u = q.matrix().clone();
    let basis = LatticeBasis::new(u.clone()).map_err(|e| e.at(Stage::Reduction))?;
    let (vb, t) = lll_reduce(&basis, &opts.delta).map_err(|e| e.at(Stage::Reduction))?;
    let cert = certify_reduction(&vb);
    let v = vb.matrix().clone();
    timer.lap(Stage::Reduction);

    let t2 = exactalg::unimodular_solve(&u, &v).map_err(|e| e.at(Stage::Unimodular))?;
    if t2 != t {
        return Err(Error::Certification("transforms disagree".into()).at(Stage::Unimodular));
    }
    let tu_equals_v = t.to_rat().mul(&u).map_err(|e| e.at(Stage::Unimodular))? == v;
    let det_t = t.det();
    if !tu_equals_v || det_t.abs() != Int::one() {
        return Err(Error::Certification("T·U ≠ V".into()).at(Stage::Unimodular));
    }
    timer.lap(Stage::Unimodular);

    let halfwidths: Vec<Rat> = (0..k)
        .map(|j| v.row(j).iter().map(|x| x.abs()).sum())
        .collect();
    let halfsides: Vec<u64> = halfwidths
        .iter()
        .map(|a| a.floor().to_integer().to_u64().ok_or(Error::Overflow("half-side")))
        .collect::<Result<_>>()
        .map_err(|e| e.at(Stage::Box))?;
    let a_min = halfwidths.iter().min().cloned().unwrap_or_else(Rat::zero);
    let tinv = t.inverse();
    let diffs: Vec<Vec<Int>> = (0..k).map(|j| red.lift(&tinv.as_int().col(j))).collect();
    let ns: Vec<Int> = halfsides.iter().map(|&n| Int::from(n)).collect();
    let gap = Gap::from_int(&vec![Int::zero(); d], &diffs, &ns).map_err(|e| e.at(Stage::Box))?;
    timer.lap(Stage::Box);

    // |(T·y)ⱼ| ≤ nⱼ on every point of C.
    let check = subset_check(&red.points, |y| {
        let ty = t.as_int().mul_vec(&enumerate::to_int(y)).expect("k-vector");
        ty.iter().zip(&ns).all(|(x, n)| x.abs() <= *n)
    });
    let witness = check.witness().map(|y| {
        enumerate::int_point(&red.lift(&enumerate::to_int(y))).expect("point of C")
    });
    timer.lap(Stage::Certify);

    let two_k = Rat::from_integer(BigInt::from(2).pow(k as u32));
    let q_volume = q.volume();
    let q_prime_volume = exactalg::det(&v).expect("square").abs() * &two_k;
    let b_volume = halfwidths.iter().fold(two_k, |acc, a| acc * a);
    let card_p = gap.nominal_size();
    let ratio_cp = Rat::new(Int::from(card_p), Int::from(card_c));
    let bound_value = ratio_bound(k);
    let constants = measured_constants(k, &ratio_cp, &b_volume, &q_prime_volume, &q_volume, card_c);

    Ok(Cover {
        report: CoverReport {
            dim: d,
            intrinsic_dim: k,
            card_c,
            card_p,
            proper: true,
            within_bound: ratio_cp <= bound_value,
            ratio: ratio_cp,
            bound_value,
            contained: check.holds(),
            witness,
            diagnostics: Some(Diagnostics {
                eps: opts.eps.clone(),
                q_volume,
                q_prime_volume,
                b_volume,
                reduction_ratio: cert.ratio,
                reduction_ratio_sq: cert.ratio_sq,
                a_below_one: a_min < Rat::one(),
                a_min,
                halfwidths,
                halfsides,
                det_t,
                tu_equals_v,
                body_in_q,
                ellipsoid_volume_approx: e.volume_approx(),
                constants,
            }),
            timings_ns: timer.out,
        },
        gap,
        certificate: Some(Certificate {
            embed: red.embed,
            u,
            v,
            t,
        }),
    })
}

/// `E ⊇ K`: the body itself for ellipsoids, otherwise the approximate
/// minimum-volume ellipsoid of its vertices or box corners.
fn enclosing_ellipsoid(body: &ConvexBody, eps: &Rat) -> Result<Ellipsoid> {
    match body.rep() {
        BodyRep::Ellipsoid(e) => Ok(e.clone()),
        BodyRep::Vertices(vs) => mvee(vs, eps),
        BodyRep::Box(h) => mvee(&ConvexBody::box_corners(h), eps),
    }
}

/// Exact `K ⊆ Q` through the representation of `K`.
fn body_in_parallelotope(
    body: &ConvexBody,
    e: &Ellipsoid,
    q: &crate::geomcore::Parallelotope,
) -> Result<bool> {
    match body.rep() {
        BodyRep::Ellipsoid(_) => q.contains_scaled_ellipsoid(e, &Rat::one()),
        BodyRep::Vertices(vs) => all_inside(q, vs),
        BodyRep::Box(h) => all_inside(q, &ConvexBody::box_corners(h)),
    }
}

fn all_inside(q: &crate::geomcore::Parallelotope, pts: &[Vec<Rat>]) -> Result<bool> {
    for p in pts {
        if !q.contains(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn measured_constants(
    k: usize,
    ratio_cp: &Rat,
    b_volume: &Rat,
    q_prime_volume: &Rat,
    q_volume: &Rat,
    card_c: u128,
) -> MeasuredConstants {
    use crate::geomcore::float::rat_to_f64;
    let kf = k as f64;
    MeasuredConstants {
        c1: rat_to_f64(ratio_cp) / libm::pow(kf, 3.0 * kf),
        c2: libm::pow(rat_to_f64(&(b_volume / q_prime_volume)), 1.0 / (2.0 * kf)) / kf,
        c3: libm::pow(rat_to_f64(q_volume) / card_c as f64, 1.0 / kf) / kf,
    }
}

/// Independent check of a claimed cover: enumerate `C`, test GAP
/// membership exactly, count `P`.
pub fn verify_cover(body: &ConvexBody, p: &Gap, budget: u128) -> Result<CoverReport> {
    let d = body.dim();
    if p.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            found: p.dim(),
        });
    }
    let c = enum_body(body, budget)?;
    let member = GapMembership::new(p, budget)?;
    let check = subset_check(&c, |x| member.contains(x));
    let (card_p, proper) = if p.diffs_independent() {
        (p.nominal_size(), true)
    } else {
        let e = enum_gap(p, budget)?;
        (e.points.len() as u128, e.proper)
    };
    let k = point_rank(&c);
    let card_c = c.len() as u128;
    let ratio_cp = Rat::new(Int::from(card_p), Int::from(card_c));
    let bound_value = ratio_bound(k);
    Ok(CoverReport {
        dim: d,
        intrinsic_dim: k,
        card_c,
        card_p,
        proper,
        within_bound: ratio_cp <= bound_value,
        ratio: ratio_cp,
        bound_value,
        contained: check.holds(),
        witness: match check {
            Subset::Holds => None,
            Subset::Fails(w) => Some(w),
        },
        diagnostics: None,
        timings_ns: Vec::new(),
    })
}

fn point_rank(s: &PointSet) -> usize {
    if s.iter().all(|p| p.iter().all(|&x| x == 0)) {
        return 0;
    }
    let m = Mat::from_rows(s.iter().map(|p| enumerate::to_rat(p)).collect()).expect("same dim");
    exactalg::rank(&m)
}

/// Counts behind the projection chain for one functional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionReport {
    pub card_c: u128,
    pub card_p: u128,
    pub image_c: u128,
    pub image_p: u128,
    /// Largest fiber of `φ` on `C`.
    pub m: u128,
    /// Largest fiber of `φ` on `P`.
    pub m_prime: u128,
    /// `#(P+P)`, when enumerable.
    pub card_pp: Option<u128>,
    /// `P+P` was formed pairwise rather than as the doubled GAP.
    pub pp_explicit: bool,
    /// Pairwise sums and the doubled GAP agree (when both were formed).
    pub pp_consistent: Option<bool>,
    /// `P+P` could not be formed pairwise.
    pub degraded: bool,
    pub contained: bool,
    /// `#φ(P)·m′ ≤ #(P+P)`
    pub first_step: Option<bool>,
    /// `#(P+P)·m ≤ 2ᵈ·#P·m′`
    pub second_step: Option<bool>,
    /// `#(P+P) ≤ 2ᵈ·#P`
    pub doubling: Option<bool>,
    pub m_prime_ge_m: bool,
    /// `#φ(P) ≤ k^{3k}·c₁·#φ(C)`
    pub bound_holds: bool,
}

impl ProjectionReport {
    /// Every checked inequality holds and nothing was skipped.
    pub fn all_hold(&self) -> bool {
        self.contained
            && self.m_prime_ge_m
            && self.bound_holds
            && self.first_step == Some(true)
            && self.second_step == Some(true)
            && self.doubling == Some(true)
            && self.pp_consistent != Some(false)
    }
}

pub fn verify_projection(
    body: &ConvexBody,
    p: &Gap,
    phi: &[i64],
    budget: u128,
) -> Result<ProjectionReport> {
    let d = body.dim();
    let c = enum_body(body, budget)?;
    let pe = enum_gap(p, budget)?;
    let ps = pe.points;
    let contained = subset_check(&c, |x| ps.contains(x)).holds();
    let pc = project_count(&c, phi)?;
    let pp_proj = project_count(&ps, phi)?;

    let explicit = sumset(&ps, &ps, budget);
    let doubled = enum_gap(&p.doubled(), budget).map(|g| g.points);
    let (pp, pp_explicit, degraded) = match (&explicit, &doubled) {
        (Ok(s), _) => (Some(s.len() as u128), true, false),
        (Err(e), Ok(s)) if e.is_budget() => (Some(s.len() as u128), false, true),
        (Err(e), Err(_)) if e.is_budget() => (None, false, true),
        (Err(e), _) => return Err(e.clone()),
    };
    let pp_consistent = match (&explicit, &doubled) {
        (Ok(a), Ok(b)) => Some(a == b),
        _ => None,
    };

    let card_c = c.len() as u128;
    let card_p = ps.len() as u128;
    let image_c = pc.image as u128;
    let image_p = pp_proj.image as u128;
    let m = pc.max_fiber as u128;
    let m_prime = pp_proj.max_fiber as u128;
    let two_d = 1u128 << d;
    let k = point_rank(&c);
    let bound = ratio_bound(k) * Rat::from_integer(Int::from(image_c));
    Ok(ProjectionReport {
        card_c,
        card_p,
        image_c,
        image_p,
        m,
        m_prime,
        card_pp: pp,
        pp_explicit,
        pp_consistent,
        degraded,
        contained,
        first_step: pp.map(|pp| image_p * m_prime <= pp),
        second_step: pp.map(|pp| pp * m <= two_d * card_p * m_prime),
        doubling: pp.map(|pp| pp <= two_d * card_p),
        m_prime_ge_m: m_prime >= m,
        bound_holds: Rat::from_integer(Int::from(image_p)) <= bound,
    })
}

/// `|Q| ≤ (c₃·k)^k·#C`
pub fn parallelotope_chain_holds(k: usize, d: &Diagnostics, card_c: u128) -> bool {
    d.q_volume <= (c3() * rat(k as i64)).pow(k as i32) * Rat::from_integer(Int::from(card_c))
}

/// `|B| ≤ (c₂·k)^{2k}·|Q′|`
pub fn box_chain_holds(k: usize, d: &Diagnostics) -> bool {
    d.b_volume <= (c2() * rat(k as i64)).pow(2 * k as i32) * &d.q_prime_volume
}

/// `#P ≤ 2ᵏ·|B|`
pub fn count_chain_holds(k: usize, d: &Diagnostics, card_p: u128) -> bool {
    Rat::from_integer(Int::from(card_p))
        <= Rat::from_integer(BigInt::from(2).pow(k as u32)) * &d.b_volume
}
