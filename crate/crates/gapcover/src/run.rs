//! Running instances, batch aggregation, JSON reports and CSV rows.

use std::io::Write;
use std::time::Instant;

use gapcover_core::cover::{
    cover_timed, verify_cover, verify_projection, CoverOptions, CoverReport, Diagnostics,
    ProjectionReport, StageClock,
};
use gapcover_core::enumerate::{Gap, DEFAULT_BUDGET};
use gapcover_core::exactalg::{Int, Rat};
use gapcover_core::Error;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::spec::{gap_json, rat_list, rat_str, Item};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CERT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub eps: Option<Rat>,
    pub budget: Option<u128>,
    pub fail_fast: bool,
    pub allow_skip: bool,
    /// Functional applied to every instance without its own `phi`.
    pub phi: Option<Vec<i64>>,
    /// Include per-stage timings in JSON (breaks byte-identical output).
    pub timings: bool,
    /// Run items one at a time.
    pub sequential: bool,
}

struct WallClock(Instant);

impl StageClock for WallClock {
    fn now_ns(&self) -> u64 {
        self.0.elapsed().as_nanos() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    Failed,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
        }
    }
}

/// Everything computed for one item.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub item: Item,
    pub gap: Option<Gap>,
    /// Pipeline report (absent for verify-only items).
    pub cover: Option<CoverReport>,
    /// Independent re-verification of `gap`.
    pub verify: Option<CoverReport>,
    pub projection: Option<ProjectionReport>,
    pub error: Option<Error>,
    pub runtime_ms: f64,
}

impl Outcome {
    pub fn status(&self) -> Status {
        if let Some(e) = &self.error {
            return if e.is_budget() { Status::Skipped } else { Status::Failed };
        }
        let ok = self.cover.as_ref().is_none_or(|r| r.contained)
            && self.verify.as_ref().is_some_and(|r| r.contained)
            && self.projection.as_ref().is_none_or(ProjectionReport::all_hold);
        if ok {
            Status::Certified
        } else {
            Status::Failed
        }
    }

    /// The report that carries the headline numbers.
    pub fn headline(&self) -> Option<&CoverReport> {
        self.cover.as_ref().or(self.verify.as_ref())
    }

    pub fn witness(&self) -> Option<&[i64]> {
        self.cover
            .iter()
            .chain(&self.verify)
            .find_map(|r| r.witness.as_deref())
    }
}

pub fn run_item(item: &Item, flags: &Flags) -> Outcome {
    let start = Instant::now();
    let spec = &item.instance;
    let budget = flags.budget.or(spec.budget).unwrap_or(DEFAULT_BUDGET);
    let mut out = Outcome {
        item: item.clone(),
        gap: item.gap.clone(),
        cover: None,
        verify: None,
        projection: None,
        error: None,
        runtime_ms: 0.0,
    };
    let result = (|| -> Result<(), Error> {
        let body = spec
            .to_body()
            .map_err(|e| Error::Representation(e.to_string()))?;
        let gap = match &item.gap {
            Some(g) => g.clone(),
            None => {
                let mut opts = CoverOptions {
                    budget,
                    ..CoverOptions::default()
                };
                if let Some(e) = flags.eps.clone().or_else(|| spec.eps.clone()) {
                    opts.eps = e;
                }
                let c = cover_timed(&body, &opts, &WallClock(Instant::now()))?;
                out.cover = Some(c.report);
                out.gap = Some(c.gap.clone());
                c.gap
            }
        };
        out.verify = Some(verify_cover(&body, &gap, budget)?);
        if let Some(phi) = spec.phi.as_ref().or(flags.phi.as_ref()) {
            out.projection = Some(verify_projection(&body, &gap, phi, budget)?);
        }
        Ok(())
    })();
    out.error = result.err();
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    out
}

pub fn run_batch(items: &[Item], flags: &Flags) -> Vec<Outcome> {
    if flags.fail_fast {
        let mut out = Vec::new();
        for item in items {
            let o = run_item(item, flags);
            let stop = match o.status() {
                Status::Failed => true,
                Status::Skipped => !flags.allow_skip,
                Status::Certified => false,
            };
            out.push(o);
            if stop {
                break;
            }
        }
        out
    } else if flags.sequential {
        items.iter().map(|i| run_item(i, flags)).collect()
    } else {
        items.par_iter().map(|i| run_item(i, flags)).collect()
    }
}

pub fn exit_code(outcomes: &[Outcome], allow_skip: bool) -> i32 {
    if outcomes.iter().any(|o| o.status() == Status::Failed) {
        EXIT_CERT_FAILURE
    } else if !allow_skip && outcomes.iter().any(|o| o.status() == Status::Skipped) {
        EXIT_BUDGET
    } else {
        EXIT_OK
    }
}

fn u128_json(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn int_json(x: &Int) -> Value {
    json!(x.to_string())
}

fn diagnostics_json(d: &Diagnostics) -> Value {
    json!({
        "eps": rat_str(&d.eps),
        "q_volume": rat_str(&d.q_volume),
        "q_prime_volume": rat_str(&d.q_prime_volume),
        "b_volume": rat_str(&d.b_volume),
        "reduction_ratio_sq": rat_str(&d.reduction_ratio_sq),
        "reduction_ratio_upper": rat_str(&d.reduction_ratio),
        "halfwidths": rat_list(&d.halfwidths),
        "halfsides": d.halfsides,
        "a_min": rat_str(&d.a_min),
        "a_below_one": d.a_below_one,
        "det_T": int_json(&d.det_t),
        "TU_equals_V": d.tu_equals_v,
        "body_in_Q": d.body_in_q,
        "approx": {
            "ellipsoid_volume": d.ellipsoid_volume_approx,
            "c1": d.constants.c1,
            "c2": d.constants.c2,
            "c3": d.constants.c3,
        },
    })
}

pub fn report_json(r: &CoverReport, timings: bool) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), json!(r.dim));
    m.insert("intrinsic_dim".into(), json!(r.intrinsic_dim));
    m.insert("card_C".into(), u128_json(r.card_c));
    m.insert("card_P".into(), u128_json(r.card_p));
    m.insert("proper".into(), json!(r.proper));
    m.insert("ratio".into(), rat_str(&r.ratio));
    m.insert("bound_value".into(), rat_str(&r.bound_value));
    m.insert("within_bound".into(), json!(r.within_bound));
    m.insert("contained".into(), json!(r.contained));
    m.insert("witness".into(), json!(r.witness));
    if let Some(d) = &r.diagnostics {
        m.insert("diagnostics".into(), diagnostics_json(d));
    }
    if timings {
        let t: Map<String, Value> = r
            .timings_ns
            .iter()
            .map(|(s, ns)| (s.to_string(), json!(*ns as f64 / 1e6)))
            .collect();
        m.insert("timings_ms".into(), Value::Object(t));
    }
    Value::Object(m)
}

pub fn projection_json(p: &ProjectionReport) -> Value {
    json!({
        "card_C": u128_json(p.card_c),
        "card_P": u128_json(p.card_p),
        "image_C": u128_json(p.image_c),
        "image_P": u128_json(p.image_p),
        "m": u128_json(p.m),
        "m_prime": u128_json(p.m_prime),
        "card_PP": p.card_pp.map(u128_json),
        "pp_explicit": p.pp_explicit,
        "pp_consistent": p.pp_consistent,
        "degraded": p.degraded,
        "contained": p.contained,
        "first_step": p.first_step,
        "second_step": p.second_step,
        "doubling": p.doubling,
        "m_prime_ge_m": p.m_prime_ge_m,
        "bound_holds": p.bound_holds,
        "all_hold": p.all_hold(),
    })
}

pub fn outcome_json(o: &Outcome, timings: bool) -> Value {
    let mut m = Map::new();
    m.insert("instance".into(), o.item.instance.to_json());
    m.insert("status".into(), json!(o.status().name()));
    if let Some(g) = &o.gap {
        m.insert("gap".into(), gap_json(g));
    }
    if let Some(r) = &o.cover {
        m.insert("report".into(), report_json(r, timings));
    }
    if let Some(r) = &o.verify {
        m.insert("verification".into(), report_json(r, false));
    }
    if let Some(p) = &o.projection {
        m.insert("projection".into(), projection_json(p));
    }
    if let Some(e) = &o.error {
        m.insert("error".into(), json!(e.to_string()));
    }
    if timings {
        m.insert("runtime_ms".into(), json!(o.runtime_ms));
    }
    Value::Object(m)
}

/// Aggregates over a batch. Maxima are taken over certified instances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregate {
    pub certified: usize,
    pub failed: usize,
    pub skipped: usize,
    pub max_ratio: Option<Rat>,
    pub max_c1: f64,
    pub max_c2: f64,
    pub max_c3: f64,
}

pub fn aggregate(outcomes: &[Outcome]) -> Aggregate {
    let mut a = Aggregate::default();
    for o in outcomes {
        match o.status() {
            Status::Certified => a.certified += 1,
            Status::Failed => a.failed += 1,
            Status::Skipped => a.skipped += 1,
        }
        if o.status() != Status::Certified {
            continue;
        }
        if let Some(r) = o.headline() {
            if a.max_ratio.as_ref().is_none_or(|m| r.ratio > *m) {
                a.max_ratio = Some(r.ratio.clone());
            }
            if let Some(d) = &r.diagnostics {
                a.max_c1 = a.max_c1.max(d.constants.c1);
                a.max_c2 = a.max_c2.max(d.constants.c2);
                a.max_c3 = a.max_c3.max(d.constants.c3);
            }
        }
    }
    a
}

pub fn batch_json(outcomes: &[Outcome], timings: bool) -> Value {
    let a = aggregate(outcomes);
    let failures: Vec<Value> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.status() != Status::Certified)
        .map(|(i, o)| {
            json!({
                "index": i,
                "status": o.status().name(),
                "witness": o.witness(),
                "error": o.error.as_ref().map(|e| e.to_string()),
            })
        })
        .collect();
    json!({
        "instances": outcomes.iter().map(|o| outcome_json(o, timings)).collect::<Vec<_>>(),
        "aggregate": {
            "count": outcomes.len(),
            "certified": a.certified,
            "failed": a.failed,
            "skipped": a.skipped,
            "max_ratio": a.max_ratio.as_ref().map(rat_str),
            "approx": {"max_c1": a.max_c1, "max_c2": a.max_c2, "max_c3": a.max_c3},
        },
        "failures": failures,
    })
}

pub const CSV_HEADER: [&str; 11] = [
    "dim",
    "kind",
    "seed",
    "card_C",
    "card_P",
    "ratio_num",
    "ratio_den",
    "contained",
    "a_min",
    "reduction_ratio",
    "runtime_ms",
];

pub fn write_csv<W: Write>(w: W, outcomes: &[Outcome]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for o in outcomes {
        let spec = &o.item.instance;
        let r = o.headline();
        let d = r.and_then(|r| r.diagnostics.as_ref());
        let opt = |x: Option<String>| x.unwrap_or_default();
        wr.write_record([
            spec.dim.to_string(),
            spec.label(),
            opt(spec.seed.map(|s| s.to_string())),
            opt(r.map(|r| r.card_c.to_string())),
            opt(r.map(|r| r.card_p.to_string())),
            opt(r.map(|r| r.ratio.numer().to_string())),
            opt(r.map(|r| r.ratio.denom().to_string())),
            (o.status() == Status::Certified).to_string(),
            opt(d.map(|d| d.a_min.to_string())),
            opt(d.map(|d| d.reduction_ratio.to_string())),
            format!("{:.3}", o.runtime_ms),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
