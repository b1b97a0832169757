//! End-to-end pipeline and its JSON report.
//!
//! Everything except the trailing `timing` section is a deterministic
//! function of the configuration.

use crate::certifier::{certify_gap, Certificate, Verdict};
use crate::config::{Expectation, RunConfig};
use crate::enumeration::{
    alpha_block, enumerate_cached, negative_sublattice, same_sign_check, EnumerationError,
    RootCache, SameSignVerdict,
};
use crate::exact::{format_rational, rational_str, Q};
use crate::frame::{build_frame, kahler_cone_check, otr_constant, FrameSummary, KahlerVerdict};
use crate::lattice::{build_k3_lattice, IntersectionLattice};
use crate::search::{exclusion_search, DecompositionVerdict, Outcome, SearchOptions};
use serde::Serialize;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct LatticeFacts {
    pub rank: usize,
    pub signature: (usize, usize),
    pub determinant: String,
    pub symmetric: bool,
    pub even: bool,
    pub gram_hash: String,
    pub e8_roots: usize,
    pub negative_roots: usize,
    pub negative_roots_closed_under_negation: bool,
    pub same_sign: SameSignVerdict,
}

impl LatticeFacts {
    pub fn ok(&self) -> bool {
        self.signature == (3, 19)
            && (self.determinant == "1" || self.determinant == "-1")
            && self.symmetric
            && self.even
            && self.e8_roots == 240
            && self.negative_roots == 486
            && self.same_sign.holds
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionReport {
    pub target: String,
    pub expected: Expectation,
    pub verdict: Option<DecompositionVerdict>,
    pub error: Option<String>,
    pub expectation_met: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    #[serde(with = "rational_str")]
    pub t: Q,
    pub summary: Option<FrameSummary>,
    #[serde(with = "rational_str")]
    pub otr_constant: Q,
    pub kahler: Option<KahlerVerdict>,
    pub certificate: Option<Certificate>,
    pub error: Option<String>,
    pub exclusions: Vec<ExclusionReport>,
}

impl FrameReport {
    pub fn certificate_passed(&self) -> bool {
        matches!(&self.certificate, Some(c) if c.verdict == Verdict::Pass)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Overall {
    pub lattice_ok: bool,
    pub certificates_pass: bool,
    pub expectations_met: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub total_millis: f64,
    pub e8_cache_hit: bool,
    pub stages: Vec<StageTiming>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub lattice: LatticeFacts,
    pub frames: Vec<FrameReport>,
    pub overall: Overall,
    /// Wall-clock data; the only nondeterministic section.
    pub timing: Timing,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the `timing` section removed, for reproducibility checks.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }
}

struct Clock {
    start: Instant,
    stages: Vec<StageTiming>,
}

impl Clock {
    fn time<T>(&mut self, stage: String, f: impl FnOnce() -> T) -> T {
        let s = Instant::now();
        let out = f();
        self.stages.push(StageTiming {
            stage,
            millis: s.elapsed().as_secs_f64() * 1e3,
        });
        out
    }
}

/// Lattice facts plus whether the E8 root set came from the cache.
pub fn lattice_facts(
    lat: &IntersectionLattice,
    cache: Option<&RootCache>,
) -> Result<(LatticeFacts, bool), EnumerationError> {
    let (e8, hit) = enumerate_cached(&alpha_block(lat), -2, cache)?;
    let (neg, _) = enumerate_cached(&negative_sublattice(lat), -2, cache)?;
    let facts = LatticeFacts {
        rank: lat.rank(),
        signature: lat.signature(),
        determinant: format_rational(&lat.determinant()),
        symmetric: lat.is_symmetric(),
        even: lat.has_even_diagonal(),
        gram_hash: lat.gram_hash(),
        e8_roots: e8.len(),
        negative_roots: neg.len(),
        negative_roots_closed_under_negation: neg.closed_under_negation(),
        same_sign: same_sign_check(&neg),
    };
    Ok((facts, hit))
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<Report, EnumerationError> {
    let mut clock = Clock {
        start: Instant::now(),
        stages: Vec::new(),
    };
    let lat = build_k3_lattice();
    let cache = cfg.cache_dir.as_ref().map(RootCache::new);
    let (lattice, e8_cache_hit) =
        clock.time("lattice".into(), || lattice_facts(&lat, cache.as_ref()))?;
    let neg = negative_sublattice(&lat);
    let neg_roots = enumerate_cached(&neg, -2, cache.as_ref())?.0.ambient(&neg);

    let mut frames = Vec::new();
    for t in &cfg.t_list {
        let label = format!("t={}", format_rational(t));
        let params = cfg.params(t);
        let fr = clock.time(label, || frame_report(&lat, cfg, &params, &neg_roots));
        frames.push(fr);
    }

    let certificates_pass = frames.iter().all(FrameReport::certificate_passed);
    let expectations_met = frames
        .iter()
        .flat_map(|f| &f.exclusions)
        .all(|e| e.expectation_met);
    let lattice_ok = lattice.ok();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        config: cfg.clone(),
        lattice,
        frames,
        overall: Overall {
            lattice_ok,
            certificates_pass,
            expectations_met,
            pass: lattice_ok && certificates_pass && expectations_met,
        },
        timing: Timing {
            total_millis: clock.start.elapsed().as_secs_f64() * 1e3,
            e8_cache_hit,
            stages: clock.stages,
        },
    })
}

fn frame_report(
    lat: &IntersectionLattice,
    cfg: &RunConfig,
    params: &crate::frame::FrameParams,
    neg_roots: &[Vec<i64>],
) -> FrameReport {
    let mut rep = FrameReport {
        t: params.t.clone(),
        summary: None,
        otr_constant: otr_constant(lat, params),
        kahler: None,
        certificate: None,
        error: None,
        exclusions: Vec::new(),
    };
    let frame = match build_frame(lat, params) {
        Ok(f) => f,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    rep.summary = Some(frame.summary());
    rep.kahler = Some(kahler_cone_check(lat, &frame, neg_roots));
    let cert = match certify_gap(lat, &frame, cfg.norm_floor) {
        Ok(c) => c,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    let opts = SearchOptions {
        lagrangian: cfg.lagrangian,
    };
    for target in &cfg.targets {
        let res = exclusion_search(lat, &target.class, &cfg.budget_sq, &frame, &cert, opts);
        let (verdict, error) = match res {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let met = match &verdict {
            Some(v) => match target.expect {
                Expectation::Found => v.outcome == Outcome::Found,
                Expectation::Impossible => v.outcome == Outcome::Impossible,
            },
            None => false,
        };
        rep.exclusions.push(ExclusionReport {
            target: target.expr.clone(),
            expected: target.expect,
            verdict,
            error,
            expectation_met: met,
        });
    }
    rep.certificate = Some(cert);
    rep
}
