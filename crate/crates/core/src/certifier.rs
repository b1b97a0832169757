//! Finite certificates for the area gap: every integral class `γ ≠ 0` with
//! `γ·γ ≥ −2` has `area² ≥ 1`, except `±α₀`, with equality exactly at
//! `±α₁, ±α₂, ±α₃`.
//!
//! The search space is split by the coefficient vector `n` of `γ` along
//! `ξⱼ+ηⱼ` (see [`crate::lattice::split_positive_negative`]).
//!
//! * Stage A bounds `|n|²` for any class of small area. Write `A` for the
//!   area² threshold, `F = −norm_floor`, `W = ω_t·ω_t`, `M = −ω₋·ω₋` and
//!   `r² = |ρ|²`. Since `σ, τ, ρ` are orthogonal with `|σ| = |τ|`,
//!   `⟨n,ρ⟩² ≥ r² (|n|² − A/(2W))`. Cauchy–Schwarz on the negative definite
//!   part gives `(|⟨n,ρ⟩| − √A)² ≤ M (2|n|² + F)`, and
//!   `(q − √A)² ≥ q²/2 − A` turns the two into
//!   `|n|² (r²/2 − 2M) ≤ A + MF + r²A/(4W)`. When `r²/2 > 2M` this is a
//!   finite bound `N_max`.
//! * Stage B discharges each half-integral `n ≠ 0` with `|n|² ≤ N_max`,
//!   either through the period part alone, through the Cauchy–Schwarz bound,
//!   or by enumerating the negative part in its coset.
//! * Stage C scans `n = 0`: the negative definite vectors of norm ≥ −F.

use crate::enumeration::{negative_sublattice, DefiniteSublattice};
use crate::exact::{floor_sqrt, format_rational, q, qi, rational_str, Approx, Q};
use crate::frame::{build_frame, dot3, norm3, FrameError, FrameParams, HodgeFrame};
use crate::lattice::{self, IntersectionLattice, LatticeVector, RANK};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("inequality chain too weak: {} fails ({} vs {})", .0.name, format_rational(&.0.lhs), format_rational(&.0.rhs))]
    ChainTooWeak(Box<InequalityRecord>),
    #[error("invalid frame: {0}")]
    InvalidFrame(#[from] FrameError),
    #[error("norm floor {0} must be at most -2")]
    NormFloor(i64),
}

/// One strict inequality `lhs > rhs` with both sides evaluated.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InequalityRecord {
    pub name: String,
    #[serde(with = "rational_str")]
    pub lhs: Q,
    #[serde(with = "rational_str")]
    pub rhs: Q,
    pub holds: bool,
}

impl InequalityRecord {
    fn strict(name: &str, lhs: Q, rhs: Q) -> Self {
        InequalityRecord {
            name: name.to_string(),
            holds: lhs > rhs,
            lhs,
            rhs,
        }
    }
}

/// Stage A: the exact values behind the bound on `|n|²`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ChainRecord {
    #[serde(with = "rational_str")]
    pub area_sq_bound: Q,
    pub floor_slack: i64,
    #[serde(with = "rational_str")]
    pub rho_norm_sq: Q,
    #[serde(with = "rational_str")]
    pub sigma_norm_sq: Q,
    #[serde(with = "rational_str")]
    pub omega_t_norm: Q,
    #[serde(with = "rational_str")]
    pub omega_minus_norm: Q,
    #[serde(with = "rational_str")]
    pub lambda_t_sq: Q,
    pub inequalities: Vec<InequalityRecord>,
    #[serde(with = "rational_str")]
    pub n_max_sq: Q,
    pub n_max_sq_approx: Approx,
}

pub fn chain_record(
    f: &HodgeFrame,
    area_sq_bound: &Q,
    floor_slack: i64,
) -> Result<ChainRecord, CertifyError> {
    let r2 = f.rho_norm_sq();
    let w = f.omega_t_norm.clone();
    let m = f.omega_minus_norm();
    let half_r2 = &r2 / qi(2);
    let inequalities = vec![
        InequalityRecord::strict("omega_t.omega_t > 0", w.clone(), Q::zero()),
        InequalityRecord::strict("|rho|^2/2 > 2*M", half_r2.clone(), qi(2) * &m),
    ];
    if let Some(bad) = inequalities.iter().find(|i| !i.holds) {
        return Err(CertifyError::ChainTooWeak(Box::new(bad.clone())));
    }
    let a = area_sq_bound;
    let n_max_sq = (a + &m * qi(floor_slack) + &r2 * a / (qi(4) * &w)) / (&half_r2 - qi(2) * &m);
    Ok(ChainRecord {
        area_sq_bound: a.clone(),
        floor_slack,
        rho_norm_sq: r2,
        sigma_norm_sq: norm3(&f.params.sigma),
        omega_t_norm: w,
        omega_minus_norm: m,
        lambda_t_sq: f.lambda_t_sq.clone(),
        inequalities,
        n_max_sq_approx: Approx::of(&n_max_sq),
        n_max_sq,
    })
}

/// How one value of `n` was ruled out (or searched).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resolution {
    /// `λ_t² (⟨n,σ⟩² + ⟨n,τ⟩²)` alone exceeds the area² threshold.
    PeriodBound,
    /// `|⟨n,ρ⟩| > √A + √K` with `K = M (2|n|² + F)`, contradicting
    /// Cauchy–Schwarz on the negative part.
    KahlerBound,
    /// The negative part was enumerated in its coset.
    Enumerated { candidates: usize, low_area: usize },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SmallNCase {
    #[serde(with = "crate::exact::rational_vec_str")]
    pub n: Vec<Q>,
    #[serde(with = "rational_str")]
    pub n_norm_sq: Q,
    #[serde(with = "rational_str")]
    pub n_dot_sigma: Q,
    #[serde(with = "rational_str")]
    pub n_dot_tau: Q,
    #[serde(with = "rational_str")]
    pub n_dot_rho: Q,
    /// `λ_t² (⟨n,σ⟩² + ⟨n,τ⟩²)`.
    #[serde(with = "rational_str")]
    pub period_part: Q,
    /// `M (2|n|² + F)`.
    #[serde(with = "rational_str")]
    pub kahler_slack: Q,
    pub resolution: Resolution,
}

/// Stage C summary: the `n = 0` stratum.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct StratumSummary {
    pub vectors_checked: usize,
    pub roots: usize,
    #[serde(with = "rational_str")]
    pub min_area_sq: Q,
    pub below_or_at_bound: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassRecord {
    pub expr: String,
    pub class: LatticeVector,
    pub self_pairing: i64,
    #[serde(with = "rational_str")]
    pub area_sq: Q,
    pub area_approx: Approx,
}

impl ClassRecord {
    pub fn new(lat: &IntersectionLattice, f: &HodgeFrame, coords: &[i64]) -> Self {
        let class = LatticeVector::from_ints(coords);
        let area_sq = f.area_squared_int(coords);
        ClassRecord {
            expr: class.ascii(),
            self_pairing: lat.norm_int(coords),
            area_approx: Approx::of_sqrt(&area_sq),
            area_sq,
            class,
        }
    }

    pub fn coords(&self) -> Vec<i64> {
        self.class.to_ints().expect("integral class")
    }
}

/// Every nonzero integral class with `γ·γ ≥ norm_floor` and
/// `area² ≤ area_sq_bound`, together with the stage records proving the
/// list complete.
#[derive(Clone, Debug)]
pub struct LowAreaScan {
    pub chain: ChainRecord,
    pub small_n_cases: Vec<SmallNCase>,
    pub stratum: StratumSummary,
    /// Ambient coordinates, lexicographically sorted.
    pub classes: Vec<Vec<i64>>,
}

/// Half-integral `n ≠ 0` with `|n|² ≤ n_max_sq`, lexicographic in `2n`.
pub fn admissible_n(n_max_sq: &Q) -> Vec<[Q; 3]> {
    let four_n = n_max_sq * qi(4);
    if four_n < Q::from_integer(1.into()) {
        return Vec::new();
    }
    let bound = floor_sqrt(&four_n).to_i64().expect("small bound");
    let limit = four_n.floor().to_integer().to_i64().expect("small bound");
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                let s = a * a + b * b + c * c;
                if s >= 1 && s <= limit {
                    out.push([q(a, 2), q(b, 2), q(c, 2)]);
                }
            }
        }
    }
    out
}

struct ScanContext<'a> {
    lat: &'a IntersectionLattice,
    frame: &'a HodgeFrame,
    neg: DefiniteSublattice,
    area_sq_bound: Q,
    norm_floor: i64,
}

impl ScanContext<'_> {
    fn floor_slack(&self) -> i64 {
        -self.norm_floor
    }

    fn resolve_n(&self, n: &[Q; 3]) -> (SmallNCase, Vec<Vec<i64>>) {
        let f = self.frame;
        let a = &self.area_sq_bound;
        let x = norm3(n);
        let ns = dot3(n, &f.params.sigma);
        let nt = dot3(n, &f.params.tau);
        let nr = dot3(n, &f.params.rho);
        let period_part = &f.lambda_t_sq * (&ns * &ns + &nt * &nt);
        let kahler_slack = f.omega_minus_norm() * (qi(2) * &x + qi(self.floor_slack()));
        let mut found = Vec::new();
        let resolution = if &period_part > a {
            Resolution::PeriodBound
        } else if kahler_bound_excludes(&nr, a, &kahler_slack) {
            Resolution::KahlerBound
        } else {
            let (candidates, hits) = self.enumerate_coset(n, &x);
            found = hits;
            Resolution::Enumerated {
                candidates,
                low_area: found.len(),
            }
        };
        let case = SmallNCase {
            n: n.to_vec(),
            n_norm_sq: x,
            n_dot_sigma: ns,
            n_dot_tau: nt,
            n_dot_rho: nr,
            period_part,
            kahler_slack,
            resolution,
        };
        (case, found)
    }

    /// Classes `γ = Σ nⱼ(ξⱼ+ηⱼ) + γ₋` with `−γ₋·γ₋ ≤ 2|n|² + F`.
    fn enumerate_coset(&self, n: &[Q; 3], x: &Q) -> (usize, Vec<Vec<i64>>) {
        let r = self.neg.rank();
        let mut center = vec![Q::zero(); r];
        for j in 0..3 {
            // mⱼ ≡ nⱼ (mod 1).
            center[16 + j] = &n[j] - n[j].floor();
        }
        let bound = qi(2) * x + qi(self.floor_slack());
        let zs = self.neg.enumerate_ball(&bound, Some(&center));
        let mut hits = Vec::new();
        for z in &zs {
            let mut g = vec![0i64; RANK];
            g[..16].copy_from_slice(&z[..16]);
            for j in 0..3 {
                let m = Q::from_integer(z[16 + j].into()) + &center[16 + j];
                let xi_c = &n[j] + &m;
                let eta_c = &n[j] - &m;
                g[lattice::xi(j + 1)] = xi_c.to_integer().to_i64().expect("integral");
                g[lattice::eta(j + 1)] = eta_c.to_integer().to_i64().expect("integral");
                debug_assert!(xi_c.is_integer() && eta_c.is_integer());
            }
            if self.lat.norm_int(&g) >= self.norm_floor
                && self.frame.area_squared_int(&g) <= self.area_sq_bound
            {
                hits.push(g);
            }
        }
        (zs.len(), hits)
    }

    fn scan_stratum(&self) -> (StratumSummary, Vec<Vec<i64>>) {
        let bound = qi(self.floor_slack());
        let zs: Vec<Vec<i64>> = self
            .neg
            .enumerate_ball(&bound, None)
            .into_iter()
            .filter(|z| z.iter().any(|&c| c != 0))
            .collect();
        let evaluated: Vec<(Vec<i64>, Q)> = zs
            .par_iter()
            .map(|z| {
                let g = self.neg.embed(z);
                let a = self.frame.area_squared_int(&g);
                (g, a)
            })
            .collect();
        let roots = zs.iter().filter(|z| self.neg.norm(z) == -2).count();
        let min_area_sq = evaluated
            .iter()
            .map(|(_, a)| a.clone())
            .min()
            .unwrap_or_else(Q::zero);
        let hits: Vec<Vec<i64>> = evaluated
            .into_iter()
            .filter(|(_, a)| a <= &self.area_sq_bound)
            .map(|(g, _)| g)
            .collect();
        (
            StratumSummary {
                vectors_checked: zs.len(),
                roots,
                min_area_sq,
                below_or_at_bound: hits.len(),
            },
            hits,
        )
    }
}

/// `|p| > √A + √K`, decided in ℚ.
fn kahler_bound_excludes(p: &Q, a: &Q, k: &Q) -> bool {
    let p2 = p * p;
    if &p2 <= a {
        return false;
    }
    let slack = &p2 - a - k;
    slack.is_positive() && &slack * &slack > qi(4) * a * k
}

/// Complete list of nonzero classes with `γ·γ ≥ norm_floor` and
/// `area² ≤ area_sq_bound`.
pub fn scan_low_area(
    lat: &IntersectionLattice,
    frame: &HodgeFrame,
    area_sq_bound: &Q,
    norm_floor: i64,
) -> Result<LowAreaScan, CertifyError> {
    if norm_floor > -2 {
        return Err(CertifyError::NormFloor(norm_floor));
    }
    let chain = chain_record(frame, area_sq_bound, -norm_floor)?;
    let ctx = ScanContext {
        lat,
        frame,
        neg: negative_sublattice(lat),
        area_sq_bound: area_sq_bound.clone(),
        norm_floor,
    };
    let ns = admissible_n(&chain.n_max_sq);
    let resolved: Vec<(SmallNCase, Vec<Vec<i64>>)> =
        ns.par_iter().map(|n| ctx.resolve_n(n)).collect();
    let (stratum, mut classes) = ctx.scan_stratum();
    let mut small_n_cases = Vec::with_capacity(resolved.len());
    for (case, hits) in resolved {
        small_n_cases.push(case);
        classes.extend(hits);
    }
    classes.sort();
    Ok(LowAreaScan {
        chain,
        small_n_cases,
        stratum,
        classes,
    })
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateKind {
    /// Complete three-stage proof.
    Analytic,
    /// Exhaustive box search over a coordinate slice; independent oracle.
    BruteForce {
        box_radius: i64,
        support: Vec<String>,
    },
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub params: FrameParams,
    pub norm_floor: i64,
    pub verdict: Verdict,
    pub equality_classes: Vec<ClassRecord>,
    pub exceptional_classes: Vec<ClassRecord>,
    pub violations: Vec<ClassRecord>,
    pub large_n: Option<ChainRecord>,
    pub small_n_cases: Vec<SmallNCase>,
    pub negative_root_summary: Option<StratumSummary>,
    pub caveats: Vec<String>,
}

fn unit(i: usize, sign: i64) -> Vec<i64> {
    let mut v = vec![0i64; RANK];
    v[i] = sign;
    v
}

/// `{±α₀}`.
pub fn expected_exceptional() -> Vec<Vec<i64>> {
    let mut v = vec![unit(lattice::alpha(0), -1), unit(lattice::alpha(0), 1)];
    v.sort();
    v
}

/// `{±α₁, ±α₂, ±α₃}`.
pub fn expected_equality() -> Vec<Vec<i64>> {
    let mut v: Vec<Vec<i64>> = (1..=3)
        .flat_map(|i| [unit(lattice::alpha(i), 1), unit(lattice::alpha(i), -1)])
        .collect();
    v.sort();
    v
}

struct Classified {
    equality: Vec<ClassRecord>,
    exceptional: Vec<ClassRecord>,
    violations: Vec<ClassRecord>,
}

fn classify(lat: &IntersectionLattice, f: &HodgeFrame, classes: &[Vec<i64>]) -> Classified {
    let exceptional_set = expected_exceptional();
    let equality_set = expected_equality();
    let one = qi(1);
    let mut out = Classified {
        equality: Vec::new(),
        exceptional: Vec::new(),
        violations: Vec::new(),
    };
    for g in classes {
        let rec = ClassRecord::new(lat, f, g);
        if exceptional_set.contains(g) {
            out.exceptional.push(rec);
        } else if rec.area_sq == one {
            if !equality_set.contains(g) {
                out.violations.push(rec.clone());
            }
            out.equality.push(rec);
        } else if rec.area_sq < one {
            out.violations.push(rec);
        }
    }
    out
}

fn caveats() -> Vec<String> {
    vec![
        "sigma is rational here; the claim that no class involving xi_j + eta_j is holomorphically representable needs irrational sigma and is not part of this certificate".into(),
        "+-a0 are excluded by hypothesis; their area^2 = t^2 is recorded and no lower bound is asserted".into(),
        "the zero class is excluded".into(),
    ]
}

/// Three-stage certificate of the area gap for one frame.
pub fn certify_gap(
    lat: &IntersectionLattice,
    f: &HodgeFrame,
    norm_floor: i64,
) -> Result<Certificate, CertifyError> {
    f.params.validate()?;
    let scan = scan_low_area(lat, f, &qi(1), norm_floor)?;
    let c = classify(lat, f, &scan.classes);
    let coords = |v: &[ClassRecord]| v.iter().map(ClassRecord::coords).collect::<Vec<_>>();
    let pass = c.violations.is_empty()
        && coords(&c.equality) == expected_equality()
        && coords(&c.exceptional) == expected_exceptional();
    Ok(Certificate {
        kind: CertificateKind::Analytic,
        params: f.params.clone(),
        norm_floor,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        equality_classes: c.equality,
        exceptional_classes: c.exceptional,
        violations: c.violations,
        large_n: Some(scan.chain),
        small_n_cases: scan.small_n_cases,
        negative_root_summary: Some(scan.stratum),
        caveats: caveats(),
    })
}

/// Exhaustive check over integral `γ` supported on `support` with every
/// coordinate in `[−box_radius, box_radius]`.
pub fn brute_force_gap(
    lat: &IntersectionLattice,
    f: &HodgeFrame,
    box_radius: i64,
    support: &[usize],
    norm_floor: i64,
) -> Certificate {
    let classes = brute_force_low_area(lat, f, box_radius, support, norm_floor, &qi(1));
    let c = classify(lat, f, &classes);
    Certificate {
        kind: CertificateKind::BruteForce {
            box_radius,
            support: support.iter().map(|&i| lattice::symbol(i)).collect(),
        },
        params: f.params.clone(),
        norm_floor,
        verdict: if c.violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        equality_classes: c.equality,
        exceptional_classes: c.exceptional,
        violations: c.violations,
        large_n: None,
        small_n_cases: Vec::new(),
        negative_root_summary: None,
        caveats: vec!["oracle certificate: covers only the listed coordinate box".into()],
    }
}

/// Nonzero classes in the box with `γ·γ ≥ norm_floor` and area² ≤ bound.
pub fn brute_force_low_area(
    lat: &IntersectionLattice,
    f: &HodgeFrame,
    box_radius: i64,
    support: &[usize],
    norm_floor: i64,
    area_sq_bound: &Q,
) -> Vec<Vec<i64>> {
    let width = 2 * box_radius + 1;
    let total = (width as u64).pow(support.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut g = vec![0i64; RANK];
        for &i in support {
            g[i] = (c % width as u64) as i64 - box_radius;
            c /= width as u64;
        }
        if g.iter().all(|&v| v == 0) {
            continue;
        }
        if lat.norm_int(&g) >= norm_floor && &f.area_squared_int(&g) <= area_sq_bound {
            out.push(g);
        }
    }
    out.sort();
    out
}

/// Re-derives every stored number of a certificate from its parameters.
pub fn revalidate(lat: &IntersectionLattice, cert: &Certificate) -> Result<(), String> {
    let f = build_frame(lat, &cert.params).map_err(|e| e.to_string())?;
    let all: Vec<&ClassRecord> = cert
        .equality_classes
        .iter()
        .chain(&cert.exceptional_classes)
        .chain(&cert.violations)
        .collect();
    for rec in &all {
        let fresh = ClassRecord::new(lat, &f, &rec.coords());
        if &fresh != *rec {
            return Err(format!("class record {} does not re-validate", rec.expr));
        }
        if fresh.self_pairing < cert.norm_floor {
            return Err(format!("class {} is below the norm floor", rec.expr));
        }
    }
    let mut listed: Vec<Vec<i64>> = all.iter().map(|r| r.coords()).collect();
    listed.sort();
    listed.dedup();
    let c = classify(lat, &f, &listed);
    let coords = |v: &[ClassRecord]| v.iter().map(ClassRecord::coords).collect::<Vec<_>>();
    if coords(&c.violations) != coords(&cert.violations)
        || coords(&c.equality) != coords(&cert.equality_classes)
        || coords(&c.exceptional) != coords(&cert.exceptional_classes)
    {
        return Err("classification does not re-validate".into());
    }
    let verdict = match &cert.kind {
        CertificateKind::BruteForce { .. } => c.violations.is_empty(),
        CertificateKind::Analytic => {
            let chain = chain_record(&f, &qi(1), -cert.norm_floor).map_err(|e| e.to_string())?;
            if Some(&chain) != cert.large_n.as_ref() {
                return Err("stage A record does not re-validate".into());
            }
            let ctx = ScanContext {
                lat,
                frame: &f,
                neg: negative_sublattice(lat),
                area_sq_bound: qi(1),
                norm_floor: cert.norm_floor,
            };
            let ns = admissible_n(&chain.n_max_sq);
            if ns.len() != cert.small_n_cases.len() {
                return Err("stage B case list does not re-validate".into());
            }
            for (n, stored) in ns.iter().zip(&cert.small_n_cases) {
                let (fresh, _) = ctx.resolve_n(n);
                if &fresh != stored {
                    return Err(format!(
                        "stage B case n = {:?} does not re-validate",
                        stored.n
                    ));
                }
            }
            let (stratum, _) = ctx.scan_stratum();
            if Some(&stratum) != cert.negative_root_summary.as_ref() {
                return Err("stage C summary does not re-validate".into());
            }
            c.violations.is_empty()
                && coords(&c.equality) == expected_equality()
                && coords(&c.exceptional) == expected_exceptional()
        }
    };
    let expected = if verdict {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    if expected != cert.verdict {
        return Err("verdict does not re-validate".into());
    }
    Ok(())
}
