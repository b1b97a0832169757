//! Exclusion search over decompositions of a class into 𝒥-holomorphic parts.
//!
//! A decomposition `target = Σ γᵢ` is admissible when every part is nonzero
//! with `γᵢ·γᵢ ≥ −2` (adjunction) and the total area `Σ √area²(γᵢ)` is
//! strictly below `√budget_sq`. Given a passing gap certificate, every part
//! other than `±α₀` costs at least 1 and each `±α₀` costs exactly `t`, so
//! the search is organised by
//!
//! * `q` – number of `±α₀` parts, with net multiplicity `k`,
//! * `p` – number of remaining parts, each of area ≥ 1,
//!
//! and only `(q, k, p)` with `p + q t < √budget_sq` are explored. Remaining
//! parts come from the finite list of admissible classes with area² below
//! the budget.

use crate::certifier::{
    scan_low_area, Certificate, CertificateKind, CertifyError, ClassRecord, Verdict,
};
use crate::exact::{exact_sqrt, format_rational, qi, rational_str, sqrt_enclosure, sqrt_sum_lt, Q};
use crate::frame::HodgeFrame;
use crate::lattice::{self, IntersectionLattice, LatticeVector, RANK};
use num_traits::{One, Signed};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("the zero class has no representative curve")]
    ZeroClass,
    #[error("class {0} is not integral")]
    NotIntegral(String),
    #[error("certificate does not match the frame: {0}")]
    CertificateMismatch(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// Necessary condition for a single holomorphic representative:
/// `γ·γ ≥ 2g − 2 ≥ −2`.
pub fn adjunction_admissible(
    lat: &IntersectionLattice,
    gamma: &LatticeVector,
) -> Result<bool, SearchError> {
    let coords = integral(gamma)?;
    Ok(lat.norm_int(&coords) >= -2)
}

fn integral(gamma: &LatticeVector) -> Result<Vec<i64>, SearchError> {
    let coords = gamma
        .to_ints()
        .ok_or_else(|| SearchError::NotIntegral(gamma.pretty()))?;
    if coords.iter().all(|&c| c == 0) {
        return Err(SearchError::ZeroClass);
    }
    Ok(coords)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    /// No parts left but the residual is nonzero.
    ResidualNonzero,
    /// The residual would have to be one curve but has `γ·γ < −2`.
    AdjunctionRejected,
    /// `p` parts of area ≥ 1 plus `q t` already reach the budget.
    AreaBound,
    /// The residual's area² alone reaches the budget.
    OutsideUniverse,
    /// The residual is a single admissible class but the exact total is
    /// not below budget.
    TotalAreaExceeded,
    /// The residual is `±α₀`, counted under a larger `q`.
    DeferredToAlpha0,
    /// Every multiset of `p` parts was tried.
    Exhausted,
    Found,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TraceRecord {
    pub case: String,
    pub alpha0_parts: usize,
    pub alpha0_net: i64,
    pub other_parts: usize,
    pub residual: String,
    pub kind: TraceKind,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Impossible,
    Found,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DecompositionVerdict {
    pub target: LatticeVector,
    pub target_expr: String,
    #[serde(with = "rational_str")]
    pub budget_sq: Q,
    pub outcome: Outcome,
    /// Parts of the witness decomposition when found, canonical order.
    pub parts: Vec<ClassRecord>,
    /// Admissible classes with area² below the budget (the part universe).
    pub universe_size: usize,
    pub trace: Vec<TraceRecord>,
    pub interpretation: Option<String>,
}

impl DecompositionVerdict {
    pub fn is_impossible(&self) -> bool {
        self.outcome == Outcome::Impossible
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Annotate the verdict for lagrangian two-spheres; the lattice
    /// computation is identical.
    pub lagrangian: bool,
}

struct Part {
    coords: Vec<i64>,
    area_sq: Q,
    /// Rational lower bound on the area, at least 1.
    area_lb: Q,
}

struct Searcher<'a> {
    lat: &'a IntersectionLattice,
    frame: &'a HodgeFrame,
    budget_sq: Q,
    parts: Vec<Part>,
    index: HashMap<Vec<i64>, usize>,
    trace: Vec<TraceRecord>,
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&c| c == 0)
}

impl Searcher<'_> {
    fn t(&self) -> &Q {
        self.frame.t()
    }

    /// `(lower)² ≥ budget`, i.e. a cost of at least `lower` cannot fit.
    fn exceeds(&self, lower: &Q) -> bool {
        !lower.is_negative() && lower * lower >= self.budget_sq
    }

    fn record(
        &mut self,
        q: usize,
        k: i64,
        p: usize,
        residual: &[i64],
        kind: TraceKind,
        detail: String,
    ) {
        self.trace.push(TraceRecord {
            case: format!("q={q} k={k} p={p}"),
            alpha0_parts: q,
            alpha0_net: k,
            other_parts: p,
            residual: LatticeVector::from_ints(residual).ascii(),
            kind,
            detail,
        });
    }

    /// Exact check of `q·t + Σ area(parts) < √budget`.
    fn fits(&self, q: usize, parts: &[usize]) -> bool {
        let t2 = self.t() * self.t();
        let mut terms: Vec<Q> = vec![t2; q];
        terms.extend(parts.iter().map(|&i| self.parts[i].area_sq.clone()));
        sqrt_sum_lt(&terms, &self.budget_sq)
    }

    fn run(&mut self, target: &[i64]) -> Option<Vec<Vec<i64>>> {
        let a0 = unit(lattice::alpha(0));
        let t = self.t().clone();
        let mut q = 0usize;
        loop {
            let qt = qi(q as i64) * &t;
            if self.exceeds(&qt) {
                self.record(
                    q,
                    0,
                    0,
                    target,
                    TraceKind::AreaBound,
                    format!("{q} copies of ±a0 cost {} ≥ budget", format_rational(&qt)),
                );
                return None;
            }
            for k in (-(q as i64)..=q as i64).step_by(2) {
                let residual: Vec<i64> = target.iter().zip(&a0).map(|(x, a)| x - k * a).collect();
                let mut p = 0usize;
                loop {
                    let lower = qi(p as i64) + &qt;
                    if self.exceeds(&lower) {
                        self.record(
                            q,
                            k,
                            p,
                            &residual,
                            TraceKind::AreaBound,
                            format!(
                                "{p} parts of area >= 1 plus {q}*t give >= {}, budget^2 = {}",
                                format_rational(&lower),
                                format_rational(&self.budget_sq)
                            ),
                        );
                        break;
                    }
                    if let Some(found) = self.try_case(q, k, p, &residual) {
                        let mut parts = found;
                        let sign = |pos: bool| {
                            if pos {
                                a0.clone()
                            } else {
                                a0.iter().map(|v| -v).collect()
                            }
                        };
                        let plus = (q as i64 + k) / 2;
                        let minus = q as i64 - plus;
                        parts.extend((0..plus).map(|_| sign(true)));
                        parts.extend((0..minus).map(|_| sign(false)));
                        parts.sort();
                        return Some(parts);
                    }
                    p += 1;
                }
            }
            q += 1;
        }
    }

    fn try_case(&mut self, q: usize, k: i64, p: usize, residual: &[i64]) -> Option<Vec<Vec<i64>>> {
        match p {
            0 => {
                if is_zero(residual) {
                    if self.fits(q, &[]) {
                        self.record(q, k, p, residual, TraceKind::Found, "only ±a0 parts".into());
                        return Some(Vec::new());
                    }
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::TotalAreaExceeded,
                        "q*t not below budget".into(),
                    );
                } else {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::ResidualNonzero,
                        "no parts left".into(),
                    );
                }
                None
            }
            1 => {
                if is_zero(residual) {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::ResidualNonzero,
                        "a single part cannot be zero".into(),
                    );
                    return None;
                }
                let norm = self.lat.norm_int(residual);
                if norm < -2 {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::AdjunctionRejected,
                        format!("residual^2 = {norm} < -2"),
                    );
                    return None;
                }
                let a0 = unit(lattice::alpha(0));
                let na0: Vec<i64> = a0.iter().map(|v| -v).collect();
                if residual == a0.as_slice() || residual == na0.as_slice() {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::DeferredToAlpha0,
                        "covered by q+1".into(),
                    );
                    return None;
                }
                let Some(&i) = self.index.get(residual) else {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::OutsideUniverse,
                        format!(
                            "area^2 = {} >= budget^2",
                            format_rational(&self.frame.area_squared_int(residual))
                        ),
                    );
                    return None;
                };
                if self.fits(q, &[i]) {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::Found,
                        format!(
                            "single class with area^2 = {}",
                            format_rational(&self.parts[i].area_sq)
                        ),
                    );
                    Some(vec![residual.to_vec()])
                } else {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::TotalAreaExceeded,
                        format!(
                            "area^2 = {} with {q}*t",
                            format_rational(&self.parts[i].area_sq)
                        ),
                    );
                    None
                }
            }
            _ => {
                let mut chosen = Vec::new();
                let mut nodes = 0usize;
                let base = qi(q as i64) * self.t();
                if self.dfs(q, p, residual, 0, &base, &mut chosen, &mut nodes) {
                    self.record(q, k, p, residual, TraceKind::Found, format!("{p} parts"));
                    Some(
                        chosen
                            .iter()
                            .map(|&i| self.parts[i].coords.clone())
                            .collect(),
                    )
                } else {
                    self.record(
                        q,
                        k,
                        p,
                        residual,
                        TraceKind::Exhausted,
                        format!(
                            "{nodes} partial multisets over {} candidate parts",
                            self.parts.len()
                        ),
                    );
                    None
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        q: usize,
        remaining: usize,
        residual: &[i64],
        start: usize,
        cost: &Q,
        chosen: &mut Vec<usize>,
        nodes: &mut usize,
    ) -> bool {
        *nodes += 1;
        if remaining == 1 {
            return match self.index.get(residual) {
                Some(&i) if i >= start => {
                    chosen.push(i);
                    if self.fits(q, chosen) {
                        true
                    } else {
                        chosen.pop();
                        false
                    }
                }
                _ => false,
            };
        }
        for i in start..self.parts.len() {
            let part = &self.parts[i];
            let lower = cost + &part.area_lb + qi(remaining as i64 - 1);
            if self.exceeds(&lower) {
                continue;
            }
            chosen.push(i);
            let next = sub(residual, &part.coords);
            let new_cost = cost + &part.area_lb;
            if self.dfs(q, remaining - 1, &next, i, &new_cost, chosen, nodes) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

fn unit(i: usize) -> Vec<i64> {
    let mut v = vec![0i64; RANK];
    v[i] = 1;
    v
}

fn check_certificate(frame: &HodgeFrame, cert: &Certificate) -> Result<(), SearchError> {
    if cert.params != frame.params {
        return Err(SearchError::CertificateMismatch("parameters differ".into()));
    }
    if cert.kind != CertificateKind::Analytic {
        return Err(SearchError::CertificateMismatch(
            "oracle certificates do not cover the lattice".into(),
        ));
    }
    if cert.norm_floor > -2 {
        return Err(SearchError::CertificateMismatch(
            "norm floor above -2".into(),
        ));
    }
    if cert.verdict != Verdict::Pass {
        return Err(SearchError::CertificateMismatch(
            "certificate did not pass".into(),
        ));
    }
    Ok(())
}

/// Searches for a decomposition of `target` into admissible parts with total
/// area strictly below `√budget_sq`.
pub fn exclusion_search(
    lat: &IntersectionLattice,
    target: &LatticeVector,
    budget_sq: &Q,
    frame: &HodgeFrame,
    cert: &Certificate,
    opts: SearchOptions,
) -> Result<DecompositionVerdict, SearchError> {
    check_certificate(frame, cert)?;
    let target_coords = integral(target)?;
    let interpretation = opts.lagrangian.then(|| {
        "lagrangian reading: the same lattice computation constrains lagrangian two-spheres, \
         which are holomorphic for some complex structure on the hyperkähler line"
            .to_string()
    });

    let mut parts = Vec::new();
    if budget_sq.is_positive() {
        let scan = scan_low_area(lat, frame, budget_sq, -2)?;
        let a0 = unit(lattice::alpha(0));
        let na0: Vec<i64> = a0.iter().map(|v| -v).collect();
        for g in scan.classes {
            if g == a0 || g == na0 {
                continue;
            }
            let area_sq = frame.area_squared_int(&g);
            if &area_sq >= budget_sq {
                continue;
            }
            let lb = match exact_sqrt(&area_sq) {
                Some(r) => r,
                None => sqrt_enclosure(&area_sq, 32).0,
            };
            parts.push(Part {
                coords: g,
                area_sq,
                area_lb: lb.max(Q::one()),
            });
        }
    }
    let universe_size = parts.len() + usize::from(budget_sq > &(frame.t() * frame.t())) * 2;
    let index = parts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.coords.clone(), i))
        .collect();
    let mut s = Searcher {
        lat,
        frame,
        budget_sq: budget_sq.clone(),
        parts,
        index,
        trace: Vec::new(),
    };
    let found = if budget_sq.is_positive() {
        s.run(&target_coords)
    } else {
        None
    };
    let (outcome, parts) = match found {
        Some(ps) => (
            Outcome::Found,
            ps.iter().map(|g| ClassRecord::new(lat, frame, g)).collect(),
        ),
        None => (Outcome::Impossible, Vec::new()),
    };
    Ok(DecompositionVerdict {
        target_expr: target.ascii(),
        target: target.clone(),
        budget_sq: budget_sq.clone(),
        outcome,
        parts,
        universe_size,
        trace: s.trace,
        interpretation,
    })
}

/// Re-checks a found decomposition from scratch.
pub fn verify_found(
    lat: &IntersectionLattice,
    frame: &HodgeFrame,
    v: &DecompositionVerdict,
) -> Result<(), String> {
    if v.outcome != Outcome::Found {
        return Err("no decomposition to verify".into());
    }
    let mut sum = LatticeVector::zero();
    let mut terms = Vec::new();
    for p in &v.parts {
        if !adjunction_admissible(lat, &p.class).map_err(|e| e.to_string())? {
            return Err(format!("part {} fails adjunction", p.expr));
        }
        sum = &sum + &p.class;
        terms.push(frame.area_squared(&p.class));
    }
    if sum != v.target {
        return Err("parts do not sum to the target".into());
    }
    if !sqrt_sum_lt(&terms, &v.budget_sq) {
        return Err("total area is not below budget".into());
    }
    Ok(())
}

/// Genus, normal Euler number, and whether `h⁰(ν⁻⊗κ) ≥ 1` contributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityCount {
    pub genus: u32,
    pub euler_normal: i64,
    pub nonholomorphic_bonus: u8,
}

impl StabilityCount {
    pub fn new(genus: u32, euler_normal: i64, nonholomorphic_bonus: u8) -> Option<Self> {
        (nonholomorphic_bonus <= 1).then_some(StabilityCount {
            genus,
            euler_normal,
            nonholomorphic_bonus,
        })
    }
}

/// Riemann–Roch lower bound `e(ν) − e(ξ) + 2 − 2g + 1 + bonus` with
/// `e(ξ) = 2g − 2`; the `+1` is the trivial bundle `ξ⁺⊗κ`.
pub fn donaldson_h0_bound(s: StabilityCount) -> i64 {
    let g = i64::from(s.genus);
    let e_xi = 2 * g - 2;
    s.euler_normal - e_xi + 2 - 2 * g + 1 + i64::from(s.nonholomorphic_bonus)
}
