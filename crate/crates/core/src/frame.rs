//! Period point, Kähler classes and the area functional on the K3 lattice.
//!
//! Both `Ω` and `ω_t` are specified only through their pairings with the
//! basis; the classes themselves come from inverting the Gram matrix.
//!
//! `Ω` pairs to zero with every `αₖ`, `βₖ`, `ξⱼ−ηⱼ` and to `σⱼ + iτⱼ` with
//! `ξⱼ+ηⱼ`. `ω_t` pairs to `t` with `α₀`, to 1 with `α₁..α₃`, to 2 with
//! `α₄..α₇`, every `βₖ` and every `ξⱼ−ηⱼ`, and to `ρⱼ` with `ξⱼ+ηⱼ`.

use crate::enumeration::RootSet;
use crate::exact::{format_rational, q, qi, rational_str, Q};
use crate::lattice::{self, IntersectionLattice, LatticeVector, RANK};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("invalid frame parameters: {0}")]
    InvalidParams(String),
    #[error("t = {0} is outside the open interval (0, 1)")]
    TOutOfRange(String),
    #[error("frame invariant violated: {0}")]
    Invariant(String),
}

pub fn dot3(a: &[Q; 3], b: &[Q; 3]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm3(a: &[Q; 3]) -> Q {
    dot3(a, a)
}

/// Parameters `(σ, τ, ρ, t)` of one Kähler class in the family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameParams {
    #[serde(with = "triple_str")]
    pub sigma: [Q; 3],
    #[serde(with = "triple_str")]
    pub tau: [Q; 3],
    #[serde(with = "triple_str")]
    pub rho: [Q; 3],
    #[serde(with = "rational_str")]
    pub t: Q,
}

/// Scale applied to `(−2, 2, −1)` in the reference parameters.
pub const REFERENCE_RHO_SCALE: i64 = 60;

impl FrameParams {
    /// `σ = (1,2,2)`, `τ = (2,1,−2)`, `ρ = 60·(−2,2,−1)`.
    pub fn reference(t: Q) -> Self {
        Self::reference_with_rho_scale(REFERENCE_RHO_SCALE, t)
    }

    pub fn reference_with_rho_scale(scale: i64, t: Q) -> Self {
        FrameParams {
            sigma: [qi(1), qi(2), qi(2)],
            tau: [qi(2), qi(1), qi(-2)],
            rho: [qi(-2 * scale), qi(2 * scale), qi(-scale)],
            t,
        }
    }

    /// Checks the relations among `σ, τ, ρ` (not `t`).
    pub fn validate_vectors(&self) -> Result<(), FrameError> {
        let (ss, tt) = (norm3(&self.sigma), norm3(&self.tau));
        if ss != tt {
            return Err(FrameError::InvalidParams(format!(
                "|sigma|^2 = {} != |tau|^2 = {}",
                format_rational(&ss),
                format_rational(&tt)
            )));
        }
        if !ss.is_positive() {
            return Err(FrameError::InvalidParams(
                "|sigma|^2 must be positive".into(),
            ));
        }
        for (name, a, b) in [
            ("sigma.tau", &self.sigma, &self.tau),
            ("rho.sigma", &self.rho, &self.sigma),
            ("rho.tau", &self.rho, &self.tau),
        ] {
            let d = dot3(a, b);
            if !d.is_zero() {
                return Err(FrameError::InvalidParams(format!(
                    "{name} = {} != 0",
                    format_rational(&d)
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), FrameError> {
        validate_t(&self.t)?;
        self.validate_vectors()
    }

    pub fn with_t(&self, t: Q) -> Self {
        FrameParams { t, ..self.clone() }
    }
}

pub fn validate_t(t: &Q) -> Result<(), FrameError> {
    if t.is_positive() && t < &Q::one() {
        Ok(())
    } else {
        Err(FrameError::TOutOfRange(format_rational(t)))
    }
}

mod triple_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[Q; 3], s: S) -> Result<S::Ok, S::Error> {
        crate::exact::rational_vec_str::serialize(x, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 3], D::Error> {
        use serde::de::Error;
        let v = crate::exact::rational_vec_str::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<Q>| D::Error::custom(format!("expected 3 entries, got {}", v.len())))
    }
}

/// Pairings of `ω_t` with each basis element.
pub fn omega_t_profile(p: &FrameParams) -> Vec<Q> {
    let mut prof = vec![Q::zero(); RANK];
    prof[lattice::alpha(0)] = p.t.clone();
    for k in 1..=3 {
        prof[lattice::alpha(k)] = qi(1);
    }
    for k in 4..8 {
        prof[lattice::alpha(k)] = qi(2);
    }
    for k in 0..8 {
        prof[lattice::beta(k)] = qi(2);
    }
    // (ξ+η)·ω = ρⱼ and (ξ−η)·ω = 2.
    for j in 1..=3 {
        prof[lattice::xi(j)] = (&p.rho[j - 1] + qi(2)) / qi(2);
        prof[lattice::eta(j)] = (&p.rho[j - 1] - qi(2)) / qi(2);
    }
    prof
}

/// Pairings of `Re Ω` (from `σ`) or `Im Ω` (from `τ`) with each basis element.
pub fn period_profile(v: &[Q; 3]) -> Vec<Q> {
    let mut prof = vec![Q::zero(); RANK];
    for j in 1..=3 {
        prof[lattice::xi(j)] = &v[j - 1] / qi(2);
        prof[lattice::eta(j)] = &v[j - 1] / qi(2);
    }
    prof
}

/// The period point `Ω`, the Kähler class `ω_t`, and `λ_t²`.
#[derive(Clone, Debug)]
pub struct HodgeFrame {
    pub params: FrameParams,
    pub omega_re: LatticeVector,
    pub omega_im: LatticeVector,
    pub omega_t: LatticeVector,
    /// `λ_t²`, fixed by `λ_t² |σ|² = 2 ω_t·ω_t`.
    pub lambda_t_sq: Q,
    /// `ω_t·ω_t`.
    pub omega_t_norm: Q,
    /// `Ω·Ω̄ = |σ|²`.
    pub omega_omegabar: Q,
    omega_t_profile: Vec<Q>,
    re_profile: Vec<Q>,
    im_profile: Vec<Q>,
}

pub fn build_frame(lat: &IntersectionLattice, p: &FrameParams) -> Result<HodgeFrame, FrameError> {
    p.validate()?;
    let omega_t_prof = omega_t_profile(p);
    let re_prof = period_profile(&p.sigma);
    let im_prof = period_profile(&p.tau);
    let solve = |prof: &[Q]| {
        lat.vector_from_pairings(prof)
            .expect("profile has full rank")
    };
    let omega_t = solve(&omega_t_prof);
    let omega_re = solve(&re_prof);
    let omega_im = solve(&im_prof);
    let pair = |a: &LatticeVector, b: &LatticeVector| lat.pair(a, b).expect("dimensions match");

    let re2 = pair(&omega_re, &omega_re);
    let im2 = pair(&omega_im, &omega_im);
    let reim = pair(&omega_re, &omega_im);
    let omega_omegabar = &re2 + &im2;
    let omega_t_norm = pair(&omega_t, &omega_t);
    let sigma_sq = norm3(&p.sigma);
    let lambda_t_sq = qi(2) * &omega_t_norm / &sigma_sq;

    let checks = [
        ("(Re Ω)² = (Im Ω)²", re2 == im2),
        ("Re Ω · Im Ω = 0", reim.is_zero()),
        (
            "Ω·Ω̄ = |σ|² > 0",
            omega_omegabar == sigma_sq && sigma_sq.is_positive(),
        ),
        ("ω_t · Re Ω = 0", pair(&omega_t, &omega_re).is_zero()),
        ("ω_t · Im Ω = 0", pair(&omega_t, &omega_im).is_zero()),
        (
            "λ_t² |σ|² = 2 ω_t·ω_t",
            &lambda_t_sq * &sigma_sq == qi(2) * &omega_t_norm,
        ),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(FrameError::Invariant((*name).to_string()));
    }

    Ok(HodgeFrame {
        params: p.clone(),
        omega_re,
        omega_im,
        omega_t,
        lambda_t_sq,
        omega_t_norm,
        omega_omegabar,
        omega_t_profile: omega_t_prof,
        re_profile: re_prof,
        im_profile: im_prof,
    })
}

fn dot_int(profile: &[Q], gamma: &[i64]) -> Q {
    profile
        .iter()
        .zip(gamma)
        .filter(|(_, &g)| g != 0)
        .map(|(p, &g)| p * Q::from_integer(g.into()))
        .sum()
}

fn dot_q(profile: &[Q], gamma: &LatticeVector) -> Q {
    profile.iter().zip(gamma.coords()).map(|(p, g)| p * g).sum()
}

impl HodgeFrame {
    pub fn t(&self) -> &Q {
        &self.params.t
    }

    pub fn omega_t_dot(&self, gamma: &LatticeVector) -> Q {
        dot_q(&self.omega_t_profile, gamma)
    }

    /// `(Re Ω·γ, Im Ω·γ)`.
    pub fn period_dot(&self, gamma: &LatticeVector) -> (Q, Q) {
        (
            dot_q(&self.re_profile, gamma),
            dot_q(&self.im_profile, gamma),
        )
    }

    pub fn omega_t_dot_int(&self, gamma: &[i64]) -> Q {
        dot_int(&self.omega_t_profile, gamma)
    }

    /// `(ω_t·γ)² + λ_t² |Ω·γ|²`, the square of the area of a
    /// 𝒥-holomorphic representative of `γ`.
    pub fn area_squared(&self, gamma: &LatticeVector) -> Q {
        let w = self.omega_t_dot(gamma);
        let (re, im) = self.period_dot(gamma);
        &w * &w + &self.lambda_t_sq * (&re * &re + &im * &im)
    }

    pub fn area_squared_int(&self, gamma: &[i64]) -> Q {
        let w = dot_int(&self.omega_t_profile, gamma);
        let re = dot_int(&self.re_profile, gamma);
        let im = dot_int(&self.im_profile, gamma);
        &w * &w + &self.lambda_t_sq * (&re * &re + &im * &im)
    }

    /// `|ρ|²`.
    pub fn rho_norm_sq(&self) -> Q {
        norm3(&self.params.rho)
    }

    /// `−ω₋·ω₋` where `ω₋` is the component of `ω_t` orthogonal to
    /// `span{ξⱼ+ηⱼ}`. Equals `|ρ|²/2 − ω_t·ω_t`.
    pub fn omega_minus_norm(&self) -> Q {
        self.rho_norm_sq() / qi(2) - &self.omega_t_norm
    }

    /// Summary of the scalar invariants.
    pub fn summary(&self) -> FrameSummary {
        FrameSummary {
            t: self.params.t.clone(),
            omega_omegabar: self.omega_omegabar.clone(),
            omega_t_norm: self.omega_t_norm.clone(),
            lambda_t_sq: self.lambda_t_sq.clone(),
            omega_minus_norm: self.omega_minus_norm(),
            omega_t_norm_approx: crate::exact::Approx::of(&self.omega_t_norm),
            lambda_t_approx: crate::exact::Approx::of_sqrt(&self.lambda_t_sq.abs()),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FrameSummary {
    #[serde(with = "rational_str")]
    pub t: Q,
    #[serde(with = "rational_str")]
    pub omega_omegabar: Q,
    #[serde(with = "rational_str")]
    pub omega_t_norm: Q,
    #[serde(with = "rational_str")]
    pub lambda_t_sq: Q,
    #[serde(with = "rational_str")]
    pub omega_minus_norm: Q,
    pub omega_t_norm_approx: crate::exact::Approx,
    /// `λ_t` (of `|λ_t²|` if negative).
    pub lambda_t_approx: crate::exact::Approx,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct KahlerCheck {
    pub name: String,
    #[serde(with = "rational_str")]
    pub value: Q,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct KahlerVerdict {
    pub passed: bool,
    pub checks: Vec<KahlerCheck>,
    pub roots_checked: usize,
    /// Roots with `ω_t·γ > 0`; half of the set when none is orthogonal.
    pub positive_roots: usize,
}

/// The nodal generators: `α₀..α₇`, `β₀..β₇`, `ξⱼ−ηⱼ`.
pub fn nodal_generators() -> Vec<(String, Vec<i64>)> {
    let mut out = Vec::new();
    for i in 0..16 {
        let mut v = vec![0; RANK];
        v[i] = 1;
        out.push((lattice::pretty_symbol(i), v));
    }
    for j in 1..=3 {
        let mut v = vec![0; RANK];
        v[lattice::xi(j)] = 1;
        v[lattice::eta(j)] = -1;
        out.push((
            format!(
                "{} - {}",
                lattice::pretty_symbol(lattice::xi(j)),
                lattice::pretty_symbol(lattice::eta(j))
            ),
            v,
        ));
    }
    out
}

/// Kähler-cone conditions for `ω_t`: positive square, orthogonal to `Ω`,
/// positive on every nodal generator (hence on all non-negative integral
/// combinations), and orthogonal to no root of `roots`.
pub fn kahler_cone_check(
    lat: &IntersectionLattice,
    f: &HodgeFrame,
    roots: &[Vec<i64>],
) -> KahlerVerdict {
    let mut checks = Vec::new();
    checks.push(KahlerCheck {
        name: "ω_t·ω_t > 0".into(),
        value: f.omega_t_norm.clone(),
        passed: f.omega_t_norm.is_positive(),
    });
    let pr = lat.pair(&f.omega_t, &f.omega_re).expect("dims");
    let pi = lat.pair(&f.omega_t, &f.omega_im).expect("dims");
    checks.push(KahlerCheck {
        name: "ω_t·Re Ω = 0".into(),
        passed: pr.is_zero(),
        value: pr,
    });
    checks.push(KahlerCheck {
        name: "ω_t·Im Ω = 0".into(),
        passed: pi.is_zero(),
        value: pi,
    });
    for (name, g) in nodal_generators() {
        let v = f.omega_t_dot_int(&g);
        checks.push(KahlerCheck {
            name: format!("ω_t·({name}) > 0"),
            passed: v.is_positive(),
            value: v,
        });
    }
    let values: Vec<Q> = roots.iter().map(|r| f.omega_t_dot_int(r)).collect();
    let orthogonal = values.iter().filter(|v| v.is_zero()).count();
    let positive = values.iter().filter(|v| v.is_positive()).count();
    checks.push(KahlerCheck {
        name: "no root orthogonal to ω_t".into(),
        value: Q::from_integer(orthogonal.into()),
        passed: orthogonal == 0,
    });
    KahlerVerdict {
        passed: checks.iter().all(|c| c.passed),
        checks,
        roots_checked: roots.len(),
        positive_roots: positive,
    }
}

/// [`kahler_cone_check`] against a root set given in ambient coordinates of
/// its sublattice.
pub fn kahler_cone_check_roots(
    lat: &IntersectionLattice,
    f: &HodgeFrame,
    roots: &RootSet,
    sub: &crate::enumeration::DefiniteSublattice,
) -> KahlerVerdict {
    kahler_cone_check(lat, f, &roots.ambient(sub))
}

/// Coefficients `[c₀, c₁, c₂]` of `ω_t·ω_t = c₀ + c₁ t + c₂ t²`.
pub fn omega_t_norm_polynomial(lat: &IntersectionLattice, p: &FrameParams) -> [Q; 3] {
    // ω_t·ω_t = pᵀ G⁻¹ p with p = p₀ + t e_{α₀}.
    let mut p0 = omega_t_profile(p);
    p0[lattice::alpha(0)] = Q::zero();
    let inv = lat.gram_inverse();
    let a0 = lattice::alpha(0);
    let g_p0 = crate::linalg::mat_vec(inv, &p0);
    let c0: Q = p0.iter().zip(&g_p0).map(|(a, b)| a * b).sum();
    let c1 = qi(2) * &g_p0[a0];
    let c2 = inv[a0][a0].clone();
    [c0, c1, c2]
}

pub fn eval_quadratic(c: &[Q; 3], t: &Q) -> Q {
    &c[0] + &c[1] * t + &c[2] * t * t
}

/// Smallest `C` with `ω_t·ω_t ≥ |ρ|²/2 − C` for every `t ∈ [0, 1]`.
pub fn otr_constant(lat: &IntersectionLattice, p: &FrameParams) -> Q {
    let c = omega_t_norm_polynomial(lat, p);
    let half = norm3(&p.rho) / qi(2);
    let mut candidates = vec![Q::zero(), Q::one()];
    if !c[2].is_zero() {
        let vertex = -&c[1] / (qi(2) * &c[2]);
        if vertex.is_positive() && vertex < Q::one() {
            candidates.push(vertex);
        }
    }
    candidates
        .iter()
        .map(|t| &half - eval_quadratic(&c, t))
        .max()
        .expect("non-empty")
}

/// Convenience for tests and reports: `t = 1/2` reference frame.
pub fn reference_frame(lat: &IntersectionLattice) -> HodgeFrame {
    build_frame(lat, &FrameParams::reference(q(1, 2))).expect("reference parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::negative_root_scan;
    use crate::lattice::{alpha, build_k3_lattice, eta, xi};

    #[test]
    fn reference_frame_identities() {
        let lat = build_k3_lattice();
        let f = reference_frame(&lat);
        assert_eq!(f.omega_omegabar, qi(9));
        assert!(f.omega_t_norm.is_positive());
        assert_eq!(&f.lambda_t_sq * qi(9), qi(2) * &f.omega_t_norm);
        let a0 = LatticeVector::basis(alpha(0));
        assert_eq!(lat.pair(&f.omega_t, &a0).unwrap(), q(1, 2));
        // Ω·Ω = (Re Ω)² − (Im Ω)² + 2i Re Ω·Im Ω.
        let re2 = lat.pair(&f.omega_re, &f.omega_re).unwrap();
        let im2 = lat.pair(&f.omega_im, &f.omega_im).unwrap();
        assert_eq!(re2, im2);
        assert!(lat.pair(&f.omega_re, &f.omega_im).unwrap().is_zero());
        // Ω = Σ (σⱼ + iτⱼ)(ξⱼ+ηⱼ)/2.
        let mut expected = LatticeVector::zero();
        for j in 1..=3 {
            expected.0[xi(j)] = &f.params.sigma[j - 1] / qi(2);
            expected.0[eta(j)] = &f.params.sigma[j - 1] / qi(2);
        }
        assert_eq!(f.omega_re, expected);
    }

    #[test]
    fn omega_t_norm_matches_closed_form() {
        // The non-ρ pairings contribute −(3284 + 302 t + 30 t²).
        let lat = build_k3_lattice();
        let p = FrameParams::reference(q(1, 2));
        let c = omega_t_norm_polynomial(&lat, &p);
        let half = norm3(&p.rho) / qi(2);
        assert_eq!(c, [half - qi(3284), qi(-302), qi(-30)]);
        let f = build_frame(&lat, &p).unwrap();
        assert_eq!(eval_quadratic(&c, &q(1, 2)), f.omega_t_norm);
        assert_eq!(otr_constant(&lat, &p), qi(3616));
    }

    #[test]
    fn invalid_params_rejected() {
        let lat = build_k3_lattice();
        let base = FrameParams::reference(q(1, 2));
        for t in [qi(0), qi(1), q(-1, 3), q(3, 2)] {
            assert!(matches!(
                build_frame(&lat, &base.with_t(t)),
                Err(FrameError::TOutOfRange(_))
            ));
        }
        let mut p = base.clone();
        p.tau = [qi(0), qi(2), qi(0)];
        p.sigma = [qi(1), qi(0), qi(0)];
        assert!(matches!(
            build_frame(&lat, &p),
            Err(FrameError::InvalidParams(_))
        ));
        let mut p = base.clone();
        p.rho = [qi(1), qi(0), qi(0)];
        assert!(matches!(
            build_frame(&lat, &p),
            Err(FrameError::InvalidParams(_))
        ));
    }

    #[test]
    fn kahler_check_reference_and_zero_rho() {
        let lat = build_k3_lattice();
        let roots = negative_root_scan(&lat);
        let sub = crate::enumeration::negative_sublattice(&lat);
        let f = reference_frame(&lat);
        let v = kahler_cone_check_roots(&lat, &f, &roots, &sub);
        assert!(v.passed, "{v:?}");
        assert_eq!(v.positive_roots, 243);
        let xe = v
            .checks
            .iter()
            .find(|c| c.name.contains("ξ₁ - η₁"))
            .unwrap();
        assert_eq!(xe.value, qi(2));

        let p = FrameParams::reference_with_rho_scale(0, q(1, 2));
        let f0 = build_frame(&lat, &p).unwrap();
        assert_eq!(
            f0.omega_t_norm,
            eval_quadratic(&omega_t_norm_polynomial(&lat, &p), &q(1, 2))
        );
        let v0 = kahler_cone_check_roots(&lat, &f0, &roots, &sub);
        assert!(!v0.passed);
        assert!(!v0.checks[0].passed);
    }

    #[test]
    fn area_examples() {
        let lat = build_k3_lattice();
        let f = reference_frame(&lat);
        assert_eq!(f.area_squared(&LatticeVector::basis(alpha(1))), qi(1));
        assert_eq!(f.area_squared(&LatticeVector::basis(alpha(0))), q(1, 4));
        let d = LatticeVector::combo(&[(alpha(4), 1), (alpha(5), -1)]);
        assert_eq!(f.area_squared(&d), qi(0));
        let x1 = LatticeVector::combo(&[(xi(1), 3), (eta(2), -1), (alpha(7), 2)]);
        assert_eq!(
            f.area_squared(&x1),
            f.area_squared_int(&x1.to_ints().unwrap())
        );
    }
}
