//! Run configuration: a small `key = value` format with `#` comments.
//!
//! ```text
//! sigma     = 1, 2, 2
//! tau       = 2, 1, -2
//! rho       = -120, 120, -60
//! t_list    = 1/10, 1/4, 1/2, 3/4, 9/10
//! targets   = a1 - a2; a1
//! expect    = impossible; found
//! budget_sq = 4
//! ```
//!
//! Class expressions are sums of `[coef*]symbol` terms over `a0..a7`,
//! `b0..b7`, `x1..x3`, `y1..y3`.

use crate::exact::{format_rational, parse_rational, Q};
use crate::frame::{validate_t, FrameParams};
use crate::lattice::{index_of_symbol, LatticeVector, RANK};
use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Found,
    Impossible,
}

impl Expectation {
    fn as_str(self) -> &'static str {
        match self {
            Expectation::Found => "found",
            Expectation::Impossible => "impossible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Target {
    pub expr: String,
    pub class: LatticeVector,
    pub expect: Expectation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "ser_triple")]
    pub sigma: [Q; 3],
    #[serde(serialize_with = "ser_triple")]
    pub tau: [Q; 3],
    #[serde(serialize_with = "ser_triple")]
    pub rho: [Q; 3],
    #[serde(serialize_with = "ser_list")]
    pub t_list: Vec<Q>,
    pub targets: Vec<Target>,
    #[serde(with = "crate::exact::rational_str")]
    pub budget_sq: Q,
    pub norm_floor: i64,
    pub cache_dir: Option<PathBuf>,
    pub lagrangian: bool,
}

fn ser_triple<S: serde::Serializer>(x: &[Q; 3], s: S) -> Result<S::Ok, S::Error> {
    crate::exact::rational_vec_str::serialize(x, s)
}

fn ser_list<S: serde::Serializer>(x: &[Q], s: S) -> Result<S::Ok, S::Error> {
    crate::exact::rational_vec_str::serialize(x, s)
}

impl RunConfig {
    /// Reference parameters: exclusion of `a1 - a2` at budget 4.
    pub fn reference() -> Self {
        let p = FrameParams::reference(crate::exact::q(1, 2));
        let parse = |s: &str| parse_class(s).expect("reference expression");
        RunConfig {
            sigma: p.sigma,
            tau: p.tau,
            rho: p.rho,
            t_list: [(1, 10), (1, 4), (1, 2), (3, 4), (9, 10)]
                .iter()
                .map(|&(n, d)| crate::exact::q(n, d))
                .collect(),
            targets: vec![Target {
                expr: "a1 - a2".into(),
                class: parse("a1 - a2"),
                expect: Expectation::Impossible,
            }],
            budget_sq: crate::exact::qi(4),
            norm_floor: -2,
            cache_dir: None,
            lagrangian: false,
        }
    }

    pub fn params(&self, t: &Q) -> FrameParams {
        FrameParams {
            sigma: self.sigma.clone(),
            tau: self.tau.clone(),
            rho: self.rho.clone(),
            t: t.clone(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::at(0, 0, format!("{}: {e}", path.display())))?;
        parse_config(&text)
    }

    /// Text form that parses back to an equal configuration.
    pub fn emit(&self) -> String {
        let join = |xs: &[Q]| {
            xs.iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        out.push_str(&format!("sigma = {}\n", join(&self.sigma)));
        out.push_str(&format!("tau = {}\n", join(&self.tau)));
        out.push_str(&format!("rho = {}\n", join(&self.rho)));
        out.push_str(&format!("t_list = {}\n", join(&self.t_list)));
        if !self.targets.is_empty() {
            let exprs: Vec<String> = self.targets.iter().map(|t| t.class.ascii()).collect();
            let expects: Vec<&str> = self.targets.iter().map(|t| t.expect.as_str()).collect();
            out.push_str(&format!("targets = {}\n", exprs.join("; ")));
            out.push_str(&format!("expect = {}\n", expects.join("; ")));
        }
        out.push_str(&format!(
            "budget_sq = {}\n",
            format_rational(&self.budget_sq)
        ));
        out.push_str(&format!("norm_floor = {}\n", self.norm_floor));
        if let Some(dir) = &self.cache_dir {
            out.push_str(&format!("cache_dir = {}\n", dir.display()));
        }
        out.push_str(&format!("lagrangian = {}\n", self.lagrangian));
        out
    }
}

/// Parses a class expression such as `a1 - a2`, `2*a0`, `-x1 + y1`.
pub fn parse_class(text: &str) -> Result<LatticeVector, String> {
    let mut coords = vec![Q::from_integer(0.into()); RANK];
    let s = text.trim();
    if s.is_empty() {
        return Err("empty class expression".into());
    }
    if s == "0" {
        return Ok(LatticeVector(coords));
    }
    // Split into signed terms.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut neg = false;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '+' | '-' => {
                if !cur.trim().is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = false;
                }
                if ch == '-' {
                    neg = !neg;
                }
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if cur.trim().is_empty() {
        return Err(format!("dangling sign in {text:?}"));
    }
    terms.push((neg, cur));

    for (neg, term) in terms {
        let term = term.trim();
        let (coef, sym) = match term.split_once('*') {
            Some((c, v)) => {
                let c =
                    parse_rational(c).ok_or_else(|| format!("bad coefficient {:?}", c.trim()))?;
                (c, v.trim())
            }
            None => (Q::from_integer(1.into()), term),
        };
        let idx = index_of_symbol(sym).map_err(|e| e.to_string())?;
        coords[idx] += if neg { -coef } else { coef };
    }
    Ok(LatticeVector(coords))
}

fn parse_list(value: &str, line: usize, col: usize) -> Result<Vec<Q>, ConfigError> {
    value
        .split(',')
        .map(|item| {
            parse_rational(item).ok_or_else(|| {
                ConfigError::at(line, col, format!("bad rational {:?}", item.trim()))
            })
        })
        .collect()
}

fn parse_triple(value: &str, line: usize, col: usize) -> Result<[Q; 3], ConfigError> {
    let v = parse_list(value, line, col)?;
    let n = v.len();
    v.try_into()
        .map_err(|_| ConfigError::at(line, col, format!("expected 3 entries, got {n}")))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let reference = RunConfig::reference();
    let mut sigma = None;
    let mut tau = None;
    let mut rho = None;
    let mut t_list = None;
    let mut targets: Option<(Vec<(String, LatticeVector)>, usize)> = None;
    let mut expect: Option<(Vec<Expectation>, usize)> = None;
    let mut budget_sq = None;
    let mut norm_floor = None;
    let mut cache_dir = None;
    let mut lagrangian = None;
    let mut seen = std::collections::HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(ConfigError::at(line, col, "expected `key = value`"));
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let key_col = content.len() - content.trim_start().len() + 1;
        let val_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::at(
                line,
                key_col,
                format!("duplicate key {key:?}"),
            ));
        }
        match key {
            "sigma" => sigma = Some(parse_triple(value, line, val_col)?),
            "tau" => tau = Some(parse_triple(value, line, val_col)?),
            "rho" => rho = Some(parse_triple(value, line, val_col)?),
            "t_list" => {
                let ts = if value.is_empty() {
                    Vec::new()
                } else {
                    parse_list(value, line, val_col)?
                };
                for t in &ts {
                    validate_t(t).map_err(|e| ConfigError::at(line, val_col, e.to_string()))?;
                }
                t_list = Some((ts, line, val_col));
            }
            "targets" => {
                let mut out = Vec::new();
                for expr in value.split(';').filter(|s| !s.trim().is_empty()) {
                    let class = parse_class(expr).map_err(|e| ConfigError::at(line, val_col, e))?;
                    if class.is_zero() {
                        return Err(ConfigError::at(line, val_col, "target must be nonzero"));
                    }
                    out.push((expr.trim().to_string(), class));
                }
                targets = Some((out, line));
            }
            "expect" => {
                let mut out = Vec::new();
                for word in value.split(';') {
                    out.push(match word.trim() {
                        "found" => Expectation::Found,
                        "impossible" => Expectation::Impossible,
                        other => {
                            return Err(ConfigError::at(
                                line,
                                val_col,
                                format!("expect must be `found` or `impossible`, got {other:?}"),
                            ))
                        }
                    });
                }
                expect = Some((out, line));
            }
            "budget_sq" => {
                budget_sq = Some(parse_rational(value).ok_or_else(|| {
                    ConfigError::at(line, val_col, format!("bad rational {value:?}"))
                })?)
            }
            "norm_floor" => {
                norm_floor = Some(value.parse::<i64>().map_err(|_| {
                    ConfigError::at(line, val_col, format!("bad integer {value:?}"))
                })?)
            }
            "cache_dir" => cache_dir = Some(PathBuf::from(value)),
            "lagrangian" => {
                lagrangian = Some(match value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(ConfigError::at(
                            line,
                            val_col,
                            "lagrangian must be true or false",
                        ))
                    }
                })
            }
            _ => {
                return Err(ConfigError::at(
                    line,
                    key_col,
                    format!("unknown key {key:?}"),
                ))
            }
        }
    }

    let (t_list, t_line, t_col) = t_list.unwrap_or((reference.t_list.clone(), 0, 0));
    if t_list.is_empty() {
        return Err(ConfigError::at(t_line, t_col, "t_list must not be empty"));
    }
    let cfg_targets = match targets {
        None => {
            if let Some((_, eline)) = expect {
                return Err(ConfigError::at(eline, 1, "expect given without targets"));
            }
            reference.targets.clone()
        }
        Some((ts, line)) => {
            let expects = match expect {
                None => vec![Expectation::Impossible; ts.len()],
                Some((es, _)) if es.len() == 1 => vec![es[0]; ts.len()],
                Some((es, _)) if es.len() == ts.len() => es,
                Some((es, eline)) => {
                    return Err(ConfigError::at(
                        eline,
                        1,
                        format!(
                            "{} expectations for {} targets (declared on line {line})",
                            es.len(),
                            ts.len()
                        ),
                    ))
                }
            };
            ts.into_iter()
                .zip(expects)
                .map(|((expr, class), expect)| Target {
                    expr,
                    class,
                    expect,
                })
                .collect()
        }
    };

    let cfg = RunConfig {
        sigma: sigma.unwrap_or(reference.sigma.clone()),
        tau: tau.unwrap_or(reference.tau.clone()),
        rho: rho.unwrap_or(reference.rho.clone()),
        t_list,
        targets: cfg_targets,
        budget_sq: budget_sq.unwrap_or(reference.budget_sq.clone()),
        norm_floor: norm_floor.unwrap_or(-2),
        cache_dir,
        lagrangian: lagrangian.unwrap_or(false),
    };
    cfg.params(&cfg.t_list[0])
        .validate_vectors()
        .map_err(|e| ConfigError::at(0, 0, e.to_string()))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::lattice::{alpha, eta, xi};

    #[test]
    fn class_expressions() {
        assert_eq!(
            parse_class("a1 - a2").unwrap(),
            LatticeVector::combo(&[(alpha(1), 1), (alpha(2), -1)])
        );
        assert_eq!(
            parse_class("2*a0").unwrap(),
            LatticeVector::combo(&[(alpha(0), 2)])
        );
        assert_eq!(
            parse_class("-x1 + y1").unwrap(),
            LatticeVector::combo(&[(xi(1), -1), (eta(1), 1)])
        );
        assert_eq!(
            parse_class(" - - a3").unwrap(),
            LatticeVector::basis(alpha(3))
        );
        assert!(parse_class("a8").is_err());
        assert!(parse_class("a1 -").is_err());
        assert!(parse_class("").is_err());
        let v = LatticeVector::combo(&[(alpha(4), 3), (xi(2), -1), (eta(3), 2)]);
        assert_eq!(parse_class(&v.ascii()).unwrap(), v);
    }

    #[test]
    fn reference_round_trip() {
        let cfg = RunConfig::reference();
        let again = parse_config(&cfg.emit()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn defaults_and_errors() {
        let cfg = parse_config("# nothing\n\nbudget_sq = 9/4 # inline\n").unwrap();
        assert_eq!(cfg.budget_sq, q(9, 4));
        assert_eq!(cfg.norm_floor, -2);
        assert_eq!(cfg.t_list.len(), 5);

        let e = parse_config("sigma = 1, 2\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 9));
        let e = parse_config("budget_sq = 4\n  bogus = 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_config("t_list =\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_config("t_list = 1\n").is_err());
        assert!(parse_config("sigma = 1, 0, 0\n").is_err());
        assert!(parse_config("targets = a1; a2\nexpect = found; impossible; found\n").is_err());
        assert!(parse_config("targets = 0\n").is_err());

        let cfg = parse_config("targets = a1; a1 - a2\nexpect = found; impossible\nbudget_sq = 4")
            .unwrap();
        assert_eq!(cfg.targets[0].expect, Expectation::Found);
        assert_eq!(cfg.targets[1].class, parse_class("a1-a2").unwrap());
        assert_eq!(cfg.budget_sq, qi(4));
    }
}
