//! Complete enumeration of lattice vectors of bounded or prescribed norm in
//! definite sublattices.
//!
//! The search is the Fincke–Pohst scheme: complete the squares of the form
//! exactly over ℚ, then walk coordinates from last to first, bounding each by
//! the remaining radius. Every coordinate range is derived from an integer
//! square root and then trimmed by an exact test, so completeness does not
//! depend on rounding.

use crate::exact::{floor_sqrt, Q};
use crate::lattice::{self, IntersectionLattice, LatticeVector, RANK};
use crate::linalg::{self, Ldl};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("sublattice {0} is not definite")]
    Indefinite(String),
    #[error("norm {norm} has the wrong sign for sublattice {id}")]
    NormSign { id: String, norm: i64 },
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("cache format: {0}")]
    Format(#[from] serde_json::Error),
}

/// A definite sublattice given by integral generators in the ambient lattice.
#[derive(Clone, Debug)]
pub struct DefiniteSublattice {
    pub id: String,
    pub gram: Vec<Vec<i64>>,
    /// Ambient coordinates of each generator.
    pub embedding: Vec<Vec<i64>>,
    /// +1 for positive definite, −1 for negative definite.
    sign: i64,
    ldl: Ldl,
}

impl DefiniteSublattice {
    pub fn new(
        id: &str,
        gram: Vec<Vec<i64>>,
        embedding: Vec<Vec<i64>>,
    ) -> Result<Self, EnumerationError> {
        let r = gram.len();
        assert_eq!(embedding.len(), r, "one embedding column per generator");
        let indefinite = || EnumerationError::Indefinite(id.to_string());
        if r == 0 || (0..r).any(|i| (0..r).any(|j| gram[i][j] != gram[j][i])) {
            return Err(indefinite());
        }
        let sign = if gram[0][0] > 0 { 1 } else { -1 };
        let flipped: Vec<Vec<i64>> = gram
            .iter()
            .map(|row| row.iter().map(|v| v * sign).collect())
            .collect();
        let ldl = linalg::ldl_positive(&linalg::from_integers(&flipped)).ok_or_else(indefinite)?;
        Ok(DefiniteSublattice {
            id: id.to_string(),
            gram,
            embedding,
            sign,
            ldl,
        })
    }

    /// Sublattice spanned by the given ambient vectors.
    pub fn from_generators(
        lat: &IntersectionLattice,
        id: &str,
        gens: Vec<Vec<i64>>,
    ) -> Result<Self, EnumerationError> {
        let gram = gens
            .iter()
            .map(|u| gens.iter().map(|v| lat.pair_int(u, v)).collect())
            .collect();
        Self::new(id, gram, gens)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn sign(&self) -> i64 {
        self.sign
    }

    pub fn norm(&self, z: &[i64]) -> i64 {
        let r = self.rank();
        let mut acc = 0;
        for i in 0..r {
            if z[i] == 0 {
                continue;
            }
            for j in 0..r {
                acc += z[i] * self.gram[i][j] * z[j];
            }
        }
        acc
    }

    /// Ambient coordinates of `Σ zᵢ gᵢ`.
    pub fn embed(&self, z: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; RANK];
        for (zi, g) in z.iter().zip(&self.embedding) {
            if *zi == 0 {
                continue;
            }
            for (o, gi) in out.iter_mut().zip(g) {
                *o += zi * gi;
            }
        }
        out
    }

    pub fn gram_hash(&self) -> String {
        lattice::gram_hash(&self.gram)
    }

    /// All integral `z` with `|q(z + center)| ≤ bound`, where `q` is the
    /// sublattice form. Lexicographically sorted. The zero vector is included
    /// when it qualifies.
    pub fn enumerate_ball(&self, bound: &Q, center: Option<&[Q]>) -> Vec<Vec<i64>> {
        let r = self.rank();
        let zero = vec![Q::zero(); r];
        let center = center.unwrap_or(&zero);
        if bound.is_negative() {
            return Vec::new();
        }
        let search = Search {
            ldl: &self.ldl,
            center,
        };
        let top = r - 1;
        let mut y = vec![Q::zero(); r];
        let firsts = search.level_candidates(top, &mut y, bound);
        let mut out: Vec<Vec<i64>> = firsts
            .into_par_iter()
            .flat_map_iter(|(x, rest)| {
                let mut z = vec![0i64; r];
                let mut y = vec![Q::zero(); r];
                z[top] = x;
                y[top] = &center[top] + Q::from_integer(x.into());
                let mut found = Vec::new();
                if top == 0 {
                    found.push(z);
                } else {
                    search.descend(top - 1, &mut z, &mut y, &rest, &mut found);
                }
                found
            })
            .collect();
        out.sort();
        out
    }
}

struct Search<'a> {
    ldl: &'a Ldl,
    center: &'a [Q],
}

impl Search<'_> {
    /// Integer values `x` for coordinate `i` with remaining radius after the
    /// choice, given `y[j]` for `j > i`.
    fn level_candidates(&self, i: usize, y: &mut [Q], remaining: &Q) -> Vec<(i64, Q)> {
        let r = self.ldl.diag.len();
        let shift: Q = (i + 1..r).map(|j| &self.ldl.mu[i][j] * &y[j]).sum();
        // Need d (x + cᵢ + shift)² ≤ remaining.
        let mid = -(&self.center[i] + &shift);
        let d = &self.ldl.diag[i];
        let radius = floor_sqrt(&(remaining / d));
        let lo = (mid.floor().to_integer() - &radius - BigInt::from(1))
            .to_i64()
            .expect("coordinate range");
        let hi = (mid.ceil().to_integer() + &radius + BigInt::from(1))
            .to_i64()
            .expect("coordinate range");
        let mut out = Vec::new();
        for x in lo..=hi {
            let t = Q::from_integer(x.into()) - &mid;
            let cost = d * &t * &t;
            if &cost <= remaining {
                out.push((x, remaining - cost));
            }
        }
        out
    }

    fn descend(
        &self,
        i: usize,
        z: &mut Vec<i64>,
        y: &mut Vec<Q>,
        remaining: &Q,
        found: &mut Vec<Vec<i64>>,
    ) {
        for (x, rest) in self.level_candidates(i, y, remaining) {
            z[i] = x;
            y[i] = &self.center[i] + Q::from_integer(x.into());
            if i == 0 {
                found.push(z.clone());
            } else {
                self.descend(i - 1, z, y, &rest, found);
            }
        }
        z[i] = 0;
        y[i] = Q::zero();
    }
}

/// All vectors of a fixed norm in one definite sublattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSet {
    pub sublattice_id: String,
    pub norm: i64,
    /// Sublattice coordinates, lexicographically sorted.
    pub roots: Vec<Vec<i64>>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn closed_under_negation(&self) -> bool {
        self.roots.iter().all(|r| {
            let neg: Vec<i64> = r.iter().map(|v| -v).collect();
            self.roots.binary_search(&neg).is_ok()
        })
    }

    /// Ambient integer coordinates of every member.
    pub fn ambient(&self, sub: &DefiniteSublattice) -> Vec<Vec<i64>> {
        self.roots.iter().map(|z| sub.embed(z)).collect()
    }

    pub fn ambient_vectors(&self, sub: &DefiniteSublattice) -> Vec<LatticeVector> {
        self.roots
            .iter()
            .map(|z| LatticeVector::from_ints(&sub.embed(z)))
            .collect()
    }
}

/// Every `v` with `v·v = norm`. Norm 0 yields the empty set (the zero vector
/// is excluded by convention).
pub fn enumerate_norm_vectors(
    sub: &DefiniteSublattice,
    norm: i64,
) -> Result<RootSet, EnumerationError> {
    if norm != 0 && norm.signum() != sub.sign {
        return Err(EnumerationError::NormSign {
            id: sub.id.clone(),
            norm,
        });
    }
    let roots = if norm == 0 {
        Vec::new()
    } else {
        let bound = Q::from_integer((norm * sub.sign).into());
        sub.enumerate_ball(&bound, None)
            .into_iter()
            .filter(|z| sub.norm(z) == norm)
            .collect()
    };
    Ok(RootSet {
        sublattice_id: sub.id.clone(),
        norm,
        roots,
    })
}

/// `α₀..α₇` block.
pub fn alpha_block(lat: &IntersectionLattice) -> DefiniteSublattice {
    block(lat, "minus_e8_alpha", (0..8).map(lattice::alpha).collect())
}

/// `β₀..β₇` block.
pub fn beta_block(lat: &IntersectionLattice) -> DefiniteSublattice {
    block(lat, "minus_e8_beta", (0..8).map(lattice::beta).collect())
}

fn block(lat: &IntersectionLattice, id: &str, indices: Vec<usize>) -> DefiniteSublattice {
    let gens = indices.iter().map(|&i| unit(i)).collect();
    DefiniteSublattice::from_generators(lat, id, gens).expect("E8 block is definite")
}

fn unit(i: usize) -> Vec<i64> {
    let mut v = vec![0; RANK];
    v[i] = 1;
    v
}

fn xi_minus_eta(j: usize) -> Vec<i64> {
    let mut v = vec![0; RANK];
    v[lattice::xi(j)] = 1;
    v[lattice::eta(j)] = -1;
    v
}

/// `⟨−2⟩³` spanned by `ξⱼ − ηⱼ`.
pub fn xi_eta_block(lat: &IntersectionLattice) -> DefiniteSublattice {
    let gens = (1..=3).map(xi_minus_eta).collect();
    DefiniteSublattice::from_generators(lat, "minus_two_cubed", gens).expect("definite")
}

/// Rank-19 negative definite sublattice `−E8 ⊕ −E8 ⊕ ⟨−2⟩³`, generators in
/// the order `α₀..α₇, β₀..β₇, ξ₁−η₁, ξ₂−η₂, ξ₃−η₃`.
pub fn negative_sublattice(lat: &IntersectionLattice) -> DefiniteSublattice {
    let mut gens: Vec<Vec<i64>> = (0..16).map(unit).collect();
    gens.extend((1..=3).map(xi_minus_eta));
    DefiniteSublattice::from_generators(lat, "negative_rank19", gens).expect("definite")
}

/// All norm −2 vectors of the rank-19 negative definite sublattice.
pub fn negative_root_scan(lat: &IntersectionLattice) -> RootSet {
    enumerate_norm_vectors(&negative_sublattice(lat), -2).expect("norm sign matches")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SameSignVerdict {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<Vec<i64>>,
}

/// Whether every member has all coordinates ≥ 0 or all ≤ 0.
pub fn same_sign_check(rs: &RootSet) -> SameSignVerdict {
    let witness = rs
        .roots
        .iter()
        .find(|r| r.iter().any(|&v| v > 0) && r.iter().any(|&v| v < 0))
        .cloned();
    SameSignVerdict {
        holds: witness.is_none(),
        checked: rs.len(),
        witness,
    }
}

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord {
    format_version: u32,
    sublattice_id: String,
    gram_hash: String,
    norm: i64,
    rank: usize,
    vectors: Vec<Vec<i64>>,
}

/// On-disk root-set cache keyed by (Gram hash, norm). One writer at a time;
/// files are replaced atomically so readers never see partial records.
#[derive(Clone, Debug)]
pub struct RootCache {
    dir: PathBuf,
}

impl RootCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        RootCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, sub: &DefiniteSublattice, norm: i64) -> PathBuf {
        let hash = sub.gram_hash();
        self.dir
            .join(format!("{}_norm{}_{}.json", sub.id, norm, &hash[..16]))
    }

    /// Cached set, if a record with matching version, hash and norm exists.
    pub fn load(&self, sub: &DefiniteSublattice, norm: i64) -> Option<RootSet> {
        let text = fs::read_to_string(self.path(sub, norm)).ok()?;
        let rec: CacheRecord = serde_json::from_str(&text).ok()?;
        let valid = rec.format_version == CACHE_FORMAT_VERSION
            && rec.gram_hash == sub.gram_hash()
            && rec.norm == norm
            && rec.rank == sub.rank()
            && rec.vectors.iter().all(|v| v.len() == sub.rank());
        valid.then_some(RootSet {
            sublattice_id: rec.sublattice_id,
            norm: rec.norm,
            roots: rec.vectors,
        })
    }

    pub fn store(
        &self,
        sub: &DefiniteSublattice,
        rs: &RootSet,
    ) -> Result<PathBuf, EnumerationError> {
        fs::create_dir_all(&self.dir)?;
        let rec = CacheRecord {
            format_version: CACHE_FORMAT_VERSION,
            sublattice_id: rs.sublattice_id.clone(),
            gram_hash: sub.gram_hash(),
            norm: rs.norm,
            rank: sub.rank(),
            vectors: rs.roots.clone(),
        };
        let path = self.path(sub, rs.norm);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&rec)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}

/// Cache-aware [`enumerate_norm_vectors`]. Returns the set and whether it
/// came from the cache.
pub fn enumerate_cached(
    sub: &DefiniteSublattice,
    norm: i64,
    cache: Option<&RootCache>,
) -> Result<(RootSet, bool), EnumerationError> {
    if let Some(c) = cache {
        if let Some(rs) = c.load(sub, norm) {
            return Ok((rs, true));
        }
    }
    let rs = enumerate_norm_vectors(sub, norm)?;
    if let Some(c) = cache {
        c.store(sub, &rs)?;
    }
    Ok((rs, false))
}
