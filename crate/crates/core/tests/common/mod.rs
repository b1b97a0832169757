//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use k3gap::exact::{sqrt_sum_lt, Q};
use k3gap::frame::HodgeFrame;
use k3gap::lattice::{alpha, beta, eta, xi, IntersectionLattice, LatticeVector, RANK};
use std::collections::{BTreeSet, HashMap};

pub fn unit(i: usize) -> Vec<i64> {
    let mut v = vec![0; RANK];
    v[i] = 1;
    v
}

pub fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Roots of one −E8 block as the Weyl orbit of its simple roots:
/// `s_i(v) = v + (v·αᵢ) αᵢ` for `αᵢ² = −2`.
pub fn weyl_orbit_roots(lat: &IntersectionLattice, simple: &[usize]) -> BTreeSet<Vec<i64>> {
    let mut seen: BTreeSet<Vec<i64>> = simple.iter().map(|&i| unit(i)).collect();
    let mut frontier: Vec<Vec<i64>> = seen.iter().cloned().collect();
    while let Some(v) = frontier.pop() {
        for &i in simple {
            let c = lat.pair_int(&v, &unit(i));
            let mut w = v.clone();
            w[i] += c;
            if seen.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    seen
}

/// All 486 roots of `−E8 ⊕ −E8 ⊕ ⟨−2⟩³`, without short-vector enumeration.
pub fn all_negative_roots(lat: &IntersectionLattice) -> Vec<Vec<i64>> {
    let mut out: BTreeSet<Vec<i64>> = weyl_orbit_roots(lat, &(0..8).map(alpha).collect::<Vec<_>>());
    out.extend(weyl_orbit_roots(lat, &(0..8).map(beta).collect::<Vec<_>>()));
    for j in 1..=3 {
        let v = sub(&unit(xi(j)), &unit(eta(j)));
        out.insert(neg(&v));
        out.insert(v);
    }
    out.into_iter().collect()
}

/// Decomposition search by brute force up to `depth ≤ 4` parts drawn from
/// `parts`, total area strictly below `√budget_sq`. Returns one witness.
pub struct DepthOracle {
    budget_sq: Q,
    parts: Vec<(Vec<i64>, Q)>,
    index: HashMap<Vec<i64>, usize>,
    pairs: HashMap<Vec<i64>, Vec<(usize, usize)>>,
}

impl DepthOracle {
    pub fn new(frame: &HodgeFrame, candidates: &[Vec<i64>], budget_sq: Q) -> Self {
        let parts: Vec<(Vec<i64>, Q)> = candidates
            .iter()
            .map(|g| (g.clone(), frame.area_squared_int(g)))
            .filter(|(_, a)| a < &budget_sq)
            .collect();
        let index = parts
            .iter()
            .enumerate()
            .map(|(i, (g, _))| (g.clone(), i))
            .collect();
        let mut pairs: HashMap<Vec<i64>, Vec<(usize, usize)>> = HashMap::new();
        for i in 0..parts.len() {
            for j in i..parts.len() {
                if sqrt_sum_lt(&[parts[i].1.clone(), parts[j].1.clone()], &budget_sq) {
                    pairs
                        .entry(add(&parts[i].0, &parts[j].0))
                        .or_default()
                        .push((i, j));
                }
            }
        }
        DepthOracle {
            budget_sq,
            parts,
            index,
            pairs,
        }
    }

    pub fn parts_len(&self) -> usize {
        self.parts.len()
    }

    fn fits(&self, idx: &[usize]) -> bool {
        let terms: Vec<Q> = idx.iter().map(|&i| self.parts[i].1.clone()).collect();
        sqrt_sum_lt(&terms, &self.budget_sq)
    }

    pub fn decompose(&self, target: &[i64]) -> Option<Vec<Vec<i64>>> {
        let found = |idx: &[usize]| Some(idx.iter().map(|&i| self.parts[i].0.clone()).collect());
        if let Some(&i) = self.index.get(target) {
            if self.fits(&[i]) {
                return found(&[i]);
            }
        }
        if let Some(ps) = self.pairs.get(target) {
            let (i, j) = ps[0];
            return found(&[i, j]);
        }
        for i in 0..self.parts.len() {
            if let Some(ps) = self.pairs.get(&sub(target, &self.parts[i].0)) {
                for &(j, k) in ps {
                    if self.fits(&[i, j, k]) {
                        return found(&[i, j, k]);
                    }
                }
            }
        }
        for (s, ps) in &self.pairs {
            if let Some(qs) = self.pairs.get(&sub(target, s)) {
                for &(i, j) in ps {
                    for &(k, l) in qs {
                        if self.fits(&[i, j, k, l]) {
                            return found(&[i, j, k, l]);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Twenty probe targets mixing decomposable and non-decomposable classes.
pub fn probe_targets() -> Vec<LatticeVector> {
    let terms: Vec<Vec<(usize, i64)>> = vec![
        vec![(alpha(1), 1), (alpha(2), -1)],
        vec![(alpha(1), 1)],
        vec![(alpha(0), 1)],
        vec![(alpha(0), 2)],
        vec![(alpha(0), 3)],
        vec![(alpha(1), 1), (alpha(2), 1)],
        vec![(alpha(0), 1), (alpha(1), 1)],
        vec![(alpha(0), -1), (alpha(3), 1)],
        vec![(alpha(4), 1), (alpha(5), -1)],
        vec![(alpha(4), 1)],
        vec![(alpha(2), 1), (alpha(4), 1)],
        vec![(alpha(1), 1), (alpha(2), 1), (alpha(3), 1)],
        vec![(alpha(1), 1), (alpha(3), -1)],
        vec![(alpha(5), 1), (alpha(6), -1)],
        vec![(beta(0), 1)],
        vec![(beta(1), 1), (beta(2), -1)],
        vec![(xi(1), 1), (eta(1), -1)],
        vec![(alpha(0), 1), (alpha(1), 1), (alpha(2), 1)],
        vec![(alpha(1), 2)],
        vec![(alpha(0), 2), (alpha(1), 1), (alpha(2), 1), (alpha(3), 1)],
    ];
    terms.iter().map(|t| LatticeVector::combo(t)).collect()
}
