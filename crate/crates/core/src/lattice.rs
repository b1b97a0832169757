//! The K3 intersection lattice `−E8 ⊕ −E8 ⊕ H ⊕ H ⊕ H` in a fixed named basis.
//!
//! Basis order (frozen, used by every serialized vector):
//!
//! ```text
//! index  0..=7   α₀ … α₇     first −E8 block
//! index  8..=15  β₀ … β₇     second −E8 block
//! index 16..=18  ξ₁ ξ₂ ξ₃    hyperbolic planes, first generator
//! index 19..=21  η₁ η₂ η₃    hyperbolic planes, second generator
//! ```
//!
//! Each −E8 block is the negated Cartan matrix of E8 in a simple-root basis.
//! α₀ is the trivalent node; α₁, α₂, α₃ are its three neighbours, and the
//! arms continue as α₂–α₄ and α₃–α₅–α₆–α₇:
//!
//! ```text
//!             α₁
//!             |
//!   α₄ — α₂ — α₀ — α₃ — α₅ — α₆ — α₇
//! ```
//!
//! Adjacent nodes pair to 1, every node has self-pairing −2, everything else
//! pairs to 0. The β block uses the same diagram.

use crate::exact::{format_rational, JsonInt, Q};
use crate::linalg::{self, Matrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub const RANK: usize = 22;

/// Edges of the E8 Dynkin diagram in block-local indices.
pub const E8_EDGES: [(usize, usize); 7] = [(0, 1), (0, 2), (0, 3), (2, 4), (3, 5), (5, 6), (6, 7)];

pub const ALPHA: usize = 0;
pub const BETA: usize = 8;
pub const XI: usize = 16;
pub const ETA: usize = 19;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("unknown basis symbol {0:?}")]
    UnknownSymbol(String),
}

/// Index of `α_i`.
pub fn alpha(i: usize) -> usize {
    assert!(i < 8);
    ALPHA + i
}

/// Index of `β_i`.
pub fn beta(i: usize) -> usize {
    assert!(i < 8);
    BETA + i
}

/// Index of `ξ_j`, `j ∈ {1,2,3}`.
pub fn xi(j: usize) -> usize {
    assert!((1..=3).contains(&j));
    XI + j - 1
}

/// Index of `η_j`, `j ∈ {1,2,3}`.
pub fn eta(j: usize) -> usize {
    assert!((1..=3).contains(&j));
    ETA + j - 1
}

/// ASCII symbol of a basis index (`a0`, `b7`, `x1`, `y3`).
pub fn symbol(index: usize) -> String {
    match index {
        0..=7 => format!("a{index}"),
        8..=15 => format!("b{}", index - 8),
        16..=18 => format!("x{}", index - 15),
        19..=21 => format!("y{}", index - 18),
        _ => panic!("basis index {index} out of range"),
    }
}

/// Display symbol of a basis index (`α₀`, `ξ₁`, …).
pub fn pretty_symbol(index: usize) -> String {
    const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    match index {
        0..=7 => format!("α{}", SUB[index]),
        8..=15 => format!("β{}", SUB[index - 8]),
        16..=18 => format!("ξ{}", SUB[index - 15]),
        19..=21 => format!("η{}", SUB[index - 18]),
        _ => panic!("basis index {index} out of range"),
    }
}

pub fn index_of_symbol(sym: &str) -> Result<usize, LatticeError> {
    let err = || LatticeError::UnknownSymbol(sym.to_string());
    let mut chars = sym.chars();
    let head = chars.next().ok_or_else(err)?;
    let n: usize = chars.as_str().parse().map_err(|_| err())?;
    match (head, n) {
        ('a', 0..=7) => Ok(alpha(n)),
        ('b', 0..=7) => Ok(beta(n)),
        ('x', 1..=3) => Ok(xi(n)),
        ('y', 1..=3) => Ok(eta(n)),
        _ => Err(err()),
    }
}

/// Rank-22 even unimodular form of signature (3, 19).
#[derive(Clone, Debug)]
pub struct IntersectionLattice {
    gram: Vec<Vec<i64>>,
    inverse: Matrix,
}

/// Negated E8 Cartan matrix in the node order documented above.
pub fn minus_e8_gram() -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = -2;
    }
    for &(i, j) in &E8_EDGES {
        g[i][j] = 1;
        g[j][i] = 1;
    }
    g
}

/// Builds the fixed lattice.
pub fn build_k3_lattice() -> IntersectionLattice {
    let mut gram = vec![vec![0i64; RANK]; RANK];
    let e8 = minus_e8_gram();
    for offset in [ALPHA, BETA] {
        for i in 0..8 {
            for j in 0..8 {
                gram[offset + i][offset + j] = e8[i][j];
            }
        }
    }
    for j in 1..=3 {
        gram[xi(j)][eta(j)] = 1;
        gram[eta(j)][xi(j)] = 1;
    }
    let inverse = linalg::inverse(&linalg::from_integers(&gram)).expect("unimodular");
    IntersectionLattice { gram, inverse }
}

impl IntersectionLattice {
    pub fn rank(&self) -> usize {
        RANK
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i][j]
    }

    pub fn pair(&self, u: &LatticeVector, v: &LatticeVector) -> Result<Q, LatticeError> {
        u.check_dim()?;
        v.check_dim()?;
        let mut acc = Q::zero();
        for (i, ui) in u.0.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.0.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && !vj.is_zero() {
                    acc += ui * vj * Q::from_integer(g.into());
                }
            }
        }
        Ok(acc)
    }

    /// `u·v` for integral coordinate arrays.
    pub fn pair_int(&self, u: &[i64], v: &[i64]) -> i64 {
        let mut acc = 0i64;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                acc += ui * self.gram[i][j] * vj;
            }
        }
        acc
    }

    pub fn norm_int(&self, u: &[i64]) -> i64 {
        self.pair_int(u, u)
    }

    /// Pairings of `v` against every basis element, in basis order.
    pub fn pairing_profile(&self, v: &LatticeVector) -> Vec<Q> {
        (0..RANK)
            .map(|i| {
                v.0.iter()
                    .enumerate()
                    .filter(|(j, _)| self.gram[i][*j] != 0)
                    .map(|(j, c)| c * Q::from_integer(self.gram[i][j].into()))
                    .sum()
            })
            .collect()
    }

    /// The unique vector whose pairing with basis element `i` is `p[i]`.
    pub fn vector_from_pairings(&self, p: &[Q]) -> Result<LatticeVector, LatticeError> {
        if p.len() != RANK {
            return Err(LatticeError::Dimension {
                expected: RANK,
                got: p.len(),
            });
        }
        Ok(LatticeVector(linalg::mat_vec(&self.inverse, p)))
    }

    pub fn determinant(&self) -> Q {
        linalg::determinant(&linalg::from_integers(&self.gram))
    }

    /// `(positive, negative)` inertia.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = linalg::inertia(&linalg::from_integers(&self.gram));
        (p, n)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..RANK).all(|i| (0..RANK).all(|j| self.gram[i][j] == self.gram[j][i]))
    }

    pub fn has_even_diagonal(&self) -> bool {
        (0..RANK).all(|i| self.gram[i][i] % 2 == 0)
    }

    /// SHA-256 of the Gram matrix, hex encoded.
    pub fn gram_hash(&self) -> String {
        gram_hash(&self.gram)
    }
}

pub fn gram_hash(gram: &[Vec<i64>]) -> String {
    let mut h = Sha256::new();
    h.update((gram.len() as u64).to_le_bytes());
    for row in gram {
        for v in row {
            h.update(v.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Coordinates in the frozen basis order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LatticeVector(pub Vec<Q>);

impl LatticeVector {
    pub fn zero() -> Self {
        LatticeVector(vec![Q::zero(); RANK])
    }

    pub fn basis(index: usize) -> Self {
        let mut v = Self::zero();
        v.0[index] = Q::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    pub fn coords(&self) -> &[Q] {
        &self.0
    }

    fn check_dim(&self) -> Result<(), LatticeError> {
        if self.0.len() == RANK {
            Ok(())
        } else {
            Err(LatticeError::Dimension {
                expected: RANK,
                got: self.0.len(),
            })
        }
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Integer coordinates, if integral and in range.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|c| {
                if c.is_integer() {
                    c.numer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn scale(&self, k: &Q) -> Self {
        LatticeVector(self.0.iter().map(|c| c * k).collect())
    }

    /// Linear combination `Σ cᵢ eᵢ` from `(index, coefficient)` terms.
    pub fn combo(terms: &[(usize, i64)]) -> Self {
        let mut v = Self::zero();
        for &(i, c) in terms {
            v.0[i] += Q::from_integer(c.into());
        }
        v
    }

    /// Pretty form such as `α₁ - α₂` or `(ξ₁ - η₁)/2`-style coefficients.
    pub fn pretty(&self) -> String {
        self.render(pretty_symbol)
    }

    /// ASCII form accepted by the class-expression parser (`a1 - a2`).
    pub fn ascii(&self) -> String {
        self.render(symbol)
    }

    fn render(&self, name: fn(usize) -> String) -> String {
        let mut out = String::new();
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('*');
            }
            out.push_str(&name(i));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.pretty())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&LatticeVector> for &Q {
    type Output = LatticeVector;
    fn mul(self, rhs: &LatticeVector) -> LatticeVector {
        rhs.scale(self)
    }
}

/// Serialized as 22 `[numerator, denominator]` pairs in basis order.
impl Serialize for LatticeVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            self.0
                .iter()
                .map(|c| [JsonInt(c.numer().clone()), JsonInt(c.denom().clone())]),
        )
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let pairs = Vec::<[JsonInt; 2]>::deserialize(d)?;
        if pairs.len() != RANK {
            return Err(D::Error::custom(format!(
                "expected {RANK} coordinates, got {}",
                pairs.len()
            )));
        }
        pairs
            .into_iter()
            .map(|[n, den]| {
                if den.0.is_zero() {
                    Err(D::Error::custom("zero denominator"))
                } else {
                    Ok(Q::new(n.0, den.0))
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(LatticeVector)
    }
}

/// Splitting of a vector along `span{ξᵢ+ηᵢ}` (positive definite) and its
/// orthogonal complement `span{α, β, ξᵢ−ηᵢ}` (negative definite).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitVector {
    /// Coefficients of `ξᵢ+ηᵢ`.
    pub n: [Q; 3],
    pub gamma_minus: LatticeVector,
}

impl SplitVector {
    /// Coefficients of `ξᵢ−ηᵢ` inside `gamma_minus`.
    pub fn m(&self) -> [Q; 3] {
        [1, 2, 3].map(|j| self.gamma_minus.0[xi(j)].clone())
    }

    pub fn n_norm_sq(&self) -> Q {
        self.n.iter().map(|x| x * x).sum()
    }

    pub fn reassemble(&self) -> LatticeVector {
        let mut v = self.gamma_minus.clone();
        for (j, nj) in (1..=3).zip(&self.n) {
            v.0[xi(j)] += nj;
            v.0[eta(j)] += nj;
        }
        v
    }
}

pub fn split_positive_negative(gamma: &LatticeVector) -> SplitVector {
    let two = Q::from_integer(BigInt::from(2));
    let mut gamma_minus = gamma.clone();
    let n = [1, 2, 3].map(|j| {
        let a = &gamma.0[xi(j)];
        let b = &gamma.0[eta(j)];
        let n = (a + b) / &two;
        let m = (a - b) / &two;
        gamma_minus.0[xi(j)] = m.clone();
        gamma_minus.0[eta(j)] = -m;
        n
    });
    SplitVector { n, gamma_minus }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn lat() -> IntersectionLattice {
        build_k3_lattice()
    }

    #[test]
    fn alpha_configuration() {
        let l = lat();
        for i in 1..=3 {
            assert_eq!(l.entry(alpha(0), alpha(i)), 1);
            for j in 1..=3 {
                if i != j {
                    assert_eq!(l.entry(alpha(i), alpha(j)), 0);
                }
            }
        }
        for k in 0..8 {
            assert_eq!(l.entry(alpha(k), alpha(k)), -2);
            assert_eq!(l.entry(beta(k), beta(k)), -2);
        }
        // α₄ and α₅ sit on different arms.
        assert_eq!(l.entry(alpha(4), alpha(5)), 0);
    }

    #[test]
    fn hyperbolic_pairings() {
        let l = lat();
        let x1 = LatticeVector::basis(xi(1));
        let y1 = LatticeVector::basis(eta(1));
        assert_eq!(l.pair(&x1, &y1).unwrap(), qi(1));
        assert_eq!(l.pair(&x1, &x1).unwrap(), qi(0));
        let d = &x1 - &y1;
        assert_eq!(l.pair(&d, &d).unwrap(), qi(-2));
        let s2 = LatticeVector::combo(&[(xi(2), 1), (eta(2), 1)]);
        assert_eq!(l.pair(&s2, &s2).unwrap(), qi(2));
        assert_eq!(
            l.pair(&d, &LatticeVector::combo(&[(xi(1), 1), (eta(1), 1)]))
                .unwrap(),
            qi(0)
        );
    }

    #[test]
    fn pair_examples() {
        let l = lat();
        let a0 = LatticeVector::basis(alpha(0));
        let a1 = LatticeVector::basis(alpha(1));
        assert_eq!(l.pair(&a0, &a1).unwrap(), qi(1));
        assert_eq!(l.pair(&LatticeVector::zero(), &a1).unwrap(), qi(0));
        for k in -3i64..=3 {
            let v = LatticeVector::combo(&[(alpha(1), 1), (alpha(0), k), (alpha(2), -1)]);
            assert_eq!(l.pair(&v, &v).unwrap(), qi(-4 - 2 * k * k));
        }
        let short = LatticeVector(vec![qi(1); 5]);
        assert!(matches!(
            l.pair(&short, &a0),
            Err(LatticeError::Dimension { .. })
        ));
    }

    #[test]
    fn vector_from_pairings_examples() {
        let l = lat();
        let x1 = LatticeVector::basis(xi(1));
        assert_eq!(l.vector_from_pairings(&l.pairing_profile(&x1)).unwrap(), x1);
        assert_eq!(
            l.vector_from_pairings(&vec![Q::zero(); RANK]).unwrap(),
            LatticeVector::zero()
        );
        // Pairing σⱼ against ξⱼ+ηⱼ (and 0 against ξⱼ−ηⱼ) means σⱼ/2 against
        // each of ξⱼ and ηⱼ.
        let sigma = [qi(1), qi(2), qi(2)];
        let mut p = vec![Q::zero(); RANK];
        for j in 1..=3 {
            p[xi(j)] = &sigma[j - 1] / qi(2);
            p[eta(j)] = &sigma[j - 1] / qi(2);
        }
        let v = l.vector_from_pairings(&p).unwrap();
        let mut expected = LatticeVector::zero();
        for j in 1..=3 {
            expected.0[xi(j)] = &sigma[j - 1] / qi(2);
            expected.0[eta(j)] = &sigma[j - 1] / qi(2);
        }
        assert_eq!(v, expected);
        for j in 1..=3 {
            let s = LatticeVector::combo(&[(xi(j), 1), (eta(j), 1)]);
            assert_eq!(l.pair(&v, &s).unwrap(), sigma[j - 1]);
        }
        assert!(l.vector_from_pairings(&[qi(1)]).is_err());
    }

    #[test]
    fn split_examples() {
        let x1 = LatticeVector::basis(xi(1));
        let s = split_positive_negative(&x1);
        assert_eq!(s.n, [q(1, 2), qi(0), qi(0)]);
        let mut gm = LatticeVector::zero();
        gm.0[xi(1)] = q(1, 2);
        gm.0[eta(1)] = q(-1, 2);
        assert_eq!(s.gamma_minus, gm);

        let a2 = LatticeVector::basis(alpha(2));
        let s = split_positive_negative(&a2);
        assert_eq!(s.n, [qi(0), qi(0), qi(0)]);
        assert_eq!(s.gamma_minus, a2);

        let p2 = LatticeVector::combo(&[(xi(2), 1), (eta(2), 1)]);
        let s = split_positive_negative(&p2);
        assert_eq!(s.n, [qi(0), qi(1), qi(0)]);
        assert!(s.gamma_minus.is_zero());
    }

    #[test]
    fn symbols_round_trip() {
        for i in 0..RANK {
            assert_eq!(index_of_symbol(&symbol(i)).unwrap(), i);
        }
        assert!(index_of_symbol("a8").is_err());
        assert!(index_of_symbol("x0").is_err());
        assert!(index_of_symbol("z1").is_err());
        assert_eq!(
            LatticeVector::combo(&[(alpha(1), 1), (alpha(2), -1)]).pretty(),
            "α₁ - α₂"
        );
        assert_eq!(LatticeVector::combo(&[(alpha(0), -2)]).ascii(), "-2*a0");
    }

    #[test]
    fn serde_round_trip() {
        let mut v = LatticeVector::combo(&[(alpha(3), -4), (eta(2), 7)]);
        v.0[xi(1)] = q(1, 2);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.starts_with("[[0,1],[0,1],[0,1],[-4,1]"));
        let back: LatticeVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
