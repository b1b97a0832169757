mod common;

use k3gap::certifier::chain_record;
use k3gap::enumeration::DefiniteSublattice;
use k3gap::exact::{q, qi, Q};
use k3gap::frame::{build_frame, FrameParams, HodgeFrame};
use k3gap::lattice::{
    build_k3_lattice, split_positive_negative, IntersectionLattice, LatticeVector, RANK,
};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vector(rng: &mut ChaCha8Rng, radius: i64) -> Vec<i64> {
    (0..RANK).map(|_| rng.gen_range(-radius..=radius)).collect()
}

fn reference(lat: &IntersectionLattice) -> HodgeFrame {
    build_frame(lat, &FrameParams::reference(q(1, 2))).unwrap()
}

#[test]
fn seeded_vectors_even_and_pairing_round_trip() {
    let lat = build_k3_lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b33);
    for _ in 0..1000 {
        let g = random_vector(&mut rng, 5);
        assert_eq!(lat.norm_int(&g) % 2, 0, "{g:?}");
        let v = LatticeVector::from_ints(&g);
        let back = lat.vector_from_pairings(&lat.pairing_profile(&v)).unwrap();
        assert_eq!(back, v);
    }
}

#[test]
fn seeded_vectors_split_identity() {
    let lat = build_k3_lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let g = LatticeVector::from_ints(&random_vector(&mut rng, 4));
        let s = split_positive_negative(&g);
        assert_eq!(s.reassemble(), g);
        let minus_sq = lat.pair(&s.gamma_minus, &s.gamma_minus).unwrap();
        assert_eq!(lat.pair(&g, &g).unwrap(), qi(2) * s.n_norm_sq() + minus_sq);
    }
}

/// Solves a 3×3 rational system by Cramer's rule.
fn cramer(m: &[[Q; 3]; 3], b: &[Q; 3]) -> [Q; 3] {
    let det = |a: &[[Q; 3]; 3]| {
        &a[0][0] * (&a[1][1] * &a[2][2] - &a[1][2] * &a[2][1])
            - &a[0][1] * (&a[1][0] * &a[2][2] - &a[1][2] * &a[2][0])
            + &a[0][2] * (&a[1][0] * &a[2][1] - &a[1][1] * &a[2][0])
    };
    let d = det(m);
    std::array::from_fn(|col| {
        let mut a = m.clone();
        for (row, bv) in b.iter().enumerate() {
            a[row][col] = bv.clone();
        }
        det(&a) / &d
    })
}

/// `area²(γ) = (ω·ω) |P γ|²` where `P` projects onto the positive
/// three-plane spanned by `ω_t, Re Ω, Im Ω`.
#[test]
fn area_matches_projection_onto_positive_plane() {
    let lat = build_k3_lattice();
    let f = reference(&lat);
    let basis = [&f.omega_t, &f.omega_re, &f.omega_im];
    let gram: [[Q; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| lat.pair(basis[i], basis[j]).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let g = LatticeVector::from_ints(&random_vector(&mut rng, 3));
        let rhs: [Q; 3] = std::array::from_fn(|i| lat.pair(basis[i], &g).unwrap());
        let c = cramer(&gram, &rhs);
        let proj_sq: Q = (0..3).map(|i| &c[i] * &rhs[i]).sum();
        assert_eq!(f.area_squared(&g), &f.omega_t_norm * proj_sq);
    }
}

#[test]
fn doubling_rho_strengthens_the_chain() {
    let lat = build_k3_lattice();
    let mut prev: Option<(Q, Q)> = None;
    for scale in [60, 120, 240] {
        let f = build_frame(&lat, &FrameParams::reference_with_rho_scale(scale, q(1, 2))).unwrap();
        let chain = chain_record(&f, &qi(1), 2).unwrap();
        if let Some((w, n)) = &prev {
            assert!(f.omega_t_norm > *w);
            assert!(chain.n_max_sq <= *n);
        }
        prev = Some((f.omega_t_norm.clone(), chain.n_max_sq));
    }
}

/// Negative-definite root lattices A1, A2, A3, D4, A4, A2⊕A2 (rank, edges).
fn small_sublattices() -> Vec<Vec<Vec<i64>>> {
    let diagrams: Vec<(usize, Vec<(usize, usize)>)> = vec![
        (1, vec![]),
        (2, vec![(0, 1)]),
        (3, vec![(0, 1), (1, 2)]),
        (4, vec![(0, 1), (0, 2), (0, 3)]),
        (4, vec![(0, 1), (1, 2), (2, 3)]),
        (4, vec![(0, 1), (2, 3)]),
    ];
    diagrams
        .into_iter()
        .map(|(r, edges)| {
            let mut g = vec![vec![0i64; r]; r];
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = -2;
            }
            for (a, b) in edges {
                g[a][b] = 1;
                g[b][a] = 1;
            }
            g
        })
        .collect()
}

fn box_search(gram: &[Vec<i64>], bound: i64, center: &[Q], radius: i64) -> Vec<Vec<i64>> {
    let r = gram.len();
    let mut out = Vec::new();
    let width = (2 * radius + 1) as usize;
    for code in 0..width.pow(r as u32) {
        let mut c = code;
        let z: Vec<i64> = (0..r)
            .map(|_| {
                let v = (c % width) as i64 - radius;
                c /= width;
                v
            })
            .collect();
        let d: Vec<Q> = z.iter().zip(center).map(|(&zi, ci)| qi(zi) + ci).collect();
        let mut norm = Q::zero();
        for i in 0..r {
            for j in 0..r {
                norm += &d[i] * &d[j] * qi(-gram[i][j]);
            }
        }
        if norm <= qi(bound) {
            out.push(z);
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn area_is_even_in_gamma(coords in prop::collection::vec(-6i64..=6, RANK)) {
        let lat = build_k3_lattice();
        let f = reference(&lat);
        let neg: Vec<i64> = coords.iter().map(|v| -v).collect();
        prop_assert_eq!(f.area_squared_int(&coords), f.area_squared_int(&neg));
    }

    #[test]
    fn norms_are_even(coords in prop::collection::vec(-20i64..=20, RANK)) {
        let lat = build_k3_lattice();
        prop_assert_eq!(lat.norm_int(&coords).rem_euclid(2), 0);
    }

    #[test]
    fn ball_enumeration_matches_box(which in 0usize..6, bound in 0i64..=8, cnum in prop::collection::vec(-2i64..=2, 4)) {
        let gram = small_sublattices().swap_remove(which);
        let r = gram.len();
        let sub = DefiniteSublattice::new("probe", gram.clone(), vec![vec![0; RANK]; r]).unwrap();
        let center: Vec<Q> = cnum[..r].iter().map(|&c| q(c, 2)).collect();
        let got = sub.enumerate_ball(&qi(bound), Some(&center));
        // |zᵢ + cᵢ|² ≤ bound · (G⁻¹)ᵢᵢ ≤ 8 · 2 for these diagrams, and |cᵢ| ≤ 1.
        let want = box_search(&gram, bound, &center, 5);
        prop_assert_eq!(got, want);
    }
}
