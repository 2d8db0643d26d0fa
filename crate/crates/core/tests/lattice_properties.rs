mod support;

use cech::lattice::{
    hermite_rows, integer_kernel, smith_normal_form, solve_or_certify, FGAbelianGroup, GroupMorphism,
    IntMatrix, Solvability, analyze_morphism,
};
use cech::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle::invariant_factors_by_minors;

fn matrix(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn small_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(-bound..=bound, c), r))
}

#[test]
fn snf_matches_gcd_of_minors_on_100_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let r = rng.gen_range(1..=5);
        let c = rng.gen_range(1..=5);
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let snf = smith_normal_form(&matrix(&rows));
        let diag: Vec<i128> = snf.diagonal().iter().filter(|d| !d.is_zero()).map(|d| d.to_i128().unwrap()).collect();
        assert_eq!(diag, invariant_factors_by_minors(&rows), "{rows:?}");
    }
}

proptest! {
    #[test]
    fn snf_decomposition_holds(rows in small_matrix(5, 9)) {
        let a = matrix(&rows);
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).unwrap().mul(&snf.v).unwrap(), snf.s.clone());
        prop_assert_eq!(snf.u.mul(&snf.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        prop_assert!(snf.v.determinant().unwrap().abs() == BigInt::from(1));
        let d = snf.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        prop_assert!(d.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn hermite_rows_spans_the_row_lattice(rows in small_matrix(4, 6)) {
        let a = matrix(&rows);
        let h = hermite_rows(&a);
        // every row of h is an integer combination of rows of a and vice versa
        let snf_rank = smith_normal_form(&a).rank();
        prop_assert_eq!(h.rows(), snf_rank);
        for i in 0..h.rows() {
            let target = h.row(i);
            prop_assert!(matches!(solve_or_certify(&a.transpose(), &target).unwrap(), Solvability::Solution(_)));
        }
        for i in 0..a.rows() {
            let target = a.row(i);
            prop_assert!(matches!(solve_or_certify(&h.transpose(), &target).unwrap(), Solvability::Solution(_)));
        }
    }

    #[test]
    fn solutions_solve_and_certificates_verify(rows in small_matrix(4, 5), rhs_seed in prop::collection::vec(-6i64..=6, 4)) {
        let a = matrix(&rows);
        let b: Vec<BigInt> = rhs_seed.iter().take(a.rows()).map(|&x| BigInt::from(x)).chain(std::iter::repeat(BigInt::zero())).take(a.rows()).collect();
        match solve_or_certify(&a, &b).unwrap() {
            Solvability::Solution(x) => prop_assert_eq!(a.mul_vec(&x).unwrap(), b),
            Solvability::Infeasible(cert) => prop_assert!(cert.verify(&a, &b)),
        }
    }

    #[test]
    fn kernel_basis_is_annihilated(rows in small_matrix(4, 5)) {
        let a = matrix(&rows);
        let k = integer_kernel(&a);
        prop_assert!(a.mul(&k).unwrap().is_zero());
        prop_assert_eq!(k.cols() + smith_normal_form(&a).rank(), a.cols());
    }

    #[test]
    fn first_isomorphism_theorem_orders(moduli in prop::collection::vec(prop::sample::select(vec![2i64, 3, 4, 6]), 1..4), entries in prop::collection::vec(-3i64..=3, 16)) {
        // f: ⊕ℤ/m -> ⊕ℤ/m; entry (i, j) a multiple of m_i / gcd(m_i, m_j) keeps f well defined.
        let g = FGAbelianGroup::from_moduli(&moduli);
        let n = moduli.len();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| entries[i * 4 + j] * (moduli[i] / num_integer::gcd(moduli[i], moduli[j]))).collect())
            .collect();
        let f = GroupMorphism::new(g.clone(), g.clone(), matrix(&rows)).unwrap();
        prop_assert!(f.is_well_defined());
        let an = analyze_morphism(&f).unwrap();
        let order = |h: &FGAbelianGroup| h.order().unwrap();
        prop_assert_eq!(order(&an.kernel) * order(&an.image), order(&g));
        prop_assert_eq!(order(&an.image) * order(&an.cokernel), order(&g));
        // image inclusion composed with image projection is f
        let back = an.image_inclusion.compose(&an.image_projection).unwrap();
        prop_assert!(back.agrees_with(&f).unwrap());
        for j in 0..an.kernel.generator_count() {
            let x = an.kernel_inclusion.apply(&an.kernel.generator(j)).unwrap();
            prop_assert!(g.is_zero(&f.apply(&x).unwrap()).unwrap());
        }
    }
}
