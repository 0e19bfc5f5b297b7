use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::certificate::{Criterion, Witness};
use crate::fixtures::*;
use crate::numeric::random::random_invertible;
use crate::numeric::{rank, Tolerance};
use crate::tensor::DerivTensor;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn m(rows: &[&[f64]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

fn blocks(dims: &[usize]) -> BlockSpec {
    BlockSpec::new(dims.to_vec()).unwrap()
}

/// Hessian `d_x × d_s × d_s` from `(row, i, j, value)` entries, symmetrized.
fn hessian(dx: usize, ds: usize, entries: &[(usize, usize, usize, f64)]) -> DerivTensor {
    let mut h = DerivTensor::zeros(dx, ds, 2).unwrap();
    for &(r, i, j, v) in entries {
        h.set(r, &[i, j], v);
        h.set(r, &[j, i], v);
    }
    h
}

fn jacobian_tensor(rows: &[&[f64]]) -> DerivTensor {
    DerivTensor::from_matrix(&m(rows))
}

/// Sparse random matrix with a planted column block structure and, with
/// probability `overlap`, rows shared between blocks.
fn random_sparse(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> Matrix {
    let mut a = Matrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.random_bool(density) {
                a.set(r, c, f64::from(rng.random_range(1..4)) * if rng.random_bool(0.5) { 1.0 } else { -1.0 });
            }
        }
    }
    a
}

fn block_diag_mix(rng: &mut ChaCha8Rng, b: &BlockSpec) -> Matrix {
    let n = b.total();
    let mut r = Matrix::zeros(n, n);
    for i in 0..b.len() {
        let range = b.range(i);
        let blk = random_invertible(rng, range.len(), 1e6, 100).unwrap();
        for (x, rr) in range.clone().enumerate() {
            for (y, cc) in range.clone().enumerate() {
                r.set(rr, cc, blk.get(x, y));
            }
        }
    }
    r
}

#[test]
fn type_d_examples() {
    let j = m(&[&[1.0, 0.0], &[2.0, 0.0], &[0.0, 3.0], &[0.0, 1.0]]);
    assert!(check_type_d(&j, &blocks(&[1, 1]), &tol()).unwrap().holds);

    let c = check_type_d(&matrix_a(), &blocks_a(), &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(
        c.witness,
        Witness::ColumnPair {
            columns: [1, 2],
            rows: vec![3, 4, 5, 6]
        }
    );
    assert!(check_type_d(&matrix_a(), &blocks(&[2]), &tol()).unwrap().holds);
    assert!(check_type_d(&matrix_a(), &blocks(&[1, 2]), &tol()).is_err());
    let c = check_type_d(&matrix_d(), &blocks_d(), &tol()).unwrap();
    assert_eq!(c.witness, Witness::ColumnPair { columns: [1, 3], rows: vec![5] });
}

#[test]
fn type_d_irreducible_examples() {
    let col = m(&[&[1.0], &[0.0], &[2.0]]);
    assert!(check_type_d_irreducible(&col, &blocks(&[1]), 1, &tol()).unwrap().holds);

    let split = m(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0]]);
    let c = check_type_d_irreducible(&split, &blocks(&[2]), 1, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(
        c.witness,
        Witness::RowSplit {
            groups: vec![vec![1, 2], vec![3, 4]]
        }
    );

    assert!(check_type_d_irreducible(&matrix_d(), &blocks_d(), 1, &tol()).unwrap().holds);
    assert!(check_type_d_irreducible(&matrix_d(), &blocks_d(), 2, &tol()).unwrap().holds);
    assert!(check_type_d_irreducible(&matrix_d(), &blocks_d(), 3, &tol()).is_err());
    let zero = m(&[&[1.0, 0.0], &[1.0, 0.0]]);
    assert_eq!(
        check_type_d_irreducible(&zero, &blocks(&[1, 1]), 2, &tol()),
        Err(Error::DegenerateColumn { column: 2 })
    );
}

#[test]
fn type_d_irreducibility_matches_brute_force_oracle() {
    // oracle: some subset S of rows, neither S nor its complement spanning
    // trivially, with rank(S) + rank(S^c) = rank
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..60 {
        let a = random_sparse(&mut rng, 6, 2, 0.5);
        if rank(&a, &tol()) < 2 || (0..2).any(|c| a.column(c).iter().all(|&x| x == 0.0)) {
            continue;
        }
        let nonzero: Vec<usize> = (0..6).filter(|&r| a.row(r).iter().any(|&x| x != 0.0)).collect();
        let mut reducible = false;
        for bits in 1u32..(1 << nonzero.len()) - 1 {
            let (s, t): (Vec<usize>, Vec<usize>) = nonzero.iter().partition(|&&r| {
                bits >> nonzero.iter().position(|&x| x == r).unwrap() & 1 == 1
            });
            let rs = rank(&a.select_rows(&s).unwrap(), &tol());
            let rt = rank(&a.select_rows(&t).unwrap(), &tol());
            if rs + rt == 2 {
                reducible = true;
            }
        }
        let c = check_type_d_irreducible(&a, &blocks(&[2]), 1, &tol()).unwrap();
        assert_eq!(c.holds, !reducible, "{a}");
    }
}

#[test]
fn type_m_examples() {
    for (j, b) in [
        (matrix_a(), blocks_a()),
        (matrix_b(), blocks_bc()),
        (matrix_c(), blocks_bc()),
        (matrix_d(), blocks_d()),
    ] {
        assert!(check_type_m(&j, &b, &tol()).unwrap().holds);
        assert!(type_m_by_row_intersections(&j, &b, &tol()).unwrap());
    }
    let c = check_type_m(&m(&[&[1.0, 0.0], &[1.0, 1.0]]), &blocks(&[1, 1]), &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(
        c.witness,
        Witness::Containment {
            smaller: 2,
            larger: 1,
            smaller_support: vec![2],
            larger_support: vec![1, 2]
        }
    );
    assert!(check_type_m(&Matrix::identity(2), &blocks(&[1, 1]), &tol()).unwrap().holds);
    let zero = m(&[&[1.0, 0.0], &[1.0, 0.0]]);
    assert_eq!(
        check_type_m(&zero, &blocks(&[1, 1]), &tol()),
        Err(Error::DegenerateColumn { column: 2 })
    );
    assert_eq!(
        type_m_by_row_intersections(&zero, &blocks(&[1, 1]), &tol()),
        Err(Error::DegenerateColumn { column: 2 })
    );
}

#[test]
fn type_m_irreducible_examples() {
    let c = check_type_m_irreducible(&matrix_d(), &blocks_d(), 1, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(c.witness, Witness::ColumnSplit { first: vec![1], second: vec![2] });
    assert!(check_type_m_irreducible(&matrix_d(), &blocks_d(), 2, &tol()).unwrap().holds);
    assert!(check_type_m_irreducible(&matrix_a(), &blocks_a(), 1, &tol()).unwrap().holds);
}

#[test]
fn type_s_examples() {
    assert!(check_type_s(&matrix_a(), &blocks_a(), &tol()).unwrap().holds);
    let c = check_type_s(&matrix_b(), &blocks_bc(), &tol()).unwrap();
    assert!(!c.holds);
    match &c.witness {
        Witness::SparsityGap { rho_plus, rho_minus, basis } => {
            assert_eq!((*rho_plus, *rho_minus, basis.cost), (9, 9, 9));
            assert!(basis.mixing.iter().any(|&x| x));
        }
        w => panic!("unexpected witness {w:?}"),
    }
    assert!(!c.notes.is_empty());
    assert!(check_type_s(&matrix_c(), &blocks_bc(), &tol()).unwrap().holds);
    assert!(check_type_s(&matrix_d(), &blocks_d(), &tol()).unwrap().holds);

    let p = check_type_s_pairwise(&matrix_b(), &blocks_bc(), &tol()).unwrap();
    assert!(p.holds);
    assert_eq!(p.criterion, Criterion::TypeSPairwise);
}

#[test]
fn type_s_irreducible_examples() {
    for (j, b) in [
        (matrix_a(), blocks_a()),
        (matrix_b(), blocks_bc()),
        (matrix_c(), blocks_bc()),
        (matrix_d(), blocks_d()),
    ] {
        for i in 1..=b.len() {
            let c = check_type_s_irreducible(&j, &b, i, &tol()).unwrap();
            assert!(c.holds, "block {i} of {j}");
            assert!(!c.notes.is_empty());
        }
    }
    let split = m(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0]]);
    let c = check_type_s_irreducible(&split, &blocks(&[2]), 1, &tol()).unwrap();
    assert!(!c.holds);
    assert!(matches!(
        c.witness,
        Witness::SubspaceSplit {
            rho_plus: 4,
            rho_minus: 6,
            ..
        }
    ));
}

#[test]
fn type_h_examples() {
    // g(s) = (s1², s2², s1 + s2)
    let h = hessian(3, 2, &[(0, 0, 0, 2.0), (1, 1, 1, 2.0)]);
    assert!(check_type_h(&h, &blocks(&[1, 1]), 2, &tol()).unwrap().holds);
    // g(s) = s1·s2
    let h = hessian(1, 2, &[(0, 0, 1, 1.0)]);
    let c = check_type_h(&h, &blocks(&[1, 1]), 2, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(
        c.witness,
        Witness::TensorEntry {
            row: 1,
            indices: vec![1, 2],
            value: 1.0
        }
    );
    assert!(check_type_h(&h, &blocks(&[1, 1]), 3, &tol()).is_err());
    let mut asym = h.clone();
    asym.set(0, &[1, 0], 0.0);
    assert!(matches!(check_type_h(&asym, &blocks(&[1, 1]), 2, &tol()), Err(Error::InvalidInput(_))));
}

#[test]
fn type_h3_cross_entries() {
    // g(s) = s1²·s2: third derivative ∂1∂1∂2 = 2
    let mut t = DerivTensor::zeros(1, 2, 3).unwrap();
    for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
        t.set(0, &idx, 2.0);
    }
    let c = check_type_h(&t, &blocks(&[1, 1]), 3, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(c.criterion, Criterion::TypeH3);
    // g(s) = (s1³, s2³)
    let mut t = DerivTensor::zeros(2, 2, 3).unwrap();
    t.set(0, &[0, 0, 0], 6.0);
    t.set(1, &[1, 1, 1], 6.0);
    assert!(check_type_h(&t, &blocks(&[1, 1]), 3, &tol()).unwrap().holds);
}

#[test]
fn type_h_irreducible_examples() {
    let zero = DerivTensor::zeros(2, 2, 2).unwrap();
    let c = check_type_h_irreducible(&zero, &blocks(&[2]), 1, 2, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(c.witness, Witness::ZeroSlice { block: 1 });

    let full = hessian(1, 2, &[(0, 0, 0, 1.0), (0, 0, 1, 1.0), (0, 1, 1, 1.0)]);
    let c = check_type_h_irreducible(&full, &blocks(&[2]), 1, 2, &tol()).unwrap();
    assert!(c.holds);
    assert!(!c.notes.is_empty());

    let diag = hessian(1, 2, &[(0, 0, 0, 1.0), (0, 1, 1, 1.0)]);
    let c = check_type_h_irreducible(&diag, &blocks(&[2]), 1, 2, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(c.witness, Witness::ColumnSplit { first: vec![1], second: vec![2] });

    let one = hessian(1, 1, &[(0, 0, 0, 3.0)]);
    assert!(check_type_h_irreducible(&one, &blocks(&[1]), 1, 2, &tol()).unwrap().holds);
}

#[test]
fn separability_examples() {
    // g(s) = (s1², s2²) at the origin
    let j = jacobian_tensor(&[&[0.0, 0.0], &[0.0, 0.0]]);
    let h = hessian(2, 2, &[(0, 0, 0, 2.0), (1, 1, 1, 2.0)]);
    assert!(check_separability(&[j, h], &blocks(&[1, 1]), 2, &tol()).unwrap().holds);

    // linear g: zero second derivative, reported as degenerate
    let j = jacobian_tensor(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let h = DerivTensor::zeros(2, 2, 2).unwrap();
    let c = check_separability(&[j, h], &blocks(&[1, 1]), 2, &tol()).unwrap();
    assert!(c.holds);
    assert!(c.notes[0].contains("degenerate"));

    // g(s) = (s1² + s2², s1, s2) at the origin
    let j = jacobian_tensor(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
    let h = hessian(3, 2, &[(0, 0, 0, 2.0), (0, 1, 1, 2.0)]);
    let c = check_separability(&[j.clone(), h.clone()], &blocks(&[1, 1]), 2, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(
        c.witness,
        Witness::Separability {
            block: 1,
            image_rank: 1,
            competitor_rank: 3,
            joint_rank: 3
        }
    );
    assert!(check_separability(&[h, j], &blocks(&[1, 1]), 2, &tol()).is_err());
}

#[test]
fn support_union_examples() {
    let jg = matrix_b();
    let id = Matrix::identity(3);
    assert!(check_support_union(&jg, &jg, &id, &tol()).unwrap().holds);

    let col = m(&[&[1.0], &[1.0]]);
    assert!(check_support_union(&col, &col, &m(&[&[1.0]]), &tol()).unwrap().holds);

    let jg = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let b = m(&[&[1.0, 0.0], &[-1.0, 1.0]]);
    let jghat = jg.matmul(&b).unwrap();
    let c = check_support_union(&jg, &jghat, &b, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(
        c.witness,
        Witness::SupportMismatch {
            column: 1,
            expected: vec![1, 2],
            found: vec![2]
        }
    );
    assert!(matches!(
        check_support_union(&jg, &jg, &b, &tol()),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn l0_examples() {
    let b = matrix_b();
    assert!(check_l0_nonincrease(&b, &b, &tol()).unwrap().holds);
    let bg = b.matmul(&matrix_b_mixing()).unwrap();
    let c = check_l0_nonincrease(&b, &bg, &tol()).unwrap();
    assert!(c.holds);
    assert_eq!(c.witness, Witness::L0Counts { source: 9, target: 9 });
    let mut denser = b.clone();
    denser.set(0, 1, 1.0);
    assert!(!check_l0_nonincrease(&b, &denser, &tol()).unwrap().holds);
}

#[test]
fn assignment_examples() {
    let one = blocks(&[1, 1]);
    let c = extract_assignment(&m(&[&[0.0, 2.0], &[3.0, 0.0]]), &one, &one, &tol()).unwrap();
    assert_eq!(c.witness, Witness::Assignment { sigma: vec![2, 1] });

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let two = blocks(&[2, 2]);
    let r = block_diag_mix(&mut rng, &two);
    let c = extract_assignment(&r, &two, &two, &tol()).unwrap();
    assert!(c.holds);
    assert_eq!(c.witness, Witness::Assignment { sigma: vec![1, 2] });

    let c = extract_assignment(&m(&[&[1.0, 1.0], &[0.0, 1.0]]), &one, &one, &tol()).unwrap();
    assert!(!c.holds);
    assert_eq!(c.witness, Witness::BlockRow { block_row: 1, targets: vec![1, 2] });

    assert!(matches!(
        extract_assignment(&m(&[&[1.0, 1.0], &[1.0, 1.0]]), &one, &one, &tol()),
        Err(Error::Rank(_))
    ));
}

#[test]
fn contrast_and_type_o_examples() {
    let one = blocks(&[1, 1]);
    let disjoint = m(&[&[1.0, 0.0], &[0.0, 5.0]]);
    assert_eq!(compositional_contrast(&disjoint, &one).unwrap(), 0.0);
    assert_eq!(compositional_contrast(&m(&[&[1.0, 1.0]]), &one).unwrap(), 1.0);
    assert_eq!(compositional_contrast(&m(&[&[2.0, 3.0]]), &one).unwrap(), 6.0);

    let (c, s) = (0.6_f64, 0.8_f64);
    assert!(check_type_o(&m(&[&[c, -s], &[s, c]]), &one, &tol()).unwrap().holds);
    let f = check_type_o(&m(&[&[1.0, 1.0], &[0.0, 1.0]]), &one, &tol()).unwrap();
    assert_eq!(f.witness, Witness::InnerProduct { columns: [1, 2], value: 1.0 });
    let disjoint3 = m(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 4.0]]);
    assert!(check_type_o(&disjoint3, &blocks(&[2, 1]), &tol()).unwrap().holds);
}

#[test]
fn hierarchy_examples() {
    let j = m(&[&[1.0, 0.0], &[2.0, 0.0], &[0.0, 1.0], &[0.0, 3.0]]);
    let h = hessian(4, 2, &[(0, 0, 0, 1.0), (3, 1, 1, 1.0)]);
    let c = hierarchy_audit(&j, &blocks(&[1, 1]), Some(&h), &tol()).unwrap();
    assert!(c.holds);
    match &c.witness {
        Witness::Hierarchy { outcomes, violations } => {
            assert!(violations.is_empty());
            for k in ["D", "M", "S", "H2", "M in sparsest basis"] {
                assert_eq!(outcomes.get(k), Some(&true), "{k}");
            }
        }
        w => panic!("unexpected witness {w:?}"),
    }

    let c = hierarchy_audit(&matrix_c(), &blocks_bc(), None, &tol()).unwrap();
    assert!(c.holds);
    match &c.witness {
        Witness::Hierarchy { outcomes, .. } => {
            assert!(!outcomes["D"]);
            assert!(outcomes["S"]);
            assert!(outcomes["M in sparsest basis"]);
        }
        w => panic!("unexpected witness {w:?}"),
    }

    // a cross-block Hessian entry on a Type D Jacobian is reported as a violation
    let bad = hessian(4, 2, &[(0, 0, 1, 1.0)]);
    let c = hierarchy_audit(&j, &blocks(&[1, 1]), Some(&bad), &tol()).unwrap();
    assert!(!c.holds);
}

#[test]
fn certificates_fail_only_with_witness() {
    let c = check_type_d(&matrix_a(), &blocks_a(), &tol()).unwrap();
    assert!(!c.holds && !c.witness.is_none());
    assert_eq!(c.inputs_digest, matrix_a().digest());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pitchfork_and_row_intersection_agree(seed in any::<u64>(), rows in 2usize..=7, k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = blocks(&(0..k).map(|_| rng.random_range(1..=2)).collect::<Vec<_>>());
        let a = random_sparse(&mut rng, rows, b.total(), 0.5);
        let direct = check_type_m(&a, &b, &tol()).map(|c| c.holds);
        let dual = type_m_by_row_intersections(&a, &b, &tol());
        prop_assert_eq!(direct, dual);
    }

    #[test]
    fn type_d_invariant_under_row_permutation_and_block_mixing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = blocks(&[2, 1, 2]);
        let a = random_sparse(&mut rng, 8, 5, 0.3);
        let base = check_type_d(&a, &b, &tol()).unwrap().holds;
        let mut perm: Vec<usize> = (0..8).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let permuted = a.select_rows(&perm).unwrap();
        prop_assert_eq!(check_type_d(&permuted, &b, &tol()).unwrap().holds, base);
        let mixed = a.matmul(&block_diag_mix(&mut rng, &b)).unwrap();
        prop_assert_eq!(check_type_d(&mixed, &b, &tol()).unwrap().holds, base);
    }

    #[test]
    fn contrast_vanishes_iff_type_d(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = blocks(&[1, 2]);
        let a = random_sparse(&mut rng, 5, 3, 0.35);
        let zero = compositional_contrast(&a, &b).unwrap() == 0.0;
        prop_assert_eq!(zero, check_type_d(&a, &b, &tol()).unwrap().holds);
    }

    #[test]
    fn type_d_implies_type_o(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = blocks(&[2, 2]);
        let a = random_sparse(&mut rng, 6, 4, 0.4);
        if check_type_d(&a, &b, &tol()).unwrap().holds {
            prop_assert!(check_type_o(&a, &b, &tol()).unwrap().holds);
        }
    }
}
