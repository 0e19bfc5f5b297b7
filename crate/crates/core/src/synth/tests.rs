use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::certificate::Witness;
use crate::criteria::{check_type_d, check_type_d_irreducible, check_type_h, check_type_m, decompose, extract_assignment};
use crate::graph::{build_graph, components, GraphKind};
use crate::numeric::{Matrix, Tolerance};
use crate::sparse::BlockSpec;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn template(k: usize, r: f64, seed: u64) -> OverlapTemplate {
    OverlapTemplate::new(k, r, seed)
}

/// Blocks `(a, b)` are adjacent when some column of `a` meets some column
/// of `b` in the `D` graph.
fn block_adjacency(j: &Matrix, blocks: &BlockSpec) -> Vec<(usize, usize)> {
    let g = build_graph(j, GraphKind::D, &tol()).unwrap();
    let mut out: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(a, b)| (blocks.block_of(a - 1) + 1, blocks.block_of(b - 1) + 1))
        .filter(|(a, b)| a != b)
        .collect();
    out.sort();
    out.dedup();
    out
}

#[test]
fn two_slots_without_overlap_are_disjoint() {
    let inst = gen_overlap_jacobian(&template(2, 0.0, 1)).unwrap();
    assert_eq!(inst.jacobian.rows(), 40);
    assert_eq!(inst.jacobian.cols(), 6);
    assert!(check_type_d(&inst.jacobian, &inst.blocks, &tol()).unwrap().holds);
    let g = build_graph(&inst.jacobian, GraphKind::D, &tol()).unwrap();
    assert_eq!(components(&g), vec![vec![1, 2, 3], vec![4, 5, 6]]);
    assert!(inst.expected.type_d);
    assert_eq!(inst.expected.components, 2);
}

#[test]
fn half_overlap_fails_d_but_keeps_m() {
    let inst = gen_overlap_jacobian(&template(2, 0.5, 2)).unwrap();
    assert_eq!(inst.expected.pair_rows, 20);
    assert_eq!(inst.jacobian.rows(), 60);
    assert!(!check_type_d(&inst.jacobian, &inst.blocks, &tol()).unwrap().holds);
    assert!(check_type_m(&inst.jacobian, &inst.blocks, &tol()).unwrap().holds);
    assert!(!inst.expected.type_d);
    assert!(inst.expected.type_m);
}

#[test]
fn three_slots_form_a_path() {
    let inst = gen_overlap_jacobian(&template(3, 0.2, 3)).unwrap();
    assert_eq!(inst.expected.pair_rows, 5);
    assert_eq!(block_adjacency(&inst.jacobian, &inst.blocks), vec![(1, 2), (2, 3)]);
    assert_eq!(inst.expected.block_adjacency, vec![(1, 2), (2, 3)]);
    let groups: Vec<&str> = inst.expected.row_groups.iter().map(|g| g.0.as_str()).collect();
    assert_eq!(groups, ["g(1)", "g(1,2)", "g(2)", "g(2,3)", "g(3)"]);
    assert_eq!(inst.expected.row_groups[1].1, [21, 25]);
}

#[test]
fn entries_follow_the_template() {
    let inst = gen_overlap_jacobian(&template(3, 0.05, 4)).unwrap();
    let t = &inst.template;
    for (name, [first, last]) in &inst.expected.row_groups {
        let slots: Vec<usize> = name
            .trim_start_matches("g(")
            .trim_end_matches(')')
            .split(',')
            .map(|s| s.parse::<usize>().unwrap() - 1)
            .collect();
        for r in first - 1..*last {
            for c in 0..inst.jacobian.cols() {
                let v = inst.jacobian.get(r, c).abs();
                if slots.contains(&(c / t.slot_dim)) {
                    assert!((0.5..=2.0).contains(&v), "row {r} col {c}: {v}");
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }
}

#[test]
fn generation_is_reproducible() {
    let a = gen_overlap_jacobian(&template(3, 0.2, 9)).unwrap();
    let b = gen_overlap_jacobian(&template(3, 0.2, 9)).unwrap();
    let c = gen_overlap_jacobian(&template(3, 0.2, 10)).unwrap();
    assert_eq!(a.jacobian.digest(), b.jacobian.digest());
    assert_eq!(a, b);
    assert_ne!(a.jacobian.digest(), c.jacobian.digest());
}

#[test]
fn invalid_templates_are_rejected() {
    assert!(gen_overlap_jacobian(&template(1, 0.0, 0)).is_err());
    assert!(gen_overlap_jacobian(&template(2, 1.0, 0)).is_err());
    // 0.6 / 0.4 · 20 = 30 shared rows > 20
    assert!(gen_overlap_jacobian(&template(2, 0.6, 0)).is_err());
    let mut t = template(2, 0.0, 0);
    t.slot_out = 2;
    assert!(gen_overlap_jacobian(&t).is_err());
}

#[test]
fn sidecar_records_ground_truth() {
    let inst = gen_overlap_jacobian(&template(2, 0.2, 5)).unwrap();
    let side = inst.sidecar();
    assert_eq!(side["blocks"]["dims"], serde_json::json!([3, 3]));
    assert_eq!(side["expected"]["typeD"], serde_json::json!(false));
    assert_eq!(side["template"]["overlapRatio"], serde_json::json!(0.2));
    let back: OverlapTemplate = serde_json::from_value(side["template"].clone()).unwrap();
    assert_eq!(back, inst.template);
}

#[test]
fn disjoint_instances_decompose_into_planted_blocks() {
    for seed in 0..10 {
        let inst = gen_overlap_jacobian(&template(3, 0.0, seed)).unwrap();
        let dec = decompose(&inst.jacobian, &tol()).unwrap();
        assert_eq!(dec.blocks, inst.blocks);
        assert!(dec.contiguous);
        assert!(dec.irreducible.iter().all(|c| c.holds));
        for b in 1..=3 {
            assert!(check_type_d_irreducible(&inst.jacobian, &inst.blocks, b, &tol()).unwrap().holds);
        }
    }
}

#[test]
fn one_dimensional_block_diagonal_mixing_is_diagonal() {
    let blocks = BlockSpec::new(vec![1, 1]).unwrap();
    let mix = random_mixing(&blocks, MixingKind::BlockDiagonal, 3).unwrap();
    assert_eq!(mix.matrix.get(0, 1), 0.0);
    assert_eq!(mix.matrix.get(1, 0), 0.0);
    assert!(mix.matrix.get(0, 0) != 0.0 && mix.matrix.get(1, 1) != 0.0);
    assert_eq!(mix.sigma, Some(vec![1, 2]));
}

#[test]
fn permuted_mixing_round_trips_through_assignment() {
    let blocks = BlockSpec::new(vec![2, 2]).unwrap();
    let mix = random_mixing(&blocks, MixingKind::BlockPermuted, 7).unwrap();
    assert_eq!(mix, random_mixing(&blocks, MixingKind::BlockPermuted, 7).unwrap());
    assert_eq!(mix.sigma, Some(vec![2, 1]));
    let cert = extract_assignment(&mix.matrix, &blocks, &mix.target_blocks, &tol()).unwrap();
    assert!(cert.holds);
    assert_eq!(cert.witness, Witness::Assignment { sigma: vec![2, 1] });
}

#[test]
fn full_mixing_has_no_assignment() {
    let blocks = BlockSpec::new(vec![2, 2]).unwrap();
    let mix = random_mixing(&blocks, MixingKind::Full, 11).unwrap();
    assert_eq!(mix.sigma, None);
    let cert = extract_assignment(&mix.matrix, &blocks, &blocks, &tol()).unwrap();
    assert!(!cert.holds);
    assert!(matches!(cert.witness, Witness::BlockRow { .. }));
}

#[test]
fn mixings_are_well_conditioned() {
    let blocks = BlockSpec::new(vec![3, 1, 2]).unwrap();
    for kind in [MixingKind::BlockDiagonal, MixingKind::Full, MixingKind::BlockPermuted] {
        for seed in 0..20 {
            let mix = random_mixing(&blocks, kind, seed).unwrap();
            assert!(crate::numeric::cond1(&mix.matrix).unwrap() <= 1e6);
        }
    }
}

#[test]
fn permuted_mixing_keeps_planted_components() {
    let inst = gen_overlap_jacobian(&template(3, 0.0, 21)).unwrap();
    let mix = random_mixing(&inst.blocks, MixingKind::BlockPermuted, 21).unwrap();
    let mixed = inst.jacobian.matmul(&mix.matrix).unwrap();
    let dec = decompose(&mixed, &tol()).unwrap();
    assert_eq!(dec.blocks, mix.target_blocks);
    assert_eq!(dec.components.len(), 3);
    let sigma = mix.sigma.clone().unwrap();
    let cert = extract_assignment(&mix.matrix, &inst.blocks, &mix.target_blocks, &tol()).unwrap();
    assert_eq!(cert.witness, Witness::Assignment { sigma });
}

#[test]
fn fd_jacobian_of_square_and_identity() {
    let f = |s: &[f64]| vec![s[0] * s[0], s[1]];
    let j = fd_jacobian(&f, &[1.0, 2.0], JACOBIAN_STEP).unwrap();
    let want = [2.0, 0.0, 0.0, 1.0];
    for (a, b) in j.entries().iter().zip(want) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn fd_jacobian_recovers_linear_maps() {
    let m = Matrix::from_rows(&[[1.5, -2.0, 0.25], [0.0, 3.0, -1.0]]).unwrap();
    let f = |s: &[f64]| m.apply(s);
    let j = fd_jacobian(&f, &[0.3, -0.7, 2.0], JACOBIAN_STEP).unwrap();
    for (a, b) in j.entries().iter().zip(m.entries()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn fd_jacobian_of_a_product() {
    let f = |s: &[f64]| vec![s[0] * s[1]];
    let j = fd_jacobian(&f, &[2.0, 3.0], JACOBIAN_STEP).unwrap();
    assert!((j.get(0, 0) - 3.0).abs() < 1e-8);
    assert!((j.get(0, 1) - 2.0).abs() < 1e-8);
}

#[test]
fn fd_hessian_cross_entries() {
    let additive = |s: &[f64]| vec![s[0].sin() + s[1].powi(3)];
    let h = fd_hessian(&additive, &[0.4, -1.1], HESSIAN_STEP).unwrap();
    assert!(h.get(0, &[0, 1]).abs() < 1e-4);
    assert!((h.get(0, &[0, 0]) + 0.4f64.sin()).abs() < 1e-5);
    let product = |s: &[f64]| vec![s[0] * s[1]];
    let h = fd_hessian(&product, &[2.0, 3.0], HESSIAN_STEP).unwrap();
    assert!((h.get(0, &[0, 1]) - 1.0).abs() < 1e-6);
    assert_eq!(h.get(0, &[0, 1]), h.get(0, &[1, 0]));
}

#[test]
fn fd_hessian_of_a_quadratic_is_exact() {
    // f(s) = sᵀ Q s / 2 + c·s with Hessian Q
    let q = [[2.0, -1.0, 0.5], [-1.0, 4.0, 0.0], [0.5, 0.0, -3.0]];
    let f = |s: &[f64]| {
        let quad: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| q[i][j] * s[i] * s[j]).sum();
        vec![quad / 2.0 + s[0] - 2.0 * s[2]]
    };
    let h = fd_hessian(&f, &[0.2, 0.1, -0.3], HESSIAN_STEP).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((h.get(0, &[i, j]) - q[i][j]).abs() < 1e-6);
        }
    }
}

#[test]
fn fd_rejects_bad_input() {
    let nan = |s: &[f64]| vec![if s[0] > 0.0 { f64::NAN } else { 0.0 }];
    assert!(matches!(fd_jacobian(&nan, &[0.0], JACOBIAN_STEP), Err(crate::Error::Eval(_))));
    assert!(matches!(fd_hessian(&nan, &[0.0], HESSIAN_STEP), Err(crate::Error::Eval(_))));
    let id = |s: &[f64]| s.to_vec();
    assert!(fd_jacobian(&id, &[1.0], 0.0).is_err());
    assert!(fd_jacobian(&id, &[], JACOBIAN_STEP).is_err());
}

#[test]
fn fd_error_shrinks_quadratically() {
    let f = |s: &[f64]| vec![s[0].exp() * s[1].sin(), (s[0] * s[1]).cos()];
    let exact = |s: &[f64]| {
        [
            s[0].exp() * s[1].sin(),
            s[0].exp() * s[1].cos(),
            -s[1] * (s[0] * s[1]).sin(),
            -s[0] * (s[0] * s[1]).sin(),
        ]
    };
    let x = [0.3, 0.8];
    let err = |h: f64| {
        let j = fd_jacobian(&f, &x, h).unwrap();
        j.entries().iter().zip(exact(&x)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    for h in [1e-1, 5e-2, 2e-2] {
        assert!(err(h / 2.0) <= 0.3 * err(h), "step {h}");
    }
}

#[test]
fn slot_generators_match_their_closed_forms() {
    let blocks = BlockSpec::new(vec![2, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (seed, coupled) in [(1, false), (2, true)] {
        let g = if coupled {
            SlotGenerator::with_interaction(&blocks, seed).unwrap()
        } else {
            SlotGenerator::additive(&blocks, seed).unwrap()
        };
        assert_eq!(g.out_dim(), 2 * 5 + 1);
        let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (j, fj) = (g.jacobian(&x), fd_jacobian(&g, &x, JACOBIAN_STEP).unwrap());
        for (a, b) in j.entries().iter().zip(fj.entries()) {
            assert!((a - b).abs() < 1e-7);
        }
        let (h, fh) = (g.hessian(&x), fd_hessian(&g, &x, HESSIAN_STEP).unwrap());
        for (a, b) in h.entries().iter().zip(fh.entries()) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}

#[test]
fn coupling_decides_type_h() {
    let blocks = BlockSpec::new(vec![2, 2]).unwrap();
    let x = [0.1, -0.2, 0.3, 0.4];
    let fd_tol = Tolerance::absolute(1e-4).unwrap();
    let additive = SlotGenerator::additive(&blocks, 8).unwrap();
    let h = fd_hessian(&additive, &x, HESSIAN_STEP).unwrap();
    assert!(check_type_h(&h, &blocks, 2, &fd_tol).unwrap().holds);
    let coupled = SlotGenerator::with_interaction(&blocks, 8).unwrap();
    let h = fd_hessian(&coupled, &x, HESSIAN_STEP).unwrap();
    assert!(!check_type_h(&h, &blocks, 2, &fd_tol).unwrap().holds);
}

#[test]
fn template_generator_shares_the_template_support() {
    let t = OverlapTemplate {
        k: 3,
        slot_dim: 2,
        slot_out: 4,
        overlap_ratio: 0.2,
        seed: 6,
    };
    let inst = gen_overlap_jacobian(&t).unwrap();
    let g = SlotGenerator::from_template(&t).unwrap();
    let j = g.jacobian(&[0.0; 6]);
    assert_eq!(j.column_supports(&tol()), inst.jacobian.column_supports(&tol()));
}

proptest! {
    #[test]
    fn expected_verdicts_match_checkers(k in 2usize..4, ratio in prop::sample::select(vec![0.0, 0.05, 0.2, 0.5]), seed in any::<u64>()) {
        let inst = gen_overlap_jacobian(&template(k, ratio, seed)).unwrap();
        let d = check_type_d(&inst.jacobian, &inst.blocks, &tol()).unwrap();
        prop_assert_eq!(d.holds, inst.expected.type_d);
        let m = check_type_m(&inst.jacobian, &inst.blocks, &tol()).unwrap();
        prop_assert_eq!(m.holds, inst.expected.type_m);
        let g = build_graph(&inst.jacobian, GraphKind::D, &tol()).unwrap();
        prop_assert_eq!(components(&g).len(), inst.expected.components);
        prop_assert_eq!(block_adjacency(&inst.jacobian, &inst.blocks), inst.expected.block_adjacency.clone());
    }

    #[test]
    fn block_mixings_preserve_assignment(dims in prop::collection::vec(1usize..4, 1..4), seed in any::<u64>()) {
        let blocks = BlockSpec::new(dims).unwrap();
        for kind in [MixingKind::BlockDiagonal, MixingKind::BlockPermuted] {
            let mix = random_mixing(&blocks, kind, seed).unwrap();
            let cert = extract_assignment(&mix.matrix, &blocks, &mix.target_blocks, &tol()).unwrap();
            prop_assert!(cert.holds);
            prop_assert_eq!(cert.witness, Witness::Assignment { sigma: mix.sigma.clone().unwrap() });
            if kind == MixingKind::BlockPermuted && blocks.len() > 1 {
                let sigma = mix.sigma.unwrap();
                prop_assert!(sigma.iter().enumerate().any(|(i, &s)| s != i + 1));
            }
        }
    }
}
