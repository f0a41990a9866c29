use guillotine::eigen::{build_hv_eigenstructure, build_oblique_eigenstructure, pf_eigen, verify_halfstrip_eigen};
use guillotine::gibbs::{check_consistency, correlation_kernel, marginal_segment_law, BoundaryFamily};
use guillotine::lattice::{partition_tensor, partition_tensor_bruteforce};
use guillotine::math::{max_rel_diff, rel_diff, tv_distance};
use guillotine::rope::{RopeParts, Side};
use guillotine::tensor::{surface_power_with_order, CutOrder};
use guillotine::{Dihedral, FaceWeight, GuillotineTensor, Limits, Matrix, Offsets, RopeRep, Shape, StateSpaces};
use proptest::prelude::*;

fn spaces(s1: usize, s2: usize) -> StateSpaces {
    StateSpaces::new(s1, s2).unwrap()
}

fn tensor(sp: StateSpaces, shape: Shape, vals: &[f64]) -> GuillotineTensor {
    let n = GuillotineTensor::len_for(sp, shape) as usize;
    GuillotineTensor::from_data(sp, shape, vals.iter().cycle().take(n).copied().collect()).unwrap()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, 64)
}

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0.1f64..2.0, n * n).prop_map(move |v| Matrix::from_vec(n, n, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn horizontal_associativity(v in weights(), p1 in 1usize..3, p2 in 1usize..2, q in 1usize..3) {
        let sp = spaces(2, 2);
        let a = tensor(sp, Shape::new(p1, q), &v);
        let b = tensor(sp, Shape::new(p2, q), &v[7..]);
        let c = tensor(sp, Shape::new(1, q), &v[13..]);
        let lhs = a.m_we(&b.m_we(&c).unwrap()).unwrap();
        let rhs = a.m_we(&b).unwrap().m_we(&c).unwrap();
        prop_assert!(max_rel_diff(lhs.data(), rhs.data()) <= 1e-12);
    }

    #[test]
    fn vertical_associativity(v in weights(), p in 1usize..3, q1 in 1usize..3) {
        let sp = spaces(2, 2);
        let a = tensor(sp, Shape::new(p, q1), &v);
        let b = tensor(sp, Shape::new(p, 1), &v[3..]);
        let c = tensor(sp, Shape::new(p, 1), &v[11..]);
        let lhs = a.m_sn(&b.m_sn(&c).unwrap()).unwrap();
        let rhs = a.m_sn(&b).unwrap().m_sn(&c).unwrap();
        prop_assert!(max_rel_diff(lhs.data(), rhs.data()) <= 1e-12);
    }

    #[test]
    fn interchange(v in weights(), s1 in 1usize..4, s2 in 1usize..4) {
        let sp = spaces(s1, s2);
        let [a, b, c, d] = [0, 5, 9, 17].map(|o| tensor(sp, Shape::new(1, 1), &v[o..]));
        let lhs = a.m_sn(&b).unwrap().m_we(&c.m_sn(&d).unwrap()).unwrap();
        let rhs = a.m_we(&c).unwrap().m_sn(&b.m_we(&d).unwrap()).unwrap();
        prop_assert!(max_rel_diff(lhs.data(), rhs.data()) <= 1e-12);
    }

    #[test]
    fn cut_order_is_irrelevant(v in weights(), p in 1usize..4, q in 1usize..4) {
        let w = tensor(spaces(2, 2), Shape::new(1, 1), &v);
        let l = Limits::default();
        let a = surface_power_with_order(&w, p, q, &l, CutOrder::RowsFirst).unwrap();
        let b = surface_power_with_order(&w, p, q, &l, CutOrder::ColumnsFirst).unwrap();
        prop_assert!(max_rel_diff(a.data(), b.data()) <= 1e-12);
    }

    #[test]
    fn pairing_is_bilinear(v in weights(), alpha in -3.0f64..3.0) {
        let sp = spaces(2, 2);
        let shape = Shape::new(2, 1);
        let (g, h, z) = (tensor(sp, shape, &v), tensor(sp, shape, &v[5..]), tensor(sp, shape, &v[21..]));
        let lhs = g.axpy(alpha, &h).unwrap().pair_boundary(&z).unwrap();
        let rhs = g.pair_boundary(&z).unwrap() + alpha * h.pair_boundary(&z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn dihedral_ops_permute_entries(v in weights(), p in 0usize..3, q in 0usize..3) {
        let t = tensor(spaces(2, 2), Shape::new(p, q), &v);
        let mut before = t.data().to_vec();
        before.sort_by(f64::total_cmp);
        for op in [Dihedral::FlipH, Dihedral::FlipV, Dihedral::TransposeDiag] {
            let mut after = t.dihedral(op).unwrap().into_data();
            after.sort_by(f64::total_cmp);
            prop_assert_eq!(&after, &before);
        }
        let h = |x: &GuillotineTensor| x.dihedral(Dihedral::FlipH).unwrap();
        let tr = |x: &GuillotineTensor| x.dihedral(Dihedral::TransposeDiag).unwrap();
        prop_assert_eq!(tr(&h(&tr(&t))), t.dihedral(Dihedral::FlipV).unwrap());
    }

    #[test]
    fn operadic_partition_equals_bruteforce(v in weights(), p in 1usize..3, q in 1usize..3) {
        let w = FaceWeight::from_data(spaces(2, 2), v[..16].to_vec()).unwrap();
        let l = Limits::default();
        let a = partition_tensor(&w, p, q, &l).unwrap();
        let b = partition_tensor_bruteforce(&w, p, q, &l).unwrap();
        prop_assert!(max_rel_diff(a.data(), b.data()) <= 1e-10);
    }

    #[test]
    fn pf_scale_covariance(a in matrix(3), c in 0.01f64..100.0) {
        let pf = pf_eigen(&a).unwrap();
        let ps = pf_eigen(&a.scale(c)).unwrap();
        prop_assert!(rel_diff(ps.lambda, c * pf.lambda) <= 1e-12);
        prop_assert!(max_rel_diff(&ps.v_right, &pf.v_right) <= 1e-10);
        prop_assert!(max_rel_diff(&ps.v_left, &pf.v_left) <= 1e-10);
    }

    #[test]
    fn hv_geometric_sequence(a in matrix(2), b in matrix(2)) {
        let m = build_hv_eigenstructure(&a, &b).unwrap();
        let phi = m.es.halfstrip(Side::S).unwrap();
        let rep = verify_halfstrip_eigen(&m.weight, Side::S, m.es.rep.side(Side::S), phi, m.es.lambda, 2).unwrap();
        prop_assert!(rep.per_length[1] <= 10.0 * rep.per_length[0].max(1e-15));
        prop_assert!(rep.max() <= 1e-10);
    }

    #[test]
    fn oblique_family_consistent_on_columns(c in matrix(2), d in matrix(2)) {
        let m = build_oblique_eigenstructure(&c, &d).unwrap();
        let fam = BoundaryFamily::Eigen(m.es.clone());
        let tv = check_consistency(&m.weight, &fam, Shape::new(3, 2), Offsets::new(0, 1, 0, 0), &Limits::default()).unwrap();
        prop_assert!(tv <= 1e-10);
    }

    #[test]
    fn segment_law_nesting(c in matrix(2), d in matrix(2), len in 2usize..6) {
        let m = build_oblique_eigenstructure(&c, &d).unwrap();
        let k = correlation_kernel(&m.es);
        let l = Limits::default();
        let long = marginal_segment_law(&k, 2, len, &l).unwrap();
        let short = marginal_segment_law(&k, 2, len - 1, &l).unwrap();
        let folded: Vec<f64> = long.chunks(2).map(|ch| ch[0] + ch[1]).collect();
        prop_assert!(tv_distance(&folded, &short) <= 1e-10);
    }

    #[test]
    fn restrict_nesting(v in weights(), u in prop::collection::vec(0.1f64..1.0, 8)) {
        let sp = spaces(2, 2);
        let w = FaceWeight::from_data(sp, v[..16].to_vec()).unwrap();
        let rep = RopeRep::from_factorized(sp, &u[0..2], &u[2..4], &u[4..6], &u[6..8]).unwrap();
        let l = Limits::default();
        let one = rep.restrict(&w, Offsets::new(0, 2, 0, 0), &l).unwrap().eval_tensor(1, 1, &l).unwrap();
        let two = rep
            .restrict(&w, Offsets::new(0, 1, 0, 0), &l).unwrap()
            .restrict(&w, Offsets::new(0, 1, 0, 0), &l).unwrap()
            .eval_tensor(1, 1, &l).unwrap();
        prop_assert!(max_rel_diff(one.data(), two.data()) <= 1e-9);
    }

    #[test]
    fn rope_eval_is_multilinear_in_side_operators(v in prop::collection::vec(0.1f64..1.0, 40), t in -2.0f64..2.0) {
        let sp = spaces(2, 1);
        let m = |o: usize| Matrix::from_vec(2, 2, v[o..o + 4].to_vec()).unwrap();
        let base = RopeParts {
            a_s: vec![m(0), m(4)],
            a_n: vec![m(8), m(12)],
            a_w: vec![m(16)],
            a_e: vec![m(20)],
            u_ws: m(24),
            u_se: m(28),
            u_en: m(32),
            u_nw: m(36),
        };
        let l = Limits::default();
        let eval = |parts: RopeParts| RopeRep::new(sp, parts).unwrap().eval_tensor(1, 1, &l).unwrap();
        let mut other = base.clone();
        other.a_e = vec![m(2)];
        let mut mixed = base.clone();
        mixed.a_e = vec![m(20).add(&m(2).scale(t))];
        let (g0, g1, gm) = (eval(base), eval(other), eval(mixed));
        for i in 0..gm.data().len() {
            let expected = g0.data()[i] + t * g1.data()[i];
            prop_assert!((gm.data()[i] - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn smooth_weight_three_by_two_matches_bruteforce() {
    let sp = spaces(2, 2);
    let w = FaceWeight::from_fn(sp, |x, y, w, z| 0.1 + (x + 2 * y + 3 * w + 5 * z) as f64 * 0.13).unwrap();
    let l = Limits::default();
    let a = partition_tensor(&w, 3, 2, &l).unwrap();
    let b = partition_tensor_bruteforce(&w, 3, 2, &l).unwrap();
    assert!(max_rel_diff(a.data(), b.data()) <= 1e-10);
}
