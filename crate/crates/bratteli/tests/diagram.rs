mod common;

use bratteli::arith::CfStream;
use bratteli::constructions::{odo2, odometer, stationary_sorted, sturmian, toeplitz_info};
use bratteli::diagram::{BratteliDiagram, DiagramFile, IntMatrix, OrderedLevel};
use common::{all_paths, corpus, h3_violation, sorted_tower};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn odometer_matrices_and_heights() {
    let d = odo2(6);
    assert_eq!(d.incidence_matrix(2).unwrap(), IntMatrix::from_rows(&[vec![2]]));
    assert_eq!(d.heights_slice(3).unwrap(), &ints(&[4])[..]);
    assert_eq!(d.product_matrix(1, 4).unwrap(), IntMatrix::from_rows(&[vec![8]]));
    assert_eq!(d.product_matrix(3, 3).unwrap(), IntMatrix::identity(1));
    assert!(d.incidence_matrix(1).is_err());
    assert!(d.incidence_matrix(7).is_err());
}

#[test]
fn sturmian_matrices() {
    let d = sturmian(&CfStream::new(vec![2], vec![1]).unwrap(), 5, false).unwrap();
    assert_eq!(d.incidence_matrix(2).unwrap(), IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]));
    let g = sturmian(&CfStream::golden(), 8, false).unwrap();
    assert_eq!(g.incidence_matrix(2).unwrap(), IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]));
    for n in 3..=8 {
        assert_eq!(g.incidence_matrix(n).unwrap(), IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]));
    }
    assert_eq!(g.heights_slice(2).unwrap(), &ints(&[2, 1])[..]);
    assert_eq!(g.heights_slice(5).unwrap(), &ints(&[8, 5])[..]);
    // h_n = (q_{n-1} + q_{n-2}, q_{n-1})
    let q = CfStream::golden().convergents(10).unwrap();
    for n in 2..=8 {
        let h = g.heights_slice(n).unwrap();
        assert_eq!(h[0], &q[n - 1].1 + &q[n - 2].1);
        assert_eq!(h[1], q[n - 1].1);
    }
}

#[test]
fn sturmian_product_matches_path_count() {
    let g = sturmian(&CfStream::golden(), 4, false).unwrap();
    let p = g.product_matrix(1, 4).unwrap();
    for u in 0..2 {
        for v in 0..2 {
            let count = all_paths(&g, 4)
                .into_iter()
                .filter(|x| x[0].0 == u && x[3].0 == v)
                .count();
            assert_eq!(p.get(u, v), &BigInt::from(count));
        }
    }
}

#[test]
fn telescoped_odometer_is_base_four() {
    let d = odo2(4);
    let t = d.telescope(&[0, 2, 4]).unwrap();
    assert_eq!(t.hat(), &ints(&[2])[..]);
    assert_eq!(t.incidence_matrix(2).unwrap(), IntMatrix::from_rows(&[vec![4]]));
    assert_eq!(t.level(2).unwrap().order(0), &[0, 0, 0, 0]);
    assert_eq!(t.heights_slice(2).unwrap(), d.heights_slice(4).unwrap());
}

#[test]
fn telescoped_golden_products() {
    let g = sturmian(&CfStream::golden(), 5, false).unwrap();
    let t = g.telescope(&[0, 1, 3, 5]).unwrap();
    assert_eq!(t.incidence_matrix(2).unwrap(), g.product_matrix(1, 3).unwrap());
    assert_eq!(t.incidence_matrix(3).unwrap(), g.product_matrix(3, 5).unwrap());
    assert_eq!(t.heights_slice(3).unwrap(), g.heights_slice(5).unwrap());
}

#[test]
fn telescope_order_matches_brute_force() {
    for (name, d) in corpus() {
        let depth = d.depth();
        for m in 1..depth {
            for n in m + 1..=(m + 3).min(depth) {
                for v in 0..d.vertex_count(n) {
                    let induced = d.induced_sources(m, n, v).unwrap();
                    // distinct segments from level m, sorted by the last-difference rule
                    let mut segs: Vec<Vec<(usize, usize)>> = all_paths(&d, n)
                        .into_iter()
                        .filter(|p| p[n - 1].0 == v)
                        .map(|p| p[m - 1..n].to_vec())
                        .map(|mut s| {
                            s[0].1 = 0;
                            s
                        })
                        .collect();
                    segs.sort();
                    segs.dedup();
                    segs.sort_by(|a, b| common::cmp_paths(&a[1..], &b[1..]));
                    let brute: Vec<usize> = segs.iter().map(|s| s[0].0).collect();
                    assert_eq!(induced, brute, "{name} m={m} n={n} v={v}");
                }
            }
        }
        if depth >= 4 {
            let t = d.telescope(&[0, 1, 3, depth]).unwrap();
            for v in 0..d.vertex_count(depth) {
                assert_eq!(
                    sorted_tower(&t, 3, v).len(),
                    sorted_tower(&d, depth, v).len(),
                    "{name}"
                );
            }
        }
    }
}

#[test]
fn telescope_rejects_bad_cuts() {
    let d = odo2(5);
    assert!(d.telescope(&[1, 3]).is_err());
    assert!(d.telescope(&[0, 3, 3]).is_err());
    assert!(d.telescope(&[0, 2, 9]).is_err());
}

#[test]
fn properness_examples() {
    let r = odo2(6).check_properness();
    assert!(r.h1_ok && r.simple_ok && r.max_source_ok && r.unique_max && r.unique_min);
    let g = sturmian(&CfStream::golden(), 10, false).unwrap().check_properness();
    assert!(g.unique_max && g.unique_min);
    assert_eq!(g.max_witness_gap, Some(2));
    assert!(!g.simple_ok);
    assert!(g.non_simple_levels.contains(&3));
    let s = sturmian(&CfStream::golden(), 10, true).unwrap();
    assert!(s.check_properness().simple_ok);
    // maximal edges share a source once levels are paired
    let paired = sturmian(&CfStream::golden(), 9, false).unwrap().telescope(&[0, 1, 3, 5, 7, 9]).unwrap();
    assert!(paired.check_properness().max_source_ok);
    let bad = h3_violation().check_properness();
    assert!(!bad.max_source_ok);
    assert_eq!(bad.max_source_failures, vec![2, 3]);
    assert!(!bad.unique_max);
}

#[test]
fn sturmian_level_two_positive_when_a1_is_two() {
    let d = sturmian(&CfStream::new(vec![2], vec![1]).unwrap(), 3, false).unwrap();
    assert!(!d.check_properness().non_simple_levels.contains(&2));
}

#[test]
fn validation_errors() {
    assert!(OrderedLevel::new(2, vec![vec![0], vec![]]).is_err());
    assert!(OrderedLevel::new(2, vec![vec![0], vec![0]]).is_err());
    assert!(OrderedLevel::new(1, vec![vec![1]]).is_err());
    let l = OrderedLevel::new(2, vec![vec![0, 1]]).unwrap();
    assert!(BratteliDiagram::with_unit_hat(3, vec![l], None).is_err());
    assert!(odometer(&[1], true, 3).is_err());
    assert!(sturmian(&"0,1".parse().unwrap_or_else(|_| CfStream::golden()), 3, false).is_ok());
}

#[test]
fn file_round_trip() {
    for (name, d) in corpus() {
        let text = DiagramFile::render(&d);
        let back = DiagramFile::parse(&text).unwrap();
        assert_eq!(back, d, "{name}");
    }
    let g = sturmian(&CfStream::golden(), 4, false).unwrap();
    let back = DiagramFile::parse(&DiagramFile::render(&g)).unwrap();
    assert_eq!(back.deepen(9).unwrap(), g.deepen(9).unwrap());
}

#[test]
fn file_errors_carry_location() {
    let e = DiagramFile::parse("{\"hat\":[1],\n \"levels\":[{\"0\":[0,0]}], \"extra\":1}").unwrap_err();
    assert!(e.to_string().contains("line 2"), "{e}");
    let e = DiagramFile::parse("{\"hat\":[1],\"levels\":[{\"0\":[0,3]}]}").unwrap_err();
    assert!(e.to_string().contains("level 2"), "{e}");
    let e = DiagramFile::parse("{\"hat\":[\"x\"],\"levels\":[]}").unwrap_err();
    assert!(e.to_string().contains("hat[0]"), "{e}");
}

#[test]
fn toeplitz_heights_are_level_constant() {
    let d = common::toeplitz3();
    let info = toeplitz_info(&d).unwrap();
    assert_eq!(info.q, vec![1, 3, 3, 3, 3]);
    for n in 1..=d.depth() {
        let m = d.incidence_matrix(n.max(2)).unwrap();
        for v in 0..2 {
            let col: BigInt = (0..2).map(|u| m.get(u, v).clone()).sum();
            assert_eq!(col, BigInt::from(3));
        }
        for h in d.heights_slice(n).unwrap() {
            assert_eq!(h, &info.p(n));
        }
    }
    let odo = toeplitz_info(&odo2(4)).unwrap();
    assert_eq!(odo.p(3), BigInt::from(4));
    let uneven = stationary_sorted(&[vec![2, 1], vec![1, 1]], 3).unwrap();
    let e = toeplitz_info(&uneven).unwrap_err();
    assert!(e.to_string().contains("vertex 2"), "{e}");
}

#[test]
fn stationary_levels_share_suffixes() {
    let d = common::custom_stationary();
    let first: Vec<_> = (0..3).map(|v| d.level(2).unwrap().suffixes(v)).collect();
    for n in 3..=d.depth() {
        let here: Vec<_> = (0..3).map(|v| d.level(n).unwrap().suffixes(v)).collect();
        assert_eq!(here, first);
    }
    assert!(d.linearly_recurrent());
}

proptest! {
    #[test]
    fn products_compose(idx in 0usize..14, a in 1usize..6, b in 1usize..6, c in 1usize..6) {
        let all = corpus();
        let d = &all[idx % all.len()].1;
        let mut v = [a.min(d.depth()), b.min(d.depth()), c.min(d.depth())];
        v.sort();
        let [l, m, n] = v;
        let lhs = d.product_matrix(l, n).unwrap();
        let rhs = d.product_matrix(l, m).unwrap().mul(&d.product_matrix(m, n).unwrap());
        prop_assert_eq!(lhs, rhs);
        let h = d.product_matrix(m, n).unwrap().left_mul(d.heights_slice(m).unwrap());
        prop_assert_eq!(&h[..], d.heights_slice(n).unwrap());
    }

    #[test]
    fn generators_deterministic(a in proptest::collection::vec(1u64..4, 1..4), k in 2usize..8, extra in 1usize..5) {
        let cf = CfStream::periodic(a).unwrap();
        let d = sturmian(&cf, k, false).unwrap();
        prop_assert_eq!(d.deepen(k + extra).unwrap().truncate(k), d.clone());
        prop_assert_eq!(sturmian(&cf, k + extra, false).unwrap().truncate(k), d);
    }
}
