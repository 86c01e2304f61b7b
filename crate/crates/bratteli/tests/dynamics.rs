mod common;

use std::collections::BTreeSet;

use bratteli::arith::{cis_2pi, rat, AngleSpec, CfStream, ComplexEnclosure, RealEnclosure};
use bratteli::constructions::{odo2, sturmian};
use bratteli::dynamics::{
    entrance_time, enumerate_tower_paths, suffix_set, suffix_vector, transfer_matrix,
    vershik_successor, PathPoint, Tail, TransferTable,
};
use bratteli::Error;
use common::{brute_suffix, corpus, ranks, sorted_tower};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::Rng;

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn odometer_successor_examples() {
    let d = odo2(4);
    // level 1 is the single root edge; the binary digits sit at levels 2 and up
    let x = PathPoint::new(&d, 0, vec![0, 0, 0], Tail::AllMinimal).unwrap();
    let y = vershik_successor(&x, &d).unwrap();
    assert_eq!(y.ranks(), &[0, 1, 0]);
    let top = PathPoint::maximal(&d, 4, 0, Tail::AllMaximal).unwrap();
    let z = vershik_successor(&top, &d).unwrap();
    assert_eq!(z.ranks(), &[0, 0, 0, 0]);
    assert_eq!(z.tail(), &Tail::AllMinimal);
    // four steps from the minimal depth-2 prefix come back to a minimal prefix
    let mut p = PathPoint::minimal(&d, 3, 0, Tail::AllMinimal).unwrap();
    for _ in 0..4 {
        p = vershik_successor(&p, &d).unwrap();
    }
    assert_eq!(p.truncated(&d, 3).ranks(), &[0, 0, 0]);
    assert_eq!(p.ranks()[3], 1);
}

#[test]
fn successor_refuses_at_stored_depth() {
    let d = odo2(3).without_generator();
    let top = PathPoint::maximal(&d, 3, 0, Tail::AllMinimal).unwrap();
    assert_eq!(vershik_successor(&top, &d).unwrap_err(), Error::Unresolved(3));
}

#[test]
fn explicit_tail_is_followed() {
    let d = odo2(5);
    let x = PathPoint::new(&d, 0, vec![0, 1, 1], Tail::Explicit(vec![(0, 1), (0, 0)])).unwrap();
    let y = vershik_successor(&x, &d).unwrap();
    assert_eq!(y.ranks(), &[0, 0, 0, 0, 1]);
}

#[test]
fn entrance_time_examples() {
    let d = odo2(4);
    let top = PathPoint::maximal(&d, 3, 0, Tail::AllMinimal).unwrap();
    assert_eq!(entrance_time(&d, &top, 3).unwrap(), BigInt::zero());
    // three binary digits below level 4
    let bottom = PathPoint::minimal(&d, 4, 0, Tail::AllMinimal).unwrap();
    assert_eq!(entrance_time(&d, &bottom, 4).unwrap(), BigInt::from(7));
    // oracle: successor count to reach the top of the depth-3 tower
    let mut p = bottom.clone();
    let mut steps = 0;
    while p.ranks()[..4] != [0, 1, 1, 1] {
        p = vershik_successor(&p, &d).unwrap();
        steps += 1;
    }
    assert_eq!(steps, 7);
}

#[test]
fn suffix_examples() {
    let d = odo2(4);
    let x = PathPoint::new(&d, 0, vec![0, 0, 1], Tail::AllMinimal).unwrap();
    assert_eq!(suffix_vector(&d, &x, 1, 2).unwrap().entries, big(&[1]));
    let top = PathPoint::maximal(&d, 4, 0, Tail::AllMinimal).unwrap();
    assert!(suffix_vector(&d, &top, 1, 4).unwrap().is_zero());
    assert_eq!(
        suffix_set(&d, 1, 0, 0).unwrap().into_iter().map(|s| s.entries).collect::<Vec<_>>(),
        vec![big(&[1]), big(&[0])]
    );
    let g = sturmian(&CfStream::golden(), 8, false).unwrap();
    let expect: BTreeSet<_> = [big(&[0, 0]), big(&[0, 1]), big(&[1, 0])].into_iter().collect();
    let mut all = BTreeSet::new();
    for n in 2..8 {
        let mut union = BTreeSet::new();
        for u in 0..2 {
            for v in 0..2 {
                let set = suffix_set(&g, n, u, v).unwrap();
                assert_eq!(BigInt::from(set.len()), g.incidence_matrix(n + 1).unwrap().get(u, v).clone());
                union.extend(set.into_iter().map(|s| s.entries));
            }
        }
        // a single level realizes two of the three nonzero patterns
        assert!(union.is_subset(&expect) && union.len() == 2);
        all.extend(union);
    }
    assert_eq!(all, expect);
    assert!(suffix_set(&g, 2, 1, 1).unwrap().is_empty() || g.incidence_matrix(3).unwrap().get(1, 1) != &BigInt::zero());
}

#[test]
fn tower_enumeration() {
    let d = odo2(3);
    let t = enumerate_tower_paths(&d, 3, 0, 100).unwrap();
    let r: Vec<Vec<usize>> = t.iter().map(|p| p.ranks().to_vec()).collect();
    assert_eq!(r, vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 1]]);
    match enumerate_tower_paths(&odo2(12), 12, 0, 1000) {
        Err(Error::Cap { required, cap }) => {
            assert_eq!(required, "2048");
            assert_eq!(cap, 1000);
        }
        other => panic!("expected cap error, got {other:?}"),
    }
}

#[test]
fn corpus_towers_and_entrance_times() {
    for (name, d) in corpus() {
        let n = d.depth();
        for v in 0..d.vertex_count(n) {
            let brute = sorted_tower(&d, n, v);
            let listed = enumerate_tower_paths(&d, n, v, 5000).unwrap();
            assert_eq!(listed.len(), brute.len());
            assert_eq!(BigInt::from(brute.len()), d.heights_slice(n).unwrap()[v]);
            for (i, (p, b)) in listed.iter().zip(&brute).enumerate() {
                assert_eq!(p.ranks(), &ranks(b)[..], "{name}");
                let r = entrance_time(&d, p, n).unwrap();
                assert_eq!(r, BigInt::from(brute.len() - 1 - i), "{name}");
            }
            // iterate the successor through the tower
            let mut p = PathPoint::minimal(&d, n, v, Tail::AllMinimal).unwrap();
            for (i, b) in brute.iter().enumerate() {
                assert_eq!(p.truncated(&d, n).ranks(), &ranks(b)[..], "{name} v={v} i={i}");
                if i + 1 < brute.len() {
                    p = vershik_successor(&p, &d).unwrap();
                }
            }
            let last = listed.last().unwrap();
            assert_eq!(last, &PathPoint::maximal(&d, n, v, Tail::AllMinimal).unwrap());
        }
    }
}

#[test]
fn suffix_identities_on_random_triples() {
    let all = corpus();
    let mut rng = common::rng(7);
    for _ in 0..300 {
        let (name, d) = &all[rng.gen_range(0..all.len())];
        let top = d.depth();
        let v = rng.gen_range(0..d.vertex_count(top));
        let tower = sorted_tower(d, top, v);
        let b = &tower[rng.gen_range(0..tower.len())];
        let x = PathPoint::new(d, v, ranks(b), Tail::AllMinimal).unwrap();
        let m = rng.gen_range(0..top);
        let n = rng.gen_range(m + 1..=top);
        let s = suffix_vector(d, &x, m, n).unwrap();
        assert_eq!(s.entries, brute_suffix(d, b, m, n), "{name} m={m} n={n}");
        if m >= 1 {
            let rn = entrance_time(d, &x, n).unwrap();
            let rm = entrance_time(d, &x, m).unwrap();
            assert_eq!(rn, rm + s.dot(d.heights_slice(m).unwrap()), "{name}");
            let mut tele = BigInt::zero();
            for i in m..n {
                tele += suffix_vector(d, &x, i, i + 1).unwrap().dot(d.heights_slice(i).unwrap());
            }
            assert_eq!(s.dot(d.heights_slice(m).unwrap()), tele);
        }
    }
}

fn brute_transfer(d: &bratteli::diagram::BratteliDiagram, m: usize, n: usize, alpha: &RealEnclosure) -> Vec<Vec<ComplexEnclosure>> {
    let mut f = vec![vec![ComplexEnclosure::zero(); d.vertex_count(n)]; d.vertex_count(m)];
    let hm = d.heights_slice(m).unwrap();
    for v in 0..d.vertex_count(n) {
        let mut segs: Vec<(usize, Vec<(usize, usize)>)> = sorted_tower(d, n, v)
            .into_iter()
            .map(|p| (p[m - 1].0, p[m..n].to_vec()))
            .collect();
        segs.sort();
        segs.dedup();
        for (u, seg) in segs {
            let mut x = vec![(u, 0); m];
            x.extend(seg);
            let s = brute_suffix(d, &x, m, n);
            let dot: BigInt = s.iter().zip(hm).map(|(a, b)| a * b).sum();
            let z = cis_2pi(&alpha.mul_int(&dot), 96);
            f[u][v] = &f[u][v] + &z;
        }
    }
    f
}

#[test]
fn transfer_matches_brute_force() {
    let golden = AngleSpec::golden();
    for (name, d) in corpus() {
        let table = TransferTable::new(&d, &golden, 96).unwrap();
        for m in 1..d.depth() {
            let row = table.row(m, d.depth()).unwrap();
            for (i, f) in row.iter().enumerate() {
                let n = m + 1 + i;
                assert!(f.max_width() < rat(1, 1_000_000_000), "{name}");
                if n - m <= 3 {
                    let b = brute_transfer(&d, m, n, table.alpha());
                    for u in 0..f.rows() {
                        for v in 0..f.cols() {
                            assert!(f.get(u, v).overlaps(&b[u][v]), "{name} m={m} n={n}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn transfer_special_angles() {
    let d = odo2(8);
    let zero = AngleSpec::Rational(rat(0, 1));
    let f = transfer_matrix(&d, 2, 6, &zero, 64).unwrap();
    assert_eq!(f.get(0, 0), &ComplexEnclosure::from_real(RealEnclosure::from_int(16)));
    // alpha = 3/8: for m >= 4 every power is 1
    let a = AngleSpec::Rational(rat(3, 8));
    let f = transfer_matrix(&d, 4, 8, &a, 64).unwrap();
    assert_eq!(f.get(0, 0), &ComplexEnclosure::from_real(RealEnclosure::from_int(16)));
    let g = sturmian(&CfStream::golden(), 7, false).unwrap();
    let f = transfer_matrix(&g, 2, 7, &zero, 64).unwrap();
    let p = g.product_matrix(2, 7).unwrap();
    for u in 0..2 {
        for v in 0..2 {
            let k = p.get(u, v).to_i64().unwrap();
            assert_eq!(f.get(u, v), &ComplexEnclosure::from_real(RealEnclosure::from_int(k)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn transfer_multiplicative(idx in 0usize..14, a in 1usize..6, b in 1usize..6, c in 1usize..6, num in 1i64..97) {
        let all = corpus();
        let d = &all[idx % all.len()].1;
        let mut v = [a.min(d.depth()), b.min(d.depth()), c.min(d.depth())];
        v.sort();
        let [l, m, n] = v;
        prop_assume!(l < m && m < n);
        let alpha = AngleSpec::Rational(rat(num, 97));
        let table = TransferTable::new(d, &alpha, 96).unwrap();
        let lhs = table.get(l, n).unwrap();
        let rhs = table.get(l, m).unwrap().mul(&table.get(m, n).unwrap(), 96);
        for u in 0..lhs.rows() {
            for w in 0..lhs.cols() {
                prop_assert!(lhs.get(u, w).overlaps(rhs.get(u, w)));
                // |F| <= P
                let p = d.product_matrix(l, n).unwrap().get(u, w).to_i64().unwrap();
                prop_assert!(lhs.get(u, w).abs_sq().lo() <= &rat(p * p, 1));
            }
        }
    }
}
