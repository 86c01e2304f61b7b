mod common;

use bratteli::arith::{rat, AngleSpec, CfStream, Rat};
use bratteli::constructions::{odo2, stationary_sorted, sturmian};
use bratteli::diagram::BratteliDiagram;
use bratteli::measure::{clean_report, invariant_measures};
use bratteli::spectral::{rational_shortcut, test_continuous, Thresholds};
use bratteli::transform::*;
use bratteli::Error;
use common::corpus;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const BITS: u32 = 128;

fn same_combinatorics(a: &BratteliDiagram, b: &BratteliDiagram) {
    assert_eq!(a.depth(), b.depth());
    assert_eq!(a.hat(), b.hat());
    for n in 2..=a.depth() {
        assert_eq!(a.incidence_matrix(n).unwrap(), b.incidence_matrix(n).unwrap(), "level {n}");
    }
    for n in 1..=a.depth() {
        assert_eq!(a.heights_slice(n).unwrap(), b.heights_slice(n).unwrap());
    }
}

#[test]
fn empty_edit_list_is_identity() {
    let d = stationary_sorted(&[vec![2, 1], vec![1, 1]], 5).unwrap();
    let m = order_modification(&d, &[]).unwrap();
    assert_eq!(m.diagram.levels(), d.levels());
    assert!(m.omega.iter().all(|&w| w == 0));
}

#[test]
fn adjacent_swap_counts_two() {
    let d = stationary_sorted(&[vec![2, 1], vec![1, 1]], 5).unwrap();
    let old = d.level(3).unwrap().order(0).to_vec();
    let i = (0..old.len() - 1).find(|&i| old[i] != old[i + 1]).unwrap();
    let mut new = old.clone();
    new.swap(i, i + 1);
    let edit = OrderEdit {
        level: 3,
        vertex: 0,
        order: new,
    };
    assert_eq!(edit.omega(&old), 2);
    let m = order_modification(&d, &[edit]).unwrap();
    assert_eq!(m.omega, vec![0, 2, 0, 0]);
    same_combinatorics(&d, &m.diagram);
}

#[test]
fn multiset_violation_rejected() {
    let d = stationary_sorted(&[vec![2, 1], vec![1, 1]], 4).unwrap();
    let mut order = d.level(2).unwrap().order(1).to_vec();
    order[0] = 1 - order[0];
    let e = order_modification(&d, &[OrderEdit { level: 2, vertex: 1, order }]);
    assert!(matches!(e, Err(Error::Invalid(_))));
    let e = order_modification(&d, &[OrderEdit { level: 9, vertex: 0, order: vec![0] }]);
    assert!(matches!(e, Err(Error::LevelRange { .. })));
}

#[test]
fn edit_file_round_trip() {
    let text = r#"{"edits": [{"level": 3, "vertex": 0, "order": [1, 0, 0]}]}"#;
    let edits = EditFile::parse(text).unwrap();
    assert_eq!(edits[0].order, vec![1, 0, 0]);
    assert!(EditFile::parse(r#"{"edits": [], "extra": 1}"#).is_err());
}

#[test]
fn preservation_examples() {
    let d = odo2(12);
    let zero = vec![0; 11];
    let v = check_preservation(&d, &AngleSpec::golden(), &zero, 10, &Thresholds::continuous(), BITS).unwrap();
    assert!(v.outcome.is_pass());
    let ones = vec![1; 11];
    let v = check_preservation(&d, &AngleSpec::rational(rat(3, 8)), &ones, 10, &Thresholds::continuous(), BITS).unwrap();
    assert!(v.outcome.is_pass());
    assert!((4..=10).all(|n| v.term(n).unwrap().is_zero()));
    assert!(check_preservation(&d, &AngleSpec::golden(), &ones[..3], 10, &Thresholds::continuous(), BITS).is_err());
}

#[test]
fn preservation_golden_with_growing_omega() {
    let cf = CfStream::golden();
    let d = sturmian(&cf, 22, false).unwrap();
    let q = cf.convergents(24).unwrap();
    // omega_n = q_(n-2), stored from n = 2
    let omega: Vec<usize> = (2..=22).map(|n| q[n.max(2) - 2].1.to_string().parse().unwrap()).collect();
    let v = check_preservation(&d, &AngleSpec::golden(), &omega, 20, &Thresholds::continuous(), BITS).unwrap();
    assert!(!v.outcome.is_pass());
    assert!(v.series.iter().skip(4).all(|t| t.value.hi() > &rat(1, 100)));
}

#[test]
fn odo2_edits_keep_three_eighths() {
    let d = odo2(12);
    let edits: Vec<OrderEdit> = (2..=12)
        .map(|n| OrderEdit {
            level: n,
            vertex: 0,
            order: vec![0, 0],
        })
        .collect();
    let m = order_modification(&d, &edits).unwrap();
    let a = AngleSpec::rational(rat(3, 8));
    let ones = vec![1; 11];
    assert!(check_preservation(&d, &a, &ones, 11, &Thresholds::continuous(), BITS).unwrap().outcome.is_pass());
    let v = test_continuous(&m.diagram, &a, 11, &Thresholds::continuous(), BITS).unwrap();
    assert!(v.outcome.is_pass());
    assert!(m.properness.proper());
}

#[test]
fn spoil_golden_sturmian() {
    let g = AngleSpec::golden();
    let d = sturmian(&CfStream::golden(), 64, false).unwrap();
    let mu = &invariant_measures(&d, 64, &rat(1, 1000)).unwrap()[0];
    let clean = clean_report(mu, None, mu.audited_depth(&rat(1, 1000)).min(40)).unwrap();
    let r = spoil_continuous(&d, mu, &clean, &[g.clone()], &Schedule::default()).unwrap();
    assert_eq!(r.cuts[..2], [0, 1]);
    same_combinatorics(&r.telescoped, &r.diagram);
    assert_eq!(r.witnesses.len(), 3 * 2);
    assert!(r.witnesses.iter().all(|w| w.inside));
    for (i, st) in r.stages.iter().enumerate() {
        assert!(st.mass.hi() <= &st.eps, "stage {}", i + 2);
        let (b, a, c) = st.levels;
        assert!(b < a && a < c);
    }
    // ranks below the reordered block keep their edges, so their suffix vectors agree
    for n in 2..=r.diagram.depth() {
        let (old, new) = (r.telescoped.level(n).unwrap(), r.diagram.level(n).unwrap());
        let st = &r.stages[n - 2];
        let k = d.induced_sources(st.levels.0, st.levels.1, st.d_a).unwrap().len();
        for v in 0..old.target_count() {
            let cut = old.order(v).len() - k;
            assert_eq!(old.order(v)[..cut], new.order(v)[..cut]);
            let mut x = old.order(v)[cut..].to_vec();
            let mut y = new.order(v)[cut..].to_vec();
            x.sort_unstable();
            y.sort_unstable();
            assert_eq!(x, y);
        }
    }
    let v = test_continuous(&r.diagram, &g, 3, &Thresholds::continuous(), BITS).unwrap();
    assert!(v.outcome.is_fail(), "{:?}", v.outcome);
    let before = test_continuous(&r.telescoped, &g, 3, &Thresholds::continuous(), BITS).unwrap();
    assert!(!before.outcome.is_fail());
    for q in [rat(0, 1), rat(1, 2), rat(1, 3)] {
        assert_eq!(rational_shortcut(&r.telescoped, &q), rational_shortcut(&r.diagram, &q));
        let a = test_continuous(&r.telescoped, &AngleSpec::rational(q.clone()), 3, &Thresholds::continuous(), BITS).unwrap();
        let b = test_continuous(&r.diagram, &AngleSpec::rational(q.clone()), 3, &Thresholds::continuous(), BITS).unwrap();
        assert_eq!(a.outcome.is_pass(), b.outcome.is_pass(), "{q}");
    }
    assert!(r.properness.proper());
}

#[test]
fn spoil_reports_depth_needed() {
    let d = sturmian(&CfStream::golden(), 20, false).unwrap().without_generator();
    let mu = &invariant_measures(&d, 20, &rat(1, 1000)).unwrap()[0];
    let clean = clean_report(mu, None, 16).unwrap();
    let e = spoil_continuous(&d, mu, &clean, &[AngleSpec::golden()], &Schedule::default());
    assert!(matches!(e, Err(Error::Depth { .. })), "{e:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn edits_never_change_matrices(seed in 0u64..1000) {
        let mut g = common::rng(seed);
        for (_, d) in corpus() {
            if d.depth() < 2 {
                continue;
            }
            let mut edits = Vec::new();
            let mut expect = vec![0usize; d.depth() - 1];
            for _ in 0..3 {
                let n = g.gen_range(2..=d.depth());
                let level = d.level(n).unwrap();
                let v = g.gen_range(0..level.target_count());
                let old = level.order(v).to_vec();
                let mut new = old.clone();
                new.shuffle(&mut g);
                if edits.iter().any(|e: &OrderEdit| e.level == n && e.vertex == v) {
                    continue;
                }
                expect[n - 2] = expect[n - 2].max(old.iter().zip(&new).filter(|(a, b)| a != b).count());
                edits.push(OrderEdit { level: n, vertex: v, order: new });
            }
            let m = order_modification(&d, &edits).unwrap();
            same_combinatorics(&d, &m.diagram);
            prop_assert_eq!(&m.omega, &expect);
        }
    }

    #[test]
    fn zero_omega_always_passes(p in 0i64..100, q in 1i64..100) {
        let d = odo2(8);
        let v = check_preservation(&d, &AngleSpec::rational(Rat::new(p.into(), q.into())), &[0; 7], 7, &Thresholds::continuous(), 64).unwrap();
        prop_assert!(v.outcome.is_pass());
    }
}
