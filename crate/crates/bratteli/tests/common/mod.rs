#![allow(dead_code)]

use std::cmp::Ordering;

use bratteli::arith::CfStream;
use bratteli::constructions::{odo2, odometer, stationary, stationary_sorted, sturmian, toeplitz_type};
use bratteli::diagram::{BratteliDiagram, IntMatrix, OrderedLevel};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A root path as (vertex, rank) per level 1..=n.
pub type RawPath = Vec<(usize, usize)>;

fn random_diagram(seed: u64) -> BratteliDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let depth = rng.gen_range(4..=6);
        let d1 = rng.gen_range(1..=3);
        let hat: Vec<BigInt> = (0..d1).map(|_| BigInt::from(rng.gen_range(1..=2))).collect();
        let mut levels = Vec::new();
        let mut width = d1;
        for _ in 2..=depth {
            let targets = rng.gen_range(1..=4);
            let mut order: Vec<Vec<usize>> = (0..targets)
                .map(|_| {
                    let k = rng.gen_range(1..=3);
                    (0..k).map(|_| rng.gen_range(0..width)).collect()
                })
                .collect();
            for u in 0..width {
                if !order.iter().any(|l| l.contains(&u)) {
                    let t = rng.gen_range(0..targets);
                    let pos = rng.gen_range(0..=order[t].len());
                    order[t].insert(pos, u);
                }
            }
            levels.push(OrderedLevel::new(width, order).unwrap());
            width = targets;
        }
        let d = BratteliDiagram::new(hat, levels, None).unwrap();
        let top = d.heights_slice(d.depth()).unwrap().iter().max().unwrap().clone();
        if top <= BigInt::from(5000) && top >= BigInt::from(4) {
            return d;
        }
    }
}

/// Two vertices, maximal edges into the targets leave different sources.
pub fn h3_violation() -> BratteliDiagram {
    let level = OrderedLevel::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
    BratteliDiagram::with_unit_hat(2, vec![level.clone(), level], None).unwrap()
}

pub fn custom_stationary() -> BratteliDiagram {
    let m = IntMatrix::from_rows(&[vec![1, 1, 1], vec![1, 2, 1], vec![2, 1, 1]]);
    let order = OrderedLevel::new(3, vec![vec![2, 0, 1, 2], vec![1, 0, 2, 1], vec![1, 0, 2]]).unwrap();
    stationary(&m, &order, 5).unwrap()
}

pub fn toeplitz3() -> BratteliDiagram {
    let level = OrderedLevel::new(2, vec![vec![0, 1, 0], vec![1, 0, 1]]).unwrap();
    toeplitz_type(2, vec![level], 5).unwrap().0
}

/// Small diagrams: at most 4 vertices per level, depth at most 6,
/// towers at most 5000.
pub fn corpus() -> Vec<(String, BratteliDiagram)> {
    let mut out = vec![
        ("odo2".to_string(), odo2(6)),
        ("odometer-2-3".to_string(), odometer(&[2, 3], true, 6).unwrap()),
        ("golden".to_string(), sturmian(&CfStream::golden(), 6, false).unwrap()),
        ("silver".to_string(), sturmian(&CfStream::constant(2).unwrap(), 6, false).unwrap()),
        ("sturmian-1-2-3".to_string(), sturmian(&CfStream::periodic(vec![1, 2, 3]).unwrap(), 6, false).unwrap()),
        ("stationary-2111".to_string(), stationary_sorted(&[vec![2, 1], vec![1, 1]], 6).unwrap()),
        ("stationary-3x3".to_string(), custom_stationary()),
        ("toeplitz-3".to_string(), toeplitz3()),
        ("h3-violation".to_string(), h3_violation().truncate(3)),
    ];
    for seed in 0..5 {
        out.push((format!("random-{seed}"), random_diagram(seed)));
    }
    out
}

/// Diagrams whose matrices are all positive.
pub fn positive_corpus(depth: usize) -> Vec<(String, BratteliDiagram)> {
    vec![
        ("odo2".to_string(), odo2(depth)),
        ("stationary-2111".to_string(), stationary_sorted(&[vec![2, 1], vec![1, 1]], depth).unwrap()),
        ("stationary-1111".to_string(), stationary_sorted(&[vec![1, 1], vec![1, 1]], depth).unwrap()),
        ("stationary-3x3".to_string(), custom_stationary().deepen(depth).unwrap()),
        ("toeplitz-3".to_string(), toeplitz3().deepen(depth).unwrap()),
    ]
}

/// Every root path ending at level `n`, in no particular order.
pub fn all_paths(d: &BratteliDiagram, n: usize) -> Vec<RawPath> {
    let mut paths: Vec<RawPath> = Vec::new();
    for v in 0..d.vertex_count(1) {
        let k: usize = usize::try_from(&d.hat()[v]).unwrap();
        for r in 0..k {
            paths.push(vec![(v, r)]);
        }
    }
    for level in 2..=n {
        let l = d.level(level).unwrap();
        let mut next = Vec::new();
        for p in &paths {
            let u = p.last().unwrap().0;
            for v in 0..l.target_count() {
                for (r, &s) in l.order(v).iter().enumerate() {
                    if s == u {
                        let mut q = p.clone();
                        q.push((v, r));
                        next.push(q);
                    }
                }
            }
        }
        paths = next;
    }
    paths
}

/// Last-difference comparison of two paths with the same endpoint.
pub fn cmp_paths(a: &[(usize, usize)], b: &[(usize, usize)]) -> Ordering {
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return a[i].1.cmp(&b[i].1);
        }
    }
    Ordering::Equal
}

/// Paths into `v` at level `n`, sorted ascending.
pub fn sorted_tower(d: &BratteliDiagram, n: usize, v: usize) -> Vec<RawPath> {
    let mut t: Vec<RawPath> = all_paths(d, n).into_iter().filter(|p| p.last().unwrap().0 == v).collect();
    t.sort_by(|a, b| cmp_paths(a, b));
    t
}

pub fn ranks(p: &RawPath) -> Vec<usize> {
    p.iter().map(|e| e.1).collect()
}

/// Brute-force suffix vector: distinct segments between levels `m` and `n`
/// into the same vertex, strictly greater than the segment of `x`.
pub fn brute_suffix(d: &BratteliDiagram, x: &RawPath, m: usize, n: usize) -> Vec<BigInt> {
    let v = x[n - 1].0;
    let width = d.vertex_count(m);
    let seg = |p: &RawPath| -> RawPath { p[m..n].to_vec() };
    let own = seg(&x[..n].to_vec());
    let mut segs: Vec<(usize, RawPath)> = all_paths(d, n)
        .into_iter()
        .filter(|p| p[n - 1].0 == v)
        .map(|p| (if m == 0 { 0 } else { p[m - 1].0 }, seg(&p)))
        .collect();
    segs.sort();
    segs.dedup();
    let mut out = vec![BigInt::from(0); width];
    for (u, s) in segs {
        if cmp_paths(&s, &own) == Ordering::Greater {
            out[u] += 1;
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
