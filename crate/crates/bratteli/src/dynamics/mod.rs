//! Points of the path space, the Vershik map, suffix vectors and entrance
//! times, tower enumeration and twisted transfer matrices.

mod transfer;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::diagram::{BratteliDiagram, Extremal, IntMatrix};
use crate::error::{Error, Result};

pub use transfer::{single_level_transfer, transfer_matrix, transfer_products, TransferTable};

/// Continuation of a point beyond its stored prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    AllMinimal,
    AllMaximal,
    /// Further edges as `(target vertex, rank)`, one per level, then minimal.
    Explicit(Vec<(usize, usize)>),
}

/// Finite prefix `x_1 ... x_k` of an infinite path plus a tail policy.
///
/// `ranks[i]` is the rank of the edge at level `i + 1` among the edges
/// entering its range; the prefix ends at vertex `end` of level `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPoint {
    end: usize,
    ranks: Vec<usize>,
    tail: Tail,
}

impl PathPoint {
    pub fn new(d: &BratteliDiagram, end: usize, ranks: Vec<usize>, tail: Tail) -> Result<Self> {
        let k = ranks.len();
        if k == 0 {
            return Err(Error::Invalid("empty prefix".into()));
        }
        if k > d.depth() {
            return Err(Error::LevelRange {
                level: k,
                depth: d.depth(),
            });
        }
        let p = PathPoint { end, ranks, tail };
        if end >= d.vertex_count(k) {
            return Err(Error::VertexRange { level: k, vertex: end });
        }
        let mut v = end;
        for level in (1..=k).rev() {
            let r = p.ranks[level - 1];
            if r >= d.in_degree(level, v) {
                return Err(Error::Invalid(format!(
                    "rank {r} too large at level {level}, vertex {v}"
                )));
            }
            if level >= 2 {
                v = d.level(level)?.order(v)[r];
            }
        }
        Ok(p)
    }

    /// Minimal path from the root to `v` at level `n`.
    pub fn minimal(d: &BratteliDiagram, n: usize, v: usize, tail: Tail) -> Result<Self> {
        Self::new(d, v, vec![0; n], tail)
    }

    /// Maximal path from the root to `v` at level `n`.
    pub fn maximal(d: &BratteliDiagram, n: usize, v: usize, tail: Tail) -> Result<Self> {
        let mut ranks = vec![0; n];
        let mut w = v;
        for level in (1..=n).rev() {
            let r = d.in_degree(level, w) - 1;
            ranks[level - 1] = r;
            if level >= 2 {
                w = d.level(level)?.order(w)[r];
            }
        }
        Self::new(d, v, ranks, tail)
    }

    pub fn depth(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Vertices `v_1 ... v_k`, indexed from 0.
    pub fn vertices(&self, d: &BratteliDiagram) -> Vec<usize> {
        let k = self.depth();
        let mut out = vec![0; k];
        let mut v = self.end;
        for level in (1..=k).rev() {
            out[level - 1] = v;
            if level >= 2 {
                v = d.level(level).unwrap().order(v)[self.ranks[level - 1]];
            }
        }
        out
    }

    /// `tau_n(x)`, the vertex at level `n`.
    pub fn vertex_at(&self, d: &BratteliDiagram, n: usize) -> usize {
        self.vertices(d)[n - 1]
    }

    /// Prefix truncated to depth `n`.
    pub fn truncated(&self, d: &BratteliDiagram, n: usize) -> PathPoint {
        let v = self.vertex_at(d, n);
        PathPoint {
            end: v,
            ranks: self.ranks[..n].to_vec(),
            tail: self.tail.clone(),
        }
    }

    fn is_max_at(&self, d: &BratteliDiagram, level: usize, v: usize) -> bool {
        self.ranks[level - 1] + 1 == d.in_degree(level, v)
    }
}

/// Resets levels `1..=top` so the prefix below `w` at level `top` is minimal.
fn reset_minimal(d: &BratteliDiagram, ranks: &mut [usize], top: usize, w: usize) {
    let mut w = w;
    for level in (1..=top).rev() {
        ranks[level - 1] = 0;
        if level >= 2 {
            w = d.level(level).unwrap().order(w)[0];
        }
    }
}

/// The Vershik successor `V_B(x)`.
pub fn vershik_successor(x: &PathPoint, d: &BratteliDiagram) -> Result<PathPoint> {
    let verts = x.vertices(d);
    let k = x.depth();
    for level in 1..=k {
        let v = verts[level - 1];
        if !x.is_max_at(d, level, v) {
            let mut ranks = x.ranks.clone();
            ranks[level - 1] += 1;
            if level >= 2 {
                let w = d.level(level)?.order(v)[ranks[level - 1]];
                reset_minimal(d, &mut ranks, level - 1, w);
            }
            return Ok(PathPoint {
                end: x.end,
                ranks,
                tail: x.tail.clone(),
            });
        }
    }
    match &x.tail {
        Tail::AllMaximal => {
            // x is the maximal path; its successor is the minimal one
            let top = d.depth();
            if d.extremal_vertex(k, top, Extremal::Max)? != Some(x.end) {
                return Err(Error::Unresolved(top));
            }
            let vmin = d
                .extremal_vertex(k, top, Extremal::Min)?
                .ok_or(Error::Unresolved(top))?;
            PathPoint::minimal(d, k, vmin, Tail::AllMinimal)
        }
        Tail::AllMinimal => {
            let mut ranks = x.ranks.clone();
            let mut v = x.end;
            for level in k + 1..=d.depth() {
                let lvl = d.level(level)?;
                let w = (0..lvl.target_count())
                    .find(|&w| lvl.min_source(w) == v)
                    .ok_or_else(|| {
                        Error::Invalid(format!("no minimal edge leaves vertex {v} at level {}", level - 1))
                    })?;
                if lvl.order(w).len() > 1 {
                    ranks.push(1);
                    let src = lvl.order(w)[1];
                    reset_minimal(d, &mut ranks, level - 1, src);
                    return Ok(PathPoint {
                        end: w,
                        ranks,
                        tail: Tail::AllMinimal,
                    });
                }
                ranks.push(0);
                v = w;
            }
            Err(Error::Unresolved(d.depth()))
        }
        Tail::Explicit(ext) => {
            let mut ranks = x.ranks.clone();
            let mut v = x.end;
            for (i, &(w, r)) in ext.iter().enumerate() {
                let level = k + 1 + i;
                let lvl = d.level(level)?;
                if lvl.order(w)[r] != v {
                    return Err(Error::Invalid(format!("explicit tail breaks at level {level}")));
                }
                if r + 1 < lvl.order(w).len() {
                    ranks.push(r + 1);
                    let src = lvl.order(w)[r + 1];
                    reset_minimal(d, &mut ranks, level - 1, src);
                    return Ok(PathPoint {
                        end: w,
                        ranks,
                        tail: Tail::Explicit(ext[i + 1..].to_vec()),
                    });
                }
                ranks.push(r);
                v = w;
            }
            let p = PathPoint {
                end: v,
                ranks,
                tail: Tail::AllMinimal,
            };
            vershik_successor(&p, d)
        }
    }
}

/// Entries of a suffix vector `s_{m,n}(x)`, indexed by `V_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuffixVector {
    pub level: usize,
    pub entries: Vec<BigInt>,
}

impl SuffixVector {
    pub fn dot(&self, h: &[BigInt]) -> BigInt {
        self.entries.iter().zip(h).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }
}

/// Single-level suffix `s_j(x)` for `0 <= j < k`, indexed by `V_j`.
fn single_suffix(d: &BratteliDiagram, x: &PathPoint, verts: &[usize], j: usize) -> Vec<BigInt> {
    let level = j + 1;
    let v = verts[level - 1];
    let r = x.ranks[level - 1];
    if level == 1 {
        return vec![BigInt::from(d.in_degree(1, v) - 1 - r)];
    }
    d.level(level)
        .unwrap()
        .suffix(v, r)
        .into_iter()
        .map(BigInt::from)
        .collect()
}

/// `s_{m,n}(x)`: per-source counts of paths in `E_{m,n}` strictly greater
/// than `(x_{m+1}, ..., x_n)`. Level 0 is the root.
pub fn suffix_vector(d: &BratteliDiagram, x: &PathPoint, m: usize, n: usize) -> Result<SuffixVector> {
    if m >= n || n > x.depth() {
        return Err(Error::Invalid(format!(
            "suffix range {m}..{n} invalid for prefix depth {}",
            x.depth()
        )));
    }
    let verts = x.vertices(d);
    let width = d.vertex_count(m);
    let mut acc = vec![BigInt::zero(); width];
    // P_{m,j} as a matrix; for m = 0 its single row is h_j
    let mut p: IntMatrix = IntMatrix::identity(width);
    for j in m..n {
        if j > m {
            let next = if m == 0 {
                let h = d.heights_slice(j)?;
                let mut row = IntMatrix::zeros(1, h.len());
                for (i, x) in h.iter().enumerate() {
                    row.set(0, i, x.clone());
                }
                row
            } else {
                p.mul(&d.incidence_matrix(j)?)
            };
            p = next;
        }
        let s = single_suffix(d, x, &verts, j);
        let contrib = p.right_mul(&s);
        for (a, c) in acc.iter_mut().zip(contrib) {
            *a += c;
        }
    }
    Ok(SuffixVector {
        level: m,
        entries: acc,
    })
}

/// Entrance time `r_n(x) = s_0(x) + sum_{i=1}^{n-1} <s_i(x), h_i>`.
pub fn entrance_time(d: &BratteliDiagram, x: &PathPoint, n: usize) -> Result<BigInt> {
    if n == 0 || n > x.depth() {
        return Err(Error::Invalid(format!(
            "entrance time at level {n} needs prefix depth {n}, have {}",
            x.depth()
        )));
    }
    let verts = x.vertices(d);
    let mut r = single_suffix(d, x, &verts, 0)[0].clone();
    for i in 1..n {
        let s = single_suffix(d, x, &verts, i);
        let h = d.heights_slice(i)?;
        r += s.iter().zip(h).map(|(a, b)| a * b).sum::<BigInt>();
    }
    Ok(r)
}

/// `S_n(u, v)`: suffix vectors of the edges from `u` into `v` at level `n + 1`,
/// in ascending rank order.
pub fn suffix_set(d: &BratteliDiagram, n: usize, u: usize, v: usize) -> Result<Vec<SuffixVector>> {
    let level = d.level(n + 1)?;
    if u >= level.source_count() {
        return Err(Error::VertexRange { level: n, vertex: u });
    }
    if v >= level.target_count() {
        return Err(Error::VertexRange {
            level: n + 1,
            vertex: v,
        });
    }
    Ok(level
        .suffixes(v)
        .into_iter()
        .enumerate()
        .filter(|(r, _)| level.order(v)[*r] == u)
        .map(|(_, s)| SuffixVector {
            level: n,
            entries: s.into_iter().map(BigInt::from).collect(),
        })
        .collect())
}

/// All paths from the root to `v` at level `n`, ascending in the induced order.
pub fn enumerate_tower_paths(
    d: &BratteliDiagram,
    n: usize,
    v: usize,
    cap: usize,
) -> Result<Vec<PathPoint>> {
    let h = &d.heights_slice(n)?[v];
    if h > &BigInt::from(cap) {
        return Err(Error::Cap {
            required: h.to_string(),
            cap,
        });
    }
    // ascending rank sequences, built from level 1 upward
    let mut lists: Vec<Vec<Vec<usize>>> = (0..d.vertex_count(1))
        .map(|w| (0..d.in_degree(1, w)).map(|r| vec![r]).collect())
        .collect();
    for level in 2..=n {
        let lvl = d.level(level)?;
        lists = (0..lvl.target_count())
            .map(|t| {
                let mut out = Vec::new();
                for (r, &s) in lvl.order(t).iter().enumerate() {
                    for p in &lists[s] {
                        let mut q = p.clone();
                        q.push(r);
                        out.push(q);
                    }
                }
                out
            })
            .collect();
    }
    Ok(lists
        .swap_remove(v)
        .into_iter()
        .map(|ranks| PathPoint {
            end: v,
            ranks,
            tail: Tail::AllMinimal,
        })
        .collect())
}
