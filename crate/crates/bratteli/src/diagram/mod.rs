//! Ordered Bratteli diagrams truncated at a finite depth.
//!
//! Level `n` holds the vertex set `V_n`; `levels[n - 2]` stores the ordered
//! edges `E_n` from `V_{n-1}` to `V_n` as one ascending source list per target.
//! Level 1 is described by the hat vector, counting edges from the root.

mod io;
mod matrix;
mod properness;
mod telescope;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use io::{level_from_map, level_to_map, DiagramFile};
pub use matrix::IntMatrix;
pub use properness::ProperReport;

use crate::error::{Error, Result};

/// Ordered edge set between two consecutive levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedLevel {
    source_count: usize,
    order: Vec<Vec<usize>>,
}

impl OrderedLevel {
    pub fn new(source_count: usize, order: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; source_count];
        for (v, list) in order.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::Invalid(format!("target {v} has no incoming edge")));
            }
            for &u in list {
                if u >= source_count {
                    return Err(Error::Invalid(format!(
                        "target {v} lists source {u}, only {source_count} sources"
                    )));
                }
                seen[u] = true;
            }
        }
        if let Some(u) = seen.iter().position(|s| !s) {
            return Err(Error::Invalid(format!("source {u} has no outgoing edge")));
        }
        Ok(OrderedLevel {
            source_count,
            order,
        })
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn target_count(&self) -> usize {
        self.order.len()
    }

    /// Ascending source list of `v`; position is the rank.
    pub fn order(&self, v: usize) -> &[usize] {
        &self.order[v]
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.order
    }

    pub fn incidence(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.source_count, self.target_count());
        for (v, list) in self.order.iter().enumerate() {
            for &u in list {
                let x = m.get(u, v) + BigInt::one();
                m.set(u, v, x);
            }
        }
        m
    }

    pub fn max_source(&self, v: usize) -> usize {
        *self.order[v].last().unwrap()
    }

    pub fn min_source(&self, v: usize) -> usize {
        self.order[v][0]
    }

    /// Suffix vector of the edge of rank `r` into `v`: per-source counts of
    /// strictly greater edges.
    pub fn suffix(&self, v: usize, r: usize) -> Vec<u64> {
        let mut s = vec![0u64; self.source_count];
        for &u in &self.order[v][r + 1..] {
            s[u] += 1;
        }
        s
    }

    /// Suffix vectors of all ranks into `v`, indexed by rank.
    pub fn suffixes(&self, v: usize) -> Vec<Vec<u64>> {
        let list = &self.order[v];
        let mut out = vec![Vec::new(); list.len()];
        let mut s = vec![0u64; self.source_count];
        for r in (0..list.len()).rev() {
            out[r] = s.clone();
            s[list[r]] += 1;
        }
        out
    }
}

/// Rule extending a diagram level by level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Generator {
    /// Continued fraction `prefix` followed by `cf`, repeated when `periodic`.
    Sturmian {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        prefix: Vec<u64>,
        cf: Vec<u64>,
        periodic: bool,
    },
    /// Single vertex; level `n + 1` has `q_n` edges.
    Odometer {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        prefix: Vec<u64>,
        q: Vec<u64>,
        periodic: bool,
    },
    /// Level `n` repeats `levels[(n - 2) % len]`.
    Periodic {
        levels: Vec<BTreeMap<String, Vec<usize>>>,
    },
}

impl Generator {
    fn sequence(prefix: &[u64], body: &[u64], periodic: bool, k: usize) -> Option<u64> {
        let i = k - 1;
        if i < prefix.len() {
            return Some(prefix[i]);
        }
        let j = i - prefix.len();
        if periodic && !body.is_empty() {
            Some(body[j % body.len()])
        } else {
            body.get(j).copied()
        }
    }

    /// Level `n >= 2`, or `None` past the end of a finite family.
    pub fn level(&self, n: usize, source_count: usize) -> Result<Option<OrderedLevel>> {
        assert!(n >= 2, "generated levels start at 2");
        match self {
            Generator::Sturmian {
                prefix,
                cf,
                periodic,
            } => match Self::sequence(prefix, cf, *periodic, n - 1) {
                Some(a) => crate::constructions::sturmian_level(n, a).map(Some),
                None => Ok(None),
            },
            Generator::Odometer {
                prefix,
                q,
                periodic,
            } => match Self::sequence(prefix, q, *periodic, n - 1) {
                Some(q) => crate::constructions::odometer_level(q).map(Some),
                None => Ok(None),
            },
            Generator::Periodic { levels } => {
                if levels.is_empty() {
                    return Ok(None);
                }
                let map = &levels[(n - 2) % levels.len()];
                level_from_map(map, source_count, &format!("generator level {n}")).map(Some)
            }
        }
    }
}

/// Height row vector `h_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightVector {
    pub level: usize,
    pub entries: Vec<BigInt>,
}

/// Finite-depth ordered Bratteli diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliDiagram {
    hat: Vec<BigInt>,
    levels: Vec<OrderedLevel>,
    generator: Option<Generator>,
    heights: Vec<Vec<BigInt>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Max,
    Min,
}

impl BratteliDiagram {
    pub fn new(
        hat: Vec<BigInt>,
        levels: Vec<OrderedLevel>,
        generator: Option<Generator>,
    ) -> Result<Self> {
        if hat.is_empty() {
            return Err(Error::Invalid("level 1 has no vertices".into()));
        }
        if hat.iter().any(|h| h <= &BigInt::zero()) {
            return Err(Error::Invalid("hat entries must be positive".into()));
        }
        let mut heights = vec![hat.clone()];
        for (i, level) in levels.iter().enumerate() {
            let prev = heights.last().unwrap();
            if level.source_count() != prev.len() {
                return Err(Error::Invalid(format!(
                    "level {} has {} sources, level {} has {} vertices",
                    i + 2,
                    level.source_count(),
                    i + 1,
                    prev.len()
                )));
            }
            let next: Vec<BigInt> = level
                .orders()
                .iter()
                .map(|list| list.iter().map(|&u| &prev[u]).sum())
                .collect();
            heights.push(next);
        }
        Ok(BratteliDiagram {
            hat,
            levels,
            generator,
            heights,
        })
    }

    /// Diagram with all-ones hat of size `d1`.
    pub fn with_unit_hat(
        d1: usize,
        levels: Vec<OrderedLevel>,
        generator: Option<Generator>,
    ) -> Result<Self> {
        Self::new(vec![BigInt::one(); d1], levels, generator)
    }

    /// Builds from a generator alone, with unit hat of the given size.
    pub fn generated(d1: usize, generator: Generator, depth: usize) -> Result<Self> {
        let d = Self::with_unit_hat(d1, Vec::new(), Some(generator))?;
        d.deepen(depth)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn hat(&self) -> &[BigInt] {
        &self.hat
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn levels(&self) -> &[OrderedLevel] {
        &self.levels
    }

    fn check_level(&self, n: usize, lo: usize) -> Result<()> {
        if n < lo || n > self.depth() {
            Err(Error::LevelRange {
                level: n,
                depth: self.depth(),
            })
        } else {
            Ok(())
        }
    }

    /// `|V_n|`; `|V_0| = 1` for the root.
    pub fn vertex_count(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.heights[n - 1].len()
        }
    }

    pub fn max_vertex_count(&self) -> usize {
        self.heights.iter().map(|h| h.len()).max().unwrap()
    }

    /// Ordered edges `E_n`, `2 <= n <= depth`.
    pub fn level(&self, n: usize) -> Result<&OrderedLevel> {
        self.check_level(n, 2)?;
        Ok(&self.levels[n - 2])
    }

    /// Number of edges into `v` at level `n` (level 1 counts root edges).
    pub fn in_degree(&self, n: usize, v: usize) -> usize {
        if n == 1 {
            usize::try_from(&self.hat[v]).expect("hat entry too large")
        } else {
            self.levels[n - 2].order(v).len()
        }
    }

    pub fn incidence_matrix(&self, n: usize) -> Result<IntMatrix> {
        Ok(self.level(n)?.incidence())
    }

    pub fn heights(&self, n: usize) -> Result<HeightVector> {
        Ok(HeightVector {
            level: n,
            entries: self.heights_slice(n)?.to_vec(),
        })
    }

    pub fn heights_slice(&self, n: usize) -> Result<&[BigInt]> {
        self.check_level(n, 1)?;
        Ok(&self.heights[n - 1])
    }

    /// `P_{m,n} = M_{m+1} ... M_n`.
    pub fn product_matrix(&self, m: usize, n: usize) -> Result<IntMatrix> {
        self.check_level(m, 1)?;
        self.check_level(n, 1)?;
        if m > n {
            return Err(Error::Invalid(format!("product P_{{{m},{n}}} with m > n")));
        }
        let mut p = IntMatrix::identity(self.vertex_count(m));
        for k in m + 1..=n {
            p = p.mul(&self.levels[k - 2].incidence());
        }
        Ok(p)
    }

    /// Extends the stored depth using the generator.
    pub fn deepen(&self, depth: usize) -> Result<BratteliDiagram> {
        if depth <= self.depth() {
            return Ok(self.clone());
        }
        let gen = self.generator.as_ref().ok_or(Error::Depth {
            needed: depth,
            available: self.depth(),
        })?;
        let mut levels = self.levels.clone();
        let mut width = self.vertex_count(self.depth());
        for n in self.depth() + 1..=depth {
            match gen.level(n, width)? {
                Some(l) => {
                    width = l.target_count();
                    levels.push(l)
                }
                None => {
                    return Err(Error::Depth {
                        needed: depth,
                        available: n - 1,
                    })
                }
            }
        }
        BratteliDiagram::new(self.hat.clone(), levels, self.generator.clone())
    }

    /// Prefix of depth `depth`, keeping the generator.
    pub fn truncate(&self, depth: usize) -> BratteliDiagram {
        let depth = depth.max(1).min(self.depth());
        BratteliDiagram::new(
            self.hat.clone(),
            self.levels[..depth - 1].to_vec(),
            self.generator.clone(),
        )
        .expect("prefix of a valid diagram")
    }

    pub fn without_generator(&self) -> BratteliDiagram {
        let mut d = self.clone();
        d.generator = None;
        d
    }

    /// Same hat and generator with replaced levels.
    pub fn with_levels(&self, levels: Vec<OrderedLevel>) -> Result<BratteliDiagram> {
        BratteliDiagram::new(self.hat.clone(), levels, self.generator.clone())
    }

    /// Source of the maximal (or minimal) edge into each vertex of level `n >= 2`.
    pub fn extremal_map(&self, n: usize, kind: Extremal) -> Result<Vec<usize>> {
        let level = self.level(n)?;
        Ok((0..level.target_count())
            .map(|v| match kind {
                Extremal::Max => level.max_source(v),
                Extremal::Min => level.min_source(v),
            })
            .collect())
    }

    /// Image of `V_n` in `V_m` under composed extremal maps.
    pub fn extremal_image(&self, m: usize, n: usize, kind: Extremal) -> Result<Vec<usize>> {
        self.check_level(m, 1)?;
        self.check_level(n, m)?;
        let mut set: Vec<usize> = (0..self.vertex_count(n)).collect();
        for k in (m + 1..=n).rev() {
            let map = self.extremal_map(k, kind)?;
            let mut next: Vec<usize> = set.iter().map(|&v| map[v]).collect();
            next.sort_unstable();
            next.dedup();
            set = next;
        }
        Ok(set)
    }

    /// The vertex at level `m` of every extremal path through level `n`, when
    /// the composed map is constant.
    pub fn extremal_vertex(&self, m: usize, n: usize, kind: Extremal) -> Result<Option<usize>> {
        let img = self.extremal_image(m, n, kind)?;
        Ok(if img.len() == 1 { Some(img[0]) } else { None })
    }

    /// Linearly recurrent by construction: the generator uses finitely many levels.
    pub fn linearly_recurrent(&self) -> bool {
        match &self.generator {
            Some(Generator::Periodic { .. }) => true,
            Some(Generator::Odometer { periodic, .. }) | Some(Generator::Sturmian { periodic, .. }) => {
                *periodic
            }
            None => false,
        }
    }

    pub fn check_properness(&self) -> ProperReport {
        properness::check(self)
    }

    pub fn telescope(&self, cuts: &[usize]) -> Result<BratteliDiagram> {
        telescope::telescope(self, cuts)
    }

    /// Ascending source list (at level `m`) of all paths from `V_m` to `v` at
    /// level `n`, ordered by the induced order.
    pub fn induced_sources(&self, m: usize, n: usize, v: usize) -> Result<Vec<usize>> {
        telescope::induced_sources(self, m, n, v)
    }
}
