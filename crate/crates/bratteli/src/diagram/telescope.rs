use super::{BratteliDiagram, OrderedLevel};
use crate::error::{Error, Result};

/// Ascending induced-order source lists for every vertex of level `n`,
/// over paths starting at level `m`.
pub(super) fn induced_lists(d: &BratteliDiagram, m: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    if m < 1 || m > n || n > d.depth() {
        return Err(Error::LevelRange {
            level: n,
            depth: d.depth(),
        });
    }
    let mut lists: Vec<Vec<usize>> = (0..d.vertex_count(m)).map(|u| vec![u]).collect();
    for k in m + 1..=n {
        let level = d.level(k)?;
        lists = level
            .orders()
            .iter()
            .map(|order| {
                let mut out = Vec::new();
                for &w in order {
                    out.extend_from_slice(&lists[w]);
                }
                out
            })
            .collect();
    }
    Ok(lists)
}

pub(super) fn induced_sources(
    d: &BratteliDiagram,
    m: usize,
    n: usize,
    v: usize,
) -> Result<Vec<usize>> {
    let mut lists = induced_lists(d, m, n)?;
    if v >= lists.len() {
        return Err(Error::VertexRange { level: n, vertex: v });
    }
    Ok(lists.swap_remove(v))
}

pub(super) fn telescope(d: &BratteliDiagram, cuts: &[usize]) -> Result<BratteliDiagram> {
    if cuts.len() < 2 || cuts[0] != 0 {
        return Err(Error::Invalid("cuts must start with 0 and name a level".into()));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("cuts must be strictly increasing".into()));
    }
    if *cuts.last().unwrap() > d.depth() {
        return Err(Error::Depth {
            needed: *cuts.last().unwrap(),
            available: d.depth(),
        });
    }
    let hat = d.heights_slice(cuts[1])?.to_vec();
    let mut levels = Vec::new();
    for w in cuts[1..].windows(2) {
        let lists = induced_lists(d, w[0], w[1])?;
        levels.push(OrderedLevel::new(d.vertex_count(w[0]), lists)?);
    }
    BratteliDiagram::new(hat, levels, None)
}
