//! Invariant measures from extreme images of the cone `P_{m,N}`, tower masses,
//! clean-diagram reports and the Markov kernels of the tower process.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{rat_int, Rat, RealEnclosure};
use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};

/// Enclosure of one invariant measure, levels `1..=depth`.
#[derive(Clone, Debug)]
pub struct MeasureEnclosure {
    diagram: BratteliDiagram,
    levels: Vec<Vec<RealEnclosure>>,
    /// Level-1 images of the extreme columns making up this cluster.
    pub extreme_points: Vec<Vec<Rat>>,
    /// Level-`depth` vertices whose columns belong to this cluster.
    pub members: Vec<usize>,
    /// Number of clusters found alongside this one.
    pub ergodic_hint: usize,
}

impl MeasureEnclosure {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn diagram(&self) -> &BratteliDiagram {
        &self.diagram
    }

    /// `mu_n`, indexed by `V_n`.
    pub fn level(&self, n: usize) -> Result<&[RealEnclosure]> {
        if n == 0 || n > self.depth() {
            return Err(Error::LevelRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(&self.levels[n - 1])
    }

    pub fn width(&self, n: usize) -> Rat {
        self.levels[n - 1]
            .iter()
            .map(|x| x.width())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Widest tower-mass enclosure `h_n(v) mu_n(v)` at level `n`.
    pub fn mass_width(&self, n: usize) -> Rat {
        let h = self.diagram.heights_slice(n).expect("level in range");
        self.levels[n - 1]
            .iter()
            .zip(h)
            .map(|(x, h)| x.width() * rat_int(h))
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Deepest level whose tower masses are enclosed within `tol`.
    pub fn audited_depth(&self, tol: &Rat) -> usize {
        (1..=self.depth())
            .take_while(|&n| &self.mass_width(n) <= tol)
            .last()
            .unwrap_or(0)
    }

    /// Enclosure of `alpha = nu . mu_m`.
    pub fn pair(&self, m: usize, nu: &[BigInt]) -> Result<RealEnclosure> {
        let mu = self.level(m)?;
        let mut acc = RealEnclosure::zero();
        for (k, x) in nu.iter().zip(mu) {
            if !k.is_zero() {
                acc = &acc + &x.mul_int(k);
            }
        }
        Ok(acc)
    }
}

fn sup_dist(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(x, y)| if x > y { x - y } else { y - x })
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Invariant measures seen from depth `depth`: the normalized columns
/// `P_{m,N} e_v / h_N(v)` are clustered at level 1 by single linkage with
/// sup-distance below `tol`, and each cluster gives the hull of its members.
pub fn invariant_measures(d: &BratteliDiagram, depth: usize, tol: &Rat) -> Result<Vec<MeasureEnclosure>> {
    if depth < 2 {
        return Err(Error::Invalid("invariant measures need depth >= 2".into()));
    }
    let d = if d.depth() < depth { d.deepen(depth)? } else { d.truncate(depth) };
    let top = d.vertex_count(depth);
    let h_top = d.heights_slice(depth)?;
    // columns[v][m - 1] = P_{m,N} e_v / h_N(v)
    let mut columns: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(top);
    for v in 0..top {
        let mut col: Vec<Rat> = vec![Rat::zero(); top];
        col[v] = Rat::new(BigInt::one(), h_top[v].clone());
        let mut per_level = vec![col.clone()];
        for n in (2..=depth).rev() {
            let m = d.incidence_matrix(n)?;
            let next: Vec<Rat> = (0..m.rows())
                .map(|u| {
                    let mut acc = Rat::zero();
                    for (w, x) in col.iter().enumerate() {
                        let e = m.get(u, w);
                        if !e.is_zero() && !x.is_zero() {
                            acc += x * rat_int(e);
                        }
                    }
                    acc
                })
                .collect();
            col = next;
            per_level.push(col.clone());
        }
        per_level.reverse();
        columns.push(per_level);
    }
    // single linkage at level 1
    let mut label: Vec<usize> = (0..top).collect();
    for a in 0..top {
        for b in a + 1..top {
            if &sup_dist(&columns[a][0], &columns[b][0]) < tol {
                let (la, lb) = (label[a], label[b]);
                for l in label.iter_mut() {
                    if *l == lb {
                        *l = la;
                    }
                }
            }
        }
    }
    let mut ids: Vec<usize> = label.clone();
    ids.sort_unstable();
    ids.dedup();
    let hint = ids.len();
    let mut out = Vec::new();
    for id in ids {
        let members: Vec<usize> = (0..top).filter(|&v| label[v] == id).collect();
        let levels: Vec<Vec<RealEnclosure>> = (0..depth)
            .map(|i| {
                (0..d.vertex_count(i + 1))
                    .map(|u| {
                        let mut lo = columns[members[0]][i][u].clone();
                        let mut hi = lo.clone();
                        for &v in &members[1..] {
                            let x = &columns[v][i][u];
                            if x < &lo {
                                lo = x.clone();
                            }
                            if x > &hi {
                                hi = x.clone();
                            }
                        }
                        RealEnclosure::new(lo, hi)
                    })
                    .collect()
            })
            .collect();
        out.push(MeasureEnclosure {
            diagram: d.clone(),
            levels,
            extreme_points: members.iter().map(|&v| columns[v][0].clone()).collect(),
            members,
            ergodic_hint: hint,
        });
    }
    Ok(out)
}

/// `mu(tau_n = v) = h_n(v) mu_n(v)`.
pub fn tower_mass(mu: &MeasureEnclosure, n: usize) -> Result<Vec<RealEnclosure>> {
    let h = mu.diagram.heights_slice(n)?;
    Ok(mu
        .level(n)?
        .iter()
        .zip(h)
        .map(|(x, h)| x.mul_int(h))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CleanReport {
    /// Vertices (0-based) whose tower mass stays above the cutoff.
    pub i_mu: Vec<usize>,
    pub delta0: Option<RealEnclosure>,
    /// Vertices whose mass drops below the cutoff at some audited level.
    pub drifting: Vec<usize>,
    pub exact_rank: bool,
    #[serde(serialize_with = "crate::arith::ser_rat")]
    pub cutoff: Rat,
    pub audited_levels: (usize, usize),
    /// Tower masses per level, `masses[n - 1][v]`.
    pub masses: Vec<Vec<RealEnclosure>>,
}

impl CleanReport {
    pub fn contains(&self, v: usize) -> bool {
        self.i_mu.contains(&v)
    }
}

/// Default cutoff `1 / (2 d^2)` with `d` the largest level size.
pub fn default_cutoff(d: &BratteliDiagram) -> Rat {
    let k = d.max_vertex_count() as i64;
    Rat::new(BigInt::one(), BigInt::from(2 * k * k))
}

/// Clean-diagram audit over the levels `ceil(N/2) ..= N` of the audited depth `N`.
pub fn clean_report(mu: &MeasureEnclosure, cutoff: Option<&Rat>, audited: usize) -> Result<CleanReport> {
    let n_top = audited.min(mu.depth());
    if n_top < 3 {
        return Err(Error::Depth {
            needed: 3,
            available: n_top,
        });
    }
    let cutoff = cutoff.cloned().unwrap_or_else(|| default_cutoff(&mu.diagram));
    let masses: Vec<Vec<RealEnclosure>> = (1..=n_top)
        .map(|n| tower_mass(mu, n))
        .collect::<Result<_>>()?;
    let first = n_top.div_ceil(2);
    let width = mu.diagram.vertex_count(n_top);
    let mut i_mu = Vec::new();
    let mut drifting = Vec::new();
    let mut delta0: Option<RealEnclosure> = None;
    for v in 0..width {
        let audited_masses: Vec<&RealEnclosure> = (first..=n_top)
            .filter_map(|n| masses[n - 1].get(v))
            .collect();
        if audited_masses.iter().all(|m| m.lo() >= &cutoff) {
            i_mu.push(v);
            for m in audited_masses {
                delta0 = Some(match delta0 {
                    None => m.clone(),
                    Some(x) => x.min(m),
                });
            }
        } else {
            drifting.push(v);
        }
    }
    let constant = (1..=n_top).all(|n| mu.diagram.vertex_count(n) == width);
    Ok(CleanReport {
        exact_rank: drifting.is_empty() && constant,
        i_mu,
        delta0,
        drifting,
        cutoff,
        audited_levels: (first, n_top),
        masses,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkovKernel {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<Vec<RealEnclosure>>,
    /// `1 - min entry`.
    pub zeta: RealEnclosure,
}

/// `q_{m,n}(u, v) = mu_n(v) P_{m,n}(u, v) / mu_m(u)`.
pub fn markov_kernel(mu: &MeasureEnclosure, m: usize, n: usize) -> Result<MarkovKernel> {
    if m == 0 || m >= n || n > mu.depth() {
        return Err(Error::Invalid(format!(
            "kernel levels {m} < {n} <= {} required",
            mu.depth()
        )));
    }
    let p = mu.diagram.product_matrix(m, n)?;
    let mu_m = mu.level(m)?;
    let mu_n = mu.level(n)?;
    let mut entries = Vec::with_capacity(mu_m.len());
    for (u, den) in mu_m.iter().enumerate() {
        if den.lo() <= &Rat::zero() {
            return Err(Error::Invalid(format!(
                "measure of vertex {} at level {m} is not bounded away from 0",
                u + 1
            )));
        }
        let row: Vec<RealEnclosure> = mu_n
            .iter()
            .enumerate()
            .map(|(v, x)| x.mul_int(p.get(u, v)).div(den).expect("positive denominator"))
            .collect();
        entries.push(row);
    }
    let mut min = entries[0][0].clone();
    for row in &entries {
        for x in row {
            min = min.min(x);
        }
    }
    let zeta = (&RealEnclosure::one() - &min).max(&RealEnclosure::zero());
    Ok(MarkovKernel { m, n, entries, zeta })
}
