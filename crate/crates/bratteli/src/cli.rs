//! Command-line front end. Reports are JSON on stdout (or `--out`); series
//! may also be written as CSV. Exit status is nonzero only for operational
//! errors, never for a mathematical verdict.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::arith::{rat, AngleSpec, CfStream};
use crate::constructions::{odo2, odometer, sturmian, toeplitz_type};
use crate::diagram::{level_from_map, BratteliDiagram, DiagramFile};
use crate::dynamics::{entrance_time, vershik_successor, PathPoint, Tail};
use crate::error::{Error, Result};
use crate::measure::{clean_report, invariant_measures, MeasureEnclosure};
use crate::spectral::{enumerate_candidates, test_continuous, test_measurable, CandidateOptions, Grid, Thresholds};
use crate::transform::{check_preservation, order_modification, spoil_continuous, EditFile, Schedule};

pub const PRECISION_ENV: &str = "BRATTELI_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(name = "bratteli", version, about = "Ordered Bratteli diagrams and eigenvalue tests")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Binary precision of irrational angles; defaults to $BRATTELI_PRECISION_BITS or 128.
    #[arg(long, global = true)]
    bits: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Diagram file, or one of the built-ins `odo2`, `golden`, `silver`.
    diagram: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Properness, linear recurrence and cleanness of each invariant measure.
    Validate {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// Continuous eigenvalue candidates from bounded seeds.
    Candidates {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        bound: i64,
        /// Seed levels as `lo,hi`.
        #[arg(long)]
        window: Option<String>,
        /// Identify candidates as `m * angle + n` for this angle.
        #[arg(long)]
        identify: Option<String>,
    },
    /// Continuous eigenvalue test on `max |||alpha <s, h_n>|||`.
    TestContinuous {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Write the series as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Measurable eigenvalue test on the transfer-matrix statistic.
    TestMeasurable {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        alpha: String,
        /// `top` or `m_lo..m_hi:top`.
        #[arg(long, default_value = "15")]
        grid: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sturmian diagram of a continued fraction, e.g. `--cf 1,...` or `--cf 2,~1,2`.
    Sturmian {
        #[arg(long)]
        cf: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        simplify: bool,
    },
    /// Odometer with characteristic sequence `--q 2,3` (repeated unless `--finite`).
    Odometer {
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        finite: bool,
    },
    /// Toeplitz-type diagram from a JSON list of level maps repeated periodically.
    Toeplitz {
        #[arg(long)]
        levels: PathBuf,
        #[arg(long, default_value_t = 1)]
        first: usize,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Telescope at the given levels, e.g. `--cuts 0,1,3,5`.
    Telescope {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        cuts: String,
    },
    /// Reorder edges so the target angles stop being continuous eigenvalues.
    Spoil {
        #[command(flatten)]
        src: Source,
        /// Angles, separated by `;`.
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = 4)]
        stages: usize,
        #[arg(long, default_value_t = 64)]
        max_level: usize,
        /// Write the spoiled diagram here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Vershik orbit of the minimal path with entrance-time cross-check.
    Simulate {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// Tower vertex at the simulation level.
        #[arg(long, default_value_t = 0)]
        vertex: usize,
    },
    /// Apply an edit file and optionally check preservation of an angle.
    Modify {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        edits: PathBuf,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Format {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load(src: &Source, depth: usize) -> Result<BratteliDiagram> {
    let d = match src.diagram.as_str() {
        "odo2" => odo2(depth.max(2)),
        "golden" => sturmian(&CfStream::golden(), depth.max(2), false)?,
        "silver" => sturmian(&CfStream::constant(2)?, depth.max(2), false)?,
        path => {
            let path = PathBuf::from(path);
            DiagramFile::parse(&read(&path)?).map_err(|e| match e {
                Error::Format { location, message } => Error::Format {
                    location: format!("{}: {location}", path.display()),
                    message,
                },
                e => e,
            })?
        }
    };
    if d.depth() < depth && d.generator().is_some() {
        d.deepen(depth)
    } else {
        Ok(d)
    }
}

fn angle(s: &str) -> Result<AngleSpec> {
    match s {
        "golden" => Ok(AngleSpec::golden()),
        _ => s.parse(),
    }
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim().parse().map_err(|_| Error::Format {
                location: what.into(),
                message: format!("'{t}' is not an integer"),
            })
        })
        .collect()
}

fn measure(d: &BratteliDiagram, depth: usize) -> Result<Vec<MeasureEnclosure>> {
    invariant_measures(d, depth, &rat(1, 1000))
}

fn parse_grid(s: &str) -> Result<Grid> {
    let bad = || Error::Format {
        location: "--grid".into(),
        message: format!("expected 'top' or 'lo..hi:top', got '{s}'"),
    };
    match s.split_once(':') {
        None => Ok(Grid::full(s.trim().parse().map_err(|_| bad())?)),
        Some((range, top)) => {
            let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
            Ok(Grid {
                m_lo: lo.trim().parse().map_err(|_| bad())?,
                m_hi: hi.trim().parse().map_err(|_| bad())?,
                top: top.trim().parse().map_err(|_| bad())?,
            })
        }
    }
}

#[derive(Serialize)]
struct Step {
    step: usize,
    ranks: Vec<usize>,
    vertices: Vec<usize>,
    entrance_time: String,
    /// `h_n(v) - 1 - step`, the steps left before the top of the tower.
    expected: String,
    matches: bool,
}

fn simulate(d: &BratteliDiagram, steps: usize, vertex: usize) -> Result<serde_json::Value> {
    // the smallest level whose tower over `vertex` holds all the steps
    let mut deep = d.clone();
    let mut n = 1;
    loop {
        if n > deep.depth() {
            if deep.generator().is_none() || n > 4096 {
                return Err(Error::Depth {
                    needed: n,
                    available: deep.depth(),
                });
            }
            deep = deep.deepen(n)?;
        }
        if vertex < deep.vertex_count(n) && deep.heights_slice(n)?[vertex] > BigInt::from(steps) {
            break;
        }
        n += 1;
    }
    let h = deep.heights_slice(n)?[vertex].clone();
    let mut x = PathPoint::minimal(&deep, n, vertex, Tail::AllMinimal)?;
    let mut log = Vec::new();
    for k in 0..=steps {
        if k > 0 {
            x = vershik_successor(&x, &deep)?;
        }
        let r = entrance_time(&deep, &x, n)?;
        let expected = &h - 1 - k;
        log.push(Step {
            step: k,
            ranks: x.ranks().to_vec(),
            vertices: x.vertices(&deep),
            matches: r == expected,
            entrance_time: r.to_string(),
            expected: expected.to_string(),
        });
    }
    let all = log.iter().all(|s| s.matches);
    Ok(json!({
        "level": n,
        "vertex": vertex,
        "height": h.to_string(),
        "steps": log,
        "entrance_times_match": all,
    }))
}

fn execute(cli: &Cli) -> Result<String> {
    let bits = match cli.bits {
        Some(b) => b,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Error::Format {
                location: PRECISION_ENV.into(),
                message: format!("'{v}' is not a bit count"),
            })?,
            Err(_) => 128,
        },
    };
    let report = match &cli.command {
        Command::Validate { src, depth } => {
            let d = load(src, *depth)?;
            // measures are enclosed from deeper levels when a generator allows it
            let deep = load(src, (3 * depth).max(30))?;
            let mus = measure(&deep, deep.depth())?;
            let mut cleanness = Vec::new();
            for mu in &mus {
                let audited = mu.audited_depth(&rat(1, 1000)).min(d.depth());
                cleanness.push(match clean_report(mu, None, audited) {
                    Ok(r) => json!({ "audited_depth": audited, "report": r }),
                    Err(e) => json!({ "audited_depth": audited, "error": e.to_string() }),
                });
            }
            json!({
                "depth": d.depth(),
                "vertex_counts": (1..=d.depth()).map(|n| d.vertex_count(n)).collect::<Vec<_>>(),
                "properness": d.check_properness(),
                "linearly_recurrent": d.linearly_recurrent(),
                "measures": cleanness,
            })
        }
        Command::Candidates {
            src,
            depth,
            bound,
            window,
            identify,
        } => {
            let deep = (3 * depth).max(30);
            let d = load(src, deep)?;
            let mu = &measure(&d, deep.min(d.depth()))?[0];
            let mut opts = CandidateOptions::new(*depth);
            opts.seed_bound = *bound;
            if let Some(w) = window {
                let w: Vec<usize> = list(w, "--window")?;
                if w.len() != 2 {
                    return Err(Error::Invalid("--window needs lo,hi".into()));
                }
                opts.window = (w[0], w[1]);
            }
            if let Some(a) = identify {
                opts.identify = Some((angle(a)?, 64));
            }
            let found = enumerate_candidates(&d, mu, &opts)?;
            json!({
                "depth": depth,
                "seed_bound": bound,
                "window": opts.window,
                "threshold": opts.threshold.to_string(),
                "measure_depth": mu.depth(),
                "candidates": found,
            })
        }
        Command::TestContinuous { src, alpha, depth, csv } => {
            let d = load(src, depth + 1)?;
            let v = test_continuous(&d, &angle(alpha)?, *depth, &Thresholds::continuous(), bits)?;
            if let Some(p) = csv {
                write(p, &v.series_csv())?;
            }
            json!({ "bits": bits, "verdict": v })
        }
        Command::TestMeasurable { src, alpha, grid, csv } => {
            let grid = parse_grid(grid)?;
            let deep = grid.top + 1;
            let d = load(src, deep)?;
            let mu = &measure(&d, deep.min(d.depth()))?[0];
            let clean = clean_report(mu, None, mu.audited_depth(&rat(1, 1000)).min(grid.top))?;
            let rep = test_measurable(&d, mu, &clean, &angle(alpha)?, &grid, &Thresholds::measurable(), bits)?;
            if let Some(p) = csv {
                let mut out = String::from("m,n,max_delta_lo,max_delta_hi\n");
                for e in &rep.entries {
                    out.push_str(&format!("{},{},{},{}\n", e.m, e.n, e.max_delta.lo(), e.max_delta.hi()));
                }
                write(p, &out)?;
            }
            json!({ "bits": bits, "report": rep })
        }
        Command::Sturmian { cf, depth, simplify } => {
            return Ok(DiagramFile::render(&sturmian(&cf.parse()?, *depth, *simplify)?));
        }
        Command::Odometer { q, depth, finite } => {
            return Ok(DiagramFile::render(&odometer(&list::<u64>(q, "--q")?, !finite, *depth)?));
        }
        Command::Toeplitz { levels, first, depth } => {
            let maps: Vec<std::collections::BTreeMap<String, Vec<usize>>> =
                serde_json::from_str(&read(levels)?).map_err(|e| Error::Format {
                    location: format!("{} line {} column {}", levels.display(), e.line(), e.column()),
                    message: e.to_string(),
                })?;
            let mut width = *first;
            let mut parsed = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                let l = level_from_map(m, width, &format!("{}[{i}]", levels.display()))?;
                width = l.target_count();
                parsed.push(l);
            }
            let (d, _) = toeplitz_type(*first, parsed, *depth)?;
            return Ok(DiagramFile::render(&d));
        }
        Command::Telescope { src, cuts } => {
            let cuts: Vec<usize> = list(cuts, "--cuts")?;
            let d = load(src, *cuts.last().unwrap_or(&1))?;
            return Ok(DiagramFile::render(&d.telescope(&cuts)?));
        }
        Command::Spoil {
            src,
            targets,
            stages,
            max_level,
            emit,
        } => {
            let d = load(src, *max_level)?;
            let targets: Vec<AngleSpec> = targets.split(';').map(angle).collect::<Result<_>>()?;
            let depth = (*max_level).min(d.depth());
            let mu = &measure(&d, depth)?[0];
            let clean = clean_report(mu, None, mu.audited_depth(&rat(1, 1000)).min(40))?;
            let schedule = Schedule {
                stages: *stages,
                max_level: depth,
                bits,
                ..Schedule::default()
            };
            let r = spoil_continuous(&d, mu, &clean, &targets, &schedule)?;
            if let Some(p) = emit {
                write(p, &DiagramFile::render(&r.diagram))?;
            }
            let verdicts: Vec<_> = targets
                .iter()
                .map(|a| test_continuous(&r.diagram, a, r.diagram.depth() - 1, &Thresholds::continuous(), bits))
                .collect::<Result<_>>()?;
            json!({
                "targets": targets.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "level_sizes": (1..=r.diagram.depth()).map(|n| r.diagram.heights_slice(n).unwrap().iter().map(|h| h.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "spoil": r,
                "verdicts": verdicts,
            })
        }
        Command::Simulate { src, steps, vertex } => {
            let d = load(src, 1)?;
            simulate(&d, *steps, *vertex)?
        }
        Command::Modify {
            src,
            edits,
            alpha,
            depth,
            emit,
        } => {
            let d = load(src, depth + 1)?;
            let m = order_modification(&d, &EditFile::parse(&read(edits)?)?)?;
            if let Some(p) = emit {
                write(p, &DiagramFile::render(&m.diagram))?;
            }
            let checks = match alpha {
                None => serde_json::Value::Null,
                Some(a) => {
                    let a = angle(a)?;
                    let depth = (*depth).min(m.diagram.depth().saturating_sub(1));
                    let th = Thresholds::continuous();
                    json!({
                        "preservation": check_preservation(&d, &a, &m.omega, depth, &th, bits)?,
                        "modified": test_continuous(&m.diagram, &a, depth, &th, bits)?,
                    })
                }
            };
            json!({ "modification": m, "checks": checks })
        }
    };
    Ok(serde_json::to_string_pretty(&report).expect("serializable") + "\n")
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli).and_then(|text| match &cli.out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
