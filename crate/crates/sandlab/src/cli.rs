//! The `sandlab` command line tool.
//!
//! Exit status is 0 on success, 1 when a decision or property check comes
//! out negative (or a computation hits its budget), and 2 on usage, I/O or
//! parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use sandlab_core::bridge::{build_ca_from_sa, decide_sa, Check, Verdict};
use sandlab_core::config::Configuration;
use sandlab_core::metric::{dist_ground, dist_top, zeta_window};
use sandlab_core::nil::{build_reduction, detect_flatten, find_ultimate_period, reduction_program, FlattenReport, PeriodReport, SpreadingCa};
use sandlab_core::program::{Atom, Case, Cmp, Cond, RuleProgram};
use sandlab_core::rule::{offset_index, range_len, undigit, SaRule};
use sandlab_core::sa::step;
use sandlab_core::{Error, Height};

use crate::error::ParseError;
use crate::{dsl, formats, render, traj};

/// Enumeration budget when `SANDLAB_BUDGET` is unset.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Parser, Debug)]
#[command(name = "sandlab", version, about = "Sand automata experiments on exact configurations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Metric {
    Ground,
    Top,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Apply a rule repeatedly and write the trajectory as JSON lines
    Simulate {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance between two configurations
    Distance {
        #[arg(long, value_enum)]
        metric: Metric,
        a: PathBuf,
        b: PathBuf,
    },
    /// Column encoding of a configuration on a window, top row first
    Encode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        hlo: i64,
        #[arg(long, allow_negative_numbers = true)]
        hhi: i64,
        #[arg(long, allow_negative_numbers = true)]
        vlo: i64,
        #[arg(long, allow_negative_numbers = true)]
        vhi: i64,
    },
    /// Write the cellular automaton table simulating a rule
    Sa2ca {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a binary 2-D cellular automaton acts as a sand automaton
    CheckSa {
        #[arg(long)]
        ca: PathBuf,
        /// Write the extracted rule here when the answer is yes
        #[arg(long)]
        extract: Option<PathBuf>,
    },
    /// Build the sand automaton encoding a 1-D cellular automaton with spreading state 0
    ReduceCa {
        #[arg(long)]
        ca: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 20)]
        max_cases: usize,
    },
    /// Run until the configuration stops changing
    Flatten {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        budget: u64,
    },
    /// Look for n, p with F^(n+p) a vertical translate of F^n
    PeriodSearch {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        max_sum: u32,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a trajectory
    Render {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        vlo: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        vhi: Option<i64>,
    },
}

#[derive(Debug)]
enum Fail {
    Usage(String),
    Negative(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::Overflow | Error::NotSpreading => Fail::Negative(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

type Out<'a> = &'a mut dyn Write;

pub fn run<I, T>(args: I, stdout: Out<'_>, stderr: Out<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let result = budget().and_then(|b| dispatch(cli.cmd, b, stdout));
    let _ = stdout.flush();
    match result {
        Ok(code) => code,
        Err(Fail::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(Fail::Negative(m)) => {
            let _ = writeln!(stderr, "{m}");
            1
        }
    }
}

fn budget() -> Result<u64, Fail> {
    match std::env::var("SANDLAB_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| Fail::Usage(format!("SANDLAB_BUDGET must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> Result<T, ParseError>) -> Result<T, Fail> {
    parse(&read(path)?).map_err(|e| Fail::Usage(format!("{}:{e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str, stdout: Out<'_>) -> Result<(), Fail> {
    match out {
        Some(p) if p != Path::new("-") => {
            std::fs::write(p, text).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))
        }
        _ => stdout.write_all(text.as_bytes()).map_err(|e| Fail::Usage(e.to_string())),
    }
}

fn say(stdout: Out<'_>, text: &str) -> Result<(), Fail> {
    writeln!(stdout, "{text}").map_err(|e| Fail::Usage(e.to_string()))
}

fn dispatch(cmd: Cmd, budget: u64, stdout: Out<'_>) -> Result<i32, Fail> {
    match cmd {
        Cmd::Simulate { rule, config, steps, out } => {
            let f = load(&rule, formats::parse_sa_rule)?;
            let mut x = load(&config, formats::parse_config)?;
            let mut records = Vec::new();
            for n in 0..=steps {
                if n > 0 {
                    x = step(&f, &x)?;
                }
                let rec = traj::Record::new(n, &x)
                    .ok_or_else(|| Fail::Usage("trajectories are recorded for one-dimensional eventually constant configurations".into()))?;
                records.push(rec);
            }
            emit(out.as_deref(), &traj::to_jsonl(&records), stdout)?;
            Ok(0)
        }
        Cmd::Distance { metric, a, b } => {
            let x = load(&a, formats::parse_config)?;
            let y = load(&b, formats::parse_config)?;
            let d = match metric {
                Metric::Ground => dist_ground(&x, &y)?,
                Metric::Top => dist_top(&x, &y)?,
            };
            say(stdout, &d.to_string())?;
            Ok(0)
        }
        Cmd::Encode { config, hlo, hhi, vlo, vhi } => {
            let x = load(&config, formats::parse_config)?;
            let w = zeta_window(&x, (hlo, hhi), (vlo, vhi))?;
            let mut s = String::new();
            for k in (0..w.height()).rev() {
                s.extend(w.tops().iter().map(|&t| if k < t { '1' } else { '0' }));
                s.push('\n');
            }
            emit(None, &s, stdout)?;
            Ok(0)
        }
        Cmd::Sa2ca { rule, out } => {
            let f = load(&rule, formats::parse_sa_rule)?;
            let g = build_ca_from_sa(&f)?;
            emit(out.as_deref(), &formats::serialize_ca(&g, budget)?, stdout)?;
            Ok(0)
        }
        Cmd::CheckSa { ca, extract } => {
            let g = load(&ca, formats::parse_ca)?;
            let rep = decide_sa(&g, extract.is_some(), budget)?;
            match rep.verdict {
                Verdict::IsSa => {
                    say(stdout, "IS_SA")?;
                    if let (Some(path), Some(f)) = (extract, rep.extracted) {
                        let p = relevant_program(&f, g.radius(), budget)?;
                        emit(Some(&path), &dsl::print_rule(&p), stdout)?;
                    }
                    Ok(0)
                }
                Verdict::NotSa => {
                    say(stdout, "NOT_SA")?;
                    if let Some(w) = rep.witness {
                        let check = match w.check {
                            Check::Invariance => "invariance",
                            Check::ColumnPreservation => "column-preservation",
                        };
                        let tops: Vec<String> = w.pattern.tops().iter().map(usize::to_string).collect();
                        say(
                            stdout,
                            &format!("witness {check} width {} height {} tops {}", w.pattern.width(), w.pattern.height(), tops.join(" ")),
                        )?;
                    }
                    Ok(1)
                }
            }
        }
        Cmd::ReduceCa { ca, out, max_cases } => {
            let g = load(&ca, formats::parse_ca)?;
            let s = SpreadingCa::new(g)?;
            let p = reduction_program(&s, max_cases)?;
            debug_assert_eq!(p.radius, build_reduction(&s).radius());
            emit(out.as_deref(), &dsl::print_rule(&p), stdout)?;
            Ok(0)
        }
        Cmd::Flatten { rule, config, budget } => {
            let f = load(&rule, formats::parse_sa_rule)?;
            let x = load(&config, formats::parse_config)?;
            match detect_flatten(&f, &x, budget)? {
                FlattenReport::Converged { limit, step } => {
                    say(stdout, &format!("CONVERGED limit {limit} step {step}"))?;
                    Ok(0)
                }
                FlattenReport::NotConverged { steps, stable_radius } => {
                    let r = stable_radius.map_or("none".to_string(), |r| r.to_string());
                    say(stdout, &format!("NOT_CONVERGED steps {steps} stable_radius {r}"))?;
                    Ok(1)
                }
                FlattenReport::DivergedWindow { step, width } => {
                    say(stdout, &format!("DIVERGED_WINDOW step {step} width {width}"))?;
                    Ok(1)
                }
            }
        }
        Cmd::PeriodSearch { rule, max_sum, samples, seed } => {
            let f = load(&rule, formats::parse_sa_rule)?;
            let refuted = |rs: &[sandlab_core::nil::Refutation], stdout: Out<'_>| -> Result<(), Fail> {
                for r in rs {
                    say(
                        stdout,
                        &format!("refuted n {} p {} sites {} {} witness {}", r.n, r.p, r.sites[0], r.sites[1], one_line(&r.witness)),
                    )?;
                }
                Ok(())
            };
            match find_ultimate_period(&f, max_sum, samples, seed)? {
                PeriodReport::Periodic { n, p, drift } => {
                    say(stdout, &format!("PERIODIC n {n} p {p} drift {drift}"))?;
                    Ok(0)
                }
                PeriodReport::Refuted(rs) => {
                    say(stdout, "REFUTED")?;
                    refuted(&rs, stdout)?;
                    Ok(1)
                }
                PeriodReport::Unknown { refuted: rs, open } => {
                    say(stdout, "UNKNOWN")?;
                    refuted(&rs, stdout)?;
                    for (n, p) in open {
                        say(stdout, &format!("open n {n} p {p}"))?;
                    }
                    Ok(1)
                }
            }
        }
        Cmd::Render { traj: path, format, out, vlo, vhi } => {
            let frames = load(&path, traj::parse_jsonl)?;
            let vert = match (vlo, vhi) {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => return Err(Fail::Usage("--vlo and --vhi go together".into())),
            };
            let text = match format {
                Format::Ascii => render::ascii(&frames, vert),
                Format::Svg => render::svg(&frames, vert),
            }
            .map_err(Fail::Usage)?;
            emit(out.as_deref(), &text, stdout)?;
            Ok(0)
        }
    }
}

/// Compact single-line description of a configuration.
pub fn one_line(x: &Configuration) -> String {
    formats::serialize_config(x).lines().skip(1).collect::<Vec<_>>().join("; ")
}

/// A guarded-case program for a one-dimensional rule whose value depends
/// only on the entries at horizontal offsets `1 <= |o| <= reach`: one
/// equality case per input combination whose output differs from the most
/// common one.
pub fn relevant_program(f: &SaRule, reach: u32, budget: u64) -> sandlab_core::Result<RuleProgram> {
    let r = f.radius();
    let reach = reach.min(r) as i64;
    let offs: Vec<i64> = (-reach..=reach).filter(|&o| o != 0).collect();
    let base = 2 * r as u64 + 3;
    let needed = base.checked_pow(offs.len() as u32).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let slots: Vec<usize> = offs.iter().map(|&o| offset_index(r, 1, &[o]).expect("offset in range")).collect();
    let mut entries = vec![Height::ZERO; range_len(r, 1)];
    let mut outputs = Vec::with_capacity(needed as usize);
    for code in 0..needed {
        let mut c = code;
        for &slot in &slots {
            entries[slot] = undigit(r, (c % base) as usize);
            c /= base;
        }
        outputs.push(f.eval_entries(&entries));
    }
    let mut freq = BTreeMap::new();
    for &o in &outputs {
        *freq.entry(o).or_insert(0u64) += 1;
    }
    let default = freq.iter().max_by_key(|&(o, n)| (*n, std::cmp::Reverse(*o))).map_or(0, |(o, _)| *o);
    let mut cases = Vec::new();
    for (code, &out) in outputs.iter().enumerate() {
        if out == default {
            continue;
        }
        let mut c = code as u64;
        let atoms = offs
            .iter()
            .map(|&o| {
                let value = undigit(r, (c % base) as usize);
                c /= base;
                Cond::Atom(Atom { offset: vec![o], cmp: Cmp::Eq, value })
            })
            .collect::<Vec<_>>();
        let cond = if atoms.len() == 1 { atoms.into_iter().next().unwrap() } else { Cond::And(atoms) };
        cases.push(Case { cond, output: out });
    }
    Ok(RuleProgram { dim: 1, radius: r, cases, default })
}
