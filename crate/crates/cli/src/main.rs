//! `coset-walk`: explore coset spaces of the rank-2 free group, run the
//! entropy estimators, and export diagnostics.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 bad
//! arguments, 3 interning budget exceeded. The env var `COSETWALK_BUDGET`
//! overrides the default budget. All stochastic commands either take a seed
//! or generate one and record it in their output; rerunning with the
//! recorded seed reproduces the output byte-for-byte for any `--threads`.

mod parse;
mod svg;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use coset_walk_core::{
    expected_returns, hitting_probability, irs_entropy_estimate, rank2_measure, return_probabilities,
    shadows_of_root, tail_return_estimate, CosetSpace, Error as CoreError, IrsSpec, Letter, Word,
    DEFAULT_BUDGET,
};

const CSV_VERSION: &str = "# coset-walk v1";

#[derive(Parser)]
#[command(name = "coset-walk", version, about = "Random walks and entropy on coset spaces of the free group")]
struct Cli {
    /// Cap the number of worker threads; output is identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BallFormat {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Export the ball of a space around its root.
    Ball {
        /// Space spec: trivial | full | zq:a|b | kn:N[@a^i|@b^i] | cover:kn=N,p=P,seed=S[,root=a^i|b^i]
        #[arg(long)]
        space: String,
        #[arg(long)]
        radius: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: BallFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate IRS-averaged entropy increments by exact DP per sample.
    Entropy {
        /// IRS spec: trivial | full | zmix | conj-kn:N | perc-kn:N,p=P
        #[arg(long)]
        irs: String,
        #[arg(long, default_value_t = 12)]
        nmax: u32,
        #[arg(long, default_value_t = 200)]
        samples: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy of the percolation family across a p-grid, coupled by a
    /// shared master seed.
    Sweep {
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Comma-separated strictly increasing grid; default 21 even points.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 10)]
        steps: u32,
        #[arg(long, default_value_t = 200)]
        samples: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a self-contained SVG chart of estimate vs p.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Return-time diagnostics: exact R_m, tail returns, expected returns.
    Returns {
        #[arg(long)]
        space: String,
        /// Start vertex as a word (letters aAbB, 'e' for the root).
        #[arg(long, default_value = "e")]
        start: String,
        /// Emit exact R_1..R_M by sparse DP.
        #[arg(long, value_name = "M")]
        exact: Option<u32>,
        /// Estimate the probability of a return at any time in [N, horizon].
        #[arg(long, value_name = "N")]
        tail: Option<u32>,
        /// Estimate the expected number of visits in [0, horizon].
        #[arg(long)]
        expected: bool,
        #[arg(long, default_value_t = 200)]
        horizon: u32,
        #[arg(long, default_value_t = 10_000)]
        walks: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probability that an n-step walk ends in the shadow behind an anchor.
    Hitting {
        #[arg(long)]
        space: String,
        #[arg(long, default_value = "e")]
        start: String,
        /// Anchor letter (a, A, b, or B) naming a root neighbor.
        #[arg(long)]
        anchor: char,
        #[arg(long, default_value_t = 30)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        walks: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-module invariant suite.
    Verify,
}

fn main() {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("thread pool already initialized");
    }
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<parse::ParseError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<CoreError>() {
        Some(core) if is_budget(core) => 3,
        Some(
            CoreError::BadWord(_)
            | CoreError::InvalidKnParameter(_)
            | CoreError::ConjugateOutOfRange { .. }
            | CoreError::InvalidProbability(_),
        ) => 2,
        _ => 1,
    }
}

fn is_budget(e: &CoreError) -> bool {
    match e {
        CoreError::BudgetExceeded { .. } => true,
        CoreError::Sample { source, .. } => is_budget(source),
        _ => false,
    }
}

fn budget() -> Result<usize> {
    match std::env::var("COSETWALK_BUDGET") {
        Ok(v) => v.parse().with_context(|| format!("bad COSETWALK_BUDGET value '{v}'")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// A seed for commands invoked without one; always recorded in the output.
fn generate_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .expect("clock before epoch")
        .as_nanos() as u64;
    let mut z = nanos.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^ (z >> 31)
}

fn write_out(out: Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(&path, content).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn build_space(spec: &str, budget: usize) -> Result<CosetSpace> {
    let spec = parse::parse_space(spec)?;
    Ok(spec.build(budget)?)
}

fn start_vertex(space: &CosetSpace, start: &str) -> Result<coset_walk_core::VertexId> {
    let word = Word::parse(start)?;
    Ok(space.apply_word(space.root(), &word)?)
}

fn run(command: Command) -> Result<i32> {
    let budget = budget()?;
    match command {
        Command::Ball { space, radius, format, out } => {
            let space = build_space(&space, budget)?;
            let ball = space.ball(radius)?;
            let content = match format {
                BallFormat::Dot => ball.to_dot(),
                BallFormat::Json => format!("{:#}\n", ball.to_json()),
            };
            write_out(out, &content)?;
        }
        Command::Entropy { irs, nmax, samples, seed, out } => {
            let irs = parse::parse_irs(&irs)?;
            let seed = seed.unwrap_or_else(generate_seed);
            let est = irs_entropy_estimate(&irs, &rank2_measure(), nmax, samples, seed, budget)?;
            write_out(out, &format!("{}\n", serde_json::to_string_pretty(&est)?))?;
        }
        Command::Sweep { n, grid, steps, samples, seed, out, svg } => {
            let grid = match grid {
                Some(g) => parse::parse_grid(&g)?,
                None => (0..21).map(|i| i as f64 / 20.0).collect(),
            };
            let seed = seed.unwrap_or_else(generate_seed);
            let mu = rank2_measure();
            let mut rows = Vec::with_capacity(grid.len());
            for &p in &grid {
                let est = irs_entropy_estimate(&IrsSpec::PercolationKn { n, p }, &mu, steps, samples, seed, budget)?;
                let se = est.stderr.last().copied().unwrap_or(0.0);
                rows.push((p, est.estimate, se));
            }
            let mut csv = format!("{CSV_VERSION}\nn,p,seed,samples,n_steps,estimate,stderr\n");
            for (p, est, se) in &rows {
                csv.push_str(&format!("{n},{p},{seed},{samples},{steps},{est},{se}\n"));
            }
            write_out(out, &csv)?;
            if let Some(path) = svg {
                let chart = svg::sweep_chart(&rows, &format!("perc-kn:{n} entropy vs p (steps={steps})"));
                fs::write(&path, chart).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Returns { space, start, exact, tail, expected, horizon, walks, seed, out } => {
            if exact.is_none() && tail.is_none() && !expected {
                bail!(parse::ParseError("returns needs at least one of --exact, --tail, --expected".into()));
            }
            let cs = build_space(&space, budget)?;
            let v = start_vertex(&cs, &start)?;
            let seed = seed.unwrap_or_else(generate_seed);
            let mu = rank2_measure();
            let mut csv = format!("{CSV_VERSION}\nspace,start,quantity,n,horizon,walks,seed,estimate,stderr\n");
            if let Some(m) = exact {
                let r = return_probabilities(&cs, v, &mu, m)?;
                for (i, x) in r.iter().enumerate() {
                    let m = i + 1;
                    csv.push_str(&format!("{space},{start},exact_R,{m},{m},0,{seed},{x},0\n"));
                }
            }
            if let Some(n) = tail {
                let e = tail_return_estimate(&cs, v, n, horizon, walks, seed);
                csv.push_str(&format!(
                    "{space},{start},tail_return,{n},{horizon},{walks},{seed},{},{}\n",
                    e.estimate, e.stderr
                ));
            }
            if expected {
                let e = expected_returns(&cs, v, horizon, walks, seed);
                csv.push_str(&format!(
                    "{space},{start},expected_returns,0,{horizon},{walks},{seed},{},{}\n",
                    e.estimate, e.stderr
                ));
            }
            write_out(out, &csv)?;
        }
        Command::Hitting { space, start, anchor, n, walks, seed, out } => {
            let cs = build_space(&space, budget)?;
            let v = start_vertex(&cs, &start)?;
            let letter = Letter::from_symbol(anchor)
                .ok_or_else(|| parse::ParseError(format!("bad anchor letter '{anchor}'")))?;
            let target = cs.step(cs.root(), letter)?;
            let shadows = shadows_of_root(&cs)?;
            let Some(sh) = shadows.iter().find(|sh| sh.anchor == target) else {
                bail!("letter '{anchor}' loops at the root; no shadow there");
            };
            let seed = seed.unwrap_or_else(generate_seed);
            let e = hitting_probability(&cs, v, sh, n, walks, seed);
            let mut csv = format!("{CSV_VERSION}\nspace,start,quantity,n,horizon,walks,seed,estimate,stderr\n");
            csv.push_str(&format!(
                "{space},{start},hitting:{anchor},{n},{n},{walks},{seed},{},{}\n",
                e.estimate, e.stderr
            ));
            write_out(out, &csv)?;
        }
        Command::Verify => {
            let results = coset_walk_core::run_all(budget)?;
            let mut failed = 0;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                if !r.passed {
                    failed += 1;
                }
            }
            println!("{} checks, {failed} failed", results.len());
            if failed > 0 {
                return Ok(1);
            }
        }
    }
    Ok(0)
}
