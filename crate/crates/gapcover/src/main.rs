use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapcover::generate::{acceptance_corpus, gen_random, Kind, Params};
use gapcover::run::{self, batch_json, exit_code, outcome_json, write_csv, Flags, EXIT_USAGE};
use gapcover::spec::{parse_items, parse_rat, Item};
use gapcover_core::exactalg::Rat;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "gapcover", version, about = "Cover symmetric convex progressions by certified GAPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the covering pipeline and re-verify its output.
    Cover(Common),
    /// Verify claimed covers given as {"instance": ..., "gap": ...}.
    Verify(Common),
    /// Cover, then check the projection chain for a functional.
    Project {
        #[command(flatten)]
        common: Common,
        /// Comma-separated integer coefficients; defaults to the instance's "phi".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi: Option<Vec<i64>>,
    },
    /// Generate seeded random instances.
    Random {
        #[arg(long, default_value = "lattice-ball")]
        kind: Kind,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances, with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 3)]
        h: i64,
        #[arg(long, default_value = "4", value_parser = rat_arg)]
        radius: Rat,
        #[arg(long, default_value_t = 6)]
        points: usize,
        #[arg(long, default_value_t = 5)]
        bound: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run many instances and aggregate.
    Batch {
        #[command(flatten)]
        common: Common,
        /// Use the built-in 150-instance corpus instead of --input.
        #[arg(long)]
        corpus: bool,
        #[arg(long)]
        fail_fast: bool,
        #[arg(long)]
        allow_skip: bool,
        /// Run items one at a time.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Input JSON file; `-` or absent reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = rat_arg)]
    eps: Option<Rat>,
    #[arg(long)]
    budget: Option<u128>,
    /// Also write one CSV row per instance.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Include wall-clock timings in the JSON output.
    #[arg(long)]
    timings: bool,
}

fn rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s).ok_or_else(|| format!("invalid rational {s:?}"))
}

fn read_input(path: &Option<PathBuf>) -> io::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: &Option<PathBuf>, v: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn load(common: &Common) -> Result<Vec<Item>, ExitCode> {
    let text = read_input(&common.input).map_err(usage)?;
    parse_items(&text).map_err(usage)
}

fn flags(common: &Common) -> Flags {
    Flags {
        eps: common.eps.clone(),
        budget: common.budget,
        timings: common.timings,
        ..Flags::default()
    }
}

fn finish(common: &Common, items: &[Item], flags: &Flags) -> ExitCode {
    let outcomes = run::run_batch(items, flags);
    let v = if outcomes.len() == 1 {
        outcome_json(&outcomes[0], flags.timings)
    } else {
        batch_json(&outcomes, flags.timings)
    };
    if let Err(e) = write_output(&common.output, &v) {
        return usage(e);
    }
    if let Some(p) = &common.csv {
        let res = fs::File::create(p).map_err(csv::Error::from).and_then(|f| write_csv(f, &outcomes));
        if let Err(e) = res {
            return usage(e);
        }
    }
    for (i, o) in outcomes.iter().enumerate() {
        if o.status() != run::Status::Certified {
            let detail = match (&o.error, o.witness()) {
                (Some(e), _) => e.to_string(),
                (None, Some(w)) => format!("witness {w:?}"),
                (None, None) => "check failed".to_string(),
            };
            eprintln!("instance {i} ({}): {}: {detail}", o.item, o.status().name());
        }
    }
    ExitCode::from(exit_code(&outcomes, flags.allow_skip) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Cover(common) => {
            let mut items = match load(&common) {
                Ok(i) => i,
                Err(c) => return c,
            };
            for it in &mut items {
                it.gap = None;
            }
            finish(&common, &items, &flags(&common))
        }
        Command::Verify(common) => {
            let items = match load(&common) {
                Ok(i) => i,
                Err(c) => return c,
            };
            if let Some(i) = items.iter().position(|it| it.gap.is_none()) {
                return usage(format!("item {i} has no \"gap\" to verify"));
            }
            finish(&common, &items, &flags(&common))
        }
        Command::Project { common, phi } => {
            let items = match load(&common) {
                Ok(i) => i,
                Err(c) => return c,
            };
            let mut f = flags(&common);
            f.phi = phi;
            for (i, it) in items.iter().enumerate() {
                match it.instance.phi.as_ref().or(f.phi.as_ref()) {
                    None => return usage(format!("item {i}: no functional (use --phi)")),
                    Some(p) if p.len() != it.instance.dim => {
                        return usage(format!("item {i}: phi has {} entries, expected {}", p.len(), it.instance.dim))
                    }
                    Some(_) => {}
                }
            }
            finish(&common, &items, &f)
        }
        Command::Random { kind, dim, seed, count, h, radius, points, bound, output } => {
            let p = Params { h, radius, points, bound };
            let mut specs = Vec::new();
            for s in seed..seed + count {
                match gen_random(kind, dim, s, &p) {
                    Ok(spec) => specs.push(spec.to_json()),
                    Err(e) => return usage(e),
                }
            }
            let v = if specs.len() == 1 { specs.remove(0) } else { Value::Array(specs) };
            match write_output(&output, &v) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage(e),
            }
        }
        Command::Batch { common, corpus, fail_fast, allow_skip, sequential } => {
            let items = if corpus {
                acceptance_corpus()
                    .into_iter()
                    .map(|instance| Item { instance, gap: None })
                    .collect()
            } else {
                match load(&common) {
                    Ok(i) => i,
                    Err(c) => return c,
                }
            };
            let mut f = flags(&common);
            f.fail_fast = fail_fast;
            f.allow_skip = allow_skip;
            f.sequential = sequential;
            let outcomes = run::run_batch(&items, &f);
            if let Err(e) = write_output(&common.output, &batch_json(&outcomes, f.timings)) {
                return usage(e);
            }
            if let Some(p) = &common.csv {
                let res = fs::File::create(p).map_err(csv::Error::from).and_then(|w| write_csv(w, &outcomes));
                if let Err(e) = res {
                    return usage(e);
                }
            }
            ExitCode::from(exit_code(&outcomes, allow_skip) as u8)
        }
    }
}
