//! `relhyp`: batch runner for the desk-scale combination experiments.

mod commands;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use relhyp_core::amalgam::Mode;
use relhyp_core::{Caps, Error};
use serde::Serialize;

use report::{config_hash, emit, Report, Status};

#[derive(Parser, Debug)]
#[command(name = "relhyp", version, about = "Combination experiments in Z^n * ... * F_r")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    /// Group file (JSON); the built-in Z^2 * <t> instance when absent.
    #[arg(long, global = true)]
    group: Option<PathBuf>,
    /// Scan radius.
    #[arg(long, global = true)]
    radius: Option<u32>,
    #[arg(long, global = true, default_value_t = 4)]
    max_syllables: usize,
    #[arg(long, global = true, default_value_t = 3)]
    letter_bound: u32,
    #[arg(long, global = true, default_value = "theorem-1")]
    mode: String,
    /// Output directory.
    #[arg(long, global = true, default_value = "relhyp-out")]
    out: PathBuf,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Radius cap for every scan (after RELHYP_CAP_OVERRIDE).
    #[arg(long, global = true)]
    cap: Option<u32>,
    /// Radius for the constants ledger; the default ledger radii when absent.
    #[arg(long, global = true)]
    ledger_radius: Option<u32>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// Ball and sphere sizes in the word metric.
    Ball {
        #[arg(long)]
        list: bool,
    },
    /// Relative distance and relative geodesics of a word.
    Geodesics {
        #[arg(long)]
        word: String,
    },
    /// H-components of a path given as a sequence of letters.
    Components {
        #[arg(long)]
        path: String,
        /// Merge same-coset edges regardless of tag.
        #[arg(long)]
        coset: bool,
        #[arg(long, default_value_t = 1)]
        lambda: i64,
        #[arg(long, default_value_t = 0)]
        c: i64,
    },
    /// The constants ledger.
    Constants,
    /// Quasiconvexity constant of a subgroup.
    Sigma {
        #[arg(long)]
        subgroup: String,
    },
    /// Quasiconvexity of an intersection.
    Intersect {
        #[arg(long)]
        q: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        sigma: Option<u64>,
    },
    /// Maximal parabolic subgroups up to conjugacy.
    Parabolics {
        #[arg(long)]
        subgroup: String,
        #[arg(long)]
        sigma: Option<u64>,
    },
    /// Full combination pipeline.
    Combine {
        #[arg(long)]
        q: String,
        /// `R` (theorem-1) or `Q2` (theorem-2).
        #[arg(long)]
        r: Option<String>,
        /// Peripheral index, from 1.
        #[arg(long, default_value_t = 1)]
        peripheral: usize,
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        skip_sigma: bool,
    },
    /// Iterated doubles along a peripheral.
    Double {
        #[arg(long)]
        q: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        peripheral: usize,
    },
    /// Fully quasiconvex overgroup.
    FullyQc {
        #[arg(long)]
        q: String,
    },
    /// Translation axis of an amalgam word.
    Axis {
        #[arg(long)]
        q: String,
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value_t = 1)]
        peripheral: usize,
        #[arg(long)]
        h: Option<String>,
        /// Letters `L:word | R:word`; `C` in an exponent stands for the constant C.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 3)]
        power_bound: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Geodesics { .. } => "geodesics",
            Command::Components { .. } => "components",
            Command::Constants => "constants",
            Command::Sigma { .. } => "sigma",
            Command::Intersect { .. } => "intersect",
            Command::Parabolics { .. } => "parabolics",
            Command::Combine { .. } => "combine",
            Command::Double { .. } => "double",
            Command::FullyQc { .. } => "fully-qc",
            Command::Axis { .. } => "axis",
        }
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::CapExceeded { .. } => Status::CapExceeded,
        Error::RankCondition(_) => Status::Counterexample,
        _ => Status::ConfigError,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let name = cli.command.name();
    let mut caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.global.cap {
        caps.ball_radius = n;
        caps.relative_radius = n;
        caps.sigma_radius = n;
    }
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let group_text = match &cli.global.group {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let config = serde_json::json!({
        "command": cli.command,
        "group": group_text.as_deref().map(|t| serde_json::from_str::<serde_json::Value>(t).unwrap_or(serde_json::Value::Null)),
        "radius": cli.global.radius,
        "max_syllables": cli.global.max_syllables,
        "letter_bound": cli.global.letter_bound,
        "mode": cli.global.mode,
        "threads": cli.global.threads,
        "ledger_radius": cli.global.ledger_radius,
        "caps": caps,
    });
    let outcome = cli
        .global
        .mode
        .parse::<Mode>()
        .and_then(|mode| {
            let ctx = commands::Context::new(group_text.as_deref(), &cli.global_settings(mode), caps)?;
            commands::run(&ctx, &cli.command)
        });
    let failed = outcome.is_err();
    let (status, result, summary, csv, ledger) = match outcome {
        Ok(o) => (o.status, o.result, o.summary, o.csv, o.ledger),
        Err(e) => {
            let status = status_of(&e);
            eprintln!("error: {e}");
            (
                status,
                serde_json::json!({ "error": e.to_string() }),
                format!("error: {e}\n"),
                None,
                None,
            )
        }
    };
    let report = Report {
        command: name,
        config_hash: config_hash(&config),
        config: &config,
        status,
        ledger: ledger.as_ref(),
        result,
    };
    match emit(&cli.global.out, &report, &summary, csv.as_deref()) {
        Ok(files) => {
            let mut text = if failed { String::new() } else { summary };
            text.push_str(&format!("report: {}\nsummary: {}\n", files.json.display(), files.text.display()));
            if let Some(c) = files.csv {
                text.push_str(&format!("table: {}\n", c.display()));
            }
            // a closed pipe on stdout must not change the exit status
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
        Err(e) => {
            eprintln!("error: cannot write reports to {}: {e}", cli.global.out.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(status.exit_code())
}

impl Cli {
    fn global_settings(&self, mode: Mode) -> commands::Settings {
        commands::Settings {
            radius: self.global.radius,
            max_syllables: self.global.max_syllables,
            letter_bound: self.global.letter_bound,
            mode,
            ledger_radius: self.global.ledger_radius,
        }
    }
}
