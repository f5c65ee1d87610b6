//! Report envelope and file emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use relhyp_core::constants::ConstantsLedger;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Counterexample,
    ConfigError,
    CapExceeded,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Counterexample => 1,
            Status::ConfigError => 2,
            Status::CapExceeded => 3,
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub command: &'a str,
    pub config_hash: String,
    pub config: &'a Value,
    pub status: Status,
    pub ledger: Option<&'a ConstantsLedger>,
    pub result: Value,
}

/// Hex SHA-256 of the canonical JSON of `config`.
pub fn config_hash(config: &Value) -> String {
    let text = serde_json::to_string(config).expect("JSON values serialise");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub struct Emitted {
    pub json: PathBuf,
    pub text: PathBuf,
    pub csv: Option<PathBuf>,
}

pub fn emit(
    out: &Path,
    report: &Report,
    summary: &str,
    csv: Option<&str>,
) -> std::io::Result<Emitted> {
    fs::create_dir_all(out)?;
    let json = out.join(format!("{}.json", report.command));
    let mut body = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    body.push('\n');
    fs::write(&json, body)?;
    let text = out.join(format!("{}.txt", report.command));
    let mut head = String::new();
    let _ = writeln!(head, "command  {}", report.command);
    let _ = writeln!(head, "config   {}", report.config_hash);
    let _ = writeln!(head, "status   {:?} (exit {})", report.status, report.status.exit_code());
    if let Some(l) = report.ledger {
        let _ = writeln!(head, "eta      {}", l.eta);
    }
    head.push('\n');
    head.push_str(summary);
    fs::write(&text, head)?;
    let csv = match csv {
        Some(c) => {
            let p = out.join(format!("{}.csv", report.command));
            fs::write(&p, c)?;
            Some(p)
        }
        None => None,
    };
    Ok(Emitted { json, text, csv })
}

/// Rows to CSV text.
pub fn to_csv<R: Serialize>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialise");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}

/// Human table of a constants ledger with the radius behind every entry.
pub fn ledger_table(l: &ConstantsLedger) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<18} {:>6} {:>7}  note", "constant", "value", "radius");
    let _ = writeln!(s, "{:<18} {:>6} {:>7}", "lambda_0", l.lambda_0, "-");
    let _ = writeln!(s, "{:<18} {:>6} {:>7}", "delta", l.delta.value, l.delta.radius);
    for (key, e) in &l.epsilon {
        let note = if e.stable { "stable" } else { "unstable" };
        let _ = writeln!(
            s,
            "{:<18} {:>6} {:>7}  {note}",
            format!("eps({key})"),
            e.estimate.value,
            e.estimate.radius
        );
    }
    let note = if l.d_hat_stable { "stable" } else { "unstable" };
    let _ = writeln!(s, "{:<18} {:>6} {:>7}  {note}", "D", l.d_hat.value, l.d_hat.radius);
    let _ = writeln!(s, "{:<18} {:>6} {:>7}", "tau", l.tau, "-");
    let _ = writeln!(s, "{:<18} {:>6} {:>7}  bounds {:?}", "eta", l.eta, "-", l.eta_bounds);
    s
}
