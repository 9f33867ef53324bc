use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qmod_core::eta::{curve, LEVELS};
use qmod_core::spans::{build_h, build_psi};
use qmod_core::verify::{
    all_levels, CheckReport, GridConfig, GridOutcome, PrimeSelection, Verifier, DEFAULT_PREC_CEILING,
};
use qmod_core::{catalog_form, Form, QSeries};

#[derive(Parser)]
#[command(name = "qmod", version, about = "Exact q-expansions of CM eta quotients and checks of their p-adic congruences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the q-expansion of a catalog form, `H<m>@<level>` or `psi<p>@<level>`.
    Expand {
        #[arg(long)]
        form: String,
        #[arg(long)]
        prec: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print H_m, the form with principal part q^-m.
    BuildH {
        #[arg(long)]
        level: u64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        prec: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print psi_p = q^-p + C_p q + ...
    BuildPsi {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        prec: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the valuation and limit checks over curves, primes and m.
    #[command(group(ArgGroup::new("curves").required(true).args(["curve", "all"])))]
    Verify {
        #[arg(long)]
        curve: Option<u64>,
        #[arg(long)]
        all: bool,
        /// Comma-separated primes, or `auto:B` for every prime up to B.
        #[arg(long, default_value = "auto:50")]
        primes: String,
        #[arg(long)]
        m_max: Option<u32>,
        #[arg(long = "K", default_value_t = 20)]
        k: i64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a single identity check.
    Check {
        #[arg(value_enum)]
        identity: Identity,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        prec: Option<i64>,
        #[arg(long = "K")]
        k: Option<i64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    ThetaPsi,
    Residue,
    Twist,
    Hecke,
    Congruence,
    Support,
    Nondivisibility,
    Valuation,
    Limit,
}

enum Target {
    Catalog(Form),
    H { m: i64, level: u64 },
    Psi { p: u64, level: u64 },
}

impl FromStr for Target {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        if let Some((name, level)) = s.split_once('@') {
            let level: u64 = level.parse().with_context(|| format!("bad level in {s:?}"))?;
            if let Some(m) = name.strip_prefix('H') {
                return Ok(Target::H { m: m.parse().with_context(|| format!("bad index in {s:?}"))?, level });
            }
            if let Some(p) = name.strip_prefix("psi") {
                return Ok(Target::Psi { p: p.parse().with_context(|| format!("bad prime in {s:?}"))?, level });
            }
            bail!("unknown form {s:?}");
        }
        Ok(Target::Catalog(s.parse()?))
    }
}

fn render_series(name: &str, f: &QSeries, format: Format) -> String {
    match format {
        Format::Table => {
            let mut out = String::new();
            for (e, c) in f.terms() {
                writeln!(out, "{e} {c}").unwrap();
            }
            out
        }
        Format::Json => {
            let coeffs: Vec<Value> = f.terms().map(|(e, c)| json!([e, c.to_string()])).collect();
            let mut s = serde_json::to_string(&json!({ "form": name, "prec": f.prec(), "coeffs": coeffs })).unwrap();
            s.push('\n');
            s
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn prec_ceiling() -> anyhow::Result<i64> {
    match std::env::var("QMOD_PREC_CEILING") {
        Ok(v) => {
            let c: i64 = v.trim().parse().with_context(|| format!("QMOD_PREC_CEILING={v:?} is not an integer"))?;
            if c < 1 {
                bail!("QMOD_PREC_CEILING must be positive");
            }
            Ok(c)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_PREC_CEILING),
        Err(e) => Err(anyhow!("QMOD_PREC_CEILING: {e}")),
    }
}

fn require_prec(prec: i64) -> anyhow::Result<()> {
    if prec < 1 {
        bail!("--prec must be at least 1");
    }
    let ceiling = prec_ceiling()?;
    if prec > ceiling {
        bail!("--prec {prec} exceeds the precision ceiling {ceiling}");
    }
    Ok(())
}

fn parse_primes(s: &str) -> anyhow::Result<PrimeSelection> {
    if let Some(bound) = s.strip_prefix("auto:") {
        return Ok(PrimeSelection::UpTo(bound.parse().with_context(|| format!("bad bound in {s:?}"))?));
    }
    let primes = s
        .split(',')
        .map(|p| p.trim().parse::<u64>().with_context(|| format!("bad prime {p:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if primes.is_empty() {
        bail!("--primes is empty");
    }
    Ok(PrimeSelection::List(primes))
}

fn params_line(r: &CheckReport) -> String {
    let v = serde_json::to_value(&r.params).unwrap();
    v.as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn report_table(r: &CheckReport, detailed: bool) -> String {
    let mut out = format!("{} {} {}\n", if r.passed { "PASS" } else { "FAIL" }, r.check_id, params_line(r));
    if detailed || !r.passed {
        for (key, expected) in &r.expected {
            writeln!(out, "  {key}: expected {expected}, actual {}", r.actual[key]).unwrap();
        }
        if !r.notes.is_empty() {
            writeln!(out, "  notes: {}", r.notes).unwrap();
        }
    }
    out
}

fn render_grid(outcome: &GridOutcome, format: Format) -> String {
    match format {
        Format::Table => {
            let mut out = String::new();
            for r in &outcome.reports {
                out.push_str(&report_table(r, false));
            }
            for s in &outcome.skipped {
                let m = s.m.map(|m| format!(" m={m}")).unwrap_or_default();
                writeln!(out, "SKIP level={} p={}{m}: {}", s.level, s.p, s.reason).unwrap();
            }
            writeln!(out, "{}", outcome.summary()).unwrap();
            out
        }
        Format::Json => {
            let v = json!({
                "summary": outcome.summary(),
                "reports": outcome.reports,
                "skipped": outcome.skipped,
            });
            let mut s = serde_json::to_string_pretty(&v).unwrap();
            s.push('\n');
            s
        }
    }
}

fn need<T>(value: Option<T>, flag: &str, identity: &str) -> anyhow::Result<T> {
    value.ok_or_else(|| anyhow!("check {identity} needs --{flag}"))
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    identity: Identity,
    level: Option<u64>,
    p: Option<u64>,
    m: Option<u32>,
    n: Option<u32>,
    prec: Option<i64>,
    k: Option<i64>,
) -> anyhow::Result<CheckReport> {
    let v = Verifier::new();
    let name = identity.to_possible_value().unwrap().get_name().to_string();
    let name = name.as_str();
    if let Some(prec) = prec {
        require_prec(prec)?;
    }
    let report = match identity {
        Identity::ThetaPsi => {
            v.check_theta_psi(need(level, "level", name)?, need(p, "p", name)?, prec.unwrap_or(30), m.unwrap_or(1))
        }
        Identity::Residue => v.check_residue(need(level, "level", name)?, need(p, "p", name)?, prec.unwrap_or(30)),
        Identity::Twist => {
            let samples = match (p, m) {
                (Some(p), m) => vec![(p, m.unwrap_or(0))],
                (None, _) => vec![(3, 0), (7, 0)],
            };
            v.check_twist_consistency(prec.unwrap_or(200), &samples, k.unwrap_or(50))
        }
        Identity::Hecke => v.check_hecke_decomposition(
            need(level, "level", name)?,
            need(p, "p", name)?,
            n.unwrap_or(1),
            prec.unwrap_or(30),
        ),
        Identity::Congruence => {
            v.check_congruence(need(level, "level", name)?, need(p, "p", name)?, m.unwrap_or(1))
        }
        Identity::Support => v.check_support(curve(need(level, "level", name)?)?, prec.unwrap_or(500)),
        Identity::Nondivisibility => v.check_nondivisibility(curve(need(level, "level", name)?)?, need(p, "p", name)?),
        Identity::Valuation => {
            v.check_valuation(curve(need(level, "level", name)?)?, need(p, "p", name)?, m.unwrap_or(0))
        }
        Identity::Limit => v.check_limit(
            curve(need(level, "level", name)?)?,
            need(p, "p", name)?,
            m.unwrap_or(0),
            k.unwrap_or(20),
        ),
    };
    Ok(report?)
}

/// `Ok(passed)`; errors are usage or configuration problems.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Expand { form, prec, format, out } => {
            require_prec(prec)?;
            let series = match form.parse::<Target>()? {
                Target::Catalog(f) => catalog_form(f, prec)?,
                Target::H { m, level } => build_h(level, m, prec)?,
                Target::Psi { p, level } => build_psi(level, p, prec)?.series,
            };
            emit(&render_series(&form, &series, format), out.as_ref())?;
        }
        Command::BuildH { level, m, prec, format, out } => {
            require_prec(prec)?;
            let h = build_h(level, m, prec)?;
            emit(&render_series(&format!("H{m}@{level}"), &h, format), out.as_ref())?;
        }
        Command::BuildPsi { level, p, prec, format, out } => {
            require_prec(prec)?;
            let psi = build_psi(level, p, prec)?;
            emit(&render_series(&format!("psi{p}@{level}"), &psi.series, format), out.as_ref())?;
        }
        Command::Verify { curve: level, all, primes, m_max, k, format, out } => {
            if k < 1 {
                bail!("--K must be positive");
            }
            let levels = match (level, all) {
                (_, true) => all_levels(),
                (Some(l), false) if LEVELS.contains(&l) => vec![l],
                (Some(l), false) => bail!("no curve of level {l}; choose one of {LEVELS:?}"),
                (None, false) => bail!("pass --curve N or --all"),
            };
            let config = GridConfig { levels, primes: parse_primes(&primes)?, m_max, k, prec_ceiling: prec_ceiling()? };
            let outcome = Verifier::new().run_theorem_grid(&config)?;
            emit(&render_grid(&outcome, format), out.as_ref())?;
            if matches!(format, Format::Json) || out.is_some() {
                eprintln!("{}", outcome.summary());
            }
            return Ok(outcome.all_passed());
        }
        Command::Check { identity, level, p, m, n, prec, k, format, out } => {
            let report = run_check(identity, level, p, m, n, prec, k)?;
            let text = match format {
                Format::Table => report_table(&report, true),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).unwrap();
                    s.push('\n');
                    s
                }
            };
            emit(&text, out.as_ref())?;
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
