//! `hyperres`: compute resonance sets, counting tables and Weyl-law checks
//! and write them as CSV/JSON artifacts with a run manifest.

use clap::{Args, Parser, Subcommand};
use hyperres::counting::{contour_check, sector_report, weyl_report, CountingTable};
use hyperres::phase::IndicatorTable;
use hyperres::potential::PotentialConfig;
use hyperres::resonance::{all_resonances, ResonanceSet};
use hyperres::{Error, Potential, VERSION};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "hyperres", version, about = "Resonances of radial potentials on hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resonances in the disk |s - n/2| ≤ tmax.
    Resonances(Common),
    /// Counting function table.
    Count {
        #[command(flatten)]
        common: Common,
        /// Number of sample radii.
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Indicator function table.
    Indicator {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 181)]
        points: usize,
    },
    /// Weyl-law fit.
    Weyl(Common),
    /// Sectorial count against its prediction.
    Sector {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta1: f64,
        #[arg(long)]
        theta2: f64,
        /// Radius of the count (defaults to tmax).
        #[arg(long)]
        t: Option<f64>,
    },
    /// Integrated count against the boundary integral of log|τ|.
    ContourCheck {
        #[command(flatten)]
        common: Common,
        /// Radius (snapped away from the half-integers).
        #[arg(long)]
        a: f64,
    },
    /// Fast invariant checks; exit status 0 iff all pass.
    Selftest {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Dimension parameter: the space is H^{n+1}.
    #[arg(long)]
    n: u32,
    /// Potential: JSON file, JSON object, or inline `step:c=1,r0=1`.
    #[arg(long)]
    potential: String,
    #[arg(long, default_value_t = 40.0)]
    tmax: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for randomized sampling (unused by deterministic commands).
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Compute(String, Error),
    Io(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn parse_potential(n: u32, arg: &str) -> Result<Potential, Failure> {
    let usage = |e: Error| Failure::Usage(format!("invalid potential: {e}"));
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?
    } else {
        arg.to_string()
    };
    let text = text.trim();
    if text.starts_with('{') {
        let cfg: PotentialConfig =
            serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid potential JSON: {e}")))?;
        Potential::from_config(n, &cfg).map_err(usage)
    } else {
        Potential::parse_inline(n, text).map_err(usage)
    }
}

fn compute<T>(module: &str, r: hyperres::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Compute(module.to_string(), e))
}

fn hash_config(cfg: &Value) -> String {
    let mut h = Sha256::new();
    h.update(cfg.to_string().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Resonance set for a config, reusing `HYPERRES_CACHE/<hash>.json` when present.
fn resonance_set(pot: &Potential, c: &Common) -> Result<(ResonanceSet, bool), Failure> {
    let key = json!({
        "n": pot.n,
        "potential": pot.to_config(),
        "tmax": c.tmax,
        "tol": c.tol,
        "version": VERSION,
    });
    let cache = std::env::var_os("HYPERRES_CACHE").map(PathBuf::from);
    let path = cache.as_ref().map(|d| d.join(format!("{}.json", hash_config(&key))));
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(set) = serde_json::from_str::<ResonanceSet>(&text) {
                return Ok((set, true));
            }
        }
    }
    let set = compute("resonance_finder", all_resonances(pot, c.tmax, c.tol))?;
    if let (Some(dir), Some(p)) = (&cache, &path) {
        std::fs::create_dir_all(dir)?;
        std::fs::write(p, serde_json::to_string(&set).map_err(|e| Failure::Io(e.to_string()))?)?;
    }
    Ok((set, false))
}

fn certificate(set: &ResonanceSet) -> Value {
    let unrefined = set.resonances.iter().filter(|r| !r.refined).count();
    json!({
        "l_max_used": set.l_max_used,
        "empty_margin_modes": set.certificate,
        "winding_mismatches": set.mismatches,
        "unrefined_zeros": unrefined,
        "evaluations": set.evaluations,
        "eigenvalue_side_zeros": set.eigenvalues.len(),
    })
}

fn write(out: &Path, name: &str, body: &str) -> Result<String, Failure> {
    std::fs::create_dir_all(out)?;
    let p = out.join(name);
    std::fs::write(&p, body)?;
    Ok(p.display().to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

struct Run {
    config: Value,
    outputs: Vec<String>,
    certificates: Value,
    ok: bool,
}

fn common_config(cmd: &str, pot: &Potential, c: &Common) -> Value {
    json!({
        "command": cmd,
        "n": pot.n,
        "potential": pot.to_config(),
        "tmax": c.tmax,
        "tol": c.tol,
        "seed": c.seed,
    })
}

fn setup(cmd: &str, c: &Common) -> Result<(Potential, Value), Failure> {
    if !(c.tmax > 0.0 && c.tmax.is_finite()) {
        return Err(Failure::Usage(format!("--tmax must be positive, got {}", c.tmax)));
    }
    if !(c.tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", c.tol)));
    }
    let pot = parse_potential(c.n, &c.potential)?;
    let cfg = common_config(cmd, &pot, c);
    Ok((pot, cfg))
}

fn run(cmd: Command) -> Result<(Run, PathBuf), Failure> {
    match cmd {
        Command::Resonances(c) => {
            let (pot, config) = setup("resonances", &c)?;
            let (set, cached) = resonance_set(&pot, &c)?;
            let outputs = vec![
                write(&c.out, "resonances.csv", &set.to_csv())?,
                write(&c.out, "eigenvalues.csv", &set.eigenvalues_csv())?,
            ];
            let mut cert = certificate(&set);
            cert["from_cache"] = json!(cached);
            Ok((Run { config, outputs, certificates: cert, ok: true }, c.out))
        }
        Command::Count { common: c, points } => {
            let (pot, mut config) = setup("count", &c)?;
            config["points"] = json!(points);
            let (set, _) = resonance_set(&pot, &c)?;
            let tab = compute("counting", CountingTable::compute(&set, pot.r0, points))?;
            let outputs = vec![write(&c.out, "counting.csv", &tab.to_csv())?];
            Ok((Run { config, outputs, certificates: certificate(&set), ok: true }, c.out))
        }
        Command::Indicator { common: c, points } => {
            let (pot, mut config) = setup("indicator", &c)?;
            config["points"] = json!(points);
            let tab = compute("phase_geometry", IndicatorTable::compute(pot.n, pot.r0, points))?;
            let outputs = vec![write(&c.out, "indicator.csv", &tab.to_csv())?];
            Ok((Run { config, outputs, certificates: json!({}), ok: true }, c.out))
        }
        Command::Weyl(c) => {
            let (pot, config) = setup("weyl", &c)?;
            let (set, _) = resonance_set(&pot, &c)?;
            let rep = compute("counting", weyl_report(&set, pot.r0))?;
            let outputs = vec![write(&c.out, "weyl.json", &to_json(&rep))?];
            Ok((Run { config, outputs, certificates: certificate(&set), ok: true }, c.out))
        }
        Command::Sector { common: c, theta1, theta2, t } => {
            let (pot, mut config) = setup("sector", &c)?;
            let t = t.unwrap_or(c.tmax);
            config["theta1"] = json!(theta1);
            config["theta2"] = json!(theta2);
            config["t"] = json!(t);
            let (set, _) = resonance_set(&pot, &c)?;
            let rep = compute("counting", sector_report(&set, pot.r0, theta1, theta2, t))?;
            let outputs = vec![write(&c.out, "sector.json", &to_json(&rep))?];
            Ok((Run { config, outputs, certificates: certificate(&set), ok: true }, c.out))
        }
        Command::ContourCheck { common: c, a } => {
            let (pot, mut config) = setup("contour-check", &c)?;
            config["a"] = json!(a);
            let (set, _) = resonance_set(&pot, &c)?;
            let rep = compute("counting", contour_check(&pot, &set, a, 1e-10))?;
            let outputs = vec![write(&c.out, "contour.json", &to_json(&rep))?];
            let mut cert = certificate(&set);
            cert["edge_extrapolated"] = json!(rep.extrapolated);
            Ok((Run { config, outputs, certificates: cert, ok: true }, c.out))
        }
        Command::Selftest { out, seed, .. } => {
            let checks = hyperres::selftest::run(seed);
            for c in &checks {
                println!(
                    "{} {}: worst {:.3e} (bound {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.bound
                );
            }
            let ok = checks.iter().all(|c| c.passed);
            let outputs = vec![write(&out, "selftest.json", &to_json(&checks))?];
            let config = json!({ "command": "selftest", "seed": seed });
            Ok((Run { config, outputs, certificates: json!({ "all_passed": ok }), ok }, out))
        }
    }
}

fn workers(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Resonances(c) | Command::Weyl(c) => c.workers,
        Command::Count { common, .. }
        | Command::Indicator { common, .. }
        | Command::Sector { common, .. }
        | Command::ContourCheck { common, .. } => common.workers,
        Command::Selftest { workers, .. } => *workers,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = workers(&cli.command) {
        if w == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let start = Instant::now();
    match run(cli.command) {
        Ok((r, out)) => {
            let manifest = json!({
                "config": r.config,
                "config_hash": hash_config(&r.config),
                "version": VERSION,
                "wall_time_s": start.elapsed().as_secs_f64(),
                "outputs": r.outputs,
                "certificates": r.certificates,
            });
            if let Err(e) = std::fs::create_dir_all(&out).and_then(|_| std::fs::write(out.join("manifest.json"), to_json(&manifest))) {
                eprintln!("error: cannot write manifest: {e}");
                return ExitCode::from(1);
            }
            for o in &r.outputs {
                println!("wrote {o}");
            }
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(module, e)) => {
            eprintln!("error in {module}: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
