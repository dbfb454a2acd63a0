use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use pbcdcl::config::{preset, SolverConfig, PRESETS};
use pbcdcl::deletion::DeletionPolicy;
use pbcdcl::heuristics::{BumpMode, BumpStrategy};
use pbcdcl::opb::{parse_opb_bytes, write_result};
use pbcdcl::oracle::{brute_force_optimum, brute_force_status, OracleStatus};
use pbcdcl::restarts::RestartPolicy;
use pbcdcl::search::{solve, Budget, Status};
use pbcdcl::{Problem, ProofSystem};

pub const EXIT_SAT: u8 = 10;
pub const EXIT_UNSAT: u8 = 20;
pub const EXIT_OPTIMUM: u8 = 30;
pub const EXIT_USAGE: u8 = 2;

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// OPB instance.
    pub instance: PathBuf,
    /// Named configuration; explicit flags override its fields.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<String>,
    /// gr, rs or prs.
    #[arg(long)]
    pub proof_system: Option<ProofSystem>,
    /// default, bump-degree, bump-coefficient, bump-ratio-coefficient-degree,
    /// bump-ratio-degree-coefficient, bump-assigned, bump-falsified or bump-effective.
    #[arg(long)]
    pub bump: Option<BumpStrategy>,
    /// each-time or once-eliminated-twice.
    #[arg(long)]
    pub bump_mode: Option<BumpMode>,
    /// no-deletion or delete-<measure>, with measure one of degree, degree-bits, lbd-a, lbd-s,
    /// lbd-d, lbd-f, lbd-e, activity.
    #[arg(long = "delete")]
    pub deletion: Option<DeletionPolicy>,
    /// restart-luby, restart-picosat or restart-<measure> (any measure except activity).
    #[arg(long)]
    pub restart: Option<RestartPolicy>,
    /// K of quality-driven restarts.
    #[arg(long)]
    pub restart_k: Option<f64>,
    /// EVSIDS growth base.
    #[arg(long)]
    pub g: Option<f64>,
    /// Wall-clock limit in seconds.
    #[arg(long, env = "PBCDCL_TIME_LIMIT")]
    pub time_limit: Option<f64>,
    /// Conflict limit.
    #[arg(long)]
    pub conflict_limit: Option<u64>,
    /// Print search statistics as `c` lines.
    #[arg(long)]
    pub stats: bool,
}

fn parse_preset(s: &str) -> Result<String, String> {
    if preset(s).is_some() {
        Ok(s.to_string())
    } else {
        Err(format!("unknown preset '{s}' (expected one of {})", PRESETS.join(", ")))
    }
}

/// Builds the configuration and the `c` lines describing flags that override the preset.
pub fn build_config(args: &SolveArgs) -> (SolverConfig, Vec<String>) {
    let mut cfg = args
        .preset
        .as_deref()
        .and_then(preset)
        .unwrap_or_default();
    let mut notes = Vec::new();
    let mut note = |flag: &str, old: String, new: String| {
        if let Some(p) = &args.preset {
            if old != new {
                notes.push(format!("c --{flag} overrides preset {p}: {old} -> {new}"));
            }
        }
    };
    if let Some(v) = args.proof_system {
        note("proof-system", cfg.proof_system.to_string(), v.to_string());
        cfg.proof_system = v;
    }
    if let Some(v) = args.bump {
        note("bump", cfg.bump.to_string(), v.to_string());
        cfg.bump = v;
    }
    if let Some(v) = args.bump_mode {
        note("bump-mode", cfg.bump_mode.to_string(), v.to_string());
        cfg.bump_mode = v;
    }
    if let Some(v) = args.deletion {
        note("delete", cfg.deletion.to_string(), v.to_string());
        cfg.deletion = v;
    }
    if let Some(v) = args.restart {
        note("restart", cfg.restart.to_string(), v.to_string());
        cfg.restart = v;
    }
    if let Some(g) = args.g {
        note("g", cfg.g.to_string(), g.to_string());
        cfg.g = g;
    }
    if let Some(k) = args.restart_k {
        if matches!(cfg.restart, RestartPolicy::QualityDriven { .. }) {
            cfg.restart = cfg.restart.with_k(k);
        } else {
            notes.push(format!("c --restart-k ignored by {}", cfg.restart));
        }
    }
    (cfg, notes)
}

fn load(path: &Path) -> Result<Problem> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let opb = parse_opb_bytes(&bytes).with_context(|| format!("cannot parse {}", path.display()))?;
    Ok(Problem::from_opb(&opb))
}

/// Peak resident memory of this process in MiB, where the platform reports it.
fn peak_memory_mb() -> f64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("VmHWM:"))
                .and_then(|l| l.split_whitespace().nth(1)?.parse::<f64>().ok())
        })
        .map_or(0.0, |kb| kb / 1024.0)
}

pub fn run(args: &SolveArgs) -> Result<u8> {
    let (cfg, notes) = build_config(args);
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return Ok(EXIT_USAGE);
    }
    let problem = load(&args.instance)?;
    let budget = Budget {
        max_conflicts: args.conflict_limit,
        time_limit: args.time_limit,
    };
    for n in &notes {
        println!("{n}");
    }
    let result = solve(&problem, cfg, &budget)?;
    print!("{}", write_result(&result, args.stats));
    if args.stats {
        println!("c mem_mb {:.1}", peak_memory_mb());
    }
    Ok(match result.status {
        Status::Sat => EXIT_SAT,
        Status::Unsat => EXIT_UNSAT,
        Status::Optimum => EXIT_OPTIMUM,
        Status::Unknown => 0,
    })
}

pub fn run_oracle(path: &Path) -> Result<u8> {
    let problem = load(path)?;
    if problem.objective().is_some() {
        return Ok(match brute_force_optimum(&problem)? {
            Some(v) => {
                println!("o {v}\ns OPTIMUM FOUND");
                EXIT_OPTIMUM
            }
            None => {
                println!("s UNSATISFIABLE");
                EXIT_UNSAT
            }
        });
    }
    Ok(match brute_force_status(&problem)? {
        OracleStatus::Sat(m) => {
            let lits: Vec<String> = (1..m.len())
                .map(|i| if m[i] { format!("x{i}") } else { format!("-x{i}") })
                .collect();
            println!("s SATISFIABLE\nv {}", lits.join(" "));
            EXIT_SAT
        }
        OracleStatus::Unsat => {
            println!("s UNSATISFIABLE");
            EXIT_UNSAT
        }
    })
}
