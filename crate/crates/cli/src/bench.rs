use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::Args;
use pbcdcl::bench::{
    compute_vbs, read_records_file, write_cactus, write_records, BenchRecord, BenchStatus,
    RecordWriter,
};
use pbcdcl::config::preset;

/// Extra time granted past the limit before the run is killed.
const KILL_GRACE: Duration = Duration::from_millis(1000);
const POLL: Duration = Duration::from_millis(5);

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of `.opb` instances.
    pub dir: PathBuf,
    /// A preset name, or `label=FLAGS` with solve flags, e.g.
    /// `mine=--preset roundingsat-best --restart restart-luby`. Repeatable.
    #[arg(long = "config", required = true)]
    pub configs: Vec<String>,
    /// Per-run wall-clock limit in seconds.
    #[arg(long, env = "PBCDCL_TIME_LIMIT", default_value_t = 60.0)]
    pub time_limit: f64,
    /// Concurrent solver processes.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Result CSV.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VbsArgs {
    /// Result CSVs produced by `bench`.
    #[arg(required = true)]
    pub results: Vec<PathBuf>,
    /// VBS rows; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Cactus data: (series, solved, time_s) per configuration and for the VBS.
    #[arg(long)]
    pub cactus: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct RunConfig {
    label: String,
    flags: Vec<String>,
}

fn parse_config(spec: &str) -> Result<RunConfig> {
    if let Some((label, flags)) = spec.split_once('=') {
        return Ok(RunConfig {
            label: label.trim().to_string(),
            flags: flags.split_whitespace().map(str::to_string).collect(),
        });
    }
    if preset(spec).is_none() {
        bail!("'{spec}' is neither a preset nor label=FLAGS");
    }
    Ok(RunConfig {
        label: spec.to_string(),
        flags: vec!["--preset".into(), spec.to_string()],
    })
}

fn instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "opb"))
        .collect();
    out.sort();
    Ok(out)
}

/// Fields of the solver output relevant to a record.
fn parse_output(text: &str, record: &mut BenchRecord) {
    let mut time = None;
    for line in text.lines() {
        let mut words = line.split_whitespace();
        match (words.next(), words.next(), words.next()) {
            (Some("o"), Some(v), _) => record.objective = Some(v.to_string()),
            (Some("c"), Some(key), Some(value)) => {
                let int = || value.parse::<u64>().unwrap_or(0);
                match key {
                    "conflicts" => record.conflicts = int(),
                    "decisions" => record.decisions = int(),
                    "restarts" => record.restarts = int(),
                    "reductions" => record.reductions = int(),
                    "wall_time" => time = value.parse().ok(),
                    "mem_mb" => record.mem_mb = value.parse().unwrap_or(0.0),
                    _ => {}
                }
            }
            _ => {}
        }
    }
    if let Some(t) = time {
        record.time_s = t;
    }
}

fn run_one(exe: &Path, instance: &Path, config: &RunConfig, limit: f64) -> BenchRecord {
    let name = instance.display().to_string();
    let start = Instant::now();
    let child = Command::new(exe)
        .arg("solve")
        .arg(instance)
        .args(&config.flags)
        .args(["--stats", "--time-limit", &limit.to_string()])
        .env_remove("PBCDCL_TIME_LIMIT")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(_) => return BenchRecord::failed(&name, &config.label, BenchStatus::Error, 0.0),
    };
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let deadline = Duration::from_secs_f64(limit) + KILL_GRACE;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if start.elapsed() > deadline => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => std::thread::sleep(POLL),
            Err(_) => break None,
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let output = reader.join().unwrap_or_default();
    let Some(status) = status else {
        return BenchRecord::failed(&name, &config.label, BenchStatus::Unknown, limit);
    };
    let status = match status.code() {
        Some(10) => BenchStatus::Sat,
        Some(20) => BenchStatus::Unsat,
        Some(30) => BenchStatus::Optimum,
        Some(0) => BenchStatus::Unknown,
        _ => return BenchRecord::failed(&name, &config.label, BenchStatus::Error, elapsed),
    };
    let mut record = BenchRecord::failed(&name, &config.label, status, elapsed);
    parse_output(&output, &mut record);
    if status == BenchStatus::Unknown {
        record.time_s = limit;
    }
    record
}

fn sort_key(r: &BenchRecord) -> (String, String) {
    (r.instance.clone(), r.config.clone())
}

pub fn run_suite(args: &BenchArgs) -> Result<()> {
    let configs: Vec<RunConfig> = args.configs.iter().map(|c| parse_config(c)).collect::<Result<_>>()?;
    if !(args.time_limit > 0.0 && args.time_limit.is_finite()) {
        bail!("time limit must be a positive number of seconds");
    }
    let exe = std::env::current_exe().context("cannot locate the solver executable")?;
    let runs: Vec<(PathBuf, &RunConfig)> = instances(&args.dir)?
        .into_iter()
        .flat_map(|i| configs.iter().map(move |c| (i.clone(), c)))
        .collect();

    let file = std::fs::File::create(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let writer = Mutex::new(RecordWriter::new(file)?);
    let next = AtomicUsize::new(0);
    let failure = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..args.jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((instance, config)) = runs.get(i) else { break };
                let record = run_one(&exe, instance, config, args.time_limit);
                eprintln!("c {} {} {}", record.instance, record.config, record.status);
                if let Err(e) = writer.lock().expect("writer lock").write(&record) {
                    *failure.lock().expect("failure lock") = Some(e);
                    break;
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().expect("failure lock") {
        return Err(e.into());
    }
    drop(writer);

    // completion order depends on scheduling; rewrite in a fixed order
    let mut records = read_records_file(&args.out)?;
    records.sort_by_key(sort_key);
    write_records(std::fs::File::create(&args.out)?, &records)?;
    Ok(())
}

pub fn run_vbs(args: &VbsArgs) -> Result<()> {
    let mut records = Vec::new();
    for path in &args.results {
        records.extend(read_records_file(path).with_context(|| format!("cannot read {}", path.display()))?);
    }
    let report = compute_vbs(&records)?;
    match &args.out {
        Some(p) => write_records(std::fs::File::create(p)?, &report.vbs)?,
        None => write_records(std::io::stdout().lock(), &report.vbs)?,
    }
    if let Some(p) = &args.cactus {
        write_cactus(std::fs::File::create(p)?, &report.cactus)?;
    }
    for (series, solved) in &report.solved {
        eprintln!("c solved {series} {solved}");
    }
    Ok(())
}
