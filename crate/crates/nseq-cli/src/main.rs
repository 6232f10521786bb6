//! `nseq-solve`: command-line driver, benchmark harness and differential
//! fuzzer for the n-indexed sequence solver.

mod records;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nseq_core::encode::{emit_problem, EmitterConfig};
use nseq_core::fuzz::{fuzz_round, FuzzConfig};
use nseq_core::oracle::{Model, NSeqValue, Value};
use nseq_core::parser::parse_script;
use nseq_core::rules::{Calculus, RuleConfig};
use nseq_core::seq_translate::{translate, TranslateOptions};
use nseq_core::solver::{solve, Budget, Stats, Verdict};
use nseq_core::term::{Sort, TermStore};
use records::{cactus_data, from_csv, to_csv, RunRecord};

#[derive(Parser)]
#[command(name = "nseq-solve", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CalcArg {
    Base,
    Ext,
}

impl CalcArg {
    fn calculus(self) -> Calculus {
        match self {
            CalcArg::Base => Calculus::Base,
            CalcArg::Ext => Calculus::Ext,
        }
    }
    fn name(self) -> &'static str {
        match self {
            CalcArg::Base => "base",
            CalcArg::Ext => "ext",
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one SMT-LIB file and print sat/unsat/unknown.
    Solve {
        /// Splitting calculus to run.
        #[arg(long, value_enum, default_value = "ext")]
        calculus: CalcArg,
        /// Wall-clock budget in milliseconds.
        #[arg(long, default_value_t = 10_000)]
        timeout: u64,
        /// On sat, print the model as JSON on the following lines.
        #[arg(long)]
        model_json: bool,
        /// Use the rule shapes exactly as printed (weaker frames).
        #[arg(long)]
        strict_rules: bool,
        /// Print solver statistics as JSON to stderr.
        #[arg(long)]
        stats: bool,
        file: PathBuf,
    },
    /// Run every .smt2 file in a directory and write per-goal CSV records.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Calculus to run, or both.
        #[arg(long, default_value = "both")]
        calculus: String,
        #[arg(long, default_value_t = 5_000)]
        timeout: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Number of worker threads.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[arg(long)]
        strict_rules: bool,
    },
    /// Expand a problem into the pure Seq+ADT axiomatization.
    Encode {
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Omit :pattern annotations.
        #[arg(long)]
        no_patterns: bool,
        file: PathBuf,
    },
    /// Differential fuzzing: oracle vs. both calculi; nonzero exit on findings.
    Fuzz(FuzzArgs),
    /// Turn a bench CSV into cactus-plot TSV curves.
    PlotData {
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        csv: PathBuf,
    },
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 3)]
    max_depth: u32,
    #[arg(long, default_value_t = -3)]
    int_lo: i64,
    #[arg(long, default_value_t = 4)]
    int_hi: i64,
    #[arg(long, default_value_t = 3)]
    carrier: u32,
    #[arg(long, default_value_t = 5)]
    max_nseq_vars: u32,
    #[arg(long, default_value_t = 12)]
    max_assertions: u32,
    /// Per-goal wall budget in milliseconds.
    #[arg(long, default_value_t = 5_000)]
    timeout: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap uses exit code 2 for usage errors only with its own
            // exit(); route help/version through success explicitly.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(2);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> anyhow::Result<ExitCode> {
    match cmd {
        Cmd::Solve { calculus, timeout, model_json, strict_rules, stats, file } => {
            cmd_solve(calculus, timeout, model_json, strict_rules, stats, &file)
        }
        Cmd::Bench { dir, calculus, timeout, csv, jobs, strict_rules } => {
            cmd_bench(&dir, &calculus, timeout, csv.as_deref(), jobs, strict_rules)
        }
        Cmd::Encode { out, no_patterns, file } => cmd_encode(out.as_deref(), no_patterns, &file),
        Cmd::Fuzz(args) => cmd_fuzz(&args),
        Cmd::PlotData { out, csv } => cmd_plot(out.as_deref(), &csv),
    }
}

// -------------------------------------------------------------------
// solve
// -------------------------------------------------------------------

/// Parse a file and return its assertions, translating any `Seq` layer
/// down to the native n-indexed signature first.
fn load_goal(store: &mut TermStore, path: &Path) -> anyhow::Result<Vec<nseq_core::term::TermId>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let script =
        parse_script(&text, store).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let assertions = script.assertions();
    let uses_seq = assertions
        .iter()
        .flat_map(|&a| store.subterms(a))
        .any(|t| matches!(store.sort(t), Sort::Seq(_)));
    if uses_seq {
        let tr = translate(store, &assertions, TranslateOptions::default())
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        Ok(tr.assertions)
    } else {
        Ok(assertions)
    }
}

fn cmd_solve(
    calculus: CalcArg,
    timeout: u64,
    model_json: bool,
    strict_rules: bool,
    stats: bool,
    file: &Path,
) -> anyhow::Result<ExitCode> {
    let mut store = TermStore::new();
    let assertions = load_goal(&mut store, file)?;
    let budget = Budget { wall_ms: timeout, ..Budget::default() };
    let config = RuleConfig { strict: strict_rules };
    let (verdict, st) = solve(&mut store, &assertions, calculus.calculus(), config, &budget);
    println!("{}", verdict.word());
    if stats {
        eprintln!("{}", st.to_json());
    }
    match verdict {
        Verdict::Sat(model) => {
            if model_json {
                println!("{}", model_to_json(&store, &model));
            }
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Unsat => Ok(ExitCode::SUCCESS),
        Verdict::Unknown(reason) => {
            eprintln!("; {reason}");
            Ok(ExitCode::from(1))
        }
    }
}

fn value_to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Bool(b) => serde_json::json!(b),
        Value::Int(n) => match i64::try_from(n.clone()) {
            Ok(k) => serde_json::json!(k),
            Err(_) => serde_json::json!(n.to_string()),
        },
        Value::Elem(sort, k) => serde_json::json!(format!("{sort}!{k}")),
        Value::NSeq(s) => nseq_to_json(s),
        Value::Seq(vs) => serde_json::Value::Array(vs.iter().map(value_to_json).collect()),
    }
}

fn nseq_to_json(s: &NSeqValue) -> serde_json::Value {
    serde_json::json!({
        "first": s.first.to_string().parse::<i64>().ok(),
        "last": s.last.to_string().parse::<i64>().ok(),
        "elems": s.elems.iter().map(value_to_json).collect::<Vec<_>>(),
    })
}

fn model_to_json(store: &TermStore, model: &Model) -> String {
    let mut map = serde_json::Map::new();
    for (&t, v) in &model.assignment {
        if let nseq_core::term::Symbol::Var(name) = store.head(t) {
            map.insert(name.clone(), value_to_json(v));
        }
    }
    serde_json::to_string_pretty(&serde_json::Value::Object(map)).unwrap()
}

// -------------------------------------------------------------------
// bench
// -------------------------------------------------------------------

fn verdict_word(verdict: &Verdict) -> &'static str {
    match verdict {
        Verdict::Sat(_) => "sat",
        Verdict::Unsat => "unsat",
        Verdict::Unknown(r) if r == "timeout" => "timeout",
        Verdict::Unknown(_) => "unknown",
    }
}

fn run_goal(path: &Path, calc: CalcArg, timeout: u64, strict: bool) -> RunRecord {
    let file = path.file_name().unwrap_or(path.as_os_str()).to_string_lossy().into_owned();
    let mut store = TermStore::new();
    let assertions = match load_goal(&mut store, path) {
        Ok(a) => a,
        Err(_) => {
            return RunRecord {
                file,
                calculus: calc.name().into(),
                verdict: "error".into(),
                wall_ms: 0,
                decisions: 0,
                lemmas_total: 0,
            }
        }
    };
    let budget = Budget { wall_ms: timeout, ..Budget::default() };
    let config = RuleConfig { strict };
    let (verdict, st): (Verdict, Stats) =
        solve(&mut store, &assertions, calc.calculus(), config, &budget);
    RunRecord {
        file,
        calculus: calc.name().into(),
        verdict: verdict_word(&verdict).into(),
        wall_ms: st.wall_ms.min(timeout),
        decisions: st.decisions,
        lemmas_total: st.lemmas_total(),
    }
}

fn cmd_bench(
    dir: &Path,
    calculus: &str,
    timeout: u64,
    csv: Option<&Path>,
    jobs: usize,
    strict: bool,
) -> anyhow::Result<ExitCode> {
    let calcs: Vec<CalcArg> = match calculus {
        "base" => vec![CalcArg::Base],
        "ext" => vec![CalcArg::Ext],
        "both" => vec![CalcArg::Base, CalcArg::Ext],
        other => anyhow::bail!("unknown calculus {other:?} (expected base, ext or both)"),
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    files.sort();
    let tasks: Vec<(PathBuf, CalcArg)> = files
        .iter()
        .flat_map(|f| calcs.iter().map(move |&c| (f.clone(), c)))
        .collect();

    // Independent solver contexts across a fixed worker pool; results land
    // in task order so the merged CSV is deterministic.
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<RunRecord>>> =
        tasks.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some((path, calc)) = tasks.get(i) else { break };
                let rec = run_goal(path, *calc, timeout, strict);
                *slots[i].lock().unwrap() = Some(rec);
            });
        }
    });
    let records: Vec<RunRecord> =
        slots.into_iter().map(|s| s.into_inner().unwrap().unwrap()).collect();

    let text = to_csv(&records);
    match csv {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

// -------------------------------------------------------------------
// encode / plot-data / fuzz
// -------------------------------------------------------------------

fn cmd_encode(out: Option<&Path>, no_patterns: bool, file: &Path) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", file.display()))?;
    let mut store = TermStore::new();
    let script =
        parse_script(&text, &mut store).map_err(|e| anyhow::anyhow!("{}: {e}", file.display()))?;
    let cfg = EmitterConfig { patterns_on: !no_patterns, ..EmitterConfig::default() };
    let encoded = emit_problem(&store, &script, &cfg)?;
    match out {
        Some(path) => std::fs::write(path, encoded)?,
        None => print!("{encoded}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(out: Option<&Path>, csv: &Path) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(csv)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", csv.display()))?;
    let records = from_csv(&text).map_err(|e| anyhow::anyhow!("{}: {e}", csv.display()))?;
    let data = cactus_data(&records);
    match out {
        Some(path) => std::fs::write(path, data)?,
        None => print!("{data}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fuzz(args: &FuzzArgs) -> anyhow::Result<ExitCode> {
    let cfg = FuzzConfig {
        seed: args.seed,
        count: args.count as u32,
        max_depth: args.max_depth,
        int_lo: args.int_lo,
        int_hi: args.int_hi,
        carrier: args.carrier,
        max_nseq_vars: args.max_nseq_vars,
        max_assertions: args.max_assertions,
        ..FuzzConfig::default()
    };
    let budget = Budget { wall_ms: args.timeout, ..Budget::default() };
    let report = fuzz_round(&cfg, &budget);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.findings.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
