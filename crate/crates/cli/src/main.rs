use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use aigrw5::aiger::{read_aag, write_aag};
use aigrw5::cut::DEFAULT_CUT_CAP;
use aigrw5::equiv::{check_equiv, CheckMode, Verdict, MAX_EXHAUSTIVE_INPUTS};
use aigrw5::forest::{CandidateDb, GenOptions, GenOutcome, Generator, DEFAULT_N_MAX, DEFAULT_U};
use aigrw5::mine::{format_class_list, parse_class_list, ClassCounts};
use aigrw5::rewrite::{rewrite_network, rewrite_to_fixpoint, RewriteOptions, RewriteStats};
use aigrw5::Aig;
use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

const EXIT_COUNTEREXAMPLE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "aigrw5",
    version,
    about = "AIG rewriting with 5-input cuts and precomputed NPN-class circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a candidate database for a list of practical classes.
    GenDb(GenDbArgs),
    /// Count the NPN classes of 5-leaf cut functions over a corpus.
    Mine(MineArgs),
    /// Rewrite an AIG with a candidate database.
    Rewrite(RewriteArgs),
    /// Print size statistics of an AIG.
    Stats(StatsArgs),
    /// Check two AIGs for combinational equivalence.
    Check(CheckArgs),
}

#[derive(Args)]
struct GenDbArgs {
    /// Class list with `<tt_hex8> <count>` lines.
    #[arg(long)]
    practical: PathBuf,
    /// Stop once at most this many classes lack a candidate.
    #[arg(long, default_value_t = DEFAULT_U)]
    u: usize,
    /// Forest size that triggers a reduction.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    nmax: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    budget: Option<f64>,
    /// Maximum number of forest node pairs to combine.
    #[arg(long)]
    max_pairs: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MineArgs {
    /// Glob matching AIGER ASCII files.
    #[arg(long)]
    corpus: String,
    #[arg(long, default_value_t = 20)]
    min_occ: u64,
    /// Cuts kept per node during enumeration.
    #[arg(long, default_value_t = DEFAULT_CUT_CAP)]
    cut_cap: usize,
    /// Class list destination; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Verify {
    Off,
    Random,
    Exhaustive,
}

#[derive(Args)]
struct RewriteArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Candidate database written by `gen-db`.
    #[arg(long, env = "AIGRW5_DB")]
    db: PathBuf,
    #[arg(long, default_value_t = 1)]
    passes: usize,
    /// Stop before `--passes` once a pass removes no node.
    #[arg(long)]
    fixpoint: bool,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    zero_gain: bool,
    /// Use only cuts with exactly five leaves.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    exact5: bool,
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    preserve_depth: bool,
    #[arg(long, default_value_t = DEFAULT_CUT_CAP)]
    cut_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-pass CSV destination; printed to stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Verify::Off)]
    verify: Verify,
    /// 64-pattern words simulated by `--verify random`.
    #[arg(long, default_value_t = 1024)]
    words: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Exhaustive up to 16 inputs, random beyond.
    Auto,
    Exhaustive,
    Random,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    #[arg(long, default_value_t = 1024)]
    words: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn read(path: &Path) -> Result<Aig> {
    read_aag(path).with_context(|| format!("reading {}", path.display()))
}

fn gen_db(args: &GenDbArgs) -> Result<u8> {
    let text =
        std::fs::read_to_string(&args.practical).with_context(|| format!("reading {}", args.practical.display()))?;
    let classes = parse_class_list(&text).with_context(|| format!("parsing {}", args.practical.display()))?;
    let practical: Vec<_> = classes.iter().map(|&(t, _)| t).collect();
    let opts = GenOptions {
        u: args.u,
        n_max: args.nmax,
        max_pairs: args.max_pairs,
        time_limit: args.budget.map(Duration::from_secs_f64),
    };
    let mut g = Generator::new(&practical)?;
    let report = g.run(&opts);
    g.reduce();
    let (forest, table) = g.into_parts();
    let db = CandidateDb::new(forest, table);
    db.save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;

    println!("classes requested: {}", report.requested);
    println!("classes covered:   {}", report.covered);
    println!(
        "table entries:     {} ({} candidates)",
        db.table().len(),
        db.table().num_candidates()
    );
    println!(
        "forest nodes:      {} ({} after final reduction)",
        report.forest_size,
        db.forest().len()
    );
    println!("reductions:        {}", report.reductions);
    println!("pairs tried:       {}", report.pairs);
    println!("elapsed:           {:.2}s", report.elapsed.as_secs_f64());
    let outcome = match report.outcome {
        GenOutcome::Covered => return Ok(0),
        GenOutcome::BudgetExhausted => "budget exhausted",
        GenOutcome::Saturated => "every pair tried",
        GenOutcome::NodeLimit => "forest still above --nmax after reduction",
    };
    eprintln!(
        "warning: {outcome} with {} classes uncovered (target {}); wrote a partial database",
        report.requested - report.covered,
        args.u
    );
    Ok(EXIT_PARTIAL)
}

fn mine(args: &MineArgs) -> Result<u8> {
    let paths: Vec<PathBuf> = glob::glob(&args.corpus)
        .with_context(|| format!("bad glob `{}`", args.corpus))?
        .filter_map(|p| p.ok())
        .collect();
    if paths.is_empty() {
        bail!("no files match `{}`", args.corpus);
    }
    let mut counts = ClassCounts::default();
    let mut read_ok = 0;
    for p in &paths {
        match read_aag(p) {
            Ok(aig) => {
                counts.add_aig(&aig, args.cut_cap);
                read_ok += 1;
            }
            Err(e) => eprintln!("warning: skipping {}: {e}", p.display()),
        }
    }
    if read_ok == 0 {
        bail!("none of the {} corpus files could be read", paths.len());
    }
    let selected = counts.select(args.min_occ);
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# files {read_ok}, cuts {}, distinct classes {}",
        counts.cuts,
        counts.distinct()
    );
    let _ = writeln!(
        text,
        "# {} classes with at least {} occurrences",
        selected.len(),
        args.min_occ
    );
    text.push_str(&format_class_list(&selected));
    match &args.out {
        Some(out) => {
            std::fs::write(out, &text).with_context(|| format!("writing {}", out.display()))?;
            println!("files read:       {read_ok} of {}", paths.len());
            println!("5-leaf cuts:      {}", counts.cuts);
            println!("distinct classes: {}", counts.distinct());
            println!("selected classes: {} (min-occ {})", selected.len(), args.min_occ);
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn pct(before: usize, after: usize) -> f64 {
    if before == 0 {
        0.0
    } else {
        100.0 * (before - after) as f64 / before as f64
    }
}

fn stats_csv(stats: &RewriteStats) -> String {
    let mut s = String::from(
        "pass,nodes_before,nodes_after,reduction_pct,replacements,zero_gain_replacements,cuts_evaluated,candidates_evaluated,runtime_ms\n",
    );
    for (i, p) in stats.passes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{:.4},{},{},{},{},{:.3}",
            i + 1,
            p.nodes_before,
            p.nodes_after,
            pct(p.nodes_before, p.nodes_after),
            p.replacements,
            p.zero_gain_replacements,
            p.cuts_evaluated,
            p.candidates_evaluated,
            p.elapsed.as_secs_f64() * 1e3
        );
    }
    s
}

fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::Equivalent => "equivalent".into(),
        Verdict::Inconclusive { patterns } => format!("inconclusive: no difference in {patterns} random patterns"),
        Verdict::Counterexample { output, inputs } => {
            let bits: String = inputs.iter().map(|&b| if b { '1' } else { '0' }).collect();
            format!("counterexample: output {output} differs at inputs (x0..) {bits}")
        }
    }
}

fn rewrite(args: &RewriteArgs) -> Result<u8> {
    let original = read(&args.input)?;
    let db = CandidateDb::load(&args.db).with_context(|| format!("loading database {}", args.db.display()))?;
    let opts = RewriteOptions {
        zero_gain: args.zero_gain,
        exact_five_leaves: args.exact5,
        preserve_depth: args.preserve_depth,
        cut_cap: args.cut_cap,
        passes: args.passes,
    };
    let mut aig = original.clone();
    let start = Instant::now();
    let stats = if args.fixpoint {
        rewrite_to_fixpoint(&mut aig, &db, &opts)?
    } else {
        rewrite_network(&mut aig, &db, &opts)?
    };
    let elapsed = start.elapsed();
    if let Some(out) = &args.out {
        write_aag(&aig, out).with_context(|| format!("writing {}", out.display()))?;
    }

    println!("input:        {}", args.input.display());
    println!(
        "nodes:        {} -> {} ({:.2}% reduction)",
        stats.nodes_before,
        stats.nodes_after,
        pct(stats.nodes_before, stats.nodes_after)
    );
    if stats.swept > 0 {
        println!("swept:        {} dangling nodes before the first pass", stats.swept);
    }
    println!("depth:        {} -> {}", original.depth(), aig.depth());
    println!(
        "replacements: {} ({} zero-gain)",
        stats.replacements, stats.zero_gain_replacements
    );
    println!("passes:       {}", stats.passes.len());
    println!("runtime:      {:.3}s", elapsed.as_secs_f64());
    let csv = stats_csv(&stats);
    match &args.csv {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }

    let mode = match args.verify {
        Verify::Off => return Ok(0),
        Verify::Random => CheckMode::Random {
            words: args.words,
            seed: args.seed,
        },
        Verify::Exhaustive => {
            if original.num_inputs() > MAX_EXHAUSTIVE_INPUTS {
                bail!(
                    "exhaustive verification supports at most {MAX_EXHAUSTIVE_INPUTS} inputs, got {}",
                    original.num_inputs()
                );
            }
            CheckMode::Exhaustive
        }
    };
    let verdict = check_equiv(&original, &aig, mode)?;
    println!("verification: {}", verdict_line(&verdict));
    Ok(if verdict.is_counterexample() {
        EXIT_COUNTEREXAMPLE
    } else {
        0
    })
}

fn stats(args: &StatsArgs) -> Result<u8> {
    let aig = read(&args.input)?;
    println!("inputs:  {}", aig.num_inputs());
    println!("outputs: {}", aig.num_outputs());
    println!("ands:    {}", aig.num_ands());
    println!("depth:   {}", aig.depth());
    if aig.split_latches() > 0 {
        println!("latches: {} (split into inputs and outputs)", aig.split_latches());
    }
    Ok(0)
}

fn check(args: &CheckArgs) -> Result<u8> {
    let a = read(&args.a)?;
    let b = read(&args.b)?;
    let random = CheckMode::Random {
        words: args.words,
        seed: args.seed,
    };
    let mode = match args.mode {
        Mode::Exhaustive => CheckMode::Exhaustive,
        Mode::Random => random,
        Mode::Auto if a.num_inputs() <= MAX_EXHAUSTIVE_INPUTS => CheckMode::Exhaustive,
        Mode::Auto => random,
    };
    let verdict = check_equiv(&a, &b, mode)?;
    println!("{}", verdict_line(&verdict));
    Ok(if verdict.is_counterexample() {
        EXIT_COUNTEREXAMPLE
    } else {
        0
    })
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::GenDb(a) => gen_db(a),
        Command::Mine(a) => mine(a),
        Command::Rewrite(a) => rewrite(a),
        Command::Stats(a) => stats(a),
        Command::Check(a) => check(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Node replacement recurses along fanouts; deep graphs need room.
    let worker = std::thread::Builder::new().stack_size(1 << 30).spawn(move || run(cli));
    let result = worker
        .expect("spawn worker thread")
        .join()
        .expect("worker thread panicked");
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
