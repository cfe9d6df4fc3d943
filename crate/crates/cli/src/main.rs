//! `hypervc`: generators, solvers, set-family tools and the reduction /
//! decode pipeline behind one binary.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.
//! Every run echoes its fully resolved configuration to stderr.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypervc::gapgen::{self, build_ahk_with_budget, verify_gap, GapReport};
use hypervc::optimize::{self, SolveMode, SolveReport};
use hypervc::pcp::{self, DensityOutcome, Labeling, LayeredCsp, ToySpec};
use hypervc::rational::{format_rational, parse_rational, to_f64, Rational};
use hypervc::reduction::{self, ReductionInstance, ReductionParams};
use hypervc::setfam::{self, BallsAndBins, CrossCheck, DensityWitness, GroundSubset, SetFamily};
use hypervc::PartiteHypergraph;

const BUDGET_ENV: &str = "HYPERVC_BUDGET";

#[derive(Parser)]
#[command(
    name = "hypervc",
    version,
    about = "Vertex cover on k-partite hypergraphs: gap instances, exact solvers, set-family tools, reduction and decoding",
    arg_required_else_help = true,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an integrality-gap instance and verify its LP and cover values
    Gap(GapArgs),
    /// Solve the LP, the exact cover, and the rounding heuristics
    Solve(SolveArgs),
    /// Set-family utilities
    #[command(subcommand)]
    Setfam(SetfamCommand),
    /// Layered label-cover utilities
    #[command(subcommand)]
    Pcp(PcpCommand),
    /// Build the hypergraph of a layered label-cover instance
    Reduce(ReduceArgs),
    /// Decode an independent set of a reduction instance into labelings
    Decode(DecodeArgs),
    /// Ratio table over a batch of gap instances
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Table => "table",
        }
    }
}

#[derive(Args)]
struct GapArgs {
    #[arg(long)]
    r: u64,
    #[arg(long)]
    k: usize,
    /// Keep all rk+1 y-vertices instead of the weighted quotient
    #[arg(long)]
    full: bool,
    /// Instance file; without it the instance goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip solving the instance
    #[arg(long)]
    no_verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, env = BUDGET_ENV)]
    edge_budget: Option<u64>,
    #[arg(long, env = BUDGET_ENV)]
    node_budget: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file; `-` or absent reads stdin
    input: Option<PathBuf>,
    #[arg(long = "in", conflicts_with = "input")]
    in_path: Option<PathBuf>,
    #[arg(long, default_value = "all", value_parser = parse_mode)]
    mode: SolveMode,
    /// Report file (JSON)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long, env = BUDGET_ENV)]
    node_budget: Option<u64>,
}

#[derive(Subcommand)]
enum SetfamCommand {
    /// μ_p of a family
    Measure(MeasureArgs),
    /// Left-shift a family, or apply one (i, j)-shift
    Shift(ShiftArgs),
    /// Exhaustive t-wise cross-intersection check
    Cross(CrossArgs),
    /// Small-intersection witnesses for density-violating families
    Witness(WitnessArgs),
    /// Smallest t with the Chernoff tail below eps
    T(TArgs),
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long, value_parser = rat)]
    p: Rational,
}

#[derive(Args)]
struct ShiftArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long, requires = "j")]
    i: Option<usize>,
    #[arg(long, requires = "i")]
    j: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossArgs {
    #[arg(long)]
    t: usize,
    #[arg(required = true)]
    families: Vec<PathBuf>,
    /// Cap on enumerated product tuples
    #[arg(long, env = BUDGET_ENV)]
    limit: Option<u64>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    t: usize,
    /// One bias per family
    #[arg(long, value_delimiter = ',', value_parser = rat, required = true)]
    q: Vec<Rational>,
    #[arg(required = true)]
    families: Vec<PathBuf>,
    /// Left-shift the families first
    #[arg(long)]
    shift: bool,
    /// Check each family's prefix density instead of running the ball procedure
    #[arg(long)]
    prefix: bool,
}

#[derive(Args)]
struct TArgs {
    #[arg(long, value_parser = rat)]
    eps: Rational,
    #[arg(long, value_parser = rat)]
    delta: Rational,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand)]
enum PcpCommand {
    /// Seeded toy instance
    Gen(PcpGenArgs),
    /// Best labeling of one layer pair
    Best(PcpBestArgs),
    /// Weak-density check over chosen layer subsets
    Density(PcpDensityArgs),
}

#[derive(Args)]
struct PcpGenArgs {
    #[arg(long)]
    layers: usize,
    /// Variables per layer; one value applies to every layer
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<usize>,
    /// Label range per layer; one value applies to every layer
    #[arg(long, value_delimiter = ',', required = true)]
    ranges: Vec<usize>,
    #[arg(long, value_parser = rat, default_value = "1/2")]
    density: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    planted: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the planted labeling
    #[arg(long, requires = "planted")]
    labeling_out: Option<PathBuf>,
}

#[derive(Args)]
struct PcpBestArgs {
    #[arg(long)]
    csp: PathBuf,
    #[arg(long, default_value_t = 0)]
    l: usize,
    #[arg(long, default_value_t = 1)]
    l2: usize,
    #[arg(long, env = BUDGET_ENV)]
    budget: Option<u64>,
}

#[derive(Args)]
struct PcpDensityArgs {
    #[arg(long)]
    csp: PathBuf,
    #[arg(long, value_parser = rat)]
    delta: Rational,
    /// `LAYER=var,var,...`, once per chosen layer
    #[arg(long = "choose", required = true, value_parser = parse_choice)]
    choose: Vec<(usize, Vec<String>)>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    csp: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    r: u64,
    #[arg(long, value_parser = rat)]
    eps: Rational,
    /// Instance file (parameters plus the label-cover instance)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the hypergraph itself
    #[arg(long)]
    hypergraph_out: Option<PathBuf>,
    /// Satisfying labeling whose completeness certificate to emit
    #[arg(long, requires = "iset_out")]
    labeling: Option<PathBuf>,
    #[arg(long, requires = "labeling")]
    iset_out: Option<PathBuf>,
    #[arg(long, env = BUDGET_ENV)]
    budget: Option<u64>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    instance: PathBuf,
    /// JSON array of vertex ids
    #[arg(long)]
    iset: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Decode a single pair `l,l2` instead of every pair
    #[arg(long, value_delimiter = ',')]
    layers: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = BUDGET_ENV)]
    budget: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    /// `r:k` pairs
    #[arg(long, value_delimiter = ',', value_parser = parse_rk, default_value = "1:3,2:3,3:3,2:4")]
    pairs: Vec<(u64, usize)>,
    #[arg(long)]
    full: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = BUDGET_ENV)]
    edge_budget: Option<u64>,
    #[arg(long, env = BUDGET_ENV)]
    node_budget: Option<u64>,
}

fn rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<SolveMode, String> {
    s.parse()
}

fn parse_rk(s: &str) -> Result<(u64, usize), String> {
    let (r, k) = s.split_once(':').ok_or_else(|| format!("expected r:k, got {s:?}"))?;
    let r = r.trim().parse().map_err(|_| format!("bad r in {s:?}"))?;
    let k = k.trim().parse().map_err(|_| format!("bad k in {s:?}"))?;
    Ok((r, k))
}

fn parse_choice(s: &str) -> Result<(usize, Vec<String>), String> {
    let (l, vars) = s.split_once('=').ok_or_else(|| format!("expected LAYER=vars, got {s:?}"))?;
    let l = l.trim().parse().map_err(|_| format!("bad layer in {s:?}"))?;
    let vars = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
    Ok((l, vars))
}

/// A usage problem found after argument parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gap(a) => gap(a),
        Command::Solve(a) => solve(a),
        Command::Setfam(c) => match c {
            SetfamCommand::Measure(a) => setfam_measure(a),
            SetfamCommand::Shift(a) => setfam_shift(a),
            SetfamCommand::Cross(a) => setfam_cross(a),
            SetfamCommand::Witness(a) => setfam_witness(a),
            SetfamCommand::T(a) => setfam_t(a),
        },
        Command::Pcp(c) => match c {
            PcpCommand::Gen(a) => pcp_gen(a),
            PcpCommand::Best(a) => pcp_best(a),
            PcpCommand::Density(a) => pcp_density(a),
        },
        Command::Reduce(a) => reduce(a),
        Command::Decode(a) => decode(a),
        Command::Report(a) => report(a),
    }
}

// ---- plumbing

fn echo_config(cmd: &str, fields: Value) {
    let cfg = json!({ "command": cmd, "config": fields });
    eprintln!("config: {cfg}");
}

fn path_str(p: &Option<PathBuf>) -> Value {
    p.as_ref().map_or(Value::Null, |p| Value::String(p.display().to_string()))
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Writes to `out` if given, stdout otherwise.
fn emit(out: Option<&Path>, text: String) -> Result<()> {
    let text = with_newline(text);
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn read_family(path: &Path) -> Result<SetFamily> {
    SetFamily::from_json(&read_text(path)?).with_context(|| format!("loading family {}", path.display()))
}

fn subset_json(s: &GroundSubset) -> Value {
    json!(s.elements())
}

fn fmt(r: &Rational) -> String {
    format_rational(r)
}

// ---- gap / solve / report

fn gap(a: GapArgs) -> Result<()> {
    let edge_budget = a.edge_budget.unwrap_or(gapgen::DEFAULT_EDGE_BUDGET);
    let node_budget = a.node_budget.unwrap_or(optimize::DEFAULT_NODE_BUDGET);
    echo_config(
        "gap",
        json!({
            "r": a.r, "k": a.k, "full": a.full, "out": path_str(&a.out),
            "verify": !a.no_verify, "format": a.format.name(),
            "edgeBudget": edge_budget, "nodeBudget": node_budget,
        }),
    );
    let inst = build_ahk_with_budget(a.r, a.k, a.full, edge_budget)?;
    let doc = inst.hypergraph.serialize();
    emit(a.out.as_deref(), doc)?;
    if a.no_verify {
        return Ok(());
    }
    let rep = verify_gap(&inst, node_budget)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&rep)?,
        Format::Table => rep.table(),
    };
    // with the instance on stdout, the report must not interleave with it
    if a.out.is_some() {
        emit(None, text)?;
    } else {
        eprint!("{}", with_newline(text));
    }
    check_violations(&rep.violations())
}

fn check_violations(v: &[String]) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        bail!("report check failed: {}", v.join("; "))
    }
}

fn solve(a: SolveArgs) -> Result<()> {
    let node_budget = a.node_budget.unwrap_or(optimize::DEFAULT_NODE_BUDGET);
    let input = a.input.or(a.in_path).unwrap_or_else(|| PathBuf::from("-"));
    echo_config(
        "solve",
        json!({
            "input": input.display().to_string(), "mode": mode_name(a.mode),
            "out": path_str(&a.out), "format": a.format.name(), "nodeBudget": node_budget,
        }),
    );
    let h = PartiteHypergraph::parse(&read_text(&input)?).with_context(|| format!("parsing {}", input.display()))?;
    let name = if input == Path::new("-") {
        "stdin".to_string()
    } else {
        input.file_name().map_or_else(|| input.display().to_string(), |n| n.to_string_lossy().into_owned())
    };
    let rep = optimize::solve(&h, &name, a.mode, node_budget)?;
    if let Some(out) = &a.out {
        emit(Some(out), rep.to_json())?;
    }
    match a.format {
        Format::Json if a.out.is_none() => emit(None, rep.to_json())?,
        Format::Json => {}
        Format::Table => emit(None, solve_table(&rep))?,
    }
    check_violations(&rep.violations())
}

fn mode_name(m: SolveMode) -> &'static str {
    match m {
        SolveMode::Lp => "lp",
        SolveMode::Exact => "exact",
        SolveMode::Round => "round",
        SolveMode::Greedy => "greedy",
        SolveMode::All => "all",
    }
}

fn solve_table(rep: &SolveReport) -> String {
    let mut s = format!("{}\n{}\n", SolveReport::table_header(), rep.table_row());
    let extra = |label: &str, w: &Option<Rational>, ratio: &Option<Rational>| {
        w.as_ref().map(|w| {
            let r = ratio.as_ref().map_or_else(|| "-".to_string(), |r| format!("{} ~{:.4}", fmt(r), to_f64(r)));
            format!("{label:<8} weight {:>12}  over lp {r}\n", fmt(w))
        })
    };
    if let Some(line) = extra("rounded", &rep.rounded_cover_weight, &rep.rounded_over_lp) {
        s.push_str(&line);
    }
    if let Some(line) = extra("greedy", &rep.greedy_cover_weight, &rep.greedy_over_lp) {
        s.push_str(&line);
    }
    s
}

fn report(a: ReportArgs) -> Result<()> {
    let edge_budget = a.edge_budget.unwrap_or(gapgen::DEFAULT_EDGE_BUDGET);
    let node_budget = a.node_budget.unwrap_or(optimize::DEFAULT_NODE_BUDGET);
    let pairs: Vec<String> = a.pairs.iter().map(|(r, k)| format!("{r}:{k}")).collect();
    echo_config(
        "report",
        json!({
            "pairs": pairs, "full": a.full, "format": a.format.name(), "out": path_str(&a.out),
            "edgeBudget": edge_budget, "nodeBudget": node_budget,
        }),
    );
    let mut reports: Vec<GapReport> = Vec::new();
    for &(r, k) in &a.pairs {
        let inst = build_ahk_with_budget(r, k, a.full, edge_budget)?;
        let rep = verify_gap(&inst, node_budget)?;
        // vc/lp below 1 would contradict weak duality; never print one
        if rep.ratio < Rational::from_integer(1.into()) {
            bail!("(r, k) = ({r}, {k}): ratio {} violates weak duality", fmt(&rep.ratio));
        }
        reports.push(rep);
    }
    let json_doc = || serde_json::to_string_pretty(&reports).expect("reports serialize");
    if let Some(out) = &a.out {
        emit(Some(out), json_doc())?;
    }
    match a.format {
        Format::Json if a.out.is_none() => emit(None, json_doc())?,
        Format::Json => {}
        Format::Table => {
            let mut s = String::new();
            for (i, rep) in reports.iter().enumerate() {
                let t = rep.table();
                let mut lines = t.lines();
                let header = lines.next().unwrap_or_default();
                if i == 0 {
                    s.push_str(header);
                    s.push('\n');
                }
                for l in lines {
                    s.push_str(l);
                    s.push('\n');
                }
            }
            emit(None, s)?;
        }
    }
    Ok(())
}

// ---- setfam

fn setfam_measure(a: MeasureArgs) -> Result<()> {
    echo_config(
        "setfam measure",
        json!({ "family": a.family.display().to_string(), "p": fmt(&a.p) }),
    );
    let fam = read_family(&a.family)?;
    let m = setfam::measure_family(&fam, &a.p)?;
    emit(
        None,
        pretty(&json!({
            "n": fam.n(), "size": fam.len(), "p": fmt(&a.p),
            "measure": fmt(&m), "approx": to_f64(&m),
        })),
    )
}

fn setfam_shift(a: ShiftArgs) -> Result<()> {
    echo_config(
        "setfam shift",
        json!({
            "family": a.family.display().to_string(), "i": a.i, "j": a.j, "out": path_str(&a.out),
        }),
    );
    let fam = read_family(&a.family)?;
    let shifted = match (a.i, a.j) {
        (Some(i), Some(j)) => setfam::shift_once(&fam, i, j)?,
        _ => setfam::left_shift(&fam),
    };
    emit(a.out.as_deref(), shifted.to_json())
}

fn setfam_cross(a: CrossArgs) -> Result<()> {
    let limit = a.limit.map_or(setfam::DEFAULT_PRODUCT_LIMIT, u128::from);
    let files: Vec<String> = a.families.iter().map(|p| p.display().to_string()).collect();
    echo_config("setfam cross", json!({ "t": a.t, "families": files, "limit": limit.to_string() }));
    let fams = a.families.iter().map(|p| read_family(p)).collect::<Result<Vec<_>>>()?;
    let out = match setfam::is_cross_intersecting(&fams, a.t, limit)? {
        CrossCheck::Holds => json!({ "holds": true }),
        CrossCheck::Violated(w) => json!({
            "holds": false,
            "witness": w.iter().map(subset_json).collect::<Vec<_>>(),
        }),
    };
    emit(None, pretty(&out))
}

fn setfam_witness(a: WitnessArgs) -> Result<()> {
    let files: Vec<String> = a.families.iter().map(|p| p.display().to_string()).collect();
    let qs: Vec<String> = a.q.iter().map(fmt).collect();
    echo_config(
        "setfam witness",
        json!({ "t": a.t, "q": qs, "families": files, "shift": a.shift, "prefix": a.prefix }),
    );
    if a.q.len() != a.families.len() {
        return Err(usage(format!("{} biases for {} families", a.q.len(), a.families.len())));
    }
    let mut fams = a.families.iter().map(|p| read_family(p)).collect::<Result<Vec<_>>>()?;
    if a.shift {
        fams = fams.iter().map(setfam::left_shift).collect();
    }
    if a.prefix {
        let mut rows = Vec::new();
        for (f, q) in fams.iter().zip(&a.q) {
            rows.push(match setfam::prefix_density_witness(f, q, a.t, true)? {
                DensityWitness::AllDense => json!({ "allDense": true }),
                DensityWitness::Counterexample(s) => json!({ "allDense": false, "counterexample": subset_json(&s) }),
            });
        }
        return emit(None, pretty(&json!({ "families": rows })));
    }
    match setfam::balls_and_bins_witness(&fams, &a.q, a.t, None)? {
        BallsAndBins::Tuple(g) => {
            let n = fams[0].n();
            let meet = g.iter().fold(GroundSubset::full(n).bits(), |acc, s| acc & s.bits());
            let meet = GroundSubset::from_bits(n, meet)?;
            emit(
                None,
                pretty(&json!({
                    "outcome": "tuple",
                    "tuple": g.iter().map(subset_json).collect::<Vec<_>>(),
                    "intersection": subset_json(&meet),
                })),
            )
        }
        BallsAndBins::ProcedureBlocked { step } => Err(anyhow!("procedure blocked at step {step}")),
        BallsAndBins::InvalidOutput { family } => Err(anyhow!("procedure produced invalid output for family {family}")),
    }
}

fn setfam_t(a: TArgs) -> Result<()> {
    echo_config(
        "setfam t",
        json!({ "eps": fmt(&a.eps), "delta": fmt(&a.delta), "format": a.format.name() }),
    );
    let t = setfam::chernoff_t(&a.eps, &a.delta)?;
    match a.format {
        Format::Table => emit(None, t.to_string()),
        Format::Json => emit(None, pretty(&json!({ "eps": fmt(&a.eps), "delta": fmt(&a.delta), "t": t }))),
    }
}

// ---- pcp

fn per_layer(name: &str, v: &[usize], layers: usize) -> Result<Vec<usize>> {
    match v.len() {
        1 => Ok(vec![v[0]; layers]),
        n if n == layers => Ok(v.to_vec()),
        n => Err(usage(format!("--{name} has {n} values for {layers} layers"))),
    }
}

fn pcp_gen(a: PcpGenArgs) -> Result<()> {
    let vars = per_layer("vars", &a.vars, a.layers)?;
    let ranges = per_layer("ranges", &a.ranges, a.layers)?;
    echo_config(
        "pcp gen",
        json!({
            "layers": a.layers, "vars": vars, "ranges": ranges, "density": fmt(&a.density),
            "seed": a.seed, "planted": a.planted, "out": path_str(&a.out),
            "labelingOut": path_str(&a.labeling_out),
        }),
    );
    let (csp, planted) = pcp::make_toy_layered_csp(&ToySpec {
        layers: a.layers,
        vars_per_layer: vars,
        range_sizes: ranges,
        density: a.density,
        planted: a.planted,
        seed: a.seed,
    })?;
    emit(a.out.as_deref(), csp.to_json())?;
    if let (Some(path), Some(lab)) = (&a.labeling_out, planted) {
        emit(Some(path), serde_json::to_string(&lab)?)?;
    }
    Ok(())
}

fn read_csp(path: &Path) -> Result<LayeredCsp> {
    LayeredCsp::from_json(&read_text(path)?).with_context(|| format!("loading {}", path.display()))
}

fn pcp_best(a: PcpBestArgs) -> Result<()> {
    let budget = a.budget.map_or(pcp::DEFAULT_LABELING_BUDGET, u128::from);
    echo_config(
        "pcp best",
        json!({ "csp": a.csp.display().to_string(), "l": a.l, "l2": a.l2, "budget": budget.to_string() }),
    );
    let csp = read_csp(&a.csp)?;
    let best = pcp::best_labeling_with_budget(&csp, a.l, a.l2, budget)?;
    emit(
        None,
        pretty(&json!({
            "l": a.l, "l2": a.l2, "labeling": best.labeling,
            "fraction": best.fraction.to_json_value(),
            "satisfied": best.satisfied, "total": best.total,
        })),
    )
}

fn pcp_density(a: PcpDensityArgs) -> Result<()> {
    let chosen: Vec<Value> = a.choose.iter().map(|(l, v)| json!({ "layer": l, "vars": v })).collect();
    echo_config(
        "pcp density",
        json!({ "csp": a.csp.display().to_string(), "delta": fmt(&a.delta), "choose": chosen }),
    );
    let csp = read_csp(&a.csp)?;
    let layers: Vec<usize> = a.choose.iter().map(|(l, _)| *l).collect();
    let subsets: Vec<Vec<String>> = a.choose.iter().map(|(_, v)| v.clone()).collect();
    let out = match pcp::weak_density_check(&csp, &a.delta, &layers, &subsets)? {
        DensityOutcome::Pair { l, l2, count, total } => {
            json!({ "outcome": "pair", "l": l, "l2": l2, "count": count, "total": total })
        }
        DensityOutcome::Fail => json!({ "outcome": "fail" }),
    };
    emit(None, pretty(&out))
}

// ---- reduction

fn reduce(a: ReduceArgs) -> Result<()> {
    let budget = a.budget.map_or(reduction::DEFAULT_CANDIDATE_BUDGET, u128::from);
    echo_config(
        "reduce",
        json!({
            "csp": a.csp.display().to_string(), "k": a.k, "r": a.r, "eps": fmt(&a.eps),
            "out": path_str(&a.out), "hypergraphOut": path_str(&a.hypergraph_out),
            "labeling": path_str(&a.labeling), "isetOut": path_str(&a.iset_out),
            "budget": budget.to_string(),
        }),
    );
    let csp = read_csp(&a.csp)?;
    let params = ReductionParams::new(a.k, a.eps, a.r)?;
    let inst = reduction::build_reduction_with_budget(&csp, &params, budget)?;
    let h = &inst.hypergraph;
    let csp_value: Value = serde_json::from_str(&csp.to_json())?;
    let mut doc = json!({
        "params": params,
        "csp": csp_value,
        "vertices": h.num_vertices(),
        "edges": h.num_edges(),
        "candidates": inst.candidates.to_string(),
        "totalWeight": fmt(&h.total_weight()),
    });
    if let (Some(lab_path), Some(iset_path)) = (&a.labeling, &a.iset_out) {
        let lab: Labeling = serde_json::from_value(read_json(lab_path)?)
            .with_context(|| format!("labeling {}", lab_path.display()))?;
        let c = reduction::completeness_certificate(&inst, &lab)?;
        let ids: Vec<String> = h.ids_of_mask(&c.mask).into_iter().collect();
        emit(Some(iset_path), serde_json::to_string(&ids)?)?;
        doc["completeness"] = json!({
            "weight": fmt(&c.certificate.weight),
            "nonDummyWeight": fmt(&c.non_dummy_weight),
            "expected": fmt(&reduction::completeness_weight(&params)),
        });
    }
    if let Some(p) = &a.hypergraph_out {
        emit(Some(p), h.serialize())?;
    }
    emit(a.out.as_deref(), pretty(&doc))
}

fn load_instance(path: &Path, budget: u128) -> Result<ReductionInstance> {
    let doc = read_json(path)?;
    let params: ReductionParams = serde_json::from_value(doc.get("params").cloned().unwrap_or(Value::Null))
        .with_context(|| format!("params in {}", path.display()))?;
    let csp_doc = doc.get("csp").ok_or_else(|| anyhow!("{} has no csp", path.display()))?;
    let csp = LayeredCsp::from_json(&csp_doc.to_string())?;
    Ok(reduction::build_reduction_with_budget(&csp, &params, budget)?)
}

fn decode(a: DecodeArgs) -> Result<()> {
    let budget = a.budget.map_or(reduction::DEFAULT_CANDIDATE_BUDGET, u128::from);
    echo_config(
        "decode",
        json!({
            "instance": a.instance.display().to_string(), "iset": a.iset.display().to_string(),
            "seed": a.seed, "layers": a.layers, "out": path_str(&a.out), "budget": budget.to_string(),
        }),
    );
    let inst = load_instance(&a.instance, budget)?;
    let ids: Vec<String> = serde_json::from_value(read_json(&a.iset)?)
        .with_context(|| format!("{} must be a JSON array of vertex ids", a.iset.display()))?;
    let mask = reduction::mask_from_ids(&inst, &ids)?;
    let rep = match a.layers.as_deref() {
        Some(&[l, l2]) => {
            let pair = reduction::decode_labeling(&inst, &mask, a.seed, l, l2)?;
            reduction::DecodeReport {
                seed: a.seed,
                t: reduction::witness_threshold(&inst.params)?,
                pairs: vec![pair],
            }
        }
        Some(_) => return Err(usage("--layers takes exactly two values")),
        None => reduction::decode_all(&inst, &mask, a.seed)?,
    };
    emit(a.out.as_deref(), rep.to_json())
}
