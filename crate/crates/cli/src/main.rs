//! `degedit`: solve, verify and generate degree editing instances.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degedit::fpt::{self, DriverConfig, Outcome, SolveError, SolveStats, DEFAULT_MAX_TRIALS};
use degedit::hardgen::{self, BudgetSplit, CliqueInstance, DegreeProfile, HardgenError};
use degedit::instance::{
    parse_instance, parse_solution, write_instance, write_solution, SolutionDocument, Verdict,
};
use degedit::oracle::{self, OracleError};
use degedit::universal::{self, UniversalError};
use degedit::{verify, EditSet, EditingInstance, Graph, OperationSet, Vertex};
use serde::Serialize;

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_WORK_LIMIT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "degedit", version, about = "Degree-constrained graph editing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an instance and print a solution document.
    Solve(SolveArgs),
    /// Check a solution document against an instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        output: OutputFormat,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve several instances and print one result line each.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run built-in sanity checks.
    Selftest,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Instance file, or `-` for standard input.
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Algorithm::Fpt)]
    algorithm: Algorithm,
    #[arg(long, value_enum, default_value_t = DriverKind::Universal)]
    driver: DriverKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Colorings tried by the randomized driver.
    #[arg(long, default_value_t = DEFAULT_MAX_TRIALS)]
    max_trials: u64,
    /// Node limit for exhaustive searches.
    #[arg(long, default_value_t = oracle::DEFAULT_WORK_LIMIT)]
    work_limit: u64,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// A random instance with a known solution.
    Planted {
        #[arg(long)]
        n: u32,
        /// Target degree of every vertex.
        #[arg(long, conflicts_with = "degrees", required_unless_present = "degrees")]
        delta: Option<u32>,
        /// Comma-separated target degrees of vertices 1..=n.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<u32>>,
        /// Vertex deletions, edge deletions and edge additions, e.g. `1,0,2`.
        #[arg(long, value_delimiter = ',', default_value = "0,0,1")]
        split: Vec<u32>,
        #[arg(long, default_value = "VDA")]
        ops: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the planted solution here.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Compose regular clique instances into one editing instance.
    ///
    /// Each input is an instance file whose graph is regular; its budget
    /// line supplies the clique size.
    CrossCompose {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Index (0-based) of an input containing the clique given by
        /// `--clique`; its solution is written to `--witness`.
        #[arg(long, requires_all = ["clique", "witness"])]
        copy: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        clique: Option<Vec<Vertex>>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Make a regular graph `(d + k²)`-regular while keeping its k-cliques.
    Regularize {
        input: PathBuf,
        #[arg(long)]
        k: u32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algorithm {
    Fpt,
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DriverKind {
    Randomized,
    Exhaustive,
    Universal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OutputFormat {
    Text,
    Json,
}

/// Failure with an exit code and a one-line message.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::WorkLimitExceeded { .. }
            | SolveError::ColoringCapExceeded { .. }
            | SolveError::Universal(UniversalError::WorkLimitExceeded { .. })
            | SolveError::Universal(UniversalError::CapExceeded { .. }) => EXIT_WORK_LIMIT,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        SolveError::from(e).into()
    }
}

impl From<HardgenError> for Failure {
    fn from(e: HardgenError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("degedit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Solve(args) => solve_command(&args),
        Command::Verify { instance, solution, output } => verify_command(&instance, &solution, output),
        Command::Gen(gen) => gen_command(gen),
        Command::Bench { instances, solver } => bench_command(&instances, &solver),
        Command::Selftest => selftest(),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        return std::io::read_to_string(std::io::stdin())
            .map_err(|e| Failure::usage(format!("stdin: {e}")));
    }
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<EditingInstance, Failure> {
    let text = read_text(path)?;
    parse_instance(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Outcome of one solver run, before formatting.
struct Answer {
    verdict: Verdict,
    edits: EditSet,
    stats: Option<SolveStats>,
}

fn run_solver(inst: &EditingInstance, args: &SolverArgs) -> Result<Answer, Failure> {
    match args.algorithm {
        Algorithm::Oracle => {
            let found = oracle::solve_exact_with_limit(inst, args.work_limit)?;
            let verdict = if found.is_some() { Verdict::Yes } else { Verdict::No };
            Ok(Answer { verdict, edits: found.unwrap_or_default(), stats: None })
        }
        Algorithm::Fpt => {
            let driver = match args.driver {
                DriverKind::Randomized => {
                    fpt::Driver::Randomized { seed: args.seed, max_trials: args.max_trials }
                }
                DriverKind::Exhaustive => fpt::Driver::ExhaustiveColorings,
                DriverKind::Universal => fpt::Driver::Universal { seed: args.seed },
            };
            let config = DriverConfig { oracle_work_limit: args.work_limit, ..DriverConfig::new(driver) };
            let result = fpt::solve(inst, &config)?;
            let (verdict, edits) = match result.outcome {
                Outcome::Yes(e) => (Verdict::Yes, e),
                Outcome::No => (Verdict::No, EditSet::default()),
                Outcome::Inconclusive { .. } => (Verdict::Unknown, EditSet::default()),
            };
            Ok(Answer { verdict, edits, stats: Some(result.stats) })
        }
    }
}

fn exit_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Yes => EXIT_YES,
        Verdict::No => EXIT_NO,
        Verdict::Unknown => EXIT_INCONCLUSIVE,
    }
}

fn algorithm_name(args: &SolverArgs) -> String {
    match args.algorithm {
        Algorithm::Oracle => "oracle".into(),
        Algorithm::Fpt => {
            let driver = match args.driver {
                DriverKind::Randomized => "randomized",
                DriverKind::Exhaustive => "exhaustive",
                DriverKind::Universal => "universal",
            };
            format!("fpt {driver}")
        }
    }
}

#[derive(Serialize)]
struct JsonStats {
    branch_nodes: u64,
    leaves: u64,
    oracle_calls: u64,
    colorings_tried: u64,
    max_table_len: Vec<(u32, usize)>,
}

#[derive(Serialize)]
struct JsonSolution {
    verdict: String,
    cost: usize,
    deleted_vertices: Vec<Vertex>,
    deleted_edges: Vec<[Vertex; 2]>,
    added_edges: Vec<[Vertex; 2]>,
    algorithm: String,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<JsonStats>,
}

fn pairs(set: &BTreeSet<degedit::EdgePair>) -> Vec<[Vertex; 2]> {
    set.iter().map(|e| [e.u(), e.v()]).collect()
}

fn solve_command(args: &SolveArgs) -> Result<u8, Failure> {
    let inst = read_instance(&args.instance)?;
    let answer = run_solver(&inst, &args.solver)?;
    let text = match args.output {
        OutputFormat::Text => {
            let mut doc = SolutionDocument {
                verdict: answer.verdict,
                edits: answer.edits.clone(),
                comments: vec![
                    format!("algorithm {}", algorithm_name(&args.solver)),
                    format!("seed {}", args.solver.seed),
                    format!("cost {}", answer.edits.cost()),
                ],
            };
            if let Some(s) = &answer.stats {
                doc.comments.push(format!("branch_nodes {}", s.branch_nodes));
                doc.comments.push(format!("leaves {}", s.leaves));
                doc.comments.push(format!("oracle_calls {}", s.oracle_calls));
                doc.comments.push(format!("colorings_tried {}", s.colorings_tried));
                for (k, len) in &s.max_table_len {
                    doc.comments.push(format!("max_table_len k={k} {len}"));
                }
            }
            write_solution(&doc)
        }
        OutputFormat::Json => {
            let json = JsonSolution {
                verdict: answer.verdict.to_string(),
                cost: answer.edits.cost(),
                deleted_vertices: answer.edits.deleted_vertices.iter().copied().collect(),
                deleted_edges: pairs(&answer.edits.deleted_edges),
                added_edges: pairs(&answer.edits.added_edges),
                algorithm: algorithm_name(&args.solver),
                seed: args.solver.seed,
                stats: answer.stats.as_ref().map(|s| JsonStats {
                    branch_nodes: s.branch_nodes,
                    leaves: s.leaves,
                    oracle_calls: s.oracle_calls,
                    colorings_tried: s.colorings_tried,
                    max_table_len: s.max_table_len.iter().map(|(&k, &l)| (k, l)).collect(),
                }),
            };
            serde_json::to_string_pretty(&json).expect("serializable") + "\n"
        }
    };
    print!("{text}");
    Ok(exit_code(answer.verdict))
}

#[derive(Serialize)]
struct JsonReport {
    valid: bool,
    violations: Vec<String>,
}

fn verify_command(instance: &Path, solution: &Path, output: OutputFormat) -> Result<u8, Failure> {
    let inst = read_instance(instance)?;
    let text = read_text(solution)?;
    let doc =
        parse_solution(&text).map_err(|e| Failure::usage(format!("{}: {e}", solution.display())))?;
    let violations: Vec<String> = if doc.verdict == Verdict::Yes {
        verify(&inst, &doc.edits).violations.iter().map(|v| v.to_string()).collect()
    } else {
        vec![format!("NoWitness: document verdict is {}", doc.verdict)]
    };
    let valid = violations.is_empty();
    match output {
        OutputFormat::Text => {
            println!("{}", if valid { "valid" } else { "invalid" });
            for v in &violations {
                println!("violation {v}");
            }
        }
        OutputFormat::Json => {
            let report = JsonReport { valid, violations };
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
    }
    Ok(if valid { EXIT_YES } else { EXIT_NO })
}

fn gen_command(gen: GenCommand) -> Result<u8, Failure> {
    match gen {
        GenCommand::Planted { n, delta, degrees, split, ops, seed, solution } => {
            let ops = OperationSet::from_letters(&ops).map_err(|e| Failure::usage(e.to_string()))?;
            let profile = match (delta, degrees) {
                (Some(x), _) => DegreeProfile::Uniform(x),
                (None, Some(list)) => DegreeProfile::List(list),
                (None, None) => return Err(Failure::usage("give --delta or --degrees")),
            };
            let [u, dd, aa] = split[..] else {
                return Err(Failure::usage("--split takes three comma-separated counts"));
            };
            let split = BudgetSplit::new(u, dd, aa);
            let (inst, planted) = hardgen::planted_instance(n, &profile, split, seed, ops)?;
            if let Some(path) = solution {
                write_text(&path, &write_solution(&SolutionDocument::yes(planted)))?;
            }
            print!("{}", write_instance(&inst));
        }
        GenCommand::CrossCompose { inputs, copy, clique, witness } => {
            let mut parts = Vec::new();
            for path in &inputs {
                let inst = read_instance(path)?;
                parts.push(CliqueInstance::new(inst.graph().clone(), inst.k())?);
            }
            let composed = hardgen::cross_compose(&parts)?;
            if let (Some(i), Some(clique), Some(path)) = (copy, clique, witness) {
                let set: BTreeSet<Vertex> = clique.into_iter().collect();
                let sol = hardgen::forward_witness(&composed, i, &set)?;
                write_text(&path, &write_solution(&SolutionDocument::yes(sol)))?;
            }
            print!("{}", write_instance(&composed.instance));
        }
        GenCommand::Regularize { input, k } => {
            let inst = read_instance(&input)?;
            let c = hardgen::cartesian_regularize(inst.graph(), k)?;
            print!("{}", write_instance(&clique_as_instance(&c)));
        }
    }
    Ok(EXIT_YES)
}

/// A clique instance in the instance format: every target is the current
/// degree and the budget line carries `k`.
fn clique_as_instance(c: &CliqueInstance) -> EditingInstance {
    let delta = c.graph.vertices().map(|v| (v, c.d)).collect();
    EditingInstance::new(c.graph.clone(), delta, c.d, c.k, OperationSet::ALL).expect("regular")
}

fn bench_command(paths: &[PathBuf], args: &SolverArgs) -> Result<u8, Failure> {
    println!("c instance verdict cost branch_nodes colorings_tried millis");
    let mut worst = EXIT_YES;
    for path in paths {
        let inst = read_instance(path)?;
        let start = Instant::now();
        let line = match run_solver(&inst, args) {
            Ok(answer) => {
                let stats = answer.stats.unwrap_or_default();
                format!(
                    "{} {} {} {} {}",
                    answer.verdict,
                    answer.edits.cost(),
                    stats.branch_nodes,
                    stats.colorings_tried,
                    start.elapsed().as_millis()
                )
            }
            Err(f) => {
                worst = worst.max(f.code);
                format!("error - - - {} ({})", start.elapsed().as_millis(), f.message)
            }
        };
        println!("{} {line}", path.display());
    }
    Ok(worst)
}

fn selftest() -> Result<u8, Failure> {
    let mut report = String::new();
    let mut failed = 0;
    let mut check = |name: &str, ok: bool| {
        writeln!(report, "{} {name}", if ok { "ok" } else { "FAILED" }).unwrap();
        failed += usize::from(!ok);
    };

    let delta = [(1, 2), (2, 2), (3, 2), (4, 2), (5, 1)].into_iter().collect();
    let p5 = EditingInstance::new(Graph::path(5), delta, 2, 2, OperationSet::ALL).expect("valid");
    for (name, config) in [("exhaustive", DriverConfig::exhaustive()), ("universal", DriverConfig::universal(0))] {
        let ok = matches!(fpt::solve(&p5, &config)?.outcome, Outcome::Yes(ref e) if verify(&p5, e).is_valid());
        check(&format!("path {name}"), ok);
    }
    let star = EditingInstance::new(
        Graph::star(5),
        (1..=6).map(|v| (v, 1)).collect(),
        1,
        2,
        OperationSet::ALL,
    )
    .expect("valid");
    check("star", fpt::solve(&star, &DriverConfig::exhaustive())?.outcome == Outcome::No);

    let k6 = CliqueInstance::new(Graph::complete(6), 2)?;
    let composed = hardgen::cross_compose(&[k6])?;
    let witness = hardgen::forward_witness(&composed, 0, &BTreeSet::from([1, 2]))?;
    check(
        "composition",
        composed.instance.graph().vertex_count() == 17
            && witness.cost() == 10
            && verify(&composed.instance, &witness).is_valid(),
    );

    let regular = hardgen::cartesian_regularize(&Graph::cycle(4), 2)?;
    check("regularize", regular.graph.vertex_count() == 32 && regular.d == 6);

    let family = universal::enumerate_universal(6, 3, universal::Method::Greedy { seed: 0 })
        .map_err(SolveError::from)?;
    check("universal", universal::check_universal(&family, 6, 3).map_err(SolveError::from)?);

    print!("{report}");
    Ok(if failed == 0 { EXIT_YES } else { EXIT_NO })
}
