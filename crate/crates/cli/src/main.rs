//! `clonelab`: fragments, invariants, membership, and check batteries over
//! finite universes, driven by a small problem-file format.
//!
//! Exit codes: 0 success, 1 a check or membership query answered "no",
//! 2 usage or parse problems, 3 a closure ran out of budget.

mod checks;
mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use clonelab_core::galois::{clone_fragment, inv_generate, local_member, pol, LocalVerdict};
use clonelab_core::{Error, Operation, Relation, Universe, DEFAULT_BUDGET};

use checks::Settings;
use problem::ProblemFile;
use report::{table_json, CheckItem, CheckReport};

#[derive(Parser)]
#[command(name = "clonelab", version, about = "finitary operations, relations, and their closures", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the operations of a given arity preserving the named relations
    Pol(PolArgs),
    /// Close a relation under the action of the named operations
    Inv(InvArgs),
    /// List the members of a given arity of the clone generated by the named operations
    Close(CloseArgs),
    /// Decide membership of an operation in a generated clone, exactly or over finite domains
    Member(MemberArgs),
    /// The interpolation verdict for an operation over a list of finite domains
    LocalMember(LocalMemberArgs),
    /// Run a built-in check battery, or the check directives of a problem file
    Check(CheckArgs),
}

#[derive(Args)]
struct PolArgs {
    /// Problem file declaring the universe and relations
    #[arg(long)]
    file: PathBuf,
    /// Comma-separated relation names from the file
    #[arg(long, value_delimiter = ',', required = true)]
    rels: Vec<String>,
    /// Arity of the listed operations
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    json: bool,
    /// Closure step budget
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct InvArgs {
    #[arg(long)]
    file: PathBuf,
    /// Comma-separated operation names acting on the relation
    #[arg(long, value_delimiter = ',', required = true)]
    gens: Vec<String>,
    /// Name of the seed relation
    #[arg(long)]
    rel: String,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct CloseArgs {
    #[arg(long)]
    file: PathBuf,
    /// Comma-separated generator names
    #[arg(long, value_delimiter = ',', required = true)]
    gens: Vec<String>,
    /// Arity of the listed fragment
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct MemberArgs {
    #[arg(long)]
    file: PathBuf,
    /// The operation whose membership is queried
    #[arg(long)]
    op: String,
    /// Comma-separated generator names
    #[arg(long, value_delimiter = ',', required = true)]
    gens: Vec<String>,
    /// JSON file with a list of domains (each a list of tuples); when given,
    /// membership is judged by interpolation on those domains only
    #[arg(long)]
    domains: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct LocalMemberArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    op: String,
    #[arg(long, value_delimiter = ',', required = true)]
    gens: Vec<String>,
    /// JSON file with a list of domains (each a list of tuples)
    #[arg(long)]
    domains: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct CheckArgs {
    /// Which battery to run (pol-inv, compactness-witness, finite-embed,
    /// translation-lattice, antichain-join, antichain-meet, sigma-join,
    /// covering); omit it to run the check directives of --file
    kind: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Comma-separated operation names from --file overriding a battery's
    /// built-in generators
    #[arg(long, requires = "file")]
    gens: Option<String>,
    /// Arity cap for batteries that take one
    #[arg(long)]
    arity: Option<usize>,
    /// Number of randomized trials for batteries that sample
    #[arg(long)]
    trials: Option<usize>,
    /// Seed for every randomized draw
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long)]
    json: bool,
    /// Write the order diagram of the battery's clones to this file
    #[arg(long)]
    dot: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

fn usage<T>(message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(message.into()))
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
        Ok((report, json)) => {
            print!("{}", report.render(json));
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(CheckReport, bool), Failure> {
    match cli.command {
        Command::Pol(args) => {
            let file = load(&args.file)?;
            let u = declared_universe(&file)?;
            let rels = resolve_rels(&file, &args.rels)?;
            let fragment = pol(&rels, args.arity, u, args.budget)?;
            let report = fragment_report(
                format!("pol {} at arity {}", args.rels.join(","), args.arity),
                fragment.len(),
                fragment.entry_vectors(),
                "operation",
            );
            Ok((report, args.json))
        }
        Command::Inv(args) => {
            let file = load(&args.file)?;
            let gens = resolve_ops(&file, &args.gens)?;
            let seed = file
                .rel(&args.rel)
                .ok_or_else(|| Failure::Usage(format!("unknown relation `{}`", args.rel)))?;
            let closed = inv_generate(&gens, seed, args.budget)?;
            let tuples: Vec<Vec<u8>> = closed.tuples().iter().cloned().collect();
            let report = fragment_report(
                format!("inv {} under {}", args.rel, args.gens.join(",")),
                tuples.len(),
                tuples.iter(),
                "tuple",
            );
            Ok((report, args.json))
        }
        Command::Close(args) => {
            let file = load(&args.file)?;
            let u = declared_universe(&file)?;
            let gens = resolve_ops(&file, &args.gens)?;
            let fragment = clone_fragment(&gens, args.arity, u, args.budget)?;
            let report = fragment_report(
                format!("close {} at arity {}", args.gens.join(","), args.arity),
                fragment.len(),
                fragment.entry_vectors(),
                "operation",
            );
            Ok((report, args.json))
        }
        Command::Member(args) => {
            let file = load(&args.file)?;
            let u = declared_universe(&file)?;
            let g = resolve_op(&file, &args.op)?;
            let gens = resolve_ops(&file, &args.gens)?;
            let report = match &args.domains {
                None => {
                    let fragment = clone_fragment(&gens, g.arity(), u, args.budget)?;
                    let member = fragment.contains(&g)?;
                    let mut item = CheckItem::of(format!("{} is a member", args.op), member)
                        .with_detail(format!(
                            "fragment of arity {} has {} operations",
                            g.arity(),
                            fragment.len()
                        ));
                    if !member {
                        item = item.with_certificate(json!({
                            "operation": table_json(&g.tabulate(u)?),
                            "fragment_size": fragment.len(),
                        }));
                    }
                    CheckReport::new(format!("member {}", args.op), None, vec![item])
                }
                Some(path) => {
                    let domains = load_domains(path)?;
                    verdict_report(&args.op, &g, &gens, &domains, u, args.budget)?
                }
            };
            Ok((report, args.json))
        }
        Command::LocalMember(args) => {
            let file = load(&args.file)?;
            let u = declared_universe(&file)?;
            let g = resolve_op(&file, &args.op)?;
            let gens = resolve_ops(&file, &args.gens)?;
            let domains = load_domains(&args.domains)?;
            let report = verdict_report(&args.op, &g, &gens, &domains, u, args.budget)?;
            Ok((report, args.json))
        }
        Command::Check(args) => {
            let file = args.file.as_deref().map(load_path).transpose()?;
            match &args.kind {
                Some(kind) => {
                    let gens = match &args.gens {
                        None => None,
                        Some(list) => {
                            let file = file
                                .as_ref()
                                .expect("clap enforces --gens requires --file");
                            Some(resolve_named_ops(file, list)?)
                        }
                    };
                    let settings = Settings {
                        seed: args.seed,
                        budget: args.budget,
                        trials: args.trials,
                        arity: args.arity,
                        gens,
                        dot: args.dot.clone(),
                    };
                    let report = checks::run_check(kind, &settings)?;
                    Ok((report, args.json))
                }
                None => {
                    let file = match &file {
                        Some(f) => f,
                        None => return usage("give a check kind or --file with check directives"),
                    };
                    let report = run_directives(file, &args)?;
                    Ok((report, args.json))
                }
            }
        }
    }
}

/// Run every `check` directive of a problem file and merge the outcomes
/// into one report; directive arguments override the command-line flags.
fn run_directives(file: &ProblemFile, args: &CheckArgs) -> Result<CheckReport, Failure> {
    if file.checks.is_empty() {
        return usage("the file has no check directives");
    }
    let mut items = Vec::new();
    for directive in &file.checks {
        let mut settings = Settings::plain(args.seed, args.budget);
        settings.trials = args.trials;
        settings.arity = args.arity;
        for (key, value) in &directive.args {
            let bad = |what: &str| {
                Failure::Usage(format!(
                    "line {}: `{value}` is not {what} for `{key}=`",
                    directive.line
                ))
            };
            match key.as_str() {
                "gens" => settings.gens = Some(resolve_named_ops(file, value)?),
                "arity" => settings.arity = Some(value.parse().map_err(|_| bad("an arity"))?),
                "trials" => settings.trials = Some(value.parse().map_err(|_| bad("a count"))?),
                "seed" => settings.seed = value.parse().map_err(|_| bad("a seed"))?,
                "budget" => settings.budget = value.parse().map_err(|_| bad("a budget"))?,
                other => {
                    return usage(format!(
                        "line {}: unknown check argument `{other}=`",
                        directive.line
                    ));
                }
            }
        }
        let report = checks::run_check(&directive.kind, &settings).map_err(|e| match e {
            Error::Invalid(message) => {
                Failure::Usage(format!("line {}: {message}", directive.line))
            }
            other => Failure::Lib(other),
        })?;
        for mut item in report.items {
            item.name = format!("{}: {}", directive.kind, item.name);
            items.push(item);
        }
    }
    Ok(CheckReport::new("check (directives)", Some(args.seed), items))
}

fn load(path: &PathBuf) -> Result<ProblemFile, Failure> {
    load_path(path.as_path())
}

fn load_path(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    problem::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_domains(path: &Path) -> Result<Vec<Vec<Vec<u8>>>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: not a list of domains: {e}", path.display())))
}

fn declared_universe(file: &ProblemFile) -> Result<Universe, Failure> {
    match file.universe {
        Some(u) => Ok(u),
        None => usage("the file declares no universe"),
    }
}

fn resolve_op(file: &ProblemFile, name: &str) -> Result<Operation, Failure> {
    match file.op(name) {
        Some(op) => Ok(op.clone()),
        None => usage(format!("unknown operation `{name}`")),
    }
}

fn resolve_ops(file: &ProblemFile, names: &[String]) -> Result<Vec<Operation>, Failure> {
    names.iter().map(|n| resolve_op(file, n)).collect()
}

fn resolve_named_ops(
    file: &ProblemFile,
    list: &str,
) -> Result<Vec<(String, Operation)>, Failure> {
    list.split(',')
        .map(|n| Ok((n.to_string(), resolve_op(file, n)?)))
        .collect()
}

fn resolve_rels(file: &ProblemFile, names: &[String]) -> Result<Vec<Relation>, Failure> {
    names
        .iter()
        .map(|n| match file.rel(n) {
            Some(r) => Ok(r.clone()),
            None => usage(format!("unknown relation `{n}`")),
        })
        .collect()
}

/// An informational report listing a computed collection: one summary item,
/// then (for small collections) one item per element.
fn fragment_report<'a>(
    command: String,
    len: usize,
    elements: impl Iterator<Item = &'a Vec<u8>>,
    what: &str,
) -> CheckReport {
    let mut items = vec![CheckItem::pass(format!("{len} {what}s"))];
    if len <= 64 {
        for e in elements {
            items.push(CheckItem::pass(format!("{what} {e:?}")));
        }
    }
    CheckReport::new(command, None, items)
}

fn verdict_report(
    name: &str,
    g: &Operation,
    gens: &[Operation],
    domains: &[Vec<Vec<u8>>],
    u: Universe,
    budget: usize,
) -> Result<CheckReport, Failure> {
    let verdict = local_member(g, gens, domains, u, budget)?;
    let item = match verdict {
        LocalVerdict::YesUpTo { domains_tested } => {
            CheckItem::pass(format!("{name} is interpolated on every listed domain"))
                .with_detail(format!("{domains_tested} domains tested"))
        }
        LocalVerdict::No {
            domain_index,
            domain,
            restriction,
        } => CheckItem::fail(format!("{name} is interpolated on every listed domain"))
            .with_detail(format!("domain {domain_index} admits no interpolant"))
            .with_certificate(json!({
                "domain_index": domain_index,
                "domain": domain,
                "restriction": restriction,
            })),
    };
    Ok(CheckReport::new(
        format!("local-member {name}"),
        None,
        vec![item],
    ))
}
