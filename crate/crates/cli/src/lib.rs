//! Command-line surface over `robinson-core`.
//!
//! [`run_command`] does all the work and never exits the process, so the
//! binary is a thin wrapper and tests can drive every subcommand in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use robinson_core::cohen::{
    amalgamate, build_generic_real, build_mutual_tower, verify_amalgamation, AmalgamationCertificate,
    CohenError, Condition, DenseFamily, RealApprox,
};
use robinson_core::forcing::{self, ForcingEngine, ForcingError, Trace};
use robinson_core::logic::{classify, parse_formula, satisfies_sentence, Budget, LogicError, Signature};
use robinson_core::modal::{self, parse_modal, ModalError, Principle};
use robinson_core::structure::{sigma_closed_probe, ExtensionSystem, StructureError};
use robinson_core::suites::{Suite, ALL_SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub code: i32,
    /// Human-readable report, or the error message when `code >= 2`.
    pub report: String,
    /// Set only under `--json`.
    pub json: Option<Value>,
}

impl CommandResult {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            report: msg.into(),
            json: None,
        }
    }

    fn exhausted(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_EXHAUSTED,
            report: msg.into(),
            json: None,
        }
    }

    /// Text for standard output: the JSON payload when present.
    pub fn stdout(&self) -> String {
        match &self.json {
            Some(v) => serde_json::to_string_pretty(v).expect("values serialize") + "\n",
            None if self.code < EXIT_USAGE => self.report.clone(),
            None => String::new(),
        }
    }

    /// Text for standard error: the message of a usage error or exhaustion.
    pub fn stderr(&self) -> String {
        if self.code >= EXIT_USAGE && !self.report.ends_with('\n') {
            format!("{}\n", self.report)
        } else if self.code >= EXIT_USAGE {
            self.report.clone()
        } else {
            String::new()
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "robinson", version, about = "Robinson forcing over finite extension systems")]
struct Cli {
    /// Emit the JSON payload instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ClassArg {
    /// Extension system document (JSON).
    #[arg(long)]
    class: PathBuf,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Largest sentence size in the pools.
    #[arg(long, default_value_t = 5)]
    budget: usize,
    /// Largest size of sentences that mention parameters; defaults to
    /// `--budget`.
    #[arg(long)]
    param_budget: Option<usize>,
}

impl BudgetArgs {
    fn get(&self) -> Budget {
        let b = Budget::new(self.budget);
        match self.param_budget {
            Some(p) => b.with_param_size(p),
            None => b,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and report its quantifier class.
    Parse {
        #[arg(long)]
        formula: String,
        /// Take the signature from this extension system.
        #[arg(long)]
        class: Option<PathBuf>,
        /// Signature as `name:arity,...` when no class is given.
        #[arg(long, default_value = "<:2")]
        relations: String,
        /// Accept `[]` and `<>`.
        #[arg(long)]
        modal: bool,
    },
    /// Evaluate a sentence classically at a node.
    Eval {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        node: String,
        #[arg(long)]
        formula: String,
    },
    /// Decide whether a node forces a sentence.
    Force {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        node: String,
        #[arg(long)]
        formula: String,
        /// Print the derivation trace.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 8)]
        trace_depth: usize,
    },
    /// Report which nodes are budget-generic.
    Generics {
        #[command(flatten)]
        class: ClassArg,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Only this node; exit 1 unless it is generic.
        #[arg(long)]
        node: Option<String>,
    },
    /// Walk from a node to a budget-generic node.
    BuildGeneric {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        node: String,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Largest number of moves; defaults to the largest pool.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run a named property suite.
    Check {
        #[command(flatten)]
        class: ClassArg,
        /// One of facts, infgen, geneq, excomp, pi2, mp, ra, oracle, or all.
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Evaluate a modal sentence or check MP / RA.
    Modal {
        #[command(flatten)]
        class: ClassArg,
        /// Defaults to every node.
        #[arg(long)]
        node: Option<String>,
        #[arg(long, conflicts_with = "principle", required_unless_present = "principle")]
        formula: Option<String>,
        #[arg(long)]
        principle: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Σ₁ absoluteness of a node into its descendants.
    Bfa {
        #[command(flatten)]
        class: ClassArg,
        /// Defaults to every node.
        #[arg(long)]
        node: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Cohen reals at finite depth.
    Cohen {
        #[command(subcommand)]
        command: CohenCommand,
    },
    /// Probe chains of extensions for lower bounds.
    Probe {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, default_value_t = 3)]
        length: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Only use edges whose size label is at most this.
        #[arg(long)]
        kappa: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct FamiliesArgs {
    /// Dense families, `;`-separated.
    #[arg(long, default_value = "")]
    families: String,
    #[arg(long, default_value_t = 64)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum CohenCommand {
    /// Build one real meeting every family.
    Gen {
        #[command(flatten)]
        fam: FamiliesArgs,
    },
    /// Build `k` mutually generic reals.
    Tower {
        #[command(flatten)]
        fam: FamiliesArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Amalgamate a tower into one real, printing the certificate.
    Amalgamate {
        #[command(flatten)]
        fam: FamiliesArgs,
        /// Build a seeded tower of this many reals.
        #[arg(long, required_unless_present = "inputs")]
        k: Option<usize>,
        /// JSON array of bit strings or reals to use instead of a tower.
        #[arg(long, conflicts_with = "k")]
        inputs: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay a certificate.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        /// Families to check against; defaults to the ones recorded.
        #[arg(long)]
        families: Option<String>,
    },
}

/// Runs one command. `argv` excludes the program name.
pub fn run_command<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = std::iter::once("robinson".into()).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return CommandResult {
                code,
                report: e.render().to_string(),
                json: None,
            };
        }
    };
    let json = cli.json;
    match dispatch(cli.command) {
        Ok(out) => CommandResult {
            code: if out.holds { EXIT_OK } else { EXIT_FAILS },
            report: out.report,
            json: json.then_some(out.payload),
        },
        Err(e) => e,
    }
}

struct Output {
    holds: bool,
    report: String,
    payload: Value,
}

impl Output {
    fn new(holds: bool, report: String, payload: impl Serialize) -> Self {
        Self {
            holds,
            report,
            payload: serde_json::to_value(payload).expect("reports serialize"),
        }
    }
}

type Outcome = Result<Output, CommandResult>;

fn read(path: &Path) -> Result<String, CommandResult> {
    fs::read_to_string(path).map_err(|e| CommandResult::usage(format!("cannot read {}: {e}", path.display())))
}

fn load(class: &ClassArg) -> Result<ExtensionSystem, CommandResult> {
    ExtensionSystem::from_json(&read(&class.class)?)
        .map_err(|e| CommandResult::usage(format!("{}: {e}", class.class.display())))
}

fn seed(seed: Option<u64>) -> Result<u64, CommandResult> {
    seed.ok_or_else(|| CommandResult::usage("this command is randomized and needs --seed"))
}

fn logic_err(e: LogicError) -> CommandResult {
    CommandResult::usage(e.to_string())
}

fn structure_err(e: StructureError) -> CommandResult {
    CommandResult::usage(e.to_string())
}

fn forcing_err(e: ForcingError) -> CommandResult {
    match e {
        ForcingError::MoveCapExceeded { .. } => CommandResult::exhausted(e.to_string()),
        ForcingError::Inconsistent(_) => CommandResult {
            code: EXIT_FAILS,
            report: e.to_string(),
            json: None,
        },
        _ => CommandResult::usage(e.to_string()),
    }
}

fn modal_err(e: ModalError) -> CommandResult {
    CommandResult::usage(e.to_string())
}

fn cohen_err(e: CohenError) -> CommandResult {
    if e.is_exhaustion() {
        CommandResult::exhausted(e.to_string())
    } else {
        CommandResult::usage(e.to_string())
    }
}

fn families(spec: &str) -> Result<Vec<DenseFamily>, CommandResult> {
    DenseFamily::parse_many(spec, None).map_err(cohen_err)
}

fn nodes(sys: &ExtensionSystem, node: &Option<String>) -> Result<Vec<usize>, CommandResult> {
    match node {
        Some(id) => Ok(vec![sys.require_node(id).map_err(structure_err)?]),
        None => Ok((0..sys.nodes().len()).collect()),
    }
}

fn budget_line(b: Budget) -> String {
    if b.param_size == b.size {
        format!("budget {}", b.size)
    } else {
        format!("budget {} (parameters {})", b.size, b.param_size)
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Parse {
            formula,
            class,
            relations,
            modal,
        } => {
            let sig = match class {
                Some(path) => load(&ClassArg { class: path })?.signature,
                None => signature(&relations)?,
            };
            if modal {
                let m = parse_modal(&formula, &sig).map_err(logic_err)?;
                let text = m.render(&sig);
                let payload = serde_json::json!({"formula": text, "modal_depth": m.modal_depth()});
                return Ok(Output::new(
                    true,
                    format!("{text}\nmodal depth {}\n", m.modal_depth()),
                    payload,
                ));
            }
            let phi = parse_formula(&formula, &sig).map_err(logic_err)?;
            let class = classify(&phi).map_err(logic_err)?;
            let text = phi.render(&sig);
            let payload = serde_json::json!({"formula": text, "class": class, "size": phi.size()});
            Ok(Output::new(
                true,
                format!("{text}\nclass {class}\nsize {}\n", phi.size()),
                payload,
            ))
        }
        Command::Eval { class, node, formula } => {
            let sys = load(&class)?;
            let n = sys.require_node(&node).map_err(structure_err)?;
            let phi = parse_formula(&formula, &sys.signature).map_err(logic_err)?;
            let value = satisfies_sentence(sys.node(n), &phi).map_err(logic_err)?;
            let text = phi.render(&sys.signature);
            let payload = serde_json::json!({"node": node, "sentence": text, "value": value});
            Ok(Output::new(true, format!("{node} |= {text}: {value}\n"), payload))
        }
        Command::Force {
            class,
            node,
            formula,
            trace,
            trace_depth,
        } => {
            let sys = load(&class)?;
            let phi = parse_formula(&formula, &sys.signature).map_err(logic_err)?;
            let v = forcing::forces(&sys, &node, &phi, trace_depth).map_err(forcing_err)?;
            let word = if v.forced { "forced" } else { "not-forced" };
            let mut report = format!("{} ⊩ {}: {word}\n", v.node, v.sentence);
            if trace {
                render_trace(&v.trace, 1, &mut report);
            }
            Ok(Output::new(true, report, &v))
        }
        Command::Generics { class, budget, node } => {
            let sys = load(&class)?;
            let b = budget.get();
            let mut engine = ForcingEngine::new(&sys);
            let reports: Vec<_> = nodes(&sys, &node)?.into_iter().map(|n| engine.genericity(n, b)).collect();
            let mut report = format!("{}\n", budget_line(b));
            for r in &reports {
                let _ = write!(report, "{}: ", r.node);
                if r.generic {
                    let _ = writeln!(report, "generic ({} sentences)", r.pool_size);
                } else {
                    let _ = writeln!(
                        report,
                        "not generic ({} of {} undecided, first: {})",
                        r.undecided.len(),
                        r.pool_size,
                        r.undecided[0]
                    );
                }
            }
            let holds = node.is_none() || reports.iter().all(|r| r.generic);
            Ok(Output::new(holds, report, &reports))
        }
        Command::BuildGeneric { class, node, budget, cap } => {
            let sys = load(&class)?;
            let p = forcing::build_generic(&sys, &node, budget.get(), cap).map_err(forcing_err)?;
            let mut report = format!("{} -> {} in {} moves\n", p.start, p.end, p.steps.len());
            for s in &p.steps {
                let _ = writeln!(
                    report,
                    "  {} -> {} (edge {}, map [{}]) forcing {}",
                    s.from,
                    s.to,
                    s.edge,
                    s.map.join(", "),
                    s.sentence
                );
            }
            Ok(Output::new(true, report, &p))
        }
        Command::Check { class, suite, budget } => {
            let sys = load(&class)?;
            let suites = if suite == "all" {
                ALL_SUITES.to_vec()
            } else {
                vec![suite.parse::<Suite>().map_err(CommandResult::usage)?]
            };
            let b = budget.get();
            let mut engine = ForcingEngine::new(&sys);
            let reports: Vec<_> = suites.into_iter().map(|s| engine.suite(s, b)).collect();
            let mut report = String::new();
            for r in &reports {
                let _ = writeln!(
                    report,
                    "{}: {} ({} checks, {}, generic nodes [{}])",
                    r.suite,
                    if r.holds { "holds" } else { "FAILS" },
                    r.checked,
                    budget_line(b),
                    r.generic_nodes.join(", ")
                );
                for v in &r.violations {
                    let _ = writeln!(report, "  violation: {v}");
                }
                if r.violation_count > r.violations.len() {
                    let _ = writeln!(report, "  ... {} violations in all", r.violation_count);
                }
                for n in &r.notes {
                    let _ = writeln!(report, "  note: {n}");
                }
            }
            let holds = reports.iter().all(|r| r.holds);
            let payload = if reports.len() == 1 {
                serde_json::to_value(&reports[0])
            } else {
                serde_json::to_value(&reports)
            }
            .expect("reports serialize");
            Ok(Output::new(holds, report, payload))
        }
        Command::Modal {
            class,
            node,
            formula,
            principle,
            budget,
        } => {
            let sys = load(&class)?;
            let targets = nodes(&sys, &node)?;
            if let Some(text) = formula {
                let m = parse_modal(&text, &sys.signature).map_err(logic_err)?;
                let shown = m.render(&sys.signature);
                let mut values = Vec::new();
                let mut report = String::new();
                for n in targets {
                    let id = sys.node_id(n);
                    let v = modal::modal_eval(&sys, id, &m).map_err(modal_err)?;
                    let _ = writeln!(report, "{id} |= {shown}: {v}");
                    values.push(serde_json::json!({"node": id, "value": v}));
                }
                let payload = serde_json::json!({"formula": shown, "values": values});
                return Ok(Output::new(true, report, payload));
            }
            let principle: Principle = principle
                .expect("clap requires one of --formula and --principle")
                .parse()
                .map_err(CommandResult::usage)?;
            let b = budget.get();
            let mut engine = ForcingEngine::new(&sys);
            let reports: Vec<_> = targets
                .into_iter()
                .map(|n| engine.modal_principle(n, principle, b))
                .collect();
            let mut report = String::new();
            for r in &reports {
                let _ = write!(report, "{}: {} ", r.node, r.principle);
                if r.holds {
                    let _ = writeln!(report, "holds ({})", budget_line(b));
                    continue;
                }
                let _ = writeln!(
                    report,
                    "fails on {} via {}",
                    r.sentence.as_deref().unwrap_or("?"),
                    r.path.join(" -> ")
                );
                if let Some(reading) = r.reading {
                    let _ = writeln!(report, "  {reading}");
                }
            }
            let holds = reports.iter().all(|r| r.holds);
            Ok(Output::new(holds, report, &reports))
        }
        Command::Bfa { class, node, budget } => {
            let sys = load(&class)?;
            let b = budget.get();
            let mut engine = ForcingEngine::new(&sys);
            let mut report = String::new();
            let mut payload = Vec::new();
            let mut holds = true;
            for n in nodes(&sys, &node)? {
                let v = engine.bfa_sigma1(n, b);
                let id = sys.node_id(n);
                holds &= v.is_empty();
                let _ = writeln!(report, "{id}: {} violations", v.len());
                for x in v.iter().take(10) {
                    let _ = writeln!(report, "  {} (map [{}]): {}", x.descendant, x.map.join(", "), x.sentence);
                }
                payload.push(serde_json::json!({"node": id, "violations": v}));
            }
            Ok(Output::new(holds, report, payload))
        }
        Command::Cohen { command } => cohen_command(command),
        Command::Probe {
            class,
            length,
            samples,
            kappa,
            seed: s,
        } => {
            let s = seed(s)?;
            let sys = load(&class)?;
            if length == 0 || samples == 0 {
                return Err(CommandResult::usage("--length and --samples must be positive"));
            }
            let r = sigma_closed_probe(&sys, length, samples, s, kappa);
            let mut report = format!(
                "{} chains of length <= {} checked ({}): {}\n",
                r.chains.len(),
                r.chain_length,
                if r.exhaustive { "exhaustive" } else { "sampled" },
                if r.directed { "every chain has a lower bound" } else { "some chain has no lower bound" }
            );
            for c in r.chains.iter().filter(|c| c.lower_bound.is_none()).take(10) {
                let _ = writeln!(report, "  no lower bound: {}", c.nodes.join(" -> "));
            }
            Ok(Output::new(r.directed, report, &r))
        }
    }
}

fn cohen_command(cmd: CohenCommand) -> Outcome {
    match cmd {
        CohenCommand::Gen { fam } => {
            let fs = families(&fam.families)?;
            let r = build_generic_real(&fs, fam.depth).map_err(cohen_err)?;
            let mut report = format!("{}\n", r.bits);
            for w in &r.witnesses {
                let _ = writeln!(report, "  {} met by {}", w.family, w.prefix);
            }
            Ok(Output::new(true, report, &r))
        }
        CohenCommand::Tower { fam, k, seed: s } => {
            let s = seed(s)?;
            let fs = families(&fam.families)?;
            let t = build_mutual_tower(k, &fs, fam.depth, s).map_err(cohen_err)?;
            let report = t.iter().enumerate().map(|(n, r)| format!("c_{n} {}\n", r.bits)).collect();
            Ok(Output::new(true, report, &t))
        }
        CohenCommand::Amalgamate { fam, k, inputs, seed: s } => {
            let s = seed(s)?;
            let fs = families(&fam.families)?;
            let tower = match (k, inputs) {
                (_, Some(path)) => read_inputs(&path)?,
                (Some(k), None) => build_mutual_tower(k, &fs, fam.depth, s).map_err(cohen_err)?,
                (None, None) => unreachable!("clap requires --k or --inputs"),
            };
            let cert = amalgamate(&tower, &fs, fam.depth, s).map_err(cohen_err)?;
            let v = verify_amalgamation(&cert, &fs);
            let mut report = String::new();
            for (n, (d, diff)) in cert.output.iter().zip(&cert.diffs).enumerate() {
                let _ = writeln!(report, "d_{n} {d}  diff {diff:?}");
            }
            let _ = writeln!(
                report,
                "{} stages; certificate {}",
                cert.stages.len(),
                if v.valid { "verifies" } else { "does NOT verify" }
            );
            Ok(Output::new(v.valid, report, &cert))
        }
        CohenCommand::Verify { certificate, families: spec } => {
            let text = read(&certificate)?;
            let cert: AmalgamationCertificate = serde_json::from_str(&text)
                .map_err(|e| CommandResult::usage(format!("{}: {e}", certificate.display())))?;
            let spec = spec.unwrap_or_else(|| cert.families.join(";"));
            let fs = families(&spec)?;
            let v = verify_amalgamation(&cert, &fs);
            let report = match &v.failure {
                None => "certificate verifies\n".to_string(),
                Some(f) => format!("certificate rejected: {f}\n"),
            };
            Ok(Output::new(v.valid, report, &v))
        }
    }
}

fn read_inputs(path: &Path) -> Result<Vec<RealApprox>, CommandResult> {
    let text = read(path)?;
    let bad = |e: serde_json::Error| CommandResult::usage(format!("{}: {e}", path.display()));
    if let Ok(bits) = serde_json::from_str::<Vec<Condition>>(&text) {
        return Ok(bits.into_iter().map(RealApprox::bare).collect());
    }
    let reals: Vec<RealApprox> = serde_json::from_str(&text).map_err(bad)?;
    for (n, r) in reals.iter().enumerate() {
        r.verify()
            .map_err(|e| CommandResult::usage(format!("{}: input {n}: {e}", path.display())))?;
    }
    Ok(reals)
}

/// Parses `name:arity,...`.
fn signature(text: &str) -> Result<Signature, CommandResult> {
    let mut rels = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, arity) = part
            .rsplit_once(':')
            .ok_or_else(|| CommandResult::usage(format!("relation `{part}` needs `name:arity`")))?;
        let arity = arity
            .parse::<usize>()
            .map_err(|_| CommandResult::usage(format!("bad arity in `{part}`")))?;
        rels.push((name, arity));
    }
    let sig = Signature::relational(&rels);
    sig.validate().map_err(logic_err)?;
    Ok(sig)
}

fn render_trace(t: &Trace, indent: usize, out: &mut String) {
    for step in &t.steps {
        let pad = "  ".repeat(indent);
        let via = match (&step.edge, &step.element) {
            (Some(e), _) => format!("edge {} -> {} [{}]: ", e.index, e.to, e.map.join(", ")),
            (None, Some(a)) => format!("witness {a}: "),
            (None, None) => String::new(),
        };
        let c = &step.trace;
        let cut = if c.truncated { " (cut)" } else { "" };
        let _ = writeln!(
            out,
            "{pad}{via}{} ⊩ {}: {}{cut}",
            c.node,
            c.sentence,
            if c.forced { "forced" } else { "not-forced" }
        );
        render_trace(c, indent + 1, out);
    }
}
