//! `vasrev`: reversible reachability for vector addition systems.
//!
//! Exit status 0 for a conclusive answer, 2 for UNKNOWN, 1 for usage, input
//! or internal errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vasrev_core::bounds::{corollary_x, domain_bound, kirchhoff_bound, revbound_x, run_length_bound};
use vasrev_core::decide::{reduce_coverability, DEFAULT_NODE_BUDGET};
use vasrev_core::flow::bounded_kirchhoff_for;
use vasrev_core::reversibility::{is_reversible, zero_total_kirchhoff};
use vasrev_core::text::{
    emit_certificate, emit_config, emit_index_set, emit_vas, parse_certificate, parse_config, parse_graph,
    parse_vas, parse_vector, ParseError,
};
use vasrev_core::{
    bound_report, decide_reversible, pump_witness, reversibility_domain_min, synthesize_short_run, Action,
    Limits, SearchPolicy, SubreachabilityGraph, Vas, VasError, Verdict,
};

/// Environment variable holding the default node budget of searches.
const BUDGET_VAR: &str = "VASREV_BUDGET";

#[derive(Parser)]
#[command(name = "vasrev", version, about = "Reversible reachability for vector addition systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two configurations reach each other.
    Check {
        #[arg(long)]
        vas: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Largest box side searched.
        #[arg(long = "box", default_value_t = 20)]
        box_size: u64,
        /// Node budget per search (default from VASREV_BUDGET).
        #[arg(long)]
        budget: Option<usize>,
    },
    /// A bounded Kirchhoff function of a graph with a given displacement.
    Kirchhoff {
        #[arg(long)]
        vas: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Whether a witness graph is reversible, with a total zero flow.
    Reversible {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Pumping cycles for the small states of a witness graph.
    Pump {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        s: u64,
    },
    /// A short word with the displacement of a certificate's forward word.
    Shorten {
        #[arg(long)]
        vas: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Turn a coverability question into a reversibility question.
    Reduce {
        #[arg(long)]
        vas: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        cover: String,
    },
    /// Minimal configurations of a reversibility domain inside a box.
    Domain {
        #[arg(long)]
        vas: PathBuf,
        /// 1-based position of the action in the system file.
        #[arg(long)]
        action: usize,
        #[arg(long = "box")]
        box_size: u64,
    },
    /// Evaluate one of the theoretical bounds.
    Bound {
        #[arg(long, value_enum)]
        which: BoundKind,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 1)]
        a: u64,
        /// Norm of the source (revbound) or largest endpoint norm (corollary).
        #[arg(long, default_value_t = 0)]
        p: u64,
        /// Norm of the displacement (revbound).
        #[arg(long, default_value_t = 0)]
        delta: u64,
        /// Number of states (kirchhoff).
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Norm of the target displacement (kirchhoff).
        #[arg(long, default_value_t = 0)]
        m: u64,
        /// Print every digit even for very large values.
        #[arg(long)]
        exact: bool,
    },
    /// Print a random system.
    RandomVas {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        norm: i64,
        #[arg(long, default_value_t = 3)]
        actions: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Revbound,
    Corollary,
    Domain,
    Kirchhoff,
}

enum Failure {
    Usage(String),
    Input(String),
}

impl From<VasError> for Failure {
    fn from(e: VasError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: ParseError) -> Failure {
    Failure::Input(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message))
}

fn flag(name: &str, e: ParseError) -> Failure {
    Failure::Input(format!("--{name}: column {}: {}", e.column, e.message))
}

fn load_vas(path: &Path) -> Result<Vas, Failure> {
    parse_vas(&read(path)?).map_err(|e| located(path, e))
}

fn load_graph(path: &Path) -> Result<SubreachabilityGraph, Failure> {
    parse_graph(&read(path)?).map_err(|e| located(path, e))
}

fn default_budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{BUDGET_VAR} must be a natural number, found `{v}`"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn word_line(word: &[Action]) -> String {
    if word.is_empty() {
        return "(empty)".into();
    }
    word.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

fn check(vas: &Path, from: &str, to: &str, box_size: u64, budget: Option<usize>) -> Outcome {
    let vas = load_vas(vas)?;
    let x = parse_config(from, vas.dim()).map_err(|e| flag("from", e))?;
    let y = parse_config(to, vas.dim()).map_err(|e| flag("to", e))?;
    let policy = SearchPolicy {
        node_budget: match budget {
            Some(b) => b,
            None => default_budget()?,
        },
        ..SearchPolicy::with_box(box_size)
    };
    let mut out = String::new();
    let conclusive = match decide_reversible(&vas, &x, &y, &policy)? {
        Verdict::Yes(cert) => {
            let _ = writeln!(out, "verdict: YES");
            let _ = writeln!(out, "forward-length: {}", cert.alpha().len());
            let _ = writeln!(out, "backward-length: {}", cert.beta().len());
            out.push_str("certificate:\n");
            out.push_str(&emit_certificate(&cert));
            true
        }
        Verdict::No(reason) => {
            let _ = writeln!(out, "verdict: NO");
            let _ = writeln!(out, "reason: {reason}");
            true
        }
        Verdict::Unknown { bound, reason } => {
            let _ = writeln!(out, "verdict: UNKNOWN");
            let _ = writeln!(out, "reason: {reason}");
            let _ = writeln!(out, "complete-at-length: {bound}");
            false
        }
    };
    Ok((out, conclusive))
}

fn kirchhoff(vas: &Path, graph: &Path, target: &str) -> Outcome {
    let vas = load_vas(vas)?;
    let g = load_graph(graph)?;
    if g.dim() != vas.dim() {
        return Err(Failure::Input("graph and system have different dimensions".into()));
    }
    if let Some(a) = g.actions().iter().find(|a| !vas.contains(a)) {
        return Err(Failure::Input(format!("graph action {a} is not in the system")));
    }
    let z = parse_vector(target, g.dim()).map_err(|e| flag("target", e))?;
    let m = z.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let bound = kirchhoff_bound(g.num_states() as u64, g.dim() as u32, g.action_norm(), m);
    let mut out = String::new();
    match bounded_kirchhoff_for(&g, &z, &Limits::default()) {
        Ok(mu) => {
            let counts: Vec<String> = mu.counts().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "result: FOUND");
            let _ = writeln!(out, "counts: {}", counts.join(" "));
            let _ = writeln!(out, "norm: {}", mu.norm_inf());
            let _ = writeln!(out, "bound: {bound}");
            Ok((out, true))
        }
        Err(VasError::NotInMonoid) => {
            let _ = writeln!(out, "result: NONE");
            Ok((out, true))
        }
        Err(e @ VasError::BudgetExceeded { .. }) => {
            let _ = writeln!(out, "result: UNKNOWN");
            let _ = writeln!(out, "reason: {e}");
            Ok((out, false))
        }
        Err(e) => Err(e.into()),
    }
}

fn reversible(graph: &Path) -> Outcome {
    let g = load_graph(graph)?;
    if !g.is_witness() {
        return Err(Failure::Input("the graph is not strongly connected".into()));
    }
    let limits = Limits::default();
    let mut out = String::new();
    let yes = match is_reversible(&g, &limits) {
        Ok(v) => v,
        Err(e @ (VasError::BudgetExceeded { .. } | VasError::CycleCapExceeded(_))) => {
            let _ = writeln!(out, "reversible: UNKNOWN\nreason: {e}");
            return Ok((out, false));
        }
        Err(e) => return Err(e.into()),
    };
    let _ = writeln!(out, "reversible: {}", if yes { "YES" } else { "NO" });
    if yes {
        let mu = zero_total_kirchhoff(&g, &limits)?;
        let counts: Vec<String> = mu.counts().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "zero-flow: {}", counts.join(" "));
        let _ = writeln!(out, "zero-flow-norm: {}", mu.norm_inf());
    }
    Ok((out, true))
}

fn pump(graph: &Path, s: u64) -> Outcome {
    if s == 0 {
        return Err(Failure::Usage("--s must be positive".into()));
    }
    let g = load_graph(graph)?;
    let cert = pump_witness(&g, s)?;
    let pj = &cert.projected;
    let mut out = String::new();
    let _ = writeln!(out, "x: {}", cert.x);
    let _ = writeln!(out, "extractor: {}", cert.extractor);
    let _ = writeln!(out, "J: {}", emit_index_set(&cert.j));
    let _ = writeln!(out, "projected-states: {}", pj.num_states());
    let _ = writeln!(out, "state-bound: {}", cert.state_bound());
    let _ = writeln!(out, "pumped: {}", cert.entries.len());
    for e in &cert.entries {
        let _ = writeln!(out, "state: {}", emit_config(&e.state));
        let _ = writeln!(out, "  anchor: {}", emit_config(pj.state(e.anchor)));
        let _ = writeln!(out, "  forward: {}", word_line(&e.forward.label(pj)));
        let _ = writeln!(out, "  backward: {}", word_line(&e.backward.label(pj)));
    }
    Ok((out, true))
}

fn shorten(vas: &Path, certificate: &Path) -> Outcome {
    let vas = load_vas(vas)?;
    let cert = parse_certificate(&read(certificate)?).map_err(|e| located(certificate, e))?;
    let short = synthesize_short_run(&vas, &cert, &Limits::default())?;
    let t = &short.trace;
    let mut out = String::new();
    let _ = writeln!(out, "length: {}", short.word.len());
    let _ = writeln!(out, "bound: {}", t.bounds.main);
    let _ = writeln!(out, "x: {}", t.x);
    let _ = writeln!(out, "J: {}", emit_index_set(&t.j));
    let _ = writeln!(out, "v-length: {}", t.v_len);
    let _ = writeln!(out, "u-length: {}", t.u_len);
    let _ = writeln!(out, "w-length: {}", t.w_len);
    let _ = writeln!(out, "alpha-tilde-length: {}", t.alpha_tilde_len);
    let _ = writeln!(out, "n: {}", t.n);
    let _ = writeln!(out, "word: {}", word_line(&short.word));
    Ok((out, true))
}

fn reduce(vas: &Path, from: &str, cover: &str) -> Outcome {
    let vas = load_vas(vas)?;
    let x = parse_config(from, vas.dim()).map_err(|e| flag("from", e))?;
    let y = parse_config(cover, vas.dim()).map_err(|e| flag("cover", e))?;
    let (reduced, source, target) = reduce_coverability(&vas, &x, &y)?;
    let mut out = String::new();
    let _ = writeln!(out, "source: {}", emit_config(&source));
    let _ = writeln!(out, "target: {}", emit_config(&target));
    out.push_str("system:\n");
    out.push_str(&emit_vas(&reduced));
    Ok((out, true))
}

fn domain(vas: &Path, action: usize, box_size: u64) -> Outcome {
    let vas = load_vas(vas)?;
    let a = action
        .checked_sub(1)
        .and_then(|k| vas.actions().get(k))
        .ok_or_else(|| Failure::Usage(format!("--action must lie in 1..={}", vas.actions().len())))?
        .clone();
    let r = reversibility_domain_min(&vas, &a, box_size)?;
    let mut out = String::new();
    let _ = writeln!(out, "action: {a}");
    let _ = writeln!(out, "box: {box_size}");
    let _ = writeln!(out, "complete: {}", r.complete);
    let _ = writeln!(out, "bound: {}", r.bound);
    let _ = writeln!(out, "minimal: {}", r.minimal.len());
    for e in &r.minimal {
        let _ = writeln!(out, "element: {}", emit_config(&e.config));
        let _ = writeln!(out, "  return: {}", word_line(&e.return_word));
    }
    Ok((out, r.complete))
}

#[allow(clippy::too_many_arguments)]
fn bound(which: BoundKind, d: u64, a: u64, p: u64, delta: u64, q: u64, m: u64, exact: bool) -> Outcome {
    if d == 0 {
        return Err(Failure::Usage("--d must be positive".into()));
    }
    let small_d = u32::try_from(d).map_err(|_| Failure::Usage("--d is too large".into()))?;
    let value = match which {
        BoundKind::Revbound => {
            let report = bound_report(d, a, p, delta);
            let mut out = String::new();
            let _ = writeln!(out, "x: {}", revbound_x(a, p, delta));
            let _ = writeln!(out, "u-cycle: {}", report.u_cycle);
            let _ = writeln!(out, "alpha-tilde: {}", report.alpha_tilde);
            let main = report.main;
            let shown = match main.value() {
                Some(v) if exact => v.to_string(),
                _ => main.to_string(),
            };
            let _ = writeln!(out, "bound: {shown}");
            return Ok((out, true));
        }
        BoundKind::Corollary => run_length_bound(d, &corollary_x(a, p)),
        BoundKind::Domain => domain_bound(d, a),
        BoundKind::Kirchhoff => {
            let v = kirchhoff_bound(q, small_d, a, m);
            return Ok((format!("bound: {v}\n"), true));
        }
    };
    let shown = match value.value() {
        Some(v) if exact => v.to_string(),
        _ => value.to_string(),
    };
    Ok((format!("bound: {shown}\n"), true))
}

fn random_vas(seed: u64, dim: usize, norm: i64, actions: usize) -> Outcome {
    if dim == 0 || actions == 0 || norm < 0 {
        return Err(Failure::Usage("--dim and --actions must be positive and --norm natural".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<Action> = Vec::new();
    let space = (2 * norm + 1).checked_pow(dim as u32).unwrap_or(i64::MAX);
    let wanted = actions.min(usize::try_from(space).unwrap_or(usize::MAX));
    while chosen.len() < wanted {
        let a = Action::new((0..dim).map(|_| rng.gen_range(-norm..=norm)).collect());
        if !chosen.contains(&a) {
            chosen.push(a);
        }
    }
    Ok((emit_vas(&Vas::new(dim, chosen)?), true))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check {
            vas,
            from,
            to,
            box_size,
            budget,
        } => check(&vas, &from, &to, box_size, budget),
        Command::Kirchhoff { vas, graph, target } => kirchhoff(&vas, &graph, &target),
        Command::Reversible { graph } => reversible(&graph),
        Command::Pump { graph, s } => pump(&graph, s),
        Command::Shorten { vas, certificate } => shorten(&vas, &certificate),
        Command::Reduce { vas, from, cover } => reduce(&vas, &from, &cover),
        Command::Domain { vas, action, box_size } => domain(&vas, action, box_size),
        Command::Bound {
            which,
            d,
            a,
            p,
            delta,
            q,
            m,
            exact,
        } => bound(which, d, a, p, delta, q, m, exact),
        Command::RandomVas {
            seed,
            dim,
            norm,
            actions,
        } => random_vas(seed, dim, norm, actions),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok((out, conclusive)) => {
            print!("{out}");
            ExitCode::from(if conclusive { 0 } else { 2 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `vasrev --help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
