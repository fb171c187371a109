//! The `goalval` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use goalval_core::boolfn::{c_class_count_formula, count_c_classes, exact_min_cnf, exact_min_dnf, TruthTable};
use goalval_core::constructions::GoalRecipe;
use goalval_core::dtree::{decision_list_to_ptf, goal_to_boolean_tree, tree_to_decision_list};
use goalval_core::evalsim::{adaptive_greedy, check_greedy_bound, expected_cost};
use goalval_core::ilp::{self, model_stats, solve_exact, IpModel, SolveOptions, SolveResult, SolveStatus};
use goalval_core::utility::{classify, recover_function, CountingOracle, UtilityTable};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{Cache, Provenance};
use crate::error::{CliError, Result};
use crate::input::{self, FunctionSpec, InstanceFile};

#[derive(Parser, Debug)]
#[command(name = "goalval", version, about = "Goal values of Boolean functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Human-readable output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Default)]
pub struct FnArgs {
    /// and, or, xor, kofn, pairs, triples, lt, unique, agree.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Threshold for kofn/agree, and k for the kofn recipes.
    #[arg(long)]
    pub k: Option<usize>,
    /// Bits for unique/agree, x1 first.
    #[arg(long)]
    pub b: Option<String>,
    /// Truth table, most significant digit first (needs --n).
    #[arg(long)]
    pub hex: Option<String>,
    /// Read-once formula such as "(x1&x2)|(x3&x4)".
    #[arg(long)]
    pub readonce: Option<String>,
    /// Random read-once formula on this many variables (uses --seed).
    #[arg(long)]
    pub random_readonce: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Wall-clock budget in seconds (default 60 for n <= 4, 900 above).
    #[arg(long)]
    pub budget: Option<f64>,
    /// Branch-and-bound node cap.
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Skip the cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Cache file (default: $GOALVAL_CACHE or the user cache directory).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Include an optimal table in the output.
    #[arg(long)]
    pub witness: bool,
    /// Solve with the integer program even for a read-once formula.
    #[arg(long)]
    pub ilp: bool,
    /// Leave out the row `Q >= #relevant variables`.
    #[arg(long)]
    pub no_structural_bound: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LpTarget {
    Goal,
    Kgoal0,
    Kgoal1,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a utility table (JSON {n, values}) or a recipe output against f.
    Verify {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        recipe: Option<String>,
    },
    /// Emit a recipe table for f.
    Construct {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        recipe: String,
    },
    /// Goal value.
    Gamma {
        #[command(flatten)]
        f: FnArgs,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// 0- or 1-goal value.
    Kgamma {
        #[command(flatten)]
        f: FnArgs,
        /// Which certificates carry the maximum: 0 or 1.
        #[arg(long)]
        side: u8,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Recover {f, not f} from a goal-function oracle.
    Recover {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value = "orcombine")]
        recipe: String,
    },
    /// Rank-bounded tree, decision list and threshold polynomial for monotone f.
    Tree {
        #[command(flatten)]
        f: FnArgs,
        /// Use the 0- or 1-goal side; default is the smaller optimum.
        #[arg(long)]
        side: Option<u8>,
        /// Take the k-goal table from this recipe instead of the solver.
        #[arg(long)]
        recipe: Option<String>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Adaptive greedy evaluation and its guarantee.
    Simulate {
        #[command(flatten)]
        f: FnArgs,
        /// Instance JSON {f, n, costs?, probs?, goal}.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value = "orcombine")]
        recipe: String,
        /// Comma-separated costs.
        #[arg(long)]
        costs: Option<String>,
        /// Comma-separated probabilities of each x_i = 1.
        #[arg(long)]
        probs: Option<String>,
    },
    /// Write the integer program in LP format.
    ExportLp {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, value_enum, default_value = "goal")]
        target: LpTarget,
    },
    /// Variable and constraint counts of the integer program.
    Stats {
        /// Single arity; all of 1..=max-n when absent.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
    },
    /// Number of classes under input and output complementation.
    CountClasses {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Minimum DNF and CNF sizes.
    Dscs {
        #[command(flatten)]
        f: FnArgs,
    },
}

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

/// Rendered result of one invocation.
pub struct Output {
    pub body: Body,
    pub code: i32,
}

pub enum Body {
    Json(Value),
    Text(String),
}

impl Output {
    fn ok(v: Value) -> Self {
        Output { body: Body::Json(v), code: EXIT_OK }
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

fn spec(f: &FnArgs, seed: u64) -> FunctionSpec {
    FunctionSpec {
        family: f.family.clone(),
        n: f.n,
        k: f.k,
        b: f.b.clone(),
        hex: f.hex.clone(),
        readonce: f.readonce.clone(),
        random_readonce: f.random_readonce,
        seed,
    }
}

fn side(v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(CliError::usage("--side must be 0 or 1")),
    }
}

/// Budget for an arity when none is given.
pub fn default_budget(n: usize) -> Duration {
    if n <= 4 {
        Duration::from_secs(60)
    } else {
        Duration::from_secs(900)
    }
}

fn run_solver(m: &IpModel, args: &SolveArgs) -> Result<SolveResult> {
    let budget = match args.budget {
        Some(s) if s.is_finite() && s >= 0.0 => Duration::from_secs_f64(s),
        Some(_) => return Err(CliError::usage("--budget must be a non-negative number of seconds")),
        None => default_budget(m.n()),
    };
    let opts = SolveOptions {
        node_limit: args.node_limit,
        use_structural_lower_bound: !args.no_structural_bound,
    };
    let start = Instant::now();
    let mut stop = || start.elapsed() >= budget;
    Ok(solve_exact(m, &opts, &mut stop)?)
}

fn open_cache(args: &SolveArgs) -> Option<Cache> {
    if args.no_cache {
        return None;
    }
    Some(Cache::at(args.cache.clone().unwrap_or_else(Cache::default_path)))
}

#[derive(Serialize)]
struct ValueOut {
    gamma: Option<u64>,
    provenance: Provenance,
    status: SolveStatus,
    bounds: Option<(u64, u64)>,
    cached: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<UtilityTable>,
}

impl ValueOut {
    fn exact(v: u64, provenance: Provenance, cached: bool) -> Self {
        ValueOut {
            gamma: Some(v),
            provenance,
            status: SolveStatus::Optimal,
            bounds: Some((v, v)),
            cached,
            witness: None,
        }
    }
}

fn exit_for(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::BudgetExceeded => EXIT_BUDGET,
        _ => EXIT_OK,
    }
}

/// `k = None` is `Γ`, otherwise `Γ^k`.
fn value_command(f: &FnArgs, seed: u64, k: Option<bool>, args: &SolveArgs) -> Result<Output> {
    let func = spec(f, seed).resolve()?;
    let t = &func.table;
    let cache = open_cache(args);
    if let (Some(c), false) = (&cache, args.witness) {
        let known = c.lookup(t)?;
        let hit = match k {
            None => known.gamma,
            Some(false) => known.gamma0,
            Some(true) => known.gamma1,
        };
        // --ilp only accepts values the solver produced
        if let Some((v, p)) = hit.filter(|h| !args.ilp || h.1 == Provenance::Ilp) {
            return Ok(Output::ok(to_value(&ValueOut::exact(v, p, true))?));
        }
    }
    if let (Some(formula), false) = (&func.formula, args.ilp) {
        let (ds, cs) = formula.ds_cs()?;
        let v = match k {
            None => ds * cs,
            Some(false) => ds,
            Some(true) => cs,
        };
        let v = u64::try_from(v).map_err(|_| CliError::usage("closed-form value exceeds 64 bits"))?;
        if let Some(c) = &cache {
            let (g, g0, g1) = (ds * cs, ds, cs);
            let fit = |x: u128| u64::try_from(x).ok();
            c.record(t, Provenance::ReadonceFormula, fit(g), fit(g0), fit(g1), None)?;
        }
        return Ok(Output::ok(to_value(&ValueOut::exact(v, Provenance::ReadonceFormula, false))?));
    }
    let m = match k {
        None => ilp::build_model(t)?,
        Some(side) => ilp::build_k_model(t, side)?,
    };
    let r = run_solver(&m, args)?;
    let provenance = match r.status {
        SolveStatus::BudgetExceeded => Provenance::ConstructionBound,
        _ => Provenance::Ilp,
    };
    if let Some(c) = &cache {
        match (r.status, k) {
            (SolveStatus::Optimal, None) => c.record(t, provenance, r.gamma, None, None, None).map(drop)?,
            (SolveStatus::Optimal, Some(false)) => c.record(t, provenance, None, r.gamma, None, None).map(drop)?,
            (SolveStatus::Optimal, Some(true)) => c.record(t, provenance, None, None, r.gamma, None).map(drop)?,
            (SolveStatus::BudgetExceeded, None) => c.record(t, provenance, None, None, None, r.bounds).map(drop)?,
            _ => {}
        }
    }
    let out = ValueOut {
        gamma: r.gamma,
        provenance,
        status: r.status,
        bounds: r.bounds,
        cached: false,
        witness: if args.witness { r.witness.clone() } else { None },
    };
    Ok(Output {
        body: Body::Json(to_value(&out)?),
        code: exit_for(r.status),
    })
}

fn recipe_or_table(t: &TruthTable, table: &Option<PathBuf>, recipe: &str, k: Option<usize>) -> Result<UtilityTable> {
    match table {
        Some(p) => input::read_table(p),
        None => Ok(GoalRecipe::from_name(recipe, k)?.build(t)?.table),
    }
}

fn tree_command(f: &FnArgs, seed: u64, side_arg: Option<u8>, recipe: &Option<String>, args: &SolveArgs) -> Result<Output> {
    let t = spec(f, seed).resolve()?.table;
    if !t.is_monotone() {
        return Err(CliError::usage("tree needs a monotone function"));
    }
    let mut budget_hit = false;
    let (k, d, g) = match (recipe, side_arg) {
        (Some(name), s) => {
            let r = GoalRecipe::from_name(name, f.k)?;
            let b = r.build(&t)?;
            let k = match (b.target, s) {
                (goalval_core::constructions::Target::OneGoal, _) => true,
                (goalval_core::constructions::Target::ZeroGoal, _) => false,
                (goalval_core::constructions::Target::Goal, _) => {
                    return Err(CliError::usage("tree needs a 0-goal or 1-goal recipe"));
                }
            };
            (k, b.q, b.table)
        }
        (None, s) => {
            let sides: Vec<bool> = match s {
                Some(v) => vec![side(v)?],
                None => vec![true, false],
            };
            let mut best: Option<(bool, u64, UtilityTable)> = None;
            for k in sides {
                let r = run_solver(&ilp::build_k_model(&t, k)?, args)?;
                budget_hit |= r.status == SolveStatus::BudgetExceeded;
                let (Some((_, hi)), Some(w)) = (r.bounds, r.witness) else {
                    continue;
                };
                if best.as_ref().is_none_or(|(_, q, _)| hi < *q) {
                    best = Some((k, hi, w));
                }
            }
            best.ok_or_else(|| CliError::usage("no k-goal table found within the budget"))?
        }
    };
    let tree = goal_to_boolean_tree(&g, &t, k)?;
    let list = tree_to_decision_list(&tree)?;
    let ptf = decision_list_to_ptf(t.n(), &list)?;
    let v = json!({
        "side": u8::from(k),
        "d": d,
        "rank": tree.rank(),
        "depth": tree.depth(),
        "width": list.width(),
        "degree": ptf.degree(),
        "tree_computes_f": tree.computes(&t),
        "list_computes_f": list.computes(&t),
        "ptf_computes_f": ptf.computes(&t),
        "tree": tree,
        "list": list,
        "ptf": ptf,
    });
    Ok(Output {
        body: Body::Json(v),
        code: if budget_hit { EXIT_BUDGET } else { EXIT_OK },
    })
}

fn big(v: &BigUint) -> Value {
    match u64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn stats_row(n: usize) -> Result<Value> {
    // counts come from the built rows; the closed form is a cross-check
    let m = ilp::build_model(&TruthTable::zero(n)?)?;
    let built = m.stats();
    let formula = model_stats(n);
    if built != formula {
        return Err(CliError::usage(format!("built model for n={n} disagrees with the closed form")));
    }
    Ok(json!({"n": n, "variables": built.variables, "constraints": built.constraints}))
}

pub fn execute(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    match &cli.command {
        Command::Verify { f, table, recipe } => {
            let t = spec(f, seed).resolve()?.table;
            let g = match (table, recipe) {
                (Some(p), _) => input::read_table(p)?,
                (None, Some(r)) => GoalRecipe::from_name(r, f.k)?.build(&t)?.table,
                (None, None) => return Err(CliError::usage("verify needs --table or --recipe")),
            };
            Ok(Output::ok(to_value(&classify(&g, &t)?)?))
        }
        Command::Construct { f, recipe } => {
            let t = spec(f, seed).resolve()?.table;
            let r = GoalRecipe::from_name(recipe, f.k)?;
            let b = r.build(&t)?;
            Ok(Output::ok(json!({"recipe": r, "target": b.target, "q": b.q, "table": b.table})))
        }
        Command::Gamma { f, solve } => value_command(f, seed, None, solve),
        Command::Kgamma { f, side: s, solve } => value_command(f, seed, Some(side(*s)?), solve),
        Command::Recover { f, table, recipe } => {
            let t = spec(f, seed).resolve()?.table;
            let g = recipe_or_table(&t, table, recipe, f.k)?;
            let mut oracle = CountingOracle::new(&g);
            let r = recover_function(&mut oracle, t.n())?;
            let matches = r.f == t || r.not_f == t;
            Ok(Output::ok(json!({
                "f": r.f.to_hex(),
                "not_f": r.not_f.to_hex(),
                "queries": oracle.queries,
                "expected_queries": 1usize << t.n(),
                "matches_input": matches,
            })))
        }
        Command::Tree { f, side: s, recipe, solve } => tree_command(f, seed, *s, recipe, solve),
        Command::Simulate { f, instance, recipe, costs, probs } => {
            let inst = match instance {
                Some(p) => InstanceFile::load(p)?.build()?,
                None => {
                    let t = spec(f, seed).resolve()?.table;
                    let g = GoalRecipe::from_name(recipe, f.k)?.build(&t)?.table;
                    let costs = costs.as_deref().map(input::parse_rationals).transpose()?;
                    let probs = probs.as_deref().map(input::parse_rationals).transpose()?;
                    input::instance(t, g, costs, probs)?
                }
            };
            let tree = adaptive_greedy(&inst)?;
            let cost = expected_cost(&tree, &inst)?;
            let report = check_greedy_bound(&inst)?;
            let code = if report.passed { EXIT_OK } else { EXIT_INVALID };
            Ok(Output {
                body: Body::Json(json!({"greedy_cost": cost.to_string(), "report": report, "tree": tree})),
                code,
            })
        }
        Command::ExportLp { f, target } => {
            let t = spec(f, seed).resolve()?.table;
            let m = match target {
                LpTarget::Goal => ilp::build_model(&t)?,
                LpTarget::Kgoal0 => ilp::build_k_model(&t, false)?,
                LpTarget::Kgoal1 => ilp::build_k_model(&t, true)?,
            };
            Ok(Output {
                body: Body::Text(ilp::write_lp(&m)),
                code: EXIT_OK,
            })
        }
        Command::Stats { n, max_n } => match n {
            Some(n) => {
                let row = stats_row(*n)?;
                Ok(Output::ok(json!({"variables": row["variables"], "constraints": row["constraints"]})))
            }
            None => Ok(Output::ok(Value::Array((1..=*max_n).map(stats_row).collect::<Result<_>>()?))),
        },
        Command::CountClasses { n, max_n } => {
            let row = |n: usize| -> Result<Value> {
                let e = count_c_classes(n)?;
                let c = c_class_count_formula(n);
                Ok(json!({"n": n, "enumerated": big(&e), "formula": big(&c), "agree": e == c}))
            };
            match n {
                Some(n) => Ok(Output::ok(row(*n)?)),
                None => Ok(Output::ok(Value::Array((1..=*max_n).map(row).collect::<Result<_>>()?))),
            }
        }
        Command::Dscs { f } => {
            let func = spec(f, seed).resolve()?;
            let v = match &func.formula {
                Some(formula) => {
                    let (ds, cs) = formula.ds_cs()?;
                    json!({"ds": ds, "cs": cs, "method": "readonce-formula", "formula": formula.to_string()})
                }
                None => {
                    let (d, c) = (exact_min_dnf(&func.table)?, exact_min_cnf(&func.table)?);
                    json!({"ds": d.len(), "cs": c.len(), "method": "exact-cover", "dnf": d.to_string(), "cnf": c.to_string()})
                }
            };
            Ok(Output::ok(v))
        }
    }
}

fn pretty_table(v: &Value, cols: &[&str]) -> Option<String> {
    let rows: Vec<&Value> = match v {
        Value::Array(a) => a.iter().collect(),
        Value::Object(_) => vec![v],
        _ => return None,
    };
    if rows.iter().any(|r| cols.iter().any(|c| r.get(*c).is_none())) {
        return None;
    }
    let cell = |r: &Value, c: &str| match &r[c] {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let widths: Vec<usize> = cols
        .iter()
        .map(|c| rows.iter().map(|r| cell(r, c).len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |vals: Vec<String>, out: &mut String| {
        let parts: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:>w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(cols.iter().map(|c| c.to_string()).collect(), &mut out);
    for r in rows {
        line(cols.iter().map(|c| cell(r, c)).collect(), &mut out);
    }
    Some(out)
}

fn render(cli: &Cli, body: &Body) -> Result<String> {
    Ok(match body {
        Body::Text(t) => t.clone(),
        Body::Json(v) if cli.pretty => {
            let table = match cli.command {
                Command::Stats { .. } => pretty_table(v, &["n", "variables", "constraints"]),
                Command::CountClasses { .. } => pretty_table(v, &["n", "enumerated", "formula"]),
                _ => None,
            };
            match table {
                Some(t) => t,
                None => format!("{}\n", serde_json::to_string_pretty(v)?),
            }
        }
        Body::Json(v) => format!("{}\n", serde_json::to_string(v)?),
    })
}

/// Parses `args`, runs, writes the result and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let result = execute(&cli).and_then(|out| Ok((render(&cli, &out.body)?, out.code)));
    match result {
        Ok((text, code)) => {
            let written = match &cli.out {
                Some(p) => fs::write(p, text.as_bytes()),
                None => stdout.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INVALID;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}
