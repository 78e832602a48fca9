//! Command-line front end for exact epsilon-factor and cycle computations
//! on the projective line over a finite field.
//!
//! Output is JSON-lines with a stable `schema` field, except for `explain`,
//! which prints a human-readable derivation trace. Exit codes: 0 when
//! everything passed, 1 when a verification failed, 2 on configuration
//! errors (bad flags, unparsable files, invalid inputs).

mod specfile;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use epsilon_cycles_core::charsums::{gauss_sum, stickelberger_valuation, JacobiDatum};
use epsilon_cycles_core::checks::{
    builtin_catalog, explain, run_check, CheckOutcome, CheckSpec, Verdict,
};
use epsilon_cycles_core::cycles::{char_cycle, epsilon_cycle};
use epsilon_cycles_core::finite_field::{AddChar, Fq, MultChar};
use epsilon_cycles_core::lfunction::{frobenius_trace_sum, global_epsilon, l_function, LFunction};
use epsilon_cycles_core::local_epsilon::{
    local_epsilon_bare, local_epsilon_corrected, wild_local_epsilon_via_global, Form,
};
use epsilon_cycles_core::padic::{cyclotomic_p_valuation, gauss_sum_padic_valuation};
use epsilon_cycles_core::polynomial::{Place, Poly, RatFunc};
use epsilon_cycles_core::sheaf::Sheaf;
use specfile::{CatalogFile, SpecFile};

const SCHEMA: &str = "1";

#[derive(Parser)]
#[command(
    name = "epsilon-cycles",
    version,
    about = "Exact epsilon factors, L-functions, and characteristic/epsilon cycles of rank-1 sheaves on P^1 over F_q"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one Gauss sum exactly, with its p-adic valuation
    GaussSum(GaussSumArgs),
    /// Compute the Jacobi sum of a datum of characters on the base field
    JacobiSum(JacobiSumArgs),
    /// Valuations of Gauss sums by the digit-sum formula and the p-adic oracle
    Stickelberger(StickelbergerArgs),
    /// Power sums, L-polynomial, and global epsilon class of a sheaf
    LFunction(LFunctionArgs),
    /// Global epsilon class of a sheaf
    GlobalEpsilon(SpecArgs),
    /// Local epsilon class of a sheaf at one place, for a given form
    LocalEpsilon(LocalEpsilonArgs),
    /// The epsilon cycle of a sheaf, one component per line
    EpsilonCycle(SpecArgs),
    /// The characteristic cycle of a sheaf, one component per line
    CharCycle(SpecArgs),
    /// Verify the Milnor-type formula for f = x^n at the origin
    MilnorCheck(CheckArgs),
    /// Verify the product formula for a tame sheaf
    ProductFormulaCheck(CheckArgs),
    /// Verify normal-crossings coefficients against external products
    ExternalProductCheck(CheckArgs),
    /// Verify normal-crossings coefficients for one to three branches
    SncCheck(CheckArgs),
    /// Run a verification catalog (a TOML file or a builtin name)
    RunCatalog(RunCatalogArgs),
    /// Print a step-by-step derivation trace for a check
    Explain(ExplainArgs),
}

#[derive(Args)]
struct FieldArgs {
    /// Characteristic of the base field
    #[arg(long)]
    p: u64,
    /// Degree of the base field over its prime field
    #[arg(long, default_value_t = 1)]
    f: u32,
}

impl FieldArgs {
    fn build(&self) -> Result<std::sync::Arc<Fq>> {
        Ok(Fq::new(self.p, self.f)?)
    }
}

#[derive(Args)]
struct GaussSumArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Exponent k of the multiplicative character chi_k
    #[arg(long)]
    char_exponent: u64,
    /// Parameter c of the additive character psi_c (nonzero)
    #[arg(long, default_value_t = 1)]
    add_shift: u64,
}

#[derive(Args)]
struct JacobiSumArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Comma-separated character exponents; the characters must multiply
    /// to the trivial character
    #[arg(long, value_delimiter = ',', required = true)]
    exponents: Vec<u64>,
    /// Parameter of the auxiliary additive character
    #[arg(long, default_value_t = 1)]
    psi: u64,
}

#[derive(Args)]
struct StickelbergerArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Restrict to a single character exponent (default: all nontrivial)
    #[arg(long)]
    char_exponent: Option<u64>,
}

#[derive(Args)]
struct SpecArgs {
    /// TOML spec file with [field] and [sheaf] blocks
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args)]
struct LFunctionArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// How many power sums S_n to report (default: the degree bound)
    #[arg(long)]
    n_max: Option<u32>,
}

#[derive(Args)]
struct LocalEpsilonArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// The place: a rational point "a", "inf", or a monic irreducible
    /// polynomial in x
    #[arg(long)]
    point: String,
    /// Form coefficient g with omega = g dx (overrides the [form] block)
    #[arg(long)]
    form: Option<String>,
}

#[derive(Args, Default)]
struct CheckArgs {
    /// TOML spec file; flags below override its blocks
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Characteristic of the base field
    #[arg(long)]
    p: Option<u64>,
    /// Degree of the base field over its prime field
    #[arg(long)]
    f: Option<u32>,
    /// Sheaf expression
    #[arg(long)]
    sheaf: Option<String>,
    /// Form coefficient g with omega = g dx
    #[arg(long)]
    form: Option<String>,
    /// Generic small parameter (covering degree)
    #[arg(long)]
    n: Option<u64>,
    /// First convolution degree
    #[arg(long)]
    n1: Option<u64>,
    /// Second convolution degree
    #[arg(long)]
    n2: Option<u64>,
    /// Comma-separated character exponents
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<u64>>,
    /// Constant twist expression
    #[arg(long)]
    twist: Option<String>,
    /// Seed for randomized suites
    #[arg(long)]
    seed: Option<u64>,
    /// Case count for randomized suites
    #[arg(long)]
    cases: Option<u64>,
}

impl CheckArgs {
    fn to_check_spec(&self, default_name: &str) -> Result<CheckSpec> {
        let file = SpecFile::load_optional(self.spec.as_deref())?;
        let mut spec = file.to_check_spec(default_name);
        if let Some(p) = self.p {
            spec.field = Some((p, self.f.unwrap_or(1)));
        } else if let Some(f) = self.f {
            if let Some((p, _)) = spec.field {
                spec.field = Some((p, f));
            } else {
                bail!("--f was given without --p or a [field] block");
            }
        }
        if self.sheaf.is_some() {
            spec.sheaf = self.sheaf.clone();
        }
        if self.form.is_some() {
            spec.form = self.form.clone();
        }
        spec.n = self.n.or(spec.n);
        spec.n1 = self.n1.or(spec.n1);
        spec.n2 = self.n2.or(spec.n2);
        if self.exponents.is_some() {
            spec.exponents = self.exponents.clone();
        }
        if self.twist.is_some() {
            spec.twist = self.twist.clone();
        }
        spec.seed = self.seed.or(spec.seed);
        spec.cases = self.cases.or(spec.cases);
        Ok(spec)
    }
}

#[derive(Args)]
struct RunCatalogArgs {
    /// Path to a catalog TOML file, or a builtin catalog name
    catalog: String,
    /// Maximum number of entries run in parallel
    /// (the EPSILON_JOBS environment variable overrides this flag)
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed applied to randomized entries that do not fix their own
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExplainArgs {
    /// The check to trace
    #[arg(long)]
    check: String,
    #[command(flatten)]
    rest: CheckArgs,
}

fn main() -> ExitCode {
    // Die silently on a closed pipe (`epsilon-cycles ... | head`), like
    // other line-oriented tools, instead of panicking mid-report.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GaussSum(args) => cmd_gauss_sum(args),
        Command::JacobiSum(args) => cmd_jacobi_sum(args),
        Command::Stickelberger(args) => cmd_stickelberger(args),
        Command::LFunction(args) => cmd_l_function(args),
        Command::GlobalEpsilon(args) => cmd_global_epsilon(args),
        Command::LocalEpsilon(args) => cmd_local_epsilon(args),
        Command::EpsilonCycle(args) => cmd_epsilon_cycle(args),
        Command::CharCycle(args) => cmd_char_cycle(args),
        Command::MilnorCheck(args) => cmd_single_check(args, "milnor"),
        Command::ProductFormulaCheck(args) => cmd_single_check(args, "product-formula"),
        Command::ExternalProductCheck(args) => cmd_single_check(args, "external-product"),
        Command::SncCheck(args) => cmd_single_check(args, "snc"),
        Command::RunCatalog(args) => cmd_run_catalog(args),
        Command::Explain(args) => cmd_explain(args),
    }
}

fn cmd_gauss_sum(args: GaussSumArgs) -> Result<ExitCode> {
    let field = args.field.build()?;
    if args.add_shift % field.q() == 0 {
        bail!("the additive character parameter must be nonzero");
    }
    let chi = MultChar::new(&field, args.char_exponent);
    let psi = AddChar::new(&field, args.add_shift % field.q());
    let value = gauss_sum(&chi, &psi)?;
    let valuation = cyclotomic_p_valuation(&value, field.p())?;
    println!(
        "{}",
        json!({
            "schema": SCHEMA,
            "command": "gauss-sum",
            "q": field.q(),
            "char_exponent": chi.exponent(),
            "add_shift": psi.parameter(),
            "value": value.to_string(),
            "cyclotomic_order": value.order(),
            "valuation": valuation.to_string(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_jacobi_sum(args: JacobiSumArgs) -> Result<ExitCode> {
    let field = args.field.build()?;
    let entries: Vec<MultChar> = args
        .exponents
        .iter()
        .map(|&k| MultChar::new(&field, k))
        .collect();
    let datum = JacobiDatum::new(&field, entries)?;
    if args.psi % field.q() == 0 {
        bail!("the additive character parameter must be nonzero");
    }
    let value = datum.jacobi_sum_with(args.psi % field.q())?;
    println!(
        "{}",
        json!({
            "schema": SCHEMA,
            "command": "jacobi-sum",
            "q": field.q(),
            "exponents": args.exponents,
            "psi": args.psi % field.q(),
            "value": value.to_string(),
            "cyclotomic_order": value.order(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_stickelberger(args: StickelbergerArgs) -> Result<ExitCode> {
    let field = args.field.build()?;
    let q = field.q();
    let exponents: Vec<u64> = match args.char_exponent {
        Some(k) => vec![k % (q - 1)],
        None => (1..q - 1).collect(),
    };
    let mut all_agree = true;
    for k in exponents {
        let chi = MultChar::new(&field, k);
        let digit = stickelberger_valuation(&chi);
        let oracle = gauss_sum_padic_valuation(&field, k, 1)?;
        let agrees = digit == oracle;
        all_agree &= agrees;
        println!(
            "{}",
            json!({
                "schema": SCHEMA,
                "command": "stickelberger",
                "q": q,
                "char_exponent": k,
                "valuation": digit.to_string(),
                "oracle_valuation": oracle.to_string(),
                "agrees": agrees,
            })
        );
    }
    Ok(if all_agree { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn load_field_and_sheaf(path: &Path) -> Result<(std::sync::Arc<Fq>, Sheaf, SpecFile)> {
    let file = SpecFile::load(path)?;
    let (p, f) = file.require_field()?;
    let field = Fq::new(p, f)?;
    let sheaf = Sheaf::parse(&field, file.require_sheaf()?)?;
    Ok((field, sheaf, file))
}

fn cmd_l_function(args: LFunctionArgs) -> Result<ExitCode> {
    let (field, sheaf, _) = load_field_and_sheaf(&args.spec.spec)?;
    let l = l_function(&sheaf)?;
    let n_max = args.n_max.unwrap_or_else(|| l.degree().max(1) as u32);
    let mut power_sums = Vec::new();
    for n in 1..=n_max {
        power_sums.push(frobenius_trace_sum(&sheaf, n)?.to_string());
    }
    let l_json = match &l {
        LFunction::Polynomial { coeffs } => json!({
            "kind": "polynomial",
            "coeffs": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        }),
        LFunction::GeometricallyConstant { alpha } => json!({
            "kind": "geometrically-constant",
            "alpha": alpha.to_string(),
        }),
    };
    let eps = global_epsilon(&sheaf)?;
    println!(
        "{}",
        json!({
            "schema": SCHEMA,
            "command": "l-function",
            "q": field.q(),
            "sheaf": sheaf.to_string(),
            "S": power_sums,
            "L": l_json,
            "degree": l.degree(),
            "epsilon": {
                "class": eps.to_string(),
                "valuation": eps.p_valuation()?.to_string(),
            },
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_global_epsilon(args: SpecArgs) -> Result<ExitCode> {
    let (field, sheaf, _) = load_field_and_sheaf(&args.spec)?;
    let eps = global_epsilon(&sheaf)?;
    println!(
        "{}",
        json!({
            "schema": SCHEMA,
            "command": "global-epsilon",
            "q": field.q(),
            "sheaf": sheaf.to_string(),
            "epsilon": eps.to_string(),
            "valuation": eps.p_valuation()?.to_string(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_point(field: &std::sync::Arc<Fq>, s: &str) -> Result<Place> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "oo") {
        return Ok(Place::Infinity);
    }
    let poly = Poly::parse(field, t)?;
    match poly.deg() {
        // the zero polynomial only arises from input like "0", which names
        // the origin
        None => Ok(Place::rational(field, 0)),
        Some(0) => {
            // a constant names the rational point x = c
            let c = poly.eval(0);
            Ok(Place::rational(field, c))
        }
        Some(_) => {
            let (monic, _) = poly.monic();
            if !monic.is_irreducible() {
                bail!("{t} is not irreducible, so it does not define a place");
            }
            Ok(Place::Finite(monic))
        }
    }
}

fn cmd_local_epsilon(args: LocalEpsilonArgs) -> Result<ExitCode> {
    let (field, sheaf, file) = load_field_and_sheaf(&args.spec.spec)?;
    let place = parse_point(&field, &args.point)?;
    let g = args
        .form
        .as_deref()
        .or_else(|| file.form_expr())
        .unwrap_or("1");
    let omega = Form::new(RatFunc::parse(&field, g)?)?;
    let data = sheaf.local_data(&place)?;
    let (bare, corrected, derived) = if data.swan > 0 {
        let derived = wild_local_epsilon_via_global(&sheaf, &omega)?;
        if derived.place != place {
            bail!(
                "the sheaf's wild place is {}, not {place}",
                derived.place
            );
        }
        (derived.factor.clone(), derived.factor, true)
    } else {
        (
            local_epsilon_bare(&sheaf, &place, &omega)?,
            local_epsilon_corrected(&sheaf, &place, &omega)?,
            false,
        )
    };
    println!(
        "{}",
        json!({
            "schema": SCHEMA,
            "command": "local-epsilon",
            "q": field.q(),
            "sheaf": sheaf.to_string(),
            "point": place.to_string(),
            "form": g,
            "ord_omega": omega.ord_at(&place),
            "swan": data.swan,
            "bare": bare.to_string(),
            "corrected": corrected.to_string(),
            "derived_from_global": derived,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_epsilon_cycle(args: SpecArgs) -> Result<ExitCode> {
    let (field, sheaf, _) = load_field_and_sheaf(&args.spec)?;
    let cycle = epsilon_cycle(&sheaf)?;
    for (component, coeff) in cycle.coefficients() {
        println!(
            "{}",
            json!({
                "schema": SCHEMA,
                "command": "epsilon-cycle",
                "q": field.q(),
                "component": component.to_string(),
                "coefficient": coeff.class.to_string(),
                "multiplicity": coeff.multiplicity,
            })
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_char_cycle(args: SpecArgs) -> Result<ExitCode> {
    let (field, sheaf, _) = load_field_and_sheaf(&args.spec)?;
    let cycle = char_cycle(&sheaf)?;
    for (component, coeff) in cycle.coefficients() {
        println!(
            "{}",
            json!({
                "schema": SCHEMA,
                "command": "char-cycle",
                "q": field.q(),
                "component": component.to_string(),
                "coefficient": coeff,
            })
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn print_outcome(outcome: &CheckOutcome) {
    let mut line = json!({
        "schema": SCHEMA,
        "check": outcome.check,
        "inputs": outcome.inputs,
        "left": outcome.left,
        "right": outcome.right,
        "verdict": match outcome.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip(_) => "skip",
        },
        "millis": outcome.millis,
    });
    if let Verdict::Skip(reason) = &outcome.verdict {
        line["reason"] = json!(reason);
    }
    println!("{line}");
}

fn cmd_single_check(args: CheckArgs, name: &str) -> Result<ExitCode> {
    let spec = args.to_check_spec(name)?;
    let outcome = run_check(&spec)?;
    print_outcome(&outcome);
    Ok(if outcome.verdict.is_failure() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_run_catalog(args: RunCatalogArgs) -> Result<ExitCode> {
    let path = Path::new(&args.catalog);
    let specs: Vec<CheckSpec> = if path.exists() {
        CatalogFile::load(path)?
            .entry
            .iter()
            .map(|e| e.to_check_spec(args.seed))
            .collect()
    } else if let Some(builtin) = builtin_catalog(&args.catalog) {
        builtin
            .into_iter()
            .map(|mut s| {
                if s.seed.is_none() {
                    s.seed = args.seed;
                }
                s
            })
            .collect()
    } else {
        bail!(
            "{} is neither a catalog file nor a builtin catalog name",
            args.catalog
        );
    };
    let jobs = std::env::var("EPSILON_JOBS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(args.jobs)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    let outcomes = run_entries(&specs, jobs)?;
    let mut failed = false;
    for outcome in &outcomes {
        print_outcome(outcome);
        failed |= outcome.verdict.is_failure();
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

/// Runs catalog entries on up to `jobs` worker threads; the returned
/// outcomes keep the catalog order.
fn run_entries(
    specs: &[CheckSpec],
    jobs: usize,
) -> Result<Vec<CheckOutcome>> {
    let slots: Vec<Mutex<Option<epsilon_cycles_core::Result<CheckOutcome>>>> =
        specs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(specs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                let outcome = run_check(&specs[i]);
                *slots[i].lock().expect("result slot") = Some(outcome);
            });
        }
    });
    slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            slot.into_inner()
                .expect("result slot")
                .expect("every entry was visited")
                .map_err(|e| anyhow!("catalog entry {} ({}): {e}", i + 1, specs[i].check))
        })
        .collect()
}

fn cmd_explain(args: ExplainArgs) -> Result<ExitCode> {
    let spec = args.rest.to_check_spec(&args.check)?;
    let trace = explain(&spec)?;
    print!("{trace}");
    Ok(ExitCode::SUCCESS)
}
