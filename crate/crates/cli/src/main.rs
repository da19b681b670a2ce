//! `gdop`: completion, dimension tables, membership, critical pairs and
//! GD table checks from the command line.
//!
//! Exit codes: 0 success (for `reduce`, every element is in the ideal),
//! 1 input or usage error, 2 budget exceeded, 3 a nonzero result (a normal
//! form, a residue, or a failed check).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use gd_operad::coeff::Q;
use gd_operad::diff_poisson::{enumerate_ambiguities, DiffPoisson, Residue, TraceStep};
use gd_operad::element::OperadElement;
use gd_operad::gd_models::{
    bracket1_check, case2_envelope, case3_envelope, check_gd_axioms, classify_2dim, verify_embedding, Classification,
    GDTable, GdModelError,
};
use gd_operad::groebner::{buchberger_with, load_basis, save_basis, CompletionOptions, GroebnerBasis, GroebnerError};
use gd_operad::hilbert::emit_table;
use gd_operad::linalg::RowSpace;
use gd_operad::order::MonomialOrder;
use gd_operad::presentation::{builtin, Presentation};
use gd_operad::symmetric::{symmetric_to_shuffle, Dictionary, SymmetricRelation};

/// Largest arity computed without `--extended`.
const DEFAULT_ARITY_LIMIT: usize = 5;

#[derive(Parser)]
#[command(name = "gdop", version, about = "Groebner bases for the Gelfand-Dorfman operad and friends")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complete a presentation and write the basis file.
    Gb {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        budget: Budget,
        /// Basis file to write (default `<name>.basis`).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print the dimension table of a basis.
    Dims {
        /// Basis file written by `gb`.
        #[arg(long, conflicts_with_all = ["preset", "input"])]
        basis: Option<PathBuf>,
        #[command(flatten)]
        src: OptSource,
        #[command(flatten)]
        budget: Budget,
        /// Also write the table as `n,dim` rows.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Reduce elements and report membership in the ideal.
    Reduce {
        /// Basis file written by `gb`.
        #[arg(long, required_unless_present = "modulo")]
        basis: Option<PathBuf>,
        /// Complete this builtin presentation instead of loading a basis.
        #[arg(long, conflicts_with = "basis")]
        modulo: Option<String>,
        /// Element file: one element per line in tree syntax, or
        /// `sym: <identity>` for every shuffle image of a symmetric identity.
        #[arg(long, required_unless_present = "identity")]
        input: Option<PathBuf>,
        /// A named identity (`spec1` .. `spec5`, `gd1`, ..), expanded like `sym:`.
        #[arg(long, conflicts_with = "input")]
        identity: Option<String>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Critical pairs of the differential Poisson rewriting system.
    Ambiguities {
        #[arg(long)]
        degree: usize,
        /// Builtin presentation the residues are reduced against.
        #[arg(long, default_value = "gd")]
        modulo: String,
        /// Print both reduction traces for every pair.
        #[arg(long)]
        emit_trace: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Axioms, classification and envelope check for a GD table.
    CheckGd {
        file: PathBuf,
        /// Degree bound for the derivation check on normal monomials.
        #[arg(long, default_value_t = 6)]
        truncation: usize,
        /// Derivative order bound for the case 1 bracket.
        #[arg(long, default_value_t = 3)]
        max_order: u32,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Builtin presentation: lie, novikov, gd or wsgd.
    #[arg(long)]
    preset: Option<String>,
    /// Presentation file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct OptSource {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Budget {
    #[arg(long, default_value_t = DEFAULT_ARITY_LIMIT)]
    max_arity: usize,
    /// Monomial order: pathlex or pathlex-rev.
    #[arg(long, default_value = "pathlex")]
    order: String,
    /// Allow arities above the default limit.
    #[arg(long)]
    extended: bool,
    /// Give up on a level with more monomials than this.
    #[arg(long)]
    max_monomials: Option<usize>,
    /// Give up after this many seconds.
    #[arg(long)]
    time_limit: Option<u64>,
}

/// An error with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let err = e.into();
        let budget = matches!(err.downcast_ref::<GroebnerError>(), Some(GroebnerError::BudgetExceeded(_)));
        Failure {
            code: if budget { 2 } else { 1 },
            err,
        }
    }
}

fn budget_exceeded(msg: String) -> Failure {
    Failure {
        code: 2,
        err: anyhow::anyhow!("budget exceeded: {msg}"),
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is taken by budget overruns
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gb { src, budget, output } => cmd_gb(&src, &budget, output),
        Command::Dims {
            basis,
            src,
            budget,
            output,
        } => cmd_dims(basis, &src, &budget, output),
        Command::Reduce {
            basis,
            modulo,
            input,
            identity,
            budget,
        } => cmd_reduce(basis, modulo, input, identity, &budget),
        Command::Ambiguities {
            degree,
            modulo,
            emit_trace,
            output,
        } => cmd_ambiguities(degree, &modulo, emit_trace, output),
        Command::CheckGd {
            file,
            truncation,
            max_order,
        } => cmd_check_gd(&file, truncation, max_order),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn load_presentation(preset: Option<&str>, input: Option<&Path>) -> anyhow::Result<Presentation> {
    match (preset, input) {
        (Some(name), _) => Ok(builtin(name)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Presentation::parse(&text).with_context(|| format!("parsing {}", path.display()))
        }
        (None, None) => bail!("give --preset or --input"),
    }
}

fn complete(p: &Presentation, budget: &Budget) -> Result<GroebnerBasis, Failure> {
    if budget.max_arity > DEFAULT_ARITY_LIMIT && !budget.extended {
        return Err(budget_exceeded(format!(
            "arity {} is above {DEFAULT_ARITY_LIMIT}; pass --extended",
            budget.max_arity
        )));
    }
    let order: MonomialOrder = budget.order.parse()?;
    let mut opts = CompletionOptions::new(budget.max_arity);
    opts.order = order;
    if let Some(m) = budget.max_monomials {
        opts.max_level_monomials = m;
    }
    opts.time_limit = budget.time_limit.map(Duration::from_secs);
    let (b, _) = buchberger_with(p, &opts)?;
    Ok(b)
}

fn write_out(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_gb(src: &Source, budget: &Budget, output: Option<PathBuf>) -> Outcome {
    let p = load_presentation(src.preset.as_deref(), src.input.as_deref())?;
    let b = complete(&p, budget)?;
    let path = output.unwrap_or_else(|| PathBuf::from(format!("{}.basis", p.name)));
    save_basis(&b, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("presentation {} ({}), max arity {}", p.name, b.order().id(), b.max_arity());
    for (n, c) in b.rule_counts() {
        println!("arity {n}: {c} rules");
    }
    print!("{}", emit_table(&b, b.max_arity())?);
    println!("basis written to {}", path.display());
    Ok(0)
}

fn cmd_dims(basis: Option<PathBuf>, src: &OptSource, budget: &Budget, output: Option<PathBuf>) -> Outcome {
    let b = match basis {
        Some(path) => load_basis(&path).with_context(|| format!("loading {}", path.display()))?,
        None => {
            if src.preset.is_none() && src.input.is_none() {
                return Err(anyhow::anyhow!("give --basis, --preset or --input").into());
            }
            complete(&load_presentation(src.preset.as_deref(), src.input.as_deref())?, budget)?
        }
    };
    let table = emit_table(&b, b.max_arity())?;
    print!("{table}");
    if let Some(path) = output {
        write_out(&path, &table.to_csv())?;
    }
    Ok(0)
}

/// Elements of an element file, each with the line it came from.
fn read_elements(text: &str, b: &GroebnerBasis) -> anyhow::Result<Vec<(String, OperadElement)>> {
    let dict = Dictionary::standard(b.signature());
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("line {}", i + 1);
        if let Some(s) = line.strip_prefix("sym:") {
            let rel = SymmetricRelation::parse(s.trim()).with_context(ctx)?;
            for (k, e) in symmetric_to_shuffle(&rel, &dict).with_context(ctx)?.into_iter().enumerate() {
                out.push((format!("line {} image {}", i + 1, k + 1), e));
            }
        } else {
            out.push((format!("line {}", i + 1), OperadElement::parse(line, b.signature()).with_context(ctx)?));
        }
    }
    Ok(out)
}

fn cmd_reduce(
    basis: Option<PathBuf>,
    modulo: Option<String>,
    input: Option<PathBuf>,
    identity: Option<String>,
    budget: &Budget,
) -> Outcome {
    let text = match (&input, &identity) {
        (Some(path), _) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        (None, Some(name)) => {
            let s = gd_operad::fixtures::identity(name).with_context(|| format!("unknown identity `{name}`"))?;
            format!("sym: {s}\n")
        }
        (None, None) => return Err(anyhow::anyhow!("give --input or --identity").into()),
    };
    let b = match (basis, modulo) {
        (Some(path), _) => load_basis(&path).with_context(|| format!("loading {}", path.display()))?,
        (None, Some(name)) => complete(&builtin(&name)?, budget)?,
        (None, None) => return Err(anyhow::anyhow!("give --basis or --modulo").into()),
    };
    let elements = read_elements(&text, &b)?;
    let mut nonzero = 0;
    for (label, e) in &elements {
        let nf = b.reduce(e)?;
        if !nf.is_zero() {
            nonzero += 1;
        }
        println!("{label}: {}", nf.display(b.signature(), b.order()));
    }
    println!("{} of {} elements reduce to 0", elements.len() - nonzero, elements.len());
    Ok(if nonzero == 0 { 0 } else { 3 })
}

fn trace_lines(out: &mut String, steps: &[TraceStep]) {
    for s in steps {
        let _ = writeln!(out, "    {s}");
    }
}

fn cmd_ambiguities(degree: usize, modulo: &str, emit_trace: bool, output: Option<PathBuf>) -> Outcome {
    let ambs = enumerate_ambiguities(degree)?;
    let opts = CompletionOptions::new(degree.max(2));
    let (gd, _) = buchberger_with(&builtin("gd")?, &opts)?;
    let target = if modulo == "gd" {
        gd.clone()
    } else {
        buchberger_with(&builtin(modulo)?, &opts)?.0
    };
    let dp = DiffPoisson::new(&gd);
    let residues: Vec<Residue> = dp.residues(&ambs, &target, Default::default())?;
    let mut out = String::new();
    let mut span = RowSpace::new(target.order());
    for (k, r) in residues.iter().enumerate() {
        let a = &r.ambiguity;
        let _ = writeln!(out, "ambiguity {}: {a}", k + 1);
        let _ = writeln!(out, "  family {}", a.family());
        if emit_trace {
            for (side, app) in [("first", &a.first), ("second", &a.second)] {
                let _ = writeln!(out, "  {side} route:");
                let step = dp.apply(&a.monomial, app)?;
                let mut steps = vec![TraceStep {
                    rule: app.id(),
                    before: a.monomial.to_string(),
                    after: step.to_string(),
                }];
                dp.normal_form_traced(&step, &mut steps)?;
                trace_lines(&mut out, &steps);
            }
        }
        let _ = writeln!(out, "  residue: {}", r.residue.display(target.signature(), target.order()));
        span.insert(&r.residue);
    }
    let mut families: Vec<String> = residues.iter().map(|r| r.ambiguity.family()).collect();
    families.sort();
    families.dedup();
    let zero = residues.iter().filter(|r| r.residue.is_zero()).count();
    let _ = writeln!(out, "degree {degree}, modulo {modulo}");
    let _ = writeln!(out, "ambiguities: {}", residues.len());
    let _ = writeln!(out, "families: {}", families.len());
    let _ = writeln!(out, "zero residues: {zero}");
    let _ = writeln!(out, "residue rank: {}", span.rank());
    if span.rank() > 0 {
        let (names, equal) = named_generators(&span, &target, degree)?;
        let _ = writeln!(
            out,
            "named identities inside the residue span: {} ({})",
            if names.is_empty() { "none".to_string() } else { names.join(" ") },
            if equal { "they span it" } else { "they do not span it" }
        );
    }
    match output {
        Some(path) => write_out(&path, &out)?,
        None => print!("{out}"),
    }
    Ok(if zero == residues.len() { 0 } else { 3 })
}

/// Named identities of the given degree whose shuffle images, reduced by
/// `b`, lie in `span`, and whether those images span all of it.
fn named_generators(span: &RowSpace, b: &GroebnerBasis, degree: usize) -> anyhow::Result<(Vec<String>, bool)> {
    let dict = Dictionary::standard(b.signature());
    let mut names = Vec::new();
    let mut joint = RowSpace::new(b.order());
    for (name, text) in gd_operad::fixtures::IDENTITIES {
        let rel = SymmetricRelation::parse(text)?;
        if rel.degree() != degree {
            continue;
        }
        let images = symmetric_to_shuffle(&rel, &dict)?
            .iter()
            .map(|e| b.reduce(e))
            .collect::<Result<Vec<_>, _>>()?;
        if images.iter().any(|e| !e.is_zero()) && images.iter().all(|e| span.contains(e)) {
            names.push(name.to_string());
            for e in &images {
                joint.insert(e);
            }
        }
    }
    Ok((names, joint.rank() == span.rank()))
}

fn cmd_check_gd(file: &Path, truncation: usize, max_order: u32) -> Outcome {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let t = GDTable::parse(&text).with_context(|| format!("parsing {}", file.display()))?;
    let report = check_gd_axioms(&t);
    print!("{report}");
    if !report.passed() {
        println!("classification: not a GD algebra");
        return Ok(3);
    }
    if t.dim() != 2 {
        println!("classification: only dimension 2 is classified");
        return Ok(0);
    }
    let c = match classify_2dim(&t) {
        Ok(c) => c,
        Err(GdModelError::Axioms(m)) => {
            println!("classification failed: {m}");
            return Ok(3);
        }
        Err(e) => return Err(e.into()),
    };
    println!("classification: {}", c.class);
    let show = |v: &[Q]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
    for (name, v) in ["u", "v"].iter().zip(&c.model_basis) {
        println!("model {name} = {}", show(v));
    }
    let ok = match &c.class {
        Classification::Case2 { alpha, .. } => {
            let r = verify_embedding(&c.model, &case2_envelope(alpha), truncation)?;
            println!("envelope Q[x,e]/(e^2), u -> x, v -> ex");
            print!("{r}");
            r.ok()
        }
        Classification::Case3 { .. } => {
            let r = verify_embedding(&c.model, &case3_envelope(), truncation)?;
            println!("envelope Q[u,v,u',v'] modulo eight relations");
            print!("{r}");
            r.ok()
        }
        Classification::Case1 { alpha, gamma, .. } => {
            let r = bracket1_check(alpha, gamma, max_order)?;
            println!(
                "bracket on u^(m), v^(n): {} Jacobi triples, {} derivation pairs",
                r.jacobi_triples, r.derivation_pairs
            );
            for f in &r.failures {
                println!("FAIL {f}");
            }
            r.ok()
        }
        Classification::Novikov | Classification::LieOnly => {
            println!("envelope: not checked");
            true
        }
    };
    println!("embedding: {}", if ok { "verified" } else { "FAILED" });
    Ok(if ok { 0 } else { 3 })
}
