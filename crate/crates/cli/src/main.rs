//! `amscheme`: certify and verify t-designs carried by codes over
//! association schemes.

mod render;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amscheme_core::amt::{self, AmtInput, Target};
use amscheme_core::codes::descriptor::CodeDescriptor;
use amscheme_core::codes::{dual_code, weight_distribution, BlockCode, DEFAULT_CAP};
use amscheme_core::design::{
    is_t_design, max_design_t, supports_by_class, supports_of_class, supports_of_weight,
};
use amscheme_core::extension::Composition;
use amscheme_core::interpolation::{
    grid_upper_bound, least_space, rational_from_json, GridEmbedding, PointSet,
};
use amscheme_core::scheme::SchemeDescriptor;
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "amscheme",
    version,
    about = "Certify t-designs supported by codes over association schemes"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest code size that may be enumerated.
    #[arg(long, global = true, env = "AMSCHEME_CAP")]
    cap: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scheme utilities.
    Scheme {
        #[command(subcommand)]
        command: SchemeCommand,
    },
    /// Run the certification pipeline on a code.
    Analyze(AnalyzeArgs),
    /// Minimal interpolation degree of a point set.
    Mu(MuArgs),
    /// Exhaustively check that the supports of a class form a t-design.
    VerifyDesign(VerifyArgs),
    /// Write the dual code of an additive code.
    Dual(DualArgs),
    /// Enumerate a code and print its weight distribution.
    Enumerate(EnumerateArgs),
}

#[derive(Subcommand, Debug)]
enum SchemeCommand {
    /// Print |X|, s, P, Q and the p, q tensors.
    Show { path: PathBuf },
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    code: PathBuf,
    /// Composition assumed to support a t-design, e.g. 6,3. Repeatable.
    #[arg(long = "k-exclude", value_name = "ALPHA")]
    k_exclude: Vec<String>,
    /// Dual composition validated as a weakly balanced array. Repeatable.
    #[arg(long = "l-exclude", value_name = "ALPHA")]
    l_exclude: Vec<String>,
    /// Target t, or `max`.
    #[arg(long, default_value = "max")]
    t: String,
    /// Exhaustively verify every class with the design checker.
    #[arg(long)]
    verify: bool,
    /// Base codeword as comma-separated symbol indices.
    #[arg(long)]
    base: Option<String>,
    /// Use the one-class (Hamming) path; the scheme must have one class.
    #[arg(long)]
    hamming: bool,
    /// With --hamming, also accept the dual weight condition.
    #[arg(long, requires = "hamming")]
    dual_condition: bool,
    /// List classes that could be placed in K.
    #[arg(long)]
    suggest_k: bool,
}

#[derive(Args, Debug)]
struct MuArgs {
    points: PathBuf,
    /// Grid embedding file; checks the stated degree bound.
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Also materialize the certified interpolation basis.
    #[arg(long, requires = "embedding")]
    materialize: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    code: PathBuf,
    /// Composition class, e.g. 3,3.
    #[arg(long, conflicts_with = "weight", required_unless_present = "weight")]
    alpha: Option<String>,
    /// Fused Hamming weight class instead of a composition.
    #[arg(long)]
    weight: Option<u32>,
    /// Strength to check, or `max`.
    #[arg(long, default_value = "max")]
    t: String,
    #[arg(long)]
    base: Option<String>,
}

#[derive(Args, Debug)]
struct DualArgs {
    code: PathBuf,
    /// Write the dual code file here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    code: PathBuf,
    /// Print the words themselves (at most this many).
    #[arg(long)]
    words: Option<usize>,
    #[arg(long)]
    base: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        // processed, but the requested target was not met
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Scheme {
            command: SchemeCommand::Show { path },
        } => scheme_show(cli, path),
        Command::Analyze(a) => analyze(cli, a),
        Command::Mu(a) => mu(cli, a),
        Command::VerifyDesign(a) => verify_design(cli, a),
        Command::Dual(a) => dual(cli, a),
        Command::Enumerate(a) => enumerate(cli, a),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_code(cli: &Cli, path: &Path) -> Result<(CodeDescriptor, BlockCode)> {
    let desc: CodeDescriptor = read_json(path)?;
    let code = desc
        .build()
        .with_context(|| format!("building the code in {}", path.display()))?;
    Ok((desc, code.with_cap(cli.cap.unwrap_or(DEFAULT_CAP))))
}

fn parse_alpha(s: &str, classes: usize) -> Result<Composition> {
    let a: Composition = s.parse().map_err(|e| anyhow!("{e}"))?;
    if a.classes() != classes {
        bail!(
            "composition {a} has {} parts, the scheme has {classes} classes",
            a.classes()
        );
    }
    Ok(a)
}

fn parse_base(s: &Option<String>, n: usize) -> Result<Option<Vec<u8>>> {
    let Some(s) = s else { return Ok(None) };
    let w = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u8>()
                .map_err(|_| anyhow!("bad base symbol {t:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    if w.len() != n {
        bail!("base has length {}, code has length {n}", w.len());
    }
    Ok(Some(w))
}

fn parse_target(s: &str) -> Result<Target> {
    match s {
        "max" => Ok(Target::Max),
        _ => Ok(Target::T(s.parse().map_err(|_| {
            anyhow!("--t expects a number or `max`, got {s:?}")
        })?)),
    }
}

fn emit<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

/// The resolved configuration echoed into every report. Thread count is left
/// out so that reports are identical across thread counts.
fn config(cli: &Cli, command: &str, inputs: Vec<&Path>, extra: Value) -> Value {
    json!({
        "command": command,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "cap": cli.cap.unwrap_or(DEFAULT_CAP).to_string(),
        "options": extra,
    })
}

fn scheme_show(cli: &Cli, path: &Path) -> Result<bool> {
    let desc: SchemeDescriptor = read_json(path)?;
    let s = desc.build().context("validating the scheme")?;
    s.check_invariants().context("validating the scheme")?;
    let view = render::SchemeView::new(&s);
    let out =
        json!({ "config": config(cli, "scheme show", vec![path], json!({})), "scheme": view });
    emit(cli, &out, || view.text())?;
    Ok(true)
}

fn analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<bool> {
    let (desc, code) = load_code(cli, &a.code)?;
    let s = code.scheme().classes();
    let k: BTreeSet<Composition> = a
        .k_exclude
        .iter()
        .map(|x| parse_alpha(x, s))
        .collect::<Result<_>>()?;
    let l: BTreeSet<Composition> = a
        .l_exclude
        .iter()
        .map(|x| parse_alpha(x, s))
        .collect::<Result<_>>()?;
    let target = parse_target(&a.t)?;
    let base = parse_base(&a.base, code.len())?;
    let mut report = if a.hamming {
        if !l.is_empty() || base.is_some() {
            bail!("--hamming does not take --l-exclude or --base");
        }
        let mut r = amt::hamming_certify(&code, &k, a.dual_condition)?;
        r.input.target = target;
        r.target_met = match target {
            Target::Max => true,
            Target::T(t) => r.certified_t >= t,
        };
        r
    } else {
        let input = AmtInput {
            base,
            k_exclude: k,
            l_exclude: l,
            target,
        };
        amt::certify(&code, &input)?
    };
    if a.verify {
        amt::attach_design_checks(&mut report, &code)?;
    }
    if a.suggest_k {
        amt::attach_k_suggestions(&mut report, &code)?;
    }
    let cfg = config(
        cli,
        "analyze",
        vec![&a.code],
        json!({
            "code": desc.name,
            "k_exclude": a.k_exclude,
            "l_exclude": a.l_exclude,
            "t": a.t,
            "verify": a.verify,
            "base": a.base,
            "hamming": a.hamming,
            "dual_condition": a.dual_condition,
            "suggest_k": a.suggest_k,
        }),
    );
    let out = json!({ "config": cfg, "report": report });
    emit(cli, &out, || render::report_text(&report))?;
    Ok(report.target_met)
}

fn read_points(path: &Path) -> Result<PointSet> {
    let raw: Vec<Vec<Value>> = read_json(path)?;
    let dim = raw.first().map(|p| p.len()).unwrap_or(0);
    let points = raw
        .iter()
        .map(|p| {
            p.iter()
                .map(|v| rational_from_json(v).map_err(|e| anyhow!(e)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PointSet::new(dim, points)?)
}

fn mu(cli: &Cli, a: &MuArgs) -> Result<bool> {
    let points = read_points(&a.points)?;
    let space = least_space(&points)?;
    let certificate = match &a.embedding {
        Some(p) => {
            let emb: GridEmbedding = read_json(p)?;
            Some(grid_upper_bound(&points, &emb, a.materialize)?)
        }
        None => None,
    };
    let mut inputs = vec![a.points.as_path()];
    if let Some(p) = &a.embedding {
        inputs.push(p);
    }
    let view = render::MuView::new(&space, certificate);
    let cfg = config(cli, "mu", inputs, json!({ "materialize": a.materialize }));
    let out = json!({ "config": cfg, "result": view });
    emit(cli, &out, || view.text())?;
    Ok(true)
}

fn verify_design(cli: &Cli, a: &VerifyArgs) -> Result<bool> {
    let (desc, code) = load_code(cli, &a.code)?;
    let base = parse_base(&a.base, code.len())?;
    let (label, blocks) = match (&a.alpha, a.weight) {
        (Some(s), _) => {
            let alpha = parse_alpha(s, code.scheme().classes())?;
            (
                alpha.to_string(),
                supports_of_class(&code, &alpha, base.as_deref())?,
            )
        }
        (None, Some(w)) => {
            let classes = supports_by_class(&code, base.as_deref())?;
            let b = supports_of_weight(&classes, w)
                .ok_or_else(|| anyhow!("no codewords of weight {w}"))?;
            (format!("weight {w}"), b)
        }
        (None, None) => bail!("give --alpha or --weight"),
    };
    if blocks.k() == 0 {
        bail!("class {label} consists of the base word only");
    }
    let t = match parse_target(&a.t)? {
        Target::Max => max_design_t(&blocks)?,
        Target::T(t) => t as usize,
    };
    let check = is_t_design(&blocks, t)?;
    let ok = check.is_design();
    let cfg = config(
        cli,
        "verify-design",
        vec![&a.code],
        json!({ "code": desc.name, "alpha": a.alpha, "weight": a.weight, "t": a.t, "base": a.base }),
    );
    let out = json!({
        "config": cfg,
        "class": label,
        "n": blocks.n(),
        "k": blocks.k(),
        "blocks": blocks.block_count(),
        "distinct_blocks": blocks.distinct_blocks(),
        "check": check,
    });
    emit(cli, &out, || render::design_text(&label, &blocks, &check))?;
    Ok(ok)
}

fn dual(cli: &Cli, a: &DualArgs) -> Result<bool> {
    let (desc, code) = load_code(cli, &a.code)?;
    let d = dual_code(&code)?;
    let name = desc.name.as_ref().map(|n| format!("dual of {n}"));
    let scheme = SchemeDescriptor::Dual {
        of: Box::new(desc.scheme.clone()),
    };
    let out = CodeDescriptor::from_code(name, scheme, &d);
    let text = serde_json::to_string_pretty(&out)? + "\n";
    match &a.output {
        Some(p) => {
            fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            let summary = json!({
                "config": config(cli, "dual", vec![&a.code], json!({ "output": p.display().to_string() })),
                "size": d.size().to_string(),
            });
            emit(cli, &summary, || {
                format!(
                    "dual code with {} words written to {}\n",
                    d.size(),
                    p.display()
                )
            })?;
        }
        None => print!("{text}"),
    }
    Ok(true)
}

fn enumerate(cli: &Cli, a: &EnumerateArgs) -> Result<bool> {
    let (desc, code) = load_code(cli, &a.code)?;
    let base = parse_base(&a.base, code.len())?;
    let wd = weight_distribution(&code, base.as_deref())?;
    let words = match a.words {
        Some(limit) => {
            let mut all = code.enumerate()?;
            all.truncate(limit);
            Some(all)
        }
        None => None,
    };
    let cfg = config(
        cli,
        "enumerate",
        vec![&a.code],
        json!({ "code": desc.name, "words": a.words, "base": a.base }),
    );
    let out = json!({
        "config": cfg,
        "size": code.size().to_string(),
        "weight_distribution": wd.counts,
        "words": words,
    });
    emit(cli, &out, || {
        render::enumerate_text(&code, &wd.counts, words.as_deref())
    })?;
    Ok(true)
}
