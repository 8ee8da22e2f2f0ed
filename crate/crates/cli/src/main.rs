//! `contlogic`: batch front end for checking theories, running law suites,
//! classifying connectives and working with PERs and metric spaces.
//!
//! Exit codes: 0 when everything checked holds, 1 when some verdict is
//! negative, 2 on malformed input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value as Json};

use contlogic::connective::{classify, demonstrate, parse_connective, ClassifierVerdict};
use contlogic::doctrine::{Mutation, Ops};
use contlogic::dsl::{check_theory, load_model, parse_theory, SequentVerdict, Theory};
use contlogic::laws::run_all;
use contlogic::metric::{
    cmt_interpretation, extract_function, g_morphism, g_object, into_strict, metric_from_per,
    metric_product, CmtBackend, FinPseudoMetric,
};
use contlogic::per::{
    self, discrete_strict, EquivRel, FunctionalRelation, StrictPredicate, StrictU,
};
use contlogic::value::{format_rational, parse_rational};
use contlogic::{Carrier, MapArrow, Value};

#[derive(Parser)]
#[command(
    name = "contlogic",
    version,
    about = "Continuous logic on finite carriers"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random instances per law.
    #[arg(long, global = true, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Grid resolution `1/2^k` for connective classification.
    #[arg(long, global = true, default_value = "1/16", value_parser = parse_grid)]
    grid: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in JSON reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Plain `[0,1]`-valued predicates.
    U,
    /// Uniformly continuous predicates on the model's metrics.
    Cmt,
    /// Strict predicates over the image of the model in PER(U).
    Strict,
}

#[derive(Subcommand)]
enum Command {
    /// Check every sequent of a theory against a model.
    Check {
        model: PathBuf,
        theory: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::U)]
        mode: Mode,
    },
    /// Run the randomized law suites.
    Laws {
        #[arg(long, hide = true, value_parser = parse_mutation)]
        mutate: Option<Mutation>,
    },
    /// Decide whether a connective preserves equivalence of predicates.
    ClassifyConnective { expr: String },
    /// Partial equivalence relations and functional relations.
    Per {
        #[command(subcommand)]
        command: PerCommand,
    },
    /// Finite metric spaces and the functor into equivalence relations.
    Bridge {
        #[command(subcommand)]
        command: BridgeCommand,
    },
}

#[derive(Subcommand)]
enum PerCommand {
    /// Check the defining sequents of a PER, functional relation or strict predicate file.
    Verify { file: PathBuf },
    /// Compose two functional relations.
    Compose { first: PathBuf, second: PathBuf },
    /// Decide whether a functional relation is mono.
    Mono { file: PathBuf },
    /// The subobject of a strict predicate and its inclusion.
    Sub { file: PathBuf },
}

#[derive(Subcommand)]
enum BridgeCommand {
    /// The equivalence relation of a metric, or with `--map` and `--target` the functional relation of a map.
    G {
        metric: PathBuf,
        #[arg(long, requires = "target")]
        map: Option<PathBuf>,
        #[arg(long, requires = "map")]
        target: Option<PathBuf>,
    },
    /// Recover the map represented by a functional relation between metric images.
    Extract { file: PathBuf },
    /// The metric of an equivalence relation with its isomorphism certificate.
    MetricFromPer { file: PathBuf },
    /// The max-metric product of two spaces.
    Product { left: PathBuf, right: PathBuf },
}

fn parse_grid(s: &str) -> Result<u32, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    let (n, d) = (*r.numer(), *r.denom());
    if n != 1 || d < 2 || d & (d - 1) != 0 || d > 1 << 30 {
        return Err(format!("grid must be 1/2^k with 1 <= k <= 30, got {s}"));
    }
    Ok(d.trailing_zeros())
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown mutation {s:?}"))
}

/// Result of a command: a JSON body, its text rendering and an exit code.
struct Outcome {
    body: Json,
    text: String,
    code: u8,
}

type CmdResult = Result<Outcome, String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    serde_json::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn code(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn cmd_check(model: &Path, theory_path: &Path, mode: Mode) -> CmdResult {
    let theory: Theory =
        parse_theory(&read(theory_path)?).map_err(|e| format!("{}: {e}", theory_path.display()))?;
    let sig = &theory.signature;
    let model = load_model(&read(model)?, sig).map_err(|e| format!("{}: {e}", model.display()))?;
    let verdicts: Vec<SequentVerdict> = match mode {
        Mode::U => check_theory(&contlogic::dsl::UBackend, &model.interp, &theory),
        Mode::Cmt => {
            cmt_interpretation(&model, sig).and_then(|i| check_theory(&CmtBackend, &i, &theory))
        }
        Mode::Strict => {
            let interp = if model.metrics.is_empty() {
                Ok(discrete_strict(&model.interp))
            } else {
                cmt_interpretation(&model, sig).and_then(|i| into_strict(&i, sig))
            };
            interp.and_then(|i| check_theory(&StrictU, &i, &theory))
        }
    }
    .map_err(|e| e.to_string())?;
    let valid = verdicts.iter().all(|v| v.valid);
    let warnings: Vec<Json> = theory
        .warnings
        .iter()
        .map(|w| json!({ "line": w.line, "message": w.message }))
        .collect();
    let mut text = String::new();
    for w in &theory.warnings {
        let _ = writeln!(text, "warning (line {}): {}", w.line, w.message);
    }
    for v in &verdicts {
        let _ = writeln!(
            text,
            "line {}: {} {}",
            v.line,
            if v.valid { "VALID  " } else { "INVALID" },
            v.sequent
        );
        if let Some(w) = &v.witness {
            let _ = writeln!(text, "  countermodel point: {w}");
        }
    }
    let n_valid = verdicts.iter().filter(|v| v.valid).count();
    let _ = writeln!(text, "{n_valid}/{} sequents valid", verdicts.len());
    let mode = match mode {
        Mode::U => "u",
        Mode::Cmt => "cmt",
        Mode::Strict => "strict",
    };
    Ok(Outcome {
        body: json!({ "mode": mode, "warnings": warnings, "sequents": verdicts, "valid": valid }),
        text,
        code: code(valid),
    })
}

fn cmd_laws(config: &RunConfig, mutate: Option<Mutation>) -> CmdResult {
    let ops = Ops::mutated(mutate.unwrap_or_default());
    let reports = run_all(ops, config.seed, config.trials as usize);
    let passed = reports.iter().all(|r| r.passed());
    let mut text = String::new();
    for r in &reports {
        if r.passed() {
            let _ = writeln!(text, "{:<28} PASS  {} instances", r.law, r.instances);
        } else {
            let _ = writeln!(
                text,
                "{:<28} FAIL  {}/{} instances failed",
                r.law,
                r.failures.len(),
                r.instances
            );
            let _ = writeln!(text, "  first counterexample: {}", r.failures[0]);
        }
    }
    let mut body =
        json!({ "seed": config.seed, "trials": config.trials, "laws": reports, "passed": passed });
    if let Some(m) = mutate {
        body["mutation"] = json!(m);
    }
    Ok(Outcome {
        body,
        text,
        code: code(passed),
    })
}

fn values(vs: &[Value]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| format_rational(&v.ratio())).collect();
    format!("({})", parts.join(", "))
}

fn cmd_classify(expr: &str, k: u32) -> CmdResult {
    let u = parse_connective(expr).map_err(|e| format!("connective: {e}"))?;
    let verdict = classify(&u, k).map_err(|e| e.to_string())?;
    let mut body = json!({
        "connective": u.to_string(),
        "params": u.params(),
        "grid": format!("1/{}", 1u64 << k),
        "verdict": verdict,
    });
    let text = match &verdict {
        ClassifierVerdict::Preserves { certified, .. } => {
            format!(
                "preserves ({})\n",
                if *certified { "certified" } else { "sampled" }
            )
        }
        ClassifierVerdict::Violates { p, q, u_p, u_q } => {
            let x = Carrier::atoms(&["a", "b"]).expect("valid names");
            let demo = demonstrate(&u, &verdict, &x).map_err(|e| e.to_string())?;
            body["demonstration"] = json!(demo);
            format!(
                "violates: u{} = {} but u{} = {}\ndemonstration: inputs equivalent = {}, outputs equivalent = {}\n",
                values(p),
                format_rational(&u_p.ratio()),
                values(q),
                format_rational(&u_q.ratio()),
                demo.inputs_equivalent,
                demo.outputs_equivalent
            )
        }
        ClassifierVerdict::Unknown { reason, .. } => format!("unknown: {reason}\n"),
    };
    Ok(Outcome {
        body,
        text,
        code: 0,
    })
}

fn object(label: &str, ok: bool, key: &str, value: Json) -> Outcome {
    let text = format!("{label}\n{}\n", pretty(&value));
    Outcome {
        body: json!({ key: value }),
        text,
        code: code(ok),
    }
}

fn cmd_per(command: &PerCommand) -> CmdResult {
    match command {
        PerCommand::Verify { file } => {
            let v =
                per::verify_json(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
            let valid = v.valid();
            let text = format!(
                "{}\n{}\n",
                if valid { "valid" } else { "not valid" },
                pretty(&v)
            );
            Ok(Outcome {
                body: json!({ "verification": v, "valid": valid }),
                text,
                code: code(valid),
            })
        }
        PerCommand::Compose { first, second } => {
            let (f, g): (FunctionalRelation, FunctionalRelation) = (load(first)?, load(second)?);
            let h = per::compose(&f, &g).map_err(|e| e.to_string())?;
            Ok(object("composite", true, "composite", json!(h)))
        }
        PerCommand::Mono { file } => {
            let f: FunctionalRelation = load(file)?;
            let mono = per::is_mono(&f).map_err(|e| e.to_string())?;
            let text = format!("{}\n", if mono { "mono" } else { "not mono" });
            Ok(Outcome {
                body: json!({ "mono": mono }),
                text,
                code: code(mono),
            })
        }
        PerCommand::Sub { file } => {
            let phi: StrictPredicate = load(file)?;
            let (sub, inclusion) = per::sub_from_strict(&phi).map_err(|e| e.to_string())?;
            let mono = per::is_mono(&inclusion).map_err(|e| e.to_string())?;
            let body = json!({ "subobject": sub, "inclusion": inclusion, "mono": mono });
            Ok(Outcome {
                text: format!("subobject\n{}\n", pretty(&body)),
                body,
                code: code(mono),
            })
        }
    }
}

fn cmd_bridge(command: &BridgeCommand) -> CmdResult {
    match command {
        BridgeCommand::G {
            metric,
            map,
            target,
        } => {
            let m: FinPseudoMetric = load(metric)?;
            match (map, target) {
                (Some(map), Some(target)) => {
                    let (f, n): (MapArrow, FinPseudoMetric) = (load(map)?, load(target)?);
                    let rel = g_morphism(&f, &m, &n).map_err(|e| e.to_string())?;
                    Ok(object("functional relation", true, "morphism", json!(rel)))
                }
                _ => {
                    let e = EquivRel::from_per(g_object(&m)).map_err(|e| e.to_string())?;
                    Ok(object("equivalence relation", true, "object", json!(e)))
                }
            }
        }
        BridgeCommand::Extract { file } => {
            let f: FunctionalRelation = load(file)?;
            let map = extract_function(&f).map_err(|e| e.to_string())?;
            Ok(object("map", true, "map", json!(map)))
        }
        BridgeCommand::MetricFromPer { file } => {
            let e: EquivRel = load(file)?;
            let (metric, cert) = metric_from_per(&e).map_err(|e| e.to_string())?;
            let verified = cert.verified();
            let body = json!({ "metric": metric, "certificate": cert, "verified": verified });
            let text = format!(
                "metric\n{}\nisomorphism {}\n",
                pretty(&metric),
                if verified { "verified" } else { "NOT verified" }
            );
            Ok(Outcome {
                body,
                text,
                code: code(verified),
            })
        }
        BridgeCommand::Product { left, right } => {
            let (m, n): (FinPseudoMetric, FinPseudoMetric) = (load(left)?, load(right)?);
            Ok(object(
                "product metric",
                true,
                "metric",
                json!(metric_product(&m, &n)),
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Check {
            model,
            theory,
            mode,
        } => cmd_check(model, theory, *mode),
        Command::Laws { mutate } => cmd_laws(&cli.config, *mutate),
        Command::ClassifyConnective { expr } => cmd_classify(expr, cli.config.grid),
        Command::Per { command } => cmd_per(command),
        Command::Bridge { command } => cmd_bridge(command),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let elapsed = start.elapsed();
    let rendered = match cli.config.format {
        Format::Json => {
            let echo: Vec<String> = std::env::args().skip(1).collect();
            let mut report = json!({ "command": echo, "result": outcome.body });
            if cli.config.timing {
                report["wall_time_ms"] = json!(elapsed.as_millis() as u64);
            }
            pretty(&report) + "\n"
        }
        Format::Text => format!("{}wall time: {:.1?}\n", outcome.text, elapsed),
    };
    let written = match &cli.config.out {
        Some(path) => {
            std::fs::write(path, rendered).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.code)
}
