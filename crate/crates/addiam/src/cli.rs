//! Command-line driver: descriptor parsing, seeded runs, JSON artifact
//! emission, certificate replay, and the recorded-result suite.
//!
//! Exit codes separate soundness classes: 0 means the artifact carries
//! certified knowledge (exact values, certified bounds, a verified
//! file), 2 means the search was inconclusive within budget, 1 means an
//! error (including a certificate that fails replay).  Runs are
//! deterministic: the same configuration, seed included, produces a
//! byte-identical artifact.  Float mode re-checks witness coverings in
//! floating point at the given tolerance and never emits certificates.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::eqmorph::{
    from_map_descriptor, numeric_decompose, verify_waring, PolyMap, WaringCertificate,
    WaringOutcome,
};
use crate::exactlin::{parse_rational, Rational, Subspace};
use crate::groupdiam::{diameter, translate_sum, verify, Certificate, DiameterResult, Variant};
use crate::liediam::{diameter_lie_capped, lie_witness_operators};
use crate::repkit::{parse_rep_string, GroupElement, Representation};
use crate::reproduce::{run_suite, ReproReport};
use crate::spaces::{
    block_B, enumerate_block_closed, named, random_subspace, upper_closed, DiagMode, NamedSpace,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Float { tolerance: f64 },
}

impl Mode {
    fn label(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float { .. } => "float",
        }
    }
}

/// One fully specified run; `run` is a pure function of this value.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandSpec,
    pub max_k: usize,
    pub seed: u64,
    pub trials: usize,
    pub mode: Mode,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub enum CommandSpec {
    Diam { rep: String, sub: String },
    LieDiam { rep: String, sub: String, variant: Variant, max_word_len: usize },
    Waring { map: String, n: usize, point: String, decompose: Option<usize>, target: Option<String> },
    Enumerate { n: usize, min_dim: usize, max_dim: usize, check_flip: bool },
    Verify { file: PathBuf },
    Reproduce { selector: Option<String> },
}

#[derive(Parser, Debug)]
#[command(
    name = "addiam",
    version,
    about = "Additive diameters of group and Lie algebra representations: exact computation, certification, replay"
)]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    /// Largest number of translates tried before giving up.
    #[arg(long, global = true, default_value_t = 8)]
    max_k: usize,
    /// Seed for every randomized search in the run.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Random candidates per enumeration cell.
    #[arg(long, global = true, default_value_t = 6)]
    trials: usize,
    /// Floating-point rank tolerance; selects float mode, which reports
    /// numeric checks and emits no certificates.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the JSON artifact to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Group-additive diameter of a subspace under a representation.
    Diam {
        /// Representation descriptor: sl2:K, conj:sln:N, conj:Mn:N, std:N.
        #[arg(long)]
        rep: String,
        /// Subspace descriptor: upper:K:J, B:N:I:J, named:N:NAME,
        /// random:AMBIENT:DIM:SEED, file:PATH.
        #[arg(long)]
        sub: String,
    },
    /// Lie-additive diameter (elementary, monomial, or associative).
    Liediam {
        #[arg(long)]
        rep: String,
        #[arg(long)]
        sub: String,
        /// Variant: elem, mon, or ass.
        #[arg(long, default_value = "mon")]
        lie: String,
        /// Longest random monomial word tried.
        #[arg(long, default_value_t = 3)]
        max_word_len: usize,
    },
    /// Waring-type covering bound for a builtin equivariant map.
    Waring {
        /// Map descriptor: twisted_cubic, orbit:K, square:N,
        /// comm_plus_identity:N, trace:N:EXPR, or trace:EXPR (uses --n).
        #[arg(long)]
        map: String,
        /// Matrix size for trace maps given without an explicit size.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Base point, comma-separated rationals: 1,0 or 1,1/2,-3.
        #[arg(long)]
        point: String,
        /// Decompose --target into this many image points (float mode).
        #[arg(long)]
        decompose: Option<usize>,
        /// Decomposition target, comma-separated floats.
        #[arg(long)]
        target: Option<String>,
    },
    /// Enumerate block-closed subspaces of sl_n by dimension.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        min_dim: usize,
        #[arg(long)]
        max_dim: usize,
        /// Also check U + FUF = sl_n for every enumerated subspace.
        #[arg(long)]
        check_flip: bool,
    },
    /// Replay a certificate file (diameter or covering bound).
    Verify { file: PathBuf },
    /// Re-run recorded results: a selector prefix or --all.
    Reproduce {
        selector: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

fn parse_lie_variant(s: &str) -> Result<Variant> {
    Ok(match s {
        "elem" => Variant::LieElementary,
        "mon" => Variant::LieMonomial,
        "ass" => Variant::LieAssociative,
        _ => return Err(Error::Parse(format!("unknown Lie variant '{s}', expected elem|mon|ass"))),
    })
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let mode = match self.tolerance {
            None => Mode::Exact,
            Some(t) if t > 0.0 => Mode::Float { tolerance: t },
            Some(t) => return Err(Error::InvalidArgument(format!("tolerance must be positive, got {t}"))),
        };
        let command = match self.command {
            CliCommand::Diam { rep, sub } => CommandSpec::Diam { rep, sub },
            CliCommand::Liediam { rep, sub, lie, max_word_len } => CommandSpec::LieDiam {
                rep,
                sub,
                variant: parse_lie_variant(&lie)?,
                max_word_len,
            },
            CliCommand::Waring { map, n, point, decompose, target } => {
                CommandSpec::Waring { map, n, point, decompose, target }
            }
            CliCommand::Enumerate { n, min_dim, max_dim, check_flip } => {
                CommandSpec::Enumerate { n, min_dim, max_dim, check_flip }
            }
            CliCommand::Verify { file } => CommandSpec::Verify { file },
            CliCommand::Reproduce { selector, all } => {
                if selector.is_none() && !all {
                    return Err(Error::InvalidArgument(
                        "pass a selector prefix or --all".into(),
                    ));
                }
                CommandSpec::Reproduce { selector: if all { None } else { selector } }
            }
        };
        Ok(RunConfig {
            command,
            max_k: self.max_k,
            seed: self.seed,
            trials: self.trials,
            mode,
            output: self.out,
        })
    }
}

/// Parse a subspace descriptor.  The ambient dimension comes from the
/// descriptor itself; mismatches against the representation surface in
/// the downstream dimension checks.
pub fn parse_subspace_descriptor(s: &str) -> Result<Subspace> {
    let parts: Vec<&str> = s.splitn(2, ':').collect();
    let bad = || Error::Parse(format!("malformed subspace descriptor '{s}'"));
    let int = |x: &str| x.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["upper", rest] => {
            let (k, j) = rest.split_once(':').ok_or_else(bad)?;
            upper_closed(int(k)?, int(j)?)
        }
        ["B", rest] => {
            let nums: Vec<&str> = rest.split(':').collect();
            if nums.len() != 3 {
                return Err(bad());
            }
            block_B(int(nums[0])?, int(nums[1])?, int(nums[2])?)
        }
        ["named", rest] => {
            let (n, which) = rest.split_once(':').ok_or_else(bad)?;
            named(int(n)?, NamedSpace::parse(which)?)
        }
        ["random", rest] => {
            let nums: Vec<&str> = rest.split(':').collect();
            if nums.len() != 3 {
                return Err(bad());
            }
            let seed = nums[2].parse::<u64>().map_err(|_| bad())?;
            random_subspace(int(nums[0])?, int(nums[1])?, seed)
        }
        ["file", path] => {
            let text = fs::read_to_string(path)?;
            if let Ok(sub) = serde_json::from_str::<Subspace>(&text) {
                return Ok(sub);
            }
            let rows: Vec<Vec<String>> = serde_json::from_str(&text)?;
            let ambient = rows.first().map(Vec::len).ok_or_else(|| {
                Error::Parse("subspace file holds no basis rows".into())
            })?;
            let parsed: Result<Vec<Vec<Rational>>> = rows
                .iter()
                .map(|row| row.iter().map(|e| parse_rational(e)).collect())
                .collect();
            Subspace::from_rows(ambient, parsed?)
        }
        _ => Err(bad()),
    }
}

fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|e| parse_rational(e.trim())).collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|e| {
            e.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("malformed float '{e}'")))
        })
        .collect()
}

/// Resolve the --map argument to a builtin descriptor, inserting the
/// --n size when a trace expression is given bare.
fn resolve_map_descriptor(map: &str, n: usize) -> String {
    if let Some(rest) = map.strip_prefix("trace:") {
        let sized = rest
            .split_once(':')
            .map(|(first, _)| first.parse::<usize>().is_ok())
            .unwrap_or(false);
        if !sized {
            return format!("trace:{n}:{rest}");
        }
    }
    map.to_string()
}

fn to_f64_rows(rows: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn numeric_rank(rows: &[Vec<f64>], tolerance: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    m.svd(false, false).singular_values.iter().filter(|s| **s > tolerance).count()
}

/// Numeric re-check of a covering certificate: stack the translated
/// basis rows as floats and rank them at the tolerance.
fn numeric_covering_check(
    rep: &Representation,
    cert: &Certificate,
    tolerance: f64,
) -> Result<Value> {
    let u = &cert.subspace;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    if let Some(w) = &cert.lie_witness {
        for op in lie_witness_operators(rep, w)? {
            for b in u.basis_rows() {
                rows.push(op.mul_vec(&b)?);
            }
        }
    } else {
        for m in &cert.witnesses {
            let g = GroupElement::new(m.clone())?;
            let op = rep.evaluate(&g)?;
            for b in u.basis_rows() {
                rows.push(op.mul_vec(&b)?);
            }
        }
    }
    let rank = numeric_rank(&to_f64_rows(&rows), tolerance);
    Ok(json!({
        "tolerance": tolerance,
        "stacked_rows": rows.len(),
        "numeric_rank": rank,
        "covers": rank == rep.dim_v(),
    }))
}

/// Shared artifact builder for the two diameter commands.
fn diameter_artifact(
    config: &RunConfig,
    command: &str,
    echo: Value,
    rep: &Representation,
    result: &DiameterResult,
) -> Result<(i32, Value)> {
    let (outcome, exit) = match result {
        DiameterResult::Exact(_) => ("exact", 0),
        DiameterResult::Bounds { upper: Some(_), .. } => ("bounds", 0),
        DiameterResult::Bounds { upper: None, .. } => ("inconclusive", 2),
    };
    let certs = result.certificates();
    let value = match result {
        DiameterResult::Exact(c) => json!(c.value),
        DiameterResult::Bounds { lower, upper } => json!({
            "lower": lower.value,
            "upper": upper.as_ref().map(|c| c.value),
        }),
    };
    let mut artifact = json!({
        "schema": 1,
        "command": command,
        "input": echo,
        "mode": config.mode.label(),
        "max_k": config.max_k,
        "seed": config.seed,
        "outcome": outcome,
        "value": value,
    });
    let obj = artifact.as_object_mut().expect("artifact is an object");
    match config.mode {
        Mode::Exact => {
            obj.insert("certificates".into(), json!(certs));
        }
        Mode::Float { tolerance } => {
            // Witness coverings re-checked numerically; no certificates.
            let mut checks = Vec::new();
            for c in &certs {
                if c.value.finite().is_some()
                    && (!c.witnesses.is_empty() || c.lie_witness.is_some())
                {
                    checks.push(numeric_covering_check(rep, c, tolerance)?);
                }
            }
            obj.insert("float_checks".into(), json!(checks));
        }
    }
    Ok((exit, artifact))
}

fn run_diam(config: &RunConfig, rep_s: &str, sub_s: &str) -> Result<(i32, Value)> {
    let rep = parse_rep_string(rep_s)?;
    let u = parse_subspace_descriptor(sub_s)?;
    let result = diameter(&rep, &u, config.max_k, config.seed)?;
    diameter_artifact(
        config,
        "diam",
        json!({ "rep": rep_s, "sub": sub_s, "subspace_dim": u.dim() }),
        &rep,
        &result,
    )
}

fn run_liediam(
    config: &RunConfig,
    rep_s: &str,
    sub_s: &str,
    variant: Variant,
    max_word_len: usize,
) -> Result<(i32, Value)> {
    let rep = parse_rep_string(rep_s)?;
    let u = parse_subspace_descriptor(sub_s)?;
    let result = diameter_lie_capped(&rep, &u, variant, config.max_k, config.seed, max_word_len)?;
    diameter_artifact(
        config,
        "liediam",
        json!({
            "rep": rep_s,
            "sub": sub_s,
            "subspace_dim": u.dim(),
            "variant": variant,
            "max_word_len": max_word_len,
        }),
        &rep,
        &result,
    )
}

fn run_waring(
    config: &RunConfig,
    map_s: &str,
    n: usize,
    point_s: &str,
    decompose: Option<usize>,
    target_s: Option<&str>,
) -> Result<(i32, Value)> {
    let descriptor = resolve_map_descriptor(map_s, n);
    let f = from_map_descriptor(&descriptor)?;
    if let Some(k) = decompose {
        return run_decompose(config, &f, &descriptor, k, target_s);
    }
    let w = parse_point(point_s)?;
    let outcome = crate::eqmorph::waring_bound(&f, &w, config.max_k, config.seed)?;
    let (exit, outcome_label, body) = match &outcome {
        WaringOutcome::Bounded(cert) => {
            let body = match config.mode {
                Mode::Exact => json!({ "bound": cert.bound, "certificate": cert }),
                Mode::Float { tolerance } => {
                    let check = numeric_covering_check(
                        f.target_rep(),
                        &cert.inner,
                        tolerance,
                    )?;
                    json!({ "bound": cert.bound, "float_checks": [check] })
                }
            };
            (0, "bounded", body)
        }
        WaringOutcome::Obstructed(inner) => {
            let body = match config.mode {
                Mode::Exact => json!({ "certificate": inner }),
                Mode::Float { .. } => json!({ "trap_dim": trap_dim(inner) }),
            };
            (0, "obstructed", body)
        }
        WaringOutcome::Inconclusive { lower } => {
            let body = match config.mode {
                Mode::Exact => json!({ "lower_certificate": lower }),
                Mode::Float { .. } => json!({ "lower": lower.value }),
            };
            (2, "inconclusive", body)
        }
    };
    Ok((
        exit,
        json!({
            "schema": 1,
            "command": "waring",
            "input": { "map": descriptor, "point": point_s },
            "mode": config.mode.label(),
            "max_k": config.max_k,
            "seed": config.seed,
            "outcome": outcome_label,
            "result": body,
        }),
    ))
}

fn trap_dim(cert: &Certificate) -> Option<usize> {
    match &cert.obstruction {
        Some(crate::groupdiam::Obstruction::SubrepTrap { trap }) => Some(trap.dim()),
        _ => None,
    }
}

fn run_decompose(
    config: &RunConfig,
    f: &PolyMap,
    descriptor: &str,
    k: usize,
    target_s: Option<&str>,
) -> Result<(i32, Value)> {
    let Mode::Float { tolerance } = config.mode else {
        return Err(Error::Precondition(
            "numeric decomposition runs in float mode; pass --tolerance".into(),
        ));
    };
    let target = parse_floats(target_s.ok_or_else(|| {
        Error::InvalidArgument("--decompose needs --target".into())
    })?)?;
    let found = numeric_decompose(f, &target, k, config.seed);
    let (exit, body) = match found {
        Some(points) => {
            let mut total = vec![0.0; f.dim_v()];
            for p in &points {
                for (t, v) in total.iter_mut().zip(f.eval_f64(p).iter()) {
                    *t += v;
                }
            }
            let residual = total
                .iter()
                .zip(target.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            (0, json!({ "points": points, "residual": residual, "tolerance": tolerance }))
        }
        None => (2, json!({ "points": Value::Null, "tolerance": tolerance })),
    };
    Ok((
        exit,
        json!({
            "schema": 1,
            "command": "waring",
            "input": { "map": descriptor, "decompose": k },
            "mode": "float",
            "seed": config.seed,
            "outcome": if exit == 0 { "decomposed" } else { "inconclusive" },
            "result": body,
        }),
    ))
}

fn run_enumerate(
    config: &RunConfig,
    n: usize,
    min_dim: usize,
    max_dim: usize,
    check_flip: bool,
) -> Result<(i32, Value)> {
    if min_dim > max_dim {
        return Err(Error::InvalidArgument("min_dim exceeds max_dim".into()));
    }
    let rep = Representation::conj_sln(n)?;
    let flip = GroupElement::new(crate::repkit::Permutation::reversal(n).matrix())?;
    let id = GroupElement::identity(n);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for dim in min_dim..=max_dim {
        let spaces = enumerate_block_closed(
            n,
            dim,
            DiagMode::Sampled { seed: config.seed, trials: config.trials },
        )?;
        let mut covered = 0usize;
        if check_flip {
            for u in &spaces {
                if translate_sum(&rep, u, &[id.clone(), flip.clone()])?.is_full() {
                    covered += 1;
                }
            }
            if covered != spaces.len() {
                all_ok = false;
            }
        }
        rows.push(json!({
            "dim": dim,
            "count": spaces.len(),
            "flip_covered": if check_flip { json!(covered) } else { Value::Null },
        }));
    }
    Ok((
        if all_ok { 0 } else { 2 },
        json!({
            "schema": 1,
            "command": "enumerate",
            "input": { "n": n, "min_dim": min_dim, "max_dim": max_dim, "check_flip": check_flip },
            "mode": config.mode.label(),
            "seed": config.seed,
            "rows": rows,
        }),
    ))
}

fn run_verify(file: &PathBuf) -> Result<(i32, Value)> {
    let text = fs::read_to_string(file)?;
    let raw: Value = serde_json::from_str(&text)?;
    let is_waring = raw.get("map").is_some();
    let (kind, value) = if is_waring {
        let cert: WaringCertificate = serde_json::from_value(raw)?;
        verify_waring(&cert)?;
        ("waring".to_string(), json!(cert.bound))
    } else {
        let cert: Certificate = serde_json::from_value(raw)?;
        verify(&cert)?;
        (format!("{:?}", cert.kind ), json!(cert.value))
    };
    Ok((
        0,
        json!({
            "schema": 1,
            "command": "verify",
            "file": file.display().to_string(),
            "valid": true,
            "kind": kind,
            "value": value,
        }),
    ))
}

fn format_table(report: &ReproReport) -> String {
    let mut lines = Vec::new();
    lines.push(format!(
        "{:<28} {:<34} {:<34} {:<6} {:>9}",
        "anchor", "expected", "computed", "status", "runtime"
    ));
    for row in &report.rows {
        lines.push(format!(
            "{:<28} {:<34} {:<34} {:<6} {:>6} ms",
            row.anchor,
            row.expected,
            row.computed,
            if row.pass { "PASS" } else { "FAIL" },
            row.runtime_ms,
        ));
    }
    let passed = report.rows.iter().filter(|r| r.pass).count();
    lines.push(format!("{passed}/{} rows pass", report.rows.len()));
    lines.join("\n")
}

fn run_reproduce(selector: Option<&str>) -> Result<(i32, Value, String)> {
    let report = run_suite(selector)?;
    let table = format_table(&report);
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "anchor": r.anchor,
                "expected": r.expected,
                "computed": r.computed,
                "status": if r.pass { "PASS" } else { "FAIL" },
            })
        })
        .collect();
    let artifact = json!({
        "schema": 1,
        "command": "reproduce",
        "selector": selector,
        "rows": rows,
        "all_pass": report.all_pass(),
    });
    Ok((if report.all_pass() { 0 } else { 1 }, artifact, table))
}

fn emit(config: &RunConfig, artifact: &Value, stdout_text: Option<&str>) -> Result<()> {
    let rendered = format!("{}\n", serde_json::to_string_pretty(artifact)?);
    match (&config.output, stdout_text) {
        (Some(path), text) => {
            fs::write(path, rendered)?;
            if let Some(t) = text {
                println!("{t}");
            }
            println!("wrote {}", path.display());
        }
        (None, Some(t)) => println!("{t}"),
        (None, None) => print!("{rendered}"),
    }
    Ok(())
}

/// Execute a configuration and return the process exit code.
pub fn run(config: &RunConfig) -> Result<i32> {
    if matches!(config.mode, Mode::Float { .. })
        && matches!(config.command, CommandSpec::Verify { .. } | CommandSpec::Reproduce { .. })
    {
        return Err(Error::InvalidArgument(
            "verification and reproduction replay exactly; drop --tolerance".into(),
        ));
    }
    match &config.command {
        CommandSpec::Diam { rep, sub } => {
            let (exit, artifact) = run_diam(config, rep, sub)?;
            emit(config, &artifact, None)?;
            Ok(exit)
        }
        CommandSpec::LieDiam { rep, sub, variant, max_word_len } => {
            let (exit, artifact) = run_liediam(config, rep, sub, *variant, *max_word_len)?;
            emit(config, &artifact, None)?;
            Ok(exit)
        }
        CommandSpec::Waring { map, n, point, decompose, target } => {
            let (exit, artifact) =
                run_waring(config, map, *n, point, *decompose, target.as_deref())?;
            emit(config, &artifact, None)?;
            Ok(exit)
        }
        CommandSpec::Enumerate { n, min_dim, max_dim, check_flip } => {
            let (exit, artifact) = run_enumerate(config, *n, *min_dim, *max_dim, *check_flip)?;
            emit(config, &artifact, None)?;
            Ok(exit)
        }
        CommandSpec::Verify { file } => {
            let (exit, artifact) = run_verify(file)?;
            emit(config, &artifact, None)?;
            Ok(exit)
        }
        CommandSpec::Reproduce { selector } => {
            let (exit, artifact, table) = run_reproduce(selector.as_deref())?;
            emit(config, &artifact, Some(&table))?;
            Ok(exit)
        }
    }
}

/// Parse the process arguments and run; errors exit 1 with a message.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match cli.into_config().and_then(|config| run(&config)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
