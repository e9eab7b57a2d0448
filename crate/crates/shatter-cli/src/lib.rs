//! Typed command layer behind the `shatter` binary.
//!
//! Every command produces a [`Report`]: a fixed envelope carrying the schema
//! version, the library version, a full echo of the effective configuration
//! (seeds included, even when defaulted), and a command-specific payload.
//! Reports contain no timestamps or other ambient state, so a rerun with the
//! same arguments is byte-identical.
//!
//! Failures carry their class: validation problems (unreadable or malformed
//! inputs, bad parameter combinations), exhausted work budgets, and
//! integrity failures (a requested check that ran and found a violation, or
//! a result that failed its own re-verification) each map to a distinct
//! process exit code.

pub mod ramsey;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use shatter::clique::CliqueError;
use shatter::coloring::{
    coloring_dual_vc_budgeted, find_monochromatic_clique_budgeted, lower_bound_coloring,
    random_coloring, CliqueCertificate, ColoringError, EdgeColoring,
};
use shatter::packing::{
    crossing_count, greedy_delta_packing, partition, verify_partition, PackingError,
};
use shatter::pipeline::{pipeline_trace, PipelineError};
use shatter::set_system::{SetSystem, SetSystemError};
use shatter::{neighborhood_descent, verify_clique};

use ramsey::{ramsey_small, RamseyError, RamseyOptions};

pub const SCHEMA_VERSION: u32 = 1;

// ==================== Errors and exit codes ====================

/// One variant per failure class; the process exit code is derived from the
/// class, never from the specific message.
#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Integrity(_) => 4,
        }
    }
}

fn set_err(e: SetSystemError) -> CliError {
    match e {
        SetSystemError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn col_err(e: ColoringError) -> CliError {
    match e {
        ColoringError::SearchBudgetExceeded { .. } => CliError::Budget(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn pack_err(e: PackingError) -> CliError {
    CliError::Validation(e.to_string())
}

fn clique_err(e: CliqueError) -> CliError {
    CliError::Validation(e.to_string())
}

fn pipe_err(e: PipelineError) -> CliError {
    match e {
        PipelineError::CoverageMismatch { .. } => CliError::Integrity(e.to_string()),
        PipelineError::Coloring(inner) => col_err(inner),
        PipelineError::Packing(inner) => pack_err(inner),
        _ => CliError::Validation(e.to_string()),
    }
}

fn ramsey_err(e: RamseyError) -> CliError {
    match e {
        RamseyError::ConfirmationMismatch { .. } => CliError::Integrity(e.to_string()),
        RamseyError::Coloring(inner) => col_err(inner),
        _ => CliError::Validation(e.to_string()),
    }
}

// ==================== Commands ====================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    System,
    Coloring,
}

impl ArtifactKind {
    fn name(self) -> &'static str {
        match self {
            ArtifactKind::System => "system",
            ArtifactKind::Coloring => "coloring",
        }
    }
}

/// The validated, typed form of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    /// Shape statistics plus optional exact VC and dual VC dimensions of a
    /// set system file.
    Analyze {
        input: PathBuf,
        vc: bool,
        dual_vc: bool,
        budget: u64,
    },
    /// Write the recursive lower-bound coloring of K_{2^m} to a file.
    Construct {
        lower_bound: bool,
        m: usize,
        output: PathBuf,
    },
    /// Write a seeded random system or coloring to a file.
    Random {
        kind: ArtifactKind,
        n: usize,
        m: usize,
        count: usize,
        density: f64,
        seed: u64,
        output: PathBuf,
    },
    /// Greedy δ-separated packing of a system's ground set.
    Pack { input: PathBuf, delta: usize },
    /// Low-crossing partition of a system's ground set, re-verified.
    Partition {
        input: PathBuf,
        delta: usize,
        d: usize,
    },
    /// Monochromatic clique search on a coloring file: greedy descent
    /// against per-color targets, or exhaustive search for one size.
    Search {
        input: PathBuf,
        targets: Option<Vec<usize>>,
        menu_bound: Option<usize>,
        exact: Option<usize>,
        color: Option<usize>,
        budget: u64,
    },
    /// Level-by-level partition-and-prune trace of a coloring.
    Trace {
        input: PathBuf,
        d: Option<usize>,
        targets: Vec<usize>,
        budgets: Vec<usize>,
        budget: u64,
    },
    /// Small-case Ramsey number with witness and confirmation.
    RamseySmall {
        k: usize,
        m: usize,
        n_max: usize,
        seed: u64,
    },
    /// Re-check properties of a coloring file, failing loudly on violation.
    Verify {
        input: PathBuf,
        triangle_free: bool,
        certificate: Option<PathBuf>,
        budget: u64,
    },
}

/// Flat echo of an invocation for the report envelope. Fields that a command
/// does not use stay `None` and are omitted from serialized output; seeds are
/// always echoed by the commands that consume them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub menu_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vc: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_vc: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

impl Command {
    /// The configuration echo embedded in every report.
    pub fn config(&self) -> RunConfig {
        let mut c = RunConfig::default();
        match self {
            Command::Analyze {
                input,
                vc,
                dual_vc,
                budget,
            } => {
                c.command = "analyze".into();
                c.input = Some(path_string(input));
                c.vc = Some(*vc);
                c.dual_vc = Some(*dual_vc);
                c.budget = Some(*budget);
            }
            Command::Construct {
                lower_bound,
                m,
                output,
            } => {
                c.command = "construct".into();
                c.lower_bound = Some(*lower_bound);
                c.m = Some(*m);
                c.output = Some(path_string(output));
            }
            Command::Random {
                kind,
                n,
                m,
                count,
                density,
                seed,
                output,
            } => {
                c.command = "random".into();
                c.kind = Some(kind.name().into());
                c.n = Some(*n);
                c.seed = Some(*seed);
                c.output = Some(path_string(output));
                match kind {
                    ArtifactKind::System => {
                        c.count = Some(*count);
                        c.density = Some(*density);
                    }
                    ArtifactKind::Coloring => {
                        c.m = Some(*m);
                    }
                }
            }
            Command::Pack { input, delta } => {
                c.command = "pack".into();
                c.input = Some(path_string(input));
                c.delta = Some(*delta);
            }
            Command::Partition { input, delta, d } => {
                c.command = "partition".into();
                c.input = Some(path_string(input));
                c.delta = Some(*delta);
                c.d = Some(*d);
            }
            Command::Search {
                input,
                targets,
                menu_bound,
                exact,
                color,
                budget,
            } => {
                c.command = "search".into();
                c.input = Some(path_string(input));
                c.targets = targets.clone();
                c.menu_bound = *menu_bound;
                c.k = *exact;
                c.color = *color;
                c.budget = Some(*budget);
            }
            Command::Trace {
                input,
                d,
                targets,
                budgets,
                budget,
            } => {
                c.command = "trace".into();
                c.input = Some(path_string(input));
                c.d = *d;
                c.targets = Some(targets.clone());
                c.budgets = Some(budgets.clone());
                c.budget = Some(*budget);
            }
            Command::RamseySmall { k, m, n_max, seed } => {
                c.command = "ramsey-small".into();
                c.k = Some(*k);
                c.m = Some(*m);
                c.n_max = Some(*n_max);
                c.seed = Some(*seed);
            }
            Command::Verify {
                input,
                triangle_free,
                certificate,
                budget,
            } => {
                c.command = "verify".into();
                c.input = Some(path_string(input));
                c.triangle_free = Some(*triangle_free);
                c.certificate = certificate.as_deref().map(path_string);
                c.budget = Some(*budget);
            }
        }
        c
    }
}

// ==================== Report envelope ====================

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub version: String,
    pub config: RunConfig,
    pub payload: Value,
}

/// Execute one command and build its report.
pub fn run(cmd: &Command) -> Result<Report, CliError> {
    let payload = match cmd {
        Command::Analyze {
            input,
            vc,
            dual_vc,
            budget,
        } => run_analyze(input, *vc, *dual_vc, *budget)?,
        Command::Construct {
            lower_bound,
            m,
            output,
        } => run_construct(*lower_bound, *m, output)?,
        Command::Random {
            kind,
            n,
            m,
            count,
            density,
            seed,
            output,
        } => run_random(*kind, *n, *m, *count, *density, *seed, output)?,
        Command::Pack { input, delta } => run_pack(input, *delta)?,
        Command::Partition { input, delta, d } => run_partition(input, *delta, *d)?,
        Command::Search {
            input,
            targets,
            menu_bound,
            exact,
            color,
            budget,
        } => run_search(input, targets, *menu_bound, *exact, *color, *budget)?,
        Command::Trace {
            input,
            d,
            targets,
            budgets,
            budget,
        } => run_trace(input, *d, targets, budgets, *budget)?,
        Command::RamseySmall { k, m, n_max, seed } => run_ramsey(*k, *m, *n_max, *seed)?,
        Command::Verify {
            input,
            triangle_free,
            certificate,
            budget,
        } => run_verify(input, *triangle_free, certificate.as_deref(), *budget)?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cmd.config(),
        payload,
    })
}

// ==================== File I/O ====================

fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

/// Load a set system: JSON when the extension is `.json`, the plain text
/// format otherwise. Parse failures name the offending line.
pub fn load_system(path: &Path) -> Result<SetSystem, CliError> {
    let text = read_file(path)?;
    if is_json_path(path) {
        serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("{}: invalid system JSON: {e}", path.display()))
        })
    } else {
        SetSystem::parse_text(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

/// Load a coloring with the same extension convention as [`load_system`].
pub fn load_coloring(path: &Path) -> Result<EdgeColoring, CliError> {
    let text = read_file(path)?;
    if is_json_path(path) {
        serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("{}: invalid coloring JSON: {e}", path.display()))
        })
    } else {
        EdgeColoring::parse_text(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

fn write_system(path: &Path, sys: &SetSystem) -> Result<(), CliError> {
    let content = if is_json_path(path) {
        let mut s = serde_json::to_string_pretty(sys).expect("system serializes");
        s.push('\n');
        s
    } else {
        sys.to_text()
    };
    write_file(path, &content)
}

fn write_coloring(path: &Path, coloring: &EdgeColoring) -> Result<(), CliError> {
    let content = if is_json_path(path) {
        let mut s = serde_json::to_string_pretty(coloring).expect("coloring serializes");
        s.push('\n');
        s
    } else {
        coloring.to_text()
    };
    write_file(path, &content)
}

// ==================== Command bodies ====================

fn run_analyze(input: &Path, vc: bool, dual_vc: bool, budget: u64) -> Result<Value, CliError> {
    let sys = load_system(input)?;
    let mut payload = json!({
        "ground_size": sys.ground_size(),
        "member_count": sys.member_count(),
        "distinct_member_count": sys.deduplicated().member_count(),
        "shatter_budget": budget,
    });
    if vc {
        let dim = sys.vc_dimension_budgeted(budget).map_err(set_err)?;
        payload["vc_dimension"] = json!(dim);
    }
    if dual_vc {
        let dim = sys.dual().vc_dimension_budgeted(budget).map_err(set_err)?;
        payload["dual_vc_dimension"] = json!(dim);
    }
    Ok(payload)
}

fn run_construct(lower_bound: bool, m: usize, output: &Path) -> Result<Value, CliError> {
    if !lower_bound {
        return Err(CliError::Validation(
            "construct currently offers exactly one construction; pass --lower-bound".into(),
        ));
    }
    let coloring = lower_bound_coloring(m).map_err(col_err)?;
    write_coloring(output, &coloring)?;
    let reread = load_coloring(output)?;
    if reread != coloring {
        return Err(CliError::Integrity(format!(
            "{}: write/read round trip altered the coloring",
            output.display()
        )));
    }
    // The construction is triangle-free by design; re-check it from the file
    // copy when the exhaustive scan fits the default budget.
    let (triangle_free, triangle_check) = match find_monochromatic_clique_budgeted(
        &reread,
        3,
        None,
        shatter::coloring::DEFAULT_CLIQUE_BUDGET,
    ) {
        Ok(None) => (json!(true), json!("exhaustive")),
        Ok(Some(cert)) => {
            return Err(CliError::Integrity(format!(
                "construction has a monochromatic triangle {:?} in color {}",
                cert.vertices, cert.color
            )))
        }
        Err(ColoringError::SearchBudgetExceeded { .. }) => (Value::Null, json!("skipped: budget")),
        Err(e) => return Err(col_err(e)),
    };
    Ok(json!({
        "n": coloring.vertex_count(),
        "m": coloring.color_count(),
        "output": path_string(output),
        "round_trip": true,
        "triangle_free": triangle_free,
        "triangle_check": triangle_check,
    }))
}

#[allow(clippy::too_many_arguments)]
fn run_random(
    kind: ArtifactKind,
    n: usize,
    m: usize,
    count: usize,
    density: f64,
    seed: u64,
    output: &Path,
) -> Result<Value, CliError> {
    match kind {
        ArtifactKind::System => {
            let sys = SetSystem::random(n, count, density, seed).map_err(set_err)?;
            write_system(output, &sys)?;
            if load_system(output)? != sys {
                return Err(CliError::Integrity(format!(
                    "{}: write/read round trip altered the system",
                    output.display()
                )));
            }
            Ok(json!({
                "kind": "system",
                "output": path_string(output),
                "ground_size": sys.ground_size(),
                "member_count": sys.member_count(),
                "density": density,
                "seed": seed,
                "round_trip": true,
            }))
        }
        ArtifactKind::Coloring => {
            let coloring = random_coloring(n, m, seed).map_err(col_err)?;
            write_coloring(output, &coloring)?;
            if load_coloring(output)? != coloring {
                return Err(CliError::Integrity(format!(
                    "{}: write/read round trip altered the coloring",
                    output.display()
                )));
            }
            Ok(json!({
                "kind": "coloring",
                "output": path_string(output),
                "n": n,
                "m": m,
                "seed": seed,
                "round_trip": true,
            }))
        }
    }
}

fn run_pack(input: &Path, delta: usize) -> Result<Value, CliError> {
    let sys = load_system(input)?;
    let packing = greedy_delta_packing(&sys, delta).map_err(pack_err)?;
    // Re-check separation and maximality against the raw crossing counts.
    for (i, &u) in packing.points.iter().enumerate() {
        for &v in &packing.points[i + 1..] {
            let crossing = crossing_count(&sys, u, v).map_err(pack_err)?;
            if crossing < delta {
                return Err(CliError::Integrity(format!(
                    "packing pair ({u}, {v}) is crossed by only {crossing} members"
                )));
            }
        }
    }
    for p in 0..sys.ground_size() {
        if packing.points.contains(&p) {
            continue;
        }
        let fits = packing
            .points
            .iter()
            .all(|&q| crossing_count(&sys, p, q).is_ok_and(|c| c >= delta));
        if fits {
            return Err(CliError::Integrity(format!(
                "packing claims maximality but point {p} still fits"
            )));
        }
    }
    Ok(json!({
        "packing": packing,
        "size": packing.points.len(),
        "verified": true,
    }))
}

fn run_partition(input: &Path, delta: usize, d: usize) -> Result<Value, CliError> {
    let sys = load_system(input)?;
    let part = partition(&sys, delta, d).map_err(pack_err)?;
    let report = verify_partition(&part, &sys).map_err(pack_err)?;
    if !report.pass {
        return Err(CliError::Integrity(format!(
            "partition failed re-verification: {report:?}"
        )));
    }
    Ok(json!({
        "partition": part,
        "part_count": part.parts.len(),
        "verification": report,
    }))
}

fn run_search(
    input: &Path,
    targets: &Option<Vec<usize>>,
    menu_bound: Option<usize>,
    exact: Option<usize>,
    color: Option<usize>,
    budget: u64,
) -> Result<Value, CliError> {
    if targets.is_some() == exact.is_some() {
        return Err(CliError::Validation(
            "search needs exactly one of --targets or --exact".into(),
        ));
    }
    let coloring = load_coloring(input)?;
    match (targets, exact) {
        (Some(targets), None) => {
            let bound = menu_bound.unwrap_or_else(|| coloring.color_count().max(1));
            let outcome = neighborhood_descent(&coloring, targets, bound).map_err(clique_err)?;
            if !verify_clique(&coloring, &outcome.certificate).map_err(clique_err)? {
                return Err(CliError::Integrity(
                    "descent returned a certificate that fails verification".into(),
                ));
            }
            Ok(json!({
                "mode": "descent",
                "menu_bound": bound,
                "targets": outcome.targets,
                "achieved": outcome.achieved,
                "completed": outcome.completed,
                "certificate": outcome.certificate,
                "verified": true,
            }))
        }
        (None, Some(k)) => {
            let found =
                find_monochromatic_clique_budgeted(&coloring, k, color, budget).map_err(col_err)?;
            if let Some(cert) = &found {
                if !verify_clique(&coloring, cert).map_err(clique_err)? {
                    return Err(CliError::Integrity(
                        "exhaustive search returned a certificate that fails verification".into(),
                    ));
                }
            }
            Ok(json!({
                "mode": "exhaustive",
                "k": k,
                "color": color,
                "found": found.is_some(),
                "certificate": found,
                "definitive": true,
            }))
        }
        _ => unreachable!("mode ambiguity rejected above"),
    }
}

fn run_trace(
    input: &Path,
    d: Option<usize>,
    targets: &[usize],
    budgets: &[usize],
    budget: u64,
) -> Result<Value, CliError> {
    let coloring = load_coloring(input)?;
    let (d_used, d_source, dual_vc) = match d {
        Some(d) => (d, "given", None),
        None => {
            let dim = coloring_dual_vc_budgeted(&coloring, budget).map_err(set_err)?;
            (dim.max(1) as usize, "exact-oracle", Some(dim))
        }
    };
    let trace = pipeline_trace(&coloring, d_used, targets, budgets).map_err(pipe_err)?;
    Ok(json!({
        "d": d_used,
        "d_source": d_source,
        "dual_vc_dimension": dual_vc,
        "trace": trace,
    }))
}

fn run_ramsey(k: usize, m: usize, n_max: usize, seed: u64) -> Result<Value, CliError> {
    let opts = RamseyOptions {
        seed,
        ..RamseyOptions::default()
    };
    let report = ramsey_small(k, m, n_max, &opts).map_err(ramsey_err)?;
    if !report.witness_verified {
        return Err(CliError::Integrity(format!(
            "witness coloring of K_{} failed its exhaustive re-check",
            report.witness_n
        )));
    }
    Ok(serde_json::to_value(report).expect("report serializes"))
}

fn run_verify(
    input: &Path,
    triangle_free: bool,
    certificate: Option<&Path>,
    budget: u64,
) -> Result<Value, CliError> {
    if !triangle_free && certificate.is_none() {
        return Err(CliError::Validation(
            "nothing to verify; pass --triangle-free and/or --certificate".into(),
        ));
    }
    let coloring = load_coloring(input)?;
    let mut payload = json!({
        "n": coloring.vertex_count(),
        "m": coloring.color_count(),
    });
    if triangle_free {
        match find_monochromatic_clique_budgeted(&coloring, 3, None, budget) {
            Ok(None) => payload["triangle_free"] = json!(true),
            Ok(Some(cert)) => {
                return Err(CliError::Integrity(format!(
                    "monochromatic triangle {:?} in color {}",
                    cert.vertices, cert.color
                )))
            }
            Err(e) => return Err(col_err(e)),
        }
    }
    if let Some(path) = certificate {
        let text = read_file(path)?;
        let cert: CliqueCertificate = serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("{}: invalid certificate JSON: {e}", path.display()))
        })?;
        let holds = verify_clique(&coloring, &cert)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        if !holds {
            let (u, v) = first_offending_pair(&coloring, &cert);
            return Err(CliError::Integrity(format!(
                "certificate does not hold: edge ({u}, {v}) has color {}, not {}",
                coloring.color(u, v),
                cert.color
            )));
        }
        payload["certificate_valid"] = json!(true);
        payload["certificate"] = json!(cert);
    }
    Ok(payload)
}

/// First pair inside a well-formed but false certificate whose color
/// disagrees; only called when one exists.
fn first_offending_pair(coloring: &EdgeColoring, cert: &CliqueCertificate) -> (usize, usize) {
    for (i, &u) in cert.vertices.iter().enumerate() {
        for &v in &cert.vertices[i + 1..] {
            if coloring.color(u, v) != cert.color {
                return (u, v);
            }
        }
    }
    unreachable!("certificate was reported false but all pairs agree");
}

// ==================== Rendering ====================

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

/// Serialize a report. JSON is the canonical form; `text` and `csv` are flat
/// `key: value` projections of the same tree with dotted paths. All three are
/// deterministic: object keys are emitted in sorted order.
pub fn render(report: &Report, format: Format) -> String {
    let value = serde_json::to_value(report).expect("report serializes");
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("value prints");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            for (key, rendered) in flatten(&value) {
                out.push_str(&key);
                out.push_str(": ");
                out.push_str(&text_safe(&rendered));
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (key, rendered) in flatten(&value) {
                out.push_str(&csv_escape(&key));
                out.push(',');
                out.push_str(&csv_escape(&rendered));
                out.push('\n');
            }
            out
        }
    }
}

/// Depth-first flattening: objects extend the dotted path, arrays of scalars
/// inline as space-separated values, other arrays index each element.
fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    walk(value, String::new(), &mut rows);
    rows
}

fn walk(value: &Value, path: String, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                let child_path = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                walk(child, child_path, rows);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let joined: Vec<String> = items.iter().map(scalar_string).collect();
            rows.push((path, joined.join(" ")));
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                walk(child, format!("{path}.{i}"), rows);
            }
        }
        scalar => rows.push((path, scalar_string(scalar))),
    }
}

fn is_scalar(value: &Value) -> bool {
    !matches!(value, Value::Object(_) | Value::Array(_))
}

fn scalar_string(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => unreachable!("scalar_string called on a composite"),
    }
}

/// Keep the text format line-oriented: escape values containing control
/// characters using string-literal notation.
fn text_safe(s: &str) -> String {
    if s.chars().any(|c| c.is_control()) {
        format!("{s:?}")
    } else {
        s.to_string()
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
