//! The `numrad` command line: problem files in, JSON reports out.
//!
//! Exit codes are 0 on success, 1 when a checked assertion fails and 2 for
//! input errors. Every report carries a SHA-256 digest of its input; the
//! report minus its `wall_time_s` field is a pure function of the input and
//! the flags.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::lpspace::{Exponent, LpSpace};
use crate::operators::{numerical_radius, numerical_range_sample, operator_norm, Method, Operator, SearchConfig};
use crate::projections::{
    extremal_pairs, invariance_certificate, minimal_projection, norm_of, CertificateOutcome, NormKind,
    OptimizerConfig, ProjectionProblem,
};
use crate::symmetry::{
    commutant_projections_dimension, fourier_projection, interpolation_projection, lebesgue_constant,
    marcinkiewicz_average, rudin_average, verify_group, FourierGrid, IsometryGroup,
};
use crate::unicity::{builtin_instances, dim4_lambda, strong_unicity_estimate, UnicityConfig};
use crate::verify::{run_suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "numrad", version, about = "Numerical radius and minimal projections on finite-dimensional lp spaces")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Flags {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for extremal pairs and certificates.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub tol: f64,
    /// Start points for multi-start searches.
    #[arg(long, global = true, default_value_t = 64)]
    pub starts: usize,
    /// auto, exact (closed forms only) or sample (always multi-start).
    #[arg(long, global = true, value_enum, default_value = "auto", value_parser = parse_method)]
    pub method: Method,
    /// Quantity to minimise or certify: radius or operator.
    #[arg(long, global = true, default_value = "radius", value_parser = parse_kind)]
    pub kind: NormKind,
    /// Also write plot-ready data to this CSV file.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<NormKind, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operator norm, numerical radius and a numerical range sample.
    Radius {
        file: PathBuf,
        /// Points in the numerical range sample.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Minimal projection or extension, its extremal pairs and certificate.
    Minproj {
        file: PathBuf,
        /// Nelder–Mead restarts of the outer search.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Group check, group average and commutant dimension.
    Average { file: PathBuf },
    /// Grid trigonometric projection and its Lebesgue constant.
    Fourier {
        /// Trigonometric degree.
        #[arg(short = 'n', long, default_value_t = 1)]
        degree: usize,
        /// Grid size; defaults to 4n + 4.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Strong-unicity estimate for a fixed instance or a problem file.
    Unicity {
        file: Option<PathBuf>,
        /// Built-in instance: example-l43, normone or dim4.
        #[arg(long, conflicts_with = "file")]
        instance: Option<String>,
        /// Perturbation directions to sample.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Built-in verification suite.
    Verify {
        /// Restrict to these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Assertion(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------------------
// problem files

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
pub struct SpaceSpec {
    pub dim: usize,
    pub p: Exponent,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Elements(Vec<Vec<Vec<f64>>>),
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct ProblemFile {
    pub space: Option<SpaceSpec>,
    pub operator: Option<Vec<Vec<f64>>>,
    pub v_basis: Option<Vec<Vec<f64>>>,
    pub restriction: Option<Vec<Vec<f64>>>,
    pub group: Option<GroupSpec>,
    /// Reference minimiser for `unicity`.
    pub reference: Option<Vec<Vec<f64>>>,
    /// Admissible operators always sampled by `unicity`.
    pub candidates: Option<Vec<Vec<Vec<f64>>>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

const FIELDS: [&str; 9] = ["space", "operator", "v_basis", "restriction", "group", "reference", "candidates", "seed", "tol"];

fn field<T: DeserializeOwned>(obj: &serde_json::Map<String, Value>, name: &str) -> CliResult<Option<T>> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| CliError::Input(format!("field `{name}`: {e}"))),
    }
}

impl ProblemFile {
    /// Parses and validates a problem document. Errors name the offending field.
    pub fn parse(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed document: {e}")))?;
        let Value::Object(obj) = value else {
            return Err(CliError::Input("document must be an object".into()));
        };
        if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(CliError::Input(format!("unknown field `{unknown}` (expected one of {})", FIELDS.join(", "))));
        }
        let space = match obj.get("space") {
            None | Some(Value::Null) => None,
            Some(Value::Object(s)) => {
                if let Some(unknown) = s.keys().find(|k| *k != "dim" && *k != "p") {
                    return Err(CliError::Input(format!("unknown field `space.{unknown}`")));
                }
                let dim: usize = field(s, "dim").map_err(|e| prefix(e, "space."))?.ok_or_else(|| CliError::Input("missing field `space.dim`".into()))?;
                let p: Exponent = field(s, "p").map_err(|e| prefix(e, "space."))?.ok_or_else(|| CliError::Input("missing field `space.p`".into()))?;
                if dim == 0 {
                    return Err(CliError::Input("field `space.dim`: must be at least 1".into()));
                }
                Some(SpaceSpec { dim, p })
            }
            Some(_) => return Err(CliError::Input("field `space`: expected an object with `dim` and `p`".into())),
        };
        let group = match obj.get("group") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(GroupSpec::Named(s.clone())),
            Some(_) => Some(GroupSpec::Elements(field(&obj, "group")?.expect("present"))),
        };
        let file = ProblemFile {
            space,
            operator: field(&obj, "operator")?,
            v_basis: field(&obj, "v_basis")?,
            restriction: field(&obj, "restriction")?,
            group,
            reference: field(&obj, "reference")?,
            candidates: field(&obj, "candidates")?,
            seed: field(&obj, "seed")?,
            tol: field(&obj, "tol")?,
        };
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> CliResult<()> {
        let Some(space) = &self.space else {
            if self.operator.is_some() || self.v_basis.is_some() {
                return Err(CliError::Input("missing field `space`".into()));
            }
            return Ok(());
        };
        let d = space.dim;
        if let Some(m) = &self.operator {
            check_matrix("operator", m, d, d)?;
        }
        if let Some(m) = &self.reference {
            check_matrix("reference", m, d, d)?;
        }
        if let Some(list) = &self.candidates {
            for (i, m) in list.iter().enumerate() {
                check_matrix(&format!("candidates[{i}]"), m, d, d)?;
            }
        }
        if let Some(GroupSpec::Elements(list)) = &self.group {
            for (i, m) in list.iter().enumerate() {
                check_matrix(&format!("group[{i}]"), m, d, d)?;
            }
        }
        if let Some(GroupSpec::Named(name)) = &self.group {
            if !["cyclic", "sign", "trivial"].contains(&name.as_str()) {
                return Err(CliError::Input(format!("field `group`: unknown group {name:?} (cyclic, sign, trivial or a list of matrices)")));
            }
        }
        if let Some(basis) = &self.v_basis {
            if basis.is_empty() {
                return Err(CliError::Input("field `v_basis`: must not be empty".into()));
            }
            for (i, v) in basis.iter().enumerate() {
                if v.len() != d {
                    return Err(CliError::Input(format!("field `v_basis[{i}]`: has {} entries, expected {d}", v.len())));
                }
                check_finite(&format!("v_basis[{i}]"), v)?;
            }
            if let Some(r) = &self.restriction {
                check_matrix("restriction", r, basis.len(), basis.len())?;
            }
        } else if self.restriction.is_some() {
            return Err(CliError::Input("field `restriction`: needs `v_basis`".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Input(format!("field `tol`: must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn space(&self) -> CliResult<LpSpace> {
        let s = self.space.as_ref().ok_or_else(|| CliError::Input("missing field `space`".into()))?;
        Ok(LpSpace::new(s.dim, s.p)?)
    }

    fn operator_matrix(&self) -> Option<DMatrix<f64>> {
        self.operator.as_ref().map(|m| to_matrix(m))
    }

    fn problem(&self) -> CliResult<ProjectionProblem> {
        let space = self.space()?;
        let basis = self.v_basis.as_ref().ok_or_else(|| CliError::Input("missing field `v_basis`".into()))?;
        let basis = basis.iter().map(|v| DVector::from_row_slice(v)).collect();
        let restriction = self.restriction.as_ref().map(|m| to_matrix(m));
        ProjectionProblem::new(space, basis, restriction).map_err(|e| CliError::Input(format!("field `v_basis`: {e}")))
    }

    fn group(&self) -> CliResult<IsometryGroup> {
        let space = self.space()?;
        match self.group.as_ref().ok_or_else(|| CliError::Input("missing field `group`".into()))? {
            GroupSpec::Named(n) if n == "cyclic" => Ok(IsometryGroup::cyclic_shifts(space)),
            GroupSpec::Named(n) if n == "sign" => {
                if space.dim > 12 {
                    return Err(CliError::Input("field `group`: sign group limited to dimension 12".into()));
                }
                Ok(IsometryGroup::sign_changes(space))
            }
            GroupSpec::Named(_) => Ok(IsometryGroup::trivial(space)),
            GroupSpec::Elements(list) => IsometryGroup::new(space, list.iter().map(|m| to_matrix(m)).collect())
                .map_err(|e| CliError::Input(format!("field `group`: {e}"))),
        }
    }
}

fn prefix(e: CliError, p: &str) -> CliError {
    match e {
        CliError::Input(m) => CliError::Input(m.replacen("field `", &format!("field `{p}"), 1)),
        other => other,
    }
}

fn check_finite(name: &str, v: &[f64]) -> CliResult<()> {
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("field `{name}`: non-finite entry {x}")));
    }
    Ok(())
}

fn check_matrix(name: &str, m: &[Vec<f64>], rows: usize, cols: usize) -> CliResult<()> {
    if m.len() != rows {
        return Err(CliError::Input(format!("field `{name}`: has {} rows, expected {rows}", m.len())));
    }
    for (i, r) in m.iter().enumerate() {
        if r.len() != cols {
            return Err(CliError::Input(format!("field `{name}`: row {i} has {} entries, expected {cols}", r.len())));
        }
        check_finite(name, r)?;
    }
    Ok(())
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Serialize)]
pub struct Reported {
    pub value: f64,
    pub tolerance: f64,
    pub method: String,
}

fn reported(value: f64, tolerance: f64, method: impl Into<String>) -> Value {
    serde_json::to_value(Reported { value, tolerance, method: method.into() }).expect("serialisable")
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub flags: Value,
    pub input_digest: String,
    pub results: Value,
    /// Where each expected value comes from, keyed by result name.
    pub sources: BTreeMap<String, String>,
    pub converged: bool,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl Report {
    /// The report without its wall time, serialised compactly.
    pub fn payload_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serialisable");
        v.as_object_mut().expect("object").remove("wall_time_s");
        serde_json::to_string(&v).expect("serialisable")
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Draft {
    results: Value,
    sources: BTreeMap<String, String>,
    converged: bool,
    passed: bool,
    failure: Option<String>,
    csv: Option<String>,
}

impl Draft {
    fn new(results: Value) -> Self {
        Draft { results, sources: BTreeMap::new(), converged: true, passed: true, failure: None, csv: None }
    }

    fn fail(&mut self, why: impl Into<String>) {
        self.passed = false;
        self.failure.get_or_insert_with(|| why.into());
    }
}

fn search(flags: &Flags, seed: u64) -> SearchConfig {
    SearchConfig { method: flags.method, starts: flags.starts, seed, ..Default::default() }
}

fn read_problem(path: &Path) -> CliResult<(ProblemFile, String)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
    Ok((ProblemFile::parse(&text)?, digest(&bytes)))
}

/// Outcome of one command: the report and the failure message, if any.
pub struct Execution {
    pub report: Report,
    pub failure: Option<String>,
}

impl Execution {
    pub fn exit_code(&self) -> i32 {
        if self.failure.is_some() {
            1
        } else {
            0
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<Execution> {
    let start = Instant::now();
    let flags = &cli.flags;
    let (name, args, digest_hex, draft) = match &cli.command {
        Command::Radius { file, samples } => {
            let (pf, d) = read_problem(file)?;
            ("radius", json!({ "file": file, "samples": samples }), d, cmd_radius(&pf, flags, *samples)?)
        }
        Command::Minproj { file, restarts } => {
            let (pf, d) = read_problem(file)?;
            ("minproj", json!({ "file": file, "restarts": restarts }), d, cmd_minproj(&pf, flags, *restarts)?)
        }
        Command::Average { file } => {
            let (pf, d) = read_problem(file)?;
            ("average", json!({ "file": file }), d, cmd_average(&pf, flags)?)
        }
        Command::Fourier { degree, points } => {
            let points = points.unwrap_or(4 * degree + 4);
            let args = json!({ "degree": degree, "points": points });
            let d = digest(args.to_string().as_bytes());
            ("fourier", args, d, cmd_fourier(*degree, points)?)
        }
        Command::Unicity { file, instance, samples } => {
            let args = json!({ "file": file, "instance": instance, "samples": samples });
            let (pf, d) = match file {
                Some(f) => {
                    let (pf, d) = read_problem(f)?;
                    (Some(pf), d)
                }
                None => (None, digest(args.to_string().as_bytes())),
            };
            ("unicity", args, d, cmd_unicity(pf.as_ref(), instance.as_deref(), *samples, flags)?)
        }
        Command::Verify { only } => {
            let args = json!({ "only": only });
            let d = digest(args.to_string().as_bytes());
            ("verify", args, d, cmd_verify(only, flags)?)
        }
    };
    if let (Some(path), Some(csv)) = (&flags.csv, &draft.csv) {
        std::fs::write(path, csv).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut flag_echo = serde_json::to_value(flags).expect("serialisable");
    flag_echo.as_object_mut().expect("object").insert("arguments".into(), args);
    let report = Report {
        command: name.to_string(),
        flags: flag_echo,
        input_digest: digest_hex,
        results: draft.results,
        sources: draft.sources,
        converged: draft.converged,
        passed: draft.passed,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(Execution { report, failure: draft.failure })
}

fn cmd_radius(pf: &ProblemFile, flags: &Flags, samples: usize) -> CliResult<Draft> {
    let space = pf.space()?;
    let seed = pf.seed.unwrap_or(flags.seed);
    let m = pf.operator_matrix().ok_or_else(|| CliError::Input("missing field `operator`".into()))?;
    let op = Operator::on(space, m)?;
    let cfg = search(flags, seed);
    let radius = numerical_radius(&op, &cfg)?;
    let norm = operator_norm(&op, &SearchConfig { extra_starts: vec![radius.witness_x.clone()], ..cfg })?;
    let range = numerical_range_sample(&op, samples, seed)?;
    let (lo, hi) = range.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let mut draft = Draft::new(json!({
        "operator_norm": reported(norm.value, tol_of(norm.method), norm.method),
        "numerical_radius": reported(radius.value, tol_of(radius.method), radius.method),
        "radius_witness": { "x": radius.witness_x.as_slice(), "y": radius.witness_y.as_slice() },
        "norm_witness": { "x": norm.witness_x.as_slice(), "y": norm.witness_y.as_slice() },
        "range_sample": { "count": range.len(), "min": lo, "max": hi },
    }));
    if radius.value > norm.value + 1e-9 {
        draft.fail(format!("numerical radius {} exceeds operator norm {}", radius.value, norm.value));
    }
    let mut csv = String::from("index,value\n");
    for (i, v) in range.iter().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
    }
    draft.csv = Some(csv);
    Ok(draft)
}

/// Tolerance attached to values from each evaluation route.
fn tol_of(method: &str) -> f64 {
    match method {
        "rows" | "columns" | "sign-vertices" | "rows-dual" | "linear-program" | "trivial" | "zero" => 1e-12,
        "jacobi" => 1e-10,
        _ => 1e-6,
    }
}

fn cmd_minproj(pf: &ProblemFile, flags: &Flags, restarts: usize) -> CliResult<Draft> {
    let problem = pf.problem()?;
    let seed = pf.seed.unwrap_or(flags.seed);
    let tol = pf.tol.unwrap_or(flags.tol);
    let cfg = OptimizerConfig { restarts, inner_starts: flags.starts, seed, method: flags.method, ..Default::default() };
    let best = minimal_projection(&problem, flags.kind, &cfg)?;
    let pairs = extremal_pairs(&best.operator, &problem, flags.kind, tol, &search(flags, seed))?;
    let certificate = if pairs.pairs.is_empty() { None } else { Some(invariance_certificate(&pairs.pairs, &problem, tol)?) };
    let mut draft = Draft::new(json!({
        "kind": flags.kind,
        "value": reported(best.value, if best.method == "nelder-mead" { 2e-3 } else { tol_of(best.method) }, best.method),
        "operator": rows_of(&best.operator),
        "theta": best.theta.as_slice(),
        "evaluations": best.evaluations,
        "membership_error": problem.membership_error(&best.operator),
        "pairs": pairs.pairs.iter().map(|p| json!({ "x": p.x.as_slice(), "y": p.y.as_slice(), "value": p.value, "diagonal": p.diagonal })).collect::<Vec<_>>(),
        "pairs_empty": pairs.empty,
        "certificate": certificate.as_ref().map(|c| json!({
            "feasible": c.is_feasible(),
            "weights": c.certificate().weights,
            "residual": c.certificate().residual,
        })),
    }));
    draft.converged = best.converged;
    draft.sources.insert("value".into(), "computed".into());
    if let Some(CertificateOutcome::Infeasible(c)) = &certificate {
        draft.sources.insert("certificate".into(), format!("no invariant convex combination within {tol:e} (residual {:.3e})", c.residual));
    }
    if problem.membership_error(&best.operator) > 1e-8 {
        draft.fail("minimiser left the admissible family");
    }
    Ok(draft)
}

fn cmd_average(pf: &ProblemFile, flags: &Flags) -> CliResult<Draft> {
    let space = pf.space()?;
    let seed = pf.seed.unwrap_or(flags.seed);
    let group = pf.group()?;
    let check = verify_group(&group, flags.starts, seed);
    let mut draft = Draft::new(json!({ "group": check }));
    if !check.passed {
        let (axiom, i) = check.failure.expect("failed check has a reason");
        draft.fail(format!("group axiom {axiom:?} fails at element {i}"));
        return Ok(draft);
    }
    let problem = pf.v_basis.as_ref().map(|_| pf.problem()).transpose()?;
    let p = match (pf.operator_matrix(), &problem) {
        (Some(m), _) => m,
        (None, Some(prob)) => prob.parametrize()?.base,
        (None, None) => return Err(CliError::Input("need `operator` or `v_basis`".into())),
    };
    let q = rudin_average(&p, &group)?;
    let commutator = group.elements.iter().map(|g| (&q * g - g * &q).amax()).fold(0.0, f64::max);
    let cfg = search(flags, seed);
    let rq = numerical_radius(&Operator::on(space, q.clone())?, &cfg)?;
    let back = SearchConfig { extra_starts: group.elements.iter().map(|g| g * &rq.witness_x).collect(), ..cfg.clone() };
    let rp = numerical_radius(&Operator::on(space, p.clone())?, &back)?;
    let nq = operator_norm(&Operator::on(space, q.clone())?, &cfg)?;
    let np = operator_norm(&Operator::on(space, p)?, &cfg)?;
    let results = draft.results.as_object_mut().expect("object");
    results.insert("average".into(), json!(rows_of(&q)));
    results.insert("max_commutator".into(), json!(commutator));
    results.insert("radius_before".into(), reported(rp.value, tol_of(rp.method), rp.method));
    results.insert("radius_after".into(), reported(rq.value, tol_of(rq.method), rq.method));
    results.insert("norm_before".into(), reported(np.value, tol_of(np.method), np.method));
    results.insert("norm_after".into(), reported(nq.value, tol_of(nq.method), nq.method));
    if commutator > 1e-10 {
        draft.fail(format!("average does not commute with the group ({commutator:.3e})"));
    }
    if rq.value > rp.value + 1e-9 {
        draft.fail("averaging increased the numerical radius");
    }
    if let Some(prob) = &problem {
        let err = prob.membership_error(&q);
        let dim = commutant_projections_dimension(&group, prob)?;
        let results = draft.results.as_object_mut().expect("object");
        results.insert("membership_error".into(), json!(err));
        results.insert("commutant_dimension".into(), json!(dim));
        if err > 1e-10 {
            draft.fail(format!("average left the admissible family ({err:.3e})"));
        }
    }
    Ok(draft)
}

/// Largest grid on which dense matrix checks are run.
const DENSE_GRID_LIMIT: usize = 1024;

fn cmd_fourier(degree: usize, points: usize) -> CliResult<Draft> {
    let grid = FourierGrid::new(degree, points)?;
    let lebesgue = lebesgue_constant(&grid);
    let n = degree as f64;
    let lower = if degree == 0 { 0.0 } else { 4.0 / std::f64::consts::PI.powi(2) * n.ln() };
    let upper = if degree == 0 { 1.0 } else { n.ln() + 3.0 };
    let mut draft = Draft::new(json!({
        "degree": degree,
        "points": points,
        "lebesgue_constant": reported(lebesgue, 1e-12, "row-sum"),
        "bounds": [lower, upper],
    }));
    draft.sources.insert("bounds".into(), "(4/pi^2) ln n and ln n + 3".into());
    if degree > 0 && (lebesgue < lower || lebesgue > upper) {
        draft.fail("Lebesgue constant outside its bounds");
    }
    if points <= DENSE_GRID_LIMIT {
        let m = fourier_projection(&grid);
        let idempotence = (&m * &m - &m).amax();
        let op = Operator::on(grid.space(), m.clone())?;
        let radius = numerical_radius(&op, &SearchConfig::default())?.value;
        let nodes: Vec<usize> = (0..2 * degree + 1).map(|i| i * points / (2 * degree + 1)).collect();
        let interp = interpolation_projection(&grid, &nodes)?;
        let avg = marcinkiewicz_average(&interp, &grid)?;
        let results = draft.results.as_object_mut().expect("object");
        results.insert("numerical_radius".into(), reported(radius, 1e-12, "rows"));
        results.insert("idempotence_error".into(), json!(idempotence));
        results.insert("interpolation_nodes".into(), json!(nodes));
        results.insert("average_deviation".into(), json!(avg.deviation));
        if idempotence > 1e-10 {
            draft.fail("grid projection is not idempotent");
        }
        if avg.deviation > 1e-8 {
            draft.fail(format!("translation average differs from the Fourier projection by {:.3e}", avg.deviation));
        }
    } else {
        draft.sources.insert("dense_checks".into(), format!("skipped above {DENSE_GRID_LIMIT} points"));
    }
    let mut csv = String::from("degree,points,lebesgue_constant\n");
    for k in 0..=degree {
        if let Ok(g) = FourierGrid::new(k, points) {
            csv.push_str(&format!("{k},{points},{}\n", lebesgue_constant(&g)));
        }
    }
    draft.csv = Some(csv);
    Ok(draft)
}

fn cmd_unicity(pf: Option<&ProblemFile>, instance: Option<&str>, samples: usize, flags: &Flags) -> CliResult<Draft> {
    let seed = pf.and_then(|p| p.seed).unwrap_or(flags.seed);
    let (name, problem, reference, extra) = match (pf, instance) {
        (Some(pf), _) => {
            let problem = pf.problem()?;
            let reference = match &pf.reference {
                Some(m) => to_matrix(m),
                None => minimal_projection(&problem, flags.kind, &OptimizerConfig { seed, inner_starts: flags.starts, method: flags.method, ..Default::default() })?.operator,
            };
            let extra = pf.candidates.iter().flatten().map(|m| to_matrix(m)).collect();
            ("file".to_string(), problem, reference, extra)
        }
        (None, Some(name)) => {
            let inst = builtin_instances()
                .into_iter()
                .find(|i| i.name == name)
                .ok_or_else(|| CliError::Input(format!("unknown instance {name:?} (example-l43, normone, dim4)")))?;
            let problem = inst.projection_problem();
            let (reference, extra) = if inst.minimizers.len() >= 2 {
                (inst.minimizers[0].clone(), inst.minimizers[1..].to_vec())
            } else {
                let cfg = OptimizerConfig { seed, inner_starts: flags.starts, method: flags.method, ..Default::default() };
                (minimal_projection(&problem, flags.kind, &cfg)?.operator, Vec::new())
            };
            (inst.name.to_string(), problem, reference, extra)
        }
        (None, None) => return Err(CliError::Input("give a problem file or --instance".into())),
    };
    let cfg = UnicityConfig { samples, seed, extra, method: flags.method, ..Default::default() };
    let est = strong_unicity_estimate(&problem, &reference, flags.kind, &cfg)?;
    let value = norm_of(&problem.space, &reference, flags.kind, &search(flags, seed))?;
    let mut draft = Draft::new(json!({
        "instance": name,
        "kind": flags.kind,
        "reference_value": value,
        "reference": rows_of(&reference),
        "r_hat": est.r_hat,
        "sample_count": est.sample_count,
        "rejected": est.rejected,
        "degenerate_directions": est.degenerate_directions.iter().map(rows_of).collect::<Vec<_>>(),
        "worst_direction": rows_of(&est.worst_direction),
    }));
    draft.sources.insert("r_hat".into(), "sampled minimum, an upper estimate".into());
    if name == "dim4" {
        let h = dim4_lambda(&[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])?;
        draft.results.as_object_mut().expect("object").insert("closed_form_constant".into(), json!(h.lambda));
        draft.sources.insert("closed_form_constant".into(), "1 + (sum f_i / (1 - 2 f_i))^-1".into());
    }
    Ok(draft)
}

fn cmd_verify(only: &[u8], flags: &Flags) -> CliResult<Draft> {
    let out = run_suite(&VerifyConfig { seed: flags.seed, only: only.to_vec() })?;
    for c in &out.criteria {
        eprintln!("{}", c.summary_line());
    }
    let failing: Vec<String> = out.criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
    let mut draft = Draft::new(serde_json::to_value(&out).expect("serialisable"));
    if !failing.is_empty() {
        draft.fail(format!("criteria {} failed", failing.join(", ")));
    }
    Ok(draft)
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(exec) => {
            let text = serde_json::to_string_pretty(&exec.report).expect("serialisable");
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error worth a panic
            let _ = writeln!(out, "{text}").and_then(|_| out.flush());
            if let Some(why) = &exec.failure {
                eprintln!("assertion failed: {why}");
            }
            exec.exit_code()
        }
        Err(e @ CliError::Input(_)) => {
            eprintln!("{e}");
            2
        }
        Err(e @ CliError::Assertion(_)) => {
            eprintln!("{e}");
            1
        }
    }
}
