//! Sweep runner behind the `warped-forms` binary.
//!
//! Every command resolves a [`RunConfig`] (JSON config file, then flags on
//! top), evaluates its parameter points in parallel, and writes either a long
//! CSV table (`command,params,quantity,value,provenance`) or one structured
//! JSON document. Output order never depends on scheduling.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    self, cutoff_energy, glue_budget, normalized_upper, test_form_quotient, theorem41_report,
    trace_bound, BoundReport, CapInputs, LowerFit, QuotientKind, Theorem41Report,
};
use crate::closed_form;
use crate::profiles::{
    assemble_doubly_warped, build_profile, volume, BlendSpec, DoublyWarpedMetric, WarpProfile,
};
use crate::sl_solver::DEFAULT_GRID;
use crate::spectrum::SpectrumTable;
use crate::warped_spectra;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    /// Functions on the constructed metric.
    #[default]
    WarpedFunction,
    /// Functions on the round sphere split the same way.
    RoundFunction,
    /// Radial co-exact upper bounds on the constructed metric.
    CoexactUpper,
    /// 1-forms on a constructed surface (m = 2).
    SurfaceOneform,
    /// Closed-form Hodge table of the round S^m in degree p.
    SphereHodge,
    /// Closed-form rough-Laplacian table of the round S^m in degree p.
    SphereRough,
}

/// Comma list (`10,20,40`) or geometric range `start:stop:factor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepSpec {
    List(Vec<f64>),
    Text(String),
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            SweepSpec::List(v) => Ok(v.clone()),
            SweepSpec::Text(s) => parse_sweep(s),
        }
    }
}

impl FromStr for SweepSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_sweep(s)?;
        Ok(SweepSpec::Text(s.to_string()))
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_number(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad(format!("not a number: `{s}`")))?;
    if !v.is_finite() {
        return Err(bad(format!("not a finite number: `{s}`")));
    }
    Ok(v)
}

/// Parses `a,b,c` or `start:stop:factor` (geometric, `stop` included up to
/// rounding).
pub fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("empty sweep"));
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("range `{s}` must be start:stop:factor")));
        }
        let (start, stop, factor) = (
            parse_number(parts[0])?,
            parse_number(parts[1])?,
            parse_number(parts[2])?,
        );
        if !(start > 0.0 && stop >= start && factor > 1.0) {
            return Err(bad(format!(
                "range `{s}` needs 0 < start <= stop and factor > 1"
            )));
        }
        let mut out = Vec::new();
        let mut i = 0;
        loop {
            let v = start * factor.powi(i);
            if v > stop * (1.0 + 1e-12) {
                break;
            }
            out.push(v);
            i += 1;
        }
        return Ok(out);
    }
    s.split(',').map(parse_number).collect()
}

#[derive(Debug, Parser)]
#[command(
    name = "warped-forms",
    version,
    about = "Eigenvalue bounds for differential forms on long warped spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test-form, normalized and numeric upper bounds over an L sweep.
    VerifyUpper(SharedArgs),
    /// McGowan lower bounds over an L sweep with the fitted constants.
    VerifyLower(SharedArgs),
    /// Cut-off energies, trace bounds and the gluing budget.
    Glue(SharedArgs),
    /// Raw spectrum table.
    Spectrum(SharedArgs),
    /// Warping profile and metric report.
    Profile(SharedArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyUpper(_) => "verify-upper",
            Command::VerifyLower(_) => "verify-lower",
            Command::Glue(_) => "glue",
            Command::Spectrum(_) => "spectrum",
            Command::Profile(_) => "profile",
        }
    }

    fn args(&self) -> &SharedArgs {
        match self {
            Command::VerifyUpper(a)
            | Command::VerifyLower(a)
            | Command::Glue(a)
            | Command::Spectrum(a)
            | Command::Profile(a) => a,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SharedArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Cylinder lengths: `10,20,40` or `10:100:2`.
    #[arg(long = "L", value_name = "SWEEP")]
    pub lengths: Option<SweepSpec>,
    /// Cut-off scales: list or range like `--L`.
    #[arg(long, value_name = "SWEEP")]
    pub eps: Option<SweepSpec>,
    /// Radial grid resolution N.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Fiber eigenvalue levels kept per factor.
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file overriding cover inputs (nu_u1, nu_u3, nu_u12, nu_u23, gradient_bound).
    #[arg(long)]
    pub caps_file: Option<PathBuf>,
    /// Eigenvalue budget for `glue`.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Number of glued summands for `glue`: 1 or m - 1.
    #[arg(long)]
    pub summands: Option<usize>,
    /// Entries to compute for `spectrum`.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub kind: Option<SpectrumKind>,
    /// Sample points for `profile`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Matching order of the blend polynomial.
    #[arg(long)]
    pub blend_order: Option<usize>,
}

/// Contents of a `--config` file. Keys match the long flag names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub k: Option<usize>,
    #[serde(rename = "L")]
    pub lengths: Option<SweepSpec>,
    pub eps: Option<SweepSpec>,
    pub grid: Option<usize>,
    pub modes: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub caps: Option<CapInputs>,
    pub eta: Option<f64>,
    pub summands: Option<usize>,
    pub count: Option<usize>,
    pub kind: Option<SpectrumKind>,
    pub points: Option<usize>,
    pub blend_order: Option<usize>,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub k: Option<usize>,
    #[serde(rename = "L")]
    pub lengths: Vec<f64>,
    pub eps: Vec<f64>,
    pub grid: usize,
    pub modes: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub caps: CapInputs,
    pub eta: f64,
    pub summands: usize,
    pub count: usize,
    pub kind: SpectrumKind,
    pub points: usize,
    pub blend_order: usize,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: &Command) -> Result<Self> {
        let a = command.args();
        let file: ConfigFile = match &a.config {
            Some(path) => read_json(path)?,
            None => ConfigFile::default(),
        };
        let mut caps = file.caps.unwrap_or_default();
        if let Some(path) = &a.caps_file {
            caps = read_json(path)?;
        }
        let sweep = |flag: &Option<SweepSpec>, file: &Option<SweepSpec>| -> Result<Vec<f64>> {
            flag.as_ref()
                .or(file.as_ref())
                .map_or(Ok(Vec::new()), |s| s.values())
        };
        Ok(RunConfig {
            command: command.name().to_string(),
            m: a.m.or(file.m),
            p: a.p.or(file.p),
            q: a.q.or(file.q),
            k: a.k.or(file.k),
            lengths: sweep(&a.lengths, &file.lengths)?,
            eps: sweep(&a.eps, &file.eps)?,
            grid: a.grid.or(file.grid).unwrap_or(DEFAULT_GRID),
            modes: a.modes.or(file.modes).unwrap_or(8),
            format: a.format.or(file.format).unwrap_or_default(),
            out: a.out.clone().or(file.out),
            caps,
            eta: a.eta.or(file.eta).unwrap_or(0.1),
            summands: a.summands.or(file.summands).unwrap_or(1),
            count: a.count.or(file.count).unwrap_or(10),
            kind: a.kind.or(file.kind).unwrap_or_default(),
            points: a.points.or(file.points).unwrap_or(201),
            blend_order: a.blend_order.or(file.blend_order).unwrap_or(1),
        })
    }

    fn need(&self, value: Option<usize>, name: &str) -> Result<usize> {
        value.ok_or_else(|| bad(format!("`{}` needs --{name}", self.command)))
    }

    fn need_lengths(&self) -> Result<Vec<f64>> {
        if self.lengths.is_empty() {
            return Err(bad(format!("`{}` needs --L", self.command)));
        }
        let mut l = self.lengths.clone();
        if let Some(bad_l) = l.iter().find(|x| !(**x > 0.0)) {
            return Err(bad(format!("cylinder length {bad_l} must be > 0")));
        }
        l.sort_by(f64::total_cmp);
        l.dedup();
        Ok(l)
    }
}

/// One line of the long CSV format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub command: String,
    pub params: String,
    pub quantity: String,
    pub value: f64,
    pub provenance: String,
}

fn numeric_provenance(grid: usize, err: f64) -> String {
    format!("numeric(N={grid}, err={err:.3e})")
}

fn report_provenance(r: &BoundReport, default: &str) -> String {
    if r.is_surrogate() {
        "surrogate".into()
    } else {
        default.into()
    }
}

fn params(pairs: &[(&str, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn emit<T: Serialize>(config: &RunConfig, rows: &[Row], document: &T) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    match config.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, document)?;
            buf.push(b'\n');
        }
    }
    match &config.out {
        Some(path) => fs::write(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn failed_checks(checks: &[(String, bool)]) -> Result<()> {
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.1)
        .map(|c| c.0.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::CheckFailed(failed.join("; ")))
    }
}

#[derive(Debug, Serialize)]
struct UpperRow {
    #[serde(rename = "L")]
    length: f64,
    hodge_quotient: BoundReport,
    rough_quotient: BoundReport,
    normalized: BoundReport,
    volume: f64,
    numeric_coexact: f64,
    numeric_error: f64,
    numeric_normalized: f64,
}

#[derive(Debug, Serialize)]
struct CheckResult {
    name: String,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct Document<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
    checks: Vec<CheckResult>,
    passed: bool,
}

fn document<'a, T: Serialize>(
    config: &'a RunConfig,
    body: T,
    checks: &[(String, bool)],
) -> Document<'a, T> {
    Document {
        config,
        body,
        checks: checks
            .iter()
            .map(|(name, passed)| CheckResult {
                name: name.clone(),
                passed: *passed,
            })
            .collect(),
        passed: checks.iter().all(|c| c.1),
    }
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

pub fn cmd_verify_upper(config: &RunConfig) -> Result<()> {
    let (m, p, k) = (
        config.need(config.m, "m")?,
        config.need(config.p, "p")?,
        config.need(config.k, "k")?,
    );
    let lengths = config.need_lengths()?;
    let profile = WarpProfile::default();
    let rows: Vec<UpperRow> = lengths
        .par_iter()
        .map(|&l| -> Result<UpperRow> {
            let metric = assemble_doubly_warped(m, p, l, &profile)?;
            let vol = volume(&metric);
            let upper = warped_spectra::coexact_pform_upper(&metric, k, config.grid)?;
            let entry = upper
                .entries()
                .get(k - 1)
                .ok_or_else(|| bad(format!("only {} co-exact levels computed", upper.len())))?;
            let err = entry.error_estimate.unwrap_or(0.0);
            Ok(UpperRow {
                length: l,
                hodge_quotient: test_form_quotient(m, p, k, l, QuotientKind::Hodge)?,
                rough_quotient: test_form_quotient(m, p, k, l, QuotientKind::Rough)?,
                normalized: normalized_upper(m, p, k, l)?,
                volume: vol.total,
                numeric_coexact: entry.eigenvalue,
                numeric_error: err,
                numeric_normalized: entry.eigenvalue * vol.eigenvalue_factor(m),
            })
        })
        .collect::<Result<_>>()?;

    let cert = profile.certificate.clone();
    let mut checks = vec![
        (
            "quotient equals k^2 pi^2 / L^2".to_string(),
            rows.iter()
                .all(|r| r.hodge_quotient.all_checks_pass() && r.rough_quotient.all_checks_pass()),
        ),
        (
            "normalized bound strictly decreasing".to_string(),
            strictly_decreasing(&rows.iter().map(|r| r.normalized.value).collect::<Vec<_>>()),
        ),
        (
            "numeric bound <= quotient + error".to_string(),
            rows.iter()
                .all(|r| r.numeric_coexact <= r.hodge_quotient.value + r.numeric_error),
        ),
        ("curvature certificate".to_string(), cert.passed()),
    ];
    if rows.len() > 1 {
        checks.push((
            "normalized numeric bound strictly decreasing".to_string(),
            strictly_decreasing(
                &rows
                    .iter()
                    .map(|r| r.numeric_normalized)
                    .collect::<Vec<_>>(),
            ),
        ));
    }

    let mut out = Vec::new();
    for r in &rows {
        let ps = params(&[
            ("m", m.to_string()),
            ("p", p.to_string()),
            ("k", k.to_string()),
            ("L", r.length.to_string()),
        ]);
        let row = |quantity: &str, value: f64, provenance: String| Row {
            command: config.command.clone(),
            params: ps.clone(),
            quantity: quantity.into(),
            value,
            provenance,
        };
        out.push(row(
            "hodge_quotient",
            r.hodge_quotient.value,
            "paper-formula".into(),
        ));
        out.push(row(
            "rough_quotient",
            r.rough_quotient.value,
            "paper-formula".into(),
        ));
        out.push(row(
            "normalized_upper",
            r.normalized.value,
            "paper-formula".into(),
        ));
        out.push(row("volume", r.volume, "closed-form".into()));
        out.push(row(
            "numeric_coexact_upper",
            r.numeric_coexact,
            numeric_provenance(config.grid, r.numeric_error),
        ));
        out.push(row(
            "numeric_normalized",
            r.numeric_normalized,
            numeric_provenance(config.grid, r.numeric_error),
        ));
    }
    let ps = params(&[
        ("m", m.to_string()),
        ("p", p.to_string()),
        ("k", k.to_string()),
    ]);
    out.push(Row {
        command: config.command.clone(),
        params: ps.clone(),
        quantity: "min_radial_curvature".into(),
        value: cert.min_radial_curvature,
        provenance: "closed-form".into(),
    });
    out.push(Row {
        command: config.command.clone(),
        params: ps,
        quantity: "min_tangential_curvature".into(),
        value: cert.min_tangential_curvature,
        provenance: "closed-form".into(),
    });

    #[derive(Serialize)]
    struct Body<'a> {
        rows: &'a [UpperRow],
        certificate: &'a crate::profiles::ConstraintCertificate,
    }
    emit(
        config,
        &out,
        &document(
            config,
            Body {
                rows: &rows,
                certificate: &cert,
            },
            &checks,
        ),
    )?;
    failed_checks(&checks)
}

pub fn cmd_verify_lower(config: &RunConfig) -> Result<()> {
    let (m, p, q) = (
        config.need(config.m, "m")?,
        config.need(config.p, "p")?,
        config.need(config.q, "q")?,
    );
    let lengths = config.need_lengths()?;
    let report: Theorem41Report = theorem41_report(m, p, q, &lengths, &config.caps)?;
    let mut checks = Vec::new();
    match &report.fit {
        LowerFit::Uniform { .. } => {
            checks.push((
                "bound independent of L".to_string(),
                report.summary.all_checks_pass(),
            ));
            checks.push((
                "normalized lower bound increasing".to_string(),
                strictly_increasing(
                    &report
                        .normalized
                        .iter()
                        .map(|r| r.value)
                        .collect::<Vec<_>>(),
                ),
            ));
        }
        LowerFit::Decaying { loglog_slope, .. } => {
            // The reciprocal sum is only dominated by its L² term for long cylinders.
            if lengths[0] >= 10.0 {
                checks.push((
                    "log-log slope within -2 +- 0.15".to_string(),
                    (-2.15..=-1.85).contains(loglog_slope),
                ));
            }
        }
    }

    let mut out = Vec::new();
    let provenance = report_provenance(&report.summary, "paper-formula");
    for (i, r) in report.per_length.iter().enumerate() {
        let ps = params(&[
            ("m", m.to_string()),
            ("p", p.to_string()),
            ("q", q.to_string()),
            ("L", lengths[i].to_string()),
        ]);
        let row = |quantity: &str, value: f64, provenance: String| Row {
            command: config.command.clone(),
            params: ps.clone(),
            quantity: quantity.into(),
            value,
            provenance,
        };
        out.push(row(
            "mcgowan_lower",
            r.value,
            report_provenance(r, "paper-formula"),
        ));
        out.push(row(
            "nu1_U2",
            r.get("nu[U2]").unwrap_or(f64::NAN),
            "closed-form".into(),
        ));
        out.push(row("n_q", report.n_q as f64, "closed-form".into()));
        if let Some(n) = report.normalized.get(i) {
            out.push(row(
                "normalized_lower",
                n.value,
                report_provenance(&report.summary, "paper-formula"),
            ));
        }
    }
    let ps = params(&[
        ("m", m.to_string()),
        ("p", p.to_string()),
        ("q", q.to_string()),
    ]);
    let mut summary = |quantity: &str, value: f64| {
        out.push(Row {
            command: config.command.clone(),
            params: ps.clone(),
            quantity: quantity.into(),
            value,
            provenance: provenance.clone(),
        })
    };
    match &report.fit {
        LowerFit::Uniform { c } => summary("C", *c),
        LowerFit::Decaying {
            c1,
            c2,
            max_relative_residual,
            loglog_slope,
        } => {
            summary("C1", *c1);
            summary("C2", *c2);
            summary("max_relative_residual", *max_relative_residual);
            summary("loglog_slope", *loglog_slope);
        }
    }
    summary("first_bounded_index", report.first_bounded_index as f64);

    emit(config, &out, &document(config, &report, &checks))?;
    failed_checks(&checks)
}

pub fn cmd_glue(config: &RunConfig) -> Result<()> {
    let m = config.need(config.m, "m")?;
    let k = config.k.unwrap_or(1);
    if config.eps.is_empty() {
        return Err(bad("`glue` needs --eps"));
    }
    if let Some(e) = config.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::domain(format!(
            "cut-off scale eps = {e} must lie in (0, 1)"
        )));
    }
    let mut eps = config.eps.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();

    #[derive(Serialize)]
    struct GlueRow {
        eps: f64,
        energy: BoundReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace: Option<BoundReport>,
    }
    let rows: Vec<GlueRow> = eps
        .par_iter()
        .map(|&e| -> Result<GlueRow> {
            let trace = if e <= 0.5 * bounds::TRACE_RADIUS {
                Some(trace_bound(m, e, 1.0, None)?)
            } else {
                None
            };
            Ok(GlueRow {
                eps: e,
                energy: cutoff_energy(m, e)?,
                trace,
            })
        })
        .collect::<Result<_>>()?;
    let budget = glue_budget(m, config.eta, config.summands, k)?;

    let checks = vec![
        (
            "cut-off energy decreasing as eps -> 0".to_string(),
            strictly_decreasing(&rows.iter().map(|r| r.energy.value).collect::<Vec<_>>()),
        ),
        (
            "trace model checks".to_string(),
            rows.iter()
                .filter_map(|r| r.trace.as_ref())
                .all(|t| t.all_checks_pass()),
        ),
    ];

    let mut out = Vec::new();
    for r in &rows {
        let ps = params(&[("m", m.to_string()), ("eps", r.eps.to_string())]);
        out.push(Row {
            command: config.command.clone(),
            params: ps.clone(),
            quantity: "cutoff_energy".into(),
            value: r.energy.value,
            provenance: "closed-form".into(),
        });
        if let Some(t) = &r.trace {
            out.push(Row {
                command: config.command.clone(),
                params: ps.clone(),
                quantity: "trace_bound_unit_norm".into(),
                value: t.value,
                provenance: "paper-formula".into(),
            });
            out.push(Row {
                command: config.command.clone(),
                params: ps,
                quantity: "trace_constant".into(),
                value: t.get("C").unwrap_or(f64::NAN),
                provenance: "numeric(N=10000, err=0)".into(),
            });
        }
    }
    let ps = params(&[
        ("m", m.to_string()),
        ("eta", config.eta.to_string()),
        ("summands", config.summands.to_string()),
        ("k", k.to_string()),
    ]);
    for (quantity, value) in [
        ("L_threshold", budget.get("L_threshold").unwrap_or(f64::NAN)),
        ("glue_budget", budget.value),
    ] {
        out.push(Row {
            command: config.command.clone(),
            params: ps.clone(),
            quantity: quantity.into(),
            value,
            provenance: "paper-formula".into(),
        });
    }

    #[derive(Serialize)]
    struct Body<'a> {
        rows: &'a [GlueRow],
        budget: &'a BoundReport,
    }
    emit(
        config,
        &out,
        &document(
            config,
            Body {
                rows: &rows,
                budget: &budget,
            },
            &checks,
        ),
    )?;
    failed_checks(&checks)
}

fn single_length(config: &RunConfig) -> Result<f64> {
    match config.need_lengths()?.as_slice() {
        [l] => Ok(*l),
        _ => Err(bad("`spectrum` takes a single --L value")),
    }
}

pub fn spectrum_table(config: &RunConfig) -> Result<SpectrumTable> {
    let m = config.need(config.m, "m")?;
    let p = config.need(config.p, "p")?;
    let profile = build_profile(BlendSpec {
        matching_order: config.blend_order,
    })?;
    match config.kind {
        SpectrumKind::WarpedFunction => {
            let metric = assemble_doubly_warped(m, p, single_length(config)?, &profile)?;
            warped_spectra::function_spectrum(&metric, config.modes, config.count, config.grid)
        }
        SpectrumKind::RoundFunction => {
            let metric = DoublyWarpedMetric::round_sphere(m, p)?;
            warped_spectra::function_spectrum(&metric, config.modes, config.count, config.grid)
        }
        SpectrumKind::CoexactUpper => {
            let metric = assemble_doubly_warped(m, p, single_length(config)?, &profile)?;
            warped_spectra::coexact_pform_upper(&metric, config.count, config.grid)
        }
        SpectrumKind::SurfaceOneform => {
            let metric = assemble_doubly_warped(m, p, single_length(config)?, &profile)?;
            warped_spectra::surface_oneform_spectrum(
                &metric,
                config.modes,
                config.count,
                config.grid,
            )
        }
        // `levels` counts exact and co-exact levels separately, so trim to `count` entries.
        SpectrumKind::SphereHodge => {
            Ok(closed_form::sphere_hodge_spectrum(m, p, config.count)?.truncate(config.count))
        }
        SpectrumKind::SphereRough => {
            let hodge = closed_form::sphere_hodge_spectrum(m, p, config.count)?;
            Ok(closed_form::rough_from_hodge_round(m, p, &hodge)?.truncate(config.count))
        }
    }
}

pub fn cmd_spectrum(config: &RunConfig) -> Result<()> {
    let table = spectrum_table(config)?;
    let mut buf = Vec::new();
    match config.format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => {
            buf = table.to_json()?.into_bytes();
            buf.push(b'\n');
        }
    }
    match &config.out {
        Some(path) => fs::write(path, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

pub fn cmd_profile(config: &RunConfig) -> Result<()> {
    let profile = build_profile(BlendSpec {
        matching_order: config.blend_order,
    })?;
    let doc = profile.document(config.points);
    let metric = match (config.m, config.p) {
        (Some(m), Some(p)) => {
            let l = config.lengths.first().copied().unwrap_or(0.0);
            Some(assemble_doubly_warped(m, p, l, &profile)?.document(config.points))
        }
        _ => None,
    };
    let mut out = Vec::new();
    let ps = params(&[("blend_order", config.blend_order.to_string())]);
    for (i, r) in doc.grid.iter().enumerate() {
        for (quantity, value) in [("f", doc.f[i]), ("df", doc.df[i]), ("d2f", doc.d2f[i])] {
            out.push(Row {
                command: config.command.clone(),
                params: format!("{ps};r={r}"),
                quantity: quantity.into(),
                value,
                provenance: "closed-form".into(),
            });
        }
    }
    let mut extras = BTreeMap::new();
    extras.insert("min_radial_curvature", doc.certificate.min_radial_curvature);
    extras.insert(
        "min_tangential_curvature",
        doc.certificate.min_tangential_curvature,
    );
    if let Some(md) = &metric {
        extras.insert("volume", md.volume.total);
        extras.insert("volume_slope_A", md.volume.slope);
        extras.insert("volume_intercept_B", md.volume.intercept);
    }
    for (quantity, value) in extras {
        out.push(Row {
            command: config.command.clone(),
            params: ps.clone(),
            quantity: quantity.into(),
            value,
            provenance: "closed-form".into(),
        });
    }

    #[derive(Serialize)]
    struct Body<'a> {
        profile: &'a crate::profiles::ProfileDocument,
        #[serde(skip_serializing_if = "Option::is_none")]
        metric: Option<&'a crate::profiles::MetricDocument>,
    }
    let checks = vec![(
        "curvature certificate".to_string(),
        doc.certificate.passed(),
    )];
    emit(
        config,
        &out,
        &document(
            config,
            Body {
                profile: &doc,
                metric: metric.as_ref(),
            },
            &checks,
        ),
    )?;
    failed_checks(&checks)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let config = RunConfig::resolve(&cli.command)?;
    match &cli.command {
        Command::VerifyUpper(_) => cmd_verify_upper(&config),
        Command::VerifyLower(_) => cmd_verify_lower(&config),
        Command::Glue(_) => cmd_glue(&config),
        Command::Spectrum(_) => cmd_spectrum(&config),
        Command::Profile(_) => cmd_profile(&config),
    }
}
