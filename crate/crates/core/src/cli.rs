//! The `qfi` command line: `find`, `verify`, `brackets` and `noether`.
//!
//! [`run`] never prints; it returns the exit code with the text meant for
//! stdout and stderr so the binary stays a thin wrapper.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::constraints::{solve_integral1, solve_integral2, Family, Potential, SolutionSpace};
use crate::dynamics::{drift_table, DriftConfig};
use crate::error::{Error, Result};
use crate::exponential::{solve_integral3, Integral3Result};
use crate::geometry::GeometryConfig;
use crate::named::{bracket_identities, involution_matrix, reference_set, Named};
use crate::phase::{functional_rank, is_first_integral, PhaseFunction};
use crate::qfi::{Qfi, QfiJson};
use crate::ring::format_rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_DRIFT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "qfi", version, about = "Quadratic first integrals of Newtonian systems on E2 and E3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for every QFI family of a potential.
    Find {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
        /// Comma-separated family numbers or `all`.
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate seeded trajectories and measure the drift of QFIs.
    Verify {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
        /// `auto` or a JSON file written by `find` or holding QFIs.
        #[arg(long, default_value = "auto")]
        qfi: String,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Poisson brackets, named identities and functional independence.
    Brackets {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
        /// `auto` for the reference set, or a JSON file of QFIs.
        #[arg(long, default_value = "auto")]
        set: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Read the gauged Noether generator off each QFI.
    Noether {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
        #[arg(long, default_value = "auto")]
        qfi: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stdout: String, stderr: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::PotentialForm(_) | Error::Json(_) | Error::Io(_) => EXIT_PARSE,
        Error::UnsupportedDimension(_) => EXIT_DIMENSION,
        _ => EXIT_VERIFICATION,
    }
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(EXIT_PARSE, String::new(), text)
            } else {
                Outcome::ok(text)
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(cmd: &Command) -> Outcome {
    let res = match cmd {
        Command::Find {
            dim,
            potential,
            families,
            format,
            out,
        } => cmd_find(*dim, potential, families, *format, out.as_deref()),
        Command::Verify {
            dim,
            potential,
            qfi,
            t_end,
            step,
            seeds,
            seed,
            tol,
        } => cmd_verify(
            *dim,
            potential,
            qfi,
            &DriftConfig {
                t_end: *t_end,
                step: *step,
                seeds: *seeds,
                seed: *seed,
            },
            *tol,
        ),
        Command::Brackets {
            dim,
            potential,
            set,
            seed,
        } => cmd_brackets(*dim, potential, set, *seed),
        Command::Noether {
            dim,
            potential,
            qfi,
            format,
        } => cmd_noether(*dim, potential, qfi, *format),
    };
    res.unwrap_or_else(|e| Outcome::fail(exit_code(&e), String::new(), format!("error: {e}\n")))
}

fn setup(dim: usize, potential: &str) -> Result<(GeometryConfig, Potential)> {
    let g = GeometryConfig::new(dim)?;
    let v = Potential::parse(dim, potential)?;
    Ok((g, v))
}

/// Which families to solve.
pub fn parse_families(s: &str) -> Result<Vec<Family>> {
    if s.trim() == "all" {
        return Ok(vec![Family::Integral1, Family::Integral2, Family::Integral3]);
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let f = match part.trim() {
            "1" => Family::Integral1,
            "2" => Family::Integral2,
            "3" => Family::Integral3,
            other => {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("unknown family {other:?}"),
                })
            }
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out.sort_by_key(|f| f.number());
    Ok(out)
}

/// Solver output for the requested families.
#[derive(Clone, Debug, Default)]
pub struct Discovery {
    pub integral1: Option<SolutionSpace>,
    pub integral2: Option<SolutionSpace>,
    pub integral3: Option<Integral3Result>,
}

impl Discovery {
    /// Every QFI found, linear integrals and both exponential signs included.
    pub fn all_qfis(&self) -> Vec<Qfi> {
        let mut out = Vec::new();
        for s in [&self.integral1, &self.integral2].into_iter().flatten() {
            out.extend(s.all_qfis());
        }
        if let Some(r) = &self.integral3 {
            out.extend(r.all_qfis());
        }
        out
    }
}

/// Runs the solvers and checks `dI/dt = 0` on every output; a failure is
/// reported as [`Error::Verification`].
pub fn discover(g: &GeometryConfig, v: &Potential, families: &[Family]) -> Result<Discovery> {
    let mut d = Discovery::default();
    for f in families {
        match f {
            Family::Integral1 => d.integral1 = Some(solve_integral1(g, v)?),
            Family::Integral2 => d.integral2 = Some(solve_integral2(g, v)?),
            Family::Integral3 => d.integral3 = Some(solve_integral3(g, v)?),
        }
    }
    for q in d.all_qfis() {
        if !is_first_integral(&q, v.expr())? {
            return Err(Error::Verification(format!("dI/dt != 0 for {q}")));
        }
    }
    Ok(d)
}

fn params_json(p: &[crate::ring::Rational]) -> Value {
    Value::Array(p.iter().map(|x| Value::String(format_rational(x))).collect())
}

fn entry(q: &Qfi, extra: &[(&str, Value)]) -> Value {
    let mut obj = serde_json::to_value(q.to_json_value()).expect("serializable");
    if let Value::Object(m) = &mut obj {
        for (k, x) in extra {
            m.insert((*k).to_string(), x.clone());
        }
    }
    obj
}

fn space_json(s: &SolutionSpace) -> Value {
    let mut qfis: Vec<Value> = s
        .basis
        .iter()
        .zip(&s.param_basis)
        .map(|(q, p)| entry(q, &[("params", params_json(p)), ("kind", json!("qfi"))]))
        .collect();
    qfis.extend(
        s.lfis
            .iter()
            .zip(&s.lfi_params)
            .map(|(q, p)| entry(q, &[("params", params_json(p)), ("kind", json!("lfi"))])),
    );
    json!({
        "family": s.family.number(),
        "dimension": s.dimension(),
        "unknowns": s.system.unknown_labels,
        "qfis": qfis,
    })
}

fn integral3_json(r: &Integral3Result) -> Value {
    let mut qfis = Vec::new();
    let mut rates = Vec::new();
    for s in &r.solutions {
        rates.push(json!({"mu": format_rational(&s.mu), "dimension": s.l_params.len()}));
        for (i, p) in s.l_params.iter().enumerate() {
            for q in &s.qfis[2 * i..2 * i + 2] {
                qfis.push(entry(
                    q,
                    &[("params", params_json(p)), ("mu", json!(format_rational(&s.mu)))],
                ));
            }
        }
    }
    let irrational: Vec<Value> = r
        .irrational
        .iter()
        .map(|x| json!({"mu_approx": x.mu_approx, "sigma_min": x.sigma_min}))
        .collect();
    json!({
        "family": 3,
        "dimension": r.solutions.iter().map(|s| s.l_params.len()).sum::<usize>(),
        "rates": rates,
        "irrational_rates": irrational,
        "qfis": qfis,
    })
}

fn find_json(v: &Potential, d: &Discovery) -> Value {
    let mut fams = Vec::new();
    if let Some(s) = &d.integral1 {
        fams.push(space_json(s));
    }
    if let Some(s) = &d.integral2 {
        fams.push(space_json(s));
    }
    if let Some(r) = &d.integral3 {
        fams.push(integral3_json(r));
    }
    json!({
        "dim": v.dim(),
        "potential": v.expr().to_string(),
        "families": fams,
    })
}

fn find_text(v: &Potential, d: &Discovery) -> String {
    let mut out = format!("V = {}  (dim {})\n", v.expr(), v.dim());
    for s in [&d.integral1, &d.integral2].into_iter().flatten() {
        out.push_str(&format!(
            "\nIntegral {}: dimension {}\n",
            s.family.number(),
            s.dimension()
        ));
        for (i, q) in s.basis.iter().enumerate() {
            out.push_str(&format!("  [{}] {}\n", i + 1, q));
        }
        if !s.lfis.is_empty() {
            out.push_str(&format!("  linear integrals: {}\n", s.lfis.len()));
            for (i, q) in s.lfis.iter().enumerate() {
                out.push_str(&format!("  (L{}) {}\n", i + 1, q));
            }
        }
    }
    if let Some(r) = &d.integral3 {
        let total: usize = r.solutions.iter().map(|s| s.l_params.len()).sum();
        out.push_str(&format!("\nIntegral 3: dimension {total}\n"));
        for s in &r.solutions {
            out.push_str(&format!(
                "  mu = lambda^2 = {}: dimension {}\n",
                format_rational(&s.mu),
                s.l_params.len()
            ));
            for (i, q) in s.qfis.iter().enumerate() {
                out.push_str(&format!("  [{}{}] {}\n", i / 2 + 1, if i % 2 == 0 { "+" } else { "-" }, q));
            }
        }
        for x in &r.irrational {
            out.push_str(&format!(
                "  irrational critical mu ~ {:.12} (sigma_min {:.3e}), not expanded\n",
                x.mu_approx, x.sigma_min
            ));
        }
    }
    out
}

pub fn cmd_find(
    dim: usize,
    potential: &str,
    families: &str,
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<Outcome> {
    let (g, v) = setup(dim, potential)?;
    let fams = parse_families(families)?;
    let d = discover(&g, &v, &fams)?;
    let report = match format {
        Format::Text => find_text(&v, &d),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&find_json(&v, &d))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, &report)?;
            Ok(Outcome {
                code: EXIT_OK,
                stdout: String::new(),
                stderr: format!("wrote {}\n", path.display()),
            })
        }
        None => Ok(Outcome::ok(report)),
    }
}

/// Reads QFIs from a single QFI object, an array of them, or a `find`
/// report.
pub fn load_qfis(text: &str) -> Result<Vec<Qfi>> {
    let doc: Value = serde_json::from_str(text)?;
    let mut docs = Vec::new();
    collect_docs(&doc, &mut docs);
    if docs.is_empty() && !matches!(&doc, Value::Array(a) if a.is_empty()) {
        return Err(Error::Json("no QFIs found in document".into()));
    }
    docs.into_iter()
        .map(|d| {
            let parsed: QfiJson = serde_json::from_value(d.clone())?;
            Qfi::from_json_value(&parsed)
        })
        .collect()
}

fn collect_docs<'a>(doc: &'a Value, out: &mut Vec<&'a Value>) {
    match doc {
        Value::Array(items) => items.iter().for_each(|x| collect_docs(x, out)),
        Value::Object(m) if m.contains_key("terms") => out.push(doc),
        Value::Object(m) => {
            if let Some(f) = m.get("families") {
                collect_docs(f, out);
            } else if let Some(q) = m.get("qfis") {
                collect_docs(q, out);
            }
        }
        _ => {}
    }
}

fn source_qfis(g: &GeometryConfig, v: &Potential, source: &str) -> Result<Vec<Qfi>> {
    if source == "auto" {
        let all = [Family::Integral1, Family::Integral2, Family::Integral3];
        return Ok(discover(g, v, &all)?.all_qfis());
    }
    let qs = load_qfis(&std::fs::read_to_string(source)?)?;
    for q in &qs {
        if q.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: v.dim(),
                right: q.dim(),
            });
        }
    }
    Ok(qs)
}

pub fn cmd_verify(dim: usize, potential: &str, source: &str, cfg: &DriftConfig, tol: f64) -> Result<Outcome> {
    let (g, v) = setup(dim, potential)?;
    let qfis = source_qfis(&g, &v, source)?;
    let table = drift_table(&v, &qfis, cfg)?;
    let mut out = format!(
        "V = {}  (dim {}), {} QFIs, {} initial conditions, t_end {}, step {}, seed {}\n",
        v.expr(),
        v.dim(),
        qfis.len(),
        cfg.seeds,
        cfg.t_end,
        cfg.step,
        cfg.seed
    );
    for (j, (q0, v0)) in table.initial_conditions.iter().enumerate() {
        out.push_str(&format!(
            "ic {j}: q0 = {q0:.6?}, v0 = {v0:.6?}{}\n",
            if table.aborted[j] { " (aborted near r = 0)" } else { "" }
        ));
    }
    let mut failures = 0;
    for (i, q) in qfis.iter().enumerate() {
        let worst = table.max_for(i);
        let ok = worst < tol;
        if !ok {
            failures += 1;
        }
        out.push_str(&format!(
            "[{}] {} max drift {:.3e}  {}\n",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            worst,
            q
        ));
        let cells: Vec<String> = table.rows[i].iter().map(|d| format!("{:.2e}", d.worst())).collect();
        out.push_str(&format!("     per ic: {}\n", cells.join(" ")));
    }
    out.push_str(&format!(
        "max drift {:.3e}, tolerance {:.1e}, {} of {} QFIs failed\n",
        table.max_drift(),
        tol,
        failures,
        qfis.len()
    ));
    if failures > 0 {
        Ok(Outcome::fail(
            EXIT_DRIFT,
            out,
            format!("drift exceeded tolerance for {failures} QFIs\n"),
        ))
    } else {
        Ok(Outcome::ok(out))
    }
}

pub fn cmd_brackets(dim: usize, potential: &str, set: &str, seed: u64) -> Result<Outcome> {
    let (_, v) = setup(dim, potential)?;
    let items: Vec<Named> = if set == "auto" {
        reference_set(&v)
    } else {
        load_qfis(&std::fs::read_to_string(set)?)?
            .into_iter()
            .enumerate()
            .map(|(i, qfi)| Named {
                name: format!("Q{}", i + 1),
                qfi,
            })
            .collect()
    };
    let fs: Vec<PhaseFunction> = items
        .iter()
        .map(|n| PhaseFunction::from_qfi(&n.qfi))
        .collect::<Result<_>>()?;
    let mut out = format!("V = {}  (dim {})\n", v.expr(), v.dim());
    for n in &items {
        out.push_str(&format!("{} = {}\n", n.name, n.qfi));
    }
    if !fs.is_empty() {
        let m = involution_matrix(&fs)?;
        out.push_str("involution ({f_i, f_j} = 0):\n");
        let names: Vec<&str> = items.iter().map(|n| n.name.as_str()).collect();
        out.push_str(&format!("      {}\n", names.iter().map(|s| format!("{s:>4}")).collect::<String>()));
        for (name, row) in names.iter().zip(&m) {
            let cells: String = row.iter().map(|&b| format!("{:>4}", if b { "1" } else { "0" })).collect();
            out.push_str(&format!("  {name:>4}{cells}\n"));
        }
    }
    let mut failed = 0;
    if set == "auto" {
        for id in bracket_identities(&v)? {
            if !id.holds {
                failed += 1;
            }
            out.push_str(&format!("{:<5} {}\n", if id.holds { "true" } else { "false" }, id.name));
        }
    }
    let rank = functional_rank(&fs, 20, seed)?;
    out.push_str(&format!("functional rank {rank} of {} (seed {seed})\n", fs.len()));
    if failed > 0 {
        return Ok(Outcome::fail(
            EXIT_VERIFICATION,
            out,
            format!("{failed} bracket identities failed\n"),
        ));
    }
    Ok(Outcome::ok(out))
}

pub fn cmd_noether(dim: usize, potential: &str, source: &str, format: Format) -> Result<Outcome> {
    let (g, v) = setup(dim, potential)?;
    let qfis = source_qfis(&g, &v, source)?;
    let mut text = String::new();
    let mut docs = Vec::new();
    for (i, q) in qfis.iter().enumerate() {
        let gen = q.noether_generator();
        if gen.to_qfi() != *q {
            return Err(Error::Verification(format!("generator of {q} does not reproduce it")));
        }
        let lines = gen.display_lines();
        text.push_str(&format!("[{}] I = {}\n", i + 1, q));
        for l in &lines {
            text.push_str(&format!("    {l}\n"));
        }
        docs.push(json!({"qfi": q.to_json_value(), "generator": lines}));
    }
    let report = match format {
        Format::Text => text,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Array(docs))?;
            s.push('\n');
            s
        }
    };
    Ok(Outcome::ok(report))
}
