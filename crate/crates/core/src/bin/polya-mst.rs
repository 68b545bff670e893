use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polya_mst::models::{
    build_model, lemma_root_check, oneprotected_urn, protected_urn_capped, spectral_condition,
    LemmaReport, ModelBundle, ModelKind, DEFAULT_SIGMA_CAP, DEFAULT_SPECTRUM_CAP,
};
use polya_mst::ratlinalg::{
    format_rational, numeric_eigen, to_f64, MatrixValue, RatMatrix, Rational, Scalar,
    EXACT_LYAPUNOV_CAP,
};
use polya_mst::simulate::{
    exact_small_n, run_mc, urn_functional, McConfig, SimMode, SimStats, Statistic, CSV_HEADER,
};
use polya_mst::urn::{
    asymptotics_dual_basis, asymptotics_integral, build_matrix_a, build_matrix_a_float,
    classify_regime, eigen_data, functional_law, mean_vector, spectral, AsymptoticLaw, Eigenvalue,
    Regime, EXACT_SPECTRUM_CAP,
};
use polya_mst::verify::{run_ledger, Status};
use polya_mst::{Error, Result};

/// Largest arity for which `spectral` runs the exact root-containment check.
const LEMMA_CAP: usize = 4;
/// Largest arity `types` lists by default; no matrix is formed.
const TYPES_CAP: usize = 10;

#[derive(Parser)]
#[command(
    name = "polya-mst",
    version,
    about = "Pólya urn laws for fringe statistics of random m-ary search trees"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Tree arity.
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true, default_value = "protected")]
    model: ModelKind,
    #[arg(long, global = true, value_enum, default_value_t = Out::Pretty)]
    out: Out,
    #[arg(long, global = true, value_enum, default_value_t = Precision::Exact)]
    precision: Precision,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Arity cap of the protected urn (defaults: 10 to list types, 8 for spectra, 6 for covariances).
    #[arg(long, global = true)]
    cap_override: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Tree,
    Urn,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Lyapunov,
    DualBasis,
}

#[derive(Subcommand)]
enum Command {
    /// List the ball types of a model.
    Types,
    /// Spectrum, limit mean and covariance, and functional laws.
    Analyze {
        /// Functional to report; repeatable. Defaults to all of the model's functionals.
        #[arg(long)]
        functional: Vec<String>,
        #[arg(long, value_enum, default_value_t = Route::Lyapunov)]
        method: Route,
    },
    /// Monte Carlo estimates, with theoretical values where available.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Statistic to record; repeatable. Defaults to all tree statistics, or the model's functionals in urn mode.
        #[arg(long)]
        stat: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Tree)]
        mode: Mode,
    },
    /// Eigenvalues, the spectral-gap verdict and the root-containment check.
    Spectral,
    /// Recompute every published constant and compare exactly.
    Verify,
    /// Exact small-n distribution by exhaustive enumeration.
    Oracle {
        /// Largest number of keys.
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "two_protected")]
        stat: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { output, error }) => {
            print!("{output}");
            eprintln!("error: {error}");
            if let Error::Regime { .. } = error {
                eprintln!("hint: the limit law is not normal; `analyze` still reports the spectrum and mean");
            }
            ExitCode::from(error.exit_code() as u8)
        }
    }
}

/// An error, with whatever output was produced before it.
struct Failure {
    output: String,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Self {
            output: String::new(),
            error,
        }
    }
}

fn run(cli: &Cli) -> std::result::Result<String, Failure> {
    let g = &cli.global;
    let f = Fmt {
        exact: g.precision == Precision::Exact,
        out: g.out,
    };
    Ok(match &cli.command {
        Command::Types => cmd_types(g, &f)?,
        Command::Analyze { functional, method } => cmd_analyze(g, &f, functional, *method)?,
        Command::Simulate {
            n,
            trials,
            stat,
            mode,
        } => cmd_simulate(g, &f, *n, *trials, stat, *mode)?,
        Command::Spectral => cmd_spectral(g, &f)?,
        Command::Verify => return cmd_verify(&f),
        Command::Oracle { n, stat } => cmd_oracle(g, &f, *n, stat)?,
    })
}

fn arity(g: &Global) -> Result<usize> {
    g.m.ok_or_else(|| Error::Spec("--m is required".into()))
}

fn model(g: &Global, cap: usize) -> Result<ModelBundle> {
    let m = arity(g)?;
    match g.model {
        ModelKind::Protected => protected_urn_capped(m, g.cap_override.unwrap_or(cap)),
        kind => build_model(kind, m),
    }
}

struct Fmt {
    exact: bool,
    out: Out,
}

impl Fmt {
    fn num(&self, x: &Rational) -> Value {
        if self.exact {
            Value::String(format_rational(x))
        } else {
            json!(to_f64(x))
        }
    }

    fn scalar(&self, x: &Scalar) -> Value {
        match x {
            Scalar::Exact(r) => self.num(r),
            Scalar::Float(v) => json!(v),
        }
    }

    fn vec(&self, v: &[Rational]) -> Value {
        Value::Array(v.iter().map(|x| self.num(x)).collect())
    }

    fn mat(&self, m: &RatMatrix) -> Value {
        Value::Array((0..m.rows()).map(|i| self.vec(m.row(i))).collect())
    }

    fn matval(&self, m: &MatrixValue) -> Value {
        match m {
            MatrixValue::Exact(r) => self.mat(r),
            MatrixValue::Float(x) => {
                json!((0..x.rows()).map(|i| x.row(i).to_vec()).collect::<Vec<_>>())
            }
        }
    }

    fn text(&self, x: &Rational) -> String {
        if self.exact {
            format_rational(x)
        } else {
            to_f64(x).to_string()
        }
    }

    fn text_scalar(&self, x: &Scalar) -> String {
        match x {
            Scalar::Exact(r) => self.text(r),
            Scalar::Float(v) => v.to_string(),
        }
    }

    fn text_vec(&self, v: &[Rational]) -> String {
        let parts: Vec<String> = v.iter().map(|x| self.text(x)).collect();
        format!("({})", parts.join(", "))
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Left-aligned columns.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut s = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(s, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    s
}

fn render(
    f: &Fmt,
    json: Value,
    header: &[&str],
    rows: &[Vec<String>],
    pretty: impl FnOnce() -> String,
) -> String {
    match f.out {
        Out::Json => to_json(&json),
        Out::Csv => csv(header, rows),
        Out::Pretty => pretty(),
    }
}

fn cmd_types(g: &Global, f: &Fmt) -> Result<String> {
    let b = model(g, TYPES_CAP)?;
    let acts = b.spec.activities();
    let (header, rows, items): (Vec<&str>, Vec<Vec<String>>, Vec<Value>) = match &b.types {
        Some(types) => {
            let rows = types
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    vec![
                        (i + 1).to_string(),
                        t.to_string(),
                        t.activity().to_string(),
                        t.protected().to_string(),
                        t.leaf_count().to_string(),
                    ]
                })
                .collect();
            let items = types
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    json!({"index": i + 1, "type": t.k, "activity": t.activity(),
                           "protected": t.protected(), "leaves": t.leaf_count()})
                })
                .collect();
            (
                vec!["index", "type", "activity", "protected", "leaves"],
                rows,
                items,
            )
        }
        None => {
            let labels = b.spec.labels();
            let rows = labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    vec![
                        (i + 1).to_string(),
                        l.clone(),
                        f.text(&acts[i]),
                        b.spec.group_size(i).to_string(),
                    ]
                })
                .collect();
            let items = labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    json!({"index": i + 1, "type": l, "activity": f.num(&acts[i]), "group_size": b.spec.group_size(i)})
                })
                .collect();
            (vec!["index", "type", "activity", "group_size"], rows, items)
        }
    };
    let doc = json!({"model": b.model.to_string(), "m": b.m, "count": b.q(), "types": items});
    Ok(render(f, doc, &header, &rows, || table(&header, &rows)))
}

fn cmd_analyze(g: &Global, f: &Fmt, functionals: &[String], route: Route) -> Result<String> {
    let b = model(g, DEFAULT_SIGMA_CAP)?;
    let q = b.q();
    if f.exact && q > EXACT_LYAPUNOV_CAP {
        // Rational v1 is still exact, but Σ would only be available in floating point.
        return Err(Error::Size(format!(
            "{} types exceed the exact covariance cap of {EXACT_LYAPUNOV_CAP}; rerun with --precision float",
            q
        )));
    }
    let names: Vec<String> = if functionals.is_empty() {
        b.functionals.keys().cloned().collect()
    } else {
        functionals.to_vec()
    };
    let cs = names
        .iter()
        .map(|n| urn_functional(&b, n))
        .collect::<Result<Vec<_>>>()?;

    let sd = spectral(&b.spec)?;
    let regime = classify_regime(&sd);
    let mu = mean_vector(&sd);
    let law: Option<AsymptoticLaw> = if regime == Regime::Normal {
        Some(match route {
            Route::Lyapunov => asymptotics_integral(&b.spec, &sd)?,
            Route::DualBasis => asymptotics_dual_basis(&b.spec, &sd)?,
        })
    } else {
        None
    };
    let laws: Vec<(Rational, Option<Scalar>)> = cs
        .iter()
        .map(|c| match &law {
            Some(l) => functional_law(l, c).map(|fl| (fl.mean, Some(fl.variance))),
            None => Ok((polya_mst::ratlinalg::dot(c, &mu), None)),
        })
        .collect::<Result<_>>()?;

    let warning = (regime != Regime::Normal).then(|| {
        format!(
            "regime is {regime}: the largest non-Perron eigenvalue has real part {} >= λ1/2, so there is no normal limit and no covariance",
            sd.lambda2_re().unwrap_or(f64::NAN)
        )
    });
    let fl_json: Vec<Value> = names
        .iter()
        .zip(&laws)
        .map(|(n, (mean, var))| json!({"name": n, "mean": f.num(mean), "variance": var.as_ref().map(|v| f.scalar(v))}))
        .collect();
    let doc = json!({
        "model": b.model.to_string(),
        "m": b.m,
        "q": q,
        "labels": b.sidecar().type_labels,
        "regime": regime,
        "warning": warning,
        "A": f.mat(&sd.a),
        "lambda1": f.num(&sd.lambda1),
        "eigenvalues": sd.eigenvalues,
        "diagonalizable": sd.diagonalizable,
        "v1": f.vec(&sd.v1),
        "u1": f.vec(&sd.u1),
        "mu": f.vec(&mu),
        "method": law.as_ref().map(|l| l.method),
        "sigma": law.as_ref().map(|l| f.matval(&l.sigma)),
        "functionals": fl_json,
    });
    let header = ["functional", "mean", "variance", "regime"];
    let rows: Vec<Vec<String>> = names
        .iter()
        .zip(&laws)
        .map(|(n, (mean, var))| {
            vec![
                n.clone(),
                f.text(mean),
                var.as_ref().map_or_else(String::new, |v| f.text_scalar(v)),
                regime.to_string(),
            ]
        })
        .collect();
    Ok(render(f, doc, &header, &rows, || {
        let mut s = String::new();
        if let Some(w) = &warning {
            let _ = writeln!(s, "*** NOT NORMAL ***\n{w}\n");
        }
        let _ = writeln!(s, "model        {}", b.model);
        let _ = writeln!(s, "m            {}", b.m);
        let _ = writeln!(s, "types        {q}");
        let _ = writeln!(s, "regime       {regime}");
        let eig: Vec<String> = sd.eigenvalues.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "eigenvalues  {}", eig.join(", "));
        let _ = writeln!(s, "v1           {}", f.text_vec(&sd.v1));
        let _ = writeln!(s, "u1           {}", f.text_vec(&sd.u1));
        let _ = writeln!(s, "mu           {}", f.text_vec(&mu));
        if let Some(l) = &law {
            if q <= 12 {
                let _ = writeln!(s, "sigma");
                for i in 0..q {
                    let row: Vec<String> =
                        (0..q).map(|j| f.text_scalar(&l.sigma.get(i, j))).collect();
                    let _ = writeln!(s, "  {}", row.join("  "));
                }
            } else {
                let _ = writeln!(s, "sigma        {q}x{q}, see --out json");
            }
        }
        s.push('\n');
        s + &table(
            &header[..3],
            &rows.iter().map(|r| r[..3].to_vec()).collect::<Vec<_>>(),
        )
    }))
}

/// Per-key limit `(μ, σ²)` of a statistic, when the model's law is normal.
fn theory(
    g: &Global,
    stat: &str,
    mode: Mode,
    urn: Option<&ModelBundle>,
) -> Option<(Rational, Scalar)> {
    let owned;
    let (bundle, name) = match (mode, urn) {
        (Mode::Urn, Some(b)) => (b, stat),
        _ => {
            let m = g.m?;
            owned = match Statistic::parse(stat).ok()? {
                Statistic::TwoProtected => {
                    protected_urn_capped(m, g.cap_override.unwrap_or(DEFAULT_SIGMA_CAP)).ok()?
                }
                _ => oneprotected_urn(m).ok()?,
            };
            (&owned, stat)
        }
    };
    if bundle.q() > EXACT_LYAPUNOV_CAP && g.precision == Precision::Exact {
        return None;
    }
    let c = urn_functional(bundle, name).ok()?;
    let sd = spectral(&bundle.spec).ok()?;
    let law = asymptotics_integral(&bundle.spec, &sd).ok()?;
    let fl = functional_law(&law, c).ok()?;
    Some((fl.mean, fl.variance))
}

fn cmd_simulate(
    g: &Global,
    f: &Fmt,
    n: u64,
    trials: u64,
    stat: &[String],
    mode: Mode,
) -> Result<String> {
    let m = arity(g)?;
    let urn = match mode {
        Mode::Urn => Some(model(g, DEFAULT_SPECTRUM_CAP)?),
        Mode::Tree => None,
    };
    let statistics: Vec<String> = match (&urn, stat.is_empty()) {
        (_, false) => stat.to_vec(),
        (Some(b), true) => b.functionals.keys().cloned().collect(),
        (None, true) => Statistic::ALL
            .iter()
            .map(|s| s.name().to_string())
            .collect(),
    };
    let sim_mode = urn
        .clone()
        .map_or(SimMode::Tree, |b| SimMode::Urn(Box::new(b)));
    let cfg = McConfig {
        m,
        n,
        trials,
        seed: g.seed,
        statistics,
        keep_samples: false,
    };
    let results = run_mc(&sim_mode, &cfg)?;

    struct Row {
        s: SimStats,
        th: Option<(Rational, Scalar, f64, f64)>,
    }
    let rows: Vec<Row> = results
        .into_iter()
        .map(|s| {
            let th = theory(g, &s.statistic, mode, urn.as_ref()).map(|(mu, var)| {
                let nf = n as f64;
                let z = (s.mean() - to_f64(&mu) * nf) / s.std_error();
                let ratio = s.variance() / (var.to_f64() * nf);
                (mu, var, z, ratio)
            });
            Row { s, th }
        })
        .collect();

    let items: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(&r.s).expect("stats serialize");
            v["mean"] = json!(r.s.mean());
            v["variance"] = json!(r.s.variance());
            v["std_error"] = json!(r.s.std_error());
            v["skewness"] = json!(r.s.moments.skewness());
            v["excess_kurtosis"] = json!(r.s.moments.excess_kurtosis());
            v["theory"] = match &r.th {
                Some((mu, var, z, ratio)) => {
                    json!({"mu": f.num(mu), "sigma2": f.scalar(var), "z_mean": z, "variance_ratio": ratio})
                }
                None => Value::Null,
            };
            v
        })
        .collect();
    let header: Vec<&str> = CSV_HEADER
        .split(',')
        .chain(["mu", "sigma2", "z_mean", "variance_ratio"])
        .collect();
    let table_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut cells: Vec<String> = r.s.csv_row().split(',').map(str::to_string).collect();
            match &r.th {
                Some((mu, var, z, ratio)) => cells.extend([
                    f.text(mu),
                    f.text_scalar(var),
                    z.to_string(),
                    ratio.to_string(),
                ]),
                None => cells.extend(std::iter::repeat_n(String::new(), 4)),
            }
            cells
        })
        .collect();
    let doc = json!({"mode": if urn.is_some() { "urn" } else { "tree" }, "results": items});
    Ok(render(f, doc, &header, &table_rows, || {
        table(&header, &table_rows)
    }))
}

fn lemma_json(r: &LemmaReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

fn cmd_spectral(g: &Global, f: &Fmt) -> Result<String> {
    let b = model(g, DEFAULT_SPECTRUM_CAP)?;
    let eigenvalues: Vec<Eigenvalue> = if b.q() <= EXACT_SPECTRUM_CAP {
        eigen_data(&build_matrix_a(&b.spec))?.0
    } else {
        let eig = numeric_eigen(&build_matrix_a_float(&b.spec)).map_err(Error::Linalg)?;
        eig.into_iter()
            .map(|value| Eigenvalue { value, exact: None })
            .collect()
    };
    let lambda1 = eigenvalues[0].re();
    let lambda2_re = eigenvalues.get(1).map(|e| e.re());
    let below_half = lambda2_re.is_none_or(|r| r < lambda1 / 2.0);
    let cond = if b.m >= 2 {
        Some(spectral_condition(b.m)?)
    } else {
        None
    };
    let lemma_cap = g.cap_override.unwrap_or(LEMMA_CAP);
    let lemma = (b.model == ModelKind::Protected && b.m <= lemma_cap)
        .then(|| lemma_root_check(&b))
        .transpose()?;

    let doc = json!({
        "model": b.model.to_string(),
        "m": b.m,
        "q": b.q(),
        "eigenvalues": eigenvalues,
        "lambda2_re": lambda2_re,
        "non_perron_below_half": below_half,
        "condition": cond,
        "root_containment": lemma.as_ref().map(lemma_json),
    });
    let header = ["index", "re", "im", "exact"];
    let rows: Vec<Vec<String>> = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, e)| {
            vec![
                (i + 1).to_string(),
                e.re().to_string(),
                e.value.im().to_string(),
                e.exact.as_ref().map_or_else(String::new, |r| f.text(r)),
            ]
        })
        .collect();
    Ok(render(f, doc, &header, &rows, || {
        let mut s = String::new();
        let _ = writeln!(s, "model               {}", b.model);
        let _ = writeln!(s, "m                   {}", b.m);
        let _ = writeln!(s, "types               {}", b.q());
        let _ = writeln!(
            s,
            "Re lambda2          {}",
            lambda2_re.map_or("none".into(), |r| r.to_string())
        );
        let _ = writeln!(s, "non-Perron < 1/2    {below_half}");
        if let Some(c) = &cond {
            let verdict = if c.holds { "holds" } else { "fails" };
            let _ = writeln!(
                s,
                "phi_m condition     {verdict} (Re lambda2 = {})",
                c.lambda2_re.unwrap_or(f64::NAN)
            );
        }
        match &lemma {
            Some(l) => {
                let _ = writeln!(s, "T A = A_W T         {}", l.identity_holds);
                for fc in &l.factors {
                    let _ = writeln!(
                        s,
                        "  root factor {}: {}",
                        fc.factor,
                        if fc.contained {
                            "contained"
                        } else {
                            "NOT contained"
                        }
                    );
                }
            }
            None if b.model == ModelKind::Protected => {
                let _ = writeln!(s, "root containment    skipped above m = {lemma_cap}");
            }
            None => {}
        }
        s.push('\n');
        s + &table(&header, &rows)
    }))
}

fn cmd_verify(f: &Fmt) -> std::result::Result<String, Failure> {
    let t = Instant::now();
    let report = run_ledger()?;
    eprintln!(
        "ledger: {} entries in {:.2?}",
        report.entries.len(),
        t.elapsed()
    );
    let header = ["id", "status", "computed_by", "detail"];
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| {
            let st = if e.status == Status::Pass {
                "pass"
            } else {
                "FAIL"
            };
            vec![
                e.id.clone(),
                st.into(),
                e.computed_by.clone(),
                e.detail.clone(),
            ]
        })
        .collect();
    let doc = json!({"passed": report.passed(), "entries": report.entries});
    let output = render(f, doc, &header, &rows, || {
        let mut s = String::new();
        for e in &report.entries {
            let st = if e.status == Status::Pass {
                "pass"
            } else {
                "FAIL"
            };
            let _ = writeln!(s, "{st}  {:<40} {}", e.id, e.description);
            if e.status == Status::Fail {
                let _ = writeln!(s, "      {}", e.detail);
            }
        }
        let failed = report.failures().count();
        let _ = writeln!(
            s,
            "\n{} of {} entries pass",
            report.entries.len() - failed,
            report.entries.len()
        );
        s
    });
    if report.passed() {
        Ok(output)
    } else {
        let ids: Vec<&str> = report.failures().map(|e| e.id.as_str()).collect();
        Err(Failure {
            output,
            error: Error::Verification(format!("ledger entries failed: {}", ids.join(", "))),
        })
    }
}

fn cmd_oracle(g: &Global, f: &Fmt, n: u64, stat: &str) -> Result<String> {
    let m = arity(g)?;
    let s = Statistic::parse(stat)?;
    let dists = exact_small_n(m, n, s)?;
    let header = ["n", "value", "probability"];
    let rows: Vec<Vec<String>> = dists
        .iter()
        .flat_map(|d| {
            d.pmf
                .iter()
                .map(move |(v, p)| vec![d.n.to_string(), v.to_string(), f.text(p)])
        })
        .collect();
    let items: Vec<Value> = dists
        .iter()
        .map(|d| {
            let pmf: serde_json::Map<String, Value> = d
                .pmf
                .iter()
                .map(|(v, p)| (v.to_string(), f.num(p)))
                .collect();
            json!({"n": d.n, "mean": f.num(&d.mean()), "pmf": pmf})
        })
        .collect();
    let doc = json!({"m": m, "statistic": s.name(), "laws": items});
    Ok(render(f, doc, &header, &rows, || {
        let mut out = String::new();
        for d in &dists {
            let atoms: Vec<String> = d
                .pmf
                .iter()
                .map(|(v, p)| format!("{v}: {}", f.text(p)))
                .collect();
            let _ = writeln!(
                out,
                "n = {:<2} mean {:<12} {}",
                d.n,
                f.text(&d.mean()),
                atoms.join(", ")
            );
        }
        out
    }))
}
