//! `wasep`: command-line access to the WASEP spectral-gap numerics.

mod cache;
mod checks;
mod codec;
mod error;
mod output;

use cache::Cache;
use clap::{Parser, Subcommand, ValueEnum};
use codec::{BetheEntry, EdgeEntry, SeriesEntry};
use error::CliError;
use output::Doc;
use rug::{Complex, Float};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use wasep::bethe_finite::{self, BetheRootSet};
use wasep::edge::{self, EdgeRootSet};
use wasep::scaling::{self, FiniteSizeData, Quantity, ScalingTable};
use wasep::series::ExactCoeff;
use wasep::PrecisionContext;

#[derive(Parser, Debug)]
#[command(name = "wasep", version, about = "Spectral gap of the weakly asymmetric exclusion process")]
struct Cli {
    /// Significant decimal digits of the working precision and of printed numbers (>= 20).
    #[arg(long, global = true, default_value_t = 100)]
    digits: u32,
    /// Upper bound on concurrent independent solves.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Cache directory; overrides the WASEP_CACHE_DIR environment variable.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// No progress or warnings on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gap of the Markov generator by brute force (L <= 16).
    Oracle {
        #[arg(long = "L")]
        l: usize,
        /// Particle number; defaults to L/2.
        #[arg(long = "N")]
        n: Option<usize>,
        /// Backward hopping rate.
        #[arg(long, conflicts_with = "mu", required_unless_present = "mu")]
        q: Option<String>,
        /// Asymmetry, with q = 1 - mu/sqrt(L).
        #[arg(long)]
        mu: Option<String>,
    },
    /// Gap eigenvalue from the Bethe equations for every (L, mu) pair.
    GapFinite {
        #[arg(long = "L", value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        mu: Vec<String>,
        /// Also emit the Bethe roots.
        #[arg(long)]
        roots: bool,
    },
    /// Zeroes of 1 + erf(w/(2 sqrt 2)) in the upper half plane.
    ErfZeros {
        #[arg(long, default_value_t = 64)]
        count: usize,
    },
    /// Edge Bethe roots w_j(mu), |j| <= M; mu may be 0 or inf.
    EdgeRoots {
        #[arg(long)]
        mu: String,
        #[arg(long = "M", default_value_t = 64)]
        m: usize,
        /// Refuse if the tail error estimate exceeds this.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Consistency checks of the mu = 0 and mu = infinity edge problems.
    EdgeChecks {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Number of erf zeroes used.
        #[arg(long, default_value_t = 64)]
        count: usize,
    },
    /// Richardson extrapolation of scaled finite-size quantities.
    Extrapolate {
        #[arg(long)]
        mu: String,
        #[arg(long = "Ls", value_delimiter = ',', default_values_t = scaling::DEFAULT_LS)]
        ls: Vec<usize>,
        #[arg(long, value_enum)]
        what: What,
        /// Probe points; real numbers or re:im pairs.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<String>,
    },
    /// Exact perturbative series in mu.
    Series {
        #[arg(long, default_value_t = 20)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Emit::E1)]
        emit: Emit,
        #[arg(long, value_enum, default_value_t = CoeffFormat::Exact)]
        format: CoeffFormat,
        /// Also sum the e1 series at this mu.
        #[arg(long)]
        mu: Option<String>,
    },
    /// Run the acceptance suite.
    CheckAll {
        #[arg(long, value_enum, default_value_t = checks::Level::Fast)]
        level: checks::Level,
        /// Replacement table of published e1 coefficients (JSON).
        #[arg(long)]
        reference: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Mu0,
    Sums,
    Weierstrass,
    Tasep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum What {
    Gap,
    #[value(name = "Q")]
    Q,
    #[value(name = "P")]
    P,
    #[value(name = "T")]
    T,
    #[value(name = "C")]
    C,
    #[value(name = "c")]
    LowerC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    E1,
    #[value(name = "c")]
    LowerC,
    #[value(name = "C")]
    C,
    Alpha,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CoeffFormat {
    Exact,
    Decimal,
}

struct Env {
    ctx: PrecisionContext,
    digits: usize,
    jobs: usize,
    cache: Cache,
    quiet: bool,
}

impl Env {
    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Rendered document and exit status.
fn run(cli: Cli) -> Result<(String, u8), CliError> {
    if cli.digits < 20 {
        return Err(CliError::Validation(format!("--digits {} is below the minimum of 20", cli.digits)));
    }
    if cli.jobs == 0 {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    let env = Env {
        ctx: PrecisionContext::with_digits(cli.digits)?,
        digits: cli.digits as usize,
        jobs: cli.jobs,
        cache: Cache::new(cli.cache_dir),
        quiet: cli.quiet,
    };
    let (doc, gate) = match cli.command {
        Command::Oracle { l, n, q, mu } => (oracle(&env, l, n, q, mu)?, None),
        Command::GapFinite { l, mu, roots } => (gap_finite(&env, &l, &mu, roots)?, None),
        Command::ErfZeros { count } => (erf_zeros(&env, count)?, None),
        Command::EdgeRoots { mu, m, tol } => (edge_roots(&env, &mu, m, tol)?, None),
        Command::EdgeChecks { suite, count } => edge_checks(&env, suite, count)?,
        Command::Extrapolate { mu, ls, what, x } => (extrapolate(&env, &mu, &ls, what, &x)?, None),
        Command::Series { order, emit, format, mu } => (series(&env, order, emit, format, mu.as_deref())?, None),
        Command::CheckAll { level, reference } => check_all(&env, level, reference)?,
    };
    let text = match cli.output {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    if let Some(msg) = &gate {
        env.note(&format!("gate failed: {msg}"));
    }
    Ok((text, if gate.is_some() { 4 } else { 0 }))
}

fn parse_real(s: &str, ctx: &PrecisionContext) -> Result<Float, CliError> {
    let v = Float::parse(s.trim()).map_err(|_| CliError::Validation(format!("not a number: {s:?}")))?;
    let f = Float::with_val(ctx.prec(), v);
    if !f.is_finite() {
        return Err(CliError::Validation(format!("not a finite number: {s:?}")));
    }
    Ok(f)
}

/// "x" or "re:im".
fn parse_complex(s: &str, ctx: &PrecisionContext) -> Result<Complex, CliError> {
    match s.split_once(':') {
        Some((re, im)) => Ok(Complex::with_val(ctx.prec(), (parse_real(re, ctx)?, parse_real(im, ctx)?))),
        None => Ok(Complex::with_val(ctx.prec(), parse_real(s, ctx)?)),
    }
}

/// Cache-key spelling of a parameter.
fn key(x: &Float) -> String {
    x.to_string_radix(10, Some(30))
}

/// Run independent jobs on at most `jobs` threads; results keep input order.
fn parallel<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.min(items.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("no panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("threads joined").into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn gap_state(env: &Env, l: usize, mu: &Float) -> Result<BetheRootSet, CliError> {
    let k = format!("L{l}_N{}_mu{}_bits{}", l / 2, key(mu), env.ctx.prec());
    let entry: BetheEntry = env.cache.get_or("bethe", &k, || -> Result<_, CliError> {
        let s = bethe_finite::solve_gap_roots(l, l / 2, mu, &env.ctx, None)?;
        Ok(BetheEntry::from(&s))
    })?;
    entry.decode().ok_or_else(|| CliError::Validation(format!("corrupt cache entry bethe/{k}")))
}

fn oracle(env: &Env, l: usize, n: Option<usize>, q: Option<String>, mu: Option<String>) -> Result<Doc, CliError> {
    use wasep::markov_oracle::{oracle_gap, oracle_gap_tracked};
    let ctx = &env.ctx;
    let n = n.unwrap_or(l / 2);
    let q = match (q, mu) {
        (Some(q), _) => parse_real(&q, ctx)?,
        (None, Some(mu)) => bethe_finite::q_from_mu(l, &parse_real(&mu, ctx)?, ctx.prec()),
        (None, None) => return Err(CliError::Validation("one of --q or --mu is required".into())),
    };
    // q < 0 is not a Markov generator; follow the gap branch from q = 1 instead
    let tracked = q.is_sign_negative();
    let g = if tracked { oracle_gap_tracked(l, n, &q, ctx)? } else { oracle_gap(l, n, &q, ctx)? };
    let mut doc = Doc::new("oracle", env.digits);
    doc.meta("tracked_from_q1", tracked);
    doc.row()
        .val("L", l)
        .val("N", n)
        .real("q", &q)
        .real("gap_re", g.eigenvalue.real())
        .real("gap_im", g.eigenvalue.imag())
        .val("degeneracy", g.degeneracy)
        .val("sector", g.sector)
        .done();
    Ok(doc)
}

fn gap_finite(env: &Env, ls: &[usize], mus: &[String], with_roots: bool) -> Result<Doc, CliError> {
    let ctx = &env.ctx;
    let mut jobs = Vec::new();
    for &l in ls {
        if l % 2 != 0 || l < 4 {
            return Err(CliError::Validation(format!("L = {l} must be even and at least 4")));
        }
        for m in mus {
            jobs.push((l, parse_real(m, ctx)?));
        }
    }
    let results = parallel(&jobs, env.jobs, |(l, mu)| -> Result<_, CliError> {
        let st = gap_state(env, *l, mu)?;
        let e = bethe_finite::eigenvalue(&st, ctx)?;
        Ok((st, e))
    });
    let mut doc = Doc::new("gap-finite", env.digits);
    let p = ctx.prec();
    for ((l, mu), r) in jobs.iter().zip(results) {
        let (st, e) = r?;
        let l2e = Complex::with_val(p, &e * (l * l) as u32);
        doc.row()
            .val("kind", "gap")
            .val("L", *l)
            .val("N", st.n)
            .real("mu", mu)
            .real("q", &st.q)
            .complex("E", &e)
            .complex("L2E", &l2e)
            .real("momentum", &bethe_finite::momentum(&st))
            .real("residual", &st.residual)
            .done();
        if with_roots {
            let edge = st.edge_coordinates();
            for (j, (y, w)) in st.roots.iter().zip(&edge).enumerate() {
                doc.row()
                    .val("kind", "root")
                    .val("L", *l)
                    .real("mu", mu)
                    .val("j", j + 1)
                    .val("quantum_number", st.quantum_numbers[j])
                    .complex("y", y)
                    .complex("edge_w", w)
                    .done();
            }
        }
    }
    Ok(doc)
}

fn erf_zeros(env: &Env, count: usize) -> Result<Doc, CliError> {
    let z = edge::erf_zeros(count, &env.ctx)?;
    let mut doc = Doc::new("erf-zeros", env.digits);
    for (i, w) in z.iter().enumerate() {
        let r = Float::with_val(53, edge::erf_q(w, &env.ctx)?.abs().real());
        doc.row().val("j", i + 1).complex("w", w).val("residual", format!("{:.3e}", r.to_f64())).done();
    }
    Ok(doc)
}

fn edge_set(env: &Env, mu: &str, m: usize) -> Result<EdgeRootSet, CliError> {
    let ctx = &env.ctx;
    match mu.trim() {
        "inf" | "infinity" => return Ok(EdgeRootSet::at_infinity(m, ctx)?),
        "0" => return Ok(EdgeRootSet::at_mu0(m, ctx)?),
        _ => {}
    }
    let mu = parse_real(mu, ctx)?;
    let k = format!("mu{}_M{m}_bits{}", key(&mu), ctx.prec());
    if let Some(s) = env.cache.load::<EdgeEntry>("edge", &k).and_then(|e| e.decode()) {
        return Ok(s);
    }
    let s = edge::solve_edge_roots(&mu, m, ctx, None)?;
    if let Some(e) = EdgeEntry::encode(&s) {
        let _ = env.cache.store("edge", &k, &e);
    }
    Ok(s)
}

fn edge_roots(env: &Env, mu: &str, m: usize, tol: Option<f64>) -> Result<Doc, CliError> {
    let s = edge_set(env, mu, m)?;
    if let Some(t) = tol {
        s.require_tolerance(t)?;
    }
    for w in &s.warnings {
        env.note(&format!("warning: {w}"));
    }
    let mut doc = Doc::new("edge-roots", env.digits);
    let model = match s.tail_model {
        edge::TailModel::ErfAsymptotic => "erf-asymptotic",
        edge::TailModel::OneTerm => "one-term",
        edge::TailModel::Shifted { .. } => "shifted",
    };
    doc.meta("mu", s.mu.as_ref().map_or("inf".to_string(), |m| output::dec(m, env.digits)))
        .meta("M", m)
        .meta("tail_model", model)
        .meta("tail_error", format!("{:.3e}", s.tail_error))
        .meta("residual", format!("{:.3e}", s.residual))
        .meta("w0_policy", codec::policy_name(s.w0_policy))
        .meta("warnings", s.warnings.clone());
    for (j, w) in &s.w {
        doc.row().val("j", *j).complex("w", w).done();
    }
    Ok(doc)
}

fn edge_checks(env: &Env, suite: Suite, count: usize) -> Result<(Doc, Option<String>), CliError> {
    let ctx = &env.ctx;
    let mut doc = Doc::new("edge-checks", env.digits);
    let sci = |x: f64| format!("{x:.3e}");
    let mut fails = Vec::new();
    let mut gate = |name: &str, value: f64, tol: f64| {
        if !(value < tol) {
            fails.push(format!("{name} = {value:.3e} >= {tol:e}"));
        }
    };
    match suite {
        Suite::Mu0 => {
            let z = edge::erf_zeros(count, ctx)?;
            let r = edge::check_mu0_equations(&z, ctx)?;
            gate("max residual", r, 1e-10);
            doc.meta("suite", "mu0").meta("zeros", count);
            doc.row().val("check", "edge equations, 0 < |j| <= 8").val("residual", sci(r)).val("tolerance", "1e-10").done();
        }
        Suite::Sums => {
            let z = edge::erf_zeros(count, ctx)?;
            let (s1, s2) = edge::sum_identities(&z, ctx)?;
            let (t1, t2) = edge::sum_identity_targets(ctx);
            doc.meta("suite", "sums").meta("zeros", count);
            for (name, s, t) in [("sum(1/w - 1/(4 sqrt(i pi j)))", s1, t1), ("sum(1/w^2)", s2, t2)] {
                let d = wasep::numerics::cabs_f64(&Complex::with_val(ctx.prec(), &s - &t));
                gate(name, d, 1e-10);
                doc.row().val("check", name).complex("value", &s).real("target", &t).val("residual", sci(d)).val("tolerance", "1e-10").done();
            }
        }
        Suite::Weierstrass => {
            let z = edge::erf_zeros(count, ctx)?;
            doc.meta("suite", "weierstrass").meta("zeros", count);
            for x in [(0.0, 0.0), (1.0, 1.0), (1.0, -1.0), (-2.0, 0.0), (0.0, 3.0)] {
                let xc = ctx.complex(x);
                let d = edge::weierstrass_check(&z, &xc, ctx)?;
                gate("product vs function", d, 1e-10);
                doc.row().val("check", "product vs function").complex("x", &xc).val("residual", sci(d)).val("tolerance", "1e-10").done();
            }
        }
        Suite::Tasep => {
            let nu = edge::tasep_nu1(ctx)?;
            let roots = edge::tasep_edge_roots(count, ctx)?;
            let w1 = &roots.iter().find(|(j, _)| *j == 1).expect("w_1 present").1;
            let q = wasep::numerics::cabs_f64(&edge::q_infinity(w1, &nu, ctx)?);
            gate("|Q_inf(w_1)|", q, 1e-6);
            doc.meta("suite", "tasep").meta("nu1", output::dec(&nu, env.digits)).meta("q_inf_at_w1", sci(q));
            for (j, w) in &roots {
                doc.row().val("j", *j).complex("w", w).done();
            }
        }
    }
    let gate = (!fails.is_empty()).then(|| fails.join("; "));
    Ok((doc, gate))
}

fn probe_points(env: &Env, x: &[String], default: &[f64]) -> Result<Vec<Complex>, CliError> {
    if x.is_empty() {
        return Ok(default.iter().map(|&v| env.ctx.complex(v)).collect());
    }
    x.iter().map(|s| parse_complex(s, &env.ctx)).collect()
}

fn extrapolate(env: &Env, mu: &str, ls: &[usize], what: What, x: &[String]) -> Result<Doc, CliError> {
    let ctx = &env.ctx;
    let mu = parse_real(mu, ctx)?;
    if ls.len() < 2 {
        return Err(CliError::Validation("--Ls needs at least two sizes".into()));
    }
    let mut sorted = ls.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.iter().any(|&l| l % 2 != 0 || l < 4) {
        return Err(CliError::Validation("--Ls must be distinct even sizes >= 4".into()));
    }
    let states = parallel(&sorted, env.jobs, |&l| gap_state(env, l, &mu));
    let mut doc = Doc::new("extrapolate", env.digits);
    doc.meta("mu", output::dec(&mu, env.digits))
        .meta("Ls", sorted.clone())
        .meta("exponent_step", "1/2")
        .meta("orders", sorted.len() - 1);
    let p = ctx.prec();
    if what == What::Gap {
        let mut v = BTreeMap::new();
        for (&l, st) in sorted.iter().zip(states) {
            let e = bethe_finite::eigenvalue(&st?, ctx)?;
            v.insert(l, Complex::with_val(p, e * (l * l) as u32));
        }
        let r = scaling::richardson(&v, scaling::STEP, v.len() - 1)?;
        push_extrapolation(&mut doc, "L2E", None, &r);
        return Ok(doc);
    }
    let mut data = BTreeMap::new();
    for (&l, st) in sorted.iter().zip(states) {
        data.insert(l, FiniteSizeData::from_state(st?, ctx)?);
    }
    let table = ScalingTable { mu: mu.clone(), data };
    match what {
        What::LowerC => {
            let xs = probe_points(env, x, &[-4.0, -5.0, -6.0, -7.0, -8.0, -9.0, -10.0, -11.0, -12.0])?;
            let c = scaling::estimate_c_mu_with(&table, &xs)?;
            let e1 = scaling::e1_from_c(&c.c, &mu);
            doc.meta("x", xs.iter().map(|z| output::dec(z.real(), 6)).collect::<Vec<_>>());
            doc.row()
                .val("quantity", "c")
                .complex("limit", &c.c)
                .val("error_estimate", format!("{:.3e}", c.error_estimate))
                .complex("momentum_coeff", &c.momentum_coeff)
                .complex("e1_from_c", &e1)
                .done();
        }
        What::C => {
            let r = table.extrapolate(Quantity::C, &Complex::new(p))?;
            push_extrapolation(&mut doc, "C", None, &r);
        }
        What::Q | What::P | What::T => {
            let q = match what {
                What::Q => Quantity::Q,
                What::P => Quantity::P,
                _ => Quantity::T,
            };
            for xv in probe_points(env, x, &[-2.0, 0.0, 2.0])? {
                let r = table.extrapolate(q, &xv)?;
                push_extrapolation(&mut doc, &format!("{q:?}"), Some(&xv), &r);
            }
        }
        What::Gap => unreachable!("handled above"),
    }
    Ok(doc)
}

fn push_extrapolation(doc: &mut Doc, name: &str, x: Option<&Complex>, r: &scaling::ExtrapolationResult) {
    let d = doc.digits();
    let table: Vec<Vec<[String; 2]>> =
        r.table.iter().map(|row| row.iter().map(|z| [output::dec(z.real(), d), output::dec(z.imag(), d)]).collect()).collect();
    let mut row = doc.row().val("quantity", name.to_string());
    if let Some(x) = x {
        row = row.complex("x", x);
    }
    row.complex("limit", &r.limit)
        .val("error_estimate", format!("{:.3e}", r.error_estimate.to_f64()))
        .val("orders_used", r.orders_used)
        .val("table", serde_json::to_value(table).expect("strings serialize"))
        .done();
}

fn series_entry(env: &Env, order: usize) -> Result<SeriesEntry, CliError> {
    env.cache.get_or("series", &format!("order{order}"), || -> Result<_, CliError> {
        env.note(&format!("solving the series to order {order}"));
        Ok(SeriesEntry::from(&wasep::series::run_series(order)?))
    })
}

fn series(env: &Env, order: usize, emit: Emit, format: CoeffFormat, mu: Option<&str>) -> Result<Doc, CliError> {
    let s = series_entry(env, order)?;
    let mut doc = Doc::new("series", env.digits);
    doc.meta("order_max", s.order_max).meta(
        "basis",
        "tokens p/q*(2pi)^(k/2) and p/q*i*(2pi)^(k/2) joined by ' + '",
    );
    let p = env.ctx.prec();
    let parse = |t: &str| ExactCoeff::parse_exact(t).map_err(CliError::from);
    let push = |doc: &mut Doc, order: i64, degree: Option<usize>, tok: &str| -> Result<(), CliError> {
        let mut row = doc.row().val("order", order);
        if let Some(d) = degree {
            row = row.val("degree", d);
        }
        match format {
            CoeffFormat::Exact => row.val("coeff", tok.to_string()).done(),
            CoeffFormat::Decimal => row.complex("coeff", &parse(tok)?.to_complex(p)).done(),
        }
        Ok(())
    };
    match emit {
        Emit::E1 => {
            for (k, t) in s.e1.iter().enumerate() {
                if t != "0" {
                    push(&mut doc, k as i64, None, t)?;
                }
            }
        }
        Emit::LowerC | Emit::C => {
            let v = if emit == Emit::C { &s.c_wronskian } else { &s.c_asymptotic };
            for (i, t) in v.iter().enumerate() {
                push(&mut doc, i as i64 - 1, None, t)?;
            }
        }
        Emit::Alpha | Emit::Beta => {
            let poly = if emit == Emit::Alpha { &s.alpha } else { &s.beta };
            for (i, coeffs) in poly.coeffs.iter().enumerate() {
                for (d, t) in coeffs.iter().enumerate() {
                    if t != "0" {
                        push(&mut doc, poly.min_order as i64 + i as i64, Some(d), t)?;
                    }
                }
            }
        }
    }
    if let Some(m) = mu {
        let mu = parse_real(m, &env.ctx)?;
        let mut sum = Float::new(p + 16);
        let mut last = Float::new(p + 16);
        let mut pw = Float::with_val(p + 16, 1);
        for t in &s.e1 {
            if t != "0" {
                let c = parse(t)?.to_complex(p + 16);
                last = Float::with_val(p + 16, c.real() * &pw);
                sum += &last;
            }
            pw *= &mu;
        }
        doc.meta("e1_at_mu", output::dec(&mu, env.digits))
            .meta("e1_value", output::dec(&Float::with_val(p, sum), env.digits))
            .meta("e1_last_term", format!("{:.3e}", last.to_f64().abs()));
    }
    Ok(doc)
}

fn check_all(env: &Env, level: checks::Level, reference: Option<PathBuf>) -> Result<(Doc, Option<String>), CliError> {
    let text = match reference {
        Some(p) => std::fs::read_to_string(&p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?,
        None => checks::E1_REFERENCE.to_string(),
    };
    let reference = checks::E1Reference::parse(&text)?;
    let lines = checks::run(level, &reference, env.quiet)?;
    let mut doc = Doc::new("check-all", env.digits);
    doc.meta("level", format!("{level:?}").to_lowercase());
    let mut failed = Vec::new();
    for l in &lines {
        if !l.pass {
            failed.push(format!("criterion {} ({})", l.id, l.measured));
        }
        doc.row()
            .val("criterion", l.id)
            .val("what", l.what)
            .val("status", if l.pass { "PASS" } else { "FAIL" })
            .val("measured", l.measured.clone())
            .val("tolerance", l.tolerance)
            .done();
    }
    let gate = (!failed.is_empty()).then(|| failed.join("; "));
    Ok((doc, gate))
}
