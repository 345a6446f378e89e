//! `wgss`: Lyapunov coefficients, degenerate Hopf loci and orbit census
//! for the Watt governor with spring.

mod fmt;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopf_core::{
    make_frame, run_ladder, EigenvectorConvention, HopfError, JetBuilder, LadderOptions, Transport,
};
use serde_json::{json, Value};
use wgss::locus::{
    find_codim4_point, scan_l1_surface, trace_l2_zero_curve, Axis, Curve, LocusOptions, ScanGrid,
    C2_SEEDS, LOCUS_SCHEMA_VERSION,
};
use wgss::orbit::{
    integrate, poincare_census, reverse_time_cycle, IcGrid, Tolerances, TRAJECTORY_SCHEMA_VERSION,
};
use wgss::stability::{
    characteristic_coefficients, eigenvalues, stable_by_eigenvalues, stable_by_routh_hurwitz,
};
use wgss::tongue::{h_representative, search_tongue, TongueOptions};
use wgss::{params_from_json, LoadedParams, ParamSource, WgssError, WgssParams};

use crate::fmt::{sig6, sig6_complex};

#[derive(Parser, Debug)]
#[command(
    name = "wgss",
    version,
    about = "Hopf coefficient ladder, degenerate Hopf loci and orbit census for the Watt governor with spring"
)]
struct Cli {
    /// JSON parameter file (nondimensional or physical constants).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write artifacts here instead of printing them.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for grid work (default: all cores).
    #[arg(long, global = true, env = "WGSS_WORKERS")]
    workers: Option<usize>,
    /// Numerical tolerance: Newton residual for `locus`, relative tolerance for `orbits`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lyapunov coefficients l1..l_order at a Hopf point.
    Coeffs(CoeffsArgs),
    /// Degenerate Hopf loci on the critical hypersurface.
    Locus {
        #[command(subcommand)]
        cmd: LocusCmd,
    },
    /// Poincaré-section census of equilibria and cycles.
    Orbits(OrbitsArgs),
    /// Linear stability of the equilibrium.
    Stability(StabilityArgs),
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, conflicts_with = "eps_critical")]
    epsilon: Option<f64>,
    /// Use epsilon = epsilon_c(beta, alpha, kappa).
    #[arg(long)]
    eps_critical: bool,
}

impl ParamArgs {
    fn any(&self) -> bool {
        self.beta.is_some()
            || self.alpha.is_some()
            || self.kappa.is_some()
            || self.epsilon.is_some()
            || self.eps_critical
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransportArg {
    Full,
    ImaginaryLower,
}

impl From<TransportArg> for Transport {
    fn from(t: TransportArg) -> Self {
        match t {
            TransportArg::Full => Transport::Full,
            TransportArg::ImaginaryLower => Transport::ImaginaryLower,
        }
    }
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=4))]
    order: u8,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Include every h_jk vector in JSON/CSV output.
    #[arg(long)]
    all_h: bool,
    #[arg(long, value_enum, default_value_t = TransportArg::Full)]
    transport: TransportArg,
}

#[derive(Subcommand, Debug)]
enum LocusCmd {
    /// Sign field of l1 over a (beta, alpha, kappa) grid.
    Scan(ScanArgs),
    /// Trace the curves l1 = l2 = 0 and report l3.
    Curves(CurvesArgs),
    /// Solve l1 = l2 = l3 = 0 and report transversality data.
    FindQ(FindQArgs),
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"], default_values = ["0.05", "0.95", "10"])]
    beta_range: Vec<f64>,
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"], default_values = ["0.1", "3.0", "10"])]
    alpha_range: Vec<f64>,
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"], default_values = ["0.0", "0.9", "5"])]
    kappa_range: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CurveArg {
    C1,
    C2,
    Both,
}

#[derive(Args, Debug)]
struct CurvesArgs {
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values = ["0.0", "0.98"])]
    kappa_range: Vec<f64>,
    /// Uniform kappa spacing; without it the seed-table kappas inside the range are used.
    #[arg(long)]
    kappa_step: Option<f64>,
    #[arg(long, value_enum, default_value_t = CurveArg::Both)]
    curve: CurveArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct FindQArgs {
    /// Newton seed `beta alpha kappa`.
    #[arg(long, num_args = 3, value_names = ["BETA", "ALPHA", "KAPPA"])]
    seed: Option<Vec<f64>>,
    /// Transport convention for the reported gradients.
    #[arg(long, value_enum, default_value_t = TransportArg::ImaginaryLower)]
    transport: TransportArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct OrbitsArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    s_min: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    /// Census of the single seed at the equilibrium.
    #[arg(long)]
    from_equilibrium: bool,
    /// Also locate a repelling cycle by backward integration from section amplitude Y.
    #[arg(long, value_name = "Y")]
    reverse_from: Option<f64>,
    /// Also integrate from `--start` (default: the equilibrium) up to time T and emit the trajectory.
    #[arg(long, value_name = "T")]
    trajectory: Option<f64>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"])]
    start: Option<Vec<f64>>,
    /// Run the three-attractor search near the codimension-4 point instead of a census.
    #[arg(long)]
    search_tongue: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct StabilityArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

/// Exit 1 for usage problems, 2 for mathematical failures.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(String),
}

impl From<WgssError> for Failure {
    fn from(e: WgssError) -> Self {
        match e {
            WgssError::Domain(_) | WgssError::Config(_) | WgssError::Argument(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<HopfError> for Failure {
    fn from(e: HopfError) -> Self {
        Failure::Math(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Math(m)) => {
            eprintln!("failure: {m}");
            ExitCode::from(2)
        }
    }
}

struct Ctx {
    config: Option<Value>,
    out_dir: Option<PathBuf>,
    tol: Option<f64>,
}

impl Ctx {
    /// Writes `name` under `--out-dir`, or prints when no directory was given.
    fn emit(&self, name: &str, content: &str) -> Outcome<()> {
        match &self.out_dir {
            Some(d) => {
                fs::create_dir_all(d)?;
                fs::write(d.join(name), content)?;
                eprintln!("wrote {}", d.join(name).display());
            }
            None => print!("{content}"),
        }
        Ok(())
    }

    fn params(&self, a: &ParamArgs) -> Outcome<LoadedParams> {
        match (&self.config, a.any()) {
            (Some(_), true) => Err(Failure::Usage(
                "--config and inline parameter flags are mutually exclusive".into(),
            )),
            (Some(v), false) => Ok(params_from_json(v)?),
            (None, _) => {
                let need = |v: Option<f64>, n: &str| {
                    v.ok_or_else(|| Failure::Usage(format!("missing --{n} (or --config)")))
                };
                let (b, al, k) = (
                    need(a.beta, "beta")?,
                    need(a.alpha, "alpha")?,
                    need(a.kappa, "kappa")?,
                );
                let params = if a.eps_critical {
                    WgssParams::critical(b, al, k)?
                } else {
                    WgssParams::new(b, al, need(a.epsilon, "epsilon or --eps-critical")?, k)?
                };
                Ok(LoadedParams {
                    params,
                    source: ParamSource::Nondimensional,
                    physical: None,
                })
            }
        }
    }
}

fn load_config(path: &Path) -> Outcome<Value> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Outcome<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Failure::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let config = cli.config.as_deref().map(load_config).transpose()?;
    let ctx = Ctx {
        config,
        out_dir: cli.out_dir,
        tol: cli.tol,
    };
    match cli.cmd {
        Cmd::Coeffs(a) => cmd_coeffs(&ctx, &a),
        Cmd::Locus { cmd } => match cmd {
            LocusCmd::Scan(a) => cmd_scan(&ctx, &a),
            LocusCmd::Curves(a) => cmd_curves(&ctx, &a),
            LocusCmd::FindQ(a) => cmd_find_q(&ctx, &a),
        },
        Cmd::Orbits(a) => cmd_orbits(&ctx, &a),
        Cmd::Stability(a) => cmd_stability(&ctx, &a),
    }
}

fn locus_opts(ctx: &Ctx) -> LocusOptions {
    let d = LocusOptions::default();
    LocusOptions {
        newton_tol: ctx.tol.unwrap_or(d.newton_tol),
        ..d
    }
}

fn orbit_tol(ctx: &Ctx) -> Tolerances {
    match ctx.tol {
        Some(t) => Tolerances::default().with_rtol(t),
        None => Tolerances::default(),
    }
}

fn params_json(p: &WgssParams) -> Value {
    json!({"beta": p.beta, "alpha": p.alpha, "epsilon": p.epsilon, "kappa": p.kappa})
}

fn cmd_coeffs(ctx: &Ctx, a: &CoeffsArgs) -> Outcome<()> {
    let up_to = a.order as usize;
    let opts = LadderOptions {
        up_to,
        transport: a.transport.into(),
    };
    let linear = ctx.config.as_ref().and_then(|v| v.get("jacobian")).cloned();
    let (ladder, params) = match linear {
        Some(m) => {
            if a.params.any() {
                return Err(Failure::Usage(
                    "--config and inline parameter flags are mutually exclusive".into(),
                ));
            }
            let rows: Vec<Vec<f64>> =
                serde_json::from_value(m).map_err(|e| Failure::Usage(format!("jacobian: {e}")))?;
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(Failure::Usage("jacobian must be a square matrix".into()));
            }
            let jac = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            let jet = JetBuilder::new(n, 2 * up_to + 1)?.jacobian(&jac).build();
            let frame = make_frame(&jet, EigenvectorConvention::default())?;
            (run_ladder(&frame, opts)?, None)
        }
        None => {
            let lp = ctx.params(&a.params)?;
            (wgss::model::ladder(&lp.params, opts)?, Some(lp.params))
        }
    };
    match a.format {
        Format::Table => {
            let mut s = String::new();
            if let Some(p) = params {
                for (k, v) in [
                    ("beta", p.beta),
                    ("alpha", p.alpha),
                    ("kappa", p.kappa),
                    ("epsilon", p.epsilon),
                ] {
                    s.push_str(&format!("{k:<8} {}\n", sig6(v)));
                }
            }
            s.push_str(&format!("{:<8} {}\n", "omega0", sig6(ladder.omega0)));
            for m in 1..=up_to {
                s.push_str(&format!(
                    "G{}{} = {}\n",
                    m + 1,
                    m,
                    sig6_complex(ladder.g(m).expect("solved"))
                ));
            }
            for m in 1..=up_to {
                s.push_str(&format!("l{m} = {}\n", sig6(ladder.l(m).expect("solved"))));
            }
            ctx.emit("coeffs.txt", &s)
        }
        Format::Json => {
            let mut v = ladder.to_json();
            if !a.all_h {
                v.as_object_mut().expect("object").remove("h_jk");
            }
            if let Some(p) = params {
                v["params"] = params_json(&p);
            }
            ctx.emit(
                "coeffs.json",
                &(serde_json::to_string_pretty(&v).expect("serializable") + "\n"),
            )
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(["quantity", "component", "re", "im"])?;
            w.write_record(["omega0", "", &ladder.omega0.to_string(), "0"])?;
            for m in 1..=up_to {
                let g = ladder.g(m).expect("solved");
                w.write_record([
                    format!("G{}{}", m + 1, m),
                    String::new(),
                    g.re.to_string(),
                    g.im.to_string(),
                ])?;
            }
            for m in 1..=up_to {
                w.write_record([
                    format!("l{m}"),
                    String::new(),
                    ladder.l(m).expect("solved").to_string(),
                    "0".into(),
                ])?;
            }
            if a.all_h {
                for ((j, k), v) in ladder.h_entries() {
                    for (i, z) in v.iter().enumerate() {
                        w.write_record([
                            format!("h_{j}{k}"),
                            i.to_string(),
                            z.re.to_string(),
                            z.im.to_string(),
                        ])?;
                    }
                }
            }
            ctx.emit("coeffs.csv", &csv_string(w)?)
        }
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Outcome<String> {
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn axis(v: &[f64], name: &str) -> Outcome<Axis> {
    let n = v[2];
    if !(n >= 1.0 && n.fract() == 0.0) {
        return Err(Failure::Usage(format!(
            "--{name}-range: N must be a positive integer"
        )));
    }
    Ok(Axis::new(v[0], v[1], n as usize))
}

fn cmd_scan(ctx: &Ctx, a: &ScanArgs) -> Outcome<()> {
    let grid = ScanGrid {
        beta: axis(&a.beta_range, "beta")?,
        alpha: axis(&a.alpha_range, "alpha")?,
        kappa: axis(&a.kappa_range, "kappa")?,
    };
    let res = scan_l1_surface(&grid, &locus_opts(ctx))?;
    let mut w = csv::Writer::from_writer(vec![]);
    for r in &res.rows {
        w.serialize(r)?;
    }
    let csv_text = csv_string(w)?;
    let json_text = serde_json::to_string_pretty(&res).expect("serializable") + "\n";
    match (a.format, &ctx.out_dir) {
        (_, Some(_)) => {
            ctx.emit("l1_scan.csv", &csv_text)?;
            ctx.emit("l1_scan.json", &json_text)
        }
        (Format::Json, None) => ctx.emit("l1_scan.json", &json_text),
        (_, None) => ctx.emit("l1_scan.csv", &csv_text),
    }
}

fn cmd_curves(ctx: &Ctx, a: &CurvesArgs) -> Outcome<()> {
    let (lo, hi) = (a.kappa_range[0], a.kappa_range[1]);
    if !(lo <= hi) {
        return Err(Failure::Usage("--kappa-range needs LO <= HI".into()));
    }
    let curves = match a.curve {
        CurveArg::C1 => vec![Curve::C1],
        CurveArg::C2 => vec![Curve::C2],
        CurveArg::Both => vec![Curve::C1, Curve::C2],
    };
    let opts = locus_opts(ctx);
    let mut rows = Vec::new();
    for c in curves {
        let ks: Vec<f64> = match a.kappa_step {
            Some(h) if h > 0.0 => {
                let n = ((hi - lo) / h + 1e-9).floor() as usize;
                (0..=n).map(|i| lo + h * i as f64).collect()
            }
            Some(h) => {
                return Err(Failure::Usage(format!(
                    "--kappa-step must be positive, got {h}"
                )))
            }
            None => c
                .seeds()
                .iter()
                .map(|s| s.0)
                .filter(|k| (lo..=hi).contains(k))
                .collect(),
        };
        if ks.is_empty() {
            continue;
        }
        for p in trace_l2_zero_curve(c, &ks, &opts)? {
            rows.push((c, p));
        }
    }
    match a.format {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(c, p)| {
                    let mut o = serde_json::to_value(p).expect("serializable");
                    o["curve"] = json!(format!("{c:?}"));
                    o
                })
                .collect();
            let doc = json!({"schema_version": LOCUS_SCHEMA_VERSION, "points": v});
            ctx.emit(
                "l3_curves.json",
                &(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"),
            )
        }
        _ => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record([
                "curve",
                "kappa",
                "beta",
                "alpha",
                "epsilon_c",
                "l1",
                "l2",
                "l3",
                "l4",
            ])?;
            for (c, p) in &rows {
                w.write_record(
                    [format!("{c:?}")].into_iter().chain(
                        [
                            p.kappa,
                            p.beta,
                            p.alpha,
                            p.epsilon_c,
                            p.l1,
                            p.l2,
                            p.l3,
                            p.l4,
                        ]
                        .map(|x| x.to_string()),
                    ),
                )?;
            }
            ctx.emit("l3_curves.csv", &csv_string(w)?)
        }
    }
}

fn cmd_find_q(ctx: &Ctx, a: &FindQArgs) -> Outcome<()> {
    let seed = match &a.seed {
        Some(s) => (s[0], s[1], s[2]),
        None => {
            let row = C2_SEEDS.iter().find(|r| r.0 == 0.9).expect("table row");
            (row.1, row.2, row.0)
        }
    };
    let (q, rep, history) = find_codim4_point(seed, &locus_opts(ctx), a.transport.into())?;
    match a.format {
        Format::Json => {
            let doc = json!({"schema_version": LOCUS_SCHEMA_VERSION, "point": q, "transversality": rep, "newton_history": history});
            ctx.emit(
                "q.json",
                &(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"),
            )
        }
        _ => {
            let mut s = String::new();
            for (k, v) in [
                ("beta", q.beta),
                ("alpha", q.alpha),
                ("kappa", q.kappa),
                ("epsilon_c", q.epsilon_c),
            ] {
                s.push_str(&format!("{k:<10} {}\n", sig6(v)));
            }
            for (k, v) in q.l().iter().enumerate() {
                s.push_str(&format!("l{} = {}\n", k + 1, sig6(*v)));
            }
            s.push_str(&format!(
                "gradients ({}), components (beta, kappa, alpha):\n",
                rep.transport
            ));
            for k in 1..=3 {
                let g = rep.grad_bka(k);
                s.push_str(&format!(
                    "  grad l{k} = ({}, {}, {})\n",
                    sig6(g[0]),
                    sig6(g[1]),
                    sig6(g[2])
                ));
            }
            s.push_str(&format!("determinant = {}\n", sig6(rep.determinant)));
            s.push_str(&format!("crossing speed = {}\n", sig6(rep.crossing_speed)));
            ctx.emit("q.txt", &s)
        }
    }
}

fn census_grid(ctx: &Ctx, a: &OrbitsArgs, p: &WgssParams) -> Outcome<IcGrid> {
    if a.from_equilibrium {
        return Ok(IcGrid {
            s_min: 0.0,
            s_max: 0.0,
            count: 1,
        });
    }
    let cfg = ctx.config.as_ref().and_then(|v| v.get("census"));
    let from_cfg = |k: &str| cfg.and_then(|c| c.get(k)).and_then(Value::as_f64);
    let scale = 2.0 * wgss::omega0(p.beta);
    Ok(IcGrid {
        s_min: a.s_min.or(from_cfg("s_min")).unwrap_or(1e-3),
        s_max: a.s_max.or(from_cfg("s_max")).unwrap_or(0.5 * scale),
        count: a
            .count
            .or(from_cfg("count").map(|c| c as usize))
            .unwrap_or(40),
    })
}

fn cmd_orbits(ctx: &Ctx, a: &OrbitsArgs) -> Outcome<()> {
    let tol = orbit_tol(ctx);
    if a.search_tongue {
        let opts = locus_opts(ctx);
        let (q, _, _) = find_codim4_point((0.93592, 1.02731, 0.9), &opts, Transport::Full)?;
        let h = h_representative(0.905, &opts)?;
        let r = search_tongue(&q, &h, &TongueOptions::default(), &tol)?;
        return ctx.emit(
            "tongue.json",
            &(serde_json::to_string_pretty(&r).expect("serializable") + "\n"),
        );
    }
    let lp = ctx.params(&a.params)?;
    let p = lp.params;
    let grid = census_grid(ctx, a, &p)?;
    let census = poincare_census(&p, &grid, &tol)?;
    let mut doc = serde_json::to_value(&census).expect("serializable");
    if let Some(y) = a.reverse_from {
        let r = reverse_time_cycle(&p, y, 5000, &tol)?;
        doc["reverse_time_cycle"] = serde_json::to_value(&r).expect("serializable");
    }
    match a.format {
        Format::Json => ctx.emit(
            "census.json",
            &(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"),
        )?,
        _ => {
            let mut s = format!("equilibrium: {:?}\n", census.equilibrium_stability);
            for c in &census.cycles {
                s.push_str(&format!(
                    "cycle amplitude {} period {} {:?} |mu|-1 {}\n",
                    sig6(c.amplitude),
                    sig6(c.period),
                    c.stability,
                    sig6(c.multipliers[0] - 1.0)
                ));
            }
            s.push_str(&format!("inconclusive seeds: {}\n", census.inconclusive));
            ctx.emit("census.txt", &s)?;
        }
    }
    if ctx.out_dir.is_some() {
        for (i, c) in census.cycles.iter().enumerate() {
            let tr = integrate(&p, c.state, c.period, &tol)?;
            ctx.emit(&format!("cycle_{i}.csv"), &tr.to_csv())?;
        }
    }
    if let Some(t) = a.trajectory {
        let start = match &a.start {
            Some(s) => [s[0], s[1], s[2]],
            None => wgss::Equilibrium::of(&p).state(),
        };
        let tr = integrate(&p, start, t, &tol)?;
        if tr.exit != wgss::orbit::ExitFlag::Completed {
            eprintln!(
                "trajectory left the phase domain at t = {} (schema v{TRAJECTORY_SCHEMA_VERSION})",
                tr.t.last().unwrap()
            );
        }
        ctx.emit("trajectory.csv", &tr.to_csv())?;
    }
    Ok(())
}

fn cmd_stability(ctx: &Ctx, a: &StabilityArgs) -> Outcome<()> {
    let lp = ctx.params(&a.params)?;
    let p = lp.params;
    let ev = eigenvalues(&p);
    let (p1, p2, p3) = characteristic_coefficients(&p);
    let ratio = match &lp.physical {
        Some(ph) => Some(ph.vyshnegradskii_ratio()?),
        None => None,
    };
    let doc = json!({
        "params": params_json(&p),
        "source": lp.source,
        "epsilon_c": p.epsilon_c(),
        "omega0": wgss::omega0(p.beta),
        "characteristic": [p1, p2, p3],
        "eigenvalues": ev.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "stable_routh_hurwitz": stable_by_routh_hurwitz(&p),
        "stable_eigenvalues": stable_by_eigenvalues(&p),
        "vyshnegradskii_ratio": ratio,
    });
    match a.format {
        Format::Json => ctx.emit(
            "stability.json",
            &(serde_json::to_string_pretty(&doc).expect("serializable") + "\n"),
        ),
        _ => {
            let mut s = String::new();
            s.push_str(&format!(
                "epsilon   {}\nepsilon_c {}\n",
                sig6(p.epsilon),
                sig6(p.epsilon_c())
            ));
            for z in ev {
                s.push_str(&format!("lambda = {}\n", sig6_complex(z)));
            }
            if let Some(r) = ratio {
                s.push_str(&format!("(b I / m) eta = {}\n", sig6(r)));
            }
            let verdict = if stable_by_routh_hurwitz(&p) {
                "stable"
            } else {
                "unstable"
            };
            s.push_str(&format!("equilibrium {verdict}\n"));
            ctx.emit("stability.txt", &s)
        }
    }
}
