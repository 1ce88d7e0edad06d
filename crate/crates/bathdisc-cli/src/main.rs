//! Command-line driver: discretize continuous baths, evolve the finite
//! models, scan validity horizons, integrate the master equation, run the
//! interacting impurity, and join error series. All outputs are flat text
//! files stamped with the config hash; identical configs give byte-identical
//! outputs.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use bathdisc::direct::{
    equal_weight_method, linear_discretize, log_discretize, mean_method, trapezoid_discretize,
};
use bathdisc::manybody::SparseHamiltonian;
use bathdisc::master::{
    correlation_functions, gamma_integral, integrate_me, BathCorrelation, CorrelationSource,
    CouplingOperator,
};
use bathdisc::{
    bsdo_discretize, chain_from_weight, error_series, filled_sea_overlap, greens_function,
    greens_overlap, lanczos_tridiagonalize, legendre_discretize, population, reference_solution,
    tmax_empirical, tmax_predict, BathError, DiscreteBath, RealSeries, Result, SingleParticleModel,
    SpectralDensity, TimeGrid, TimeSeries, TmaxKind,
};

use config::{DensitySection, DiscretizationSection, Method, PrecisionChoice, RunConfig};

#[derive(Parser)]
#[command(name = "bathdisc", version, about = "Bath discretization and real-time error analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discretize the configured density into a finite bath file
    Discretize(RunArgs),
    /// Evolve the single-particle model and emit population/Green's/error series
    Evolve(RunArgs),
    /// Sweep N_b and summarize empirical vs predicted validity horizons
    TmaxScan(RunArgs),
    /// Integrate the second-order master equation for a two-level system
    Mastereq(RunArgs),
    /// Exact-diagonalization impurity Green's function (interacting model)
    Manybody(RunArgs),
    /// Join two error CSVs and report their maxima
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output_dir in the config; default .)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured arithmetic precision
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    /// Record deterministic mode in output headers (reductions are always
    /// order-fixed, so this flag never changes results)
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// First error CSV (t,value)
    first: PathBuf,
    /// Second error CSV (t,value)
    second: PathBuf,
    /// Output directory (default .)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

impl PrecisionArg {
    fn choice(self) -> PrecisionChoice {
        match self {
            PrecisionArg::Double => PrecisionChoice::Double,
            PrecisionArg::Extended => PrecisionChoice::Extended,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Discretize(args) => Ctx::new(&args, "discretize").and_then(cmd_discretize),
        Command::Evolve(args) => Ctx::new(&args, "evolve").and_then(cmd_evolve),
        Command::TmaxScan(args) => Ctx::new(&args, "tmax-scan").and_then(cmd_tmax_scan),
        Command::Mastereq(args) => Ctx::new(&args, "mastereq").and_then(cmd_mastereq),
        Command::Manybody(args) => Ctx::new(&args, "manybody").and_then(cmd_manybody),
        Command::Compare(args) => cmd_compare(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 2 = configuration problem, 3 = a numerical tolerance was not met.
fn exit_code_for(err: &BathError) -> u8 {
    match err {
        BathError::QuadratureTolerance { .. }
        | BathError::RecurrenceInstability { .. }
        | BathError::EigenNonConvergence(_)
        | BathError::PoleEncountered(_)
        | BathError::ReferenceNotConverged { .. }
        | BathError::StepSizeCheck { .. }
        | BathError::OnSupportSingularity
        | BathError::InvalidState(_) => 3,
        _ => 2,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything a command needs: validated config, resolved paths, hash.
struct Ctx {
    config: RunConfig,
    command: &'static str,
    base_dir: PathBuf,
    out_dir: PathBuf,
    hash: String,
    precision: PrecisionChoice,
    deterministic: bool,
}

impl Ctx {
    fn new(args: &RunArgs, command: &'static str) -> Result<Ctx> {
        let (config, raw) = RunConfig::load(&args.config)?;
        let base_dir = args
            .config
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."))
            .to_path_buf();
        let out_dir = args
            .out
            .clone()
            .or_else(|| config.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&out_dir)?;
        let precision = args.precision.map(PrecisionArg::choice).unwrap_or(config.precision);
        Ok(Ctx {
            config,
            command,
            base_dir,
            out_dir,
            hash: sha256_hex(&raw),
            precision,
            deterministic: args.deterministic,
        })
    }

    fn density(&self) -> Result<SpectralDensity> {
        self.config.density.build(&self.base_dir)
    }

    /// Provenance header carried by every output file.
    fn stamp(&self, provenance: &str) -> String {
        format!(
            "# config_sha256={}\n# command={} precision={} deterministic={}{}\n",
            self.hash,
            self.command,
            self.precision.tag(),
            self.deterministic,
            if provenance.is_empty() {
                String::new()
            } else {
                format!("\n# {provenance}")
            }
        )
    }

    fn write(&self, name: &str, content: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, content)?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn grid(&self) -> TimeGrid {
        TimeGrid::spanning(self.config.time.dt, self.config.time.t_end)
    }

    /// Echo of every active config parameter, in fixed order.
    fn manifest_params(&self) -> Vec<(String, String)> {
        let mut m = Vec::new();
        density_params(&self.config.density, &mut m);
        if let Some(disc) = &self.config.discretization {
            m.push(("discretization.method".into(), disc.method.clone()));
            if let Some(n) = disc.n_b {
                m.push(("discretization.n_b".into(), n.to_string()));
            }
            if let Some(list) = &disc.n_b_list {
                let joined: Vec<String> = list.iter().map(|n| n.to_string()).collect();
                m.push(("discretization.n_b_list".into(), joined.join(",")));
            }
            if let Some(v) = disc.lambda_disc {
                m.push(("discretization.lambda_disc".into(), fmt(v)));
            }
            if let Some(v) = disc.x_accum {
                m.push(("discretization.x_accum".into(), fmt(v)));
            }
        }
        m.push(("model.eps0".into(), fmt(self.config.model.eps0)));
        m.push(("model.u".into(), fmt(self.config.model.u)));
        m.push(("model.geometry".into(), self.config.model.geometry.clone()));
        m.push(("time.dt".into(), fmt(self.config.time.dt)));
        m.push(("time.t_end".into(), fmt(self.config.time.t_end)));
        m.push(("error.threshold".into(), fmt(self.config.error.threshold)));
        m.push(("error.n_ref".into(), self.config.error.n_ref.to_string()));
        m.push(("precision".into(), self.precision.tag().into()));
        m.push(("deterministic".into(), self.deterministic.to_string()));
        m
    }

    fn write_manifest(&self, provenance: &str, entries: &[(String, String)]) -> Result<()> {
        let mut text = self.stamp(provenance);
        for (k, v) in entries {
            text.push_str(&format!("{k} = {v}\n"));
        }
        self.write("manifest.txt", &text)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn density_params(d: &DensitySection, m: &mut Vec<(String, String)>) {
    m.push(("density.family".into(), d.family.clone()));
    let pairs: [(&str, Option<f64>); 6] = [
        ("alpha", d.alpha),
        ("s", d.s),
        ("omega_c", d.omega_c),
        ("omega_max", d.omega_max),
        ("eta", d.eta),
        ("height", d.height),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            m.push((format!("density.{k}"), fmt(v)));
        }
    }
    if let Some(centers) = &d.centers {
        let joined: Vec<String> = centers.iter().map(|c| fmt(*c)).collect();
        m.push(("density.centers".into(), joined.join(",")));
    }
    if let Some(s) = d.support {
        m.push(("density.support".into(), format!("{},{}", fmt(s[0]), fmt(s[1]))));
    }
    if let Some(g) = &d.grid_file {
        m.push(("density.grid_file".into(), g.display().to_string()));
    }
}

/// Method dispatch onto the library's discretizers.
fn discretize_bath(
    j: &SpectralDensity,
    disc: &DiscretizationSection,
    n_b: usize,
    precision: PrecisionChoice,
) -> Result<DiscreteBath> {
    match disc.method()? {
        Method::Trapezoid => trapezoid_discretize(j, n_b),
        Method::Linear => linear_discretize(j, n_b),
        Method::Log => log_discretize(j, n_b, disc.lambda_disc.unwrap(), disc.x_accum.unwrap()),
        Method::Mean => mean_method(j, n_b),
        Method::EqualWeight => equal_weight_method(j, n_b),
        Method::Bsdo => bsdo_discretize(j, n_b, precision.to_precision()),
        Method::Legendre => legendre_discretize(j, n_b),
    }
}

fn cmd_discretize(ctx: Ctx) -> Result<()> {
    let j = ctx.density()?;
    let disc = ctx.config.discretization()?;
    let n_b = disc.single_n_b()?;
    let bath = discretize_bath(&j, disc, n_b, ctx.precision)?;
    let provenance = format!("method={} N_b={}", bath.method_tag(), bath.n_b());
    ctx.write("bath.txt", &format!("{}{}", ctx.stamp(&provenance), bath.to_text()))?;
    if disc.method()? == Method::Bsdo {
        let chain = chain_from_weight(&j, n_b, ctx.precision.to_precision())?;
        ctx.write("chain.txt", &format!("{}{}", ctx.stamp(&provenance), chain.to_text()))?;
    }
    println!(
        "discretized {} modes on [{:.6}, {:.6}], total weight {:.12e}",
        bath.n_b(),
        bath.source_support().0,
        bath.source_support().1,
        bath.total_weight()
    );
    Ok(())
}

/// Single-particle model per the configured geometry; `None` bath when
/// N_b = 0 (isolated level, pure phase evolution).
fn build_model(
    ctx: &Ctx,
    j: &SpectralDensity,
    n_b: usize,
) -> Result<(SingleParticleModel, Option<DiscreteBath>)> {
    let eps0 = ctx.config.model.eps0;
    if n_b == 0 {
        return Ok((SingleParticleModel::isolated(eps0), None));
    }
    let disc = ctx.config.discretization()?;
    let bath = discretize_bath(j, disc, n_b, ctx.precision)?;
    let model = match ctx.config.model.geometry.as_str() {
        "star" => SingleParticleModel::star(eps0, bath.clone()),
        _ => {
            let chain = if disc.method()? == Method::Bsdo {
                chain_from_weight(j, n_b, ctx.precision.to_precision())?
            } else {
                lanczos_tridiagonalize(&bath, ctx.precision.to_precision())?.chain
            };
            SingleParticleModel::chain(eps0, chain)
        }
    };
    Ok((model, Some(bath)))
}

fn max_before(err: &RealSeries, t_cut: f64) -> f64 {
    err.values()
        .iter()
        .enumerate()
        .filter(|(k, _)| err.grid().time(*k) <= t_cut)
        .fold(0.0f64, |m, (_, v)| m.max(*v))
}

fn cmd_evolve(ctx: Ctx) -> Result<()> {
    let j = ctx.density()?;
    let disc = ctx.config.discretization()?;
    let n_b = disc.single_n_b()?;
    let grid = ctx.grid();
    let (a, b) = j.support();
    let (model, bath) = build_model(&ctx, &j, n_b)?;

    let greens = greens_function(&model, &grid)?;
    let pop = population(&model, &grid)?;
    let lambda = match &bath {
        Some(bath) => bath.lambda_time(&grid),
        None => TimeSeries::new(grid.clone(), vec![Complex64::new(0.0, 0.0); grid.len()]),
    };
    let reference = reference_solution(&j, ctx.config.model.eps0, &grid, ctx.config.error.n_ref)?;
    let err = error_series(&reference, &greens)?;

    let provenance = format!("method={} N_b={n_b}", disc.method()?.tag());
    let s = ctx.stamp(&provenance);
    ctx.write("population.csv", &format!("{s}{}", pop.to_csv()))?;
    ctx.write("greens.csv", &format!("{s}{}", greens.to_csv()))?;
    ctx.write("lambda_discrete.csv", &format!("{s}{}", lambda.to_csv()))?;
    ctx.write("reference.csv", &format!("{s}{}", reference.to_csv()))?;
    ctx.write("error.csv", &format!("{s}{}", err.to_csv()))?;

    let mut entries = ctx.manifest_params();
    let (pred_bath, pred_sys) = if n_b == 0 {
        (0.0, 0.0)
    } else {
        (
            tmax_predict(n_b, a, b, TmaxKind::Bath),
            tmax_predict(n_b, a, b, TmaxKind::System),
        )
    };
    let empirical = tmax_empirical(&err, ctx.config.error.threshold);
    entries.push(("t_max_predicted_bath".into(), fmt(pred_bath)));
    entries.push(("t_max_predicted_system".into(), fmt(pred_sys)));
    entries.push(("t_max_empirical".into(), fmt(empirical)));
    entries.push(("max_error_before_tmax".into(), fmt(max_before(&err, pred_sys))));
    ctx.write_manifest(&provenance, &entries)?;
    println!(
        "t_max predicted (system) {pred_sys:.6}, empirical {empirical:.6} at threshold {}",
        ctx.config.error.threshold
    );
    Ok(())
}

struct ScanRow {
    n_b: usize,
    empirical: f64,
    predicted: f64,
    max_before: f64,
}

fn cmd_tmax_scan(ctx: Ctx) -> Result<()> {
    let j = ctx.density()?;
    let disc = ctx.config.discretization()?;
    let list = disc.n_b_values();
    let grid = ctx.grid();
    let (a, b) = j.support();
    let eps0 = ctx.config.model.eps0;
    let threshold = ctx.config.error.threshold;
    let reference = reference_solution(&j, eps0, &grid, ctx.config.error.n_ref)?;

    // independent sweep elements in a worker pool, merged back in list order
    let rows: Result<Vec<ScanRow>> = list
        .par_iter()
        .map(|&n_b| {
            let bath = discretize_bath(&j, disc, n_b, ctx.precision)?;
            let model = SingleParticleModel::star(eps0, bath);
            let g = greens_function(&model, &grid)?;
            let err = error_series(&reference, &g)?;
            let predicted = tmax_predict(n_b, a, b, TmaxKind::System);
            Ok(ScanRow {
                n_b,
                empirical: tmax_empirical(&err, threshold),
                predicted,
                max_before: max_before(&err, predicted),
            })
        })
        .collect();
    let rows = rows?;

    let method = disc.method()?.tag();
    let mut csv = ctx.stamp(&format!("method={method}"));
    csv.push_str("method,N_b,t_max_empirical,t_max_predicted,max_error_before_tmax\n");
    for r in &rows {
        csv.push_str(&format!(
            "{method},{},{},{},{}\n",
            r.n_b,
            fmt(r.empirical),
            fmt(r.predicted),
            fmt(r.max_before)
        ));
    }
    ctx.write("summary.csv", &csv)?;

    // least-squares slope over rows whose empirical horizon is on the grid
    let finite: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.empirical.is_finite())
        .map(|r| (r.n_b as f64, r.empirical))
        .collect();
    let slope = if finite.len() >= 2 {
        let n = finite.len() as f64;
        let sx: f64 = finite.iter().map(|p| p.0).sum();
        let sy: f64 = finite.iter().map(|p| p.1).sum();
        let sxx: f64 = finite.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = finite.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };
    let mut entries = ctx.manifest_params();
    entries.push(("slope_empirical".into(), fmt(slope)));
    entries.push(("slope_predicted".into(), fmt(4.0 / (b - a))));
    ctx.write_manifest(&format!("method={method}"), &entries)?;
    println!("empirical slope {slope:.6} vs predicted {:.6}", 4.0 / (b - a));
    Ok(())
}

fn cmd_mastereq(ctx: Ctx) -> Result<()> {
    let j = ctx.density()?;
    let me = &ctx.config.mastereq;
    let omega_s = ctx.config.model.eps0;
    let grid = ctx.grid();
    // correlation functions live on the integrator's half-step lattice
    let half_grid = TimeGrid::new(0.5 * grid.dt(), 2 * (grid.len() - 1) + 1);
    let coupling = match me.coupling.as_str() {
        "sigma_minus" => CouplingOperator::SigmaMinus,
        _ => CouplingOperator::SigmaX,
    };

    let mut provenance = format!("source={} coupling={} beta={}", me.source, me.coupling, me.beta);
    let mut extra: Vec<(String, String)> = Vec::new();
    let corr: BathCorrelation = if me.source == "discrete" {
        let disc = ctx.config.discretization()?;
        let n_b = disc.single_n_b()?;
        let bath = discretize_bath(&j, disc, n_b, ctx.precision)?;
        let (a, b) = j.support();
        provenance = format!("{provenance} method={} N_b={n_b}", disc.method()?.tag());
        extra.push((
            "t_max_predicted_bath".into(),
            fmt(tmax_predict(n_b, a, b, TmaxKind::Bath)),
        ));
        correlation_functions(CorrelationSource::Discrete(&bath), me.beta, &half_grid)?
    } else {
        correlation_functions(CorrelationSource::Continuous(&j), me.beta, &half_grid)?
    };

    let gamma = gamma_integral(&corr, omega_s, &grid)?;
    let run = integrate_me(omega_s, &corr, coupling, &grid)?;

    let s = ctx.stamp(&provenance);
    let mut main_csv = format!("{s}t,population,coherence_abs,re_gamma,im_gamma\n");
    for k in 0..grid.len() {
        main_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(grid.time(k)),
            fmt(run.states[k].population()),
            fmt(run.states[k].coherence().norm()),
            fmt(gamma.values()[k].re),
            fmt(gamma.values()[k].im)
        ));
    }
    ctx.write("mastereq.csv", &main_csv)?;

    let mut corr_csv = format!("{s}t,re_alpha1,im_alpha1,re_alpha2,im_alpha2\n");
    for k in 0..half_grid.len() {
        let a1 = corr.alpha1().values()[k];
        let a2 = corr.alpha2().values()[k];
        corr_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(half_grid.time(k)),
            fmt(a1.re),
            fmt(a1.im),
            fmt(a2.re),
            fmt(a2.im)
        ));
    }
    ctx.write("correlation.csv", &corr_csv)?;

    let mut entries = ctx.manifest_params();
    entries.push(("mastereq.beta".into(), fmt(me.beta)));
    entries.push(("mastereq.coupling".into(), me.coupling.clone()));
    entries.push(("mastereq.source".into(), me.source.clone()));
    entries.push(("omega_s".into(), fmt(omega_s)));
    entries.push(("step_defect".into(), fmt(run.step_defect)));
    entries.extend(extra);
    ctx.write_manifest(&provenance, &entries)?;
    println!(
        "integrated to t = {:.6}, final population {:.12e}, step defect {:.3e}",
        grid.t_end(),
        run.states[grid.len() - 1].population(),
        run.step_defect
    );
    Ok(())
}

fn cmd_manybody(ctx: Ctx) -> Result<()> {
    let j = ctx.density()?;
    let disc = ctx.config.discretization()?;
    let n_b = disc.single_n_b()?;
    let u = ctx.config.model.u;
    let grid = ctx.grid();

    let bath = if n_b == 0 {
        None
    } else {
        Some(discretize_bath(&j, disc, n_b, ctx.precision)?)
    };
    let h = match &bath {
        Some(bath) => SparseHamiltonian::from_modes(u, bath.energies(), bath.weights())?,
        None => SparseHamiltonian::from_modes(u, &[], &[])?,
    };
    let run = greens_overlap(&h, &grid)?;

    let provenance = format!("method={} N_b={n_b} U={u}", disc.method()?.tag());
    ctx.write(
        "greens.csv",
        &format!("{}{}", ctx.stamp(&provenance), run.series.to_csv()),
    )?;

    let mut entries = ctx.manifest_params();
    entries.push(("observable".into(), "iG(t) = <psi0| exp(-i(H-E0)t) |psi0>".into()));
    entries.push(("impurity_eps".into(), fmt(-0.5 * u)));
    entries.push(("ground_energy".into(), fmt(run.ground_energy)));
    entries.push((
        "sector".into(),
        format!("{},{}", run.sector.0, run.sector.1),
    ));
    entries.push(("excitation_weight".into(), fmt(run.excitation_weight)));
    match &run.degeneracy {
        Some(rep) => {
            let sectors: Vec<String> = rep
                .sectors
                .iter()
                .map(|(a, b)| format!("{a},{b}"))
                .collect();
            entries.push(("degenerate_sectors".into(), sectors.join(";")));
            entries.push(("degeneracy_gap".into(), fmt(rep.gap)));
        }
        None => entries.push(("degenerate_sectors".into(), "none".into())),
    }
    entries.push(("max_krylov_dim".into(), run.max_krylov_dim.to_string()));
    entries.push(("norm_drift".into(), fmt(run.norm_drift)));

    // the noninteracting model has an exact quadratic oracle: report the match
    if u == 0.0 {
        if let Some(bath) = &bath {
            let model = SingleParticleModel::star(0.0, bath.clone());
            let oracle = filled_sea_overlap(&model, &grid)?;
            let dev = run
                .series
                .values()
                .iter()
                .zip(oracle.values())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0f64, f64::max);
            entries.push(("u0_oracle_max_deviation".into(), fmt(dev)));
            println!("U=0 quadratic-oracle max deviation {dev:.3e}");
        }
    }
    ctx.write_manifest(&provenance, &entries)?;
    println!(
        "ground energy {:.12e} in sector ({},{}), norm drift {:.3e}",
        run.ground_energy, run.sector.0, run.sector.1, run.norm_drift
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let raw_a = fs::read(&args.first)?;
    let raw_b = fs::read(&args.second)?;
    let a = RealSeries::from_csv(std::str::from_utf8(&raw_a).map_err(|_| {
        BathError::Parse(format!("{}: not UTF-8", args.first.display()))
    })?)?;
    let b = RealSeries::from_csv(std::str::from_utf8(&raw_b).map_err(|_| {
        BathError::Parse(format!("{}: not UTF-8", args.second.display()))
    })?)?;
    if a.grid().len() != b.grid().len()
        || (a.grid().dt() - b.grid().dt()).abs() > 1e-12 * a.grid().dt()
    {
        return Err(BathError::GridMismatch(format!(
            "{} has {} points at dt {:e}, {} has {} at dt {:e}",
            args.first.display(),
            a.grid().len(),
            a.grid().dt(),
            args.second.display(),
            b.grid().len(),
            b.grid().dt()
        )));
    }
    let max_a = a.max_value();
    let max_b = b.max_value();
    let ratio = max_a / max_b;
    let out_dir = args.out.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)?;
    let mut csv = format!(
        "# inputs_sha256={},{}\n# command=compare\n# max_first={} max_second={} ratio_first_to_second={}\nt,first,second\n",
        sha256_hex(&raw_a),
        sha256_hex(&raw_b),
        fmt(max_a),
        fmt(max_b),
        fmt(ratio)
    );
    for k in 0..a.grid().len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt(a.grid().time(k)),
            fmt(a.values()[k]),
            fmt(b.values()[k])
        ));
    }
    let path = out_dir.join("compare.csv");
    fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    println!("max_first = {max_a:.12e}");
    println!("max_second = {max_b:.12e}");
    println!("ratio_first_to_second = {ratio:.12e}");
    Ok(())
}
