//! Subcommand implementations.

use crate::config::{output_dir, parse_lambda_grid, RunConfig};
use crate::plots;
use anyhow::{Context, Result};
use clap::Args;
use starkspec::oscillatory::{self, PhaseSpec, SsetForm};
use starkspec::potentials::{parse_potential, preset_catalog};
use starkspec::prufer;
use starkspec::report;
use starkspec::subordinacy::{self, SurveyConfig};
use std::io::Write;
use std::path::{Path, PathBuf};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

#[derive(Args, Clone)]
pub struct SurveyArgs {
    /// Potential preset, e.g. `power_law{A=1,beta=0.5}`.
    #[arg(long)]
    potential: Option<String>,
    /// λ-grid: `a:b:n` or comma-separated values.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    xi0: Option<f64>,
    /// Prüfer horizon Ξ.
    #[arg(long = "Xi")]
    xi_max: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    /// Oscillation tolerance of the amplitude-integral convergence test.
    #[arg(long = "tol-integral6")]
    tol_integral6: Option<f64>,
    /// Config file (flat TOML); CLI flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $STARKSPEC_OUT_DIR or `.`).
    #[arg(long)]
    out: Option<String>,
    /// Emit static SVG plots per energy.
    #[arg(long)]
    plots: bool,
    /// Emit per-energy trajectory CSVs.
    #[arg(long)]
    trajectories: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

impl SurveyArgs {
    fn into_run_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_toml_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.potential {
            cfg.potential = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.xi0 {
            cfg.xi0 = v;
        }
        if let Some(v) = self.xi_max {
            cfg.xi_max = v;
        }
        if let Some(v) = self.rtol {
            cfg.rtol = v;
        }
        if let Some(v) = self.tol_integral6 {
            cfg.integral6_tolerance = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.out {
            cfg.output_dir = Some(v);
        }
        cfg.plots |= self.plots;
        cfg.trajectories |= self.trajectories;
        Ok(cfg)
    }
}

pub fn cmd_survey(args: SurveyArgs) -> Result<i32> {
    let cfg = match args.into_run_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(2);
        }
    };
    let (q, lambdas) = match (parse_potential(&cfg.potential), parse_lambda_grid(&cfg.lambda)) {
        (Ok(q), Ok(l)) => (q, l),
        (Err(e), _) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
        (_, Err(e)) => {
            eprintln!("error: {e:#}");
            return Ok(2);
        }
    };
    let sc = cfg.survey_config();
    let dir = output_dir(cfg.output_dir.as_deref());

    // Fan the per-energy work units out to a bounded pool; results land in
    // indexed slots so assembly is scheduling-independent.
    let workers = if cfg.workers == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        cfg.workers
    }
    .min(lambdas.len().max(1));
    let mut verdicts: Vec<Option<prufer::SpectralVerdict>> = vec![None; lambdas.len()];
    {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut verdicts);
        let q_ref = &q;
        let sc_ref = &sc;
        let lambdas_ref = &lambdas;
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= lambdas_ref.len() {
                        break;
                    }
                    let v = subordinacy::survey_single_lambda(q_ref, lambdas_ref[i], sc_ref);
                    slots.lock().unwrap()[i] = Some(v);
                });
            }
        });
    }
    let verdicts: Vec<prufer::SpectralVerdict> =
        verdicts.into_iter().map(|v| v.expect("slot filled")).collect();
    let report_data = subordinacy::assemble_report(&q, &lambdas, &sc, verdicts);

    // All writes happen here, after the pool has been joined.
    write_file(&dir.join("survey_report.json"), &report_data.to_json())?;
    println!(
        "survey: {} energies, {} failures -> {}",
        report_data.verdicts.len(),
        report_data.failures,
        dir.join("survey_report.json").display()
    );

    if cfg.trajectories || cfg.plots {
        emit_per_lambda_artifacts(&q, &report_data, &cfg, &sc, &dir)?;
    }

    if report_data.failures == report_data.verdicts.len() && !report_data.verdicts.is_empty() {
        return Ok(1);
    }
    Ok(0)
}

fn emit_per_lambda_artifacts(
    q: &starkspec::PotentialSpec,
    report_data: &subordinacy::SurveyReport,
    cfg: &RunConfig,
    sc: &SurveyConfig,
    dir: &Path,
) -> Result<()> {
    for (i, v) in report_data.verdicts.iter().enumerate() {
        if v.error.is_some() {
            continue;
        }
        let lambda = v.lambda;
        let start = match prufer::initial_state(q, lambda, sc.theta0, sc.xi0) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let traj = match prufer::integrate_prufer(q, lambda, start, sc.xi_max, sc.rtol) {
            Ok(t) => t,
            Err(_) => continue,
        };
        if cfg.trajectories {
            let csv = report::trajectory_csv(&traj, &report_data.config_hash);
            write_file(&dir.join(format!("trajectory_{i:03}.csv")), &csv)?;
        }
        if cfg.plots {
            let logr: Vec<(f64, f64)> = traj
                .diagnostic_rows()
                .iter()
                .map(|r| (r.xi, r.log_r))
                .collect();
            let svg = plots::line_plot(
                &plots::PlotSpec {
                    title: &format!("log R vs xi (lambda = {lambda})"),
                    x_label: "xi",
                    y_label: "log R",
                    log_x: true,
                    log_y: false,
                },
                &[plots::Series {
                    points: &logr,
                    color: "#1f77b4",
                }],
            );
            write_file(&dir.join(format!("logR_{i:03}.svg")), &svg)?;

            let partials = traj.integral6_partials();
            let svg = plots::line_plot(
                &plots::PlotSpec {
                    title: &format!("amplitude-integral partials (lambda = {lambda})"),
                    x_label: "N",
                    y_label: "integral",
                    log_x: true,
                    log_y: false,
                },
                &[plots::Series {
                    points: partials,
                    color: "#d62728",
                }],
            );
            write_file(&dir.join(format!("integral6_{i:03}.svg")), &svg)?;

            // L² growth against the square-root law.
            if let Ok(x_max) = starkspec::LiouvilleMap::new().x_of_xi(sc.xi_max) {
                if let Ok(sol) = subordinacy::solve_original(q, lambda, sc.theta0, x_max) {
                    let pts: Vec<(f64, f64)> = sol
                        .l2_partials()
                        .iter()
                        .map(|&(n, z)| (n, z / n.sqrt()))
                        .collect();
                    let svg = plots::line_plot(
                        &plots::PlotSpec {
                            title: &format!("L2 growth / sqrt(N) (lambda = {lambda})"),
                            x_label: "N",
                            y_label: "integral / sqrt(N)",
                            log_x: true,
                            log_y: false,
                        },
                        &[plots::Series {
                            points: &pts,
                            color: "#2ca02c",
                        }],
                    );
                    write_file(&dir.join(format!("l2_{i:03}.svg")), &svg)?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Args, Clone)]
pub struct TrajectoryArgs {
    #[arg(long)]
    potential: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    xi0: f64,
    #[arg(long = "Xi", default_value_t = 1e4)]
    xi_max: f64,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    theta0: f64,
    /// Output CSV path (default: trajectory.csv in the output dir).
    #[arg(long)]
    out: Option<String>,
}

pub fn cmd_trajectory(args: TrajectoryArgs) -> Result<i32> {
    let q = match parse_potential(&args.potential) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
    };
    let start = prufer::initial_state(&q, args.lambda, args.theta0, args.xi0)?;
    let traj = prufer::integrate_prufer(&q, args.lambda, start, args.xi_max, args.rtol)?;
    let hash = report::fnv1a_hex(
        format!(
            "{}|{}|{}|{}|{}|{}",
            args.potential, args.lambda, args.xi0, args.xi_max, args.rtol, args.theta0
        )
        .as_bytes(),
    );
    let csv = report::trajectory_csv(&traj, &hash);
    let path = match &args.out {
        Some(p) => PathBuf::from(p),
        None => output_dir(None).join("trajectory.csv"),
    };
    write_file(&path, &csv)?;
    println!("trajectory: {} rows -> {}", traj.diagnostic_rows().len(), path.display());
    Ok(0)
}

#[derive(Args, Clone)]
pub struct TailsArgs {
    /// `lemma13` (power-weight linear phase) or `cubic_phase`.
    #[arg(long)]
    kind: String,
    /// Power weight p for lemma13 tails (p <= 0).
    #[arg(long, default_value_t = -2.0 / 3.0, allow_hyphen_values = true)]
    p: f64,
    /// Lower limits N, comma-separated.
    #[arg(long, default_value = "100,1000,10000")]
    n: String,
    /// Upper truncation Ξ.
    #[arg(long = "Xi-max")]
    xi_max: Option<f64>,
    /// Declared decay exponent of the cubic-phase amplitude (1+ξ)^{-decay}.
    #[arg(long, default_value_t = 0.9)]
    decay: f64,
    /// Frequency λ of the cubic-root phase.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    out: Option<String>,
}

pub fn cmd_tails(args: TailsArgs) -> Result<i32> {
    let ns: Vec<f64> = match args
        .n
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
    {
        Ok(v) if !v.is_empty() => v,
        _ => {
            eprintln!("error: invalid N list `{}`", args.n);
            return Ok(2);
        }
    };
    let n_hi = ns.iter().cloned().fold(0.0, f64::max);
    let tails = match args.kind.as_str() {
        "lemma13" => {
            let xi_max = args.xi_max.unwrap_or(100.0 * n_hi);
            oscillatory::tail_power_phase_table(args.p, &PhaseSpec::linear(), &ns, xi_max)?
        }
        "cubic_phase" => {
            let xi_max = args.xi_max.unwrap_or(100.0 * n_hi);
            let decay = args.decay;
            let f = oscillatory::DecayingFn::new(move |xi: f64| (1.0 + xi).powf(-decay), decay, 1.0);
            ns.iter()
                .map(|&n| {
                    oscillatory::cubic_phase_integral(&f, args.lambda, n, xi_max)
                        .map(|r| r.tail)
                })
                .collect::<starkspec::Result<Vec<_>>>()?
        }
        other => {
            eprintln!("error: unknown tail kind `{other}` (lemma13 | cubic_phase)");
            return Ok(2);
        }
    };
    let hash = report::fnv1a_hex(
        format!(
            "{}|{}|{}|{:?}|{}|{}",
            args.kind, args.p, args.n, args.xi_max, args.decay, args.lambda
        )
        .as_bytes(),
    );
    let csv = report::tails_csv(&tails, &hash);
    let path = match &args.out {
        Some(p) => PathBuf::from(p),
        None => output_dir(None).join("tails.csv"),
    };
    write_file(&path, &csv)?;
    println!("tails: {} rows -> {}", tails.len(), path.display());
    Ok(0)
}

#[derive(Args, Clone)]
pub struct SsetArgs {
    #[arg(long)]
    potential: String,
    /// λ-grid: `a:b:n` or comma-separated values.
    #[arg(long)]
    lambda: String,
    /// Window sizes N, comma-separated.
    #[arg(long, default_value = "50,100")]
    window: String,
    /// `proof_end` (canonical) or `theorem_statement`.
    #[arg(long, default_value = "proof_end")]
    form: String,
    #[arg(long)]
    out: Option<String>,
}

pub fn cmd_sset(args: SsetArgs) -> Result<i32> {
    let q = match parse_potential(&args.potential) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(2);
        }
    };
    let lambdas = match parse_lambda_grid(&args.lambda) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(2);
        }
    };
    let windows: Vec<f64> = match args
        .window
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
    {
        Ok(v) if !v.is_empty() => v,
        _ => {
            eprintln!("error: invalid window list `{}`", args.window);
            return Ok(2);
        }
    };
    let form = match args.form.as_str() {
        "proof_end" => SsetForm::ProofEnd,
        "theorem_statement" => SsetForm::TheoremStatement,
        other => {
            eprintln!("error: unknown form `{other}`");
            return Ok(2);
        }
    };

    #[derive(serde::Serialize)]
    struct SsetReport {
        toolkit_version: String,
        config_hash: String,
        potential: starkspec::PotentialSpec,
        form: SsetForm,
        records: Vec<oscillatory::SsetDiagnostic>,
    }
    let mut records = Vec::new();
    for &lambda in &lambdas {
        for &w in &windows {
            records.push(oscillatory::s_set_diagnostic(&q, lambda, w, form)?);
        }
    }
    let hash = report::fnv1a_hex(
        format!("{}|{}|{}|{}", args.potential, args.lambda, args.window, args.form).as_bytes(),
    );
    let out = SsetReport {
        toolkit_version: starkspec::VERSION.to_string(),
        config_hash: hash,
        potential: q,
        form,
        records,
    };
    let path = match &args.out {
        Some(p) => PathBuf::from(p),
        None => output_dir(None).join("sset.json"),
    };
    write_file(&path, &serde_json::to_string_pretty(&out)?)?;
    println!("sset: {} records -> {}", out.records.len(), path.display());
    Ok(0)
}

pub fn cmd_presets() -> Result<i32> {
    println!("{:<20} {:<28} description", "name", "parameters");
    for p in preset_catalog() {
        println!("{:<20} {:<28} {}", p.name, p.parameters, p.description);
    }
    Ok(0)
}
