//! Direct-solution layer: integrates the original Stark equation, measures
//! L² growth and solution-pair norm ratios, fits the oscillatory asymptotic
//! form, and assembles per-energy survey verdicts.
//!
//! Absence of a subordinate solution at an energy — no solution whose
//! `L²(0,N)` norm is asymptotically negligible against the others — is the
//! criterion that places the energy in the essential support of the
//! absolutely continuous spectrum. At finite horizon that limit statement
//! degrades to a ratio with a trend, which is exactly what this module
//! reports; every report carries the finite-horizon disclaimer.
//!
//! Integration strategy: the original equation is integrated directly only
//! on `[0, x(ξ0)]`; beyond the handoff the Liouville-transformed equation
//! is integrated instead and pulled back, so the oscillation stays at unit
//! frequency and accuracy does not degrade with the growing momentum. The
//! two representations are integrated across an overlap decade and compared
//! as a quality gate.

use crate::error::{Error, Result};
use crate::fit;
use crate::ode::{self, OdeOptions, StepRecord};
use crate::potentials::PotentialSpec;
use crate::prufer::{self, SpectralVerdict, VerdictKind};
use crate::transforms::{self, LIOUVILLE_C};
use serde::{Deserialize, Serialize};

/// Sampled solution of the original equation with accumulated L² data.
#[derive(Clone, Debug)]
pub struct SolutionSample {
    pub lambda: f64,
    /// Boundary angle when the solution came from `(sin θ0, cos θ0)` data.
    pub theta0: Option<f64>,
    grid: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
    l2_cum: Vec<f64>,
    l2_partials: Vec<(f64, f64)>,
    handoff_x: f64,
}

/// Options for [`solve_original_with`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Local error tolerance per unit step.
    pub rtol: f64,
    /// Handoff point in the transformed variable; the direct equation is
    /// integrated on `[0, x(ξ0)]`.
    pub xi0: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rtol: 1e-10,
            xi0: 1.0,
        }
    }
}

/// Integrate the original equation from `x = 0` with boundary data
/// `(u, u')(0) = (sin θ0, cos θ0)` out to `x_max`, with default options.
pub fn solve_original(
    q: &PotentialSpec,
    lambda: f64,
    theta0: f64,
    x_max: f64,
) -> Result<SolutionSample> {
    solve_original_with(q, lambda, theta0, x_max, &SolveOptions::default())
}

/// [`solve_original`] with explicit tolerances, also accepting general
/// boundary data through [`solve_original_from_data`].
pub fn solve_original_with(
    q: &PotentialSpec,
    lambda: f64,
    theta0: f64,
    x_max: f64,
    opts: &SolveOptions,
) -> Result<SolutionSample> {
    let mut sol = solve_original_from_data(q, lambda, theta0.sin(), theta0.cos(), x_max, opts)?;
    sol.theta0 = Some(theta0);
    Ok(sol)
}

/// Integration from general boundary data `(u, u')(0)`.
pub fn solve_original_from_data(
    q: &PotentialSpec,
    lambda: f64,
    u0: f64,
    du0: f64,
    x_max: f64,
    opts: &SolveOptions,
) -> Result<SolutionSample> {
    if !(x_max >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "x_max must be at least 1, got {x_max}"
        )));
    }
    if q.max_x() < x_max {
        return Err(Error::Range(format!(
            "potential tabulated to x = {} but the solve needs x = {x_max}",
            q.max_x()
        )));
    }
    let map = transforms::LiouvilleMap::new();
    let x_handoff = map.x_of_xi(opts.xi0)?;
    let direct_end = x_handoff.min(x_max);

    let prep = q.prepared();
    let direct_rhs = |x: f64, y: &[f64; 3]| [y[1], (prep.eval(x) - x - lambda) * y[0], y[0] * y[0]];
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.rtol * 1e-2,
        ..OdeOptions::default()
    };

    // Direct region, sampled on a uniform grid.
    let mut grid = Vec::new();
    let mut u = Vec::new();
    let mut du = Vec::new();
    let mut l2 = Vec::new();
    let direct_cells = 256usize;
    let dxd = direct_end / direct_cells as f64;
    {
        let mut next = 0usize;
        let mut sink = |rec: &StepRecord<3>| {
            while next <= direct_cells {
                let x = next as f64 * dxd;
                if x > rec.t1 + 1e-300 {
                    break;
                }
                if x >= rec.t0 {
                    let y = if x == 0.0 { rec.y0 } else { rec.eval(x) };
                    grid.push(x);
                    u.push(y[0]);
                    du.push(y[1]);
                    l2.push(y[2]);
                    next += 1;
                } else {
                    next += 1;
                }
            }
        };
        ode::integrate(
            direct_rhs,
            0.0,
            [u0, du0, 0.0],
            direct_end,
            &ode_opts,
            &mut sink,
        )?;
    }
    if grid.is_empty() || *grid.last().unwrap() < direct_end - dxd {
        return Err(Error::Integration("direct-region sampling failed".into()));
    }

    let (ul, dul, zl) = (*u.last().unwrap(), *du.last().unwrap(), *l2.last().unwrap());

    if x_max <= x_handoff {
        let l2_partials = vec![(direct_end, zl)];
        return Ok(SolutionSample {
            lambda,
            theta0: None,
            grid,
            u,
            du,
            l2_cum: l2,
            l2_partials,
            handoff_x: direct_end,
        });
    }

    // Transformed region: state (ω, ω', z) with z' = ω² / (c ξ^{2/3}).
    let (omega0, domega0) = transforms::push_solution(ul, dul, x_handoff)?;
    let xi_end = map.xi_of_x(x_max)?;
    let trans_rhs = |xi: f64, y: &[f64; 3]| {
        let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
        let v = -5.0 / (36.0 * xi * xi) + (prep.eval(x) - lambda) / x;
        [y[1], (v - 1.0) * y[0], y[0] * y[0] / x]
    };

    // Overlap gate: integrate both representations across one decade and
    // compare the pushed-forward direct solution against (ω, ω').
    let overlap_end_x = (10.0 * x_handoff).min(x_max);
    let xi_overlap_end = map.xi_of_x(overlap_end_x)?;
    let mut trans_steps = ode::CollectSteps::<3>::default();
    let (y_ov, _) = ode::integrate(
        trans_rhs,
        opts.xi0,
        [omega0, domega0, zl],
        xi_overlap_end,
        &ode_opts,
        &mut trans_steps,
    )?;
    if overlap_end_x > 1.2 * x_handoff {
        let mut direct_steps = ode::CollectSteps::<3>::default();
        ode::integrate(
            direct_rhs,
            x_handoff,
            [ul, dul, zl],
            overlap_end_x,
            &ode_opts,
            &mut direct_steps,
        )?;
        let eval_steps = |steps: &[StepRecord<3>], t: f64| -> [f64; 3] {
            let i = steps.partition_point(|s| s.t1 < t).min(steps.len() - 1);
            steps[i].eval(t)
        };
        for &xp in &fit::geomspace(1.05 * x_handoff, 0.999 * overlap_end_x, 9) {
            let yd = eval_steps(&direct_steps.steps, xp);
            let (wp, dwp) = transforms::push_solution(yd[0], yd[1], xp)?;
            let yt = eval_steps(&trans_steps.steps, map.xi_of_x(xp)?);
            let scale = yt[0].abs().max(yt[1].abs()).max(1e-12);
            let err = ((wp - yt[0]).abs()).max((dwp - yt[1]).abs()) / scale;
            if err > 1e-6 {
                return Err(Error::Integration(format!(
                    "representation mismatch {err:.3e} at x = {xp:.4} (overlap gate)"
                )));
            }
        }
    }

    // Stream the rest of the transformed range onto deterministic grids.
    let xi_grid_step = std::f64::consts::FRAC_PI_4;
    let mut next_xi = opts.xi0 + xi_grid_step;
    let partial_xs = {
        let lo = x_handoff;
        let decades = (x_max / lo).log10();
        let count = ((64.0 * decades).ceil() as usize).max(2) + 1;
        fit::geomspace(lo, x_max, count)
    };
    let mut partial_xis: Vec<f64> = partial_xs
        .iter()
        .map(|&x| map.xi_of_x(x).expect("positive"))
        .collect();
    if let Some(last) = partial_xis.last_mut() {
        *last = xi_end;
    }
    let mut l2_partials: Vec<(f64, f64)> = Vec::with_capacity(partial_xis.len());
    let mut next_partial = 0usize;

    {
        let mut observe = |rec: &StepRecord<3>| {
            while next_xi <= rec.t1 {
                if next_xi >= rec.t0 {
                    let y = rec.eval(next_xi);
                    let x = map.x_of_xi(next_xi).expect("positive");
                    if let Ok((uu, duu)) = transforms::pull_solution(y[0], y[1], next_xi) {
                        grid.push(x);
                        u.push(uu);
                        du.push(duu);
                        l2.push(y[2]);
                    }
                }
                next_xi += xi_grid_step;
            }
            while next_partial < partial_xis.len() && partial_xis[next_partial] <= rec.t1 {
                let xi = partial_xis[next_partial].max(rec.t0);
                let y = rec.eval(xi);
                l2_partials.push((map.x_of_xi(xi).expect("positive"), y[2]));
                next_partial += 1;
            }
        };
        for rec in &trans_steps.steps {
            observe(rec);
        }
        let (y_end, _) = ode::integrate(
            trans_rhs,
            xi_overlap_end,
            y_ov,
            xi_end,
            &ode_opts,
            &mut observe,
        )?;
        // Final point exactly at x_max.
        let (uu, duu) = transforms::pull_solution(y_end[0], y_end[1], xi_end)?;
        if *grid.last().unwrap() < x_max {
            grid.push(x_max);
            u.push(uu);
            du.push(duu);
            l2.push(y_end[2]);
        }
        if l2_partials.last().map(|p| p.0) != Some(x_max) {
            l2_partials.push((x_max, y_end[2]));
        }
    }

    Ok(SolutionSample {
        lambda,
        theta0: None,
        grid,
        u,
        du,
        l2_cum: l2,
        l2_partials,
        handoff_x: x_handoff,
    })
}

impl SolutionSample {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn u_prime(&self) -> &[f64] {
        &self.du
    }

    pub fn handoff_x(&self) -> f64 {
        self.handoff_x
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Stored partial norms `(N, ∫₀^N u²)` on the 64-per-decade grid.
    pub fn l2_partials(&self) -> &[(f64, f64)] {
        &self.l2_partials
    }

    /// `∫₀^N u² dx` from the accumulated samples.
    pub fn l2_growth(&self, n: f64) -> Result<f64> {
        if n < 0.0 || n > self.x_max() * (1.0 + 1e-12) {
            return Err(Error::Range(format!(
                "N = {n} outside the solution grid [0, {}]",
                self.x_max()
            )));
        }
        let idx = self.grid.partition_point(|&x| x <= n);
        if idx == 0 {
            return Ok(0.0);
        }
        if idx >= self.grid.len() {
            return Ok(*self.l2_cum.last().unwrap());
        }
        let (xa, xb) = (self.grid[idx - 1], self.grid[idx]);
        let (za, zb) = (self.l2_cum[idx - 1], self.l2_cum[idx]);
        let t = if xb > xa { (n - xa) / (xb - xa) } else { 0.0 };
        Ok(za + t * (zb - za))
    }

    /// Wronskian `u₁ u₂' - u₁' u₂` against another solution on the shared
    /// grid; constant in exact arithmetic.
    pub fn wronskian_against(&self, other: &SolutionSample) -> Result<Vec<(f64, f64)>> {
        if self.grid.len() != other.grid.len() || self.lambda != other.lambda {
            return Err(Error::InvalidInput(
                "wronskian needs two solutions at the same energy on the same grid".into(),
            ));
        }
        Ok((0..self.grid.len())
            .map(|i| {
                (
                    self.grid[i],
                    self.u[i] * other.du[i] - self.du[i] * other.u[i],
                )
            })
            .collect())
    }
}

/// `‖sol1‖ / ‖sol2‖` on `L²(0, N)`.
pub fn subordinacy_ratio(sol1: &SolutionSample, sol2: &SolutionSample, n: f64) -> Result<f64> {
    if sol1.lambda != sol2.lambda {
        return Err(Error::InvalidInput(
            "subordinacy ratio needs two solutions at the same energy".into(),
        ));
    }
    let a = sol1.l2_growth(n)?;
    let b = sol2.l2_growth(n)?;
    if b <= 0.0 {
        return Err(Error::Domain(
            "denominator solution has vanishing L2 norm".into(),
        ));
    }
    Ok((a / b).sqrt())
}

/// Envelope/phase decomposition of a solution over an oscillatory window.
#[derive(Clone, Debug)]
pub struct AsymptoticFit {
    /// Window mean of `A(x) x^{1/4}`.
    pub amplitude: f64,
    /// Sampled phase offset `f(x)` relative to `(2/3) x^{3/2}`.
    pub phase: Vec<(f64, f64)>,
    /// Largest relative deviation of `A(x) x^{1/4}` from its mean.
    pub residual: f64,
    /// `max |f'(x)| (1+x)^{1/2}` over the window.
    pub f_prime_envelope: f64,
}

/// Extract envelope and phase offset over `window = (x1, x2)`.
///
/// Pointwise, with the local momentum `p = √(x + λ - q)`:
/// `A² = u² + (u'/p)²` and the phase is `atan2(u p, u')` unwrapped along
/// the grid; the offset is measured against `ξ(x) = (2/3) x^{3/2}`.
/// The window must contain at least five oscillations.
pub fn asymptotic_fit(
    q: &PotentialSpec,
    sol: &SolutionSample,
    window: (f64, f64),
) -> Result<AsymptoticFit> {
    let (x1, x2) = window;
    if !(x1 > 0.0 && x2 > x1) || x2 > sol.x_max() * (1.0 + 1e-12) {
        return Err(Error::Range(format!(
            "window ({x1}, {x2}) outside the solution grid"
        )));
    }
    let map = transforms::LiouvilleMap::new();
    let oscillations = (map.xi_of_x(x2)? - map.xi_of_x(x1)?) / std::f64::consts::PI;
    if oscillations < 5.0 {
        return Err(Error::Resolution(format!(
            "window holds only {oscillations:.2} oscillations; need at least 5"
        )));
    }

    let i0 = sol.grid.partition_point(|&x| x < x1);
    let i1 = sol.grid.partition_point(|&x| x <= x2);
    if i1 - i0 < 32 {
        return Err(Error::Resolution("too few samples in the window".into()));
    }

    let mut xs = Vec::with_capacity(i1 - i0);
    let mut env = Vec::with_capacity(i1 - i0);
    let mut f = Vec::with_capacity(i1 - i0);
    let mut prev_phi = 0.0f64;
    let mut prev_xi = 0.0f64;
    for i in i0..i1 {
        let x = sol.grid[i];
        let p_sq = x + sol.lambda - q.eval(x)?;
        if p_sq <= 0.0 {
            return Err(Error::Domain(format!(
                "window reaches into the classically forbidden region at x = {x}"
            )));
        }
        let p = p_sq.sqrt();
        let a = (sol.u[i] * sol.u[i] + (sol.du[i] / p) * (sol.du[i] / p)).sqrt();
        let xi = map.xi_of_x(x)?;
        let raw = (sol.u[i] * p).atan2(sol.du[i]);
        let phi = if xs.is_empty() {
            raw
        } else {
            // Continue the branch expected from the free advance Δξ.
            let guess = prev_phi + (xi - prev_xi);
            raw + std::f64::consts::TAU * ((guess - raw) / std::f64::consts::TAU).round()
        };
        prev_phi = phi;
        prev_xi = xi;
        xs.push(x);
        env.push(a * x.powf(0.25));
        f.push(phi - xi);
    }

    let mean = env.iter().sum::<f64>() / env.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::Integration("degenerate envelope".into()));
    }
    let residual = env
        .iter()
        .map(|&e| (e / mean - 1.0).abs())
        .fold(0.0, f64::max);

    let mut f_prime_envelope = 0.0f64;
    for i in 1..xs.len() - 1 {
        let fp = (f[i + 1] - f[i - 1]) / (xs[i + 1] - xs[i - 1]);
        f_prime_envelope = f_prime_envelope.max(fp.abs() * (1.0 + xs[i]).sqrt());
    }

    // Keep the sampled phase offset compact.
    let stride = (xs.len() / 256).max(1);
    let phase: Vec<(f64, f64)> = xs
        .iter()
        .zip(&f)
        .step_by(stride)
        .map(|(&x, &ff)| (x, ff))
        .collect();

    Ok(AsymptoticFit {
        amplitude: mean,
        phase,
        residual,
        f_prime_envelope,
    })
}

// ---------------------------------------------------------------------------
// Survey layer
// ---------------------------------------------------------------------------

/// Fixed tolerances and horizons of a survey run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurveyConfig {
    /// Prüfer start point (the direct equation covers `[0, x(ξ0)]`).
    pub xi0: f64,
    /// Prüfer horizon.
    pub xi_max: f64,
    /// Integrator tolerance (local error per unit step).
    pub rtol: f64,
    /// Boundary angles of the solution pair used for subordinacy ratios.
    pub theta0: f64,
    pub theta0_alt: f64,
    /// Oscillation tolerance for the amplitude-integral convergence test
    /// over the last window.
    pub integral6_tolerance: f64,
    /// Window factor of that test (a decade by default).
    pub integral6_window: f64,
    /// Band of subordinacy ratios read as "no subordinate solution".
    pub subordinacy_band: (f64, f64),
    /// Band of acceptable ratio trend slopes.
    pub subordinacy_slope_band: f64,
    /// Amplitude bound beyond which a non-converged run is classified as
    /// resonant rather than inconclusive.
    pub resonant_amplitude_threshold: f64,
    /// Number of control-expression probes (log-spaced).
    pub control_probes: usize,
    /// Whether to run the subordinacy pipeline (the Prüfer pipeline always
    /// runs).
    pub run_subordinacy: bool,
    /// Whether to evaluate the control expression and its slope.
    pub run_control: bool,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        SurveyConfig {
            xi0: 1.0,
            xi_max: 1e4,
            rtol: 1e-9,
            theta0: std::f64::consts::FRAC_PI_2,
            theta0_alt: 0.0,
            integral6_tolerance: 0.05,
            integral6_window: 10.0,
            subordinacy_band: (0.2, 5.0),
            subordinacy_slope_band: 0.05,
            resonant_amplitude_threshold: 1.0,
            control_probes: 25,
            run_subordinacy: true,
            run_control: true,
        }
    }
}

/// Survey results over a λ-grid, ready for serialization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurveyReport {
    pub toolkit_version: String,
    pub config_hash: String,
    /// Finite-horizon caveat carried by every report.
    pub disclaimer: String,
    pub potential: PotentialSpec,
    pub config: SurveyConfig,
    pub lambda_grid: Vec<f64>,
    pub verdicts: Vec<SpectralVerdict>,
    pub failures: usize,
}

pub const FINITE_HORIZON_DISCLAIMER: &str = "Per-energy verdicts are finite-horizon numerical \
evidence: ratios and oscillation of partial integrals at the configured horizon, not limit or \
almost-everywhere statements.";

/// Run the full per-energy pipeline; numeric failures are folded into the
/// verdict record instead of propagating.
pub fn survey_single_lambda(
    q: &PotentialSpec,
    lambda: f64,
    config: &SurveyConfig,
) -> SpectralVerdict {
    match survey_single_lambda_inner(q, lambda, config) {
        Ok(v) => v,
        Err(e) => SpectralVerdict {
            lambda,
            amplitude_bound: f64::NAN,
            integral6_oscillation: f64::NAN,
            integral6_converged: false,
            integral6_rate_slope: None,
            control_slope: None,
            control_l1_tail: None,
            subordinacy_ratio: None,
            subordinacy_trend_slope: None,
            asymptotic_residual: None,
            hypothesis: q.hypothesis_flag(),
            verdict: VerdictKind::Inconclusive,
            error: Some(e.to_string()),
        },
    }
}

fn survey_single_lambda_inner(
    q: &PotentialSpec,
    lambda: f64,
    config: &SurveyConfig,
) -> Result<SpectralVerdict> {
    let start = prufer::initial_state(q, lambda, config.theta0, config.xi0)?;
    let traj = prufer::integrate_prufer(q, lambda, start, config.xi_max, config.rtol)?;
    let amplitude_bound = traj.amplitude_bound();
    let conv = prufer::convergence_verdict(
        traj.integral6_partials(),
        config.integral6_window,
        config.integral6_tolerance,
    )?;

    let (mut control_slope, mut control_l1_tail) = (None, None);
    if config.run_control {
        let probe_hi = config.xi_max / 30.0;
        let probe_lo = (10.0 * config.xi0).max(20.0);
        if probe_hi > 3.0 * probe_lo {
            let probes = fit::geomspace(probe_lo, probe_hi, config.control_probes.max(4));
            let pts: Vec<(f64, f64)> = match q.hypothesis_flag() {
                crate::potentials::HypothesisFlag::SmoothDerivative => {
                    prufer::control_smooth_profile(&traj, &probes)?
                        .into_iter()
                        .filter(|p| p.reliable())
                        .map(|p| (p.xi, p.control))
                        .collect()
                }
                _ => prufer::control_decaying_profile(&traj, &probes)?
                    .into_iter()
                    .filter(|p| p.reliable())
                    .map(|p| (p.xi, p.control))
                    .collect(),
            };
            control_slope = fit::log_log_slope(&pts);
            // L1 mass of the control expression over the last probed decade.
            let tail_pts: Vec<&(f64, f64)> =
                pts.iter().filter(|(x, _)| *x >= probe_hi / 10.0).collect();
            if tail_pts.len() >= 2 {
                let mut acc = 0.0;
                for w in tail_pts.windows(2) {
                    acc += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
                }
                control_l1_tail = Some(acc);
            }
        }
    }

    let (mut subordinacy, mut trend, mut residual) = (None, None, None);
    if config.run_subordinacy {
        let x_max = transforms::LiouvilleMap::new().x_of_xi(config.xi_max)?;
        let sopts = SolveOptions {
            rtol: config.rtol.min(1e-9),
            xi0: config.xi0,
        };
        let s1 = solve_original_with(q, lambda, config.theta0, x_max, &sopts)?;
        let s2 = solve_original_with(q, lambda, config.theta0_alt, x_max, &sopts)?;
        subordinacy = Some(subordinacy_ratio(&s1, &s2, x_max)?);
        // Ratio trend over the last decade of partial norms.
        let pts: Vec<(f64, f64)> = s1
            .l2_partials()
            .iter()
            .zip(s2.l2_partials())
            .filter(|((n, _), _)| *n >= x_max / 10.0)
            .map(|(&(n, a), &(_, b))| (n, (a / b).sqrt()))
            .collect();
        trend = fit::log_log_slope(&pts);
        let x2 = 0.98 * x_max;
        let x1 = (x2 / 10.0).max(20.0 + 4.0 * lambda.abs());
        if x2 > 1.5 * x1 {
            if let Ok(fitres) = asymptotic_fit(q, &s1, (x1, x2)) {
                residual = Some(fitres.residual);
            }
        }
    }

    let verdict = if conv.converged {
        VerdictKind::AcConsistent
    } else if amplitude_bound > config.resonant_amplitude_threshold {
        VerdictKind::Resonant
    } else {
        VerdictKind::Inconclusive
    };

    Ok(SpectralVerdict {
        lambda,
        amplitude_bound,
        integral6_oscillation: conv.oscillation,
        integral6_converged: conv.converged,
        integral6_rate_slope: conv.rate_slope,
        control_slope,
        control_l1_tail,
        subordinacy_ratio: subordinacy,
        subordinacy_trend_slope: trend,
        asymptotic_residual: residual,
        hypothesis: q.hypothesis_flag(),
        verdict,
        error: None,
    })
}

/// Run the survey over a λ-grid, sequentially and deterministically.
///
/// Per-energy failures never abort the survey; they are recorded in the
/// verdicts. Verdicts are sorted by λ regardless of input order.
pub fn spectral_survey(q: &PotentialSpec, lambdas: &[f64], config: &SurveyConfig) -> SurveyReport {
    let verdicts: Vec<SpectralVerdict> = lambdas
        .iter()
        .map(|&l| survey_single_lambda(q, l, config))
        .collect();
    assemble_report(q, lambdas, config, verdicts)
}

/// Assemble a report from per-energy verdicts computed elsewhere (possibly
/// concurrently); verdicts are sorted by λ so assembly is order-independent.
pub fn assemble_report(
    q: &PotentialSpec,
    lambdas: &[f64],
    config: &SurveyConfig,
    mut verdicts: Vec<SpectralVerdict>,
) -> SurveyReport {
    verdicts.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let failures = verdicts.iter().filter(|v| v.error.is_some()).count();
    let mut lambda_grid = lambdas.to_vec();
    lambda_grid.sort_by(f64::total_cmp);
    SurveyReport {
        toolkit_version: crate::VERSION.to_string(),
        config_hash: crate::report::config_hash(q, &lambda_grid, config),
        disclaimer: FINITE_HORIZON_DISCLAIMER.to_string(),
        potential: q.clone(),
        config: config.clone(),
        lambda_grid,
        verdicts,
        failures,
    }
}

impl SurveyReport {
    /// Deterministic pretty-printed JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_data_is_rejected_and_zero_norm_detected() {
        let q = PotentialSpec::zero();
        let s = solve_original(&q, 0.0, 0.3, 50.0).unwrap();
        assert!(s.l2_growth(50.0).unwrap() > 0.0);
        assert_eq!(s.l2_growth(0.0).unwrap(), 0.0);
        assert!(s.l2_growth(60.0).is_err());
    }

    #[test]
    fn wronskian_of_boundary_pair_is_minus_one() {
        let q = PotentialSpec::zero();
        let s1 = solve_original(&q, 0.0, 0.0, 100.0).unwrap();
        let s2 = solve_original(&q, 0.0, std::f64::consts::FRAC_PI_2, 100.0).unwrap();
        let w = s1.wronskian_against(&s2).unwrap();
        // W(0) = sin(0)cos(π/2) - cos(0)sin(π/2) = -1, constant in x.
        for &(x, wx) in w.iter().step_by(100) {
            assert!(
                (wx + 1.0).abs() < 1e-6,
                "wronskian drift at x = {x}: {wx}"
            );
        }
    }

    #[test]
    fn subordinacy_ratio_identities() {
        let q = PotentialSpec::power_law(1.0, 0.5);
        let s1 = solve_original(&q, 1.0, 0.0, 80.0).unwrap();
        let s2 = solve_original(&q, 1.0, std::f64::consts::FRAC_PI_2, 80.0).unwrap();
        let r12 = subordinacy_ratio(&s1, &s2, 80.0).unwrap();
        let r21 = subordinacy_ratio(&s2, &s1, 80.0).unwrap();
        assert_relative_eq!(r12, subordinacy_ratio(&s1, &s2, 80.0).unwrap());
        assert!((r12 * r21 - 1.0).abs() < 1e-14);
        assert_relative_eq!(subordinacy_ratio(&s1, &s1, 80.0).unwrap(), 1.0);
    }

    #[test]
    fn manufactured_envelope_pair_detected() {
        // Synthetic solutions: u1 with envelope x^{-1/4}, u2 with constant
        // envelope; closed-form envelope integrals give ratio ~ √2 N^{-1/4}.
        let n = 200_000usize;
        let x_max = 1000.0;
        let grid: Vec<f64> = (0..=n).map(|i| 1.0 + (x_max - 1.0) * i as f64 / n as f64).collect();
        let mk = |env: &dyn Fn(f64) -> f64| {
            let u: Vec<f64> = grid.iter().map(|&x| env(x) * (2.0 * x).sin()).collect();
            let du: Vec<f64> = grid.iter().map(|&x| env(x) * 2.0 * (2.0 * x).cos()).collect();
            let mut l2 = vec![0.0];
            for i in 1..grid.len() {
                let dx = grid[i] - grid[i - 1];
                l2.push(l2[i - 1] + 0.5 * (u[i] * u[i] + u[i - 1] * u[i - 1]) * dx);
            }
            SolutionSample {
                lambda: 0.0,
                theta0: None,
                grid: grid.clone(),
                u,
                du,
                l2_cum: l2.clone(),
                l2_partials: grid.iter().cloned().zip(l2).collect(),
                handoff_x: 1.0,
            }
        };
        let s1 = mk(&|x: f64| x.powf(-0.25));
        let s2 = mk(&|_x: f64| 1.0);
        let got = subordinacy_ratio(&s1, &s2, x_max).unwrap();
        // ∫ x^{-1/2} sin² ≈ N^{1/2}, ∫ sin² ≈ N/2 → ratio ≈ √2 N^{-1/4}.
        let expected = (2.0f64).sqrt() * x_max.powf(-0.25);
        assert!(
            (got / expected - 1.0).abs() < 0.05,
            "got {got}, expected ~{expected}"
        );
    }

    #[test]
    fn l2_growth_is_nondecreasing() {
        let q = PotentialSpec::resonant(1.0);
        let s = solve_original(&q, 0.5, 1.0, 60.0).unwrap();
        let mut prev = 0.0;
        for i in 1..=60 {
            let z = s.l2_growth(i as f64).unwrap();
            assert!(z >= prev);
            prev = z;
        }
    }

    #[test]
    fn survey_zero_potential_is_ac_consistent() {
        let q = PotentialSpec::zero();
        let config = SurveyConfig {
            xi_max: 2e3,
            ..SurveyConfig::default()
        };
        let report = spectral_survey(&q, &[0.0], &config);
        assert_eq!(report.failures, 0);
        assert_eq!(report.verdicts.len(), 1);
        let v = &report.verdicts[0];
        assert_eq!(v.verdict, VerdictKind::AcConsistent);
        assert!(v.integral6_converged);
        let r = v.subordinacy_ratio.unwrap();
        assert!(r > 0.2 && r < 5.0, "ratio {r}");
    }

    #[test]
    fn survey_records_failures_without_aborting() {
        // A tabulated potential too short for the horizon fails per-λ but
        // the survey still returns a record for every energy.
        let q = PotentialSpec::tabulated(vec![(0.0, 0.1), (5.0, 0.05)]).unwrap();
        let config = SurveyConfig {
            xi_max: 1e3,
            ..SurveyConfig::default()
        };
        let report = spectral_survey(&q, &[0.0, 1.0], &config);
        assert_eq!(report.verdicts.len(), 2);
        assert_eq!(report.failures, 2);
        assert!(report.verdicts[0].error.is_some());
    }
}
