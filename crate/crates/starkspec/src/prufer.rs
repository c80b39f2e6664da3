//! Prüfer amplitude/phase integration of the transformed equation.
//!
//! Writing `ω = R sin θ`, `ω' = R cos θ` turns `-ω'' + V(ξ,λ) ω = ω` into
//!
//! ```text
//! (log R)' = (1/2) V(ξ,λ) sin 2θ
//! θ'       = 1 - (1/2) V(ξ,λ) (1 - cos 2θ)
//! ```
//!
//! so boundedness of solutions is exactly the convergence of the amplitude
//! integral `∫ V sin 2θ dξ`. A trajectory records that integral (and the
//! companion phase decompositions) densely enough that every diagnostic
//! below reproduces the integrator to quadrature accuracy:
//!
//! * `integral6_partial` — partial amplitude integrals, tied to
//!   `2 (log R(N) - log R(ξ0))` as a self-test;
//! * `sigma_gamma` — the slow/fast phase split `2θ = γ + σ` with
//!   `γ' = b cos(γ + σ)` by construction;
//! * `control_decaying` / `control_smooth` — the squared-tail control
//!   expressions whose integrability certifies bounded amplitudes in the
//!   decaying and smooth regimes.
//!
//! Trajectories are immutable after construction and safe to share across
//! threads; each `(q, λ)` integration is independent.

use crate::error::{Error, Result};
use crate::fit;
use crate::ode::{self, OdeOptions, OdeStats, StepRecord};
use crate::potentials::{HypothesisFlag, PotentialSpec};
use crate::transforms::{self, LIOUVILLE_C};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Gauss–Legendre 7-point nodes on [-1, 1].
const GL7_NODES: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL7_WEIGHTS: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];

/// Prüfer state at a single point: unwrapped phase, log-amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruferState {
    pub xi: f64,
    pub log_r: f64,
    /// Unwrapped phase (no mod-2π reduction), so rotation counts and the
    /// σ/γ decomposition are well-defined.
    pub theta: f64,
}

/// One row of the uniform-in-log diagnostic grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DiagRow {
    pub xi: f64,
    pub log_r: f64,
    pub theta: f64,
    pub v: f64,
    pub b: f64,
    pub sigma: f64,
    pub gamma: f64,
}

/// Sampled path of the Prüfer system together with its diagnostic integrals.
#[derive(Clone, Debug)]
pub struct PruferTrajectory {
    lambda: f64,
    q: PotentialSpec,
    xi0: f64,
    xi_max: f64,
    /// Accepted integrator steps with dense-output coefficients.
    steps: Vec<StepRecord<2>>,
    /// States at step boundaries (`steps.len() + 1` entries).
    samples: Vec<PruferState>,
    /// `V(ξ_i, λ)` and `b(ξ_i)` at the sample points.
    v: Vec<f64>,
    b: Vec<f64>,
    /// Cumulative `∫ V sin 2θ`, `∫ V`, and `γ`, `σ` at the sample points.
    cum_i6: Vec<f64>,
    cum_v: Vec<f64>,
    gamma: Vec<f64>,
    sigma: Vec<f64>,
    diagnostic: Vec<DiagRow>,
    integral6_partials: Vec<(f64, f64)>,
    step_stats: OdeStats,
}

/// Points per decade of the diagnostic grid used for rate regressions and
/// trajectory dumps.
pub const DIAGNOSTIC_POINTS_PER_DECADE: usize = 64;

#[inline]
fn v_and_b(q: &crate::potentials::PreparedPotential<'_>, lambda: f64, xi: f64) -> (f64, f64) {
    let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
    let b = -5.0 / (36.0 * xi * xi) + q.eval(x) / x;
    (b - lambda / x, b)
}

fn check_tabulated_coverage(q: &PotentialSpec, x_needed: f64) -> Result<()> {
    if q.max_x() < x_needed {
        return Err(Error::Range(format!(
            "potential is tabulated up to x = {}, but the run needs x = {:.3e}",
            q.max_x(),
            x_needed
        )));
    }
    Ok(())
}

/// Boundary state for the Prüfer system at `ξ0 > 0`.
///
/// Integrates the original equation from `x = 0` with data
/// `(u, u')(0) = (sin θ0, cos θ0)` up to `x(ξ0)`, pushes the solution
/// through the Liouville map and converts to `(log R, θ)`; the phase is the
/// branch of `atan2(ω, ω')` nearest to `θ0`.
pub fn initial_state(
    q: &PotentialSpec,
    lambda: f64,
    theta0: f64,
    xi0: f64,
) -> Result<PruferState> {
    initial_state_impl(q, lambda, theta0.sin(), theta0.cos(), theta0, xi0)
}

/// Same as [`initial_state`] but from general boundary data `(u, u')(0)`;
/// the phase branch is anchored at `atan2(u0, du0)`.
pub fn initial_state_from_data(
    q: &PotentialSpec,
    lambda: f64,
    u0: f64,
    du0: f64,
    xi0: f64,
) -> Result<PruferState> {
    initial_state_impl(q, lambda, u0, du0, u0.atan2(du0), xi0)
}

fn initial_state_impl(
    q: &PotentialSpec,
    lambda: f64,
    u0: f64,
    du0: f64,
    theta_hint: f64,
    xi0: f64,
) -> Result<PruferState> {
    if xi0 <= 0.0 {
        return Err(Error::Domain(format!("xi0 must be positive, got {xi0}")));
    }
    if u0 == 0.0 && du0 == 0.0 {
        return Err(Error::Integration(
            "trivial boundary data (u, u') = (0, 0)".into(),
        ));
    }
    let x_h = transforms::LiouvilleMap::new().x_of_xi(xi0)?;
    check_tabulated_coverage(q, x_h)?;
    let prep = q.prepared();
    let rhs = |x: f64, y: &[f64; 2]| [y[1], (prep.eval(x) - x - lambda) * y[0]];
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-14,
        ..OdeOptions::default()
    };
    let mut sink = |_: &StepRecord<2>| {};
    let (y, _) = ode::integrate(rhs, 0.0, [u0, du0], x_h, &opts, &mut sink)?;
    let (omega, domega) = transforms::push_solution(y[0], y[1], x_h)?;
    let r_sq = omega * omega + domega * domega;
    if r_sq == 0.0 || !r_sq.is_finite() {
        return Err(Error::Integration(format!(
            "degenerate state at the matching point x = {x_h}: R^2 = {r_sq}"
        )));
    }
    let raw = omega.atan2(domega);
    // Nearest 2π-branch to the hint.
    let two_pi = std::f64::consts::TAU;
    let theta = raw + two_pi * ((theta_hint - raw) / two_pi).round();
    Ok(PruferState {
        xi: xi0,
        log_r: 0.5 * r_sq.ln(),
        theta,
    })
}

/// Integrate the Prüfer system from `start` to `Ξ = xi_max`.
///
/// Steps are capped at π/4 so the unit-frequency oscillation of `sin 2θ`
/// is always resolved; the local error per unit step is held at `rtol`.
pub fn integrate_prufer(
    q: &PotentialSpec,
    lambda: f64,
    start: PruferState,
    xi_max: f64,
    rtol: f64,
) -> Result<PruferTrajectory> {
    if !(xi_max > start.xi) {
        return Err(Error::InvalidInput(format!(
            "xi_max = {xi_max} must exceed the start point xi = {}",
            start.xi
        )));
    }
    if !(rtol > 1e-13 && rtol < 1e-3) {
        return Err(Error::InvalidInput(format!(
            "rtol must lie in (1e-13, 1e-3), got {rtol}"
        )));
    }
    if start.xi <= 0.0 {
        return Err(Error::Domain("trajectories require xi > 0".into()));
    }
    check_tabulated_coverage(q, transforms::LiouvilleMap::new().x_of_xi(xi_max)?)?;

    let prep = q.prepared();
    let rhs = |xi: f64, y: &[f64; 2]| {
        let (v, _) = v_and_b(&prep, lambda, xi);
        let (s2, c2) = (2.0 * y[1]).sin_cos();
        [0.5 * v * s2, 1.0 - 0.5 * v * (1.0 - c2)]
    };
    let opts = OdeOptions {
        rtol,
        atol: rtol,
        ..OdeOptions::default()
    };
    let mut collect = ode::CollectSteps::<2>::default();
    let (_, stats) = ode::integrate(
        rhs,
        start.xi,
        [start.log_r, start.theta],
        xi_max,
        &opts,
        &mut collect,
    )?;
    let steps = collect.steps;

    // Sample states at the step boundaries.
    let n = steps.len() + 1;
    let mut samples = Vec::with_capacity(n);
    samples.push(start);
    for rec in &steps {
        samples.push(PruferState {
            xi: rec.t1,
            log_r: rec.y1[0],
            theta: rec.y1[1],
        });
    }

    // Pointwise V, b and the phase-monotonicity gate θ' >= 1 - |V|.
    let mut v = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for s in &samples {
        let (vi, bi) = v_and_b(&prep, lambda, s.xi);
        if !vi.is_finite() {
            return Err(Error::Integration(format!(
                "effective potential not finite at xi = {}",
                s.xi
            )));
        }
        let dtheta = 1.0 - 0.5 * vi * (1.0 - (2.0 * s.theta).cos());
        if dtheta < 1.0 - vi.abs() - 1e-9 {
            return Err(Error::Integration(format!(
                "phase monotonicity violated at xi = {} (theta' = {dtheta})",
                s.xi
            )));
        }
        v.push(vi);
        b.push(bi);
    }

    // Cumulative diagnostic integrals by per-step Gauss-Legendre quadrature
    // on the dense output.
    let mut cum_i6 = Vec::with_capacity(n);
    let mut cum_v = Vec::with_capacity(n);
    let mut cum_bc = Vec::with_capacity(n);
    cum_i6.push(0.0);
    cum_v.push(0.0);
    cum_bc.push(0.0);
    let (mut a6, mut av, mut ab) = (0.0f64, 0.0f64, 0.0f64);
    for rec in &steps {
        let (d6, dv, db) = gl_step_integrals(&prep, lambda, rec, rec.t0, rec.t1);
        a6 += d6;
        av += dv;
        ab += db;
        cum_i6.push(a6);
        cum_v.push(av);
        cum_bc.push(ab);
    }

    // γ(ξ0) = 2θ(ξ0) - σ(ξ0) with the convention σ(ξ0) = 2ξ0, matching the
    // free phase; γ then integrates b cos 2θ, and σ = 2θ - γ.
    let gamma0 = 2.0 * start.theta - 2.0 * start.xi;
    let mut gamma = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for i in 0..n {
        let g = gamma0 + cum_bc[i];
        gamma.push(g);
        sigma.push(2.0 * samples[i].theta - g);
    }

    let mut traj = PruferTrajectory {
        lambda,
        q: q.clone(),
        xi0: start.xi,
        xi_max,
        steps,
        samples,
        v,
        b,
        cum_i6,
        cum_v,
        gamma,
        sigma,
        diagnostic: Vec::new(),
        integral6_partials: Vec::new(),
        step_stats: stats,
    };
    traj.build_diagnostic_grid();
    Ok(traj)
}

/// GL-7 integrals of (V sin 2θ, V, b cos 2θ) over `[a, b] ⊆ [rec.t0, rec.t1]`.
fn gl_step_integrals(
    prep: &crate::potentials::PreparedPotential<'_>,
    lambda: f64,
    rec: &StepRecord<2>,
    a: f64,
    b: f64,
) -> (f64, f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (mut s6, mut sv, mut sb) = (0.0, 0.0, 0.0);
    for i in 0..7 {
        let xi = mid + half * GL7_NODES[i];
        let w = half * GL7_WEIGHTS[i];
        let y = rec.eval(xi);
        let (vi, bi) = v_and_b(prep, lambda, xi);
        let (s2, c2) = (2.0 * y[1]).sin_cos();
        s6 += w * vi * s2;
        sv += w * vi;
        sb += w * bi * c2;
    }
    (s6, sv, sb)
}

impl PruferTrajectory {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.q
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn samples(&self) -> &[PruferState] {
        &self.samples
    }

    pub fn step_stats(&self) -> &OdeStats {
        &self.step_stats
    }

    pub fn diagnostic_rows(&self) -> &[DiagRow] {
        &self.diagnostic
    }

    /// Partial amplitude integrals `(N, ∫ V sin 2θ over [ξ0, N])` on the
    /// diagnostic grid.
    pub fn integral6_partials(&self) -> &[(f64, f64)] {
        &self.integral6_partials
    }

    /// `sup |log R(ξ) - log R(ξ0)|` over the trajectory samples.
    pub fn amplitude_bound(&self) -> f64 {
        let r0 = self.samples[0].log_r;
        self.samples
            .iter()
            .map(|s| (s.log_r - r0).abs())
            .fold(0.0, f64::max)
    }

    fn step_index(&self, xi: f64) -> usize {
        // Largest step whose start is <= xi.
        let idx = self.steps.partition_point(|s| s.t1 < xi);
        idx.min(self.steps.len() - 1)
    }

    /// State at an arbitrary `ξ` inside the trajectory via dense output.
    pub fn state_at(&self, xi: f64) -> Result<PruferState> {
        self.check_range(xi)?;
        if xi == self.xi0 {
            return Ok(self.samples[0]);
        }
        let rec = &self.steps[self.step_index(xi)];
        let y = rec.eval(xi);
        Ok(PruferState {
            xi,
            log_r: y[0],
            theta: y[1],
        })
    }

    fn check_range(&self, xi: f64) -> Result<()> {
        if xi < self.xi0 || xi > self.xi_max {
            return Err(Error::Range(format!(
                "xi = {xi} outside trajectory range [{}, {}]",
                self.xi0, self.xi_max
            )));
        }
        Ok(())
    }

    /// Cumulative `(∫ V sin2θ, ∫ V, ∫ b cos2θ)` from `ξ0` to `xi`.
    fn cums_at(&self, xi: f64) -> (f64, f64, f64) {
        if xi <= self.xi0 {
            return (0.0, 0.0, 0.0);
        }
        let j = self.step_index(xi);
        let rec = &self.steps[j];
        let prep = self.q.prepared();
        let (d6, dv, db) = if xi > rec.t0 {
            gl_step_integrals(&prep, self.lambda, rec, rec.t0, xi)
        } else {
            (0.0, 0.0, 0.0)
        };
        (self.cum_i6[j] + d6, self.cum_v[j] + dv, self.cum_bc_at(j) + db)
    }

    fn cum_bc_at(&self, j: usize) -> f64 {
        self.gamma[j] - self.gamma[0]
    }

    /// Quadrature of `V sin 2θ` over `[ξ0, N]` from the stored dense
    /// samples. By the amplitude equation this equals
    /// `2 (log R(N) - log R(ξ0))`; the identity is the self-test of the
    /// whole integration pipeline.
    pub fn integral6_partial(&self, n: f64) -> Result<f64> {
        self.check_range(n)?;
        Ok(self.cums_at(n).0)
    }

    /// σ and γ at the trajectory sample points.
    pub fn sigma_gamma(&self) -> Vec<(f64, f64, f64)> {
        (0..self.samples.len())
            .map(|i| (self.samples[i].xi, self.sigma[i], self.gamma[i]))
            .collect()
    }

    /// σ and γ on an arbitrary grid inside the trajectory (dense output
    /// plus partial-step quadrature), as `(ξ, σ, γ)` rows.
    pub fn sigma_gamma_on_grid(&self, grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
        let mut out = Vec::with_capacity(grid.len());
        for &xi in grid {
            self.check_range(xi)?;
            let st = self.state_at(xi)?;
            let g = self.gamma[0] + self.cums_at(xi).2;
            out.push((xi, 2.0 * st.theta - g, g));
        }
        Ok(out)
    }

    /// `b(ξ)` from the trajectory's potential.
    pub fn b_at(&self, xi: f64) -> Result<f64> {
        transforms::b_term(&self.q, xi)
    }

    /// `V(ξ, λ)` from the trajectory's potential and energy.
    pub fn v_at(&self, xi: f64) -> Result<f64> {
        transforms::effective_potential(&self.q, xi, self.lambda)
    }

    fn build_diagnostic_grid(&mut self) {
        let decades = (self.xi_max / self.xi0).log10();
        let count = ((DIAGNOSTIC_POINTS_PER_DECADE as f64 * decades).ceil() as usize).max(2) + 1;
        let grid = fit::geomspace(self.xi0, self.xi_max, count);
        let mut rows = Vec::with_capacity(count);
        let mut partials = Vec::with_capacity(count);
        let prep = self.q.prepared();
        for &xi in &grid {
            let xi = xi.clamp(self.xi0, self.xi_max);
            let st = self.state_at(xi).expect("grid point inside range");
            let (i6, _, bc) = self.cums_at(xi);
            let g = self.gamma[0] + bc;
            let (vv, bb) = v_and_b(&prep, self.lambda, xi);
            rows.push(DiagRow {
                xi,
                log_r: st.log_r,
                theta: st.theta,
                v: vv,
                b: bb,
                sigma: 2.0 * st.theta - g,
                gamma: g,
            });
            partials.push((xi, i6));
        }
        self.diagnostic = rows;
        self.integral6_partials = partials;
    }
}

/// Convergence diagnosis of a sequence of partial integrals.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub converged: bool,
    /// `max - min` of the partials over the last `decade`-fold window.
    pub oscillation: f64,
    /// Log-log slope of the per-window oscillation against `N`; `None`
    /// when a window oscillates by exactly zero.
    pub rate_slope: Option<f64>,
}

/// Diagnose convergence of partial integrals `(N, value)`.
///
/// The oscillation is measured over `[N_max/decade, N_max]`; convergence
/// means it stays below `tol`. The rate slope regresses the oscillation of
/// consecutive `decade`-wide windows against their right endpoints, which
/// needs at least two decades of data.
pub fn convergence_verdict(
    partials: &[(f64, f64)],
    decade: f64,
    tol: f64,
) -> Result<ConvergenceVerdict> {
    if partials.len() < 4 {
        return Err(Error::Range("too few partial integrals".into()));
    }
    if !(decade > 1.0) {
        return Err(Error::InvalidInput("window factor must exceed 1".into()));
    }
    let n_min = partials.first().unwrap().0;
    let n_max = partials.last().unwrap().0;
    if n_max < n_min * decade * decade {
        return Err(Error::Range(format!(
            "partials cover [{n_min:.3e}, {n_max:.3e}] but two windows of factor {decade} are needed"
        )));
    }
    let window_osc = |hi: f64| -> f64 {
        let vals: Vec<f64> = partials
            .iter()
            .filter(|&&(n, _)| n >= hi / decade && n <= hi)
            .map(|&(_, v)| v)
            .collect();
        fit::oscillation(&vals)
    };
    let oscillation = window_osc(n_max);

    // Consecutive windows with right endpoints n_max, n_max/decade, ...
    let mut pts = Vec::new();
    let mut hi = n_max;
    while hi >= n_min * decade {
        let osc = window_osc(hi);
        if osc > 0.0 {
            pts.push((hi, osc));
        } else {
            pts.clear();
            break;
        }
        hi /= decade;
    }
    pts.reverse();
    let rate_slope = fit::log_log_slope(&pts);

    Ok(ConvergenceVerdict {
        converged: oscillation < tol,
        oscillation,
        rate_slope,
    })
}

/// A control-expression evaluation at one `ξ`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ControlPoint {
    pub xi: f64,
    /// The control value: `|b| |tail|²` (decaying) or `|V| max(|w₊|,|w₋|)²`
    /// (smooth).
    pub control: f64,
    pub tail_re: f64,
    pub tail_im: f64,
    /// Estimated remainder of the tail beyond the trajectory end.
    pub truncation_error: f64,
}

impl ControlPoint {
    pub fn tail(&self) -> Complex64 {
        Complex64::new(self.tail_re, self.tail_im)
    }

    pub fn tail_magnitude(&self) -> f64 {
        self.tail().norm()
    }

    /// Whether the truncation estimate stays below half the tail magnitude.
    pub fn reliable(&self) -> bool {
        self.truncation_error <= 0.5 * self.tail_magnitude()
    }
}

/// Suffix oscillatory integrals `∫_ξ^{Ξ} amp(η) e^{i φ(η)} dη` over the
/// trajectory samples, evaluated at each probe, plus a Richardson-style
/// estimate of the remainder beyond `Ξ` from the last two decades.
fn sampled_tails(
    xs: &[f64],
    amp: &[f64],
    phase: &[f64],
    probes: &[f64],
) -> (Vec<Complex64>, f64) {
    let n = xs.len();
    // Per-interval integrals with linear amplitude and exact endpoint
    // phases, then suffix sums.
    let mut suffix = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n - 1).rev() {
        let h = xs[i + 1] - xs[i];
        let seg = crate::oscillatory::linear_panel(
            amp[i],
            amp[i + 1],
            phase[i],
            phase[i + 1],
            h,
        );
        suffix[i] = suffix[i + 1] + seg;
    }

    let suffix_at = |x: f64| -> Complex64 {
        if x <= xs[0] {
            return suffix[0];
        }
        if x >= xs[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let i = xs.partition_point(|&v| v <= x) - 1;
        let h = xs[i + 1] - xs[i];
        let t = (x - xs[i]) / h;
        // Partial interval [x, xs[i+1]] with interpolated left endpoint.
        let a0 = amp[i] + t * (amp[i + 1] - amp[i]);
        let p0 = phase[i] + t * (phase[i + 1] - phase[i]);
        let seg = crate::oscillatory::linear_panel(a0, amp[i + 1], p0, phase[i + 1], h * (1.0 - t));
        suffix[i + 1] + seg
    };

    let values: Vec<Complex64> = probes.iter().map(|&p| suffix_at(p)).collect();

    // Remainder estimate: geometric extrapolation of the per-decade
    // increments at the far end.
    let xi_max = xs[n - 1];
    let d2 = suffix_at(xi_max / 10.0).norm();
    let d1 = (suffix_at(xi_max / 100.0) - suffix_at(xi_max / 10.0)).norm();
    let truncation = if d1 > d2 && d2 > 0.0 {
        d2 * d2 / (d1 - d2)
    } else {
        d2
    };
    (values, truncation)
}

/// Control expression of the decaying regime at `ξ`:
/// `|b(ξ)| · |∫_ξ^{Ξ} b(η) e^{i σ(η,λ)} dη|²`.
pub fn control_decaying(traj: &PruferTrajectory, xi: f64) -> Result<ControlPoint> {
    let pts = control_decaying_profile(traj, &[xi])?;
    let p = pts[0];
    if !p.reliable() {
        return Err(Error::UnreliableTail {
            truncation: p.truncation_error,
            magnitude: p.tail_magnitude(),
        });
    }
    Ok(p)
}

/// [`control_decaying`] over many probes in one backward sweep. Points are
/// returned unconditionally; use [`ControlPoint::reliable`] to filter.
pub fn control_decaying_profile(
    traj: &PruferTrajectory,
    probes: &[f64],
) -> Result<Vec<ControlPoint>> {
    for &p in probes {
        traj.check_range(p)?;
    }
    let xs: Vec<f64> = traj.samples.iter().map(|s| s.xi).collect();
    let (tails, truncation) = sampled_tails(&xs, &traj.b, &traj.sigma, probes);
    probes
        .iter()
        .zip(tails)
        .map(|(&xi, tail)| {
            let b = traj.b_at(xi)?;
            Ok(ControlPoint {
                xi,
                control: b.abs() * tail.norm_sqr(),
                tail_re: tail.re,
                tail_im: tail.im,
                truncation_error: truncation,
            })
        })
        .collect()
}

/// Control data of the smooth regime at one `ξ`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SmoothControlPoint {
    pub xi: f64,
    pub w_plus_re: f64,
    pub w_plus_im: f64,
    pub w_minus_re: f64,
    pub w_minus_im: f64,
    pub control: f64,
    pub truncation_error: f64,
}

impl SmoothControlPoint {
    pub fn w_plus(&self) -> Complex64 {
        Complex64::new(self.w_plus_re, self.w_plus_im)
    }

    pub fn w_minus(&self) -> Complex64 {
        Complex64::new(self.w_minus_re, self.w_minus_im)
    }

    pub fn reliable(&self) -> bool {
        self.truncation_error <= 0.5 * self.w_plus().norm()
    }
}

/// Control expression of the smooth regime at `ξ`:
/// `w_± = ∫_ξ^{Ξ} V(η,λ) exp(±i(2η - ∫_{ξ0}^η V)) dη` and
/// `control = |V(ξ,λ)| · max(|w₊|, |w₋|)²`.
///
/// The phase is real, so `w₋ = conj(w₊)` exactly and the two moduli agree.
pub fn control_smooth(traj: &PruferTrajectory, xi: f64) -> Result<SmoothControlPoint> {
    let pts = control_smooth_profile(traj, &[xi])?;
    let p = pts[0];
    if !p.reliable() {
        return Err(Error::UnreliableTail {
            truncation: p.truncation_error,
            magnitude: p.w_plus().norm(),
        });
    }
    Ok(p)
}

/// [`control_smooth`] over many probes in one backward sweep.
pub fn control_smooth_profile(
    traj: &PruferTrajectory,
    probes: &[f64],
) -> Result<Vec<SmoothControlPoint>> {
    for &p in probes {
        traj.check_range(p)?;
    }
    let xs: Vec<f64> = traj.samples.iter().map(|s| s.xi).collect();
    // Phase of the smooth decomposition: σ̃(η) = 2η - ∫_{ξ0}^η V.
    let phase: Vec<f64> = (0..xs.len())
        .map(|i| 2.0 * xs[i] - traj.cum_v[i])
        .collect();
    let (tails, truncation) = sampled_tails(&xs, &traj.v, &phase, probes);
    probes
        .iter()
        .zip(tails)
        .map(|(&xi, w)| {
            let v = traj.v_at(xi)?;
            Ok(SmoothControlPoint {
                xi,
                w_plus_re: w.re,
                w_plus_im: w.im,
                w_minus_re: w.re,
                w_minus_im: -w.im,
                control: v.abs() * w.norm_sqr(),
                truncation_error: truncation,
            })
        })
        .collect()
}

/// Outcome classification of a per-energy diagnostic run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    /// Bounded amplitude and converged amplitude integral: consistent with
    /// absolutely continuous spectrum at this energy.
    AcConsistent,
    /// No resonance signature, but the convergence test failed or a
    /// pipeline stage errored.
    Inconclusive,
    /// Diverging amplitude with failed convergence test: resonance
    /// signature.
    Resonant,
}

/// Per-energy diagnostic record assembled by the survey layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralVerdict {
    pub lambda: f64,
    /// `sup |log R - log R(ξ0)|` over the trajectory.
    pub amplitude_bound: f64,
    /// Oscillation of the amplitude-integral partials over the last decade.
    pub integral6_oscillation: f64,
    pub integral6_converged: bool,
    pub integral6_rate_slope: Option<f64>,
    /// Fitted log-log slope of the control expression, when probed.
    pub control_slope: Option<f64>,
    /// Integral of the control expression over the last probed decade.
    pub control_l1_tail: Option<f64>,
    /// `‖u_1‖ / ‖u_2‖` at the survey horizon, for the boundary pair.
    pub subordinacy_ratio: Option<f64>,
    /// Trend slope of the subordinacy ratio over the last decade.
    pub subordinacy_trend_slope: Option<f64>,
    /// Relative envelope residual of the asymptotic fit.
    pub asymptotic_residual: Option<f64>,
    pub hypothesis: HypothesisFlag,
    pub verdict: VerdictKind,
    /// Description of a per-energy numeric failure, when one occurred.
    pub error: Option<String>,
}
