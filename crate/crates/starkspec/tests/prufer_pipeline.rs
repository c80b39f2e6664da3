//! Pipeline-level properties of the Prüfer integration: oracle equivalence
//! against an independent second-order solve, amplitude stability in the
//! decaying regime, and the resonance signature of the matched-phase preset.

mod support;

use starkspec::fit;
use starkspec::potentials::PotentialSpec;
use starkspec::prufer::{self, PruferTrajectory};
use starkspec::transforms::LIOUVILLE_C;

fn trajectory(q: &PotentialSpec, lambda: f64, xi_max: f64, rtol: f64) -> PruferTrajectory {
    let start = prufer::initial_state(q, lambda, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
    prufer::integrate_prufer(q, lambda, start, xi_max, rtol).unwrap()
}

/// R² from the Prüfer path against a fixed-step RK4 solve of the
/// transformed second-order equation, deep into the range: ξ in [1, 10⁴]
/// for the decaying preset at λ = 1.
#[test]
fn prufer_amplitude_matches_direct_solve_to_large_xi() {
    let q = PotentialSpec::power_law(1.0, 0.5);
    let lambda = 1.0;
    let traj = trajectory(&q, lambda, 1e4, 1e-10);
    let s0 = traj.samples()[0];
    let w0 = (s0.log_r.exp() * s0.theta.sin(), s0.log_r.exp() * s0.theta.cos());

    let qc = q.clone();
    let rhs = move |xi: f64, y: [f64; 2]| {
        let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
        let v = -5.0 / (36.0 * xi * xi) + (qc.eval(x).unwrap() - lambda) / x;
        [y[1], (v - 1.0) * y[0]]
    };
    let probes = fit::geomspace(2.0, 1e4, 40);
    let oracle = support::rk4_checkpoints(rhs, 1.0, [w0.0, w0.1], &probes, 1e-3);
    for (i, &xi) in probes.iter().enumerate() {
        let st = traj.state_at(xi).unwrap();
        let r_sq = (2.0 * st.log_r).exp();
        let o_sq = oracle[i][0] * oracle[i][0] + oracle[i][1] * oracle[i][1];
        let rel = (r_sq - o_sq).abs() / o_sq;
        assert!(rel < 1e-6, "xi = {xi}: R² relative error {rel:.3e}");
    }
}

/// Cauchy behaviour of the amplitude in the decaying regime: the running
/// amplitude bound stops growing beyond ξ = 10³ (increments below 0.05).
#[test]
fn amplitude_bound_is_cauchy_for_decaying_potential() {
    let q = PotentialSpec::power_law(1.0, 0.5);
    for &lambda in &[-2.0, 0.0, 1.0, 3.0] {
        let traj = trajectory(&q, lambda, 1e4, 1e-9);
        let bound_upto = |xi_hi: f64| -> f64 {
            let r0 = traj.samples()[0].log_r;
            traj.samples()
                .iter()
                .take_while(|s| s.xi <= xi_hi)
                .map(|s| (s.log_r - r0).abs())
                .fold(0.0, f64::max)
        };
        let (b3, b35, b4) = (bound_upto(1e3), bound_upto(3e3), bound_upto(1e4));
        assert!(b35 - b3 < 0.05, "lambda={lambda}: growth {b3} -> {b35}");
        assert!(b4 - b35 < 0.05, "lambda={lambda}: growth {b35} -> {b4}");
    }
}

/// The matched-phase preset at its resonant energy (λ = 0) rectifies the
/// amplitude equation: log R drifts logarithmically instead of converging.
#[test]
fn resonant_preset_amplitude_grows_logarithmically() {
    let q = PotentialSpec::resonant(1.0);
    let traj = trajectory(&q, 0.0, 2e3, 1e-9);
    // Coherent drift beyond the locking transient: the slope of log R per
    // ln ξ approaches A/6.
    let r_at = |xi: f64| traj.state_at(xi).unwrap().log_r;
    let slope = (r_at(2e3) - r_at(2e2)) / (10.0f64).ln();
    assert!(
        (slope - 1.0 / 6.0).abs() < 0.05,
        "log-drift slope {slope} vs 1/6"
    );
    assert!(traj.amplitude_bound() > 0.7);
}

/// Away from the resonant energy the same preset loses phase lock and the
/// amplitude stays comparatively small.
#[test]
fn resonant_preset_detunes_off_resonance() {
    let q = PotentialSpec::resonant(1.0);
    let on = trajectory(&q, 0.0, 1e4, 1e-9).amplitude_bound();
    let off = trajectory(&q, 2.0, 1e4, 1e-9).amplitude_bound();
    assert!(
        on > 3.0 * off,
        "resonant amplitude {on} should dwarf detuned amplitude {off}"
    );
}

/// Trajectory dumps reproduce themselves: the stored partials agree with
/// recomputation through the public quadrature to 1e-10.
#[test]
fn stored_partials_recompute_exactly() {
    let q = PotentialSpec::power_law(1.0, 0.5);
    let traj = trajectory(&q, 1.0, 500.0, 1e-9);
    for &(n, v) in traj.integral6_partials().iter().step_by(17) {
        let again = traj.integral6_partial(n).unwrap();
        assert!((again - v).abs() <= 1e-10, "N = {n}: {again} vs {v}");
    }
}

/// Weierstrass-type potentials make the effective potential oscillate at
/// frequencies up to 2^K; the adaptive integrator must still satisfy the
/// amplitude-integral identity.
#[test]
fn integral6_identity_survives_fast_internal_oscillation() {
    let q = PotentialSpec::weierstrass(0.5, 8).unwrap();
    let traj = trajectory(&q, 1.0, 200.0, 1e-10);
    let s0 = traj.samples()[0];
    for &n in &[3.0, 30.0, 200.0] {
        let lhs = traj.integral6_partial(n).unwrap();
        let rhs = 2.0 * (traj.state_at(n).unwrap().log_r - s0.log_r);
        assert!((lhs - rhs).abs() < 1e-7, "N = {n}: {lhs} vs {rhs}");
    }
}
