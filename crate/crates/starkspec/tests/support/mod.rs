//! Shared oracles for the integration suites: a high-accuracy Airy
//! implementation (power series + asymptotic expansion), an independent
//! fixed-step RK4 integrator, and brute-force oscillatory quadrature.
//! Everything here is deliberately separate from the library's own
//! integration and quadrature paths.
#![allow(dead_code)]

use num_complex::Complex64;

pub const AI_0: f64 = 0.3550280538878172;
pub const AIP_0: f64 = -0.2588194037928068;

/// `(Ai(-x), Ai'(-x))` for `x >= 0`.
///
/// Power series up to `x = 8`, the standard asymptotic expansion beyond;
/// relative accuracy is ~1e-9 near the seam and improves rapidly on both
/// sides of it.
pub fn airy_ai_neg(x: f64) -> (f64, f64) {
    assert!(x >= 0.0);
    if x <= 8.0 {
        airy_series(-x)
    } else {
        airy_asymptotic_neg(x)
    }
}

/// Maclaurin series of Ai and Ai' at argument `z` (accurate for |z| <= ~8).
fn airy_series(z: f64) -> (f64, f64) {
    // Ai = Ai(0) f(z) + Ai'(0) g(z) with f, g the standard ODE solutions:
    // a_{n+3} = a_n / ((n+3)(n+2)).
    let z3 = z * z * z;
    let (mut f, mut fp) = (1.0, 0.0);
    let (mut g, mut gp) = (z, 1.0);
    let mut tf = 1.0; // z^{3k} coefficient chain for f
    let mut tg = z; // z^{3k+1} chain for g
    for k in 0..60 {
        let k3 = 3.0 * k as f64;
        // f term: z^{3k} -> z^{3k+3}, derivative (3k+3) z^{3k+2}.
        tf *= z3 / ((k3 + 3.0) * (k3 + 2.0));
        f += tf;
        if z != 0.0 {
            fp += tf * (k3 + 3.0) / z;
        }
        // g term: z^{3k+1} -> z^{3k+4}.
        tg *= z3 / ((k3 + 4.0) * (k3 + 3.0));
        g += tg;
        if z != 0.0 {
            gp += tg * (k3 + 4.0) / z;
        }
        if tf.abs() < 1e-22 && tg.abs() < 1e-22 {
            break;
        }
    }
    (AI_0 * f + AIP_0 * g, AI_0 * fp + AIP_0 * gp)
}

/// Asymptotic expansion of `(Ai(-x), Ai'(-x))` for large `x`:
/// with `ζ = (2/3) x^{3/2}`,
/// `Ai(-x) ~ π^{-1/2} x^{-1/4} [cos(ζ-π/4) Σ (-1)^k u_{2k} ζ^{-2k}
///                            + sin(ζ-π/4) Σ (-1)^k u_{2k+1} ζ^{-2k-1}]`,
/// `Ai'(-x) ~ π^{-1/2} x^{1/4} [sin(ζ-π/4) Σ (-1)^k v_{2k} ζ^{-2k}
///                            - cos(ζ-π/4) Σ (-1)^k v_{2k+1} ζ^{-2k-1}]`,
/// `u_0 = 1`, `u_{k+1}/u_k = (6k+1)(6k+3)(6k+5) / (216 (k+1) (2k+1))`,
/// `v_k = u_k (6k+1)/(1-6k)`.
fn airy_asymptotic_neg(x: f64) -> (f64, f64) {
    let zeta = (2.0 / 3.0) * x.powf(1.5);
    let mut u = [0.0f64; 8];
    let mut v = [0.0f64; 8];
    u[0] = 1.0;
    v[0] = 1.0;
    for k in 0..7 {
        let kf = k as f64;
        u[k + 1] = u[k] * (6.0 * kf + 1.0) * (6.0 * kf + 3.0) * (6.0 * kf + 5.0)
            / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0));
        v[k + 1] = u[k + 1] * (6.0 * (kf + 1.0) + 1.0) / (1.0 - 6.0 * (kf + 1.0));
    }
    let (mut pe, mut po) = (0.0, 0.0); // even/odd u-sums
    let (mut qe, mut qo) = (0.0, 0.0); // even/odd v-sums
    let mut sign = 1.0;
    for k in 0..4 {
        pe += sign * u[2 * k] / zeta.powi(2 * k as i32);
        po += sign * u[2 * k + 1] / zeta.powi(2 * k as i32 + 1);
        qe += sign * v[2 * k] / zeta.powi(2 * k as i32);
        qo += sign * v[2 * k + 1] / zeta.powi(2 * k as i32 + 1);
        sign = -sign;
    }
    let (s, c) = (zeta - std::f64::consts::FRAC_PI_4).sin_cos();
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let ai = inv_sqrt_pi * x.powf(-0.25) * (c * pe + s * po);
    let aip = inv_sqrt_pi * x.powf(0.25) * (s * qe - c * qo);
    (ai, aip)
}

/// Closed form for `∫₀^N Ai(-x)² dx`, from the antiderivative
/// `x Ai(-x)² + Ai'(-x)²` (differentiating reproduces the integrand via
/// the Airy equation).
pub fn airy_l2_exact(n: f64) -> f64 {
    let (ai, aip) = airy_ai_neg(n);
    n * ai * ai + aip * aip - AIP_0 * AIP_0
}

/// Classical fixed-step RK4 for small systems; the independent integration
/// route used by the oracle-equivalence checks.
pub fn rk4<const N: usize>(
    f: impl Fn(f64, [f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    steps: usize,
) -> [f64; N] {
    let h = (t1 - t0) / steps as f64;
    let mut t = t0;
    let mut y = y0;
    for _ in 0..steps {
        y = rk4_step(&f, t, y, h);
        t += h;
    }
    y
}

fn rk4_step<const N: usize>(
    f: &impl Fn(f64, [f64; N]) -> [f64; N],
    t: f64,
    y: [f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let mut ya = [0.0; N];
    for i in 0..N {
        ya[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, ya);
    for i in 0..N {
        ya[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, ya);
    for i in 0..N {
        ya[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, ya);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// RK4 driver that records the state at each requested checkpoint
/// (ascending, within `[t0, t_end]`), stepping with `h ≈ h_target` adjusted
/// to land exactly on checkpoints.
pub fn rk4_checkpoints<const N: usize>(
    f: impl Fn(f64, [f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    checkpoints: &[f64],
    h_target: f64,
) -> Vec<[f64; N]> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut t = t0;
    let mut y = y0;
    for &ck in checkpoints {
        assert!(ck >= t);
        if ck > t {
            let n = ((ck - t) / h_target).ceil() as usize;
            let h = (ck - t) / n.max(1) as f64;
            for _ in 0..n.max(1) {
                y = rk4_step(&f, t, y, h);
                t += h;
            }
        }
        out.push(y);
    }
    out
}

/// Composite Simpson quadrature of a complex integrand (`n` even).
pub fn simpson_complex(a: f64, b: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + j as f64 * h);
    }
    acc * (h / 3.0)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    // Reference values computed independently at high precision.
    const TABLE: [(f64, f64, f64); 8] = [
        (0.0, 0.35502805388781724, -0.2588194037928068),
        (1.0, 0.53556088329235212, -0.010160567116645209),
        (2.5, -0.11232506769296609, 0.67885273426479436),
        (5.0, 0.35076100902411432, 0.32719281855444314),
        (8.0, -0.052705050356386203, 0.93556093819830655),
        (12.0, -0.066555175054373129, 1.0231104533679707),
        (50.0, -0.16188142361232092, 0.96898983727674909),
        (400.0, -0.037957048050352375, -2.4062453957621027),
    ];

    #[test]
    fn airy_oracle_matches_reference_table() {
        for &(x, ai, aip) in &TABLE {
            let (a, ap) = airy_ai_neg(x);
            assert!(
                (a - ai).abs() <= 1e-9 * (1.0 + ai.abs()),
                "Ai(-{x}): {a} vs {ai}"
            );
            assert!(
                (ap - aip).abs() <= 1e-9 * (1.0 + aip.abs()),
                "Ai'(-{x}): {ap} vs {aip}"
            );
        }
    }

    #[test]
    fn airy_series_asymptotic_seam_is_continuous() {
        for &x in &[7.2, 7.9, 8.1, 9.5] {
            let s = airy_series(-x);
            let a = airy_asymptotic_neg(x);
            assert!((s.0 - a.0).abs() < 1e-8, "seam Ai at {x}: {s:?} vs {a:?}");
            assert!((s.1 - a.1).abs() < 1e-8, "seam Ai' at {x}: {s:?} vs {a:?}");
        }
    }

    #[test]
    fn rk4_reproduces_airy_from_series_data() {
        // u'' = -x u with u = Ai(-x).
        let (a1, ap1) = airy_ai_neg(1.0);
        let y = rk4(
            |x, y: [f64; 2]| [y[1], -x * y[0]],
            0.0,
            [AI_0, -AIP_0],
            1.0,
            20_000,
        );
        assert!((y[0] - a1).abs() < 1e-12);
        assert!((y[1] + ap1).abs() < 1e-12);
    }
}
