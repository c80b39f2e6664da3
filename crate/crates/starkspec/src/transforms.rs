//! The Liouville change of variables for the Stark equation.
//!
//! With `ξ = (2/3) x^{3/2}` and `ω(ξ) = x(ξ)^{1/4} u(x(ξ))`, the equation
//! `-u'' - x u + q(x) u = λ u` becomes the unit-energy Schrödinger equation
//!
//! ```text
//! -ω'' + V(ξ, λ) ω = ω,
//! V(ξ, λ) = -5/(36 ξ²) + (-λ + q(c ξ^{2/3})) / (c ξ^{2/3}),
//! ```
//!
//! where `c = (3/2)^{2/3}`, so the growing momentum of the original problem
//! turns into a decaying effective potential. (The sign of the `ξ^{-2}`
//! term is fixed by the transformation itself — substituting the Airy
//! solutions of the unperturbed equation pins it to `-5/36` — and the
//! conjugacy tests hold the implementation to it; its sign is immaterial to
//! every convergence statement downstream, since the term is absolutely
//! integrable either way.) Everything else (Prüfer variables, convergence
//! diagnostics) works on the transformed equation; this module supplies the
//! map, the effective potential, and the exact conversion of solution data
//! in both directions.

use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;

/// `c = (3/2)^{2/3}`, the constant relating the two independent variables
/// through `x = c ξ^{2/3}`.
pub const LIOUVILLE_C: f64 = 1.3103706971044482;

/// The explicit Liouville map for the Stark potential.
///
/// A fixed map; the struct exists to group the forward/backward transforms
/// with their shared constant.
#[derive(Clone, Copy, Debug, Default)]
pub struct LiouvilleMap;

impl LiouvilleMap {
    pub fn new() -> Self {
        LiouvilleMap
    }

    /// The constant `c = (3/2)^{2/3}`.
    pub fn c(&self) -> f64 {
        LIOUVILLE_C
    }

    /// `ξ(x) = (2/3) x^{3/2}` for `x >= 0`.
    pub fn xi_of_x(&self, x: f64) -> Result<f64> {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("xi_of_x requires x >= 0, got {x}")));
        }
        Ok((2.0 / 3.0) * x.powf(1.5))
    }

    /// `x(ξ) = c ξ^{2/3}` for `ξ >= 0`.
    pub fn x_of_xi(&self, xi: f64) -> Result<f64> {
        if xi < 0.0 || !xi.is_finite() {
            return Err(Error::Domain(format!("x_of_xi requires xi >= 0, got {xi}")));
        }
        Ok(LIOUVILLE_C * xi.powf(2.0 / 3.0))
    }
}

/// Effective potential `V(ξ, λ)` of the transformed equation, `ξ > 0`.
pub fn effective_potential(q: &PotentialSpec, xi: f64, lambda: f64) -> Result<f64> {
    if xi <= 0.0 {
        return Err(Error::Domain(format!(
            "effective potential is singular at xi = 0 (got {xi}); start at xi0 > 0"
        )));
    }
    let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
    Ok(-5.0 / (36.0 * xi * xi) + (q.eval(x)? - lambda) / x)
}

/// The λ-independent part `b(ξ) = -5/(36 ξ²) + q(c ξ^{2/3}) / (c ξ^{2/3})`,
/// so that `V(ξ, λ) = b(ξ) - λ / (c ξ^{2/3})` holds identically.
pub fn b_term(q: &PotentialSpec, xi: f64) -> Result<f64> {
    if xi <= 0.0 {
        return Err(Error::Domain(format!(
            "b(xi) is singular at xi = 0 (got {xi})"
        )));
    }
    let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
    Ok(-5.0 / (36.0 * xi * xi) + q.eval(x)? / x)
}

/// Push original solution data `(u, u')(x)` to transformed data
/// `(ω, ω')(ξ)` at the corresponding point `ξ(x)`, for `x > 0`.
///
/// `ω = x^{1/4} u` and, with `dx/dξ = x^{-1/2}`,
/// `ω' = (1/4) x^{-5/4} u + x^{-1/4} u'`.
pub fn push_solution(u: f64, du: f64, x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "push_solution requires x > 0, got {x}"
        )));
    }
    let omega = x.powf(0.25) * u;
    let domega = 0.25 * x.powf(-1.25) * u + x.powf(-0.25) * du;
    Ok((omega, domega))
}

/// Exact inverse of [`push_solution`], taking `(ω, ω')(ξ)` back to
/// `(u, u')(x(ξ))`, for `ξ > 0`.
pub fn pull_solution(omega: f64, domega: f64, xi: f64) -> Result<(f64, f64)> {
    if xi <= 0.0 {
        return Err(Error::Domain(format!(
            "pull_solution requires xi > 0, got {xi}"
        )));
    }
    let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
    let u = x.powf(-0.25) * omega;
    let du = x.powf(0.25) * domega - 0.25 * x.powf(-1.25) * omega;
    Ok((u, du))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_is_three_halves_to_two_thirds() {
        assert_relative_eq!(LIOUVILLE_C, (1.5f64).powf(2.0 / 3.0), epsilon = 1e-15);
    }

    #[test]
    fn forward_map_closed_forms() {
        let m = LiouvilleMap::new();
        assert_eq!(m.xi_of_x(0.0).unwrap(), 0.0);
        assert_relative_eq!(m.xi_of_x(1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert!(m.xi_of_x(-1.0).is_err());
    }

    #[test]
    fn backward_map_closed_forms() {
        let m = LiouvilleMap::new();
        assert_eq!(m.x_of_xi(0.0).unwrap(), 0.0);
        assert_relative_eq!(m.x_of_xi(1.0).unwrap(), LIOUVILLE_C, epsilon = 1e-15);
        assert_relative_eq!(m.x_of_xi(2.0 / 3.0).unwrap(), 1.0, epsilon = 1e-14);
        assert!(m.x_of_xi(-0.5).is_err());
    }

    #[test]
    fn effective_potential_zero_family() {
        // The unperturbed effective potential is the pure transform term
        // -5/(36 ξ²); its magnitude at ξ = 1 is 5/36 ≈ 0.13889.
        let q = PotentialSpec::zero();
        assert_relative_eq!(
            effective_potential(&q, 1.0, 0.0).unwrap(),
            -5.0 / 36.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            effective_potential(&q, 1.0, 1.0).unwrap(),
            -5.0 / 36.0 - 1.0 / LIOUVILLE_C,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            effective_potential(&q, 1.0, 1.0).unwrap(),
            -0.902_031_717_257_777,
            epsilon = 1e-14
        );
        assert!(effective_potential(&q, 0.0, 0.0).is_err());
    }

    #[test]
    fn effective_potential_transforms_the_airy_equation() {
        // Conjugacy oracle at a point: ω(ξ) = x^{1/4} Ai(-x) must satisfy
        // ω'' = (V - 1) ω; check V against a five-point second difference of
        // an independently computed ω (power-series Airy values).
        fn airy_ai(z: f64) -> f64 {
            // Maclaurin series, adequate for |z| <= 4.
            let (a0, da0) = (0.3550280538878172, -0.2588194037928068);
            let (mut f, mut g) = (1.0, z);
            let (mut tf, mut tg) = (1.0, z);
            for k in 0..40 {
                let k3 = 3.0 * k as f64;
                tf *= z * z * z / ((k3 + 3.0) * (k3 + 2.0));
                tg *= z * z * z / ((k3 + 4.0) * (k3 + 3.0));
                f += tf;
                g += tg;
            }
            a0 * f + da0 * g
        }
        let omega = |xi: f64| {
            let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
            x.powf(0.25) * airy_ai(-x)
        };
        let q = PotentialSpec::zero();
        for &xi in &[1.0, 1.5, 2.5] {
            let h = 1e-3;
            let w2 = (omega(xi + h) - 2.0 * omega(xi) + omega(xi - h)) / (h * h);
            let v = effective_potential(&q, xi, 0.0).unwrap();
            assert_relative_eq!(w2 / omega(xi), v - 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn effective_potential_power_law_direct_evaluation() {
        // Direct evaluation oracle: -5/36 + (1+c)^{-1/2} / c at xi = 1.
        let q = PotentialSpec::power_law(1.0, 0.5);
        let expected = -5.0 / 36.0 + (1.0 + LIOUVILLE_C).powf(-0.5) / LIOUVILLE_C;
        assert_relative_eq!(expected, 0.363_181_945_256_125_2, epsilon = 1e-12);
        assert_relative_eq!(
            effective_potential(&q, 1.0, 0.0).unwrap(),
            expected,
            epsilon = 1e-14
        );
    }

    #[test]
    fn b_term_is_lambda_free_part_of_v() {
        let q = PotentialSpec::power_law(1.0, 0.5);
        for &xi in &[0.5, 1.0, 8.0, 100.0] {
            for &lambda in &[-2.0, 0.0, 1.0, 3.0] {
                let v = effective_potential(&q, xi, lambda).unwrap();
                let b = b_term(&q, xi).unwrap();
                let x = LIOUVILLE_C * xi.powf(2.0 / 3.0);
                assert_relative_eq!(v - b, -lambda / x, epsilon = 1e-13, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn b_term_power_law_at_xi_eight() {
        // Direct evaluation oracle; x(8) = 4c.
        let q = PotentialSpec::power_law(1.0, 0.5);
        let x = LIOUVILLE_C * (8.0f64).powf(2.0 / 3.0);
        assert_relative_eq!(x, 4.0 * LIOUVILLE_C, epsilon = 1e-13);
        let expected =
            -5.0 / (36.0 * 64.0) + (1.0 + 4.0 * LIOUVILLE_C).powf(-0.5) / (4.0 * LIOUVILLE_C);
        assert_relative_eq!(expected, 0.074_196_195_946_084_63, epsilon = 1e-12);
        assert_relative_eq!(b_term(&q, 8.0).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn push_solution_closed_forms() {
        assert_eq!(push_solution(0.0, 0.0, 1.0).unwrap(), (0.0, 0.0));
        let (w, dw) = push_solution(1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(w, 1.0);
        assert_relative_eq!(dw, 0.25);
        assert!(push_solution(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn pull_solution_closed_forms() {
        assert_eq!(pull_solution(0.0, 0.0, 1.0).unwrap(), (0.0, 0.0));
        let (u, du) = pull_solution(1.0, 0.25, 2.0 / 3.0).unwrap();
        assert_relative_eq!(u, 1.0, epsilon = 1e-13);
        assert!(du.abs() < 1e-13);
        assert!(pull_solution(1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn map_round_trip(x in 1e-6f64..1e6) {
            let m = LiouvilleMap::new();
            let xi = m.xi_of_x(x).unwrap();
            let back = m.x_of_xi(xi).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs());
        }

        #[test]
        fn push_pull_round_trip(u in -10.0f64..10.0, du in -10.0f64..10.0, x in 1e-3f64..1e3) {
            let m = LiouvilleMap::new();
            let xi = m.xi_of_x(x).unwrap();
            let (w, dw) = push_solution(u, du, x).unwrap();
            let (u2, du2) = pull_solution(w, dw, xi).unwrap();
            prop_assert!((u2 - u).abs() <= 1e-12 * (1.0 + u.abs()));
            prop_assert!((du2 - du).abs() <= 1e-12 * (1.0 + du.abs() + u.abs()));
        }
    }
}
