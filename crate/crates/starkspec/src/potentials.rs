//! Perturbation families for the Stark equation `-u'' - x u + q(x) u = λ u`.
//!
//! Four analytic families plus tabulated data cover the regimes the
//! diagnostics care about:
//!
//! * `zero` — the unperturbed operator, the baseline for every oracle;
//! * `power_law` — `q(x) = A (1+x)^{-β}`, the decaying regime (the
//!   interesting threshold is `β > 1/3`);
//! * `resonant` — `q(x) = A (1+x)^{-d} sin((4/3) x^{3/2} + φ)`, a
//!   Wigner–von Neumann-type potential whose oscillation matches the free
//!   phase `2ξ` under the Liouville map; a demonstration family for
//!   resonance at borderline decay, not a theorem;
//! * `weierstrass_smooth` — `q(x) = A Σ_{k=0..K} 2^{-(α+1)k} sin(2^k x)`,
//!   bounded with a bounded, `α`-Hölder derivative but no decay.
//!
//! All specs are immutable; every operation here is pure.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Symbolic description of a perturbation `q(x)` on the half-axis `x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero,
    PowerLaw {
        amplitude: f64,
        decay_exponent: f64,
    },
    Resonant {
        amplitude: f64,
        phase: f64,
        decay_exponent: f64,
    },
    WeierstrassSmooth {
        amplitude: f64,
        holder_alpha: f64,
        term_count: u32,
    },
    Tabulated {
        /// Strictly increasing `(x, q(x))` samples; evaluation is linear
        /// interpolation and queries outside the grid are range errors.
        samples: Vec<(f64, f64)>,
    },
}

/// Where a spec sits relative to the hypotheses the verdicts cite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisFlag {
    /// Power-law decay with `β > 1/3`: inside the decaying-perturbation
    /// regime where the a.c. spectrum is expected to survive.
    DecaySatisfied,
    /// Power-law decay with `β <= 1/3`, or the resonant family: at or
    /// beyond the borderline where imbedded spectrum may occur.
    DecayBorderline,
    /// Bounded `q` with bounded Hölder-continuous derivative (the smooth
    /// regime).
    SmoothDerivative,
    /// No classification (tabulated data).
    Unclassified,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec::Zero
    }

    pub fn power_law(amplitude: f64, decay_exponent: f64) -> Self {
        PotentialSpec::PowerLaw {
            amplitude,
            decay_exponent,
        }
    }

    /// Resonant preset with the default phase `φ = π/2` and decay `1/2`.
    pub fn resonant(amplitude: f64) -> Self {
        PotentialSpec::Resonant {
            amplitude,
            phase: std::f64::consts::FRAC_PI_2,
            decay_exponent: 0.5,
        }
    }

    pub fn resonant_with(amplitude: f64, phase: f64, decay_exponent: f64) -> Self {
        PotentialSpec::Resonant {
            amplitude,
            phase,
            decay_exponent,
        }
    }

    pub fn weierstrass(holder_alpha: f64, term_count: u32) -> Result<Self> {
        if !(holder_alpha > 0.0 && holder_alpha <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "holder_alpha must lie in (0, 1], got {holder_alpha}"
            )));
        }
        Ok(PotentialSpec::WeierstrassSmooth {
            amplitude: 1.0,
            holder_alpha,
            term_count,
        })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(
                "tabulated potential needs at least two samples".into(),
            ));
        }
        if !samples.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidInput(
                "tabulated grid must be strictly increasing in x".into(),
            ));
        }
        Ok(PotentialSpec::Tabulated { samples })
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            PotentialSpec::Zero => "zero",
            PotentialSpec::PowerLaw { .. } => "power_law",
            PotentialSpec::Resonant { .. } => "resonant",
            PotentialSpec::WeierstrassSmooth { .. } => "weierstrass_smooth",
            PotentialSpec::Tabulated { .. } => "tabulated",
        }
    }

    /// Evaluate `q(x)` for `x >= 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!(
                "potentials are defined on x >= 0, got x = {x}"
            )));
        }
        match self {
            PotentialSpec::Tabulated { samples } => interp_linear(samples, x),
            _ => Ok(self.prepared().eval(x)),
        }
    }

    /// Closed-form derivative `q'(x)` for the analytic families.
    ///
    /// Tabulated specs have no intrinsic derivative; use
    /// [`PotentialSpec::eval_derivative_fd`] with an explicit step instead.
    pub fn eval_derivative(&self, x: f64) -> Result<f64> {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!(
                "potentials are defined on x >= 0, got x = {x}"
            )));
        }
        match self {
            PotentialSpec::Zero => Ok(0.0),
            PotentialSpec::PowerLaw {
                amplitude,
                decay_exponent,
            } => Ok(-amplitude * decay_exponent * (1.0 + x).powf(-decay_exponent - 1.0)),
            PotentialSpec::Resonant {
                amplitude,
                phase,
                decay_exponent,
            } => {
                let psi = (4.0 / 3.0) * x.powf(1.5) + phase;
                let env = (1.0 + x).powf(-decay_exponent);
                let denv = -decay_exponent * (1.0 + x).powf(-decay_exponent - 1.0);
                Ok(amplitude * (denv * psi.sin() + env * 2.0 * x.sqrt() * psi.cos()))
            }
            PotentialSpec::WeierstrassSmooth {
                amplitude,
                holder_alpha,
                term_count,
            } => {
                // q' = A Σ 2^{-α k} cos(2^k x), term by term.
                let mut s = 0.0;
                for k in 0..=*term_count {
                    let freq = (2.0f64).powi(k as i32);
                    s += (2.0f64).powf(-holder_alpha * k as f64) * (freq * x).cos();
                }
                Ok(amplitude * s)
            }
            PotentialSpec::Tabulated { .. } => Err(Error::InvalidInput(
                "tabulated potentials have no closed-form derivative; use eval_derivative_fd"
                    .into(),
            )),
        }
    }

    /// Central finite difference `(q(x+h) - q(x-h)) / 2h`; works for every
    /// family, including tabulated data (where the result is the slope of
    /// the interpolant).
    pub fn eval_derivative_fd(&self, x: f64, h: f64) -> Result<f64> {
        if h <= 0.0 {
            return Err(Error::InvalidInput("finite-difference step must be > 0".into()));
        }
        let hi = self.eval(x + h)?;
        let lo = self.eval((x - h).max(0.0))?;
        let span = (x + h) - (x - h).max(0.0);
        Ok((hi - lo) / span)
    }

    /// Uniform bound on `|q|` where one is available in closed form.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            PotentialSpec::Zero => Some(0.0),
            PotentialSpec::PowerLaw { amplitude, .. } => Some(amplitude.abs()),
            PotentialSpec::Resonant { amplitude, .. } => Some(amplitude.abs()),
            PotentialSpec::WeierstrassSmooth {
                amplitude,
                holder_alpha,
                term_count,
            } => Some(amplitude.abs() * geometric_sum(holder_alpha + 1.0, *term_count)),
            PotentialSpec::Tabulated { samples } => samples
                .iter()
                .map(|&(_, q)| q.abs())
                .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v)))),
        }
    }

    /// Uniform bound on `|q'|` for families with bounded derivative.
    pub fn derivative_bound(&self) -> Option<f64> {
        match self {
            PotentialSpec::Zero => Some(0.0),
            PotentialSpec::WeierstrassSmooth {
                amplitude,
                holder_alpha,
                term_count,
            } => Some(amplitude.abs() * geometric_sum(*holder_alpha, *term_count)),
            _ => None,
        }
    }

    /// Classification used by survey verdicts.
    pub fn hypothesis_flag(&self) -> HypothesisFlag {
        match self {
            PotentialSpec::Zero => HypothesisFlag::DecaySatisfied,
            PotentialSpec::PowerLaw { decay_exponent, .. } => {
                if *decay_exponent > 1.0 / 3.0 {
                    HypothesisFlag::DecaySatisfied
                } else {
                    HypothesisFlag::DecayBorderline
                }
            }
            PotentialSpec::Resonant { .. } => HypothesisFlag::DecayBorderline,
            PotentialSpec::WeierstrassSmooth { .. } => HypothesisFlag::SmoothDerivative,
            PotentialSpec::Tabulated { .. } => HypothesisFlag::Unclassified,
        }
    }

    /// Largest `x` at which the spec can be evaluated (`∞` for analytic
    /// families, the grid end for tabulated data).
    pub fn max_x(&self) -> f64 {
        match self {
            PotentialSpec::Tabulated { samples } => samples.last().map_or(0.0, |s| s.0),
            _ => f64::INFINITY,
        }
    }

    pub(crate) fn prepared(&self) -> PreparedPotential<'_> {
        match self {
            PotentialSpec::Zero => PreparedPotential::Zero,
            PotentialSpec::PowerLaw {
                amplitude,
                decay_exponent,
            } => PreparedPotential::PowerLaw {
                a: *amplitude,
                beta: *decay_exponent,
            },
            PotentialSpec::Resonant {
                amplitude,
                phase,
                decay_exponent,
            } => PreparedPotential::Resonant {
                a: *amplitude,
                phi: *phase,
                d: *decay_exponent,
            },
            PotentialSpec::WeierstrassSmooth {
                amplitude,
                holder_alpha,
                term_count,
            } => {
                let coef: Vec<(f64, f64)> = (0..=*term_count)
                    .map(|k| {
                        (
                            amplitude * (2.0f64).powf(-(holder_alpha + 1.0) * k as f64),
                            (2.0f64).powi(k as i32),
                        )
                    })
                    .collect();
                PreparedPotential::Weierstrass { coef }
            }
            PotentialSpec::Tabulated { samples } => PreparedPotential::Tabulated { samples },
        }
    }
}

fn geometric_sum(exponent: f64, terms: u32) -> f64 {
    (0..=terms).map(|k| (2.0f64).powf(-exponent * k as f64)).sum()
}

fn interp_linear(samples: &[(f64, f64)], x: f64) -> Result<f64> {
    let (x0, _) = samples[0];
    let (x1, _) = samples[samples.len() - 1];
    if x < x0 || x > x1 {
        return Err(Error::Range(format!(
            "x = {x} outside tabulated range [{x0}, {x1}]"
        )));
    }
    let idx = samples.partition_point(|&(xs, _)| xs <= x);
    if idx == samples.len() {
        return Ok(samples[samples.len() - 1].1);
    }
    let i = idx.max(1) - 1;
    let (xa, qa) = samples[i];
    let (xb, qb) = samples[i + 1];
    let t = (x - xa) / (xb - xa);
    Ok(qa + t * (qb - qa))
}

/// Flattened evaluator for the integration hot paths. Assumes the domain
/// was validated up front (the integrators check tabulated coverage before
/// starting), so evaluation itself is infallible.
pub(crate) enum PreparedPotential<'a> {
    Zero,
    PowerLaw { a: f64, beta: f64 },
    Resonant { a: f64, phi: f64, d: f64 },
    Weierstrass { coef: Vec<(f64, f64)> },
    Tabulated { samples: &'a [(f64, f64)] },
}

impl PreparedPotential<'_> {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PreparedPotential::Zero => 0.0,
            PreparedPotential::PowerLaw { a, beta } => a * (1.0 + x).powf(-beta),
            PreparedPotential::Resonant { a, phi, d } => {
                a * (1.0 + x).powf(-d) * ((4.0 / 3.0) * x.powf(1.5) + phi).sin()
            }
            PreparedPotential::Weierstrass { coef } => {
                coef.iter().map(|&(c, f)| c * (f * x).sin()).sum()
            }
            PreparedPotential::Tabulated { samples } => {
                // Clamped lookup; coverage was checked by the caller.
                let n = samples.len();
                if x <= samples[0].0 {
                    return samples[0].1;
                }
                if x >= samples[n - 1].0 {
                    return samples[n - 1].1;
                }
                let idx = samples.partition_point(|&(xs, _)| xs <= x);
                let (xa, qa) = samples[idx - 1];
                let (xb, qb) = samples[idx];
                qa + (x - xa) / (xb - xa) * (qb - qa)
            }
        }
    }
}

/// Result of a decay verification sweep.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DecayCheck {
    /// Whether the weighted envelope stays finite and non-increasing over
    /// the last decade of the grid.
    pub holds: bool,
    /// `sup |q(x)| (1+x)^β` over the grid.
    pub best_constant: f64,
}

/// Sweep `|q(x)| (1+x)^β` over `grid` and report the best constant together
/// with a stability flag: the envelope over the last decade of the grid must
/// not exceed the envelope seen before it.
pub fn verify_decay(spec: &PotentialSpec, beta: f64, grid: &[f64]) -> Result<DecayCheck> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("verify_decay needs a nonempty grid".into()));
    }
    let mut best = 0.0f64;
    let mut head_max = 0.0f64;
    let mut tail_max = 0.0f64;
    let x_hi = grid.iter().cloned().fold(0.0f64, f64::max);
    let split = x_hi / 10.0;
    let mut has_head = false;
    for &x in grid {
        let e = spec.eval(x)?.abs() * (1.0 + x).powf(beta);
        best = best.max(e);
        if x < split {
            head_max = head_max.max(e);
            has_head = true;
        } else {
            tail_max = tail_max.max(e);
        }
    }
    // Without a full decade of leading grid there is no envelope to compare
    // against; fall back to plain finiteness.
    let holds = best.is_finite() && (!has_head || tail_max <= head_max * (1.0 + 1e-9));
    Ok(DecayCheck {
        holds,
        best_constant: best,
    })
}

/// Empirical Hölder constant of `q'`: `max |q'(x+h) - q'(x)| / h^α` over
/// `grid × h_grid`. Requires a family with a closed-form derivative and
/// increments `h` in `(0, 1]`.
pub fn verify_holder(
    spec: &PotentialSpec,
    alpha: f64,
    grid: &[f64],
    h_grid: &[f64],
) -> Result<f64> {
    if grid.is_empty() || h_grid.is_empty() {
        return Err(Error::InvalidInput("verify_holder needs nonempty grids".into()));
    }
    if h_grid.iter().any(|&h| h <= 0.0 || h > 1.0) {
        return Err(Error::InvalidInput("h-grid entries must lie in (0, 1]".into()));
    }
    let mut best = 0.0f64;
    for &x in grid {
        let dx = spec.eval_derivative(x)?;
        for &h in h_grid {
            let dxh = spec.eval_derivative(x + h)?;
            best = best.max((dxh - dx).abs() / h.powf(alpha));
        }
    }
    Ok(best)
}

/// One entry of the preset registry.
#[derive(Clone, Debug)]
pub struct PresetInfo {
    pub name: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
}

/// Preset families addressable from the CLI and config files.
pub fn preset_catalog() -> Vec<PresetInfo> {
    vec![
        PresetInfo {
            name: "zero",
            parameters: "",
            description: "unperturbed Stark operator, q = 0",
        },
        PresetInfo {
            name: "power_law",
            parameters: "A=1, beta=0.5",
            description: "q(x) = A (1+x)^-beta; decaying regime for beta > 1/3",
        },
        PresetInfo {
            name: "resonant",
            parameters: "A=1, phi=pi/2, decay=0.5",
            description: "q(x) = A (1+x)^-decay sin((4/3) x^(3/2) + phi); resonant demonstration",
        },
        PresetInfo {
            name: "weierstrass_smooth",
            parameters: "A=1, alpha=0.5, K=8",
            description: "q(x) = A sum_k 2^-(alpha+1)k sin(2^k x); smooth, non-decaying",
        },
        PresetInfo {
            name: "tabulated",
            parameters: "path=<csv>",
            description: "two-column CSV of (x, q) samples, linearly interpolated",
        },
    ]
}

/// Parse a potential description of the form `name` or
/// `name{key=value,key=value}`, e.g. `power_law{A=1,beta=0.5}`.
pub fn parse_potential(s: &str) -> Result<PotentialSpec> {
    let s = s.trim();
    let (name, args) = match s.find('{') {
        Some(i) => {
            if !s.ends_with('}') {
                return Err(Error::Parse(format!("unbalanced braces in `{s}`")));
            }
            (&s[..i], &s[i + 1..s.len() - 1])
        }
        None => (s, ""),
    };
    let mut kv = std::collections::BTreeMap::new();
    for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let num = |kv: &std::collections::BTreeMap<String, String>, key: &str, default: f64| -> Result<f64> {
        match kv.get(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "pi/2" => Ok(std::f64::consts::FRAC_PI_2),
                "pi" => Ok(std::f64::consts::PI),
                _ => v
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("invalid number for `{key}`: `{v}`"))),
            },
        }
    };
    let known = |kv: &std::collections::BTreeMap<String, String>, allowed: &[&str]| -> Result<()> {
        for k in kv.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse(format!("unknown parameter `{k}`")));
            }
        }
        Ok(())
    };
    match name {
        "zero" => {
            known(&kv, &[])?;
            Ok(PotentialSpec::Zero)
        }
        "power_law" => {
            known(&kv, &["A", "beta"])?;
            Ok(PotentialSpec::power_law(
                num(&kv, "A", 1.0)?,
                num(&kv, "beta", 0.5)?,
            ))
        }
        "resonant" => {
            known(&kv, &["A", "phi", "decay"])?;
            Ok(PotentialSpec::resonant_with(
                num(&kv, "A", 1.0)?,
                num(&kv, "phi", std::f64::consts::FRAC_PI_2)?,
                num(&kv, "decay", 0.5)?,
            ))
        }
        "weierstrass_smooth" | "weierstrass" => {
            known(&kv, &["A", "alpha", "K"])?;
            let alpha = num(&kv, "alpha", 0.5)?;
            let k = num(&kv, "K", 8.0)?;
            if k < 0.0 || k.fract() != 0.0 {
                return Err(Error::Parse(format!("K must be a nonnegative integer, got {k}")));
            }
            let mut spec = PotentialSpec::weierstrass(alpha, k as u32)?;
            if let PotentialSpec::WeierstrassSmooth { amplitude, .. } = &mut spec {
                *amplitude = num(&kv, "A", 1.0)?;
            }
            Ok(spec)
        }
        "tabulated" => {
            known(&kv, &["path"])?;
            let path = kv
                .get("path")
                .ok_or_else(|| Error::Parse("tabulated requires path=<csv>".into()))?;
            load_tabulated_csv(std::path::Path::new(path))
        }
        other => Err(Error::Parse(format!(
            "unknown potential family `{other}` (see the presets command)"
        ))),
    }
}

/// Load a tabulated potential from a two-column CSV of `(x, q)` rows.
/// Lines starting with `#` and a non-numeric header row are skipped.
pub fn load_tabulated_csv(path: &std::path::Path) -> Result<PotentialSpec> {
    let text = std::fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (a, b) = (cols.next(), cols.next());
        match (a.map(str::parse::<f64>), b.map(str::parse::<f64>)) {
            (Some(Ok(x)), Some(Ok(q))) => samples.push((x, q)),
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(Error::Parse(format!(
                    "{}:{}: expected two numeric columns",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    PotentialSpec::tabulated(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_family_evaluates_to_zero() {
        assert_eq!(PotentialSpec::zero().eval(5.0).unwrap(), 0.0);
        assert_eq!(PotentialSpec::zero().eval_derivative(1.0).unwrap(), 0.0);
    }

    #[test]
    fn power_law_closed_form() {
        let q = PotentialSpec::power_law(1.0, 0.5);
        assert_relative_eq!(q.eval(3.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(q.eval_derivative(0.0).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn weierstrass_vanishes_at_origin() {
        let q = PotentialSpec::weierstrass(0.5, 8).unwrap();
        assert_eq!(q.eval(0.0).unwrap(), 0.0);
    }

    #[test]
    fn weierstrass_derivative_at_origin_matches_direct_summation() {
        // Independent oracle: sum the series term by term.
        let oracle: f64 = (0..=8).map(|k| (2.0f64).powf(-0.5 * k as f64)).sum();
        assert_relative_eq!(oracle, 3.2633252147247767, epsilon = 1e-12);
        let q = PotentialSpec::weierstrass(0.5, 8).unwrap();
        assert_relative_eq!(q.eval_derivative(0.0).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn weierstrass_bounds_hold_on_grid() {
        let q = PotentialSpec::weierstrass(0.5, 8).unwrap();
        let sup = q.sup_bound().unwrap();
        let dsup = q.derivative_bound().unwrap();
        for i in 0..2000 {
            let x = i as f64 * 0.05;
            assert!(q.eval(x).unwrap().abs() <= sup + 1e-12);
            assert!(q.eval_derivative(x).unwrap().abs() <= dsup + 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let specs = [
            PotentialSpec::power_law(1.0, 0.5),
            PotentialSpec::resonant(1.0),
            PotentialSpec::weierstrass(0.5, 8).unwrap(),
        ];
        for q in &specs {
            for &x in &[0.5, 1.0, 3.0, 10.0] {
                let fd = q.eval_derivative_fd(x, 1e-5).unwrap();
                let cf = q.eval_derivative(x).unwrap();
                assert_relative_eq!(cf, fd, max_relative = 1e-6, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn power_law_weighted_envelope_is_exactly_amplitude() {
        let q = PotentialSpec::power_law(2.0, 0.5);
        let grid: Vec<f64> = (0..200).map(|i| (i as f64 * 0.05).exp() - 1.0).collect();
        let check = verify_decay(&q, 0.5, &grid).unwrap();
        assert!(check.holds);
        assert_relative_eq!(check.best_constant, 2.0, epsilon = 1e-12);
        for &x in &grid {
            assert_relative_eq!(q.eval(x).unwrap() * (1.0 + x).powf(0.5), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_decay_check_holds_with_zero_constant() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let check = verify_decay(&PotentialSpec::zero(), 1.0, &grid).unwrap();
        assert!(check.holds);
        assert_eq!(check.best_constant, 0.0);
    }

    #[test]
    fn resonant_decay_check_near_one() {
        // Grid evaluation oracle: with phase pi/2 the envelope peaks at x = 0
        // where it equals exactly 1.
        let q = PotentialSpec::resonant(1.0);
        let mut grid: Vec<f64> = (0..4000).map(|i| i as f64 * 0.01).collect();
        grid.extend((0..400).map(|i| 40.0 * (i as f64 * 0.0138).exp()));
        let check = verify_decay(&q, 0.34, &grid).unwrap();
        assert!(check.holds);
        assert_relative_eq!(check.best_constant, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn holder_constant_zero_for_zero_family() {
        let grid = [0.0, 1.0, 2.0];
        let h = [0.5, 0.1];
        assert_eq!(verify_holder(&PotentialSpec::zero(), 0.5, &grid, &h).unwrap(), 0.0);
    }

    #[test]
    fn power_law_lipschitz_constant_bounded_by_second_derivative() {
        // |q''(x)| = 0.75 (1+x)^{-2.5}, maximized at x = 0.
        let q = PotentialSpec::power_law(1.0, 0.5);
        let grid: Vec<f64> = (0..1000).map(|i| i as f64 * 0.1).collect();
        let h: Vec<f64> = (1..=10).map(|j| (2.0f64).powi(-j)).collect();
        let c = verify_holder(&q, 1.0, &grid, &h).unwrap();
        assert!(c <= 0.75 + 1e-9, "alpha=1 Holder constant {c} exceeds sup|q''| = 0.75");
    }

    #[test]
    fn weierstrass_holder_constant_stabilizes_at_matching_exponent() {
        // At the native exponent the constant stabilizes as K grows; above
        // it the constant grows like 2^{(alpha'-alpha)K}.
        let grid: Vec<f64> = (0..600).map(|i| i as f64 * 0.01).collect();
        let h: Vec<f64> = (1..=12).map(|j| (2.0f64).powi(-j)).collect();
        let at = |alpha_test: f64, k: u32| {
            let q = PotentialSpec::weierstrass(0.5, k).unwrap();
            verify_holder(&q, alpha_test, &grid, &h).unwrap()
        };
        let (c4, c6, c8) = (at(0.5, 4), at(0.5, 6), at(0.5, 8));
        assert!((c8 - c6).abs() / c8 < 0.10, "K=6 -> {c6}, K=8 -> {c8}");
        assert!((c6 - c4).abs() / c6 < 0.25);
        // Test exponent above alpha: expect growth ~ 2^{0.25 * K}.
        let (g4, g8) = (at(0.75, 4), at(0.75, 8));
        let growth = g8 / g4;
        let predicted = (2.0f64).powf(0.25 * 4.0);
        assert!(
            growth > predicted * 0.5 && growth < predicted * 2.0,
            "growth {growth} vs predicted {predicted}"
        );
    }

    #[test]
    fn tabulated_interpolates_and_rejects_out_of_range() {
        let q = PotentialSpec::tabulated(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 0.0)]).unwrap();
        assert_relative_eq!(q.eval(0.5).unwrap(), 2.0);
        assert_relative_eq!(q.eval(1.5).unwrap(), 1.5);
        assert!(matches!(q.eval(2.5), Err(Error::Range(_))));
        assert!(PotentialSpec::tabulated(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn parse_registry_round_trips() {
        let q = parse_potential("power_law{A=1,beta=0.5}").unwrap();
        assert_eq!(q, PotentialSpec::power_law(1.0, 0.5));
        assert_eq!(parse_potential("zero").unwrap(), PotentialSpec::Zero);
        let w = parse_potential("weierstrass_smooth{alpha=0.5,K=8}").unwrap();
        assert_eq!(w, PotentialSpec::weierstrass(0.5, 8).unwrap());
        assert!(parse_potential("power_law{gamma=2}").is_err());
        assert!(parse_potential("nosuch").is_err());
    }

    #[test]
    fn hypothesis_flags() {
        assert_eq!(
            PotentialSpec::power_law(1.0, 0.5).hypothesis_flag(),
            HypothesisFlag::DecaySatisfied
        );
        assert_eq!(
            PotentialSpec::power_law(1.0, 0.3).hypothesis_flag(),
            HypothesisFlag::DecayBorderline
        );
        assert_eq!(
            PotentialSpec::resonant(1.0).hypothesis_flag(),
            HypothesisFlag::DecayBorderline
        );
        assert_eq!(
            PotentialSpec::weierstrass(0.5, 8).unwrap().hypothesis_flag(),
            HypothesisFlag::SmoothDerivative
        );
    }
}
