//! Deterministic rendering of trajectories, tail tables, and survey
//! reports. Identical inputs produce byte-identical output: floats are
//! printed with Rust's shortest round-trip formatting, orderings are fixed,
//! and every file carries the toolkit version and a hash of the
//! configuration that produced it.

use crate::oscillatory::OscillatoryTail;
use crate::potentials::PotentialSpec;
use crate::prufer::PruferTrajectory;
use crate::subordinacy::SurveyConfig;

/// FNV-1a 64-bit hash, hex-encoded. Stable across platforms and runs; used
/// as a configuration fingerprint, not for security.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Fingerprint of a survey configuration (potential + λ-grid + tolerances).
pub fn config_hash(q: &PotentialSpec, lambdas: &[f64], config: &SurveyConfig) -> String {
    let canonical = serde_json::to_string(&(q, lambdas, config)).expect("config serializes");
    fnv1a_hex(canonical.as_bytes())
}

/// Leading comment line embedded in every CSV output.
pub fn csv_meta_line(config_hash: &str) -> String {
    format!("# starkspec v{} config={config_hash}", crate::VERSION)
}

/// Render a trajectory's diagnostic grid as CSV with the seven canonical
/// columns.
pub fn trajectory_csv(traj: &PruferTrajectory, config_hash: &str) -> String {
    let mut out = String::new();
    out.push_str(&csv_meta_line(config_hash));
    out.push('\n');
    out.push_str("xi,logR,theta,V,b,sigma,gamma\n");
    for row in traj.diagnostic_rows() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.xi, row.log_r, row.theta, row.v, row.b, row.sigma, row.gamma
        ));
    }
    out
}

/// Render a table of oscillatory tails as CSV.
pub fn tails_csv(tails: &[OscillatoryTail], config_hash: &str) -> String {
    let mut out = String::new();
    out.push_str(&csv_meta_line(config_hash));
    out.push('\n');
    out.push_str("N,re,im,abs,truncation_error,fitted_exponent\n");
    for t in tails {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.n,
            t.value_re,
            t.value_im,
            t.magnitude(),
            t.truncation_error,
            t.fitted_exponent
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv1a_hex(b""), "cbf29ce484222325");
        assert_eq!(fnv1a_hex(b"starkspec"), fnv1a_hex(b"starkspec"));
        assert_ne!(fnv1a_hex(b"a"), fnv1a_hex(b"b"));
    }

    #[test]
    fn trajectory_csv_has_seven_columns_and_meta() {
        let q = PotentialSpec::zero();
        let start = crate::prufer::initial_state(&q, 0.0, 1.0, 1.0).unwrap();
        let traj = crate::prufer::integrate_prufer(&q, 0.0, start, 100.0, 1e-9).unwrap();
        let csv = trajectory_csv(&traj, "deadbeefdeadbeef");
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# starkspec v"));
        assert_eq!(lines.next().unwrap().split(',').count(), 7);
        for line in lines {
            assert_eq!(line.split(',').count(), 7);
        }
    }
}
