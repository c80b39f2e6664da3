//! Numerical toolkit for the spectral analysis of perturbed Stark operators.
//!
//! The toolkit studies the half-line behaviour of solutions of
//!
//! ```text
//! -u'' - x u + q(x) u = λ u
//! ```
//!
//! for perturbations `q` that either decay or are smooth. An explicit
//! Liouville transformation turns the equation into a unit-energy
//! Schrödinger equation with a decaying effective potential; Prüfer
//! variables reduce that to first-order amplitude and phase equations
//! whose diagnostic integrals decide, energy by energy, whether the
//! absolutely continuous spectrum survives the perturbation.
//!
//! What lives where:
//!
//! * [`potentials`] — perturbation families and their decay/smoothness
//!   verification sweeps;
//! * [`transforms`] — the Liouville map, the effective potential, and the
//!   exact pushforward/pullback of solution data;
//! * [`prufer`] — amplitude/phase integration, the amplitude-integral
//!   identity, σ/γ phase decompositions, and the two control expressions;
//! * [`oscillatory`] — phase-resolved quadrature for oscillatory tails,
//!   windowed Fourier transforms, the symmetric maximal function, and the
//!   exceptional-set diagnostics;
//! * [`subordinacy`] — direct integration of the original equation, L²
//!   growth, subordinacy ratios, asymptotic envelope fits, and the survey
//!   layer that assembles per-energy verdicts;
//! * [`ode`] — the adaptive Dormand–Prince engine shared by the solvers;
//! * [`report`] — deterministic CSV/JSON rendering of the outputs.
//!
//! The `starkspec` binary in this workspace drives batch surveys on top of
//! this crate; the book under `book/` walks through the mathematics with
//! runnable examples (mirrored below as doc-tests).

pub mod error;
pub mod fit;
pub mod ode;
pub mod oscillatory;
pub mod potentials;
pub mod prufer;
pub mod report;
pub mod subordinacy;
pub mod transforms;

pub use error::{Error, Result};
pub use potentials::PotentialSpec;
pub use transforms::{LiouvilleMap, LIOUVILLE_C};

/// Version string embedded in every report and data file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The book chapters double as doc-tests so the guide can never drift from
// the API it documents.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/liouville.md")]
    mod liouville {}
    #[doc = include_str!("../../../book/src/prufer.md")]
    mod prufer {}
    #[doc = include_str!("../../../book/src/oscillatory.md")]
    mod oscillatory {}
    #[doc = include_str!("../../../book/src/subordinacy.md")]
    mod subordinacy {}
}
