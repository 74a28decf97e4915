//! Wave-optics simulation and inverse design for étendue-expanded
//! holographic displays.
//!
//! The crate models a phase SLM illuminated by a grid of mutually
//! incoherent off-axis sources, with a programmable amplitude mask at the
//! Fourier plane, and optimizes time-multiplexed phase/mask pairs against a
//! target light field sampled through binary pupil masks.
//!
//! Module map:
//! - [`field`]: complex fields, grids, unitary 2D DFT
//! - [`propagation`]: angular spectrum transfer function and its adjoint
//! - [`illumination`]: off-axis plane-wave sources and schedules
//! - [`slm`]: phase patterns, 4-bit quantization, pixel-aperture supersampling
//! - [`fourier_plane`]: amplitude masks, pupil masks, eyebox mapping
//! - [`forward`]: the per-source image formation chain and its gradients
//! - [`lightfield`]: procedural target light fields and their file format
//! - [`optimizer`]: stochastic per-view gradient descent
//! - [`analysis`]: étendue/FoV/eyebox bookkeeping, PSNR/SSIM
//! - [`baselines`]: factory for the display configurations I..VII and V*
//! - [`export`]: raw f32 dumps, JSON sidecars, PNG previews

pub mod analysis;
pub mod baselines;
pub mod error;
pub mod export;
pub mod field;
pub mod forward;
pub mod fourier_plane;
pub mod illumination;
pub mod lightfield;
pub mod optimizer;
pub mod propagation;
pub mod slm;

pub use error::{CoreError, Result};
pub use field::{ComplexField, Domain, GridSpec, Precision};
