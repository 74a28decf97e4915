//! Phase SLM model: phase-to-field conversion, level quantization with a
//! straight-through gradient contract, and higher-diffraction-order (HDO)
//! generation by pixel-aperture supersampling.
//!
//! HDOs come from the pixelated structure of the SLM. We model them with a
//! zero-order hold: each SLM pixel's complex value is replicated into a
//! `q x q` block of subpixels, which replicates the native spectrum at
//! multiples of `1/pitch` under the pixel-aperture envelope. The operator
//! is linear and its adjoint is a plain block sum.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Domain, GridSpec};

/// Real-valued phase samples (radians) at SLM-native resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePattern {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl PhasePattern {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { values: vec![0.0; grid.len()], grid }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::DimensionMismatch {
                expected: grid.len().to_string(),
                got: values.len().to_string(),
            });
        }
        Ok(Self { grid, values })
    }
}

/// Wraps a phase to `[-pi, pi)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can return exactly 2*pi for inputs just below the seam
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Nearest level on the uniform circular level set
/// `{-pi + 2*pi*m/levels : m = 0..levels-1}`; returns `(index, value)`.
pub fn quantize_value(phi: f64, levels: u32) -> (u32, f64) {
    debug_assert!(levels >= 2);
    let step = 2.0 * PI / levels as f64;
    let w = wrap_phase(phi);
    let m = (((w + PI) / step).round() as i64).rem_euclid(levels as i64) as u32;
    (m, -PI + m as f64 * step)
}

/// Snaps every phase to the nearest of `levels` uniform levels on the
/// circle. Forward-only; the optimizer treats the backward pass as the
/// identity on the wrapped phase (straight-through).
pub fn quantize_phase(phi: &PhasePattern, levels: u32) -> PhasePattern {
    let values = phi.values.iter().map(|&p| quantize_value(p, levels).1).collect();
    PhasePattern { grid: phi.grid, values }
}

/// `e^{i*phi}` as a unit-magnitude complex field.
pub fn phasor(phi: &PhasePattern) -> ComplexField {
    let values = phi.values.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    ComplexField { grid: phi.grid, domain: Domain::Spatial, values }
}

/// Pixel-aperture supersampling model. `q` subpixels per SLM pixel per
/// axis; `fill_factor` is the linear fill per axis — the kept aperture is
/// `round(q * fill_factor)` subpixels wide, centered in the block, with
/// the outer remainder zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdoModel {
    pub q: usize,
    pub fill_factor: f64,
}

impl HdoModel {
    pub fn new(q: usize, fill_factor: f64) -> Result<Self> {
        if q < 1 {
            return Err(CoreError::InvalidConfig("supersample factor must be >= 1".into()));
        }
        if !(fill_factor > 0.0 && fill_factor <= 1.0) {
            return Err(CoreError::InvalidConfig(format!(
                "fill factor must be in (0, 1], got {fill_factor}"
            )));
        }
        Ok(Self { q, fill_factor })
    }

    pub fn ideal(q: usize) -> Result<Self> {
        Self::new(q, 1.0)
    }

    /// Kept subpixel range `[start, start+width)` within each block along
    /// one axis; rounding to the nearest subpixel is the documented rule
    /// for non-integer apertures.
    pub fn aperture(&self) -> (usize, usize) {
        let width = ((self.q as f64 * self.fill_factor).round() as usize).clamp(1, self.q);
        let start = (self.q - width) / 2;
        (start, width)
    }

    pub fn super_grid(&self, native: &GridSpec) -> GridSpec {
        GridSpec {
            nx: native.nx * self.q,
            ny: native.ny * self.q,
            pitch_x: native.pitch_x / self.q as f64,
            pitch_y: native.pitch_y / self.q as f64,
            wavelength: native.wavelength,
        }
    }
}

/// Zero-order-hold supersampling: replicates each native pixel into a
/// `q x q` subpixel block (aperture-masked), keeping the physical extent.
pub fn supersample_hdo(u: &ComplexField, model: &HdoModel) -> ComplexField {
    let q = model.q;
    if q == 1 && model.fill_factor == 1.0 {
        return u.clone();
    }
    let native = u.grid;
    let big = model.super_grid(&native);
    let (start, width) = model.aperture();
    let mut out = ComplexField::zeros(big);
    for iy in 0..native.ny {
        for ix in 0..native.nx {
            let v = u.at(ix, iy);
            for sy in start..start + width {
                let row = (iy * q + sy) * big.nx + ix * q;
                for sx in start..start + width {
                    out.values[row + sx] = v;
                }
            }
        }
    }
    out
}

/// Adjoint of [`supersample_hdo`]: sums each block's kept subpixels back
/// into the native pixel. Passes the inner-product adjoint test exactly.
pub fn supersample_adjoint(g: &ComplexField, model: &HdoModel, native: &GridSpec) -> Result<ComplexField> {
    let q = model.q;
    let big = model.super_grid(native);
    if g.grid.nx != big.nx || g.grid.ny != big.ny {
        return Err(CoreError::GridMismatch(format!(
            "adjoint input {}x{}, expected supersampled {}x{}",
            g.grid.nx, g.grid.ny, big.nx, big.ny
        )));
    }
    let (start, width) = model.aperture();
    let mut out = ComplexField::zeros(*native);
    for iy in 0..native.ny {
        for ix in 0..native.nx {
            let mut acc = Complex64::new(0.0, 0.0);
            for sy in start..start + width {
                let oy = iy * q + sy;
                for sx in start..start + width {
                    acc += g.values[oy * big.nx + ix * q + sx];
                }
            }
            out.values[iy * native.nx + ix] = acc;
        }
    }
    Ok(out)
}
