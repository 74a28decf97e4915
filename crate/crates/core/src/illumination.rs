//! Off-axis plane-wave illumination: tilt phases, source grids, schedules,
//! and the rule that matches source angles to the SLM's +-1st diffraction
//! orders so the shifted spectrum copies tile the Fourier plane.
//!
//! Sources are mutually incoherent. Nothing in this crate ever adds
//! complex fields from distinct sources; only intensities are summed
//! downstream.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Domain, GridSpec};

/// One collimated source: direction (as direction sines), an optional
/// deviation field from the ideal plane wave, and a scalar amplitude
/// weight (1 everywhere except the amplitude-controlled configuration).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    /// sin(theta_x): k_x = 2*pi*sin_x / lambda.
    pub sin_x: f64,
    pub sin_y: f64,
    pub weight: f64,
    /// Measured amplitude/phase deviation from the ideal plane wave,
    /// sampled on the supersampled grid. Not serialized; ideal by default.
    #[serde(skip)]
    pub deviation: Option<ComplexField>,
}

impl SourceSpec {
    pub fn new(sin_x: f64, sin_y: f64, weight: f64) -> Result<Self> {
        if sin_x * sin_x + sin_y * sin_y >= 1.0 {
            return Err(CoreError::Domain(format!(
                "backward- or sideways-traveling wavevector: sin_x={sin_x}, sin_y={sin_y}"
            )));
        }
        if !(weight >= 0.0) {
            return Err(CoreError::Domain(format!("source weight must be >= 0, got {weight}")));
        }
        Ok(Self { sin_x, sin_y, weight, deviation: None })
    }

    pub fn on_axis() -> Self {
        Self { sin_x: 0.0, sin_y: 0.0, weight: 1.0, deviation: None }
    }

    /// Full wavevector `(k_x, k_y, k_z)` in rad/m; `|k| = 2*pi/lambda` and
    /// `k_z > 0` by construction.
    pub fn wavevector(&self, wavelength: f64) -> [f64; 3] {
        let k = 2.0 * PI / wavelength;
        let sz = (1.0 - self.sin_x * self.sin_x - self.sin_y * self.sin_y).sqrt();
        [k * self.sin_x, k * self.sin_y, k * sz]
    }

    /// Spectral shift of this source's illumination in cycles/m.
    pub fn freq_shift(&self, wavelength: f64) -> (f64, f64) {
        (self.sin_x / wavelength, self.sin_y / wavelength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// All sources on in every frame.
    Simultaneous,
    /// One source per frame, in array order; frame count equals J.
    Sequential,
}

/// The J mutually incoherent sources with their activation schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceArray {
    pub sources: Vec<SourceSpec>,
    pub schedule: Schedule,
    /// Sources per axis for grid layouts (J = alpha^2); None for ad-hoc sets.
    pub alpha: Option<usize>,
}

impl SourceArray {
    pub fn single(schedule: Schedule) -> Self {
        Self { sources: vec![SourceSpec::on_axis()], schedule, alpha: Some(1) }
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(CoreError::InvalidConfig("source array is empty".into()));
        }
        if let Some(alpha) = self.alpha {
            if self.sources.len() != alpha * alpha {
                return Err(CoreError::InvalidConfig(format!(
                    "grid layout expects J = alpha^2 = {}, got {}",
                    alpha * alpha,
                    self.sources.len()
                )));
            }
        }
        Ok(())
    }

    /// Indices of sources active in frame `t` out of `frames`.
    pub fn active_in_frame(&self, t: usize, frames: usize) -> Vec<usize> {
        match self.schedule {
            Schedule::Simultaneous => (0..self.sources.len()).collect(),
            Schedule::Sequential => {
                debug_assert_eq!(frames, self.sources.len());
                vec![t % self.sources.len()]
            }
        }
    }
}

/// The tilted source field `weight * u_src(x,y) * exp(i(k_x x + k_y y))`
/// sampled on `grid`. The spectrum of the tilted field is the untilted
/// spectrum shifted by `(sin_x/lambda, sin_y/lambda)` cycles/m.
pub fn tilt_field(spec: &SourceSpec, grid: &GridSpec) -> Result<ComplexField> {
    if spec.sin_x * spec.sin_x + spec.sin_y * spec.sin_y >= 1.0 {
        return Err(CoreError::Domain("backward-traveling wavevector".into()));
    }
    if let Some(dev) = &spec.deviation {
        if !dev.grid.same_shape(grid) {
            return Err(CoreError::GridMismatch(format!(
                "deviation field {}x{} vs grid {}x{}",
                dev.grid.nx, dev.grid.ny, grid.nx, grid.ny
            )));
        }
    }
    let [kx, ky, _] = spec.wavevector(grid.wavelength);
    let mut values = Vec::with_capacity(grid.len());
    for iy in 0..grid.ny {
        let y = grid.coord_y(iy);
        for ix in 0..grid.nx {
            let x = grid.coord_x(ix);
            let mut v = Complex64::from_polar(spec.weight, kx * x + ky * y);
            if let Some(dev) = &spec.deviation {
                v *= dev.values[iy * grid.nx + ix];
            }
            values.push(v);
        }
    }
    Ok(ComplexField { grid: *grid, domain: Domain::Spatial, values })
}

/// Builds an `alpha x alpha` grid of sources whose angles match the SLM's
/// higher diffraction orders at `lambda_ref`:
/// `sin(theta_m) = m * lambda_ref / pitch_slm` for
/// `m in {-(alpha-1)/2, ..., (alpha-1)/2}` per axis. Each source then
/// shifts the spectrum by exactly `m / pitch_slm`, i.e. one full SLM
/// bandwidth per order, so the copies tile edge-to-edge.
pub fn grid_angles_matching_orders(
    alpha: usize,
    pitch_slm: f64,
    lambda_ref: f64,
) -> Result<SourceArray> {
    if alpha == 0 || alpha % 2 == 0 {
        return Err(CoreError::InvalidConfig(format!(
            "source grid must have odd alpha for a centered layout, got {alpha}"
        )));
    }
    if !(pitch_slm > 0.0) || !(lambda_ref > 0.0) {
        return Err(CoreError::InvalidConfig("pitch and wavelength must be positive".into()));
    }
    let half = (alpha as i64 - 1) / 2;
    let mut sources = Vec::with_capacity(alpha * alpha);
    for my in -half..=half {
        for mx in -half..=half {
            let sx = mx as f64 * lambda_ref / pitch_slm;
            let sy = my as f64 * lambda_ref / pitch_slm;
            if sx.abs() >= 1.0 || sy.abs() >= 1.0 {
                let (s, m) = if sx.abs() >= 1.0 { (sx, mx) } else { (sy, my) };
                return Err(CoreError::NonPhysicalAngle { sin_theta: s, order: m });
            }
            sources.push(SourceSpec::new(sx, sy, 1.0)?);
        }
    }
    Ok(SourceArray { sources, schedule: Schedule::Simultaneous, alpha: Some(alpha) })
}
