//! Angular spectrum method free-space propagation.
//!
//! The transfer function is
//! `H(f) = exp(i * 2*pi/lambda * z * sqrt(1 - (lambda f_x)^2 - (lambda f_y)^2))`
//! inside the propagating band `sqrt(f_x^2 + f_y^2) < 1/lambda` and zero on
//! evanescent samples. Periodic boundaries are inherent to the DFT and
//! accepted as a modeling approximation; [`propagate_padded`] is available
//! when aperture-accurate long-distance propagation matters.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::{dft2_with, idft2_with, ComplexField, Domain, GridSpec, Precision};

/// Precomputed ASM transfer function for one (grid, z) pair.
///
/// Values are stored in the DFT's DC-at-0 layout. `|H| = 1` on the
/// propagating band, `H = 0` on evanescent samples, and
/// `H(-z) = conj(H(z))`.
#[derive(Debug, Clone)]
pub struct PropagationKernel {
    pub grid: GridSpec,
    pub z: f64,
    pub values: Vec<Complex64>,
}

/// Builds the Eq.-style transfer function for distance `z` (signed, meters).
pub fn make_kernel(grid: &GridSpec, z: f64) -> PropagationKernel {
    let lambda = grid.wavelength;
    let inv_lambda_sq = 1.0 / (lambda * lambda);
    let mut values = Vec::with_capacity(grid.len());
    for iy in 0..grid.ny {
        let fy = grid.freq_y(iy);
        for ix in 0..grid.nx {
            let fx = grid.freq_x(ix);
            let f_sq = fx * fx + fy * fy;
            if f_sq < inv_lambda_sq {
                let lfx = lambda * fx;
                let lfy = lambda * fy;
                let phase = (2.0 * PI / lambda) * z * (1.0 - lfx * lfx - lfy * lfy).sqrt();
                values.push(Complex64::from_polar(1.0, phase));
            } else {
                values.push(Complex64::new(0.0, 0.0));
            }
        }
    }
    PropagationKernel { grid: *grid, z, values }
}

fn check_grid(u: &ComplexField, kernel: &PropagationKernel) -> Result<()> {
    if u.grid != kernel.grid {
        return Err(CoreError::GridMismatch(format!(
            "field {}x{} pitch ({}, {}), kernel {}x{} pitch ({}, {})",
            u.grid.nx,
            u.grid.ny,
            u.grid.pitch_x,
            u.grid.pitch_y,
            kernel.grid.nx,
            kernel.grid.ny,
            kernel.grid.pitch_x,
            kernel.grid.pitch_y,
        )));
    }
    Ok(())
}

/// `idft2(dft2(u) .* H)` with a selectable FFT precision.
pub fn propagate_with(
    u: &ComplexField,
    kernel: &PropagationKernel,
    precision: Precision,
) -> Result<ComplexField> {
    check_grid(u, kernel)?;
    let mut spectrum = dft2_with(u, precision);
    for (s, h) in spectrum.values.iter_mut().zip(&kernel.values) {
        *s *= h;
    }
    Ok(idft2_with(&spectrum, precision))
}

/// Free-space propagation of `u` by the kernel's distance.
pub fn propagate(u: &ComplexField, kernel: &PropagationKernel) -> Result<ComplexField> {
    propagate_with(u, kernel, Precision::F64)
}

/// Exact adjoint of [`propagate`]:
/// `<propagate(u), g> == <u, propagate_adjoint(g)>` for all `u`, `g`.
///
/// Because `|H| <= 1`, this equals propagation with the conjugate kernel,
/// i.e. with `kernel(-z)`.
pub fn propagate_adjoint(g: &ComplexField, kernel: &PropagationKernel) -> Result<ComplexField> {
    check_grid(g, kernel)?;
    let mut spectrum = dft2_with(g, Precision::F64);
    for (s, h) in spectrum.values.iter_mut().zip(&kernel.values) {
        *s *= h.conj();
    }
    Ok(idft2_with(&spectrum, Precision::F64))
}

/// Propagation on a zero-padded grid (factor >= 1), cropped back to the
/// input extent. Factor 1 is plain [`propagate`].
pub fn propagate_padded(u: &ComplexField, z: f64, pad_factor: usize) -> Result<ComplexField> {
    if pad_factor == 0 {
        return Err(CoreError::Domain("pad factor must be >= 1".into()));
    }
    if pad_factor == 1 {
        let kernel = make_kernel(&u.grid, z);
        return propagate(u, &kernel);
    }
    let g = u.grid;
    let big = GridSpec::new(
        g.nx * pad_factor,
        g.ny * pad_factor,
        g.pitch_x,
        g.pitch_y,
        g.wavelength,
    )?;
    let off_x = (big.nx - g.nx) / 2;
    let off_y = (big.ny - g.ny) / 2;
    let mut padded = ComplexField::zeros(big);
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            padded.values[(iy + off_y) * big.nx + ix + off_x] = u.at(ix, iy);
        }
    }
    let kernel = make_kernel(&big, z);
    let out = propagate(&padded, &kernel)?;
    let mut cropped = ComplexField::zeros(g);
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            cropped.values[iy * g.nx + ix] = out.at(ix + off_x, iy + off_y);
        }
    }
    Ok(cropped)
}

#[derive(Hash, PartialEq, Eq)]
struct KernelKey {
    nx: usize,
    ny: usize,
    pitch_x: u64,
    pitch_y: u64,
    wavelength: u64,
    z: u64,
}

impl KernelKey {
    fn new(grid: &GridSpec, z: f64) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            pitch_x: grid.pitch_x.to_bits(),
            pitch_y: grid.pitch_y.to_bits(),
            wavelength: grid.wavelength.to_bits(),
            z: z.to_bits(),
        }
    }
}

/// Concurrent kernel cache keyed by (grid, z, lambda). The optimizer hits
/// the same kernels thousands of times; values are identical by
/// construction so last-writer-wins is safe.
#[derive(Default)]
pub struct KernelCache {
    map: Mutex<HashMap<KernelKey, Arc<PropagationKernel>>>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, grid: &GridSpec, z: f64) -> Arc<PropagationKernel> {
        let key = KernelKey::new(grid, z);
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            return Arc::clone(hit);
        }
        let built = Arc::new(make_kernel(grid, z));
        let mut map = self.map.lock().unwrap();
        Arc::clone(map.entry(key).or_insert(built))
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Zeroes every evanescent sample of a spatial field (the band-limit
/// projection, i.e. propagation by z = 0).
pub fn band_limit(u: &ComplexField) -> ComplexField {
    let kernel = make_kernel(&u.grid, 0.0);
    propagate(u, &kernel).expect("grid matches by construction")
}
