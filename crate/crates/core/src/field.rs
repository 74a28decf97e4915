//! Sampled complex fields on uniform 2D grids and the unitary DFT they share.
//!
//! Everything downstream (propagation, the forward model, the optimizer)
//! moves `ComplexField` values through `dft2`/`idft2`. The transform is
//! normalized by `1/sqrt(nx*ny)` in both directions so Parseval holds with
//! no extra bookkeeping: `sum |U|^2 == sum |u|^2`.
//!
//! Storage order is row-major with x fastest (`index = iy * nx + ix`).
//! Frequency-domain arrays keep the DFT's native DC-at-(0,0) layout;
//! [`fftshift_index`] converts to centered coordinates where needed.

use std::sync::Mutex;
use std::sync::OnceLock;

use num_complex::{Complex32, Complex64};
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Pixel counts, sample pitch (meters) and wavelength (meters) of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub pitch_x: f64,
    pub pitch_y: f64,
    pub wavelength: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, pitch_x: f64, pitch_y: f64, wavelength: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(CoreError::InvalidGrid(format!(
                "pixel counts must be >= 2, got {nx}x{ny}"
            )));
        }
        if !(pitch_x > 0.0) || !(pitch_y > 0.0) {
            return Err(CoreError::InvalidGrid(format!(
                "pitch must be positive, got ({pitch_x}, {pitch_y})"
            )));
        }
        if !(wavelength > 0.0) {
            return Err(CoreError::InvalidGrid(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self { nx, ny, pitch_x, pitch_y, wavelength })
    }

    /// Square-pixel constructor used by every paper-derived configuration.
    pub fn square(n: usize, pitch: f64, wavelength: f64) -> Result<Self> {
        Self::new(n, n, pitch, pitch, wavelength)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Frequency sample spacing along x, `1/(nx*pitch_x)` (cycles/m).
    pub fn freq_step_x(&self) -> f64 {
        1.0 / (self.nx as f64 * self.pitch_x)
    }

    pub fn freq_step_y(&self) -> f64 {
        1.0 / (self.ny as f64 * self.pitch_y)
    }

    /// Physical extent along x in meters.
    pub fn extent_x(&self) -> f64 {
        self.nx as f64 * self.pitch_x
    }

    pub fn extent_y(&self) -> f64 {
        self.ny as f64 * self.pitch_y
    }

    /// Spatial coordinate of sample `i` along x, centered so that the grid
    /// midpoint (index nx/2) sits at x = 0.
    pub fn coord_x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.pitch_x
    }

    pub fn coord_y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.pitch_y
    }

    /// Signed frequency bin of storage index `i` (DC at 0): `0..n/2` map to
    /// themselves, `n/2..n` wrap to negative bins.
    pub fn signed_bin(n: usize, i: usize) -> i64 {
        debug_assert!(i < n);
        if i < n.div_ceil(2) {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Frequency in cycles/m of storage index `i` along x.
    pub fn freq_x(&self, i: usize) -> f64 {
        Self::signed_bin(self.nx, i) as f64 * self.freq_step_x()
    }

    pub fn freq_y(&self, j: usize) -> f64 {
        Self::signed_bin(self.ny, j) as f64 * self.freq_step_y()
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.nx == other.nx && self.ny == other.ny
    }
}

/// DFT frequency samples along one axis in storage order (DC first).
///
/// `n = 4, pitch = 1` yields `{0, 0.25, -0.5, -0.25}` cycles/m.
pub fn freq_coords_axis(n: usize, pitch: f64) -> Vec<f64> {
    let step = 1.0 / (n as f64 * pitch);
    (0..n).map(|i| GridSpec::signed_bin(n, i) as f64 * step).collect()
}

/// Frequency coordinate vectors `(f_x, f_y)` for a grid, DC at index 0.
pub fn freq_coords(grid: &GridSpec) -> (Vec<f64>, Vec<f64>) {
    (
        freq_coords_axis(grid.nx, grid.pitch_x),
        freq_coords_axis(grid.ny, grid.pitch_y),
    )
}

/// Maps a storage index to the centered-display index (DC moves to n/2).
pub fn fftshift_index(n: usize, i: usize) -> usize {
    (i + n / 2) % n
}

/// Inverse of [`fftshift_index`].
pub fn ifftshift_index(n: usize, i: usize) -> usize {
    (i + n.div_ceil(2)) % n
}

/// Which sampling lattice a field's values live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Spatial,
    Frequency,
}

/// A sampled 2D complex amplitude with grid metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub domain: Domain,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
            domain: Domain::Spatial,
        }
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        Self { values: vec![value; grid.len()], grid, domain: Domain::Spatial }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(CoreError::DimensionMismatch {
                expected: format!("{}x{} = {}", grid.nx, grid.ny, grid.len()),
                got: values.len().to_string(),
            });
        }
        Ok(Self { grid, domain: Domain::Spatial, values })
    }

    /// Uniformly random complex values in the unit square; test utility.
    pub fn random<R: Rng>(grid: GridSpec, rng: &mut R) -> Self {
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Self { grid, domain: Domain::Spatial, values }
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.grid.nx + ix
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.grid.nx + ix]
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Discrete energy `sum |u|^2 * pitch_x * pitch_y`.
    pub fn energy(&self) -> f64 {
        self.sum_sq() * self.grid.pitch_x * self.grid.pitch_y
    }

    /// `sum conj(a_i) * b_i`, the inner product used by all adjoint tests.
    pub fn inner(&self, other: &ComplexField) -> Complex64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.sum_sq().sqrt()
    }

    /// Elementwise in-place product with another field of the same shape.
    pub fn mul_assign_field(&mut self, other: &ComplexField) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a *= b;
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// Energy of a field; free-function form of [`ComplexField::energy`].
pub fn energy(field: &ComplexField) -> f64 {
    field.energy()
}

/// Floating-point width used inside the FFT kernels. `F32` halves memory
/// traffic at the cost of precision and is excluded from tolerance-critical
/// paths; the public interface stays `f64` either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

fn planner_f64() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn planner_f32() -> &'static Mutex<FftPlanner<f32>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f32>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn transpose<T: Copy>(src: &[T], nx: usize, ny: usize, dst: &mut Vec<T>) {
    dst.clear();
    dst.reserve(src.len());
    for ix in 0..nx {
        for iy in 0..ny {
            dst.push(src[iy * nx + ix]);
        }
    }
}

fn fft2_inplace_f64(values: &mut Vec<Complex64>, nx: usize, ny: usize, forward: bool) {
    let (row_fft, col_fft) = {
        let mut planner = planner_f64().lock().unwrap();
        if forward {
            (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
        } else {
            (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
        }
    };
    row_fft.process(values);
    let mut t = Vec::new();
    transpose(values, nx, ny, &mut t);
    col_fft.process(&mut t);
    transpose(&t, ny, nx, values);
    let scale = 1.0 / ((nx * ny) as f64).sqrt();
    for v in values.iter_mut() {
        *v *= scale;
    }
}

fn fft2_inplace_f32(values: &mut Vec<Complex64>, nx: usize, ny: usize, forward: bool) {
    let (row_fft, col_fft) = {
        let mut planner = planner_f32().lock().unwrap();
        if forward {
            (planner.plan_fft_forward(nx), planner.plan_fft_forward(ny))
        } else {
            (planner.plan_fft_inverse(nx), planner.plan_fft_inverse(ny))
        }
    };
    let mut buf: Vec<Complex32> = values
        .iter()
        .map(|v| Complex32::new(v.re as f32, v.im as f32))
        .collect();
    row_fft.process(&mut buf);
    let mut t = Vec::new();
    transpose(&buf, nx, ny, &mut t);
    col_fft.process(&mut t);
    transpose(&t, ny, nx, &mut buf);
    let scale = 1.0 / ((nx * ny) as f32).sqrt();
    for (dst, src) in values.iter_mut().zip(&buf) {
        *dst = Complex64::new((src.re * scale) as f64, (src.im * scale) as f64);
    }
}

/// Unitary 2D DFT with a selectable compute precision.
pub fn dft2_with(field: &ComplexField, precision: Precision) -> ComplexField {
    let mut values = field.values.clone();
    match precision {
        Precision::F64 => fft2_inplace_f64(&mut values, field.grid.nx, field.grid.ny, true),
        Precision::F32 => fft2_inplace_f32(&mut values, field.grid.nx, field.grid.ny, true),
    }
    ComplexField { grid: field.grid, domain: Domain::Frequency, values }
}

/// Unitary inverse 2D DFT with a selectable compute precision.
pub fn idft2_with(field: &ComplexField, precision: Precision) -> ComplexField {
    let mut values = field.values.clone();
    match precision {
        Precision::F64 => fft2_inplace_f64(&mut values, field.grid.nx, field.grid.ny, false),
        Precision::F32 => fft2_inplace_f32(&mut values, field.grid.nx, field.grid.ny, false),
    }
    ComplexField { grid: field.grid, domain: Domain::Spatial, values }
}

/// Unitary 2D DFT: `sum |dft2(u)|^2 == sum |u|^2` up to roundoff.
pub fn dft2(field: &ComplexField) -> ComplexField {
    dft2_with(field, Precision::F64)
}

/// Unitary inverse 2D DFT; `idft2(dft2(u)) == u` up to roundoff.
pub fn idft2(field: &ComplexField) -> ComplexField {
    idft2_with(field, Precision::F64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn grid(n: usize) -> GridSpec {
        GridSpec::square(n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1, 4, 1.0, 1.0, 1.0).is_err());
        assert!(GridSpec::new(4, 4, 0.0, 1.0, 1.0).is_err());
        assert!(GridSpec::new(4, 4, 1.0, 1.0, -1.0).is_err());
        assert!(GridSpec::new(4, 4, 1.0, 1.0, f64::NAN).is_err());
        assert!(GridSpec::new(2, 2, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn from_values_rejects_shape_mismatch() {
        let g = grid(4);
        let err = ComplexField::from_values(g, vec![Complex64::new(1.0, 0.0); 15]);
        assert!(matches!(err, Err(CoreError::DimensionMismatch { .. })));
    }

    #[test]
    fn dft2_constant_gives_single_dc_coefficient() {
        let g = grid(4);
        let u = ComplexField::constant(g, Complex64::new(1.0, 0.0));
        let spec = dft2(&u);
        assert!((spec.values[0] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        for (i, v) in spec.values.iter().enumerate() {
            if i != 0 {
                assert!(v.norm() < 1e-12, "non-DC coefficient {i} = {v}");
            }
        }
        assert_eq!(spec.domain, Domain::Frequency);
    }

    #[test]
    fn idft2_inverts_dft2() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let u = ComplexField::random(grid(32), &mut rng);
        let back = idft2(&dft2(&u));
        let err: f64 = u
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / u.norm() < 1e-12);
    }

    #[test]
    fn parseval_against_direct_summation() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let u = ComplexField::random(grid(64), &mut rng);
        // oracle: plain double loop, no iterator-sum shortcuts
        let mut direct = 0.0;
        for iy in 0..64 {
            for ix in 0..64 {
                let v = u.at(ix, iy);
                direct += v.re * v.re + v.im * v.im;
            }
        }
        let spectral = dft2(&u).sum_sq();
        assert!((spectral - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn freq_coords_match_dft_layout() {
        assert_eq!(freq_coords_axis(4, 1.0), vec![0.0, 0.25, -0.5, -0.25]);
        assert_eq!(freq_coords_axis(2, 0.5), vec![0.0, -1.0]);
        let f = freq_coords_axis(128, 10.8e-6);
        let max_mag = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!((max_mag - 46296.296296296296).abs() < 1e-6);
    }

    #[test]
    fn energy_examples() {
        let g = grid(4);
        assert_eq!(energy(&ComplexField::zeros(g)), 0.0);
        let g2 = GridSpec::square(2, 1.0, 1.0).unwrap();
        let ones = ComplexField::constant(g2, Complex64::new(1.0, 0.0));
        assert_eq!(energy(&ones), 4.0);
        // random field against a naive double loop with pitch weighting
        let g3 = GridSpec::new(8, 6, 0.5, 0.25, 1.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let u = ComplexField::random(g3, &mut rng);
        let mut direct = 0.0;
        for iy in 0..6 {
            for ix in 0..8 {
                direct += u.at(ix, iy).norm_sqr() * 0.5 * 0.25;
            }
        }
        assert!((energy(&u) - direct).abs() < 1e-14);
    }

    #[test]
    fn dft2_preserves_inner_products() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let g = grid(16);
        let u = ComplexField::random(g, &mut rng);
        let v = ComplexField::random(g, &mut rng);
        let lhs = dft2(&u).inner(&dft2(&v));
        let rhs = u.inner(&v);
        assert!((lhs - rhs).norm() < 1e-12 * u.norm() * v.norm());
    }

    #[test]
    fn dft2_adjoint_is_idft2() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let g = grid(16);
        let u = ComplexField::random(g, &mut rng);
        let v = ComplexField::random(g, &mut rng);
        let lhs = dft2(&u).inner(&v);
        let rhs = u.inner(&idft2(&v));
        assert!((lhs - rhs).norm() < 1e-12 * u.norm() * v.norm());
    }

    #[test]
    fn dft2_linearity() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let g = grid(16);
        let u = ComplexField::random(g, &mut rng);
        let v = ComplexField::random(g, &mut rng);
        let a = Complex64::new(0.7, -1.3);
        let b = Complex64::new(-0.2, 0.4);
        let mut combo = u.clone();
        for (c, (x, y)) in combo.values.iter_mut().zip(u.values.iter().zip(&v.values)) {
            *c = a * x + b * y;
        }
        let lhs = dft2(&combo);
        let (fu, fv) = (dft2(&u), dft2(&v));
        let err: f64 = lhs
            .values
            .iter()
            .enumerate()
            .map(|(i, w)| (w - (a * fu.values[i] + b * fv.values[i])).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / lhs.norm() < 1e-12);
    }

    #[test]
    fn shift_helpers_are_inverse() {
        for n in [4usize, 5, 8, 9] {
            for i in 0..n {
                assert_eq!(ifftshift_index(n, fftshift_index(n, i)), i);
            }
            // DC lands at the display center
            assert_eq!(fftshift_index(n, 0), n / 2);
        }
    }

    #[test]
    fn f32_mode_tracks_f64_loosely() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let u = ComplexField::random(grid(32), &mut rng);
        let a = dft2_with(&u, Precision::F32);
        let b = dft2(&u);
        let err: f64 = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err / b.norm() < 1e-5);
    }
}
