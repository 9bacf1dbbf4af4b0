//! Split-step Fourier solver for the parabolic wave equation.
//!
//! The reduced field `u` is marched along the propagation axis by
//! alternating an exact spectral diffraction step with a refractive phase
//! screen:
//!
//! ```text
//! u(z + dz) = exp(-j k0 (n² - 1) dz / 2) · F⁻¹{ C(kx) C(ky) F{u(z)} }
//! C(k)      = exp(-j k² dz / (2 k0))
//! ```
//!
//! In 2-D mode the grid has a single transverse axis and only `C(kx)` is
//! applied. A raised-cosine amplitude taper over the outer fraction of each
//! transverse axis suppresses wrap-around reflections from the periodic
//! transform. The phase screen uses the range step `dz` throughout.
//!
//! All arithmetic follows the `exp(+jωt)` convention documented in
//! [`crate::medium`]: refractive indices with negative imaginary part decay.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;
use thiserror::Error;

use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error)]
pub enum PweError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

type Result<T> = std::result::Result<T, PweError>;

/// Maximum transverse grid spacing resolving a paraxial cone of the given
/// half-angle: `λ / (2 sin θ_max)`.
pub fn max_grid_spacing(frequency_ghz: f64, theta_max_deg: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / (frequency_ghz * 1e9);
    lambda / (2.0 * theta_max_deg.to_radians().sin())
}

/// Default paraxial design cone, degrees.
pub const DEFAULT_THETA_MAX_DEG: f64 = 15.0;

/// Transverse sampling grid. `ny == 1` selects 2-D mode (one transverse
/// axis); otherwise both axes are transformed. Node `i` sits at
/// `(i - n/2) · spacing`, so the axis is centered on zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl TransverseGrid {
    /// One transverse axis (2-D propagation in the x–z plane).
    pub fn line(nx: usize, dx: f64) -> Self {
        TransverseGrid { nx, ny: 1, dx, dy: dx }
    }

    /// Two transverse axes (full 3-D propagation).
    pub fn plane(nx: usize, ny: usize, dx: f64, dy: f64) -> Self {
        TransverseGrid { nx, ny, dx, dy }
    }

    pub fn is_line(&self) -> bool {
        self.ny == 1
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical extent along x, metres.
    pub fn extent_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn x_coord(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx
    }

    pub fn y_coord(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nx.is_power_of_two() || self.nx < 2 {
            return Err(PweError::Config(format!(
                "nx must be a power of two >= 2, got {}",
                self.nx
            )));
        }
        if self.ny != 1 && (!self.ny.is_power_of_two() || self.ny < 2) {
            return Err(PweError::Config(format!(
                "ny must be 1 (2-D mode) or a power of two >= 2, got {}",
                self.ny
            )));
        }
        if !(self.dx > 0.0) || (self.ny > 1 && !(self.dy > 0.0)) {
            return Err(PweError::Config("grid spacing must be positive".into()));
        }
        Ok(())
    }
}

/// Complex reduced field sampled on a transverse grid at one range.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub grid: TransverseGrid,
    /// Row-major `ny × nx` complex amplitudes.
    pub values: Vec<Complex64>,
    /// Range along the propagation axis, metres.
    pub range_m: f64,
}

impl ComplexField {
    pub fn zeros(grid: TransverseGrid) -> Self {
        ComplexField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            range_m: 0.0,
        }
    }

    /// Discrete L2 norm `sqrt(Σ |u|² dx dy)` (dx only in 2-D mode).
    pub fn l2_norm(&self) -> f64 {
        let cell = if self.grid.is_line() {
            self.grid.dx
        } else {
            self.grid.dx * self.grid.dy
        };
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    /// Amplitude at the grid center node.
    pub fn on_axis_magnitude(&self) -> f64 {
        let idx = (self.grid.ny / 2) * self.grid.nx + self.grid.nx / 2;
        self.values[idx].norm()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Refractive index over the transverse plane.
#[derive(Debug, Clone)]
pub enum IndexProfile {
    /// Homogeneous medium.
    Uniform(Complex64),
    /// One complex index per grid node (row-major, `ny × nx`).
    PerNode(Vec<Complex64>),
}

impl IndexProfile {
    pub fn free_space() -> Self {
        IndexProfile::Uniform(Complex64::new(1.0, 0.0))
    }
}

/// Gaussian source description.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceSpec {
    /// 1/e amplitude radius of the beam, metres.
    pub beam_waist_m: f64,
    /// Transverse offset of the beam center along x, metres.
    pub offset_x_m: f64,
    /// Transverse offset along y (ignored in 2-D mode), metres.
    pub offset_y_m: f64,
    /// Height of the radiator above ground, metres. Used by the radio-map
    /// builder to position the vertical slice; the beam itself is always
    /// unit strength.
    pub height_above_ground_m: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec {
            beam_waist_m: 1.0,
            offset_x_m: 0.0,
            offset_y_m: 0.0,
            height_above_ground_m: 0.0,
        }
    }
}

/// Unit-strength Gaussian beam `u(r) = exp(-|r - r0|² / w0²)` sampled on the
/// grid. The waist must span at least two grid cells.
pub fn gaussian_beam(spec: &SourceSpec, grid: TransverseGrid) -> Result<ComplexField> {
    grid.validate()?;
    let min_spacing = if grid.is_line() { grid.dx } else { grid.dx.max(grid.dy) };
    if spec.beam_waist_m < 2.0 * min_spacing {
        return Err(PweError::Config(format!(
            "beam waist {} m under-resolved by grid spacing {} m",
            spec.beam_waist_m, min_spacing
        )));
    }
    let w2 = spec.beam_waist_m * spec.beam_waist_m;
    let mut field = ComplexField::zeros(grid);
    for j in 0..grid.ny {
        let dy = if grid.is_line() { 0.0 } else { grid.y_coord(j) - spec.offset_y_m };
        for i in 0..grid.nx {
            let dx = grid.x_coord(i) - spec.offset_x_m;
            let r2 = dx * dx + dy * dy;
            field.values[j * grid.nx + i] = Complex64::new((-r2 / w2).exp(), 0.0);
        }
    }
    Ok(field)
}

/// Spectral diffraction factor `C(k) = exp(-j k² dz / (2 k0))`.
pub fn spectral_propagator(k: f64, dz: f64, k0: f64) -> Complex64 {
    Complex64::new(0.0, -k * k * dz / (2.0 * k0)).exp()
}

/// Propagation setup: frequency, marching step, and boundary treatment.
#[derive(Debug, Clone)]
pub struct PropagationConfig {
    pub frequency_ghz: f64,
    /// Range step, metres.
    pub step_dz_m: f64,
    pub n_steps: usize,
    /// Fraction of each transverse axis tapered at the boundary, in [0, 0.5).
    pub absorber_width: f64,
    pub index: IndexProfile,
}

impl PropagationConfig {
    pub fn free_space(frequency_ghz: f64, step_dz_m: f64, n_steps: usize) -> Self {
        PropagationConfig {
            frequency_ghz,
            step_dz_m,
            n_steps,
            absorber_width: 0.0,
            index: IndexProfile::free_space(),
        }
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.frequency_ghz * 1e9 / SPEED_OF_LIGHT
    }

    fn validate(&self, grid: &TransverseGrid) -> Result<()> {
        if !(self.step_dz_m > 0.0) {
            return Err(PweError::Config("step_dz must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.absorber_width) {
            return Err(PweError::Config(format!(
                "absorber width must be in [0, 0.5), got {}",
                self.absorber_width
            )));
        }
        let bound = max_grid_spacing(self.frequency_ghz, DEFAULT_THETA_MAX_DEG);
        let spacing = if grid.is_line() { grid.dx } else { grid.dx.max(grid.dy) };
        if spacing > bound * (1.0 + 1e-12) {
            return Err(PweError::Config(format!(
                "grid spacing {spacing:.4} m exceeds the sampling bound {bound:.4} m \
                 (lambda / (2 sin {DEFAULT_THETA_MAX_DEG}°)) at {} GHz",
                self.frequency_ghz
            )));
        }
        if let IndexProfile::PerNode(values) = &self.index {
            if values.len() != grid.len() {
                return Err(PweError::Config(format!(
                    "per-node index length {} does not match grid size {}",
                    values.len(),
                    grid.len()
                )));
            }
        }
        Ok(())
    }
}

/// Stateful split-step marcher: owns the FFT plans, the spectral factors for
/// the configured step, and the absorber taper.
pub struct SplitStepSolver {
    grid: TransverseGrid,
    k0: f64,
    dz: f64,
    cx: Vec<Complex64>,
    cy: Vec<Complex64>,
    taper_x: Vec<f64>,
    taper_y: Vec<f64>,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Option<Arc<dyn Fft<f64>>>,
    ifft_y: Option<Arc<dyn Fft<f64>>>,
    scratch: Vec<Complex64>,
    column: Vec<Complex64>,
}

impl SplitStepSolver {
    pub fn new(grid: TransverseGrid, config: &PropagationConfig) -> Result<Self> {
        grid.validate()?;
        config.validate(&grid)?;
        let k0 = config.wavenumber();
        let dz = config.step_dz_m;
        let cx = spectral_factors(grid.nx, grid.dx, dz, k0);
        let cy = if grid.is_line() {
            Vec::new()
        } else {
            spectral_factors(grid.ny, grid.dy, dz, k0)
        };
        let taper_x = raised_cosine_taper(grid.nx, config.absorber_width);
        let taper_y = if grid.is_line() {
            Vec::new()
        } else {
            raised_cosine_taper(grid.ny, config.absorber_width)
        };
        let mut planner = FftPlanner::new();
        let fft_x = planner.plan_fft_forward(grid.nx);
        let ifft_x = planner.plan_fft_inverse(grid.nx);
        let (fft_y, ifft_y) = if grid.is_line() {
            (None, None)
        } else {
            (
                Some(planner.plan_fft_forward(grid.ny)),
                Some(planner.plan_fft_inverse(grid.ny)),
            )
        };
        let scratch_len = fft_x
            .get_inplace_scratch_len()
            .max(ifft_x.get_inplace_scratch_len())
            .max(fft_y.as_ref().map_or(0, |f| f.get_inplace_scratch_len()))
            .max(ifft_y.as_ref().map_or(0, |f| f.get_inplace_scratch_len()));
        Ok(SplitStepSolver {
            grid,
            k0,
            dz,
            cx,
            cy,
            taper_x,
            taper_y,
            fft_x,
            ifft_x,
            fft_y,
            ifft_y,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            column: vec![Complex64::new(0.0, 0.0); grid.ny],
        })
    }

    pub fn grid(&self) -> TransverseGrid {
        self.grid
    }

    pub fn wavenumber(&self) -> f64 {
        self.k0
    }

    /// Advance the field by one range step through the given medium.
    pub fn step(&mut self, field: &mut ComplexField, index: &IndexProfile) -> Result<()> {
        if field.grid != self.grid {
            return Err(PweError::Config("field grid does not match solver grid".into()));
        }
        self.diffraction_step(&mut field.values);
        self.phase_screen(&mut field.values, index);
        self.apply_taper(&mut field.values);
        field.range_m += self.dz;
        if !field.is_finite() {
            return Err(PweError::Numerical(format!(
                "non-finite field value after step to range {} m",
                field.range_m
            )));
        }
        Ok(())
    }

    fn diffraction_step(&mut self, values: &mut [Complex64]) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        // Rows: forward transform, spectral factor, inverse transform.
        for row in values.chunks_mut(nx) {
            self.fft_x.process_with_scratch(row, &mut self.scratch);
        }
        for row in values.chunks_mut(nx) {
            for (v, c) in row.iter_mut().zip(&self.cx) {
                *v *= c;
            }
        }
        for row in values.chunks_mut(nx) {
            self.ifft_x.process_with_scratch(row, &mut self.scratch);
        }
        let scale_x = 1.0 / nx as f64;
        for v in values.iter_mut() {
            *v *= scale_x;
        }
        if let (Some(fft_y), Some(ifft_y)) = (&self.fft_y, &self.ifft_y) {
            let scale_y = 1.0 / ny as f64;
            for i in 0..nx {
                for j in 0..ny {
                    self.column[j] = values[j * nx + i];
                }
                fft_y.process_with_scratch(&mut self.column, &mut self.scratch);
                for (v, c) in self.column.iter_mut().zip(&self.cy) {
                    *v *= c;
                }
                ifft_y.process_with_scratch(&mut self.column, &mut self.scratch);
                for j in 0..ny {
                    values[j * nx + i] = self.column[j] * scale_y;
                }
            }
        }
    }

    fn phase_screen(&self, values: &mut [Complex64], index: &IndexProfile) {
        match index {
            IndexProfile::Uniform(n) => {
                if *n == Complex64::new(1.0, 0.0) {
                    return;
                }
                let factor = screen_factor(*n, self.k0, self.dz);
                for v in values.iter_mut() {
                    *v *= factor;
                }
            }
            IndexProfile::PerNode(profile) => {
                for (v, n) in values.iter_mut().zip(profile) {
                    *v *= screen_factor(*n, self.k0, self.dz);
                }
            }
        }
    }

    fn apply_taper(&self, values: &mut [Complex64]) {
        if self.taper_x.is_empty() && self.taper_y.is_empty() {
            return;
        }
        let nx = self.grid.nx;
        for (j, row) in values.chunks_mut(nx).enumerate() {
            let ty = if self.taper_y.is_empty() { 1.0 } else { self.taper_y[j] };
            if self.taper_x.is_empty() {
                if ty != 1.0 {
                    for v in row.iter_mut() {
                        *v *= ty;
                    }
                }
            } else {
                for (v, tx) in row.iter_mut().zip(&self.taper_x) {
                    let t = tx * ty;
                    if t != 1.0 {
                        *v *= t;
                    }
                }
            }
        }
    }
}

/// Phase screen factor `exp(-j k0 (n² - 1) dz / 2)`.
fn screen_factor(n: Complex64, k0: f64, dz: f64) -> Complex64 {
    (Complex64::new(0.0, -k0 * dz / 2.0) * (n * n - 1.0)).exp()
}

fn spectral_factors(n: usize, spacing: f64, dz: f64, k0: f64) -> Vec<Complex64> {
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * spacing);
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            spectral_propagator(m * dk, dz, k0)
        })
        .collect()
}

/// Raised-cosine amplitude taper: 1 in the interior, rolling to 0 at the
/// outermost node over `width` fraction of the axis on each side. An empty
/// vector means no taper.
fn raised_cosine_taper(n: usize, width: f64) -> Vec<f64> {
    let m = (width * n as f64).floor() as usize;
    if m == 0 {
        return Vec::new();
    }
    let mut taper = vec![1.0; n];
    for i in 0..m {
        let t = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / m as f64).cos());
        taper[i] = t;
        taper[n - 1 - i] = t;
    }
    taper
}

/// One recorded on-axis amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnAxisSample {
    pub range_m: f64,
    pub magnitude: f64,
}

/// Result of a propagation run: sampled fields plus the per-step on-axis
/// amplitude log (including the launch plane).
#[derive(Debug)]
pub struct PropagationRun {
    pub samples: Vec<ComplexField>,
    pub on_axis: Vec<OnAxisSample>,
}

/// March a source field through `config.n_steps` steps, keeping every
/// `sample_every`-th field (and the final one) plus the full on-axis log.
/// `sample_every = 0` keeps only the final field.
pub fn propagate(
    source: &ComplexField,
    config: &PropagationConfig,
    sample_every: usize,
) -> Result<PropagationRun> {
    let mut solver = SplitStepSolver::new(source.grid, config)?;
    let mut field = source.clone();
    let mut samples = Vec::new();
    let mut on_axis = Vec::with_capacity(config.n_steps + 1);
    on_axis.push(OnAxisSample {
        range_m: field.range_m,
        magnitude: field.on_axis_magnitude(),
    });
    for step_idx in 1..=config.n_steps {
        solver.step(&mut field, &config.index)?;
        on_axis.push(OnAxisSample {
            range_m: field.range_m,
            magnitude: field.on_axis_magnitude(),
        });
        let due = sample_every != 0 && step_idx % sample_every == 0;
        if due || step_idx == config.n_steps {
            samples.push(field.clone());
        }
    }
    if config.n_steps == 0 {
        samples.push(field);
    }
    Ok(PropagationRun { samples, on_axis })
}

/// Slope-fit settings for attenuation extraction.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    /// Ranges below this are excluded from the fit (near-field guard).
    pub exclude_before_m: f64,
    /// Minimum fitted span, metres.
    pub min_span_m: f64,
    /// Largest tolerated RMS residual of the linear fit, dB.
    pub max_rms_residual_db: f64,
}

impl Default for SlopeFit {
    fn default() -> Self {
        SlopeFit {
            exclude_before_m: 100.0,
            min_span_m: 1000.0,
            max_rms_residual_db: 0.5,
        }
    }
}

impl SlopeFit {
    /// Near-field exclusion for a Gaussian beam: ten Rayleigh ranges or
    /// 100 m, whichever is larger.
    pub fn for_beam(beam_waist_m: f64, frequency_ghz: f64) -> Self {
        let k0 = 2.0 * std::f64::consts::PI * frequency_ghz * 1e9 / SPEED_OF_LIGHT;
        let rayleigh = k0 * beam_waist_m * beam_waist_m / 2.0;
        SlopeFit {
            exclude_before_m: (10.0 * rayleigh).max(100.0),
            ..Default::default()
        }
    }
}

/// Specific attenuation from a medium run differenced against a free-space
/// reference, in dB/km (positive = loss).
///
/// Fits `20 log10(|u_medium| / |u_free|)` against range by least squares over
/// the post-near-field region; differencing removes diffraction spreading
/// and boundary-taper effects common to both runs. Fails if the logs do not
/// share a sampling schedule, the usable span is too short, or the fit
/// residual indicates the decay is not yet linear.
pub fn extract_specific_attenuation(
    medium_log: &[OnAxisSample],
    free_space_log: &[OnAxisSample],
    fit: &SlopeFit,
) -> Result<f64> {
    if medium_log.len() != free_space_log.len() || medium_log.is_empty() {
        return Err(PweError::Config(
            "attenuation extraction needs equal-length, non-empty logs".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (m, f) in medium_log.iter().zip(free_space_log) {
        if (m.range_m - f.range_m).abs() > 1e-9 {
            return Err(PweError::Config(
                "medium and free-space logs sample different ranges".into(),
            ));
        }
        if m.range_m < fit.exclude_before_m {
            continue;
        }
        if m.magnitude <= 0.0 || f.magnitude <= 0.0 {
            return Err(PweError::Numerical(format!(
                "vanishing on-axis amplitude at range {} m",
                m.range_m
            )));
        }
        xs.push(m.range_m);
        ys.push(20.0 * (m.magnitude / f.magnitude).log10());
    }
    if xs.len() < 2 {
        return Err(PweError::Config(
            "no usable samples beyond the near-field exclusion".into(),
        ));
    }
    let span = xs[xs.len() - 1] - xs[0];
    if span < fit.min_span_m {
        return Err(PweError::Config(format!(
            "fit span {span:.0} m is below the required {:.0} m beyond the near field",
            fit.min_span_m
        )));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope_db_per_m = sxy / sxx;
    let intercept = mean_y - slope_db_per_m * mean_x;
    let mut rss = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope_db_per_m * x);
        rss += r * r;
    }
    let rms = (rss / n).sqrt();
    if rms > fit.max_rms_residual_db {
        return Err(PweError::Numerical(format!(
            "attenuation fit RMS residual {rms:.3} dB exceeds {:.3} dB; \
             the log is not in the established-decay region",
            fit.max_rms_residual_db
        )));
    }
    Ok(-slope_db_per_m * 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::{self, RainParameters, SphereForm};

    fn line_grid(nx: usize, dx: f64) -> TransverseGrid {
        TransverseGrid::line(nx, dx)
    }

    #[test]
    fn grid_validation() {
        assert!(line_grid(1024, 0.05).validate().is_ok());
        assert!(line_grid(1000, 0.05).validate().is_err());
        assert!(TransverseGrid::plane(64, 48, 0.05, 0.05).validate().is_err());
        assert!(TransverseGrid::plane(64, 64, 0.05, 0.05).validate().is_ok());
    }

    #[test]
    fn gaussian_beam_center_and_waist_values() {
        let grid = line_grid(1024, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let field = gaussian_beam(&spec, grid).unwrap();
        assert_eq!(field.values[grid.nx / 2], Complex64::new(1.0, 0.0));
        // 1.0 m waist is 20 cells; amplitude there is exactly e^-1.
        let at_waist = field.values[grid.nx / 2 + 20].re;
        assert!((at_waist - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_beam_norm_matches_closed_form() {
        // ∫ exp(-2 x² / w0²) dx = w0 sqrt(pi/2) per axis.
        let grid = line_grid(2048, 0.05);
        let spec = SourceSpec { beam_waist_m: 2.0, ..Default::default() };
        let field = gaussian_beam(&spec, grid).unwrap();
        let analytic = (spec.beam_waist_m * (std::f64::consts::PI / 2.0).sqrt()).sqrt();
        assert!((field.l2_norm() - analytic).abs() / analytic < 0.01);
        // 3-D mode: product of the two axis integrals.
        let grid2 = TransverseGrid::plane(256, 256, 0.1, 0.1);
        let field2 = gaussian_beam(&spec, grid2).unwrap();
        let analytic2 = spec.beam_waist_m * (std::f64::consts::PI / 2.0).sqrt();
        assert!((field2.l2_norm() - analytic2).abs() / analytic2 < 0.01);
    }

    #[test]
    fn gaussian_beam_rejects_unresolved_waist() {
        let grid = line_grid(256, 0.5);
        let spec = SourceSpec { beam_waist_m: 0.6, ..Default::default() };
        assert!(gaussian_beam(&spec, grid).is_err());
    }

    #[test]
    fn spectral_propagator_identities() {
        let k0 = 100.0;
        assert_eq!(spectral_propagator(0.0, 1.0, k0), Complex64::new(1.0, 0.0));
        for k in [0.1, 1.0, 10.0, -4.0] {
            assert!((spectral_propagator(k, 2.0, k0).norm() - 1.0).abs() < 1e-15);
            let two = spectral_propagator(k, 2.0, k0);
            let one = spectral_propagator(k, 1.0, k0);
            assert!((two - one * one).norm() < 1e-15);
        }
    }

    #[test]
    fn free_space_norm_conserved_over_100_steps() {
        let grid = line_grid(1024, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let config = PropagationConfig::free_space(4.9, 2.0, 100);
        let run = propagate(&source, &config, 0).unwrap();
        let drift = (run.samples[0].l2_norm() - source.l2_norm()).abs() / source.l2_norm();
        assert!(drift < 1e-10, "norm drift {drift:.3e}");
    }

    #[test]
    fn uniform_lossy_medium_decays_at_plane_wave_rate() {
        // A uniform field only has the k = 0 component, so the screen factor
        // is the entire dynamics; its amplitude decay per step must match
        // exp(-k0 |Im(n² - 1)| dz / 2).
        let grid = line_grid(256, 0.05);
        let mut field = ComplexField::zeros(grid);
        field.values.fill(Complex64::new(1.0, 0.0));
        let n = Complex64::new(1.000002, -2.0e-7);
        let config = PropagationConfig {
            frequency_ghz: 4.9,
            step_dz_m: 5.0,
            n_steps: 100,
            absorber_width: 0.0,
            index: IndexProfile::Uniform(n),
        };
        let run = propagate(&field, &config, 0).unwrap();
        let k0 = config.wavenumber();
        let expected_rate = -k0 * (n * n - 1.0).im / 2.0; // nepers per metre
        let last = run.on_axis.last().unwrap();
        let measured = -(last.magnitude.ln()) / last.range_m;
        assert!(
            (measured - expected_rate).abs() / expected_rate < 0.01,
            "measured {measured:.6e} vs expected {expected_rate:.6e}"
        );
    }

    #[test]
    fn rain_medium_has_positive_decay_under_lossy_convention() {
        // Convention check: a Clausius-Mossotti rain index (negative
        // imaginary part) must attenuate the field.
        let eps = medium::effective_permittivity(
            &RainParameters::rain(25.0).with_form(SphereForm::ClausiusMossotti),
            4.9,
        )
        .unwrap();
        let n = medium::refractive_index(eps);
        assert!(n.im < 0.0);
        let grid = line_grid(256, 0.05);
        let mut field = ComplexField::zeros(grid);
        field.values.fill(Complex64::new(1.0, 0.0));
        let config = PropagationConfig {
            frequency_ghz: 4.9,
            step_dz_m: 10.0,
            n_steps: 200,
            absorber_width: 0.0,
            index: IndexProfile::Uniform(n),
        };
        let run = propagate(&field, &config, 0).unwrap();
        assert!(run.on_axis.last().unwrap().magnitude < 1.0);
    }

    #[test]
    fn beam_radius_matches_diffraction_formula() {
        // w(z) = w0 sqrt(1 + (2z / (k0 w0²))²), checked at twice the
        // Rayleigh range via the second moment of |u|².
        let grid = line_grid(4096, 0.05);
        let w0 = 1.0;
        let spec = SourceSpec { beam_waist_m: w0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let mut config = PropagationConfig::free_space(4.9, 10.0, 0);
        let k0 = config.wavenumber();
        let rayleigh = k0 * w0 * w0 / 2.0;
        config.n_steps = (2.0 * rayleigh / config.step_dz_m).round() as usize;
        let run = propagate(&source, &config, 0).unwrap();
        let field = &run.samples[0];
        let z = field.range_m;
        let expected = w0 * (1.0 + (2.0 * z / (k0 * w0 * w0)).powi(2)).sqrt();
        let mut power = 0.0;
        let mut moment = 0.0;
        for (i, v) in field.values.iter().enumerate() {
            let x = grid.x_coord(i);
            let p = v.norm_sqr();
            power += p;
            moment += p * x * x;
        }
        let measured = 2.0 * (moment / power).sqrt();
        assert!(
            (measured - expected).abs() / expected < 0.01,
            "w(z={z}) measured {measured:.4} expected {expected:.4}"
        );
    }

    #[test]
    fn semigroup_in_homogeneous_medium() {
        let grid = line_grid(512, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let n = Complex64::new(1.000003, -5.0e-8);
        let coarse = PropagationConfig {
            frequency_ghz: 4.9,
            step_dz_m: 4.0,
            n_steps: 25,
            absorber_width: 0.0,
            index: IndexProfile::Uniform(n),
        };
        let fine = PropagationConfig { step_dz_m: 2.0, n_steps: 50, ..coarse.clone() };
        let a = propagate(&source, &coarse, 0).unwrap();
        let b = propagate(&source, &fine, 0).unwrap();
        let fa = &a.samples[0];
        let fb = &b.samples[0];
        assert!((fa.range_m - fb.range_m).abs() < 1e-9);
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, y) in fa.values.iter().zip(&fb.values) {
            num += (x - y).norm_sqr();
            den += y.norm_sqr();
        }
        assert!((num / den).sqrt() < 1e-12, "relative diff {:.3e}", (num / den).sqrt());
    }

    #[test]
    fn propagation_is_linear() {
        let grid = line_grid(512, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let mut scaled = source.clone();
        let a = Complex64::new(0.7, -1.3);
        for v in scaled.values.iter_mut() {
            *v *= a;
        }
        let config = PropagationConfig::free_space(9.9, 3.0, 40);
        let base = propagate(&source, &config, 0).unwrap();
        let scaled_run = propagate(&scaled, &config, 0).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, y) in base.samples[0].values.iter().zip(&scaled_run.samples[0].values) {
            num += (x * a - y).norm_sqr();
            den += y.norm_sqr();
        }
        assert!((num / den).sqrt() < 1e-13, "relative diff {:.3e}", (num / den).sqrt());
    }

    #[test]
    fn absorber_keeps_boundary_quiet() {
        let grid = line_grid(512, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let config = PropagationConfig {
            frequency_ghz: 4.9,
            step_dz_m: 5.0,
            n_steps: 400,
            absorber_width: 0.125,
            index: IndexProfile::free_space(),
        };
        let run = propagate(&source, &config, 0).unwrap();
        let field = &run.samples[0];
        let peak = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = field.values[0].norm().max(field.values[grid.nx - 1].norm());
        assert!(edge < 1e-3 * peak, "edge {edge:.3e} vs peak {peak:.3e}");
    }

    #[test]
    fn zero_steps_returns_source() {
        let grid = line_grid(256, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let config = PropagationConfig::free_space(4.9, 1.0, 0);
        let run = propagate(&source, &config, 0).unwrap();
        assert_eq!(run.samples.len(), 1);
        assert_eq!(run.samples[0].values, source.values);
        assert_eq!(run.on_axis.len(), 1);
    }

    #[test]
    fn sampling_schedule_does_not_perturb_dynamics() {
        let grid = line_grid(256, 0.05);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let config = PropagationConfig::free_space(4.9, 2.0, 40);
        let every = propagate(&source, &config, 1).unwrap();
        let sparse = propagate(&source, &config, 10).unwrap();
        // Fields at common ranges are identical.
        assert_eq!(every.samples[9].values, sparse.samples[0].values);
        assert_eq!(every.samples[39].values, sparse.samples[3].values);
        assert_eq!(every.on_axis, sparse.on_axis);
    }

    #[test]
    fn three_d_mode_conserves_norm_and_diffracts() {
        let grid = TransverseGrid::plane(128, 128, 0.1, 0.1);
        let spec = SourceSpec { beam_waist_m: 1.0, ..Default::default() };
        let source = gaussian_beam(&spec, grid).unwrap();
        let config = PropagationConfig::free_space(4.9, 2.0, 50);
        let run = propagate(&source, &config, 0).unwrap();
        let drift = (run.samples[0].l2_norm() - source.l2_norm()).abs() / source.l2_norm();
        assert!(drift < 1e-10);
        // On-axis amplitude drops as the beam spreads.
        assert!(run.samples[0].on_axis_magnitude() < 1.0);
    }

    #[test]
    fn attenuation_extraction_identities() {
        let fit = SlopeFit { exclude_before_m: 0.0, min_span_m: 100.0, max_rms_residual_db: 0.1 };
        let log: Vec<OnAxisSample> = (0..200)
            .map(|i| OnAxisSample { range_m: i as f64 * 10.0, magnitude: 1.0 / (1.0 + i as f64) })
            .collect();
        // Same log on both sides: zero attenuation.
        let gamma = extract_specific_attenuation(&log, &log, &fit).unwrap();
        assert!(gamma.abs() < 1e-12);
    }

    #[test]
    fn attenuation_extraction_recovers_exact_exponential() {
        let fit = SlopeFit::default();
        let gamma_db_km = 3.7;
        let rate = gamma_db_km / (1000.0 * 20.0 / std::f64::consts::LN_10);
        let free: Vec<OnAxisSample> = (0..300)
            .map(|i| OnAxisSample { range_m: i as f64 * 10.0, magnitude: 2.0 / (1.0 + i as f64) })
            .collect();
        let rain: Vec<OnAxisSample> = free
            .iter()
            .map(|s| OnAxisSample {
                range_m: s.range_m,
                magnitude: s.magnitude * (-rate * s.range_m).exp(),
            })
            .collect();
        let gamma = extract_specific_attenuation(&rain, &free, &fit).unwrap();
        assert!((gamma - gamma_db_km).abs() < 1e-6, "gamma {gamma}");
    }

    #[test]
    fn attenuation_extraction_flags_bad_fit() {
        let fit = SlopeFit { exclude_before_m: 0.0, min_span_m: 100.0, max_rms_residual_db: 0.01 };
        let free: Vec<OnAxisSample> = (0..200)
            .map(|i| OnAxisSample { range_m: i as f64 * 10.0, magnitude: 1.0 })
            .collect();
        // Quadratic-in-range log magnitude: clearly not a line.
        let rain: Vec<OnAxisSample> = free
            .iter()
            .map(|s| OnAxisSample {
                range_m: s.range_m,
                magnitude: (-(s.range_m / 400.0).powi(2)).exp(),
            })
            .collect();
        match extract_specific_attenuation(&rain, &free, &fit) {
            Err(PweError::Numerical(_)) => {}
            other => panic!("expected residual diagnostics, got {other:?}"),
        }
    }

    #[test]
    fn attenuation_extraction_requires_span() {
        let fit = SlopeFit::default();
        let log: Vec<OnAxisSample> = (0..50)
            .map(|i| OnAxisSample { range_m: 100.0 + i as f64, magnitude: 1.0 })
            .collect();
        assert!(extract_specific_attenuation(&log, &log, &fit).is_err());
    }

    #[test]
    fn sampling_bound_enforced() {
        // 30 GHz bound is ~19 mm; a 50 mm grid must be rejected.
        let grid = line_grid(512, 0.05);
        let config = PropagationConfig::free_space(30.0, 2.0, 1);
        assert!(SplitStepSolver::new(grid, &config).is_err());
    }
}
