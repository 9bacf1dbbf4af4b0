//! Effective electromagnetic properties of rain.
//!
//! Rain is modelled as air laden with water drops whose sizes follow the
//! Marshall–Palmer spectrum. Each drop contributes a quasi-static dipole
//! polarizability — spherical below a 1.25 mm diameter threshold, an oblate
//! spheroid averaged over its three depolarization axes above it — and the
//! contributions are integrated over the drop-size distribution to obtain a
//! complex effective relative permittivity. An optional correction for
//! horizontal wind reweights each drop by the tilt of its velocity resultant.
//!
//! # Sign convention
//!
//! All complex quantities assume the engineering time factor `exp(+jωt)`, the
//! same convention the split-step propagator in [`crate::pwe`] is written in:
//! a lossy medium has a *negative* imaginary permittivity part, and the
//! resulting refractive index produces field decay under the solver's phase
//! screen `exp(-j k0 (n² - 1) dz / 2)`. [`ComplexPermittivity::loss`] returns
//! the positive loss magnitude. The convention is asserted once in the solver
//! tests (a lossy uniform medium must attenuate a plane wave).
//!
//! # Formula variants
//!
//! Two algebraic forms of the per-drop polarizability are selectable via
//! [`SphereForm`]. `AsPrinted` keeps the sphere denominator `ε_w - 2ε₀` and
//! the ellipsoid denominator `ε_w + L(ε_w - ε₀)`. That variant produces a
//! small *negative* loss (gain) for water drops and is kept only for
//! traceability; `ClausiusMossotti` uses the textbook denominators
//! `ε_w + 2ε₀` and `ε₀ + L(ε_w - ε₀)`, which yield physical attenuation, and
//! is what the bundled scenarios use. `AsPrinted` is the constructor default.

use num_complex::Complex64;
use thiserror::Error;

/// Relative permittivity of air.
const EPS_AIR: f64 = 1.0;
/// Marshall–Palmer intercept, m⁻³ mm⁻¹.
const MP_N0: f64 = 8000.0;
/// Largest stable drop diameter, mm.
const MAX_DROP_DIAMETER_MM: f64 = 8.0;
/// Default sphere/spheroid shape threshold, mm.
const SPHERE_THRESHOLD_MM: f64 = 1.25;
/// Default smallest drop diameter, mm.
const MIN_DROP_DIAMETER_MM: f64 = 0.1;
/// Simpson panels per integration branch.
const QUADRATURE_PANELS: usize = 256;
/// Relative drift allowed between the coarse and fine quadrature passes.
const QUADRATURE_TOL: f64 = 1e-9;
/// Softening scale (m/s) applied to the terminal-velocity fit inside the wind
/// correction so the reweighted integrand stays bounded as the fall speed of
/// the smallest drops approaches zero.
const FALL_SPEED_SOFTENING: f64 = 0.2;

#[derive(Debug, Error)]
pub enum MediumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

type Result<T> = std::result::Result<T, MediumError>;

/// Complex relative permittivity (relative to vacuum).
///
/// `imag` is the signed imaginary part under the `exp(+jωt)` convention;
/// passive lossy media have `imag < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPermittivity {
    pub real: f64,
    pub imag: f64,
}

impl ComplexPermittivity {
    pub fn new(real: f64, imag: f64) -> Self {
        ComplexPermittivity { real, imag }
    }

    /// Positive loss magnitude ε'' (the permittivity is ε' - j ε'').
    pub fn loss(&self) -> f64 {
        -self.imag
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.real, self.imag)
    }
}

impl From<ComplexPermittivity> for Complex64 {
    fn from(eps: ComplexPermittivity) -> Complex64 {
        eps.as_complex()
    }
}

/// Depolarization factors of a spheroidal drop along its three axes.
#[derive(Debug, Clone, Copy)]
pub struct PolarizationFactors {
    pub l_a: f64,
    pub l_b: f64,
    pub l_c: f64,
}

/// Selects the algebraic form of the per-drop polarizability denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereForm {
    /// Sphere `ε_w - 2ε₀`, ellipsoid `ε_w + L(ε_w - ε₀)`. Default.
    #[default]
    AsPrinted,
    /// Textbook Clausius–Mossotti: sphere `ε_w + 2ε₀`, ellipsoid
    /// `ε₀ + L(ε_w - ε₀)`. Produces physical (positive) rain attenuation.
    ClausiusMossotti,
}

/// Rain medium description.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RainParameters {
    /// Rain rate in mm/h. Zero means clear air.
    pub rain_rate_mm_h: f64,
    /// Drop temperature in °C.
    pub temperature_c: f64,
    /// Horizontal wind speed in m/s. Zero disables the wind correction.
    pub wind_speed_m_s: f64,
    /// Smallest integrated drop diameter, mm.
    pub d_min_mm: f64,
    /// Largest integrated drop diameter, mm (at most 8: larger drops break up).
    pub d_max_mm: f64,
    /// Diameter above which drops are treated as oblate spheroids, mm.
    pub sphere_threshold_mm: f64,
    /// Polarizability denominator variant.
    pub sphere_form: SphereForm,
}

impl Default for RainParameters {
    fn default() -> Self {
        RainParameters {
            rain_rate_mm_h: 0.0,
            temperature_c: 20.0,
            wind_speed_m_s: 0.0,
            d_min_mm: MIN_DROP_DIAMETER_MM,
            d_max_mm: MAX_DROP_DIAMETER_MM,
            sphere_threshold_mm: SPHERE_THRESHOLD_MM,
            sphere_form: SphereForm::AsPrinted,
        }
    }
}

impl RainParameters {
    /// Rain at the given rate with default drop spectrum bounds, 20 °C, no wind.
    pub fn rain(rain_rate_mm_h: f64) -> Self {
        RainParameters {
            rain_rate_mm_h,
            ..Default::default()
        }
    }

    pub fn with_wind(mut self, wind_speed_m_s: f64) -> Self {
        self.wind_speed_m_s = wind_speed_m_s;
        self
    }

    pub fn with_form(mut self, form: SphereForm) -> Self {
        self.sphere_form = form;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rain_rate_mm_h >= 0.0) {
            return Err(MediumError::Domain(format!(
                "rain rate must be non-negative, got {}",
                self.rain_rate_mm_h
            )));
        }
        if !(self.wind_speed_m_s >= 0.0) {
            return Err(MediumError::Domain(format!(
                "wind speed must be non-negative, got {}",
                self.wind_speed_m_s
            )));
        }
        if !(0.0 < self.d_min_mm
            && self.d_min_mm < self.sphere_threshold_mm
            && self.sphere_threshold_mm < self.d_max_mm)
        {
            return Err(MediumError::Domain(format!(
                "drop diameter bounds must satisfy 0 < d_min < threshold < d_max, got {} / {} / {}",
                self.d_min_mm, self.sphere_threshold_mm, self.d_max_mm
            )));
        }
        if self.d_max_mm > MAX_DROP_DIAMETER_MM {
            return Err(MediumError::Domain(format!(
                "d_max is {} mm but drops above {} mm break up",
                self.d_max_mm, MAX_DROP_DIAMETER_MM
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Water permittivity (single-Debye relaxation, Liebe-style coefficients)
// ---------------------------------------------------------------------------

/// Complex relative permittivity of liquid water.
///
/// Single-Debye relaxation with temperature-dependent static permittivity,
/// high-frequency permittivity, and relaxation frequency:
///
/// ```text
/// θ    = 300 / T[K]
/// ε_s  = 77.66 + 103.3 (θ - 1)
/// ε_∞  = 0.0671 ε_s
/// f_D  = 20.20 - 146.4 (θ - 1) + 316 (θ - 1)²   [GHz]
/// ε(f) = ε_∞ + (ε_s - ε_∞) / (1 + j f / f_D)
/// ```
///
/// Valid for 1–100 GHz and 0–40 °C; the returned imaginary part is negative
/// (lossy) per the crate sign convention.
pub fn water_permittivity(frequency_ghz: f64, temperature_c: f64) -> Result<ComplexPermittivity> {
    if !(1.0..=100.0).contains(&frequency_ghz) {
        return Err(MediumError::Domain(format!(
            "water permittivity valid for 1..=100 GHz, got {frequency_ghz}"
        )));
    }
    if !(0.0..=40.0).contains(&temperature_c) {
        return Err(MediumError::Domain(format!(
            "water permittivity valid for 0..=40 °C, got {temperature_c}"
        )));
    }
    Ok(debye_extrapolated(frequency_ghz, temperature_c))
}

/// Debye evaluation without the frequency range guard, so the static limit
/// can be probed in tests.
pub(crate) fn debye_extrapolated(frequency_ghz: f64, temperature_c: f64) -> ComplexPermittivity {
    let theta = 300.0 / (temperature_c + 273.15);
    let eps_s = 77.66 + 103.3 * (theta - 1.0);
    let eps_inf = 0.0671 * eps_s;
    let f_d = 20.20 - 146.4 * (theta - 1.0) + 316.0 * (theta - 1.0).powi(2);
    let eps = eps_inf + (eps_s - eps_inf) / Complex64::new(1.0, frequency_ghz / f_d);
    ComplexPermittivity::new(eps.re, eps.im)
}

// ---------------------------------------------------------------------------
// Marshall–Palmer drop-size spectrum
// ---------------------------------------------------------------------------

/// Marshall–Palmer drop number density N(D) in m⁻³ mm⁻¹.
///
/// `N(D) = N₀ exp(-Λ D)` with `N₀ = 8000 m⁻³ mm⁻¹` and
/// `Λ = 4.1 R^(-0.21) mm⁻¹`.
pub fn drop_size_density(d_mm: f64, rain_rate_mm_h: f64) -> Result<f64> {
    if d_mm < 0.0 {
        return Err(MediumError::Domain(format!(
            "drop diameter must be non-negative, got {d_mm}"
        )));
    }
    if rain_rate_mm_h <= 0.0 {
        return Err(MediumError::Domain(format!(
            "rain rate must be positive, got {rain_rate_mm_h}"
        )));
    }
    Ok(MP_N0 * (-mp_slope(rain_rate_mm_h) * d_mm).exp())
}

fn mp_slope(rain_rate_mm_h: f64) -> f64 {
    4.1 * rain_rate_mm_h.powf(-0.21)
}

// ---------------------------------------------------------------------------
// Drop shape
// ---------------------------------------------------------------------------

/// Eccentricity of an oblate spheroid from its axis ratio a/b (short over
/// long semi-axis): `e = sqrt(1 - (a/b)²)`.
pub fn eccentricity(axis_ratio: f64) -> Result<f64> {
    if !(axis_ratio > 0.0 && axis_ratio <= 1.0) {
        return Err(MediumError::Domain(format!(
            "axis ratio must be in (0, 1], got {axis_ratio}"
        )));
    }
    Ok((1.0 - axis_ratio * axis_ratio).max(0.0).sqrt())
}

/// Pruppacher–Beard linear axis-ratio fit for oblate raindrops,
/// `a/b = 1.03 - 0.062 D` (D in mm), clamped to [0.4, 1].
pub fn axis_ratio(d_mm: f64) -> f64 {
    (1.03 - 0.062 * d_mm).clamp(0.4, 1.0)
}

/// Depolarization factors of an oblate spheroid with eccentricity `e`.
///
/// Along the (short) symmetry axis:
/// `L_a = (1 - sqrt((1 - e²)/e²) · asin(e)) / e²`, and
/// `L_b = L_c = (1 - L_a) / 2`. The factors always sum to one.
pub fn polarization_factors(e: f64) -> Result<PolarizationFactors> {
    if !(0.0..1.0).contains(&e) {
        return Err(MediumError::Domain(format!(
            "eccentricity must be in [0, 1), got {e}"
        )));
    }
    let l_a = if e < 1e-4 {
        // Series expansion avoids the 0/0 at the sphere limit.
        1.0 / 3.0 + 2.0 / 15.0 * e * e
    } else {
        (1.0 - ((1.0 - e * e) / (e * e)).sqrt() * e.asin()) / (e * e)
    };
    let l_b = 0.5 * (1.0 - l_a);
    Ok(PolarizationFactors {
        l_a,
        l_b,
        l_c: l_b,
    })
}

// ---------------------------------------------------------------------------
// Per-drop polarizability
// ---------------------------------------------------------------------------

/// Polarizability of a spherical drop of diameter `d_mm`.
///
/// `α(D) = 4π ε₀ (ε_w - ε₀)/(ε_w ∓ 2ε₀) (D/2)³` with the diameter in metres,
/// so α carries units of volume (m³) scaled by relative permittivity.
pub fn sphere_polarizability(
    d_mm: f64,
    eps_w: ComplexPermittivity,
    form: SphereForm,
) -> Complex64 {
    let radius_m = d_mm * 1e-3 / 2.0;
    let ew = eps_w.as_complex();
    let den = match form {
        SphereForm::AsPrinted => ew - 2.0 * EPS_AIR,
        SphereForm::ClausiusMossotti => ew + 2.0 * EPS_AIR,
    };
    4.0 * std::f64::consts::PI * EPS_AIR * (ew - EPS_AIR) / den * radius_m.powi(3)
}

/// Polarizability of a spheroidal drop along the axis with depolarization
/// factor `l_i`, using the equivolumetric-sphere volume `v = (4π/3)(D/2)³`.
///
/// `α = v ε₀ (ε_w - ε₀) / DEN` with `DEN = ε_w + L(ε_w - ε₀)` as printed or
/// the textbook `DEN = ε₀ + L(ε_w - ε₀)`; the textbook form at `L = 1/3`
/// reduces exactly to the Clausius–Mossotti sphere (the printed pair does
/// not reduce to one another, which is why both variants are kept).
pub fn ellipsoid_polarizability(
    d_mm: f64,
    eps_w: ComplexPermittivity,
    l_i: f64,
    form: SphereForm,
) -> Complex64 {
    let radius_m = d_mm * 1e-3 / 2.0;
    let volume = 4.0 * std::f64::consts::PI / 3.0 * radius_m.powi(3);
    let ew = eps_w.as_complex();
    let den = match form {
        SphereForm::AsPrinted => ew + l_i * (ew - EPS_AIR),
        SphereForm::ClausiusMossotti => EPS_AIR + l_i * (ew - EPS_AIR),
    };
    volume * EPS_AIR * (ew - EPS_AIR) / den
}

// ---------------------------------------------------------------------------
// Fall speed and wind correction
// ---------------------------------------------------------------------------

/// Terminal fall speed of a drop, Atlas exponential fit
/// `v = 9.65 - 10.3 exp(-0.6 D)` m/s (D in mm), clamped below at zero.
pub fn terminal_velocity(d_mm: f64) -> Result<f64> {
    if !(d_mm > 0.0 && d_mm <= MAX_DROP_DIAMETER_MM) {
        return Err(MediumError::Domain(format!(
            "terminal velocity fit valid for 0 < D <= {MAX_DROP_DIAMETER_MM} mm, got {d_mm}"
        )));
    }
    Ok(atlas_fit(d_mm).max(0.0))
}

fn atlas_fit(d_mm: f64) -> f64 {
    9.65 - 10.3 * (-0.6 * d_mm).exp()
}

/// Fall speed used inside the wind correction: the Atlas fit with a smooth
/// positive floor (scale 0.2 m/s) so the 1/F weighting of the smallest drops
/// stays bounded and the drop-spectrum quadrature keeps converging.
fn softened_fall_speed(d_mm: f64) -> f64 {
    let v = atlas_fit(d_mm);
    0.5 * (v + (v * v + FALL_SPEED_SOFTENING * FALL_SPEED_SOFTENING).sqrt())
}

/// Wind tilt factor `F(D) = cos(atan(v_h / v_v(D)))` in (0, 1].
///
/// `F = 1` without wind; stronger horizontal wind tilts the velocity
/// resultant of a drop further from vertical and shrinks F.
pub fn wind_correction(d_mm: f64, wind_speed_m_s: f64) -> f64 {
    if wind_speed_m_s <= 0.0 {
        return 1.0;
    }
    (wind_speed_m_s / softened_fall_speed(d_mm)).atan().cos()
}

// ---------------------------------------------------------------------------
// Effective permittivity of the rain medium
// ---------------------------------------------------------------------------

/// Effective relative permittivity of rain-filled air.
///
/// Integrates the per-drop polarizability against the Marshall–Palmer
/// spectrum in two branches: spheres over `[d_min, threshold]` and
/// orientation-averaged oblate spheroids over `[threshold, d_max]`, each with
/// its internal-field correction factor:
///
/// ```text
/// ε_eff = ε₀ + ∫ N(D) α_s(D) · 3ε₀/(3ε₀ - α_s(D)) dD
///             + (1/3) Σ_i ∫ N(D) α_i(D) · ε₀/(ε₀ - L_i α_i(D)) dD
/// ```
///
/// With wind, each correction numerator is divided by the tilt factor
/// `F(D)`, which reweights every drop by `1/F ≥ 1`. Both branches use
/// composite Simpson quadrature (256 panels) and the result is verified
/// against a 512-panel pass; disagreement is reported as a numerical error.
/// A zero rain rate returns the permittivity of air exactly.
pub fn effective_permittivity(
    params: &RainParameters,
    frequency_ghz: f64,
) -> Result<ComplexPermittivity> {
    params.validate()?;
    if params.rain_rate_mm_h == 0.0 {
        return Ok(ComplexPermittivity::new(EPS_AIR, 0.0));
    }
    let coarse = effective_permittivity_with_panels(params, frequency_ghz, QUADRATURE_PANELS)?;
    let fine = effective_permittivity_with_panels(params, frequency_ghz, 2 * QUADRATURE_PANELS)?;
    let drift = (fine.as_complex() - coarse.as_complex()).norm() / fine.as_complex().norm();
    if !drift.is_finite() || drift > QUADRATURE_TOL {
        return Err(MediumError::Numerical(format!(
            "drop-spectrum quadrature did not converge: relative drift {drift:.3e} \
             between {QUADRATURE_PANELS} and {} panels at {frequency_ghz} GHz, R = {} mm/h",
            2 * QUADRATURE_PANELS,
            params.rain_rate_mm_h
        )));
    }
    Ok(fine)
}

/// Quadrature core with an explicit panel count (exposed for convergence
/// studies; panel count must be even and at least 2).
pub fn effective_permittivity_with_panels(
    params: &RainParameters,
    frequency_ghz: f64,
    panels: usize,
) -> Result<ComplexPermittivity> {
    params.validate()?;
    if panels < 2 || panels % 2 != 0 {
        return Err(MediumError::Domain(format!(
            "Simpson panel count must be even and >= 2, got {panels}"
        )));
    }
    if params.rain_rate_mm_h == 0.0 {
        return Ok(ComplexPermittivity::new(EPS_AIR, 0.0));
    }
    let eps_w = water_permittivity(frequency_ghz, params.temperature_c)?;
    let rr = params.rain_rate_mm_h;
    let wind = params.wind_speed_m_s;
    let form = params.sphere_form;

    let sphere_integrand = |d: f64| -> Complex64 {
        let n_d = MP_N0 * (-mp_slope(rr) * d).exp();
        let alpha = sphere_polarizability(d, eps_w, form);
        let f = wind_correction(d, wind);
        let corr = (3.0 * EPS_AIR / f) / (3.0 * EPS_AIR - alpha);
        n_d * alpha * corr
    };
    let ellipsoid_integrand = |d: f64| -> Complex64 {
        let n_d = MP_N0 * (-mp_slope(rr) * d).exp();
        let e = eccentricity(axis_ratio(d)).expect("axis ratio clamped into (0, 1]");
        let lf = polarization_factors(e).expect("eccentricity in [0, 1)");
        let f = wind_correction(d, wind);
        let mut sum = Complex64::new(0.0, 0.0);
        for l_i in [lf.l_a, lf.l_b, lf.l_c] {
            let alpha = ellipsoid_polarizability(d, eps_w, l_i, form);
            let corr = (EPS_AIR / f) / (EPS_AIR - l_i * alpha);
            sum += alpha * corr;
        }
        n_d * sum / 3.0
    };

    let sphere = simpson(&sphere_integrand, params.d_min_mm, params.sphere_threshold_mm, panels);
    let ellipsoid = simpson(
        &ellipsoid_integrand,
        params.sphere_threshold_mm,
        params.d_max_mm,
        panels,
    );
    let eps = Complex64::new(EPS_AIR, 0.0) + sphere + ellipsoid;
    if !eps.re.is_finite() || !eps.im.is_finite() {
        return Err(MediumError::Numerical(format!(
            "non-finite effective permittivity at {frequency_ghz} GHz, R = {rr} mm/h"
        )));
    }
    Ok(ComplexPermittivity::new(eps.re, eps.im))
}

fn simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, panels: usize) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Complex refractive index `n = sqrt(ε_eff)` (principal branch).
pub fn refractive_index(eps: ComplexPermittivity) -> Complex64 {
    eps.as_complex().sqrt()
}

/// Plane-wave specific attenuation implied by a permittivity, in dB/km.
///
/// Under the solver's phase screen the field amplitude of a uniform wave
/// decays at `k0 · |Im(ε - 1)| / 2` nepers per metre; this returns the
/// signed power attenuation (positive = loss) for quick medium checks.
pub fn plane_wave_attenuation_db_km(eps: ComplexPermittivity, frequency_ghz: f64) -> f64 {
    let k0 = 2.0 * std::f64::consts::PI * frequency_ghz * 1e9 / crate::SPEED_OF_LIGHT;
    let rate_np_m = -k0 * (eps.as_complex() - EPS_AIR).im / 2.0;
    rate_np_m * (20.0 / std::f64::consts::LN_10) * 1000.0
}
