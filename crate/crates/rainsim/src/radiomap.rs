//! Received-signal and SIR maps on the flight-altitude plane.
//!
//! For each base station the builder runs 2-D vertical-slice split-step
//! sweeps outward along a fan of azimuths, records the field amplitude at
//! the flight altitude versus range, and interpolates the fan (bilinear in
//! polar coordinates) onto a Cartesian node grid. The received signal
//! strength at a node is `|u|²`; the signal-to-interference ratio serves the
//! strongest cell against the sum of all others:
//!
//! ```text
//! SIR(q, b) = u_b(q)² / Σ_{m≠b} u_m(q)²
//! ```
//!
//! Scenarios may instead declare analytic synthetic sources (Gaussian
//! footprints on the plane plus an ambient floor), which skip the solver —
//! useful for engineered test fields. Maps persist to a self-describing
//! binary container with a JSON header and raw little-endian grids, and
//! carry digests of the scenario and medium that produced them so consumers
//! can detect mismatched physics.

use rayon::prelude::*;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

use crate::medium::{self, MediumError, RainParameters};
use crate::pwe::{
    gaussian_beam, max_grid_spacing, ComplexField, IndexProfile, PropagationConfig, PweError,
    SourceSpec, SplitStepSolver, TransverseGrid, DEFAULT_THETA_MAX_DEG,
};

/// Interference floor preventing division by zero at map edges where every
/// interferer vanishes.
pub const INTERFERENCE_FLOOR: f64 = 1e-30;
/// Container schema version.
pub const MAP_SCHEMA_VERSION: u32 = 1;
const MAP_MAGIC: &[u8; 4] = b"RMAP";

#[derive(Debug, Error)]
pub enum MapError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    Pwe(#[from] PweError),
}

type Result<T> = std::result::Result<T, MapError>;

/// FNV-1a 64-bit digest, used to fingerprint scenarios and media.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// A ground base station radiating a unit-strength Gaussian beam.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseStation {
    /// Ground position (x, y), metres.
    pub position_m: [f64; 2],
    /// Antenna height above ground, metres.
    pub antenna_height_m: f64,
    /// 1/e beam waist radius, metres.
    pub beam_waist_m: f64,
}

/// Analytic test source: a Gaussian received-power footprint on the plane.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSource {
    pub center_m: [f64; 2],
    /// 1/e radius of the power footprint, metres.
    pub sigma_m: f64,
    pub amplitude: f64,
}

/// Airspace, sources, medium, and sampling for one map build.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    /// Lower corner of the airspace box (x, y, z), metres.
    pub bounds_min_m: [f64; 3],
    /// Upper corner of the airspace box (x, y, z), metres.
    pub bounds_max_m: [f64; 3],
    /// Flight plane altitude, metres.
    pub altitude_m: f64,
    pub frequency_ghz: f64,
    /// Plane node spacing, metres.
    pub resolution_m: f64,
    /// Number of azimuthal slices per base station.
    pub azimuths: usize,
    pub medium: RainParameters,
    pub base_stations: Vec<BaseStation>,
    /// When non-empty, the map is built analytically from these sources and
    /// the solver settings below are ignored.
    pub synthetic_sources: Vec<SyntheticSource>,
    /// Ambient power floor added to every synthetic source.
    pub synthetic_floor: f64,
    /// Range step of the vertical-slice sweeps, metres.
    pub range_step_m: f64,
    /// Vertical extent of the slice domain, metres.
    pub vertical_extent_m: f64,
    /// Absorbing fraction per slice edge.
    pub absorber_width: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            bounds_min_m: [0.0, 0.0, 0.0],
            bounds_max_m: [2000.0, 2000.0, 300.0],
            altitude_m: 100.0,
            frequency_ghz: 4.9,
            resolution_m: 50.0,
            azimuths: 64,
            medium: RainParameters::default(),
            base_stations: Vec::new(),
            synthetic_sources: Vec::new(),
            synthetic_floor: 0.0,
            range_step_m: 4.0,
            vertical_extent_m: 480.0,
            absorber_width: 0.125,
        }
    }
}

impl Scenario {
    pub fn is_synthetic(&self) -> bool {
        !self.synthetic_sources.is_empty()
    }

    pub fn n_sources(&self) -> usize {
        if self.is_synthetic() {
            self.synthetic_sources.len()
        } else {
            self.base_stations.len()
        }
    }

    /// Plane grid dimensions: nodes at `origin + i * resolution`.
    pub fn grid_dims(&self) -> (usize, usize) {
        let nx = ((self.bounds_max_m[0] - self.bounds_min_m[0]) / self.resolution_m).round()
            as usize
            + 1;
        let ny = ((self.bounds_max_m[1] - self.bounds_min_m[1]) / self.resolution_m).round()
            as usize
            + 1;
        (nx, ny)
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            if !(self.bounds_min_m[axis] < self.bounds_max_m[axis]) {
                return Err(MapError::Config(format!(
                    "airspace bounds must have positive extent on axis {axis}"
                )));
            }
        }
        if !(self.altitude_m >= self.bounds_min_m[2] && self.altitude_m <= self.bounds_max_m[2]) {
            return Err(MapError::Config(format!(
                "flight altitude {} m outside the airspace z range {}..{} m",
                self.altitude_m, self.bounds_min_m[2], self.bounds_max_m[2]
            )));
        }
        if !(self.resolution_m > 0.0) {
            return Err(MapError::Config("plane resolution must be positive".into()));
        }
        if self.n_sources() < 2 {
            return Err(MapError::Config(
                "at least two sources are required (SIR needs interference)".into(),
            ));
        }
        self.medium.validate()?;
        if !self.is_synthetic() {
            if self.azimuths < 4 {
                return Err(MapError::Config(format!(
                    "at least 4 azimuths required, got {}",
                    self.azimuths
                )));
            }
            if !(self.range_step_m > 0.0) || !(self.vertical_extent_m > 0.0) {
                return Err(MapError::Config(
                    "range step and vertical extent must be positive".into(),
                ));
            }
            for (m, bs) in self.base_stations.iter().enumerate() {
                let inside = bs.position_m[0] >= self.bounds_min_m[0]
                    && bs.position_m[0] <= self.bounds_max_m[0]
                    && bs.position_m[1] >= self.bounds_min_m[1]
                    && bs.position_m[1] <= self.bounds_max_m[1];
                if !inside {
                    return Err(MapError::Config(format!(
                        "base station {m} at ({}, {}) lies outside the airspace footprint",
                        bs.position_m[0], bs.position_m[1]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Digest of the medium physics this scenario prescribes (rain
    /// parameters and carrier frequency).
    pub fn medium_digest(&self) -> u64 {
        let encoded = serde_json::to_string(&(self.medium, self.frequency_ghz))
            .expect("medium serializes");
        fnv1a64(encoded.as_bytes())
    }

    /// Digest of the full scenario.
    pub fn scenario_digest(&self) -> u64 {
        let encoded = serde_json::to_string(self).expect("scenario serializes");
        fnv1a64(encoded.as_bytes())
    }
}

/// Grid geometry and provenance shared by all map artifacts.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MapMeta {
    pub schema_version: u32,
    pub nx: usize,
    pub ny: usize,
    pub origin_m: [f64; 2],
    pub resolution_m: f64,
    pub altitude_m: f64,
    pub frequency_ghz: f64,
    pub n_sources: usize,
    pub medium_digest: u64,
    pub scenario_digest: u64,
}

impl MapMeta {
    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin_m[0] + i as f64 * self.resolution_m,
            self.origin_m[1] + j as f64 * self.resolution_m,
        )
    }

    /// Grid node nearest to a plane position, if inside the footprint.
    pub fn nearest_node(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.origin_m[0]) / self.resolution_m;
        let fy = (y - self.origin_m[1]) / self.resolution_m;
        let i = fx.round();
        let j = fy.round();
        if i < 0.0 || j < 0.0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        Some((i as usize, j as usize))
    }
}

/// Per-source received-signal-strength grids on the flight plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RssMap {
    pub meta: MapMeta,
    /// `per_source[m][j * nx + i]` is the RSS (`|u|²`) of source `m`.
    pub per_source: Vec<Vec<f64>>,
}

impl RssMap {
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.meta.nx + i
    }

    /// Serving cell at a node: the argmax-amplitude source, ties broken by
    /// the lowest index.
    pub fn best_association(&self, i: usize, j: usize) -> usize {
        let idx = self.node_index(i, j);
        let mut best = 0usize;
        let mut best_rss = self.per_source[0][idx];
        for (m, grid) in self.per_source.iter().enumerate().skip(1) {
            if grid[idx] > best_rss {
                best_rss = grid[idx];
                best = m;
            }
        }
        best
    }

    /// SIR at a node for a chosen serving cell `b`, with the interference
    /// denominator floored to stay finite.
    pub fn sir_at(&self, i: usize, j: usize, b: usize) -> f64 {
        let idx = self.node_index(i, j);
        let mut interference = 0.0;
        for (m, grid) in self.per_source.iter().enumerate() {
            if m != b {
                interference += grid[idx];
            }
        }
        self.per_source[b][idx] / interference.max(INTERFERENCE_FLOOR)
    }

    /// Mean RSS over the plane, averaged across sources and nodes.
    pub fn mean_rss(&self) -> f64 {
        let total: f64 = self.per_source.iter().flat_map(|g| g.iter()).sum();
        total / (self.per_source.len() * self.meta.nx * self.meta.ny) as f64
    }
}

/// SIR and association grids derived from an [`RssMap`] under best
/// association at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SirMap {
    pub meta: MapMeta,
    pub sir_linear: Vec<f64>,
    pub sir_db: Vec<f64>,
    pub association: Vec<u16>,
}

impl SirMap {
    pub fn from_rss(rss: &RssMap) -> Result<Self> {
        if rss.per_source.len() < 2 {
            return Err(MapError::Config(
                "SIR derivation needs at least two sources".into(),
            ));
        }
        let (nx, ny) = (rss.meta.nx, rss.meta.ny);
        let mut sir_linear = vec![0.0; nx * ny];
        let mut sir_db = vec![0.0; nx * ny];
        let mut association = vec![0u16; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let b = rss.best_association(i, j);
                let s = rss.sir_at(i, j, b);
                let idx = j * nx + i;
                sir_linear[idx] = s;
                sir_db[idx] = 10.0 * s.max(INTERFERENCE_FLOOR).log10();
                association[idx] = b as u16;
            }
        }
        Ok(SirMap {
            meta: rss.meta.clone(),
            sir_linear,
            sir_db,
            association,
        })
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.meta.nx + i
    }

    pub fn sir_stats_db(&self) -> (f64, f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in &self.sir_db {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        (min, sum / self.sir_db.len() as f64, max)
    }
}

/// Sum of best-association SIR along a node path (all nodes counted).
pub fn path_sir_total(sir: &SirMap, path: &[(usize, usize)]) -> Result<f64> {
    let mut total = 0.0;
    for &(i, j) in path {
        if i >= sir.meta.nx || j >= sir.meta.ny {
            return Err(MapError::Domain(format!(
                "path node ({i}, {j}) outside the {}x{} grid",
                sir.meta.nx, sir.meta.ny
            )));
        }
        total += sir.sir_linear[sir.node_index(i, j)];
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Map construction
// ---------------------------------------------------------------------------

/// Amplitude record of one azimuthal slice: sample `s` is `|u|` at the
/// flight altitude at range `s * range_step`.
struct AzimuthSlice {
    amplitudes: Vec<f64>,
}

/// Build the per-source RSS grids for a scenario.
///
/// Synthetic scenarios evaluate their analytic footprints directly. Solver
/// scenarios sweep `azimuths` vertical slices per base station in parallel
/// (deterministically assembled in index order) and interpolate the fan
/// onto the plane grid.
pub fn build_rss_map(scenario: &Scenario) -> Result<RssMap> {
    scenario.validate()?;
    let (nx, ny) = scenario.grid_dims();
    let meta = MapMeta {
        schema_version: MAP_SCHEMA_VERSION,
        nx,
        ny,
        origin_m: [scenario.bounds_min_m[0], scenario.bounds_min_m[1]],
        resolution_m: scenario.resolution_m,
        altitude_m: scenario.altitude_m,
        frequency_ghz: scenario.frequency_ghz,
        n_sources: scenario.n_sources(),
        medium_digest: scenario.medium_digest(),
        scenario_digest: scenario.scenario_digest(),
    };
    let per_source = if scenario.is_synthetic() {
        build_synthetic_grids(scenario, &meta)
    } else {
        build_solver_grids(scenario, &meta)?
    };
    Ok(RssMap { meta, per_source })
}

fn build_synthetic_grids(scenario: &Scenario, meta: &MapMeta) -> Vec<Vec<f64>> {
    scenario
        .synthetic_sources
        .iter()
        .map(|src| {
            let mut grid = vec![0.0; meta.nx * meta.ny];
            for j in 0..meta.ny {
                for i in 0..meta.nx {
                    let (x, y) = meta.node_coords(i, j);
                    let d2 = (x - src.center_m[0]).powi(2) + (y - src.center_m[1]).powi(2);
                    grid[j * meta.nx + i] =
                        src.amplitude * (-d2 / (src.sigma_m * src.sigma_m)).exp()
                            + scenario.synthetic_floor;
                }
            }
            grid
        })
        .collect()
}

fn build_solver_grids(scenario: &Scenario, meta: &MapMeta) -> Result<Vec<Vec<f64>>> {
    let eps = medium::effective_permittivity(&scenario.medium, scenario.frequency_ghz)?;
    let index = medium::refractive_index(eps);

    // Longest base-station-to-corner distance fixes the sweep range.
    let corners = [
        (scenario.bounds_min_m[0], scenario.bounds_min_m[1]),
        (scenario.bounds_min_m[0], scenario.bounds_max_m[1]),
        (scenario.bounds_max_m[0], scenario.bounds_min_m[1]),
        (scenario.bounds_max_m[0], scenario.bounds_max_m[1]),
    ];
    let tasks: Vec<(usize, usize)> = (0..scenario.base_stations.len())
        .flat_map(|m| (0..scenario.azimuths).map(move |a| (m, a)))
        .collect();
    let slices: Vec<Result<(usize, usize, AzimuthSlice)>> = tasks
        .par_iter()
        .map(|&(m, a)| {
            let bs = &scenario.base_stations[m];
            let max_range = corners
                .iter()
                .map(|c| ((c.0 - bs.position_m[0]).powi(2) + (c.1 - bs.position_m[1]).powi(2)).sqrt())
                .fold(0.0, f64::max)
                .max(scenario.range_step_m);
            let n_steps = (max_range / scenario.range_step_m).ceil() as usize;
            let slice = run_vertical_slice(scenario, bs, index, n_steps)?;
            Ok((m, a, slice))
        })
        .collect();

    let mut fans: Vec<Vec<AzimuthSlice>> = (0..scenario.base_stations.len())
        .map(|_| Vec::with_capacity(scenario.azimuths))
        .collect();
    // Tasks were generated in (station, azimuth) order; the parallel collect
    // preserves it, so fans assemble deterministically.
    for entry in slices {
        let (m, _a, slice) = entry?;
        fans[m].push(slice);
    }

    let grids = (0..scenario.base_stations.len())
        .map(|m| {
            let bs = &scenario.base_stations[m];
            let mut grid = vec![0.0; meta.nx * meta.ny];
            for j in 0..meta.ny {
                for i in 0..meta.nx {
                    let (x, y) = meta.node_coords(i, j);
                    let amp = polar_interpolate(
                        &fans[m],
                        scenario.range_step_m,
                        bs.position_m,
                        x,
                        y,
                    );
                    grid[j * meta.nx + i] = amp * amp;
                }
            }
            grid
        })
        .collect();
    Ok(grids)
}

/// March one vertical slice outward and record `|u|` at the flight altitude.
///
/// The slice's transverse axis is height; the domain is centered between the
/// antenna and the flight altitude so both stay clear of the absorber. With
/// a homogeneous medium the slice is azimuth-independent, so the same record
/// serves every azimuth of its base station.
fn run_vertical_slice(
    scenario: &Scenario,
    bs: &BaseStation,
    index: num_complex::Complex64,
    n_steps: usize,
) -> Result<AzimuthSlice> {
    let spacing_bound = max_grid_spacing(scenario.frequency_ghz, DEFAULT_THETA_MAX_DEG);
    let n_z = ((scenario.vertical_extent_m / spacing_bound).ceil() as usize).next_power_of_two();
    let dz_grid = scenario.vertical_extent_m / n_z as f64;
    let grid = TransverseGrid::line(n_z, dz_grid);
    let domain_center = 0.5 * (bs.antenna_height_m + scenario.altitude_m);
    let source = gaussian_beam(
        &SourceSpec {
            beam_waist_m: bs.beam_waist_m,
            offset_x_m: bs.antenna_height_m - domain_center,
            offset_y_m: 0.0,
            height_above_ground_m: bs.antenna_height_m,
        },
        grid,
    )?;
    let config = PropagationConfig {
        frequency_ghz: scenario.frequency_ghz,
        step_dz_m: scenario.range_step_m,
        n_steps,
        absorber_width: scenario.absorber_width,
        index: IndexProfile::Uniform(index),
    };
    let mut solver = SplitStepSolver::new(grid, &config)?;
    let probe = altitude_probe(&grid, scenario.altitude_m - domain_center);
    let mut field = source;
    let mut amplitudes = Vec::with_capacity(n_steps + 1);
    amplitudes.push(probe.sample(&field));
    for _ in 0..n_steps {
        solver.step(&mut field, &config.index)?;
        amplitudes.push(probe.sample(&field));
    }
    Ok(AzimuthSlice { amplitudes })
}

/// Linear interpolation weights picking the flight altitude out of a slice.
struct AltitudeProbe {
    lo: usize,
    hi: usize,
    w_hi: f64,
}

fn altitude_probe(grid: &TransverseGrid, altitude_offset_m: f64) -> AltitudeProbe {
    let f = altitude_offset_m / grid.dx + (grid.nx / 2) as f64;
    let lo = (f.floor().max(0.0) as usize).min(grid.nx - 1);
    let hi = (lo + 1).min(grid.nx - 1);
    AltitudeProbe {
        lo,
        hi,
        w_hi: (f - lo as f64).clamp(0.0, 1.0),
    }
}

impl AltitudeProbe {
    fn sample(&self, field: &ComplexField) -> f64 {
        let a = field.values[self.lo].norm();
        let b = field.values[self.hi].norm();
        a + (b - a) * self.w_hi
    }
}

/// Bilinear interpolation of slice amplitudes in polar coordinates around a
/// base station. At exact slice sample points this returns the recorded
/// value; ranges outside the sampled fan clamp to the nearest sample.
fn polar_interpolate(
    fan: &[AzimuthSlice],
    range_step_m: f64,
    center: [f64; 2],
    x: f64,
    y: f64,
) -> f64 {
    let n_az = fan.len();
    let dx = x - center[0];
    let dy = y - center[1];
    let rho = (dx * dx + dy * dy).sqrt();
    let mut phi = dy.atan2(dx);
    if phi < 0.0 {
        phi += 2.0 * std::f64::consts::PI;
    }
    let az = phi / (2.0 * std::f64::consts::PI) * n_az as f64;
    let a0 = (az.floor() as usize) % n_az;
    let a1 = (a0 + 1) % n_az;
    let wa = az - az.floor();
    let sample = |slice: &AzimuthSlice| -> f64 {
        let f = rho / range_step_m;
        let lo = (f.floor() as usize).min(slice.amplitudes.len() - 1);
        let hi = (lo + 1).min(slice.amplitudes.len() - 1);
        let w = (f - lo as f64).clamp(0.0, 1.0);
        slice.amplitudes[lo] * (1.0 - w) + slice.amplitudes[hi] * w
    };
    sample(&fan[a0]) * (1.0 - wa) + sample(&fan[a1]) * wa
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Write a map to the binary container: magic, schema version, JSON header,
/// then per-source grids as little-endian f64 (lossless round trip).
pub fn save_map(map: &RssMap, path: &Path) -> Result<()> {
    let header = serde_json::to_vec(&map.meta)
        .map_err(|e| MapError::Format(format!("header serialization failed: {e}")))?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(MAP_MAGIC)?;
    file.write_all(&MAP_SCHEMA_VERSION.to_le_bytes())?;
    file.write_all(&(header.len() as u32).to_le_bytes())?;
    file.write_all(&header)?;
    for grid in &map.per_source {
        for &v in grid {
            file.write_all(&v.to_le_bytes())?;
        }
    }
    file.flush()?;
    Ok(())
}

/// Load a map written by [`save_map`]. A corrupted or truncated container
/// fails without yielding a partial map.
pub fn load_map(path: &Path) -> Result<RssMap> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic)?;
    if &magic != MAP_MAGIC {
        return Err(MapError::Format("not a map container (bad magic)".into()));
    }
    let mut word = [0u8; 4];
    file.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != MAP_SCHEMA_VERSION {
        return Err(MapError::Format(format!(
            "unsupported map schema version {version}, expected {MAP_SCHEMA_VERSION}"
        )));
    }
    file.read_exact(&mut word)?;
    let header_len = u32::from_le_bytes(word) as usize;
    let mut header = vec![0u8; header_len];
    file.read_exact(&mut header)?;
    let meta: MapMeta = serde_json::from_slice(&header)
        .map_err(|e| MapError::Format(format!("corrupted map header: {e}")))?;
    if meta.schema_version != MAP_SCHEMA_VERSION {
        return Err(MapError::Format(format!(
            "header schema version {} disagrees with container {MAP_SCHEMA_VERSION}",
            meta.schema_version
        )));
    }
    let nodes = meta.nx * meta.ny;
    let mut per_source = Vec::with_capacity(meta.n_sources);
    let mut buf = vec![0u8; nodes * 8];
    for _ in 0..meta.n_sources {
        file.read_exact(&mut buf)?;
        let grid: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        per_source.push(grid);
    }
    // Anything left over means the payload does not match the header.
    let mut trailing = [0u8; 1];
    if file.read(&mut trailing)? != 0 {
        return Err(MapError::Format(
            "map payload longer than the header describes".into(),
        ));
    }
    Ok(RssMap { meta, per_source })
}
