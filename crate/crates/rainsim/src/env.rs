//! Deterministic grid MDP over a SIR map.
//!
//! The vehicle flies at fixed altitude on the map's node lattice. Each of
//! the four actions moves one step length along ±x or ±y; transitions are
//! deterministic. The per-step reward is
//!
//! ```text
//! R(q, b) = -1 + μ · min(SIR(q, b), cap)
//! ```
//!
//! with `b` the best (argmax) association at the new position and the SIR
//! taken linear, capped at a configurable ceiling (default +60 dB) so
//! interference-free nodes cannot produce unbounded rewards. An episode ends
//! on reaching the destination tolerance disc, leaving the airspace
//! footprint, or hitting the step cap. The terminal bonus for reaching the
//! destination and the out-of-boundary penalty are *not* part of the
//! environment reward; the learner injects them when it builds bootstrap
//! targets, and episode logs add them for reporting.
//!
//! The minimum-SIR requirement is reported per path (violation counts) and
//! may optionally be enforced as an extra reward penalty, which is off by
//! default.

use thiserror::Error;

use crate::radiomap::SirMap;
use crate::rng::Rng;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("domain error: {0}")]
    Domain(String),
}

type Result<T> = std::result::Result<T, EnvError>;

/// Vehicle position on the flight plane, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    pub x_m: f64,
    pub y_m: f64,
}

impl UavState {
    pub fn distance_to(&self, other: [f64; 2]) -> f64 {
        ((self.x_m - other[0]).powi(2) + (self.y_m - other[1]).powi(2)).sqrt()
    }
}

/// The four unit flight directions, indexed 0..4: +x, -x, +y, -y.
pub const ACTIONS: [[f64; 2]; 4] = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];

/// Why an episode ended (or [`Terminal::None`] if it has not).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    None,
    /// Within the destination tolerance disc.
    Destination,
    /// Left the airspace footprint.
    OutOfBounds,
    /// Step budget exhausted (truncation: targets keep bootstrapping).
    StepCap,
}

/// Episode shape: destination, kinematics, reward weights, and caps.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpisodeConfig {
    pub destination_m: [f64; 2],
    /// Fixed start; `None` draws uniformly over the lattice each episode.
    pub start_m: Option<[f64; 2]>,
    /// Distance travelled per action (the lattice pitch), metres.
    pub step_length_m: f64,
    /// Destination tolerance distance, metres.
    pub d_tol_m: f64,
    /// Step cap per episode.
    pub max_steps: usize,
    /// SIR weight in the reward.
    pub mu: f64,
    /// Terminal bonus injected into targets on reaching the destination.
    pub r_des: f64,
    /// Penalty injected into targets on leaving the footprint.
    pub p_ob: f64,
    /// Minimum acceptable SIR for reporting, dB.
    pub sir_min_db: f64,
    /// Reward-side cap on the linear SIR, dB.
    pub sir_cap_db: f64,
    /// Optional extra penalty subtracted whenever the sampled SIR falls
    /// below `sir_min_db`. Disabled by default.
    pub sir_min_penalty: Option<f64>,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            destination_m: [850.0, 500.0],
            start_m: None,
            step_length_m: 50.0,
            d_tol_m: 10.0,
            max_steps: 300,
            mu: 10.0 / 43.0,
            r_des: 2000.0,
            p_ob: 10_000.0,
            sir_min_db: 10.0,
            sir_cap_db: 60.0,
            sir_min_penalty: None,
        }
    }
}

impl EpisodeConfig {
    pub fn sir_cap_linear(&self) -> f64 {
        10f64.powf(self.sir_cap_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_tol_m > 0.0) {
            return Err(EnvError::Domain("d_tol must be positive".into()));
        }
        if !(self.step_length_m > 0.0) {
            return Err(EnvError::Domain("step length must be positive".into()));
        }
        if !(self.mu >= 0.0) {
            return Err(EnvError::Domain("mu must be non-negative".into()));
        }
        Ok(())
    }
}

/// Result of one environment transition.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub next: UavState,
    pub reward: f64,
    pub terminal: Terminal,
    /// SIR at the new position, dB (absent when the move left the grid).
    pub sir_db: Option<f64>,
    /// Serving cell at the new position.
    pub association: Option<usize>,
}

/// Path statistics per the trajectory objective: step count `N`, total and
/// extreme SIR over the nodes after the start, and minimum-SIR violations.
#[derive(Debug, Clone, Copy)]
pub struct PathMetrics {
    pub n_steps: usize,
    pub total_sir_linear: f64,
    pub mean_sir_db: f64,
    pub min_sir_db: f64,
    pub violations: usize,
    /// `-N + μ Σ SIR` under the configured weight.
    pub objective: f64,
}

/// The MDP over one SIR map.
pub struct Environment<'a> {
    pub config: EpisodeConfig,
    map: &'a SirMap,
    footprint_min: [f64; 2],
    footprint_max: [f64; 2],
}

impl<'a> Environment<'a> {
    pub fn new(config: EpisodeConfig, map: &'a SirMap) -> Result<Self> {
        config.validate()?;
        let meta = &map.meta;
        let footprint_min = meta.origin_m;
        let footprint_max = [
            meta.origin_m[0] + (meta.nx - 1) as f64 * meta.resolution_m,
            meta.origin_m[1] + (meta.ny - 1) as f64 * meta.resolution_m,
        ];
        let inside = config.destination_m[0] >= footprint_min[0]
            && config.destination_m[0] <= footprint_max[0]
            && config.destination_m[1] >= footprint_min[1]
            && config.destination_m[1] <= footprint_max[1];
        if !inside {
            return Err(EnvError::Domain(format!(
                "destination ({}, {}) outside the map footprint",
                config.destination_m[0], config.destination_m[1]
            )));
        }
        Ok(Environment { config, map, footprint_min, footprint_max })
    }

    pub fn map(&self) -> &SirMap {
        self.map
    }

    pub fn footprint(&self) -> ([f64; 2], [f64; 2]) {
        (self.footprint_min, self.footprint_max)
    }

    pub fn contains(&self, state: &UavState) -> bool {
        state.x_m >= self.footprint_min[0]
            && state.x_m <= self.footprint_max[0]
            && state.y_m >= self.footprint_min[1]
            && state.y_m <= self.footprint_max[1]
    }

    /// Position normalized to [-1, 1]² for the function approximator.
    pub fn normalize(&self, state: &UavState) -> [f64; 2] {
        [
            2.0 * (state.x_m - self.footprint_min[0])
                / (self.footprint_max[0] - self.footprint_min[0])
                - 1.0,
            2.0 * (state.y_m - self.footprint_min[1])
                / (self.footprint_max[1] - self.footprint_min[1])
                - 1.0,
        ]
    }

    /// Start state: the fixed start when configured, otherwise a uniform
    /// draw over the lattice nodes, rejecting any start already inside the
    /// destination tolerance disc.
    pub fn reset(&self, rng: &mut Rng) -> UavState {
        if let Some(start) = self.config.start_m {
            return UavState { x_m: start[0], y_m: start[1] };
        }
        let meta = &self.map.meta;
        loop {
            let i = rng.index(meta.nx);
            let j = rng.index(meta.ny);
            let (x, y) = meta.node_coords(i, j);
            let state = UavState { x_m: x, y_m: y };
            if state.distance_to(self.config.destination_m) >= self.config.d_tol_m {
                return state;
            }
        }
    }

    /// Best-association SIR sample at a position (nearest lattice node).
    pub fn sir_at(&self, state: &UavState) -> Option<(f64, usize)> {
        let (i, j) = self.map.meta.nearest_node(state.x_m, state.y_m)?;
        let idx = self.map.node_index(i, j);
        Some((self.map.sir_linear[idx], self.map.association[idx] as usize))
    }

    /// One deterministic transition. `steps_taken` counts completed steps of
    /// the running episode and feeds the step-cap exit.
    pub fn step(&self, state: &UavState, action: usize, steps_taken: usize) -> StepOutcome {
        assert!(action < ACTIONS.len(), "action index out of range");
        let dir = ACTIONS[action];
        let next = UavState {
            x_m: state.x_m + dir[0] * self.config.step_length_m,
            y_m: state.y_m + dir[1] * self.config.step_length_m,
        };
        if !self.contains(&next) {
            // No SIR sample exists outside the grid; the boundary penalty
            // itself is injected at target construction.
            return StepOutcome {
                next,
                reward: -1.0,
                terminal: Terminal::OutOfBounds,
                sir_db: None,
                association: None,
            };
        }
        let (sir_linear, association) =
            self.sir_at(&next).expect("in-footprint state has a nearest node");
        let capped = sir_linear.min(self.config.sir_cap_linear());
        let mut reward = -1.0 + self.config.mu * capped;
        let sir_db = 10.0 * sir_linear.max(1e-300).log10();
        if let Some(penalty) = self.config.sir_min_penalty {
            if sir_db < self.config.sir_min_db {
                reward -= penalty;
            }
        }
        let terminal = if next.distance_to(self.config.destination_m) < self.config.d_tol_m {
            Terminal::Destination
        } else if steps_taken + 1 > self.config.max_steps {
            Terminal::StepCap
        } else {
            Terminal::None
        };
        StepOutcome {
            next,
            reward,
            terminal,
            sir_db: Some(sir_db),
            association: Some(association),
        }
    }

    /// Greedy Manhattan walk to the destination under the same four-action
    /// kinematics: step along the axis with the larger remaining offset
    /// (x wins ties) until inside the tolerance disc.
    pub fn shortest_path_baseline(&self, start: UavState) -> Vec<UavState> {
        let mut path = vec![start];
        let mut q = start;
        let dest = self.config.destination_m;
        while q.distance_to(dest) >= self.config.d_tol_m && path.len() <= self.config.max_steps {
            let dx = dest[0] - q.x_m;
            let dy = dest[1] - q.y_m;
            let step = self.config.step_length_m;
            if dx.abs() >= dy.abs() {
                q.x_m += step * dx.signum();
            } else {
                q.y_m += step * dy.signum();
            }
            path.push(q);
        }
        path
    }

    /// Metrics of a node path. SIR totals follow the trajectory objective:
    /// nodes after the start are counted, so a single-node path scores zero.
    pub fn evaluate_path(&self, path: &[UavState]) -> Result<PathMetrics> {
        let n_steps = path.len().saturating_sub(1);
        let mut total = 0.0;
        let mut min_db = f64::INFINITY;
        let mut sum_db = 0.0;
        let mut violations = 0;
        for state in path.iter().skip(1) {
            let (sir, _) = self.sir_at(state).ok_or_else(|| {
                EnvError::Domain(format!(
                    "path node ({}, {}) outside the grid",
                    state.x_m, state.y_m
                ))
            })?;
            let db = 10.0 * sir.max(1e-300).log10();
            total += sir;
            sum_db += db;
            min_db = min_db.min(db);
            if db < self.config.sir_min_db {
                violations += 1;
            }
        }
        Ok(PathMetrics {
            n_steps,
            total_sir_linear: total,
            mean_sir_db: if n_steps == 0 { 0.0 } else { sum_db / n_steps as f64 },
            min_sir_db: if n_steps == 0 { 0.0 } else { min_db },
            violations,
            objective: -(n_steps as f64) + self.config.mu * total,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiomap::{build_rss_map, Scenario, SirMap, SyntheticSource};

    fn test_map() -> SirMap {
        let scenario = Scenario {
            bounds_min_m: [0.0, 0.0, 0.0],
            bounds_max_m: [950.0, 950.0, 200.0],
            altitude_m: 100.0,
            resolution_m: 50.0,
            synthetic_sources: vec![
                SyntheticSource { center_m: [150.0, 500.0], sigma_m: 250.0, amplitude: 1.0 },
                SyntheticSource { center_m: [850.0, 500.0], sigma_m: 250.0, amplitude: 1.0 },
                SyntheticSource { center_m: [500.0, 900.0], sigma_m: 180.0, amplitude: 1.0 },
            ],
            synthetic_floor: 2e-3,
            ..Default::default()
        };
        let rss = build_rss_map(&scenario).unwrap();
        SirMap::from_rss(&rss).unwrap()
    }

    /// Uniform two-source map where every node has SIR exactly 1.
    fn symmetric_map() -> SirMap {
        let scenario = Scenario {
            bounds_min_m: [0.0, 0.0, 0.0],
            bounds_max_m: [950.0, 950.0, 200.0],
            altitude_m: 100.0,
            resolution_m: 50.0,
            synthetic_sources: vec![
                SyntheticSource { center_m: [0.0, 0.0], sigma_m: 1.0, amplitude: 0.0 },
                SyntheticSource { center_m: [950.0, 950.0], sigma_m: 1.0, amplitude: 0.0 },
            ],
            synthetic_floor: 1.0,
            ..Default::default()
        };
        let rss = build_rss_map(&scenario).unwrap();
        SirMap::from_rss(&rss).unwrap()
    }

    #[test]
    fn fixed_start_honored() {
        let map = test_map();
        let config = EpisodeConfig { start_m: Some([100.0, 100.0]), ..Default::default() };
        let env = Environment::new(config, &map).unwrap();
        let mut rng = Rng::new(1);
        let s = env.reset(&mut rng);
        assert_eq!((s.x_m, s.y_m), (100.0, 100.0));
    }

    #[test]
    fn random_resets_uniform_by_chi_square() {
        // 10^4 resets binned 4x4 over the footprint; chi-square with 15
        // degrees of freedom at the 1% level is 30.578.
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let mut rng = Rng::new(7);
        let n = 10_000;
        let mut bins = [0usize; 16];
        for _ in 0..n {
            let s = env.reset(&mut rng);
            let bx = ((s.x_m / 950.0) * 4.0).min(3.999) as usize;
            let by = ((s.y_m / 950.0) * 4.0).min(3.999) as usize;
            bins[by * 4 + bx] += 1;
        }
        let expected = n as f64 / 16.0;
        let chi2: f64 = bins.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 30.578, "chi-square {chi2:.2}, bins {bins:?}");
    }

    #[test]
    fn resets_never_start_at_destination() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let mut rng = Rng::new(3);
        for _ in 0..5_000 {
            let s = env.reset(&mut rng);
            assert!(s.distance_to(env.config.destination_m) >= env.config.d_tol_m);
        }
    }

    #[test]
    fn zero_mu_gives_unit_step_cost() {
        let map = test_map();
        let config = EpisodeConfig { mu: 0.0, ..Default::default() };
        let env = Environment::new(config, &map).unwrap();
        let s = UavState { x_m: 500.0, y_m: 200.0 };
        for a in 0..4 {
            let out = env.step(&s, a, 0);
            assert_eq!(out.reward, -1.0);
        }
    }

    #[test]
    fn symmetric_node_reward_matches_weight() {
        // Equal powers give SIR = 1 everywhere; with mu = 10/43 the reward
        // is -1 + 10/43 = -0.76744...
        let map = symmetric_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let s = UavState { x_m: 400.0, y_m: 400.0 };
        let out = env.step(&s, 0, 0);
        assert!((out.reward - (-1.0 + 10.0 / 43.0)).abs() < 1e-12);
        assert!((out.reward - (-0.7674)).abs() < 1e-4);
    }

    #[test]
    fn floored_interference_hits_the_cap() {
        // A lone dominant source with zero competition drives the SIR to
        // the floor-limited ceiling; the reward uses the +60 dB cap.
        let scenario = Scenario {
            bounds_min_m: [0.0, 0.0, 0.0],
            bounds_max_m: [950.0, 950.0, 200.0],
            altitude_m: 100.0,
            resolution_m: 50.0,
            synthetic_sources: vec![
                SyntheticSource { center_m: [100.0, 100.0], sigma_m: 100.0, amplitude: 1.0 },
                SyntheticSource { center_m: [900.0, 900.0], sigma_m: 1.0, amplitude: 1e-14 },
            ],
            synthetic_floor: 0.0,
            ..Default::default()
        };
        let rss = build_rss_map(&scenario).unwrap();
        let map = SirMap::from_rss(&rss).unwrap();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let near_source = UavState { x_m: 150.0, y_m: 100.0 };
        let out = env.step(&near_source, 1, 0); // step to (100, 100)
        let expected = -1.0 + (10.0 / 43.0) * 1e6; // cap = 60 dB = 1e6 linear
        assert!((out.reward - expected).abs() / expected < 1e-12, "reward {}", out.reward);
    }

    #[test]
    fn transitions_deterministic() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let s = UavState { x_m: 300.0, y_m: 450.0 };
        for a in 0..4 {
            let o1 = env.step(&s, a, 5);
            let o2 = env.step(&s, a, 5);
            assert_eq!(o1.next, o2.next);
            assert_eq!(o1.reward.to_bits(), o2.reward.to_bits());
            assert_eq!(o1.terminal, o2.terminal);
        }
    }

    #[test]
    fn reward_bounds_hold() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let cap = env.config.sir_cap_linear();
        let mut rng = Rng::new(11);
        for _ in 0..2_000 {
            let s = env.reset(&mut rng);
            let out = env.step(&s, rng.index(4), 0);
            if out.terminal != Terminal::OutOfBounds {
                assert!(out.reward >= -1.0 - 1e-12);
                assert!(out.reward <= -1.0 + env.config.mu * cap + 1e-9);
            }
        }
    }

    #[test]
    fn terminal_classification_destination() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        // One step east of the destination node (850, 500).
        let s = UavState { x_m: 800.0, y_m: 500.0 };
        let out = env.step(&s, 0, 0);
        assert_eq!(out.terminal, Terminal::Destination);
        assert_eq!(out.next, UavState { x_m: 850.0, y_m: 500.0 });
    }

    #[test]
    fn terminal_classification_out_of_bounds() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let s = UavState { x_m: 0.0, y_m: 500.0 };
        let out = env.step(&s, 1, 0); // -x across the west edge
        assert_eq!(out.terminal, Terminal::OutOfBounds);
        assert_eq!(out.sir_db, None);
        assert_eq!(out.reward, -1.0);
    }

    #[test]
    fn terminal_classification_step_cap() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let s = UavState { x_m: 500.0, y_m: 200.0 };
        let out = env.step(&s, 0, env.config.max_steps - 1);
        assert_eq!(out.terminal, Terminal::None);
        let out = env.step(&s, 0, env.config.max_steps);
        assert_eq!(out.terminal, Terminal::StepCap);
    }

    #[test]
    fn baseline_walks_manhattan() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        // Ten steps east of the destination: exactly ten -x actions.
        let start = UavState { x_m: 850.0 + 10.0 * 50.0, y_m: 500.0 };
        let path = env.shortest_path_baseline(start);
        assert_eq!(path.len(), 11);
        for w in path.windows(2) {
            assert_eq!(w[1].x_m - w[0].x_m, -50.0);
            assert_eq!(w[1].y_m, w[0].y_m);
        }
        // Start inside the tolerance disc: single-node path.
        let at_dest = UavState { x_m: 850.0, y_m: 500.0 };
        assert_eq!(env.shortest_path_baseline(at_dest).len(), 1);
    }

    #[test]
    fn baseline_length_is_manhattan_lower_bound() {
        let map = test_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        let mut rng = Rng::new(23);
        for _ in 0..200 {
            let start = env.reset(&mut rng);
            let path = env.shortest_path_baseline(start);
            let dest = env.config.destination_m;
            let manhattan = ((start.x_m - dest[0]).abs() + (start.y_m - dest[1]).abs())
                / env.config.step_length_m;
            assert_eq!(path.len() - 1, manhattan.round() as usize);
        }
    }

    #[test]
    fn evaluate_path_examples() {
        let map = symmetric_map();
        let env = Environment::new(EpisodeConfig::default(), &map).unwrap();
        // Zero-length path.
        let single = [UavState { x_m: 100.0, y_m: 100.0 }];
        let m = env.evaluate_path(&single).unwrap();
        assert_eq!(m.n_steps, 0);
        assert_eq!(m.total_sir_linear, 0.0);
        assert_eq!(m.violations, 0);
        // All nodes at SIR = 1 (0 dB) with sir_min 10 dB: every step counts
        // as a violation, and the objective matches its definition.
        let path: Vec<UavState> =
            (0..6).map(|k| UavState { x_m: 100.0 + 50.0 * k as f64, y_m: 100.0 }).collect();
        let m = env.evaluate_path(&path).unwrap();
        assert_eq!(m.n_steps, 5);
        assert_eq!(m.violations, 5);
        assert!((m.total_sir_linear - 5.0).abs() < 1e-12);
        assert!((m.objective - (-5.0 + env.config.mu * 5.0)).abs() < 1e-12);
        assert!((m.mean_sir_db - 0.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_destination_rejected() {
        let map = test_map();
        let config = EpisodeConfig { destination_m: [5000.0, 0.0], ..Default::default() };
        assert!(Environment::new(config, &map).is_err());
    }
}
