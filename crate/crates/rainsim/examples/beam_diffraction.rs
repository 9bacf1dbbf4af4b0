//! Free-space split-step sanity: norm conservation and Gaussian-beam
//! spreading against the analytic diffraction formula.
//!
//! ```text
//! cargo run --release --example beam_diffraction
//! ```

use rainsim::pwe::{gaussian_beam, propagate, PropagationConfig, SourceSpec, TransverseGrid};

fn main() {
    let grid = TransverseGrid::line(4096, 0.05);
    let w0 = 1.0;
    let spec = SourceSpec { beam_waist_m: w0, ..Default::default() };
    let source = gaussian_beam(&spec, grid).expect("resolved waist");
    let mut config = PropagationConfig::free_space(4.9, 10.0, 0);
    let k0 = config.wavenumber();
    let rayleigh = k0 * w0 * w0 / 2.0;
    println!("waist {w0} m, Rayleigh range {rayleigh:.1} m");
    println!(
        "{:>10} {:>12} {:>12} {:>12}",
        "z (m)", "w_pwe (m)", "w_theory (m)", "norm drift"
    );
    for steps in [10usize, 20, 40, 80] {
        config.n_steps = steps;
        let run = propagate(&source, &config, 0).expect("propagates");
        let field = &run.samples[0];
        let z = field.range_m;
        let mut power = 0.0;
        let mut moment = 0.0;
        for (i, v) in field.values.iter().enumerate() {
            let x = grid.x_coord(i);
            power += v.norm_sqr();
            moment += v.norm_sqr() * x * x;
        }
        let w_measured = 2.0 * (moment / power).sqrt();
        let w_theory = w0 * (1.0 + (2.0 * z / (k0 * w0 * w0)).powi(2)).sqrt();
        let drift = (field.l2_norm() - source.l2_norm()).abs() / source.l2_norm();
        println!("{z:>10.0} {w_measured:>12.4} {w_theory:>12.4} {drift:>12.2e}");
    }
}
