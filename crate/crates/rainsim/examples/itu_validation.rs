//! Solver-extracted rain attenuation against the ITU-R power law.
//!
//! Runs the 2-D split-step extraction at 12.5 mm/h over 10/20/30 GHz and
//! prints the comparison table. The quasi-static effective medium captures
//! absorption only, so it sits well below the empirical power law at these
//! frequencies; the table quantifies the gap.
//!
//! ```text
//! cargo run --release --example itu_validation
//! ```

use rainsim::medium::{RainParameters, SphereForm};
use rainsim::validation::{compare_models, PweSettings};

fn main() {
    let settings = PweSettings {
        rain: RainParameters::rain(12.5).with_form(SphereForm::ClausiusMossotti),
        ..Default::default()
    };
    let rows = compare_models(12.5, &[10.0, 20.0, 30.0], &settings).expect("solver runs");
    println!(
        "{:>8} {:>14} {:>14} {:>10}",
        "f (GHz)", "ITU (dB/km)", "PWE (dB/km)", "rel err"
    );
    for row in rows {
        println!(
            "{:>8} {:>14.4} {:>14.4} {:>10.3}",
            row.frequency_ghz, row.itu_db_km, row.pwe_db_km, row.relative_error
        );
    }
}
