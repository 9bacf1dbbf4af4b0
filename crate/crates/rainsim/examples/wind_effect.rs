//! Wind-blown rain: the drop-tilt correction and its effect on attenuation.
//!
//! ```text
//! cargo run --release --example wind_effect
//! ```

use rainsim::medium::{
    effective_permittivity, plane_wave_attenuation_db_km, terminal_velocity, wind_correction,
    RainParameters, SphereForm,
};

fn main() {
    println!("{:>8} {:>12} {:>10} {:>10}", "D (mm)", "v_term m/s", "F(v_h=2)", "F(v_h=5)");
    for d in [0.5, 1.0, 2.0, 4.0, 5.8, 8.0] {
        println!(
            "{:>8} {:>12.3} {:>10.4} {:>10.4}",
            d,
            terminal_velocity(d).expect("in range"),
            wind_correction(d, 2.0),
            wind_correction(d, 5.0)
        );
    }
    println!();
    println!("{:>8} {:>10} {:>14}", "R mm/h", "v_h m/s", "gamma dB/km");
    for rain_rate in [12.5, 25.0, 50.0] {
        for wind in [0.0, 2.0, 5.0] {
            let params = RainParameters::rain(rain_rate)
                .with_form(SphereForm::ClausiusMossotti)
                .with_wind(wind);
            let eps = effective_permittivity(&params, 4.9).expect("converges");
            println!(
                "{:>8} {:>10} {:>14.6}",
                rain_rate,
                wind,
                plane_wave_attenuation_db_km(eps, 4.9)
            );
        }
    }
    println!("(the printed tilt reweighting divides by F, so wind adds attenuation)");
}
