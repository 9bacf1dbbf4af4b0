//! Effective permittivity and specific attenuation of rain across rain
//! rates, for both polarizability denominator variants.
//!
//! ```text
//! cargo run --release --example rain_permittivity
//! ```

use rainsim::medium::{
    effective_permittivity, plane_wave_attenuation_db_km, refractive_index, water_permittivity,
    RainParameters, SphereForm,
};

fn main() {
    let frequency_ghz = 4.9;
    let eps_w = water_permittivity(frequency_ghz, 20.0).expect("in range");
    println!(
        "water at {frequency_ghz} GHz, 20 °C: eps = {:.3} - j{:.3}",
        eps_w.real,
        eps_w.loss()
    );
    println!();
    println!(
        "{:>8} {:>12} {:>14} {:>14} {:>12}",
        "R mm/h", "form", "Re(eps_eff)-1", "Im(eps_eff)", "gamma dB/km"
    );
    for rain_rate in [1.0, 12.5, 25.0, 50.0, 100.0] {
        for form in [SphereForm::ClausiusMossotti, SphereForm::AsPrinted] {
            let params = RainParameters::rain(rain_rate).with_form(form);
            let eps = effective_permittivity(&params, frequency_ghz).expect("converges");
            let gamma = plane_wave_attenuation_db_km(eps, frequency_ghz);
            println!(
                "{:>8} {:>12} {:>14.3e} {:>14.3e} {:>12.6}",
                rain_rate,
                match form {
                    SphereForm::ClausiusMossotti => "textbook",
                    SphereForm::AsPrinted => "as-printed",
                },
                eps.real - 1.0,
                eps.imag,
                gamma
            );
        }
    }
    println!();
    let params = RainParameters::rain(25.0).with_form(SphereForm::ClausiusMossotti);
    let n = refractive_index(effective_permittivity(&params, frequency_ghz).unwrap());
    println!("refractive index at R = 25 mm/h: {} + j{:.3e}", n.re, n.im);
    println!("(negative imaginary part = decay under this crate's exp(+jwt) convention)");
}
