//! Decay rate of the truncated high-energy expansion along rays in the upper half-plane.
use star_trace::asymptotics::{l_recursive, CoefficientOptions};
use star_trace::traceform::{remainder_decay, DecayOptions};
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    let sp = StarPotential::new(vec![
        EdgePotential::exponential(-3.0, 1.0),
        EdgePotential::exponential(-1.0, 2.0),
        EdgePotential::exponential(0.5, 1.5),
    ])?;
    let table = l_recursive(&sp, &CoefficientOptions::default())?;
    for m in 1..=3 {
        for arg in [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2] {
            let r = remainder_decay(&sp, &table, m, arg, &DecayOptions::default())?;
            println!("M = {m}, arg = {arg:.3}: slope {:.3} (expected {})", r.slope.unwrap_or(f64::NAN), r.expected);
        }
    }
    Ok(())
}
