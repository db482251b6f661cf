//! Jost data at the vertex and a recorded trajectory with its Wronskian drift.
use num_complex::Complex64;
use star_trace::jost::{jost_at_origin, JostOptions};
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    let sp = StarPotential::new(vec![EdgePotential::sech2(-2.0, 1.0, 0.0), EdgePotential::exponential(-1.0, 1.5)])?;
    let opts = JostOptions { record: true, ..JostOptions::default() };
    for k in [0.5, 2.0, 10.0] {
        for j in 0..sp.n() {
            let d = jost_at_origin(&sp, j, Complex64::new(k, 0.0), &opts)?;
            let drift = d
                .wronskians()
                .unwrap()
                .iter()
                .map(|w| (w - Complex64::new(0.0, 2.0 * k)).norm())
                .fold(0.0, f64::max);
            println!("k = {k:5.1}  edge {j}: θ(0) = {:.10}  θ'(0) = {:.10}  Wronskian drift {drift:.1e}", d.theta0, d.dtheta0);
        }
    }
    let d = jost_at_origin(&sp, 0, Complex64::new(1.0, 0.0), &opts)?;
    d.write_trajectory_csv(std::io::stdout().lock())?;
    Ok(())
}
