//! Amplitude and phase of the perturbation determinant on the real axis.
use star_trace::jost::JostOptions;
use star_trace::pdet::{perturbation_determinant, scan};
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    let sp = StarPotential::new(vec![
        EdgePotential::exponential(-3.0, 1.0),
        EdgePotential::exponential(-1.0, 2.0),
        EdgePotential::exponential(0.5, 1.5),
    ])?;
    let opts = JostOptions::default();
    let s = scan(&sp, 0.01, 100.0, 400, &opts)?;
    for i in (0..s.len()).step_by(40) {
        println!("k = {:10.4e}  a = {:.8}  η = {:+.8}", s.k[i], s.a[i], s.eta[i]);
    }
    let mirrored = s.mirrored(&sp, &opts)?;
    let dev = s.d.iter().zip(&mirrored.d).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max);
    println!("max |D(k) − conj D(−k)| = {dev:.2e}");
    let zeta = num_complex::Complex64::new(0.0, 0.75);
    println!("D(0.75i) = {}", perturbation_determinant(&sp, zeta, &opts)?);
    Ok(())
}
