//! Negative eigenvalues from zeros of the determinant, checked against a finite-difference model.
use star_trace::spectrum::{find_eigenvalues, oracle_eigenvalues, SpectrumOptions};
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    let cases = [
        ("identical −6 sech², n = 3", StarPotential::uniform(EdgePotential::sech2(-6.0, 1.0, 0.0), 3)?),
        (
            "mixed wells",
            StarPotential::new(vec![EdgePotential::exponential(-4.0, 1.0), EdgePotential::gaussian(-1.5, 2.0, 0.0)])?,
        ),
    ];
    for (name, sp) in cases {
        let spectrum = find_eigenvalues(&sp, &SpectrumOptions::default())?;
        let oracle = oracle_eigenvalues(&sp, 0.01, 40.0)?;
        println!("{name}: resonance multiplicity {}", spectrum.resonance_multiplicity);
        for e in &spectrum.eigenvalues {
            println!("  λ = {:+.10}  multiplicity {}", e.lambda, e.multiplicity);
        }
        for e in &oracle {
            println!("  finite differences: λ = {:+.10}  multiplicity {}", e.lambda, e.multiplicity);
        }
    }
    Ok(())
}
