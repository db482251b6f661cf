//! Trace identities of orders 1/2 … 5/2 and the F/G identity for one configuration.
use star_trace::asymptotics::{l_recursive, CoefficientOptions};
use star_trace::spectrum::{find_eigenvalues, SpectrumOptions};
use star_trace::traceform::{fg_identity, verify_order, BoundaryIntegrals, TraceOptions};
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    let sp = StarPotential::uniform(EdgePotential::sech2(-2.0, 1.0, 0.0), 3)?;
    let spectrum = find_eigenvalues(&sp, &SpectrumOptions::default())?;
    let l = l_recursive(&sp, &CoefficientOptions::default())?.l;
    let opts = TraceOptions::default();
    let ints = BoundaryIntegrals::new(&sp, spectrum.resonance_multiplicity, &l, &opts)?;
    for s in [0.5, 1.0, 1.5, 2.0, 2.5] {
        let r = verify_order(&ints, &spectrum, s, &opts)?;
        println!(
            "s = {s}: {:+.9} + {:+.9} vs {:+.9}  residual {:.1e} (budget {:.1e})",
            r.lhs_spectral, r.lhs_integral, r.rhs, r.residual, r.budget
        );
    }
    for s in [0.1, 0.25, 0.4] {
        let r = fg_identity(&ints, &spectrum, s, &opts)?;
        println!("F/G at s = {s}: {:+.9} vs {:+.9}", r.lhs, r.rhs);
    }
    Ok(())
}
