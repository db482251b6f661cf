//! Phase jump of the determinant on two edges against the bound-state count.
use star_trace::jost::JostOptions;
use star_trace::pdet::scan;
use star_trace::spectrum::{find_eigenvalues, SpectrumOptions};
use star_trace::traceform::levinson_check;
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    let cases = [
        ("free", StarPotential::free(2)?),
        ("exponential well", StarPotential::uniform(EdgePotential::exponential(-1.0, 1.0), 2)?),
        ("−6 sech²", StarPotential::uniform(EdgePotential::sech2(-6.0, 1.0, 0.0), 2)?),
    ];
    for (name, sp) in cases {
        let spectrum = find_eigenvalues(&sp, &SpectrumOptions::default())?;
        let s = scan(&sp, 1e-3, 100.0, 1000, &JostOptions::default())?;
        let r = levinson_check(&sp, &s, &spectrum)?;
        println!(
            "{name}: N = {}, m = {}, jump {:+.6} vs {:+.6}",
            spectrum.distinct(),
            spectrum.resonance_multiplicity,
            r.jump,
            r.expected
        );
    }
    Ok(())
}
