//! High-energy expansion coefficients of log D by recursion and by explicit formulas.
use star_trace::asymptotics::{g_polynomials, l_closed_form, l_recursive, CoefficientOptions};
use star_trace::{EdgePotential, StarPotential};

fn main() -> star_trace::Result<()> {
    for (m, g) in g_polynomials(4).iter().enumerate() {
        let terms: Vec<String> = g.terms().map(|(jet, c)| format!("{c}·{jet:?}")).collect();
        println!("g_{} = {}", m + 1, terms.join(" + "));
    }
    let sp = StarPotential::new(vec![
        EdgePotential::gaussian(-1.5, 1.0, 0.0),
        EdgePotential::gaussian(-1.5, 1.0, 0.0),
        EdgePotential::sech2(-1.5, 1.0, 0.0),
        EdgePotential::sech2(-1.5, 1.0, 0.0),
    ])?;
    let table = l_recursive(&sp, &CoefficientOptions::default())?;
    let closed = l_closed_form(&sp)?;
    for m in 1..=table.order {
        let explicit = closed.get(m - 1).map(|c| format!("{c:+.12}")).unwrap_or_default();
        println!("L_{m} = {:+.12}  {explicit}", table.get(m));
    }
    Ok(())
}
