#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use star_trace::{EdgePotential, StarPotential};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random edge drawn from the smooth families with moderate amplitude.
pub fn random_edge(rng: &mut impl Rng) -> EdgePotential {
    let c = rng.random_range(-3.0..2.0);
    let a = rng.random_range(0.6..2.0);
    let s = rng.random_range(0.0..1.0);
    match rng.random_range(0..5) {
        0 => EdgePotential::exponential(c, a),
        1 => EdgePotential::sech2(c, a, s),
        2 => EdgePotential::gaussian(c, a, s),
        3 => EdgePotential::bump(c, a + 1.0, s),
        _ => EdgePotential::powerlaw(c, rng.random_range(4.0..6.0)),
    }
}

pub fn random_star(rng: &mut impl Rng, n: usize) -> StarPotential {
    StarPotential::new((0..n).map(|_| random_edge(rng)).collect()).unwrap()
}

pub fn exponential_three() -> StarPotential {
    StarPotential::new(vec![
        EdgePotential::exponential(-3.0, 1.0),
        EdgePotential::exponential(-1.0, 2.0),
        EdgePotential::exponential(0.5, 1.5),
    ])
    .unwrap()
}

/// Even edges with equal values at the vertex: `v(0) = −1.5`, `v''(0) = 3`.
pub fn smooth_vertex_four() -> StarPotential {
    StarPotential::new(vec![
        EdgePotential::gaussian(-1.5, 1.0, 0.0),
        EdgePotential::gaussian(-1.5, 1.0, 0.0),
        EdgePotential::sech2(-1.5, 1.0, 0.0),
        EdgePotential::sech2(-1.5, 1.0, 0.0),
    ])
    .unwrap()
}

/// The canonical verification fleet.
pub fn fleet() -> Vec<(&'static str, StarPotential)> {
    vec![
        ("free n=3", StarPotential::free(3).unwrap()),
        ("reflectionless n=2", StarPotential::uniform(EdgePotential::sech2(-2.0, 1.0, 0.0), 2).unwrap()),
        ("identical sech2 n=3", StarPotential::uniform(EdgePotential::sech2(-2.0, 1.0, 0.0), 3).unwrap()),
        ("asymmetric exponential n=3", exponential_three()),
        ("smooth vertex n=4", smooth_vertex_four()),
    ]
}
