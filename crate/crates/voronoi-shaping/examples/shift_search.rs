//! Shift-vector selection: iterative energy optimisation against random
//! shifts, and how the penalty of skipping the optimisation shrinks as
//! constellations grow.
//!
//! ```bash
//! cargo run --release -p voronoi-shaping --example shift_search
//! ```

use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};
use voronoi_shaping::shaping::{estimate_mu, optimize_shift, OptimizeParams};

fn main() {
    let spec = LatticeSpec::new(LatticeFamily::D4, 4).unwrap();

    let result = optimize_shift(&spec, 2, &OptimizeParams::default(), 11).unwrap();
    println!(
        "D4, 16 points: optimised energy {:.6} in {} iterations (converged: {})",
        result.energy, result.iterations, result.converged
    );
    println!("energy per accepted iterate: {:?}", result.history);

    println!("\nrelative penalty of a random shift vs the optimised one:");
    for r in [2u32, 4, 8, 16] {
        let est = estimate_mu(&spec, r, 120, 5).unwrap();
        println!(
            "  r = {r:>2} (M = {:>8}): mu = {:.5} +- {:.5}",
            (r as u64).pow(4),
            est.mu,
            est.std_err
        );
    }
    println!("the penalty fades as the point count grows, so large constellations can use random shifts");
}
