//! Closest-point decoding: exact nearest-lattice-point searches for each
//! family, validated against exhaustive enumeration, with timing that is
//! independent of any constellation built on the lattice.
//!
//! ```bash
//! cargo run --release -p voronoi-shaping --example closest_point
//! ```

use rand::{Rng, SeedableRng};
use std::time::Instant;
use voronoi_shaping::cpa::{closest_point, closest_point_bruteforce};
use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for (family, n) in [
        (LatticeFamily::Cubic, 4),
        (LatticeFamily::A2, 2),
        (LatticeFamily::D4, 4),
        (LatticeFamily::E8, 8),
    ] {
        let spec = LatticeSpec::new(family, n).unwrap();
        let points: Vec<Vec<f64>> = (0..2000)
            .map(|_| {
                let coeffs: Vec<f64> = (0..spec.rank()).map(|_| rng.gen()).collect();
                spec.lattice_point_f64(&coeffs)
            })
            .collect();

        let started = Instant::now();
        let mut matches = 0;
        for w in &points {
            let fast = closest_point(&spec, w);
            let oracle = closest_point_bruteforce(&spec, w).unwrap();
            let df: f64 = fast.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
            let db: f64 = oracle.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
            if (df - db).abs() <= 1e-9 * db.max(1.0) {
                matches += 1;
            }
        }
        println!(
            "{family}: {matches}/{} match the exhaustive oracle ({:.1} us per pair)",
            points.len(),
            started.elapsed().as_micros() as f64 / points.len() as f64
        );
    }

    // The Leech decoder: correct inside the packing radius by construction.
    let spec = LatticeSpec::new(LatticeFamily::Leech24, 24).unwrap();
    let packing = spec.dmin2_internal().sqrt() / 2.0;
    let mut hits = 0;
    let trials = 2000;
    let started = Instant::now();
    for _ in 0..trials {
        let z: Vec<i64> = (0..24).map(|_| rng.gen_range(-4..=4)).collect();
        let lattice_point = spec.lattice_point(&z).unwrap();
        let mut noise: Vec<f64> = (0..24).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
        let radius = packing * rng.gen_range(0.1..0.999);
        let w: Vec<f64> = lattice_point
            .iter()
            .zip(&noise)
            .map(|(a, b)| a + b * radius / norm)
            .collect();
        if closest_point(&spec, &w) == lattice_point {
            hits += 1;
        }
    }
    println!(
        "leech24: {hits}/{trials} noisy points inside the packing radius decoded exactly ({:.1} us each)",
        started.elapsed().as_micros() as f64 / trials as f64
    );
}
