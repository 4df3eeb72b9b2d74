use std::time::Instant;
use num_bigint::BigUint;
use voronoi_shaping::codec::{Labeling, VoronoiConstellation};
use voronoi_shaping::cpa;
use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};
use rand::{Rng, SeedableRng};

fn main() {
    let spec = LatticeSpec::new(LatticeFamily::Leech24, 24).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let pts: Vec<Vec<f64>> = (0..2000).map(|_| (0..24).map(|_| rng.gen_range(-8.0..8.0)).collect()).collect();
    let t = Instant::now();
    let mut acc = 0.0;
    for p in &pts { acc += cpa::closest_point(&spec, p)[0]; }
    println!("leech cpa: {:.1} us each (acc {acc})", t.elapsed().as_micros() as f64 / pts.len() as f64);

    let vc = VoronoiConstellation::with_random_shift(spec, 2, 4).unwrap();
    let t = Instant::now();
    let mut errs = 0u64;
    for i in 0..2000u32 {
        let k = BigUint::from(i);
        let y = vc.encode(&k).unwrap();
        let bits = Labeling::QuasiGray.index_to_bits(&vc.decode(&y), 2, 24).unwrap();
        errs += bits[0] as u64;
    }
    println!("encode+decode+bits roundtrip: {:.1} us each ({errs})", t.elapsed().as_micros() as f64 / 2000.0);
}
