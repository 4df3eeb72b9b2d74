use std::time::Instant;
use voronoi_shaping::codec::{Labeling, VoronoiConstellation};
use voronoi_shaping::fiber::*;
use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};

fn main() {
    let t = Instant::now();
    let spec = LatticeSpec::new(LatticeFamily::Leech24, 24).unwrap();
    let vc = VoronoiConstellation::with_random_shift(spec, 2, 4).unwrap();
    let leech = FiberFormat::Vc { vc: &vc, labeling: Labeling::QuasiGray };
    let qam = FiberFormat::DualPolQam { order: 4, n_wavelengths: 6 };
    let mut fiber = FiberConfig::new(10);
    fiber.edfa_noise_figure_db = 20.0;
    let params = SignalParams::new(6, 0.0, 1 << 14);
    let powers = [8.0, 10.0, 12.0, 14.0, 16.0];
    for (name, format) in [("leech", &leech), ("qam4", &qam)] {
        let rows = run_fiber_experiment(format, &params, &fiber, &powers, &[10], 2, 321).unwrap();
        for r in &rows {
            println!("{name} P={:+.0}: errs={} ber={:.3e}", r.power_dbm, r.bit_errors, r.ber);
        }
        let best = optimum_power_trace(&rows);
        println!("{name} optimum: P={:+.0} ber={:.3e}", best[0].power_dbm, best[0].ber);
    }
    println!("wall: {:.0}s", t.elapsed().as_secs_f64());
}
