//! A small fiber transmission: the 24-dimensional constellation against
//! dual-polarization 4-QAM over a noise-loaded multi-span link, swept in
//! launch power.
//!
//! The full-size sweep lives behind `voronoi-shaping fiber --config
//! configs/fiber_desk_leech24.cfg`; this example runs a reduced frame so it
//! finishes in about a minute.
//!
//! ```bash
//! cargo run --release -p voronoi-shaping --example fiber_link
//! ```

use voronoi_shaping::codec::{Labeling, VoronoiConstellation};
use voronoi_shaping::fiber::{
    optimum_power_trace, run_fiber_experiment, FiberConfig, FiberFormat, SignalParams,
};
use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};

fn main() {
    let spec = LatticeSpec::new(LatticeFamily::Leech24, 24).unwrap();
    let vc = VoronoiConstellation::with_random_shift(spec, 2, 4).unwrap();
    let leech = FiberFormat::Vc {
        vc: &vc,
        labeling: Labeling::QuasiGray,
    };
    let qam = FiberFormat::DualPolQam {
        order: 4,
        n_wavelengths: 6,
    };

    // Ten 80 km spans with noise-loaded amplifiers so error rates are
    // visible at this frame size.
    let mut fiber = FiberConfig::new(10);
    fiber.edfa_noise_figure_db = 20.0;
    let params = SignalParams::new(6, 0.0, 1 << 11);
    let powers = [8.0, 10.0, 12.0, 14.0];

    for (name, format) in [("leech24 r=2", &leech), ("dual-pol 4-QAM", &qam)] {
        let rows =
            run_fiber_experiment(format, &params, &fiber, &powers, &[10], 1, 77).unwrap();
        println!("{name}:");
        for row in &rows {
            println!(
                "  P = {:+5.1} dBm: BER {:.3e} ({} bit errors)",
                row.power_dbm, row.ber, row.bit_errors
            );
        }
        let best = optimum_power_trace(&rows)[0];
        println!("  optimum: {:+.1} dBm, BER {:.3e}\n", best.power_dbm, best.ber);
    }
    println!("error rate falls with power until the Kerr nonlinearity takes over");
}
