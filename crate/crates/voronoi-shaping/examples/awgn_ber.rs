//! Gaussian-channel error rates: an 8-dimensional constellation against
//! the square QAM of the same spectral efficiency, with both detectors and
//! the analytic bracket.
//!
//! ```bash
//! cargo run --release -p voronoi-shaping --example awgn_ber
//! ```

use voronoi_shaping::awgn::{run_cells, Detector, Modem, RunParams};
use voronoi_shaping::codec::{Labeling, VoronoiConstellation};
use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};
use voronoi_shaping::metrics;

fn main() {
    let grid = [5.0, 7.0, 9.0, 11.0];
    let params = RunParams {
        min_bit_errors: 300,
        max_symbols: 4_000_000,
        master_seed: 42,
    };

    // E8 at SE 4 (65536 points) with the algebraic demodulator.
    let spec = LatticeSpec::new(LatticeFamily::E8, 8).unwrap();
    let vc = VoronoiConstellation::with_random_shift(spec, 4, 9).unwrap();
    let modem = Modem::vc(&vc, Labeling::QuasiGray, Detector::Alg2).unwrap();
    let e8 = run_cells(&modem, &grid, &params, 0);

    // 16-QAM carries the same 4 bits per dimension pair.
    let qam = run_cells(&Modem::qam(16).unwrap(), &grid, &params, 100);

    println!("{:>9} {:>14} {:>14}", "Eb/N0 dB", "E8 r=4 BER", "16-QAM BER");
    for (a, b) in e8.iter().zip(&qam) {
        println!("{:>9} {:>14.3e} {:>14.3e}", a.eb_n0_db, a.ber, b.ber);
    }
    println!("the lattice format overtakes QAM as the noise drops\n");

    // Bracket the measured SER of a small constellation.
    let spec = LatticeSpec::new(LatticeFamily::D4, 4).unwrap();
    let vc = VoronoiConstellation::with_optimized_shift(spec, 2, 3).unwrap();
    let tau = metrics::average_kissing(&vc).unwrap().tau_bar;
    let modem = Modem::vc(&vc, Labeling::QuasiGray, Detector::Ml).unwrap();
    let cells = run_cells(&modem, &[8.0, 9.0], &params, 200);
    for c in &cells {
        let n0 = vc.eb_channel() / 10f64.powf(c.eb_n0_db / 10.0);
        let (lo, hi) = metrics::ser_bounds_with_tau(&vc, n0, tau);
        println!(
            "D4 r=2 at {} dB: {lo:.3e} <= measured SER {:.3e} <= {hi:.3e}",
            c.eb_n0_db, c.ser
        );
    }
}
