//! Figures of merit: spectral efficiency, asymptotic power efficiency,
//! sensitivity penalty and minimum-distance neighbour counts across the
//! supported lattices, next to their nominal coding/shaping gains.
//!
//! ```bash
//! cargo run --release -p voronoi-shaping --example merit_report
//! ```

use voronoi_shaping::codec::VoronoiConstellation;
use voronoi_shaping::lattice::{LatticeFamily, LatticeSpec};
use voronoi_shaping::metrics::{merit_report, nominal_gains, ser_bounds_with_tau};

fn main() {
    println!(
        "{:>8} {:>3} {:>4} {:>12} {:>9} {:>10} {:>10}",
        "lattice", "r", "SE", "M", "gamma_dB", "penalty_dB", "tau_bar"
    );
    for (family, n, r) in [
        (LatticeFamily::Cubic, 2, 2),
        (LatticeFamily::A2, 2, 2),
        (LatticeFamily::D4, 4, 2),
        (LatticeFamily::D4, 4, 4),
        (LatticeFamily::E8, 8, 2),
        (LatticeFamily::E8, 8, 4),
    ] {
        let spec = LatticeSpec::new(family, n).unwrap();
        let vc = VoronoiConstellation::with_optimized_shift(spec, r, 3).unwrap();
        let m = merit_report(&vc).unwrap();
        println!(
            "{:>8} {:>3} {:>4} {:>12} {:>9.2} {:>10.2} {:>10.3}",
            m.family, m.r, m.se, m.size, m.gamma_db, m.sensitivity_penalty_db, m.tau_bar
        );
    }

    println!("\nnominal asymptotic gains over the cubic lattice (dB):");
    for family in [
        LatticeFamily::A2,
        LatticeFamily::D4,
        LatticeFamily::E8,
        LatticeFamily::Leech24,
    ] {
        let g = nominal_gains(family);
        println!(
            "  {family:>8}: coding {:+.2}, shaping {:+.2}",
            g.coding_db, g.shaping_db
        );
    }

    // Error-rate bracket from the minimum distance and neighbour count.
    let spec = LatticeSpec::new(LatticeFamily::E8, 8).unwrap();
    let vc = VoronoiConstellation::with_optimized_shift(spec, 2, 3).unwrap();
    let report = merit_report(&vc).unwrap();
    println!("\nE8, 256 points: SER bracket at a few noise levels");
    for eb_n0_db in [6.0, 8.0, 10.0] {
        let n0 = vc.eb_channel() / 10f64.powf(eb_n0_db / 10.0);
        let (lo, hi) = ser_bounds_with_tau(&vc, n0, report.tau_bar);
        println!("  Eb/N0 = {eb_n0_db:>4} dB: {lo:.3e} <= SER <= {hi:.3e}");
    }
}
