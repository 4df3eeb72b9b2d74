//! Figures of merit for multidimensional modulation formats.
//!
//! Spectral efficiency, per-bit energies, asymptotic power efficiency and
//! its reciprocal (the sensitivity penalty), union bounds on the symbol
//! error rate and the average count of minimum-distance neighbours. All
//! distances and energies are reported in channel coordinates (unit average
//! symbol energy per dimension pair).

use num_traits::ToPrimitive;
use rand::Rng;

use crate::codec::{self, VoronoiConstellation};
use crate::error::Error;
use crate::lattice::LatticeFamily;
use crate::rng;
use crate::Result;

/// Exact neighbour counting is used up to this cardinality.
const KISSING_EXACT_LIMIT: u64 = 65_536;
/// Default sampling budget for larger constellations.
const KISSING_POINT_SAMPLES: usize = 1_500;
const KISSING_VECTOR_SAMPLES: usize = 400;
const KISSING_SEED_TAG: u64 = 0x4b49_5353;

/// Nominal asymptotic gains of the supported lattices over the cubic
/// lattice, in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGains {
    pub coding_db: f64,
    pub shaping_db: f64,
}

/// Reference coding and shaping gains per lattice family.
pub fn nominal_gains(family: LatticeFamily) -> LatticeGains {
    let (coding_db, shaping_db) = match family {
        LatticeFamily::Cubic => (0.0, 0.0),
        LatticeFamily::A2 => (0.62, 0.17),
        LatticeFamily::D4 => (1.51, 0.37),
        LatticeFamily::E8 => (3.01, 0.65),
        LatticeFamily::Leech24 => (6.02, 1.03),
    };
    LatticeGains {
        coding_db,
        shaping_db,
    }
}

/// Asymptotic power efficiency of Gray-coded square QAM with `r` levels per
/// rail (`r^2` points per dimension pair), used as the cubic-lattice
/// reference: `3 log2(r) / (r^2 - 1)`.
pub fn square_qam_gamma(r: u32) -> f64 {
    3.0 * (r as f64).log2() / ((r * r - 1) as f64)
}

/// Average number of minimum-distance neighbours per constellation point.
#[derive(Debug, Clone)]
pub struct KissingEstimate {
    pub tau_bar: f64,
    /// `None` when counted exactly over the whole constellation.
    pub std_err: Option<f64>,
}

/// Summary of a constellation's figures of merit.
#[derive(Debug, Clone)]
pub struct MeritReport {
    pub family: LatticeFamily,
    pub r: u32,
    pub n: usize,
    pub size: num_bigint::BigUint,
    /// bits per symbol per dimension pair
    pub se: f64,
    pub es: f64,
    pub eb: f64,
    pub dmin: f64,
    pub gamma: f64,
    pub gamma_db: f64,
    pub sensitivity_penalty_db: f64,
    pub tau_bar: f64,
    pub tau_bar_std_err: Option<f64>,
}

/// Compute the merit report for a constellation.
pub fn merit_report(vc: &VoronoiConstellation) -> Result<MeritReport> {
    let kissing = average_kissing(vc)?;
    let se = vc.spectral_efficiency();
    let es = vc.es_channel();
    let eb = vc.eb_channel();
    let dmin = vc.dmin_channel();
    let gamma = dmin * dmin / (4.0 * eb);
    let gamma_db = 10.0 * gamma.log10();
    Ok(MeritReport {
        family: vc.spec().family(),
        r: vc.scale_factor(),
        n: vc.spec().rank(),
        size: vc.size().clone(),
        se,
        es,
        eb,
        dmin,
        gamma,
        gamma_db,
        sensitivity_penalty_db: -gamma_db,
        tau_bar: kissing.tau_bar,
        tau_bar_std_err: kissing.std_err,
    })
}

/// Average minimum-distance neighbour count with default budgets: exact for
/// `M <= 65536`, sampled otherwise.
pub fn average_kissing(vc: &VoronoiConstellation) -> Result<KissingEstimate> {
    average_kissing_with(vc, KISSING_POINT_SAMPLES, KISSING_VECTOR_SAMPLES, 0)
}

/// Average minimum-distance neighbour count with explicit sampling budgets
/// for the non-enumerable path.
pub fn average_kissing_with(
    vc: &VoronoiConstellation,
    point_samples: usize,
    vector_samples: usize,
    seed: u64,
) -> Result<KissingEstimate> {
    let spec = vc.spec();
    let minimal: Vec<Vec<f64>> = spec.minimal_vectors()?;
    let kissing = minimal.len();

    if let Some(m) = vc
        .size()
        .to_u64()
        .filter(|&m| m <= KISSING_EXACT_LIMIT)
    {
        // exact: count in-constellation neighbours for every point
        let mut digits = vec![0u32; spec.rank()];
        let mut total = 0u64;
        for _ in 0..m {
            let c = vc.encode_digits_internal(&digits);
            for v in &minimal {
                let neighbour: Vec<f64> = c.iter().zip(v).map(|(a, b)| a + b).collect();
                if vc.contains_internal(&neighbour) {
                    total += 1;
                }
            }
            codec::increment_digits(&mut digits, vc.scale_factor());
        }
        return Ok(KissingEstimate {
            tau_bar: total as f64 / m as f64,
            std_err: None,
        });
    }

    // sampled: random points, random minimal vectors
    let mut rng = rng::stream(seed, &[KISSING_SEED_TAG]);
    let r = vc.scale_factor();
    let mut digits = vec![0u32; spec.rank()];
    let mut hits = 0u64;
    let mut tests = 0u64;
    let per_point = vector_samples.min(kissing);
    for _ in 0..point_samples {
        for d in digits.iter_mut() {
            *d = rng.gen_range(0..r);
        }
        let c = vc.encode_digits_internal(&digits);
        for _ in 0..per_point {
            let v = &minimal[rng.gen_range(0..kissing)];
            let neighbour: Vec<f64> = c.iter().zip(v).map(|(a, b)| a + b).collect();
            if vc.contains_internal(&neighbour) {
                hits += 1;
            }
            tests += 1;
        }
    }
    let p = hits as f64 / tests as f64;
    let se = (p * (1.0 - p) / tests as f64).sqrt();
    Ok(KissingEstimate {
        tau_bar: kissing as f64 * p,
        std_err: Some(kissing as f64 * se),
    })
}

/// Full pairwise union bound on the symbol error rate at noise density
/// `N0/2` per dimension: `(1/M) sum_i sum_{j != i} erfc(d_ij / (2 sqrt(N0))) / 2`.
pub fn union_bound_ser(vc: &VoronoiConstellation, n0: f64) -> Result<f64> {
    let m = vc
        .size()
        .to_u64()
        .filter(|&m| m <= 4096)
        .ok_or_else(|| Error::UnionBoundTooLarge {
            m: vc.size().to_string(),
        })?;
    let points = vc.enumerate_channel_points(4096)?;
    let denom = 2.0 * n0.sqrt();
    let mut acc = 0.0;
    for i in 0..m as usize {
        for j in 0..m as usize {
            if i == j {
                continue;
            }
            let d: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            acc += 0.5 * libm::erfc(d / denom);
        }
    }
    Ok(acc / m as f64)
}

/// Dominant-term bracket on the symbol error rate: the lower bound is the
/// pairwise error to one nearest neighbour, the (approximate) upper bound
/// scales it by the average neighbour count.
pub fn ser_bounds(vc: &VoronoiConstellation, n0: f64) -> Result<(f64, f64)> {
    let kissing = average_kissing(vc)?;
    Ok(ser_bounds_with_tau(vc, n0, kissing.tau_bar))
}

/// [`ser_bounds`] with a precomputed neighbour count (avoids re-estimating
/// it across a noise grid).
pub fn ser_bounds_with_tau(vc: &VoronoiConstellation, n0: f64, tau_bar: f64) -> (f64, f64) {
    let arg = vc.dmin_channel() / (2.0 * n0.sqrt());
    let pairwise = 0.5 * libm::erfc(arg);
    (pairwise, tau_bar * pairwise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use std::sync::Arc;

    fn spec(family: LatticeFamily, n: usize) -> Arc<LatticeSpec> {
        LatticeSpec::new(family, n).unwrap()
    }

    #[test]
    fn four_point_square_has_zero_decibel_efficiency() {
        let vc =
            VoronoiConstellation::with_optimized_shift(spec(LatticeFamily::Cubic, 2), 2, 1)
                .unwrap();
        let report = merit_report(&vc).unwrap();
        assert!(
            report.gamma_db.abs() < 1e-6,
            "gamma {} dB",
            report.gamma_db
        );
        assert_eq!(report.se, 2.0);
        assert!((report.tau_bar - 2.0).abs() < 1e-12, "tau {}", report.tau_bar);
    }

    #[test]
    fn spectral_efficiency_tracks_scale_factor() {
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 16, 2).unwrap();
        assert_eq!(vc.spectral_efficiency(), 8.0);
        let vc = VoronoiConstellation::with_random_shift(spec(LatticeFamily::A2, 2), 8, 2).unwrap();
        assert_eq!(vc.spectral_efficiency(), 6.0);
    }

    #[test]
    fn cubic_efficiency_matches_square_qam_reference() {
        for r in [2u32, 4, 8, 16] {
            let vc =
                VoronoiConstellation::with_optimized_shift(spec(LatticeFamily::Cubic, 2), r, 3)
                    .unwrap();
            let report = merit_report(&vc).unwrap();
            let reference = square_qam_gamma(r);
            assert!(
                (report.gamma - reference).abs() < 1e-6,
                "r={r}: {} vs {}",
                report.gamma,
                reference
            );
        }
    }

    #[test]
    fn antipodal_pair_bounds_are_exact() {
        // two-point constellation on a line: the union bound is a single
        // pairwise term and both bracket ends coincide
        let vc =
            VoronoiConstellation::with_optimized_shift(spec(LatticeFamily::Cubic, 1), 2, 5)
                .unwrap();
        let n0 = 0.25;
        let full = union_bound_ser(&vc, n0).unwrap();
        let (lower, upper) = ser_bounds(&vc, n0).unwrap();
        assert!((full - lower).abs() < 1e-15);
        assert!((upper - lower).abs() < 1e-15);
        let expected = 0.5 * libm::erfc(vc.dmin_channel() / (2.0 * n0.sqrt()));
        assert!((full - expected).abs() < 1e-15);
    }

    #[test]
    fn bracket_orders_and_scales_by_tau() {
        let vc =
            VoronoiConstellation::with_optimized_shift(spec(LatticeFamily::D4, 4), 2, 7).unwrap();
        let tau = average_kissing(&vc).unwrap().tau_bar;
        let (lower, upper) = ser_bounds_with_tau(&vc, 0.05, tau);
        assert!(lower <= upper);
        assert!((upper / lower - tau).abs() < 1e-12);
    }

    #[test]
    fn quadrature_value_of_gray_qam_ber_near_ten_to_minus_five() {
        // 1/2 erfc(sqrt(Eb/N0)) at Eb/N0 = 9.6 dB evaluates to about 1e-5
        let ratio = 10f64.powf(0.96);
        let ber = 0.5 * libm::erfc(ratio.sqrt());
        assert!(ber > 8.0e-6 && ber < 1.2e-5, "ber {ber}");

        // the constellation-level lower bound reproduces it for the 4-point
        // square (QPSK): dmin/(2 sqrt(N0)) = sqrt(Eb/N0)
        let vc =
            VoronoiConstellation::with_optimized_shift(spec(LatticeFamily::Cubic, 2), 2, 9)
                .unwrap();
        let n0 = vc.eb_channel() / ratio;
        let (lower, _) = ser_bounds_with_tau(&vc, n0, 2.0);
        assert!((lower - ber).abs() < 1e-9, "lower {lower} vs {ber}");
    }

    #[test]
    fn hexagonal_four_point_neighbour_count() {
        let vc =
            VoronoiConstellation::with_optimized_shift(spec(LatticeFamily::A2, 2), 2, 11).unwrap();
        let kissing = average_kissing(&vc).unwrap();
        assert!(kissing.std_err.is_none());
        assert!(
            (kissing.tau_bar - 2.5).abs() < 1e-12,
            "tau {}",
            kissing.tau_bar
        );
    }

    #[test]
    fn neighbour_count_approaches_lattice_kissing() {
        // The share of boundary points falls like 1/r, so the average
        // neighbour count climbs towards the infinite-lattice kissing
        // number as the constellation grows.
        let s = spec(LatticeFamily::E8, 8);
        let tau_of = |r: u32, exact: bool| {
            let vc = VoronoiConstellation::with_random_shift(s.clone(), r, 13).unwrap();
            if exact {
                average_kissing(&vc).unwrap().tau_bar
            } else {
                average_kissing_with(&vc, 1200, 240, 1).unwrap().tau_bar
            }
        };
        let tau2 = tau_of(2, true);
        let tau8 = tau_of(8, false);
        let tau16 = tau_of(16, false);
        assert!(tau2 < tau8 && tau8 < tau16, "{tau2} {tau8} {tau16}");
        assert!(tau16 < 240.0);
        // deficit roughly halves per doubling of r
        let d8 = 240.0 - tau8;
        let d16 = 240.0 - tau16;
        assert!(d16 < 0.75 * d8, "deficits {d8} -> {d16}");
        assert!(d16 / 240.0 < 0.16, "tau16 {tau16}");
    }

    #[test]
    fn dense_lattice_beats_cubic_at_high_rate() {
        let e8 =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::E8, 8), 16, 17).unwrap();
        let cubic =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::Cubic, 8), 16, 17)
                .unwrap();
        let ge8 = 10.0 * (e8.dmin_channel().powi(2) / (4.0 * e8.eb_channel())).log10();
        let gcp = 10.0 * (cubic.dmin_channel().powi(2) / (4.0 * cubic.eb_channel())).log10();
        let gap = ge8 - gcp;
        let nominal = nominal_gains(LatticeFamily::E8);
        let asymptote = nominal.coding_db + nominal.shaping_db;
        assert!(
            gap > 2.5 && gap < asymptote + 0.5,
            "gap {gap} dB (asymptote {asymptote})"
        );
    }

    #[test]
    fn union_bound_rejects_large_constellations() {
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 16, 19).unwrap();
        assert!(matches!(
            union_bound_ser(&vc, 0.1),
            Err(Error::UnionBoundTooLarge { .. })
        ));
    }
}
