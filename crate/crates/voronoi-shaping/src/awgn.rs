//! Monte-Carlo error-rate engine for the memoryless Gaussian channel.
//!
//! Each grid cell draws fresh bits, modulates them, adds white Gaussian
//! noise of variance `N0/2` per dimension and detects with either the
//! algebraic demodulator or a maximum-likelihood search. Randomness is
//! keyed per `(master_seed, cell, symbol)` so error counts are identical
//! for any worker count, and blocks are merged by pure addition.

use std::time::Instant;

use num_bigint::BigUint;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::codec::{gray_decode, gray_encode, Labeling, VoronoiConstellation};
use crate::error::Error;
use crate::rng;
use crate::Result;

const CELL_TAG: u64 = 0x4157_474e;
/// Symbols per work block.
const BLOCK_SYMBOLS: u64 = 2_048;
/// Blocks per scheduling round; stop rules are checked on round boundaries
/// so the symbol count never depends on thread timing.
const BLOCKS_PER_ROUND: u64 = 32;

/// Largest constellation the ML reference detector will tabulate.
pub const ML_LIMIT: u64 = 1 << 20;

/// Receiver used for a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    /// Algebraic demodulation (one closest-point search).
    Alg2,
    /// Exhaustive minimum-distance search over the tabulated constellation.
    Ml,
}

impl std::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alg2" | "algebraic" | "lattice" => Ok(Detector::Alg2),
            "ml" | "maximum-likelihood" => Ok(Detector::Ml),
            other => Err(Error::config("detector", format!("unknown detector {other}"))),
        }
    }
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Detector::Alg2 => f.write_str("alg2"),
            Detector::Ml => f.write_str("ml"),
        }
    }
}

/// Gray-labelled square QAM with `levels^2` points per dimension pair,
/// normalised to unit average pair energy. Detection is per-rail threshold
/// slicing, which is exact maximum likelihood on the Gaussian channel.
#[derive(Debug, Clone)]
pub struct QamModem {
    levels: u32,
    scale: f64,
    bits_per_rail: usize,
}

impl QamModem {
    /// `order` is the number of points per dimension pair and must be an
    /// even power of two (4, 16, 64, 256, ...).
    pub fn new(order: u32) -> Result<Self> {
        let levels = (order as f64).sqrt().round() as u32;
        if levels * levels != order || !levels.is_power_of_two() || levels < 2 {
            return Err(Error::config(
                "qam_order",
                format!("{order} is not a square power of two"),
            ));
        }
        let scale = (3.0 / (2.0 * (levels * levels - 1) as f64)).sqrt();
        Ok(Self {
            levels,
            scale,
            bits_per_rail: levels.trailing_zeros() as usize,
        })
    }

    pub fn bits_per_pair(&self) -> usize {
        2 * self.bits_per_rail
    }

    /// Energy per bit (unit pair energy).
    pub fn eb(&self) -> f64 {
        1.0 / self.bits_per_pair() as f64
    }

    /// Minimum distance between constellation points.
    pub fn dmin(&self) -> f64 {
        2.0 * self.scale
    }

    fn rail_amplitude(&self, index: u32) -> f64 {
        (2.0 * index as f64 - (self.levels - 1) as f64) * self.scale
    }

    fn modulate_rail(&self, bits: &[u8]) -> f64 {
        let mut value = 0u32;
        for &b in bits {
            value = (value << 1) | (b as u32 & 1);
        }
        self.rail_amplitude(gray_decode(value))
    }

    fn detect_rail(&self, y: f64, bits: &mut Vec<u8>) {
        let raw = ((y / self.scale) + (self.levels - 1) as f64) / 2.0;
        let index = (raw.round().max(0.0) as u32).min(self.levels - 1);
        let value = gray_encode(index);
        for shift in (0..self.bits_per_rail).rev() {
            bits.push(((value >> shift) & 1) as u8);
        }
    }

    /// Map bits to I/Q pairs (one pair per `bits_per_pair` bits).
    pub fn modulate(&self, bits: &[u8]) -> Vec<f64> {
        assert_eq!(bits.len() % self.bits_per_pair(), 0);
        let mut out = Vec::with_capacity(bits.len() / self.bits_per_rail);
        for pair in bits.chunks(self.bits_per_pair()) {
            out.push(self.modulate_rail(&pair[..self.bits_per_rail]));
            out.push(self.modulate_rail(&pair[self.bits_per_rail..]));
        }
        out
    }

    /// Slice received samples back to bits (exact ML).
    pub fn detect(&self, y: &[f64]) -> Vec<u8> {
        assert_eq!(y.len() % 2, 0);
        let mut bits = Vec::with_capacity(y.len() * self.bits_per_rail);
        for pair in y.chunks(2) {
            self.detect_rail(pair[0], &mut bits);
            self.detect_rail(pair[1], &mut bits);
        }
        bits
    }
}

/// Brute-force maximum-likelihood reference detector for a Voronoi
/// constellation, backed by a one-off table of all points.
pub struct MlDetector {
    points: Vec<Vec<f64>>,
}

impl MlDetector {
    pub fn build(vc: &VoronoiConstellation) -> Result<Self> {
        let points = vc.enumerate_channel_points(ML_LIMIT)?;
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the closest constellation point; ties resolve to the lowest
    /// index.
    pub fn detect(&self, y: &[f64]) -> BigUint {
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let mut d2 = 0.0;
            for (a, b) in p.iter().zip(y) {
                d2 += (a - b) * (a - b);
            }
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
        }
        BigUint::from(best)
    }
}

/// One sweep cell worth of Monte-Carlo counts.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub eb_n0_db: f64,
    pub symbols: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub ber: f64,
    pub ser: f64,
    /// 95% confidence interval on the bit error rate.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub wall_seconds: f64,
    /// Set when the symbol budget ran out before the error target.
    pub low_confidence: bool,
}

fn finish_cell(
    eb_n0_db: f64,
    symbols: u64,
    bit_errors: u64,
    symbol_errors: u64,
    bits_per_symbol: usize,
    started: Instant,
    low_confidence: bool,
) -> CellResult {
    let bits = symbols.saturating_mul(bits_per_symbol as u64).max(1);
    let ber = bit_errors as f64 / bits as f64;
    let ser = symbol_errors as f64 / symbols.max(1) as f64;
    let half = 1.96 * (ber * (1.0 - ber) / bits as f64).sqrt();
    CellResult {
        eb_n0_db,
        symbols,
        bit_errors,
        symbol_errors,
        ber,
        ser,
        ci_lo: (ber - half).max(0.0),
        ci_hi: ber + half,
        wall_seconds: started.elapsed().as_secs_f64(),
        low_confidence,
    }
}

/// What to modulate in an AWGN sweep.
pub enum Modem<'a> {
    Vc {
        vc: &'a VoronoiConstellation,
        labeling: Labeling,
        detector: Detector,
        ml: Option<MlDetector>,
    },
    Qam(QamModem),
}

impl<'a> Modem<'a> {
    pub fn vc(
        vc: &'a VoronoiConstellation,
        labeling: Labeling,
        detector: Detector,
    ) -> Result<Self> {
        let ml = match detector {
            Detector::Ml => Some(MlDetector::build(vc)?),
            Detector::Alg2 => None,
        };
        Ok(Modem::Vc {
            vc,
            labeling,
            detector,
            ml,
        })
    }

    pub fn qam(order: u32) -> Result<Self> {
        Ok(Modem::Qam(QamModem::new(order)?))
    }

    pub fn bits_per_symbol(&self) -> usize {
        match self {
            Modem::Vc { vc, .. } => vc.bits_per_symbol(),
            Modem::Qam(q) => q.bits_per_pair(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Modem::Vc { vc, .. } => vc.dim(),
            Modem::Qam(_) => 2,
        }
    }

    pub fn eb(&self) -> f64 {
        match self {
            Modem::Vc { vc, .. } => vc.eb_channel(),
            Modem::Qam(q) => q.eb(),
        }
    }

    /// Simulate one symbol; returns (bit errors, symbol error).
    fn simulate_symbol(&self, rng: &mut impl Rng, sigma: f64) -> (u64, bool) {
        let m = self.bits_per_symbol();
        let mut bits = Vec::with_capacity(m);
        for _ in 0..m {
            bits.push(rng.gen::<bool>() as u8);
        }
        match self {
            Modem::Vc {
                vc,
                labeling,
                detector,
                ml,
            } => {
                let r = vc.scale_factor();
                let n = vc.spec().rank();
                let index = labeling.bits_to_index(&bits, r, n).expect("bit count");
                let mut y = vc.encode(&index).expect("index in range");
                for v in y.iter_mut() {
                    *v += sigma * rng.sample::<f64, _>(StandardNormal);
                }
                let decided = match detector {
                    Detector::Alg2 => vc.decode(&y),
                    Detector::Ml => ml.as_ref().expect("ml table").detect(&y),
                };
                if decided == index {
                    (0, false)
                } else {
                    let got = labeling.index_to_bits(&decided, r, n).expect("in range");
                    let errs = bits
                        .iter()
                        .zip(&got)
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                    (errs, true)
                }
            }
            Modem::Qam(q) => {
                let mut y = q.modulate(&bits);
                for v in y.iter_mut() {
                    *v += sigma * rng.sample::<f64, _>(StandardNormal);
                }
                let got = q.detect(&y);
                let errs = bits.iter().zip(&got).filter(|(a, b)| a != b).count() as u64;
                (errs, errs > 0)
            }
        }
    }
}

/// Stop rule and seeding for [`run_cells`].
#[derive(Debug, Clone)]
pub struct RunParams {
    pub min_bit_errors: u64,
    pub max_symbols: u64,
    pub master_seed: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            min_bit_errors: 100,
            max_symbols: 100_000_000,
            master_seed: 1,
        }
    }
}

/// Run a modem over an `Eb/N0` grid. `cell_base` offsets the cell tags so
/// several sweeps under one master seed stay independent.
pub fn run_cells(
    modem: &Modem<'_>,
    eb_n0_grid_db: &[f64],
    params: &RunParams,
    cell_base: u64,
) -> Vec<CellResult> {
    eb_n0_grid_db
        .iter()
        .enumerate()
        .map(|(g, &db)| {
            let started = Instant::now();
            let eb = modem.eb();
            let n0 = eb / 10f64.powf(db / 10.0);
            let sigma = (n0 / 2.0).sqrt();
            let cell = cell_base + g as u64;
            let m = modem.bits_per_symbol();

            let mut symbols = 0u64;
            let mut bit_errors = 0u64;
            let mut symbol_errors = 0u64;
            loop {
                let round: Vec<(u64, u64)> = (0..BLOCKS_PER_ROUND)
                    .into_par_iter()
                    .map(|b| {
                        let mut block_bits = 0u64;
                        let mut block_syms = 0u64;
                        let first = symbols + b * BLOCK_SYMBOLS;
                        for s in first..first + BLOCK_SYMBOLS {
                            let mut rng =
                                rng::stream(params.master_seed, &[CELL_TAG, cell, s]);
                            let (be, se) = modem.simulate_symbol(&mut rng, sigma);
                            block_bits += be;
                            block_syms += se as u64;
                        }
                        (block_bits, block_syms)
                    })
                    .collect();
                for (bb, bs) in round {
                    bit_errors += bb;
                    symbol_errors += bs;
                }
                symbols += BLOCKS_PER_ROUND * BLOCK_SYMBOLS;
                if bit_errors >= params.min_bit_errors {
                    break;
                }
                if symbols >= params.max_symbols {
                    return finish_cell(db, symbols, bit_errors, symbol_errors, m, started, true);
                }
            }
            finish_cell(db, symbols, bit_errors, symbol_errors, m, started, false)
        })
        .collect()
}

/// Theoretical bit error rate of Gray-coded 4-QAM on the Gaussian channel.
pub fn gray_qpsk_ber(eb_n0_db: f64) -> f64 {
    0.5 * libm::erfc(10f64.powf(eb_n0_db / 10.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeFamily, LatticeSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn spec(family: LatticeFamily, n: usize) -> Arc<LatticeSpec> {
        LatticeSpec::new(family, n).unwrap()
    }

    #[test]
    fn qam_constructor_validates_order() {
        assert!(QamModem::new(4).is_ok());
        assert!(QamModem::new(16).is_ok());
        assert!(QamModem::new(8).is_err());
        assert!(QamModem::new(12).is_err());
    }

    #[test]
    fn four_qam_is_the_unit_square() {
        let q = QamModem::new(4).unwrap();
        let pts = q.modulate(&[0, 0, 0, 1, 1, 0, 1, 1]);
        let inv = 1.0 / 2f64.sqrt();
        assert_eq!(pts.len(), 8);
        for v in &pts {
            assert!((v.abs() - inv).abs() < 1e-12);
        }
        // noiseless slicing is the identity
        assert_eq!(q.detect(&pts), vec![0, 0, 0, 1, 1, 0, 1, 1]);
    }

    #[test]
    fn sixteen_qam_unit_energy_and_levels() {
        let q = QamModem::new(16).unwrap();
        // average pair energy over all 16 points is 1
        let mut acc = 0.0;
        for b0 in 0..2u8 {
            for b1 in 0..2u8 {
                for b2 in 0..2u8 {
                    for b3 in 0..2u8 {
                        let p = q.modulate(&[b0, b1, b2, b3]);
                        acc += p[0] * p[0] + p[1] * p[1];
                    }
                }
            }
        }
        assert!((acc / 16.0 - 1.0).abs() < 1e-12);
        // rail amplitudes are the odd multiples of the scale
        let expected = 3.0 * q.scale;
        assert!((q.rail_amplitude(3) - expected).abs() < 1e-12);
    }

    #[test]
    fn qam_slicing_matches_bruteforce_nearest() {
        let q = QamModem::new(16).unwrap();
        // tabulate all 16 points
        let mut table = Vec::new();
        for value in 0..16u32 {
            let bits: Vec<u8> = (0..4).rev().map(|s| ((value >> s) & 1) as u8).collect();
            table.push((q.modulate(&bits), bits));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let y = [
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            ];
            let sliced = q.detect(&y);
            let nearest = table
                .iter()
                .min_by(|(a, _), (b, _)| {
                    let da: f64 = a.iter().zip(&y).map(|(p, v)| (p - v) * (p - v)).sum();
                    let db: f64 = b.iter().zip(&y).map(|(p, v)| (p - v) * (p - v)).sum();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            assert_eq!(sliced, nearest.1, "y={y:?}");
        }
    }

    #[test]
    fn ml_detector_recovers_noiseless_points() {
        let vc = VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 4, 3)
            .unwrap();
        let ml = MlDetector::build(&vc).unwrap();
        assert_eq!(ml.len(), 256);
        for k in (0..256u32).step_by(7) {
            let idx = BigUint::from(k);
            let y = vc.encode(&idx).unwrap();
            assert_eq!(ml.detect(&y), idx);
        }
    }

    #[test]
    fn ml_detector_rejects_oversized_constellations() {
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::Leech24, 24), 2, 3)
                .unwrap();
        assert!(MlDetector::build(&vc).is_err());
    }

    #[test]
    fn ml_and_alg2_agree_inside_packing_radius() {
        let vc = VoronoiConstellation::with_random_shift(spec(LatticeFamily::E8, 8), 2, 5)
            .unwrap();
        let ml = MlDetector::build(&vc).unwrap();
        let packing = vc.dmin_channel() / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2_000 {
            let k = BigUint::from(rng.gen_range(0..256u32));
            let c = vc.encode(&k).unwrap();
            let mut noise: Vec<f64> = (0..8).map(|_| rng.gen::<f64>() - 0.5).collect();
            let norm = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
            let target = packing * rng.gen_range(0.01..0.99);
            let y: Vec<f64> = c
                .iter()
                .zip(&noise)
                .map(|(a, b)| a + b * target / norm)
                .collect();
            assert_eq!(ml.detect(&y), vc.decode(&y));
        }
    }

    #[test]
    fn qpsk_monte_carlo_matches_theory() {
        let modem = Modem::qam(4).unwrap();
        let params = RunParams {
            min_bit_errors: 800,
            max_symbols: 20_000_000,
            master_seed: 42,
        };
        let cells = run_cells(&modem, &[4.0, 6.0], &params, 0);
        for cell in cells {
            let theory = gray_qpsk_ber(cell.eb_n0_db);
            let bits = (cell.symbols * 2) as f64;
            let sigma = (theory * (1.0 - theory) / bits).sqrt();
            assert!(
                (cell.ber - theory).abs() < 3.0 * sigma,
                "{} dB: ber {} vs theory {} (3s {})",
                cell.eb_n0_db,
                cell.ber,
                theory,
                3.0 * sigma
            );
        }
    }

    #[test]
    fn identical_seeds_reproduce_counts() {
        let vc = VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 2, 9)
            .unwrap();
        let modem = Modem::vc(&vc, Labeling::QuasiGray, Detector::Alg2).unwrap();
        let params = RunParams {
            min_bit_errors: 50,
            max_symbols: 1_000_000,
            master_seed: 7,
        };
        let a = run_cells(&modem, &[3.0], &params, 0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_cells(&modem, &[3.0], &params, 0));
        assert_eq!(a[0].bit_errors, b[0].bit_errors);
        assert_eq!(a[0].symbol_errors, b[0].symbol_errors);
        assert_eq!(a[0].symbols, b[0].symbols);
    }
}
