//! Voronoi constellation modulation and demodulation.
//!
//! A constellation is determined by a lattice, a power-of-two scale factor
//! `r` and a shift vector `a` inside the Voronoi region of the origin; its
//! `M = r^N` points are never tabulated. Modulation expands the symbol index
//! into base-`r` digits, forms the lattice point with those coefficients and
//! folds it into the scaled, shifted Voronoi region through one closest-point
//! search:
//!
//! ```text
//! K -> digits k -> x = G k -> c = x - r * cpa((x - a) / r) - a
//! ```
//!
//! Demodulation is the reverse: find the nearest lattice point to `y + a`,
//! recover its integer coefficients exactly, reduce them mod `r` and collapse
//! the digits back into an index. Both directions cost one closest-point
//! search regardless of `M`, which is what makes 10^28-point constellations
//! practical.
//!
//! Channel coordinates are physical coordinates normalised to unit average
//! symbol energy per dimension pair; the normalisation factor is measured at
//! construction (exhaustively for `M <= 65536`, by seeded sampling above).

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::cpa;
use crate::error::Error;
use crate::lattice::LatticeSpec;
use crate::rng;
use crate::Result;

/// Largest constellation measured by full enumeration.
pub const ENUMERATION_LIMIT: u64 = 65_536;
/// Sample count for energy measurement above the enumeration limit.
const ENERGY_SAMPLES: usize = 50_000;
const ENERGY_SEED_TAG: u64 = 0x4553;

/// Expand `index` into `n` base-`r` digits, most significant first.
pub fn index_to_digits(index: &BigUint, r: u32, n: usize) -> Result<Vec<u32>> {
    let base = BigUint::from(r);
    let mut digits = vec![0u32; n];
    let mut rest = index.clone();
    for slot in digits.iter_mut().rev() {
        let q = &rest / &base;
        let rem = &rest - &q * &base;
        *slot = rem.to_u32().expect("digit below base");
        rest = q;
    }
    if !rest.is_zero() {
        return Err(Error::IndexOutOfRange);
    }
    Ok(digits)
}

/// Collapse base-`r` digits (most significant first) into an index.
pub fn digits_to_index(digits: &[u32], r: u32) -> Result<BigUint> {
    let base = BigUint::from(r);
    let mut acc = BigUint::zero();
    for &d in digits {
        if d >= r {
            return Err(Error::DigitOutOfRange {
                digit: d as i64,
                base: r,
            });
        }
        acc = acc * &base + BigUint::from(d);
    }
    Ok(acc)
}

/// Binary-reflected Gray code of a digit.
pub fn gray_encode(value: u32) -> u32 {
    value ^ (value >> 1)
}

/// Inverse of [`gray_encode`].
pub fn gray_decode(gray: u32) -> u32 {
    let mut out = 0;
    let mut g = gray;
    while g != 0 {
        out ^= g;
        g >>= 1;
    }
    out
}

/// Constellation bit labelings.
///
/// `NaturalBinary` reads the bit string as the big-endian binary value of
/// the symbol index. `QuasiGray` splits the bits into `N` groups of
/// `log2 r`, Gray-decodes each group into a digit and reassembles the index;
/// at `r = 2` the two coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeling {
    NaturalBinary,
    QuasiGray,
}

impl std::fmt::Display for Labeling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Labeling::NaturalBinary => f.write_str("natural-binary"),
            Labeling::QuasiGray => f.write_str("quasi-gray"),
        }
    }
}

impl std::str::FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "natural" | "natural-binary" | "binary" => Ok(Labeling::NaturalBinary),
            "quasi-gray" | "gray" | "quasigray" => Ok(Labeling::QuasiGray),
            other => Err(Error::config(
                "labeling",
                format!("unknown labeling {other}"),
            )),
        }
    }
}

impl Labeling {
    /// Map `N log2 r` bits (MSB first) to a symbol index.
    pub fn bits_to_index(&self, bits: &[u8], r: u32, n: usize) -> Result<BigUint> {
        let group = log2_exact(r)?;
        let expected = group * n;
        if bits.len() != expected {
            return Err(Error::WrongBitCount {
                expected,
                got: bits.len(),
            });
        }
        let mut digits = Vec::with_capacity(n);
        for chunk in bits.chunks(group) {
            let mut value = 0u32;
            for &b in chunk {
                value = (value << 1) | (b as u32 & 1);
            }
            digits.push(match self {
                Labeling::NaturalBinary => value,
                Labeling::QuasiGray => gray_decode(value),
            });
        }
        digits_to_index(&digits, r)
    }

    /// Map a symbol index to `N log2 r` bits (MSB first).
    pub fn index_to_bits(&self, index: &BigUint, r: u32, n: usize) -> Result<Vec<u8>> {
        let group = log2_exact(r)?;
        let digits = index_to_digits(index, r, n)?;
        let mut bits = Vec::with_capacity(group * n);
        for &d in &digits {
            let value = match self {
                Labeling::NaturalBinary => d,
                Labeling::QuasiGray => gray_encode(d),
            };
            for shift in (0..group).rev() {
                bits.push(((value >> shift) & 1) as u8);
            }
        }
        Ok(bits)
    }
}

fn log2_exact(r: u32) -> Result<usize> {
    if r.is_power_of_two() && (2..=16).contains(&r) {
        Ok(r.trailing_zeros() as usize)
    } else {
        Err(Error::UnsupportedScale { r })
    }
}

/// A Voronoi constellation: lattice, scale factor, shift, and the energy
/// normalisation measured at construction.
pub struct VoronoiConstellation {
    spec: Arc<LatticeSpec>,
    r: u32,
    shift: Vec<f64>,
    size: BigUint,
    bits_per_symbol: usize,
    es_internal: f64,
}

impl std::fmt::Debug for VoronoiConstellation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VoronoiConstellation")
            .field("family", &self.spec.family())
            .field("r", &self.r)
            .field("size", &self.size)
            .field("es_internal", &self.es_internal)
            .finish()
    }
}

impl VoronoiConstellation {
    /// Build a constellation from an explicit shift (internal coordinates).
    ///
    /// The shift must decode to the origin, i.e. lie inside the Voronoi
    /// region of the origin; `r` must be one of 2, 4, 8, 16.
    pub fn new(spec: Arc<LatticeSpec>, r: u32, shift: Vec<f64>) -> Result<Self> {
        log2_exact(r)?;
        if shift.len() != spec.embed_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.embed_dim(),
                got: shift.len(),
            });
        }
        let nearest = cpa::closest_point(&spec, &shift);
        if nearest.iter().any(|&v| v != 0.0) {
            return Err(Error::ShiftOutsideCell);
        }
        let n = spec.rank();
        let size = BigUint::from(r).pow(n as u32);
        let bits_per_symbol = n * log2_exact(r)?;
        let mut vc = Self {
            spec,
            r,
            shift,
            size,
            bits_per_symbol,
            es_internal: f64::NAN,
        };
        vc.es_internal = vc.measure_energy();
        Ok(vc)
    }

    /// Constellation with a shift drawn uniformly from the Voronoi region.
    pub fn with_random_shift(spec: Arc<LatticeSpec>, r: u32, seed: u64) -> Result<Self> {
        let shift = crate::shaping::sample_shift_uniform(&spec, seed);
        Self::new(spec, r, shift)
    }

    /// Constellation with an energy-optimised shift (iterative search from a
    /// seeded random start).
    pub fn with_optimized_shift(spec: Arc<LatticeSpec>, r: u32, seed: u64) -> Result<Self> {
        let result = crate::shaping::optimize_shift(
            &spec,
            r,
            &crate::shaping::OptimizeParams::default(),
            seed,
        )?;
        Self::new(spec, r, result.shift)
    }

    fn measure_energy(&self) -> f64 {
        if let Some(m) = self.size.to_u64().filter(|&m| m <= ENUMERATION_LIMIT) {
            let mut acc = 0.0;
            let mut digits = vec![0u32; self.spec.rank()];
            for _ in 0..m {
                let c = self.encode_digits_internal(&digits);
                acc += c.iter().map(|v| v * v).sum::<f64>();
                increment_digits(&mut digits, self.r);
            }
            acc / m as f64
        } else {
            let mut rng = rng::stream(ENERGY_SEED_TAG, &[self.r as u64, self.spec.rank() as u64]);
            let mut acc = 0.0;
            let mut digits = vec![0u32; self.spec.rank()];
            for _ in 0..ENERGY_SAMPLES {
                for d in digits.iter_mut() {
                    *d = rng.gen_range(0..self.r);
                }
                let c = self.encode_digits_internal(&digits);
                acc += c.iter().map(|v| v * v).sum::<f64>();
            }
            acc / ENERGY_SAMPLES as f64
        }
    }

    pub fn spec(&self) -> &Arc<LatticeSpec> {
        &self.spec
    }

    pub fn scale_factor(&self) -> u32 {
        self.r
    }

    /// Shift vector in internal coordinates.
    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// Constellation cardinality `M = r^N`.
    pub fn size(&self) -> &BigUint {
        &self.size
    }

    /// `m = log2 M`.
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Channel-space dimensionality.
    pub fn dim(&self) -> usize {
        self.spec.physical_dim()
    }

    /// Average symbol energy in internal coordinates (measured).
    pub fn es_internal(&self) -> f64 {
        self.es_internal
    }

    /// Average symbol energy in channel coordinates: `N/2` by construction.
    pub fn es_channel(&self) -> f64 {
        self.spec.rank() as f64 / 2.0
    }

    /// Average energy per bit in channel coordinates.
    pub fn eb_channel(&self) -> f64 {
        self.es_channel() / self.bits_per_symbol as f64
    }

    /// Minimum inter-point distance in channel coordinates.
    pub fn dmin_channel(&self) -> f64 {
        (self.spec.dmin2_internal()).sqrt() * self.internal_to_channel_scale()
    }

    /// Spectral efficiency in bits per symbol per dimension pair.
    pub fn spectral_efficiency(&self) -> f64 {
        2.0 * (self.r as f64).log2()
    }

    /// Scalar mapping internal-coordinate lengths to channel lengths.
    pub fn internal_to_channel_scale(&self) -> f64 {
        ((self.spec.rank() as f64 / 2.0) / self.es_internal).sqrt()
    }

    /// Modulate a symbol index into internal coordinates.
    pub fn encode_internal(&self, index: &BigUint) -> Result<Vec<f64>> {
        if index >= &self.size {
            return Err(Error::IndexOutOfRange);
        }
        let digits = index_to_digits(index, self.r, self.spec.rank())?;
        Ok(self.encode_digits_internal(&digits))
    }

    /// Modulation core working directly on base-`r` digits.
    pub fn encode_digits_internal(&self, digits: &[u32]) -> Vec<f64> {
        fold_digits(&self.spec, self.r, &self.shift, digits)
    }

    /// Demodulate internal coordinates into base-`r` digits (total function).
    pub fn decode_digits_internal(&self, y: &[f64]) -> Vec<u32> {
        let w: Vec<f64> = y.iter().zip(&self.shift).map(|(yi, ai)| yi + ai).collect();
        let lambda = cpa::closest_point(&self.spec, &w);
        let z = self
            .spec
            .coeffs_of(&lambda)
            .expect("closest point must be a lattice point");
        z.iter()
            .map(|&zi| zi.rem_euclid(self.r as i64) as u32)
            .collect()
    }

    /// Demodulate internal coordinates into a symbol index.
    pub fn decode_internal(&self, y: &[f64]) -> BigUint {
        let digits = self.decode_digits_internal(y);
        digits_to_index(&digits, self.r).expect("digits below base")
    }

    /// Modulate into channel coordinates (unit energy per dimension pair).
    pub fn encode(&self, index: &BigUint) -> Result<Vec<f64>> {
        let internal = self.encode_internal(index)?;
        Ok(self.internal_to_channel(&internal))
    }

    /// Demodulate channel coordinates into a symbol index.
    pub fn decode(&self, y: &[f64]) -> BigUint {
        let internal = self.channel_to_internal(y);
        self.decode_internal(&internal)
    }

    pub fn internal_to_channel(&self, internal: &[f64]) -> Vec<f64> {
        let s = self.spec.coord_scale2().sqrt();
        let nf = self.internal_to_channel_scale() * s;
        self.spec
            .to_physical(internal)
            .into_iter()
            .map(|v| v * nf)
            .collect()
    }

    pub fn channel_to_internal(&self, channel: &[f64]) -> Vec<f64> {
        let s = self.spec.coord_scale2().sqrt();
        let nf = self.internal_to_channel_scale() * s;
        let physical: Vec<f64> = channel.iter().map(|v| v / nf).collect();
        self.spec.from_physical(&physical)
    }

    /// Membership test for an internal-coordinate point: `c + a` must be a
    /// lattice point and `c` must sit inside the scaled Voronoi region
    /// (its fold against the `r`-scaled lattice is the origin).
    pub fn contains_internal(&self, c: &[f64]) -> bool {
        let r = self.r as f64;
        let w: Vec<f64> = c.iter().map(|ci| ci / r).collect();
        let lambda = cpa::closest_point(&self.spec, &w);
        if lambda.iter().any(|&v| v != 0.0) {
            return false;
        }
        let x: Vec<f64> = c.iter().zip(&self.shift).map(|(ci, ai)| ci + ai).collect();
        self.spec.coeffs_of(&x).is_ok()
    }

    /// All `M` channel-coordinate points in index order (`M <= limit`).
    pub fn enumerate_channel_points(&self, limit: u64) -> Result<Vec<Vec<f64>>> {
        let m = self
            .size
            .to_u64()
            .filter(|&m| m <= limit)
            .ok_or_else(|| Error::MlTooLarge {
                m: self.size.to_string(),
            })?;
        let mut digits = vec![0u32; self.spec.rank()];
        let mut points = Vec::with_capacity(m as usize);
        for _ in 0..m {
            let internal = self.encode_digits_internal(&digits);
            points.push(self.internal_to_channel(&internal));
            increment_digits(&mut digits, self.r);
        }
        Ok(points)
    }
}

/// The modulation fold for arbitrary shifts, as a free function:
/// `c = x - r * cpa((x - a) / r) - a` with `x = G k`.
///
/// Valid for any shift vector, which lets shift optimisation evaluate
/// candidate shifts that are not (yet) inside the Voronoi region.
pub(crate) fn fold_digits(spec: &LatticeSpec, r: u32, shift: &[f64], digits: &[u32]) -> Vec<f64> {
    let z: Vec<i64> = digits.iter().map(|&d| d as i64).collect();
    let x = spec.lattice_point(&z).expect("digit vector length");
    let rf = r as f64;
    let w: Vec<f64> = x
        .iter()
        .zip(shift)
        .map(|(xi, ai)| (xi - ai) / rf)
        .collect();
    let lambda = cpa::closest_point(spec, &w);
    x.iter()
        .zip(&lambda)
        .zip(shift)
        .map(|((xi, li), ai)| xi - rf * li - ai)
        .collect()
}

/// Big-endian digit increment (wraps at r^N).
pub(crate) fn increment_digits(digits: &mut [u32], r: u32) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < r {
            return;
        }
        *d = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeFamily;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(family: LatticeFamily, n: usize) -> Arc<LatticeSpec> {
        LatticeSpec::new(family, n).unwrap()
    }

    #[test]
    fn digit_expansion_examples() {
        let k = BigUint::from(27u32);
        assert_eq!(index_to_digits(&k, 4, 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(
            digits_to_index(&[1, 2, 3], 4).unwrap(),
            BigUint::from(27u32)
        );

        let zero = BigUint::zero();
        assert_eq!(index_to_digits(&zero, 8, 5).unwrap(), vec![0; 5]);

        // maximal index: all digits r-1
        let max = BigUint::from(16u32).pow(24) - 1u32;
        assert_eq!(index_to_digits(&max, 16, 24).unwrap(), vec![15; 24]);

        // out of range
        let m = BigUint::from(16u32).pow(24);
        assert!(index_to_digits(&m, 16, 24).is_err());
        assert!(digits_to_index(&[4, 0], 4).is_err());
    }

    #[test]
    fn max_leech_index_magnitude() {
        let m = digits_to_index(&[15; 24], 16).unwrap() + 1u32;
        assert_eq!(m, BigUint::from(2u32).pow(96));
        let approx = m.to_f64().unwrap();
        assert!((approx / 7.9e28 - 1.0).abs() < 0.01);
    }

    #[test]
    fn gray_code_examples() {
        assert_eq!(gray_encode(2), 3);
        assert_eq!(gray_encode(3), 2);
        for v in 0..16 {
            assert_eq!(gray_decode(gray_encode(v)), v);
        }
        // adjacent digits differ in one bit, including the wrap
        for r in [2u32, 4, 8, 16] {
            for d in 0..r {
                let a = gray_encode(d);
                let b = gray_encode((d + 1) % r);
                assert_eq!((a ^ b).count_ones(), 1, "r={r} d={d}");
            }
        }
    }

    #[test]
    fn labeling_examples() {
        // quasi-Gray r=4: digits (2,3) <-> bits 11|10
        let k = digits_to_index(&[2, 3], 4).unwrap();
        let bits = Labeling::QuasiGray.index_to_bits(&k, 4, 2).unwrap();
        assert_eq!(bits, vec![1, 1, 1, 0]);
        assert_eq!(
            Labeling::QuasiGray.bits_to_index(&bits, 4, 2).unwrap(),
            k
        );

        // natural binary r=4 N=2: bits 1011 <-> K=11
        let bits = [1u8, 0, 1, 1];
        let k = Labeling::NaturalBinary.bits_to_index(&bits, 4, 2).unwrap();
        assert_eq!(k, BigUint::from(11u32));
        assert_eq!(
            Labeling::NaturalBinary.index_to_bits(&k, 4, 2).unwrap(),
            bits.to_vec()
        );

        // r=2: identical labelings
        for value in 0..64u32 {
            let k = BigUint::from(value);
            let a = Labeling::NaturalBinary.index_to_bits(&k, 2, 6).unwrap();
            let b = Labeling::QuasiGray.index_to_bits(&k, 2, 6).unwrap();
            assert_eq!(a, b);
        }

        // wrong bit count
        assert!(Labeling::NaturalBinary.bits_to_index(&[1, 0], 4, 2).is_err());
    }

    #[test]
    fn encode_hand_trace_cubic() {
        let s = spec(LatticeFamily::Cubic, 2);
        let vc = VoronoiConstellation::new(s, 2, vec![0.25, 0.25]).unwrap();

        let c3 = vc.encode_internal(&BigUint::from(3u32)).unwrap();
        assert_eq!(c3, vec![0.75, 0.75]);

        let c1 = vc.encode_internal(&BigUint::from(1u32)).unwrap();
        assert_eq!(c1, vec![-0.25, 0.75]);

        // K = 0 maps to -a
        let c0 = vc.encode_internal(&BigUint::zero()).unwrap();
        assert_eq!(c0, vec![-0.25, -0.25]);

        // decode hand trace: y = (0.7, 0.8) -> w = (0.95, 1.05) -> K = 3
        assert_eq!(vc.decode_internal(&[0.7, 0.8]), BigUint::from(3u32));
    }

    #[test]
    fn zero_index_maps_to_minus_shift() {
        for (family, n, r) in [
            (LatticeFamily::A2, 2, 4),
            (LatticeFamily::D4, 4, 2),
            (LatticeFamily::E8, 8, 2),
        ] {
            let vc = VoronoiConstellation::with_random_shift(spec(family, n), r, 9).unwrap();
            let c = vc.encode_internal(&BigUint::zero()).unwrap();
            for (ci, ai) in c.iter().zip(vc.shift()) {
                assert!((ci + ai).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_roundtrip_e8_r4() {
        let vc = VoronoiConstellation::with_random_shift(spec(LatticeFamily::E8, 8), 4, 1).unwrap();
        assert_eq!(vc.size(), &BigUint::from(65_536u32));
        for k in (0..65_536u64).step_by(257) {
            let idx = BigUint::from(k);
            let y = vc.encode(&idx).unwrap();
            assert_eq!(vc.decode(&y), idx);
        }
    }

    #[test]
    fn roundtrip_within_packing_radius() {
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 4, 33).unwrap();
        let packing = vc.dmin_channel() / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..2_000 {
            let k = BigUint::from(rng.gen_range(0..256u32));
            let c = vc.encode(&k).unwrap();
            let mut noise: Vec<f64> = (0..c.len()).map(|_| rng.gen::<f64>() - 0.5).collect();
            let norm = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
            let target = packing * rng.gen_range(0.01..0.999);
            for v in &mut noise {
                *v *= target / norm;
            }
            let y: Vec<f64> = c.iter().zip(&noise).map(|(a, b)| a + b).collect();
            assert_eq!(vc.decode(&y), k);
        }
    }

    #[test]
    fn channel_energy_is_normalised() {
        for (family, n, r) in [
            (LatticeFamily::Cubic, 2, 4),
            (LatticeFamily::A2, 2, 4),
            (LatticeFamily::D4, 4, 2),
            (LatticeFamily::E8, 8, 2),
        ] {
            let vc = VoronoiConstellation::with_random_shift(spec(family, n), r, 5).unwrap();
            let points = vc.enumerate_channel_points(65_536).unwrap();
            let es: f64 =
                points.iter().map(|p| p.iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
                    / points.len() as f64;
            assert!(
                (es - vc.es_channel()).abs() < 1e-9,
                "family {family:?}: es {es}"
            );
        }
    }

    #[test]
    fn enumerated_points_are_distinct_members() {
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 4, 21).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut digits = vec![0u32; 4];
        for _ in 0..256u32 {
            let c = vc.encode_digits_internal(&digits);
            assert!(vc.contains_internal(&c));
            let key: Vec<i64> = c.iter().map(|v| (v * (1 << 20) as f64).round() as i64).collect();
            assert!(seen.insert(key), "duplicate constellation point");
            increment_digits(&mut digits, 4);
        }
        assert_eq!(seen.len(), 256);
    }

    #[test]
    fn sampled_energy_agrees_with_enumeration() {
        // D4 r=8: M=4096 enumerable; compare the exact energy with a
        // Monte-Carlo estimate.
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::D4, 4), 8, 77).unwrap();
        let exact = vc.es_internal();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let samples = 20_000usize;
        let mut acc = 0.0;
        let mut sq = 0.0;
        for _ in 0..samples {
            let digits: Vec<u32> = (0..4).map(|_| rng.gen_range(0..8)).collect();
            let c = vc.encode_digits_internal(&digits);
            let e: f64 = c.iter().map(|v| v * v).sum();
            acc += e;
            sq += e * e;
        }
        let mean = acc / samples as f64;
        let var = (sq / samples as f64 - mean * mean).max(0.0);
        let stderr = (var / samples as f64).sqrt();
        assert!(
            (mean - exact).abs() < 3.0 * stderr,
            "sampled {mean} vs exact {exact} (3se={})",
            3.0 * stderr
        );
    }

    #[test]
    fn rejects_invalid_configuration() {
        let s = spec(LatticeFamily::Cubic, 2);
        assert!(matches!(
            VoronoiConstellation::new(s.clone(), 3, vec![0.0, 0.0]),
            Err(Error::UnsupportedScale { r: 3 })
        ));
        assert!(matches!(
            VoronoiConstellation::new(s.clone(), 4, vec![0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        // (0.7, 0) decodes to (1, 0), not the origin
        assert!(matches!(
            VoronoiConstellation::new(s, 4, vec![0.7, 0.0]),
            Err(Error::ShiftOutsideCell)
        ));
    }

    proptest! {
        #[test]
        fn digits_index_roundtrip(values in proptest::collection::vec(0u32..16, 1..30)) {
            let k = digits_to_index(&values, 16).unwrap();
            let back = index_to_digits(&k, 16, values.len()).unwrap();
            prop_assert_eq!(back, values);
        }

        #[test]
        fn labeling_bits_roundtrip(bits in proptest::collection::vec(0u8..2, 24)) {
            for labeling in [Labeling::NaturalBinary, Labeling::QuasiGray] {
                // 24 bits = 12 digits of r=4, or 6 digits of r=16
                let k = labeling.bits_to_index(&bits, 4, 12).unwrap();
                prop_assert_eq!(labeling.index_to_bits(&k, 4, 12).unwrap(), bits.clone());
                let k = labeling.bits_to_index(&bits, 16, 6).unwrap();
                prop_assert_eq!(labeling.index_to_bits(&k, 16, 6).unwrap(), bits.clone());
            }
        }
    }

    #[test]
    fn leech_random_index_roundtrip() {
        let vc =
            VoronoiConstellation::with_random_shift(spec(LatticeFamily::Leech24, 24), 16, 3)
                .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let digits: Vec<u32> = (0..24).map(|_| rng.gen_range(0..16)).collect();
            let k = digits_to_index(&digits, 16).unwrap();
            let y = vc.encode(&k).unwrap();
            assert_eq!(vc.decode(&y), k);
        }
    }
}
