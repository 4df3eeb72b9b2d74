//! Supported lattices and exact coordinate arithmetic.
//!
//! Every lattice is handled in *internal* coordinates in which the generator
//! matrix has dyadic-rational entries (integers, or half-integers for `E8`),
//! so lattice points, coefficient recovery and squared distances are exact
//! in `f64`. Physical coordinates differ from internal ones by a per-lattice
//! scale `s` (with `s^2` rational), plus an orthonormal change of basis for
//! the hexagonal lattice, which lives in the zero-sum plane of `Z^3`
//! internally and in the usual two dimensions physically.
//!
//! Internal conventions:
//!
//! * `Z^N` — identity generator, `s = 1`.
//! * `A2` — basis `(1,-1,0)`, `(0,-1,1)` in the zero-sum plane, `s = sqrt(2)`;
//!   the physical images of the basis vectors are `[1, 0]` and
//!   `[1/2, sqrt(3)/2]`.
//! * `D4` — sign-and-permutation basis of the checkerboard lattice, `s = 1`.
//! * `E8` — union of `D8` and its half-integer coset, `s = 1`.
//! * `Leech24` — integer coordinates scaled by `sqrt(8)`: a vector belongs to
//!   the lattice iff its coordinates are all even with `x/2 mod 2` a Golay
//!   codeword and coordinate sum `0 mod 8`, or all odd with `(x-1)/2 mod 2` a
//!   Golay codeword and sum `4 mod 8`. The basis is the Hermite normal form
//!   of a fixed generating set, so it is deterministic.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::golay;
use crate::Result;

/// Absolute per-coefficient tolerance when validating that a point is a
/// lattice point.
pub const COEFF_TOLERANCE: f64 = 1e-6;

/// Candidate budget for exhaustive ball enumeration.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// The lattice families supported by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeFamily {
    Cubic,
    A2,
    D4,
    E8,
    Leech24,
}

impl fmt::Display for LatticeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LatticeFamily::Cubic => "cubic",
            LatticeFamily::A2 => "a2",
            LatticeFamily::D4 => "d4",
            LatticeFamily::E8 => "e8",
            LatticeFamily::Leech24 => "leech24",
        };
        f.write_str(name)
    }
}

impl FromStr for LatticeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cubic" | "z" | "zn" => Ok(LatticeFamily::Cubic),
            "a2" | "hex" | "hexagonal" => Ok(LatticeFamily::A2),
            "d4" => Ok(LatticeFamily::D4),
            "e8" => Ok(LatticeFamily::E8),
            "leech24" | "leech" => Ok(LatticeFamily::Leech24),
            other => Err(Error::UnsupportedLattice {
                family: other.to_string(),
                dim: 0,
            }),
        }
    }
}

/// An immutable lattice description: exact generator, its inverse, and the
/// minimum-distance data used everywhere else.
///
/// `generator_doubled` stores `2 G` row-major (`embed_dim x rank`) so all
/// entries are integers even for `E8`. `inverse` is the exact left inverse
/// of `G` rounded to `f64` (its entries are small rationals).
pub struct LatticeSpec {
    family: LatticeFamily,
    rank: usize,
    embed_dim: usize,
    generator_doubled: Vec<i64>,
    inverse: Vec<f64>,
    inverse_row_norms: Vec<f64>,
    dmin2_internal: f64,
    kissing: u64,
    coord_scale2: f64,
}

impl fmt::Debug for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeSpec")
            .field("family", &self.family)
            .field("rank", &self.rank)
            .field("embed_dim", &self.embed_dim)
            .field("dmin2_internal", &self.dmin2_internal)
            .field("kissing", &self.kissing)
            .finish()
    }
}

impl LatticeSpec {
    /// Build the lattice for a family/dimension pair.
    ///
    /// `Cubic` accepts any `n >= 1`; the other families have fixed dimension
    /// (2, 4, 8, 24) and reject anything else.
    pub fn new(family: LatticeFamily, n: usize) -> Result<Arc<Self>> {
        let unsupported = || Error::UnsupportedLattice {
            family: family.to_string(),
            dim: n,
        };
        let spec = match family {
            LatticeFamily::Cubic => {
                if n == 0 {
                    return Err(unsupported());
                }
                let mut gen2 = vec![0i64; n * n];
                for i in 0..n {
                    gen2[i * n + i] = 2;
                }
                Self::from_parts(family, n, n, gen2, 1.0, 2 * n as u64, 1.0)
            }
            LatticeFamily::A2 => {
                if n != 2 {
                    return Err(unsupported());
                }
                // Columns (1,-1,0) and (0,-1,1), doubled.
                let gen2 = vec![2, 0, -2, -2, 0, 2];
                Self::from_parts(family, 2, 3, gen2, 2.0, 6, 2.0)
            }
            LatticeFamily::D4 => {
                if n != 4 {
                    return Err(unsupported());
                }
                let cols: [[i64; 4]; 4] = [
                    [-1, -1, 0, 0],
                    [1, -1, 0, 0],
                    [0, 1, -1, 0],
                    [0, 0, 1, -1],
                ];
                Self::from_parts(family, 4, 4, columns_to_doubled(&cols), 2.0, 24, 1.0)
            }
            LatticeFamily::E8 => {
                if n != 8 {
                    return Err(unsupported());
                }
                Self::from_parts(family, 8, 8, e8_weight_basis_doubled()?, 2.0, 240, 1.0)
            }
            LatticeFamily::Leech24 => {
                if n != 24 {
                    return Err(unsupported());
                }
                let basis = leech_basis();
                let mut gen2 = vec![0i64; 24 * 24];
                for (j, row) in basis.iter().enumerate() {
                    for i in 0..24 {
                        gen2[i * 24 + j] = 2 * row[i];
                    }
                }
                Self::from_parts(family, 24, 24, gen2, 32.0, 196_560, 8.0)
            }
        };
        Ok(Arc::new(spec?))
    }

    fn from_parts(
        family: LatticeFamily,
        rank: usize,
        embed_dim: usize,
        generator_doubled: Vec<i64>,
        dmin2_internal: f64,
        kissing: u64,
        coord_scale2: f64,
    ) -> Result<Self> {
        let inverse = exact_left_inverse(&generator_doubled, embed_dim, rank)?;
        let inverse_row_norms = (0..rank)
            .map(|i| {
                inverse[i * embed_dim..(i + 1) * embed_dim]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        Ok(Self {
            family,
            rank,
            embed_dim,
            generator_doubled,
            inverse,
            inverse_row_norms,
            dmin2_internal,
            kissing,
            coord_scale2,
        })
    }

    pub fn family(&self) -> LatticeFamily {
        self.family
    }

    /// Lattice rank `N` (number of basis vectors, and of base-`r` digits).
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the internal coordinate space (`rank` except for `A2`).
    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    /// Dimension of the physical/channel coordinate space.
    pub fn physical_dim(&self) -> usize {
        self.rank
    }

    /// Squared minimum distance in internal coordinates.
    pub fn dmin2_internal(&self) -> f64 {
        self.dmin2_internal
    }

    /// Kissing number of the infinite lattice.
    pub fn kissing(&self) -> u64 {
        self.kissing
    }

    /// `s^2` where physical coordinates are internal coordinates over `s`.
    pub fn coord_scale2(&self) -> f64 {
        self.coord_scale2
    }

    /// Entry `2 * G[i][j]` of the doubled generator.
    pub(crate) fn gen2(&self, i: usize, j: usize) -> i64 {
        self.generator_doubled[i * self.rank + j]
    }

    /// Basis vector `g_j` in internal coordinates.
    pub fn basis_vector(&self, j: usize) -> Vec<f64> {
        (0..self.embed_dim)
            .map(|i| self.gen2(i, j) as f64 * 0.5)
            .collect()
    }

    /// The lattice point `G z`, exactly.
    pub fn lattice_point(&self, z: &[i64]) -> Result<Vec<f64>> {
        if z.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: z.len(),
            });
        }
        let mut out = vec![0.0; self.embed_dim];
        for i in 0..self.embed_dim {
            let mut acc: i128 = 0;
            for j in 0..self.rank {
                acc += self.gen2(i, j) as i128 * z[j] as i128;
            }
            out[i] = acc as f64 * 0.5;
        }
        Ok(out)
    }

    /// `G c` for real coefficients `c` (spans the lattice's subspace).
    pub fn lattice_point_f64(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.rank);
        (0..self.embed_dim)
            .map(|i| {
                (0..self.rank)
                    .map(|j| self.gen2(i, j) as f64 * 0.5 * coeffs[j])
                    .sum()
            })
            .collect()
    }

    /// Entry of the exact left inverse of `G`.
    pub(crate) fn inverse_entry(&self, row: usize, col: usize) -> f64 {
        self.inverse[row * self.embed_dim + col]
    }

    /// Integer coefficients of a lattice point: `z` with `G z = point`.
    ///
    /// Fails with [`Error::NotALatticePoint`] when the rounded coefficients
    /// miss by more than [`COEFF_TOLERANCE`] or do not reproduce the point.
    pub fn coeffs_of(&self, point: &[f64]) -> Result<Vec<i64>> {
        if point.len() != self.embed_dim {
            return Err(Error::DimensionMismatch {
                expected: self.embed_dim,
                got: point.len(),
            });
        }
        let mut z = vec![0i64; self.rank];
        let mut residual = 0.0f64;
        for i in 0..self.rank {
            let mut acc = 0.0;
            for k in 0..self.embed_dim {
                acc += self.inverse[i * self.embed_dim + k] * point[k];
            }
            let rounded = acc.round();
            residual = residual.max((acc - rounded).abs());
            z[i] = rounded as i64;
        }
        if residual > COEFF_TOLERANCE {
            return Err(Error::NotALatticePoint { residual });
        }
        let rebuilt = self.lattice_point(&z)?;
        let recon = rebuilt
            .iter()
            .zip(point)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if recon > COEFF_TOLERANCE {
            return Err(Error::NotALatticePoint { residual: recon });
        }
        Ok(z)
    }

    /// Map internal coordinates to physical coordinates.
    pub fn to_physical(&self, internal: &[f64]) -> Vec<f64> {
        let s = self.coord_scale2.sqrt();
        match self.family {
            LatticeFamily::A2 => {
                let u = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
                let v = [-1.0 / 6f64.sqrt(), -1.0 / 6f64.sqrt(), 2.0 / 6f64.sqrt()];
                vec![
                    internal.iter().zip(u).map(|(x, c)| x * c).sum::<f64>() / s,
                    internal.iter().zip(v).map(|(x, c)| x * c).sum::<f64>() / s,
                ]
            }
            _ => internal.iter().map(|x| x / s).collect(),
        }
    }

    /// Map physical coordinates back to internal coordinates.
    pub fn from_physical(&self, physical: &[f64]) -> Vec<f64> {
        let s = self.coord_scale2.sqrt();
        match self.family {
            LatticeFamily::A2 => {
                let u = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
                let v = [-1.0 / 6f64.sqrt(), -1.0 / 6f64.sqrt(), 2.0 / 6f64.sqrt()];
                (0..3)
                    .map(|i| s * (physical[0] * u[i] + physical[1] * v[i]))
                    .collect()
            }
            _ => physical.iter().map(|x| x * s).collect(),
        }
    }

    /// Structural membership test in internal coordinates, with a small
    /// snapping tolerance for floating-point inputs.
    pub fn contains_internal(&self, point: &[f64]) -> bool {
        let tol = 1e-9;
        let near_int = |x: f64| (x - x.round()).abs() < tol;
        match self.family {
            LatticeFamily::Cubic => point.iter().all(|&x| near_int(x)),
            LatticeFamily::A2 => {
                point.iter().all(|&x| near_int(x))
                    && point.iter().map(|x| x.round() as i64).sum::<i64>() == 0
            }
            LatticeFamily::D4 => {
                point.iter().all(|&x| near_int(x))
                    && point.iter().map(|x| x.round() as i64).sum::<i64>() % 2 == 0
            }
            LatticeFamily::E8 => {
                let ints = point.iter().all(|&x| near_int(x));
                let halves = point.iter().all(|&x| near_int(x - 0.5));
                if ints {
                    point.iter().map(|x| x.round() as i64).sum::<i64>() % 2 == 0
                } else if halves {
                    point
                        .iter()
                        .map(|x| (x - 0.5).round() as i64)
                        .sum::<i64>()
                        % 2
                        == 0
                } else {
                    false
                }
            }
            LatticeFamily::Leech24 => {
                if !point.iter().all(|&x| near_int(x)) {
                    return false;
                }
                let ints: Vec<i64> = point.iter().map(|x| x.round() as i64).collect();
                is_leech_point(&ints)
            }
        }
    }

    /// All lattice points within squared distance `radius2` of `center`
    /// (internal coordinates), by exhaustive search over the integer
    /// coefficient box that covers the ball.
    pub fn enumerate_ball(&self, center: &[f64], radius2: f64) -> Result<Vec<Vec<f64>>> {
        if center.len() != self.embed_dim {
            return Err(Error::DimensionMismatch {
                expected: self.embed_dim,
                got: center.len(),
            });
        }
        let radius = radius2.max(0.0).sqrt();
        let mut coeff_center = vec![0.0; self.rank];
        for i in 0..self.rank {
            coeff_center[i] = (0..self.embed_dim)
                .map(|k| self.inverse[i * self.embed_dim + k] * center[k])
                .sum();
        }
        let mut lo = vec![0i64; self.rank];
        let mut hi = vec![0i64; self.rank];
        let mut count: u128 = 1;
        for i in 0..self.rank {
            let half = radius * self.inverse_row_norms[i] + 1e-9;
            lo[i] = (coeff_center[i] - half).ceil() as i64;
            hi[i] = (coeff_center[i] + half).floor() as i64;
            if hi[i] < lo[i] {
                hi[i] = lo[i] - 1; // empty range
            }
            count = count.saturating_mul((hi[i] - lo[i] + 1).max(0) as u128);
            if count > ENUMERATION_BUDGET {
                return Err(Error::BudgetExceeded {
                    candidates: count,
                    budget: ENUMERATION_BUDGET,
                });
            }
        }
        let limit = radius2 * (1.0 + 1e-12) + 1e-12;
        let mut found = Vec::new();
        let mut z = lo.clone();
        if z.iter().zip(&hi).any(|(a, b)| a > b) {
            return Ok(found);
        }
        'outer: loop {
            let point = self.lattice_point(&z)?;
            let d2: f64 = point
                .iter()
                .zip(center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 <= limit {
                found.push(point);
            }
            // odometer increment
            for i in (0..self.rank).rev() {
                if z[i] < hi[i] {
                    z[i] += 1;
                    continue 'outer;
                }
                z[i] = lo[i];
                if i == 0 {
                    break 'outer;
                }
            }
        }
        Ok(found)
    }

    /// The minimal vectors of the infinite lattice, in internal coordinates.
    /// Exhaustive for every family except `Leech24`, whose 196 560 minimal
    /// vectors are enumerated from the Golay code instead.
    pub fn minimal_vectors(&self) -> Result<Vec<Vec<f64>>> {
        if self.family == LatticeFamily::Leech24 {
            return Ok(leech_minimal_vectors()
                .iter()
                .map(|v| v.iter().map(|&x| x as f64).collect())
                .collect());
        }
        let origin = vec![0.0; self.embed_dim];
        let mut points = self.enumerate_ball(&origin, self.dmin2_internal)?;
        points.retain(|p| p.iter().any(|&x| x.abs() > 1e-9));
        Ok(points)
    }
}

fn columns_to_doubled(cols: &[[i64; 4]; 4]) -> Vec<i64> {
    let mut gen2 = vec![0i64; 16];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            gen2[i * 4 + j] = 2 * col[i];
        }
    }
    gen2
}

/// Membership of an integer vector in the Leech lattice (scaled coordinates).
pub fn is_leech_point(x: &[i64]) -> bool {
    assert_eq!(x.len(), 24);
    let all_even = x.iter().all(|v| v.rem_euclid(2) == 0);
    let all_odd = x.iter().all(|v| v.rem_euclid(2) == 1);
    let sum: i64 = x.iter().sum();
    let code = golay::code();
    if all_even {
        let mut word = 0u32;
        for (j, &v) in x.iter().enumerate() {
            if (v / 2).rem_euclid(2) == 1 {
                word |= 1 << j;
            }
        }
        code.contains(word) && sum.rem_euclid(8) == 0
    } else if all_odd {
        let mut word = 0u32;
        for (j, &v) in x.iter().enumerate() {
            if ((v - 1) / 2).rem_euclid(2) == 1 {
                word |= 1 << j;
            }
        }
        code.contains(word) && sum.rem_euclid(8) == 4
    } else {
        false
    }
}

/// All 196 560 minimal vectors of the Leech lattice in scaled integer
/// coordinates (squared norm 32), generated from the Golay code:
/// `(+-2)^8 0^16` on octads with even sign count, `(+-3, +-1^23)` with signs
/// from a codeword, and `(+-4)^2 0^22`.
pub fn leech_minimal_vectors() -> Vec<[i8; 24]> {
    let code = golay::code();
    let mut out: Vec<[i8; 24]> = Vec::with_capacity(196_560);

    for octad in code.octads() {
        for signs in 0u32..256 {
            if signs.count_ones() % 2 != 0 {
                continue;
            }
            let mut v = [0i8; 24];
            for (bit, &pos) in octad.iter().enumerate() {
                v[pos] = if signs & (1 << bit) == 0 { 2 } else { -2 };
            }
            out.push(v);
        }
    }

    for pos3 in 0..24usize {
        for &cw in code.codewords() {
            let mut v = [0i8; 24];
            for (j, item) in v.iter_mut().enumerate() {
                let bit = (cw >> j) & 1;
                if j == pos3 {
                    *item = if bit == 1 { 3 } else { -3 };
                } else {
                    *item = if bit == 0 { 1 } else { -1 };
                }
            }
            out.push(v);
        }
    }

    for i in 0..24 {
        for j in (i + 1)..24 {
            for signs in 0..4u8 {
                let mut v = [0i8; 24];
                v[i] = if signs & 1 == 0 { 4 } else { -4 };
                v[j] = if signs & 2 == 0 { 4 } else { -4 };
                out.push(v);
            }
        }
    }

    out
}

/// Doubled simple roots of `E8` in the even-coordinate realisation.
const E8_SIMPLE_ROOTS_DOUBLED: [[i64; 8]; 8] = [
    [1, -1, -1, -1, -1, -1, -1, 1],
    [2, 2, 0, 0, 0, 0, 0, 0],
    [-2, 2, 0, 0, 0, 0, 0, 0],
    [0, -2, 2, 0, 0, 0, 0, 0],
    [0, 0, -2, 2, 0, 0, 0, 0],
    [0, 0, 0, -2, 2, 0, 0, 0],
    [0, 0, 0, 0, -2, 2, 0, 0],
    [0, 0, 0, 0, 0, -2, 2, 0],
];

/// The fundamental-weight basis of `E8` (doubled): the dual of the simple
/// roots. With this choice coefficient recovery multiplies by the short
/// simple roots, so every minimal vector has coefficients bounded by 2 and
/// coefficient-box enumeration stays small.
fn e8_weight_basis_doubled() -> Result<Vec<i64>> {
    // A[i][k] = alpha_i[k]; weights solve W^T A^T = I, i.e. W = A^{-1} read
    // column-wise.
    let a: Vec<BigRational> = E8_SIMPLE_ROOTS_DOUBLED
        .iter()
        .flatten()
        .map(|&v| BigRational::new(BigInt::from(v), BigInt::from(2)))
        .collect();
    let inv = invert_rational(&a, 8)?;
    // inv is A^{-1} with inv[k][j]; weight omega_j has coordinates inv[k][j].
    let mut gen2 = vec![0i64; 64];
    for k in 0..8 {
        for j in 0..8 {
            let doubled = &inv[k * 8 + j] * BigRational::from_integer(BigInt::from(2));
            assert!(doubled.is_integer(), "weight coordinates must be dyadic");
            gen2[k * 8 + j] = doubled.to_integer().to_i64().expect("small entry");
        }
    }
    Ok(gen2)
}

/// Deterministic basis of the Leech lattice: the row Hermite normal form of
/// a fixed generating set (doubled Golay words, `4(e_i + e_{i+1})`,
/// `8 e_23`, and the odd-coset glue vector `(-3, 1, ..., 1)`).
fn leech_basis() -> Vec<[i64; 24]> {
    let code = golay::code();
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for i in 0..12 {
        let cw = GolayRow(code.codewords()[1 << i]);
        rows.push((0..24).map(|j| 2 * cw.bit(j)).collect());
    }
    for i in 0..23 {
        let mut r = vec![0i128; 24];
        r[i] = 4;
        r[i + 1] = 4;
        rows.push(r);
    }
    let mut r = vec![0i128; 24];
    r[23] = 8;
    rows.push(r);
    let mut glue = vec![1i128; 24];
    glue[0] = -3;
    rows.push(glue);

    let hnf = hermite_normal_form(rows, 24);
    assert_eq!(hnf.len(), 24, "Leech generating set must have full rank");
    hnf.into_iter()
        .map(|row| {
            let mut arr = [0i64; 24];
            for (i, v) in row.into_iter().enumerate() {
                arr[i] = i64::try_from(v).expect("basis entry fits i64");
            }
            arr
        })
        .collect()
}

struct GolayRow(u32);

impl GolayRow {
    fn bit(&self, j: usize) -> i128 {
        ((self.0 >> j) & 1) as i128
    }
}

/// Row-style Hermite normal form over the integers: returns an upper
/// triangular basis (pivots positive, entries above a pivot reduced into
/// `[0, pivot)`), which is canonical for a given row span.
fn hermite_normal_form(mut rows: Vec<Vec<i128>>, n_cols: usize) -> Vec<Vec<i128>> {
    let mut rank = 0usize;
    for col in 0..n_cols {
        loop {
            let mut pivot: Option<usize> = None;
            for r in rank..rows.len() {
                if rows[r][col] != 0 {
                    pivot = match pivot {
                        Some(p) if rows[p][col].abs() <= rows[r][col].abs() => Some(p),
                        _ => Some(r),
                    };
                }
            }
            let Some(p) = pivot else { break };
            rows.swap(rank, p);
            let mut more = false;
            for r in rank + 1..rows.len() {
                if rows[r][col] != 0 {
                    let q = rows[r][col].div_euclid(rows[rank][col]);
                    for k in 0..n_cols {
                        rows[r][k] -= q * rows[rank][k];
                    }
                    if rows[r][col] != 0 {
                        more = true;
                    }
                }
            }
            if !more {
                break;
            }
        }
        if rank < rows.len() && rows[rank][col] != 0 {
            if rows[rank][col] < 0 {
                for k in 0..n_cols {
                    rows[rank][k] = -rows[rank][k];
                }
            }
            for r in 0..rank {
                let q = rows[r][col].div_euclid(rows[rank][col]);
                if q != 0 {
                    for k in 0..n_cols {
                        rows[r][k] -= q * rows[rank][k];
                    }
                }
            }
            rank += 1;
        }
    }
    rows.truncate(rank);
    rows
}

/// Exact left inverse of `G` (given as `2 G`), as `f64`. For square
/// generators this is the plain inverse; for the `A2` embedding it is
/// `(G^T G)^{-1} G^T`.
fn exact_left_inverse(gen2: &[i64], embed_dim: usize, rank: usize) -> Result<Vec<f64>> {
    let big = |v: i64| BigRational::from_integer(BigInt::from(v));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    // G as rationals, embed_dim x rank.
    let g: Vec<BigRational> = gen2.iter().map(|&v| big(v) * &half).collect();

    let (square, cols): (Vec<BigRational>, usize) = if embed_dim == rank {
        (g.clone(), rank)
    } else {
        // Normal matrix G^T G, rank x rank.
        let mut m = vec![BigRational::zero(); rank * rank];
        for i in 0..rank {
            for j in 0..rank {
                let mut acc = BigRational::zero();
                for k in 0..embed_dim {
                    acc += &g[k * rank + i] * &g[k * rank + j];
                }
                m[i * rank + j] = acc;
            }
        }
        (m, rank)
    };

    let inv = invert_rational(&square, cols)?;

    let full = if embed_dim == rank {
        inv
    } else {
        // (G^T G)^{-1} G^T, rank x embed_dim.
        let mut m = vec![BigRational::zero(); rank * embed_dim];
        for i in 0..rank {
            for j in 0..embed_dim {
                let mut acc = BigRational::zero();
                for k in 0..rank {
                    acc += &inv[i * rank + k] * &g[j * rank + k];
                }
                m[i * embed_dim + j] = acc;
            }
        }
        m
    };

    Ok(full
        .into_iter()
        .map(|r| r.to_f64().expect("inverse entry representable"))
        .collect())
}

/// Gauss-Jordan inversion over the rationals.
fn invert_rational(m: &[BigRational], n: usize) -> Result<Vec<BigRational>> {
    let mut a = m.to_vec();
    let mut inv = vec![BigRational::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = BigRational::one();
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r * n + col].is_zero())
            .ok_or_else(|| Error::Numerical("singular generator matrix".into()))?;
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
        }
        let pivot = a[col * n + col].clone();
        for k in 0..n {
            a[col * n + k] /= pivot.clone();
            inv[col * n + k] /= pivot.clone();
        }
        for r in 0..n {
            if r != col && !a[r * n + col].is_zero() {
                let factor = a[r * n + col].clone();
                for k in 0..n {
                    let av = &a[col * n + k] * &factor;
                    a[r * n + k] -= av;
                    let iv = &inv[col * n + k] * &factor;
                    inv[r * n + k] -= iv;
                }
            }
        }
    }
    Ok(inv)
}

/// Determinant of the generator matrix `G` (exact, for validation).
pub fn generator_determinant(spec: &LatticeSpec) -> BigRational {
    let n = spec.rank();
    assert_eq!(spec.embed_dim(), n, "determinant needs a square generator");
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut a: Vec<BigRational> = (0..n * n)
        .map(|idx| BigRational::from_integer(BigInt::from(spec.generator_doubled[idx])) * &half)
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        let pivot = a[col * n + col].clone();
        det *= pivot.clone();
        for r in col + 1..n {
            if !a[r * n + col].is_zero() {
                let factor = &a[r * n + col] / &pivot;
                for k in col..n {
                    let v = &a[col * n + k] * &factor;
                    a[r * n + k] -= v;
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn spec(family: LatticeFamily, n: usize) -> Arc<LatticeSpec> {
        LatticeSpec::new(family, n).unwrap()
    }

    #[test]
    fn rejects_invalid_family_dimension_pairs() {
        assert!(LatticeSpec::new(LatticeFamily::A2, 3).is_err());
        assert!(LatticeSpec::new(LatticeFamily::D4, 8).is_err());
        assert!(LatticeSpec::new(LatticeFamily::E8, 4).is_err());
        assert!(LatticeSpec::new(LatticeFamily::Leech24, 8).is_err());
        assert!(LatticeSpec::new(LatticeFamily::Cubic, 0).is_err());
    }

    #[test]
    fn cubic_identity_generator() {
        let s = spec(LatticeFamily::Cubic, 4);
        assert_eq!(s.dmin2_internal(), 1.0);
        assert_eq!(s.kissing(), 8);
        let p = s.lattice_point(&[3, -1, 0, 2]).unwrap();
        assert_eq!(p, vec![3.0, -1.0, 0.0, 2.0]);
    }

    #[test]
    fn cubic_lattice_point_identity() {
        let s = spec(LatticeFamily::Cubic, 2);
        let p = s.lattice_point(&[3, -1]).unwrap();
        assert_eq!(p, vec![3.0, -1.0]);
    }

    #[test]
    fn a2_physical_basis_matches_hexagonal_convention() {
        let s = spec(LatticeFamily::A2, 2);
        let g1 = s.to_physical(&s.basis_vector(0));
        let g2 = s.to_physical(&s.basis_vector(1));
        assert!((g1[0] - 1.0).abs() < 1e-12 && g1[1].abs() < 1e-12);
        assert!((g2[0] - 0.5).abs() < 1e-12);
        assert!((g2[1] - 3f64.sqrt() / 2.0).abs() < 1e-12);

        // z = (1, 1) lands on (3/2, sqrt(3)/2) physically.
        let p = s.to_physical(&s.lattice_point(&[1, 1]).unwrap());
        assert!((p[0] - 1.5).abs() < 1e-12);
        assert!((p[1] - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn a2_embedding_roundtrip() {
        let s = spec(LatticeFamily::A2, 2);
        for i in 0..100 {
            let phys = [i as f64 * 0.13 - 6.0, (i * i % 17) as f64 * 0.21 - 1.7];
            let internal = s.from_physical(&phys);
            assert!(
                internal.iter().sum::<f64>().abs() < 1e-12,
                "embedding must stay in the zero-sum plane"
            );
            let back = s.to_physical(&internal);
            assert!((back[0] - phys[0]).abs() < 1e-12);
            assert!((back[1] - phys[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn d4_basis_vector_has_norm_two() {
        let s = spec(LatticeFamily::D4, 4);
        let p = s.lattice_point(&[1, 0, 0, 0]).unwrap();
        let norm2: f64 = p.iter().map(|x| x * x).sum();
        assert_eq!(norm2, 2.0);
        assert!(s.contains_internal(&p));
    }

    #[test]
    fn e8_sum_of_first_two_basis_vectors() {
        // coefficient recovery is linear: g1 + g2 has coefficients (1,1,0,...)
        let s = spec(LatticeFamily::E8, 8);
        let p = s.lattice_point(&[1, 1, 0, 0, 0, 0, 0, 0]).unwrap();
        let z = s.coeffs_of(&p).unwrap();
        assert_eq!(z, vec![1, 1, 0, 0, 0, 0, 0, 0]);
        assert!(s.contains_internal(&p));
        // basis vectors are lattice members in the structural sense
        for j in 0..8 {
            assert!(s.contains_internal(&s.basis_vector(j)), "basis vector {j}");
        }
    }

    #[test]
    fn coeffs_of_rejects_non_lattice_points() {
        let s = spec(LatticeFamily::Cubic, 2);
        let err = s.coeffs_of(&[0.5, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NotALatticePoint { .. }));
        let z = s.coeffs_of(&[5.0, -2.0]).unwrap();
        assert_eq!(z, vec![5, -2]);
    }

    #[test]
    fn coeffs_roundtrip_random_integer_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (family, n) in [
            (LatticeFamily::Cubic, 6),
            (LatticeFamily::A2, 2),
            (LatticeFamily::D4, 4),
            (LatticeFamily::E8, 8),
            (LatticeFamily::Leech24, 24),
        ] {
            let s = spec(family, n);
            for _ in 0..10_000 {
                let z: Vec<i64> = (0..s.rank()).map(|_| rng.gen_range(-50..=50)).collect();
                let p = s.lattice_point(&z).unwrap();
                assert_eq!(s.coeffs_of(&p).unwrap(), z, "family {family}");
            }
        }
    }

    #[test]
    fn enumerate_ball_on_the_line() {
        let s = spec(LatticeFamily::Cubic, 1);
        let pts = s.enumerate_ball(&[0.2], 1.0).unwrap();
        let mut vals: Vec<i64> = pts.iter().map(|p| p[0] as i64).collect();
        vals.sort_unstable();
        assert_eq!(vals, vec![0, 1]);
    }

    #[test]
    fn kissing_numbers_by_enumeration() {
        for (family, n) in [
            (LatticeFamily::Cubic, 4),
            (LatticeFamily::A2, 2),
            (LatticeFamily::D4, 4),
        ] {
            let s = spec(family, n);
            let ball = s
                .enumerate_ball(&vec![0.0; s.embed_dim()], s.dmin2_internal())
                .unwrap();
            assert_eq!(
                ball.len() as u64,
                s.kissing() + 1,
                "family {family}: ball holds origin plus kissing vectors"
            );
        }
    }

    #[test]
    fn e8_kissing_number_by_bounded_enumeration() {
        // Exhaustive search over |z|_inf <= 3 covers every vector of squared
        // norm 2.
        let s = spec(LatticeFamily::E8, 8);
        let mut count = 0u64;
        let mut z = [-3i64; 8];
        'outer: loop {
            let mut norm2_x4: i64 = 0;
            for i in 0..8 {
                let mut acc = 0i64;
                for j in 0..8 {
                    acc += s.gen2(i, j) * z[j];
                }
                norm2_x4 += acc * acc;
            }
            if norm2_x4 == 8 {
                count += 1;
            }
            for i in (0..8).rev() {
                if z[i] < 3 {
                    z[i] += 1;
                    continue 'outer;
                }
                z[i] = -3;
                if i == 0 {
                    break 'outer;
                }
            }
        }
        assert_eq!(count, 240);
        assert_eq!(s.kissing(), 240);
    }

    #[test]
    fn e8_minimal_vectors_via_ball() {
        let s = spec(LatticeFamily::E8, 8);
        let min = s.minimal_vectors().unwrap();
        assert_eq!(min.len(), 240);
        for v in &min {
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm2 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_budget_enforced() {
        let s = spec(LatticeFamily::Cubic, 8);
        let err = s.enumerate_ball(&[0.0; 8], 400.0).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn leech_basis_is_valid() {
        let s = spec(LatticeFamily::Leech24, 24);
        assert_eq!(s.dmin2_internal(), 32.0);
        assert_eq!(s.kissing(), 196_560);
        // Every basis vector is a lattice point structurally.
        for j in 0..24 {
            let g = s.basis_vector(j);
            let ints: Vec<i64> = g.iter().map(|&x| x.round() as i64).collect();
            assert!(
                is_leech_point(&ints),
                "basis vector {j} fails membership: {ints:?}"
            );
        }
        // Covolume in scaled coordinates is 8^12.
        let det = generator_determinant(&s).abs();
        let expected = BigRational::from_integer(BigInt::from(8u64).pow(12));
        assert_eq!(det, expected);
    }

    #[test]
    fn leech_minimal_vector_census() {
        let vectors = leech_minimal_vectors();
        assert_eq!(vectors.len(), 196_560);
        let mut seen = std::collections::HashSet::with_capacity(vectors.len());
        for v in &vectors {
            let norm2: i64 = v.iter().map(|&x| (x as i64) * (x as i64)).sum();
            assert_eq!(norm2, 32);
            let ints: Vec<i64> = v.iter().map(|&x| x as i64).collect();
            assert!(is_leech_point(&ints));
            assert!(seen.insert(*v), "duplicate minimal vector");
        }
    }

    #[test]
    fn leech_generating_set_lies_in_basis_span() {
        let s = spec(LatticeFamily::Leech24, 24);
        let code = golay::code();
        let mut gens: Vec<Vec<f64>> = Vec::new();
        for i in 0..12 {
            let cw = code.codewords()[1 << i];
            gens.push((0..24).map(|j| 2.0 * ((cw >> j) & 1) as f64).collect());
        }
        for i in 0..23 {
            let mut r = vec![0.0; 24];
            r[i] = 4.0;
            r[i + 1] = 4.0;
            gens.push(r);
        }
        let mut r = vec![0.0; 24];
        r[23] = 8.0;
        gens.push(r);
        let mut glue = vec![1.0; 24];
        glue[0] = -3.0;
        gens.push(glue);
        for g in gens {
            assert!(s.coeffs_of(&g).is_ok(), "generator not in basis span: {g:?}");
        }
    }
}
