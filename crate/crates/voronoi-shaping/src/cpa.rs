//! Exact closest-point algorithms.
//!
//! [`closest_point`] returns the nearest lattice point to an arbitrary real
//! vector, exactly (not bounded-distance), with cost independent of any
//! constellation built on top of the lattice. Ties are broken
//! deterministically: rounding ties go half-up, and coset comparisons keep
//! the first candidate in a fixed enumeration order. Under continuous noise
//! ties occur with probability zero.
//!
//! Decoders:
//! * `Z^N` — per-coordinate rounding.
//! * `D_N` — round everything, then re-round the worst coordinate when the
//!   parity constraint fails.
//! * `A_2` — rounding in the zero-sum embedding with a deficiency fix.
//! * `E_8` — closest of the two `D_8` cosets.
//! * `Leech24` — exact maximum-likelihood search over both half-lattice
//!   cosets of all 4096 Golay codewords, with a per-codeword parity repair;
//!   `O(2 * 4096 * 24)` per call.
//!
//! [`closest_point_bruteforce`] is an independent oracle: a complete
//! radius-bounded enumeration of the coefficient lattice (pruned by a
//! triangular decomposition of the Gram matrix, which only shrinks the
//! search — every candidate in the ball is visited).

use crate::error::Error;
use crate::golay;
use crate::lattice::{LatticeFamily, LatticeSpec};
use crate::Result;

/// Deterministic rounding: exact halves go up.
#[inline]
pub(crate) fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Nearest lattice point to `w` in internal coordinates.
pub fn closest_point(spec: &LatticeSpec, w: &[f64]) -> Vec<f64> {
    assert_eq!(
        w.len(),
        spec.embed_dim(),
        "closest_point expects internal coordinates"
    );
    match spec.family() {
        LatticeFamily::Cubic => w.iter().copied().map(round_half_up).collect(),
        LatticeFamily::D4 => closest_dn(w),
        LatticeFamily::A2 => closest_zero_sum(w),
        LatticeFamily::E8 => closest_e8(w),
        LatticeFamily::Leech24 => closest_leech(w),
    }
}

/// `w` folded into the Voronoi region of the origin: `w - closest_point(w)`.
pub fn fold_to_cell(spec: &LatticeSpec, w: &[f64]) -> Vec<f64> {
    let nearest = closest_point(spec, w);
    w.iter().zip(&nearest).map(|(a, b)| a - b).collect()
}

/// `D_N` decoding: round all coordinates; if the coordinate sum is odd,
/// re-round the coordinate with the largest rounding error the other way.
fn closest_dn(w: &[f64]) -> Vec<f64> {
    let mut x: Vec<f64> = w.iter().copied().map(round_half_up).collect();
    let sum: i64 = x.iter().map(|&v| v as i64).sum();
    if sum.rem_euclid(2) == 1 {
        let mut worst = 0usize;
        let mut worst_err = -1.0;
        for (i, (&wi, &xi)) in w.iter().zip(&x).enumerate() {
            let err = (wi - xi).abs();
            if err > worst_err {
                worst_err = err;
                worst = i;
            }
        }
        x[worst] += if w[worst] >= x[worst] { 1.0 } else { -1.0 };
    }
    x
}

/// `A_2` in the zero-sum embedding: round, then repair the coordinate-sum
/// deficiency by re-rounding the coordinates where that is cheapest.
fn closest_zero_sum(w: &[f64]) -> Vec<f64> {
    // Distances to zero-sum lattice points are unaffected by removing the
    // mean, and a zero-sum input keeps the deficiency small.
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let centered: Vec<f64> = w.iter().map(|v| v - mean).collect();
    let mut x: Vec<f64> = centered.iter().copied().map(round_half_up).collect();
    let deficiency: i64 = x.iter().map(|&v| v as i64).sum();
    if deficiency != 0 {
        let mut order: Vec<usize> = (0..w.len()).collect();
        // fractional part of each coordinate, in [-1/2, 1/2)
        let frac: Vec<f64> = centered.iter().zip(&x).map(|(a, b)| a - b).collect();
        if deficiency > 0 {
            // decrement the coordinates rounded up the furthest
            order.sort_by(|&a, &b| frac[a].partial_cmp(&frac[b]).unwrap().then(a.cmp(&b)));
            for &i in order.iter().take(deficiency as usize) {
                x[i] -= 1.0;
            }
        } else {
            order.sort_by(|&a, &b| frac[b].partial_cmp(&frac[a]).unwrap().then(a.cmp(&b)));
            for &i in order.iter().take((-deficiency) as usize) {
                x[i] += 1.0;
            }
        }
    }
    x
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `E_8` as the union of `D_8` and its half-integer coset.
fn closest_e8(w: &[f64]) -> Vec<f64> {
    let integral = closest_dn(w);
    let shifted: Vec<f64> = w.iter().map(|v| v - 0.5).collect();
    let mut coset = closest_dn(&shifted);
    for v in &mut coset {
        *v += 0.5;
    }
    if dist2(w, &coset) < dist2(w, &integral) {
        coset
    } else {
        integral
    }
}

/// Exact Leech decoding over the Golay cosets.
///
/// Coordinates of lattice points satisfy `x_i = t_i (mod 4)` with
/// `t_i = q + 2 c_i` for coset `q` in `{0, 1}` and codeword bit `c_i`, plus
/// a global constraint equivalent to `sum((x_i - t_i) / 4) = q (mod 2)`.
/// Per class the per-coordinate optimum is independent, and the parity
/// constraint costs at most one re-rounding of the cheapest coordinate.
fn closest_leech(w: &[f64]) -> Vec<f64> {
    let code = golay::code();
    let mut best_cost = f64::INFINITY;
    let mut best_q = 0usize;
    let mut best_cw = 0u32;

    let mut penalty = [[0.0f64; 24]; 2];
    let mut flip_cost = [[0.0f64; 24]; 2];
    let mut step_parity = [[0u8; 24]; 2];

    for q in 0..2usize {
        for (class, row_t) in [(0usize, q as f64), (1usize, q as f64 + 2.0)] {
            for i in 0..24 {
                let k = round_half_up((w[i] - row_t) / 4.0);
                let n = row_t + 4.0 * k;
                let d = w[i] - n;
                penalty[class][i] = d * d;
                flip_cost[class][i] = 16.0 - 8.0 * d.abs();
                step_parity[class][i] = (k as i64).rem_euclid(2) as u8;
            }
        }
        let base_cost: f64 = penalty[0].iter().sum();
        let base_parity: u8 = step_parity[0].iter().fold(0, |acc, &v| acc ^ v);
        let mut diff = [0.0f64; 24];
        let mut toggle_mask = 0u32;
        for i in 0..24 {
            diff[i] = penalty[1][i] - penalty[0][i];
            if step_parity[1][i] != step_parity[0][i] {
                toggle_mask |= 1 << i;
            }
        }

        // Per-hextet lookup tables: codeword cost becomes four table adds,
        // and the cheapest parity repair four table mins.
        let mut sum_t = [[0.0f64; 64]; 4];
        let mut min_t = [[0.0f64; 64]; 4];
        for t in 0..4 {
            for b in 0..64usize {
                let mut acc = 0.0;
                let mut mn = f64::INFINITY;
                for j in 0..6 {
                    let i = 6 * t + j;
                    if (b >> j) & 1 == 1 {
                        acc += diff[i];
                        mn = mn.min(flip_cost[1][i]);
                    } else {
                        mn = mn.min(flip_cost[0][i]);
                    }
                }
                sum_t[t][b] = acc;
                min_t[t][b] = mn;
            }
        }

        for &cw in code.codewords() {
            let b0 = (cw & 63) as usize;
            let b1 = ((cw >> 6) & 63) as usize;
            let b2 = ((cw >> 12) & 63) as usize;
            let b3 = ((cw >> 18) & 63) as usize;
            let mut cost =
                base_cost + sum_t[0][b0] + sum_t[1][b1] + sum_t[2][b2] + sum_t[3][b3];
            if cost >= best_cost {
                continue;
            }
            let parity = base_parity ^ ((cw & toggle_mask).count_ones() as u8 & 1);
            if parity != q as u8 {
                cost += min_t[0][b0]
                    .min(min_t[1][b1])
                    .min(min_t[2][b2])
                    .min(min_t[3][b3]);
                if cost >= best_cost {
                    continue;
                }
            }
            best_cost = cost;
            best_q = q;
            best_cw = cw;
        }
    }

    // Rebuild the winning point.
    let q = best_q;
    let cw = best_cw;
    let mut x = [0.0f64; 24];
    let mut parity = 0u8;
    let mut flip_idx = 0usize;
    let mut min_flip = f64::INFINITY;
    let mut deltas = [0.0f64; 24];
    for i in 0..24 {
        let t = q as f64 + 2.0 * ((cw >> i) & 1) as f64;
        let k = round_half_up((w[i] - t) / 4.0);
        let n = t + 4.0 * k;
        let d = w[i] - n;
        x[i] = n;
        deltas[i] = d;
        parity ^= (k as i64).rem_euclid(2) as u8;
        let fc = 16.0 - 8.0 * d.abs();
        if fc < min_flip {
            min_flip = fc;
            flip_idx = i;
        }
    }
    if parity != q as u8 {
        x[flip_idx] += if deltas[flip_idx] >= 0.0 { 4.0 } else { -4.0 };
    }
    x.to_vec()
}

/// Exhaustive nearest-point search: complete enumeration of every lattice
/// point within a radius that is guaranteed to contain the optimum (the
/// rounded least-squares coefficient point). Independent of
/// [`closest_point`]; intended as a test oracle.
pub fn closest_point_bruteforce(spec: &LatticeSpec, w: &[f64]) -> Result<Vec<f64>> {
    const NODE_BUDGET: u64 = 10_000_000;
    let rank = spec.rank();
    let embed = spec.embed_dim();
    assert_eq!(w.len(), embed);

    // Least-squares coefficients and the off-span residual (zero except A2).
    let mut target = vec![0.0f64; rank];
    for i in 0..rank {
        let mut acc = 0.0;
        for k in 0..embed {
            acc += inverse_entry(spec, i, k) * w[k];
        }
        target[i] = acc;
    }
    let projected = spec.lattice_point_f64(&target);
    let off_span = dist2(&projected, w);

    // Initial in-span radius from the rounded-coefficient (Babai) point.
    let babai: Vec<i64> = target.iter().map(|&c| round_half_up(c) as i64).collect();
    let babai_point = spec.lattice_point(&babai)?;
    let mut best_in_span = (dist2(&babai_point, w) - off_span).max(0.0) * (1.0 + 1e-12) + 1e-12;
    let mut best_z = babai;

    // Upper-triangular factor of the Gram matrix.
    let tri = gram_cholesky_upper(spec)?;

    let mut z = vec![0i64; rank];
    let mut nodes = 0u64;
    enumerate_level(
        spec,
        &tri,
        &target,
        rank,
        &mut z,
        0.0,
        &mut best_in_span,
        &mut best_z,
        &mut nodes,
        NODE_BUDGET,
    )?;

    spec.lattice_point(&best_z)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level(
    spec: &LatticeSpec,
    tri: &[f64],
    target: &[f64],
    level: usize,
    z: &mut [i64],
    partial: f64,
    best: &mut f64,
    best_z: &mut Vec<i64>,
    nodes: &mut u64,
    budget: u64,
) -> Result<()> {
    let rank = target.len();
    let i = level - 1;
    let mut offset = 0.0;
    for j in level..rank {
        offset += tri[i * rank + j] * (z[j] as f64 - target[j]);
    }
    let rem = (*best - partial).max(0.0).sqrt();
    let rii = tri[i * rank + i];
    let lo = (target[i] + (-rem - offset) / rii - 1e-12).ceil() as i64;
    let hi = (target[i] + (rem - offset) / rii + 1e-12).floor() as i64;
    for zi in lo..=hi {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::BudgetExceeded {
                candidates: *nodes as u128,
                budget: budget as u128,
            });
        }
        z[i] = zi;
        let u = rii * (zi as f64 - target[i]) + offset;
        let cost = partial + u * u;
        if cost > *best {
            continue;
        }
        if i == 0 {
            if cost < *best {
                *best = cost;
                best_z.copy_from_slice(z);
            }
        } else {
            enumerate_level(spec, tri, target, i, z, cost, best, best_z, nodes, budget)?;
        }
    }
    Ok(())
}

fn inverse_entry(spec: &LatticeSpec, row: usize, col: usize) -> f64 {
    spec.inverse_entry(row, col)
}

/// Upper-triangular `R` with `R^T R = G^T G`.
fn gram_cholesky_upper(spec: &LatticeSpec) -> Result<Vec<f64>> {
    let rank = spec.rank();
    let embed = spec.embed_dim();
    let mut gram = vec![0.0f64; rank * rank];
    for i in 0..rank {
        for j in 0..rank {
            let mut acc = 0i64;
            for k in 0..embed {
                acc += spec.gen2(k, i) * spec.gen2(k, j);
            }
            gram[i * rank + j] = acc as f64 / 4.0;
        }
    }
    let mut r = vec![0.0f64; rank * rank];
    for i in 0..rank {
        for j in i..rank {
            let mut acc = gram[i * rank + j];
            for k in 0..i {
                acc -= r[k * rank + i] * r[k * rank + j];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(Error::Numerical("Gram matrix not positive definite".into()));
                }
                r[i * rank + j] = acc.sqrt();
            } else {
                r[i * rank + j] = acc / r[i * rank + i];
            }
        }
    }
    Ok(r)
}
