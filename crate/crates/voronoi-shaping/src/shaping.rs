//! Shift-vector selection.
//!
//! The shift translates the scaled Voronoi boundary; it never changes the
//! constellation size but it does change the average energy. This module
//! provides uniform sampling of shifts from the Voronoi region of the
//! origin, a safeguarded centroid iteration that lowers the energy, and a
//! Monte-Carlo estimate of the relative energy penalty of random shifts
//! against the optimised one, which shrinks as constellations grow.

use rand::Rng;

use crate::codec;
use crate::cpa;
use crate::lattice::LatticeSpec;
use crate::rng;
use crate::Result;

const SAMPLE_TAG: u64 = 0x5348_4946;
const OPT_TAG: u64 = 0x4f50_5421;
const NUDGE_TAG: u64 = 0x4e55_4447;

/// Draw a shift uniformly from the Voronoi region of the origin: take a
/// uniform point of the fundamental parallelotope and fold it. The result
/// always decodes to the origin.
pub fn sample_shift_uniform(spec: &LatticeSpec, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, &[SAMPLE_TAG]);
    sample_shift_with(spec, &mut rng)
}

fn sample_shift_with(spec: &LatticeSpec, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let coeffs: Vec<f64> = (0..spec.rank()).map(|_| rng.gen::<f64>()).collect();
        let x = spec.lattice_point_f64(&coeffs);
        let folded = cpa::fold_to_cell(spec, &x);
        // Boundary ties have probability zero but would break the
        // decodes-to-origin invariant; resample in that case.
        if cpa::closest_point(spec, &folded).iter().all(|&v| v == 0.0) {
            return folded;
        }
    }
}

/// Settings for [`optimize_shift`].
#[derive(Debug, Clone)]
pub struct OptimizeParams {
    /// Maximum accepted iterations.
    pub max_iter: usize,
    /// Relative energy tolerance for convergence.
    pub tol: f64,
    /// Sample count per energy evaluation when the constellation is too
    /// large to enumerate.
    pub energy_samples: usize,
    /// Independent restarts; the lowest-energy result wins.
    pub restarts: usize,
}

impl Default for OptimizeParams {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-6,
            energy_samples: 100_000,
            restarts: 1,
        }
    }
}

/// Outcome of the iterative shift search.
#[derive(Debug, Clone)]
pub struct OptimizeResult {
    /// The optimised shift, folded into the Voronoi region and nudged off
    /// any exact cell boundary.
    pub shift: Vec<f64>,
    /// Energy at the returned shift (internal coordinates).
    pub energy: f64,
    /// Accepted iterations.
    pub iterations: usize,
    /// Whether the relative-improvement tolerance was reached.
    pub converged: bool,
    /// Energy after each accepted iterate, starting with the initial shift.
    pub history: Vec<f64>,
}

/// Average energy and centroid of the constellation for a given shift.
fn constellation_stats(
    spec: &LatticeSpec,
    r: u32,
    shift: &[f64],
    samples: Option<usize>,
    seed: u64,
) -> (f64, Vec<f64>) {
    let dim = spec.embed_dim();
    let n = spec.rank();
    let mut energy = 0.0;
    let mut centroid = vec![0.0; dim];
    let mut count = 0usize;
    let mut digits = vec![0u32; n];
    match samples {
        None => {
            let m = (r as u64).pow(n as u32);
            for _ in 0..m {
                let c = codec::fold_digits(spec, r, shift, &digits);
                energy += c.iter().map(|v| v * v).sum::<f64>();
                for (acc, v) in centroid.iter_mut().zip(&c) {
                    *acc += v;
                }
                count += 1;
                codec::increment_digits(&mut digits, r);
            }
        }
        Some(k) => {
            let mut rng = rng::stream(seed, &[OPT_TAG, 0x5354_4154]);
            for _ in 0..k {
                for d in digits.iter_mut() {
                    *d = rng.gen_range(0..r);
                }
                let c = codec::fold_digits(spec, r, shift, &digits);
                energy += c.iter().map(|v| v * v).sum::<f64>();
                for (acc, v) in centroid.iter_mut().zip(&c) {
                    *acc += v;
                }
                count += 1;
            }
        }
    }
    for v in centroid.iter_mut() {
        *v /= count as f64;
    }
    (energy / count as f64, centroid)
}

/// Iterative energy minimisation: move the shift by the constellation
/// centroid, re-deriving membership each step, and accept a step only if
/// the recomputed energy decreases (otherwise halve it). The result is
/// folded back into the Voronoi region and nudged off exact boundaries.
pub fn optimize_shift(
    spec: &LatticeSpec,
    r: u32,
    params: &OptimizeParams,
    seed: u64,
) -> Result<OptimizeResult> {
    let m = (r as u64).checked_pow(spec.rank() as u32);
    let samples = match m {
        Some(m) if m <= codec::ENUMERATION_LIMIT => None,
        _ => Some(params.energy_samples),
    };

    let mut best: Option<OptimizeResult> = None;
    for restart in 0..params.restarts.max(1) {
        let candidate = optimize_once(spec, r, params, samples, seed, restart as u64)?;
        best = match best {
            Some(prev) if prev.energy <= candidate.energy => Some(prev),
            _ => Some(candidate),
        };
    }
    Ok(best.expect("at least one restart"))
}

fn optimize_once(
    spec: &LatticeSpec,
    r: u32,
    params: &OptimizeParams,
    samples: Option<usize>,
    seed: u64,
    restart: u64,
) -> Result<OptimizeResult> {
    let mut rng = rng::stream(seed, &[OPT_TAG, restart]);
    let mut shift = sample_shift_with(spec, &mut rng);
    let eval_seed = seed ^ restart.rotate_left(32);
    let (mut energy, mut centroid) = constellation_stats(spec, r, &shift, samples, eval_seed);
    let mut history = vec![energy];
    let mut iterations = 0usize;
    let mut converged = false;

    'outer: for _ in 0..params.max_iter {
        let mut step_scale = 1.0f64;
        // Halve the centroid step until it improves the energy.
        for _ in 0..8 {
            let candidate: Vec<f64> = shift
                .iter()
                .zip(&centroid)
                .map(|(a, c)| a + step_scale * c)
                .collect();
            let candidate = cpa::fold_to_cell(spec, &candidate);
            let (cand_energy, cand_centroid) =
                constellation_stats(spec, r, &candidate, samples, eval_seed);
            if cand_energy < energy {
                let improvement = (energy - cand_energy) / energy.max(f64::MIN_POSITIVE);
                shift = candidate;
                energy = cand_energy;
                centroid = cand_centroid;
                history.push(energy);
                iterations += 1;
                if improvement < params.tol {
                    converged = true;
                    break 'outer;
                }
                continue 'outer;
            }
            step_scale *= 0.5;
        }
        // No improving step at any scale: local optimum.
        converged = true;
        break;
    }

    let shift = nudge_off_boundary(spec, shift, seed ^ restart);
    Ok(OptimizeResult {
        shift,
        energy,
        iterations,
        converged,
        history,
    })
}

/// Perturb a shift by a tiny generic vector so it avoids exact Voronoi
/// boundaries (lattice points on the scaled boundary make membership
/// tie-dependent), then fold it back into the cell.
fn nudge_off_boundary(spec: &LatticeSpec, shift: Vec<f64>, seed: u64) -> Vec<f64> {
    let scale = spec.dmin2_internal().sqrt() * 1e-9;
    let mut rng = rng::stream(seed, &[NUDGE_TAG]);
    for _ in 0..64 {
        let jitter: Vec<f64> = (0..shift.len())
            .map(|_| scale * (rng.gen::<f64>() - 0.5))
            .collect();
        let mut moved: Vec<f64> = shift.iter().zip(&jitter).map(|(a, j)| a + j).collect();
        if spec.embed_dim() != spec.rank() {
            // keep A2 shifts inside the zero-sum plane
            let mean = moved.iter().sum::<f64>() / moved.len() as f64;
            for v in &mut moved {
                *v -= mean;
            }
        }
        let folded = cpa::fold_to_cell(spec, &moved);
        if cpa::closest_point(spec, &folded).iter().all(|&v| v == 0.0) {
            return folded;
        }
    }
    shift
}

/// Monte-Carlo estimate of the relative energy penalty of random shifts.
#[derive(Debug, Clone)]
pub struct MuEstimate {
    /// `(E_a[E_s] - E_opt) / E_opt`.
    pub mu: f64,
    /// Standard error of `mu` from the shift-to-shift spread.
    pub std_err: f64,
    /// Mean energy over random shifts.
    pub es_mean: f64,
    /// Energy of the optimised shift.
    pub es_opt: f64,
    pub n_samples: usize,
}

/// Estimate the normalised energy gap between randomly chosen and optimised
/// shifts for the `(spec, r)` constellation family.
pub fn estimate_mu(spec: &LatticeSpec, r: u32, n_samples: usize, seed: u64) -> Result<MuEstimate> {
    estimate_mu_with(spec, r, n_samples, seed, &OptimizeParams::default())
}

/// [`estimate_mu`] with explicit optimisation settings (used to trim the
/// budget for very large constellations).
pub fn estimate_mu_with(
    spec: &LatticeSpec,
    r: u32,
    n_samples: usize,
    seed: u64,
    params: &OptimizeParams,
) -> Result<MuEstimate> {
    assert!(n_samples >= 2, "need at least two shift samples");
    let m = (r as u64).checked_pow(spec.rank() as u32);
    let samples = match m {
        Some(m) if m <= codec::ENUMERATION_LIMIT => None,
        _ => Some(params.energy_samples),
    };

    let opt = optimize_shift(spec, r, params, seed)?;

    let mut energies = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let shift = sample_shift_uniform(spec, seed ^ (0xA5A5 + i as u64).wrapping_mul(0x9E37));
        let (es, _) = constellation_stats(spec, r, &shift, samples, seed ^ i as u64);
        energies.push(es);
    }
    let mean = energies.iter().sum::<f64>() / n_samples as f64;
    let var = energies
        .iter()
        .map(|e| (e - mean) * (e - mean))
        .sum::<f64>()
        / (n_samples as f64 - 1.0);
    let stderr = (var / n_samples as f64).sqrt();

    Ok(MuEstimate {
        mu: (mean - opt.energy) / opt.energy,
        std_err: stderr / opt.energy,
        es_mean: mean,
        es_opt: opt.energy,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeFamily;
    use std::sync::Arc;

    fn spec(family: LatticeFamily, n: usize) -> Arc<LatticeSpec> {
        LatticeSpec::new(family, n).unwrap()
    }

    #[test]
    fn one_dimensional_shift_is_uniform_on_the_cell() {
        let s = spec(LatticeFamily::Cubic, 1);
        let mut mean = 0.0;
        let n = 20_000;
        for i in 0..n {
            let a = sample_shift_uniform(&s, i as u64);
            assert!(a[0] > -0.5 - 1e-12 && a[0] <= 0.5 + 1e-12, "a={}", a[0]);
            mean += a[0];
        }
        mean /= n as f64;
        // variance of U(-1/2, 1/2) is 1/12
        let sigma = (1.0f64 / 12.0 / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn sampled_shifts_decode_to_origin() {
        for (family, n) in [
            (LatticeFamily::Cubic, 3),
            (LatticeFamily::A2, 2),
            (LatticeFamily::D4, 4),
            (LatticeFamily::E8, 8),
            (LatticeFamily::Leech24, 24),
        ] {
            let s = spec(family, n);
            for seed in 0..20 {
                let a = sample_shift_uniform(&s, seed);
                let nearest = cpa::closest_point(&s, &a);
                assert!(nearest.iter().all(|&v| v == 0.0), "{family}");
            }
        }
    }

    #[test]
    fn shift_mean_is_centrally_symmetric() {
        let s = spec(LatticeFamily::D4, 4);
        let n = 20_000;
        let mut mean = vec![0.0; 4];
        let mut mean_sq = 0.0;
        for i in 0..n {
            let a = sample_shift_uniform(&s, 0xD4D4 + i as u64);
            for (m, v) in mean.iter_mut().zip(&a) {
                *m += v;
            }
            mean_sq += a.iter().map(|v| v * v).sum::<f64>();
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        // per-coordinate spread bounded by the cell's second moment
        let sigma = (mean_sq / n as f64 / 4.0 / n as f64).sqrt();
        for m in &mean {
            assert!(m.abs() < 4.0 * sigma, "mean {mean:?}");
        }
    }

    #[test]
    fn cubic_optimum_matches_grid_search() {
        let s = spec(LatticeFamily::Cubic, 2);
        let result = optimize_shift(&s, 2, &OptimizeParams::default(), 7).unwrap();
        // dense grid of shifts over the unit cell
        let mut best_grid = f64::INFINITY;
        let g = 41;
        for i in 0..g {
            for j in 0..g {
                let a = [
                    -0.5 + (i as f64 + 0.5) / g as f64,
                    -0.5 + (j as f64 + 0.5) / g as f64,
                ];
                let (es, _) = constellation_stats(&s, 2, &a, None, 0);
                best_grid = best_grid.min(es);
            }
        }
        assert!(
            result.energy <= best_grid * 1.01,
            "optimised {} vs grid best {}",
            result.energy,
            best_grid
        );
        // the 2D two-level optimum is the centred square
        assert!(
            (result.energy - 0.5).abs() < 1e-3,
            "energy {}",
            result.energy
        );
    }

    #[test]
    fn energy_history_never_increases() {
        let s = spec(LatticeFamily::D4, 4);
        let result = optimize_shift(&s, 2, &OptimizeParams::default(), 5).unwrap();
        for pair in result.history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15, "history {:?}", result.history);
        }
    }

    #[test]
    fn d4_small_constellation_converges_quickly() {
        let s = spec(LatticeFamily::D4, 4);
        let result = optimize_shift(&s, 2, &OptimizeParams::default(), 11).unwrap();
        assert!(result.converged);
        assert!(
            result.iterations <= 10,
            "took {} iterations",
            result.iterations
        );
        let nearest = cpa::closest_point(&s, &result.shift);
        assert!(nearest.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mu_is_nonnegative_for_enumerable_cells() {
        let s = spec(LatticeFamily::A2, 2);
        let est = estimate_mu(&s, 2, 60, 3).unwrap();
        assert!(
            est.mu > -3.0 * est.std_err,
            "mu {} se {}",
            est.mu,
            est.std_err
        );
    }

    #[test]
    fn one_dimensional_mu_matches_quadrature() {
        let s = spec(LatticeFamily::Cubic, 1);
        // quadrature over the Voronoi cell of Z
        let g = 4001;
        let mut acc = 0.0;
        let mut best = f64::INFINITY;
        for i in 0..g {
            let a = [-0.5 + (i as f64 + 0.5) / g as f64];
            let (es, _) = constellation_stats(&s, 2, &a, None, 0);
            acc += es;
            best = best.min(es);
        }
        let mean = acc / g as f64;
        let mu_quad = (mean - best) / best;
        // the two-level line constellation has a closed-form penalty of 1/3
        assert!((mu_quad - 1.0 / 3.0).abs() < 2e-3, "quadrature mu {mu_quad}");

        let est = estimate_mu(&s, 2, 4000, 17).unwrap();
        assert!(
            (est.mu - mu_quad).abs() < 3.0 * est.std_err + 2e-3,
            "mc {} vs quadrature {} (se {})",
            est.mu,
            mu_quad,
            est.std_err
        );
    }

    #[test]
    fn mu_shrinks_with_constellation_size_for_a2() {
        let s = spec(LatticeFamily::A2, 2);
        let lo = estimate_mu(&s, 2, 80, 23).unwrap();
        let hi = estimate_mu(&s, 16, 80, 29).unwrap();
        let sep = 3.0 * (lo.std_err.powi(2) + hi.std_err.powi(2)).sqrt();
        assert!(
            lo.mu - hi.mu > sep,
            "mu(r=2)={} mu(r=16)={} sep={}",
            lo.mu,
            hi.mu,
            sep
        );
    }
}
