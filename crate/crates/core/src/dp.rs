//! Exact minimization of the band-approximated integer quadratic program
//!
//! ```text
//! minimize  ε̲ᴴQ̃ε̲ + 2Re{bᴴε̲}   over ε̲ ∈ 𝒱^(N−1),  𝒱 = {m + jn : |m|, |n| <= V}
//! ```
//!
//! Because Q̃ has half-bandwidth p the objective splits into P = N−1−p stage
//! terms h_1..h_P, where h_n (n < P) depends on ε̲_{n..n+p} and h_P covers the
//! trailing p+1 variables. A forward pass tabulates
//! DP_n(ε̲_{n+1..n+p}) = min over ε̲_n of DP_{n−1} + h_n, keeping the argmin in
//! RC_n; the last stage is enumerated directly and a backward pass reads the
//! argmin tables.
//!
//! Table keys are p-tuples of states flattened to a radix-|𝒱| integer with the
//! earliest variable as the least significant digit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{GaussianInt, GaussianIntegerSeq};
use crate::transform::QuadraticInstance;

/// Default cap on enumerated candidates / stored table entries.
pub const DEFAULT_BUDGET: f64 = 1e8;

/// The bounded lattice 𝒱 in enumeration order: real part ascending, then imaginary part ascending.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub v: i64,
    ints: Vec<GaussianInt>,
    points: Vec<Complex64>,
}

impl StateSpace {
    pub fn new(v: i64) -> Self {
        let ints: Vec<GaussianInt> =
            (-v..=v).flat_map(|re| (-v..=v).map(move |im| GaussianInt::new(re, im))).collect();
        let points = ints.iter().map(|g| Complex64::new(g.re as f64, g.im as f64)).collect();
        StateSpace { v, ints, points }
    }

    pub fn len(&self) -> usize {
        self.ints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ints.is_empty()
    }

    pub fn state(&self, index: usize) -> GaussianInt {
        self.ints[index]
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn index_of(&self, g: GaussianInt) -> Option<usize> {
        let side = 2 * self.v + 1;
        if g.re.abs() > self.v || g.im.abs() > self.v {
            return None;
        }
        Some(((g.re + self.v) * side + (g.im + self.v)) as usize)
    }
}

/// Stage terms of the banded objective.
#[derive(Debug, Clone)]
pub struct StageDecomposition {
    pub n_vars: usize,
    pub p: usize,
    /// q[0..=p]; Q̃[i, i+k] = conj(q[k]).
    pub band: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl StageDecomposition {
    /// P = N − p − 1 (number of stage terms).
    pub fn num_stages(&self) -> usize {
        self.n_vars - self.p
    }

    /// h_n evaluated on a full-length assignment; `stage` is 1-based.
    pub fn stage_value(&self, stage: usize, x: &[Complex64]) -> f64 {
        let big_p = self.num_stages();
        assert!(stage >= 1 && stage <= big_p, "stage {stage} out of 1..={big_p}");
        assert_eq!(x.len(), self.n_vars);
        let q0 = self.band[0].re;
        if stage < big_p {
            let n = stage - 1;
            let coupling: Complex64 = (1..=self.p).map(|k| self.band[k].conj() * x[n + k]).sum();
            q0 * x[n].norm_sqr() + 2.0 * (x[n].conj() * coupling).re + 2.0 * (self.b[n].conj() * x[n]).re
        } else {
            let start = big_p - 1;
            let mut total = 0.0;
            for i in start..self.n_vars {
                total += q0 * x[i].norm_sqr() + 2.0 * (self.b[i].conj() * x[i]).re;
                for j in i + 1..self.n_vars {
                    total += 2.0 * (x[i].conj() * self.band[j - i].conj() * x[j]).re;
                }
            }
            total
        }
    }

    /// Σ_n h_n.
    pub fn total(&self, x: &[Complex64]) -> f64 {
        (1..=self.num_stages()).map(|n| self.stage_value(n, x)).sum()
    }
}

pub fn decompose_objective(inst: &QuadraticInstance) -> Result<StageDecomposition> {
    if inst.p < 1 || inst.n_vars < inst.p + 1 {
        return Err(Error::BandTooWide { p: inst.p, n_vars: inst.n_vars });
    }
    Ok(StageDecomposition {
        n_vars: inst.n_vars,
        p: inst.p,
        band: inst.q[..=inst.p].to_vec(),
        b: inst.b.clone(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DpStats {
    /// (key, ε̲_n) pairs visited in the forward pass plus final-stage candidates.
    pub candidate_evaluations: u64,
    pub forward_stages: usize,
    /// Largest number of value tables alive at once.
    pub peak_value_tables: usize,
}

#[derive(Debug, Clone)]
pub struct DpSolution {
    pub eps: GaussianIntegerSeq,
    /// Banded objective ε̲ᴴQ̃ε̲ + 2Re{bᴴε̲} at the solution.
    pub objective: f64,
    pub stats: DpStats,
}

/// Global minimizer of the banded objective over 𝒱^(N−1), default budget.
pub fn dp_solve(inst: &QuadraticInstance) -> Result<GaussianIntegerSeq> {
    Ok(dp_solve_with_budget(inst, DEFAULT_BUDGET)?.eps)
}

pub fn dp_solve_with_budget(inst: &QuadraticInstance, budget: f64) -> Result<DpSolution> {
    let dec = decompose_objective(inst)?;
    let space = StateSpace::new(inst.v);
    let r = space.len();
    let p = dec.p;
    let n_vars = dec.n_vars;
    let big_p = dec.num_stages();
    let forward = big_p - 1;

    let table = (r as f64).powi(p as i32);
    let required = (table * r as f64).max(table * forward as f64);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let table = r.pow(p as u32);
    let low_block = r.pow(p as u32 - 1);

    let q0 = dec.band[0].re;
    // cross[(k-1)*r*r + a*r + c] = 2Re{conj(s_a) conj(q_k) s_c}
    let mut cross = vec![0.0; p * r * r];
    for k in 1..=p {
        let qk = dec.band[k].conj();
        for a in 0..r {
            for c in 0..r {
                cross[(k - 1) * r * r + a * r + c] = 2.0 * (space.point(a).conj() * qk * space.point(c)).re;
            }
        }
    }
    let unary = |n: usize, a: usize| -> f64 {
        let s = space.point(a);
        q0 * s.norm_sqr() + 2.0 * (dec.b[n].conj() * s).re
    };

    let mut stats = DpStats { forward_stages: forward, peak_value_tables: 1, ..Default::default() };
    let mut prev = vec![0.0f64; table];
    let mut next = vec![0.0f64; table];
    let mut argmin = vec![0u16; forward * table];
    let mut digits = vec![0usize; p];
    let mut unary_row = vec![0.0; r];

    for stage in 0..forward {
        stats.peak_value_tables = 2;
        for (a, u) in unary_row.iter_mut().enumerate() {
            *u = unary(stage, a);
        }
        let rc = &mut argmin[stage * table..(stage + 1) * table];
        for key in 0..table {
            let mut rest = key;
            for d in digits.iter_mut() {
                *d = rest % r;
                rest /= r;
            }
            let shifted = r * (key % low_block);
            let mut best = f64::INFINITY;
            let mut best_a = 0usize;
            for a in 0..r {
                let mut cost = prev[a + shifted] + unary_row[a];
                let row = a * r;
                for (k, &d) in digits.iter().enumerate() {
                    cost += cross[k * r * r + row + d];
                }
                if cost < best {
                    best = cost;
                    best_a = a;
                }
            }
            next[key] = best;
            rc[key] = best_a as u16;
        }
        stats.candidate_evaluations += (table * r) as u64;
        std::mem::swap(&mut prev, &mut next);
    }
    drop(next);

    // Final stage over ε̲_{P..N−1} (p+1 variables).
    let start = big_p - 1;
    let final_count = table * r;
    let mut tail_digits = vec![0usize; p + 1];
    let mut best = f64::INFINITY;
    let mut best_f = 0usize;
    for f in 0..final_count {
        let mut rest = f;
        for d in tail_digits.iter_mut() {
            *d = rest % r;
            rest /= r;
        }
        let mut cost = prev[f % table];
        for (t, &dt) in tail_digits.iter().enumerate() {
            cost += unary(start + t, dt);
            for (u, &du) in tail_digits.iter().enumerate().skip(t + 1) {
                cost += cross[(u - t - 1) * r * r + dt * r + du];
            }
        }
        if cost < best {
            best = cost;
            best_f = f;
        }
    }
    stats.candidate_evaluations += final_count as u64;
    drop(prev);

    // Backward pass.
    let mut idx = vec![0usize; n_vars];
    let mut rest = best_f;
    for slot in idx[start..].iter_mut() {
        *slot = rest % r;
        rest /= r;
    }
    for stage in (0..forward).rev() {
        let key = (1..=p).rev().fold(0usize, |acc, k| acc * r + idx[stage + k]);
        idx[stage] = argmin[stage * table + key] as usize;
    }

    let eps = GaussianIntegerSeq::new(idx.iter().map(|&i| space.state(i)).collect());
    Ok(DpSolution { eps, objective: best, stats })
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub eps: GaussianIntegerSeq,
    /// ε̲ᴴQε̲ + 2Re{bᴴε̲} (or the banded version) at the minimizer.
    pub objective: f64,
    pub evaluated: u64,
}

/// Exhaustive search over 𝒱^(N−1) of the exact (`use_banded == false`) or
/// band-approximated objective. Test-scale only.
pub fn brute_force_solve(inst: &QuadraticInstance, use_banded: bool, budget: f64) -> Result<BruteForceResult> {
    let space = StateSpace::new(inst.v);
    let r = space.len();
    let n = inst.n_vars;
    let required = (r as f64).powi(n as i32);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let max_offset = if use_banded { inst.p.min(n - 1) } else { n - 1 };
    // cross[d-1][a*r + c]: pair (earlier a, later c) at distance d
    let cross: Vec<Vec<f64>> = (1..=max_offset)
        .map(|d| {
            let qd = inst.q[d].conj();
            let mut t = vec![0.0; r * r];
            for a in 0..r {
                for c in 0..r {
                    t[a * r + c] = 2.0 * (space.point(a).conj() * qd * space.point(c)).re;
                }
            }
            t
        })
        .collect();
    let unary: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..r)
                .map(|a| {
                    let s = space.point(a);
                    inst.q[0].re * s.norm_sqr() + 2.0 * (inst.b[i].conj() * s).re
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        r: usize,
        n: usize,
        max_offset: usize,
        cross: &'a [Vec<f64>],
        unary: &'a [Vec<f64>],
        current: Vec<usize>,
        best: f64,
        best_idx: Vec<usize>,
        evaluated: u64,
    }

    impl Search<'_> {
        fn descend(&mut self, depth: usize, partial: f64) {
            if depth == self.n {
                self.evaluated += 1;
                if partial < self.best {
                    self.best = partial;
                    self.best_idx.copy_from_slice(&self.current);
                }
                return;
            }
            for c in 0..self.r {
                let mut cost = partial + self.unary[depth][c];
                let lo = depth.saturating_sub(self.max_offset);
                for j in lo..depth {
                    cost += self.cross[depth - j - 1][self.current[j] * self.r + c];
                }
                self.current[depth] = c;
                self.descend(depth + 1, cost);
            }
        }
    }

    let mut search = Search {
        r,
        n,
        max_offset,
        cross: &cross,
        unary: &unary,
        current: vec![0; n],
        best: f64::INFINITY,
        best_idx: vec![0; n],
        evaluated: 0,
    };
    search.descend(0, 0.0);
    let eps = GaussianIntegerSeq::new(search.best_idx.iter().map(|&i| space.state(i)).collect());
    Ok(BruteForceResult { eps, objective: search.best, evaluated: search.evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{select_subset, SubsetSelection};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, p: usize, scale: f64) -> QuadraticInstance {
        let subset = select_subset(n, 3.0, 0.1).unwrap_or_else(|_| SubsetSelection::from_indices(n, (2..n).collect()).unwrap());
        let z = (0..subset.len())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale)
            .collect();
        QuadraticInstance::from_observation(subset, z, p, 1).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-2..=2) as f64, rng.random_range(-2..=2) as f64)).collect()
    }

    #[test]
    fn state_space_order() {
        let s = StateSpace::new(1);
        assert_eq!(s.len(), 9);
        assert_eq!(s.state(0), GaussianInt::new(-1, -1));
        assert_eq!(s.state(1), GaussianInt::new(-1, 0));
        assert_eq!(s.state(4), GaussianInt::new(0, 0));
        for i in 0..9 {
            assert_eq!(s.index_of(s.state(i)), Some(i));
        }
        assert_eq!(s.index_of(GaussianInt::new(2, 0)), None);
    }

    #[test]
    fn decomposition_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = random_instance(&mut rng, 12, 2, 1.0);
        let dec = decompose_objective(&inst).unwrap();
        for _ in 0..50 {
            let x = random_point(&mut rng, 11);
            let direct = inst.banded_objective_c(&x);
            assert!((dec.total(&x) - direct).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn decomposition_trivial_and_counts() {
        let subset = SubsetSelection::from_indices(5, vec![2, 3]).unwrap();
        let inst = QuadraticInstance::from_observation(subset, vec![Complex64::new(0.0, 0.0); 2], 1, 1).unwrap();
        let dec = decompose_objective(&inst).unwrap();
        assert_eq!(dec.num_stages(), 3);
        let zero = vec![Complex64::new(0.0, 0.0); 4];
        for n in 1..=3 {
            assert_eq!(dec.stage_value(n, &zero), 0.0);
        }
    }

    #[test]
    fn zero_observation_gives_zero() {
        let subset = select_subset(64, 10.0, 0.04).unwrap();
        let len = subset.len();
        let inst = QuadraticInstance::from_observation(subset, vec![Complex64::new(0.0, 0.0); len], 3, 1).unwrap();
        let sol = dp_solve_with_budget(&inst, DEFAULT_BUDGET).unwrap();
        assert!(sol.eps.is_zero());
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn dp_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..30 {
            let n = 6 + trial % 3; // N−1 ∈ {5, 6, 7}
            let p = 1 + trial % 2;
            let inst = random_instance(&mut rng, n, p, 3.0);
            let dp = dp_solve_with_budget(&inst, DEFAULT_BUDGET).unwrap();
            let bf = brute_force_solve(&inst, true, DEFAULT_BUDGET).unwrap();
            assert!((dp.objective - bf.objective).abs() < 1e-9, "trial {trial}: {} vs {}", dp.objective, bf.objective);
            let recomputed = inst.banded_objective(&dp.eps).unwrap();
            assert!((recomputed - dp.objective).abs() < 1e-9);
            assert!(dp.eps.within(1));
        }
    }

    #[test]
    fn brute_force_counts_and_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = random_instance(&mut rng, 4, 1, 1.0);
        let bf = brute_force_solve(&inst, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(bf.evaluated, 729);
        assert!(matches!(brute_force_solve(&inst, false, 100.0), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn brute_force_exact_objective_is_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = random_instance(&mut rng, 6, 1, 2.0);
        let bf = brute_force_solve(&inst, false, DEFAULT_BUDGET).unwrap();
        let q = inst.quadratic_objective(&bf.eps).unwrap();
        assert!((q - bf.objective).abs() < 1e-9);
    }

    #[test]
    fn budget_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = random_instance(&mut rng, 12, 3, 1.0);
        assert!(matches!(dp_solve_with_budget(&inst, 1000.0), Err(Error::BudgetExceeded { .. })));
    }
}
