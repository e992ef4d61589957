//! Lattice-constrained orthogonal matching pursuit on the residual problem
//! minimize over Δ ∈ ℤ[j]^(N−1):  ‖z_S + F_S(ε̂ + Δ)‖².

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{round_to_lattice, GaussianInt, GaussianIntegerSeq};
use crate::transform::{adjoint_subset, QuadraticInstance};

/// Default sparsity cap ⌈|S|/4⌉.
pub fn default_max_sparsity(inst: &QuadraticInstance) -> usize {
    inst.subset.len().div_ceil(4)
}

/// Greedy sparse correction Δ for the current estimate. Coefficients are
/// rounded to the lattice after every least-squares solve; the loop stops
/// after `max_sparsity` atoms or once the rounded update no longer lowers the
/// objective. Returns the best update found (zero if none helps).
pub fn omp_refine(inst: &QuadraticInstance, eps_hat: &GaussianIntegerSeq, max_sparsity: usize) -> Result<GaussianIntegerSeq> {
    let n = inst.n_vars;
    let r0 = inst.residual(eps_hat)?;
    let g0 = adjoint_subset(&inst.subset, &r0);
    let mut best_obj: f64 = r0.iter().map(|r| r.norm_sqr()).sum();
    let mut best = GaussianIntegerSeq::zeros(n);
    let mut selected = vec![false; n];
    let mut support: Vec<usize> = Vec::new();
    let mut residual = r0.clone();
    let limit = max_sparsity.min(inst.subset.len());

    while support.len() < limit {
        // F_Sᴴ applied to −residual
        let corr = adjoint_subset(&inst.subset, &residual);
        let pick = (0..n)
            .filter(|&i| !selected[i])
            .map(|i| (i, corr[i].norm_sqr()))
            .fold(None, |acc: Option<(usize, f64)>, (i, c)| match acc {
                Some((_, best_c)) if best_c >= c => acc,
                _ => Some((i, c)),
            });
        let Some((idx, strength)) = pick else { break };
        if strength <= 1e-24 {
            break;
        }
        selected[idx] = true;
        support.push(idx);

        let Some(coeffs) = solve_support(inst, &support, &g0) else { break };
        let mut delta = GaussianIntegerSeq::zeros(n);
        for (&i, &c) in support.iter().zip(&coeffs) {
            delta.values_mut()[i] = round_to_lattice(c);
        }
        let moved = inst.residual(&eps_hat.add(&delta))?;
        let obj: f64 = moved.iter().map(|r| r.norm_sqr()).sum();
        if obj < best_obj {
            best_obj = obj;
            best = delta;
            residual = moved;
        } else {
            break;
        }
    }
    Ok(best)
}

/// u = −Q[T,T]⁻¹ (F_Sᴴ r0)_T, the least-squares coefficients on support T.
fn solve_support(inst: &QuadraticInstance, support: &[usize], g0: &[Complex64]) -> Option<Vec<Complex64>> {
    let t = support.len();
    let gram = DMatrix::from_fn(t, t, |a, b| inst.q_entry(support[a], support[b]));
    let rhs = DVector::from_iterator(t, support.iter().map(|&i| -g0[i]));
    let chol = gram.cholesky()?;
    Some(chol.solve(&rhs).iter().copied().collect())
}

/// ε̂ + Δ if it strictly lowers ‖z_S + F_S ε‖², otherwise ε̂.
pub fn accept_if_improves(
    inst: &QuadraticInstance,
    eps_hat: &GaussianIntegerSeq,
    delta: &GaussianIntegerSeq,
) -> Result<GaussianIntegerSeq> {
    Ok(try_accept(inst, eps_hat, delta)?.0)
}

/// Like [`accept_if_improves`], also reporting whether Δ was taken and the resulting objective.
pub fn try_accept(
    inst: &QuadraticInstance,
    eps_hat: &GaussianIntegerSeq,
    delta: &GaussianIntegerSeq,
) -> Result<(GaussianIntegerSeq, bool, f64)> {
    let before = inst.exact_objective(eps_hat)?;
    if delta.values().iter().all(|d| *d == GaussianInt::new(0, 0)) {
        return Ok((eps_hat.clone(), false, before));
    }
    let candidate = eps_hat.add(delta);
    let after = inst.exact_objective(&candidate)?;
    if after < before {
        Ok((candidate, true, after))
    } else {
        Ok((eps_hat.clone(), false, before))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::select_subset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Instance whose observation is exactly −F_S ε_true plus optional noise.
    fn planted(rng: &mut ChaCha8Rng, n: usize, noise: f64) -> (QuadraticInstance, GaussianIntegerSeq) {
        let subset = select_subset(n, 4.0, 0.05).unwrap();
        let truth = GaussianIntegerSeq::new(
            (0..n - 1)
                .map(|_| if rng.random::<f64>() < 0.2 { GaussianInt::new(rng.random_range(-1..=1), rng.random_range(-1..=1)) } else { GaussianInt::new(0, 0) })
                .collect(),
        );
        let zero = QuadraticInstance::from_observation(
            subset.clone(),
            vec![Complex64::new(0.0, 0.0); subset.len()],
            2,
            1,
        )
        .unwrap();
        let z: Vec<Complex64> = zero
            .apply_fs(&truth.to_complex())
            .into_iter()
            .map(|v| -v + Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * noise)
            .collect();
        (QuadraticInstance::from_observation(subset, z, 2, 1).unwrap(), truth)
    }

    #[test]
    fn exact_estimate_needs_no_update() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (inst, truth) = planted(&mut rng, 64, 0.0);
        let delta = omp_refine(&inst, &truth, 16).unwrap();
        assert!(delta.is_zero());
    }

    #[test]
    fn planted_single_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..20 {
            let (inst, truth) = planted(&mut rng, 64, 0.01);
            assert!(inst.subset.len() >= 40);
            let pos = trial * 3 % 63;
            let mut est = truth.clone();
            est.values_mut()[pos] -= GaussianInt::new(1, 0);
            let delta = omp_refine(&inst, &est, default_max_sparsity(&inst)).unwrap();
            assert_eq!(delta.support_size(), 1, "trial {trial}");
            assert_eq!(delta.values()[pos], GaussianInt::new(1, 0));
            assert_eq!(est.add(&delta), truth);
        }
    }

    #[test]
    fn refine_never_increases_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (inst, _) = planted(&mut rng, 40, 0.5);
            let est = GaussianIntegerSeq::new(
                (0..39).map(|_| GaussianInt::new(rng.random_range(-1..=1), 0)).collect(),
            );
            let delta = omp_refine(&inst, &est, 8).unwrap();
            let before = inst.exact_objective(&est).unwrap();
            let after = inst.exact_objective(&accept_if_improves(&inst, &est, &delta).unwrap()).unwrap();
            assert!(after <= before);
        }
    }

    #[test]
    fn zero_sparsity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (inst, _) = planted(&mut rng, 32, 0.0);
        assert!(omp_refine(&inst, &GaussianIntegerSeq::zeros(31), 0).unwrap().is_zero());
    }

    #[test]
    fn acceptance_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (inst, truth) = planted(&mut rng, 32, 0.0);
        let zero = GaussianIntegerSeq::zeros(31);
        assert_eq!(accept_if_improves(&inst, &truth, &zero).unwrap(), truth);

        let mut wrong = truth.clone();
        wrong.values_mut()[5] += GaussianInt::new(0, 1);
        let mut fix = GaussianIntegerSeq::zeros(31);
        fix.values_mut()[5] = GaussianInt::new(0, -1);
        assert_eq!(accept_if_improves(&inst, &wrong, &fix).unwrap(), truth);

        let mut bad = GaussianIntegerSeq::zeros(31);
        bad.values_mut()[7] = GaussianInt::new(2, 0);
        assert_eq!(accept_if_improves(&inst, &truth, &bad).unwrap(), truth);
    }
}
