use num_complex::Complex64;
use proptest::prelude::*;

use uslse::bounds::{band_energy_ratio, band_energy_lower_bound};
use uslse::dp::{brute_force_solve, decompose_objective, dp_solve_with_budget, DEFAULT_BUDGET};
use uslse::fourier::{dft, idft};
use uslse::harness::{read_iq_from, write_iq_to};
use uslse::omp::{accept_if_improves, omp_refine};
use uslse::pipeline::recover_residual_detailed;
use uslse::{
    anti_difference, centered_modulo, first_difference, modulo_sample, nmse, resolve_constant_blind,
    resolve_constant_with_truth, residual_decompose, unfold, ComplexSignal, GaussianInt, GaussianIntegerSeq,
    PipelineConfig, QuadraticInstance, SubsetSelection,
};

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(a, b)| Complex64::new(a, b))
}

fn signal(len: std::ops::Range<usize>, range: f64) -> impl Strategy<Value = ComplexSignal> {
    prop::collection::vec(complex(range), len).prop_map(|v| ComplexSignal::new(v).unwrap())
}

fn gaussian_ints(len: usize, bound: i64) -> impl Strategy<Value = GaussianIntegerSeq> {
    prop::collection::vec((-bound..=bound, -bound..=bound).prop_map(|(a, b)| GaussianInt::new(a, b)), len)
        .prop_map(GaussianIntegerSeq::new)
}

/// Random instance: N in 5..=12, arbitrary nonempty row subset, random observation.
fn instance(p_max: usize) -> impl Strategy<Value = QuadraticInstance> {
    (5usize..=12).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::btree_set(1..n, 1..n - 1),
            prop::collection::vec(complex(3.0), n - 1),
            1..=p_max.min(n - 2),
        )
            .prop_map(|(n, rows, z, p)| {
                let subset = SubsetSelection::from_indices(n, rows.into_iter().collect()).unwrap();
                let z = z[..subset.len()].to_vec();
                QuadraticInstance::from_observation(subset, z, p, 1).unwrap()
            })
    })
}

fn dense_energy(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn modulo_lands_in_range_and_is_periodic(t in -1e3f64..1e3, lambda in 0.01f64..10.0, k in -20i64..20) {
        let m = centered_modulo(t, lambda).unwrap();
        prop_assert!(m >= -lambda && m < lambda);
        let shifted = centered_modulo(t + 2.0 * lambda * k as f64, lambda).unwrap();
        let gap = (m - shifted).abs();
        // values on opposite ends of the interval are the same point of the circle
        prop_assert!(gap < 1e-8 * (1.0 + t.abs()) || (gap - 2.0 * lambda).abs() < 1e-8 * (1.0 + t.abs()));
    }

    #[test]
    fn modulo_is_identity_inside_range(frac in -1.0f64..1.0, lambda in 0.01f64..10.0) {
        let t = frac * lambda;
        prop_assert_eq!(centered_modulo(t, lambda).unwrap(), t);
    }

    #[test]
    fn fold_identity(g in signal(2..128, 40.0), lambda in 0.05f64..5.0) {
        let y = modulo_sample(&g, lambda).unwrap();
        let eps = residual_decompose(&g, &y, lambda).unwrap();
        let back = unfold(&y, &eps, lambda).unwrap();
        for (a, b) in back.samples().iter().zip(g.samples()) {
            prop_assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn anti_difference_inverts_difference(v in gaussian_ints(20, 50)) {
        let d = first_difference(v.values()).unwrap();
        let rebuilt = anti_difference(&d);
        let head = v.values()[0];
        prop_assert!(rebuilt.iter().zip(v.values()).all(|(r, s)| r + head == *s));
        prop_assert_eq!(first_difference(&rebuilt).unwrap(), d);
    }

    #[test]
    fn dft_is_unitary(v in prop::collection::vec(complex(5.0), 1..200)) {
        let f = dft(&v);
        prop_assert!((dense_energy(&f) - dense_energy(&v)).abs() < 1e-9 * (1.0 + dense_energy(&v)));
        for (a, b) in idft(&f).iter().zip(&v) {
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn q_is_hermitian_toeplitz_projection(inst in instance(3), x in prop::collection::vec(complex(1.0), 11)) {
        let n = inst.n_vars;
        let q = inst.dense_q();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((q[i][j] - q[j][i].conj()).norm() < 1e-12);
                if i > 0 && j > 0 {
                    prop_assert!((q[i][j] - q[i - 1][j - 1]).norm() < 1e-12);
                }
            }
        }
        // eigenvalues in [0, 1]: 0 <= xᴴQx <= ‖x‖²
        let x = &x[..n];
        let quad: f64 = (0..n).map(|i| (0..n).map(|j| (x[i].conj() * q[i][j] * x[j]).re).sum::<f64>()).sum();
        prop_assert!(quad >= -1e-12 && quad <= dense_energy(x) + 1e-12);
        let frob: f64 = q.iter().flatten().map(|v| v.norm_sqr()).sum();
        prop_assert!((frob - inst.subset.len() as f64).abs() < 1e-9);
    }

    #[test]
    fn stage_decomposition_sums_to_banded_objective(inst in instance(3), seed in gaussian_ints(11, 2)) {
        let eps = GaussianIntegerSeq::new(seed.values()[..inst.n_vars].to_vec());
        let dec = decompose_objective(&inst).unwrap();
        let total = dec.total(&eps.to_complex());
        let direct = inst.banded_objective(&eps).unwrap();
        prop_assert!((total - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn banded_and_exact_objectives_differ_by_tail_energy(inst in instance(3), seed in gaussian_ints(11, 2)) {
        let eps = GaussianIntegerSeq::new(seed.values()[..inst.n_vars].to_vec());
        let exact = inst.quadratic_objective(&eps).unwrap();
        let banded = inst.banded_objective(&eps).unwrap();
        let q = inst.dense_q();
        let qb = inst.dense_q_banded();
        let tail: f64 = q.iter().flatten().zip(qb.iter().flatten()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let norm2: f64 = dense_energy(&eps.to_complex());
        prop_assert!((exact - banded).abs() <= tail * norm2 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dp_is_globally_optimal_on_small_instances(inst in instance(2).prop_filter("N-1 <= 7", |i| i.n_vars <= 7)) {
        let dp = dp_solve_with_budget(&inst, DEFAULT_BUDGET).unwrap();
        let bf = brute_force_solve(&inst, true, DEFAULT_BUDGET).unwrap();
        prop_assert!((dp.objective - bf.objective).abs() < 1e-9);
        prop_assert!(dp.eps.within(1));
        prop_assert!(dp.stats.peak_value_tables <= 2);
    }

    #[test]
    fn omp_never_increases_objective(inst in instance(2), start in gaussian_ints(11, 1)) {
        let eps = GaussianIntegerSeq::new(start.values()[..inst.n_vars].to_vec());
        let delta = omp_refine(&inst, &eps, 4).unwrap();
        let before = inst.exact_objective(&eps).unwrap();
        let after = inst.exact_objective(&accept_if_improves(&inst, &eps, &delta).unwrap()).unwrap();
        prop_assert!(after <= before);
    }

    #[test]
    fn pipeline_trace_is_monotone(y in signal(48..96, 0.7)) {
        let y = modulo_sample(&y, 0.7).unwrap();
        let cfg = PipelineConfig { p: 2, beta: 0.05, iter_max: 3, ..Default::default() };
        let rec = recover_residual_detailed(&y, &cfg, 0.7, 6.0).unwrap();
        prop_assert!(rec.objective_trace[0] <= rec.initial_objective);
        prop_assert!(rec.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(rec.eps_hat.values()[0], GaussianInt::new(0, 0));
    }

    #[test]
    fn constant_resolution_removes_offsets(truth in gaussian_ints(30, 3), re in -5i64..5, im in -5i64..5) {
        let offset = GaussianInt::new(re, im);
        prop_assert_eq!(resolve_constant_with_truth(&truth.offset(offset), &truth).unwrap(), truth.clone());
        prop_assert_eq!(
            resolve_constant_blind(&truth.offset(offset)).unwrap(),
            resolve_constant_blind(&truth).unwrap()
        );
    }

    #[test]
    fn nmse_of_scaled_signal(x in signal(4..64, 3.0), a in 0.001f64..2.0) {
        prop_assume!(x.energy() > 1e-6);
        let est = ComplexSignal::new(x.samples().iter().map(|v| v * (1.0 + a)).collect()).unwrap();
        prop_assert!((nmse(&est, &x).unwrap() - 20.0 * a.log10()).abs() < 1e-8);
    }

    #[test]
    fn iq_round_trip(x in signal(2..64, 1e6)) {
        let mut buf = Vec::new();
        write_iq_to(&mut buf, &x).unwrap();
        prop_assert_eq!(read_iq_from(buf.as_slice()).unwrap(), x);
    }

    #[test]
    fn energy_lower_bound_holds(n in 4usize..200, m_frac in 0.0f64..1.0, p_frac in 0.0f64..1.0) {
        let m = 2 + ((n - 3) as f64 * m_frac) as usize;
        let p = ((n - 1) / 2) as f64 * p_frac;
        let p = p as usize;
        let ratio = band_energy_ratio(n, m, p).unwrap();
        prop_assert!(band_energy_lower_bound(n, m, p).unwrap() <= ratio + 1e-12);
        prop_assert!(ratio <= 1.0 + 1e-12);
    }
}
