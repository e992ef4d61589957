"""Smoke test for the pyuslse extension module.

Build and install first, e.g. from the repository root:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pyuslse-*.whl
then run: python python/smoke_test.py
"""

import math
import tempfile
from pathlib import Path

import pyuslse as u

N, GAMMA, LAM, K = 512, 10.0, 0.5, 3


def check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
    if not ok:
        raise SystemExit(1)


def main():
    m = u.centered_modulo(1.3, 1.0)
    check("centered_modulo", abs(m - (-0.7)) < 1e-12, f"{m:.3f}")

    omegas, coeffs = u.random_spectrum(K, GAMMA, 2 * math.pi / N, seed=7)
    x = u.synth_line_spectral(omegas, coeffs, N)
    g = u.add_noise(x, 30.0, seed=8)
    y = u.modulo_sample(g, LAM)
    eps = u.residual_decompose(g, y, LAM)
    back = u.unfold(y, eps, LAM)
    check("fold identity", max(abs(a - b) for a, b in zip(back, g)) < 1e-9)
    check("signal folds", any(e != (0, 0) for e in eps))

    subset = u.select_subset(N, GAMMA, 0.04)
    check("subset", subset[0] == 73 and subset[-1] == 491, f"[{subset[0]}, {subset[-1]}]")

    eps_diff, obj, evals = u.dp_solve(y, LAM, GAMMA, 0.04, 2)
    check("dp_solve", len(eps_diff) == N - 1 and evals > 0, f"objective {obj:.3f}, {evals} evaluations")

    cfg = u.PipelineConfig(p=2, beta=0.04, iter_max=2)
    res = u.uslse(y, K, GAMMA, LAM, config=cfg, truth=eps)
    check("fold counts exact", res.eps_hat == eps)
    err = u.nmse(u.synth_line_spectral(res.omegas, res.coeffs, N), x)
    check("line-spectral estimate", err < -15.0, f"NMSE {err:.1f} dB")

    blind = u.uslse(y, K, GAMMA, LAM)
    check("blind recovery", len(blind.g_hat) == N, repr(blind))

    est_omegas, _ = u.nomp(g, K)
    check("nomp", len(est_omegas) == K)

    small = [complex(0.05 + 0.01 * n, 0.02 * math.sin(0.1 * n)) for n in range(64)]
    check("usalg", max(abs(a - b) for a, b in zip(u.usalg(u.modulo_sample(small, 0.2), 0.2, 2), small)) < 1e-9)

    ratio = u.energy_ratio(64, 16, 2)
    check("energy bound", u.energy_lower_bound(64, 16, 2) <= ratio <= 1.0, f"ratio {ratio:.4f}")

    ok, report = u.check_bounds(draws=20, seed=1, n_max=24)
    check("bound checks", ok)

    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "y.csv"
        u.write_iq(str(path), y)
        check("iq round trip", u.read_iq(str(path)) == y)
        rows = u.run_sweep(
            'scenario = "snr_sweep"\ntrials = 4\nsnr_grid = [30.0]\ntiming = false\n'
            'methods = ["dp_omp_iter", "usalg"]\n[sampling]\nn = 256\n',
            out_dir=d,
        )
        check("sweep", len(rows) == 2 and (Path(d) / "summary.json").exists(),
              ", ".join(f"{r['method']}: {r['success_probability']:.2f}" for r in rows))

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
