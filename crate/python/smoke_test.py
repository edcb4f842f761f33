"""Smoke test for the bootcorr_py extension module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/bootcorr_py-*.whl
"""

import math

import bootcorr_py as bc


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert bc.occupancy_pmf(2) == [0.5, 0.5]
    pmf = bc.occupancy_pmf(50)
    mean, var = bc.exact_moments(50)
    assert close(sum(pmf), 1.0, 1e-12)
    assert close(sum((u + 1) * p for u, p in enumerate(pmf)), mean, 1e-9)
    amean, _ = bc.approx_moments(50)
    assert close(mean, amean, 0.01)
    assert bc.zero_count(10, 4) == 7 and bc.zero_count(3, 8) == 0

    a = bc.alpha_to_a(0.01)
    assert close(a, 1.8214, 1e-3)
    kp = bc.k_plus(1000, 100, a)
    assert close(math.erf(a), 2 * bc.prob_pd(1000, 100, kp) - 1, 1e-9)
    assert close(bc.k_star(10**6, 10.0), 15.82, 0.02)
    assert close(bc.k_limit(1.0), math.e / (math.e - 1), 1e-12)

    budget = bc.BootstrapBudget.from_alpha(200, 20, 0.01)
    assert 1 <= budget.recommended <= 200 and budget.k_upper == 200
    print(budget)

    data = bc.generate_data(30, 8, seed=1)
    assert len(data) == 30 and len(data[0]) == 8
    c = bc.pearson(data)
    lam = bc.eigenvalues(c)
    assert close(sum(lam), 30.0, 1e-9)
    assert not bc.is_positive_definite(c)[0]

    avg, unique, redraws = bc.average_correlation(data, 30, seed=4)
    assert len(unique) == 30 and redraws >= 0
    assert all(avg[i][i] == 1.0 for i in range(30))
    pd, smallest = bc.is_positive_definite(avg)
    assert pd and smallest > 0
    assert bc.average_correlation(data, 30, seed=4)[0] == avg

    rows = bc.run_pd_sweep(20, 8, [2, 6, 20], trials=20, seed=3)
    assert [r["k"] for r in rows] == [2, 6, 20]
    assert rows[-1]["empirical_pd_frequency"] == 1.0

    try:
        bc.pearson([[1.0, 2.0], [3.0, 3.0]])
    except ValueError as e:
        assert "row 1" in str(e)
    else:
        raise AssertionError("constant row accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
