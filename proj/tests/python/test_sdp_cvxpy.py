import cvxpy as cp
import numpy as np

import hybridcast as hc


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def max_slack(dim, rows, diag_eq, cap=1.0):
    x = cp.Variable((dim, dim), hermitian=True)
    s = cp.Variable()
    cons = [x >> 0, s <= cap]
    if diag_eq is not None:
        cons.append(cp.real(cp.diag(x)) == diag_eq)
    for a, b in rows:
        cons.append(cp.real(cp.trace(a @ x)) + s * np.linalg.norm(a) <= b)
    cp.Problem(cp.Maximize(s), cons).solve(solver=cp.CLARABEL)
    return s.value


def test_feasibility_matches_cvxpy(rng):
    compared = 0
    for _ in range(40):
        dim = int(rng.integers(2, 5))
        rows = [(random_hermitian(rng, dim), float(rng.normal())) for _ in range(int(rng.integers(1, 4)))]
        diag = 1.0 if rng.random() < 0.7 else None
        ref = max_slack(dim, rows, diag)
        got = hc.solve_feasibility(dim, rows, diag_eq=diag)
        if got.status == hc.SdpStatus.MaxIterations or abs(ref) < 1e-3:
            continue
        compared += 1
        assert got.feasible == (ref > 0), (ref, got.slack)
        if got.feasible:
            x = got.x
            assert np.linalg.eigvalsh(x).min() > -1e-6
            for a, b in rows:
                assert np.trace(a @ x).real <= b + 1e-5 * max(1.0, abs(b))
    assert compared >= 30
