import numpy as np
import pytest
from numpy.testing import assert_allclose

from hvtest.sdp_solver import (
    STATUS_INFEASIBLE,
    STATUS_MAXITER,
    STATUS_NEAR,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    SdpProblem,
    SolverOptions,
    read_sdpa,
    residuals,
    solve,
)

ACCEPTED = (STATUS_OPTIMAL, STATUS_NEAR)


# ---------------------------------------------------------------------------
# random instances with a constructed primal-dual optimal pair
# ---------------------------------------------------------------------------

def random_instance(seed, dims=None, m=None, free_dim=0):
    """Build an SDP with a known optimum via complementary X*, S*.

    Per block, X* and S* share an eigenbasis with complementary supports, so
    the pair (X*, y*, S*) with C := A^T(y*) - S* and rhs := A(X*) + F u* is
    primal-dual optimal with value rhs . y*.
    """
    rng = np.random.default_rng(seed)
    dims = dims or tuple(rng.integers(2, 5, size=rng.integers(1, 4)))
    m = m or int(rng.integers(3, 9))

    def sym(n):
        w = rng.normal(size=(n, n))
        return (w + w.T) / 2

    A = [[sym(n) for n in dims] for _ in range(m)]
    ystar = rng.normal(size=m)
    Xstar, Sstar = [], []
    for n in dims:
        Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
        k = max(1, n // 2)
        lx = np.concatenate([rng.uniform(0.5, 1.5, size=k), np.zeros(n - k)])
        ls = np.concatenate([np.zeros(k), rng.uniform(0.5, 1.5, size=n - k)])
        Xstar.append(Q @ np.diag(lx) @ Q.T)
        Sstar.append(Q @ np.diag(ls) @ Q.T)
    C = [sum(ystar[j] * A[j][b] for j in range(m)) - Sstar[b] for b in range(len(dims))]
    rhs = np.array([sum(np.tensordot(A[j][b], Xstar[b]) for b in range(len(dims)))
                    for j in range(m)])
    ustar = np.zeros(0)
    F = None
    q = None
    if free_dim:
        F = rng.normal(size=(m, free_dim))
        ustar = rng.normal(size=free_dim)
        q = F.T @ ystar
        rhs = rhs + F @ ustar
    prob = SdpProblem(dims, free_dim=free_dim)
    prob.set_objective(blocks={b: C[b] for b in range(len(dims))},
                       free=q if free_dim else None)
    for j in range(m):
        prob.add_constraint({b: A[j][b] for b in range(len(dims))},
                            free=F[j] if free_dim else None, rhs=rhs[j])
    return prob, float(rhs @ ystar)


@pytest.mark.parametrize("seed", range(20))
def test_random_known_optimum(seed):
    free_dim = 2 if seed % 3 == 0 else 0
    prob, opt = random_instance(seed, free_dim=free_dim)
    sol = solve(prob)
    assert sol.status in ACCEPTED
    assert abs(sol.objective_value - opt) <= 1e-6 * (1.0 + abs(opt))
    pinf, dinf, gap = residuals(prob, sol)
    assert pinf <= 1e-5 and dinf <= 1e-5


@pytest.mark.parametrize("seed", [1, 7, 13])
def test_weak_duality_on_iterates(seed):
    prob, _ = random_instance(seed)
    sol = solve(prob)
    assert sol.iterate_log, "expected at least one logged iterate"
    for rec in sol.iterate_log:
        # interior iterates keep X, S positive definite, so <X, S> > 0
        assert rec["gap"] > 0.0
    last = sol.iterate_log[-1]
    scale = 1.0 + abs(last["pobj"]) + abs(last["dobj"])
    if last["pinf"] <= 1e-8 and last["dinf"] <= 1e-8:
        assert last["dobj"] - last["pobj"] >= -1e-6 * scale


# ---------------------------------------------------------------------------
# small analytic programs
# ---------------------------------------------------------------------------

def test_max_offdiagonal_with_unit_diagonal():
    # max 2 X01 over PSD X with X00 = X11 = 1 -> 2 at the all-ones matrix
    prob = SdpProblem([2])
    prob.set_objective(blocks={0: np.array([[0.0, 1.0], [1.0, 0.0]])})
    prob.add_constraint({0: np.array([[1.0, 0.0], [0.0, 0.0]])}, rhs=1.0)
    prob.add_constraint({0: np.array([[0.0, 0.0], [0.0, 1.0]])}, rhs=1.0)
    sol = solve(prob)
    assert sol.status in ACCEPTED
    assert sol.objective_value == pytest.approx(2.0, abs=1e-6)
    assert_allclose(sol.primal_blocks[0], np.ones((2, 2)), atol=1e-4)


def test_free_variable_at_psd_boundary():
    # max u subject to X00 + u = 1, X >= 0: optimum 1 with X00 -> 0
    prob = SdpProblem([1], free_dim=1)
    prob.set_objective(free=[1.0])
    prob.add_constraint({0: np.array([[1.0]])}, free=[1.0], rhs=1.0)
    sol = solve(prob)
    assert sol.status in ACCEPTED
    assert sol.objective_value == pytest.approx(1.0, abs=1e-6)
    assert sol.free_values[0] == pytest.approx(1.0, abs=1e-5)


def test_triplet_and_dense_rows_agree():
    dense = SdpProblem([2])
    dense.set_objective(blocks={0: np.array([[0.0, 1.0], [1.0, 0.0]])})
    dense.add_constraint({0: np.array([[1.0, 0.5], [0.5, 1.0]])}, rhs=1.0)
    trip = SdpProblem([2])
    trip.set_objective(blocks={0: np.array([[0.0, 1.0], [1.0, 0.0]])})
    trip.add_constraint({0: (np.array([0, 1, 0]), np.array([0, 1, 1]),
                             np.array([1.0, 1.0, 0.5]))}, rhs=1.0)
    a, b = solve(dense), solve(trip)
    assert a.objective_value == pytest.approx(b.objective_value, abs=1e-8)


def test_infeasible_is_detected():
    prob = SdpProblem([1])
    prob.add_constraint({0: np.array([[1.0]])}, rhs=-1.0)
    sol = solve(prob)
    assert sol.status == STATUS_INFEASIBLE


def test_unbounded_is_detected():
    # max tr X with only the off-diagonal pinned leaves the trace free to grow
    prob = SdpProblem([2])
    prob.set_objective(blocks={0: np.eye(2)})
    prob.add_constraint({0: np.array([[0.0, 0.5], [0.5, 0.0]])}, rhs=1.0)
    sol = solve(prob)
    assert sol.status == STATUS_UNBOUNDED


def test_duplicate_row_dropped_and_solved():
    prob = SdpProblem([2])
    prob.set_objective(blocks={0: np.array([[0.0, 1.0], [1.0, 0.0]])})
    A0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    A1 = np.array([[0.0, 0.0], [0.0, 1.0]])
    prob.add_constraint({0: A0}, rhs=1.0)
    prob.add_constraint({0: A1}, rhs=1.0)
    prob.add_constraint({0: A0}, rhs=1.0)           # exact duplicate
    sol = solve(prob)
    assert sol.status in ACCEPTED
    assert sol.dropped_rows
    assert sol.objective_value == pytest.approx(2.0, abs=1e-6)
    assert len(sol.dual) == 3


def test_inconsistent_duplicate_is_infeasible():
    prob = SdpProblem([1])
    prob.add_constraint({0: np.array([[1.0]])}, rhs=1.0)
    prob.add_constraint({0: np.array([[1.0]])}, rhs=2.0)
    sol = solve(prob)
    assert sol.status == STATUS_INFEASIBLE
    assert any("inconsistent" in msg for msg in sol.messages)


def test_input_validation():
    with pytest.raises(ValueError):
        SdpProblem([0])
    prob = SdpProblem([2])
    with pytest.raises(ValueError):
        prob.add_constraint({0: np.array([[0.0, 1.0], [0.0, 0.0]])}, rhs=0.0)
    with pytest.raises(ValueError):
        prob.add_constraint({0: np.eye(3)}, rhs=0.0)
    with pytest.raises(ValueError):
        solve(SdpProblem([1]))   # no constraints


def test_iteration_cap_reported():
    prob, _ = random_instance(3)
    sol = solve(prob, SolverOptions(max_iter=2))
    assert sol.status in (STATUS_MAXITER, STATUS_NEAR)
    assert sol.iterations <= 2


# ---------------------------------------------------------------------------
# SDPA sparse file round trip
# ---------------------------------------------------------------------------

def test_sdpa_round_trip(tmp_path):
    prob, opt = random_instance(5, dims=(3, 2), m=5, free_dim=0)
    path = tmp_path / "prob.dat-s"
    from hvtest.sdp_solver import write_sdpa
    write_sdpa(prob, str(path))
    back = read_sdpa(str(path))
    assert tuple(back.block_dims) == tuple(prob.block_dims)
    assert back.n_constraints == prob.n_constraints
    a, b = solve(prob), solve(back)
    assert a.objective_value == pytest.approx(b.objective_value, abs=1e-7)
    assert a.objective_value == pytest.approx(opt, abs=1e-6 * (1 + abs(opt)))


def test_sdpa_free_variables_become_paired_diagonals(tmp_path):
    prob, opt = random_instance(8, dims=(3,), m=4, free_dim=2)
    path = tmp_path / "free.dat-s"
    from hvtest.sdp_solver import write_sdpa
    write_sdpa(prob, str(path))
    header = path.read_text().splitlines()
    assert header[2].split()[-1] == "-4"    # 2 free vars -> 4 paired diagonals
    sol = solve(prob)
    assert sol.objective_value == pytest.approx(opt, abs=1e-6 * (1 + abs(opt)))
