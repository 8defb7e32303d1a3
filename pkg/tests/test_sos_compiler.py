import numpy as np
import pytest
from numpy.testing import assert_allclose

import hvtest.sos_compiler as sc
from hvtest.models import build_coin, build_slh
from hvtest.polynomial import Monomial, MonomialBasis, Polynomial
from hvtest.sdp_solver import STATUS_INFEASIBLE, SdpSolution
from hvtest.sos_compiler import TestCertificate as Certificate
from hvtest.sos_compiler import (
    CompileError,
    GramBlock,
    ModelSpec,
    NoBoundAtDegree,
    SolverFailure,
    Tolerances,
    bound_observable,
    center_model,
    compile,
    extract_certificate,
    load_certificate,
    normalized_hyperplane,
    run_test,
    save_certificate,
    to_sdp,
    verify_certificate,
)


# ---------------------------------------------------------------------------
# compile and SDP shape
# ---------------------------------------------------------------------------

def test_compile_coin_shape():
    spec = build_coin(2)
    prog = compile(spec, [0.2, 0.3], 2)
    assert prog.degree == 2
    # one free square block plus one multiplier per domain polynomial
    assert len(prog.gram_blocks) == 1 + len(spec.domain_polys)
    assert prog.gram_blocks[0].domain_index is None
    assert not prog.dropped_multipliers
    prob = to_sdp(prog)
    assert tuple(prob.block_dims) == tuple(len(b.basis) for b in prog.gram_blocks)


def test_compile_rejects_wrong_feature_count():
    with pytest.raises(CompileError):
        compile(build_coin(2), [0.1, 0.2, 0.3], 2)


def test_compile_rejects_bad_degree():
    with pytest.raises(CompileError):
        compile(build_coin(2), [0.2, 0.3], 0)


def test_compile_warns_below_feature_degree(caplog):
    with caplog.at_level("WARNING", logger="hvtest.sos_compiler"):
        compile(build_coin(3), [0.1, 0.05, 0.02], 2)
    assert any("degenerate face" in rec.message for rec in caplog.records)


# ---------------------------------------------------------------------------
# the coin worked example
# ---------------------------------------------------------------------------

def test_coin_violation_and_exact_objective():
    # statistics (0.2, 0.3) sit outside the coin feature curve; the optimal
    # hyperplane is b = (-5/4, 5) with 1 - b.f = (1 - 2.5 eta)^2, value 1.25
    cert = run_test(build_coin(2), [0.2, 0.3], 2)
    assert cert.violated
    assert cert.objective == pytest.approx(1.25, abs=1e-5)
    assert_allclose(cert.hyperplane, [-1.25, 5.0], atol=2e-3)
    report = verify_certificate(build_coin(2), cert)
    assert report.passed


def test_coin_feasible_point_not_flagged():
    # f(1/2) = (1/4, 1/4) lies on the curve itself
    cert = run_test(build_coin(2), [0.25, 0.25], 2)
    assert not cert.violated
    assert cert.objective <= 1.0 + 1e-6


def test_coin_bound_specific_sequence():
    # P(heads then tails) = eta (1 - eta), supremum 1/4 over eta in [0, 1]
    val = bound_observable(build_coin(2), [0.0, 1.0], 2)
    assert val == pytest.approx(0.25, abs=1e-6)


# ---------------------------------------------------------------------------
# hand-written certificates
# ---------------------------------------------------------------------------

def _coin_hand_certificate(b_tilde, gram):
    basis = MonomialBasis(1, 1)   # [1, eta]
    return Certificate(
        hyperplane=np.asarray(b_tilde, dtype=float),
        objective=float(np.dot(b_tilde, [0.2, 0.3])),
        gram_matrices=[(GramBlock("s0", basis, None), np.asarray(gram, dtype=float))],
        residual_sup=0.0,
        min_eig=0.0,
        violated=True,
        degree=2,
        model_name="coin2",
    )


@pytest.mark.parametrize("b_tilde,gram", [
    ([0.0, 4.0], [[1.0, -2.0], [-2.0, 4.0]]),
    ([-24.0 / 25.0, 24.0 / 5.0], [[1.0, -2.4], [-2.4, 5.76]]),
])
def test_hand_certificates_verify(b_tilde, gram):
    cert = _coin_hand_certificate(b_tilde, gram)
    report = verify_certificate(build_coin(2), cert)
    assert report.passed, report.notes
    assert report.residual_sup <= 1e-6
    assert report.min_eig >= -1e-7


def test_tampered_gram_fails_verification():
    cert = _coin_hand_certificate([0.0, 4.0], [[1.0, -2.0], [-2.0, 3.9]])
    report = verify_certificate(build_coin(2), cert)
    assert not report.passed
    assert not report.residual_ok


def test_tampered_hyperplane_fails_verification():
    cert = _coin_hand_certificate([0.1, 4.0], [[1.0, -2.0], [-2.0, 4.0]])
    report = verify_certificate(build_coin(2), cert)
    assert not report.passed


def test_negative_gram_fails_psd_check():
    cert = _coin_hand_certificate([0.0, 4.0], [[1.0, -2.5], [-2.5, 4.0]])
    report = verify_certificate(build_coin(2), cert)
    assert not report.psd_ok


def test_malformed_certificate_reports_instead_of_raising():
    basis = MonomialBasis(1, 1)
    cert = Certificate(
        hyperplane=np.array([0.0, 4.0]),
        objective=1.2,
        gram_matrices=[(GramBlock("s0", basis, None), np.eye(3))],  # wrong size
        residual_sup=0.0, min_eig=0.0, violated=True, degree=2)
    report = verify_certificate(build_coin(2), cert)
    assert not report.passed
    assert report.notes


# ---------------------------------------------------------------------------
# hyperplane normalization and centering
# ---------------------------------------------------------------------------

def test_normalized_hyperplane_examples():
    spec = build_coin(2)
    assert_allclose(normalized_hyperplane(spec, [0.0, 1.0], 0.25), [0.0, 4.0])
    assert_allclose(normalized_hyperplane(spec, [-0.2, 1.0], 5.0 / 24.0),
                    [-24.0 / 25.0, 24.0 / 5.0])


def test_normalized_hyperplane_rejects_nonpositive_margin():
    with pytest.raises(ValueError):
        normalized_hyperplane(build_coin(2), [0.0, 1.0], 0.0)


def test_center_model_matches_moments():
    # with eta uniform on [0, 1]: E[eta^2] = 1/3 and E[eta(1-eta)] = 1/6
    cen = center_model(build_coin(2), samples=20000, seed=1)
    assert_allclose(cen.center, [1.0 / 3.0, 1.0 / 6.0], atol=0.01)


def test_centered_test_agrees_on_violation():
    spec = build_coin(2)
    cen = center_model(spec, samples=20000, seed=1)
    raw = run_test(spec, [0.2, 0.3], 2)
    shifted = run_test(cen, [0.2, 0.3], 2)
    assert raw.violated and shifted.violated
    assert shifted.center is not None
    assert verify_certificate(cen, shifted).passed


# ---------------------------------------------------------------------------
# observable bounds: soundness and degree monotonicity
# ---------------------------------------------------------------------------

def _grid_sup(spec, c, n=2000):
    rng = np.random.default_rng(7)
    pts = spec.sample_box(rng, n)
    pts = pts[spec.in_domain(pts)]
    return float(np.max(spec.feature_values(pts) @ np.asarray(c)))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bound_dominates_sampled_supremum_coin(seed):
    spec = build_coin(3)
    rng = np.random.default_rng(seed)
    c = rng.normal(size=len(spec.features))
    val = bound_observable(spec, c, 4)
    assert val >= _grid_sup(spec, c) - 1e-7


def test_bound_dominates_sampled_supremum_chain():
    spec = build_slh(2, mode="symmetric")
    rng = np.random.default_rng(3)
    c = rng.normal(size=len(spec.features))
    val = bound_observable(spec, c, 4)
    assert val >= _grid_sup(spec, c) - 1e-7


def test_bound_nonincreasing_in_degree():
    spec = build_coin(3)
    c = [0.0, 1.0, 0.5]
    v2 = bound_observable(spec, c, 2)
    v4 = bound_observable(spec, c, 4)
    v6 = bound_observable(spec, c, 6)
    assert v4 <= v2 + 1e-7
    assert v6 <= v4 + 1e-7


def test_model_points_never_violate():
    spec = build_coin(2)
    for eta in (0.0, 0.3, 0.5, 1.0):
        y = spec.feature_values(np.array([[eta]]))[0]
        cert = run_test(spec, y, 2)
        assert not cert.violated, "false positive at eta=%.2f" % eta


# ---------------------------------------------------------------------------
# failure modes
# ---------------------------------------------------------------------------

def test_unrepresentable_target_raises_solver_failure():
    # without any domain multiplier, u - x is never a sum of squares, and no
    # Farkas ray exists either; the run must surface as a failure, not a bound
    x = Polynomial.variable(1, 0)
    spec = ModelSpec(nvars=1, domain_polys=[], features=[x],
                     feature_labels=["x"], box=((0.0, 1.0),))
    with pytest.raises(SolverFailure):
        bound_observable(spec, [1.0], 2)


def test_infeasible_status_maps_to_no_bound(monkeypatch):
    spec = build_coin(2)

    def fake_solve(prob, opts=None):
        dims = prob.block_dims
        return SdpSolution(STATUS_INFEASIBLE, np.nan,
                           [np.zeros((n, n)) for n in dims],
                           np.zeros(prob.free_dim), np.zeros(prob.n_constraints),
                           np.nan)

    monkeypatch.setattr(sc, "solve", fake_solve)
    with pytest.raises(NoBoundAtDegree) as exc:
        bound_observable(spec, [0.0, 1.0], 2)
    assert exc.value.degree == 2


def test_iteration_starved_run_raises():
    from hvtest.sdp_solver import SolverOptions
    with pytest.raises(SolverFailure):
        run_test(build_coin(2), [0.2, 0.3], 2, options=SolverOptions(max_iter=1))


# ---------------------------------------------------------------------------
# certificate serialization
# ---------------------------------------------------------------------------

def test_certificate_round_trip(tmp_path):
    spec = build_coin(2)
    cert = run_test(spec, [0.2, 0.3], 2)
    path = tmp_path / "cert.json"
    save_certificate(str(path), cert)
    back = load_certificate(str(path))
    assert back.model_name == cert.model_name
    assert back.degree == cert.degree
    assert back.violated == cert.violated
    assert_allclose(back.hyperplane, cert.hyperplane, atol=0)
    for (blk_a, g_a), (blk_b, g_b) in zip(cert.gram_matrices, back.gram_matrices):
        assert blk_a.domain_index == blk_b.domain_index
        assert list(blk_a.basis) == list(blk_b.basis)
        assert_allclose(g_a, g_b, atol=0)
    assert verify_certificate(spec, back).passed


def test_corrupted_file_fails_verification(tmp_path):
    import json
    spec = build_coin(2)
    cert = run_test(spec, [0.2, 0.3], 2)
    path = tmp_path / "cert.json"
    save_certificate(str(path), cert)
    doc = json.loads(path.read_text())
    doc["hyperplane"][1] = doc["hyperplane"][1] + 0.05
    path.write_text(json.dumps(doc))
    assert not verify_certificate(spec, load_certificate(str(path))).passed
