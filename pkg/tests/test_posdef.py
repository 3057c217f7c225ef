from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeharm.errors import DomainError, ResourceCapError
from freeharm.estimator import case_rng, random_disc
from freeharm.funcspace import SparseFunction, convolve, delta, involution
from freeharm.posdef import (
    GeometricTail,
    RadialProfile,
    chain_violations,
    condition2_sup,
    condition3_sum,
    condition4_limsup,
    condition_battery,
    condition_grid,
    conjugate_exponent_r,
    gram_matrix,
    hermitian_eigenvalues,
    holder_battery,
    holder_triple_check,
    jacobi_eigenvalues,
    log_lp_norm,
    lp_threshold,
    omega,
    pd_battery_phi_alpha,
    phi_alpha_extendable,
    phi_alpha_in_lp,
    quadratic_form,
    separation_witness,
    trace_growth_check,
)
from freeharm.words import GroupContext, enumerate_ball, is_cyclically_reduced

D2, D3 = GroupContext(2), GroupContext(3)
A = (1,)


# ---------------------------------------------------------------- eigenvalues


@settings(max_examples=40)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_jacobi_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    m = m + m.T
    got = jacobi_eigenvalues(m)
    want = np.linalg.eigvalsh(m)
    assert np.allclose(got, want, atol=1e-10 * max(1.0, np.abs(want).max()))


def test_hermitian_embedding():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    h = z + z.conj().T
    assert np.allclose(hermitian_eigenvalues(h), np.linalg.eigvalsh(h), atol=1e-10)


def test_jacobi_degenerate_inputs():
    assert jacobi_eigenvalues(np.zeros((0, 0))).size == 0
    assert np.allclose(jacobi_eigenvalues(np.eye(5) * 2), [2] * 5)
    assert np.allclose(jacobi_eigenvalues(np.array([[0, 1e-300], [1e-300, 0]])), [-1e-300, 1e-300], atol=1e-290)


# ---------------------------------------------------------------- gram


def test_gram_examples():
    rep = gram_matrix(delta(D2), [(), A])
    assert np.allclose(rep.matrix, np.eye(2)) and rep.psd
    rep = gram_matrix(RadialProfile.geometric(D2, 0.5), [(), A])
    assert np.allclose(rep.matrix, [[1, 0.5], [0.5, 1]])
    assert rep.min_eigenvalue == pytest.approx(0.5, abs=1e-12) and rep.psd
    phi = SparseFunction(D2, {(): 1, (1,): 2, (-1,): 2})
    rep = gram_matrix(phi, [(), A])
    assert rep.min_eigenvalue == pytest.approx(-1, abs=1e-12) and not rep.psd


@pytest.mark.parametrize("alpha, radius, size", [(0.5, 1, 5), (0.9, 2, 17), (0.99, 3, 53), (0.2, 3, 53)])
def test_phi_alpha_positive(alpha, radius, size):
    rep = pd_battery_phi_alpha(D2, alpha, radius)
    assert len(rep.base_set) == size
    assert rep.min_eigenvalue >= -1e-9 and rep.psd
    assert np.allclose(rep.matrix, rep.matrix.conj().T)


def test_gram_errors():
    with pytest.raises(ResourceCapError):
        pd_battery_phi_alpha(D2, 0.5, 4)
    with pytest.raises(DomainError):
        pd_battery_phi_alpha(D2, 1.5, 1)
    truncated = RadialProfile(D2, [1, 0.5], truncated=True)
    with pytest.raises(DomainError):
        gram_matrix(truncated, enumerate_ball(D2, 2))


def test_gram_report_json():
    d = json.loads(pd_battery_phi_alpha(D2, 0.5, 1).to_json())
    assert d["size"] == 5 and d["psd"] is True


@settings(max_examples=20)
@given(st.permutations(list(range(17))))
def test_gram_order_invariant(perm):
    ball = enumerate_ball(D2, 2)
    phi = RadialProfile.geometric(D2, 0.7)
    base = gram_matrix(phi, ball).min_eigenvalue
    shuffled = gram_matrix(phi, [ball[i] for i in perm]).min_eigenvalue
    assert shuffled == pytest.approx(base, abs=1e-10)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_quadratic_form_identity(seed, alpha):
    rng = np.random.default_rng(seed)
    ball = enumerate_ball(D2, 1)
    f = SparseFunction(D2, dict(zip(ball, random_disc(rng, len(ball)))))
    phi = RadialProfile.geometric(D2, alpha)
    rep = gram_matrix(phi, ball)
    lhs = omega(phi, convolve(involution(f), f))
    rhs = quadratic_form(rep, f)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
    assert rep.psd and lhs.real >= -1e-9


# ---------------------------------------------------------------- conditions


def test_condition_examples_delta():
    phi = RadialProfile(D2, [1])
    for p in (2, 3, 8):
        c2, c3, c4 = condition_battery(phi, p, 10)
        assert (c2.value, c2.verdict) == (1.0, "pass")
        assert (c3.value, c3.verdict) == (1.0, "pass")
        assert c4.verdict == "pass"


def test_condition2_examples():
    rep = condition2_sup(RadialProfile.geometric(D2, 0.5), 2, 20)
    assert rep.value == pytest.approx(1.0) and rep.verdict == "pass"
    ones = RadialProfile.geometric(D2, 1.0)
    rep = condition2_sup(ones, 2, 20)
    assert rep.verdict == "fail" and rep.divergence_flag


def test_condition3_examples():
    t = lp_threshold(D2, 2)
    rep = condition3_sum(RadialProfile.geometric(D2, t), 2, 30)
    from scipy.special import zeta

    assert rep.value == pytest.approx(1 + (4 / 3) * (zeta(4) - 1), rel=1e-10)
    assert rep.value == pytest.approx(1.1098, abs=1e-4)
    assert rep.verdict == "pass"
    rep = condition3_sum(RadialProfile.geometric(D2, 1.0), 2, 30)
    assert rep.verdict == "fail" and rep.divergence_flag


@pytest.mark.parametrize(
    "alpha, p, value, verdict",
    [(0.5, 2, math.sqrt(3) * 0.5, "pass"), (0.7, 2, math.sqrt(3) * 0.7, "fail"), (0.7, 4, 3 ** 0.25 * 0.7, "pass")],
)
def test_condition4_examples(alpha, p, value, verdict):
    rep = condition4_limsup(RadialProfile.geometric(D2, alpha), p, 20)
    assert rep.value == pytest.approx(value, rel=1e-14)
    assert rep.verdict == verdict


def test_condition_without_tail_is_inconclusive():
    phi = RadialProfile(D2, [1, 0.5, 0.25], truncated=True)
    for rep in condition_battery(phi, 2, 10):
        assert rep.verdict == "inconclusive"
    finite = RadialProfile(D2, [1, 0.5, 0.25])
    for rep in condition_battery(finite, 2, 10):
        assert rep.verdict == "pass"


def test_condition_domain():
    with pytest.raises(DomainError):
        condition2_sup(RadialProfile(D2, [1]), 1.5, 3)


def test_sweep_csv_header():
    rep = condition2_sup(RadialProfile.geometric(D2, 0.5), 2, 5)
    lines = rep.sweep_csv().splitlines()
    assert lines[0] == "k,sphere_norm,normalized_value" and len(lines) == 7


# ---------------------------------------------------------------- thresholds


def test_threshold_examples():
    assert lp_threshold(D2, 2) == pytest.approx(3 ** -0.5, rel=1e-15)
    assert lp_threshold(D2, 2) == 0.5773502691896258
    assert lp_threshold(D2, 4) == pytest.approx(0.75984, abs=1e-5)
    assert lp_threshold(D3, 2) == pytest.approx(0.44721, abs=1e-5)
    with pytest.raises(DomainError):
        lp_threshold(D2, 1.9)


@pytest.mark.parametrize("ctx", [D2, D3])
@pytest.mark.parametrize("p", [2, 2.5, 3, 4, 8])
def test_threshold_boundary_semantics(ctx, p):
    t = lp_threshold(ctx, p)
    assert phi_alpha_extendable(ctx, t, p)
    assert not phi_alpha_in_lp(ctx, t, p)
    assert phi_alpha_in_lp(ctx, t * 0.999, p)
    assert not phi_alpha_extendable(ctx, t * 1.001, p)


def test_separation_witness():
    w = separation_witness(D2, 2, 4)
    assert w.lower == pytest.approx(3 ** -0.5) and w.upper == pytest.approx(3 ** -0.25)
    assert w.separates
    assert separation_witness(D2, 2, 4, alpha=0.7).separates
    assert not separation_witness(D2, 2, 4, alpha=0.5).separates
    with pytest.raises(DomainError):
        separation_witness(D2, 4, 2)


# ---------------------------------------------------------------- trace growth


def test_trace_growth_examples():
    rows = trace_growth_check(D2, A, 2)
    assert [(r.count, r.lower_bound, r.passed) for r in rows] == [(2, 1, True), (6, 3, True)]
    assert trace_growth_check(D2, (1, 2), 1)[0].count >= 3
    with pytest.raises(DomainError):
        trace_growth_check(D2, (), 1)


def test_trace_growth_exhaustive():
    for w in enumerate_ball(D2, 2):
        if w and is_cyclically_reduced(w):
            assert all(r.passed for r in trace_growth_check(D2, w, 3))


# ---------------------------------------------------------------- hoelder


def test_holder_examples():
    rep = holder_triple_check(RadialProfile(D2, [1]), 0.5, 0.5, 2, 4, 4)
    assert rep.lhs == pytest.approx(1.0) and rep.passed
    # the right side carries |phi_beta|_r, which exceeds 1
    assert rep.rhs == pytest.approx(math.exp(log_lp_norm(RadialProfile.geometric(D2, 0.5), 4)))
    beta = 3 ** (-1 / 6) * 0.99
    rep = holder_triple_check(RadialProfile.geometric(D2, 0.5), 0.9, beta, 2, 4, 4)
    assert rep.passed


def test_holder_exponent_relation():
    assert conjugate_exponent_r(2, 4) == 4
    with pytest.raises(DomainError):
        holder_triple_check(RadialProfile(D2, [1]), 0.5, 0.5, 2, 4, 5)
    with pytest.raises(DomainError):
        holder_triple_check(RadialProfile(D2, [1]), 1.0, 0.5, 2, 4, 4)


def test_lp_norm_tail_against_long_sum():
    phi = RadialProfile.geometric(D2, 0.4, K=2, amplitude=0.5)
    k = np.arange(400)
    sizes = np.where(k == 0, 1.0, 4.0 * 3.0 ** (k - 1.0))
    direct = np.sum(sizes * (0.5 * 0.4**k) ** 3) ** (1 / 3)
    assert math.exp(log_lp_norm(phi, 3)) == pytest.approx(direct, rel=1e-12)
    assert log_lp_norm(RadialProfile.geometric(D2, 0.9), 2) == math.inf


def test_holder_battery_and_injection():
    assert holder_battery(3, 50).passed
    assert not holder_battery(3, 50, rhs_factor=0.5).passed


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_holder_property(seed):
    from freeharm.posdef import random_holder_instance

    rng = case_rng(seed, 0)
    phi, alpha, beta, p, q, r = random_holder_instance(rng, GroupContext(int(rng.choice([2, 3]))))
    assert holder_triple_check(phi, alpha, beta, p, q, r).passed


# ---------------------------------------------------------------- chain


def test_chain_on_grid():
    for d, p, a, reports in condition_grid():
        assert chain_violations(reports) == [], (d, p, a)


def test_chain_detector_flags_breaks():
    fake = condition_battery(RadialProfile.geometric(D2, 0.5), 2, 5)
    fake[2].verdict = "fail"
    assert chain_violations(fake) == ["(3) passes but (4) does not"]


@settings(max_examples=60)
@given(
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=6),
    st.floats(0.05, 1.5),
    st.sampled_from([2, 2.5, 3, 4, 8]),
    st.sampled_from([2, 3]),
)
def test_chain_on_random_profiles(head, ratio, p, d):
    ctx = GroupContext(d)
    phi = RadialProfile(ctx, head, GeometricTail(ratio, head[-1] or 1.0))
    assert chain_violations(condition_battery(phi, p, 25)) == []


def test_profile_json_round_trip():
    phi = RadialProfile(D2, [1, 0.5 + 0.25j], GeometricTail(0.4, 0.3), truncated=False)
    back = RadialProfile.from_json(json.loads(json.dumps(phi.to_json())))
    assert np.array_equal(back.coeffs, phi.coeffs) and back.tail == phi.tail
