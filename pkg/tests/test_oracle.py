import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcorr.entropy import linear, renyi, tsallis, von_neumann
from qcorr.oracle import (
    BellDecoherenceParams,
    MixtureParams,
    concurrence_mixture_2q,
    concurrence_threshold_2q,
    eof_mixture_2q,
    ifb_2q_angle,
    ifb_2q_min,
    ifb_bell_angle,
    ifb_bell_decoherence,
    ifb_mixture,
    log_gap_estimate,
    negativity_threshold,
    slope_condition_holds,
    slope_condition_q_interval,
)

FAMILY = [von_neumann(), linear(), tsallis(0.5), tsallis(1.5), tsallis(3.0)]


def test_params_validation():
    with pytest.raises(ValueError):
        MixtureParams((0.6, 0.6), 0.5, 4)
    with pytest.raises(ValueError):
        MixtureParams((0.5, 0.5), 1.5, 4)
    with pytest.raises(ValueError):
        MixtureParams((0.5, 0.3, 0.2), 0.5, 2)
    with pytest.raises(ValueError):
        BellDecoherenceParams(1.2)
    assert MixtureParams((0.1, 0.9), 0.5, 4).schmidt_probs == (0.9, 0.1)


def test_ifb_mixture_examples():
    for F in FAMILY:
        assert ifb_mixture(F, MixtureParams((0.5, 0.5), 0.0, 4)) == pytest.approx(0.0, abs=1e-15)
    assert ifb_mixture(linear(), MixtureParams((0.5, 0.5), 1.0, 4)) == pytest.approx(1.0)
    for probs, n, x in (((0.5, 0.5), 4, 0.3), ((0.6, 0.3, 0.1), 9, 0.7)):
        p = np.array(probs)
        expected = 2 * x**2 * (1 - np.sum(p**2))
        assert ifb_mixture(linear(), MixtureParams(probs, x, n)) == pytest.approx(expected)


@pytest.mark.parametrize("F", FAMILY, ids=lambda F: F.tag)
def test_ifb_mixture_small_x(F):
    probs, n, x = (0.7, 0.2, 0.1), 9, 1e-3
    lead = -0.5 * F.d2f(1 / n) * (1 - np.sum(np.square(probs)))
    assert ifb_mixture(F, MixtureParams(probs, x, n)) / x**2 == pytest.approx(lead, rel=5e-3)


def test_ifb_mixture_matches_two_qubit_form():
    for F in FAMILY:
        for p in (0.5, 0.7, 0.9):
            for x in (0.2, 0.6, 1.0):
                assert ifb_mixture(F, MixtureParams((p, 1 - p), x, 4)) == pytest.approx(ifb_2q_min(F, p, x))


def test_ifb_mixture_absolute_entanglement_order():
    # (0.5, 0.3, 0.2) is majorized by (0.6, 0.3, 0.1)
    for F in FAMILY:
        for x in (0.2, 0.5, 0.9):
            more = ifb_mixture(F, MixtureParams((0.5, 0.3, 0.2), x, 9))
            less = ifb_mixture(F, MixtureParams((0.6, 0.3, 0.1), x, 9))
            assert more >= less


@pytest.mark.parametrize("F", FAMILY, ids=lambda F: F.tag)
def test_ifb_2q_angle(F):
    for p, x in ((0.9, 0.5), (0.7, 1.0)):
        assert ifb_2q_angle(F, p, x, 0.0) == pytest.approx(ifb_2q_min(F, p, x))
        thetas = np.linspace(0, np.pi / 2, 30)
        vals = [ifb_2q_angle(F, p, x, t) for t in thetas]
        assert np.all(np.diff(vals) >= -1e-14)
    vals = [ifb_2q_angle(F, 0.5, 0.6, t) for t in np.linspace(0, np.pi, 7)]
    assert_allclose(vals, vals[0], atol=1e-14)


def test_ifb_2q_min_examples():
    assert ifb_2q_angle(linear(), 0.9, 0.5, 0.0) == pytest.approx(0.09)
    for F in FAMILY:
        for x in (0.3, 1.0):
            assert ifb_2q_min(F, 0.0, x) == pytest.approx(0.0, abs=1e-15)
            assert ifb_2q_min(F, 1.0, x) == pytest.approx(0.0, abs=1e-15)
        ps = np.linspace(0.5, 1.0, 21)
        vals = [ifb_2q_min(F, p, 0.7) for p in ps]
        assert np.all(np.diff(vals) <= 1e-14)
    for p, x in ((0.3, 0.4), (0.9, 0.8)):
        assert ifb_2q_min(linear(), p, x) == pytest.approx(4 * x**2 * p * (1 - p))
    assert ifb_2q_min(von_neumann(), 0.5, 1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ifb_2q_min(renyi(2.0), 0.5, 0.5)


def test_concurrence_mixture():
    # for two qubits the concurrence and negativity thresholds coincide
    assert concurrence_threshold_2q(0.5) == pytest.approx(1 / 3)
    assert concurrence_threshold_2q(0.9) == pytest.approx(negativity_threshold((0.9, 0.1), 4))
    assert concurrence_mixture_2q(0.5, 0.2) == 0.0
    assert concurrence_mixture_2q(0.5, 1 / 3) == pytest.approx(0.0, abs=1e-15)
    assert concurrence_mixture_2q(0.5, 0.5) == pytest.approx(0.25)
    assert concurrence_mixture_2q(0.9, 1.0) == pytest.approx(0.6)
    assert negativity_threshold((0.5, 0.5), 4) == pytest.approx(1 / 3)
    assert negativity_threshold((0.9, 0.1), 4) == pytest.approx(1 / 2.2)


def test_bell_decoherence_examples():
    for F in FAMILY:
        assert ifb_bell_decoherence(F, 0.0) == pytest.approx(0.0, abs=1e-15)
        zs = np.linspace(0, 1, 41)
        vals = np.array([ifb_bell_decoherence(F, z) for z in zs])
        assert np.all(np.diff(vals) > 0)
        assert np.all(np.diff(vals, 2) > -1e-12)
    assert ifb_bell_decoherence(linear(), 0.6) == pytest.approx(0.36)
    assert ifb_bell_decoherence(tsallis(3.0), 0.6) == pytest.approx(0.36)


def test_bell_angle_depends_on_theta():
    F = von_neumann()
    assert ifb_bell_angle(F, 0.6, 0.0) == pytest.approx(ifb_bell_decoherence(F, 0.6))
    assert ifb_bell_angle(F, 0.6, np.pi / 2) > ifb_bell_angle(F, 0.6, 0.0) + 0.1


def test_log_gap_near_one():
    F = von_neumann()
    for p in (0.5, 0.7, 0.9):
        errs = []
        for eps in (1e-4, 1e-6, 1e-8):
            x = 1 - eps
            gap = eof_mixture_2q(F, p, x) - ifb_2q_min(F, p, x)
            assert gap > 0
            errs.append(abs(gap - log_gap_estimate(x)) / log_gap_estimate(x))
        # only the leading term: the relative error decays like 1/log(1/eps)
        assert errs[0] > errs[1] > errs[2]


def test_log_gap_next_order_p_half():
    # at p = 1/2 the next term is eps * (1 - 5 / (4 ln 2))
    F = von_neumann()
    for eps in (1e-3, 1e-4, 1e-5):
        x = 1 - eps
        gap = eof_mixture_2q(F, 0.5, x) - ifb_2q_min(F, 0.5, x)
        two_term = log_gap_estimate(x) + eps * (1 - 5 / (4 * np.log(2)))
        assert gap == pytest.approx(two_term, rel=1e-3)


def test_slope_condition_von_neumann_never_holds():
    for p in (0.5, 0.7, 0.9):
        assert not slope_condition_holds(von_neumann(), "mixture", p)
    assert not slope_condition_holds(von_neumann(), "bell")
    with pytest.raises(ValueError):
        slope_condition_holds(linear(), "other")


def test_slope_condition_p_half_matches_closed_inequality():
    # f'(0) + 2 f'(1/2) - 3 f'(1) < -3 f''(1/2)
    for q in np.linspace(0.8, 4.2, 35):
        F = tsallis(q)
        closed = F.df(0.0) + 2 * F.df(0.5) - 3 * F.df(1.0) < -3 * F.d2f(0.5)
        assert slope_condition_holds(F, "mixture", 0.5) == closed


def test_slope_condition_predicts_crossing():
    # inside the interval I_q^B exceeds E_q just below x = 1; outside it does not
    x = 1 - 1e-3
    for q, above in ((2.5, True), (1.1, False), (4.0, False)):
        F = tsallis(q)
        assert (ifb_2q_min(F, 0.5, x) > eof_mixture_2q(F, 0.5, x)) is above
    z = 1 - 1e-3
    for q, above in ((2.5, True), (1.5, False)):
        F = tsallis(q)
        s = np.sqrt(1 - z * z)
        eof = F.f((1 + s) / 2) + F.f((1 - s) / 2)
        assert (ifb_bell_decoherence(F, z) > eof) is above


@pytest.mark.parametrize(
    "example, p, lo, hi, tol",
    [("mixture", 0.5, 1.27, 3.5, 0.05), ("mixture", 0.9, 1.3, 4.3, 0.05), ("bell", 0.5, 2.0, 3.0, 0.02)],
)
def test_slope_intervals(example, p, lo, hi, tol):
    q_lo, q_hi = slope_condition_q_interval(example, p)
    assert abs(q_lo - lo) <= tol
    assert abs(q_hi - hi) <= tol
