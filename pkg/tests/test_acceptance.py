"""Acceptance criteria 1-9, each at its stated tolerance.

Every criterion prints one PASS/FAIL line (also collected into the pytest
terminal summary). Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from qcorr import cli, oracle
from qcorr.entangle import concurrence_2q, convexity_interval, eof_2q, negativity
from qcorr.entropy import DEFAULT_FAMILY, entropy, linear, majorizes, tsallis, von_neumann
from qcorr.measure import KrausSet, LocalBasis, ProductBasis, info_loss, kraus_apply, perturbative_loss, project
from qcorr.minimize import OptimizerConfig, bloch_vector, closest_classical_state, min_info_loss_local
from qcorr.qstate import (
    DensityMatrix,
    from_ket,
    partial_trace,
    random_density,
    random_ket,
    random_unitary,
    spectrum,
)

RESULTS: dict[int, list[tuple[str, bool, str]]] = {}


@contextmanager
def criterion(n: int, part: str):
    """Record pass/fail for one part of criterion n and print its line."""
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        detail = f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        RESULTS.setdefault(n, []).append((part, False, detail))
        print(f"criterion {n} [{part}]: FAIL ({detail})")
        raise
    dt = time.perf_counter() - t0
    RESULTS.setdefault(n, []).append((part, True, f"{dt:.1f}s"))
    print(f"criterion {n} [{part}]: PASS ({dt:.1f}s)")


def summary_lines() -> list[str]:
    lines = []
    for n in sorted(RESULTS):
        parts = RESULTS[n]
        ok = all(p[1] for p in parts)
        bad = [f"{name}: {detail}" for name, good, detail in parts if not good]
        lines.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}" + ("" if ok else " -- " + "; ".join(bad)))
    return lines


# ---------------------------------------------------------------------------


def test_criterion_1_pure_state_reduction():
    rng = np.random.default_rng(2024)
    cfg = OptimizerConfig()
    with criterion(1, "pure-state reduction, 50 states x 4 entropies, tol 1e-6, <= 30 s"):
        t0 = time.perf_counter()
        worst = 0.0
        for _ in range(50):
            rho = from_ket(random_ket((2, 2), rng), (2, 2))
            for F in DEFAULT_FAMILY:
                target = entropy(F, partial_trace(rho, "A"))
                worst = max(worst, abs(min_info_loss_local(F, rho, "B", cfg).loss - target))
        elapsed = time.perf_counter() - t0
        assert worst <= 1e-6, f"max deviation {worst:.2e}"
        assert elapsed <= 30.0, f"took {elapsed:.1f}s"


def test_criterion_2_mixture_oracle():
    cfg = OptimizerConfig()
    with criterion(2, "mixture oracle, tol 1e-7, theta = 0 for p != 1/2, <= 60 s"):
        t0 = time.perf_counter()
        worst, worst_angle = 0.0, 0.0
        for p in (0.5, 0.9):
            for x in np.round(np.arange(1, 11) / 10, 1):
                for F in (von_neumann(), linear()):
                    rep = min_info_loss_local(F, oracle.mixture_2q(p, x), "B", cfg)
                    worst = max(worst, abs(rep.loss - oracle.ifb_2q_min(F, p, x)))
                    if p != 0.5:
                        # theta = 0 up to the n -> -n symmetry of a qubit measurement
                        nz = abs(bloch_vector(rep.basis.vectors[:, 0])[2])
                        worst_angle = max(worst_angle, math.acos(min(1.0, nz)))
        elapsed = time.perf_counter() - t0
        assert worst <= 1e-7, f"max deviation {worst:.2e}"
        assert worst_angle <= 1e-4, f"optimal angle off by {worst_angle:.2e} rad"
        assert elapsed <= 60.0, f"took {elapsed:.1f}s"


def test_criterion_3_quadratic_identities():
    cfg = OptimizerConfig()
    F = linear()
    with criterion(3, "I2B(x) = 4x^2p(1-p) and I2B(z) = z^2 = C^2(z), tol 1e-9"):
        worst = 0.0
        for p in (0.5, 0.7, 0.9):
            for x in np.linspace(0.05, 1.0, 20):
                val = min_info_loss_local(F, oracle.mixture_2q(p, x), "B", cfg).loss
                worst = max(worst, abs(val - 4 * x * x * p * (1 - p)))
        for z in np.linspace(0.05, 1.0, 20):
            rho = oracle.bell_decoherence_state(z)
            val = min_info_loss_local(F, rho, "B", cfg).loss
            worst = max(worst, abs(val - z * z), abs(concurrence_2q(rho) ** 2 - z * z))
        assert worst <= 1e-9, f"max deviation {worst:.2e}"


def test_criterion_4_orderings():
    vn = von_neumann()
    with criterion(4, "I2B >= C^2 (equality only at x in {0,1}); E(z) >= I(z); E > I at x = 1-1e-4"):
        for p in np.linspace(0.1, 0.9, 9):
            for x in np.linspace(0.0, 1.0, 21):
                rho = oracle.mixture_2q(p, x)
                i2 = oracle.ifb_2q_min(linear(), p, x)
                c2 = concurrence_2q(rho) ** 2
                assert i2 >= c2 - 1e-12, (p, x)
                if 0.0 < x < 1.0:
                    assert i2 > c2 + 1e-12, (p, x)
                else:
                    assert abs(i2 - c2) <= 1e-9, (p, x)
        for z in np.linspace(0.01, 0.99, 99):
            assert eof_2q(vn, oracle.bell_decoherence_state(z)) >= oracle.ifb_bell_decoherence(vn, z) - 1e-12
        for p in (0.5, 0.7, 0.9):
            x = 1 - 1e-4
            assert oracle.eof_mixture_2q(vn, p, x) > oracle.ifb_2q_min(vn, p, x)


@pytest.mark.xfail(
    strict=True,
    reason="leading-order log-gap estimate is ~24% off at x = 1-1e-4; the next-order term "
    "is -0.80(1-x) against 3.32(1-x) (see decisions ledger)",
)
def test_criterion_4_log_gap_within_20_percent():
    vn = von_neumann()
    with criterion(4, "log-gap estimate within 20% at x = 1-1e-4"):
        x = 1 - 1e-4
        for p in (0.5, 0.9):
            gap = oracle.eof_mixture_2q(vn, p, x) - oracle.ifb_2q_min(vn, p, x)
            rel = abs(gap - oracle.log_gap_estimate(x)) / oracle.log_gap_estimate(x)
            assert rel <= 0.2, f"p={p}: relative error {rel:.3f}"


def test_criterion_5_convexity_interval():
    with criterion(5, "Tsallis EOF convexity interval within 0.01 of (5 -+ sqrt 13)/2"):
        lo, hi = convexity_interval()
        assert abs(lo - (5 - math.sqrt(13)) / 2) <= 0.01, lo
        assert abs(hi - (5 + math.sqrt(13)) / 2) <= 0.01, hi


@pytest.mark.parametrize(
    "example, p, expected, tol",
    [("mixture", 0.5, (1.27, 3.5), 0.05), ("mixture", 0.9, (1.3, 4.3), 0.05), ("bell", 0.5, (2.0, 3.0), 0.02)],
)
def test_criterion_6_slope_intervals(example, p, expected, tol):
    label = f"{example} p={p}" if example == "mixture" else example
    with criterion(6, f"slope-condition interval {label} ~ {expected} +- {tol}"):
        q_lo, q_hi = oracle.slope_condition_q_interval(example, p)
        assert abs(q_lo - expected[0]) <= tol, q_lo
        assert abs(q_hi - expected[1]) <= tol, q_hi


def _negativity_root(probs, lo=0.0, hi=1.0, tol=1e-9):
    def neg(x):
        return negativity(oracle.mixture_state(probs, x, (2, 2)))

    assert neg(lo) <= 1e-12 < neg(hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if neg(mid) > 1e-12:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def test_criterion_7_negativity_threshold():
    with criterion(7, "negativity crosses zero at 1/(1+n sqrt(p1 p2)), tol 1e-3"):
        for probs in ((0.5, 0.5), (0.9, 0.1)):
            root = _negativity_root(probs)
            assert abs(root - oracle.negativity_threshold(probs, 4)) <= 1e-3, (probs, root)
        assert abs(_negativity_root((0.5, 0.5)) - 1 / 3) <= 1e-3


def test_criterion_8_property_suites():
    rng = np.random.default_rng(88)
    cfg = OptimizerConfig(restarts=8)
    with criterion(8, "property suites with fixed seeds"):
        for _ in range(50):
            rho = random_density((2, 2), rng, rank=int(rng.integers(1, 5)))
            u = random_unitary(4, rng)
            post = project(rho, [np.outer(u[:, k], u[:, k].conj()) for k in range(4)])
            assert majorizes(spectrum(rho), spectrum(post))
            basis = LocalBasis("B", random_unitary(2, rng))
            for F in DEFAULT_FAMILY:
                loss = info_loss(F, rho, basis).loss
                assert loss >= -1e-9
                s_ab = entropy(F, rho)
                for side in "AB":
                    assert loss >= entropy(F, partial_trace(rho, side)) - s_ab - 1e-9

        # the lower bounds also hold at the minimum
        for _ in range(5):
            rho = random_density((2, 2), rng)
            for F in DEFAULT_FAMILY:
                s_ab = entropy(F, rho)
                bound = max(0.0, *(entropy(F, partial_trace(rho, k)) - s_ab for k in "AB"))
                assert min_info_loss_local(F, rho, "B", cfg).loss >= bound - 1e-9

        # majorization chain on random pure states
        for _ in range(10):
            psi = random_ket((2, 2), rng)
            rho = from_ket(psi, (2, 2))
            p_schmidt = spectrum(partial_trace(rho, "A"))
            basis = LocalBasis("B", random_unitary(2, rng))
            q = np.real(np.diag(basis.vectors.conj().T @ partial_trace(rho, "B").data @ basis.vectors))
            pij = spectrum(info_loss(linear(), rho, ProductBasis(LocalBasis("A", random_unitary(2, rng)), basis)).post_state)
            assert majorizes(p_schmidt, q) and majorizes(q, pij)
            closest = spectrum(closest_classical_state(von_neumann(), rho, cfg))
            assert np.allclose(closest[:2], p_schmidt[:2], atol=1e-6)

        # perturbative loss agrees to O(eps^3)
        base = np.diag([0.5, 0.3, 0.2])
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = (h + h.conj().T) / 2
        np.fill_diagonal(h, 0)
        z3 = [np.diag(v) for v in np.eye(3)]
        for F in (von_neumann(), tsallis(0.5), tsallis(3.0)):
            ratios = []
            for eps in (1e-2, 1e-3, 1e-4):
                rho = DensityMatrix(base + eps * h, (3, 1))
                ratios.append(abs(perturbative_loss(F, rho, z3) - info_loss(F, rho, z3).loss) / eps**3)
            assert max(ratios) < 100, ratios

        # bistochastic Kraus maps never decrease any S_f
        for _ in range(20):
            rho = random_density((3, 1), rng)
            w = rng.dirichlet(np.ones(3))
            K = KrausSet([np.sqrt(wk) * random_unitary(3, rng) for wk in w])
            out = kraus_apply(rho, K)
            assert K.bistochastic and majorizes(spectrum(rho), spectrum(out))
            for F in DEFAULT_FAMILY:
                assert entropy(F, out) >= entropy(F, rho) - 1e-9

        # Tsallis q -> 1 limit
        for _ in range(20):
            p = rng.dirichlet(np.ones(4))
            assert abs(tsallis(1.0001).spectrum_entropy(p) - von_neumann().spectrum_entropy(p)) <= 1e-3


def test_criterion_9_figure_regeneration(tmp_path):
    with criterion(9, "figure CSVs pass embedded assertions and are byte-identical per seed"):
        runs = []
        for p in ("0.5", "0.9"):
            runs.append(["figure1", "--p", p, "--q", "1,1.5,2,3,5", "--xgrid", "0:1:0.01"])
            runs.append(["figure1", "--p", p, "--q", "1,1.5,2,3,5", "--xgrid", "0:1:0.05",
                         "--verify", "--seed", "9"])
        runs.append(["figure2", "--q", "1,1.5,2,3,5", "--zgrid", "0:1:0.01"])
        runs.append(["figure2", "--q", "1,1.5,2,3,5", "--zgrid", "0:1:0.05", "--verify", "--seed", "9"])
        for k, argv in enumerate(runs):
            outputs = []
            for rep in range(2):
                path = tmp_path / f"run{k}_{rep}.csv"
                assert cli.main(argv + ["--out", str(path)]) == 0, argv
                outputs.append(path.read_bytes())
            assert outputs[0] == outputs[1], f"non-deterministic output for {argv}"
