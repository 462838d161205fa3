"""Closed forms for three state families, used as ground truth for the optimizer.

Families:

* mixture of an entangled pure state with the maximally mixed state,
  ``x |Psi><Psi| + (1 - x) I / n``;
* its two-qubit case with ``|Psi> = sqrt(p)|00> + sqrt(1-p)|11>``;
* Bell-state decoherence ``((1+z)/2) |Psi+><Psi+| + ((1-z)/2) |Psi-><Psi-|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entangle import convexity_interval, eof_from_concurrence
from .entropy import EntropyFunctional, tsallis
from .qstate import DensityMatrix, Ket, from_ket

Q_TOL = 1e-4


def _trace_form(F: EntropyFunctional):
    if not F.is_trace_form:
        raise ValueError(f"closed forms need an entropy of the form Tr f(rho), got {F.tag}")


@dataclass(frozen=True)
class MixtureParams:
    schmidt_probs: tuple
    x: float
    n: int

    def __post_init__(self):
        p = np.asarray(self.schmidt_probs, dtype=float)
        if abs(p.sum() - 1.0) > 1e-10 or np.any(p < 0):
            raise ValueError("Schmidt probabilities must be nonnegative and sum to 1")
        if not 0.0 <= self.x <= 1.0:
            raise ValueError(f"x must lie in [0, 1], got {self.x}")
        if self.n < p.size:
            raise ValueError("n must be at least the number of Schmidt probabilities")
        object.__setattr__(self, "schmidt_probs", tuple(np.sort(p)[::-1]))


@dataclass(frozen=True)
class BellDecoherenceParams:
    z: float

    def __post_init__(self):
        if abs(self.z) > 1:
            raise ValueError(f"|z| must be <= 1, got {self.z}")


# ---------------------------------------------------------------------------
# state builders


def pure_2q(p: float) -> Ket:
    return Ket([np.sqrt(p), 0.0, 0.0, np.sqrt(1.0 - p)])


def mixture_state(schmidt_probs, x: float, dims: tuple[int, int] | None = None) -> DensityMatrix:
    """x |Psi><Psi| + (1 - x) I/n with |Psi> = sum_k sqrt(p_k) |k k> in the computational basis."""
    p = np.asarray(schmidt_probs, dtype=float)
    if dims is None:
        dims = (p.size, p.size)
    dA, dB = dims
    amp = np.zeros(dA * dB)
    for k, pk in enumerate(p):
        amp[k * dB + k] = np.sqrt(pk)
    n = dA * dB
    psi = from_ket(Ket(amp), dims).data
    return DensityMatrix(x * psi + (1.0 - x) * np.eye(n) / n, dims)


def mixture_2q(p: float, x: float) -> DensityMatrix:
    return mixture_state([p, 1.0 - p], x, (2, 2))


def bell_decoherence_state(z: float) -> DensityMatrix:
    BellDecoherenceParams(z)
    m = np.zeros((4, 4))
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = z / 2
    return DensityMatrix(m, (2, 2))


# ---------------------------------------------------------------------------
# information-loss closed forms


def ifb_mixture(F: EntropyFunctional, params: MixtureParams) -> float:
    """Minimum local information loss of the pure-state/maximally-mixed mixture."""
    _trace_form(F)
    p = np.asarray(params.schmidt_probs)
    x, lam = params.x, (1.0 - params.x) / params.n
    delta = np.zeros_like(p)
    delta[0] = 1.0
    return float(np.sum(F.f(x * p + lam) - F.f(delta * x + lam)))


def ifb_2q_angle(F: EntropyFunctional, p: float, x: float, theta: float) -> float:
    """Information loss of a spin measurement on B at angle theta from z.

    The subtracted terms are the two distinct eigenvalues (1+3x)/4 and
    (1-x)/4 of the unmeasured state, so theta = 0 reproduces ``ifb_2q_min``.
    """
    _trace_form(F)
    c = np.cos(theta) * (2 * p - 1)
    return float(
        sum(F.f((1 + x * (1 + 2 * nu * c)) / 4) - F.f((1 + x * (1 + 2 * nu)) / 4) for nu in (1, -1))
    )


def ifb_2q_min(F: EntropyFunctional, p: float, x: float) -> float:
    _trace_form(F)
    return float(
        F.f((1 + x * (4 * p - 1)) / 4)
        + F.f((1 + x * (3 - 4 * p)) / 4)
        - F.f((1 + 3 * x) / 4)
        - F.f((1 - x) / 4)
    )


def concurrence_mixture_2q(p: float, x: float) -> float:
    return float(max(2 * x * np.sqrt(p * (1 - p)) - (1 - x) / 2, 0.0))


def concurrence_threshold_2q(p: float) -> float:
    """x below which the two-qubit mixture has zero concurrence."""
    return float(1.0 / (1.0 + 4.0 * np.sqrt(p * (1 - p))))


def negativity_threshold(schmidt_probs, n: int) -> float:
    p = np.sort(np.asarray(schmidt_probs, dtype=float))[::-1]
    return float(1.0 / (1.0 + n * np.sqrt(p[0] * p[1])))


def eof_mixture_2q(F: EntropyFunctional, p: float, x: float) -> float:
    return eof_from_concurrence(F, concurrence_mixture_2q(p, x))


def ifb_bell_decoherence(F: EntropyFunctional, z: float) -> float:
    _trace_form(F)
    return float(1.0 - F.f((1 + z) / 2) - F.f((1 - z) / 2))


def ifb_bell_angle(F: EntropyFunctional, z: float, theta: float) -> float:
    """Theta-dependent loss of a spin measurement on B for the decohered Bell state."""
    _trace_form(F)
    r = np.sqrt(1.0 - np.sin(theta) ** 2 * (1.0 - z * z))
    return float(sum(2 * F.f((1 + nu * r) / 4) - F.f((1 + nu * z) / 2) for nu in (1, -1)))


def eof_bell_decoherence(F: EntropyFunctional, z: float) -> float:
    return eof_from_concurrence(F, abs(z))


def log_gap_estimate(x: float) -> float:
    """Leading behaviour of E(x) - I(x) (von Neumann) as x -> 1."""
    return float(-(1 - x) / 4 * np.log2(1 - x))


# ---------------------------------------------------------------------------
# slope conditions and q-intervals


def _mixture_slope_margin(F: EntropyFunctional, p: float) -> float:
    """E'(1) - I'(1) for the two-qubit mixture; positive means I > E near x = 1."""
    i_slope = (
        (4 * p - 1) / 4 * F.df(p)
        + (3 - 4 * p) / 4 * F.df(1 - p)
        - 0.75 * F.df(1.0)
        + 0.25 * F.df(0.0)
    )
    c1 = 2 * np.sqrt(p * (1 - p))
    dc = c1 + 0.5
    s = abs(2 * p - 1)
    if s < 1e-12:
        de_dc = -F.d2f(0.5) * c1 / 2
    else:
        de_dc = (F.df((1 + s) / 2) - F.df((1 - s) / 2)) / 2 * (-c1 / s)
    return float(de_dc * dc - i_slope)


def _bell_slope_margin(F: EntropyFunctional) -> float:
    """-f''(1/2) - f'(0) + f'(1); positive means I > E near z = 0 and z = 1."""
    return float(-F.d2f(0.5) - F.df(0.0) + F.df(1.0))


def slope_condition_holds(F: EntropyFunctional, example: str = "mixture", p: float = 0.5) -> bool:
    """Whether the local-loss curve exceeds the EOF curve near its end point.

    The von Neumann entropy (f'(0) infinite) never satisfies it.
    """
    _trace_form(F)
    if example == "mixture":
        m = _mixture_slope_margin(F, p)
    elif example == "bell":
        m = _bell_slope_margin(F)
    else:
        raise ValueError(f"example must be 'mixture' or 'bell', got {example!r}")
    return bool(np.isfinite(m) and m > 0)


def slope_condition_q_interval(example: str = "mixture", p: float = 0.5, step: float = 0.01, tol: float = Q_TOL):
    """Tsallis q-interval (within the EOF convexity range) where the slope condition holds.

    Returns ``(q_lo, q_hi)`` or ``None`` if the condition never holds.
    """
    c_lo, c_hi = convexity_interval()

    def ok(q):
        return slope_condition_holds(tsallis(q), example, p)

    qs = np.arange(c_lo + step, c_hi, step)
    flags = np.array([ok(q) for q in qs])
    if not flags.any():
        return None
    first = int(np.argmax(flags))
    last = first
    while last + 1 < len(qs) and flags[last + 1]:
        last += 1

    def bisect(good, bad):
        while abs(good - bad) > tol:
            mid = (good + bad) / 2
            if ok(mid):
                good = mid
            else:
                bad = mid
        return (good + bad) / 2

    q_lo = bisect(qs[first], qs[first - 1] if first > 0 else c_lo)
    q_hi = bisect(qs[last], qs[last + 1] if last + 1 < len(qs) else c_hi)
    return float(q_lo), float(q_hi)
