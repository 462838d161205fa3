"""Entanglement baselines: Schmidt decomposition, concurrence, EOF, negativity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import EntropyFunctional, majorizes, tsallis
from .qstate import SPECTRUM_FLOOR, DensityMatrix, Ket, clamp_spectrum

TOL_SCHMIDT = 1e-12

_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


class ConvexityError(ValueError):
    """The generalized EOF formula is not valid for this entropy."""


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray  # squared Schmidt coefficients p_k, descending
    basisA: np.ndarray  # columns |k_A>
    basisB: np.ndarray  # columns |k_B>

    @property
    def schmidt_number(self) -> int:
        return int(np.sum(self.coefficients > TOL_SCHMIDT))

    def reconstruct(self) -> np.ndarray:
        s = np.sqrt(self.coefficients)
        return np.einsum("k,ak,bk->ab", s, self.basisA, self.basisB).ravel()


def _amplitudes(psi) -> np.ndarray:
    return (psi if isinstance(psi, Ket) else Ket(psi)).amplitudes


def schmidt(psi: Ket | np.ndarray, dims: tuple[int, int]) -> SchmidtDecomposition:
    v = _amplitudes(psi)
    dA, dB = dims
    if dA * dB != v.size:
        raise ValueError(f"dims {dims} inconsistent with ket dimension {v.size}")
    u, s, vh = np.linalg.svd(v.reshape(dA, dB))
    k = min(dA, dB)
    return SchmidtDecomposition(s[:k] ** 2, u[:, :k], vh[:k].T)


def entanglement_entropy(F: EntropyFunctional, psi, dims) -> float:
    """Generalized entropy of either reduced state of a pure bipartite ket."""
    return F.spectrum_entropy(clamp_spectrum(schmidt(psi, dims).coefficients))


def _require_two_qubits(rho: DensityMatrix):
    if rho.dims != (2, 2):
        raise ValueError(f"two-qubit state required, got dims {rho.dims}")


def concurrence_2q(rho: DensityMatrix) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4)."""
    _require_two_qubits(rho)
    # l_i are the singular values of W^T (sy x sy) W for any W with W W^+ = rho;
    # flooring tiny eigenvalues first keeps pure states free of sqrt(noise) terms
    w, v = np.linalg.eigh(rho.data)
    w = np.clip(w, 0.0, None)
    w[w < SPECTRUM_FLOOR] = 0.0
    factor = v * np.sqrt(w)
    lam = np.linalg.svd(factor.T @ _SYSY @ factor, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(F: EntropyFunctional, c) -> np.ndarray | float:
    """sum over nu = +- of f((1 + nu sqrt(1 - C^2)) / 2)."""
    c = np.asarray(c, dtype=float)
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, 1.0))
    out = F.f((1 + s) / 2) + F.f((1 - s) / 2)
    return out if np.ndim(out) else float(out)


def eof_second_derivative(F: EntropyFunctional, c) -> np.ndarray:
    """d^2/dC^2 of the EOF curve, analytic in f' and f''; defined for C < 1."""
    c = np.asarray(c, dtype=float)
    s = np.sqrt(1.0 - c * c)
    u, v = (1 + s) / 2, (1 - s) / 2
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        return (F.d2f(u) + F.d2f(v)) / 4 * (c * c) / (s * s) - (F.df(u) - F.df(v)) / (2 * s**3)


# C = 0 is excluded (f''(0) diverges for q < 2 while E'' stays positive); the
# grid stops at 1 - 1e-6, past which the analytic form loses digits to cancellation.
_C_GRID = np.concatenate(
    [np.logspace(-6, -2, 20), np.linspace(0.01, 0.999, 400), 1.0 - np.logspace(-3, -6, 30)]
)


def is_eof_convex(F: EntropyFunctional, tol: float = 1e-9) -> bool:
    """Numerically check E''(C) >= 0 on C in [0, 1)."""
    if not F.is_trace_form:
        return False
    if F.kind in ("vn", "linear"):
        return True
    d2 = eof_second_derivative(F, _C_GRID)
    return bool(np.all(np.nan_to_num(d2, nan=-np.inf) >= -tol))


def convexity_interval(q_min: float = 0.05, q_max: float = 8.0, step: float = 0.01, tol: float = 1e-4):
    """Tsallis indices q for which the EOF-vs-concurrence curve is convex.

    Scans a q-grid for the convex range containing q = 2 and bisects both
    ends to ``tol``.
    """

    def ok(q):
        return is_eof_convex(tsallis(q))

    qs = np.arange(q_min, q_max + step / 2, step)
    flags = np.array([ok(q) for q in qs])
    i2 = int(np.argmin(np.abs(qs - 2.0)))
    if not flags[i2]:
        raise RuntimeError("EOF curve unexpectedly non-convex at q = 2")
    lo = i2
    while lo > 0 and flags[lo - 1]:
        lo -= 1
    hi = i2
    while hi < len(qs) - 1 and flags[hi + 1]:
        hi += 1

    def bisect(good, bad):
        while abs(good - bad) > tol:
            mid = (good + bad) / 2
            if ok(mid):
                good = mid
            else:
                bad = mid
        return (good + bad) / 2

    q_lo = bisect(qs[lo], qs[lo - 1]) if lo > 0 else qs[0]
    q_hi = bisect(qs[hi], qs[hi + 1]) if hi < len(qs) - 1 else qs[-1]
    return float(q_lo), float(q_hi)


def eof_2q(F: EntropyFunctional, rho: DensityMatrix) -> float:
    """Generalized entanglement of formation of a two-qubit state."""
    _require_two_qubits(rho)
    if not is_eof_convex(F):
        if F.kind == "tsallis":
            q_lo, q_hi = convexity_interval()
            raise ConvexityError(
                f"{F.tag}: EOF formula needs a convex curve; valid Tsallis range is "
                f"({q_lo:.4f}, {q_hi:.4f})"
            )
        raise ConvexityError(f"{F.tag}: EOF formula not applicable")
    return eof_from_concurrence(F, concurrence_2q(rho))


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    dA, dB = rho.dims
    return rho.data.reshape(dA, dB, dA, dB).transpose(0, 3, 2, 1).reshape(rho.dim, rho.dim)


def negativity(rho: DensityMatrix) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over B."""
    w = np.linalg.eigvalsh(partial_transpose(rho))
    return float(-np.sum(w[w < 0]))


def separable_ball(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    """Sufficient separability test Tr(rho - I/n)^2 <= 1 / (n (n - 1))."""
    n = rho.dim
    delta = rho.data - np.eye(n) / n
    dist2 = float(np.real(np.vdot(delta, delta)))
    return dist2 <= 1.0 / (n * (n - 1)) + tol


def locc_convertible(psi1, psi2, dims) -> bool:
    """Nielsen: psi1 -> psi2 by LOCC iff spectrum(psi1_A) is majorized by spectrum(psi2_A)."""
    p1 = schmidt(psi1, dims).coefficients
    p2 = schmidt(psi2, dims).coefficients
    return majorizes(p2, p1)
