"""Bipartite density matrices, kets and the basic linear-algebra operations on them.

Basis ordering is fixed everywhere as ``|i_A> (x) |j_B>  ->  i * dB + j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

TOL_HERM = 1e-10
TOL_NORM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-9
# Eigenvalues below this are eigensolver noise; entropies with q < 1 would
# otherwise amplify them (p**0.5 turns 1e-16 into 1e-8).
SPECTRUM_FLOOR = 1e-14


class StateError(ValueError):
    """Raised when a state violates one of its defining invariants."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix with a bipartite split.

    ``dims = (dA, dB)``; ``dB = 1`` is allowed for a single system.
    Construction validates the invariants and raises :class:`StateError`.
    """

    data: np.ndarray
    dims: tuple[int, int] = None

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise StateError("square", f"expected a square matrix, got shape {data.shape}")
        n = data.shape[0]
        dims = (n, 1) if self.dims is None else tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 1 or dims[0] * dims[1] != n:
            raise StateError("dims", f"dims {dims} inconsistent with matrix size {n}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)

        herm_err = np.max(np.abs(data - data.conj().T)) if n else 0.0
        if herm_err > TOL_HERM:
            raise StateError("hermitian", f"max |rho - rho^dagger| = {herm_err:.3e}")
        tr = np.trace(data).real
        if abs(tr - 1.0) > TOL_TRACE:
            raise StateError("unit_trace", f"trace = {float(tr):.12g}")
        lo = np.linalg.eigvalsh(data)[0]
        if lo < -TOL_PSD:
            raise StateError("psd", f"minimum eigenvalue = {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


@dataclass(frozen=True, eq=False)
class Ket:
    amplitudes: np.ndarray = field()

    def __post_init__(self):
        amp = _frozen(np.ravel(self.amplitudes))
        norm = np.vdot(amp, amp).real
        if abs(norm - 1.0) > TOL_NORM:
            raise StateError("normalized", f"sum |a|^2 = {float(norm):.12g}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


def from_ket(psi: Ket | np.ndarray, dims: tuple[int, int] | None = None) -> DensityMatrix:
    """Return the projector |psi><psi| with the given bipartite dims."""
    if not isinstance(psi, Ket):
        psi = Ket(psi)
    if dims is not None and dims[0] * dims[1] != psi.dim:
        raise StateError("dims", f"dims {tuple(dims)} inconsistent with ket of dimension {psi.dim}")
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()), dims)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced state of subsystem ``keep`` ("A" or "B")."""
    return DensityMatrix(reduce_array(rho.data, rho.dims, keep))


def reduce_array(data: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    dA, dB = dims
    t = np.asarray(data).reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def clamp_spectrum(values: np.ndarray) -> np.ndarray:
    """Sort descending, clip to [0, 1] and renormalize when the drift is small."""
    p = np.clip(np.sort(np.real(values))[::-1], 0.0, 1.0)
    p[p < SPECTRUM_FLOOR] = 0.0
    s = p.sum()
    if s > 0 and abs(s - 1.0) <= TOL_TRACE + TOL_PSD * p.size:
        p = p / s
    return p


def spectrum(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Descending eigenvalues, clamped to [0, 1] and renormalized."""
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    try:
        w = np.linalg.eigvalsh(data)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigensolver failed on {data.shape} matrix "
            f"(finite={np.all(np.isfinite(data))}): {exc}"
        ) from exc
    return clamp_spectrum(w)


def eigh_desc(rho: DensityMatrix | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, unclamped) and matching eigenvector columns."""
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    w, v = np.linalg.eigh(data)
    return w[::-1], v[:, ::-1]


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.data, b.data), (a.dim, b.dim))


def maximally_mixed(n: int, dims: tuple[int, int] | None = None) -> DensityMatrix:
    return DensityMatrix(np.eye(n) / n, dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    return unitary_group.rvs(d, random_state=rng)


def random_ket(dims: tuple[int, int], rng: np.random.Generator) -> Ket:
    n = dims[0] * dims[1]
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return Ket(v / np.linalg.norm(v))


def random_density(dims: tuple[int, int], rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from a Ginibre matrix of the given rank (full rank by default)."""
    n = dims[0] * dims[1]
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


def to_json(rho: DensityMatrix) -> str:
    return json.dumps(
        {
            "dims": list(rho.dims),
            "re": rho.data.real.tolist(),
            "im": rho.data.imag.tolist(),
        }
    )


def from_json(text: str) -> DensityMatrix:
    """Parse ``{"dims": [dA, dB], "re": [[...]], "im": [[...]]}``; ``im`` may be omitted."""
    try:
        obj = json.loads(text)
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        dims = obj.get("dims")
    except (ValueError, KeyError, TypeError) as exc:
        raise StateError("json", f"malformed state JSON ({exc})") from exc
    if re.shape != im.shape:
        raise StateError("json", f"re/im shape mismatch {re.shape} vs {im.shape}")
    return DensityMatrix(re + 1j * im, dims)
