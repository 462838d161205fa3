"""Measurements with unknown outcome and the information loss they cause."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .entropy import EntropyFunctional
from .qstate import DensityMatrix, clamp_spectrum, spectrum

TOL_ORTHO = 1e-10
TOL_LOSS = 1e-9
DEGENERATE_TOL = 1e-8
# Couplings below this are treated as exactly zero by perturbative_loss.
COUPLING_TOL = 1e-14


class MeasurementError(ValueError):
    pass


def _check_unitary(u: np.ndarray, what: str):
    d = u.shape[0]
    if u.shape != (d, d):
        raise MeasurementError(f"{what}: expected a square matrix of basis columns, got {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if err > TOL_ORTHO:
        raise MeasurementError(f"{what}: basis not orthonormal (max deviation {err:.2e})")


@dataclass(frozen=True, eq=False)
class LocalBasis:
    """Orthonormal basis of one subsystem; column k of ``vectors`` is |k>."""

    subsystem: str
    vectors: np.ndarray

    def __post_init__(self):
        if self.subsystem not in ("A", "B"):
            raise MeasurementError(f"subsystem must be 'A' or 'B', got {self.subsystem!r}")
        u = np.array(self.vectors, dtype=complex)
        _check_unitary(u, f"LocalBasis[{self.subsystem}]")
        u.setflags(write=False)
        object.__setattr__(self, "vectors", u)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def computational(cls, subsystem: str, d: int) -> "LocalBasis":
        return cls(subsystem, np.eye(d))

    @classmethod
    def from_bloch(cls, subsystem: str, theta: float, phi: float = 0.0) -> "LocalBasis":
        """Qubit basis {|n>, |-n>} for the Bloch direction (theta, phi)."""
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        e = np.exp(1j * phi)
        return cls(subsystem, np.array([[c, -s * e.conjugate()], [s * e, c]]))

    def projectors(self) -> list[np.ndarray]:
        return [np.outer(v, v.conj()) for v in self.vectors.T]

    def to_json(self) -> list:
        return [[[z.real, z.imag] for z in v] for v in self.vectors.T]


@dataclass(frozen=True, eq=False)
class ProductBasis:
    basisA: LocalBasis
    basisB: LocalBasis

    def unitary(self) -> np.ndarray:
        return np.kron(self.basisA.vectors, self.basisB.vectors)


@dataclass(frozen=True, eq=False)
class ConditionalProductBasis:
    """Basis {|i_j> (x) |j>}: the A basis may depend on the B outcome j."""

    basisB: LocalBasis
    basesA: tuple

    def __post_init__(self):
        object.__setattr__(self, "basesA", tuple(self.basesA))
        if len(self.basesA) != self.basisB.dim:
            raise MeasurementError(
                f"need one A basis per B outcome ({self.basisB.dim}), got {len(self.basesA)}"
            )

    def unitary(self) -> np.ndarray:
        dA, dB = self.basesA[0].dim, self.basisB.dim
        w = np.empty((dA * dB, dA * dB), dtype=complex)
        for j in range(dB):
            b = self.basisB.vectors[:, j]
            for i in range(dA):
                w[:, i * dB + j] = np.kron(self.basesA[j].vectors[:, i], b)
        return w


@dataclass(frozen=True, eq=False)
class KrausSet:
    operators: tuple

    def __post_init__(self):
        ops = tuple(np.array(m, dtype=complex) for m in self.operators)
        if not ops:
            raise MeasurementError("empty Kraus set")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def trace_preserving(self) -> bool:
        s = sum(m.conj().T @ m for m in self.operators)
        return bool(np.max(np.abs(s - np.eye(self.dim))) <= TOL_ORTHO)

    @property
    def bistochastic(self) -> bool:
        s = sum(m @ m.conj().T for m in self.operators)
        return self.trace_preserving and bool(np.max(np.abs(s - np.eye(self.dim))) <= TOL_ORTHO)


Measurement = Union[LocalBasis, ProductBasis, ConditionalProductBasis, KrausSet, Sequence[np.ndarray]]


@dataclass(frozen=True, eq=False)
class InfoLossReport:
    post_state: DensityMatrix
    s_pre: float
    s_post: float
    loss: float
    basis: object
    converged: bool = True
    starts_used: int = 0


def _check_projectors(projectors, n: int) -> list[np.ndarray]:
    ps = [np.asarray(p, dtype=complex) for p in projectors]
    if not ps or any(p.shape != (n, n) for p in ps):
        raise MeasurementError(f"projectors must be a nonempty list of {n}x{n} matrices")
    if np.max(np.abs(sum(ps) - np.eye(n))) > TOL_ORTHO:
        raise MeasurementError("projectors do not sum to the identity")
    for a, pa in enumerate(ps):
        for b in range(a, len(ps)):
            target = pa if a == b else 0.0
            if np.max(np.abs(pa @ ps[b] - target)) > TOL_ORTHO:
                raise MeasurementError(f"projectors {a} and {b} are not orthogonal projectors")
    return ps


def project(rho: DensityMatrix, projectors) -> DensityMatrix:
    """rho' = sum_k P_k rho P_k for a complete set of orthogonal projectors."""
    ps = _check_projectors(projectors, rho.dim)
    out = sum(p @ rho.data @ p for p in ps)
    return DensityMatrix(out, rho.dims)


def _dephase_array(data: np.ndarray, dims, u: np.ndarray, side: str) -> np.ndarray:
    """Remove coherences between different basis states ``u`` of one side."""
    dA, dB = dims
    t = np.asarray(data).reshape(dA, dB, dA, dB)
    if side == "B":
        t = np.einsum("ajbl,jk,lm->akbm", t, u.conj(), u)
        mask = np.eye(dB, dtype=bool)[None, :, None, :]
        t = np.where(mask, t, 0.0)
        t = np.einsum("akbm,jk,lm->ajbl", t, u, u.conj())
    else:
        t = np.einsum("ajbl,ai,bk->ijkl", t, u.conj(), u)
        mask = np.eye(dA, dtype=bool)[:, None, :, None]
        t = np.where(mask, t, 0.0)
        t = np.einsum("ijkl,ai,bk->ajbl", t, u, u.conj())
    return t.reshape(dA * dB, dA * dB)


def local_measure(rho: DensityMatrix, basis: LocalBasis) -> DensityMatrix:
    """Complete local projective measurement on the side named by ``basis``."""
    dA, dB = rho.dims
    d = dB if basis.subsystem == "B" else dA
    if basis.dim != d:
        raise MeasurementError(f"basis dimension {basis.dim} != d{basis.subsystem} = {d}")
    return DensityMatrix(_dephase_array(rho.data, rho.dims, basis.vectors, basis.subsystem), rho.dims)


def local_measure_B(rho: DensityMatrix, basis: LocalBasis) -> DensityMatrix:
    if basis.subsystem != "B":
        raise MeasurementError("local_measure_B needs a basis of subsystem B")
    return local_measure(rho, basis)


def local_measure_A(rho: DensityMatrix, basis: LocalBasis) -> DensityMatrix:
    if basis.subsystem != "A":
        raise MeasurementError("local_measure_A needs a basis of subsystem A")
    return local_measure(rho, basis)


def _diagonal_in(rho: DensityMatrix, w: np.ndarray) -> DensityMatrix:
    p = np.real(np.einsum("ik,ij,jk->k", w.conj(), rho.data, w))
    return DensityMatrix((w * p) @ w.conj().T, rho.dims)


def joint_measure(rho: DensityMatrix, basis: ProductBasis) -> DensityMatrix:
    """Diagonal of rho in the product basis {|i_A> (x) |j_B>}."""
    if (basis.basisA.dim, basis.basisB.dim) != rho.dims:
        raise MeasurementError(f"product basis dims do not match state dims {rho.dims}")
    return _diagonal_in(rho, basis.unitary())


def conditional_measure(rho: DensityMatrix, basis: ConditionalProductBasis) -> DensityMatrix:
    """Diagonal of rho in a conditional product basis {|i_j> (x) |j_B>}."""
    if (basis.basesA[0].dim, basis.basisB.dim) != rho.dims:
        raise MeasurementError(f"conditional basis dims do not match state dims {rho.dims}")
    return _diagonal_in(rho, basis.unitary())


def kraus_apply(rho: DensityMatrix, K: KrausSet) -> DensityMatrix:
    if K.dim != rho.dim:
        raise MeasurementError(f"Kraus operators act on dimension {K.dim}, state has {rho.dim}")
    if not K.trace_preserving:
        raise MeasurementError("Kraus set is not trace preserving (sum M^dagger M != I)")
    out = sum(m @ rho.data @ m.conj().T for m in K.operators)
    return DensityMatrix(out, rho.dims)


def apply_measurement(rho: DensityMatrix, measurement) -> DensityMatrix:
    if isinstance(measurement, LocalBasis):
        return local_measure(rho, measurement)
    if isinstance(measurement, ProductBasis):
        return joint_measure(rho, measurement)
    if isinstance(measurement, ConditionalProductBasis):
        return conditional_measure(rho, measurement)
    if isinstance(measurement, KrausSet):
        return kraus_apply(rho, measurement)
    return project(rho, measurement)


def info_loss(F: EntropyFunctional, rho: DensityMatrix, measurement) -> InfoLossReport:
    """Entropy increase S_f(rho') - S_f(rho) caused by ``measurement``."""
    post = apply_measurement(rho, measurement)
    s_pre = F.spectrum_entropy(spectrum(rho))
    s_post = F.spectrum_entropy(spectrum(post))
    return InfoLossReport(post, s_pre, s_post, s_post - s_pre, measurement)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho || sigma) in bits; +inf when supp(rho) is not inside supp(sigma)."""
    w_r, v_r = np.linalg.eigh(rho.data)
    w_s, v_s = np.linalg.eigh(sigma.data)
    w_r, w_s = np.clip(w_r, 0, None), np.clip(w_s, 0, None)
    overlap = np.abs(v_r.conj().T @ v_s) ** 2  # |<r_i|s_j>|^2
    pos_r = w_r > 1e-15
    ent = float(np.sum(w_r[pos_r] * np.log2(w_r[pos_r])))
    null_s = w_s <= 1e-15
    # weight of rho placed on the kernel of sigma
    leak = float(np.sum(w_r[:, None] * overlap * null_s[None, :]))
    if leak > 1e-12:
        return float("inf")
    logs = np.where(null_s, 0.0, np.log2(np.where(null_s, 1.0, w_s)))
    cross = float(np.sum(w_r[:, None] * overlap * logs[None, :]))
    return ent - cross


def _projectors_of(rho: DensityMatrix, measurement) -> list[np.ndarray]:
    dA, dB = rho.dims
    if isinstance(measurement, LocalBasis):
        if measurement.subsystem == "B":
            return [np.kron(np.eye(dA), p) for p in measurement.projectors()]
        return [np.kron(p, np.eye(dB)) for p in measurement.projectors()]
    if isinstance(measurement, (ProductBasis, ConditionalProductBasis)):
        w = measurement.unitary()
        return [np.outer(v, v.conj()) for v in w.T]
    if isinstance(measurement, KrausSet):
        raise MeasurementError("perturbative_loss needs a projective measurement")
    return _check_projectors(measurement, rho.dim)


def _measured_basis(rho: DensityMatrix, projectors) -> np.ndarray:
    """Eigenvectors |j'> of the blocks P_k rho P_k, as columns."""
    cols = []
    for p in projectors:
        w, v = np.linalg.eigh(p)
        rng = v[:, w > 0.5]
        if rng.shape[1] == 0:
            continue
        _, c = np.linalg.eigh(rng.conj().T @ rho.data @ rng)
        cols.append(rng @ c)
    return np.hstack(cols)


def perturbative_loss(F: EntropyFunctional, rho: DensityMatrix, measurement) -> float:
    """Weighted quadratic norm of the coherences lost by a projective measurement."""
    if not F.is_trace_form:
        raise ValueError(f"perturbative_loss needs an entropy of the form Tr f(rho), got {F.tag}")
    basis = _measured_basis(rho, _projectors_of(rho, measurement))
    r = basis.conj().T @ rho.data @ basis
    p = np.real(np.diag(r))
    dfp = F.df(np.clip(p, 0.0, 1.0))
    total = 0.0
    n = p.size
    for j in range(n):
        for k in range(j + 1, n):
            c2 = abs(r[j, k]) ** 2
            if c2 <= COUPLING_TOL:
                continue
            if abs(p[j] - p[k]) < DEGENERATE_TOL:
                weight = -F.d2f(max(p[j], 0.0))
            else:
                weight = (dfp[k] - dfp[j]) / (p[j] - p[k])
            if not np.isfinite(weight):
                return float("inf")
            total += weight * c2
    return float(total)


def block_spectrum(data: np.ndarray, dims, u: np.ndarray, side: str) -> np.ndarray:
    """Spectrum of the state after a local measurement in basis ``u`` on ``side``.

    The measured state is block diagonal, so only the conditional blocks
    need diagonalizing.
    """
    dA, dB = dims
    t = data.reshape(dA, dB, dA, dB)
    if side == "B":
        blocks = np.einsum("jk,ajbl,lk->kab", u.conj(), t, u)
    else:
        blocks = np.einsum("ak,ajbl,bk->kjl", u.conj(), t, u)
    return clamp_spectrum(np.linalg.eigvalsh(blocks).ravel())
