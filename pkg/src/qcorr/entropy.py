"""Generalized entropies S_f(rho) = Tr f(rho) and majorization.

All entropies use base-2 logarithms and are normalized so that a maximally
mixed qubit has entropy 1 (``2 f(1/2) = 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .qstate import DensityMatrix, clamp_spectrum, spectrum

TOL_MAJ = 1e-10
# Tsallis indices this close to 1 are treated as von Neumann.
Q_ONE_TOL = 1e-6

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class EntropyFunctional:
    """A concave entropic function f on [0, 1] with f(0) = f(1) = 0.

    ``kind`` is one of ``"vn"``, ``"linear"``, ``"tsallis"``, ``"renyi"``.
    Renyi is not of the trace form; it has an entropy but no ``f``.
    """

    kind: str
    q: float | None = None

    def __post_init__(self):
        if self.kind not in ("vn", "linear", "tsallis", "renyi"):
            raise ValueError(f"unknown entropy kind {self.kind!r}")
        if self.kind in ("tsallis", "renyi"):
            if self.q is None or not self.q > 0:
                raise ValueError(f"{self.kind} index must be > 0, got {self.q!r}")
        elif self.q is not None:
            raise ValueError(f"{self.kind} takes no index")

    @property
    def tag(self) -> str:
        if self.q is None:
            return self.kind
        return f"{self.kind}:{self.q:g}"

    @property
    def is_trace_form(self) -> bool:
        return self.kind != "renyi"

    def _require_f(self):
        if not self.is_trace_form:
            raise ValueError(f"{self.tag} is not of the form Tr f(rho)")

    @property
    def _norm(self) -> float:
        return 1.0 - 2.0 ** (1.0 - self.q)

    def f(self, p):
        """Evaluate f elementwise; accepts scalars or arrays."""
        self._require_f()
        p = np.asarray(p, dtype=float)
        if self.kind == "vn":
            out = 0.0 - xlogy(p, p) / _LN2
        elif self.kind == "linear":
            out = 2.0 * (p - p * p)
        else:
            out = (p - np.power(p, self.q)) / self._norm
        return out if out.ndim else float(out)

    def df(self, p):
        """First derivative; +inf at p = 0 where it diverges."""
        self._require_f()
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "vn":
                out = np.where(p > 0, -(np.log(np.where(p > 0, p, 1.0)) + 1.0) / _LN2, np.inf)
            elif self.kind == "linear":
                out = 2.0 - 4.0 * p
            else:
                q = self.q
                if q < 1:
                    pw = np.where(p > 0, np.power(np.where(p > 0, p, 1.0), q - 1.0), np.inf)
                else:
                    pw = np.power(p, q - 1.0)
                out = np.where(np.isinf(pw), np.inf, (1.0 - q * pw) / self._norm)
        return out if out.ndim else float(out)

    def d2f(self, p):
        """Second derivative on (0, 1); -inf at p = 0 where it diverges."""
        self._require_f()
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "vn":
                out = np.where(p > 0, -1.0 / (np.where(p > 0, p, 1.0) * _LN2), -np.inf)
            elif self.kind == "linear":
                out = np.full_like(p, -4.0)
            else:
                q = self.q
                out = -q * (q - 1.0) * np.power(p, q - 2.0) / self._norm
                if q < 2:
                    out = np.where(p > 0, out, -np.inf)
        return out if out.ndim else float(out)

    def spectrum_entropy(self, p) -> float:
        """Entropy of a probability vector (zeros allowed)."""
        p = np.asarray(p, dtype=float)
        if self.kind == "renyi":
            s = float(np.sum(np.power(p[p > 0], self.q)))
            return math.log2(s) / (1.0 - self.q)
        return float(np.sum(self.f(p)))


def von_neumann() -> EntropyFunctional:
    return EntropyFunctional("vn")


def linear() -> EntropyFunctional:
    return EntropyFunctional("linear")


def tsallis(q: float) -> EntropyFunctional:
    if q > 0 and abs(q - 1.0) < Q_ONE_TOL:
        return von_neumann()
    return EntropyFunctional("tsallis", float(q))


def renyi(q: float) -> EntropyFunctional:
    if q > 0 and abs(q - 1.0) < Q_ONE_TOL:
        return von_neumann()
    return EntropyFunctional("renyi", float(q))


def parse_entropy(tag: str) -> EntropyFunctional:
    """Parse ``"vn" | "linear" | "tsallis:<q>" | "renyi:<q>"``."""
    name, _, arg = tag.strip().partition(":")
    name = name.lower()
    if name in ("vn", "vonneumann", "von_neumann") and not arg:
        return von_neumann()
    if name == "linear" and not arg:
        return linear()
    if name in ("tsallis", "renyi") and arg:
        try:
            q = float(arg)
        except ValueError:
            raise ValueError(f"bad entropy index in {tag!r}") from None
        return tsallis(q) if name == "tsallis" else renyi(q)
    raise ValueError(f"unrecognized entropy tag {tag!r}")


DEFAULT_FAMILY = (von_neumann(), linear(), tsallis(0.5), tsallis(3.0))
BUILTIN = DEFAULT_FAMILY


def eval_f(F: EntropyFunctional, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return F.f(p)


def entropy(F: EntropyFunctional, rho: DensityMatrix | np.ndarray) -> float:
    """S_f of a density matrix (or of a raw Hermitian array)."""
    return F.spectrum_entropy(spectrum(rho))


def _padded(p, pprime) -> tuple[np.ndarray, np.ndarray]:
    a = np.sort(np.asarray(p, dtype=float))[::-1]
    b = np.sort(np.asarray(pprime, dtype=float))[::-1]
    n = max(a.size, b.size)
    return np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))


def majorizes(p, pprime, tol: float = TOL_MAJ) -> bool:
    """True iff ``pprime`` is majorized by ``p`` (p' is more mixed)."""
    a, b = _padded(p, pprime)
    return bool(np.all(np.cumsum(b) <= np.cumsum(a) + tol))


def entropy_ordering_witness(p, pprime, family=DEFAULT_FAMILY, tol: float = 1e-10) -> bool:
    """True iff S_f(p') >= S_f(p) for every entropy in ``family``.

    This is a necessary condition for ``majorizes(p, pprime)``.
    """
    family = list(family)
    if not family:
        raise ValueError("family must be nonempty")
    a, b = _padded(p, pprime)
    a, b = clamp_spectrum(a), clamp_spectrum(b)
    return all(F.spectrum_entropy(b) >= F.spectrum_entropy(a) - tol for F in family)
