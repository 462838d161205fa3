"""Minimum information loss over local and joint-local projective measurements.

Every search combines a seeded start (eigenbasis of the reduced state), the
computational basis, ``restarts`` Haar-random starts refined by Nelder-Mead,
and, for a measured qubit, a dense (theta, phi) grid. Results never claim
global optimality for d > 2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .entropy import EntropyFunctional, von_neumann
from .measure import InfoLossReport, LocalBasis, ProductBasis, info_loss
from .qstate import DensityMatrix, eigh_desc, random_unitary, reduce_array, spectrum

log = logging.getLogger(__name__)

TIE_TOL = 1e-9

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]],
    dtype=complex,
)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 24
    max_iters: int = 500
    tol_value: float = 1e-10
    tol_step: float = 1e-9
    seed: int = 0
    grid_fallback: bool = True
    grid: tuple[int, int] = (181, 91)

    def __post_init__(self):
        if self.restarts < 0 or self.max_iters < 1:
            raise ValueError("restarts must be >= 0 and max_iters >= 1")
        if not (self.tol_value > 0 and self.tol_step > 0):
            raise ValueError("tolerances must be positive")
        if len(self.grid) != 2 or min(self.grid) < 2:
            raise ValueError(f"grid resolution must be >= 2 per axis, got {self.grid}")


@dataclass(frozen=True, eq=False)
class DiscordReport:
    value: float
    basis: LocalBasis
    converged: bool
    starts_used: int


# ---------------------------------------------------------------------------
# basis parametrizations


def bloch_vector(v: np.ndarray) -> np.ndarray:
    """Bloch vector of a (not necessarily normalized) qubit ket."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    c = np.conj(v[0]) * v[1]
    return np.array([2 * c.real, 2 * c.imag, abs(v[0]) ** 2 - abs(v[1]) ** 2])


def bloch_angles(n: np.ndarray) -> tuple[float, float]:
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    theta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    phi = float(np.arctan2(n[1], n[0]) % (2 * np.pi))
    return theta, phi


def givens_unitary(params: np.ndarray, d: int) -> np.ndarray:
    """Product of complex Givens rotations, one per index pair i < j.

    ``params`` holds d^2 - d reals, two per pair (real and imaginary part of
    the rotation generator). The map is smooth and equals I at params = 0.
    """
    params = np.asarray(params, dtype=float)
    if params.size != d * d - d:
        raise ValueError(f"need {d * d - d} parameters for d={d}, got {params.size}")
    u = np.eye(d, dtype=complex)
    k = 0
    for i in range(d):
        for j in range(i + 1, d):
            z = complex(params[k], params[k + 1])
            k += 2
            r = abs(z)
            if r == 0.0:
                continue
            c, s = np.cos(r), np.sin(r) / r
            col_i, col_j = u[:, i].copy(), u[:, j].copy()
            u[:, i] = c * col_i + s * z * col_j
            u[:, j] = -s * np.conj(z) * col_i + c * col_j
    return u


def params_to_basis(params: np.ndarray, d: int, subsystem: str = "B") -> LocalBasis:
    """Bloch angles (theta, phi) for d = 2, Givens parameters for d > 2."""
    params = np.asarray(params, dtype=float)
    if d == 2:
        return LocalBasis.from_bloch(subsystem, params[0], params[1])
    return LocalBasis(subsystem, givens_unitary(params, d))


def canonical_direction(n: np.ndarray) -> np.ndarray:
    """Of the two Bloch directions +-n defining one qubit measurement, the one with theta <= pi/2."""
    n = np.asarray(n, dtype=float)
    if n[2] < -1e-12 or (abs(n[2]) <= 1e-12 and np.arctan2(n[1], n[0]) % (2 * np.pi) >= np.pi):
        return -n
    return n


def basis_key(u: np.ndarray) -> tuple:
    """Canonical parameter vector of a measurement basis, used for tie-breaking.

    Qubits: Bloch angles of the representative direction with theta <= pi/2.
    Otherwise: columns phase-fixed and sorted, flattened to (re, im) pairs.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if d == 2:
        return tuple(np.round(bloch_angles(canonical_direction(bloch_vector(u[:, 0]))), 9))
    cols = []
    for v in u.T:
        idx = int(np.argmax(np.abs(v) > 1e-9))
        v = v * np.exp(-1j * np.angle(v[idx]))
        cols.append(tuple(np.round(np.column_stack([v.real, v.imag]).ravel(), 9)))
    return tuple(x for c in sorted(cols) for x in c)


# ---------------------------------------------------------------------------
# row-wise entropies for vectorized objectives


def _entropy_rows(F: EntropyFunctional, p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    if F.kind == "renyi":
        return np.log2(np.sum(np.power(p, F.q), axis=-1)) / (1.0 - F.q)
    return np.sum(F.f(p), axis=-1)


def _eigvalsh(blocks: np.ndarray) -> np.ndarray:
    """Eigenvalues of stacked Hermitian blocks; closed form for 2x2."""
    if blocks.shape[-1] != 2:
        return np.linalg.eigvalsh(blocks)
    a = blocks[..., 0, 0].real
    d = blocks[..., 1, 1].real
    b = blocks[..., 0, 1]
    r = np.sqrt((a - d) ** 2 + 4 * (b.real**2 + b.imag**2))
    t = a + d
    return np.stack([(t - r) / 2, (t + r) / 2], axis=-1)


class _LocalProblem:
    """Conditional blocks of rho for a complete measurement on one side."""

    def __init__(self, rho: DensityMatrix, side: str):
        if side not in ("A", "B"):
            raise ValueError(f"side must be 'A' or 'B', got {side!r}")
        dA, dB = rho.dims
        t = rho.data.reshape(dA, dB, dA, dB)
        # T[j, l, a, b]: measured-side indices first
        self.T = t.transpose(1, 3, 0, 2) if side == "B" else t.transpose(0, 2, 1, 3)
        self.side = side
        self.d = dB if side == "B" else dA
        self.d_other = dA if side == "B" else dB
        self.reduced = reduce_array(rho.data, rho.dims, side)
        if self.d == 2:
            # block for Bloch direction n is (R0 +- n . R) / 2
            self.R0 = (self.T[0, 0] + self.T[1, 1]) / 2
            self.R = np.einsum("ilj,jlab->iab", _PAULI, self.T) / 2
            self._R_flat = self.R.reshape(3, -1)
        self._scalar = None
        if self.d == 2 and self.d_other == 2:
            R0, R = self.R0, self.R
            self._scalar = (
                R0[0, 0].real, R0[1, 1].real, R0[0, 1].real, R0[0, 1].imag,
                tuple(R[:, 0, 0].real), tuple(R[:, 1, 1].real),
                tuple(R[:, 0, 1].real), tuple(R[:, 0, 1].imag),
            )

    def eigs_bloch(self, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Block eigenvalues (..., 2, d_other) and outcome weights (..., 2)."""
        if self._scalar is not None and np.ndim(n) == 1:
            return self._eigs_qubit_pair(n)
        k = self.d_other
        m = (np.asarray(n, dtype=float) @ self._R_flat).reshape(*np.shape(n)[:-1], k, k)
        ev = np.concatenate([_eigvalsh(self.R0 + m)[..., None, :], _eigvalsh(self.R0 - m)[..., None, :]], axis=-2)
        return ev, ev.sum(axis=-1)

    def _eigs_qubit_pair(self, n):
        ev, q = self.eigs_qubit_pair_raw(float(n[0]), float(n[1]), float(n[2]))
        return np.array([ev[:2], ev[2:]]), np.array(q)

    def eigs_qubit_pair_raw(self, x: float, y: float, z: float):
        """Four block eigenvalues and two outcome weights as Python floats.

        Scalar arithmetic, since numpy call overhead dominates for 2x2 blocks.
        """
        a0, d0, br0, bi0, ra, rd, rbr, rbi = self._scalar
        ma = ra[0] * x + ra[1] * y + ra[2] * z
        md = rd[0] * x + rd[1] * y + rd[2] * z
        mbr = rbr[0] * x + rbr[1] * y + rbr[2] * z
        mbi = rbi[0] * x + rbi[1] * y + rbi[2] * z
        out: list[float] = []
        for sgn in (1.0, -1.0):
            a, d = a0 + sgn * ma, d0 + sgn * md
            br, bi = br0 + sgn * mbr, bi0 + sgn * mbi
            r = math.sqrt((a - d) ** 2 + 4.0 * (br * br + bi * bi))
            out += [(a + d - r) / 2, (a + d + r) / 2]
        return out, (out[0] + out[1], out[2] + out[3])

    def eigs_unitary(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        blocks = np.einsum("jk,jlab,lk->kab", u.conj(), self.T, u)
        ev = _eigvalsh(blocks)
        return ev, ev.sum(axis=-1)


def _scalar_entropy(F: EntropyFunctional):
    """S_f of a short list of floats, without numpy."""
    log2 = math.log2
    if F.kind == "vn":
        return lambda ps: -sum(p * log2(p) for p in ps if p > 0.0)
    if F.kind == "linear":
        return lambda ps: sum(2.0 * (p - p * p) for p in ps if p > 0.0)
    q = F.q
    if F.kind == "tsallis":
        norm = 1.0 - 2.0 ** (1.0 - q)
        return lambda ps: sum((p - min(p, 1.0) ** q) / norm for p in ps if p > 0.0)
    return lambda ps: log2(sum(min(p, 1.0) ** q for p in ps if p > 0.0)) / (1.0 - q)


def _loss_objective(F: EntropyFunctional):
    def value(ev, q):
        return _entropy_rows(F, ev.reshape(*ev.shape[:-2], -1))

    s = _scalar_entropy(F)
    value.scalar = lambda ev, q: s(ev)
    return value


def _discord_objective():
    vn = von_neumann()

    def value(ev, q):
        return _entropy_rows(vn, ev.reshape(*ev.shape[:-2], -1)) - _entropy_rows(vn, q)

    s = _scalar_entropy(vn)
    value.scalar = lambda ev, q: s(ev) - s(q)
    return value


def _nelder_mead(fun, x0: np.ndarray, step: float, max_iters: int, xatol: float, fatol: float):
    k = x0.size
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(k)])
    res = _scipy_minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": max_iters * max(1, k // 2),
            "xatol": xatol,
            "fatol": fatol,
            "initial_simplex": simplex,
        },
    )
    return res.x, float(res.fun), bool(res.success)


def _screen(fun, x0: np.ndarray, cfg: OptimizerConfig):
    """Coarse local search used on every start."""
    return _nelder_mead(fun, x0, 0.3, cfg.max_iters, max(cfg.tol_step, 1e-3), max(cfg.tol_value, 1e-8))


def _refine(fun, x0: np.ndarray, cfg: OptimizerConfig, step: float = 0.3):
    """Tight Nelder-Mead, restarted once from its own optimum with a smaller simplex."""
    x, val, ok = _nelder_mead(fun, x0, step, cfg.max_iters, cfg.tol_step, cfg.tol_value)
    x2, val2, ok2 = _nelder_mead(fun, x, step / 10, cfg.max_iters, cfg.tol_step, cfg.tol_value)
    if val2 <= val:
        x, val, ok = x2, val2, ok2
    return x, val, ok


def _tangent_frame(n0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.array([1.0, 0.0, 0.0]) if abs(n0[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - n0 * (a @ n0)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n0, e1)


def _select(candidates):
    """Min by value, ties (within TIE_TOL) broken by the smallest basis key."""
    best = min(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] <= best + TIE_TOL]
    return min(tied, key=lambda c: c[1])


N_POLISH = 3


class _BlochChart:
    """Regular chart around a unit vector: x -> normalize(n0 + x1 e1 + x2 e2)."""

    def __init__(self, n0):
        self.n0 = np.asarray(n0, dtype=float) / np.linalg.norm(n0)
        self.e = np.stack(_tangent_frame(self.n0))
        self._n0 = tuple(self.n0.tolist())
        self._e = (tuple(self.e[0].tolist()), tuple(self.e[1].tolist()))

    def __call__(self, x):
        n = self.n0 + x @ self.e
        return n / np.sqrt(n @ n)

    def xyz(self, x) -> tuple[float, float, float]:
        """Same map in scalar arithmetic."""
        a, b = float(x[0]), float(x[1])
        (n0, n1, n2), (e0, e1) = self._n0, self._e
        v0 = n0 + a * e0[0] + b * e1[0]
        v1 = n1 + a * e0[1] + b * e1[1]
        v2 = n2 + a * e0[2] + b * e1[2]
        r = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
        return v0 / r, v1 / r, v2 / r


def _search_local(problem: _LocalProblem, objective, cfg: OptimizerConfig):
    """Return (value, unitary, converged, starts_used) for a local measurement.

    Every start gets a coarse Nelder-Mead pass; the best few are then
    polished to the configured tolerances.
    """
    rng = np.random.default_rng(cfg.seed)
    d = problem.d
    _, vecs = eigh_desc(problem.reduced)
    starts = [vecs, np.eye(d, dtype=complex)]
    starts += [random_unitary(d, rng) for _ in range(cfg.restarts)]
    candidates = []

    if d == 2:
        if problem._scalar is not None:
            raw, scalar = problem.eigs_qubit_pair_raw, objective.scalar

            def fun_at(chart):
                return lambda x: scalar(*raw(*chart.xyz(x)))
        else:
            def fun_at(chart):
                return lambda x: float(objective(*problem.eigs_bloch(chart(x))))

        def as_unitary(n):
            return LocalBasis.from_bloch(problem.side, *bloch_angles(canonical_direction(n))).vectors

        dirs = [bloch_vector(u[:, 0]) for u in starts]
        if cfg.grid_fallback:
            nt, nph = cfg.grid
            th, ph = np.meshgrid(
                np.linspace(0.0, np.pi, nt),
                np.linspace(0.0, 2 * np.pi, nph, endpoint=False),
                indexing="ij",
            )
            grid_n = np.stack(
                [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1
            ).reshape(-1, 3)
            vals = objective(*problem.eigs_bloch(grid_n))
            g = int(np.argmin(vals))
            u = as_unitary(grid_n[g])
            candidates.append((float(vals[g]), basis_key(u), u, True))
            dirs.append(grid_n[g])
        screened = []
        for n0 in dirs:
            chart = _BlochChart(n0)
            x, val, _ = _screen(fun_at(chart), np.zeros(2), cfg)
            screened.append((val, chart(x)))
        screened.sort(key=lambda c: c[0])
        for _, n0 in screened[:N_POLISH]:
            chart = _BlochChart(n0)
            x, val, ok = _refine(fun_at(chart), np.zeros(2), cfg, step=0.05)
            u = as_unitary(chart(x))
            candidates.append((val, basis_key(u), u, ok))
    else:
        k = d * d - d

        def fun_at(u0):
            return lambda x: float(objective(*problem.eigs_unitary(u0 @ givens_unitary(x, d))))

        screened = []
        for u0 in starts:
            x, val, _ = _screen(fun_at(u0), np.zeros(k), cfg)
            screened.append((val, u0 @ givens_unitary(x, d)))
        screened.sort(key=lambda c: c[0])
        for _, u0 in screened[:N_POLISH]:
            x, val, ok = _refine(fun_at(u0), np.zeros(k), cfg, step=0.05)
            u = u0 @ givens_unitary(x, d)
            candidates.append((val, basis_key(u), u, ok))

    val, _, u, ok = _select(candidates)
    if not ok:
        log.warning("local search did not converge; returning best value found %.3e", val)
    return val, u, ok, len(starts)


def min_info_loss_local(
    F: EntropyFunctional, rho: DensityMatrix, side: str = "B", cfg: OptimizerConfig | None = None
) -> InfoLossReport:
    """Minimum of S_f(rho') - S_f(rho) over complete local measurements on ``side``."""
    cfg = cfg or OptimizerConfig()
    problem = _LocalProblem(rho, side)
    _, u, ok, n_starts = _search_local(problem, _loss_objective(F), cfg)
    basis = LocalBasis(side, u)
    rep = info_loss(F, rho, basis)
    return InfoLossReport(rep.post_state, rep.s_pre, rep.s_post, rep.loss, basis, ok, n_starts)


def min_info_loss_A(F, rho, cfg=None) -> InfoLossReport:
    return min_info_loss_local(F, rho, "A", cfg)


def min_info_loss_B(F, rho, cfg=None) -> InfoLossReport:
    return min_info_loss_local(F, rho, "B", cfg)


def _discord_offset(problem: "_LocalProblem", rho: DensityMatrix) -> float:
    """S(rho_B) - S(rho_AB), the basis-independent part of the discord."""
    vn = von_neumann()
    return vn.spectrum_entropy(spectrum(problem.reduced)) - vn.spectrum_entropy(spectrum(rho))


def quantum_discord_B(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> DiscordReport:
    """Quantum discord with the measurement on B, minimized over local bases."""
    cfg = cfg or OptimizerConfig()
    problem = _LocalProblem(rho, "B")
    offset = _discord_offset(problem, rho)
    val, u, ok, n_starts = _search_local(problem, _discord_objective(), cfg)
    return DiscordReport(val + offset, LocalBasis("B", u), ok, n_starts)


def discord_for_basis(rho: DensityMatrix, basis: LocalBasis) -> float:
    """S(rho'_AB) - S(rho'_B) - S(rho_AB) + S(rho_B) for one measurement on B."""
    problem = _LocalProblem(rho, "B")
    offset = _discord_offset(problem, rho)
    return float(_discord_objective()(*problem.eigs_unitary(basis.vectors))) + offset


# ---------------------------------------------------------------------------
# joint local (product) measurements


def _search_joint(F: EntropyFunctional, rho: DensityMatrix, cfg: OptimizerConfig):
    """Block coordinate descent over (A basis, B basis) from every start,
    followed by a joint Nelder-Mead polish of the best few."""
    dA, dB = rho.dims
    kA, kB = dA * dA - dA, dB * dB - dB
    rng = np.random.default_rng(cfg.seed)
    data = rho.data

    def value(ua, ub):
        w = np.kron(ua, ub)
        p = np.real(np.einsum("ik,ij,jk->k", w.conj(), data, w))
        return float(_entropy_rows(F, p))

    def joint_fun(ua, ub):
        return lambda x: value(ua @ givens_unitary(x[:kA], dA), ub @ givens_unitary(x[kA:], dB))

    _, va = eigh_desc(reduce_array(data, rho.dims, "A"))
    _, vb = eigh_desc(reduce_array(data, rho.dims, "B"))
    local_b = _search_local(_LocalProblem(rho, "B"), _loss_objective(F), cfg)[1]
    starts = [(va, vb), (np.eye(dA, dtype=complex), np.eye(dB, dtype=complex)), (va, local_b)]
    starts += [(random_unitary(dA, rng), random_unitary(dB, rng)) for _ in range(cfg.restarts)]

    screened = []
    for ua, ub in starts:
        val = value(ua, ub)
        for _ in range(10):
            prev = val
            if kA:
                x, val, _ = _screen(lambda x: value(ua @ givens_unitary(x, dA), ub), np.zeros(kA), cfg)
                ua = ua @ givens_unitary(x, dA)
            if kB:
                x, val, _ = _screen(lambda x: value(ua, ub @ givens_unitary(x, dB)), np.zeros(kB), cfg)
                ub = ub @ givens_unitary(x, dB)
            if prev - val <= 1e-8:
                break
        screened.append((val, ua, ub))
    screened.sort(key=lambda c: c[0])

    candidates = []
    for _, ua, ub in screened[:N_POLISH]:
        x, val, ok = _refine(joint_fun(ua, ub), np.zeros(kA + kB), cfg, step=0.05)
        ua, ub = ua @ givens_unitary(x[:kA], dA), ub @ givens_unitary(x[kA:], dB)
        candidates.append((val, basis_key(ua) + basis_key(ub), (ua, ub), ok))
    val, _, (ua, ub), ok = _select(candidates)
    if not ok:
        log.warning("joint search did not converge; returning best value found %.3e", val)
    return ua, ub, ok, len(starts)


def min_info_loss_joint(
    F: EntropyFunctional, rho: DensityMatrix, cfg: OptimizerConfig | None = None
) -> InfoLossReport:
    """Minimum information loss over product bases {|i_A> (x) |j_B>}."""
    cfg = cfg or OptimizerConfig()
    ua, ub, ok, n_starts = _search_joint(F, rho, cfg)
    basis = ProductBasis(LocalBasis("A", ua), LocalBasis("B", ub))
    rep = info_loss(F, rho, basis)
    return InfoLossReport(rep.post_state, rep.s_pre, rep.s_post, rep.loss, basis, ok, n_starts)


def closest_classical_state(
    F: EntropyFunctional, rho: DensityMatrix, cfg: OptimizerConfig | None = None
) -> DensityMatrix:
    """Classically correlated state reached by the optimal product measurement."""
    return min_info_loss_joint(F, rho, cfg).post_state
