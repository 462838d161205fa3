"""Command-line driver: entropies, minimizations, figure data and self-checks.

Exit codes: 0 success, 1 check failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .checks import run_suite
from .entangle import eof_from_concurrence
from .entropy import entropy, linear, parse_entropy, tsallis, von_neumann
from .measure import LocalBasis, ProductBasis
from .minimize import (
    OptimizerConfig,
    min_info_loss_joint,
    min_info_loss_local,
    quantum_discord_B,
)
from .qstate import DensityMatrix, Ket, StateError, from_json, from_ket, maximally_mixed, to_json

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2

# Default fixture for "classical": diagonal in the product of the computational
# basis on A and the Hadamard basis on B.
_CLASSICAL_PROBS = [[0.4, 0.1], [0.2, 0.3]]
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)


class InputError(ValueError):
    """Bad flag, state spec or file; maps to exit code 2."""


class CheckFailure(RuntimeError):
    """An embedded assertion or invariant failed; maps to exit code 1."""


def fmt(v: float) -> str:
    return format(float(v), ".12g")


# ---------------------------------------------------------------------------
# state and flag parsing


def _parse_dims(text: str | None):
    if text is None:
        return None
    try:
        dA, dB = (int(t) for t in text.split(","))
    except ValueError:
        raise InputError(f"--dims must look like dA,dB, got {text!r}") from None
    return dA, dB


def _basis_from_json(obj, subsystem: str, d: int) -> LocalBasis:
    if obj is None:
        return LocalBasis.computational(subsystem, d)
    cols = np.array([[complex(re, im) for re, im in v] for v in obj])
    return LocalBasis(subsystem, cols.T)


def classical_state(probs, basisA=None, basisB=None) -> DensityMatrix:
    """sum_ij p_ij |a_i b_j><a_i b_j| for product basis columns a_i, b_j."""
    p = np.asarray(probs, dtype=float)
    dA, dB = p.shape
    a = _basis_from_json(basisA, "A", dA) if not isinstance(basisA, LocalBasis) else basisA
    b = _basis_from_json(basisB, "B", dB) if not isinstance(basisB, LocalBasis) else basisB
    w = ProductBasis(a, b).unitary()
    return DensityMatrix((w * p.ravel()) @ w.conj().T, (dA, dB))


def _num(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"bad {what} {text!r}") from None


def load_state(spec: str, dims=None) -> DensityMatrix:
    """Builtin spec or JSON path; see the README for the grammar."""
    name, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    if name == "bell":
        return from_ket(Ket(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)), (2, 2))
    if name == "maxmixed":
        n = int(_num(args[0], "dimension")) if args else 4
        if dims is None:
            r = math.isqrt(n)
            dims = (r, r) if r * r == n else (n, 1)
        return maximally_mixed(n, dims)
    if name == "pure" and len(args) == 1:
        return from_ket(oracle.pure_2q(_num(args[0], "p")), (2, 2))
    if name == "mixture" and len(args) == 2:
        return oracle.mixture_2q(_num(args[0], "p"), _num(args[1], "x"))
    if name == "belldeco" and len(args) == 1:
        return oracle.bell_decoherence_state(_num(args[0], "z"))
    if name == "classical":
        if not rest:
            return classical_state(_CLASSICAL_PROBS, None, LocalBasis("B", _HADAMARD))
        obj = json.loads(_read(rest))
        return classical_state(obj["probs"], obj.get("basisA"), obj.get("basisB"))
    if name in ("bell", "maxmixed", "pure", "mixture", "belldeco"):
        raise InputError(f"malformed builtin state {spec!r}")
    rho = from_json(_read(spec))
    if dims is not None:
        rho = DensityMatrix(rho.data, dims)
    return rho


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc.strerror}") from None


def parse_range(text: str) -> np.ndarray:
    """``a:b:step`` inclusive of both ends, snapped to the step grid."""
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise InputError(f"grid must look like a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise InputError(f"grid needs step > 0 and b >= a, got {text!r}")
    n = int(round((b - a) / step))
    return np.round(a + step * np.arange(n + 1), 12)


def parse_qs(text: str) -> list[float]:
    try:
        qs = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"--q must be a comma-separated list, got {text!r}") from None
    if not qs or min(qs) <= 0:
        raise InputError("--q needs at least one index, all > 0")
    return qs


def build_config(args) -> OptimizerConfig:
    kw = {"restarts": args.restarts, "seed": args.seed}
    if args.tol is not None:
        kw["tol_value"] = kw["tol_step"] = args.tol
    if args.grid is not None:
        try:
            kw["grid"] = tuple(int(t) for t in args.grid.lower().split("x"))
        except ValueError:
            raise InputError(f"--grid must look like n1xn2, got {args.grid!r}") from None
    try:
        return OptimizerConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_entropy(args, out) -> int:
    F = parse_entropy(args.entropy)
    rho = load_state(args.state, _parse_dims(args.dims))
    print(fmt(entropy(F, rho)), file=out)
    return EXIT_OK


def _basis_json(basis) -> object:
    if isinstance(basis, ProductBasis):
        return {"A": basis.basisA.to_json(), "B": basis.basisB.to_json()}
    return basis.to_json()


def _round(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, list):
        return [_round(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    return obj


def cmd_minimize(args, out) -> int:
    rho = load_state(args.state, _parse_dims(args.dims))
    cfg = build_config(args)
    if args.side == "discord":
        rep = quantum_discord_B(rho, cfg)
        value, basis, ok, n = rep.value, rep.basis, rep.converged, rep.starts_used
    else:
        F = parse_entropy(args.entropy)
        if args.side == "AB":
            rep = min_info_loss_joint(F, rho, cfg)
        else:
            rep = min_info_loss_local(F, rho, args.side, cfg)
        value, basis, ok, n = rep.loss, rep.basis, rep.converged, rep.starts_used
    report = {
        "value": 0.0 if abs(value) < 1e-12 else float(fmt(value)),
        "basis": _round(_basis_json(basis)),
        "converged": bool(ok),
        "starts_used": int(n),
        "seed": cfg.seed,
    }
    print(json.dumps(report), file=out)
    return EXIT_OK


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise InputError(f"cannot write {path!r}: {exc.strerror}") from None


def _nondecreasing(col, tol=1e-12) -> bool:
    return bool(np.all(np.diff(col) >= -tol))


def _q_name(q: float) -> str:
    return f"Iq_{q:g}"


def figure1_table(p: float, xs, qs, verify: bool = False, cfg: OptimizerConfig | None = None):
    """Rows of x, I2B, C2, IvnB, EOF, Iq_<q>..., optionally IvnB_opt."""
    vn, lin = von_neumann(), linear()
    header = ["x", "I2B", "C2", "IvnB", "EOF"] + [_q_name(q) for q in qs]
    if verify:
        header.append("IvnB_opt")
        cfg = cfg or OptimizerConfig()
    rows = []
    for x in xs:
        c = oracle.concurrence_mixture_2q(p, x)
        row = [x, oracle.ifb_2q_min(lin, p, x), c * c, oracle.ifb_2q_min(vn, p, x), eof_from_concurrence(vn, c)]
        row += [oracle.ifb_2q_min(tsallis(q), p, x) for q in qs]
        if verify:
            row.append(min_info_loss_local(vn, oracle.mixture_2q(p, x), "B", cfg).loss)
        rows.append(row)
    return header, np.array(rows)


def assert_figure1(header, table):
    """I2B >= C2 everywhere and every curve nondecreasing in x."""
    col = {h: table[:, k] for k, h in enumerate(header)}
    failures = []
    if np.any(col["I2B"] < col["C2"] - 1e-12):
        failures.append("I2B >= C2")
    for h in header[1:]:
        if not _nondecreasing(col[h], 1e-9 if h.endswith("_opt") else 1e-12):
            failures.append(f"{h} nondecreasing in x")
    if "IvnB_opt" in col and np.max(np.abs(col["IvnB_opt"] - col["IvnB"])) > 1e-7:
        failures.append("optimizer matches closed form")
    return failures


def figure2_table(zs, qs, verify: bool = False, cfg: OptimizerConfig | None = None):
    """Rows of z, I2B, C2, IvnB, EOF, Iq_<q>..., optionally IvnB_opt."""
    vn, lin = von_neumann(), linear()
    header = ["z", "I2B", "C2", "IvnB", "EOF"] + [_q_name(q) for q in qs]
    if verify:
        header.append("IvnB_opt")
        cfg = cfg or OptimizerConfig()
    rows = []
    for z in zs:
        row = [
            z,
            oracle.ifb_bell_decoherence(lin, z),
            z * z,
            oracle.ifb_bell_decoherence(vn, z),
            oracle.eof_bell_decoherence(vn, z),
        ]
        row += [oracle.ifb_bell_decoherence(tsallis(q), z) for q in qs]
        if verify:
            row.append(min_info_loss_local(vn, oracle.bell_decoherence_state(z), "B", cfg).loss)
        rows.append(row)
    return header, np.array(rows)


def assert_figure2(header, table):
    """I2B = C2 columnwise and EOF >= IvnB on 0 < z < 1."""
    col = {h: table[:, k] for k, h in enumerate(header)}
    failures = []
    if np.max(np.abs(col["I2B"] - col["C2"])) > 1e-12:
        failures.append("I2B == C2")
    inner = (col["z"] > 0) & (col["z"] < 1)
    if np.any(col["EOF"][inner] < col["IvnB"][inner] - 1e-12):
        failures.append("EOF >= IvnB on (0,1)")
    if "IvnB_opt" in col and np.max(np.abs(col["IvnB_opt"] - col["IvnB"])) > 1e-7:
        failures.append("optimizer matches closed form")
    return failures


def _finish_figure(header, table, failures, out_path, out):
    _write_csv(out_path, header, table)
    if failures:
        raise CheckFailure("figure assertions failed: " + ", ".join(failures))
    print(f"wrote {len(table)} rows to {out_path}", file=out)
    return EXIT_OK


def cmd_figure1(args, out) -> int:
    xs = parse_range(args.xgrid)
    if xs[0] < 0 or xs[-1] > 1:
        raise InputError("x must lie in [0, 1]")
    if not 0 <= args.p <= 1:
        raise InputError("p must lie in [0, 1]")
    header, table = figure1_table(args.p, xs, parse_qs(args.q), args.verify, build_config(args))
    return _finish_figure(header, table, assert_figure1(header, table), args.out, out)


def cmd_figure2(args, out) -> int:
    zs = parse_range(args.zgrid)
    if zs[0] < -1 or zs[-1] > 1:
        raise InputError("z must lie in [-1, 1]")
    header, table = figure2_table(zs, parse_qs(args.q), args.verify, build_config(args))
    return _finish_figure(header, table, assert_figure2(header, table), args.out, out)


def cmd_check(args, out) -> int:
    results = run_suite(args.seed)
    for name, ok in results.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=out)
    failed = [n for n, ok in results.items() if not ok]
    if failed:
        print("failing invariants: " + ", ".join(failed), file=out)
        return EXIT_CHECK
    print(f"all {len(results)} invariants pass", file=out)
    return EXIT_OK


def cmd_export(args, out) -> int:
    text = to_json(load_state(args.state, _parse_dims(args.dims)))
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out!r}: {exc.strerror}") from None
    else:
        print(text, file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, state=True, opt=False):
        if state:
            p.add_argument("--state", required=True, help="builtin spec or JSON path")
            p.add_argument("--dims", help="dA,dB")
        if opt:
            p.add_argument("--restarts", type=int, default=24)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--tol", type=float)
            p.add_argument("--grid", help="qubit grid resolution, e.g. 181x91")

    p = sub.add_parser("entropy", help="print S_f of a state")
    common(p)
    p.add_argument("--entropy", default="vn")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("minimize", help="minimum information loss or discord")
    common(p, opt=True)
    p.add_argument("--entropy", default="vn")
    p.add_argument("--side", choices=["A", "B", "AB", "discord"], default="B")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("figure1", help="CSV for the pure-state/maximally-mixed mixture")
    common(p, state=False, opt=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--xgrid", default="0:1:0.01")
    p.add_argument("--q", default="1,1.5,2,3,5")
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("figure2", help="CSV for partially decohered Bell states")
    common(p, state=False, opt=True)
    p.add_argument("--zgrid", default="0:1:0.01")
    p.add_argument("--q", default="1,1.5,2,3,5")
    p.add_argument("--out", required=True)
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("check", help="run the invariant suite at reduced sampling")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", help="write a state as JSON")
    common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except StateError as exc:
        print(f"error: invalid state, violated invariant {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CheckFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
