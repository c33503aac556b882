"""Experiment harness: ``l1ops <command> [options]``.

Every command prints (or writes with ``--json``) one JSON report with sorted
keys.  Exit codes: 0 ok, 2 unparsable input, 3 dimension mismatch,
4 certification failure, 5 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .certify import certify_tuple
from .constructions import (
    ampliation,
    ampliation_exactness,
    halmos_dilation,
    parrott_generators,
    parrott_triple,
    roots_of_unity_diag,
)
from .linalg import (
    DimensionError,
    NonConvergenceError,
    adjoint,
    matrix_from_dict,
    matrix_to_dict,
    op_norm,
)
from .opspace import (
    GeneratorTuple,
    LevelElement,
    ell1_norm,
    isometry_defect,
    min_norm,
    os_norm,
    tuple_from_dict,
)

EXIT_OK, EXIT_PARSE, EXIT_DIM, EXIT_CERT, EXIT_NONCONV = 0, 2, 3, 4, 5
CERT_TOL = 1e-12


class InputError(Exception):
    pass


class CertificationFailure(Exception):
    def __init__(self, report: "ExperimentReport", reason: str):
        super().__init__(reason)
        self.report = report


@dataclass
class ExperimentReport:
    command: str
    parameters: dict[str, Any]
    results: dict[str, Any]
    seed: int
    elapsed_ms: int = 0
    tool_version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    def digest_payload(self) -> str:
        """Report JSON without the timing field, for reproducibility checks."""
        d = asdict(self)
        d.pop("elapsed_ms")
        return json.dumps(d, sort_keys=True)


def _read_json(path: Path | None) -> Any:
    if path is None:
        raise InputError("--input is required for this command")
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_tuple(path: Path | None) -> tuple[np.ndarray, ...]:
    obj = _read_json(path)
    try:
        return tuple_from_dict(obj)
    except DimensionError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc


def _generators(path: Path | None) -> GeneratorTuple:
    mats = _load_tuple(path)
    try:
        return GeneratorTuple(mats)
    except DimensionError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_min_norm(input: Path, grid: int = 360, refine: int = 50, seed: int = 0) -> ExperimentReport:
    b = LevelElement(_load_tuple(input))
    res = min_norm(b, grid=grid, refine_iters=refine)
    return ExperimentReport(
        "min-norm",
        {"input": str(input), "grid": grid, "refine": refine, "n": b.n, "k": b.k},
        {
            "lower": res.lower,
            "upper": res.upper,
            "lipschitz_upper": res.lipschitz_upper,
            "argmax": [float(x) for x in res.argmax],
            "refine_rounds": res.refine_rounds,
        },
        seed,
    )


def cmd_parrott_gap(m: int = 4, grid: int = 360, refine: int = 50, seed: int = 0) -> ExperimentReport:
    triple = parrott_triple()
    b = LevelElement(triple.ops)
    gens = parrott_generators(m)
    big = sum(np.kron(s, c) for s, c in zip(gens.ops, b.coeffs))
    os_value = op_norm(big)
    os_value_power = op_norm(big, method="power", seed=seed)
    tensor_witness = op_norm(sum(np.kron(c, c) for c in triple.ops))
    mres = min_norm(b, grid=grid, refine_iters=refine)
    report = ExperimentReport(
        "parrott-gap",
        {"m": m, "grid": grid, "refine": refine, "dim": gens.dim},
        {
            "os_value": os_value,
            "os_value_power": os_value_power,
            "tensor_witness": tensor_witness,
            "min_value": mres.lower,
            "min_lipschitz_upper": mres.lipschitz_upper,
            "min_argmax": [float(x) for x in mres.argmax],
            "gap": os_value - mres.lower,
        },
        seed,
    )
    if not (os_value >= 3 - 1e-9 and mres.lower < 3):
        raise CertificationFailure(report, "os value below 3 or MIN value not below 3")
    return report


def cmd_certify(input: Path, pair: tuple[int, int] = (1, 2), seed: int = 0) -> ExperimentReport:
    gens = _generators(input)
    try:
        cert = certify_tuple(gens, tuple(pair))
    except DimensionError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    results = cert.to_dict()
    ok = cert.margin > CERT_TOL and cert.recomputed_norm <= cert.witness.achieved + 1e-10
    results["certified"] = bool(ok)
    report = ExperimentReport(
        "certify", {"input": str(input), "pair": list(pair), "n": gens.n, "dim": gens.dim}, results, seed
    )
    if not ok:
        raise CertificationFailure(report, f"margin {cert.margin:.3e} not positive")
    return report


def cmd_defect(input: Path, starts: int = 32, seed: int = 0) -> ExperimentReport:
    gens = _generators(input)
    w = isometry_defect(gens, starts=starts, seed=seed)
    return ExperimentReport(
        "defect",
        {"input": str(input), "starts": starts, "n": gens.n, "dim": gens.dim},
        w.to_dict(),
        seed,
    )


def cmd_dilate(input: Path, seed: int = 0) -> ExperimentReport:
    obj = _read_json(input)
    try:
        mats = tuple_from_dict(obj) if "matrices" in obj else (matrix_from_dict(obj),)
        dilations = [halmos_dilation(t) for t in mats]
    except DimensionError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    residuals = [float(np.linalg.norm(adjoint(u) @ u - np.eye(u.shape[0]))) for u in dilations]
    return ExperimentReport(
        "dilate",
        {"input": str(input), "count": len(mats)},
        {"dilations": [matrix_to_dict(u) for u in dilations], "unitarity_residual": residuals},
        seed,
    )


def cmd_ampliation_check(m: int = 4, n: int = 3, seed: int = 0, k: int = 2) -> ExperimentReport:
    """Exactness of diagonal unitary ampliations against the joint-spectrum
    maximum, plus the truncated isometry bounds for both ampliation modes."""
    rng = np.random.default_rng(seed)
    factors = [np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, m))) for _ in range(n)]
    b = LevelElement(tuple(rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k)) for _ in range(n)))
    lhs, rhs = ampliation_exactness(factors, b)

    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    d = roots_of_unity_diag(m)
    bounds = {}
    for mode in ("independent", "cumulative"):
        fam = ampliation([d] * n, mode)
        value = op_norm(np.tensordot(a, np.stack(fam.ops), axes=1))
        lo, hi = np.cos(np.pi / m) * ell1_norm(a), ell1_norm(a)
        bounds[mode] = {
            "norm": value,
            "lower_bound": lo,
            "upper_bound": hi,
            "within": bool(lo - 1e-9 <= value <= hi + 1e-9),
        }
    return ExperimentReport(
        "ampliation-check",
        {"m": m, "n": n, "k": k},
        {
            "os_value": lhs,
            "spectral_max": rhs,
            "difference": abs(lhs - rhs),
            "equal": bool(abs(lhs - rhs) <= 1e-9),
            "vector": [[float(z.real), float(z.imag)] for z in a],
            "isometry_bounds": bounds,
        },
        seed,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, default=None, help="input JSON file")
    common.add_argument("--grid", type=int, default=360, help="torus grid points per coordinate")
    common.add_argument("--refine", type=int, default=50, help="golden-section refinement rounds")
    common.add_argument("--starts", type=int, default=32, help="Nelder-Mead starts")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--m", type=int, default=4, help="roots-of-unity truncation size")
    common.add_argument("--json", type=Path, default=None, help="write report here instead of stdout")

    parser = argparse.ArgumentParser(prog="l1ops", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("min-norm", parents=[common], help="MIN norm of a level element")
    sub.add_parser("parrott-gap", parents=[common], help="os-norm vs MIN norm on (I, U, V)")
    cert = sub.add_parser("certify", parents=[common], help="no-isometric-embedding certificate")
    cert.add_argument("--pair", type=int, nargs=2, default=[1, 2], metavar=("I", "J"))
    sub.add_parser("defect", parents=[common], help="isometry defect of a generator tuple")
    sub.add_parser("dilate", parents=[common], help="Halmos unitary dilation")
    amp = sub.add_parser("ampliation-check", parents=[common], help="ampliation exactness and bounds")
    amp.add_argument("--n", type=int, default=3, help="number of tensor factors")
    amp.add_argument("--k", type=int, default=2, help="matrix level of the random element")
    return parser


def _dispatch(args: argparse.Namespace) -> ExperimentReport:
    c = args.command
    if c == "min-norm":
        return cmd_min_norm(args.input, args.grid, args.refine, args.seed)
    if c == "parrott-gap":
        return cmd_parrott_gap(args.m, args.grid, args.refine, args.seed)
    if c == "certify":
        return cmd_certify(args.input, tuple(args.pair), args.seed)
    if c == "defect":
        return cmd_defect(args.input, args.starts, args.seed)
    if c == "dilate":
        return cmd_dilate(args.input, args.seed)
    if c == "ampliation-check":
        return cmd_ampliation_check(args.m, args.n, args.seed, args.k)
    raise AssertionError(c)


def _emit(report: ExperimentReport, dest: Path | None) -> None:
    text = report.to_json()
    if dest is None:
        print(text)
    else:
        Path(dest).write_text(text + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = _dispatch(args)
        code = EXIT_OK
    except CertificationFailure as exc:
        report, code = exc.report, EXIT_CERT
        print(f"error: {exc}", file=sys.stderr)
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    report.elapsed_ms = int(round((time.perf_counter() - t0) * 1000))
    _emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
