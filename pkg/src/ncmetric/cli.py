"""Command-line surface.

JSON in, CSV/JSON out. Exit codes: 0 success, 2 invariant violation,
3 input error, 4 numerical failure. All randomness is drawn from
named Philox substreams of --seed, so identical invocations produce
byte-identical artifacts. NCMETRIC_THREADS caps the props suite's
worker pool.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import props as props_mod
from .domains import (
    BallKernel,
    EvaluationFailure,
    HalfPlaneKernel,
    KernelDomain,
    NormBound,
    PointOutsideDomain,
    SpectralDisk,
    contains,
    domain_from_json,
    kernel_from_json,
)
from .freeprob import (
    MaxIterExceeded,
    NotInHalfPlane,
    RangeViolation,
    ScalarLaw,
    ScalarPower,
    SingularResolvent,
    density_grid,
    model_from_json,
    rho_from_json,
)
from .matcore import (
    NonHermitianInput,
    NotPositiveDefinite,
    SingularMatrix,
    mat_from_json,
    mat_to_json,
)
from .metric import (
    PathBlocked,
    check_contraction,
    d_upper,
    delta_closed,
    delta_kernel,
    delta_ray,
    delta_tilde,
    dtilde_upper,
)
from .ncfunc import DomainViolation, SeriesNotConverged, func_from_json
from .ncpoint import (
    BaseDimMismatch,
    DimMismatch,
    NotUnitary,
    direction,
    direction_from_json,
    point,
    point_from_json,
)
from .sampling import direction_sample, rng_stream, sample_in_domain, selfadjoint_disk_point

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4

NUMERICAL_ERRORS = (
    SingularMatrix,
    NotPositiveDefinite,
    SeriesNotConverged,
    EvaluationFailure,
    SingularResolvent,
    MaxIterExceeded,
    RangeViolation,
    PathBlocked,
)

INPUT_ERRORS = (
    json.JSONDecodeError,
    FileNotFoundError,
    IsADirectoryError,
    KeyError,
    TypeError,
    ValueError,
    NonHermitianInput,
    NotUnitary,
    BaseDimMismatch,
    DimMismatch,
    PointOutsideDomain,
    DomainViolation,
    NotInHalfPlane,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 means invariant violation here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_domain(args) -> object:
    if getattr(args, "domain", None):
        return domain_from_json(_load_json(args.domain))
    if getattr(args, "kernel", None):
        return KernelDomain(kernel_from_json(_load_json(args.kernel)))
    raise ValueError("provide --domain or --kernel")


def _load_direction(path, base_dim: int):
    obj = _load_json(path)
    if isinstance(obj, dict) and "row_level" in obj:
        return direction_from_json(obj)
    return direction(mat_from_json(obj), base_dim)


def _write_text(path, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _delta_rows_csv(level: int, results) -> str:
    lines = ["level,method,value,bracket_lo,bracket_hi,iterations"]
    for r in results:
        lines.append(
            f"{level},{r.method},{r.value!r},{r.bracket[0]!r},{r.bracket[1]!r},{r.iterations}"
        )
    return "\n".join(lines) + "\n"


def _delta_result_json(r) -> dict:
    out = {
        "method": r.method,
        "value": r.value,
        "bracket": [r.bracket[0], r.bracket[1]],
        "iterations": r.iterations,
    }
    if r.note:
        out["note"] = r.note
    return out


def cmd_delta(args) -> int:
    dom = _load_domain(args)
    a = point_from_json(_load_json(args.a))
    c = point_from_json(_load_json(args.c))
    b = _load_direction(args.b, a.base_dim)
    results = [delta_ray(dom, a, c, b, tol=args.tol, margin=args.margin)]
    if isinstance(dom, KernelDomain):
        k = dom.kernel
        if isinstance(k, BallKernel):
            results.append(delta_closed("ball", a, c, b, margin=args.margin))
        elif isinstance(k, HalfPlaneKernel):
            results.append(delta_closed("halfplane", a, c, b, margin=args.margin))
        results.append(delta_kernel(k, a, c, b, margin=args.margin))
    payload = {"level": a.level, "results": [_delta_result_json(r) for r in results]}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        _write_text(args.out, _delta_rows_csv(a.level, results))
    return EXIT_OK


def cmd_distance(args) -> int:
    dom = _load_domain(args)
    a = point_from_json(_load_json(args.a))
    c = point_from_json(_load_json(args.c))
    bound = dtilde_upper(
        dom, a, c, refinement_budget=args.refine, perturb_evals=args.perturb
    )
    path = d_upper(dom, a, c, quad_points=args.quad_points)
    payload = {
        "dtilde_upper": {
            "value": bound.value,
            "stage_values": list(bound.stage_values),
            "division": [mat_to_json(p.mat) for p in bound.division.points],
            "diagnostics": list(bound.diagnostics),
        },
        "d_upper": {
            "value": path.value,
            "quad_estimate": path.quad_estimate,
            "points_used": path.points_used,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        _write_text(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_contract(args) -> int:
    f = func_from_json(_load_json(args.function))
    src = domain_from_json(_load_json(args.src))
    dst = domain_from_json(_load_json(args.dst))
    rng = rng_stream(args.seed, "contract")
    levels = [int(s) for s in args.levels.split(",") if s]
    triples = []
    for i in range(args.samples):
        lvl = levels[i % len(levels)]
        a = sample_in_domain(src, rng, lvl, args.base_dim)
        c = sample_in_domain(src, rng, lvl, args.base_dim)
        triples.append((a, c, direction_sample(rng, args.base_dim, lvl, lvl)))
    rep = check_contraction(f, src, dst, triples, equality=args.equality, tol=args.tol)
    payload = {k: v for k, v in rep.items() if k != "rows"}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        lines = ["lhs,rhs"]
        lines += [f"{lhs!r},{rhs!r}" for lhs, rhs in rep["rows"]]
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if rep["ok"] else EXIT_VIOLATION


def _build_model(args):
    if args.model:
        return model_from_json(_load_json(args.model))
    if args.law:
        return ScalarLaw(args.law, variance=args.variance, atom=args.atom)
    raise ValueError("provide --model or --law")


def _build_rho(args):
    if args.rho:
        return rho_from_json(_load_json(args.rho))
    if args.rho_t is not None:
        return ScalarPower(args.rho_t)
    raise ValueError("provide --rho or --rho-t")


def cmd_convolve(args) -> int:
    model = _build_model(args)
    rho = _build_rho(args)
    result = density_grid(
        model,
        rho,
        args.xmin,
        args.xmax,
        points=args.points,
        eps=args.eps,
        tol=args.tol,
        max_iter=args.max_iter,
    )
    lines = ["x,density,residual,iterations"]
    for row in result.rows:
        lines.append(f"{row.x!r},{row.density!r},{row.residual!r},{row.iterations}")
    csv_text = "\n".join(lines) + "\n"
    converged = sum(1 for row in result.rows if row.converged)
    if args.out:
        _write_text(args.out, csv_text)
        summary = {
            "points": len(result.rows),
            "converged": converged,
            "eps": result.eps,
            "mass": result.mass,
            "out": args.out,
        }
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK if converged else EXIT_NUMERICAL


def cmd_props(args) -> int:
    results = props_mod.run_suite(args.seed)
    report = props_mod.report_csv(results)
    sys.stdout.write(report)
    if args.out:
        _write_text(args.out, report)
    return EXIT_OK if props_mod.all_passed(results) else EXIT_VIOLATION


def cmd_counterexample(args) -> int:
    # spectrum inside the disk at every level, norm bounded by the level
    graded = SpectralDisk(0.0, 1.0, NormBound("level", 1.0))
    big = np.zeros((4, 4), dtype=complex)
    big[0, 2] = 3.0
    big[1, 3] = 0.5
    small = np.array([[0.0, 3.0], [0.0, 0.0]], dtype=complex)
    level4_accepted = bool(contains(graded, point(big)).inside)
    level2_accepted = bool(contains(graded, point(small)).inside)

    # bounded gauge on the self-adjoint slice of a small spectral disk,
    # against blow-up at the boundary of the unit ball
    disk = SpectralDisk(0.0, 0.25, NormBound("constant", 1.0))
    rng = rng_stream(args.seed, "counterexample")
    worst = 0.0
    from .metric import delta_auto_tilde

    for _ in range(args.samples):
        lvl = int(rng.integers(1, 3))
        a = selfadjoint_disk_point(rng, lvl, 1, 0.25)
        c = selfadjoint_disk_point(rng, lvl, 1, 0.25)
        worst = max(worst, delta_auto_tilde(disk, a, c).value)
    bounded = bool(worst <= 4.0 / 3.0 + 1e-9)
    r = 1.0 - 1e-3
    blowup_val = delta_tilde("ball", point(np.zeros((1, 1))), point(np.array([[r]]))).value
    blowup = bool(blowup_val > 10.0)

    payload = {
        "matrix_convexity": {
            "level4_accepted": level4_accepted,
            "level2_accepted": level2_accepted,
            "reproduced": level4_accepted and not level2_accepted,
        },
        "bounded_tilde": {
            "samples": args.samples,
            "max_tilde": worst,
            "bound": 4.0 / 3.0,
            "bounded": bounded,
            "ball_tilde_at_r": blowup_val,
            "blowup": blowup,
            "reproduced": bounded and blowup,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    ok = payload["matrix_convexity"]["reproduced"] and payload["bounded_tilde"]["reproduced"]
    return EXIT_OK if ok else EXIT_VIOLATION


def build_parser() -> _Parser:
    parser = _Parser(prog="ncmetric", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)

    p = sub.add_parser("delta", help="infinitesimal metric by every applicable method")
    p.add_argument("--domain", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--a", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--margin", type=float, default=1e-9)
    add_common(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("distance", help="division and path distance upper bounds")
    p.add_argument("--domain", default=None)
    p.add_argument("--kernel", default=None)
    p.add_argument("--a", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--refine", type=int, default=6)
    p.add_argument("--perturb", type=int, default=120)
    p.add_argument("--quad-points", type=int, default=256)
    add_common(p)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("contract", help="Schwarz-Pick contraction report for a function")
    p.add_argument("--function", required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--dst", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--levels", default="1,2")
    p.add_argument("--base-dim", type=int, default=1)
    p.add_argument("--equality", action="store_true")
    p.add_argument("--tol", type=float, default=1e-8)
    add_common(p)
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("convolve", help="spectral density of a free convolution")
    p.add_argument("--law", choices=("semicircle", "bernoulli", "arcsine", "point_mass"), default=None)
    p.add_argument("--variance", type=float, default=1.0)
    p.add_argument("--atom", type=float, default=0.0)
    p.add_argument("--model", default=None)
    p.add_argument("--rho-t", type=float, default=None)
    p.add_argument("--rho", default=None)
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--points", type=int, default=501)
    p.add_argument("--eps", type=float, default=5e-3)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=200)
    add_common(p)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("props", help="run the cross-module invariant suite")
    add_common(p)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("counterexample", help="reproduce the graded-norm and bounded-gauge counterexamples")
    p.add_argument("--samples", type=int, default=50)
    add_common(p)
    p.set_defaults(func=cmd_counterexample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
