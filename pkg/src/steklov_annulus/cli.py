"""Command-line front end.

Every subcommand is a thin adapter over the library: parse flags, call the
corresponding function, wrap the result in an output envelope, and print
JSON (17 significant digits; --pretty rounds to 6 and indents). The
spectrum subcommand can emit CSV instead. Exit codes: 0 success, 1 I/O
failure, 2 usage, 3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__, galerkin, spectral, surfaces, suprema
from .crossings import CrossingQuery, crossing_time, crossing_value
from .errors import DomainError, NumericalError

_FULL_DIGITS = ".17g"
_PRETTY_DIGITS = ".6g"


# ---------------------------------------------------------------- rendering

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def render_json(obj, pretty: bool = False) -> str:
    """Serialize with fixed float formatting (json.dumps leaves float
    repr to Python; the output contract wants explicit digit counts)."""
    spec = _PRETTY_DIGITS if pretty else _FULL_DIGITS
    pieces = []
    _render(_jsonable(obj), spec, pretty, 0, pieces)
    return "".join(pieces)


def _render(obj, spec, pretty, depth, out) -> None:
    pad = "  " * (depth + 1) if pretty else ""
    close_pad = "  " * depth if pretty else ""
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            if pretty:
                out.append("\n" + pad)
            import json as _json
            out.append(_json.dumps(k))
            out.append(": " if pretty else ":")
            _render(v, spec, pretty, depth + 1, out)
        if pretty:
            out.append("\n" + close_pad)
        out.append("}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            if pretty:
                out.append("\n" + pad)
            _render(v, spec, pretty, depth + 1, out)
        if pretty:
            out.append("\n" + close_pad)
        out.append("]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj):
            out.append("null")
        elif math.isinf(obj):
            out.append('"infinite"' if obj > 0 else '"-infinite"')
        else:
            out.append(format(obj, spec))
    elif obj is None:
        out.append("null")
    else:
        import json as _json
        out.append(_json.dumps(obj))


def _envelope(command: str, params: dict, results, tolerances: dict) -> dict:
    return {
        "command": command,
        "params": params,
        "results": results,
        "version": __version__,
        "tolerances": tolerances,
    }


def _emit(env: dict, pretty: bool) -> None:
    sys.stdout.write(render_json(env, pretty))
    sys.stdout.write("\n")


# -------------------------------------------------------------- subcommands

def _entry_dict(e: spectral.SpectrumEntry) -> dict:
    return {
        "k": e.k,
        "value": e.value,
        "family": e.source.family.value,
        "n": e.source.n,
        "multiplicity": e.source.multiplicity,
    }


def _cmd_spectrum(args) -> int:
    s = spectral.shape(args.alpha, args.T)
    entries = spectral.enumerate_spectrum(s, args.count)
    if args.format == "csv":
        lines = ["k,value,family,n,multiplicity"]
        for e in entries:
            lines.append(
                f"{e.k},{format(e.value, _FULL_DIGITS)},"
                f"{e.source.family.value},{e.source.n},{e.source.multiplicity}"
            )
        sys.stdout.write("\n".join(lines) + "\n")
        return 0
    results = {
        "alpha": s.alpha,
        "beta": s.beta,
        "T": s.T,
        "entries": [_entry_dict(e) for e in entries],
    }
    _emit(_envelope("spectrum",
                    {"alpha": args.alpha, "T": args.T, "count": args.count},
                    results, {}), args.pretty)
    return 0


def _cmd_crossing(args) -> int:
    beta = 4.0 * args.alpha / (1.0 + args.alpha) ** 2
    q = CrossingQuery(args.k, args.l, beta)
    T = q.time()
    u = q.value()
    lo = spectral.eval_lambda(spectral.shape(args.alpha, T), int(args.k)).value \
        if float(args.k).is_integer() else None
    results = {
        "k": args.k,
        "l": args.l,
        "alpha": args.alpha,
        "beta": beta,
        "T": T,
        "value": u,
        "value_normalized": 4.0 * math.pi * u / beta,
        "residual": q.residual(T),
    }
    if lo is not None:
        results["lambda_branch_at_T"] = lo
    _emit(_envelope("crossing",
                    {"k": args.k, "l": args.l, "alpha": args.alpha},
                    results,
                    {"rel_tol": 1e-13, "residual_max": 1e-11}), args.pretty)
    return 0


def _cmd_sup(args) -> int:
    res = suprema.supremum(args.index)
    results = {
        "k": res.k,
        "value": res.value,
        "attained": res.attained,
        "maximizer": {"alpha": res.maximizer.alpha, "T": res.maximizer.T},
    }
    if args.scan:
        results["scan"] = suprema.scan_suprema(args.index)
    _emit(_envelope("sup", {"index": args.index, "scan": args.scan},
                    results, {"grid_margin": 1e-9}), args.pretty)
    return 0


def _cmd_bound(args) -> int:
    s = spectral.shape(args.alpha, args.T)
    bound, case = suprema.sigma_upper_bound(args.index, args.parity, s)
    rank = 2 * args.index - 1 if args.parity == "odd" else 2 * args.index
    observed = spectral.enumerate_spectrum(s, rank)[rank].value
    results = {
        "k": args.index,
        "parity": args.parity,
        "rank": rank,
        "alpha": s.alpha,
        "beta": s.beta,
        "T": s.T,
        "bound": bound,
        "observed": observed,
        "satisfied": bool(observed <= bound + 1e-9 * max(1.0, bound)),
        "case": {
            "j": case.j,
            "t_lo": case.t_lo,
            "t_hi": case.t_hi,
            "source_n": case.source_n,
            "source_T": case.source_T,
        },
    }
    _emit(_envelope("bound",
                    {"index": args.index, "parity": args.parity,
                     "alpha": args.alpha, "T": args.T},
                    results, {"bound_slack": 1e-9}), args.pretty)
    return 0


def _cmd_surface(args) -> int:
    try:
        nt_s, nq_s = args.grid.lower().split("x")
        nt, nq = int(nt_s), int(nq_s)
    except ValueError:
        raise DomainError(f"--grid expects RxC like 64x64, got {args.grid!r}")
    sample = surfaces.sample_surface(args.kind, args.n, nt, nq)
    fmt = args.format
    if fmt is None:
        ext = str(args.out).rsplit(".", 1)[-1].lower()
        if ext in ("obj", "json"):
            fmt = ext
        else:
            fmt = "obj" if sample.ambient_dim == 3 else "json"
    path = surfaces.export_mesh(sample, fmt, args.out)
    radii = surfaces.boundary_sphere_radii(sample)
    results = {
        "kind": sample.kind,
        "n": sample.n,
        "ambient_dim": sample.ambient_dim,
        "grid": [nt, nq],
        "t_range": [sample.t_range[0], sample.t_range[1]],
        "file": str(path),
        "format": fmt,
        "projection": bool(sample.ambient_dim == 4 and fmt == "obj"),
        "free_boundary_residual": surfaces.free_boundary_residual(sample),
        "minimality_residual": surfaces.discrete_minimality_residual(sample),
        "boundary_sphere_radius": float(radii.mean()),
        "boundary_sphere_spread": float(radii.max() - radii.min()),
    }
    _emit(_envelope("surface",
                    {"kind": args.kind, "n": args.n, "grid": args.grid,
                     "out": str(args.out), "format": args.format},
                    results, {"free_boundary_max": 1e-10}), args.pretty)
    return 0


def _cmd_general(args) -> int:
    weight = galerkin.load_weight(args.weights)
    if args.modes is not None:
        system = galerkin.assemble(weight, args.modes)
        entries = galerkin.solve_spectrum(system, args.count)
        n_used, delta = args.modes, None
    else:
        entries, n_used, delta = galerkin.solve_with_auto_truncation(
            weight, args.count)
    results = {
        "alpha": weight.alpha,
        "beta": weight.beta,
        "T": weight.T,
        "boundary_length": weight.boundary_length,
        "N": n_used,
        "cauchy_delta": delta,
        "entries": [{"k": k, "value": val}
                    for k, (val, _vec) in enumerate(entries)],
    }
    _emit(_envelope("general",
                    {"weights": str(args.weights), "count": args.count,
                     "modes": args.modes},
                    results, {"cauchy_tol": 1e-9}), args.pretty)
    return 0


def _cmd_counterexample(args) -> int:
    T_values = np.linspace(args.tmin, args.tmax, args.steps)
    report = galerkin.counterexample_scan(T_values, N=args.modes,
                                          use_sqrt_factor=args.sqrt_factor)
    _emit(_envelope("counterexample",
                    {"tmin": args.tmin, "tmax": args.tmax,
                     "steps": args.steps, "modes": args.modes,
                     "sqrt_factor": args.sqrt_factor},
                    report, {"strictness": 1e-6}), args.pretty)
    return 0


def _cmd_compare(args) -> int:
    weight = galerkin.load_weight(args.weights)
    theorem = args.theorem
    if theorem is None:
        from .crossings import crossing_time as _ct
        theorem = "4.1" if weight.T >= _ct(1.0, 0.0, weight.beta) else "4.2"
    if theorem == "4.1":
        results = galerkin.comparison_check_T_large(weight, N=args.modes)
    elif theorem == "4.2":
        rep = galerkin.matrix_A(weight)
        sigma1, n_used, delta = galerkin.first_nonzero_eigenvalue(weight, args.modes)
        lam1 = spectral.eval_lambda(weight.shape(), 1).value
        results = {
            "A": rep.A,
            "eigenvalues": rep.eigenvalues,
            "two_nonpositive": rep.two_nonpositive,
            "alpha": rep.alpha,
            "T": rep.T,
            "T_threshold": rep.T_threshold,
            "tau1": rep.tau1,
            "sigma1": sigma1,
            "lambda1_symmetric": lam1,
            "inequality_holds": bool(sigma1 <= lam1 + 1e-8 * max(1.0, lam1)),
            "N": n_used,
            "cauchy_delta": delta,
        }
        # the theorem is an implication; vacuously true when the
        # predicate fails
        results["holds"] = bool(
            not rep.two_nonpositive or results["inequality_holds"])
    else:
        results = galerkin.comparison_check_orthogonal(weight, args.k,
                                                       N=args.modes)
    results = {"theorem": theorem, **results}
    _emit(_envelope("compare",
                    {"weights": str(args.weights), "theorem": args.theorem,
                     "k": args.k, "modes": args.modes},
                    results, {"comparison_slack": 1e-8}), args.pretty)
    return 0


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="steklov-annulus",
        description="Steklov spectra of conformal annuli: closed-form "
                    "branches, crossing times, suprema, sharp bands, a "
                    "Fourier-Galerkin solver, and minimal-surface checks.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--pretty", action="store_true",
                        help="6-digit indented output")
        return sp

    sp = add("spectrum", _cmd_spectrum,
             "ordered normalized eigenvalues of a symmetric metric")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = add("crossing", _cmd_crossing,
             "crossing time T_(k,l) and value of two eigenvalue branches")
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--l", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)

    sp = add("sup", _cmd_sup, "supremum of the k-th normalized eigenvalue")
    sp.add_argument("--index", type=int, required=True)
    sp.add_argument("--scan", action="store_true",
                    help="corroborate with a grid scan")

    sp = add("bound", _cmd_bound,
             "piecewise upper bound certificate for one eigenvalue rank")
    sp.add_argument("--index", type=int, required=True)
    sp.add_argument("--parity", choices=("odd", "even"), required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)

    sp = add("surface", _cmd_surface,
             "sample a critical minimal surface and export its mesh")
    sp.add_argument("--kind", choices=surfaces.KINDS, required=True)
    sp.add_argument("--n", type=int, required=True,
                    help="cover index (catenoid, mobius); odd index m (embedded)")
    sp.add_argument("--grid", default="64x64", help="RxC grid, default 64x64")
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("obj", "json"), default=None)

    sp = add("general", _cmd_general,
             "Galerkin spectrum of a weight file")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--modes", type=int, default=None,
                    help="fixed truncation N (default: auto-doubling)")

    sp = add("counterexample", _cmd_counterexample,
             "scan the non-constant weight against the flat cylinder")
    sp.add_argument("--tmin", type=float, default=0.1)
    sp.add_argument("--tmax", type=float, default=2.3)
    sp.add_argument("--steps", type=int, default=45)
    sp.add_argument("--modes", type=int, default=32)
    sp.add_argument("--sqrt-factor", action="store_true",
                    help="use sqrt of the displayed series as the weight")

    sp = add("compare", _cmd_compare,
             "comparison-theorem reports for a weight file")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--theorem", choices=("4.1", "4.2", "4.3"), default=None,
                    help="which comparison to run (default: by regime)")
    sp.add_argument("--k", type=int, default=1,
                    help="band index for --theorem 4.3")
    sp.add_argument("--modes", type=int, default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
