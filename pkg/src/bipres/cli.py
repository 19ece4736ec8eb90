"""Command-line interface: ``bipres <command> [options]``.

Exit codes: 0 success, 2 usage, 3 I/O, 4 validation, 5 internal inconsistency.
Timings go to stderr so that stdout is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import firepio
from .bifiltration import DensityRipsComplex, annulus_sample, build_firep
from .core import BipresError, InconsistencyError, ValidationError
from .oracle import oracle_betti, oracle_hilbert
from .presentation import run_pipeline

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VALIDATION, EXIT_INTERNAL = 0, 2, 3, 4, 5


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _note(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def _complex_from_args(args, n=None):
    if n is not None or args.annulus is not None:
        data = annulus_sample(n if n is not None else args.annulus, args.seed)
        is_dist = False
    elif args.points is not None:
        data = firepio.read_point_cloud(_read_text(args.points))
        is_dist = False
    elif args.dist is not None:
        data = firepio.read_distance_matrix(_read_text(args.dist))
        is_dist = True
    else:
        raise ValidationError("no input: give an FI-Rep file, --points, --dist or --annulus")
    if (args.radius is None) == (args.percentile is None):
        raise ValidationError("give exactly one of --radius and --percentile")
    return DensityRipsComplex.build(
        data,
        args.radius,
        percentile=args.percentile,
        include_self=not args.no_self_density,
        max_dim=args.degree + 1,
        max_diameter=args.max_diameter,
        is_distance=is_dist,
    )


def _load_firep(args):
    if getattr(args, "input", None) is not None:
        fr = firepio.parse_firep(_read_text(args.input))
        if args.field is not None and args.field != fr.field.p:
            raise ValidationError(f"--field {args.field} disagrees with the document (p {fr.field.p})")
        return fr
    cx = _complex_from_args(args)
    return build_firep(cx, args.degree, args.field or 2)


def _betti_block(bt, hf, args, with_hilbert: bool) -> str | dict:
    if args.format == "json":
        out = {"betti": json.loads(firepio.serialize_betti(bt, "json"))}
        if with_hilbert:
            out["hilbert"] = json.loads(firepio.serialize_hilbert(hf, "json"))
        return out
    text = firepio.serialize_betti(bt)
    if with_hilbert:
        text += firepio.serialize_hilbert(hf)
    return text


def cmd_presentation(args) -> int:
    fr = _load_firep(args)
    res = run_pipeline(fr, minimal=args.minimal, threads=args.threads, engine=args.engine)
    P = res.minimal if args.minimal else res.semi_minimal
    _write(args, firepio.serialize_presentation(P, args.format))
    t = res.timings
    msg = f"timing: presentation {t['presentation']:.3f}s"
    if args.minimal:
        msg += f", minimization {t['minimize']:.3f}s"
    _note(args, msg)
    return EXIT_OK


def cmd_betti(args) -> int:
    fr = _load_firep(args)
    res = run_pipeline(fr, minimal=False, threads=args.threads, engine=args.engine)
    _note(args, f"timing: presentation {res.timings['presentation']:.3f}s, betti {res.timings['betti']:.3f}s")
    if not args.oracle_check:
        out = _betti_block(res.betti, res.hilbert, args, args.include_hilbert)
        _write(args, json.dumps(out, sort_keys=True) + "\n" if isinstance(out, dict) else out)
        return EXIT_OK
    return _report_oracle(args, fr, res)


def _report_oracle(args, fr, res) -> int:
    obt = oracle_betti(fr)
    ohf = oracle_hilbert(fr)
    match = obt == res.betti and ohf == res.hilbert
    if args.format == "json":
        out = {
            "match": match,
            "pipeline": _betti_block(res.betti, res.hilbert, args, True),
            "oracle": _betti_block(obt, ohf, args, True),
        }
        _write(args, json.dumps(out, sort_keys=True) + "\n")
    else:
        text = ("MATCH" if match else "MISMATCH") + "\n"
        text += "[pipeline]\n" + _betti_block(res.betti, res.hilbert, args, args.include_hilbert)
        text += "[oracle]\n" + _betti_block(obt, ohf, args, args.include_hilbert)
        _write(args, text)
    return EXIT_OK if match else EXIT_INTERNAL


def cmd_oracle_check(args) -> int:
    fr = _load_firep(args)
    res = run_pipeline(fr, minimal=False, threads=args.threads, engine=args.engine)
    return _report_oracle(args, fr, res)


def cmd_hilbert(args) -> int:
    fr = _load_firep(args)
    res = run_pipeline(fr, minimal=False, threads=args.threads, engine=args.engine)
    _write(args, firepio.serialize_hilbert(res.hilbert, args.format))
    return EXIT_OK


def cmd_firep(args) -> int:
    if getattr(args, "input", None) is not None:
        raise ValidationError("firep builds from --points, --dist or --annulus")
    fr = build_firep(_complex_from_args(args), args.degree, args.field or 2)
    _write(args, firepio.serialize_firep(fr))
    a, b, c = fr.sizes
    _note(args, f"sizes: d1 {a}x{b}, d2 {b}x{c}")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = []
    if args.radius is None and args.percentile is None:
        args.percentile = 0.2
    # warm up the compiled kernels so the first size is not charged for loading them
    run_pipeline(build_firep(_complex_from_args(args, n=10), args.degree, args.field or 2), engine=args.engine)
    for n in args.sizes:
        t0 = time.perf_counter()
        fr = build_firep(_complex_from_args(args, n=n), args.degree, args.field or 2)
        t1 = time.perf_counter()
        res = run_pipeline(fr, minimal=True, threads=args.threads, engine=args.engine)
        a, b, c = fr.sizes
        rows.append({
            "n": n,
            "columns": b + c,
            "build": round(t1 - t0, 4),
            "presentation": round(res.timings["presentation"], 4),
            "betti": round(res.timings["betti"], 4),
            "minimize": round(res.timings["minimize"], 4),
            "total": round(time.perf_counter() - t0, 4),
            "additions": res.additions["d1"] + res.additions["d2"],
            "semi_minimal": list(res.semi_minimal.shape),
            "minimal": list(res.minimal.shape),
        })
    if len(rows) >= 2:
        x = np.log([r["columns"] for r in rows])
        y = np.log([max(r["presentation"] + r["betti"] + r["minimize"], 1e-9) for r in rows])
        slope = float(np.polyfit(x, y, 1)[0])
    else:
        slope = None
    if args.format == "json":
        _write(args, json.dumps({"runs": rows, "loglog_slope": slope}, sort_keys=True) + "\n")
    else:
        lines = ["n columns build presentation betti minimize total additions"]
        for r in rows:
            lines.append(" ".join(str(r[k]) for k in ("n", "columns", "build", "presentation", "betti", "minimize", "total", "additions")))
        if slope is not None:
            lines.append(f"loglog_slope {slope:.3f}")
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _prime(text: str) -> int:
    from .core import PrimeField

    try:
        return PrimeField(int(text)).p
    except (ValueError, BipresError):
        raise argparse.ArgumentTypeError(f"not a prime below 2^16: {text!r}") from None


def _fraction(text: str) -> float:
    q = float(text)
    if not 0 < q < 1:
        raise argparse.ArgumentTypeError("percentile must lie strictly between 0 and 1")
    return q


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--field", "-p", type=_prime, help="prime field for generated FI-Reps (files carry their own)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--engine", choices=("fast", "reference"), default="fast")
    common.add_argument("-q", "--quiet", action="store_true", help="no timing output on stderr")

    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--points", help="point cloud file (whitespace or CSV rows)")
    src.add_argument("--dist", help="square distance matrix file")
    src.add_argument("--annulus", type=int, metavar="N", help="generate the noisy annulus sample with N points")
    src.add_argument("--radius", type=float, help="density radius")
    src.add_argument("--percentile", type=_fraction, help="density radius as a percentile of nonzero distances")
    src.add_argument("--degree", type=int, choices=(0, 1), default=1)
    src.add_argument("--no-self-density", action="store_true", help="do not count a point in its own density")
    src.add_argument("--max-diameter", type=float, help="drop simplices of larger diameter")

    ap = argparse.ArgumentParser(prog="bipres", description="Minimal presentations and bigraded Betti numbers of bipersistence modules.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("presentation", parents=[common, src], help="semi-minimal or minimal presentation")
    sp.add_argument("input", nargs="?", help="FI-Rep document ('-' for stdin)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--minimal", dest="minimal", action="store_true", default=True)
    g.add_argument("--semi-minimal", dest="minimal", action="store_false")
    sp.set_defaults(func=cmd_presentation)

    sp = sub.add_parser("betti", parents=[common, src], help="bigraded Betti numbers")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--include-hilbert", action="store_true")
    sp.add_argument("--oracle-check", action="store_true", help="also run the dense oracle and compare")
    sp.set_defaults(func=cmd_betti)

    sp = sub.add_parser("hilbert", parents=[common, src], help="Hilbert function on the grid of all grades")
    sp.add_argument("input", nargs="?")
    sp.set_defaults(func=cmd_hilbert)

    sp = sub.add_parser("oracle-check", parents=[common, src], help="compare the pipeline with the dense oracle")
    sp.add_argument("input", nargs="?")
    sp.add_argument("--include-hilbert", action="store_true")
    sp.set_defaults(func=cmd_oracle_check)

    sp = sub.add_parser("firep", parents=[common, src], help="build the FI-Rep of a density-Rips bifiltration")
    sp.set_defaults(func=cmd_firep)

    sp = sub.add_parser("bench", parents=[common, src], help="time the pipeline on annulus samples")
    sp.add_argument("--sizes", type=int, nargs="+", default=[25, 50, 100, 200])
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.threads < 1:
        ap.error("--threads must be at least 1")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"bipres: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"bipres: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InconsistencyError, BipresError) as exc:
        print(f"bipres: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the documented exit code
        print(f"bipres: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
