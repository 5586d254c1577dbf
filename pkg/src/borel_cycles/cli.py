"""Command-line interface: build-cycle, verify, regulate, zeta-target, report."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTEGRITY = 0, 1, 2, 3

PRECISION_ENV = "BOREL_PRECISION"


class InputError(ValueError):
    pass


def _default_precision() -> int:
    try:
        return int(os.environ.get(PRECISION_ENV, "106"))
    except ValueError:
        return 106


def parse_unit(text: str, conductor: int):
    from .cyclo import FieldError, make_field, parse_element

    try:
        F = make_field(conductor)
    except (FieldError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    t = text.strip().lower()
    try:
        u = F.zeta(1) if t in ("zeta", "z") else parse_element(F, text)
    except Exception as exc:  # parser errors of any kind are input errors
        raise InputError(f"cannot parse unit {text!r}: {exc}") from exc
    if u.is_zero():
        raise InputError("unit must be invertible")
    return u


# -- build-cycle -------------------------------------------------------------------

VARIANTS = {"z-nx": "Z-nX", "y-2x": "Y-2X", "x": "X", "torsion": "torsion", "appendix": "appendix"}


def cmd_build_cycle(args) -> int:
    from .cycles import PreconditionError, build_cycle, build_X, torsion_cycle
    from .foxbar import bar_d
    from .regulator import appendix_tuple_exact
    from .serialize import ChainFile

    variant = VARIANTS.get(args.variant.lower())
    if variant is None:
        raise InputError(f"unknown variant {args.variant!r}")
    if variant == "appendix":
        ch, g = appendix_tuple_exact()
        cf = ChainFile(ch, g, meta={"variant": "appendix", "cycle": False})
        digest = cf.write(args.out)
        print(f"wrote appendix test tuple to {args.out} (digest {digest[:16]})")
        return EXIT_OK
    u = parse_unit(args.unit, args.conductor)
    t0 = time.perf_counter()
    try:
        if variant == "torsion":
            ch, g = torsion_cycle(u, args.n)
            cf = ChainFile(ch, g, meta={"variant": "torsion", "n": args.n, "cycle": True})
        elif variant == "X":
            x = build_X(u, residual=args.residual_checks)
            cf = ChainFile(x.cert.chain, x.cert.group, named={"A": x.A, "B": x.B},
                           meta={"variant": "X", "stats": x.stats.__dict__, "cycle": False},
                           boundary=x.cert.boundary)
            res = x
        else:
            res = build_cycle(u, variant, args.n, residual=args.residual_checks)
            x = res.x
            cf = ChainFile(res.chain, res.group, named={"A": x.A, "B": x.B},
                           meta={"variant": variant, "n": res.n, "cycle": True, "stats": x.stats.__dict__,
                                 "x_simplified_tuples": len(res.x_simplified.chain)})
    except PreconditionError as exc:
        raise InputError(str(exc)) from exc
    cf.meta["unit"] = args.unit
    ok = True
    if cf.meta.get("cycle"):
        ok = bar_d(cf.chain, cf.group).is_zero()
    elif cf.boundary is not None:
        ok = bar_d(cf.chain, cf.group) == cf.boundary
    digest = cf.write(args.out)
    print(f"variant: {variant}")
    print(f"tuples: {len(cf.chain)}  distinct matrices: {len(cf.chain.matrix_ids())}")
    if variant not in ("torsion",):
        st = x.stats
        print(f"proof factors: {st.proof_factors} {st.relator_counts}")
        print(f"commutators: {st.commutators} per relator kind {st.commutators_per_kind}")
        print(f"X tuples: {st.tuples}  X matrices: {st.matrices}  residual checks: {st.residual_checked}")
    print(f"verification: {'exact OK' if ok else 'FAILED'}  ({time.perf_counter() - t0:.1f}s)")
    print(f"wrote {args.out} (digest {digest[:16]})")
    if args.emit_trace and variant not in ("torsion",):
        from .words import unit_names
        Path(args.emit_trace).write_text(json.dumps(x.trace.dump(unit_names(u)), indent=1))
        print(f"wrote proof trace ({len(x.trace)} factors) to {args.emit_trace}")
    return EXIT_OK if ok else EXIT_FAIL


# -- verify ----------------------------------------------------------------------------

def _expected_boundary(spec: str, cf):
    from .foxbar import steinberg_symbol

    if not spec.startswith("steinberg:"):
        raise InputError("boundary spec must look like steinberg:A,B")
    names = spec.split(":", 1)[1].split(",")
    if len(names) != 2 or any(n not in cf.named for n in names):
        raise InputError(f"unknown matrix names in {spec!r}; file defines {sorted(cf.named)}")
    return steinberg_symbol(cf.named[names[0]], cf.named[names[1]])


def cmd_verify(args) -> int:
    from .foxbar import bar_d, std_d
    from .serialize import ChainFile

    cf = ChainFile.read(args.file)
    if cf.chain.kind == "bar":
        d = bar_d(cf.chain, cf.group)
    else:
        d = std_d(cf.chain)
    if args.expect_boundary:
        ok = d == _expected_boundary(args.expect_boundary, cf)
        what = f"boundary equals {args.expect_boundary}"
    else:
        ok = d.is_zero()
        what = "cycle (d = 0)"
    print(f"{args.file}: {len(cf.chain)} tuples; {what}: {'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_FAIL


# -- regulate -------------------------------------------------------------------------------

def cmd_regulate(args) -> int:
    from .regulator import NotACycleError, evaluate
    from .serialize import ChainFile

    cf = ChainFile.read(args.file)
    if args.mmax < 1:
        raise InputError("--mmax must be positive")
    skip = args.skip_verify or not cf.meta.get("cycle", True)
    if not cf.meta.get("cycle", True) and not args.skip_verify:
        print("note: file is not marked as a cycle; evaluating it as a plain chain")
    try:
        res = evaluate(cf.chain, cf.group, args.mmax, precision=args.precision, workers=args.threads,
                       checkpoint_dir=args.checkpoint_dir, skip_verify=skip)
    except NotACycleError:
        print("chain is not a cycle (use --skip-verify to override)")
        return EXIT_FAIL
    print(f"tuples after preprocessing: {res.n_tuples}")
    for m, c in enumerate(res.partials, 1):
        print(f"  C_{m} = {c.real:+.3e} {c.imag:+.17e} i")
    print(f"value = {res.value.real:+.3e} {res.value.imag:+.17e} i")
    print(f"tail estimate: {res.tail_estimate:.3e}")
    rel = abs(res.value.real) / max(1.0, abs(res.value.imag))
    print(f"real-part diagnostic |Re|/max(1,|Im|) = {rel:.2e}")
    print(f"wall time: {res.seconds:.2f}s (series {res.series_seconds:.2f}s, workers {res.workers})")
    if args.out:
        obj = res.to_json()
        obj["chain_meta"] = cf.meta
        Path(args.out).write_text(json.dumps(obj, indent=1))
        print(f"wrote {args.out}")
    return EXIT_OK


# -- zeta-target / report ----------------------------------------------------------------

def cmd_zeta_target(args) -> int:
    from .zeta import regulator_target, zeta_F2, zeta_star_minus1

    if args.conductor != 3:
        raise InputError("only conductor 3 is supported")
    p = args.precision
    print(f"zeta_F(2)     = {mpstr(zeta_F2(p))}")
    print(f"zeta*_F(-1)   = {mpstr(zeta_star_minus1(p))}")
    print(f"target |R|    = {mpstr(regulator_target(p))}")
    return EXIT_OK


def mpstr(x) -> str:
    import mpmath

    return mpmath.nstr(x, 25)


def verdict(value: complex, tail: float, target: float, n_tuples: int = 1) -> str:
    if n_tuples == 0:
        return "trivial (empty chain)"
    if math.isinf(tail) or math.isnan(tail):
        return "not converged (tail estimate infinite)"
    if min(abs(value - 1j * target), abs(value + 1j * target)) <= tail:
        return "consistent within tail bound"
    if abs(value) <= tail:
        return "consistent with zero"
    return "inconsistent"


def report_table(res, target: float) -> str:
    v = res.value
    rows = [
        ("series value", f"{v.real:+.3e} {v.imag:+.15e} i"),
        ("|Im value|", f"{abs(v.imag):.15f}"),
        ("tail estimate", f"{res.tail_estimate:.3e}"),
        ("m_max", str(res.m_max)),
        ("target", f"+/-{target:.18f}"),
        ("|Im| - target", f"{abs(v.imag) - target:+.3e}"),
        ("verdict", verdict(v, res.tail_estimate, target, res.n_tuples)),
    ]
    w = max(len(a) for a, _ in rows)
    return "\n".join(f"{a.ljust(w)} | {b}" for a, b in rows)


def cmd_report(args) -> int:
    from .regulator import SeriesResult
    from .zeta import regulator_target

    try:
        res = SeriesResult.from_json(json.loads(Path(args.result).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot read result file: {exc}") from exc
    print(report_table(res, float(regulator_target(args.precision))))
    return EXIT_OK


# -- entry point -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="borel-cycles", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build-cycle", help="build and verify a 3-cycle (or X, or a test chain)")
    b.add_argument("--conductor", type=int, default=3)
    b.add_argument("--unit", default="zeta")
    b.add_argument("--variant", default="z-nx", help="z-nx, y-2x, x, torsion or appendix")
    b.add_argument("--n", type=int, default=3)
    b.add_argument("--residual-checks", choices=("full", "sample", "none"), default="sample")
    b.add_argument("--out", required=True)
    b.add_argument("--emit-trace")
    b.set_defaults(func=cmd_build_cycle)

    v = sub.add_parser("verify", help="recompute the boundary of a chain file exactly")
    v.add_argument("file")
    v.add_argument("--expect-boundary")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("regulate", help="evaluate the regulator series")
    r.add_argument("file")
    r.add_argument("--mmax", type=int, default=6)
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--precision", type=int, default=_default_precision())
    r.add_argument("--checkpoint-dir")
    r.add_argument("--skip-verify", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_regulate)

    z = sub.add_parser("zeta-target", help="print the zeta value target")
    z.add_argument("--conductor", type=int, default=3)
    z.add_argument("--precision", type=int, default=_default_precision())
    z.set_defaults(func=cmd_zeta_target)

    rp = sub.add_parser("report", help="compare a regulate result with the zeta target")
    rp.add_argument("--result", required=True)
    rp.add_argument("--precision", type=int, default=_default_precision())
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    from .regulator import CheckpointError
    from .serialize import FormatError, IntegrityError

    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrityError, CheckpointError) as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
