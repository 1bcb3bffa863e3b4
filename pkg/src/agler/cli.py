"""``agler`` command line.

Exit codes: 0 when every check passes, 1 when the mathematics fails
(an invalid certificate, say), 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import demos
from .exceptions import AglerError
from .facebound import face_bounds
from .polycore import Poly
from .realize import (
    Realization,
    lurking_isometry,
    match_residual,
    to_rational,
    transfer_eval,
)
from .soscert import SosCertificate, check_degree_bounds, radial_check, verify_decomposition
from .vntest import vn_probe

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- loading ---------------------------------------------------------------


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e.msg} at line {e.lineno})") from e


def _parse(path: str, loader, exact: bool):
    obj = _read_json(path)
    try:
        return loader(obj, exact=exact)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: {e}") from e


def _bundle(args):
    try:
        return demos.load_demo(args.demo, exact=args.exact)
    except KeyError as e:
        raise UsageError(e.args[0]) from e


def _load_pq(args):
    if args.demo:
        b = _bundle(args)
        return b.p, b.q
    if not (args.p and args.q):
        raise UsageError("give P Q files or --demo NAME")
    p = _parse(args.p, Poly.from_json, args.exact)
    q = _parse(args.q, Poly.from_json, args.exact)
    if p.nvars != q.nvars:
        raise UsageError(f"p has {p.nvars} variables but q has {q.nvars}")
    return p, q


def _load_cert(args, nvars: int) -> SosCertificate:
    if args.cert:
        cert = _parse(args.cert, SosCertificate.from_json, args.exact)
    elif args.demo:
        cert = _bundle(args).cert
        if cert is None:
            raise UsageError(f"demo {args.demo} has no bundled certificate")
    else:
        raise UsageError("missing certificate file")
    if cert.nvars != nvars:
        raise UsageError(f"certificate has {cert.nvars} faces, expected {nvars}")
    return cert


def _load_realization(args) -> Realization:
    if args.realization:
        return _parse(args.realization, Realization.from_json, args.exact)
    if not args.demo:
        raise UsageError("give a realization file or --demo NAME")
    b = _bundle(args)
    if b.realization is not None:
        return b.realization
    return lurking_isometry(b.p, b.q, b.cert)


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([complex(s.strip().replace(" ", "")) for s in text.split(",")])
    except ValueError as e:
        raise UsageError(f"bad --point {text!r}: use e.g. 0.1+0.2j,0.3") from e


def _parse_degree(text: str | None, p: Poly, q: Poly) -> tuple[int, ...]:
    if text is None:
        return tuple(max(a, b) for a, b in zip(p.multidegree(), q.multidegree()))
    try:
        d = tuple(int(s) for s in text.split(","))
    except ValueError as e:
        raise UsageError(f"bad --degree {text!r}") from e
    if len(d) != p.nvars:
        raise UsageError(f"--degree needs {p.nvars} entries")
    return d


def _cnum(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _emit(args, report: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join(lines))


def _write(path: str, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


# -- commands --------------------------------------------------------------


def _verify_report(p, q, cert, d, tol):
    res = verify_decomposition(p, q, cert)
    rad = radial_check(p, q, cert)
    faces = check_degree_bounds(cert, d)
    ok = res <= tol and rad <= tol and all(f.ok for f in faces)
    return ok, res, rad, faces


def cmd_verify(args) -> int:
    p, q = _load_pq(args)
    cert = _load_cert(args, p.nvars)
    d = _parse_degree(args.degree, p, q)
    ok, res, rad, faces = _verify_report(p, q, cert, d, args.tol)
    lines = [
        f"identity residual   {res:.3e}",
        f"radial residual     {rad:.3e}",
    ]
    for f in faces:
        flag = "ok" if f.ok else "FAIL"
        lines.append(
            f"face {f.face + 1}: multidegree {f.multidegree} <= {f.degree_bound}, "
            f"squares {f.count} <= {f.count_bound}  {flag}"
        )
    lines.append("PASS" if ok else f"FAIL (tol {args.tol:g})")
    report = {
        "pass": ok,
        "residual": res,
        "radial_residual": rad,
        "degree": list(d),
        "faces": [
            {
                "face": f.face,
                "multidegree": list(f.multidegree),
                "degree_bound": list(f.degree_bound),
                "count": f.count,
                "count_bound": f.count_bound,
                "ok": f.ok,
            }
            for f in faces
        ],
    }
    _emit(args, report, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_realize(args) -> int:
    p, q = _load_pq(args)
    cert = _load_cert(args, p.nvars)
    r = lurking_isometry(p, q, cert, tol=args.tol)
    unit = r.unitarity_residual()
    match = match_residual(r, p, q, npts=50, seed=args.seed)
    if args.out:
        _write(args.out, r.to_json())
    report = {"size": r.size, "dims": list(r.dims), "unitarity_residual": unit, "match_residual": match}
    if args.json and not args.out:
        report["realization"] = r.to_json()
    lines = [
        f"size                {r.size}  dims {r.dims}",
        f"unitarity residual  {unit:.3e}",
        f"match residual      {match:.3e}",
    ]
    if args.out:
        lines.append(f"wrote {args.out}")
    _emit(args, report, lines)
    return EXIT_OK


def cmd_eval(args) -> int:
    r = _load_realization(args)
    z = _parse_point(args.point)
    val = transfer_eval(r, z)
    _emit(args, {"value": _cnum(val)}, [repr(val)])
    return EXIT_OK


def cmd_to_rational(args) -> int:
    r = _load_realization(args)
    q, p = to_rational(r)
    if args.out:
        _write(args.out, {"q": q.to_json(), "p": p.to_json()})
    _emit(args, {"q": q.to_json(), "p": p.to_json()}, [f"q = {q!r}", f"p = {p!r}"])
    return EXIT_OK


def cmd_lower_bound(args) -> int:
    p, q = _load_pq(args)
    faces = face_bounds(p.to_float(), q.to_float(), starts=args.starts, seed=args.seed)
    total = sum(f.bound for f in faces)
    lines = []
    for f in faces:
        d = f.data
        lines.append(
            f"face {f.face + 1}: c00={d.c00.real:.6g} c10={d.c10:.6g} c01={d.c01:.6g} "
            f"c11={d.c11:.6g} c1m1={d.c1m1:.6g}  one square: {'yes' if f.single_square else 'no'}"
            f"  -> >= {f.bound}"
        )
    lines.append(f"size lower bound    {total}")
    report = {
        "lower_bound": total,
        "faces": [{"face": f.face, "single_square": f.single_square, "bound": f.bound} for f in faces],
    }
    _emit(args, report, lines)
    return EXIT_OK


def cmd_vn_test(args) -> int:
    p, q = _load_pq(args)
    pr = vn_probe(q.to_float(), p.to_float(), trials=args.trials, dim=args.dim, seed=args.seed, tol=args.tol)
    lines = [
        f"trials              {pr.trials}  (matrix sizes 1..{args.dim})",
        f"max ||f(T)||        {pr.max_norm:.12f}  (trial {pr.argmax_trial})",
        "PASS" if pr.passed else f"FAIL: exceeds 1 + {args.tol:g}",
    ]
    _emit(args, {"pass": pr.passed, "max_norm": pr.max_norm, "trials": pr.trials,
                 "argmax_trial": pr.argmax_trial}, lines)
    return EXIT_OK if pr.passed else EXIT_FAIL


def _demo_rows(b: demos.DemoBundle, args) -> list[tuple[str, str, bool]]:
    rows = []
    fb = b.to_float()
    tol = 1e-10
    if b.realization is not None:
        unit = fb.realization.unitarity_residual()
        rows.append(("unitarity", f"{unit:.2e}", unit < 1e-12))
        m = match_residual(fb.realization, fb.p, fb.q, npts=200, seed=args.seed)
        rows.append(("eval match", f"{m:.2e}", m < tol))
        q, p = to_rational(b.realization)
        # transfer function recovers (q, p) up to a common scalar
        lam = fb.p.coeff((0,) * b.nvars) / p.to_float().coeff((0,) * b.nvars)
        ok = p.to_float().scale(lam).allclose(fb.p) and q.to_float().scale(lam).allclose(fb.q)
        rows.append(("to_rational", "matches" if ok else "differs", ok))
    if b.cert is not None:
        ok, res, rad, faces = _verify_report(b.p, b.q, b.cert, _parse_degree(None, b.p, b.q), 1e-12)
        rows.append(("sos identity", f"{res:.2e}", res <= 1e-12))
        rows.append(("radial identity", f"{rad:.2e}", rad <= 1e-12))
        rows.append(("degree bounds", ", ".join(f"{f.count}<={f.count_bound}" for f in faces),
                     all(f.ok for f in faces)))
        if b.realization is None:
            r = lurking_isometry(fb.p, fb.q, fb.cert)
            m = match_residual(r, fb.p, fb.q, npts=200, seed=args.seed)
            want = b.expected.get("size")
            rows.append(("realize size", str(r.size), want is None or r.size == want))
            rows.append(("realize match", f"{m:.2e}", m < 1e-8))
    want = b.expected.get("lower_bound")
    if want is not None:
        lb = sum(f.bound for f in face_bounds(fb.p, fb.q))
        rows.append(("lower bound", str(lb), lb == want))
    pr = vn_probe(fb.q, fb.p, trials=args.trials, dim=args.dim, seed=args.seed)
    rows.append(("von Neumann probe", f"{pr.max_norm:.6f}", pr.passed))
    return rows


def _export(b: demos.DemoBundle, outdir: str) -> None:
    d = Path(outdir)
    d.mkdir(parents=True, exist_ok=True)
    _write(str(d / "p.json"), b.p.to_json())
    _write(str(d / "q.json"), b.q.to_json())
    if b.cert is not None:
        _write(str(d / "cert.json"), b.cert.to_json())
    if b.realization is not None:
        _write(str(d / "realization.json"), b.realization.to_json())


def cmd_demo(args) -> int:
    args.demo = args.name
    b = _bundle(args)
    if args.export:
        # exports keep the exact parts; plain readers just see re/im
        _export(demos.load_demo(args.name), args.export)
    t0 = time.perf_counter()
    rows = _demo_rows(b, args)
    ok = all(r[2] for r in rows)
    lines = [f"{b.name}: {b.description}"]
    lines += [f"  {name:<18} {val:<24} {'pass' if good else 'FAIL'}" for name, val, good in rows]
    lines.append(f"{'PASS' if ok else 'FAIL'}  ({time.perf_counter() - t0:.2f} s)")
    report = {"demo": b.name, "pass": ok, "checks": [{"check": n, "value": v, "pass": g} for n, v, g in rows]}
    _emit(args, report, lines)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--exact", action="store_true", help="read coefficients exactly (rationals, surds)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--demo", metavar="NAME", choices=demos.DEMO_NAMES, help="use bundled example data")

    ap = _Parser(prog="agler", description="Agler decompositions and unitary realizations of rational inner functions")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("verify", parents=[common], help="check a sums-of-squares certificate")
    s.add_argument("p", nargs="?")
    s.add_argument("q", nargs="?")
    s.add_argument("cert", nargs="?")
    s.add_argument("--degree", help="comma-separated multidegree bound d (default: multidegree of p, q)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("realize", parents=[common], help="build a unitary realization from a certificate")
    s.add_argument("p", nargs="?")
    s.add_argument("q", nargs="?")
    s.add_argument("cert", nargs="?")
    s.add_argument("--out", help="write realization JSON here")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("eval", parents=[common], help="evaluate a realization at a point")
    s.add_argument("realization", nargs="?")
    s.add_argument("--point", required=True, help="comma-separated complex coordinates")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("to-rational", parents=[common], help="recover q/p from a realization")
    s.add_argument("realization", nargs="?")
    s.add_argument("--out")
    s.set_defaults(func=cmd_to_rational)

    s = sub.add_parser("lower-bound", parents=[common], help="face-based lower bound on realization size")
    s.add_argument("p", nargs="?")
    s.add_argument("q", nargs="?")
    s.add_argument("--starts", type=int, default=0, help="extra numeric rank-1 search starts per face")
    s.set_defaults(func=cmd_lower_bound)

    s = sub.add_parser("vn-test", parents=[common], help="random von Neumann inequality probe")
    s.add_argument("p", nargs="?")
    s.add_argument("q", nargs="?")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--dim", type=int, default=6)
    s.set_defaults(func=cmd_vn_test, tol=1e-8)

    s = sub.add_parser("demo", parents=[common], help="run the full pipeline on a bundled example")
    s.add_argument("name", choices=demos.DEMO_NAMES)
    s.add_argument("--export", metavar="DIR", help="also write the bundle's JSON files to DIR")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--dim", type=int, default=6)
    s.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"agler: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AglerError as e:
        print(f"agler: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
