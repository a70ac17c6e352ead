"""Command-line front end.

Subcommands: derive, verify, density, scan, numcheck.  Expressions in
reports are rendered in the input grammar, so outputs can be piped back in.
Exit code 0 only when every requested law verifies.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .expr import ExprError, JetExpression
from .parser import parse_expression, render
from .pde import parse_pde
from .linsolve import AnsatzBounds, solve_multipliers
from .laws import ConservationLaw, build_law, flux_density, homotopy_density
from .detsys import determining_expression
from . import numcheck as nc


def _parse_params(pairs):
    params = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise SystemExit("--param expects name=rational, got %r" % pair)
        name, value = pair.split("=", 1)
        params[name.strip()] = Fraction(value.strip())
    return params


def _parse_atoms(spec, params):
    atoms = []
    for chunk in filter(None, (s.strip() for s in (spec or "").split(","))):
        e = parse_expression(chunk, params)
        if len(e.terms) != 1:
            raise SystemExit("--atoms entries must be single atoms, got %r" % chunk)
        (mono, akeys), c = next(iter(e.terms.items()))
        if mono or len(akeys) != 1 or akeys[0][1] != 1 or c != 1:
            raise SystemExit("--atoms entries must be single atoms, got %r" % chunk)
        atoms.append(akeys[0][0])
    return tuple(atoms)


def _pde_text(args):
    path = Path(args.pde)
    if path.is_file():
        return path.read_text().strip()
    return args.pde


def _eval_bound(text, params):
    """Integer bound, possibly an expression in the parameters (e.g. n+1)."""
    value = parse_expression(str(text), params).as_fraction()
    if value.denominator != 1 or value < 0:
        raise SystemExit("bound %r must evaluate to a nonnegative integer" % text)
    return int(value)


def _bounds(args, params):
    return AnsatzBounds(
        order=_eval_bound(args.order, params),
        deg_tx=_eval_bound(args.deg_tx, params),
        deg_u=_eval_bound(args.deg_u, params),
        atoms=_parse_atoms(args.atoms, params),
    )


def _utilde(args, params):
    if args.utilde is None:
        return JetExpression.zero()
    return parse_expression(args.utilde, params)


def _emit(args, payload, text_lines):
    if args.format == "json":
        body = json.dumps(payload, indent=2, sort_keys=True)
    else:
        body = "\n".join(text_lines)
    if args.out:
        Path(args.out).write_text(body + "\n")
    else:
        print(body)


def _derive_laws(pde, bounds, utilde):
    ansatz, multipliers = solve_multipliers(pde, bounds)
    laws = []
    for lam in multipliers:
        if not determining_expression(pde, lam).is_zero():
            raise RuntimeError("solver emitted a non-multiplier: %s" % render(lam))
        laws.append(build_law(pde, lam, utilde))
    return ansatz, laws


def _ansatz_record(bounds):
    return {
        "order": bounds.order,
        "deg_tx": bounds.deg_tx,
        "deg_u": bounds.deg_u,
        "atoms": [render(JetExpression.atom(a)) for a in bounds.atoms],
    }


def cmd_derive(args):
    params = _parse_params(args.param)
    pde = parse_pde(_pde_text(args), params)
    bounds = _bounds(args, params)
    ansatz, laws = _derive_laws(pde, bounds, _utilde(args, params))
    payload = {
        "pde": str(pde),
        "params": {k: str(v) for k, v in params.items()},
        "ansatz": _ansatz_record(bounds),
        "laws": [cl.to_record() for cl in laws],
        "dimensions": {"": len(laws)},
    }
    lines = ["pde: %s" % pde, "ansatz size: %d" % len(ansatz.basis),
             "multipliers found: %d" % len(laws)]
    for cl in laws:
        lines.append("  lambda  = %s" % render(cl.multiplier))
        lines.append("    phi_t = %s" % render(cl.density_t))
        lines.append("    phi_x = %s" % render(cl.density_x))
        lines.append("    verified: %s" % cl.verified)
    _emit(args, payload, lines)
    return 0 if all(cl.verified for cl in laws) else 1


def cmd_verify(args):
    params = _parse_params(args.param)
    pde = parse_pde(_pde_text(args), params)
    lam = parse_expression(args.multiplier, params)
    residual = determining_expression(pde, lam)
    if not residual.is_zero():
        payload = {"pde": str(pde), "lambda": render(lam), "verified": False,
                   "residual": render(residual)}
        _emit(args, payload, ["lambda = %s" % render(lam),
                              "FAIL: determining residual %s" % render(residual)])
        return 1
    cl = build_law(pde, lam, _utilde(args, params))
    payload = {"pde": str(pde), "params": {k: str(v) for k, v in params.items()},
               "laws": [cl.to_record()]}
    _emit(args, payload, ["lambda = %s" % render(lam),
                          "phi_t  = %s" % render(cl.density_t),
                          "phi_x  = %s" % render(cl.density_x),
                          "PASS" if cl.verified else "FAIL"])
    return 0 if cl.verified else 1


def cmd_density(args):
    params = _parse_params(args.param)
    pde = parse_pde(_pde_text(args), params)
    lam = parse_expression(args.multiplier, params)
    utilde = _utilde(args, params)
    phi_t = homotopy_density(pde, lam, utilde)
    phi_x = flux_density(pde, lam, phi_t)
    payload = {"pde": str(pde), "lambda": render(lam),
               "phi_t": render(phi_t), "phi_x": render(phi_x),
               "utilde": render(utilde)}
    _emit(args, payload, ["phi_t = %s" % render(phi_t),
                          "phi_x = %s" % render(phi_x)])
    return 0


def _parse_scan(spec):
    if "=" not in spec or ".." not in spec:
        raise SystemExit("--scan expects name=a..b")
    name, rng = spec.split("=", 1)
    lo, hi = rng.split("..", 1)
    return name.strip(), int(lo), int(hi)


def cmd_scan(args):
    base_params = _parse_params(args.param)
    name, lo, hi = _parse_scan(args.scan)
    text = _pde_text(args)
    dimensions = {}
    all_laws = []
    lines = []
    ok = True
    for value in range(lo, hi + 1):
        params = dict(base_params)
        params[name] = Fraction(value)
        pde = parse_pde(text, params)
        bounds = _bounds(args, params)
        _, laws = _derive_laws(pde, bounds, _utilde(args, params))
        key = "%s=%d" % (name, value)
        dimensions[key] = len(laws)
        all_laws.extend(cl.to_record() | {"scan": key} for cl in laws)
        ok = ok and all(cl.verified for cl in laws)
        lines.append("%s: dimension %d" % (key, len(laws)))
        for cl in laws:
            lines.append("    %s" % render(cl.multiplier))
    payload = {"pde": text, "params": {k: str(v) for k, v in base_params.items()},
               "ansatz": {"order": str(args.order), "deg_tx": str(args.deg_tx),
                          "deg_u": str(args.deg_u), "atoms": args.atoms or ""},
               "laws": all_laws, "dimensions": dimensions}
    _emit(args, payload, lines)
    return 0 if ok else 1


def _initial_state(pde, args, x, length):
    if args.initial == "soliton":
        u0 = nc.kdv_soliton(x)
    elif args.initial == "bumps":
        u0 = (2.0 + 0.5 * np.exp(-((x - 3.0)) ** 2)
              + 0.35 * np.exp(-((x + 4.0) / 0.8) ** 2))
    elif args.initial == "harmonics":
        u0 = nc.odd_harmonic_profile(x, length)
    elif args.initial == "periodic":
        u0 = 3.0 * np.sin(2 * np.pi * x / length) + np.cos(4 * np.pi * x / length)
    else:
        raise SystemExit("unknown initial profile %r" % args.initial)
    if pde.leading == (2, 0):
        return (u0, np.zeros_like(u0))
    return u0


def cmd_numcheck(args):
    params = _parse_params(args.param)
    pde = parse_pde(_pde_text(args), params)
    bounds = _bounds(args, params)
    _, laws = _derive_laws(pde, bounds, _utilde(args, params))
    cfg = nc.GridConfig(length=args.length, n=args.grid_n, dt=args.dt,
                        t_end=args.horizon)
    x = nc.grid(cfg)
    traj = nc.integrate_pde(pde, _initial_state(pde, args, x, cfg.length), cfg)
    lines = []
    rows_out = []
    worst = 0.0
    for i, cl in enumerate(laws):
        series = nc.quantity_series(cl, traj)
        drift = max(r[2] for r in series)
        worst = max(worst, drift)
        lines.append("law %d  lambda=%s  drift=%.3e" % (i, render(cl.multiplier), drift))
        rows_out.append({"law": render(cl.multiplier), "drift": drift,
                         "series": [{"t": t, "Q": q, "drift": d} for t, q, d in series]})
        if args.out:
            csv_path = Path(args.out) / ("law%02d.csv" % i)
            csv_path.parent.mkdir(parents=True, exist_ok=True)
            with open(csv_path, "w") as fh:
                fh.write("t,Q,drift\n")
                for t, q, d in series:
                    fh.write("%.12g,%.12g,%.12g\n" % (t, q, d))
    payload = {"pde": str(pde), "config": {"length": cfg.length, "n": cfg.n,
               "dt": cfg.dt, "t_end": cfg.t_end}, "laws": rows_out}
    if args.out:
        meta = Path(args.out) / "run.json"
        meta.parent.mkdir(parents=True, exist_ok=True)
        meta.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print("\n".join(lines))
    else:
        _emit(args, payload, lines)
    return 0 if worst <= args.tolerance else 1


def _add_common(p, ansatz=True):
    p.add_argument("--pde", required=True, help="PDE text or path to a file")
    p.add_argument("--param", action="append", metavar="k=v",
                   help="named rational parameter (repeatable)")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--utilde", help="reference state for the homotopy (default 0)")
    if ansatz:
        p.add_argument("--order", default="1", help="highest jet order p of the ansatz")
        p.add_argument("--deg-tx", default="0", dest="deg_tx",
                       help="total degree in t,x (may use parameters, e.g. n+1)")
        p.add_argument("--deg-u", default="1", dest="deg_u",
                       help="total degree in u and derivatives (may use parameters)")
        p.add_argument("--atoms", help="comma-separated kernel atoms, e.g. exp(-1/2*u)")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="jetlaw",
        description="exact conservation-law derivation and verification for scalar PDEs")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="derive all multipliers in an ansatz and their laws")
    _add_common(p)
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("verify", help="verify a single multiplier end to end")
    _add_common(p, ansatz=False)
    p.add_argument("--multiplier", "--lambda", dest="multiplier", required=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("density", help="reconstruct phi_t, phi_x for a multiplier")
    _add_common(p, ansatz=False)
    p.add_argument("--multiplier", "--lambda", dest="multiplier", required=True)
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("scan", help="re-run derive over an integer parameter range")
    _add_common(p)
    p.add_argument("--scan", required=True, metavar="k=a..b")
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("numcheck", help="integrate the PDE and report conserved drift")
    _add_common(p)
    p.add_argument("--grid-n", type=int, default=256, dest="grid_n")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--length", type=float, default=40.0)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--initial", default="periodic",
                   choices=("periodic", "soliton", "bumps", "harmonics"))
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(fn=cmd_numcheck)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ExprError, ValueError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
