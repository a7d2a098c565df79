"""Command line front end.

Subcommands: describe, structure, check, orbital, zeta, laurent,
synth-spectrum.  Outputs are deterministic for identical inputs; exit codes
are 0 on success, 2 for input errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _configure_threads():
    cap = os.environ.get("LSYM_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def _json_dump(obj, stream):
    json.dump(obj, stream, indent=2, sort_keys=True)
    stream.write("\n")


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _load_group(text: str):
    from .liecore import build_group
    text = text.strip()
    if text.startswith("{"):
        return build_group(json.loads(text))
    if text.endswith(".json") and os.path.exists(text):
        with open(text) as fh:
            return build_group(json.load(fh))
    return build_group(text)


def _group_report(group) -> dict:
    from .liecore import delta_invariant, has_noncompact_center
    from .rootsweyl import root_system
    data = root_system(group)
    report = {
        "family": group.family,
        "dim_g": group.dim,
        "dim_p": group.m_dim,
        "dim_k": group.n_dim,
        "rank_torus": len(group.torus_idx),
        "delta": delta_invariant(group),
        "noncompact_center": has_noncompact_center(group),
        "weyl_order": data.roots.weyl_order,
        "positive_roots": [[_frac(c) for c in w]
                           for w in data.roots.positive_roots],
        "rho": [_frac(c) for c in data.roots.rho],
    }
    return report


def _structure_report(group) -> dict:
    from .parabolic import build_structure, casimir_shift
    s = build_structure(group)
    shifts = [casimir_shift(s, j) for j in range(2 * s.l + 1)]
    return {
        "l": s.l,
        "dim_n": 2 * s.l,
        "dim_p_m": len(s.pm_basis),
        "dim_k_m": len(s.km_basis),
        "alpha_norm2": _frac(s.alpha_norm2),
        "alpha_pairing_on_generator": _frac(s.alpha_raw),
        "a0": [_frac(c) for c in s.a0],
        "compact_complement_casimir_trace": _frac(s.u_perp_trace),
        "sigma_shifts": [_frac(sig) for _, sig in shifts],
        "casimir_scalars": [_frac(c) for c, _ in shifts],
        "n_positive_weights": [[_frac(Fraction(c)) for c in w]
                               for w in s.n_pos_weights],
    }


def cmd_describe(args) -> int:
    group = _load_group(args.group)
    from .liecore import delta_invariant
    report = _group_report(group)
    if report["delta"] == 1 and not report["noncompact_center"]:
        try:
            report["structure"] = _structure_report(group)
        except Exception as e:                      # pragma: no cover
            report["structure_error"] = str(e)
    _json_dump(report, sys.stdout)
    return EXIT_OK


def cmd_structure(args) -> int:
    group = _load_group(args.group)
    report = _structure_report(group)
    _json_dump(report, sys.stdout)
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import SUITES, run_suites
    names = list(SUITES) if args.suite == "all" else [args.suite]
    kwargs = {"seed": args.seed, "perturb": args.perturb}
    if args.sigma is not None:
        kwargs["sigma"] = args.sigma
    if args.spectrum and not args.spectrum.startswith("synthetic:"):
        from .zeta import load_spectrum
        kwargs["dataset"] = load_spectrum(args.spectrum)
    elif args.spectrum:
        kwargs["n_classes"] = int(args.spectrum.split(":", 1)[1])
    results = run_suites(names, **kwargs)
    summary = {"suites": results,
               "all_passed": all(r["passed"] for r in results)}
    _json_dump(summary, sys.stdout)
    return EXIT_OK if summary["all_passed"] else EXIT_NUMERICAL


def _resolve_structure(group):
    from .parabolic import build_structure
    return build_structure(group)


def cmd_orbital(args) -> int:
    import numpy as np

    from .orbital import (CharacterOnTorus, NumberOperatorCharacter,
                          OrbitalRequest, bismut_orbital_integral,
                          closed_form_trace, evaluator_for_hform)
    from .parabolic import eta_hat_character, n_weighted_p_character
    group = _load_group(args.group)
    s = _resolve_structure(group)
    angles = [float(a) for a in args.angles.split(",")] if args.angles else []
    if len(angles) != s.l:
        raise ValueError(f"need exactly {s.l} holonomy angles")
    kappa = s.kappa_from_angles(angles)
    out = {}
    j = None
    if args.rep.startswith("eta"):
        j = int(args.rep[3:])
        char = CharacterOnTorus(eta_hat_character(s, j))
    elif args.rep == "lambda-p":
        char = CharacterOnTorus(n_weighted_p_character(s))
    else:
        raise ValueError(f"unknown representation selector {args.rep!r}")
    if args.path in ("quadrature", "both"):
        ev = evaluator_for_hform(s, args.length, kappa)
        res = bismut_orbital_integral(OrbitalRequest(
            group, ev, char, args.time, quad_order=args.quad))
        out["quadrature"] = {"value": res.value,
                             "convergence_estimate": res.convergence_estimate,
                             "path": res.path}
    if args.path in ("closed-form", "both") and j is not None:
        val = closed_form_trace(s, args.length, kappa, j, args.time)
        out["closed_form"] = {"value": val, "path": "closed-form"}
    if args.path == "both" and j is not None:
        q = out["quadrature"]["value"]
        c = out["closed_form"]["value"]
        out["relative_difference"] = abs(q - c) / max(1e-300, abs(c))
    _json_dump(out, sys.stdout)
    return EXIT_OK


def _sigma_grid(args):
    import numpy as np
    if args.sigma is not None:
        return [args.sigma]
    if args.sigma_start is None or args.sigma_stop is None:
        raise ValueError("need --sigma or --sigma-start/--sigma-stop")
    step = args.sigma_step
    if step <= 0:
        raise ValueError("sigma step must be positive")
    n = int(round((args.sigma_stop - args.sigma_start) / step)) + 1
    return [args.sigma_start + i * step for i in range(n)]


def _resolve_spectrum(args, structure):
    from .zeta import load_spectrum, synthetic_spectrum
    if args.spectrum.startswith("synthetic:"):
        n = int(args.spectrum.split(":", 1)[1])
        return synthetic_spectrum(structure, n, seed=args.seed)
    return load_spectrum(args.spectrum)


def cmd_zeta(args) -> int:
    import warnings

    from .zeta import ruelle_zeta, selberg_zeta, tail_bound
    group = _load_group(args.group)
    s = _resolve_structure(group)
    dataset = _resolve_spectrum(args, s)
    grid = _sigma_grid(args)
    which = args.which
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if args.quiet else "default")
        for sg in grid:
            if which == "ruelle":
                val = ruelle_zeta(dataset, sg)
            elif which.startswith("selberg:"):
                val = selberg_zeta(dataset, s, int(which.split(":")[1]), sg)
            else:
                raise ValueError(f"unknown zeta selector {which!r}")
            rows.append((sg, val.real, val.imag))
    if args.format == "csv":
        sys.stdout.write("sigma,re,im\n")
        for sg, re, im in rows:
            sys.stdout.write(f"{sg!r},{re!r},{im!r}\n")
    else:
        payload = {"which": which,
                   "rows": [{"sigma": sg, "re": re, "im": im}
                            for sg, re, im in rows]}
        try:
            payload["tail_bound_at_last_sigma"] = tail_bound(dataset, grid[-1])
        except Exception:
            pass
        _json_dump(payload, sys.stdout)
    return EXIT_OK


def cmd_laurent(args) -> int:
    from .zeta import laurent_constants
    r_j = [int(t) for t in args.rj.split(",")]
    if args.group:
        s = _resolve_structure(_load_group(args.group))
        data = laurent_constants(r_j, s)
    else:
        data = laurent_constants(r_j, Fraction(args.alpha2), l=args.l)
    _json_dump({"r_j": list(data.r_j), "l": data.l,
                "alpha_norm2": _frac(data.alpha_norm2),
                "c_rho": _frac(data.c_rho), "r_rho": data.r_rho,
                "chi_prime": data.chi_prime}, sys.stdout)
    return EXIT_OK


def cmd_synth_spectrum(args) -> int:
    from .zeta import dataset_to_csv, dataset_to_json, synthetic_spectrum
    s = _resolve_structure(_load_group(args.group))
    ds = synthetic_spectrum(s, args.classes, seed=args.seed,
                            cutoff=args.cutoff, rate=args.rate,
                            group_name=args.group)
    text = dataset_to_csv(ds) if args.format == "csv" else None
    if args.out:
        with open(args.out, "w") as fh:
            if text is None:
                _json_dump(dataset_to_json(ds), fh)
            else:
                fh.write(text)
    else:
        if text is None:
            _json_dump(dataset_to_json(ds), sys.stdout)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lszeta",
        description="Lie-theoretic structure, orbital integrals and "
                    "geodesic-side zeta functions for rank-one-defect "
                    "locally symmetric spaces")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("describe", help="group dimensions, rank data, roots")
    d.add_argument("--group", required=True)
    d.set_defaults(fn=cmd_describe)

    st = sub.add_parser("structure", help="rank-one block structure tables")
    st.add_argument("--group", required=True)
    st.set_defaults(fn=cmd_structure)

    c = sub.add_parser("check", help="run identity-check suites")
    c.add_argument("--suite", default="all")
    c.add_argument("--spectrum", default=None,
                   help="path or synthetic:N for the factorization suite")
    c.add_argument("--sigma", type=float, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--perturb", action="store_true",
                   help="negative control: inject a structure-constant fault")
    c.set_defaults(fn=cmd_check)

    o = sub.add_parser("orbital", help="orbital integral for one class")
    o.add_argument("--group", required=True)
    o.add_argument("--length", type=float, required=True)
    o.add_argument("--angles", default="",
                   help="comma-separated holonomy angles (l of them)")
    o.add_argument("--rep", default="eta0",
                   help="etaJ (J = 0..2l) or lambda-p")
    o.add_argument("--time", type=float, default=1.0)
    o.add_argument("--quad", type=int, default=20)
    o.add_argument("--path", choices=["quadrature", "closed-form", "both"],
                   default="both")
    o.set_defaults(fn=cmd_orbital)

    z = sub.add_parser("zeta", help="zeta values over a sigma grid")
    z.add_argument("--group", required=True)
    z.add_argument("--spectrum", required=True,
                   help="file path or synthetic:N")
    z.add_argument("--which", default="ruelle",
                   help="ruelle or selberg:J")
    z.add_argument("--sigma", type=float, default=None)
    z.add_argument("--sigma-start", type=float, default=None)
    z.add_argument("--sigma-stop", type=float, default=None)
    z.add_argument("--sigma-step", type=float, default=0.1)
    z.add_argument("--seed", type=int, default=0)
    z.add_argument("--format", choices=["csv", "json"], default="csv")
    z.add_argument("--quiet", action="store_true",
                   help="suppress convergence-abscissa warnings")
    z.set_defaults(fn=cmd_zeta)

    la = sub.add_parser("laurent", help="Laurent constants from r_j data")
    la.add_argument("--rj", required=True, help="comma-separated integers")
    la.add_argument("--group", default=None)
    la.add_argument("--alpha2", default=None,
                    help="|alpha|^2 as a rational, when no group is given")
    la.add_argument("--l", type=int, default=None)
    la.set_defaults(fn=cmd_laurent)

    sp = sub.add_parser("synth-spectrum", help="generate a synthetic spectrum")
    sp.add_argument("--group", required=True)
    sp.add_argument("--classes", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cutoff", type=float, default=5.0)
    sp.add_argument("--rate", type=float, default=1.0)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_synth_spectrum)
    return p


def main(argv=None) -> int:
    _configure_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    from .errors import InputError, NumericalError
    try:
        return args.fn(args)
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":                           # pragma: no cover
    sys.exit(main())
