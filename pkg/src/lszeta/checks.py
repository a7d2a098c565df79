"""Self-check suites driven by the command line interface.

Each suite returns a list of (name, passed, detail) triples; the CLI turns
them into a machine-readable summary and exit status.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def _result(name, ok, detail=""):
    return {"name": name, "passed": bool(ok), "detail": str(detail)}


def suite_bracket_closure(seed: int = 0, perturb: bool = False):
    from .liecore import build_group
    results = []
    rng = np.random.default_rng(seed)
    for name in ["sl3", "so(3,1)", "so(5,3)"]:
        g = build_group(name)
        if perturb and name == "sl3":
            # negative control: damage one structure constant
            for a in range(g.dim):
                if g.struct[a][(a + 1) % g.dim]:
                    c, v = g.struct[a][(a + 1) % g.dim][0]
                    g.struct[a][(a + 1) % g.dim][0] = (c, v + Fraction(1, 7))
                    break
        worst = Fraction(0)
        for _ in range(40):
            x = [Fraction(int(v)) for v in rng.integers(-3, 4, size=g.dim)]
            y = [Fraction(int(v)) for v in rng.integers(-3, 4, size=g.dim)]
            z = [Fraction(int(v)) for v in rng.integers(-3, 4, size=g.dim)]
            jac = [a + b + c for a, b, c in zip(
                g.bracket_exact(x, g.bracket_exact(y, z)),
                g.bracket_exact(y, g.bracket_exact(z, x)),
                g.bracket_exact(z, g.bracket_exact(x, y)))]
            worst = max(worst, max(abs(t) for t in jac))
            inv = g.b_form_exact(g.bracket_exact(z, x), y) + \
                g.b_form_exact(x, g.bracket_exact(z, y))
            worst = max(worst, abs(inv))
        results.append(_result(f"bracket-closure/{name}", worst == 0,
                               f"worst exact residual {worst}"))
    return results


def suite_characters():
    from .liecore import build_group
    from .parabolic import (build_structure, eta_hat_character,
                            lift_exterior_powers, n_weighted_p_character)
    from .rootsweyl import VirtualCharacter
    results = []
    for name in ["sl3", "so(3,1)", "so(5,3)"]:
        s = build_structure(build_group(name))
        lifts = lift_exterior_powers(s)
        inv = all(l.char.is_invariant(s.k_roots.roots) for l in lifts)
        lhs = n_weighted_p_character(s)
        rhs = VirtualCharacter(rank=s.rank)
        for j in range(2 * s.l + 1):
            rhs = rhs + eta_hat_character(s, j).scaled((-1) ** j)
        dual = all(eta_hat_character(s, j) == eta_hat_character(s, 2 * s.l - j)
                   for j in range(2 * s.l + 1))
        ok = inv and lhs == rhs and dual
        results.append(_result(f"characters/{name}", ok,
                               f"lift={inv} alternating={lhs == rhs} duality={dual}"))
    return results


def suite_kostant():
    from .rootsweyl import compact_so, compact_so_sum, kostant_check
    results = []
    for data, label, expect in [(compact_so(3), "so(3)", Fraction(1, 8)),
                                (compact_so(5), "so(5)", None),
                                (compact_so_sum([3, 3]), "so(3)+so(3)", None)]:
        lhs, rhs, res = kostant_check(data)
        ok = res <= 1e-12 and (expect is None or lhs == expect)
        results.append(_result(f"kostant/{label}", ok,
                               f"lhs={lhs} rhs={rhs}"))
    return results


def suite_halfdet(seed: int = 0, n: int = 25):
    from .liecore import build_group
    from .parabolic import build_structure, halfdet_identity
    rng = np.random.default_rng(seed)
    results = []
    for name in ["sl3", "so(3,1)", "so(5,3)", "so(7,1)"]:
        s = build_structure(build_group(name))
        worst = 0.0
        for _ in range(n):
            c = float(rng.uniform(0.2, 2.5)) * (1 if rng.random() < 0.5 else -1)
            kappa = rng.uniform(-math.pi, math.pi, size=s.rank)
            worst = max(worst, halfdet_identity(s, c, kappa)[2])
        results.append(_result(f"halfdet/{name}", worst <= 1e-12,
                               f"worst residual {worst:.3e}"))
    return results


def suite_orbital_crosscheck(seed: int = 0, n: int = 5):
    from .liecore import build_group
    from .orbital import (CharacterOnTorus, OrbitalRequest,
                          bismut_orbital_integral, closed_form_trace,
                          evaluator_for_hform)
    from .parabolic import build_structure, eta_hat_character
    rng = np.random.default_rng(seed)
    results = []
    for name in ["so(3,1)", "sl3"]:
        g = build_group(name)
        s = build_structure(g)
        worst = 0.0
        for _ in range(n):
            c = float(rng.uniform(0.5, 2.0))
            kappa = rng.uniform(0.3, math.pi - 0.3, size=s.rank)
            j = int(rng.integers(0, 2 * s.l + 1))
            t = float(rng.choice([0.25, 1.0, 4.0]))
            ev = evaluator_for_hform(s, c, kappa)
            quad = bismut_orbital_integral(OrbitalRequest(
                g, ev, CharacterOnTorus(eta_hat_character(s, j)), t))
            closed = closed_form_trace(s, c, kappa, j, t)
            worst = max(worst, abs(quad.value - closed) / max(1e-300, abs(closed)))
        results.append(_result(f"orbital-crosscheck/{name}", worst <= 1e-6,
                               f"worst relative {worst:.3e}"))
    return results


def suite_factorization(dataset=None, sigma: float = 3.0, seed: int = 0,
                        n_classes: int = 50):
    import warnings

    from .liecore import build_group
    from .parabolic import build_structure
    from .zeta import factorization_residual, synthetic_spectrum
    results = []
    for name in ["so(3,1)", "sl3"]:
        s = build_structure(build_group(name))
        ds = dataset if dataset is not None else \
            synthetic_spectrum(s, n_classes, seed=seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = factorization_residual(ds, s, sigma)
        results.append(_result(f"factorization/{name}", res <= 1e-12,
                               f"residual {res:.3e} at sigma={sigma}"))
    return results


def suite_scaling(seed: int = 0):
    import warnings

    from .liecore import build_group
    from .parabolic import build_structure
    from .zeta import rescale_dataset, ruelle_zeta, selberg_zeta, \
        synthetic_spectrum
    results = []
    for name in ["so(3,1)", "sl3"]:
        worst = 0.0
        for scale in [Fraction(1, 4), Fraction(9, 4)]:
            s1 = build_structure(build_group(name))
            s2 = build_structure(build_group(name, b_scale=1 / scale))
            ds = synthetic_spectrum(s1, 25, seed=seed)
            dss = rescale_dataset(ds, float(scale))
            sg = ds.counting.rate + 2.5
            root = math.sqrt(scale)
            worst = max(worst, abs(ruelle_zeta(ds, sg) -
                                   ruelle_zeta(dss, root * sg)))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                for j in range(2 * s1.l + 1):
                    z1 = selberg_zeta(ds, s1, j, sg + (j - s1.l) * s1.alpha_norm)
                    z2 = selberg_zeta(dss, s2, j,
                                      root * sg + (j - s2.l) * s2.alpha_norm)
                    worst = max(worst, abs(z1 - z2))
        results.append(_result(f"scaling/{name}", worst <= 1e-12,
                               f"worst deviation {worst:.3e}"))
    return results


SUITES = {
    "bracket-closure": suite_bracket_closure,
    "characters": suite_characters,
    "kostant": suite_kostant,
    "halfdet": suite_halfdet,
    "orbital-crosscheck": suite_orbital_crosscheck,
    "factorization": suite_factorization,
    "scaling": suite_scaling,
}


def run_suites(names, **kwargs):
    results = []
    for name in names:
        fn = SUITES[name]
        import inspect
        accepted = {k: v for k, v in kwargs.items()
                    if k in inspect.signature(fn).parameters}
        results.extend(fn(**accepted))
    return results
