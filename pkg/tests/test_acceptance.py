"""Acceptance suite: every geodesic-side and finite-dimensional identity the
library is contracted to reproduce, each with its stated tolerance.  One
pass/fail line is printed per criterion (visible with pytest -s)."""

import itertools
import math
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg

import lszeta.exactla as ex
from lszeta.liecore import build_group, heat_coefficient_traces
from lszeta.orbital import (CharacterOnTorus, NumberOperatorCharacter,
                            OrbitalRequest, abelian_orbital_integral,
                            bismut_orbital_integral, build_evaluator,
                            cartan_of_centralizer, closed_form_trace,
                            evaluator_for_hform, gaussian_time_integral,
                            gaussian_time_integral_quadrature)
from lszeta.parabolic import (build_structure, casimir_matrix_oracle,
                              casimir_shift, eta_hat_character,
                              fixed_space_dimension, halfdet_identity,
                              lift_exterior_powers, n_weighted_p_character,
                              number_supertrace)
from lszeta.rootsweyl import (VirtualCharacter, compact_so, compact_so_sum,
                              kostant_check)
from lszeta.zeta import (factorization_residual, laurent_constants,
                         rescale_dataset, ruelle_zeta, selberg_zeta,
                         synthetic_spectrum)

STRUCT_GROUPS = ["sl3", "so(3,1)", "so(5,3)", "so(7,1)"]
_cache = {}


def _structure(name):
    if name not in _cache:
        _cache[name] = build_structure(build_group(name))
    return _cache[name]


def _report(num, label, start, budget):
    elapsed = time.time() - start
    print(f"[PASS] criterion {num}: {label} ({elapsed:.2f}s, budget {budget}s)")


def test_criterion_01_structure_exactness():
    start = time.time()
    for name in STRUCT_GROUPS:
        s = build_structure(build_group(name))      # cold build on purpose
        g = s.group
        for f in s.n_basis:
            assert g.bracket_exact(s.b_raw, f) == [s.alpha_raw * c for c in f]
        for f1, f2 in itertools.product(s.n_basis, s.n_basis):
            assert all(c == 0 for c in g.bracket_exact(f1, f2))
            assert g.b_form_exact(f1, f2) == 0
        assert g.m_dim == 1 + len(s.pm_basis) + 2 * s.l
        assert len(s.n_basis) == len(s.nbar_basis) == 2 * s.l
        assert s.alpha_norm2 == s.alpha_raw ** 2 / s.b_norm2
        _cache[name] = s
    _report(1, "rank-one structure invariants exact in rational arithmetic",
            start, 5)
    assert time.time() - start < 5


def test_criterion_02_half_determinant_identity():
    start = time.time()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for name in STRUCT_GROUPS:
        s = _structure(name)
        for _ in range(100):
            c = float(rng.uniform(0.15, 2.5)) * (1 if rng.random() < 0.5 else -1)
            kappa = rng.uniform(-math.pi, math.pi, size=s.rank)
            worst = max(worst, halfdet_identity(s, c, kappa)[2])
    assert worst <= 1e-12, worst
    _report(2, f"half-power determinant identity, worst residual {worst:.2e}",
            start, 5)
    assert time.time() - start < 5


def _subset_exterior(weights, j, rank):
    out = {}
    for combo in itertools.combinations(range(len(weights)), j):
        key = tuple(sum(weights[i][c] for i in combo) for c in range(rank))
        out[key] = out.get(key, 0) + 1
    return VirtualCharacter(out, rank=rank)


def test_criterion_03_representation_ring_identities():
    start = time.time()
    for name in ["sl3", "so(3,1)", "so(5,3)"]:
        s = _structure(name)
        rank = s.rank
        lifts = lift_exterior_powers(s)
        # family lift identities: the lift of n equals the standard-minus-
        # trivial combination on the torus
        if name == "sl3":
            sigma3 = VirtualCharacter.from_weight_list([(1,), (-1,), (0,)])
            assert lifts[1].char == sigma3 - VirtualCharacter.trivial(1)
        else:
            p, q = (int(t) for t in name[3:-1].split(","))
            weights = []
            for i in range((p - 1) // 2):
                for sgn in (1, -1):
                    w = [0] * rank
                    w[i] = sgn
                    weights.append(tuple(w))
            for jq in range((q - 1) // 2):
                for sgn in (1, -1):
                    w = [0] * rank
                    w[(p - 1) // 2 + jq] = sgn
                    weights.append(tuple(w))
            assert lifts[1].char == VirtualCharacter.from_weight_list(
                weights, rank=rank)
        # unique-lift condition for every companion: Weyl invariance
        for j in range(2 * s.l + 1):
            assert lifts[j].char.is_invariant(s.k_roots.roots)
            assert eta_hat_character(s, j).is_invariant(s.k_roots.roots)
        # companion construction against an independent subset-enumeration
        pm_weights = [tuple(-c for c in w)
                      for w, m in s.pm_char.weights.items() for _ in range(m)]
        n_weights = [tuple(-c for c in w)
                     for w, m in s.n_char.weights.items() for _ in range(m)]
        for j in range(2 * s.l + 1):
            alt = VirtualCharacter(rank=rank)
            for i in range(len(pm_weights) + 1):
                term = _subset_exterior(pm_weights, i, rank) * \
                    _subset_exterior(n_weights, j, rank)
                alt = alt + term.scaled((-1) ** i)
            assert alt == eta_hat_character(s, j)
        # double alternating sum identity and weighted exterior identity
        lhs = n_weighted_p_character(s)
        assert lhs == (s.pm_char + s.n_char).dual().alternating_sum()
        rhs = VirtualCharacter(rank=rank)
        for j in range(2 * s.l + 1):
            rhs = rhs + eta_hat_character(s, j).scaled((-1) ** j)
        assert lhs == rhs
        # duality of the companions
        for j in range(2 * s.l + 1):
            assert eta_hat_character(s, j) == eta_hat_character(s, 2 * s.l - j)
    _report(3, "representation-ring lift identities exact", start, 10)
    assert time.time() - start < 10


def test_criterion_04_kostant_strange_formula():
    start = time.time()
    for data, expect in [(compact_so(3), Fraction(1, 8)),
                         (compact_so(5), None),
                         (compact_so_sum([3, 3]), None)]:
        lhs, rhs, res = kostant_check(data)
        assert res <= 1e-12
        assert lhs == rhs
        if expect is not None:
            assert lhs == expect == rhs
    _report(4, "Kostant strange formula exact (so(3) value 1/8)", start, 5)
    assert time.time() - start < 5


def test_criterion_05_casimir_shifts():
    start = time.time()
    tables = {"so(3,1)": [Fraction(-1), Fraction(0), Fraction(-1)],
              "sl3": [Fraction(-3, 2), Fraction(0), Fraction(-3, 2)]}
    for name in STRUCT_GROUPS:
        s = _structure(name)
        sigmas = []
        for j in range(2 * s.l + 1):
            casimir, sigma = casimir_shift(s, j)
            sigmas.append(sigma)
            assert sigma == -Fraction((j - s.l) ** 2) * s.alpha_norm2
            oracle, dev = casimir_matrix_oracle(s, j)
            assert dev <= 1e-12
            assert abs(float(casimir) - oracle) <= 1e-12 * max(1.0, abs(oracle))
        if name in tables:
            assert sigmas == tables[name]
    _report(5, "Casimir shift tables and two-path agreement <= 1e-12",
            start, 5)
    assert time.time() - start < 5


def test_criterion_06_orbital_integral_crosscheck():
    start = time.time()
    rng = np.random.default_rng(606)
    worst = 0.0
    for name in ["so(3,1)", "sl3"]:
        s = _structure(name)
        g = s.group
        for _ in range(25):
            c = float(rng.uniform(0.4, 2.2))
            kappa = rng.uniform(0.25, math.pi - 0.25, size=s.rank)
            j = int(rng.integers(0, 2 * s.l + 1))
            for t in (0.25, 1.0, 4.0):
                ev = evaluator_for_hform(s, c, kappa)
                quad = bismut_orbital_integral(OrbitalRequest(
                    g, ev, CharacterOnTorus(eta_hat_character(s, j)), t))
                closed = closed_form_trace(s, c, kappa, j, t)
                worst = max(worst,
                            abs(quad.value - closed) / max(1e-300, abs(closed)))
    assert worst <= 1e-6, worst

    # the abelian heat trace through the same machinery
    gr = build_group("R")
    worst_ab = 0.0
    for ell, t in [(0.7, 0.25), (1.3, 1.0), (2.1, 4.0)]:
        ev = build_evaluator(gr, np.array([ell]), np.eye(1), np.zeros((0, 1)),
                             kappa=np.zeros(0), u_to_torus=np.zeros((0, 0)))
        res = bismut_orbital_integral(OrbitalRequest(
            gr, ev, CharacterOnTorus(VirtualCharacter.trivial(0)), t))
        want = abelian_orbital_integral(ell, t)
        worst_ab = max(worst_ab, abs(res.value - want) / want)
    assert worst_ab <= 1e-10
    _report(6, f"orbital quadrature vs closed form, worst {worst:.2e}; "
               f"abelian {worst_ab:.2e}", start, 120)
    assert time.time() - start < 120


def test_criterion_07_vanishing_theorems():
    start = time.time()
    worst_alg = 0.0
    worst_quad = 0.0
    for name in ["sl3", "so(5,3)"]:
        s = _structure(name)
        g = s.group
        v = ex.to_float(s.pm_basis[0])
        a = 0.9 * s.a1_float() + 0.6 * v / math.sqrt(g.inner(v, v))
        variants = [(a, np.eye(g.size), np.eye(g.dim))]
        if name == "so(5,3)":
            for t_idx in g.torus_idx:
                tt = np.zeros(g.dim)
                tt[t_idx] = 1.0
                if np.abs(g.bracket(tt, a)).max() < 1e-12:
                    kc = np.zeros(g.dim)
                    kc[t_idx] = 1.1
                    variants.append((a, g.exp_of(kc),
                                     scipy.linalg.expm(g.ad(kc))))
                    break
        rng = np.random.default_rng(7)
        for aa, k, ad_k in variants:
            cart = cartan_of_centralizer(g, aa, ad_k)
            for _ in range(5):
                y = cart.T @ rng.normal(size=len(cart)) if len(cart) \
                    else np.zeros(g.dim)
                assert fixed_space_dimension(g, k, y) >= 2
                worst_alg = max(worst_alg, abs(number_supertrace(g, k, y)))
            ev = build_evaluator(g, aa, ad_k, cart)
            res = bismut_orbital_integral(OrbitalRequest(
                g, ev, NumberOperatorCharacter(), 1.0, quad_order=8))
            worst_quad = max(worst_quad, abs(res.value))
    assert worst_alg <= 1e-12, worst_alg
    assert worst_quad <= 1e-8, worst_quad
    _report(7, f"vanishing: algebraic {worst_alg:.2e}, quadrature "
               f"{worst_quad:.2e}", start, 60)
    assert time.time() - start < 60


def test_criterion_08_gaussian_time_integral():
    start = time.time()
    rng = np.random.default_rng(88)
    worst = 0.0
    for _ in range(20):
        b1 = float(rng.uniform(0.2, 5.0))
        b2 = float(rng.uniform(0.0, 5.0))
        closed = gaussian_time_integral(b1, b2)
        quad = gaussian_time_integral_quadrature(b1, b2)
        worst = max(worst, abs(closed - quad) / max(1.0, abs(closed)))
    assert worst <= 1e-8
    assert gaussian_time_integral(1, 1) == pytest.approx(
        math.sqrt(math.pi) * math.exp(-2), rel=1e-14)
    _report(8, f"time-substitution integral, worst residual {worst:.2e}",
            start, 5)
    assert time.time() - start < 5


def test_criterion_09_ruelle_factorization():
    start = time.time()
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in ["so(3,1)", "sl3"]:
            s = _structure(name)
            ds = synthetic_spectrum(s, 50, seed=909)
            sigma0 = ds.counting.rate
            for sigma in np.linspace(sigma0 + 1, sigma0 + 5, 11):
                worst = max(worst, factorization_residual(ds, s, float(sigma)))
    assert worst <= 1e-12, worst
    _report(9, f"Ruelle-from-Selberg factorization, worst residual "
               f"{worst:.2e}", start, 10)
    assert time.time() - start < 10


def test_criterion_10_laurent_constants():
    start = time.time()
    acyclic = laurent_constants([0, 0, 0], Fraction(3, 2), l=1)
    assert acyclic.c_rho == 1 and acyclic.r_rho == 0
    sample = laurent_constants([1, 0, 1], Fraction(1), l=1)
    assert sample.c_rho == Fraction(-1, 4) and sample.r_rho == -2
    rng = np.random.default_rng(1010)
    for _ in range(20):
        l = int(rng.integers(1, 4))
        half = [int(v) for v in rng.integers(0, 6, size=l + 1)]
        r = half[:l] + [half[l]] + list(reversed(half[:l]))
        data = laurent_constants(r, Fraction(3, 2), l=l)
        assert data.r_rho == 2 * sum((-1) ** j * r[j] for j in range(l)) \
            + 2 * data.chi_prime
        assert data.c_rho != 0
    _report(10, "Laurent constants exact (acyclic case (1, 0))", start, 1)
    assert time.time() - start < 1


def test_criterion_11_rescaling_covariance():
    start = time.time()
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in ["so(3,1)", "sl3"]:
            s1 = _structure(name)
            for scale in [Fraction(1, 4), Fraction(9, 4), Fraction(16, 9)]:
                s2 = build_structure(build_group(name, b_scale=1 / scale))
                assert s2.alpha_norm2 == scale * s1.alpha_norm2
                ds = synthetic_spectrum(s1, 25, seed=1111)
                dss = rescale_dataset(ds, float(scale))
                root = math.sqrt(float(scale))
                sg = ds.counting.rate + 2.5
                worst = max(worst, abs(ruelle_zeta(ds, sg)
                                       - ruelle_zeta(dss, root * sg)))
                for j in range(2 * s1.l + 1):
                    z1 = selberg_zeta(ds, s1, j, sg + (j - s1.l) * s1.alpha_norm)
                    z2 = selberg_zeta(dss, s2, j,
                                      root * sg + (j - s2.l) * s2.alpha_norm)
                    worst = max(worst, abs(z1 - z2))
    assert worst <= 1e-12, worst
    _report(11, f"invariant-form rescaling covariance, worst {worst:.2e}",
            start, 5)
    assert time.time() - start < 5
