import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lszeta.exactla as ex
from lszeta.errors import NotInAlgebra, UnsupportedFamily
from lszeta.liecore import (SemisimpleElement, adjoint_action, b_space,
                            bracket, build_group, centralizer_algebra,
                            delta_invariant, has_noncompact_center,
                            identity_element)


@pytest.mark.parametrize("name,dims", [
    ("sl2", (3, 2, 1)),
    ("sl3", (8, 5, 3)),
    ("so(3,1)", (6, 3, 3)),
    ("so(5,3)", (28, 15, 13)),
    ("R", (1, 1, 0)),
])
def test_dimensions(groups, name, dims):
    g = groups(name)
    assert (g.dim, g.m_dim, g.n_dim) == dims


def test_unsupported_family():
    with pytest.raises(UnsupportedFamily):
        build_group("sl4")
    with pytest.raises(UnsupportedFamily):
        build_group({"family": "so", "p": 0, "q": 3})
    with pytest.raises(UnsupportedFamily):
        build_group("sp(4)")


@pytest.mark.parametrize("name,want", [
    ("sl2", 0), ("sl3", 1), ("so(3,1)", 1), ("so(5,3)", 1), ("so(7,1)", 1),
    ("R", 1), ("so(4,2)", 0),
])
def test_delta_invariant(groups, name, want):
    assert delta_invariant(groups(name)) == want


def test_delta_so22_definition(groups):
    # rk_C so(4) = rk_C (so(2)+so(2)) = 2, so the fundamental rank vanishes;
    # the exact kernel computation must agree with the definition
    assert delta_invariant(groups("so(2,2)")) == 0


def test_delta_additive_on_products(groups):
    g12 = build_group("product:sl3*so(3,1)")
    assert delta_invariant(g12) == 2
    g10 = build_group("product:sl3*so(2,2)")
    assert delta_invariant(g10) == 1
    assert delta_invariant(build_group("product:R*sl2")) == 1


def test_noncompact_center_detection(groups):
    assert has_noncompact_center(groups("R"))
    assert not has_noncompact_center(groups("sl3"))
    assert has_noncompact_center(build_group("product:R*so(3,1)"))


@pytest.mark.parametrize("name", ["sl3", "so(3,1)", "so(5,3)"])
def test_theta_and_cartan_split(groups, name):
    g = groups(name)
    assert all(s in (-1, 1) for s in g.theta_sign)
    assert sum(1 for s in g.theta_sign if s == -1) == g.m_dim
    # [k,k] in k, [p,p] in k, [k,p] in p, exactly
    for a in g.p_idx:
        for b in g.p_idx:
            for c, v in g.struct[a][b]:
                assert g.theta_sign[c] == 1
        for b in g.k_idx:
            for c, v in g.struct[a][b]:
                assert g.theta_sign[c] == -1
    for a in g.k_idx:
        for b in g.k_idx:
            for c, v in g.struct[a][b]:
                assert g.theta_sign[c] == 1


@pytest.mark.parametrize("name", ["sl2", "sl3", "so(3,1)", "so(5,3)", "so(7,1)"])
def test_b_invariance_200_random_pairs(groups, name):
    g = groups(name)
    rng = np.random.default_rng(7)
    for _ in range(200):
        z, x, y = (
            [Fraction(int(v)) for v in rng.integers(-3, 4, size=g.dim)]
            for _ in range(3))
        lhs = g.b_form_exact(g.bracket_exact(z, x), y)
        rhs = g.b_form_exact(x, g.bracket_exact(z, y))
        assert lhs + rhs == 0


@pytest.mark.parametrize("name", ["sl3", "so(3,1)"])
def test_b_theta_invariance_and_signature(groups, name):
    g = groups(name)
    # B(theta x, theta y) = B(x, y) on the basis
    for a in range(g.dim):
        for b in range(g.dim):
            assert g.b_gram[a][b] * g.theta_sign[a] * g.theta_sign[b] == \
                g.b_gram[a][b]
    # positive on p, negative on k, and <,> positive definite
    vals = np.linalg.eigvalsh(ex.to_float(g.inner_gram()))
    assert vals.min() > 0
    for i in g.p_idx:
        assert g.b_gram[i][i] > 0
    for i in g.k_idx:
        assert g.b_gram[i][i] < 0


def test_jacobi_exact(groups):
    g = groups("so(5,3)")
    rng = np.random.default_rng(11)
    for _ in range(25):
        x, y, z = ([Fraction(int(v)) for v in rng.integers(-2, 3, size=g.dim)]
                   for _ in range(3))
        total = [a + b + c for a, b, c in zip(
            g.bracket_exact(x, g.bracket_exact(y, z)),
            g.bracket_exact(y, g.bracket_exact(z, x)),
            g.bracket_exact(z, g.bracket_exact(x, y)))]
        assert all(t == 0 for t in total)


@given(st.lists(st.integers(-4, 4), min_size=8, max_size=8))
@settings(max_examples=25, deadline=None)
def test_bracket_antisymmetry_sl3(coords):
    g = build_group("sl3")
    x = [Fraction(c) for c in coords]
    assert all(v == 0 for v in g.bracket_exact(x, x))


def test_bracket_scalar_action_on_n(groups, structures):
    # the block generator acts on the nilpotent piece by its pairing scalar
    s = structures("sl3")
    for f in s.n_basis:
        assert s.group.bracket_exact(s.b_raw, f) == [3 * c for c in f]


def test_adjoint_identity_and_scaling(groups, structures):
    g = groups("so(3,1)")
    rng = np.random.default_rng(3)
    x = rng.normal(size=g.dim)
    x[np.array(g.k_idx)] = 0
    assert np.allclose(adjoint_action(g, np.eye(g.size), x), x)

    s = structures("so(3,1)")
    a1 = s.a1_float()
    e_a1 = g.exp_of(a1)
    for f in s.n_basis:
        fx = ex.to_float(f)
        out = adjoint_action(g, e_a1, fx)
        # eigenvalue exp(<alpha, a1>) = exp(|alpha|)
        assert np.allclose(out, math.exp(s.alpha_norm) * fx, atol=1e-10)


def test_adjoint_leaves_algebra_error(groups):
    g = groups("so(3,1)")
    bad = np.diag([1.0, 1.0, 2.0, 1.0])
    x = np.zeros(g.dim)
    x[g.p_idx[2]] = 1.0      # third row of the p-block meets the scaled axis
    with pytest.raises(NotInAlgebra):
        adjoint_action(g, bad, x)


def test_semisimple_validator(groups, structures):
    s = structures("so(3,1)")
    g = s.group
    el = s.element(1.2, np.array([0.4]))
    assert abs(el.length - 1.2) < 1e-12
    # a outside the fixed space of Ad(k) is rejected
    rng = np.random.default_rng(5)
    a = rng.normal(size=g.dim)
    a[np.array(g.k_idx)] = 0.0
    kc = np.zeros(g.dim)
    kc[g.torus_idx[0]] = 1.0
    k = g.exp_of(kc)
    with pytest.raises(NotInAlgebra):
        SemisimpleElement(g, a, k)


def test_centralizer_identity_is_everything(groups):
    g = groups("sl3")
    z, p, k = centralizer_algebra(identity_element(g))
    assert len(z) == g.dim


def test_centralizer_exact_vs_numeric(groups, structures):
    # gamma = exp(a1) in so(3,1): centralizer is b + m, dimension 2
    s = structures("so(3,1)")
    g = s.group
    a_exact = [c for c in s.b_raw]
    el = SemisimpleElement(g, ex.to_float(s.b_raw), np.eye(g.size),
                           a_exact=a_exact)
    z, p, k = centralizer_algebra(el)
    assert len(z) == 2 and len(p) == 1 and len(k) == 1
    # numeric route agrees
    el2 = SemisimpleElement(g, ex.to_float(s.b_raw), np.eye(g.size))
    z2, p2, k2 = centralizer_algebra(el2)
    assert len(z2) == 2 and len(p2) == 1 and len(k2) == 1


@pytest.mark.parametrize("name,rank_c", [("so(3,1)", 2), ("sl3", 2)])
def test_centralizer_regular_class(structures, name, rank_c):
    # for a regular class in exp(b)T the centralizer is the full Cartan
    s = structures(name)
    el = s.element(0.9, np.full(s.rank, 1.1))
    z, p, k = centralizer_algebra(el)
    assert len(z) == rank_c
    # and a lies in the p-part of its own centralizer
    gram = ex.to_float(s.group.inner_gram())
    a = el.a
    proj = p.T @ np.linalg.solve(p @ gram @ p.T, p @ gram @ a)
    assert np.allclose(proj, a, atol=1e-9)


def test_b_space_matches_delta(groups):
    for name in ["sl3", "so(3,1)", "so(5,3)"]:
        g = groups(name)
        assert len(b_space(g)) == delta_invariant(g) == 1


def test_bracket_dispatch_float_and_exact(groups):
    g = groups("sl3")
    x = [Fraction(1)] + [Fraction(0)] * (g.dim - 1)
    y = [Fraction(0), Fraction(2)] + [Fraction(0)] * (g.dim - 2)
    exact = bracket(g, x, y)
    floaty = bracket(g, ex.to_float(x), ex.to_float(y))
    assert np.allclose(ex.to_float(exact), floaty)
