import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lszeta.errors import (DualityViolation, InputError, InsufficientSamples,
                           MissingCountingConstants)
from lszeta.liecore import build_group
from lszeta.parabolic import build_structure, halfdet_from_angles
from lszeta.zeta import (CountingConstants, GeodesicClass, SpectrumDataset,
                         dataset_from_csv, dataset_from_json, dataset_to_csv,
                         dataset_to_json, factorization_residual,
                         laurent_constants, rescale_dataset, ruelle_zeta,
                         selberg_zeta, synthetic_spectrum, tail_bound,
                         torsion_laurent_relation, xi_eta, xi_eta_tail_bound,
                         xi_rho)


def _single_class_dataset(length=1.2, angle=0.9, trace=1.0):
    cl = GeodesicClass("0", length, (angle,), Fraction(1), complex(trace), 1)
    return SpectrumDataset("so(3,1)", (cl,), 4.0,
                           CountingConstants(3.0, 1.0, 1.0))


def test_empty_dataset_values(structures):
    s = structures("so(3,1)")
    ds = SpectrumDataset("so(3,1)", tuple(), 4.0,
                         CountingConstants(3.0, 1.0, 1.0))
    assert xi_rho(ds, 2.5) == 0
    assert xi_eta(ds, s, 0, 2.5) == 0
    assert ruelle_zeta(ds, 2.5) == 1
    assert selberg_zeta(ds, s, 1, 2.5) == 1
    assert factorization_residual(ds, s, 2.5) == 0


def test_single_class_hand_evaluation(structures):
    s = structures("so(3,1)")
    ds = _single_class_dataset()
    sigma = 3.0
    half = halfdet_from_angles(1.2, [0.9], 1.0)
    # j = 1 trace of the holonomy on n*: 2 cos(angle)
    want = -2 * math.cos(0.9) * math.exp(-sigma * 1.2) / half
    got = xi_eta(ds, s, 1, sigma)
    assert abs(got - want) < 1e-15
    assert abs(xi_rho(ds, sigma) - math.exp(-sigma * 1.2)) < 1e-15


def test_xi_real_for_real_traces(structures):
    s = structures("sl3")
    ds = synthetic_spectrum(s, 30, seed=3)
    val = xi_eta(ds, s, 1, 4.0)
    assert abs(val.imag) < 1e-14
    assert abs(xi_rho(ds, 4.0).imag) < 1e-14


def test_ruelle_trivial_off_rank_one():
    ds = _single_class_dataset()
    assert ruelle_zeta(ds, 2.0, delta=3) == 1.0 + 0.0j
    assert ruelle_zeta(ds, 2.0, delta=0) == 1.0 + 0.0j


@pytest.mark.parametrize("name", ["so(3,1)", "sl3"])
def test_factorization_residual_grid(structures, name):
    s = structures(name)
    ds = synthetic_spectrum(s, 50, seed=11)
    sigma0 = ds.counting.rate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for sigma in np.linspace(sigma0 + 1, sigma0 + 5, 9):
            assert factorization_residual(ds, s, float(sigma)) <= 1e-12
        # complex argument too
        assert factorization_residual(ds, s, sigma0 + 2 + 0.7j) <= 1e-12


def test_factorization_single_class(structures):
    s = structures("so(3,1)")
    ds = _single_class_dataset()
    assert factorization_residual(ds, s, 5.0) <= 1e-14


def test_selberg_duality_under_angle_negation(structures):
    s = structures("so(5,3)")
    ds = synthetic_spectrum(s, 20, seed=9)
    flipped = SpectrumDataset(
        ds.group,
        tuple(GeodesicClass(c.ident, c.length,
                            tuple(-a for a in c.holonomy_angles), c.index,
                            c.trace_rho, c.iterate) for c in ds.classes),
        ds.cutoff_length, ds.counting, ds.negatively_curved)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for j in range(2 * s.l + 1):
            z1 = selberg_zeta(ds, s, j, 4.5)
            z2 = selberg_zeta(flipped, s, 2 * s.l - j, 4.5)
            assert abs(z1 - z2) <= 1e-12 * max(1.0, abs(z1))


def test_tail_bound_behavior(structures):
    s = structures("so(3,1)")
    ds = synthetic_spectrum(s, 40, seed=2, cutoff=5.0)
    c = ds.counting.rate
    vals = [tail_bound(ds, c + d) for d in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(v1 > v2 for v1, v2 in zip(vals, vals[1:]))
    assert vals[-1] < 1e-10
    # below the abscissa: infinity sentinel
    assert tail_bound(ds, c) == math.inf
    assert tail_bound(ds, c - 1.0) == math.inf
    # doubling the cutoff shrinks the bound at least geometrically
    ds2 = synthetic_spectrum(s, 40, seed=2, cutoff=10.0)
    sg = c + 1.5
    assert tail_bound(ds2, sg) <= tail_bound(ds, sg) * math.exp(
        -(sg - c) * 4.9)
    assert xi_eta_tail_bound(ds, s, 1, sg) < math.inf


def test_tail_bound_requires_counting(structures):
    cl = GeodesicClass("0", 1.0, (0.5,), Fraction(1), 1.0, 1)
    ds = SpectrumDataset("so(3,1)", (cl,), 2.0, None)
    with pytest.raises(MissingCountingConstants):
        tail_bound(ds, 3.0)


def test_abscissa_warning(structures):
    ds = _single_class_dataset()
    with pytest.warns(UserWarning):
        xi_rho(ds, 0.5)


# ---------------------------------------------------------------------------
# dataset validation and formats


def test_dataset_validation():
    good = GeodesicClass("0", 1.0, (0.5,), Fraction(1, 2), 1.0, 2)
    SpectrumDataset("g", (good,), 2.0)       # index = 1/iterate is fine
    with pytest.raises(InputError):
        GeodesicClass("0", -1.0, (0.5,), Fraction(1), 1.0, 1)
    with pytest.raises(InputError):
        SpectrumDataset("g", (GeodesicClass("0", 3.0, (0.5,), Fraction(1),
                                            1.0, 1),), 2.0)
    with pytest.raises(InputError):
        SpectrumDataset("g", (GeodesicClass("0", 1.0, (0.5,), Fraction(2),
                                            1.0, 1),), 2.0)
    # non-negatively-curved datasets may carry arbitrary rational indices
    SpectrumDataset("g", (GeodesicClass("0", 1.0, (0.5,), Fraction(2),
                                        1.0, 1),), 2.0,
                    negatively_curved=False)


def test_dataset_sorting():
    cls = [GeodesicClass(str(i), ln, (0.1,), Fraction(1), 1.0, 1)
           for i, ln in enumerate([2.0, 1.0, 1.5])]
    ds = SpectrumDataset("g", tuple(cls), 3.0)
    assert [c.length for c in ds.classes] == [1.0, 1.5, 2.0]


def test_roundtrips(structures):
    s = structures("sl3")
    ds = synthetic_spectrum(s, 12, seed=4, unitary_traces=True, rank=3)
    assert dataset_from_csv(dataset_to_csv(ds)) == ds
    assert dataset_from_json(dataset_to_json(ds)) == ds


def test_malformed_inputs():
    with pytest.raises(InputError):
        dataset_from_csv("id,length\n0,1.0\n")
    with pytest.raises(InputError):
        dataset_from_json({"classes": []})


# ---------------------------------------------------------------------------
# rescaling covariance


@pytest.mark.parametrize("name", ["so(3,1)", "sl3"])
@pytest.mark.parametrize("scale", [Fraction(1, 4), Fraction(9, 4), Fraction(1)])
def test_rescaling_covariance(structures, name, scale):
    s1 = structures(name)
    s2 = build_structure(build_group(name, b_scale=1 / scale))
    assert s2.alpha_norm2 == scale * s1.alpha_norm2
    ds = synthetic_spectrum(s1, 25, seed=8)
    dss = rescale_dataset(ds, float(scale))
    root = math.sqrt(float(scale))
    sg = ds.counting.rate + 2.5
    assert abs(ruelle_zeta(ds, sg) - ruelle_zeta(dss, root * sg)) <= 1e-12
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for j in range(2 * s1.l + 1):
            z1 = selberg_zeta(ds, s1, j, sg + (j - s1.l) * s1.alpha_norm)
            z2 = selberg_zeta(dss, s2, j, root * sg + (j - s2.l) * s2.alpha_norm)
            assert abs(z1 - z2) <= 1e-12


def test_laurent_rescaling_relation():
    # scaling |alpha|^2 by s multiplies c_rho by s^{sum (-1)^{j+1} r_j}
    r = [2, 1, 4, 1, 2]
    base = laurent_constants(r, Fraction(1), l=2)
    scaled = laurent_constants(r, Fraction(9, 4), l=2)
    power = sum((-1) ** (j + 1) * r[j] for j in range(2))
    assert scaled.c_rho == base.c_rho * Fraction(9, 4) ** power


# ---------------------------------------------------------------------------
# Laurent constants


def test_laurent_acyclic():
    data = laurent_constants([0, 0, 0], Fraction(3, 2), l=1)
    assert data.c_rho == 1 and data.r_rho == 0 and data.chi_prime == 0


def test_laurent_l1_example():
    data = laurent_constants([1, 0, 1], Fraction(1), l=1)
    assert data.c_rho == Fraction(-1, 4)
    assert data.r_rho == -2


def test_laurent_duality_violation():
    with pytest.raises(DualityViolation):
        laurent_constants([1, 0, 2], Fraction(1), l=1)
    with pytest.raises(DualityViolation):
        laurent_constants([1, 0], Fraction(1), l=1)


@given(st.integers(1, 3),
       st.lists(st.integers(0, 5), min_size=4, max_size=4))
@settings(max_examples=20, deadline=None)
def test_laurent_integer_consistency(l, half):
    # palindromic input: r_j = r_{2l-j}
    r = half[:l] + [half[l if l < len(half) else 0]] + list(reversed(half[:l]))
    data = laurent_constants(r, Fraction(1), l=l)
    lhs = data.r_rho
    rhs = 2 * sum((-1) ** j * r[j] for j in range(l)) + 2 * data.chi_prime
    assert lhs == rhs
    assert data.c_rho != 0


# ---------------------------------------------------------------------------
# torsion Laurent relation


def _synthetic_samples(laurent, torsion_sq=4.0, n=5):
    out = []
    for sg in np.linspace(0.002, 0.02, n):
        torsion = torsion_sq * (sg * sg) ** laurent.chi_prime * (1 + 0.03 * sg ** 2)
        ruelle = float(laurent.c_rho) * torsion_sq * sg ** laurent.r_rho \
            * (1 + 0.05 * sg)
        out.append((float(sg), ruelle, torsion))
    return out


def test_torsion_fit_recovers_exponent_and_constant():
    laurent = laurent_constants([2, 1, 3, 1, 2], Fraction(1), l=2)
    fit = torsion_laurent_relation(_synthetic_samples(laurent), laurent)
    assert fit.exponent == laurent.r_rho - 2 * laurent.chi_prime
    assert fit.coefficient_residual <= 1e-3


def test_torsion_fit_acyclic_limit():
    laurent = laurent_constants([0, 0, 0], Fraction(1), l=1)
    samples = [(sg, 4.0 * (1 + 0.01 * sg), 4.0 * (1 + 0.02 * sg * sg))
               for sg in (0.001, 0.002, 0.005, 0.01)]
    fit = torsion_laurent_relation(samples, laurent)
    assert fit.exponent == 0
    assert abs(fit.coefficient - 1.0) <= 1e-4


def test_torsion_fit_requires_samples():
    laurent = laurent_constants([0, 0, 0], Fraction(1), l=1)
    with pytest.raises(InsufficientSamples):
        torsion_laurent_relation([(0.1, 1.0, 1.0)], laurent)
