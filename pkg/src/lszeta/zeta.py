"""Geodesic-side Selberg and Ruelle zeta functions over length-spectrum
datasets: truncated log-sums, the alternating-product factorization of the
Ruelle function into shifted Selberg functions, exponential tail bounds, and
the Laurent-expansion constants at zero.

Only identities that live on the geodesic side are computed here; spectral
determinants of actual Laplacians are inputs, never outputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import exactla as ex
from .errors import (DualityViolation, InputError, InsufficientSamples,
                     MissingCountingConstants)
from .parabolic import DeltaOneStructure, halfdet_from_angles, \
    lambda_traces_from_angles


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class CountingConstants:
    """N(L) <= prefactor * exp(rate * L) and |Tr rho| <= rank."""

    prefactor: float
    rate: float
    rank: float = 1.0


@dataclass(frozen=True)
class GeodesicClass:
    ident: str
    length: float
    holonomy_angles: tuple[float, ...]
    index: Fraction
    trace_rho: complex
    iterate: int = 1

    def __post_init__(self):
        if self.length <= 0:
            raise InputError(f"class {self.ident}: length must be positive")
        if self.iterate < 1:
            raise InputError(f"class {self.ident}: iterate must be >= 1")


@dataclass(frozen=True)
class SpectrumDataset:
    group: str
    classes: tuple[GeodesicClass, ...]
    cutoff_length: float
    counting: CountingConstants | None = None
    negatively_curved: bool = True

    def __post_init__(self):
        object.__setattr__(self, "classes",
                           tuple(sorted(self.classes,
                                        key=lambda c: (c.length, c.ident))))
        for c in self.classes:
            if c.length > self.cutoff_length * (1 + 1e-12):
                raise InputError(f"class {c.ident} exceeds the cutoff length")
            if self.negatively_curved and c.index != Fraction(1, c.iterate):
                raise InputError(
                    f"class {c.ident}: negatively curved datasets require "
                    "index = 1/iterate")

    @property
    def num_angles(self) -> int:
        return len(self.classes[0].holonomy_angles) if self.classes else 0


# ---------------------------------------------------------------------------
# log-sums and zeta functions


def _fsum_complex(terms) -> complex:
    terms = list(terms)
    return complex(math.fsum(t.real for t in terms),
                   math.fsum(t.imag for t in terms))


def _check_abscissa(dataset: SpectrumDataset, sigma) -> None:
    if dataset.counting is not None and \
            np.real(sigma) <= dataset.counting.rate:
        warnings.warn("Re(sigma) is at or below the declared convergence "
                      "abscissa; the truncated sum may be meaningless",
                      stacklevel=3)


def xi_rho(dataset: SpectrumDataset, sigma) -> complex:
    """Truncated log of the Ruelle function: sum of index * Tr rho *
    exp(-sigma * length)."""
    _check_abscissa(dataset, sigma)
    return _fsum_complex(
        float(c.index) * complex(c.trace_rho) * np.exp(-sigma * c.length)
        for c in dataset.classes)


def xi_eta(dataset: SpectrumDataset, structure: DeltaOneStructure, j: int,
           sigma) -> complex:
    """Truncated log of the j-th Selberg function: the weighted sum with the
    exterior-power holonomy trace over the half-power determinant."""
    if not 0 <= j <= 2 * structure.l:
        raise InputError(f"j must lie in 0..{2 * structure.l}")
    _check_abscissa(dataset, sigma)
    alpha = structure.alpha_norm
    terms = []
    for c in dataset.classes:
        coeff = lambda_traces_from_angles(c.holonomy_angles)
        trace_j = (-1) ** j * coeff[j]
        half = halfdet_from_angles(c.length, c.holonomy_angles, alpha)
        terms.append(-float(c.index) * complex(c.trace_rho) * trace_j
                     * np.exp(-sigma * c.length) / half)
    return _fsum_complex(terms)


def selberg_zeta(dataset: SpectrumDataset, structure: DeltaOneStructure,
                 j: int, sigma) -> complex:
    return complex(np.exp(xi_eta(dataset, structure, j, sigma)))


def ruelle_zeta(dataset: SpectrumDataset, sigma,
                structure: DeltaOneStructure | None = None,
                delta: int = 1) -> complex:
    """exp of the truncated Ruelle log-sum; identically 1 when the group has
    fundamental rank different from one (every orbifold Euler index
    vanishes there)."""
    if delta != 1:
        return 1.0 + 0.0j
    return complex(np.exp(xi_rho(dataset, sigma)))


def factorization_residual(dataset: SpectrumDataset,
                           structure: DeltaOneStructure, sigma) -> float:
    """|log R(sigma) - sum_j (-1)^{j-1} log Z_j(sigma + (j-l)|alpha|)|.

    This vanishes identically at any truncation because the alternating
    character sum reconstructs the half-power determinant class by class."""
    alpha = structure.alpha_norm
    lhs = xi_rho(dataset, sigma)
    rhs = _fsum_complex(
        (-1) ** (j + 1) * xi_eta(dataset, structure, j,
                                 sigma + (j - structure.l) * alpha)
        for j in range(2 * structure.l + 1))
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# tail bounds


def tail_bound(dataset: SpectrumDataset, sigma: float) -> float:
    """Exponential bound for the Ruelle log-sum beyond the cutoff, from the
    declared counting constants; +inf at or below the abscissa."""
    if dataset.counting is None:
        raise MissingCountingConstants(
            "the dataset does not declare counting constants")
    c = dataset.counting
    if sigma <= c.rate:
        return math.inf
    l0 = dataset.cutoff_length
    return c.rank * c.prefactor * (1.0 + sigma / (sigma - c.rate)) \
        * math.exp(-(sigma - c.rate) * l0)


def xi_eta_tail_bound(dataset: SpectrumDataset, structure: DeltaOneStructure,
                      j: int, sigma: float) -> float:
    """Tail bound for the j-th Selberg log-sum: the determinant lower bound
    at the cutoff supplies an extra exp(-l |alpha| L) decay."""
    if dataset.counting is None:
        raise MissingCountingConstants(
            "the dataset does not declare counting constants")
    ll = structure.l
    alpha = structure.alpha_norm
    l0 = dataset.cutoff_length
    denom = (1.0 - math.exp(-alpha * l0)) ** (2 * ll)
    effective = sigma + ll * alpha
    c = dataset.counting
    if effective <= c.rate:
        return math.inf
    binom = math.comb(2 * ll, j)
    return binom / denom * c.rank * c.prefactor \
        * (1.0 + effective / (effective - c.rate)) \
        * math.exp(-(effective - c.rate) * l0)


# ---------------------------------------------------------------------------
# Laurent constants


@dataclass(frozen=True)
class LaurentData:
    r_j: tuple[int, ...]
    alpha_norm2: Fraction
    l: int
    c_rho: Fraction
    r_rho: int
    chi_prime: int


def laurent_constants(r_j, structure_or_alpha2, l: int | None = None) -> LaurentData:
    """Leading Laurent data of the Ruelle function at zero from the graded
    kernel dimensions r_j (j = 0..2l, palindromic)."""
    if isinstance(structure_or_alpha2, DeltaOneStructure):
        alpha2 = structure_or_alpha2.alpha_norm2
        l = structure_or_alpha2.l
    else:
        alpha2 = ex.frac(structure_or_alpha2)
        if l is None:
            raise InputError("l is required when passing a raw |alpha|^2")
    r_j = [int(r) for r in r_j]
    if len(r_j) != 2 * l + 1:
        raise DualityViolation(f"need {2 * l + 1} values r_0..r_{2 * l}")
    for j in range(2 * l + 1):
        if r_j[j] != r_j[2 * l - j]:
            raise DualityViolation("r_j must satisfy r_j = r_{2l-j}")
    c_rho = Fraction(1)
    for j in range(l):
        base = Fraction(-4) * (l - j) ** 2 * alpha2
        c_rho *= base ** ((-1) ** (j + 1) * r_j[j])
    r_rho = 2 * sum((-1) ** (j + 1) * r_j[j] for j in range(l + 1))
    chi_prime = 2 * sum((-1) ** (j + 1) * r_j[j] for j in range(l)) \
        + (-1) ** (l + 1) * r_j[l]
    # internal consistency of the two expressions for the vanishing order
    assert r_rho == 2 * sum((-1) ** j * r_j[j] for j in range(l)) + 2 * chi_prime
    return LaurentData(tuple(r_j), alpha2, l, c_rho, r_rho, chi_prime)


@dataclass(frozen=True)
class TorsionFit:
    exponent: int
    coefficient: float
    coefficient_residual: float


def torsion_laurent_relation(samples, laurent: LaurentData) -> TorsionFit:
    """Fit the leading behavior of R(sigma)/T(sigma^2) near zero and compare
    it with the predicted c_rho * sigma^{r_rho - 2 chi'}.

    ``samples`` is a sequence of (sigma, ruelle_value, torsion_value) with
    torsion_value = T(sigma^2); at least three samples are required."""
    samples = sorted(samples)
    if len(samples) < 3:
        raise InsufficientSamples("need at least three samples near zero")
    sig = np.array([s[0] for s in samples], float)
    ratio = np.array([complex(s[1]) / complex(s[2]) for s in samples])
    if np.any(sig <= 0) or np.any(ratio == 0):
        raise InputError("samples must have positive sigma and nonzero ratio")
    logs = np.log(np.abs(ratio))
    slope, intercept = np.polyfit(np.log(sig), logs, 1)
    exponent = int(round(slope))
    coeffs = ratio / sig ** exponent
    coefficient = float(np.real(coeffs[0]))
    predicted = float(laurent.c_rho)
    residual = abs(coefficient - predicted) / max(1e-300, abs(predicted))
    return TorsionFit(exponent, coefficient, residual)


# ---------------------------------------------------------------------------
# rescaling


def rescale_dataset(dataset: SpectrumDataset, s: float) -> SpectrumDataset:
    """Covariant data rescaling for B -> s B in the conventions used here:
    every length is divided by sqrt(s) (and the declared counting rate is
    multiplied by sqrt(s) accordingly); holonomies are metric-independent."""
    if s <= 0:
        raise InputError("scale must be positive")
    root = math.sqrt(s)
    classes = tuple(replace(c, length=c.length / root)
                    for c in dataset.classes)
    counting = None if dataset.counting is None else CountingConstants(
        dataset.counting.prefactor, dataset.counting.rate * root,
        dataset.counting.rank)
    return SpectrumDataset(dataset.group, classes,
                           dataset.cutoff_length / root, counting,
                           dataset.negatively_curved)


# ---------------------------------------------------------------------------
# synthetic spectra


def synthetic_spectrum(structure: DeltaOneStructure, n_classes: int,
                       seed: int, length_min: float = 0.5,
                       cutoff: float = 5.0, rate: float = 1.0,
                       rank: int = 1, unitary_traces: bool = False,
                       group_name: str | None = None) -> SpectrumDataset:
    """Random dataset with exponential length counting; reproducible from
    the seed and byte-stable across platforms that share IEEE doubles."""
    rng = np.random.default_rng(seed)
    u = rng.random(n_classes)
    lengths = np.log(np.exp(rate * length_min)
                     + u * (np.exp(rate * cutoff) - np.exp(rate * length_min))) / rate
    angles = rng.uniform(-math.pi, math.pi, size=(n_classes, structure.l))
    classes = []
    for i in range(n_classes):
        if unitary_traces:
            phases = rng.uniform(0, 2 * math.pi, size=rank)
            tr = complex(np.sum(np.exp(1j * phases)))
        else:
            tr = complex(rank)
        classes.append(GeodesicClass(
            ident=str(i), length=float(lengths[i]),
            holonomy_angles=tuple(float(a) for a in angles[i]),
            index=Fraction(1), trace_rho=tr, iterate=1))
    counting = CountingConstants(
        prefactor=float(n_classes + 1) * math.exp(-rate * length_min),
        rate=rate, rank=float(rank))
    return SpectrumDataset(
        group=group_name or structure.group.family, classes=tuple(classes),
        cutoff_length=cutoff, counting=counting, negatively_curved=True)


# ---------------------------------------------------------------------------
# file formats


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def dataset_to_json(dataset: SpectrumDataset) -> dict:
    out = {
        "group": dataset.group,
        "cutoff_length": dataset.cutoff_length,
        "negatively_curved": dataset.negatively_curved,
        "classes": [
            {"id": c.ident, "length": c.length,
             "angles": list(c.holonomy_angles),
             "index": _frac_str(c.index),
             "trace_rho": [c.trace_rho.real, c.trace_rho.imag],
             "iterate": c.iterate}
            for c in dataset.classes],
    }
    if dataset.counting is not None:
        out["counting"] = {"prefactor": dataset.counting.prefactor,
                           "rate": dataset.counting.rate,
                           "rank": dataset.counting.rank}
    return out


def dataset_from_json(obj: dict) -> SpectrumDataset:
    try:
        counting = None
        if "counting" in obj:
            c = obj["counting"]
            counting = CountingConstants(float(c["prefactor"]),
                                         float(c["rate"]),
                                         float(c.get("rank", 1.0)))
        classes = tuple(
            GeodesicClass(
                ident=str(c.get("id", i)), length=float(c["length"]),
                holonomy_angles=tuple(float(a) for a in c["angles"]),
                index=Fraction(str(c.get("index", "1"))),
                trace_rho=complex(c["trace_rho"][0], c["trace_rho"][1]),
                iterate=int(c.get("iterate", 1)))
            for i, c in enumerate(obj["classes"]))
        return SpectrumDataset(
            group=obj["group"], classes=classes,
            cutoff_length=float(obj["cutoff_length"]), counting=counting,
            negatively_curved=bool(obj.get("negatively_curved", True)))
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed spectrum JSON: {e}") from e


_CSV_FIELDS = ["id", "length", "angles", "index",
               "trace_rho_re", "trace_rho_im", "iterate"]


def dataset_to_csv(dataset: SpectrumDataset) -> str:
    buf = io.StringIO()
    buf.write("# lszeta-spectrum v1\n")
    buf.write(f"# group={dataset.group}\n")
    buf.write(f"# cutoff_length={dataset.cutoff_length!r}\n")
    buf.write(f"# negatively_curved={int(dataset.negatively_curved)}\n")
    if dataset.counting is not None:
        buf.write(f"# counting_prefactor={dataset.counting.prefactor!r}\n")
        buf.write(f"# counting_rate={dataset.counting.rate!r}\n")
        buf.write(f"# counting_rank={dataset.counting.rank!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for c in dataset.classes:
        writer.writerow([c.ident, repr(c.length),
                         ";".join(repr(a) for a in c.holonomy_angles),
                         _frac_str(c.index), repr(c.trace_rho.real),
                         repr(c.trace_rho.imag), c.iterate])
    return buf.getvalue()


def dataset_from_csv(text: str) -> SpectrumDataset:
    meta: dict[str, str] = {}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        rows.append(line)
    try:
        reader = csv.DictReader(io.StringIO("\n".join(rows)))
        classes = []
        for rec in reader:
            angles = tuple(float(a) for a in rec["angles"].split(";")) \
                if rec["angles"] else tuple()
            classes.append(GeodesicClass(
                ident=rec["id"], length=float(rec["length"]),
                holonomy_angles=angles, index=Fraction(rec["index"]),
                trace_rho=complex(float(rec["trace_rho_re"]),
                                  float(rec["trace_rho_im"])),
                iterate=int(rec["iterate"])))
        counting = None
        if "counting_prefactor" in meta:
            counting = CountingConstants(float(meta["counting_prefactor"]),
                                         float(meta["counting_rate"]),
                                         float(meta.get("counting_rank", 1)))
        return SpectrumDataset(
            group=meta.get("group", "unknown"), classes=tuple(classes),
            cutoff_length=float(meta["cutoff_length"]), counting=counting,
            negatively_curved=bool(int(meta.get("negatively_curved", "1"))))
    except (KeyError, ValueError, TypeError) as e:
        raise InputError(f"malformed spectrum CSV: {e}") from e


def load_spectrum(path: str) -> SpectrumDataset:
    with open(path, "r") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return dataset_from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"malformed spectrum JSON: {e}") from e
    return dataset_from_csv(text)
