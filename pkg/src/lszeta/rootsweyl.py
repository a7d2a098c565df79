"""Real root systems, Weyl groups, characters and torus-reduced integration
for the compact algebras that occur as K and its centralizer subalgebras.

Weight convention: a weight or root lambda is stored through the rational
vector w with w_j = 2*pi*<lambda, t_j> for the chosen torus basis (t_j), so
that the torus character on exp(Y), Y = sum y_j t_j, is exp(i w . y).  With
this normalization all root data are exact rationals; the only irrational
quantities appear at evaluation time.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactla as ex
from .errors import (NotInvariant, NotMaximalTorus, SingularPoint,
                     TorusMismatch, UnsupportedFamily)
from .liecore import ReductiveGroupData, build_group, casimir_trace

Weight = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# simultaneous diagonalization of commuting normal operators


def simultaneous_eigenblocks(ops: list[np.ndarray], tol: float = 1e-8):
    """Joint eigenblocks of a commuting family of normal matrices.

    Returns a list of (labels, basis) where basis is an orthonormal
    (dim x mult) array spanning a joint eigenspace and labels[i] is the
    eigenvalue of ops[i] there.
    """
    if not ops:
        raise ValueError("need at least one operator")
    n = ops[0].shape[0]
    blocks = [np.eye(n, dtype=complex)]
    herms = []
    for m in ops:
        m = np.asarray(m, dtype=complex)
        herms.append((m + m.conj().T) / 2)
        herms.append((m - m.conj().T) / 2j)
    for h in herms:
        new_blocks = []
        for q in blocks:
            if q.shape[1] == 1:
                new_blocks.append(q)
                continue
            sub = q.conj().T @ h @ q
            vals, vecs = np.linalg.eigh((sub + sub.conj().T) / 2)
            scale = max(1.0, float(np.abs(vals).max()) if len(vals) else 1.0)
            start = 0
            for i in range(1, len(vals) + 1):
                if i == len(vals) or vals[i] - vals[i - 1] > tol * scale:
                    new_blocks.append(q @ vecs[:, start:i])
                    start = i
        blocks = new_blocks
    out = []
    for q in blocks:
        labels = []
        v = q[:, 0]
        for m in ops:
            labels.append(complex(v.conj() @ (np.asarray(m, complex) @ v)))
        out.append((labels, q))
    return out


# ---------------------------------------------------------------------------
# root data


@dataclass(frozen=True)
class RootWeylData:
    """Roots of a compact algebra w.r.t. an orthogonal torus basis."""

    gram: tuple[tuple[Fraction, ...], ...]     # <t_i, t_j>, exact
    roots: tuple[Weight, ...]
    positive_roots: tuple[Weight, ...]
    rho: Weight
    weyl_elements: tuple[tuple[tuple[Fraction, ...], ...], ...]
    weyl_signs: tuple[int, ...]
    algebra_dim: int

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def weyl_order(self) -> int:
        return len(self.weyl_elements)

    @functools.cached_property
    def gram_inv(self) -> ex.Mat:
        return ex.inv([list(r) for r in self.gram])

    def dual_pairing(self, u: Weight, v: Weight) -> Fraction:
        """4*pi^2 <u, v> for two weights (exact)."""
        return ex.dot(ex.mat_vec(self.gram_inv, list(v)), list(u))

    def weight_action(self, w_elem, weight: Weight) -> Weight:
        """Contragredient action of a Weyl element on a weight vector."""
        g = [list(r) for r in self.gram]
        m = ex.mat_mul(ex.mat_mul(g, [list(r) for r in w_elem]), self.gram_inv)
        return tuple(ex.mat_vec(m, list(weight)))


def _lex_positive(w: Weight) -> bool:
    for c in w:
        if c != 0:
            return c > 0
    return False


def _reflection(gram_inv: ex.Mat, w: Weight) -> ex.Mat:
    dual = ex.mat_vec(gram_inv, list(w))       # coordinates of the coroot dir
    norm = ex.dot(dual, list(w))
    n = len(w)
    m = ex.identity(n)
    for i in range(n):
        for j in range(n):
            m[i][j] -= Fraction(2) * dual[i] * w[j] / norm
    return m


def root_system_from_ads(ad_mats: list[np.ndarray], gram: ex.Mat,
                         algebra_dim: int, max_den: int = 48) -> RootWeylData:
    """Extract root data from the torus adjoint actions on a compact algebra.

    ``ad_mats[j]`` is ad(t_j) on the algebra's own coordinates.  Eigenvalues
    are i * (integer-like) rationals in our torus normalizations; they are
    snapped to exact rationals and verified.
    """
    rank = len(ad_mats)
    if rank == 0:
        return RootWeylData(tuple(), tuple(), tuple(), tuple(),
                            (tuple(map(tuple, ex.identity(0))),), (1,),
                            algebra_dim)
    blocks = simultaneous_eigenblocks([np.asarray(m, complex) for m in ad_mats])
    roots: list[Weight] = []
    zero_dim = 0
    for labels, basis in blocks:
        w = []
        for lam in labels:
            if abs(lam.real) > 1e-8:
                raise NotMaximalTorus("torus action has non-imaginary eigenvalue")
            w.append(ex.rationalize(lam.imag, max_den=max_den, tol=1e-7))
        wt = tuple(w)
        if all(c == 0 for c in wt):
            zero_dim += basis.shape[1]
        else:
            roots.extend([wt] * basis.shape[1])
    if zero_dim != rank:
        raise NotMaximalTorus(
            f"centralizer of the torus has dimension {zero_dim} > rank {rank}")
    if len(set(roots)) != len(roots):
        raise NotMaximalTorus("root multiplicity > 1; torus is not maximal")
    positive = tuple(sorted(w for w in roots if _lex_positive(w)))
    if 2 * len(positive) != len(roots):
        raise NotMaximalTorus("roots are not closed under negation")
    rho = tuple(sum(c[i] for c in positive) / 2 for i in range(rank)) \
        if positive else tuple(Fraction(0) for _ in range(rank))

    gram_t = tuple(tuple(r) for r in gram)
    gram_inv = ex.inv([list(r) for r in gram])
    gens = [_reflection(gram_inv, w) for w in positive]
    seen = {}
    frontier = [ex.identity(rank)]
    key = lambda m: tuple(tuple(r) for r in m)
    seen[key(frontier[0])] = frontier[0]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = ex.mat_mul(g, m)
                k = key(prod)
                if k not in seen:
                    seen[k] = prod
                    nxt.append(prod)
        frontier = nxt
    elements = tuple(sorted(seen.keys()))
    signs = tuple(int(ex.det([list(r) for r in m])) for m in elements)
    return RootWeylData(gram_t, tuple(sorted(roots)), positive, rho,
                        elements, signs, algebra_dim)


# ---------------------------------------------------------------------------
# compact algebra handles


@dataclass
class CompactAlgebraData:
    """A compact subalgebra of some host group, with its root data.

    ``idx`` lists the coordinate indices spanning the algebra when it is
    coordinate-aligned in the host basis (None otherwise, e.g. for
    centralizer subalgebras given by non-axis vectors)."""

    group: ReductiveGroupData
    idx: list[int] | None
    torus_idx: list[int]
    roots: RootWeylData

    @property
    def dim(self) -> int:
        return self.roots.algebra_dim

    def torus_gram_float(self) -> np.ndarray:
        return ex.to_float([[r for r in row] for row in self.roots.gram])

    def casimir_trace_self(self) -> Fraction:
        if self.idx is None:
            raise ValueError("exact Casimir trace needs a coordinate-aligned "
                             "algebra")
        return casimir_trace(self.group, self.idx, self.idx)


def _sub_ads(group: ReductiveGroupData, torus_idx, idx) -> list[np.ndarray]:
    pos = {i: n for n, i in enumerate(idx)}
    mats = []
    for t in torus_idx:
        m = np.zeros((len(idx), len(idx)))
        for n, b in enumerate(idx):
            for c, v in group.struct[t][b]:
                m[pos[c], n] = float(v)
        mats.append(m)
    return mats


def root_system(group: ReductiveGroupData) -> CompactAlgebraData:
    """Root data of k with respect to the group's standard maximal torus."""
    gram = group.inner_gram()
    tg = [[gram[a][b] for b in group.torus_idx] for a in group.torus_idx]
    ads = _sub_ads(group, group.torus_idx, group.k_idx)
    data = root_system_from_ads(ads, tg, len(group.k_idx))
    return CompactAlgebraData(group, list(group.k_idx),
                              list(group.torus_idx), data)


def compact_so(n: int) -> CompactAlgebraData:
    """Standalone compact so(n) with the form <X,Y> = -Tr(XY)."""
    host = build_group({"family": "so", "p": n, "q": 1, "b_scale": 2})
    return root_system(host)


def compact_so_sum(ns: list[int]) -> CompactAlgebraData:
    host = build_group({"family": "product",
                        "factors": [{"family": "so", "p": n, "q": 1} for n in ns],
                        "b_scale": 2})
    return root_system(host)


# ---------------------------------------------------------------------------
# denominator, characters, Kostant


def weyl_denominator(data: RootWeylData, y) -> complex:
    """sigma(Y) = prod over positive roots of 2i sin((w.y)/2)."""
    y = np.asarray(y, float)
    out = complex(1.0)
    for w in data.positive_roots:
        out *= 2j * math.sin(float(ex.to_float(list(w)) @ y) / 2)
    return out


def pi_polynomial(data: RootWeylData, y) -> complex:
    """pi(Y) = prod over positive roots of i (w.y)."""
    y = np.asarray(y, float)
    out = complex(1.0)
    for w in data.positive_roots:
        out *= 1j * float(ex.to_float(list(w)) @ y)
    return out


def weyl_alternating_sum(data: RootWeylData, weight: Weight, y) -> complex:
    """sum over the Weyl group of sign(w) exp(i weight . (w y))."""
    y = np.asarray(y, float)
    wf = ex.to_float(list(weight))
    tot = complex(0.0)
    for m, sgn in zip(data.weyl_elements, data.weyl_signs):
        tot += sgn * np.exp(1j * float(wf @ (ex.to_float([list(r) for r in m]) @ y)))
    return tot


def is_dominant(data: RootWeylData, weight: Weight) -> bool:
    return all(data.dual_pairing(weight, a) >= 0 for a in data.positive_roots)


def weyl_dimension(data: RootWeylData, weight: Weight) -> Fraction:
    """Dimension of the irreducible with the given highest weight (exact)."""
    dim = Fraction(1)
    for a in data.positive_roots:
        num = data.dual_pairing(
            tuple(x + y for x, y in zip(weight, data.rho)), a)
        den = data.dual_pairing(data.rho, a)
        dim *= num / den
    return dim


def weyl_character(data: RootWeylData, weight: Weight, y,
                   tol: float = 1e-9) -> complex:
    """Character of the irreducible with highest weight ``weight`` at exp(Y),
    via the quotient of alternating sums; singular points are handled by a
    small perturbation with Richardson extrapolation."""
    if not is_dominant(data, weight):
        raise ValueError("weight is not dominant")
    y = np.asarray(y, float)
    if not data.positive_roots:
        return np.exp(1j * float(ex.to_float(list(weight)) @ y))
    if np.allclose(y, 0.0):
        return complex(float(weyl_dimension(data, weight)))
    shifted = tuple(x + r for x, r in zip(weight, data.rho))
    sigma = weyl_denominator(data, y)
    scale = 2.0 ** len(data.positive_roots)
    if abs(sigma) > 1e-7 * scale:
        return weyl_alternating_sum(data, shifted, y) / sigma

    direction = ex.to_float(ex.mat_vec(data.gram_inv, list(data.rho)))
    if not np.linalg.norm(direction):
        direction = np.ones_like(y)
    direction = direction / np.linalg.norm(direction)

    def at(eps: float) -> complex:
        yy = y + eps * direction
        return weyl_alternating_sum(data, shifted, yy) / weyl_denominator(data, yy)

    eps = 1e-4
    e1 = 2 * at(eps / 2) - at(eps)
    e2 = 2 * at(eps / 4) - at(eps / 2)
    if abs(e1 - e2) > tol * max(1.0, abs(e2)):
        raise SingularPoint(f"character limit did not stabilize ({abs(e1-e2):.2e})")
    return e2


def kostant_check(data: CompactAlgebraData) -> tuple[Fraction, Fraction, float]:
    """Both sides of Kostant's strange formula, exactly.

    lhs = 4 pi^2 |rho|^2, rhs = -(1/24) Tr[C] with C the Casimir of the
    algebra acting on itself; returns (lhs, rhs, float residual).
    """
    lhs = data.roots.dual_pairing(data.roots.rho, data.roots.rho)
    rhs = -Fraction(1, 24) * data.casimir_trace_self()
    return lhs, rhs, abs(float(lhs - rhs))


# ---------------------------------------------------------------------------
# torus-reduced integration over the algebra


def _gauss_hermite(order: int):
    x, w = np.polynomial.hermite.hermgauss(order)
    return x, w


def torus_nodes(rank: int, order: int):
    """Tensor Gauss-Hermite nodes/weights for int exp(-|x|^2) f(x) dx."""
    x, w = _gauss_hermite(order)
    if rank == 0:
        return np.zeros((1, 0)), np.array([1.0])
    grids = np.meshgrid(*([x] * rank), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * rank), indexing="ij")
    weights = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=-1), axis=1)
    return nodes, weights


@functools.lru_cache(maxsize=None)
def _flag_volume_cached(key) -> float:
    positive, gram_flat, rank, dim, weyl_order = key
    # vol(K/T) from the Gaussian normalization of the torus reduction at t=1
    gram = np.array(gram_flat, float).reshape(rank, rank)
    scale = np.sqrt(np.diag(gram))
    order = max(8, len(positive) + 2)
    nodes, weights = torus_nodes(rank, order)
    y = np.sqrt(2.0) * nodes / scale        # orthonormal -> torus coordinates
    poly = np.ones(len(nodes))
    for w in positive:
        poly *= (y @ np.array(w, float)) ** 2
    integral = float(weights @ poly) * (2.0 ** (rank / 2))
    if integral == 0.0:
        return float((2 * np.pi) ** (dim / 2))
    return float((2 * np.pi) ** (dim / 2)) * weyl_order / integral


def flag_volume(data: CompactAlgebraData) -> float:
    """Riemannian volume of K/T for the metric induced by <.,.>."""
    r = data.roots
    key = (tuple(tuple(float(c) for c in w) for w in r.positive_roots),
           tuple(float(x) for row in r.gram for x in row),
           r.rank, r.algebra_dim, r.weyl_order)
    return _flag_volume_cached(key)


def weyl_integrate_algebra(data: CompactAlgebraData, f, t: float,
                           order: int = 24, invariant: bool = False) -> float:
    """Integral over the compact algebra of f(Y) exp(-|Y|^2/2t) dY for an
    Ad-invariant integrand, torus-reduced.  ``f`` receives torus coordinates.
    """
    if not invariant:
        raise NotInvariant("torus reduction is only valid for invariant "
                           "integrands; pass invariant=True to assert this")
    r = data.roots
    if r.rank == 0:
        return float(f(np.zeros((1, 0)))[0]) if data.dim == 0 else \
            _abelian_gaussian(data, f, t, order)
    gram = data.torus_gram_float()
    scale = np.sqrt(np.diag(gram))
    nodes, weights = torus_nodes(r.rank, order)
    y = np.sqrt(2.0 * t) * nodes / scale
    vals = np.asarray(f(y), dtype=float)
    poly = np.ones(len(nodes))
    for w in r.positive_roots:
        poly *= (y @ ex.to_float(list(w))) ** 2
    integral = math.fsum(weights * poly * vals) * (2.0 * t) ** (r.rank / 2)
    return flag_volume(data) / r.weyl_order * integral


def _abelian_gaussian(data: CompactAlgebraData, f, t, order) -> float:
    nodes, weights = torus_nodes(data.dim, order)
    y = np.sqrt(2.0 * t) * nodes
    vals = np.asarray(f(y), dtype=float)
    return math.fsum(weights * vals) * (2.0 * t) ** (data.dim / 2)


def bott_euler_ratio(k_data: CompactAlgebraData,
                     km_data: CompactAlgebraData) -> Fraction:
    """Euler characteristic of K/K_M as the ratio of Weyl group orders."""
    if k_data.roots.rank != km_data.roots.rank or \
            k_data.roots.gram != km_data.roots.gram:
        raise TorusMismatch("K and K_M must share their maximal torus")
    return Fraction(k_data.roots.weyl_order, km_data.roots.weyl_order)


# ---------------------------------------------------------------------------
# virtual characters as finite weight maps on the torus


def _canon_coord(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    if isinstance(c, (int, np.integer)):
        return int(c)
    return ex.frac(c)


class VirtualCharacter:
    """Finite map from torus weights to integer multiplicities.

    Supports the ring operations and the lambda-operations needed for
    exterior-power calculus; evaluation uses the convention that the value
    on (k = exp(kappa), Y) is sum m_w exp(-i w.kappa) exp(w.y).
    """

    __slots__ = ("weights", "_rank")

    def __init__(self, weights: dict[Weight, int] | None = None,
                 rank: int | None = None):
        self.weights = {}
        if weights:
            for w, m in weights.items():
                if m:
                    self.weights[tuple(_canon_coord(c) for c in w)] = int(m)
        if self.weights:
            self._rank = len(next(iter(self.weights)))
            if rank is not None and rank != self._rank:
                raise ValueError("rank disagrees with weight length")
        else:
            self._rank = 0 if rank is None else rank

    # -- constructors ---------------------------------------------------

    @classmethod
    def trivial(cls, rank: int) -> "VirtualCharacter":
        return cls({(0,) * rank: 1}, rank=rank)

    @classmethod
    def from_weight_list(cls, weights, rank: int | None = None) -> "VirtualCharacter":
        out: dict[Weight, int] = {}
        for w in weights:
            w = tuple(_canon_coord(c) for c in w)
            out[w] = out.get(w, 0) + 1
        return cls(out, rank=rank)

    # -- ring structure ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, VirtualCharacter) and self.weights == other.weights

    def __hash__(self):
        return hash(frozenset(self.weights.items()))

    def _join_rank(self, other: "VirtualCharacter") -> int:
        if self.weights and other.weights and self._rank != other._rank:
            raise ValueError("cannot combine characters of different ranks")
        return max(self._rank, other._rank)

    def __add__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        out = dict(self.weights)
        for w, m in other.weights.items():
            out[w] = out.get(w, 0) + m
        return VirtualCharacter(out, rank=self._join_rank(other))

    def __sub__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        return self + other.scaled(-1)

    def scaled(self, c: int) -> "VirtualCharacter":
        return VirtualCharacter({w: c * m for w, m in self.weights.items()},
                                rank=self._rank)

    def __mul__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        rank = self._join_rank(other)
        out: dict[Weight, int] = {}
        for w1, m1 in self.weights.items():
            for w2, m2 in other.weights.items():
                w = tuple(a + b for a, b in zip(w1, w2))
                out[w] = out.get(w, 0) + m1 * m2
        return VirtualCharacter(out, rank=rank)

    def dual(self) -> "VirtualCharacter":
        return VirtualCharacter({tuple(-c for c in w): m
                                 for w, m in self.weights.items()},
                                rank=self._rank)

    def dimension(self) -> int:
        return sum(self.weights.values())

    def rank(self) -> int:
        return self._rank

    def is_honest(self) -> bool:
        return all(m > 0 for m in self.weights.values())

    # -- lambda operations -------------------------------------------------

    def adams(self, k: int) -> "VirtualCharacter":
        return VirtualCharacter({tuple(k * c for c in w): m
                                 for w, m in self.weights.items()},
                                rank=self._rank)

    def exterior_powers_all(self) -> list["VirtualCharacter"]:
        """All lambda^j at once.  Honest characters use the sequential
        product prod_w (1 + t e^w); virtual ones fall back to Newton's
        identities on the Adams operations."""
        if not self.is_honest():
            return [self.exterior_power(j) for j in range(self.dimension() + 1)]
        lams: list[dict[Weight, int]] = [{(0,) * self._rank: 1}]
        for w, mult in self.weights.items():
            for _ in range(mult):
                new = [dict(d) for d in lams] + [{}]
                for j in range(len(lams)):
                    for w0, m0 in lams[j].items():
                        key = tuple(a + b for a, b in zip(w0, w))
                        new[j + 1][key] = new[j + 1].get(key, 0) + m0
                lams = new
        return [VirtualCharacter(d, rank=self._rank) for d in lams]

    def exterior_power(self, j: int) -> "VirtualCharacter":
        """lambda^j via Newton's identities on the Adams operations."""
        if j < 0:
            return VirtualCharacter(rank=self._rank)
        lams = [VirtualCharacter.trivial(self._rank)]
        for n in range(1, j + 1):
            acc = VirtualCharacter(rank=self._rank)
            for i in range(1, n + 1):
                term = lams[n - i] * self.adams(i)
                acc = acc + term.scaled((-1) ** (i - 1))
            mults = {w: m for w, m in acc.weights.items()}
            if any(m % n for m in mults.values()):
                raise ArithmeticError("Newton recursion produced non-integers")
            lams.append(VirtualCharacter({w: m // n for w, m in mults.items()},
                                         rank=self._rank))
        return lams[j]

    def alternating_sum(self, top: int | None = None) -> "VirtualCharacter":
        """sum_j (-1)^j lambda^j, i.e. the K-theory Euler class."""
        lams = self.exterior_powers_all()
        if top is not None:
            lams = lams[:top + 1]
        acc = VirtualCharacter(rank=self._rank)
        for j, lam in enumerate(lams):
            acc = acc + lam.scaled((-1) ** j)
        return acc

    def weighted_alternating_sum(self) -> "VirtualCharacter":
        """sum_j (-1)^{j-1} j lambda^j (the derivative of the Euler class)."""
        acc = VirtualCharacter(rank=self._rank)
        for j, lam in enumerate(self.exterior_powers_all()):
            acc = acc + lam.scaled((-1) ** (j - 1) * j)
        return acc

    # -- evaluation ---------------------------------------------------------

    def _arrays(self):
        ws = np.array([[float(c) for c in w] for w in self.weights], float) \
            if self.weights else np.zeros((0, self.rank()))
        ms = np.array(list(self.weights.values()), float) \
            if self.weights else np.zeros((0,))
        return ws, ms

    def evaluate(self, kappa, y) -> complex:
        """Trace of tau(k^{-1}) exp(-i dtau(Y)) for k = exp(kappa), Y with
        torus coordinates y (both in the torus basis)."""
        ws, ms = self._arrays()
        if not len(ws):
            return 0.0 + 0.0j
        kappa = np.asarray(kappa, float)
        y = np.asarray(y, float)
        return complex(np.sum(ms * np.exp(-1j * ws @ kappa) * np.exp(ws @ y)))

    def evaluate_nodes(self, kappa, ys: np.ndarray) -> np.ndarray:
        """Vectorized evaluate over rows of ``ys``."""
        ws, ms = self._arrays()
        if not len(ws):
            return np.zeros(len(ys), complex)
        phase = ms * np.exp(-1j * ws @ np.asarray(kappa, float))
        return np.exp(np.asarray(ys, float) @ ws.T) @ phase

    def is_invariant(self, data: RootWeylData) -> bool:
        for m in data.weyl_elements:
            moved = {data.weight_action(m, w): mult
                     for w, mult in self.weights.items()}
            if moved != self.weights:
                return False
        return True

    def __repr__(self):
        items = ", ".join(f"{tuple(str(c) for c in w)}:{m}"
                          for w, m in sorted(self.weights.items()))
        return f"VirtualCharacter({{{items}}})"
