"""Structure theory for groups of fundamental rank one.

Builds the splitting g = b + m + n + nbar attached to the one-dimensional
centralizer b of the torus in p, the covector alpha by which b acts on n,
the virtual lifts of the exterior powers of n* from K_M to K, the Casimir
shift scalars, and the half-power determinant identity used throughout the
geodesic-side zeta functions.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import exactla as ex
from .errors import (DeltaNotOne, NotInH, UnsupportedDeltaOneFactor)
from .liecore import (ReductiveGroupData, SemisimpleElement, b_space,
                      casimir_trace, heat_coefficient_traces)
from .rootsweyl import (CompactAlgebraData, RootWeylData, VirtualCharacter,
                        root_system, root_system_from_ads,
                        simultaneous_eigenblocks)

_TOL = 1e-10


# ---------------------------------------------------------------------------
# helpers on exact subspaces


def _matrix_of_ad(group: ReductiveGroupData, v: ex.Vec) -> ex.Mat:
    m = ex.zeros(group.dim, group.dim)
    for i, vi in enumerate(v):
        if not vi:
            continue
        for b in range(group.dim):
            for c, coef in group.struct[i][b]:
                m[c][b] += vi * coef
    return m


def _p_projection(group: ReductiveGroupData, v: ex.Vec) -> ex.Vec:
    return [x if s == -1 else Fraction(0)
            for x, s in zip(v, group.theta_sign)]


def _k_projection(group: ReductiveGroupData, v: ex.Vec) -> ex.Vec:
    return [x if s == 1 else Fraction(0)
            for x, s in zip(v, group.theta_sign)]


def _restrict_float(op: np.ndarray, basis_rows: np.ndarray) -> np.ndarray:
    """Matrix of op restricted to the row span of ``basis_rows`` (op must
    preserve the span)."""
    bt = basis_rows.T
    sol, *_ = np.linalg.lstsq(bt, op @ bt, rcond=None)
    return sol


def _weights_of(group: ReductiveGroupData, basis_vectors: list[ex.Vec],
                max_den: int = 48) -> list[tuple]:
    """Torus weights (with multiplicity) on the span of exact vectors."""
    if not basis_vectors:
        return []
    # restrict in a <,>-orthonormal basis so the torus actions stay normal
    rows = group.orthonormalize(np.array([ex.to_float(v)
                                          for v in basis_vectors]))
    gram = ex.to_float(group.inner_gram())
    ops = []
    for t in group.torus_idx:
        tt = np.zeros(group.dim)
        tt[t] = 1.0
        ops.append(rows @ gram @ group.ad(tt) @ rows.T)
    if not ops:
        return [tuple()] * len(basis_vectors)
    out = []
    for labels, basisq in simultaneous_eigenblocks([np.asarray(o, complex) for o in ops]):
        w = tuple(ex.rationalize(l.imag, max_den=max_den, tol=1e-7)
                  for l in labels)
        out.extend([w] * basisq.shape[1])
    return out


# ---------------------------------------------------------------------------
# the structure


@dataclass
class LiftedRep:
    """Virtual K-representation restricting to an exterior power of n*."""

    j: int
    char: VirtualCharacter            # full character on T
    e_plus: VirtualCharacter
    e_minus: VirtualCharacter


@dataclass
class DeltaOneStructure:
    group: ReductiveGroupData
    b_raw: ex.Vec                     # primitive rational generator of b
    b_norm2: Fraction                 # B(b_raw, b_raw)
    alpha_raw: Fraction               # <alpha, b_raw>
    a0: ex.Vec                        # exact vector with <alpha, a0> = 1
    alpha_norm2: Fraction             # |alpha|^2
    l: int
    pm_basis: list[ex.Vec]
    km_basis: list[ex.Vec]
    pbot_basis: list[ex.Vec]
    kbot_basis: list[ex.Vec]
    n_basis: list[ex.Vec]
    nbar_basis: list[ex.Vec]
    k_roots: CompactAlgebraData
    n_char: VirtualCharacter
    pm_char: VirtualCharacter
    p_char: VirtualCharacter
    n_pos_weights: list[tuple]        # l lexicographically positive n-weights
    u_perp_trace: Fraction            # Tr over the compact complement of the
                                      # Casimir of the compact form of z(b)
    um_trace: Fraction                # Tr^{u_m}[C^{u_m,u_m}]
    tr_p_ckp: Fraction
    tr_k_ckk: Fraction

    @property
    def alpha_norm(self) -> float:
        return math.sqrt(float(self.alpha_norm2))

    @property
    def rank(self) -> int:
        return len(self.group.torus_idx)

    def a1_float(self) -> np.ndarray:
        return ex.to_float(self.b_raw) / math.sqrt(float(self.b_norm2))

    def torus_coords_matrix(self) -> np.ndarray:
        """Rows are the torus basis vectors (full coordinates)."""
        m = np.zeros((self.rank, self.group.dim))
        for r, t in enumerate(self.group.torus_idx):
            m[r, t] = 1.0
        return m

    def kappa_from_angles(self, angles) -> np.ndarray:
        """Torus coordinates of k whose holonomy eigenvalues on n are
        exp(+-i angle_s) for the canonical ordering of positive n-weights."""
        w = np.array([[float(c) for c in wt] for wt in self.n_pos_weights])
        return np.linalg.solve(w, np.asarray(angles, float))

    def angles_from_kappa(self, kappa) -> np.ndarray:
        w = np.array([[float(c) for c in wt] for wt in self.n_pos_weights])
        return w @ np.asarray(kappa, float)

    def element(self, c: float, kappa) -> SemisimpleElement:
        """exp(c a_1) k^{-1} with k = exp(sum kappa_j t_j)."""
        kappa = np.asarray(kappa, float)
        kc = np.zeros(self.group.dim)
        for r, t in enumerate(self.group.torus_idx):
            kc[t] = kappa[r]
        k = self.group.exp_of(kc)
        return SemisimpleElement(self.group, c * self.a1_float(), k,
                                 hform=(float(c), kappa))


def _factor_names(group: ReductiveGroupData) -> list[str]:
    return group.family.split("*")


def build_structure(group: ReductiveGroupData) -> DeltaOneStructure:
    """Rank-one structure data; requires fundamental rank one and a
    delta-one factor of type sl3 or so(p,q) with p, q odd, pq > 1."""
    bvecs = b_space(group)
    if len(bvecs) != 1:
        raise DeltaNotOne(f"fundamental rank is {len(bvecs)}, not 1")
    b_raw = bvecs[0]
    # primitive integral generator, oriented so the first nonzero ambient
    # matrix entry (row-major) is positive
    den = 1
    for c in b_raw:
        den = den * c.denominator // math.gcd(den, c.denominator)
    b_raw = [c * den for c in b_raw]
    g0 = 0
    for c in b_raw:
        g0 = math.gcd(g0, c.numerator)
    if g0:
        b_raw = [c / g0 for c in b_raw]
    mat_entries: dict[tuple[int, int], Fraction] = {}
    for i, ci in enumerate(b_raw):
        if ci:
            for pos, v in group.basis[i].items():
                mat_entries[pos] = mat_entries.get(pos, Fraction(0)) + ci * v
    first = min((pos for pos, v in mat_entries.items() if v != 0))
    if mat_entries[first] < 0:
        b_raw = [-c for c in b_raw]

    # identify and validate the delta-one factor
    names = _factor_names(group)
    support = {i for i, c in enumerate(b_raw) if c}
    fac_name = None
    for name, (start, stop, _) in zip(names, group.factor_slices):
        if support & set(range(start, stop)):
            if fac_name is not None:
                raise UnsupportedDeltaOneFactor(
                    "b is not contained in a single factor")
            fac_name = name
    if fac_name == "R":
        raise UnsupportedDeltaOneFactor(
            "the delta-one factor is the real line (noncompact center)")
    if fac_name.startswith("so("):
        p, q = (int(t) for t in fac_name[3:-1].split(","))
        if p % 2 == 0 or q % 2 == 0 or p * q <= 1:
            raise UnsupportedDeltaOneFactor(
                f"so({p},{q}) is not a supported delta-one factor")
    elif fac_name != "sl3":
        raise UnsupportedDeltaOneFactor(
            f"{fac_name} is not a supported delta-one factor")

    # alpha: b acts on n as a scalar; find it from the exact eigenspaces
    ad_b = _matrix_of_ad(group, b_raw)
    # ad(b) is diagonalizable with real spectrum; locate it numerically,
    # then pin the eigenspaces down by exact kernels
    evals = np.linalg.eigvals(ex.to_float(ad_b))
    s_candidates = sorted({ex.rationalize(float(v.real), max_den=120, tol=1e-6)
                           for v in evals if abs(v) > 1e-8})
    pos = [s for s in s_candidates if s > 0]
    if not pos:
        raise UnsupportedDeltaOneFactor("b does not act with positive eigenvalues")
    alpha_raw = pos[0]
    if len(pos) > 1:
        raise UnsupportedDeltaOneFactor("b does not act on n as a single scalar")

    dim = group.dim
    shifted = [[ad_b[i][j] - (alpha_raw if i == j else 0) for j in range(dim)]
               for i in range(dim)]
    n_basis = ex.nullspace(shifted)
    shifted = [[ad_b[i][j] + (alpha_raw if i == j else 0) for j in range(dim)]
               for i in range(dim)]
    nbar_basis = ex.nullspace(shifted)
    if len(n_basis) != len(nbar_basis) or len(n_basis) % 2:
        raise UnsupportedDeltaOneFactor("n and theta(n) dimensions disagree")
    l = len(n_basis) // 2

    # m = centralizer of b, split into p and k parts
    zker = ex.nullspace(ad_b)
    pm_basis, km_basis = [], []
    for v in zker:
        vp = _p_projection(group, v)
        vk = _k_projection(group, v)
        if any(vp):
            # remove the b component, exactly
            coef = group.b_form_exact(vp, b_raw) / group.b_form_exact(b_raw, b_raw)
            vp = [x - coef * y for x, y in zip(vp, b_raw)]
            if any(vp):
                pm_basis.append(vp)
        if any(vk):
            km_basis.append(vk)
    pm_basis = _independent(pm_basis)
    km_basis = _independent(km_basis)

    pbot_basis = _independent([_p_projection(group, v) for v in n_basis])
    kbot_basis = _independent([_k_projection(group, v) for v in n_basis])

    # exact structural invariants
    _verify_structure(group, b_raw, alpha_raw, n_basis, pm_basis, l)

    b_norm2 = group.b_form_exact(b_raw, b_raw)
    a0 = [c / alpha_raw for c in b_raw]
    alpha_norm2 = alpha_raw * alpha_raw / b_norm2

    k_roots = root_system(group)
    rank = len(group.torus_idx)
    n_weights = _weights_of(group, n_basis)
    pm_weights = _weights_of(group, pm_basis)
    n_char = VirtualCharacter.from_weight_list(n_weights, rank=rank)
    pm_char = VirtualCharacter.from_weight_list(pm_weights, rank=rank)
    p_char = VirtualCharacter.trivial(rank) + pm_char + n_char

    n_pos = sorted(w for w in n_weights if _lex_pos(w))
    if len(n_pos) != l:
        raise UnsupportedDeltaOneFactor("n-weights do not split into l pairs")

    u_perp_trace = _u_casimir_trace(
        group, [b_raw] + pm_basis, km_basis, pbot_basis, kbot_basis)
    um_trace = _u_casimir_trace(group, pm_basis, km_basis, pm_basis, km_basis)
    tr_p, tr_k = heat_coefficient_traces(group)

    return DeltaOneStructure(
        group=group, b_raw=b_raw, b_norm2=b_norm2, alpha_raw=alpha_raw,
        a0=a0, alpha_norm2=alpha_norm2, l=l, pm_basis=pm_basis,
        km_basis=km_basis, pbot_basis=pbot_basis, kbot_basis=kbot_basis,
        n_basis=n_basis, nbar_basis=nbar_basis, k_roots=k_roots,
        n_char=n_char, pm_char=pm_char, p_char=p_char,
        n_pos_weights=[tuple(w) for w in n_pos],
        u_perp_trace=u_perp_trace, um_trace=um_trace,
        tr_p_ckp=tr_p, tr_k_ckk=tr_k)


def _lex_pos(w) -> bool:
    for c in w:
        if c != 0:
            return c > 0
    return False


def _independent(vectors: list[ex.Vec]) -> list[ex.Vec]:
    """Extract a maximal exactly-independent subset, keeping order."""
    out: list[ex.Vec] = []
    rows: list[ex.Vec] = []
    for v in vectors:
        trial = rows + [list(v)]
        r, piv = ex.rref(trial)
        if len(piv) == len(trial):
            out.append(v)
            rows = [row for row in r[:len(piv)]]
    return out


def _verify_structure(group, b_raw, alpha_raw, n_basis, pm_basis, l):
    for f in n_basis:
        lhs = group.bracket_exact(b_raw, f)
        rhs = [alpha_raw * x for x in f]
        if lhs != rhs:
            raise UnsupportedDeltaOneFactor("[b, n] is not scalar")
    for f1 in n_basis:
        for f2 in n_basis:
            if any(group.bracket_exact(f1, f2)):
                raise UnsupportedDeltaOneFactor("[n, n] != 0")
            if group.b_form_exact(f1, f2) != 0:
                raise UnsupportedDeltaOneFactor("B does not vanish on n x n")
    if group.m_dim != 1 + len(pm_basis) + 2 * l:
        raise UnsupportedDeltaOneFactor("dim p != 1 + dim p_m + dim n")


# ---------------------------------------------------------------------------
# exact Casimir traces on the compact form


def _sparse_ad_rows(group: ReductiveGroupData, v: ex.Vec):
    """Rows of ad(v) as {row: [(col, value), ...]}, nonzeros only."""
    acc: dict[int, dict[int, Fraction]] = {}
    for i, vi in enumerate(v):
        if not vi:
            continue
        for b in range(group.dim):
            for c, coef in group.struct[i][b]:
                row = acc.setdefault(c, {})
                row[b] = row.get(b, Fraction(0)) + vi * coef
    return {r: [(b, val) for b, val in cols.items() if val]
            for r, cols in acc.items()}


def _sp_apply(ad_rows, x: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for r, items in ad_rows.items():
        tot = Fraction(0)
        for b, val in items:
            xb = x.get(b)
            if xb is not None:
                tot += val * xb
        if tot:
            out[r] = tot
    return out


def _u_casimir_trace(group: ReductiveGroupData,
                     source_p: list[ex.Vec], source_k: list[ex.Vec],
                     target_p: list[ex.Vec], target_k: list[ex.Vec]) -> Fraction:
    """Tr over the compact form of (target_p + target_k) of the Casimir of
    the compact form of (source_p + source_k): p-type directions are
    multiplied by the imaginary unit at the structure constant level, which
    turns into a -1 on the paired traces below."""
    targets = target_p + target_k
    if not targets:
        return Fraction(0)
    inner = group.inner_gram()
    t_sparse = [{i: c for i, c in enumerate(v) if c} for v in targets]
    # dual rows <v_i, .> as dense vectors
    duals = [ex.mat_vec(inner, list(v)) for v in targets]
    gram_t = [[sum(d[i] * c for i, c in t.items()) for t in t_sparse]
              for d in duals]
    ginv_t = ex.inv(gram_t)

    def subspace_trace(ad_a, ad_b) -> Fraction:
        # M = ad_a ad_b preserves the target span; trace via Gram duality
        us = [_sp_apply(ad_a, _sp_apply(ad_b, t)) for t in t_sparse]
        tr = Fraction(0)
        for j, u in enumerate(us):
            for i in range(len(targets)):
                w = ginv_t[j][i]
                if w:
                    tr += w * sum(duals[i][r] * val for r, val in u.items())
        return tr

    total = Fraction(0)
    for sign, src in ((-1, source_p), (1, source_k)):
        if not src:
            continue
        gram = [[group.inner_exact(u, v) for v in src] for u in src]
        ginv = ex.inv(gram)
        ads = [_sparse_ad_rows(group, v) for v in src]
        for a in range(len(src)):
            for b in range(len(src)):
                if ginv[a][b] != 0:
                    total += sign * ginv[a][b] * subspace_trace(ads[a], ads[b])
    return total


# ---------------------------------------------------------------------------
# half-power determinant identity


def lambda_traces_from_angles(angles) -> np.ndarray:
    """Traces of the holonomy on all exterior powers of n*, with the sign
    (-1)^j folded in: returns the coefficients of prod_s (1 - 2 cos(phi_s) z
    + z^2), i.e. coeff[j] = (-1)^j Tr^{Lambda^j}."""
    coeff = np.array([1.0])
    for phi in np.atleast_1d(np.asarray(angles, float)):
        coeff = np.convolve(coeff, np.array([1.0, -2.0 * math.cos(phi), 1.0]))
    return coeff


def halfdet_from_angles(length: float, angles, alpha_norm: float) -> float:
    """|det(1 - Ad(gamma))|^{1/2} over n + theta n, from holonomy angles."""
    u = alpha_norm * abs(length)
    coeff = lambda_traces_from_angles(angles)
    ll = len(coeff) // 2
    return math.fsum(c * math.exp((ll - j) * u) for j, c in enumerate(coeff))


def halfdet_identity(structure: DeltaOneStructure, c: float, kappa,
                     return_parts: bool = True):
    """Brute-force |det(1-Ad(gamma))|^{1/2} on n + theta(n) versus the
    alternating character sum; returns (lhs, rhs, relative residual)."""
    if abs(c) < 1e-14:
        raise NotInH("a must be a nonzero element of b")
    group = structure.group
    kappa = np.asarray(kappa, float)
    if kappa.shape != (structure.rank,):
        raise NotInH(f"kappa must have {structure.rank} torus coordinates")
    a = c * structure.a1_float()
    kc = np.zeros(group.dim)
    for r, t in enumerate(group.torus_idx):
        kc[t] = kappa[r]
    ad_gamma = scipy.linalg.expm(group.ad(a)) @ scipy.linalg.expm(-group.ad(kc))

    rows = np.array([ex.to_float(v) for v in structure.n_basis +
                     structure.nbar_basis])
    q, _ = np.linalg.qr(rows.T)
    restr = q.T @ ad_gamma @ q
    lhs = math.sqrt(abs(np.linalg.det(np.eye(len(restr)) - restr)))

    angles = structure.angles_from_kappa(kappa)
    rhs = halfdet_from_angles(c, angles, structure.alpha_norm)
    residual = abs(lhs - rhs) / max(1.0, abs(rhs))
    return (lhs, rhs, residual) if return_parts else residual


def halfdet_identity_element(structure: DeltaOneStructure,
                             gamma: SemisimpleElement):
    """Variant taking a SemisimpleElement; validates membership in exp(b)T."""
    group = structure.group
    a1 = structure.a1_float()
    c = float(group.inner(gamma.a, a1))
    if np.linalg.norm(gamma.a - c * a1) > 1e-9 * max(1.0, abs(c)):
        raise NotInH("a does not lie in b")
    tor = structure.torus_coords_matrix()
    adk = group.adjoint_matrix(gamma.k)
    for t in tor:
        if np.linalg.norm(adk @ t - t) > 1e-9:
            raise NotInH("k does not centralize the torus")
    if gamma.hform is not None:
        kappa = gamma.hform[1]
    else:
        raise NotInH("element does not carry torus coordinates for k")
    return halfdet_identity(structure, c, kappa)


# ---------------------------------------------------------------------------
# lifts and companion characters


def _char_cache(structure: DeltaOneStructure) -> dict:
    cache = getattr(structure, "_chars", None)
    if cache is None:
        cache = {}
        object.__setattr__(structure, "_chars", cache)
    return cache


def lift_exterior_powers(structure: DeltaOneStructure) -> list[LiftedRep]:
    """Virtual K-lifts of the exterior powers of n*, j = 0..2l, as characters
    on the shared maximal torus; invariance under the full Weyl group of K is
    exactly the existence of the lift."""
    cache = _char_cache(structure)
    if "lifts" in cache:
        return cache["lifts"]
    out = []
    for j, char in enumerate(structure.n_char.dual().exterior_powers_all()):
        if not char.is_invariant(structure.k_roots.roots):
            raise UnsupportedDeltaOneFactor(
                f"exterior power {j} of n* does not lift to K")
        rank = char.rank()
        plus = VirtualCharacter({w: m for w, m in char.weights.items() if m > 0},
                                rank=rank)
        minus = VirtualCharacter({w: -m for w, m in char.weights.items() if m < 0},
                                 rank=rank)
        out.append(LiftedRep(j, char, plus, minus))
    cache["lifts"] = out
    return out


def eta_hat_character(structure: DeltaOneStructure, j: int) -> VirtualCharacter:
    """Character on T of the alternating companion of the j-th exterior
    power: (sum_i (-1)^i Lambda^i(p_m*)) tensor Lambda^j(n*)."""
    cache = _char_cache(structure)
    key = ("eta_hat", j)
    if key not in cache:
        if "euler_pm" not in cache:
            cache["euler_pm"] = structure.pm_char.dual().alternating_sum()
        cache[key] = cache["euler_pm"] * lift_exterior_powers(structure)[j].char
    return cache[key]


def n_weighted_p_character(structure: DeltaOneStructure) -> VirtualCharacter:
    """Character of sum_i (-1)^{i-1} i Lambda^i(p*), the degree-weighted
    exterior algebra of the cotangent fiber."""
    cache = _char_cache(structure)
    if "n_weighted_p" not in cache:
        cache["n_weighted_p"] = structure.p_char.dual().weighted_alternating_sum()
    return cache["n_weighted_p"]


def casimir_shift(structure: DeltaOneStructure, j: int) -> tuple[Fraction, Fraction]:
    """(Casimir scalar of the compact form of M on Lambda^j(n*), spectral
    shift sigma_j); both exact rationals."""
    shift = Fraction((j - structure.l) ** 2) * structure.alpha_norm2
    casimir = structure.u_perp_trace / 8 + shift
    sigma = structure.u_perp_trace / 8 - casimir
    return casimir, sigma


def casimir_matrix_oracle(structure: DeltaOneStructure, j: int) -> tuple[float, float]:
    """Independent Casimir scalar: build the compact-form action on the j-th
    exterior power of n explicitly and average the squares over an
    orthonormal basis.  Returns (scalar, deviation from scalarity)."""
    group = structure.group
    rows = np.array([ex.to_float(v) for v in structure.n_basis])
    reps = []
    for v in structure.pm_basis + structure.km_basis:
        reps.append(_restrict_float(group.ad(ex.to_float(v)), rows))
    n_p = len(structure.pm_basis)
    dim_n = 2 * structure.l
    idx = list(itertools.combinations(range(dim_n), j))
    dim_w = len(idx)

    pos_of = {subset: n for n, subset in enumerate(idx)}

    def wedge(m: np.ndarray) -> np.ndarray:
        out = np.zeros((dim_w, dim_w), complex)
        for col, subset in enumerate(idx):
            for pos, b in enumerate(subset):
                for a in range(dim_n):
                    if a == b:
                        out[col, col] += m[b, b]
                        continue
                    if a in subset:
                        continue
                    new = list(subset)
                    new[pos] = a
                    sign = _perm_sign(np.argsort(new))
                    out[pos_of[tuple(sorted(new))], col] += sign * m[a, b]
        return out

    gram_p = np.array([[group.b_form(ex.to_float(u), ex.to_float(v))
                        for v in structure.pm_basis] for u in structure.pm_basis])
    gram_k = np.array([[-group.b_form(ex.to_float(u), ex.to_float(v))
                        for v in structure.km_basis] for u in structure.km_basis])
    cas = np.zeros((dim_w, dim_w), complex)
    wedges = [wedge(np.asarray(r, complex)) for r in reps]
    if n_p:
        gpinv = np.linalg.inv(gram_p)
        for a in range(n_p):
            for b in range(n_p):
                if abs(gpinv[a, b]) > 1e-14:
                    cas -= gpinv[a, b] * wedges[a] @ wedges[b]
    if len(structure.km_basis):
        gkinv = np.linalg.inv(gram_k)
        nk = len(structure.km_basis)
        for a in range(nk):
            for b in range(nk):
                if abs(gkinv[a, b]) > 1e-14:
                    cas += gkinv[a, b] * (wedges[n_p + a] @ wedges[n_p + b])
    scalar = complex(np.trace(cas)) / dim_w
    dev = float(np.abs(cas - scalar * np.eye(dim_w)).max())
    return scalar.real, max(dev, abs(scalar.imag))


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# number-operator supertrace and its vanishing


def number_supertrace(group: ReductiveGroupData, k: np.ndarray, y) -> complex:
    """Supertrace over the exterior algebra of p* of N Ad(k^{-1}) e^{-i ad Y},
    computed as the derivative at b=0 of det(1 - e^b Ad(k) e^{i ad Y}) on p."""
    mu = _p_eigenvalues(group, k, y)
    total = complex(0.0)
    for i, m in enumerate(mu):
        prod = complex(1.0)
        for jj, m2 in enumerate(mu):
            if jj != i:
                prod *= (1.0 - m2)
        total += -m * prod
    return total


def fixed_space_dimension(group: ReductiveGroupData, k: np.ndarray, y,
                          tol: float = 1e-8) -> int:
    """Number of unit eigenvalues of Ad(k) e^{i ad Y} on p."""
    mu = _p_eigenvalues(group, k, y)
    return int(np.sum(np.abs(mu - 1.0) < tol))


def _p_eigenvalues(group: ReductiveGroupData, k: np.ndarray, y) -> np.ndarray:
    y = np.asarray(y, float)
    pidx = np.array(group.p_idx)
    ad_y = group.ad(y)[np.ix_(pidx, pidx)]
    ad_k = group.adjoint_matrix(np.asarray(k, float))[np.ix_(pidx, pidx)]
    a = ad_k @ scipy.linalg.expm(1j * np.asarray(ad_y, complex))
    return np.linalg.eigvals(a)


def km_root_data(structure: DeltaOneStructure) -> CompactAlgebraData:
    """Root data of k_m with respect to the shared maximal torus."""
    group = structure.group
    gram = group.inner_gram()
    gram_f = ex.to_float(gram)
    rows = group.orthonormalize(np.array([ex.to_float(v)
                                          for v in structure.km_basis]))
    ads = []
    for t in group.torus_idx:
        tt = np.zeros(group.dim)
        tt[t] = 1.0
        ads.append(rows @ gram_f @ group.ad(tt) @ rows.T)
    tg = [[gram[a][b] for b in group.torus_idx] for a in group.torus_idx]
    data = root_system_from_ads(ads, tg, len(structure.km_basis))
    return CompactAlgebraData(group, None, list(group.torus_idx), data)
