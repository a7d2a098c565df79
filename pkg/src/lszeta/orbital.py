"""Numerical evaluation of semisimple orbital integrals for the heat
operator, after Bismut's closed formula: a Gaussian integral over a Cartan
subalgebra of the centralizer, against the analytic kernel J built from
A-hat ratios and determinant square roots.

The evaluator decomposes the complexified algebra into joint eigenlines of
the commuting family (ad of the Cartan directions, ad(a), Ad(k)); every
factor of J is then a product over conjugate pairs of lines, with the
square-root branch chosen positive at Y = 0 and continuous in Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.special

from . import exactla as ex
from .errors import (DimensionBudget, NotRegular, QuadratureNotConverged,
                     SingularEigenvalue, UnsupportedFamily)
from .liecore import ReductiveGroupData, SemisimpleElement
from .parabolic import DeltaOneStructure, lift_exterior_powers, casimir_shift
from .rootsweyl import (VirtualCharacter, simultaneous_eigenblocks,
                        torus_nodes)

DEFAULT_RANK_BUDGET = 4
_FIX_TOL = 1e-8


def ahat(x: np.ndarray) -> np.ndarray:
    """(x/2)/sinh(x/2), stable near zero."""
    x = np.asarray(x, float)
    half = x / 2
    small = np.abs(half) < 1e-6
    out = np.empty_like(x)
    out[small] = 1.0 / (1.0 + half[small] ** 2 / 6.0)
    out[~small] = half[~small] / np.sinh(half[~small])
    return out


# ---------------------------------------------------------------------------
# characters usable by the quadrature


class CharacterOnTorus:
    """Virtual character given by its weight map on the standard torus;
    usable whenever the integration Cartan sits inside that torus."""

    def __init__(self, char: VirtualCharacter):
        self.char = char

    def values(self, ev: "JGammaEvaluator", u_nodes: np.ndarray) -> np.ndarray:
        if ev.u_to_torus is None or ev.kappa is None:
            raise UnsupportedFamily(
                "weight-map characters need an element of exp(b)T")
        ys = u_nodes @ ev.u_to_torus
        return self.char.evaluate_nodes(ev.kappa, ys)

    def value_at_k(self, ev: "JGammaEvaluator") -> complex:
        return self.values(ev, np.zeros((1, ev.rank)))[0]


class NumberOperatorCharacter:
    """Supertrace of N tau(k^{-1}) e^{-i tau(Y)} over the exterior algebra of
    p*, evaluated through the derivative-of-determinant identity; valid for
    any integration Cartan."""

    def values(self, ev: "JGammaEvaluator", u_nodes: np.ndarray) -> np.ndarray:
        out = np.empty(len(u_nodes), complex)
        dim_p = ev.adk_p.shape[0]
        for n, u in enumerate(np.atleast_2d(u_nodes)):
            ad_y = np.zeros((dim_p, dim_p))
            for c, m in zip(u, ev.ad_t_p):
                ad_y = ad_y + float(c) * m
            a = ev.adk_p @ scipy.linalg.expm(1j * np.asarray(ad_y, complex))
            mu = np.linalg.eigvals(a)
            tot = 0.0 + 0.0j
            for i, m in enumerate(mu):
                prod = 1.0 + 0.0j
                for jj, m2 in enumerate(mu):
                    if jj != i:
                        prod *= (1.0 - m2)
                tot += -m * prod
            out[n] = tot
        return out


# ---------------------------------------------------------------------------
# the J evaluator


@dataclass
class _LineSet:
    # conjugate-pair data: arrays over canonical pair representatives
    nu: np.ndarray          # (npairs, rank) weights in the ON Cartan coords
    phi: np.ndarray         # (npairs,) angles of Ad(k^{-1}) eigenvalues e^{-i phi}
    mult: np.ndarray        # (npairs,) multiplicities
    lone_nu: np.ndarray     # self-conjugate lines with Ad(k^{-1}) eigenvalue -1
    lone_mult: np.ndarray


@dataclass
class JGammaEvaluator:
    """Precomputed eigen-data of one semisimple class for Bismut's kernel."""

    group: ReductiveGroupData
    rank: int                         # dim of the integration Cartan
    dim_z_gamma: int
    dim_k_gamma: int
    a_norm: float
    half_det_z0: float                # |det(1-Ad(gamma))|^{1/2} on z0-perp
    p_fixed: _LineSet                 # p(gamma): phi = 0 lines, A-hat factors
    k_fixed: _LineSet
    p_moved: _LineSet                 # p0-perp(gamma)
    k_moved: _LineSet
    k_gamma_pos_roots: np.ndarray     # (nroots, rank) for the Weyl reduction
    kappa: np.ndarray | None          # torus coordinates of k when k in T
    u_to_torus: np.ndarray | None     # ON Cartan coords -> torus coords
    ad_t_p: list[np.ndarray] = field(default_factory=list)
    adk_p: np.ndarray | None = None

    def j_values(self, u_nodes: np.ndarray) -> np.ndarray:
        """J at the Cartan points with ON coordinates ``u_nodes`` (rows)."""
        u = np.atleast_2d(np.asarray(u_nodes, float))
        n = len(u)
        out = np.full(n, 1.0 / self.half_det_z0, dtype=complex)

        # A-hat ratio over the fixed lines, positive square root
        ratio = np.ones(n)
        for lines, power in ((self.p_fixed, +1), (self.k_fixed, -1)):
            if len(lines.nu):
                z = u @ lines.nu.T
                ratio *= np.prod(ahat(z) ** (2 * lines.mult * power), axis=1)
            # lone lines of the fixed part have nu = 0 and contribute 1
        out *= np.sqrt(ratio)

        # determinant square-root bracket over the moved lines
        denom0 = 1.0
        for lines in (self.k_moved, self.p_moved):
            denom0 *= np.prod((2.0 * np.abs(np.sin(lines.phi / 2.0)))
                              ** lines.mult) if len(lines.phi) else 1.0
            denom0 *= np.prod(np.full(len(lines.lone_nu), math.sqrt(2.0))
                              ** lines.lone_mult) if len(lines.lone_nu) else 1.0
        for lines, power in ((self.k_moved, +1), (self.p_moved, -1)):
            if len(lines.nu):
                z = u @ lines.nu.T              # (n, npairs)
                sgn = np.sign(np.sin(lines.phi / 2.0))
                w = 2j * np.sinh((z - 1j * lines.phi) / 2.0) * sgn
                out *= np.prod(w ** (lines.mult * power), axis=1)
            if len(lines.lone_nu):
                z = u @ lines.lone_nu.T
                w = np.sqrt(1.0 + np.exp(z))
                out *= np.prod(w ** (lines.lone_mult * power), axis=1)
        out /= denom0
        return out

    def pi_squared(self, u_nodes: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u_nodes, float))
        if not len(self.k_gamma_pos_roots):
            return np.ones(len(u))
        z = u @ self.k_gamma_pos_roots.T
        return np.prod(z * z, axis=1)


def _inner_on_complement(group, rows: np.ndarray) -> np.ndarray:
    """<.,.>-orthonormal basis of the orthogonal complement of the span."""
    gram = ex.to_float(group.inner_gram())
    if rows is None or not len(rows):
        full = np.eye(group.dim)
        return group.orthonormalize(full)
    kern = scipy.linalg.null_space(rows @ gram, rcond=1e-10).T
    return group.orthonormalize(kern)


def _classify_lines(ops_nu, op_k, basis_rows, tol=_FIX_TOL):
    """Joint eigenlines of the Cartan ads and Ad(k^{-1}) on a subspace.

    Returns (fixed, moved) as _LineSet, where 'fixed' collects the
    Ad(k^{-1})-eigenvalue-1 lines."""
    m = basis_rows.shape[0]
    if m == 0:
        empty = _LineSet(np.zeros((0, len(ops_nu))), np.zeros(0),
                         np.zeros(0, int), np.zeros((0, len(ops_nu))),
                         np.zeros(0, int))
        return empty, empty, 0
    ops = [np.asarray(o, complex) for o in ops_nu] + [np.asarray(op_k, complex)]
    blocks = simultaneous_eigenblocks(ops, tol=1e-9)
    fixed, moved = [], []
    n_fixed = 0
    for labels, q in blocks:
        nus = np.array([l.imag for l in labels[:-1]])
        zeta = labels[-1]
        mult = q.shape[1]
        if abs(zeta - 1.0) < tol:
            fixed.append((nus, 0.0, mult))
            n_fixed += mult
        else:
            phi = -np.angle(zeta)        # eigenvalue e^{-i phi}
            moved.append((nus, phi, mult))
    return _pack_lines(fixed, len(ops_nu)), _pack_lines(moved, len(ops_nu)), n_fixed


def _norm_key(nus, phi):
    key_phi = math.pi if abs(abs(phi) - math.pi) < 1e-9 else phi
    return (tuple(round(float(x), 8) for x in nus), round(float(key_phi), 8))


def _pack_lines(lines, rank) -> _LineSet:
    """Collapse eigenlines into canonical conjugate-pair representatives,
    keeping full-precision labels."""
    mults: dict = {}
    reps: dict = {}
    for nus, phi, mult in lines:
        k = _norm_key(nus, phi)
        mults[k] = mults.get(k, 0) + mult
        reps.setdefault(k, (np.asarray(nus, float), float(phi)))
    pair_nu, pair_phi, pair_mult = [], [], []
    lone_nu, lone_mult = [], []
    for key in sorted(mults):
        mult = mults[key]
        nus, phi = reps[key]
        conj = _norm_key(-nus, -phi)
        if conj == key:
            # self-conjugate: nu = 0 and a real eigenvalue; only -1 is legal
            # here (eigenvalue 1 lines never reach the moved set)
            if abs(abs(phi) - math.pi) < 1e-8:
                lone_nu.append(nus)
                lone_mult.append(mult)
            elif abs(phi) >= 1e-8:
                raise SingularEigenvalue(
                    f"unpaired eigenline with angle {phi}")
            continue
        if mults.get(conj, 0) != mult:
            raise SingularEigenvalue("conjugate eigenlines do not pair up")
        if key < conj:
            pair_nu.append(nus)
            pair_phi.append(phi)
            pair_mult.append(mult)
    return _LineSet(
        np.array(pair_nu, float).reshape(len(pair_nu), rank),
        np.array(pair_phi, float),
        np.array(pair_mult, int),
        np.array(lone_nu, float).reshape(len(lone_nu), rank),
        np.array(lone_mult, int))


def _restrict(op: np.ndarray, rows: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Matrix of op on the span of <,>-orthonormal rows."""
    return rows @ gram @ op @ rows.T


def build_evaluator(group: ReductiveGroupData, a: np.ndarray,
                    ad_k: np.ndarray, cartan_rows: np.ndarray,
                    kappa: np.ndarray | None = None,
                    u_to_torus: np.ndarray | None = None) -> JGammaEvaluator:
    """Assemble the eigen-data of gamma = exp(a) k^{-1}.

    ``ad_k`` is Ad(k) on coordinates; ``cartan_rows`` is a
    <,>-orthonormal basis of a Cartan subalgebra of k(gamma)."""
    gram = ex.to_float(group.inner_gram())
    dim = group.dim
    ad_a = group.ad(np.asarray(a, float))
    adk_inv = np.linalg.inv(ad_k)
    a_norm = math.sqrt(max(0.0, group.inner(a, a)))

    # z0 = ker ad(a), theta-stable; complement carries the rigid determinant
    if a_norm > 1e-12:
        z0_rows = group.orthonormalize(scipy.linalg.null_space(ad_a, rcond=1e-9).T)
        z0p_rows = _inner_on_complement(group, z0_rows)
        if len(z0p_rows):
            ad_gamma = scipy.linalg.expm(ad_a) @ adk_inv
            restr = _restrict(ad_gamma, z0p_rows, gram)
            half_det = math.sqrt(abs(np.linalg.det(np.eye(len(restr)) - restr)))
        else:
            half_det = 1.0
    else:
        z0_rows = group.orthonormalize(np.eye(dim))
        half_det = 1.0

    # split z0 into its p and k parts (theta-stability makes this exact)
    theta = np.array(group.theta_sign, float)
    p_rows = group.orthonormalize(z0_rows * ((1 - theta) / 2))
    k_rows = group.orthonormalize(z0_rows * ((1 + theta) / 2))

    cartan_rows = np.atleast_2d(cartan_rows) if np.size(cartan_rows) else \
        np.zeros((0, dim))
    rank = len(cartan_rows)
    ops_p, ops_k = [], []
    for t in cartan_rows:
        ad_t = group.ad(t)
        ops_p.append(_restrict(ad_t, p_rows, gram))
        ops_k.append(_restrict(ad_t, k_rows, gram))
    p_fixed, p_moved, np_fix = _classify_lines(
        ops_p, _restrict(adk_inv, p_rows, gram), p_rows)
    k_fixed, k_moved, nk_fix = _classify_lines(
        ops_k, _restrict(adk_inv, k_rows, gram), k_rows)

    pos_roots = []
    for nu, mult in zip(k_fixed.nu, k_fixed.mult):
        if np.linalg.norm(nu) > 1e-8:
            pos_roots.extend([nu] * int(mult))
    pidx = np.array(group.p_idx)
    ad_t_p = [group.ad(t)[np.ix_(pidx, pidx)] for t in cartan_rows]
    return JGammaEvaluator(
        group=group, rank=rank, dim_z_gamma=np_fix + nk_fix,
        dim_k_gamma=nk_fix, a_norm=a_norm, half_det_z0=half_det,
        p_fixed=p_fixed, k_fixed=k_fixed, p_moved=p_moved, k_moved=k_moved,
        k_gamma_pos_roots=np.array(pos_roots, float).reshape(len(pos_roots), rank),
        kappa=None if kappa is None else np.asarray(kappa, float),
        u_to_torus=u_to_torus, ad_t_p=ad_t_p,
        adk_p=ad_k[np.ix_(pidx, pidx)])


def evaluator_for_hform(structure: DeltaOneStructure, c: float,
                        kappa) -> JGammaEvaluator:
    """Evaluator for gamma = exp(c a_1) k^{-1}, k = exp(kappa) in T."""
    group = structure.group
    kappa = np.asarray(kappa, float)
    kc = np.zeros(group.dim)
    for r, t in enumerate(group.torus_idx):
        kc[t] = kappa[r]
    ad_k = scipy.linalg.expm(group.ad(kc))
    torus_rows = structure.torus_coords_matrix()
    on_rows = group.orthonormalize(torus_rows)
    # ON coords -> standard torus coordinates
    gram = ex.to_float(group.inner_gram())
    coeff = on_rows @ gram @ torus_rows.T        # <on_m, t_j> (diag gram)
    tg = torus_rows @ gram @ torus_rows.T
    u_to_torus = coeff @ np.linalg.inv(tg)
    a = c * structure.a1_float()
    return build_evaluator(group, a, ad_k, on_rows, kappa=kappa,
                           u_to_torus=u_to_torus)


def cartan_of_centralizer(group: ReductiveGroupData, a: np.ndarray,
                          ad_k: np.ndarray) -> np.ndarray:
    """A <,>-orthonormal Cartan subalgebra of k(gamma), grown greedily from
    the part of the standard torus that centralizes gamma."""
    gram = ex.to_float(group.inner_gram())
    dim = group.dim
    kidx = np.array(group.k_idx)
    sel = np.zeros((dim, len(kidx)))
    for col, i in enumerate(kidx):
        sel[i, col] = 1.0
    ad_a = group.ad(np.asarray(a, float))
    cond = np.vstack([ad_a @ sel, (ad_k - np.eye(dim)) @ sel])
    kern = scipy.linalg.null_space(cond, rcond=1e-10)
    kg_rows = group.orthonormalize((sel @ kern).T)     # basis of k(gamma)
    if not len(kg_rows):
        return np.zeros((0, dim))

    torus_rows = np.zeros((len(group.torus_idx), dim))
    for r, t in enumerate(group.torus_idx):
        torus_rows[r, t] = 1.0
    conds = np.vstack([ad_a @ torus_rows.T, (ad_k - np.eye(dim)) @ torus_rows.T])
    seed_kern = scipy.linalg.null_space(conds, rcond=1e-10)
    current = group.orthonormalize((torus_rows.T @ seed_kern).T)
    current = [v for v in current]

    while True:
        rows = [np.asarray(group.ad(t), float) @ kg_rows.T for t in current]
        rows.append(np.array([gram @ t for t in current]) @ kg_rows.T
                    if current else np.zeros((0, kg_rows.shape[0])))
        stacked = np.vstack(rows) if rows else np.zeros((0, kg_rows.shape[0]))
        kern = scipy.linalg.null_space(stacked, rcond=1e-10) \
            if stacked.size else np.eye(kg_rows.shape[0])
        if kern.shape[1] == 0:
            break
        new = group.orthonormalize((kg_rows.T @ kern[:, :1]).T)
        if not len(new):
            break
        current.append(new[0])
    return np.array(current)


# ---------------------------------------------------------------------------
# the orbital integral


@dataclass
class OrbitalRequest:
    group: ReductiveGroupData
    evaluator: JGammaEvaluator
    character: object                  # CharacterOnTorus | NumberOperatorCharacter
    t: float
    quad_order: int = 20
    rank_budget: int = DEFAULT_RANK_BUDGET

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("time must be positive")


@dataclass
class OrbitalResult:
    value: float
    convergence_estimate: float
    path: str
    orders: tuple[int, ...] = ()


def j_gamma(evaluator: JGammaEvaluator, u) -> float:
    """J at a single Cartan point given in ON coordinates."""
    val = evaluator.j_values(np.atleast_2d(np.asarray(u, float)))[0]
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise SingularEigenvalue(f"J has spurious imaginary part {val.imag}")
    return float(val.real)


def _weyl_norm_constant(evaluator: JGammaEvaluator) -> float:
    """vol(K0(gamma)/T(gamma)) / |W|, calibrated by the Gaussian identity:
    the torus reduction must reproduce (2 pi)^{dim k(gamma)/2} on exp(-|Y|^2/2)."""
    r = evaluator.rank
    if r == 0:
        return 1.0
    order = max(8, 2 * int(np.sum(evaluator.k_fixed.mult)) + 2)
    nodes, weights = torus_nodes(r, order)
    u = math.sqrt(2.0) * nodes
    integral = float(weights @ evaluator.pi_squared(u)) * 2.0 ** (r / 2)
    return (2.0 * math.pi) ** (evaluator.dim_k_gamma / 2) / integral


def _reduced_integral(evaluator: JGammaEvaluator, character, t: float,
                      order: int) -> complex:
    """integral over k(gamma) of J(Y) char(Y) exp(-|Y|^2/2t) dY, reduced to
    the Cartan; fixed node order with compensated summation."""
    r = evaluator.rank
    if r == 0:
        return complex(character.values(evaluator, np.zeros((1, 0)))[0])
    nodes, weights = torus_nodes(r, order)
    u = math.sqrt(2.0 * t) * nodes
    vals = evaluator.j_values(u) * character.values(evaluator, u) \
        * evaluator.pi_squared(u)
    total = complex(math.fsum(weights * vals.real),
                    math.fsum(weights * vals.imag))
    return total * (2.0 * t) ** (r / 2) * _weyl_norm_constant(evaluator)


def bismut_orbital_integral(request: OrbitalRequest) -> OrbitalResult:
    """Heat-operator orbital integral by torus-reduced Gauss-Hermite
    quadrature with order doubling, including the closed heat-coefficient
    prefactor."""
    ev = request.evaluator
    group = request.group
    if ev.rank > request.rank_budget:
        raise DimensionBudget(
            f"Cartan rank {ev.rank} exceeds the tensor budget {request.rank_budget}")
    t = request.t
    from .liecore import heat_coefficient_traces
    trp, trk = heat_coefficient_traces(group)
    pref = (2 * math.pi * t) ** (-ev.dim_z_gamma / 2) * math.exp(
        -ev.a_norm ** 2 / (2 * t)
        + t / 16 * float(trp) + t / 48 * float(trk))

    orders = (request.quad_order, 2 * request.quad_order, 4 * request.quad_order)
    vals = [pref * _reduced_integral(ev, request.character, t, n)
            for n in orders]
    est = abs(vals[2] - vals[1])
    value = vals[2]
    if abs(value.imag) > 1e-8 * max(1.0, abs(value)):
        raise SingularEigenvalue(
            f"orbital integral has imaginary part {value.imag:.2e}")
    if est > 1e-6 * max(1.0, abs(value)):
        raise QuadratureNotConverged(
            f"estimate {est:.2e} after doubling twice (orders {orders})")
    return OrbitalResult(float(value.real), float(est), "quadrature", orders)


def abelian_orbital_integral(length: float, t: float) -> float:
    """Heat trace of the real line at a translation class."""
    return (2 * math.pi * t) ** -0.5 * math.exp(-length ** 2 / (2 * t))


# ---------------------------------------------------------------------------
# closed forms


def regularity_angles(structure: DeltaOneStructure, kappa) -> float:
    """|det(1 - Ad(k^{-1}))| over m/t: the regularity certificate of k,
    assembled from the p_m weights and the roots of k_m."""
    kappa = np.asarray(kappa, float)
    det = 1.0
    for w, mult in structure.pm_char.weights.items():
        phi = float(np.array([float(c) for c in w]) @ kappa)
        det *= abs(1.0 - np.exp(-1j * phi)) ** mult
    for w in _km_root_angles(structure):
        phi = float(w @ kappa)
        det *= abs(1.0 - np.exp(-1j * phi))
    return det


def _km_root_angles(structure: DeltaOneStructure) -> np.ndarray:
    cache = getattr(structure, "_km_roots_cache", None)
    if cache is None:
        from .parabolic import km_root_data
        data = km_root_data(structure)
        cache = np.array([[float(c) for c in w] for w in data.roots.roots],
                         float).reshape(-1, structure.rank)
        object.__setattr__(structure, "_km_roots_cache", cache)
    return cache


def closed_form_trace(structure: DeltaOneStructure, c: float, kappa,
                      j: int, t: float, reg_tol: float = 1e-8) -> float:
    """Closed geometric formula for the supertraced orbital integral of the
    alternating companion of the j-th exterior power, for a regular class
    exp(c a_1) k^{-1} with k regular in M."""
    kappa = np.asarray(kappa, float)
    if abs(c) < 1e-12:
        raise NotRegular("the class must be nonelliptic (c != 0)")
    if regularity_angles(structure, kappa) < reg_tol:
        raise NotRegular("k is singular in M; the point-fiber formula "
                         "does not apply")
    casimir, _ = casimir_shift(structure, j)
    lift = lift_exterior_powers(structure)[j]
    char_k = lift.char.evaluate(kappa, np.zeros(structure.rank))
    if abs(char_k.imag) > 1e-10 * max(1.0, abs(char_k)):
        raise SingularEigenvalue("holonomy character is not real")
    angles = structure.angles_from_kappa(kappa)
    from .parabolic import halfdet_from_angles
    halfdet = halfdet_from_angles(c, angles, structure.alpha_norm)
    return ((2 * math.pi * t) ** -0.5
            * math.exp(-c * c / (2 * t)
                       + t / 16 * float(structure.u_perp_trace)
                       - t / 2 * float(casimir))
            * char_k.real / halfdet)


def laplace_beltrami_special(length: float, t: float,
                             euler_max_factor: float = 1.0) -> float:
    """Number-operator supertrace in the split product form: a pure
    one-dimensional heat factor times a supplied Euler-form density."""
    return -abelian_orbital_integral(length, t) * euler_max_factor


def gaussian_time_integral(b1: float, b2: float) -> float:
    """int_0^infty exp(-b1/t - b2 t) t^{-3/2} dt, in closed form."""
    if b1 <= 0 or b2 < 0:
        raise ValueError("need b1 > 0 and b2 >= 0")
    return math.sqrt(math.pi / b1) * math.exp(-2.0 * math.sqrt(b1 * b2))


def gaussian_time_integral_quadrature(b1: float, b2: float) -> float:
    """Adaptive-quadrature evaluation of the same integral (the testing
    oracle for the closed form)."""
    val, _ = scipy.integrate.quad(
        lambda t: math.exp(-b1 / t - b2 * t) * t ** -1.5, 0.0, np.inf,
        limit=200)
    return val


# ---------------------------------------------------------------------------
# geodesic-side Selberg trace assembly


def selberg_trace_geodesic_side(dataset, structure: DeltaOneStructure,
                                j: int, t: float,
                                identity_term: float = 0.0) -> dict:
    """Sum of volume-weighted closed-form orbital contributions over the
    classes of a length-spectrum dataset, with an exponential tail bound for
    the part beyond the cutoff.  The identity contribution is an external
    input (it requires curvature-form volume data outside this artifact)."""
    total = complex(identity_term)
    terms = []
    for cl in dataset.classes:
        kappa = structure.kappa_from_angles(cl.holonomy_angles)
        tr = closed_form_trace(structure, cl.length, kappa, j, t)
        weight = float(cl.index) * cl.length
        terms.append(weight * complex(cl.trace_rho) * tr)
    total += complex(math.fsum(x.real for x in terms),
                     math.fsum(x.imag for x in terms))
    bound = _trace_tail_bound(dataset, structure, t)
    return {"value": total, "tail_bound": bound, "terms": len(terms)}


def _trace_tail_bound(dataset, structure: DeltaOneStructure, t: float) -> float:
    """Upper envelope for the omitted classes: counting growth exp(cL),
    Gaussian decay exp(-L^2/2t), holonomy numerators at most 4^l, and the
    determinant lower bound at the cutoff."""
    counting = getattr(dataset, "counting", None)
    if counting is None:
        return math.inf
    l0 = dataset.cutoff_length
    alpha = structure.alpha_norm
    ll = structure.l
    if alpha * l0 < 1e-12:
        return math.inf
    denom = (1.0 - math.exp(-alpha * l0)) ** (2 * ll)
    k_env = counting.prefactor * counting.rank * (4.0 ** ll) / denom
    c_eff = counting.rate - ll * alpha
    # integral of L exp(c_eff L - L^2/2t) over (l0, inf), closed form
    z = (l0 - c_eff * t) / math.sqrt(2.0 * t)
    q = 0.5 * scipy.special.erfc(z)
    gauss = t * math.exp(c_eff * l0 - l0 * l0 / (2 * t))
    rest = c_eff * t * math.sqrt(2 * math.pi * t) * \
        math.exp(c_eff ** 2 * t / 2) * q
    return k_env * (2 * math.pi * t) ** -0.5 * (gauss + max(rest, 0.0))
