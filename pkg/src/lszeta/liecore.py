"""Matrix Lie algebra substrate with exact rational structure constants.

Supported groups: SL(n,R) for n in {2,3}, SO^0(p,q) with p,q >= 1, the real
line R, and finite direct products of these.  The Cartan involution is
X -> -X^T throughout; every basis element is a theta eigenvector, brackets
close exactly over the rationals, and the invariant form B is Tr(XY) for
sl(n,R), Tr(XY)/2 for so(p,q) and xy for R, times an optional positive
rational scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import exactla as ex
from .errors import NotInAlgebra, UnsupportedFamily

Sparse = dict[tuple[int, int], Fraction]

_COORD_TOL = 1e-10
_VALIDATE_TOL = 1e-12


# ---------------------------------------------------------------------------
# sparse exact matrices


def _sp_bracket(a: Sparse, b: Sparse) -> Sparse:
    out: Sparse = {}
    for (i, j), va in a.items():
        for (j2, k), vb in b.items():
            if j == j2:
                out[i, k] = out.get((i, k), Fraction(0)) + va * vb
    for (i, j), vb in b.items():
        for (j2, k), va in a.items():
            if j == j2:
                out[i, k] = out.get((i, k), Fraction(0)) - vb * va
    return {k: v for k, v in out.items() if v != 0}


def _sp_trace_prod(a: Sparse, b: Sparse) -> Fraction:
    tot = Fraction(0)
    for (i, j), va in a.items():
        vb = b.get((j, i))
        if vb is not None:
            tot += va * vb
    return tot


def _sp_to_float(a: Sparse, n: int) -> np.ndarray:
    m = np.zeros((n, n))
    for (i, j), v in a.items():
        m[i, j] = float(v)
    return m


# ---------------------------------------------------------------------------
# family construction

# a family blueprint: basis (sparse exact), reader closures, torus indices


@dataclass
class _Blueprint:
    name: str
    size: int                       # ambient matrices are size x size
    basis: list[Sparse]
    p_count: int                    # first p_count basis elements span p
    reader: Callable                # entry accessor -> list of Fraction coords
    torus_local: list[int]          # indices (into basis) of torus generators
    b_form_scale: Fraction          # B = b_form_scale * Tr(XY)


def _sl_blueprint(n: int) -> _Blueprint:
    if n not in (2, 3):
        raise UnsupportedFamily(f"sl({n},R) not supported; n must be 2 or 3")
    basis: list[Sparse] = []
    # p: diagonal traceless, then symmetric off-diagonal
    for k in range(n - 1):
        basis.append({(k, k): Fraction(1), (n - 1, n - 1): Fraction(-1)})
    sym_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in sym_pairs:
        basis.append({(i, j): Fraction(1), (j, i): Fraction(1)})
    p_count = len(basis)
    # k: antisymmetric
    for i, j in sym_pairs:
        basis.append({(i, j): Fraction(1), (j, i): Fraction(-1)})

    def reader(entry):
        coords = []
        for k in range(n - 1):
            coords.append(entry(k, k))
        for i, j in sym_pairs:
            coords.append((entry(i, j) + entry(j, i)) / 2)
        for i, j in sym_pairs:
            coords.append((entry(i, j) - entry(j, i)) / 2)
        return coords

    # torus of SO(n): rotation in the (0,1) plane (n = 2, 3)
    torus = [p_count + sym_pairs.index((0, 1))]
    return _Blueprint(f"sl{n}", n, basis, p_count, reader, torus, Fraction(1))


def _so_blueprint(p: int, q: int) -> _Blueprint:
    if p < 1 or q < 1:
        raise UnsupportedFamily(f"so({p},{q}) requires p,q >= 1")
    basis: list[Sparse] = []
    for i in range(p):
        for j in range(q):
            basis.append({(i, p + j): Fraction(1), (p + j, i): Fraction(1)})
    p_count = len(basis)
    kp_pairs = [(i, j) for i in range(p) for j in range(i + 1, p)]
    kq_pairs = [(p + i, p + j) for i in range(q) for j in range(i + 1, q)]
    for i, j in kp_pairs + kq_pairs:
        basis.append({(i, j): Fraction(1), (j, i): Fraction(-1)})

    def reader(entry):
        coords = []
        for i in range(p):
            for j in range(q):
                coords.append((entry(i, p + j) + entry(p + j, i)) / 2)
        for i, j in kp_pairs + kq_pairs:
            coords.append((entry(i, j) - entry(j, i)) / 2)
        return coords

    # torus: rotation blocks (2s,2s+1) in SO(p); for odd q the SO(q) blocks
    # start at p+1 so that coordinates p-1 and p are fixed and the
    # centralizer line of the torus in p sits at the matrix position (p-1, p)
    # when p and q are both odd.
    torus = []
    for s in range((p - 1) // 2 if p % 2 else p // 2):
        torus.append(p_count + kp_pairs.index((2 * s, 2 * s + 1)))
    q_offset = 1 if q % 2 else 0
    for s in range((q - 1) // 2 if q % 2 else q // 2):
        i = p + q_offset + 2 * s
        torus.append(p_count + len(kp_pairs) + kq_pairs.index((i, i + 1)))
    return _Blueprint(f"so({p},{q})", p + q, basis, p_count, reader, torus,
                      Fraction(1, 2))


def _line_blueprint() -> _Blueprint:
    basis = [{(0, 0): Fraction(1)}]

    def reader(entry):
        return [entry(0, 0)]

    return _Blueprint("R", 1, basis, 1, reader, [], Fraction(1))


def _parse_descriptor(spec) -> dict:
    if isinstance(spec, dict):
        return spec
    if not isinstance(spec, str):
        raise UnsupportedFamily(f"bad group descriptor {spec!r}")
    s = spec.strip().lower()
    if s in ("r", "line"):
        return {"family": "R"}
    if s.startswith("sl"):
        return {"family": "sl", "n": int(s[2:])}
    if s.startswith("so(") and s.endswith(")"):
        p, q = (int(t) for t in s[3:-1].split(","))
        return {"family": "so", "p": p, "q": q}
    if s.startswith("product:"):
        return {"family": "product",
                "factors": [_parse_descriptor(t) for t in s[8:].split("*")]}
    raise UnsupportedFamily(f"unknown group descriptor {spec!r}")


def _blueprints(desc: dict) -> list[_Blueprint]:
    fam = desc.get("family")
    if fam == "sl":
        return [_sl_blueprint(int(desc["n"]))]
    if fam == "so":
        return [_so_blueprint(int(desc["p"]), int(desc["q"]))]
    if fam == "R":
        return [_line_blueprint()]
    if fam == "product":
        out: list[_Blueprint] = []
        for f in desc["factors"]:
            out.extend(_blueprints(_parse_descriptor(f)))
        return out
    raise UnsupportedFamily(f"unknown family {fam!r}")


# ---------------------------------------------------------------------------
# group data


@dataclass
class ReductiveGroupData:
    """Exact basis, involution, invariant form and brackets of g."""

    family: str
    descriptor: dict
    size: int                                 # ambient matrix size
    basis: list[Sparse]                       # exact basis matrices
    p_idx: list[int]
    k_idx: list[int]
    theta_sign: list[int]                     # -1 on p, +1 on k, per basis slot
    b_gram: ex.Mat                            # exact Gram matrix of B
    torus_idx: list[int]                      # basis indices of torus of k
    struct: list[list[list[tuple[int, Fraction]]]]   # sparse c_{ab}^c
    factor_slices: list[tuple[int, int, int]]  # (coord start, coord stop, size offset)
    b_scale: Fraction
    _reader: Callable = field(repr=False)

    # float caches, filled at build time
    basis_float: np.ndarray = field(default=None, repr=False)
    struct_float: np.ndarray = field(default=None, repr=False)
    b_gram_float: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def m_dim(self) -> int:
        """dim p (the dimension of the symmetric space)."""
        return len(self.p_idx)

    @property
    def n_dim(self) -> int:
        """dim k."""
        return len(self.k_idx)

    # -- coordinates ---------------------------------------------------

    def coords_exact(self, x: Sparse) -> ex.Vec:
        coords = self._reader(lambda i, j: x.get((i, j), Fraction(0)))
        # exact closure check: the reconstruction must match on the nose
        recon: Sparse = {}
        for c, b in zip(coords, self.basis):
            if c:
                for pos, v in b.items():
                    recon[pos] = recon.get(pos, Fraction(0)) + c * v
        recon = {k: v for k, v in recon.items() if v != 0}
        if recon != {k: v for k, v in x.items() if v != 0}:
            raise NotInAlgebra("matrix is not in the rational span of the basis")
        return coords

    def coords_float(self, x: np.ndarray, tol: float = _COORD_TOL) -> np.ndarray:
        coords = np.array(self._reader(lambda i, j: x[i, j]), dtype=float)
        recon = np.tensordot(coords, self.basis_float, axes=1)
        scale = max(1.0, float(np.abs(x).max()))
        if np.abs(recon - x).max() > tol * scale:
            raise NotInAlgebra("matrix leaves the algebra span "
                               f"(residual {np.abs(recon - x).max():.3e})")
        return coords

    def matrix_of(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=float),
                            self.basis_float, axes=1)

    def exp_of(self, coords) -> np.ndarray:
        return scipy.linalg.expm(self.matrix_of(coords))

    # -- brackets and adjoint ------------------------------------------

    def bracket_exact(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> ex.Vec:
        out = [Fraction(0)] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            row = self.struct[a]
            for b, yb in enumerate(y):
                if not yb:
                    continue
                for c, coef in row[b]:
                    out[c] += xa * yb * coef
        return out

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("a,b,abc->c", np.asarray(x, float),
                         np.asarray(y, float), self.struct_float)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad(x) on coordinates."""
        return np.einsum("a,abc->bc", np.asarray(x, float),
                         self.struct_float).T

    def adjoint_matrix(self, g: np.ndarray, tol: float = _COORD_TOL) -> np.ndarray:
        """Matrix of Ad(g): coords -> coords.  Raises NotInAlgebra when
        conjugation by g leaves the algebra."""
        ginv = np.linalg.inv(g)
        cols = [self.coords_float(g @ self.basis_float[b] @ ginv, tol)
                for b in range(self.dim)]
        return np.array(cols).T

    def adjoint_action(self, g: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Ad(g) x in basis coordinates."""
        ginv = np.linalg.inv(g)
        return self.coords_float(g @ self.matrix_of(x) @ ginv)

    def inner(self, x, y) -> float:
        """<x,y> = -B(x, theta y), the positive scalar product."""
        sx = np.asarray(x, float)
        sy = np.asarray(y, float) * np.array(self.theta_sign, float)
        return -float(sx @ self.b_gram_float @ sy)

    def b_form(self, x, y) -> float:
        return float(np.asarray(x, float) @ self.b_gram_float
                     @ np.asarray(y, float))

    def b_form_exact(self, x, y) -> Fraction:
        return ex.dot(ex.mat_vec(self.b_gram, list(y)), list(x))

    def inner_exact(self, x, y) -> Fraction:
        ty = [c * s for c, s in zip(y, self.theta_sign)]
        return -ex.dot(ex.mat_vec(self.b_gram, ty), list(x))

    def inner_gram(self) -> ex.Mat:
        """Exact Gram matrix of <.,.> on the basis."""
        g = [row[:] for row in self.b_gram]
        for a in range(self.dim):
            for b in range(self.dim):
                g[a][b] = -g[a][b] * self.theta_sign[b]
        return g

    def orthonormalize(self, vectors: np.ndarray) -> np.ndarray:
        """Gram-Schmidt w.r.t. <.,.>; rows are coordinate vectors."""
        gram = ex.to_float(self.inner_gram())
        out = []
        vectors = np.asarray(vectors, float)
        if vectors.size == 0:
            return np.zeros((0, self.dim))
        for v in np.atleast_2d(vectors):
            w = v.copy()
            for u in out:
                w = w - (u @ gram @ w) * u
            nrm = np.sqrt(abs(w @ gram @ w))
            if nrm > 1e-10:
                out.append(w / nrm)
        if not out:
            return np.zeros((0, self.dim))
        return np.array(out)


def build_group(spec, b_scale=None) -> ReductiveGroupData:
    """Construct validated group data from a descriptor.

    ``spec`` is a dict like {"family":"so","p":3,"q":1}, a shorthand string
    ("sl3", "so(5,3)", "R", "product:sl3*so(3,1)"), and may carry a
    "b_scale" entry (positive rational) multiplying the invariant form.
    """
    desc = _parse_descriptor(spec)
    if b_scale is None:
        b_scale = desc.get("b_scale", 1)
    b_scale = ex.frac(b_scale)
    if b_scale <= 0:
        raise UnsupportedFamily("b_scale must be positive")
    bps = _blueprints(desc)

    size = sum(bp.size for bp in bps)
    basis: list[Sparse] = []
    p_idx: list[int] = []
    k_idx: list[int] = []
    torus_idx: list[int] = []
    factor_slices = []
    form_scales: list[Fraction] = []
    offset = 0
    for bp in bps:
        start = len(basis)
        for loc, b in enumerate(bp.basis):
            shifted = {(i + offset, j + offset): v for (i, j), v in b.items()}
            if loc < bp.p_count:
                p_idx.append(len(basis))
            else:
                k_idx.append(len(basis))
            basis.append(shifted)
            form_scales.append(bp.b_form_scale * b_scale)
        torus_idx.extend(start + t for t in bp.torus_local)
        factor_slices.append((start, len(basis), offset))
        offset += bp.size

    dim = len(basis)
    theta_sign = [0] * dim
    for i in p_idx:
        theta_sign[i] = -1
    for i in k_idx:
        theta_sign[i] = 1

    readers = [bp.reader for bp in bps]

    def reader(entry):
        coords = []
        off = 0
        for bp, rd in zip(bps, readers):
            coords.extend(rd(lambda i, j, o=off: entry(i + o, j + o)))
            off += bp.size
        return coords

    b_gram = ex.zeros(dim, dim)
    for a in range(dim):
        for b in range(a, dim):
            v = _sp_trace_prod(basis[a], basis[b]) * form_scales[a]
            b_gram[a][b] = v
            b_gram[b][a] = v

    group = ReductiveGroupData(
        family="*".join(bp.name for bp in bps) if len(bps) > 1 else bps[0].name,
        descriptor=desc, size=size, basis=basis, p_idx=p_idx, k_idx=k_idx,
        theta_sign=theta_sign, b_gram=b_gram, torus_idx=torus_idx,
        struct=[], factor_slices=factor_slices, b_scale=b_scale,
        _reader=reader)

    # structure constants, with exact closure verification built in
    struct: list[list[list[tuple[int, Fraction]]]] = \
        [[[] for _ in range(dim)] for _ in range(dim)]
    for a in range(dim):
        for b in range(a + 1, dim):
            prod = _sp_bracket(basis[a], basis[b])
            coords = group.coords_exact(prod)
            entry = [(c, v) for c, v in enumerate(coords) if v != 0]
            struct[a][b] = entry
            struct[b][a] = [(c, -v) for c, v in entry]
    group.struct = struct

    group.basis_float = np.array([_sp_to_float(b, size) for b in basis])
    sf = np.zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            for c, v in struct[a][b]:
                sf[a, b, c] = float(v)
    group.struct_float = sf
    group.b_gram_float = ex.to_float(b_gram)
    return group


# ---------------------------------------------------------------------------
# operations


def bracket(group: ReductiveGroupData, x, y):
    """Lie bracket in basis coordinates (exact when both inputs are exact)."""
    if _is_exact(x) and _is_exact(y):
        return group.bracket_exact([ex.frac(v) for v in x],
                                   [ex.frac(v) for v in y])
    return group.bracket(x, y)


def adjoint_action(group: ReductiveGroupData, g: np.ndarray, x) -> np.ndarray:
    return group.adjoint_action(np.asarray(g, float), np.asarray(x, float))


def _is_exact(v) -> bool:
    return all(isinstance(t, (int, Fraction, np.integer)) for t in v)


def delta_invariant(group: ReductiveGroupData) -> int:
    """Fundamental rank: the dimension of the centralizer of the torus in p."""
    return len(_b_space_exact(group))


def _b_space_exact(group: ReductiveGroupData) -> list[ex.Vec]:
    """Exact basis (over p coordinates) of {Y in p : [Y, t] = 0}."""
    rows: list[ex.Vec] = []
    for t in group.torus_idx:
        # [p, k] lies back in p: one condition row per p-coordinate of
        # [e_p, e_t]
        cols = []
        for pj in group.p_idx:
            vecf = [Fraction(0)] * group.dim
            for c, v in group.struct[pj][t]:
                vecf[c] = v
            cols.append(vecf)
        for pc in group.p_idx:
            rows.append([col[pc] for col in cols])
    if not rows:
        return [e for e in ex.identity(len(group.p_idx))]
    return ex.nullspace(rows)


def b_space(group: ReductiveGroupData) -> list[ex.Vec]:
    """Exact basis of b = {Y in p : [Y,t]=0} as full coordinate vectors."""
    out = []
    for v in _b_space_exact(group):
        w = [Fraction(0)] * group.dim
        for pj, c in zip(group.p_idx, v):
            w[pj] = c
        out.append(w)
    return out


def has_noncompact_center(group: ReductiveGroupData) -> bool:
    """True when the center of g meets p (exact kernel computation)."""
    rows: list[ex.Vec] = []
    for t in range(group.dim):
        cols = []
        for pj in group.p_idx:
            vecf = [Fraction(0)] * group.dim
            for c, v in group.struct[pj][t]:
                vecf[c] = v
            cols.append(vecf)
        for c in range(group.dim):
            rows.append([col[c] for col in cols])
    return bool(ex.nullspace(rows))


@dataclass
class SemisimpleElement:
    """gamma = exp(a) k^{-1} with a in p, k in K and Ad(k) a = a."""

    group: ReductiveGroupData
    a: np.ndarray                    # coordinates in the full basis, p-part
    k: np.ndarray                    # orthogonal matrix, size x size
    a_exact: ex.Vec | None = None
    hform: tuple | None = None       # (c, kappa) for elements of exp(b)T

    def __post_init__(self):
        self.a = np.asarray(self.a, float)
        self.k = np.asarray(self.k, float)
        g = self.group
        if any(abs(self.a[i]) > _VALIDATE_TOL for i in g.k_idx):
            raise NotInAlgebra("a must lie in p")
        ka = g.adjoint_action(self.k, self.a)
        scale = max(1.0, float(np.linalg.norm(self.a)))
        if np.linalg.norm(ka - self.a) > 1e-12 * scale * 10:
            raise NotInAlgebra("Ad(k) a = a fails beyond tolerance")

    @property
    def length(self) -> float:
        return float(np.sqrt(max(0.0, self.group.inner(self.a, self.a))))

    def gamma_matrix(self) -> np.ndarray:
        return self.group.exp_of(self.a) @ np.linalg.inv(self.k)


def identity_element(group: ReductiveGroupData) -> SemisimpleElement:
    return SemisimpleElement(group, np.zeros(group.dim), np.eye(group.size))


def centralizer_algebra(gamma: SemisimpleElement, tol: float = 1e-10):
    """Bases of z(gamma) = z(a) /\\ z(k), split as p(gamma) + k(gamma).

    Returns (z, p_part, k_part) as arrays of coordinate row vectors.  The
    kernel is exact (rational row reduction) when gamma has exact data,
    numerical (SVD) otherwise.
    """
    g = gamma.group
    exact = gamma.a_exact is not None and _is_identity(gamma.k)
    if exact:
        p_part = _exact_centralizer_block(g, gamma.a_exact, g.p_idx, g.k_idx)
        k_part = _exact_centralizer_block(g, gamma.a_exact, g.k_idx, g.p_idx)
        z = p_part + k_part
        return (np.array([ex.to_float(v) for v in z]) if z else np.zeros((0, g.dim)),
                np.array([ex.to_float(v) for v in p_part]) if p_part else np.zeros((0, g.dim)),
                np.array([ex.to_float(v) for v in k_part]) if k_part else np.zeros((0, g.dim)))

    ad_a = g.ad(gamma.a)
    ad_k = g.adjoint_matrix(gamma.k) - np.eye(g.dim)
    parts = []
    for idx in (g.p_idx, g.k_idx):
        sel = np.zeros((g.dim, len(idx)))
        for col, i in enumerate(idx):
            sel[i, col] = 1.0
        m = np.vstack([ad_a @ sel, ad_k @ sel])
        basis = _null_float(m, tol)
        parts.append(basis @ sel.T)
    p_part, k_part = parts
    z = np.vstack([p_part, k_part]) if (len(p_part) or len(k_part)) else np.zeros((0, g.dim))
    return z, p_part, k_part


def _is_identity(k: np.ndarray) -> bool:
    return bool(np.abs(k - np.eye(k.shape[0])).max() < 1e-15)


def _exact_centralizer_block(group, a_exact, idx, out_idx):
    rows = []
    cols = []
    for j in idx:
        col = [Fraction(0)] * group.dim
        ej = [Fraction(0)] * group.dim
        ej[j] = Fraction(1)
        br = group.bracket_exact(a_exact, ej)
        cols.append(br)
    for c in range(group.dim):
        rows.append([col[c] for col in cols])
    kern = ex.nullspace(rows)
    out = []
    for v in kern:
        w = [Fraction(0)] * group.dim
        for j, c in zip(idx, v):
            w[j] = c
        out.append(w)
    return out


def _null_float(m: np.ndarray, tol: float) -> np.ndarray:
    if m.shape[1] == 0:
        return np.zeros((0, 0))
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol * max(1.0, s[0] if len(s) else 1.0)))
    return vh[rank:]


# ---------------------------------------------------------------------------
# exact Casimir traces


def casimir_trace(group: ReductiveGroupData, source_idx: Sequence[int],
                  target_idx: Sequence[int]) -> Fraction:
    """Tr over the target coordinate block of sum_i ad(e_i)^2, e_i running
    over a <.,.>-orthonormal basis of the span of the source block."""
    gram = group.inner_gram()
    gsub = [[gram[a][b] for b in source_idx] for a in source_idx]
    ginv = ex.inv(gsub)
    tset = set(target_idx)
    total = Fraction(0)
    for ia, a in enumerate(source_idx):
        for ib, b in enumerate(source_idx):
            w = ginv[ia][ib]
            if w == 0:
                continue
            acc = Fraction(0)
            for i in target_idx:
                for m, cb in group.struct[b][i]:
                    for c2, ca in group.struct[a][m]:
                        if c2 == i:
                            acc += cb * ca
            total += w * acc
    return total


def heat_coefficient_traces(group: ReductiveGroupData) -> tuple[Fraction, Fraction]:
    """(Tr^p[C^{k,p}], Tr^k[C^{k,k}]), exact."""
    return (casimir_trace(group, group.k_idx, group.p_idx),
            casimir_trace(group, group.k_idx, group.k_idx))
