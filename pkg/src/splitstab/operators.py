"""Diagonal-norm summation-by-parts operators and multi-block grids.

Three families are provided on the reference interval [0, 1]:

* ``csbp``: classical finite-difference SBP operators with a central interior
  stencil of order 2p and boundary closures of order p (p = 1..4),
* ``circulant``: periodic central differences of order 2, 4, 6 or 8,
* ``lgl``: Legendre-Gauss-Lobatto collocation elements of degree p.

Every operator satisfies ``Q + Q^T = E`` with ``Q = H D``. The CSBP closures
are obtained by solving the accuracy conditions for the unknown closure
entries directly (they are linear in the norm weights and in the skew part of
``Q``), so no coefficient tables are hard coded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb

import numpy as np
from numpy.polynomial import legendre as npleg


class Family(str, enum.Enum):
    CSBP = "csbp"
    CIRCULANT = "circulant"
    LGL = "lgl"


class OperatorError(ValueError):
    """Raised when an operator cannot be built for the requested parameters."""


# minimum node counts for the CSBP closures (two closures of 2p rows each
# plus room for at least one interior row on each side)
CSBP_MIN_NODES = {1: 3, 2: 9, 3: 13, 4: 17}


@dataclass(frozen=True)
class SbpOperator:
    """A single SBP operator on the reference interval [0, 1].

    ``h_diag`` holds the diagonal of ``H`` and ``d_mat`` the dense difference
    matrix. For circulant operators the nodes are ``i / n`` (the right end of
    the interval is identified with the left one) and ``E`` vanishes.
    """

    family: Family
    p: int
    nodes: np.ndarray
    h_diag: np.ndarray
    d_mat: np.ndarray
    e_mat: np.ndarray
    tl: np.ndarray
    tr: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def q_mat(self) -> np.ndarray:
        return self.h_diag[:, None] * self.d_mat

    @property
    def periodic(self) -> bool:
        return self.family is Family.CIRCULANT


def central_coefficients(order: int) -> np.ndarray:
    """Coefficients ``c_1..c_m`` of the central first-derivative stencil.

    The stencil is ``(D u)_i = sum_k c_k (u_{i+k} - u_{i-k}) / h``.
    """
    if order < 2 or order % 2:
        raise OperatorError(f"central stencil order must be even and >= 2, got {order}")
    m = order // 2
    k = np.arange(1, m + 1, dtype=float)
    # Taylor conditions: sum_k 2 c_k k^(2l-1) = delta_{l,1}
    a = np.array([2.0 * k ** (2 * ell - 1) for ell in range(1, m + 1)])
    rhs = np.zeros(m)
    rhs[0] = 1.0
    return np.linalg.solve(a, rhs)


def _boundary_vectors(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tl = np.zeros(n)
    tr = np.zeros(n)
    tl[0] = 1.0
    tr[-1] = 1.0
    return tl, tr, np.outer(tr, tr) - np.outer(tl, tl)


def _csbp_closure(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Solve for the left closure of the CSBP operator of degree ``p``.

    Returns the ``r = 2p`` boundary norm weights (unit spacing) and the
    ``r x (r + p)`` block of ``Q`` rows touching the boundary.

    Unknowns are the strictly upper entries of the skew part ``S`` inside the
    ``r x r`` block together with the weights. Entries of ``S`` that reach
    into the interior are fixed by skew symmetry with the interior stencil.
    The resulting system is linear. For p >= 3 it is underdetermined and the
    minimum-norm solution is used.
    """
    r = 2 * p
    c = central_coefficients(2 * p)
    width = r + p
    xs = np.arange(width, dtype=float)
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    n_s = len(pairs)
    n_unk = n_s + r

    rows = []
    rhs = []
    for i in range(r):
        for k in range(p + 1):
            row = np.zeros(n_unk)
            known = 0.0
            xk = xs**k
            for idx, (a, b) in enumerate(pairs):
                if a == i:
                    row[idx] += xk[b]
                elif b == i:
                    row[idx] -= xk[a]
            # coupling into the interior (columns >= r) from skew symmetry
            for j in range(r, width):
                if 0 < j - i <= p:
                    known += c[j - i - 1] * xk[j]
            # E/2 contributes only in the first row
            if i == 0:
                known += -0.5 * xk[0]
            if k > 0:
                row[n_s + i] -= k * xs[i] ** (k - 1)
            rows.append(row)
            rhs.append(-known)
    amat = np.array(rows)
    bvec = np.array(rhs)
    # row scaling leaves the minimum-norm solution of a consistent system unchanged
    scale = np.linalg.norm(amat, axis=1)
    amat /= scale[:, None]
    bvec /= scale
    sol, *_ = np.linalg.lstsq(amat, bvec, rcond=None)
    resid = np.abs(amat @ sol - bvec).max()
    if resid > 1e-10:
        raise OperatorError(f"CSBP closure system for p={p} is inconsistent (residual {resid:.2e})")

    hb = sol[n_s:]
    if np.any(hb <= 0):
        raise OperatorError(f"CSBP closure for p={p} has a nonpositive norm weight")
    qb = np.zeros((r, width))
    for idx, (a, b) in enumerate(pairs):
        qb[a, b] = sol[idx]
        qb[b, a] = -sol[idx]
    for i in range(r):
        for j in range(r, width):
            if 0 < j - i <= p:
                qb[i, j] = c[j - i - 1]
    qb[0, 0] = -0.5
    return hb, qb


def build_csbp(p: int, n_nodes: int) -> SbpOperator:
    """Classical SBP operator of boundary order ``p`` and interior order ``2p``."""
    if p not in CSBP_MIN_NODES:
        raise OperatorError(f"CSBP degree must be in 1..4, got {p}")
    nmin = CSBP_MIN_NODES[p]
    if n_nodes < nmin:
        raise OperatorError(f"CSBP p={p} needs at least {nmin} nodes, got {n_nodes}")

    n = n_nodes
    r = 2 * p
    c = central_coefficients(2 * p)
    hb, qb = _csbp_closure(p)

    hd = np.ones(n)
    hd[:r] = hb
    hd[n - r :] = hb[::-1]

    q = np.zeros((n, n))
    for i in range(r, n - r):
        for k in range(1, p + 1):
            q[i, i + k] = c[k - 1]
            q[i, i - k] = -c[k - 1]
    q[:r, : r + p] = qb
    # right closure by the antisymmetric reflection Q_{n-1-i, n-1-j} = -Q_{ij}
    q[n - r :, n - r - p :] = -qb[::-1, ::-1]

    h = 1.0 / (n - 1)
    x = np.linspace(0.0, 1.0, n)
    tl, tr, e = _boundary_vectors(n)
    d = q / (h * hd[:, None])
    return SbpOperator(Family.CSBP, p, x, h * hd, d, e, tl, tr)


def build_circulant(order: int, n_nodes: int, h: float | None = None) -> SbpOperator:
    """Periodic central difference of the given order with ``H = h I``.

    With ``h`` omitted the nodes ``i / n`` cover the periodic unit interval.
    """
    if order not in (2, 4, 6, 8):
        raise OperatorError(f"circulant order must be 2, 4, 6 or 8, got {order}")
    if n_nodes <= order:
        raise OperatorError(f"circulant order {order} needs more than {order} nodes")
    n = n_nodes
    if h is None:
        h = 1.0 / n
    c = central_coefficients(order)
    q = np.zeros((n, n))
    idx = np.arange(n)
    for k, ck in enumerate(c, start=1):
        q[idx, (idx + k) % n] += ck
        q[idx, (idx - k) % n] -= ck
    x = h * np.arange(n)
    tl = np.zeros(n)
    tr = np.zeros(n)
    return SbpOperator(Family.CIRCULANT, order, x, np.full(n, h), q / h, np.zeros((n, n)), tl, tr)


def lgl_nodes_weights(p: int, tol: float = 1e-14, maxiter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """LGL nodes and weights on [-1, 1] for polynomial degree ``p``.

    Interior nodes are roots of P_p' found by Newton iteration started from
    the Chebyshev-Gauss-Lobatto points.
    """
    if p < 1:
        raise OperatorError("LGL degree must be >= 1")
    cp = np.zeros(p + 1)
    cp[p] = 1.0
    d1 = npleg.legder(cp)
    d2 = npleg.legder(cp, 2)
    x = -np.cos(np.pi * np.arange(p + 1) / p)
    inner = x[1:-1].copy()
    for it in range(maxiter):
        if inner.size == 0:
            break
        step = npleg.legval(inner, d1) / npleg.legval(inner, d2)
        inner -= step
        if np.max(np.abs(step)) < tol:
            break
    else:
        raise OperatorError(f"LGL Newton iteration for p={p} did not converge (last step {np.max(np.abs(step)):.2e})")
    x[1:-1] = inner
    pv = npleg.legval(x, cp)
    w = 2.0 / (p * (p + 1) * pv**2)
    return x, w


def build_lgl(p: int) -> SbpOperator:
    """LGL collocation element of degree ``p`` mapped to [0, 1]."""
    if not 1 <= p <= 15:
        raise OperatorError(f"LGL degree must be in 1..15, got {p}")
    xi, w = lgl_nodes_weights(p)
    cp = np.zeros(p + 1)
    cp[p] = 1.0
    pv = npleg.legval(xi, cp)
    n = p + 1
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = pv[i] / (pv[j] * (xi[i] - xi[j]))
    d[0, 0] = -p * (p + 1) / 4.0
    d[-1, -1] = p * (p + 1) / 4.0
    tl, tr, e = _boundary_vectors(n)
    return SbpOperator(Family.LGL, p, 0.5 * (xi + 1.0), 0.5 * w, 2.0 * d, e, tl, tr)


def build_operator(family: str | Family, p: int, n_nodes: int | None = None) -> SbpOperator:
    family = Family(family)
    if family is Family.CSBP:
        return build_csbp(p, n_nodes)
    if family is Family.CIRCULANT:
        return build_circulant(p, n_nodes)
    return build_lgl(p)


@dataclass(frozen=True)
class Grid:
    """Global grid made of affine copies of one operator.

    ``interfaces`` lists node pairs ``(left, right)`` where ``left`` is the
    last node of a block and ``right`` the first node of the next block. For a
    periodic multi-block (or single-block) grid the last block couples back to
    the first one. Circulant grids have no interfaces.
    """

    domain: tuple[float, float]
    op: SbpOperator
    n_blocks: int
    x: np.ndarray
    h_diag: np.ndarray
    d_mat: np.ndarray
    blocks: tuple[tuple[int, int], ...]
    interfaces: tuple[tuple[int, int], ...]
    periodic: bool = True
    _pattern: tuple = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def length(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def boundary_nodes(self) -> np.ndarray:
        """First and last node of every block (empty for circulant grids)."""
        if self.op.periodic:
            return np.zeros(0, dtype=int)
        out = []
        for start, stop in self.blocks:
            out.extend((start, stop - 1))
        return np.array(out, dtype=int)

    @property
    def pattern(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Row indices, column indices and values of the nonzeros of ``D``."""
        return self._pattern

    @property
    def h_min(self) -> float:
        if self.op.periodic:
            return float(self.h_diag[0])
        return float(np.min(np.diff(self.x)[np.diff(self.x) > 0]))


def assemble_grid(domain: tuple[float, float], n_blocks: int, op: SbpOperator, periodic: bool = True) -> Grid:
    """Tile ``op`` over ``domain`` with ``n_blocks`` equal blocks.

    Interface nodes are duplicated; coupling is left to the SATs.
    """
    if n_blocks < 1:
        raise OperatorError("need at least one block")
    x0, x1 = map(float, domain)
    if not x1 > x0:
        raise OperatorError("domain must have positive length")
    if op.periodic and n_blocks != 1:
        raise OperatorError("circulant operators are used as a single periodic block")
    width = (x1 - x0) / n_blocks
    m = op.n_nodes
    n = m * n_blocks
    x = np.empty(n)
    hd = np.empty(n)
    d = np.zeros((n, n))
    blocks = []
    for b in range(n_blocks):
        s = slice(b * m, (b + 1) * m)
        x[s] = x0 + b * width + width * op.nodes
        hd[s] = width * op.h_diag
        d[s, s] = op.d_mat / width
        blocks.append((b * m, (b + 1) * m))
    interfaces = []
    if not op.periodic:
        for b in range(n_blocks - 1):
            interfaces.append((blocks[b][1] - 1, blocks[b + 1][0]))
        if periodic:
            interfaces.append((blocks[-1][1] - 1, blocks[0][0]))
    rows, cols = np.nonzero(d)
    pattern = (rows, cols, d[rows, cols])
    return Grid((x0, x1), op, n_blocks, x, hd, d, tuple(blocks), tuple(interfaces), periodic, pattern)


def undivided_difference(n: int, s: int, periodic: bool) -> np.ndarray:
    """Order-``s`` undivided difference matrix.

    Periodic: ``n x n`` circulant with rows ``(D u)_i = sum_k (-1)^(s-k) C(s,k) u_{i+k}``.
    Otherwise the ``(n - s) x n`` matrix of forward differences inside a block.
    """
    if s < 1:
        raise OperatorError("dissipation derivative order must be >= 1")
    w = np.array([(-1) ** (s - k) * comb(s, k) for k in range(s + 1)], dtype=float)
    if periodic:
        out = np.zeros((n, n))
        idx = np.arange(n)
        for k in range(s + 1):
            out[idx, (idx + k) % n] += w[k]
        return out
    if n <= s:
        raise OperatorError(f"block of {n} nodes too small for an order-{s} difference")
    out = np.zeros((n - s, n))
    for i in range(n - s):
        out[i, i : i + s + 1] = w
    return out


def grid_undivided_difference(grid: Grid, s: int) -> np.ndarray:
    """Block-wise undivided difference on a grid (circulant-periodic or per block)."""
    if grid.op.periodic:
        return undivided_difference(grid.n, s, True)
    parts = []
    for start, stop in grid.blocks:
        blk = undivided_difference(stop - start, s, False)
        full = np.zeros((blk.shape[0], grid.n))
        full[:, start:stop] = blk
        parts.append(full)
    return np.vstack(parts)
