"""Exact integer linear algebra.

Matrices are plain lists of rows of Python ints (arbitrary precision).
Subgroups of a finite group ``Z/d_1 + ... + Z/d_k`` are carried around as
full-rank lattices ``L`` in ``Z^k`` with ``diag(d) Z^k <= L``; the subgroup
is ``L / diag(d) Z^k``.  Every lattice is stored in one canonical form:
lower-triangular column Hermite form with a positive diagonal and the
entries left of each pivot reduced into ``[0, pivot)``.  Two lattices are
equal exactly when their basis matrices are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm, prod
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotContained, NotEndomorphism

Matrix = list[list[int]]
Vector = list[int]


# ---------------------------------------------------------------------------
# matrix helpers


def identity(k: int) -> Matrix:
    return [[int(i == j) for j in range(k)] for i in range(k)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def transpose(a: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    if not b:
        return [[] for _ in a]
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def matadd(a, b) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def matsub(a, b) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c: int, a) -> Matrix:
    return [[c * x for x in row] for row in a]


def reduce_rows(a, d: Sequence[int]) -> Matrix:
    """Reduce row ``i`` of ``a`` modulo ``d[i]``.

    This does not change the map ``Z^k -> (+) Z/d_i`` that ``a`` induces.
    """
    return [[x % m for x in row] for row, m in zip(a, d)]


def columns(a: Sequence[Sequence[int]]) -> list[Vector]:
    return [list(c) for c in zip(*a)] if a else []


def from_columns(cols: Sequence[Sequence[int]], k: int) -> Matrix:
    if not cols:
        return [[] for _ in range(k)]
    return [list(r) for r in zip(*cols)]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def det(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U * A * V == S`` with unimodular ``U``, ``V``.

    Only ``S`` is canonical; ``U`` and ``V`` depend on pivot choices.
    """

    S: Matrix
    U: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i][i] for i in range(min(len(self.S), len(self.S[0]) if self.S else 0))]


def _smith(a, transforms: bool = True, inverse: bool = False):
    r = len(a)
    c = len(a[0]) if r else 0
    m = [list(row) for row in a]
    U = identity(r) if transforms else None
    Ui = identity(r) if inverse else None
    V = identity(c) if transforms else None

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]
        if Ui is not None:
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        ms, md = m[src], m[dst]
        for j in range(c):
            if ms[j]:
                md[j] += q * ms[j]
        if U is not None:
            us, ud = U[src], U[dst]
            for j in range(r):
                ud[j] += q * us[j]
        if Ui is not None:
            for row in Ui:
                row[src] -= q * row[dst]

    def add_col(dst, src, q):
        for row in m:
            if row[src]:
                row[dst] += q * row[src]
        if V is not None:
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                row = m[i]
                for j in range(t, c):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = m[t][t]
            clean = True
            for i in range(t + 1, r):
                if m[i][t]:
                    q = m[i][t] // p
                    add_row(i, t, -q)
                    if m[i][t]:
                        clean = False
            for j in range(t + 1, c):
                if m[t][j]:
                    q = m[t][j] // p
                    add_col(j, t, -q)
                    if m[t][j]:
                        clean = False
            if not clean:
                continue
            bad = None
            for i in range(t + 1, r):
                if any(x % p for x in m[i][t + 1:]):
                    bad = i
                    break
            if bad is not None:
                add_row(t, bad, 1)
                continue
            if p < 0:
                for j in range(c):
                    m[t][j] = -m[t][j]
                if U is not None:
                    U[t] = [-x for x in U[t]]
                if Ui is not None:
                    for row in Ui:
                        row[t] = -row[t]
            break
    return m, U, V, Ui


def smith_normal_form(a: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form of an arbitrary rectangular integer matrix."""
    S, U, V, _ = _smith(a)
    return SmithDecomposition(S, U, V)


def smith_invariants(a: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith form, without computing transforms."""
    S, _, _, _ = _smith(a, transforms=False)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank lattice in ``Z^k`` in canonical lower-triangular Hermite form.

    ``basis[i][j]`` is row ``i`` of basis column ``j``.
    """

    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def det(self) -> int:
        return prod(self.basis[i][i] for i in range(self.dim))

    def column(self, j: int) -> Vector:
        return [row[j] for row in self.basis]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.dim)]

    def coordinates(self, v: Sequence[int]) -> Vector | None:
        """Integer coordinates of ``v`` in this basis, or ``None`` if ``v`` is outside."""
        k = self.dim
        if len(v) != k:
            raise DimensionMismatch(f"vector of length {len(v)} in dimension {k}")
        v = list(v)
        out = [0] * k
        B = self.basis
        for j in range(k):
            q, r = divmod(v[j], B[j][j])
            if r:
                return None
            out[j] = q
            if q:
                for i in range(j, k):
                    v[i] -= q * B[i][j]
        return out

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def contains_lattice(self, other: "LatticeBasis") -> bool:
        return all(self.contains(c) for c in other.columns())

    @classmethod
    def standard(cls, k: int) -> "LatticeBasis":
        return cls(tuple(tuple(row) for row in identity(k)))

    @classmethod
    def diagonal(cls, d: Sequence[int]) -> "LatticeBasis":
        return hermite_lattice([], d)


def _insert(pivots: list[Vector], v: Vector, d: Sequence[int]) -> None:
    # pivots[i] has zeros above row i and a positive entry at row i; the
    # lattice they span always contains diag(d), so any vector may be
    # reduced modulo d_r in rows r past the current elimination row.
    k = len(d)
    v = [x % m for x, m in zip(v, d)]
    i = 0
    while True:
        while i < k and v[i] == 0:
            i += 1
        if i == k:
            return
        b = pivots[i]
        bi, vi = b[i], v[i]
        if vi % bi == 0:
            q = vi // bi
            for r in range(i + 1, k):
                v[r] = (v[r] - q * b[r]) % d[r]
            v[i] = 0
        else:
            g, x, y = xgcd(bi, vi)
            s, t = vi // g, bi // g
            nb = [0] * k
            nv = [0] * k
            nb[i] = g
            for r in range(i + 1, k):
                nb[r] = (x * b[r] + y * v[r]) % d[r]
                nv[r] = (s * b[r] - t * v[r]) % d[r]
            pivots[i] = nb
            v = nv
        i += 1


def _canonical(pivots: list[Vector]) -> LatticeBasis:
    k = len(pivots)
    cols = [list(p) for p in pivots]
    for i in range(k):
        piv = cols[i][i]
        ci = cols[i]
        for j in range(i):
            q = cols[j][i] // piv
            if q:
                cj = cols[j]
                for r in range(i, k):
                    cj[r] -= q * ci[r]
    return LatticeBasis(tuple(tuple(cols[j][i] for j in range(k)) for i in range(k)))


def hermite_lattice(generators: Iterable[Sequence[int]], d: Sequence[int]) -> LatticeBasis:
    """Canonical basis of the lattice spanned by ``generators`` and ``diag(d)``."""
    d = [int(x) for x in d]
    if any(x < 1 for x in d):
        raise ValueError(f"moduli must be positive, got {d}")
    k = len(d)
    pivots = []
    for i in range(k):
        p = [0] * k
        p[i] = d[i]
        pivots.append(p)
    for g in generators:
        if len(g) != k:
            raise DimensionMismatch(f"generator of length {len(g)} for {k} moduli")
        _insert(pivots, list(g), d)
    return _canonical(pivots)


def hermite_extend(lattice: LatticeBasis, generators: Iterable[Sequence[int]], d: Sequence[int]) -> LatticeBasis:
    """Canonical basis of ``lattice + span(generators)``; ``lattice`` must contain ``diag(d)``."""
    d = [int(x) for x in d]
    pivots = lattice.columns()
    for g in generators:
        if len(g) != len(d):
            raise DimensionMismatch(f"generator of length {len(g)} for {len(d)} moduli")
        _insert(pivots, list(g), d)
    return _canonical(pivots)


def _kernel_rows_mod(x: Sequence[Sequence[int]], mods: Sequence[int], cols: int) -> LatticeBasis:
    """Lattice ``{u in Z^cols : (x u)_i = 0 mod mods[i]}``.

    Works in ``Z^(r+cols)`` with the lattice spanned by the columns of
    ``[x; I]`` and ``(m_i e_i; 0)``.  That lattice contains
    ``(0; lcm(m) e_j)``, so it is a diagonal-containing lattice and its
    Hermite form has the kernel as its lower-right block.
    """
    r = len(x)
    big = lcm(*mods) if mods else 1
    d = list(mods) + [big] * cols
    gens = []
    for j in range(cols):
        v = [x[i][j] for i in range(r)] + [0] * cols
        v[r + j] = 1
        gens.append(v)
    H = hermite_lattice(gens, d)
    return LatticeBasis(tuple(tuple(H.basis[r + i][r + j] for j in range(cols)) for i in range(cols)))


def check_endomorphism(u: Sequence[Sequence[int]], d: Sequence[int]) -> None:
    """Raise unless ``u`` maps ``diag(d) Z^k`` into itself."""
    k = len(d)
    if len(u) != k or any(len(row) != k for row in u):
        raise DimensionMismatch(f"expected a {k}x{k} matrix")
    for i in range(k):
        for l in range(k):
            if (d[l] * u[i][l]) % d[i]:
                raise NotEndomorphism(
                    f"column {l}: d[{l}]*U[{i}][{l}] = {d[l] * u[i][l]} is not 0 mod {d[i]}"
                )


def kernel_mod(u: Sequence[Sequence[int]], d: Sequence[int]) -> LatticeBasis:
    """Lattice ``{x : u x in diag(d) Z^k}`` -- the kernel of ``u`` on ``(+) Z/d_i``."""
    check_endomorphism(u, d)
    return _kernel_rows_mod(u, d, len(d))


def image_mod(u: Sequence[Sequence[int]], d: Sequence[int]) -> LatticeBasis:
    """Lattice spanned by the columns of ``u`` and ``diag(d)``."""
    check_endomorphism(u, d)
    return hermite_lattice(columns(u), d)


def _scaled_solve(B: LatticeBasis, v: Sequence[int], scale_: int) -> Vector:
    # y with B y = scale_ * v; exact whenever scale_ * B^-1 v is integral.
    k = B.dim
    rhs = [scale_ * x for x in v]
    y = [0] * k
    for j in range(k):
        s = rhs[j] - sum(B.basis[j][l] * y[l] for l in range(j))
        q, rem = divmod(s, B.basis[j][j])
        if rem:
            raise ArithmeticError("inexact triangular solve")
        y[j] = q
    return y


def lattice_intersection(b1: LatticeBasis, b2: LatticeBasis) -> LatticeBasis:
    """Canonical basis of ``L1 & L2``."""
    if b1.dim != b2.dim:
        raise DimensionMismatch(f"dimensions {b1.dim} and {b2.dim}")
    if b1 == b2:
        return b1
    k = b1.dim
    if k == 0:
        return b1
    if b2.contains_lattice(b1):
        return b1
    if b1.contains_lattice(b2):
        return b2
    d2 = b2.det
    # u is admissible iff B1 u lies in L2 iff adj(B2) B1 u = 0 mod det(B2)
    x_cols = [_scaled_solve(b2, c, d2) for c in b1.columns()]
    x = from_columns(x_cols, k)
    K = _kernel_rows_mod(x, [d2] * k, k)
    B1 = [list(r) for r in b1.basis]
    gens = columns(matmul(B1, [list(r) for r in K.basis]))
    return hermite_lattice(gens, [lcm(b1.det, d2)] * k)


def lattice_sum(b1: LatticeBasis, b2: LatticeBasis) -> LatticeBasis:
    if b1.dim != b2.dim:
        raise DimensionMismatch(f"dimensions {b1.dim} and {b2.dim}")
    m = gcd(b1.det, b2.det)
    return hermite_lattice(b1.columns() + b2.columns(), [m] * b1.dim)


def _require_contained(outer: LatticeBasis, inner: LatticeBasis) -> list[Vector]:
    if outer.dim != inner.dim:
        raise DimensionMismatch(f"dimensions {outer.dim} and {inner.dim}")
    coords = []
    for c in inner.columns():
        x = outer.coordinates(c)
        if x is None:
            raise NotContained(f"column {c} of the inner lattice is not in the outer lattice")
        coords.append(x)
    return coords


def lattice_index(outer: LatticeBasis, inner: LatticeBasis) -> int:
    """Index ``[outer : inner]``; raises :class:`NotContained` unless inner <= outer."""
    _require_contained(outer, inner)
    return inner.det // outer.det


def quotient_invariants(outer: LatticeBasis, inner: LatticeBasis) -> list[int]:
    """Invariant factors (each > 1, divisibility chain) of ``outer / inner``."""
    coords = _require_contained(outer, inner)
    c = from_columns(coords, outer.dim)
    return [s for s in smith_invariants(c) if s > 1]


@dataclass(frozen=True)
class Presentation:
    """An explicit isomorphism ``outer / inner  ->  (+) Z/moduli``.

    ``proj`` maps outer-lattice coordinates to quotient coordinates and
    ``lifts[i]`` is an ambient vector representing the i-th generator.
    """

    outer: LatticeBasis
    moduli: tuple[int, ...]
    proj: tuple[tuple[int, ...], ...]
    lifts: tuple[tuple[int, ...], ...]

    def coords(self, v: Sequence[int]) -> Vector:
        x = self.outer.coordinates(v)
        if x is None:
            raise NotContained(f"{list(v)} is not in the outer lattice")
        return [sum(a * b for a, b in zip(row, x)) % m for row, m in zip(self.proj, self.moduli)]

    def transport(self, a: Sequence[Sequence[int]]) -> Matrix:
        """Matrix of ``a`` (an ambient map preserving outer and inner) on the quotient."""
        cols = [self.coords(matvec(a, lift)) for lift in self.lifts]
        return from_columns(cols, len(self.moduli))


def present_quotient(outer: LatticeBasis, inner: LatticeBasis) -> Presentation:
    coords = _require_contained(outer, inner)
    k = outer.dim
    c = from_columns(coords, k)
    S, U, _, Ui = _smith(c, transforms=True, inverse=True)
    keep = [i for i in range(k) if S[i][i] != 1]
    B = [list(r) for r in outer.basis]
    lifts = []
    for i in keep:
        x = [Ui[r][i] for r in range(k)]
        lifts.append(tuple(matvec(B, x)))
    return Presentation(
        outer=outer,
        moduli=tuple(S[i][i] for i in keep),
        proj=tuple(tuple(U[i]) for i in keep),
        lifts=tuple(lifts),
    )


# ---------------------------------------------------------------------------
# lattices of arbitrary rank (no modulus available)


def echelon_lattice(generators: Iterable[Sequence[int]], dim: int) -> tuple[tuple[int, ...], ...]:
    """Canonical echelon basis of the (possibly non-full-rank) span of ``generators``.

    Each basis vector has a positive leading entry at its pivot row, pivot
    rows strictly increase, and every other basis vector's entry at a pivot
    row is reduced into ``[0, pivot)``.  Returned as a tuple of vectors.
    """
    piv: dict[int, Vector] = {}
    for g in generators:
        v = list(g)
        if len(v) != dim:
            raise DimensionMismatch(f"generator of length {len(v)} in dimension {dim}")
        i = 0
        while True:
            while i < dim and v[i] == 0:
                i += 1
            if i == dim:
                break
            if i not in piv:
                if v[i] < 0:
                    v = [-x for x in v]
                piv[i] = v
                break
            b = piv[i]
            g_, x, y = xgcd(b[i], v[i])
            s, t = v[i] // g_, b[i] // g_
            piv[i] = [x * p + y * w for p, w in zip(b, v)]
            v = [s * p - t * w for p, w in zip(b, v)]
    rows = sorted(piv)
    basis = [piv[i] for i in rows]
    for a, i in enumerate(rows):
        p = basis[a][i]
        for b_ in range(a):
            q = basis[b_][i] // p
            if q:
                basis[b_] = [x - q * y for x, y in zip(basis[b_], basis[a])]
    return tuple(tuple(v) for v in basis)


def integer_kernel(a: Sequence[Sequence[int]], cols: int) -> list[Vector]:
    """Basis of ``{x in Z^cols : a x = 0}`` (exact, over Z)."""
    r = len(a)
    piv: dict[int, Vector] = {}
    kernel = []
    for j in range(cols):
        v = [a[i][j] for i in range(r)] + [int(l == j) for l in range(cols)]
        i = 0
        while True:
            while i < r and v[i] == 0:
                i += 1
            if i == r:
                kernel.append(v[r:])
                break
            if i not in piv:
                piv[i] = v
                break
            b = piv[i]
            g_, x, y = xgcd(b[i], v[i])
            s, t = v[i] // g_, b[i] // g_
            piv[i] = [x * p + y * w for p, w in zip(b, v)]
            v = [s * p - t * w for p, w in zip(b, v)]
    return kernel


def echelon_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership in a lattice given by :func:`echelon_lattice`."""
    v = list(v)
    for b in basis:
        p = next(i for i, x in enumerate(b) if x)
        q, r = divmod(v[p], b[p])
        if r:
            return False
        if q:
            v = [x - q * y for x, y in zip(v, b)]
    return not any(v)
