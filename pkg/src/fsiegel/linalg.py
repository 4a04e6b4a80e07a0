"""Exact dense linear algebra over the quadratic extension field.

A matrix is a (rows, cols, 2) int64 array of (re, im) coefficient pairs,
reduced mod q.  numpy carries the bulk arithmetic with exact integers;
elimination loops run in Python over the (small) pivot count.

Elimination is deliberately plain: columns are scanned left to right and
rows top to bottom, with no pivot heuristics, so every reduced form is
reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .field import EScalar, FieldParams

_I64 = np.int64


# ---------------------------------------------------------------------------
# raw array kernels
# ---------------------------------------------------------------------------

def mm(fp: FieldParams, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of coefficient-pair arrays; broadcasts over stacks."""
    ar, ai = a[..., 0], a[..., 1]
    br, bi = b[..., 0], b[..., 1]
    re = (ar @ br + fp.eps * (ai @ bi)) % fp.q
    im = (ar @ bi + ai @ br) % fp.q
    return np.stack([re, im], axis=-1)


def scalar_mm(fp: FieldParams, c: tuple[int, int], a: np.ndarray) -> np.ndarray:
    cr, ci = c
    re = (cr * a[..., 0] + fp.eps * ci * a[..., 1]) % fp.q
    im = (cr * a[..., 1] + ci * a[..., 0]) % fp.q
    return np.stack([re, im], axis=-1)


def conj_arr(a: np.ndarray, q: int) -> np.ndarray:
    out = a.copy()
    out[..., 1] = (-out[..., 1]) % q
    return out


def rref(fp: FieldParams, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (array, pivot column indices)."""
    q, eps = fp.q, fp.eps
    a = a.astype(_I64, copy=True) % q
    m, ncols = a.shape[0], a.shape[1]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        col = a[r:, c]
        nz = np.flatnonzero((col[:, 0] != 0) | (col[:, 1] != 0))
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        ir, ii = fp.inv_pair(int(a[r, c, 0]), int(a[r, c, 1]))
        row = a[r]
        rre = (ir * row[:, 0] + eps * ii * row[:, 1]) % q
        rim = (ir * row[:, 1] + ii * row[:, 0]) % q
        a[r, :, 0] = rre
        a[r, :, 1] = rim
        fac = a[:, c].copy()
        fac[r] = 0
        dre = (np.outer(fac[:, 0], rre) + eps * np.outer(fac[:, 1], rim)) % q
        dim = (np.outer(fac[:, 0], rim) + np.outer(fac[:, 1], rre)) % q
        a[:, :, 0] = (a[:, :, 0] - dre) % q
        a[:, :, 1] = (a[:, :, 1] - dim) % q
        pivots.append(c)
        r += 1
    return a, pivots


def rcef(fp: FieldParams, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced column echelon form via row reduction of the transpose.

    Returns (array, pivot row indices); zero columns are dropped, so the
    result is the canonical representative of the column span.
    """
    red, pivots = rref(fp, a.swapaxes(0, 1))
    return red[: len(pivots)].swapaxes(0, 1), pivots


def rank_arr(fp: FieldParams, a: np.ndarray) -> int:
    return len(rref(fp, a)[1])


def kernel_arr(fp: FieldParams, a: np.ndarray) -> np.ndarray:
    """Basis of the right null space, one column per free variable."""
    red, pivots = rref(fp, a)
    ncols = a.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    out = np.zeros((ncols, len(free), 2), dtype=_I64)
    for j, f in enumerate(free):
        out[f, j, 0] = 1
        for i, pc in enumerate(pivots):
            out[pc, j, 0] = (-red[i, f, 0]) % fp.q
            out[pc, j, 1] = (-red[i, f, 1]) % fp.q
    return out


def det_arr(fp: FieldParams, a: np.ndarray) -> tuple[int, int]:
    q, eps = fp.q, fp.eps
    a = a.astype(_I64, copy=True) % q
    n = a.shape[0]
    det = (1, 0)
    for c in range(n):
        col = a[c:, c]
        nz = np.flatnonzero((col[:, 0] != 0) | (col[:, 1] != 0))
        if nz.size == 0:
            return (0, 0)
        p = c + int(nz[0])
        if p != c:
            a[[c, p]] = a[[p, c]]
            det = ((-det[0]) % q, (-det[1]) % q)
        piv = (int(a[c, c, 0]), int(a[c, c, 1]))
        det = fp.mul_pair(det, piv)
        ir, ii = fp.inv_pair(*piv)
        row = a[c]
        rre = (ir * row[:, 0] + eps * ii * row[:, 1]) % q
        rim = (ir * row[:, 1] + ii * row[:, 0]) % q
        fac = a[c + 1 :, c].copy()
        a[c + 1 :, :, 0] = (a[c + 1 :, :, 0] - (np.outer(fac[:, 0], rre) + eps * np.outer(fac[:, 1], rim))) % q
        a[c + 1 :, :, 1] = (a[c + 1 :, :, 1] - (np.outer(fac[:, 0], rim) + np.outer(fac[:, 1], rre))) % q
    return det


# ---------------------------------------------------------------------------
# the matrix value type
# ---------------------------------------------------------------------------

class Mat:
    """An immutable exact matrix over E = GF(q^2)."""

    __slots__ = ("fp", "a")

    def __init__(self, fp: FieldParams, a: np.ndarray):
        arr = np.asarray(a, dtype=_I64) % fp.q
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ShapeError(f"expected (rows, cols, 2) coefficient array, got {arr.shape}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.fp = fp
        self.a = arr

    # -- constructors ----------------------------------------------------

    @classmethod
    def build(cls, fp: FieldParams, rows) -> "Mat":
        """From a grid of EScalar / int / (re, im) entries."""
        grid = []
        for row in rows:
            out = []
            for x in row:
                if isinstance(x, EScalar):
                    out.append((x.re, x.im))
                elif isinstance(x, tuple):
                    out.append((x[0] % fp.q, x[1] % fp.q))
                else:
                    out.append((int(x) % fp.q, 0))
            grid.append(out)
        ncols = {len(r) for r in grid}
        if len(ncols) > 1:
            raise ShapeError("ragged rows")
        width = len(grid[0]) if grid else 0
        return cls(fp, np.array(grid, dtype=_I64).reshape(len(grid), width, 2))

    @classmethod
    def zeros(cls, fp: FieldParams, rows: int, cols: int) -> "Mat":
        return cls(fp, np.zeros((rows, cols, 2), dtype=_I64))

    @classmethod
    def identity(cls, fp: FieldParams, n: int) -> "Mat":
        a = np.zeros((n, n, 2), dtype=_I64)
        a[np.arange(n), np.arange(n), 0] = 1
        return cls(fp, a)

    @classmethod
    def diag(cls, fp: FieldParams, entries) -> "Mat":
        entries = [fp.coerce(x) for x in entries]
        n = len(entries)
        a = np.zeros((n, n, 2), dtype=_I64)
        for i, x in enumerate(entries):
            a[i, i] = (x.re, x.im)
        return cls(fp, a)

    @classmethod
    def column(cls, fp: FieldParams, entries) -> "Mat":
        return cls.build(fp, [[x] for x in entries])

    # -- shape and access -------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.a.shape[0], self.a.shape[1])

    def at(self, i: int, j: int) -> EScalar:
        return EScalar(self.fp, int(self.a[i, j, 0]), int(self.a[i, j, 1]))

    def __getitem__(self, ij) -> EScalar:
        return self.at(*ij)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "Mat":
        return Mat(self.fp, self.a[r0:r1, c0:c1])

    def col(self, j: int) -> "Mat":
        return Mat(self.fp, self.a[:, j : j + 1])

    # -- ring operations ---------------------------------------------------

    def _check_same_shape(self, other: "Mat"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        return Mat(self.fp, self.a + other.a)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        return Mat(self.fp, self.a - other.a)

    def __neg__(self) -> "Mat":
        return Mat(self.fp, -self.a)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        return Mat(self.fp, mm(self.fp, self.a, other.a))

    def __mul__(self, c) -> "Mat":
        c = self.fp.coerce(c)
        return Mat(self.fp, scalar_mm(self.fp, (c.re, c.im), self.a))

    __rmul__ = __mul__

    @property
    def T(self) -> "Mat":
        return Mat(self.fp, self.a.swapaxes(0, 1))

    def conj(self) -> "Mat":
        return Mat(self.fp, conj_arr(self.a, self.fp.q))

    def star(self) -> "Mat":
        """Conjugate transpose."""
        return Mat(self.fp, conj_arr(self.a, self.fp.q).swapaxes(0, 1))

    @property
    def is_rational(self) -> bool:
        return bool(np.all(self.a[..., 1] == 0))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.a == 0))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and bool(np.all(self.a == self.a.swapaxes(0, 1)))

    # -- elimination-backed queries ----------------------------------------

    def rank(self) -> int:
        return rank_arr(self.fp, self.a)

    def det(self) -> EScalar:
        if self.rows != self.cols:
            raise ShapeError("determinant needs a square matrix")
        re, im = det_arr(self.fp, self.a)
        return EScalar(self.fp, re, im)

    def inv(self) -> "Mat | None":
        if self.rows != self.cols:
            raise ShapeError("inverse needs a square matrix")
        n = self.rows
        aug = np.concatenate([self.a, Mat.identity(self.fp, n).a], axis=1)
        red, pivots = rref(self.fp, aug)
        if pivots != list(range(n)):
            return None
        return Mat(self.fp, red[:, n:])

    def kernel(self) -> "Mat":
        return Mat(self.fp, kernel_arr(self.fp, self.a))

    # -- identity and text ---------------------------------------------------

    def key(self) -> bytes:
        return self.a.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.fp.q == other.fp.q and self.shape == other.shape and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.fp.q, self.shape, self.a.tobytes()))

    def encode(self) -> str:
        return ";".join(
            ",".join(self.at(i, j).encode() for j in range(self.cols)) for i in range(self.rows)
        )

    @classmethod
    def parse(cls, fp: FieldParams, text: str) -> "Mat":
        rows = [[fp.parse_scalar(x) for x in row.split(",")] for row in text.split(";")]
        return cls.build(fp, rows)

    def __repr__(self):
        return f"Mat({self.encode()})"


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def block(fp: FieldParams, grid) -> Mat:
    """Assemble a matrix from a grid of conforming blocks."""
    rows = [np.concatenate([b.a for b in row], axis=1) for row in grid]
    return Mat(fp, np.concatenate(rows, axis=0))


def column_echelon_canonical(m: Mat) -> Mat:
    """Canonical representative of the column span of m.

    Reduced column echelon form with leading ones and zero columns
    dropped: two matrices have the same column span exactly when their
    canonical forms are identical.
    """
    red, _ = rcef(m.fp, m.a)
    return Mat(m.fp, red)


def solve(a: Mat, b: Mat) -> Mat | None:
    """One solution x of a @ x = b, or None when inconsistent."""
    if a.rows != b.rows:
        raise ShapeError("left and right sides disagree on row count")
    aug = np.concatenate([a.a, b.a], axis=1)
    red, pivots = rref(a.fp, aug)
    if any(p >= a.cols for p in pivots):
        return None
    out = np.zeros((a.cols, b.cols, 2), dtype=_I64)
    for i, pc in enumerate(pivots):
        out[pc] = red[i, a.cols :]
    return Mat(a.fp, out)
