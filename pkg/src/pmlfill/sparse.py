"""Complex compressed-sparse-column matrices, permutations, and Matrix Market I/O.

CSC is the canonical layout here: column elimination and left-looking LU are
column-driven, so every producer in the package hands out matrices in this
form. Values are complex128 throughout (PML stretch factors and lossy
materials make the operators complex), indices are int64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TripletBuffer",
    "SparseMatrix",
    "Permutation",
    "MatrixMarketError",
    "triplet_to_csc",
    "permute",
    "spmv",
    "eye",
    "from_dense",
    "read_matrix_market",
    "write_matrix_market",
]


class MatrixMarketError(ValueError):
    """Malformed or unsupported Matrix Market content."""


@dataclass
class TripletBuffer:
    """Append-only (row, col, value) accumulator.

    Duplicate (row, col) pairs are allowed and sum on conversion to CSC.
    """

    n_rows: int
    n_cols: int
    rows: list = field(default_factory=list)
    cols: list = field(default_factory=list)
    vals: list = field(default_factory=list)

    def add(self, i: int, j: int, v: complex) -> None:
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise ValueError(
                f"triplet index ({i}, {j}) out of range for "
                f"{self.n_rows}x{self.n_cols} buffer"
            )
        self.rows.append(i)
        self.cols.append(j)
        self.vals.append(v)

    def extend(self, rows, cols, vals) -> None:
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.size and (rows.min() < 0 or rows.max() >= self.n_rows):
            raise ValueError("triplet row index out of range")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_cols):
            raise ValueError("triplet column index out of range")
        self.rows.extend(rows.tolist())
        self.cols.extend(cols.tolist())
        self.vals.extend(np.asarray(vals).tolist())

    def to_csc(self) -> "SparseMatrix":
        return triplet_to_csc(self)

    @property
    def nnz(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class SparseMatrix:
    """Immutable complex CSC matrix.

    Row indices are strictly increasing within each column. Structural
    symmetry is never assumed. ``indptr`` has length ``n_cols + 1`` and
    ``indptr[n_cols]`` equals nnz.
    """

    n_rows: int
    n_cols: int
    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indptr", np.ascontiguousarray(self.indptr, dtype=np.int64))
        object.__setattr__(self, "indices", np.ascontiguousarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.ascontiguousarray(self.values, dtype=np.complex128))
        if self.indptr.shape != (self.n_cols + 1,):
            raise ValueError("indptr length must be n_cols + 1")
        if self.indptr[0] != 0 or np.any(np.diff(self.indptr) < 0):
            raise ValueError("indptr must be monotone starting at 0")
        if self.indices.shape[0] != self.indptr[-1] or self.values.shape[0] != self.indptr[-1]:
            raise ValueError("indices/values length must equal indptr[-1]")
        if self.indices.size:
            if self.indices.min() < 0 or self.indices.max() >= self.n_rows:
                raise ValueError("row index out of range")
            if self.indices.size > 1:
                col_of = _expand_cols(self.indptr, self.n_cols)
                same_col = col_of[1:] == col_of[:-1]
                if np.any((np.diff(self.indices) <= 0) & same_col):
                    raise ValueError("row indices must be strictly increasing within columns")

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    @property
    def shape(self) -> tuple:
        return (self.n_rows, self.n_cols)

    def col(self, j: int) -> tuple:
        """Row indices and values of column j (views, do not mutate)."""
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return self.indices[lo:hi], self.values[lo:hi]

    def diagonal(self) -> np.ndarray:
        n = min(self.n_rows, self.n_cols)
        d = np.zeros(n, dtype=np.complex128)
        for j in range(n):
            lo, hi = self.indptr[j], self.indptr[j + 1]
            k = np.searchsorted(self.indices[lo:hi], j)
            if k < hi - lo and self.indices[lo + k] == j:
                d[j] = self.values[lo + k]
        return d

    def transpose(self) -> "SparseMatrix":
        buf = _coo_of(self)
        return _csc_from_coo(self.n_cols, self.n_rows, buf[1], buf[0], buf[2], prune=False)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n_rows, self.n_cols), dtype=np.complex128)
        for j in range(self.n_cols):
            lo, hi = self.indptr[j], self.indptr[j + 1]
            a[self.indices[lo:hi], j] = self.values[lo:hi]
        return a

    def prune(self, tol: float = 0.0) -> "SparseMatrix":
        """Drop stored entries with |value| <= tol (exact zeros by default)."""
        keep = np.abs(self.values) > tol
        cols = _expand_cols(self.indptr, self.n_cols)
        return _csc_from_coo(
            self.n_rows, self.n_cols,
            self.indices[keep], cols[keep], self.values[keep], prune=False,
        )

    def max_abs(self) -> float:
        return float(np.abs(self.values).max()) if self.nnz else 0.0

    def off_diagonal_nnz(self) -> int:
        cols = _expand_cols(self.indptr, self.n_cols)
        return int(np.count_nonzero(self.indices != cols))


def _expand_cols(indptr: np.ndarray, n_cols: int) -> np.ndarray:
    return np.repeat(np.arange(n_cols, dtype=np.int64), np.diff(indptr))


def _coo_of(a: SparseMatrix):
    return a.indices, _expand_cols(a.indptr, a.n_cols), a.values


def _csc_from_coo(n_rows, n_cols, rows, cols, vals, prune=True) -> SparseMatrix:
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.complex128)
    if rows.size:
        order = np.lexsort((rows, cols))
        rows, cols, vals = rows[order], cols[order], vals[order]
        # sum duplicates: group identical (col, row) runs
        new_group = np.empty(rows.size, dtype=bool)
        new_group[0] = True
        new_group[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        group_id = np.cumsum(new_group) - 1
        summed = np.zeros(group_id[-1] + 1, dtype=np.complex128)
        np.add.at(summed, group_id, vals)
        rows = rows[new_group]
        cols = cols[new_group]
        vals = summed
        if prune:
            keep = vals != 0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
    counts = np.bincount(cols, minlength=n_cols) if rows.size else np.zeros(n_cols, dtype=np.int64)
    indptr = np.zeros(n_cols + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return SparseMatrix(n_rows, n_cols, indptr, rows, vals)


def triplet_to_csc(buf: TripletBuffer) -> SparseMatrix:
    """Convert triplets to CSC: duplicates summed, columns sorted, exact zeros pruned."""
    rows = np.asarray(buf.rows, dtype=np.int64)
    cols = np.asarray(buf.cols, dtype=np.int64)
    vals = np.asarray(buf.vals, dtype=np.complex128)
    if rows.size:
        if rows.min() < 0 or rows.max() >= buf.n_rows:
            raise ValueError("triplet row index out of range")
        if cols.min() < 0 or cols.max() >= buf.n_cols:
            raise ValueError("triplet column index out of range")
    return _csc_from_coo(buf.n_rows, buf.n_cols, rows, cols, vals, prune=True)


def from_dense(a) -> SparseMatrix:
    a = np.asarray(a, dtype=np.complex128)
    rows, cols = np.nonzero(a)
    return _csc_from_coo(a.shape[0], a.shape[1], rows, cols, a[rows, cols], prune=False)


def eye(n: int) -> SparseMatrix:
    idx = np.arange(n, dtype=np.int64)
    return SparseMatrix(n, n, np.arange(n + 1, dtype=np.int64), idx, np.ones(n, dtype=np.complex128))


def diag(values) -> SparseMatrix:
    """Diagonal matrix; exact zeros on the diagonal are not stored."""
    values = np.asarray(values, dtype=np.complex128)
    n = values.size
    idx = np.arange(n, dtype=np.int64)
    keep = values != 0
    return _csc_from_coo(n, n, idx[keep], idx[keep], values[keep], prune=False)


def add_scaled(a: SparseMatrix, b: SparseMatrix, alpha: complex) -> SparseMatrix:
    """a + alpha * b with exact-zero results pruned."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    rows = np.concatenate([a.indices, b.indices])
    cols = np.concatenate([_expand_cols(a.indptr, a.n_cols), _expand_cols(b.indptr, b.n_cols)])
    vals = np.concatenate([a.values, np.complex128(alpha) * b.values])
    return _csc_from_coo(a.n_rows, a.n_cols, rows, cols, vals, prune=True)


def block_2x2(blocks, n_top: int, n_left: int, n_rows: int, n_cols: int) -> SparseMatrix:
    """Assemble [[B00, B01], [B10, B11]] from optional SparseMatrix blocks.

    ``blocks`` is ((B00, B01), (B10, B11)) with None for structurally empty
    blocks; n_top/n_left give the split position, n_rows/n_cols the totals.
    """
    rows, cols, vals = [], [], []
    for bi, row in enumerate(blocks):
        for bj, blk in enumerate(row):
            if blk is None:
                continue
            roff = n_top if bi == 1 else 0
            coff = n_left if bj == 1 else 0
            rows.append(blk.indices + roff)
            cols.append(_expand_cols(blk.indptr, blk.n_cols) + coff)
            vals.append(blk.values)
    return _csc_from_coo(
        n_rows, n_cols,
        np.concatenate(rows) if rows else np.empty(0, dtype=np.int64),
        np.concatenate(cols) if cols else np.empty(0, dtype=np.int64),
        np.concatenate(vals) if vals else np.empty(0, dtype=np.complex128),
        prune=False,
    )


@dataclass(frozen=True)
class Permutation:
    """Bijection on {0..n-1} stored with its inverse.

    ``forward[old] = new`` and ``inverse[new] = old``.
    """

    forward: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "forward", np.ascontiguousarray(self.forward, dtype=np.int64))
        object.__setattr__(self, "inverse", np.ascontiguousarray(self.inverse, dtype=np.int64))
        if self.forward.shape != self.inverse.shape:
            raise ValueError("forward/inverse length mismatch")
        if np.any(self.forward[self.inverse] != np.arange(self.n)):
            raise ValueError("forward and inverse are not mutually inverse bijections")

    @property
    def n(self) -> int:
        return self.forward.shape[0]

    @staticmethod
    def identity(n: int) -> "Permutation":
        idx = np.arange(n, dtype=np.int64)
        return Permutation(idx, idx.copy())

    @staticmethod
    def from_forward(forward) -> "Permutation":
        forward = np.asarray(forward, dtype=np.int64)
        inverse = np.empty_like(forward)
        inverse[forward] = np.arange(forward.size, dtype=np.int64)
        return Permutation(forward, inverse)

    @staticmethod
    def from_elimination_order(order) -> "Permutation":
        """Permutation placing order[k] at position k (forward[order[k]] = k)."""
        order = np.asarray(order, dtype=np.int64)
        forward = np.empty_like(order)
        forward[order] = np.arange(order.size, dtype=np.int64)
        return Permutation(forward, order.copy())

    def invert(self) -> "Permutation":
        return Permutation(self.inverse, self.forward)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """y with y[forward[i]] = x[i]."""
        return np.asarray(x)[self.inverse]

    def apply_inverse(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[self.forward]


def permute(a: SparseMatrix, p: Permutation, q: Permutation) -> SparseMatrix:
    """Row/column permutation: result(i, j) = a(p.inverse[i], q.inverse[j])."""
    if p.n != a.n_rows or q.n != a.n_cols:
        raise ValueError("permutation dimension mismatch")
    rows, cols, vals = _coo_of(a)
    return _csc_from_coo(a.n_rows, a.n_cols, p.forward[rows], q.forward[cols], vals, prune=False)


def spmv(a: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Exact sparse matrix-vector product a @ x."""
    x = np.asarray(x)
    if x.shape != (a.n_cols,):
        raise ValueError(f"vector length {x.shape} does not match {a.n_cols} columns")
    y = np.zeros(a.n_rows, dtype=np.complex128)
    contrib = a.values * np.repeat(x, np.diff(a.indptr))
    np.add.at(y, a.indices, contrib)
    return y


# -- Matrix Market (coordinate, 1-based on disk) ------------------------------

def write_matrix_market(a: SparseMatrix, path, comment: str = "") -> None:
    """Write coordinate/complex/general Matrix Market with 17 significant digits."""
    rows, cols, vals = _coo_of(a)
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate complex general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{a.n_rows} {a.n_cols} {a.nnz}\n")
        for r, c, v in zip(rows, cols, vals):
            fh.write(f"{r + 1} {c + 1} {v.real:.16e} {v.imag:.16e}\n")


def read_matrix_market(path) -> SparseMatrix:
    """Read a coordinate Matrix Market file (complex, real, or integer field)."""
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("%%MatrixMarket"):
            raise MatrixMarketError("missing %%MatrixMarket header")
        parts = header.strip().split()
        if len(parts) < 5 or parts[1].lower() != "matrix":
            raise MatrixMarketError(f"unsupported header: {header.strip()}")
        fmt, fld, sym = parts[2].lower(), parts[3].lower(), parts[4].lower()
        if fmt != "coordinate":
            raise MatrixMarketError(f"only coordinate format is supported, got {fmt!r}")
        if fld == "pattern":
            raise MatrixMarketError("pattern files carry no values; a value field is required")
        if fld not in ("complex", "real", "integer"):
            raise MatrixMarketError(f"unsupported field {fld!r}")
        if sym not in ("general", "symmetric", "skew-symmetric", "hermitian"):
            raise MatrixMarketError(f"unsupported symmetry {sym!r}")
        line = fh.readline()
        while line.startswith("%") or line.strip() == "":
            line = fh.readline()
        try:
            n_rows, n_cols, nnz = (int(t) for t in line.split())
        except Exception as exc:
            raise MatrixMarketError(f"bad size line: {line.strip()}") from exc
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.complex128)
        k = 0
        for line in fh:
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            toks = line.split()
            if k >= nnz:
                raise MatrixMarketError("more entries than declared")
            rows[k] = int(toks[0]) - 1
            cols[k] = int(toks[1]) - 1
            if fld == "complex":
                if len(toks) != 4:
                    raise MatrixMarketError(f"complex entry needs 4 tokens: {line}")
                vals[k] = complex(float(toks[2]), float(toks[3]))
            else:
                if len(toks) != 3:
                    raise MatrixMarketError(f"{fld} entry needs 3 tokens: {line}")
                vals[k] = float(toks[2])
            k += 1
        if k != nnz:
            raise MatrixMarketError(f"declared {nnz} entries, found {k}")
    if rows.size and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
        raise MatrixMarketError("entry index out of declared range")
    if sym != "general":
        off = rows != cols
        r2, c2, v2 = cols[off], rows[off], vals[off]
        if sym == "skew-symmetric":
            v2 = -v2
        elif sym == "hermitian":
            v2 = np.conj(v2)
        rows = np.concatenate([rows, r2])
        cols = np.concatenate([cols, c2])
        vals = np.concatenate([vals, v2])
    return _csc_from_coo(n_rows, n_cols, rows, cols, vals, prune=False)
