"""Sparse LU factorization (left-looking, column at a time) with fill statistics.

The factorization pairs naturally with CSC storage: each column of L and U is
produced by a sparse triangular solve against the columns of L computed so
far, with the pattern found by depth-first reachability. With
``pivoting="none"`` the pivot for column j is forced to the (symmetrically
permuted) diagonal and the symbolic pattern is exact; ``pivoting="threshold"``
allows row swaps within a column when the diagonal candidate is small
relative to the column maximum.

nnz counts here are structural: exact zeros created by numerical
cancellation stay in the pattern, so symbolic analysis never depends on
numeric luck.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import ordering as _ordering
from .sparse import Permutation, SparseMatrix, _csc_from_coo, permute, spmv

__all__ = [
    "SingularPivotError",
    "StructurallySingularError",
    "SymbolicLu",
    "LuFactors",
    "FillReport",
    "symbolic_lu",
    "factor",
    "solve",
    "dense_lu_oracle",
    "fill_report",
    "percent_reduction",
]

DENSE_ORACLE_CAP = 400
# pattern comparisons against the dense oracle treat |entry| above this
# multiple of ||A||_max as numerically nonzero
PATTERN_ZERO_RTOL = 1e-14


class SingularPivotError(ValueError):
    """Exact zero pivot encountered; ``column`` names the offending column."""

    def __init__(self, column: int, message: str = ""):
        self.column = int(column)
        super().__init__(message or f"exact zero pivot at column {column}")


class StructurallySingularError(ValueError):
    """The pattern admits no complete factorization regardless of values."""


@dataclass(frozen=True)
class SymbolicLu:
    """Column patterns of L and U under no-pivoting elimination."""

    l_indptr: np.ndarray
    l_indices: np.ndarray
    u_indptr: np.ndarray
    u_indices: np.ndarray
    row_perm: Permutation
    col_perm: Permutation

    @property
    def nnz_l(self) -> int:
        return int(self.l_indptr[-1])

    @property
    def nnz_u(self) -> int:
        return int(self.u_indptr[-1])


@dataclass(frozen=True)
class LuFactors:
    """PAQ = LU with explicit unit diagonal in L and fill statistics."""

    l: SparseMatrix
    u: SparseMatrix
    p: Permutation
    q: Permutation
    nnz_a: int
    ordering: str
    pivoting: str
    seconds: float

    @property
    def n(self) -> int:
        return self.l.n_rows

    @property
    def nnz_l(self) -> int:
        return self.l.nnz

    @property
    def nnz_u(self) -> int:
        return self.u.nnz

    @property
    def fill_ratio(self) -> float:
        return (self.nnz_l + self.nnz_u - self.n) / max(self.nnz_a, 1)


@dataclass(frozen=True)
class FillReport:
    """One factorization's nnz record, serializable as a CSV row or JSON object."""

    bc: str
    nx: int
    ny: int
    ordering: str
    nnz_a: int
    nnz_l: int
    nnz_u: int
    seconds: float

    CSV_HEADER = "bc,nx,ny,ordering,nnz_A,nnz_L,nnz_U,seconds"

    def csv_row(self) -> str:
        return (f"{self.bc},{self.nx},{self.ny},{self.ordering},"
                f"{self.nnz_a},{self.nnz_l},{self.nnz_u},{self.seconds:.6f}")

    def to_dict(self) -> dict:
        return {
            "bc": self.bc, "nx": self.nx, "ny": self.ny,
            "ordering": self.ordering, "nnz_A": self.nnz_a,
            "nnz_L": self.nnz_l, "nnz_U": self.nnz_u, "seconds": self.seconds,
        }


def percent_reduction(reference: FillReport, new: FillReport) -> float:
    """Percentage reduction in nnz(L) going from reference to new."""
    return (reference.nnz_l - new.nnz_l) / reference.nnz_l * 100.0


# -- kernels -------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _reach(j, ap, ai, lp, li, pinv, mark, stamp, stack, pstack, topo):
    """DFS from column j's pattern through assigned L columns.

    Returns the number of reached nodes; topo[:count] holds original row ids
    in reverse-postorder (dependencies before dependents when traversed
    forward from index count-1 down to 0 -- we fill from the back).
    """
    top = topo.shape[0]
    for p0 in range(ap[j], ap[j + 1]):
        r = ai[p0]
        if mark[r] == stamp:
            continue
        # iterative DFS from r
        head = 0
        stack[0] = r
        pstack[0] = -1  # next child position marker, resolved below
        while head >= 0:
            node = stack[head]
            k = pinv[node]
            if mark[node] != stamp:
                mark[node] = stamp
                # children are the below-diagonal entries of L column k
                pstack[head] = lp[k] + 1 if k >= 0 else 0
            descended = False
            if k >= 0:
                pchild = pstack[head]
                while pchild < lp[k + 1]:
                    child = li[pchild]
                    pchild += 1
                    if mark[child] != stamp:
                        pstack[head] = pchild
                        head += 1
                        stack[head] = child
                        descended = True
                        break
                if not descended:
                    pstack[head] = pchild
            if not descended:
                top -= 1
                topo[top] = node
                head -= 1
    return topo.shape[0] - top


@njit(cache=True, nogil=True)
def _lu_factor(n, ap, ai, ax, force_diag, tau):
    """Left-looking LU of a square CSC matrix with optional threshold pivoting.

    Returns (status, column, Lp, Li, Lx, Up, Ui, Ux, pinv):
    status 0 ok, 1 exact zero pivot at `column`, 2 structurally/numerically
    dead column. L row ids are original (pre-pivot) row indices; the caller
    maps them through pinv. U row ids are pivot positions.
    """
    l_cap = max(4 * ai.shape[0] + 8 * n, 64)
    u_cap = l_cap
    lp = np.zeros(n + 1, dtype=np.int64)
    li = np.empty(l_cap, dtype=np.int64)
    lx = np.empty(l_cap, dtype=np.complex128)
    up = np.zeros(n + 1, dtype=np.int64)
    ui = np.empty(u_cap, dtype=np.int64)
    ux = np.empty(u_cap, dtype=np.complex128)

    pinv = np.full(n, -1, dtype=np.int64)
    x = np.zeros(n, dtype=np.complex128)
    mark = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    pstack = np.empty(n, dtype=np.int64)
    topo = np.empty(n, dtype=np.int64)

    lnz = 0
    unz = 0
    for j in range(n):
        nreach = _reach(j, ap, ai, lp, li, pinv, mark, j, stack, pstack, topo)
        base = topo.shape[0] - nreach
        # scatter column j
        for p0 in range(ap[j], ap[j + 1]):
            x[ai[p0]] = ax[p0]
        # eliminate along topological order
        for t in range(base, topo.shape[0]):
            node = topo[t]
            k = pinv[node]
            if k < 0:
                continue
            xk = x[node]
            for p0 in range(lp[k] + 1, lp[k + 1]):  # skip unit diagonal entry
                x[li[p0]] -= xk * lx[p0]

        # pivot choice among unassigned rows of the pattern
        pivrow = -1
        maxabs = 0.0
        n_unassigned = 0
        for t in range(base, topo.shape[0]):
            node = topo[t]
            if pinv[node] >= 0:
                continue
            n_unassigned += 1
            a = abs(x[node])
            if a > maxabs or (a == maxabs and (pivrow == -1 or node < pivrow)):
                maxabs = a
                pivrow = node
        if n_unassigned == 0:
            return 2, j, lp, li[:lnz], lx[:lnz], up, ui[:unz], ux[:unz], pinv
        if force_diag:
            # the intended pivot is original row j (matrix was pre-permuted)
            if mark[j] != j or pinv[j] >= 0 or x[j] == 0:
                return 1, j, lp, li[:lnz], lx[:lnz], up, ui[:unz], ux[:unz], pinv
            pivrow = j
        else:
            if maxabs == 0.0:
                return 1, j, lp, li[:lnz], lx[:lnz], up, ui[:unz], ux[:unz], pinv
            if mark[j] == j and pinv[j] < 0 and abs(x[j]) >= tau * maxabs:
                pivrow = j
        pivot = x[pivrow]
        pinv[pivrow] = j

        # count storage for this column
        n_below = n_unassigned - 1
        n_above = nreach - n_unassigned
        if lnz + n_below + 1 > l_cap:
            new_cap = max(2 * l_cap, lnz + n_below + 1 + n)
            li2 = np.empty(new_cap, dtype=np.int64)
            lx2 = np.empty(new_cap, dtype=np.complex128)
            li2[:lnz] = li[:lnz]
            lx2[:lnz] = lx[:lnz]
            li = li2
            lx = lx2
            l_cap = new_cap
        if unz + n_above + 1 > u_cap:
            new_cap = max(2 * u_cap, unz + n_above + 1 + n)
            ui2 = np.empty(new_cap, dtype=np.int64)
            ux2 = np.empty(new_cap, dtype=np.complex128)
            ui2[:unz] = ui[:unz]
            ux2[:unz] = ux[:unz]
            ui = ui2
            ux = ux2
            u_cap = new_cap

        # L column j: unit diagonal first, then below-pivot multipliers
        li[lnz] = pivrow
        lx[lnz] = 1.0 + 0.0j
        lnz += 1
        for t in range(base, topo.shape[0]):
            node = topo[t]
            if pinv[node] < 0:
                li[lnz] = node
                lx[lnz] = x[node] / pivot
                lnz += 1
        # U column j: assigned rows (pivot positions) then the diagonal
        for t in range(base, topo.shape[0]):
            node = topo[t]
            k = pinv[node]
            if k >= 0 and node != pivrow:
                ui[unz] = k
                ux[unz] = x[node]
                unz += 1
        ui[unz] = j
        ux[unz] = pivot
        unz += 1
        lp[j + 1] = lnz
        up[j + 1] = unz

        # clear work vector along the pattern
        for t in range(base, topo.shape[0]):
            x[topo[t]] = 0.0

    return 0, -1, lp, li[:lnz], lx[:lnz], up, ui[:unz], ux[:unz], pinv


@njit(cache=True, nogil=True)
def _max_transversal(n, ap, ai):
    """Row matching giving a zero-free structural diagonal (MC21-style).

    Returns jmatch with jmatch[row] = column, or -1 where no perfect matching
    exists. Structural diagonal entries are pre-matched, the rest is found by
    augmenting depth-first search with cheap assignment.
    """
    jmatch = np.full(n, -1, dtype=np.int64)
    imatch = np.full(n, -1, dtype=np.int64)
    for j in range(n):
        for p in range(ap[j], ap[j + 1]):
            if ai[p] == j:
                jmatch[j] = j
                imatch[j] = j
                break
    cheap = ap[:n].copy()
    w = np.full(n, -1, dtype=np.int64)
    js = np.empty(n, dtype=np.int64)
    is_ = np.empty(n, dtype=np.int64)
    ps = np.empty(n, dtype=np.int64)
    for k in range(n):
        if imatch[k] != -1:
            continue
        found = False
        head = 0
        js[0] = k
        while head >= 0:
            j = js[head]
            if w[j] != k:
                w[j] = k
                p = cheap[j]
                row = -1
                while p < ap[j + 1]:
                    i = ai[p]
                    p += 1
                    if jmatch[i] == -1:
                        row = i
                        break
                cheap[j] = p
                if row != -1:
                    is_[head] = row
                    found = True
                    break
                ps[head] = ap[j]
            descended = False
            p = ps[head]
            while p < ap[j + 1]:
                i = ai[p]
                p += 1
                j2 = jmatch[i]
                if w[j2] == k:
                    continue
                ps[head] = p
                is_[head] = i
                head += 1
                js[head] = j2
                descended = True
                break
            if not descended and not found:
                head -= 1
        if found:
            for h in range(head, -1, -1):
                jmatch[is_[h]] = js[h]
                imatch[js[h]] = is_[h]
    return jmatch


@njit(cache=True, nogil=True)
def _symbolic(n, ap, ai):
    """Column patterns of L and U for diagonal (no pivoting) elimination.

    Returns (status, column, Lp, Li, Up, Ui); L includes the diagonal, U
    includes the diagonal. status 1 means the diagonal is structurally absent
    at `column`.
    """
    l_cap = max(4 * ai.shape[0] + 8 * n, 64)
    u_cap = l_cap
    lp = np.zeros(n + 1, dtype=np.int64)
    li = np.empty(l_cap, dtype=np.int64)
    up = np.zeros(n + 1, dtype=np.int64)
    ui = np.empty(u_cap, dtype=np.int64)
    pinv = np.full(n, -1, dtype=np.int64)
    mark = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    pstack = np.empty(n, dtype=np.int64)
    topo = np.empty(n, dtype=np.int64)
    lnz = 0
    unz = 0
    for j in range(n):
        nreach = _reach(j, ap, ai, lp, li, pinv, mark, j, stack, pstack, topo)
        base = topo.shape[0] - nreach
        diag_present = mark[j] == j and pinv[j] < 0
        if not diag_present:
            return 1, j, lp, li[:lnz], up, ui[:unz]
        n_unassigned = 0
        for t in range(base, topo.shape[0]):
            if pinv[topo[t]] < 0:
                n_unassigned += 1
        n_above = nreach - n_unassigned
        if lnz + n_unassigned > l_cap:
            new_cap = max(2 * l_cap, lnz + n_unassigned + n)
            li2 = np.empty(new_cap, dtype=np.int64)
            li2[:lnz] = li[:lnz]
            li = li2
            l_cap = new_cap
        if unz + n_above + 1 > u_cap:
            new_cap = max(2 * u_cap, unz + n_above + 1 + n)
            ui2 = np.empty(new_cap, dtype=np.int64)
            ui2[:unz] = ui[:unz]
            ui = ui2
            u_cap = new_cap
        li[lnz] = j
        lnz += 1
        for t in range(base, topo.shape[0]):
            node = topo[t]
            if pinv[node] < 0 and node != j:
                li[lnz] = node
                lnz += 1
        for t in range(base, topo.shape[0]):
            node = topo[t]
            k = pinv[node]
            if k >= 0:
                ui[unz] = k
                unz += 1
        ui[unz] = j
        unz += 1
        pinv[j] = j
        lp[j + 1] = lnz
        up[j + 1] = unz
    return 0, -1, lp, li[:lnz], up, ui[:unz]


@njit(cache=True, nogil=True)
def _lower_solve(n, lp, li, lx, b):
    x = b.copy()
    for j in range(n):
        xj = x[j]
        for p in range(lp[j] + 1, lp[j + 1]):
            x[li[p]] -= lx[p] * xj
    return x


@njit(cache=True, nogil=True)
def _upper_solve(n, up, ui, ux, b):
    x = b.copy()
    for j in range(n - 1, -1, -1):
        # diagonal is the last entry of the sorted column
        x[j] = x[j] / ux[up[j + 1] - 1]
        xj = x[j]
        for p in range(up[j], up[j + 1] - 1):
            x[ui[p]] -= ux[p] * xj
    return x


# -- public operations ----------------------------------------------------------

def _resolve_ordering(a: SparseMatrix, ordering) -> tuple:
    """Map an ordering spec to (Permutation, name)."""
    if isinstance(ordering, Permutation):
        return ordering, "custom"
    if isinstance(ordering, _ordering.OrderingResult):
        return ordering.permutation, ordering.strategy
    if ordering == "natural":
        return Permutation.identity(a.n_rows), "natural"
    graph = _ordering.build_graph(a)
    if ordering == "exact_md":
        return _ordering.exact_min_degree(graph).permutation, "exact_md"
    if ordering == "amd":
        return Permutation.from_elimination_order(_ordering._amd_order(graph)), "amd"
    raise ValueError(f"unknown ordering {ordering!r}")


def symbolic_lu(a: SparseMatrix, ordering="natural") -> SymbolicLu:
    """Symbolic factorization under the no-pivoting policy.

    The predicted patterns match the numeric factorization exactly because
    cancellation zeros are kept structural.
    """
    if a.n_rows != a.n_cols:
        raise ValueError("matrix must be square")
    perm, _ = _resolve_ordering(a, ordering)
    ap = permute(a, perm, perm)
    status, col, lp, li, up, ui = _symbolic(a.n_rows, ap.indptr, ap.indices)
    if status != 0:
        raise StructurallySingularError(
            f"no structural pivot available at column {col}")
    return SymbolicLu(lp, li, up, ui, perm, perm)


def factor(a: SparseMatrix, ordering="amd", pivoting="none", tau=0.1,
           transversal="auto") -> LuFactors:
    """LU-factor a square sparse matrix: P A Q = L U.

    ordering: "natural" | "exact_md" | "amd" | Permutation | OrderingResult.
    pivoting: "none" forces diagonal pivots (ordering fully determines the
    pattern; raises SingularPivotError on an exact zero pivot) or
    "threshold" (rows may swap within a column when the diagonal candidate
    is smaller than tau times the column maximum).
    transversal: "auto" statically row-permutes to a zero-free diagonal when
    the structural diagonal is incomplete (the eigenproblem pencils need
    this; plain grid operators never trigger it, keeping P = Q there);
    "never" and "always" override.
    """
    if a.n_rows != a.n_cols:
        raise ValueError("matrix must be square")
    if pivoting not in ("none", "threshold"):
        raise ValueError(f"unknown pivoting policy {pivoting!r}")
    if transversal not in ("auto", "never", "always"):
        raise ValueError(f"unknown transversal mode {transversal!r}")
    n = a.n_rows
    t0 = time.perf_counter()
    work = a
    pre = None
    need_match = transversal == "always" or (
        transversal == "auto" and not _full_structural_diagonal(a))
    if need_match:
        jmatch = _max_transversal(n, a.indptr, a.indices)
        if np.any(jmatch < 0):
            raise StructurallySingularError(
                "no zero-free diagonal exists (structurally singular matrix)")
        pre = Permutation.from_forward(jmatch)
        work = permute(a, pre, Permutation.identity(n))
    perm, name = _resolve_ordering(work, ordering)
    ap = permute(work, perm, perm)
    status, col, lp, li, lx, up, ui, ux, pinv = _lu_factor(
        n, ap.indptr, ap.indices, ap.values, pivoting == "none", float(tau))
    if status == 1:
        raise SingularPivotError(col)
    if status == 2:
        raise StructurallySingularError(
            f"column {col} has no eligible pivot rows (structurally singular)")
    # L rows are pre-pivot ids; map to pivot positions and sort columns
    li = pinv[li]
    lmat = _csc_from_cols(n, lp, li, lx)
    umat = _csc_from_cols(n, up, ui, ux)
    row_forward = pinv[perm.forward] if pre is None else pinv[perm.forward[pre.forward]]
    row_perm = Permutation.from_forward(row_forward)
    seconds = time.perf_counter() - t0
    return LuFactors(lmat, umat, row_perm, perm, a.nnz, name, pivoting, seconds)


def _full_structural_diagonal(a: SparseMatrix) -> bool:
    cols = np.repeat(np.arange(a.n_cols, dtype=np.int64), np.diff(a.indptr))
    return int(np.count_nonzero(a.indices == cols)) == min(a.n_rows, a.n_cols)


def _csc_from_cols(n, indptr, indices, values) -> SparseMatrix:
    """Assemble CSC from per-column runs that may be unsorted within columns."""
    cols = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    return _csc_from_coo(n, n, indices, cols, values, prune=False)


def solve(f: LuFactors, b: np.ndarray) -> np.ndarray:
    """Solve A x = b given P A Q = L U: x = Q (U^-1 (L^-1 (P b)))."""
    b = np.asarray(b, dtype=np.complex128)
    if b.shape != (f.n,):
        raise ValueError(f"right-hand side length {b.shape} != {f.n}")
    y = f.p.apply(b)
    y = _lower_solve(f.n, f.l.indptr, f.l.indices, f.l.values, y)
    y = _upper_solve(f.n, f.u.indptr, f.u.indices, f.u.values, y)
    return f.q.apply_inverse(y)


def dense_lu_oracle(a: SparseMatrix, ordering="natural", pivoting="none",
                    tau=0.1, cap=DENSE_ORACLE_CAP) -> LuFactors:
    """Straightforward dense elimination with explicit structural tracking.

    Serves as the pattern/value oracle for the sparse path at desk scale.
    Boolean structure is propagated alongside the numbers, so cancellation
    zeros remain part of the pattern exactly as in the sparse factorization.
    """
    n = a.n_rows
    if n != a.n_cols:
        raise ValueError("matrix must be square")
    if n > cap:
        raise ValueError(f"dense oracle capped at n <= {cap}, got {n}")
    t0 = time.perf_counter()
    perm, name = _resolve_ordering(a, ordering)
    ap = permute(a, perm, perm)
    b = ap.to_dense()
    s = np.zeros((n, n), dtype=bool)
    for j in range(n):
        lo, hi = ap.indptr[j], ap.indptr[j + 1]
        s[ap.indices[lo:hi], j] = True
    rowperm = np.arange(n, dtype=np.int64)
    for k in range(n):
        if pivoting == "threshold":
            colabs = np.abs(b[k:, k]) * s[k:, k]
            imax = int(np.argmax(colabs))
            if colabs[imax] == 0.0:
                raise SingularPivotError(k)
            if not (s[k, k] and abs(b[k, k]) >= tau * colabs[imax]):
                isel = k + imax
                b[[k, isel]] = b[[isel, k]]
                s[[k, isel]] = s[[isel, k]]
                rowperm[[k, isel]] = rowperm[[isel, k]]
        if not s[k, k] or b[k, k] == 0:
            raise SingularPivotError(k)
        below = s[k + 1:, k]
        if below.any():
            mult = np.where(below, b[k + 1:, k] / b[k, k], 0)
            b[k + 1:, k] = mult
            right = s[k, k + 1:]
            b[k + 1:, k + 1:] -= np.outer(mult, np.where(right, b[k, k + 1:], 0))
            s[k + 1:, k + 1:] |= np.outer(below, right)
    lrows, lcols = [], []
    urows, ucols = [], []
    lvals, uvals = [], []
    for j in range(n):
        lrows.append(j)
        lcols.append(j)
        lvals.append(1.0 + 0j)
        for i in range(n):
            if not s[i, j]:
                continue
            if i > j:
                lrows.append(i)
                lcols.append(j)
                lvals.append(b[i, j])
            else:
                urows.append(i)
                ucols.append(j)
                uvals.append(b[i, j])
    lmat = _csc_from_coo(n, n, np.array(lrows), np.array(lcols),
                         np.array(lvals, dtype=np.complex128), prune=False)
    umat = _csc_from_coo(n, n, np.array(urows), np.array(ucols),
                         np.array(uvals, dtype=np.complex128), prune=False)
    pinv_full = np.empty(n, dtype=np.int64)
    pinv_full[rowperm] = np.arange(n, dtype=np.int64)
    row_perm = Permutation.from_forward(pinv_full[perm.forward])
    seconds = time.perf_counter() - t0
    return LuFactors(lmat, umat, row_perm, perm, a.nnz, name, pivoting, seconds)


@njit(cache=True, nogil=True)
def _recon_err(n, pap, pai, pax, lp, li, lx, up, ui, ux):
    x = np.zeros(n, dtype=np.complex128)
    err = 0.0
    for j in range(n):
        for pu in range(up[j], up[j + 1]):
            k = ui[pu]
            ukj = ux[pu]
            for pl in range(lp[k], lp[k + 1]):
                x[li[pl]] += ukj * lx[pl]
        for pa in range(pap[j], pap[j + 1]):
            x[pai[pa]] -= pax[pa]
        for pu in range(up[j], up[j + 1]):
            k = ui[pu]
            for pl in range(lp[k], lp[k + 1]):
                r = li[pl]
                e = abs(x[r])
                if e > err:
                    err = e
                x[r] = 0.0
        for pa in range(pap[j], pap[j + 1]):
            r = pai[pa]
            e = abs(x[r])
            if e > err:
                err = e
            x[r] = 0.0
    return err


def reconstruction_error(a: SparseMatrix, f: LuFactors) -> float:
    """max-norm of P A Q - L U, for correctness checks."""
    paq = permute(a, f.p, f.q)
    return float(_recon_err(
        a.n_rows, paq.indptr, paq.indices, paq.values,
        f.l.indptr, f.l.indices, f.l.values,
        f.u.indptr, f.u.indices, f.u.values))


def fill_report(a: SparseMatrix, ordering="amd", bc: str = "", nx: int = 0,
                ny: int = 0, pivoting: str = "none", tau: float = 0.1) -> FillReport:
    """Factor and record the nnz counts; the paper-facing measurement."""
    f = factor(a, ordering=ordering, pivoting=pivoting, tau=tau)
    return FillReport(bc, nx, ny, f.ordering, f.nnz_a, f.nnz_l, f.nnz_u, f.seconds)
