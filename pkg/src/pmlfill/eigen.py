"""Bloch waveguide eigenproblem: quadratic form, linearized pencil, shift-invert.

For a structure periodic along x, substituting H_z -> H_z e^{i kx x} turns
the driven operator into a quadratic eigenproblem in the propagation
constant kx:

    (M + lam*C + lam^2*K) x = 0,   lam = kx,

with M the frequency-shifted Helmholtz operator (same assembly as the
driven problem), C the first-order Bloch cross term, and K diagonal. The
quadratic is linearized to a 2N generalized pencil lam*D*w = B*w with
w = [x, lam*x]:

    D = [[I, 0], [0, K]],     B = [[0, I], [-M, -C]].

Eigenvalues near a target sigma come from Arnoldi iteration on
(B - sigma*D)^{-1} D, where the inverse is applied through the sparse LU
factors (one pair of triangular solves plus one multiply by D per step;
the dense inverse is never formed).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import lu as _lu
from .fdfd import (AssembledSystem, BoundaryKind, GridSpec, MaterialMap,
                   _axis_stretches, assemble_tm, boundary_node_mask,
                   interior_mask)
from .sparse import (Permutation, SparseMatrix, _csc_from_coo, add_scaled,
                     block_2x2, diag, eye, spmv)

__all__ = [
    "QepMatrices",
    "Pencil",
    "EigenPair",
    "ArnoldiConfig",
    "ShiftIsEigenvalueError",
    "assemble_qep",
    "linearize",
    "shift_invert_arnoldi",
    "quadratic_residual",
    "mode_filter",
    "band_scan",
]


class ShiftIsEigenvalueError(RuntimeError):
    """B - sigma*D is singular: sigma coincides with an eigenvalue; move it."""


@dataclass(frozen=True)
class QepMatrices:
    """Quadratic eigenproblem matrices (M + lam*C + lam^2*K) x = 0."""

    k: SparseMatrix
    m: SparseMatrix
    c: SparseMatrix
    grid: GridSpec = None
    bc: tuple = None
    omega: float = 0.0

    @property
    def n(self) -> int:
        return self.m.n_rows


@dataclass(frozen=True)
class Pencil:
    """Generalized problem lam*D*w = B*w of dimension 2N (or any (B, D) pair)."""

    b: SparseMatrix
    d: SparseMatrix

    @property
    def n(self) -> int:
        return self.b.n_rows


@dataclass(frozen=True)
class EigenPair:
    """One recovered mode: eigenvalue, eigenvector, and quality measures.

    ``residual`` is ||B w - lam D w||_2 / ||w||_2; ``interior_fraction`` is
    filled in by the mode filter (energy share outside the PML), None until
    then. For linearized quadratic pencils the vector satisfies
    w = [x, lam*x].
    """

    lam: complex
    w: np.ndarray
    residual: float
    converged: bool
    interior_fraction: float = None


@dataclass(frozen=True)
class ArnoldiConfig:
    """Shift-invert Arnoldi controls; the start vector is seeded for determinism."""

    sigma: complex = 0.0
    k: int = 6
    subspace: int = 0        # 0: auto (max(2k + 10, 30))
    tolerance: float = 1e-10
    max_restarts: int = 12
    seed: int = 20240601
    pivoting: str = "none"

    def __post_init__(self):
        m = self.subspace if self.subspace else max(2 * self.k + 10, 30)
        if self.k >= m:
            raise ValueError("requested eigenpair count must be below the subspace size")
        object.__setattr__(self, "subspace", m)


def assemble_qep(grid: GridSpec, material: MaterialMap, bc: tuple,
                 omega: float) -> QepMatrices:
    """Build (K, M, C) for the Bloch eigenproblem along x.

    The x boundary must be periodic (it is the Bloch axis); the y boundary
    carries the PML backing under study. M reuses the driven-problem
    assembly; C is the centered-difference cross term with the same stretch
    and averaging rules; K is diagonal with -1/eps per cell. On a modified
    Dirichlet y-backing the decoupled plane gets identity rows in M, zeroed
    rows/columns in C, and zero diagonal in K, which pushes the plane's
    artificial pencil modes to infinity instead of parking them near the
    shift targets used for band scans.
    """
    if bc[0] != BoundaryKind.PERIODIC:
        raise ValueError("the x axis is the Bloch axis and must be periodic")
    m_sys = assemble_tm(grid, material, bc, omega)
    nx, ny = grid.nx, grid.ny
    n = nx * ny
    eps = material.permittivity(omega)
    inv_eps = 1.0 / eps

    decoupled = None
    if bc[1] == BoundaryKind.MODIFIED_DIRICHLET:
        decoupled = boundary_node_mask(grid, (BoundaryKind.PERIODIC, bc[1]))

    kdiag = -inv_eps.copy()
    if decoupled is not None:
        kdiag[decoupled] = 0.0
    kmat = diag(kdiag.ravel())

    # C = i * (d/dx eps^-1 + eps^-1 d/dx), centered differences, periodic in x
    sxc, _ = _axis_stretches(nx, grid.dx, grid.pml[0], grid.pml[1], omega)
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    flat = (ii * ny + jj).ravel()
    east = (((ii + 1) % nx) * ny + jj).ravel()
    west = (((ii - 1) % nx) * ny + jj).ravel()
    inv_sxc = (1.0 / sxc)[:, None]
    half = 1j / (2.0 * grid.dx)
    ce = (half * inv_sxc * (np.roll(inv_eps, -1, axis=0) + inv_eps)).ravel()
    cw = (-half * inv_sxc * (np.roll(inv_eps, 1, axis=0) + inv_eps)).ravel()
    rows = np.concatenate([flat, flat])
    cols = np.concatenate([east, west])
    vals = np.concatenate([ce, cw])
    if decoupled is not None:
        dead = decoupled.ravel()
        keep = ~dead[rows] & ~dead[cols]
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    cmat = _csc_from_coo(n, n, rows, cols, vals, prune=True)

    return QepMatrices(kmat, m_sys.matrix, cmat, grid, bc, omega)


def linearize(qep: QepMatrices) -> Pencil:
    """Companion pencil lam*D*w = B*w with w = [x, lam*x].

    Block layout: D = [[I, 0], [0, K]], B = [[0, I], [-M, -C]]; the zero
    blocks stay structurally empty and the identity blocks are exact, so
    nnz(B) = nnz(C) + nnz(M) + N and nnz(D) = nnz(K) + N.
    """
    n = qep.m.n_rows
    if qep.k.n_rows != n or qep.c.n_rows != n:
        raise ValueError("K, M, C dimensions disagree")
    ident = eye(n)
    neg_m = SparseMatrix(n, n, qep.m.indptr, qep.m.indices, -qep.m.values)
    neg_c = SparseMatrix(n, n, qep.c.indptr, qep.c.indices, -qep.c.values)
    d = block_2x2(((ident, None), (None, qep.k)), n, n, 2 * n, 2 * n)
    b = block_2x2(((None, ident), (neg_m, neg_c)), n, n, 2 * n, 2 * n)
    return Pencil(b, d)


def quadratic_residual(qep: QepMatrices, lam: complex, x: np.ndarray) -> float:
    """||(M + lam*C + lam^2*K) x||_2 / ||x||_2."""
    r = spmv(qep.m, x) + lam * spmv(qep.c, x) + lam ** 2 * spmv(qep.k, x)
    return float(np.linalg.norm(r) / np.linalg.norm(x))


def _pencil_residual(pencil: Pencil, lam: complex, w: np.ndarray) -> float:
    r = spmv(pencil.b, w) - lam * spmv(pencil.d, w)
    return float(np.linalg.norm(r) / np.linalg.norm(w))


def shift_invert_arnoldi(pencil: Pencil, cfg: ArnoldiConfig) -> list:
    """Eigenpairs of lam*D*w = B*w nearest cfg.sigma.

    Factors B - sigma*D once and runs restarted Arnoldi with locking of
    converged Ritz vectors; each iteration applies one D multiply and one
    pair of triangular solves. Raises ShiftIsEigenvalueError when the
    shifted matrix is singular. Pairs come back sorted by |lam - sigma|; if
    restarts run out, the unconverged remainder is returned flagged.
    """
    n = pencil.n
    sigma = complex(cfg.sigma)
    shifted = add_scaled(pencil.b, pencil.d, -sigma)
    try:
        factors = _lu.factor(shifted, ordering="amd", pivoting=cfg.pivoting)
    except (_lu.SingularPivotError, _lu.StructurallySingularError) as exc:
        raise ShiftIsEigenvalueError(
            f"B - sigma*D is singular at sigma={sigma}: the shift coincides "
            f"with an eigenvalue; perturb sigma slightly") from exc

    def op(v):
        return _lu.solve(factors, spmv(pencil.d, v))

    scale = max(pencil.b.max_abs(), abs(sigma) * pencil.d.max_abs(), 1.0)
    rng = np.random.default_rng(cfg.seed)
    m = min(cfg.subspace, n)
    locked_vecs = []
    locked_pairs = []

    def orthogonalize(v):
        for q in locked_vecs:
            v = v - np.vdot(q, v) * q
        return v

    def fresh_start():
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = orthogonalize(v)
        return v / np.linalg.norm(v)

    start = fresh_start()
    new_unconverged = []
    for _ in range(cfg.max_restarts + 1):
        v_basis = np.empty((m + 1, n), dtype=np.complex128)
        h = np.zeros((m + 1, m), dtype=np.complex128)
        nv = np.linalg.norm(start)
        if nv < 1e-300:
            start = fresh_start()
            nv = np.linalg.norm(start)
        v_basis[0] = start / nv
        steps = 0
        for k in range(m):
            wvec = op(v_basis[k])
            wvec = orthogonalize(wvec)
            for _pass in range(2):  # modified Gram-Schmidt with one refinement
                for i in range(k + 1):
                    c = np.vdot(v_basis[i], wvec)
                    h[i, k] += c
                    wvec = wvec - c * v_basis[i]
            beta = np.linalg.norm(wvec)
            h[k + 1, k] = beta
            steps = k + 1
            if beta < 1e-12:
                break
            v_basis[k + 1] = wvec / beta
        hk = h[:steps, :steps]
        evals, evecs = np.linalg.eig(hk)
        order = np.argsort(-np.abs(evals))
        want = cfg.k - len(locked_pairs)
        new_unconverged = []
        for idx in order:
            beta_ritz = evals[idx]
            if abs(beta_ritz) < 1e-14:
                continue  # infinite eigenvalue of the pencil (or dead direction)
            y = evecs[:, idx]
            wv = (v_basis[:steps].T @ y)
            nwv = np.linalg.norm(wv)
            if nwv < 1e-300:
                continue
            wv = wv / nwv
            lam = sigma + 1.0 / beta_ritz
            res = _pencil_residual(pencil, lam, wv)
            pair = EigenPair(lam, wv, res, True)
            if res <= cfg.tolerance * scale:
                duplicate = any(
                    abs(lk.lam - lam) <= 1e-9 * max(1.0, abs(lam))
                    and abs(np.vdot(lk.w, wv)) > 0.9
                    for lk in locked_pairs)
                if not duplicate and len(locked_pairs) < cfg.k:
                    locked_pairs.append(pair)
                    locked_vecs.append(wv.copy())
            else:
                new_unconverged.append(pair)
            if len(locked_pairs) >= cfg.k:
                break
        if len(locked_pairs) >= cfg.k:
            break
        if new_unconverged:
            combo = np.zeros(n, dtype=np.complex128)
            for pr in new_unconverged[:want]:
                combo += pr.w
            start = orthogonalize(combo)
        else:
            start = fresh_start()
    pairs = list(locked_pairs)
    if len(pairs) < cfg.k:
        for pr in new_unconverged[:cfg.k - len(pairs)]:
            pairs.append(replace(pr, converged=False))
    pairs.sort(key=lambda p: abs(p.lam - sigma))
    return pairs


def mode_filter(pairs: list, grid: GridSpec, min_interior_fraction: float = 0.9,
                max_residual: float = None) -> list:
    """Keep pairs whose |H_z|^2 energy lives mostly outside the PML.

    The fraction is computed from the first block of w (the physical field);
    pairs failing the energy or residual test are dropped. Ordering is
    preserved and surviving pairs carry their interior_fraction.
    """
    mask = interior_mask(grid).ravel()
    n = grid.n_nodes
    kept = []
    for pair in pairs:
        x = pair.w[:n]
        total = float(np.sum(np.abs(x) ** 2))
        frac = float(np.sum(np.abs(x[mask]) ** 2) / total) if total > 0 else 0.0
        if frac < min_interior_fraction:
            continue
        if max_residual is not None and pair.residual > max_residual:
            continue
        kept.append(replace(pair, interior_fraction=frac))
    return kept


@dataclass(frozen=True)
class BandPoint:
    """One filtered mode at one frequency; kx in the pencil's eigenvalue units."""

    omega: float
    re_kx: float
    im_kx: float
    residual: float
    energy_fraction: float

    CSV_HEADER = "omega,re_kx,im_kx,residual,energy_fraction"

    def csv_row(self) -> str:
        return (f"{self.omega:.12g},{self.re_kx:.12g},{self.im_kx:.12g},"
                f"{self.residual:.6g},{self.energy_fraction:.6g}")


def band_scan(grid: GridSpec, material_of, bc: tuple, omegas, sigma: complex = 0.0,
              k: int = 6, min_interior_fraction: float = 0.9,
              arnoldi: ArnoldiConfig = None) -> tuple:
    """Filtered (omega, kx) table over a frequency list.

    material_of: either a MaterialMap (dispersive materials are re-evaluated
    per omega internally anyway) or a callable omega -> MaterialMap.
    Failures at individual frequencies are recorded and the scan continues.
    Returns (list of BandPoint, list of (omega, error-string)).
    """
    points = []
    failures = []
    for omega in omegas:
        material = material_of(omega) if callable(material_of) else material_of
        try:
            qep = assemble_qep(grid, material, bc, omega)
            pencil = linearize(qep)
            base = arnoldi if arnoldi is not None else ArnoldiConfig()
            cfg = replace(base, sigma=sigma, k=k)
            pairs = shift_invert_arnoldi(pencil, cfg)
            for pair in mode_filter(pairs, grid, min_interior_fraction):
                points.append(BandPoint(float(omega), float(pair.lam.real),
                                        float(pair.lam.imag), pair.residual,
                                        pair.interior_fraction))
        except Exception as exc:  # per-point failures must not kill the scan
            failures.append((float(omega), f"{type(exc).__name__}: {exc}"))
    return points, failures
