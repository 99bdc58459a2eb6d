"""2D TM (H_z) finite-difference frequency-domain assembly with stretched PML.

Discretizes (d/dx (1/eps) d/dx + d/dy (1/eps) d/dy + mu0 w^2) Hz = i w Mz on a
uniform grid in normalized units (c = mu0 = eps0 = 1), with stretched-
coordinate PML (each derivative scaled by 1/s at its evaluation point) and
three ways of truncating the grid behind the PML:

* periodic        -- wraparound couplings on that axis
* dirichlet       -- field pinned to zero just outside the grid: boundary
                     cells keep reduced stencils (missing neighbors drop,
                     their conductance stays on the diagonal)
* modified_dirichlet -- dirichlet, plus the outermost plane of nodes on that
                     axis is fully decoupled: identity rows, and couplings
                     from interior nodes into the plane are removed (the
                     interior diagonal keeps the wall conductance, i.e. the
                     plane is treated as exactly zero field)

The modified variant minimizes boundary connectivity, which is the quantity
this package exists to measure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .sparse import SparseMatrix, _csc_from_coo

__all__ = [
    "BoundaryKind",
    "PmlSpec",
    "GridSpec",
    "Vacuum",
    "Dielectric",
    "Drude",
    "MaterialMap",
    "AssembledSystem",
    "stretch_factor",
    "sigma_max",
    "assemble_tm",
    "count_couplings",
    "point_source",
    "extract_line",
    "interior_mask",
    "boundary_node_mask",
]


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"
    MODIFIED_DIRICHLET = "modified_dirichlet"

    @staticmethod
    def parse(name: str) -> "BoundaryKind":
        key = name.strip().lower().replace("-", "_")
        for kind in BoundaryKind:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown boundary kind {name!r}")


_DIRICHLET_FAMILY = (BoundaryKind.DIRICHLET, BoundaryKind.MODIFIED_DIRICHLET)


@dataclass(frozen=True)
class PmlSpec:
    """Polynomial-graded absorber: thickness in cells, grading order, target R0."""

    thickness: int
    m: float = 3.0
    r0: float = 1e-15

    def __post_init__(self):
        if self.thickness < 0:
            raise ValueError("PML thickness must be >= 0 cells")
        if self.m < 1:
            raise ValueError("grading order m must be >= 1")
        if not (0 < self.r0 < 1):
            raise ValueError("target reflection R0 must be in (0, 1)")


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid: cell counts (PML included), cell sizes, PML per side.

    Cell sizes are in the package's normalized length unit; the operating
    frequency passed to assembly is in the matching angular units (a vacuum
    wave of frequency w has wavelength 2*pi/w in these lengths).
    """

    nx: int
    ny: int
    dx: float
    dy: float
    pml: tuple = (PmlSpec(0), PmlSpec(0), PmlSpec(0), PmlSpec(0))  # x-lo, x-hi, y-lo, y-hi

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid must be at least 3x3 cells")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("cell sizes must be positive")
        pml = tuple(self.pml)
        if len(pml) != 4 or not all(isinstance(p, PmlSpec) for p in pml):
            raise ValueError("pml must be four PmlSpec entries (x-lo, x-hi, y-lo, y-hi)")
        object.__setattr__(self, "pml", pml)
        if pml[0].thickness + pml[1].thickness >= self.nx:
            raise ValueError("x PML layers meet or overlap: thinner PML or larger nx")
        if pml[2].thickness + pml[3].thickness >= self.ny:
            raise ValueError("y PML layers meet or overlap: thinner PML or larger ny")
        for p, half in ((pml[0], self.nx / 2), (pml[1], self.nx / 2),
                        (pml[2], self.ny / 2), (pml[3], self.ny / 2)):
            if p.thickness >= half:
                raise ValueError("PML thickness must be below half the grid dimension")

    @staticmethod
    def with_uniform_pml(nx, ny, dx, dy, thickness, m=3.0, r0=1e-15) -> "GridSpec":
        p = PmlSpec(thickness, m, r0)
        return GridSpec(nx, ny, dx, dy, (p, p, p, p))

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    def node_index(self, i: int, j: int) -> int:
        return i * self.ny + j


# -- materials -------------------------------------------------------------------

@dataclass(frozen=True)
class Vacuum:
    def permittivity(self, omega: float) -> complex:
        return 1.0 + 0.0j


@dataclass(frozen=True)
class Dielectric:
    eps_r: float

    def __post_init__(self):
        if self.eps_r < 1:
            raise ValueError("relative permittivity must be >= 1")

    def permittivity(self, omega: float) -> complex:
        return complex(self.eps_r)


@dataclass(frozen=True)
class Drude:
    """Metal: eps(w) = 1 - wp^2 / (w^2 + i*gamma*w), lossy for gamma > 0."""

    omega_p: float
    gamma: float

    def permittivity(self, omega: float) -> complex:
        return 1.0 - self.omega_p ** 2 / (omega ** 2 + 1j * self.gamma * omega)


@dataclass
class MaterialMap:
    """Per-cell material layout: a background plus painted rectangles.

    Rectangles are half-open cell index ranges [i0, i1) x [j0, j1); later
    paints win. ``permittivity`` evaluates the whole grid at a frequency.
    """

    nx: int
    ny: int
    background: object = field(default_factory=Vacuum)
    regions: list = field(default_factory=list)

    def paint(self, i0: int, i1: int, j0: int, j1: int, material) -> "MaterialMap":
        if not (0 <= i0 <= i1 <= self.nx and 0 <= j0 <= j1 <= self.ny):
            raise ValueError(f"region [{i0},{i1})x[{j0},{j1}) outside {self.nx}x{self.ny} grid")
        self.regions.append(((i0, i1, j0, j1), material))
        return self

    def permittivity(self, omega: float) -> np.ndarray:
        eps = np.full((self.nx, self.ny), self.background.permittivity(omega),
                      dtype=np.complex128)
        for (i0, i1, j0, j1), mat in self.regions:
            eps[i0:i1, j0:j1] = mat.permittivity(omega)
        return eps


# -- PML stretch ------------------------------------------------------------------

def sigma_max(spec: PmlSpec, cell_size: float) -> float:
    """Peak conductivity: -(m+1) ln(R0) / (2 * thickness * cell_size)."""
    depth = spec.thickness * cell_size
    return -(spec.m + 1) * math.log(spec.r0) / (2.0 * depth)


def stretch_factor(spec: PmlSpec, omega: float, depth_cells: float,
                   cell_size: float) -> complex:
    """s = 1 + i sigma(u)/omega at a point depth_cells into the absorber.

    depth_cells counts from the inner PML interface (0 there, ``thickness``
    at the outer wall); non-positive depths are outside the PML where s = 1.
    """
    if spec.thickness == 0 or depth_cells <= 0:
        return 1.0 + 0.0j
    frac = min(depth_cells / spec.thickness, 1.0)
    sigma = sigma_max(spec, cell_size) * frac ** spec.m
    return 1.0 + 1j * sigma / omega


def _axis_stretches(n, cell, lo: PmlSpec, hi: PmlSpec, omega):
    """Center (n) and edge (n+1) stretch factors along one axis.

    Edge k sits between cells k-1 and k (so edges 0 and n are the walls).
    """
    centers = np.arange(n) + 0.5
    edges = np.arange(n + 1, dtype=float)
    s_c = np.ones(n, dtype=np.complex128)
    s_e = np.ones(n + 1, dtype=np.complex128)
    if lo.thickness > 0:
        for arr, pos in ((s_c, centers), (s_e, edges)):
            depth = lo.thickness - pos
            for k in np.nonzero(depth > 0)[0]:
                arr[k] = stretch_factor(lo, omega, depth[k], cell)
    if hi.thickness > 0:
        inner = n - hi.thickness
        for arr, pos in ((s_c, centers), (s_e, edges)):
            depth = pos - inner
            for k in np.nonzero(depth > 0)[0]:
                arr[k] = stretch_factor(hi, omega, depth[k], cell)
    return s_c, s_e


def _edge_inv_eps(eps: np.ndarray, axis: int, periodic: bool) -> np.ndarray:
    """1/eps at half-grid edges via harmonic averaging of adjacent cells.

    Returns an array with one extra entry along ``axis``; edge k lies between
    cells k-1 and k. Wall edges reuse the adjacent cell (ghost of the same
    material), or wrap around when periodic.
    """
    inv = 1.0 / eps
    lo = np.roll(inv, 1, axis=axis)
    mean_interior = 0.5 * (inv + lo)  # harmonic mean of eps = plain mean of 1/eps
    if axis == 0:
        out = np.empty((eps.shape[0] + 1, eps.shape[1]), dtype=np.complex128)
        out[:-1, :] = mean_interior
        out[-1, :] = mean_interior[0, :] if periodic else inv[-1, :]
        if not periodic:
            out[0, :] = inv[0, :]
    else:
        out = np.empty((eps.shape[0], eps.shape[1] + 1), dtype=np.complex128)
        out[:, :-1] = mean_interior
        out[:, -1] = mean_interior[:, 0] if periodic else inv[:, -1]
        if not periodic:
            out[:, 0] = inv[:, 0]
    return out


@dataclass(frozen=True)
class AssembledSystem:
    """Operator matrix plus the grid/BC context it was assembled under."""

    matrix: SparseMatrix
    grid: GridSpec
    bc: tuple
    omega: float

    @property
    def n(self) -> int:
        return self.matrix.n_rows

    def node_index(self, i: int, j: int) -> int:
        return self.grid.node_index(i, j)

    @property
    def coupling_count(self) -> int:
        return self.matrix.off_diagonal_nnz()


def boundary_node_mask(grid: GridSpec, bc: tuple) -> np.ndarray:
    """True at nodes lying on the extremal plane of a Dirichlet-family axis."""
    mask = np.zeros((grid.nx, grid.ny), dtype=bool)
    if bc[0] in _DIRICHLET_FAMILY:
        mask[0, :] = True
        mask[-1, :] = True
    if bc[1] in _DIRICHLET_FAMILY:
        mask[:, 0] = True
        mask[:, -1] = True
    return mask


def interior_mask(grid: GridSpec) -> np.ndarray:
    """True on cells outside every PML layer."""
    mask = np.ones((grid.nx, grid.ny), dtype=bool)
    xlo, xhi, ylo, yhi = (p.thickness for p in grid.pml)
    if xlo:
        mask[:xlo, :] = False
    if xhi:
        mask[grid.nx - xhi:, :] = False
    if ylo:
        mask[:, :ylo] = False
    if yhi:
        mask[:, grid.ny - yhi:] = False
    return mask


def assemble_tm(grid: GridSpec, material: MaterialMap, bc: tuple, omega: float,
                allow_unshielded_dirichlet: bool = False) -> AssembledSystem:
    """Assemble the H_z operator for the given boundary conditions.

    bc is one BoundaryKind per axis (x, y). Dirichlet-family axes must carry
    PML on both of their sides unless ``allow_unshielded_dirichlet`` is set
    (bare reflecting walls are almost never the physics being asked for).
    """
    if material.nx != grid.nx or material.ny != grid.ny:
        raise ValueError("material map dimensions do not match the grid")
    if omega <= 0:
        raise ValueError("operating frequency must be positive")
    bc = (bc[0], bc[1])
    if not all(isinstance(k, BoundaryKind) for k in bc):
        raise TypeError("bc must be a pair of BoundaryKind")
    if not allow_unshielded_dirichlet:
        xlo, xhi, ylo, yhi = (p.thickness for p in grid.pml)
        if bc[0] in _DIRICHLET_FAMILY and (xlo == 0 or xhi == 0):
            raise ValueError("x-axis Dirichlet wall without PML; pass "
                             "allow_unshielded_dirichlet=True to force")
        if bc[1] in _DIRICHLET_FAMILY and (ylo == 0 or yhi == 0):
            raise ValueError("y-axis Dirichlet wall without PML; pass "
                             "allow_unshielded_dirichlet=True to force")

    nx, ny = grid.nx, grid.ny
    eps = material.permittivity(omega)
    per_x = bc[0] == BoundaryKind.PERIODIC
    per_y = bc[1] == BoundaryKind.PERIODIC

    sxc, sxe = _axis_stretches(nx, grid.dx, grid.pml[0], grid.pml[1], omega)
    syc, sye = _axis_stretches(ny, grid.dy, grid.pml[2], grid.pml[3], omega)
    iex = _edge_inv_eps(eps, 0, per_x)  # (nx+1, ny): edge k between cells k-1,k
    iey = _edge_inv_eps(eps, 1, per_y)

    inv_sxc = (1.0 / sxc)[:, None]
    inv_syc = (1.0 / syc)[None, :]
    # conductances through each face of cell (i, j)
    c_e = inv_sxc * iex[1:, :] / sxe[1:, None] / grid.dx ** 2    # to (i+1, j)
    c_w = inv_sxc * iex[:-1, :] / sxe[:-1, None] / grid.dx ** 2  # to (i-1, j)
    c_n = inv_syc * iey[:, 1:] / sye[None, 1:] / grid.dy ** 2    # to (i, j+1)
    c_s = inv_syc * iey[:, :-1] / sye[None, :-1] / grid.dy ** 2  # to (i, j-1)

    diag = -(c_e + c_w + c_n + c_s) + omega ** 2

    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    flat = (ii * ny + jj).ravel()

    def neighbor(di, dj):
        ni, nj = ii + di, jj + dj
        if per_x:
            ni = ni % nx
        if per_y:
            nj = nj % ny
        valid = (ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny)
        return ((ni % nx) * ny + (nj % ny)).ravel(), valid.ravel()

    neighbors = [
        (c_e.ravel(), neighbor(1, 0)),
        (c_w.ravel(), neighbor(-1, 0)),
        (c_n.ravel(), neighbor(0, 1)),
        (c_s.ravel(), neighbor(0, -1)),
    ]

    bmask = None
    if BoundaryKind.MODIFIED_DIRICHLET in bc:
        mbc = (bc[0] if bc[0] == BoundaryKind.MODIFIED_DIRICHLET else BoundaryKind.PERIODIC,
               bc[1] if bc[1] == BoundaryKind.MODIFIED_DIRICHLET else BoundaryKind.PERIODIC)
        bmask = boundary_node_mask(grid, mbc).ravel()

    rows = [flat]
    cols = [flat]
    vals = [diag.ravel()]
    for coeff, (nbr, valid) in neighbors:
        keep = valid
        if bmask is not None:
            # no couplings from or into the decoupled planes
            keep = keep & ~bmask & ~bmask[nbr]
        rows.append(flat[keep])
        cols.append(nbr[keep])
        vals.append(coeff[keep])
    if bmask is not None:
        # identity rows on the decoupled planes
        vals[0] = np.where(bmask, 1.0 + 0.0j, vals[0])

    a = _csc_from_coo(nx * ny, nx * ny,
                      np.concatenate(rows), np.concatenate(cols),
                      np.concatenate(vals), prune=True)
    return AssembledSystem(a, grid, bc, omega)


def count_couplings(system: AssembledSystem) -> int:
    """Directed node-to-node couplings: off-diagonal structural nonzeros."""
    return system.coupling_count


def point_source(grid: GridSpec, location: tuple, amplitude: complex,
                 omega: float) -> np.ndarray:
    """Right-hand side i*omega*amplitude at one interior (non-PML) node."""
    i, j = location
    if not (0 <= i < grid.nx and 0 <= j < grid.ny):
        raise ValueError(f"source location {location} outside the grid")
    if not interior_mask(grid)[i, j]:
        raise ValueError(f"source location {location} lies inside the PML")
    b = np.zeros(grid.n_nodes, dtype=np.complex128)
    b[grid.node_index(i, j)] = 1j * omega * amplitude
    return b


def extract_line(fieldvec: np.ndarray, grid: GridSpec, y_index: int = None,
                 x_index: int = None) -> np.ndarray:
    """Field samples along a grid line: fixed y (length nx) or fixed x (ny)."""
    if (y_index is None) == (x_index is None):
        raise ValueError("pass exactly one of y_index or x_index")
    f = np.asarray(fieldvec).reshape(grid.nx, grid.ny)
    if y_index is not None:
        if not 0 <= y_index < grid.ny:
            raise ValueError(f"y_index {y_index} out of range")
        return f[:, y_index].copy()
    if not 0 <= x_index < grid.nx:
        raise ValueError(f"x_index {x_index} out of range")
    return f[x_index, :].copy()
