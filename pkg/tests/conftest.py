"""Shared fixtures: stencil grids, arrow matrices, and the LU test corpus."""

import numpy as np
import pytest

from pmlfill import (BoundaryKind, GridSpec, MaterialMap, TripletBuffer,
                     assemble_tm)


def arrow_matrix(n, diag=2.0, off=1.0):
    """Hub node 0 coupled to every other node; diag/off set the values."""
    buf = TripletBuffer(n, n)
    for i in range(n):
        buf.add(i, i, diag)
        if i > 0:
            buf.add(0, i, off)
            buf.add(i, 0, off)
    return buf.to_csc()


def grid_system(nx, bc, omega=2 * np.pi, dx=0.05):
    """Vacuum nx-by-nx assembly without PML (pattern-level fixtures)."""
    grid = GridSpec(nx, nx, dx, dx)
    material = MaterialMap(nx, nx)
    return assemble_tm(grid, material, (bc, bc), omega,
                       allow_unshielded_dirichlet=True)


def random_sparse(n, nnz, seed, ensure_diag=True):
    rng = np.random.default_rng(seed)
    buf = TripletBuffer(n, n)
    for _ in range(nnz):
        buf.add(int(rng.integers(n)), int(rng.integers(n)),
                complex(rng.standard_normal(), rng.standard_normal()))
    if ensure_diag:
        for i in range(n):
            buf.add(i, i, 8.0 + 1j)
    return buf.to_csc()


@pytest.fixture(scope="session")
def stencil_10():
    return {
        "periodic": grid_system(10, BoundaryKind.PERIODIC),
        "dirichlet": grid_system(10, BoundaryKind.DIRICHLET),
        "modified": grid_system(10, BoundaryKind.MODIFIED_DIRICHLET),
    }


@pytest.fixture(scope="session")
def lu_corpus():
    """Small matrices every LU test runs over: name -> SparseMatrix."""
    corpus = {
        "arrow5": arrow_matrix(5, diag=4.0),
        "arrow50": arrow_matrix(50, diag=4.0),
        "random60": random_sparse(60, 260, seed=7),
        "random120": random_sparse(120, 700, seed=11),
    }
    for nx in (10, 14):
        for bc, label in ((BoundaryKind.PERIODIC, "periodic"),
                          (BoundaryKind.DIRICHLET, "dirichlet"),
                          (BoundaryKind.MODIFIED_DIRICHLET, "modified")):
            corpus[f"{label}{nx}"] = grid_system(nx, bc).matrix
    return corpus
