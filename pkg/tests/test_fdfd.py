import math

import numpy as np
import pytest

from pmlfill import (BoundaryKind, Dielectric, Drude, GridSpec, MaterialMap,
                     PmlSpec, Vacuum, assemble_tm, boundary_node_mask,
                     build_graph, count_couplings, extract_line, factor,
                     interior_mask, point_source, read_matrix_market,
                     sigma_max, solve, spmv, stretch_factor,
                     write_matrix_market)

from conftest import grid_system


# -- PML stretch -----------------------------------------------------------------

def test_stretch_outside_and_at_interface():
    spec = PmlSpec(10, 3.0, 1e-15)
    assert stretch_factor(spec, 2 * np.pi, -1.0, 0.05) == 1.0 + 0.0j
    assert stretch_factor(spec, 2 * np.pi, 0.0, 0.05) == 1.0 + 0.0j


def test_sigma_max_frozen_value():
    # m=3, R0=1e-15, 30 cells of 0.05::  -(m+1) ln(R0) / (2 * 30 * 0.05)
    assert sigma_max(PmlSpec(30, 3.0, 1e-15), 0.05) == pytest.approx(
        46.051701859880914, rel=0, abs=1e-12)


def test_stretch_monotone_grading():
    spec = PmlSpec(20, 3.0, 1e-15)
    omega = 2 * np.pi
    depths = np.linspace(0.5, 20, 12)
    sig = [stretch_factor(spec, omega, d, 0.05).imag for d in depths]
    assert all(b > a for a, b in zip(sig, sig[1:]))
    s_outer = stretch_factor(spec, omega, 20.0, 0.05)
    assert s_outer.imag * omega == pytest.approx(sigma_max(spec, 0.05))


def test_pml_spec_validation():
    with pytest.raises(ValueError):
        PmlSpec(-1)
    with pytest.raises(ValueError):
        PmlSpec(5, m=0.5)
    with pytest.raises(ValueError):
        PmlSpec(5, r0=2.0)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(2, 10, 0.1, 0.1)
    with pytest.raises(ValueError):
        GridSpec(10, 10, -0.1, 0.1)
    with pytest.raises(ValueError):
        GridSpec.with_uniform_pml(10, 10, 0.1, 0.1, 5)  # PML >= half dimension


# -- materials -------------------------------------------------------------------

def test_drude_standard_form():
    omega_p, gamma, omega = 7.5, 0.02, np.pi
    eps = Drude(omega_p, gamma).permittivity(omega)
    expect = 1.0 - omega_p**2 / (omega**2 + 1j * gamma * omega)
    assert eps == pytest.approx(expect)
    assert eps.imag > 0  # lossy metal absorbs under the e^{-i w t} convention


def test_dielectric_validation():
    with pytest.raises(ValueError):
        Dielectric(0.5)
    assert Dielectric(16.0).permittivity(1.0) == 16.0 + 0j


def test_material_map_painting():
    mm = MaterialMap(4, 4)
    mm.paint(0, 2, 0, 4, Dielectric(4.0))
    mm.paint(1, 2, 1, 2, Dielectric(9.0))  # later paint wins
    eps = mm.permittivity(1.0)
    assert eps[3, 3] == 1.0
    assert eps[0, 0] == 4.0
    assert eps[1, 1] == 9.0
    with pytest.raises(ValueError):
        mm.paint(0, 5, 0, 1, Vacuum())


# -- assembly ---------------------------------------------------------------------

def test_periodic_assembly_nnz_500(stencil_10):
    assert stencil_10["periodic"].matrix.nnz == 500


def test_dirichlet_graph_census(stencil_10):
    g = build_graph(stencil_10["dirichlet"].matrix)
    census = np.bincount(g.degrees())
    assert census[2] == 4 and census[3] == 32 and census[4] == 64


def test_modified_boundary_fully_decoupled(stencil_10):
    sysm = stencil_10["modified"]
    g = build_graph(sysm.matrix)
    bmask = boundary_node_mask(sysm.grid, sysm.bc).ravel()
    assert np.all(g.degrees()[bmask] == 0)
    # identity rows on the decoupled plane
    d = sysm.matrix.diagonal()
    assert np.all(d[bmask] == 1.0)


def test_coupling_count_monotone():
    for nx in range(4, 13):
        per = count_couplings(grid_system(nx, BoundaryKind.PERIODIC))
        dir_ = count_couplings(grid_system(nx, BoundaryKind.DIRICHLET))
        mod = count_couplings(grid_system(nx, BoundaryKind.MODIFIED_DIRICHLET))
        assert mod < dir_ < per


def brute_force_couplings(nx, bc):
    """Directed coupling count by plain neighbor enumeration."""
    count = 0
    ring = lambda i, j: i in (0, nx - 1) or j in (0, nx - 1)
    for i in range(nx):
        for j in range(nx):
            if bc == "modified" and ring(i, j):
                continue
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ii, jj = i + di, j + dj
                if bc == "periodic":
                    count += 1
                elif 0 <= ii < nx and 0 <= jj < nx:
                    if bc == "modified" and ring(ii, jj):
                        continue
                    count += 1
    return count


def test_coupling_counts_match_enumeration_oracle():
    kinds = {"periodic": BoundaryKind.PERIODIC,
             "dirichlet": BoundaryKind.DIRICHLET,
             "modified": BoundaryKind.MODIFIED_DIRICHLET}
    for nx in (4, 5, 7):
        for label, bc in kinds.items():
            assert count_couplings(grid_system(nx, bc)) == \
                brute_force_couplings(nx, label), (nx, label)


def test_coupling_count_closed_forms():
    for nx in (10, 100):
        assert count_couplings(grid_system(nx, BoundaryKind.PERIODIC)) == 4 * nx * nx
        assert count_couplings(grid_system(nx, BoundaryKind.DIRICHLET)) == \
            4 * nx * (nx - 1)
        assert count_couplings(grid_system(nx, BoundaryKind.MODIFIED_DIRICHLET)) == \
            4 * (nx - 2) * (nx - 3)


def test_plane_wave_discrete_dispersion():
    nx, ny, dx, dy = 16, 12, 0.21, 0.17
    grid = GridSpec(nx, ny, dx, dy)
    material = MaterialMap(nx, ny)
    omega = 2 * np.pi
    system = assemble_tm(grid, material, (BoundaryKind.PERIODIC,
                                          BoundaryKind.PERIODIC), omega)
    for mx, my in ((1, 0), (2, 3), (5, 1)):
        kx = 2 * np.pi * mx / (nx * dx)
        ky = 2 * np.pi * my / (ny * dy)
        mu = (4 / dx**2 * np.sin(kx * dx / 2)**2
              + 4 / dy**2 * np.sin(ky * dy / 2)**2)
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        pw = np.exp(1j * (kx * ii * dx + ky * jj * dy)).ravel()
        resid = spmv(system.matrix, pw) - (omega**2 - mu) * pw
        assert np.abs(resid).max() < 1e-10 * system.matrix.max_abs()


def test_dirichlet_requires_pml_guard():
    grid = GridSpec(10, 10, 0.05, 0.05)
    material = MaterialMap(10, 10)
    with pytest.raises(ValueError):
        assemble_tm(grid, material, (BoundaryKind.DIRICHLET,
                                     BoundaryKind.DIRICHLET), 2 * np.pi)
    assemble_tm(grid, material, (BoundaryKind.DIRICHLET, BoundaryKind.DIRICHLET),
                2 * np.pi, allow_unshielded_dirichlet=True)


def test_assembly_validation():
    grid = GridSpec(10, 10, 0.05, 0.05)
    with pytest.raises(ValueError):
        assemble_tm(grid, MaterialMap(9, 10),
                    (BoundaryKind.PERIODIC, BoundaryKind.PERIODIC), 2 * np.pi)
    with pytest.raises(ValueError):
        assemble_tm(grid, MaterialMap(10, 10),
                    (BoundaryKind.PERIODIC, BoundaryKind.PERIODIC), -1.0)


def test_boundary_kind_parse():
    assert BoundaryKind.parse("modified-dirichlet") == BoundaryKind.MODIFIED_DIRICHLET
    assert BoundaryKind.parse("Periodic") == BoundaryKind.PERIODIC
    with pytest.raises(ValueError):
        BoundaryKind.parse("absorbing")


# -- sources and lines --------------------------------------------------------------

def test_point_source_basics():
    grid = GridSpec.with_uniform_pml(41, 41, 0.1, 0.1, 10)
    omega = 2 * np.pi
    b = point_source(grid, (20, 20), 0.0, omega)
    assert np.all(b == 0)
    b1 = point_source(grid, (20, 20), 2.0, omega)
    assert b1[grid.node_index(20, 20)] == 1j * omega * 2.0
    assert np.count_nonzero(b1) == 1
    b2 = point_source(grid, (15, 22), 1.0, omega)
    assert not np.any((b1 != 0) & (b2 != 0))  # disjoint supports
    with pytest.raises(ValueError):
        point_source(grid, (2, 20), 1.0, omega)  # inside PML
    with pytest.raises(ValueError):
        point_source(grid, (41, 0), 1.0, omega)


def test_point_source_center_of_301_grid():
    grid = GridSpec.with_uniform_pml(301, 301, 0.05, 0.05, 30)
    b = point_source(grid, (150, 150), 1.0, 2 * np.pi)
    assert np.nonzero(b)[0][0] == 150 * 301 + 150


def test_extract_line():
    grid = GridSpec(8, 6, 0.1, 0.1)
    fieldvec = np.full(48, 2.5 + 0j)
    row = extract_line(fieldvec, grid, y_index=3)
    assert row.shape == (8,)
    assert np.all(row == 2.5)
    col = extract_line(fieldvec, grid, x_index=2)
    assert col.shape == (6,)
    with pytest.raises(ValueError):
        extract_line(fieldvec, grid, y_index=3, x_index=2)
    with pytest.raises(ValueError):
        extract_line(fieldvec, grid, y_index=6)


def test_interior_mask():
    grid = GridSpec.with_uniform_pml(20, 20, 0.1, 0.1, 5)
    mask = interior_mask(grid)
    assert mask.sum() == 10 * 10
    assert mask[10, 10] and not mask[0, 0]


# -- solution physics ----------------------------------------------------------------

@pytest.fixture(scope="module")
def driven_solution():
    npml, interior = 12, 37
    n = interior + 2 * npml
    dx = 4.0 / interior
    grid = GridSpec.with_uniform_pml(n, n, dx, dx, npml)
    material = MaterialMap(n, n)
    omega = 2 * np.pi
    src = (n // 2, n // 2)
    b = point_source(grid, src, 1.0, omega)
    fields = {}
    for bc in (BoundaryKind.PERIODIC, BoundaryKind.MODIFIED_DIRICHLET):
        system = assemble_tm(grid, material, (bc, bc), omega)
        fields[bc] = solve(factor(system.matrix, "amd"), b)
    return grid, src, fields


def test_driven_bc_independence_small(driven_solution):
    grid, _, fields = driven_solution
    mask = interior_mask(grid).ravel()
    u = fields[BoundaryKind.PERIODIC][mask]
    v = fields[BoundaryKind.MODIFIED_DIRICHLET][mask]
    assert np.linalg.norm(u - v) / np.linalg.norm(u) < 1e-8


def test_driven_solution_symmetric(driven_solution):
    grid, src, fields = driven_solution
    u = fields[BoundaryKind.MODIFIED_DIRICHLET]
    line = extract_line(u, grid, y_index=src[1])
    i0 = src[0]
    k = min(i0, grid.nx - 1 - i0) - grid.pml[0].thickness
    left = line[i0 - k:i0][::-1]
    right = line[i0 + 1:i0 + 1 + k]
    assert np.linalg.norm(left - right) / np.linalg.norm(right) < 1e-10


def test_reciprocity_vacuum(driven_solution):
    grid, _, _ = driven_solution
    material = MaterialMap(grid.nx, grid.ny)
    omega = 2 * np.pi
    system = assemble_tm(grid, material, (BoundaryKind.MODIFIED_DIRICHLET,
                                          BoundaryKind.MODIFIED_DIRICHLET), omega)
    f = factor(system.matrix, "amd")
    r1, r2 = (18, 25), (38, 30)
    x1 = solve(f, point_source(grid, r1, 1.0, omega))
    x2 = solve(f, point_source(grid, r2, 1.0, omega))
    g12 = x1[grid.node_index(*r2)]
    g21 = x2[grid.node_index(*r1)]
    assert abs(g12 - g21) / abs(g12) < 1e-8


def test_assembled_system_matrix_market_round_trip(tmp_path, stencil_10):
    a = stencil_10["periodic"].matrix
    path = tmp_path / "sys.mtx"
    write_matrix_market(a, path)
    b = read_matrix_market(path)
    assert np.array_equal(a.indices, b.indices)
    assert np.array_equal(a.values, b.values)
