"""End-to-end experiment recipes with structured, reproducible reports.

Everything here works in micrometers with c = mu0 = eps0 = 1, so a vacuum
wavelength lam0 gives omega = 2*pi/lam0. Each runner takes an
ExperimentConfig, writes plot-ready CSV artifacts plus a JSON report into
the output directory, and returns the RunReport. Reports regenerated from
their own config echo are identical except for the timing section.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__ as _pkg_version
from . import eigen as _eigen
from . import fdfd as _fdfd
from . import lu as _lu
from .fdfd import (BoundaryKind, Dielectric, Drude, GridSpec, MaterialMap,
                   PmlSpec, Vacuum)
from .sparse import spmv, write_matrix_market

__all__ = [
    "ExperimentConfig",
    "RunReport",
    "SI_LIGHT_SPEED_UM_PER_S",
    "waveguide_unit_cell",
    "analytic_coupling_counts",
    "run_driven_compare",
    "run_fill_scan",
    "run_coupling_table",
    "run_bands",
    "run_experiment",
]

SI_LIGHT_SPEED_UM_PER_S = 2.99792458e14

# defaults for the hollow-core waveguide unit cell (lengths in um)
WG_PERIOD = 0.2
WG_WALL_THICKNESS = 0.3
WG_WALL_SEPARATION = 1.6
WG_METAL_WIDTH = 0.04
WG_EPS_WALL = 16.0
WG_OMEGA_P_SI = 0.72e15 * np.pi
WG_GAMMA_SI = 5.5e12
WG_CELLS = (100, 150)
WG_TOTAL_HEIGHT = 3.0
WG_PML_CELLS = 10


_FIELDS_BY_EXPERIMENT = {
    "driven-compare": {"interior", "pml", "wavelengths_across", "source_offset",
                       "amplitude", "ordering"},
    "fill-scan": {"nx_list", "pml", "wavelengths_across", "ordering"},
    "coupling-table": {"nx_list"},
    "bands": {"wavelengths", "sigma_shifts", "n_pairs", "subspace",
              "min_interior_fraction", "ordering", "arnoldi_tolerance"},
}
_COMMON_FIELDS = {"experiment", "output_dir", "seed", "workers"}


@dataclass
class ExperimentConfig:
    """Validated experiment description; unknown keys are rejected on load."""

    experiment: str
    output_dir: str = "out"
    seed: int = 20240601
    workers: int = 1
    # driven-compare / fill-scan geometry
    interior: int = 101
    pml: int = 20
    wavelengths_across: float = 4.0
    source_offset: tuple = (0, 0)
    amplitude: float = 1.0
    ordering: str = "amd"
    # fill-scan / coupling-table
    nx_list: tuple = (51, 101, 151)
    # bands
    wavelengths: tuple = (1.9, 2.0, 2.1)
    sigma_shifts: tuple = (0.0, "plasma")
    n_pairs: int = 8
    subspace: int = 60
    min_interior_fraction: float = 0.9
    arnoldi_tolerance: float = 1e-12

    def __post_init__(self):
        if self.experiment not in _FIELDS_BY_EXPERIMENT:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose one of "
                f"{sorted(_FIELDS_BY_EXPERIMENT)}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        if "experiment" not in data:
            raise ValueError("config must name an 'experiment'")
        exp = data["experiment"]
        allowed = _COMMON_FIELDS | _FIELDS_BY_EXPERIMENT.get(exp, set())
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(
                f"unknown config keys for {exp!r}: {sorted(unknown)}")
        coerced = dict(data)
        for key in ("nx_list", "wavelengths", "sigma_shifts", "source_offset"):
            if key in coerced and isinstance(coerced[key], list):
                coerced[key] = tuple(coerced[key])
        return ExperimentConfig(**coerced)

    @staticmethod
    def from_json(path) -> "ExperimentConfig":
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))

    def echo(self) -> dict:
        d = asdict(self)
        for key in ("nx_list", "wavelengths", "sigma_shifts", "source_offset"):
            d[key] = list(d[key])
        return d


@dataclass
class RunReport:
    """Everything one experiment run produced, JSON-serializable."""

    experiment: str
    config: dict
    fill_reports: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "fill_reports": [r.to_dict() for r in self.fill_reports],
            "metrics": self.metrics,
            "artifacts": self.artifacts,
            "failures": self.failures,
            "timings": self.timings,
            "versions": self.versions,
        }

    def write(self, directory) -> str:
        import os
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, "report.json")
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _versions() -> dict:
    import numba
    return {"pmlfill": _pkg_version, "numpy": np.__version__, "numba": numba.__version__}


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _field_csv_rows(fieldvec: np.ndarray, grid: GridSpec):
    f = fieldvec.reshape(grid.nx, grid.ny)
    for i in range(grid.nx):
        for j in range(grid.ny):
            v = f[i, j]
            yield f"{i},{j},{v.real:.12e},{v.imag:.12e}"


# -- driven problem ---------------------------------------------------------------

def run_driven_compare(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    """Solve the center-source driven problem under periodic and modified
    Dirichlet backings and measure the interior field difference."""
    import os
    t_start = time.perf_counter()
    out = out_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    n = cfg.interior + 2 * cfg.pml
    dx = cfg.wavelengths_across / cfg.interior
    grid = GridSpec.with_uniform_pml(n, n, dx, dx, cfg.pml)
    material = MaterialMap(n, n)
    omega = 2 * np.pi
    src = (n // 2 + cfg.source_offset[0], n // 2 + cfg.source_offset[1])
    b = _fdfd.point_source(grid, src, cfg.amplitude, omega)

    report = RunReport("driven-compare", cfg.echo(), versions=_versions())
    fields = {}
    for bc, label in ((BoundaryKind.PERIODIC, "periodic"),
                      (BoundaryKind.MODIFIED_DIRICHLET, "modified_dirichlet")):
        t0 = time.perf_counter()
        system = _fdfd.assemble_tm(grid, material, (bc, bc), omega)
        factors = _lu.factor(system.matrix, cfg.ordering, pivoting="none")
        x = _lu.solve(factors, b)
        residual = float(np.linalg.norm(spmv(system.matrix, x) - b)
                         / max(np.linalg.norm(b), 1e-300))
        fields[label] = x
        report.fill_reports.append(_lu.FillReport(
            label, n, n, factors.ordering, factors.nnz_a,
            factors.nnz_l, factors.nnz_u, factors.seconds))
        report.metrics[f"solve_residual_{label}"] = residual
        report.timings[f"solve_{label}_s"] = time.perf_counter() - t0
        fname = f"field_{label}.csv"
        _write_csv(os.path.join(out, fname), "i,j,re_hz,im_hz",
                   _field_csv_rows(x, grid))
        report.artifacts[f"field_{label}"] = fname

    mask = _fdfd.interior_mask(grid).ravel()
    u_per = fields["periodic"][mask]
    u_mod = fields["modified_dirichlet"][mask]
    denom = float(np.linalg.norm(u_per))
    rel = float(np.linalg.norm(u_per - u_mod) / denom) if denom > 0 else 0.0
    report.metrics["interior_rel_l2_diff"] = rel
    if cfg.amplitude == 0:
        report.metrics["fields_all_zero"] = bool(
            np.all(fields["periodic"] == 0) and np.all(fields["modified_dirichlet"] == 0))

    line_rows = []
    mid = src[1]
    line_p = _fdfd.extract_line(fields["periodic"], grid, y_index=mid)
    line_m = _fdfd.extract_line(fields["modified_dirichlet"], grid, y_index=mid)
    for i in range(grid.nx):
        line_rows.append(f"{i},{i*dx:.12e},{line_p[i].real:.12e},{line_p[i].imag:.12e},"
                         f"{line_m[i].real:.12e},{line_m[i].imag:.12e}")
    _write_csv(os.path.join(out, "center_line.csv"),
               "i,x,re_periodic,im_periodic,re_modified,im_modified", line_rows)
    report.artifacts["center_line"] = "center_line.csv"

    pct = _lu.percent_reduction(report.fill_reports[0], report.fill_reports[1])
    report.metrics["nnz_l_reduction_percent"] = pct
    report.timings["total_s"] = time.perf_counter() - t_start
    report.write(out)
    return report


# -- fill scan -------------------------------------------------------------------

def run_fill_scan(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    """nnz(L) of periodic vs modified Dirichlet across grid sizes."""
    import os
    t_start = time.perf_counter()
    out = out_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    report = RunReport("fill-scan", cfg.echo(), versions=_versions())

    def one(nx):
        dx = cfg.wavelengths_across / max(nx - 2 * cfg.pml, 1)
        grid = GridSpec.with_uniform_pml(nx, nx, dx, dx, cfg.pml)
        material = MaterialMap(nx, nx)
        omega = 2 * np.pi
        row = {}
        for bc, label in ((BoundaryKind.PERIODIC, "periodic"),
                          (BoundaryKind.MODIFIED_DIRICHLET, "modified_dirichlet")):
            system = _fdfd.assemble_tm(grid, material, (bc, bc), omega)
            row[label] = _lu.fill_report(system.matrix, cfg.ordering, bc=label,
                                         nx=nx, ny=nx)
        return nx, row

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(one, cfg.nx_list))
    else:
        results = [one(nx) for nx in cfg.nx_list]

    rows = []
    for nx, pair in results:
        per, mod = pair["periodic"], pair["modified_dirichlet"]
        report.fill_reports.extend([per, mod])
        pct = _lu.percent_reduction(per, mod)
        rows.append(f"{nx},{per.nnz_l},{mod.nnz_l},{pct:.4f}")
        report.metrics[f"reduction_percent_nx{nx}"] = pct
        if pct <= 0:
            report.failures.append(
                f"nx={nx}: modified Dirichlet did not reduce nnz(L) ({pct:.3f}%)")
    _write_csv(os.path.join(out, "fill_scan.csv"),
               "nx,nnz_l_periodic,nnz_l_modified,reduction_percent", rows)
    report.artifacts["fill_scan"] = "fill_scan.csv"
    report.timings["total_s"] = time.perf_counter() - t_start
    report.write(out)
    return report


# -- coupling table ---------------------------------------------------------------

def analytic_coupling_counts(nx: int) -> dict:
    """Reference coupling-count formulas for an nx-by-nx grid (see README)."""
    return {
        "periodic": 4 * nx * nx,
        "dirichlet": 4 * (nx - 2) ** 2 + 4 * (nx - 2) + 8,
        "modified_dirichlet": 4 * (nx - 2) ** 2 + (nx - 2),
    }


def run_coupling_table(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    """Count directed grid couplings per boundary condition, next to the
    analytic reference formulas and their deltas."""
    import os
    t_start = time.perf_counter()
    out = out_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    report = RunReport("coupling-table", cfg.echo(), versions=_versions())
    rows = []
    kinds = (("periodic", BoundaryKind.PERIODIC),
             ("dirichlet", BoundaryKind.DIRICHLET),
             ("modified_dirichlet", BoundaryKind.MODIFIED_DIRICHLET))
    for nx in cfg.nx_list:
        grid = GridSpec(nx, nx, 0.05, 0.05)
        material = MaterialMap(nx, nx)
        ref = analytic_coupling_counts(nx)
        for label, bc in kinds:
            system = _fdfd.assemble_tm(grid, material, (bc, bc), 2 * np.pi,
                                       allow_unshielded_dirichlet=True)
            counted = _fdfd.count_couplings(system)
            rows.append(f"{nx},{label},{counted},{ref[label]},{counted - ref[label]}")
            report.metrics[f"couplings_{label}_nx{nx}"] = counted
    _write_csv(os.path.join(out, "coupling_table.csv"),
               "nx,bc,counted,analytic,delta", rows)
    report.artifacts["coupling_table"] = "coupling_table.csv"
    report.timings["total_s"] = time.perf_counter() - t_start
    report.write(out)
    return report


# -- waveguide bands ----------------------------------------------------------------

def waveguide_unit_cell(period=WG_PERIOD, wall_thickness=WG_WALL_THICKNESS,
                        wall_separation=WG_WALL_SEPARATION,
                        metal_width=WG_METAL_WIDTH, eps_wall=WG_EPS_WALL,
                        omega_p_si=WG_OMEGA_P_SI, gamma_si=WG_GAMMA_SI,
                        cells=WG_CELLS, total_height=WG_TOTAL_HEIGHT,
                        pml_cells=WG_PML_CELLS):
    """Hollow-core waveguide unit cell: two dielectric walls with an embedded
    metal strip, vacuum core, PML backing along y. Lengths in micrometers.

    Returns (GridSpec, MaterialMap, omega_p, gamma) with the Drude
    parameters converted from SI to the package's normalized units.
    """
    nx, ny = cells
    dx = period / nx
    dy = total_height / ny
    omega_p = omega_p_si / SI_LIGHT_SPEED_UM_PER_S
    gamma = gamma_si / SI_LIGHT_SPEED_UM_PER_S

    wall_cells = int(round(wall_thickness / dy))
    core_cells = int(round(wall_separation / dy))
    metal_cells = int(round(metal_width / dx))
    used = 2 * wall_cells + core_cells + 2 * pml_cells
    if used > ny:
        raise ValueError("walls, core, and PML do not fit in the cell height")
    gap = (ny - used) // 2
    j_lo = pml_cells + gap
    j_hi = j_lo + wall_cells + core_cells
    i_metal = (nx - metal_cells) // 2

    material = MaterialMap(nx, ny)
    for j0 in (j_lo, j_hi):
        material.paint(0, nx, j0, j0 + wall_cells, Dielectric(eps_wall))
        material.paint(i_metal, i_metal + metal_cells, j0, j0 + wall_cells,
                       Drude(omega_p, gamma))
    pml = PmlSpec(pml_cells, 3.0, 1e-15)
    grid = GridSpec(nx, ny, dx, dy,
                    (PmlSpec(0), PmlSpec(0), pml, pml))
    return grid, material, omega_p, gamma


def run_bands(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    """Band structure under both y-backings plus pencil fill comparisons."""
    import os
    t_start = time.perf_counter()
    out = out_dir or cfg.output_dir
    os.makedirs(out, exist_ok=True)
    report = RunReport("bands", cfg.echo(), versions=_versions())
    grid, material, omega_p, _ = waveguide_unit_cell()

    backings = (("periodic", BoundaryKind.PERIODIC),
                ("modified_dirichlet", BoundaryKind.MODIFIED_DIRICHLET))
    omegas = [2 * np.pi / lam for lam in cfg.wavelengths]
    arnoldi = _eigen.ArnoldiConfig(
        k=cfg.n_pairs, subspace=cfg.subspace, tolerance=cfg.arnoldi_tolerance,
        seed=cfg.seed)

    guided = {}
    for label, ybc in backings:
        t0 = time.perf_counter()
        points, failures = _eigen.band_scan(
            grid, material, (BoundaryKind.PERIODIC, ybc), omegas,
            sigma=0.0, k=cfg.n_pairs,
            min_interior_fraction=cfg.min_interior_fraction, arnoldi=arnoldi)
        report.timings[f"band_scan_{label}_s"] = time.perf_counter() - t0
        for omega, err in failures:
            report.failures.append(f"{label} omega={omega:.6g}: {err}")
        fname = f"bands_{label}.csv"
        _write_csv(os.path.join(out, fname), _eigen.BandPoint.CSV_HEADER,
                   (p.csv_row() for p in points))
        report.artifacts[f"bands_{label}"] = fname
        # propagating branch: largest |Re kx| per frequency; modes come in
        # +-kx pairs, so fold onto the Re >= 0 branch before matching
        for omega in omegas:
            at = [p for p in points if abs(p.omega - omega) < 1e-12]
            if at:
                best = max(at, key=lambda p: abs(p.re_kx))
                kx = complex(best.re_kx, best.im_kx)
                if kx.real < 0:
                    kx = -kx
                guided[(label, round(omega, 12))] = kx

    diffs = []
    for omega in omegas:
        key_p = ("periodic", round(omega, 12))
        key_m = ("modified_dirichlet", round(omega, 12))
        if key_p in guided and key_m in guided:
            kp, km = guided[key_p], guided[key_m]
            rel = abs(kp - km) / max(abs(kp), 1e-300)
            diffs.append(rel)
            report.metrics[f"guided_kx_rel_diff_omega{omega:.6g}"] = rel
        else:
            report.failures.append(
                f"no guided mode matched at omega={omega:.6g}")
    if diffs:
        report.metrics["guided_kx_rel_diff_max"] = max(diffs)

    # pencil fill comparison at the requested shifts
    sigma_values = []
    for s in cfg.sigma_shifts:
        if s == "plasma":
            sigma_values.append(("plasma_wavenumber", omega_p))
        else:
            sigma_values.append((f"{float(s):g}", complex(s)))
    omega0 = 2 * np.pi / cfg.wavelengths[len(cfg.wavelengths) // 2]
    fill_rows = []
    for sig_label, sigma in sigma_values:
        nnzl = {}
        for label, ybc in backings:
            qep = _eigen.assemble_qep(grid, material,
                                      (BoundaryKind.PERIODIC, ybc), omega0)
            pencil = _eigen.linearize(qep)
            from .sparse import add_scaled
            shifted = add_scaled(pencil.b, pencil.d, -sigma)
            fr = _lu.fill_report(shifted, cfg.ordering, bc=label,
                                 nx=grid.nx, ny=grid.ny, pivoting="none")
            report.fill_reports.append(fr)
            nnzl[label] = fr.nnz_l
            fill_rows.append(f"{sig_label},{label},{fr.nnz_a},{fr.nnz_l},{fr.nnz_u}")
        pct = (nnzl["periodic"] - nnzl["modified_dirichlet"]) / nnzl["periodic"] * 100
        report.metrics[f"pencil_reduction_percent_sigma_{sig_label}"] = pct
        fill_rows.append(f"{sig_label},reduction_percent,,{pct:.4f},")
    _write_csv(os.path.join(out, "pencil_fill.csv"),
               "sigma,bc,nnz_A,nnz_L,nnz_U", fill_rows)
    report.artifacts["pencil_fill"] = "pencil_fill.csv"
    report.timings["total_s"] = time.perf_counter() - t_start
    report.write(out)
    return report


_RUNNERS = {
    "driven-compare": run_driven_compare,
    "fill-scan": run_fill_scan,
    "coupling-table": run_coupling_table,
    "bands": run_bands,
}


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    return _RUNNERS[cfg.experiment](cfg, out_dir=out_dir)
