"""Sparse-direct FDFD toolkit: how PML-backing boundary conditions change LU fill.

The package bundles a complex CSC sparse core, fill-reducing orderings
(exact and approximate minimum degree), a left-looking sparse LU with fill
statistics, a 2D TM FDFD assembler with stretched-coordinate PML and three
grid truncations (periodic, Dirichlet, modified Dirichlet), a shift-invert
Arnoldi eigensolver for Bloch waveguide modes, and CLI experiment recipes
that measure the factorization fill under each truncation.
"""

__version__ = "0.1.0"

from .sparse import (Permutation, SparseMatrix, TripletBuffer, MatrixMarketError,
                     eye, diag, from_dense, permute, read_matrix_market, spmv,
                     triplet_to_csc, write_matrix_market)
from .ordering import (EliminationGraph, OrderingResult, amd, build_graph,
                       elimination_game, exact_min_degree, natural_ordering)
from .lu import (FillReport, LuFactors, SingularPivotError,
                 StructurallySingularError, SymbolicLu, dense_lu_oracle, factor,
                 fill_report, percent_reduction, reconstruction_error, solve,
                 symbolic_lu)
from .fdfd import (AssembledSystem, BoundaryKind, Dielectric, Drude, GridSpec,
                   MaterialMap, PmlSpec, Vacuum, assemble_tm, boundary_node_mask,
                   count_couplings, extract_line, interior_mask, point_source,
                   sigma_max, stretch_factor)
from .eigen import (ArnoldiConfig, BandPoint, EigenPair, Pencil, QepMatrices,
                    ShiftIsEigenvalueError, assemble_qep, band_scan, linearize,
                    mode_filter, quadratic_residual, shift_invert_arnoldi)
from .experiments import (ExperimentConfig, RunReport, analytic_coupling_counts,
                          run_bands, run_coupling_table, run_driven_compare,
                          run_experiment, run_fill_scan, waveguide_unit_cell)
