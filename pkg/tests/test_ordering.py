import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmlfill import (BoundaryKind, Permutation, amd, build_graph,
                     elimination_game, exact_min_degree, eye, from_dense,
                     natural_ordering)
from pmlfill.ordering import EliminationGraph

from conftest import arrow_matrix, grid_system, random_sparse


def graph_from_edges(n, edges):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    indptr = np.zeros(n + 1, dtype=np.int64)
    flat = []
    for v in range(n):
        nbrs = sorted(set(adj[v]))
        indptr[v + 1] = indptr[v] + len(nbrs)
        flat.extend(nbrs)
    return EliminationGraph(n, indptr, np.array(flat, dtype=np.int64))


def brute_force_game(n, edges, order):
    """Set-based elimination simulation, the oracle for the fast kernel."""
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    fill = 0
    alive = [True] * n
    for v in order:
        nbrs = [u for u in adj[v] if alive[u]]
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                x, y = nbrs[i], nbrs[j]
                if y not in adj[x]:
                    adj[x].add(y)
                    adj[y].add(x)
                    fill += 1
        alive[v] = False
        for u in nbrs:
            adj[u].discard(v)
    return fill


# -- build_graph -----------------------------------------------------------------

def test_periodic_grid_all_degree_4(stencil_10):
    g = build_graph(stencil_10["periodic"].matrix)
    assert np.all(g.degrees() == 4)


def test_dirichlet_grid_degree_census(stencil_10):
    g = build_graph(stencil_10["dirichlet"].matrix)
    census = np.bincount(g.degrees())
    assert census[2] == 4 and census[3] == 32 and census[4] == 64


def test_diagonal_matrix_empty_graph():
    g = build_graph(eye(6))
    assert g.indptr[-1] == 0


def test_build_graph_rejects_nonsquare():
    from pmlfill import TripletBuffer
    buf = TripletBuffer(2, 3)
    buf.add(0, 0, 1.0)
    with pytest.raises(ValueError):
        build_graph(buf.to_csc())


def test_build_graph_symmetrizes():
    a = from_dense(np.array([[1, 2], [0, 1]], dtype=complex))
    g = build_graph(a)
    assert g.degree(0) == 1 and g.degree(1) == 1


# -- elimination game --------------------------------------------------------------

def test_arrow_natural_order_fill():
    for n in (5, 9, 16):
        g = build_graph(arrow_matrix(n))
        fill = elimination_game(g, Permutation.identity(n))
        assert fill == (n - 1) * (n - 2) // 2  # hub first: clique on the rest


def test_arrow_hub_last_zero_fill():
    for n in (5, 12):
        g = build_graph(arrow_matrix(n))
        rev = Permutation.from_forward(np.arange(n - 1, -1, -1))
        assert elimination_game(g, rev) == 0


def test_path_graph_leaf_first_zero_fill():
    n = 9
    g = graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])
    assert elimination_game(g, Permutation.identity(n)) == 0


def test_game_matches_brute_force_on_random_graphs():
    rng = np.random.default_rng(42)
    for trial in range(12):
        n = int(rng.integers(4, 28))
        m = int(rng.integers(n - 1, min(3 * n, n * (n - 1) // 2)))
        edges = set()
        while len(edges) < m:
            a, b = rng.integers(n, size=2)
            if a != b:
                edges.add((min(a, b), max(a, b)))
        g = graph_from_edges(n, edges)
        order = Permutation.from_forward(rng.permutation(n))
        assert elimination_game(g, order) == brute_force_game(n, edges, order.inverse)


def test_game_relabel_invariance():
    rng = np.random.default_rng(3)
    n = 15
    edges = {(int(a), int(b)) for a, b in
             (sorted(rng.integers(n, size=2)) for _ in range(40)) if a != b}
    g = graph_from_edges(n, edges)
    order = rng.permutation(n)
    base = elimination_game(g, Permutation.from_elimination_order(order))
    relabel = rng.permutation(n)
    redges = {(relabel[a], relabel[b]) for a, b in edges}
    g2 = graph_from_edges(n, redges)
    order2 = relabel[order]
    assert elimination_game(g2, Permutation.from_elimination_order(order2)) == base


def test_game_rejects_wrong_length():
    g = graph_from_edges(4, [(0, 1)])
    with pytest.raises(ValueError):
        elimination_game(g, Permutation.identity(5))


# -- exact minimum degree ------------------------------------------------------------

def test_star_graph_hub_eliminated_after_leaves():
    # minimum degree picks leaves; with lowest-index ties the hub (index 0)
    # enters the order once its degree drops to that of the final leaf, so it
    # lands in the last two positions and never causes fill
    n = 8
    g = build_graph(arrow_matrix(n))
    r = exact_min_degree(g)
    assert r.predicted_fill == 0
    assert r.permutation.forward[0] >= n - 2


def test_min_degree_starts_on_boundary(stencil_10):
    g = build_graph(stencil_10["dirichlet"].matrix)
    r = exact_min_degree(g)
    order = r.permutation.inverse
    ring = {i * 10 + j for i in range(10) for j in range(10)
            if i in (0, 9) or j in (0, 9)}
    corners = {0, 9, 90, 99}
    assert int(order[0]) in corners
    first_interior = min(k for k, v in enumerate(order) if int(v) not in ring)
    assert first_interior >= 20  # a run of boundary nodes leads the order
    assert all(int(v) in ring for v in order[:first_interior])


def test_exact_md_fill_equals_game_on_corpus(lu_corpus):
    for name, a in lu_corpus.items():
        g = build_graph(a)
        r = exact_min_degree(g)
        assert r.predicted_fill == elimination_game(g, r.permutation), name


def test_exact_md_zero_fill_on_trees():
    rng = np.random.default_rng(8)
    for trial in range(8):
        n = int(rng.integers(3, 40))
        edges = [(int(rng.integers(v)), v) for v in range(1, n)]
        g = graph_from_edges(n, edges)
        assert exact_min_degree(g).predicted_fill == 0


# -- approximate minimum degree -------------------------------------------------------

def test_amd_empty_graph_natural_order():
    g = graph_from_edges(5, [])
    r = amd(g)
    assert r.predicted_fill == 0
    assert np.array_equal(r.permutation.forward, np.arange(5))


def test_amd_valid_permutation_and_fill_consistency(lu_corpus):
    for name, a in lu_corpus.items():
        g = build_graph(a)
        r = amd(g)
        # Permutation constructor validates bijectivity; cross-check the fill
        assert r.predicted_fill == elimination_game(g, r.permutation), name


def test_amd_deterministic(stencil_10):
    g = build_graph(stencil_10["periodic"].matrix)
    r1 = amd(g)
    r2 = amd(g)
    assert np.array_equal(r1.permutation.forward, r2.permutation.forward)
    assert r1.predicted_fill == r2.predicted_fill


def test_amd_zero_fill_on_paths():
    g = graph_from_edges(12, [(i, i + 1) for i in range(11)])
    assert amd(g).predicted_fill == 0


def test_amd_vs_natural_fill_recorded(lu_corpus):
    # soft expectation: AMD should rarely lose to natural order; record only
    worse = []
    for name, a in lu_corpus.items():
        g = build_graph(a)
        nat = elimination_game(g, Permutation.identity(g.n))
        approx = amd(g).predicted_fill
        if approx > nat:
            worse.append((name, approx, nat))
    print(f"\namd-vs-natural (worse cases, recorded not asserted): {worse}")


def test_amd_supervariable_merging_on_dense_block():
    # a clique hanging off a path exercises supervariable detection
    n = 12
    edges = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    edges += [(5, 6), (6, 7), (7, 8), (8, 9), (9, 10), (10, 11)]
    g = graph_from_edges(n, edges)
    r = amd(g)
    assert r.predicted_fill == elimination_game(g, r.permutation)


def test_natural_ordering_helper():
    r = natural_ordering(7)
    assert np.array_equal(r.permutation.forward, np.arange(7))
    assert r.predicted_fill == 0


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 10**6))
def test_amd_fill_equals_game_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 40))
    m = int(rng.integers(0, 3 * n))
    edges = {(min(int(a), int(b)), max(int(a), int(b)))
             for a, b in (rng.integers(n, size=2) for _ in range(m)) if a != b}
    g = graph_from_edges(n, edges)
    r = amd(g)
    assert r.predicted_fill == elimination_game(g, r.permutation)
