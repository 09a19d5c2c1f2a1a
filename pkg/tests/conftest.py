import numpy as np
import pytest

from entgame.states import random_unitary


def dense_kron(ops):
    """Dense operator for ops[0] on player 1 (lowest bit) ... ops[-1] on player N."""
    mat = np.array([[1.0 + 0j]])
    for op in ops:
        mat = np.kron(op, mat)
    return mat


def brute_gram(psi, assignment):
    """Naive 4^N path: build every output vector with dense Kronecker products."""
    n = assignment.n_players
    outs = []
    for k in range(2**n):
        ops = [v if (k >> i) & 1 else u for i, (u, v) in enumerate(assignment.pairs)]
        outs.append(dense_kron(ops) @ psi)
    outs = np.array(outs)
    return outs.conj() @ outs.T


def random_assignment(rng, n):
    from entgame.ortho import OperatorAssignment

    return OperatorAssignment(tuple((random_unitary(rng), random_unitary(rng)) for _ in range(n)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- exhaustive small-graph oracle ---------------------------------------------

PAIRS8 = [(i, j) for i in range(8) for j in range(i + 1, 8)]
_PAIR_BIT = {p: b for b, p in enumerate(PAIRS8)}


def edge_mask(edges):
    mask = 0
    for i, j in edges:
        mask |= 1 << _PAIR_BIT[(min(i, j), max(i, j))]
    return mask


def mask_edges(mask):
    return [p for b, p in enumerate(PAIRS8) if (mask >> b) & 1]


def graphs_up_to_8():
    """``(n, edge_mask)`` covering every isomorphism class on at most 8 vertices.

    The networkx atlas lists all graphs up to 7 vertices; each 8-vertex class
    arises from some 7-vertex atlas graph plus one vertex with some neighbourhood.
    """
    import networkx as nx

    out = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if n == 0:
            continue
        mask = edge_mask(g.edges())
        out.append((n, mask))
        if n == 7:
            for nbrs in range(128):
                out.append((8, mask | edge_mask([(v, 7) for v in range(7) if (nbrs >> v) & 1])))
    return out


def bipartite_by_enumeration(masks):
    """Try all 2-colourings (vertex 7 fixed to colour 0 by symmetry) against edge bitmasks."""
    masks = np.asarray(masks, dtype=np.int64)
    colourings = np.arange(128)
    bad = np.zeros(128, dtype=np.int64)
    for b, (i, j) in enumerate(PAIRS8):
        same = ((colourings >> i) & 1) == ((colourings >> j) & 1)
        bad |= same.astype(np.int64) << b
    out = np.empty(len(masks), dtype=bool)
    for lo in range(0, len(masks), 8192):
        chunk = masks[lo:lo + 8192]
        out[lo:lo + 8192] = ((chunk[:, None] & bad[None, :]) == 0).any(axis=1)
    return out


def is_odd_cycle_in(system, cycle):
    """True when ``cycle`` is a simple odd cycle made of constraint edges."""
    if not cycle or len(cycle) % 2 == 0 or len(set(cycle)) != len(cycle):
        return False
    return all((min(a, b), max(a, b)) in system.edges for a, b in zip(cycle, cycle[1:] + cycle[:1]))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
