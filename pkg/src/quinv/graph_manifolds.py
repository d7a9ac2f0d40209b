"""The torus-block graph-manifold family at linking-matrix level.

Each graph vertex contributes a three-component zero-framed block (a vertex
circle and two genus circles with pairwise linking zero), each edge links
the two vertex circles once.  Three evaluators are provided: the closed
graph-partition formula, the half-edge state sum it eliminates to, and the
center-product evaluator for data with anomaly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .cyclotomic import CycNum
from .modular_data import (
    InvalidDataError,
    ModularData,
    center_of_modular,
    gauss_sums,
    is_pointed,
)
from .graph_partition import (
    DEFAULT_BUDGET_LOG2,
    Graph,
    _check_budget,
    edge_weight_matrix,
    partition_function,
)


class PreconditionError(ValueError):
    """An evaluator was called outside its stated hypotheses."""


@dataclass(frozen=True)
class SurgeryPresentation:
    """Symmetric integer linking matrix with framings on the diagonal.

    ``roles`` tags each component, e.g. ("K", v) for the vertex circle of
    graph vertex v and ("a", v), ("b", v) for its genus circles.
    """

    matrix: tuple[tuple[int, ...], ...]
    roles: tuple[tuple[str, int], ...] = ()
    source: Graph | None = None

    def __post_init__(self):
        m = len(self.matrix)
        if any(len(row) != m for row in self.matrix):
            raise ValueError("linking matrix must be square")
        for i in range(m):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError(f"linking matrix not symmetric at ({i},{j})")

    @property
    def size(self) -> int:
        return len(self.matrix)


def from_matrix(rows: list[list[int]]) -> SurgeryPresentation:
    return SurgeryPresentation(tuple(tuple(r) for r in rows))


def plumbing_presentation(G: Graph) -> SurgeryPresentation:
    """Linking matrix of the local Kirby presentation of the graph manifold.

    Per vertex, three zero-framed components with pairwise linking zero;
    per edge, linking one between the two vertex circles.  Each independent
    cycle of the graph needs one more zero-framed component with linking
    zero: the corresponding one-handle of the nonsimply connected plumbing
    carries a free first-homology generator (its strands pass through with
    cancelling signs), and without it the presentation computes the wrong
    manifold on graphs with cycles.
    """
    if G.vertex_count == 0 or not G.is_connected() or G.edge_count == 0:
        raise PreconditionError("the family needs a connected graph with at least one edge")
    cycles = G.edge_count - G.vertex_count + 1
    m = 3 * G.vertex_count + cycles
    B = [[0] * m for _ in range(m)]
    for u, v in G.edges:
        B[3 * u][3 * v] = 1
        B[3 * v][3 * u] = 1
    roles = []
    for v in range(G.vertex_count):
        roles += [("K", v), ("a", v), ("b", v)]
    roles += [("c", i) for i in range(cycles)]
    return SurgeryPresentation(tuple(tuple(r) for r in B), tuple(roles), G)


def reverse_presentation(sp: SurgeryPresentation) -> SurgeryPresentation:
    """Negate the linking matrix: the orientation-reversed manifold."""
    return SurgeryPresentation(
        tuple(tuple(-x for x in row) for row in sp.matrix), sp.roles, sp.source
    )


def signature_data(sp: SurgeryPresentation | list[list[int]]) -> tuple[int, int, int]:
    """(b+, b-, b0): exact inertia by rational congruent diagonalization."""
    B = sp.matrix if isinstance(sp, SurgeryPresentation) else sp
    m = len(B)
    A = [[Fraction(B[i][j]) for j in range(m)] for i in range(m)]
    b_plus = b_minus = b_zero = 0
    live = list(range(m))
    while live:
        pivot = next((i for i in live if A[i][i] != 0), None)
        if pivot is not None:
            d = A[pivot][pivot]
            if d > 0:
                b_plus += 1
            else:
                b_minus += 1
            live.remove(pivot)
            for i in live:
                if A[i][pivot] != 0:
                    f = A[i][pivot] / d
                    for j in live:
                        A[i][j] -= f * A[pivot][j]
            for j in live:
                A[pivot][j] = Fraction(0)
                A[j][pivot] = Fraction(0)
            continue
        pair = next(
            ((i, j) for i in live for j in live if i < j and A[i][j] != 0), None
        )
        if pair is None:
            b_zero += len(live)
            break
        # a hyperbolic pair contributes one eigenvalue of each sign; split it
        # off by the Schur complement of the invertible 2x2 block
        i, j = pair
        b_plus += 1
        b_minus += 1
        live.remove(i)
        live.remove(j)
        a, b, c = A[i][i], A[i][j], A[j][j]
        det = a * c - b * b
        for r in live:
            for s in live:
                # inverse of [[a, b], [b, c]] is [[c, -b], [-b, a]] / det
                vi, vj = A[r][i], A[r][j]
                wi, wj = A[i][s], A[j][s]
                A[r][s] -= (vi * (c * wi - b * wj) + vj * (-b * wi + a * wj)) / det
    return b_plus, b_minus, b_zero


def first_homology(sp: SurgeryPresentation | list[list[int]]) -> tuple[int, list[int]]:
    """(free rank, nontrivial torsion orders) of the cokernel of the matrix."""
    from .abelian_gauss import invariant_factors

    B = sp.matrix if isinstance(sp, SurgeryPresentation) else sp
    if len(B) == 0:
        return 0, []
    factors = invariant_factors([list(row) for row in B])
    free = sum(1 for d in factors if d == 0)
    torsion = sorted(d for d in factors if d > 1)
    return free, torsion


# ----------------------------------------------------------------------
# evaluators


def vertex_coefficient(md: ModularData, colors) -> CycNum:
    """sum_i d_i^(-r) prod_j S_{i, a_j}: the boundary-state coefficient of a
    genus-one block with r boundary tori; symmetric, and a nonnegative
    integer for valid data."""
    colors = tuple(colors)
    if len(colors) == 0:
        raise PreconditionError("at least one boundary color is required")
    n = md.conductor
    total = CycNum.zero(n)
    for i in md.labels:
        term = md.d(i).inverse() ** len(colors)
        for a in colors:
            term = term * md.S[i][a]
        total = total + term
    return total


def _require_anomaly_free(md: ModularData, evaluator: str) -> CycNum:
    dplus, dminus, _, anomaly_free = gauss_sums(md)
    if not anomaly_free:
        raise PreconditionError(f"{evaluator}: not anomaly-free: Delta_+ != Delta_-")
    if md.D != dplus:
        raise PreconditionError(f"{evaluator}: requires the square root choice D = Delta_+")
    return dplus


def _require_graph(G: Graph, evaluator: str) -> None:
    if G.vertex_count == 0 or G.edge_count == 0 or not G.is_connected():
        raise PreconditionError(f"{evaluator}: needs a connected graph with at least one edge")


def rt_graph_manifold(md: ModularData, G: Graph, budget_log2: int = DEFAULT_BUDGET_LOG2) -> CycNum:
    """D^|E| times the partition function of the edge-weight matrix."""
    _require_anomaly_free(md, "rt_graph_manifold")
    _require_graph(G, "rt_graph_manifold")
    A = edge_weight_matrix(md)
    z = partition_function(A, G, budget_log2=budget_log2)
    n = z.order * md.conductor // gcd(z.order, md.conductor)
    return md.D.embed(n) ** G.edge_count * z.embed(n)


def rt_half_edge_sum(md: ModularData, G: Graph, budget_log2: int = DEFAULT_BUDGET_LOG2) -> CycNum:
    """Brute-force state sum over one label per half-edge.

    Each vertex contributes its boundary-state coefficient, each edge an
    S-entry between the labels of its two half-edges; the total carries
    D^(-|E|).  Equals rt_graph_manifold on the shared domain.
    """
    dplus = _require_anomaly_free(md, "rt_half_edge_sum")
    _require_graph(G, "rt_half_edge_sum")
    k = md.size
    n = md.conductor
    edges = sorted(G.edges)
    half_edges = []  # (vertex, edge index)
    for idx, (u, v) in enumerate(edges):
        half_edges.append((u, idx))
        half_edges.append((v, idx))
    _check_budget(k ** len(half_edges), budget_log2, f"half-edge sum over {k}^{len(half_edges)} labelings")

    # order half-edges by vertex so each vertex block closes in one stretch
    half_edges.sort()
    positions_of_vertex: dict[int, list[int]] = {}
    for pos, (v, _) in enumerate(half_edges):
        positions_of_vertex.setdefault(v, []).append(pos)
    block_end = {}  # position -> vertex whose block ends after this position
    for v, positions in positions_of_vertex.items():
        block_end[positions[-1]] = v

    # positions of the two half-edges of each edge; the later one closes it
    edge_positions: dict[int, list[int]] = {}
    for pos, (_, e) in enumerate(half_edges):
        edge_positions.setdefault(e, []).append(pos)
    edge_close = {}  # position -> position of the partner half-edge
    for e, (p1, p2) in edge_positions.items():
        edge_close[p2] = p1

    degree = {v: len(ps) for v, ps in positions_of_vertex.items()}
    coeff_tables = {
        r: _vertex_table(md, r) for r in sorted(set(degree.values()))
    }

    total = CycNum.zero(n)
    labels = list(range(k))
    assignment = [0] * len(half_edges)

    def descend(pos: int, value: CycNum):
        nonlocal total
        if pos == len(half_edges):
            total = total + value
            return
        for lab in labels:
            assignment[pos] = lab
            term = value
            if pos in edge_close:
                term = term * md.S[assignment[edge_close[pos]]][lab]
            if pos in block_end and not term.is_zero():
                v = block_end[pos]
                key = tuple(assignment[p] for p in positions_of_vertex[v])
                term = term * coeff_tables[degree[v]][key]
            if not term.is_zero():
                descend(pos + 1, term)

    descend(0, CycNum.one(n))
    return dplus.inverse() ** len(edges) * total


def _vertex_table(md: ModularData, r: int) -> dict[tuple[int, ...], CycNum]:
    k = md.size
    n = md.conductor
    inv_pows = [md.d(i).inverse() ** r for i in md.labels]
    table: dict[tuple[int, ...], CycNum] = {}
    for colors in itertools.product(range(k), repeat=r):
        key = tuple(sorted(colors))
        if key in table:
            table[colors] = table[key]
            continue
        total = CycNum.zero(n)
        for i in md.labels:
            term = inv_pows[i]
            for a in colors:
                term = term * md.S[i][a]
            total = total + term
        table[key] = total
        table[colors] = total
    return table


def rt_center_product(md: ModularData, G: Graph, budget_log2: int = DEFAULT_BUDGET_LOG2) -> CycNum:
    """Invariant of the double of the data, via the graph formula.

    For pointed input the value is cross-checked against the product of the
    surgery invariants of the presentation and its reverse; a mismatch is a
    convention bug and raises.
    """
    _require_graph(G, "rt_center_product")
    center = center_of_modular(md)
    value = rt_graph_manifold(center, G, budget_log2=budget_log2)
    pointed, _ = is_pointed(md)
    if pointed:
        from .abelian_gauss import metric_from_pointed, rt_pointed_surgery

        mg, _coords = metric_from_pointed(md)
        sp = plumbing_presentation(G)
        forward = rt_pointed_surgery(mg, md.D, sp)
        backward = rt_pointed_surgery(mg, md.D, reverse_presentation(sp))
        product = forward * backward
        if product != value:
            raise RuntimeError(
                "internal inconsistency: center product disagrees with the "
                f"surgery product ({value} vs {product})"
            )
    return value
