"""Weighted graph homomorphism partition functions and their classifier.

Z_A(G) sums the product of edge weights A_{s(u),s(v)} over all vertex
labelings s.  The classifier decides whether some Hadamard power of A is
block-rank-one, which over a field reduces to: the support splits into full
rectangles and every in-block cross-ratio is a root of unity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .cyclotomic import CycNum
from .modular_data import InvalidDataError, ModularData


class BudgetExceededError(RuntimeError):
    """Raised when a brute-force sum would exceed the assignment budget."""


DEFAULT_BUDGET_LOG2 = 24


def _check_budget(space_size: int, budget_log2: int, what: str) -> None:
    if space_size > 1 << budget_log2:
        raise BudgetExceededError(
            f"{what} needs {space_size} assignments, over the 2^{budget_log2} budget"
        )


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..vertex_count-1."""

    vertex_count: int
    edges: frozenset[tuple[int, int]]

    @staticmethod
    def from_edges(vertex_count: int, edges) -> "Graph":
        normalized = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u} not allowed")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"edge ({u},{v}) out of range")
            normalized.add((min(u, v), max(u, v)))
        return Graph(vertex_count, frozenset(normalized))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.vertex_count)), default=0)

    def neighbors(self, v: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def components(self) -> list[list[int]]:
        seen = [False] * self.vertex_count
        comps = []
        for start in range(self.vertex_count):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors(v):
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.vertex_count > 0 and len(self.components()) == 1

    def relabel(self, perm: list[int]) -> "Graph":
        return Graph.from_edges(
            self.vertex_count, [(perm[u], perm[v]) for u, v in self.edges]
        )


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


@dataclass(frozen=True)
class WeightMatrix:
    size: int
    entries: tuple[tuple[CycNum, ...], ...]
    symmetric: bool = True

    def __post_init__(self):
        if len(self.entries) != self.size or any(len(r) != self.size for r in self.entries):
            raise ValueError("weight matrix is not square of the declared size")
        if self.symmetric:
            for i in range(self.size):
                for j in range(i):
                    if self.entries[i][j] != self.entries[j][i]:
                        raise ValueError(f"matrix not symmetric at ({i},{j})")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def order(self) -> int:
        n = 1
        for row in self.entries:
            for x in row:
                n = n * x.order // gcd(n, x.order)
        return n

    def kronecker(self, other: "WeightMatrix") -> "WeightMatrix":
        n = self.order() * other.order() // gcd(self.order(), other.order())
        k1, k2 = self.size, other.size
        rows = []
        for i in range(k1):
            for j in range(k2):
                rows.append(
                    tuple(
                        self.entries[i][p].embed(n) * other.entries[j][q].embed(n)
                        for p in range(k1)
                        for q in range(k2)
                    )
                )
        return WeightMatrix(k1 * k2, tuple(rows), self.symmetric and other.symmetric)


def edge_weight_matrix(md: ModularData) -> WeightMatrix:
    """A(i,j) = S_{i,j*} / (d_i d_j); unit row and column are all ones."""
    n = md.conductor
    dims = md.dims()
    if any(d.is_zero() for d in dims):
        raise InvalidDataError("zero quantum dimension")
    inv = [d.inverse() for d in dims]
    entries = tuple(
        tuple(md.S[i][md.dual[j]] * inv[i] * inv[j] for j in md.labels) for i in md.labels
    )
    return WeightMatrix(md.size, entries)


# ----------------------------------------------------------------------
# partition function


def partition_function(
    A: WeightMatrix, G: Graph, budget_log2: int = DEFAULT_BUDGET_LOG2
) -> CycNum:
    """Exact brute force over |I|^|V| labelings, component by component.

    Labelings are enumerated in mixed-radix order with the last vertex
    varying fastest, so results are reproducible bit for bit.
    """
    k = A.size
    n = A.order()
    result = CycNum.one(n)
    for comp in G.components():
        _check_budget(k ** len(comp), budget_log2, f"component of {len(comp)} vertices")
        result = result * _component_sum(A, G, comp, n)
    return result


def _component_sum(A: WeightMatrix, G: Graph, comp: list[int], n: int) -> CycNum:
    k = A.size
    position = {v: idx for idx, v in enumerate(comp)}
    # For each vertex, the neighbors that appear earlier in the fixed order.
    back_edges = [
        [position[w] for w in G.neighbors(v) if position.get(w, len(comp)) < position[v]]
        for v in comp
    ]
    entries = [[A.entries[i][j].embed(n) for j in range(k)] for i in range(k)]
    total = CycNum.zero(n)
    assignment = [0] * len(comp)

    def descend(depth: int, partial: CycNum) -> None:
        nonlocal total
        if depth == len(comp):
            total = total + partial
            return
        for label in range(k):
            assignment[depth] = label
            value = partial
            for earlier in back_edges[depth]:
                value = value * entries[label][assignment[earlier]]
                if value.is_zero():
                    break
            # a zero partial product contributes zero to every completion
            if not value.is_zero():
                descend(depth + 1, value)

    descend(0, CycNum.one(n))
    return total


# ----------------------------------------------------------------------
# rectangular support and multiplicative block-rank-one


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (rows, cols) pairs


def rectangular_blocks(A: WeightMatrix) -> BlockStructure | None:
    """Partition of the support into full rectangles R_p x C_p, or None.

    Computed as connected components of the bipartite support graph,
    then verified to be full.  The zero matrix yields the empty structure.
    """
    k = A.size
    support = [[not A.entries[i][j].is_zero() for j in range(k)] for i in range(k)]
    row_block = [-1] * k
    col_block = [-1] * k
    blocks: list[tuple[list[int], list[int]]] = []
    for start in range(k):
        if row_block[start] != -1 or not any(support[start]):
            continue
        rows, cols = [], []
        stack = [("r", start)]
        row_block[start] = len(blocks)
        while stack:
            side, x = stack.pop()
            if side == "r":
                rows.append(x)
                for j in range(k):
                    if support[x][j] and col_block[j] == -1:
                        col_block[j] = len(blocks)
                        stack.append(("c", j))
            else:
                cols.append(x)
                for i in range(k):
                    if support[i][x] and row_block[i] == -1:
                        row_block[i] = len(blocks)
                        stack.append(("r", i))
        blocks.append((sorted(rows), sorted(cols)))
    for rows, cols in blocks:
        for i in rows:
            for j in cols:
                if not support[i][j]:
                    return None
    return BlockStructure(tuple((tuple(r), tuple(c)) for r, c in blocks))


def _rectangularity_witness(A: WeightMatrix) -> tuple[int, int, int, int]:
    """Corners (i, j, i2, j2) with three support entries and one zero."""
    k = A.size
    support = [[not A.entries[i][j].is_zero() for j in range(k)] for i in range(k)]
    for i in range(k):
        for j in range(k):
            if not support[i][j]:
                continue
            for i2 in range(k):
                for j2 in range(k):
                    if support[i][j2] and support[i2][j] and not support[i2][j2]:
                        return (i, j, i2, j2)
    raise AssertionError("no witness found; support was rectangular after all")


@dataclass(frozen=True)
class Mbr1Result:
    mbr1: bool
    witness_r: int | None = None
    violation: tuple[int, int, int, int] | None = None


def is_mbr1(A: WeightMatrix) -> Mbr1Result:
    """Decide whether some Hadamard power of A is block-rank-one.

    Over a field the support of A^(Hadamard r) equals the support of A, so
    the support must already split into full rectangles.  Inside a block,
    rank one after the r-th Hadamard power is the vanishing of all 2x2
    minors of the power, i.e. (A_ij A_i'j' / (A_ij' A_i'j))^r = 1.  Hence
    the condition holds for some r iff every in-block cross-ratio is a root
    of unity, and the minimal exponent is the lcm of their orders.  Cross-
    ratios anchored at one corner generate the rest, so only those are
    enumerated.
    """
    structure = rectangular_blocks(A)
    if structure is None:
        return Mbr1Result(False, None, _rectangularity_witness(A))
    r = 1
    for rows, cols in structure.blocks:
        if len(rows) < 2 or len(cols) < 2:
            continue
        i0, j0 = rows[0], cols[0]
        anchor = A.entries[i0][j0]
        for i in rows[1:]:
            for j in cols[1:]:
                ratio = (anchor * A.entries[i][j]) / (A.entries[i0][j] * A.entries[i][j0])
                order = ratio.root_of_unity_order()
                if order is None:
                    return Mbr1Result(False, None, (i0, j0, i, j))
                r = r * order // gcd(r, order)
    return Mbr1Result(True, r, None)
