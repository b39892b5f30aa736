"""Constraint graphs and multi-axis constraint systems.

A constraint graph is a digraph on k colours; an edge (i, j) means colour j
may sit next to colour i along one lattice axis (in the +direction).  A
constraint system bundles one graph per axis.  Colours are 1-based in all
file formats and reports, 0-based internally.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError


@dataclass(frozen=True)
class ConstraintGraph:
    """Digraph on ``k`` colours given by a boolean adjacency matrix.

    ``adj[i, j]`` is True when colour j (0-based) may follow colour i along
    the axis this graph governs.  Self-loops are allowed.
    """

    k: int
    adj: np.ndarray  # (k, k) bool, read-only

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        a = np.asarray(self.adj, dtype=bool)
        if a.shape != (self.k, self.k):
            raise ValueError(f"adjacency must be {self.k}x{self.k}, got {a.shape}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)

    @classmethod
    def from_edges(cls, k, edges):
        """Build from an iterable of 1-based (from, to) colour pairs."""
        adj = np.zeros((k, k), dtype=bool)
        for i, j in edges:
            if not (1 <= i <= k and 1 <= j <= k):
                raise ValueError(f"colour index out of range: edge ({i}, {j}) with k={k}")
            adj[i - 1, j - 1] = True
        return cls(k, adj)

    def has_edge(self, i, j):
        """Edge test with 1-based colours."""
        return bool(self.adj[i - 1, j - 1])

    def edges(self):
        """Sorted list of 1-based (from, to) pairs."""
        return [(int(i) + 1, int(j) + 1) for i, j in np.argwhere(self.adj)]

    @property
    def is_symmetric(self):
        return bool(np.array_equal(self.adj, self.adj.T))

    def transpose(self):
        return ConstraintGraph(self.k, self.adj.T.copy())

    def isolated_colours(self):
        """1-based colours with neither in- nor out-edges."""
        deg = self.adj.sum(axis=0) + self.adj.sum(axis=1)
        return [int(i) + 1 for i in np.flatnonzero(deg == 0)]

    def strongly_connected_components(self):
        """SCCs as sorted lists of 1-based colours, in discovery order."""
        return _tarjan_scc(self.adj)

    def __eq__(self, other):
        if not isinstance(other, ConstraintGraph):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.k, self.adj.tobytes()))


def _tarjan_scc(adj):
    k = adj.shape[0]
    succ = [np.flatnonzero(adj[i]).tolist() for i in range(k)]
    index = [None] * k
    low = [0] * k
    on_stack = [False] * k
    stack = []
    comps = []
    counter = [0]

    def strongconnect(v):
        # iterative Tarjan; k is small but recursion limits are cheap to avoid
        work = [(v, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            for ei in range(pi, len(succ[node])):
                w = succ[node][ei]
                if index[w] is None:
                    work[-1] = (node, ei + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[node] = min(low[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w + 1)
                    if w == node:
                        break
                comps.append(sorted(comp))

    for v in range(k):
        if index[v] is None:
            strongconnect(v)
    return comps


@dataclass(frozen=True)
class ConstraintSystem:
    """Dimension d plus one constraint graph per axis, over a common colour set.

    The ``symmetric`` and ``isotropic`` flags are always recomputed from the
    graphs, never taken from input.
    """

    axis_graphs: tuple
    name: str = "custom"
    symmetric: bool = field(init=False)
    isotropic: bool = field(init=False)

    def __post_init__(self):
        graphs = tuple(self.axis_graphs)
        if not graphs:
            raise ValueError("a system needs at least one axis graph")
        k = graphs[0].k
        for g in graphs:
            if g.k != k:
                raise ValueError(f"inconsistent colour counts across axes: {g.k} != {k}")
        object.__setattr__(self, "axis_graphs", graphs)
        object.__setattr__(self, "symmetric", all(g.is_symmetric for g in graphs))
        object.__setattr__(self, "isotropic", all(g == graphs[0] for g in graphs))

    @property
    def d(self):
        return len(self.axis_graphs)

    @property
    def k(self):
        return self.axis_graphs[0].k

    def graph(self, axis):
        """Axis graph, 1-based axis index."""
        if not 1 <= axis <= self.d:
            raise ValueError(f"axis {axis} out of range for d={self.d}")
        return self.axis_graphs[axis - 1]


@dataclass
class AxisReport:
    axis: int
    isolated: list
    sccs: list
    union_of_sccs: bool
    symmetric: bool


@dataclass
class ValidationReport:
    per_axis: list

    @property
    def ok(self):
        return all(not r.isolated and r.union_of_sccs for r in self.per_axis)


def hard_square_graph():
    """The k=2 graph forbidding adjacent 1s: edges (1,2), (2,1), (2,2)."""
    return ConstraintGraph.from_edges(2, [(1, 2), (2, 1), (2, 2)])


def hard_square_system(d=2):
    """Isotropic hard-square system in dimension d."""
    g = hard_square_graph()
    return ConstraintSystem(tuple(g for _ in range(d)), name=f"hard-square-{d}d")


def monomer_dimer_system(d, same_axis_chain=True):
    """Monomer-dimer tilings of Z^d coded in 2d+1 colours.

    Colour 2d+1 is a monomer; colours 2i-1, 2i are the two halves of a dimer
    along axis i.  With ``same_axis_chain`` (the default) a dimer may be
    followed immediately by another dimer along the same axis, which is what
    actual tilings allow; the False variant drops that edge and no longer
    counts tilings (its 1D growth rate is ~1.4656 instead of the golden
    ratio).
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    k = 2 * d + 1
    graphs = []
    for i in range(1, d + 1):
        lo, hi = 2 * i - 1, 2 * i  # 1-based first/second dimer half
        others = [c for c in range(1, k + 1) if c not in (lo, hi)]
        edges = [(a, b) for a in others for b in others]
        edges += [(j, lo) for j in others]
        edges += [(hi, j) for j in others]
        edges.append((lo, hi))
        if same_axis_chain:
            edges.append((hi, lo))
        graphs.append(ConstraintGraph.from_edges(k, edges))
    suffix = "" if same_axis_chain else "-strict"
    return ConstraintSystem(tuple(graphs), name=f"monomer-dimer-{d}d{suffix}")


def validate_system(sys):
    """Diagnostic report: isolated colours, SCC structure, symmetry, per axis."""
    reports = []
    for a, g in enumerate(sys.axis_graphs, start=1):
        isolated = g.isolated_colours()
        sccs = g.strongly_connected_components()
        # disjoint-union-of-SCCs: no edge may leave its component
        comp_of = {}
        for ci, comp in enumerate(sccs):
            for c in comp:
                comp_of[c] = ci
        union = all(comp_of[i] == comp_of[j] for i, j in g.edges())
        reports.append(AxisReport(a, isolated, sccs, union, g.is_symmetric))
    return ValidationReport(reports)


def find_friendly_colours(sys):
    """Colours bidirectionally joined to every colour in every axis graph.

    Returns a set of 1-based colours j such that (j, i) and (i, j) are edges
    of every axis graph for all colours i (including i = j).
    """
    inter = sys.axis_graphs[0].adj.copy()
    for g in sys.axis_graphs[1:]:
        inter &= g.adj
    both = inter & inter.T
    return {int(j) + 1 for j in range(sys.k) if both[j].all() and both[:, j].all()}


def save_system(sys, path):
    """Write the line-oriented text format; edges sorted, colours 1-based."""
    lines = [f"k {sys.k}", f"d {sys.d}"]
    for a, g in enumerate(sys.axis_graphs, start=1):
        lines.append(f"axis {a}")
        for i, j in sorted(g.edges()):
            lines.append(f"{i} {j}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_system(path, name=None):
    """Parse the text format written by :func:`save_system`.

    Raises :class:`FormatError` with a line number on malformed input,
    inconsistent declarations, or out-of-range colour indices.
    """
    k = None
    d = None
    axis_edges = {}
    current = None
    with open(path, "r", encoding="utf-8") as f:
        for ln, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "k":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise FormatError("expected 'k <int>'", line=ln)
                k = int(parts[1])
            elif parts[0] == "d":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise FormatError("expected 'd <int>'", line=ln)
                d = int(parts[1])
            elif parts[0] == "axis":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise FormatError("expected 'axis <int>'", line=ln)
                current = int(parts[1])
                if d is not None and not (1 <= current <= d):
                    raise FormatError(f"axis {current} out of range for d={d}", line=ln)
                axis_edges.setdefault(current, [])
            else:
                if current is None:
                    raise FormatError("edge line before any 'axis' header", line=ln)
                if len(parts) != 2:
                    raise FormatError(f"expected '<from> <to>', got {line!r}", line=ln)
                try:
                    i, j = int(parts[0]), int(parts[1])
                except ValueError:
                    raise FormatError(f"expected integer colours, got {line!r}", line=ln)
                if k is None:
                    raise FormatError("edge line before 'k' declaration", line=ln)
                if not (1 <= i <= k and 1 <= j <= k):
                    raise FormatError(f"colour index out of range: {i} {j} with k={k}", line=ln)
                axis_edges[current].append((i, j))
    if k is None:
        raise FormatError("missing 'k' declaration")
    if d is None:
        raise FormatError("missing 'd' declaration")
    missing = [a for a in range(1, d + 1) if a not in axis_edges]
    if missing:
        raise FormatError(f"missing axis sections: {missing}")
    graphs = tuple(ConstraintGraph.from_edges(k, axis_edges[a]) for a in range(1, d + 1))
    return ConstraintSystem(graphs, name=name or str(path))
