"""Exact brute-force counts on small boxes, tori, and slanted tori.

Everything here is ground truth: plain backtracking with incremental
constraint checks and arbitrary-size integer results.  The transfer and
1-vertex operators are validated against these counts through the
walk-counting identities; nothing here is meant to scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityLimitError
from .graphs import monomer_dimer_system

DEFAULT_WORK_LIMIT = 2**30


@dataclass(frozen=True)
class ExactCount:
    value: int
    descriptor: str


def _count_backtrack(k, ncells, checks, work_limit, allowed=None):
    """Count words passing all (a, b, adj) pairwise checks by backtracking.

    Cells are filled in index order; each check fires as soon as both of
    its cells are assigned.  ``allowed`` optionally restricts the colour
    set per cell.  The work limit counts visited partial assignments.
    """
    by_trigger = [[] for _ in range(ncells)]
    for a, b, adj in checks:
        t = max(a, b)
        other = min(a, b)
        if a == b:
            by_trigger[t].append((t, adj, "loop"))
        elif a == t:
            by_trigger[t].append((other, adj, "out"))   # adj[c, w[other]]
        else:
            by_trigger[t].append((other, adj, "in"))    # adj[w[other], c]
    if allowed is None:
        allowed = [list(range(k))] * ncells

    word = [0] * ncells
    nodes = 0
    total = 0
    stack = [(0, iter(allowed[0]))]
    while stack:
        t, it = stack[-1]
        advanced = False
        for c in it:
            nodes += 1
            if nodes > work_limit:
                raise CapacityLimitError(
                    f"backtracking work limit exceeded ({nodes} nodes)",
                    estimate=nodes, limit=work_limit)
            ok = True
            for other, adj, orient in by_trigger[t]:
                if orient == "loop":
                    ok = adj[c, c]
                elif orient == "out":
                    ok = adj[c, word[other]]
                else:
                    ok = adj[word[other], c]
                if not ok:
                    break
            if ok:
                word[t] = c
                if t + 1 == ncells:
                    total += 1
                else:
                    stack.append((t + 1, iter(allowed[t + 1])))
                    advanced = True
                    break
        if not advanced:
            stack.pop()
    return total


def _box_checks(sys, dims, bc):
    """Pairwise checks for an allowable colouring of a d-dimensional box."""
    d = len(dims)
    if sys.d < d:
        raise ValueError(f"system has {sys.d} axes, box has {d}")
    strides = [1] * d
    for i in range(1, d):
        strides[i] = strides[i - 1] * dims[i - 1]
    checks = []
    for axis in range(d):
        adj = sys.axis_graphs[axis].adj
        n = dims[axis]
        for cell in range(int(np.prod(dims))):
            coord = (cell // strides[axis]) % n
            if coord + 1 < n:
                checks.append((cell, cell + strides[axis], adj))
            elif bc[axis] == "periodic" and n >= 2:
                checks.append((cell, cell - (n - 1) * strides[axis], adj))
            elif bc[axis] == "periodic" and n == 1:
                checks.append((cell, cell, adj))
    return checks


def brute_count_box(sys, dims, bc=None, work_limit=DEFAULT_WORK_LIMIT):
    """Exact number of allowable colourings of a box/cylinder/torus."""
    dims = list(dims)
    if any(n < 1 for n in dims):
        raise ValueError("dimensions must be positive")
    if bc is None:
        bc = ["open"] * len(dims)
    bc = list(bc)
    if len(bc) != len(dims):
        raise ValueError("one boundary kind per axis required")
    checks = _box_checks(sys, dims, bc)
    total = _count_backtrack(sys.k, int(np.prod(dims)), checks, work_limit)
    return ExactCount(total, f"box {dims} bc={bc} system={sys.name}")


def brute_count_slanted_2d(sys, n, q, work_limit=DEFAULT_WORK_LIMIT):
    """Chains of length n*q along axis 1 with the distance-n axis-2 condition.

    This is exactly what walks of the 2D 1-vertex operator count:
    1^T S^{(q-1)n} 1 over length-n words equals this value.
    """
    if n < 1 or q < 1:
        raise ValueError("n, q must be >= 1")
    e1 = sys.axis_graphs[0].adj
    e2 = sys.axis_graphs[1].adj
    length = n * q
    checks = [(i, i + 1, e1) for i in range(length - 1)]
    checks += [(i, i + n, e2) for i in range(length - n)]
    total = _count_backtrack(sys.k, length, checks, work_limit)
    return ExactCount(total, f"slanted-2d n={n} q={q} system={sys.name}")


def brute_count_slanted_3d(sys, n1, n2, m, work_limit=DEFAULT_WORK_LIMIT):
    """Chains of length n1*n2*m with skip-n1 (axis 2) and skip-n1*n2
    (axis 3) conditions; what 3D 1-vertex walks count."""
    if min(n1, n2, m) < 1:
        raise ValueError("n1, n2, m must be >= 1")
    e1, e2, e3 = (g.adj for g in sys.axis_graphs)
    length = n1 * n2 * m
    checks = [(i, i + 1, e1) for i in range(length - 1)]
    checks += [(i, i + n1, e2) for i in range(length - n1)]
    checks += [(i, i + n1 * n2, e3) for i in range(length - n1 * n2)]
    total = _count_backtrack(sys.k, length, checks, work_limit)
    return ExactCount(total, f"slanted-3d n1={n1} n2={n2} m={m} system={sys.name}")


def brute_count_monomer_dimer(dims, work_limit=DEFAULT_WORK_LIMIT):
    """Exact number of monomer-dimer tilings of a box, by direct placement.

    Recursion on the first uncovered cell: place a monomer, or a dimer in
    any +axis direction whose partner cell is inside the box and free.
    """
    dims = list(dims)
    if any(n < 1 for n in dims):
        raise ValueError("dimensions must be positive")
    ncells = math.prod(dims)
    if ncells > 30:
        raise CapacityLimitError(f"{ncells} cells exceeds the 30-cell limit",
                                 estimate=ncells, limit=30)
    d = len(dims)
    strides = [1] * d
    for i in range(1, d):
        strides[i] = strides[i - 1] * dims[i - 1]

    def neighbours(cell):
        out = []
        for axis in range(d):
            coord = (cell // strides[axis]) % dims[axis]
            if coord + 1 < dims[axis]:
                out.append(cell + strides[axis])
        return out

    plus = [neighbours(c) for c in range(ncells)]
    covered = [False] * ncells
    nodes = 0

    def place(cell):
        nonlocal nodes
        nodes += 1
        if nodes > work_limit:
            raise CapacityLimitError("tiling work limit exceeded",
                                     estimate=nodes, limit=work_limit)
        while cell < ncells and covered[cell]:
            cell += 1
        if cell == ncells:
            return 1
        covered[cell] = True
        total = place(cell + 1)  # monomer
        for nb in plus[cell]:
            if not covered[nb]:
                covered[nb] = True
                total += place(cell + 1)
                covered[nb] = False
        covered[cell] = False
        return total

    return ExactCount(place(0), f"monomer-dimer box {dims}")


def count_monomer_dimer_colorings(dims, same_axis_chain=True,
                                  work_limit=DEFAULT_WORK_LIMIT):
    """Monomer-dimer tilings counted through the 2d+1 colour coding.

    Counts allowable box colourings of the monomer-dimer system, excluding
    words with dangling half-dimers at the boundary: colour 2i-1 may not
    occupy a cell whose +axis-i neighbour is outside the box, and colour 2i
    may not occupy a cell whose -axis-i neighbour is outside.  Must agree
    with :func:`brute_count_monomer_dimer` on every box.
    """
    dims = list(dims)
    d = len(dims)
    sys = monomer_dimer_system(d, same_axis_chain=same_axis_chain)
    ncells = math.prod(dims)
    strides = [1] * d
    for i in range(1, d):
        strides[i] = strides[i - 1] * dims[i - 1]
    allowed = []
    for cell in range(ncells):
        colours = set(range(sys.k))
        for axis in range(d):
            coord = (cell // strides[axis]) % dims[axis]
            if coord + 1 >= dims[axis]:
                colours.discard(2 * axis)      # first half, 1-based 2i-1
            if coord == 0:
                colours.discard(2 * axis + 1)  # second half, 1-based 2i
        allowed.append(sorted(colours))
    checks = _box_checks(sys, dims, ["open"] * d)
    total = _count_backtrack(sys.k, ncells, checks, work_limit, allowed=allowed)
    return ExactCount(total, f"monomer-dimer colourings box {dims} "
                             f"same_axis_chain={same_axis_chain}")
