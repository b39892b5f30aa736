"""Row-to-row (2D) and slab-to-slab (3D) transfer operators.

An operator is held as a product of sparse 0/1 factors applied left to
right.  Small 2D operators get a single explicit sparse matrix (successor
lists); 3D slab operators are factored cell by cell, which keeps the work
per matvec proportional to the number of partially-updated states instead
of the square of the state count.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import CapacityLimitError
from .words import (DEFAULT_STATE_LIMIT, StateSpace,
                    enumerate_constrained_words, enumerate_slab_words,
                    enumerate_words, slab_checks)

# Above this state count we refuse to build explicit pairwise matrices;
# slab operators use the factored form instead.
EXPLICIT_BUILD_LIMIT = 20000


@dataclass
class TransferOperator:
    """0/1 linear operator as a chain of sparse factors.

    ``factors`` are applied in list order: apply(v) = F_last(...(F_1 v)).
    ``states`` indexes both rows and columns of the overall square matrix.
    """

    factors: list
    states: object
    kind: str
    descriptor: dict = field(default_factory=dict)
    representation: str = "successor-lists"
    _csr_cache: object = field(default=None, repr=False)

    @property
    def dimension(self):
        return len(self.states)

    @property
    def descriptor_hash(self):
        h = hashlib.sha256()
        h.update(json.dumps(self.descriptor, sort_keys=True).encode())
        for f in self.factors:
            h.update(struct.pack("<qq", *f.shape))
            h.update(f.indptr.tobytes())
            h.update(f.indices.tobytes())
        return h.digest()

    def apply(self, vec):
        """A @ vec for a sequence of arbitrary Python numbers (exact for
        ints/Fractions, precision-faithful for mpf); fixed ascending-index
        summation order."""
        if len(vec) != self.dimension:
            raise ValueError(f"vector length {len(vec)} != dimension {self.dimension}")
        out = list(vec)
        for f in self.factors:
            indptr, indices = f.indptr, f.indices
            nxt = []
            for i in range(f.shape[0]):
                s = 0
                for t in range(indptr[i], indptr[i + 1]):
                    s += out[indices[t]]
                nxt.append(s)
            out = nxt
        return out

    def apply_float(self, vec):
        """A @ vec in float64 (fast, for rough diagnostics only)."""
        out = np.asarray(vec, dtype=np.float64)
        for f in self.factors:
            out = f @ out
        return out

    def to_csr(self, limit=EXPLICIT_BUILD_LIMIT):
        """Materialize the full matrix (guarded by state count)."""
        if self._csr_cache is not None:
            return self._csr_cache
        if self.dimension > limit:
            raise CapacityLimitError(
                f"refusing to materialize a {self.dimension}-state operator",
                estimate=self.dimension, limit=limit)
        a = self.factors[0].astype(np.int64)
        for f in self.factors[1:]:
            a = f.astype(np.int64) @ a
        a.sum_duplicates()
        self._csr_cache = a.tocsr()
        return self._csr_cache

    def entry(self, i, j):
        """Matrix entry by state indices (materializes the matrix once)."""
        return int(self.to_csr()[i, j])

    def row_successors(self, i):
        """Sorted column indices with entry 1 in row i."""
        a = self.to_csr()
        return sorted(int(c) for c in a.indices[a.indptr[i]:a.indptr[i + 1]])


def quadratic_form_count(op, m):
    """1^T A^m 1 in exact arbitrary-size integer arithmetic."""
    if m < 0:
        raise ValueError("m must be >= 0")
    v = [1] * op.dimension
    for _ in range(m):
        v = op.apply(v)
    return sum(v)


def build_row_transfer_2d(sys, n, boundary="open", limit=DEFAULT_STATE_LIMIT,
                          row_axis=1):
    """Row-to-row transfer operator of a 2-axis system.

    States are the allowable length-n words of the row axis graph (open or
    periodic); entry(phi, psi) = 1 iff (phi(i), psi(i)) is an edge of the
    stacking axis graph for every position i.  ``row_axis=1`` stacks along
    axis 2 (the usual T/R_{n,2}); ``row_axis=2`` swaps the roles.
    """
    if sys.d < 2:
        raise ValueError("row transfer needs a system with at least 2 axes")
    if n < 1:
        raise ValueError("n must be >= 1")
    g_row = sys.graph(row_axis)
    g_stack = sys.graph(2 if row_axis == 1 else 1)
    states = enumerate_words(g_row, n, boundary, limit=limit)
    if n == 1:
        # a single-cell row only stacks usefully on non-isolated row colours
        isolated = set(g_row.isolated_colours())
        if isolated:
            keep = np.array([c for c in range(sys.k) if c + 1 not in isolated],
                            dtype=np.int64)
            states = StateSpace(codes=keep, n=1, k=sys.k, kind=states.kind,
                                label=states.label)
    m = len(states)
    if m > EXPLICIT_BUILD_LIMIT:
        raise CapacityLimitError(
            f"explicit row operator with {m} states exceeds build limit",
            estimate=m, limit=EXPLICIT_BUILD_LIMIT)
    digits = states.digits()
    e = g_stack.adj
    rows, cols = [], []
    block = max(1, 8_000_000 // max(1, m * n))
    for i0 in range(0, m, block):
        comp = e[digits[i0:i0 + block, None, :], digits[None, :, :]].all(axis=2)
        r, c = np.nonzero(comp)
        rows.append(r + i0)
        cols.append(c)
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    mat = sp.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)),
                        shape=(m, m))
    desc = {"kind": "row-transfer-2d", "system": sys.name, "n": n,
            "boundary": boundary, "row_axis": row_axis, "M": m}
    return TransferOperator([mat], states, kind="row-transfer-2d",
                            descriptor=desc, representation="successor-lists")


def build_slab_transfer_3d(sys, n1, n2, bc=("open", "open"),
                           limit=DEFAULT_STATE_LIMIT):
    """Slab-to-slab transfer operator of a 3-axis system, in factored form.

    States are allowable colourings of the n1 x n2 slab under the given
    per-axis boundary; entry(phi, psi) = 1 iff (phi(p), psi(p)) is an edge
    of the axis-3 graph at every slab cell p.  The operator is stored as a
    product of one sparse factor per cell; each factor replaces the psi
    value of one cell with a phi value, so a matvec never touches the full
    compatibility relation.
    """
    if sys.d != 3:
        raise ValueError("slab transfer needs a 3-axis system")
    bc = tuple(bc)
    if any(b not in ("open", "periodic") for b in bc) or len(bc) != 2:
        raise ValueError(f"bad boundary descriptor {bc!r}")
    k = sys.k
    e3 = sys.axis_graphs[2].adj
    ncells = n1 * n2
    checks = slab_checks(sys.axis_graphs[0], sys.axis_graphs[1], n1, n2, bc)
    states = enumerate_slab_words(sys, n1, n2, bc, limit=limit)

    def cut_space(p):
        if p in (0, ncells):
            return states
        sub = [(a, b, adj) for a, b, adj in checks
               if (a < p and b < p) or (a >= p and b >= p)]
        return enumerate_constrained_words(k, ncells, sub, limit=limit,
                                           kind=f"cut({p})")

    factors = []
    prev = states
    for p in range(ncells):
        cur = cut_space(p + 1)
        pw = k ** (ncells - 1 - p)
        codes1 = cur.codes
        digit = (codes1 // pw) % k
        rows, cols = [], []
        for c in range(k):
            target = codes1 + (c - digit) * pw
            pos = np.searchsorted(prev.codes, target)
            pos_c = np.minimum(pos, len(prev) - 1)
            ok = (prev.codes[pos_c] == target) & (pos < len(prev)) & e3[digit, c]
            rows.append(np.flatnonzero(ok))
            cols.append(pos[ok])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        factors.append(sp.csr_matrix(
            (np.ones(rows.size, dtype=np.int64), (rows, cols)),
            shape=(len(cur), len(prev))))
        prev = cur
    desc = {"kind": "slab-transfer-3d", "system": sys.name, "n1": n1,
            "n2": n2, "bc": list(bc), "M": len(states)}
    return TransferOperator(factors, states, kind="slab-transfer-3d",
                            descriptor=desc, representation="matrix-free")


# ---------------------------------------------------------------------------
# alternative representations and debug export

class BitsetRows:
    """Row bitmask representation: row i is a Python int with bit j set
    iff entry(i, j) = 1.  Used for representation cross-checks."""

    def __init__(self, rows, ncols):
        self.rows = list(rows)
        self.ncols = ncols

    @classmethod
    def from_operator(cls, op):
        a = op.to_csr()
        rows = []
        for i in range(a.shape[0]):
            mask = 0
            for j in a.indices[a.indptr[i]:a.indptr[i + 1]]:
                mask |= 1 << int(j)
            rows.append(mask)
        return cls(rows, a.shape[1])

    def apply(self, vec):
        out = []
        for mask in self.rows:
            s = 0
            while mask:
                low = mask & -mask
                s += vec[low.bit_length() - 1]
                mask ^= low
            out.append(s)
        return out


def export_operator_text(op, path):
    """Debug export: state count, then per row the sorted successor indices."""
    a = op.to_csr()
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{a.shape[0]}\n")
        for i in range(a.shape[0]):
            idx = sorted(int(j) for j in a.indices[a.indptr[i]:a.indptr[i + 1]])
            f.write(" ".join(str(j) for j in idx) + "\n")


def import_operator_text(path):
    """Read the debug export back as a bare csr matrix (for cross-checking)."""
    with open(path, "r", encoding="utf-8") as f:
        m = int(f.readline())
        rows, cols = [], []
        for i in range(m):
            line = f.readline().strip()
            if line:
                for j in line.split():
                    rows.append(i)
                    cols.append(int(j))
    return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                         shape=(m, m))
