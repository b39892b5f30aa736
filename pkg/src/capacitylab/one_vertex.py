"""1-vertex transfer operators: one lattice cell added per step.

States are allowable words; the successor of a word under colour c is the
word shifted left by one cell with c appended, subject to the append
conditions of each axis.  Every state therefore has at most k successors,
which is what makes these operators usable at state counts where the
standard transfer matrix is hopeless.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .words import DEFAULT_STATE_LIMIT, enumerate_helical_slab_words, enumerate_words


@dataclass
class OneVertexOperator:
    """Ultra-sparse shift-and-append operator over a word state space."""

    states: object
    succ_matrix: object          # csr, entry(phi, psi) = 1 iff psi follows phi
    kind: str
    k: int
    descriptor: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return len(self.states)

    @property
    def factors(self):
        return [self.succ_matrix]

    @property
    def descriptor_hash(self):
        h = hashlib.sha256()
        h.update(json.dumps(self.descriptor, sort_keys=True).encode())
        f = self.succ_matrix
        h.update(struct.pack("<qq", *f.shape))
        h.update(f.indptr.tobytes())
        h.update(f.indices.tobytes())
        return h.digest()

    def successors(self, state_index):
        """Sorted successor state indices; at most k of them."""
        if not 0 <= state_index < self.dimension:
            raise IndexError(f"state index {state_index} out of range")
        f = self.succ_matrix
        return sorted(int(j) for j in
                      f.indices[f.indptr[state_index]:f.indptr[state_index + 1]])

    def apply(self, vec):
        """A @ vec for arbitrary Python numbers, ascending-index sums."""
        if len(vec) != self.dimension:
            raise ValueError(f"vector length {len(vec)} != dimension {self.dimension}")
        f = self.succ_matrix
        indptr, indices = f.indptr, f.indices
        out = []
        for i in range(f.shape[0]):
            s = 0
            for t in range(indptr[i], indptr[i + 1]):
                s += vec[indices[t]]
            out.append(s)
        return out

    def to_csr(self):
        return self.succ_matrix


def _successor_matrix(states, k, append_conditions):
    """CSR over ``states`` where phi -> (phi shifted, c appended) for every
    colour c passing all (position, adjacency, orientation) conditions.

    ``append_conditions`` is a list of (power, adj) pairs: the condition is
    adj[(code // power) % k, c].
    """
    codes = states.codes
    m = len(states)
    khigh = k ** (states.n - 1)
    rows, cols = [], []
    for c in range(k):
        ok = np.ones(m, dtype=bool)
        for power, adj in append_conditions:
            digit = (codes // power) % k
            ok &= adj[digit, c]
        target = (codes % khigh) * k + c
        pos = np.searchsorted(codes, target)
        pos_c = np.minimum(pos, m - 1)
        ok &= (pos < m) & (codes[pos_c] == target)
        rows.append(np.flatnonzero(ok))
        cols.append(pos[ok])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return sp.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)),
                         shape=(m, m))


def build_one_vertex_2d(sys, n, limit=DEFAULT_STATE_LIMIT):
    """2D 1-vertex operator over the open length-n words of axis 1.

    phi -> phi(2..n)c exists iff (phi(n), c) is an axis-1 edge (the shifted
    word stays a valid chain) and (phi(1), c) is an axis-2 edge (the cell
    appended on the slanted torus sits on top of the cell that drops out).
    """
    if sys.d < 2:
        raise ValueError("the 2D 1-vertex operator needs at least 2 axes")
    if n < 2:
        raise ValueError("n must be >= 2 (the shift-and-append rule is "
                         "degenerate at n = 1)")
    e1 = sys.axis_graphs[0].adj
    e2 = sys.axis_graphs[1].adj
    states = enumerate_words(sys.axis_graphs[0], n, "open", limit=limit)
    k = sys.k
    conditions = [(1, e1), (k ** (n - 1), e2)]  # last cell chain, first cell vertical
    mat = _successor_matrix(states, k, conditions)
    desc = {"kind": "one-vertex-2d", "system": sys.name, "n": n, "M": len(states)}
    return OneVertexOperator(states, mat, kind="one-vertex-2d", k=k,
                             descriptor=desc)


def build_one_vertex_3d(sys, n1, n2, limit=DEFAULT_STATE_LIMIT):
    """3D 1-vertex operator over helical (n1, n2) slab words.

    phi -> phi(2..L)c with L = n1*n2 exists iff (phi(L), c) is an axis-1
    edge, (phi(L-n1+1), c) an axis-2 edge (the skip-n1 helical condition is
    preserved), and (phi(1), c) an axis-3 edge (the vertical condition).
    """
    if sys.d != 3:
        raise ValueError("the 3D 1-vertex operator needs a 3-axis system")
    if n1 * n2 < 2:
        raise ValueError("n1 * n2 must be >= 2")
    e1, e2, e3 = (g.adj for g in sys.axis_graphs)
    states = enumerate_helical_slab_words(sys, n1, n2, limit=limit)
    k = sys.k
    ncells = n1 * n2
    conditions = [(1, e1),                      # chain with the last cell
                  (k ** (n1 - 1), e2),          # skip-n1 cell from the end
                  (k ** (ncells - 1), e3)]      # first cell, vertical
    mat = _successor_matrix(states, k, conditions)
    desc = {"kind": "one-vertex-3d", "system": sys.name, "n1": n1, "n2": n2,
            "M": len(states)}
    return OneVertexOperator(states, mat, kind="one-vertex-3d", k=k,
                             descriptor=desc)
