"""Enumeration of allowable colouring words.

Words are stored as integer codes: a length-n word over k colours (0-based
internally) is encoded big-endian as sum(w[i] * k**(n-1-i)).  With that
encoding, ascending numeric order is exactly lexicographic order with
colour 1 < 2 < ... < k, which fixes operator row order once and for all.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityLimitError

DEFAULT_STATE_LIMIT = 2**31


def encode_word(word, k):
    code = 0
    for c in word:
        code = code * k + c
    return code


def decode_code(code, k, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = code % k
        code //= k
    return tuple(out)


@dataclass(frozen=True)
class StateSpace:
    """Sorted, duplicate-free set of allowable words with index lookup."""

    codes: np.ndarray  # int64, strictly ascending
    n: int             # word length (cells)
    k: int
    kind: str          # 'open' | 'periodic' | 'helical(n1,n2)' | 'slab(...)'
    label: str = ""

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.int64)
        if codes.size > 1 and not (np.diff(codes) > 0).all():
            raise ValueError("state codes must be strictly ascending")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    def __len__(self):
        return int(self.codes.size)

    def word(self, i):
        """0-based colour tuple of state i."""
        return decode_code(int(self.codes[i]), self.k, self.n)

    def word_str(self, i):
        """1-based digit string, e.g. '122' (readable for k <= 9)."""
        return "".join(str(c + 1) for c in self.word(i))

    def words(self):
        for i in range(len(self)):
            yield self.word(i)

    def index_of_code(self, code):
        pos = int(np.searchsorted(self.codes, code))
        if pos >= len(self) or int(self.codes[pos]) != code:
            raise KeyError(f"code {code} not in state space")
        return pos

    def index_of_word(self, word):
        return self.index_of_code(encode_word(word, self.k))

    def contains_code(self, code):
        pos = int(np.searchsorted(self.codes, code))
        return pos < len(self) and int(self.codes[pos]) == code

    def digits(self):
        """All words as an (M, n) uint8 array of 0-based colours."""
        out = np.empty((len(self), self.n), dtype=np.uint8)
        rem = self.codes.copy()
        for i in range(self.n - 1, -1, -1):
            out[:, i] = rem % self.k
            rem //= self.k
        return out


def enumerate_constrained_words(k, ncells, checks, limit=DEFAULT_STATE_LIMIT,
                                kind="custom", label=""):
    """All words of length ``ncells`` satisfying pairwise colour checks.

    ``checks`` is a list of (a, b, adj) triples requiring adj[w[a], w[b]];
    a == b is allowed (a loop requirement on that cell).  Cells are assigned
    in index order and every check fires as soon as both its cells are
    known, so partial assignments are pruned early.  Raises
    :class:`CapacityLimitError` when the number of live partial words
    exceeds ``limit`` at any stage.
    """
    if ncells < 1:
        raise ValueError("ncells must be >= 1")
    if k ** ncells > 2**62:
        raise CapacityLimitError(
            f"word codes for k={k}, n={ncells} exceed 63-bit encoding",
            estimate=k ** ncells, limit=2**62)
    by_trigger = {}
    for a, b, adj in checks:
        t = max(a, b)
        if not (0 <= min(a, b) and t < ncells):
            raise ValueError(f"check ({a}, {b}) out of range for {ncells} cells")
        by_trigger.setdefault(t, []).append((a, b, np.asarray(adj, dtype=bool)))

    codes = np.zeros(1, dtype=np.int64)
    for t in range(ncells):
        parts = []
        for c in range(k):
            mask = np.ones(codes.size, dtype=bool)
            for a, b, adj in by_trigger.get(t, ()):
                if a == b == t:
                    if not adj[c, c]:
                        mask[:] = False
                    continue
                other = min(a, b)
                digit = (codes // (k ** (t - 1 - other))) % k
                if a == t:   # current cell is the source: adj[c, w[b]]
                    mask &= adj[c, digit]
                else:        # current cell is the target: adj[w[a], c]
                    mask &= adj[digit, c]
            parts.append(codes[mask] * k + c)
        codes = np.sort(np.concatenate(parts))
        if codes.size > limit:
            raise CapacityLimitError(
                f"state enumeration exceeds limit at cell {t + 1}/{ncells}: "
                f"{codes.size} > {limit}", estimate=int(codes.size), limit=limit)
    return StateSpace(codes, ncells, k, kind=kind, label=label)


def chain_word_count(g, n, boundary="open"):
    """Exact number of allowable length-n words, by DP (no enumeration)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    adj = g.adj.astype(object)
    if boundary == "open":
        v = np.ones(g.k, dtype=object)
        for _ in range(n - 1):
            v = adj.T @ v
        return int(v.sum())
    if boundary == "periodic":
        if n == 1:
            return int(np.diag(g.adj).sum())
        m = np.eye(g.k, dtype=object)
        for _ in range(n - 1):
            m = m @ adj
        # chain 1..n plus the single wrap condition (w(n), w(1)) in E
        return int(sum(m[i, j] for i in range(g.k) for j in range(g.k) if g.adj[j, i]))
    raise ValueError(f"unknown boundary {boundary!r}")


def enumerate_words(g, n, boundary="open", limit=DEFAULT_STATE_LIMIT):
    """All allowable length-n words of a constraint graph, sorted.

    Open words satisfy (w(i), w(i+1)) in E for 1 <= i < n; the periodic
    variant additionally requires the wrap pair (w(n), w(1)) in E.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    projected = chain_word_count(g, n, "open")
    if projected > limit:
        raise CapacityLimitError(
            f"projected open word count {projected} exceeds limit {limit}",
            estimate=projected, limit=limit)
    checks = [(i, i + 1, g.adj) for i in range(n - 1)]
    if boundary == "periodic":
        checks.append((n - 1, 0, g.adj))
    elif boundary != "open":
        raise ValueError(f"unknown boundary {boundary!r}")
    return enumerate_constrained_words(g.k, n, checks, limit=limit, kind=boundary)


def helical_checks(sys, n1, n2):
    """Pairwise checks for helical slab words of an (at least 2-axis) system."""
    e1 = sys.axis_graphs[0].adj
    e2 = sys.axis_graphs[1].adj
    ncells = n1 * n2
    checks = [(i, i + 1, e1) for i in range(ncells - 1)]
    checks += [(i, i + n1, e2) for i in range(n1 * (n2 - 1))]
    return checks


def enumerate_helical_slab_words(sys, n1, n2, limit=DEFAULT_STATE_LIMIT):
    """Words of length n1*n2 forming a chain along axis 1 with the skip-n1
    condition along axis 2 (the state space of 3D 1-vertex operators)."""
    if sys.d < 2:
        raise ValueError("helical slab words need a system with at least 2 axes")
    if n1 < 1 or n2 < 1:
        raise ValueError("n1, n2 must be >= 1")
    projected = chain_word_count(sys.axis_graphs[0], n1 * n2, "open")
    if projected > limit:
        raise CapacityLimitError(
            f"projected chain count {projected} exceeds limit {limit}",
            estimate=projected, limit=limit)
    return enumerate_constrained_words(
        sys.k, n1 * n2, helical_checks(sys, n1, n2), limit=limit,
        kind=f"helical({n1},{n2})", label=sys.name)


def slab_checks(g1, g2, n1, n2, bc=("open", "open")):
    """Pairwise checks for colourings of an n1 x n2 slab.

    Cell (r, c) is linearised as r*n1 + c; axis 1 runs along c with graph
    ``g1``, axis 2 along r with ``g2``.  A periodic axis adds every wrap
    pair of the cycle, so size-2 cycles constrain both orders.
    """
    checks = []
    for r in range(n2):
        for c in range(n1 - 1):
            checks.append((r * n1 + c, r * n1 + c + 1, g1.adj))
        if bc[0] == "periodic" and n1 >= 2:
            checks.append((r * n1 + n1 - 1, r * n1, g1.adj))
            if n1 == 2:
                checks.append((r * n1, r * n1 + 1, g1.adj))
        elif bc[0] == "periodic" and n1 == 1:
            checks.append((r * n1, r * n1, g1.adj))
    for c in range(n1):
        for r in range(n2 - 1):
            checks.append((r * n1 + c, (r + 1) * n1 + c, g2.adj))
        if bc[1] == "periodic" and n2 >= 2:
            checks.append(((n2 - 1) * n1 + c, c, g2.adj))
            if n2 == 2:
                checks.append((c, n1 + c, g2.adj))
        elif bc[1] == "periodic" and n2 == 1:
            checks.append((c, c, g2.adj))
    # dedupe (n1 == 2 periodic adds (a, b) twice with the same matrix)
    seen = set()
    out = []
    for a, b, adj in checks:
        key = (a, b, id(adj))
        if key not in seen:
            seen.add(key)
            out.append((a, b, adj))
    return out


def enumerate_slab_words(sys, n1, n2, bc=("open", "open"), limit=DEFAULT_STATE_LIMIT):
    """All (axis-1, axis-2)-allowable colourings of the n1 x n2 slab."""
    if sys.d < 2:
        raise ValueError("slab words need a system with at least 2 axes")
    checks = slab_checks(sys.axis_graphs[0], sys.axis_graphs[1], n1, n2, bc)
    return enumerate_constrained_words(
        sys.k, n1 * n2, checks, limit=limit,
        kind=f"slab({n1},{n2},{bc[0]},{bc[1]})", label=sys.name)
