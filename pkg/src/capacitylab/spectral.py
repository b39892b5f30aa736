"""Dominant-eigenvalue computation for non-negative 0/1 operators.

Power iteration runs on exact fixed-point vectors: every entry is a
non-negative integer in base-2^29 limbs held in an int64 numpy array, all
entries sharing one binary exponent.  A matvec by a 0/1 matrix is then an
exact integer computation, so the Collatz-Wielandt ratios min/max
(Av)_i / v_i computed from the integer vectors are certified bounds on the
Perron root, not floating-point estimates.  Results are reported as mpmath
numbers at the configured decimal precision.
"""
from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from mpmath import mp, mpf

from .errors import CheckpointError

LIMB_BITS = 29
LIMB_BASE = 1 << LIMB_BITS


# ---------------------------------------------------------------------------
# limb vector helpers

def _carry(x):
    """Reduce an int64 (M, B) array to canonical limbs in [0, LIMB_BASE)."""
    while True:
        hi = x >> LIMB_BITS
        if not hi.any():
            return x
        x = x - (hi << LIMB_BITS)
        if hi[:, -1].any():
            x = np.hstack([x, np.zeros((x.shape[0], 1), dtype=np.int64)])
            hi = np.hstack([hi, np.zeros((hi.shape[0], 1), dtype=np.int64)])
        x[:, 1:] += hi[:, :-1]


def _top_column(x):
    nz = np.flatnonzero(x.any(axis=0))
    return int(nz[-1]) if nz.size else -1


def _renormalize(x, nlimbs):
    """Shift columns so the most significant used limb sits at nlimbs-1.

    Dropped low limbs are floored away; returns (limbs, exponent_delta_bits).
    """
    top = _top_column(x)
    if top < 0:
        raise ArithmeticError("iterate collapsed to zero (precision exhausted)")
    out = np.zeros((x.shape[0], nlimbs), dtype=np.int64)
    shift = top - (nlimbs - 1)
    if shift >= 0:
        out[:, :] = x[:, shift:top + 1]
    else:
        out[:, -shift:nlimbs] = x[:, :top + 1]
    return out, shift * LIMB_BITS


def _limbs_to_ints(x):
    """Exact per-entry Python integers of a canonical limb array."""
    vals = [0] * x.shape[0]
    for j in range(x.shape[1] - 1, -1, -1):
        col = x[:, j].tolist()
        vals = [(v << LIMB_BITS) + c for v, c in zip(vals, col)]
    return vals


def _ints_to_limbs(vals, nlimbs):
    x = np.zeros((len(vals), nlimbs), dtype=np.int64)
    mask = LIMB_BASE - 1
    for i, v in enumerate(vals):
        j = 0
        while v:
            x[i, j] = v & mask
            v >>= LIMB_BITS
            j += 1
    return x


def _apply_factors(factors, x):
    """Exact product (F_last ... F_1) x on canonical limbs, with carries."""
    for f in factors:
        x = _carry(f @ x)
    return x


def _pad_columns(x, ncols):
    if x.shape[1] >= ncols:
        return x
    return np.hstack([x, np.zeros((x.shape[0], ncols - x.shape[1]),
                                  dtype=np.int64)])


# ---------------------------------------------------------------------------
# operator adapter

class _MatrixAdapter:
    """Wraps a plain matrix so spectral routines see the operator protocol."""

    def __init__(self, a, label="matrix"):
        a = sp.csr_matrix(a)
        if (a.data < 0).any():
            raise ValueError("operator must be non-negative")
        self.factors = [a.astype(np.int64)]
        self.dimension = a.shape[0]
        self.label = label

    @property
    def descriptor_hash(self):
        h = hashlib.sha256()
        h.update(self.label.encode())
        for f in self.factors:
            h.update(struct.pack("<qq", *f.shape))
            h.update(f.indptr.tobytes())
            h.update(f.indices.tobytes())
            h.update(f.data.tobytes())
        return h.digest()

    def apply(self, vec):
        out = vec
        for f in self.factors:
            indptr, indices, data = f.indptr, f.indices, f.data
            res = []
            for i in range(f.shape[0]):
                s = 0
                for t in range(indptr[i], indptr[i + 1]):
                    s += int(data[t]) * out[indices[t]]
                res.append(s)
            out = res
        return out


def as_operator(op):
    if hasattr(op, "factors") and hasattr(op, "dimension"):
        return op
    return _MatrixAdapter(op)


# ---------------------------------------------------------------------------
# public types

@dataclass
class IterationConfig:
    """Knobs for the Perron iteration.

    ``tolerance`` is the relative Collatz-Wielandt gap
    (cw_upper - cw_lower) / value at which the run is declared converged;
    it defaults to 10**-(precision_digits - 8).  ``shift`` is either
    "auto" (sigma = 1, which makes every iterate strictly positive and
    kills period-induced oscillation) or an explicit non-negative integer.
    """

    precision_digits: int = 40
    tolerance: object = None
    max_iterations: int = 100000
    shift: object = "auto"
    check_interval: int = None   # None = doubling schedule 1,2,4,...,64 then every 64
    checkpoint_interval: int = 1000
    checkpoint_path: str = None
    resume: bool = False
    start_scale: int = 1

    def __post_init__(self):
        if self.precision_digits < 16:
            raise ValueError("precision_digits must be >= 16")
        if self.tolerance is not None and not (mpf(self.tolerance) > 0):
            raise ValueError("tolerance must be positive")
        if self.start_scale < 1:
            raise ValueError("start_scale must be a positive integer")

    @property
    def effective_tolerance(self):
        if self.tolerance is not None:
            return mpf(self.tolerance)
        return mpf(10) ** -(self.precision_digits - 8)

    @property
    def sigma(self):
        if self.shift == "auto":
            return 1
        s = int(self.shift)
        if s < 0 or s != self.shift:
            raise ValueError("explicit shift must be a non-negative integer")
        return s


@dataclass
class SpectralEstimate:
    """Point estimate of a Perron root with a certified enclosure.

    ``cw_lower <= value <= cw_upper`` holds whenever ``converged``; the
    bounds come from Collatz-Wielandt ratios of an exactly computed
    positive iterate, so they bound the true spectral radius.
    """

    value: object
    cw_lower: object
    cw_upper: object
    iterations: int
    precision_digits: int
    converged: bool
    shift_applied: int
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_value(cls, value, digits, meta=None):
        """Wrap a literal decimal value, enclosing it by half an ulp of its
        printed digits.  Useful for feeding published table entries into
        bound formulas."""
        with mp.workdps(digits + 10):
            v = mpf(str(value))
            text = str(value).replace("-", "").replace(".", "").lstrip("0")
            printed = len(text)
            ulp = v * mpf(10) ** (1 - printed)
            return cls(value=v, cw_lower=v - ulp / 2, cw_upper=v + ulp / 2,
                       iterations=0, precision_digits=digits, converged=True,
                       shift_applied=0, meta=meta or {})


def collatz_wielandt_bounds(op, v):
    """(min_i (Av)_i / v_i, max_i (Av)_i / v_i) for strictly positive v.

    Works with any numeric type supporting division (mpf, Fraction, float).
    """
    op = as_operator(op)
    if len(v) != op.dimension:
        raise ValueError(f"vector length {len(v)} != dimension {op.dimension}")
    for x in v:
        if not x > 0:
            raise ValueError("Collatz-Wielandt bounds need a strictly positive vector")
    av = op.apply(list(v))
    ratios = [a / b for a, b in zip(av, v)]
    return min(ratios), max(ratios)


# ---------------------------------------------------------------------------
# checkpointing

_CKPT_MAGIC = b"CAPCHK01"
_CKPT_VERSION = 1
_CKPT_HEADER = struct.Struct("<I32sQIQIqq")


def write_checkpoint(path, op_hash, iteration, limbs, exponent, sigma,
                     precision_digits):
    """Atomically persist the iteration state (write-temp-then-rename)."""
    m, nl = limbs.shape
    words = (nl * LIMB_BITS) // 64 + 1
    ints = _limbs_to_ints(limbs)
    payload = b"".join(v.to_bytes(words * 8, "little") for v in ints)
    digest = hashlib.sha256(payload).digest()
    header = _CKPT_MAGIC + struct.pack("<I", _CKPT_VERSION) + _CKPT_HEADER.pack(
        0, op_hash, iteration, precision_digits, m, words, exponent, sigma)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ckpt-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(header)
            f.write(digest)
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_checkpoint(path, op_hash, nlimbs):
    """Load a checkpoint, verifying operator identity and payload integrity."""
    with open(path, "rb") as f:
        blob = f.read()
    fixed = len(_CKPT_MAGIC) + 4 + _CKPT_HEADER.size + 32
    if len(blob) < fixed or blob[:8] != _CKPT_MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    (version,) = struct.unpack_from("<I", blob, 8)
    if version != _CKPT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    _, stored_hash, iteration, digits, m, words, exponent, sigma = \
        _CKPT_HEADER.unpack_from(blob, 12)
    if stored_hash != op_hash:
        raise CheckpointError(f"{path}: operator descriptor hash mismatch")
    digest = blob[12 + _CKPT_HEADER.size:12 + _CKPT_HEADER.size + 32]
    payload = blob[fixed:]
    if len(payload) != m * words * 8 or hashlib.sha256(payload).digest() != digest:
        raise CheckpointError(f"{path}: corrupt or truncated checkpoint")
    ints = [int.from_bytes(payload[i * words * 8:(i + 1) * words * 8], "little")
            for i in range(m)]
    limbs = _ints_to_limbs(ints, max(nlimbs, (max(ints).bit_length() // LIMB_BITS) + 1))
    return limbs, iteration, exponent, sigma, digits


# ---------------------------------------------------------------------------
# Perron iteration

def _check_schedule(iteration, interval):
    if interval is not None:
        return iteration % interval == 0
    if iteration <= 64:
        return iteration & (iteration - 1) == 0  # powers of two
    return iteration % 64 == 0


def perron_radius(op, cfg=None):
    """Certified dominant eigenvalue of a non-negative operator.

    Runs shifted power iteration v <- (A + sigma I) v in exact fixed-point
    arithmetic, declaring convergence when the relative Collatz-Wielandt gap
    on a strictly positive iterate meets the tolerance.  The reported value
    and bounds are shifted back by sigma.  If the iterate never becomes
    strictly positive (possible only with an explicit zero shift on a
    reducible operator), converged is False and only the support upper
    bound is reported, with a trivial zero lower bound.
    """
    op = as_operator(op)
    cfg = cfg or IterationConfig()
    m = op.dimension
    if m < 1:
        raise ValueError("operator dimension must be >= 1")
    sigma = cfg.sigma
    prec_bits = int(cfg.precision_digits * 3.3219281) + 64
    nlimbs = prec_bits // LIMB_BITS + 2
    guard = prec_bits + 16
    tol = cfg.effective_tolerance

    limbs = np.zeros((m, nlimbs), dtype=np.int64)
    start = _ints_to_limbs([cfg.start_scale] * m, nlimbs)
    limbs, _ = _renormalize(start, nlimbs)
    exponent = 0
    iteration = 0

    if cfg.resume:
        if not cfg.checkpoint_path:
            raise ValueError("resume requested without a checkpoint path")
        limbs, iteration, exponent, sigma, _ = read_checkpoint(
            cfg.checkpoint_path, op.descriptor_hash, nlimbs)

    best_lower = None
    best_upper = None
    converged = False
    positive_seen = False
    support_upper = None

    with mp.workdps(cfg.precision_digits + 10):
        while iteration < cfg.max_iterations:
            u = _apply_factors(op.factors, limbs)
            if sigma:
                w = max(u.shape[1], limbs.shape[1]) + 1
                u = _carry(_pad_columns(u, w) + sigma * _pad_columns(limbs, w))
            iteration += 1

            if _check_schedule(iteration, cfg.check_interval) \
                    or iteration == cfg.max_iterations:
                vi = _limbs_to_ints(limbs)
                ui = _limbs_to_ints(u)
                if all(b > 0 for b in vi):
                    positive_seen = True
                    lo = min((a << guard) // b for a, b in zip(ui, vi))
                    hi = max(-((-(a << guard)) // b) for a, b in zip(ui, vi))
                    lower = mpf(lo) / mpf(2) ** guard - sigma
                    upper = mpf(hi) / mpf(2) ** guard - sigma
                    if best_lower is None or lower > best_lower:
                        best_lower = lower
                    if best_upper is None or upper < best_upper:
                        best_upper = upper
                    mid = (best_lower + best_upper) / 2
                    if mid > 0 and (best_upper - best_lower) / mid <= tol:
                        converged = True
                        break
                    if best_upper == best_lower:  # exact eigenvector hit
                        converged = True
                        break
                else:
                    support = [(a, b) for a, b in zip(ui, vi) if b > 0]
                    if support:
                        hi = max(-((-(a << guard)) // b) for a, b in support)
                        up = mpf(hi) / mpf(2) ** guard - sigma
                        if support_upper is None or up < support_upper:
                            support_upper = up

            limbs, dexp = _renormalize(u, nlimbs)
            exponent += dexp

            if cfg.checkpoint_path and iteration % cfg.checkpoint_interval == 0:
                write_checkpoint(cfg.checkpoint_path, op.descriptor_hash,
                                 iteration, limbs, exponent, sigma,
                                 cfg.precision_digits)

        if positive_seen and best_lower is not None:
            value = (best_lower + best_upper) / 2
            return SpectralEstimate(
                value=value, cw_lower=best_lower, cw_upper=best_upper,
                iterations=iteration, precision_digits=cfg.precision_digits,
                converged=converged, shift_applied=sigma)
        return SpectralEstimate(
            value=support_upper if support_upper is not None else mpf(0),
            cw_lower=mpf(0),
            cw_upper=support_upper if support_upper is not None else mpf("inf"),
            iterations=iteration, precision_digits=cfg.precision_digits,
            converged=False, shift_applied=sigma)
