"""Exact truncated path signatures for piecewise-linear paths.

The signature of a path X : [a, b] -> R^d is the graded sequence of its
iterated integrals

    S(X) = (1, S^1, S^2, ..., S^k, ...),    S^k in (R^d)^{tensor k},

truncated here at a finite depth D.  Level 1 is the total displacement,
level 2 encodes signed areas, and higher levels capture progressively
finer order-of-events information.  Two facts make the computation exact
for polylines:

  * the signature of a single linear segment with increment v is the
    tensor exponential  exp(v) = sum_k v^{tensor k} / k! ; and
  * concatenating paths multiplies their signatures in the truncated
    tensor algebra (Chen's identity).

Levels are stored dense and flattened: level k is a vector of length
d^k whose entries are ordered lexicographically by multi-index
(i1, ..., ik), each i in {1..d}.  This is the C-order raveling of the
corresponding k-tensor, so flattened tensor products are plain outer
products.  All values are immutable; every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, ShapeError

__all__ = [
    "TensorSeq",
    "identity",
    "segment_signature",
    "chen_concat",
    "path_signature",
    "log_signature",
    "tensor_exp",
    "flatten",
    "flat_length",
    "sig_distance",
]


@dataclass(frozen=True, eq=False, repr=False)
class TensorSeq:
    """Truncated element of the tensor algebra over R^dim.

    ``levels[k-1]`` holds the level-k coefficients as a flat vector of
    length ``dim ** k``.  ``level0`` is 1.0 for group-like elements
    (signatures) and 0.0 for Lie elements (log-signatures).
    """

    dim: int
    depth: int
    level0: float
    levels: tuple = field(default=())

    def __post_init__(self):
        if self.dim < 1 or self.depth < 1:
            raise InvalidInputError(
                f"dim and depth must be >= 1, got dim={self.dim} depth={self.depth}"
            )
        if len(self.levels) != self.depth:
            raise ShapeError(
                f"expected {self.depth} levels, got {len(self.levels)}"
            )
        frozen = []
        for k, lev in enumerate(self.levels, start=1):
            arr = np.asarray(lev, dtype=float)
            if arr.shape != (self.dim**k,):
                raise ShapeError(
                    f"level {k} must have {self.dim ** k} entries, got shape {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"level {k} contains non-finite values")
            arr = arr.copy()
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "levels", tuple(frozen))
        if not math.isfinite(self.level0):
            raise InvalidInputError("level0 must be finite")

    def __repr__(self):
        return f"TensorSeq(dim={self.dim}, depth={self.depth}, level0={self.level0})"

    def level(self, k: int) -> np.ndarray:
        """Level-k coefficient vector (k in 1..depth)."""
        return self.levels[k - 1]


def identity(dim: int, depth: int) -> TensorSeq:
    """Multiplicative identity of the truncated tensor algebra."""
    return TensorSeq(
        dim=dim,
        depth=depth,
        level0=1.0,
        levels=tuple(np.zeros(dim**k) for k in range(1, depth + 1)),
    )


def _check_compatible(a: TensorSeq, b: TensorSeq) -> None:
    if a.dim != b.dim or a.depth != b.depth:
        raise ShapeError(
            f"incompatible operands: dim {a.dim} vs {b.dim}, depth {a.depth} vs {b.depth}"
        )


def _product(a: TensorSeq, b: TensorSeq) -> TensorSeq:
    """Truncated tensor-algebra product of two elements."""
    out = []
    for k in range(1, a.depth + 1):
        acc = a.level0 * b.levels[k - 1] + b.level0 * a.levels[k - 1]
        for i in range(1, k):
            acc = acc + np.multiply.outer(a.levels[i - 1], b.levels[k - i - 1]).ravel()
        out.append(acc)
    return TensorSeq(dim=a.dim, depth=a.depth, level0=a.level0 * b.level0, levels=tuple(out))


def segment_signature(delta, depth: int) -> TensorSeq:
    """Signature of one linear segment: the tensor exponential of its increment.

    Level k equals delta^{tensor k} / k!.
    """
    if depth < 1:
        raise InvalidInputError(f"depth must be >= 1, got {depth}")
    vec = np.asarray(delta, dtype=float)
    if vec.ndim != 1 or vec.size < 1:
        raise InvalidInputError("delta must be a 1-D displacement vector")
    if not np.all(np.isfinite(vec)):
        raise InvalidInputError("delta must be finite")
    levels = []
    power = vec.copy()
    levels.append(power)
    for k in range(2, depth + 1):
        power = np.multiply.outer(power, vec).ravel() / k
        levels.append(power)
    return TensorSeq(dim=vec.size, depth=depth, level0=1.0, levels=tuple(levels))


def chen_concat(a: TensorSeq, b: TensorSeq) -> TensorSeq:
    """Signature of a concatenated path: the truncated tensor product."""
    _check_compatible(a, b)
    return _product(a, b)


def _as_points(path) -> np.ndarray:
    pts = getattr(path, "points", path)
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise InvalidInputError("path must be an (n, d) array of vertices")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("path vertices must be finite")
    return arr


def path_signature(path, depth: int) -> TensorSeq:
    """Exact truncated signature of a piecewise-linear path.

    Equivalent to folding ``segment_signature`` over the consecutive
    vertex increments with ``chen_concat``; implemented as a single
    vectorised pass over segments.  Accepts an (n, d) vertex array or
    any object with a ``points`` attribute holding one.
    """
    if depth < 1:
        raise InvalidInputError(f"depth must be >= 1, got {depth}")
    pts = _as_points(path)
    if pts.shape[0] < 2:
        raise InsufficientDataError(
            f"path needs at least 2 points, got {pts.shape[0]}"
        )
    deltas = np.diff(pts, axis=0)  # (m, d)
    m, dim = deltas.shape

    # pows[j-1][s] = delta_s^{tensor j} / j!, flattened
    pows = [deltas]
    for j in range(2, depth + 1):
        pows.append(
            np.einsum("ma,mb->mab", pows[-1], deltas).reshape(m, -1) / j
        )

    # Chen fold, restructured as cumulative sums: the level-k increment
    # contributed by segment s is  sum_{j=1..k} S^{k-j}(prefix) (x) delta_s^j/j!
    levels = []
    prefixes = []  # running level values before each segment
    for k in range(1, depth + 1):
        incr = pows[k - 1].copy()
        for j in range(1, k):
            incr += np.einsum(
                "ma,mb->mab", prefixes[k - j - 1], pows[j - 1]
            ).reshape(m, -1)
        cum = np.cumsum(incr, axis=0)
        pref = np.empty_like(cum)
        pref[0] = 0.0
        pref[1:] = cum[:-1]
        prefixes.append(pref)
        levels.append(cum[-1])
    return TensorSeq(dim=dim, depth=depth, level0=1.0, levels=tuple(levels))


def log_signature(sig: TensorSeq) -> TensorSeq:
    """Truncated tensor logarithm of a group-like element.

    With x = sig - 1 (which has no scalar part), returns
    sum_{n>=1} (-1)^{n+1} x^{tensor n} / n, truncated at sig.depth.
    """
    if sig.level0 != 1.0:
        raise InvalidInputError(
            f"log requires a group-like element with level0 == 1, got {sig.level0}"
        )
    x = TensorSeq(dim=sig.dim, depth=sig.depth, level0=0.0, levels=sig.levels)
    acc = [lev.copy() for lev in x.levels]
    power = x
    for n in range(2, sig.depth + 1):
        power = _product(power, x)
        coef = (-1.0) ** (n + 1) / n
        for k in range(sig.depth):
            acc[k] = acc[k] + coef * power.levels[k]
    return TensorSeq(dim=sig.dim, depth=sig.depth, level0=0.0, levels=tuple(acc))


def tensor_exp(lie: TensorSeq) -> TensorSeq:
    """Truncated tensor exponential of an element with no scalar part."""
    if lie.level0 != 0.0:
        raise InvalidInputError(
            f"exp requires a Lie element with level0 == 0, got {lie.level0}"
        )
    acc = [np.zeros(lie.dim**k) for k in range(1, lie.depth + 1)]
    power = identity(lie.dim, lie.depth)
    for n in range(1, lie.depth + 1):
        power = _product(power, lie)
        for k in range(lie.depth):
            acc[k] = acc[k] + power.levels[k] / math.factorial(n)
    return TensorSeq(dim=lie.dim, depth=lie.depth, level0=1.0, levels=tuple(acc))


def flat_length(dim: int, depth: int) -> int:
    """Length of the flattened level-1..depth coefficient vector."""
    return sum(dim**k for k in range(1, depth + 1))


def flatten(sig: TensorSeq) -> np.ndarray:
    """Levels 1..depth concatenated in level order (level 0 excluded)."""
    return np.concatenate(sig.levels)


def sig_distance(a: TensorSeq, b: TensorSeq) -> float:
    """Euclidean distance between flattened coefficient vectors."""
    _check_compatible(a, b)
    return float(np.linalg.norm(flatten(a) - flatten(b)))
