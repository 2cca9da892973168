"""Event maps and stream feature tensors.

A stream ``(lam_1, a_1), ..., (lam_L, a_L)`` is folded into a truncated
graded tensor by multiplying one small tensor per event:

* ``linear``: the event tensor is ``1 + lam * a``.  The coordinate of a word
  ``w`` in the product is the weighted count of ``w`` as a subsequence, i.e.
  the sum of ``lam(i_1) * ... * lam(i_m)`` over strictly increasing index
  tuples whose letters spell ``w``.
* ``exp``: the event tensor is ``exp(lam * a)`` truncated at the depth.  The
  coordinate of ``w`` sums over weakly increasing index tuples instead, each
  divided by the product of ``(run length)!`` over maximal runs of equal
  consecutive indices.

`stream_features` is the reference per-event fold.  `features_from_arrays`
is a batch builder with a closed-form fast path for depth <= 2 (the shapes
used by the sketch tables and the experiments); it computes the same values
up to float addition order.  `brute_force_oracle` evaluates single
coordinates straight from the definitions above and shares no code with the
product path, so tests can use it as an independent check.
"""

from __future__ import annotations

import enum
import math
from itertools import combinations, combinations_with_replacement

import numpy as np

from .tensor import Event, GradedTensor, Stream, truncated_product


class EventMapKind(str, enum.Enum):
    LINEAR = "linear"
    EXP = "exp"


def _as_kind(kind) -> EventMapKind:
    return EventMapKind(kind)


def event_polynomial(event: Event, kind, alphabet_size: int, depth: int) -> GradedTensor:
    """The single-event tensor: 1 + lam*a (linear) or truncated exp(lam*a)."""
    kind = _as_kind(kind)
    lam, letter = float(event[0]), int(event[1])
    if not 0 <= letter < alphabet_size:
        raise ValueError(f"letter {letter} outside alphabet of size {alphabet_size}")
    if lam < 0:
        raise ValueError("event weight must be nonnegative")
    out = GradedTensor.unit(alphabet_size, depth)
    top = depth if kind is EventMapKind.EXP else min(1, depth)
    for k in range(1, top + 1):
        # offset of the word letter^k in level k
        rep = sum(letter * alphabet_size**j for j in range(k))
        out.levels[k][rep] = lam**k / math.factorial(k)
    return out


def apply_event_inplace(phi: GradedTensor, event: Event, kind) -> None:
    """Multiply ``phi`` by the event tensor, in place.

    Levels are updated in descending order so that each source level is still
    the pre-event value when read.  Writing into the strided slice
    ``levels[m][rep_k :: n**k]`` adds onto exactly the words whose last k
    letters equal the event letter.  Work is O(sum_{m<M} n^m) for linear and
    O(M * sum_{m<M} n^m) for exp; no full-size temporary is allocated.
    """
    kind = _as_kind(kind)
    lam, letter = float(event[0]), int(event[1])
    n = phi.alphabet_size
    if not 0 <= letter < n:
        raise ValueError(f"letter {letter} outside alphabet of size {n}")
    if lam < 0:
        raise ValueError("event weight must be nonnegative")
    if lam == 0.0:
        return
    top_k = phi.depth if kind is EventMapKind.EXP else 1
    for m in range(phi.depth, 0, -1):
        for k in range(1, min(m, top_k) + 1):
            coeff = lam**k / math.factorial(k)
            rep = sum(letter * n**j for j in range(k))
            step = n**k
            phi.levels[m][rep::step] += coeff * phi.levels[m - k]


def stream_features(stream: Stream, kind, depth: int) -> GradedTensor:
    """Reference fold: apply every event in order to the unit tensor."""
    phi = GradedTensor.unit(stream.alphabet_size, depth)
    for event in stream:
        apply_event_inplace(phi, event, kind)
    return phi


def concat_features(x: GradedTensor, y: GradedTensor) -> GradedTensor:
    """Features of a concatenated stream: the product of the parts' features."""
    return truncated_product(x, y)


_CHUNK = 16384


def features_from_arrays(
    lambdas: np.ndarray,
    letters: np.ndarray,
    alphabet_size: int,
    kind,
    depth: int,
) -> GradedTensor:
    """Batch feature build from weight/letter arrays.

    For depth <= 2 this runs on whole chunks at once: level 1 is a weighted
    bincount and level 2 accumulates ``prefix.T @ W`` per chunk (W holding one
    weighted one-hot row per event), plus a diagonal ``lam**2 / 2`` term for
    the exp map.  Deeper truncations fall back to the per-event fold.
    """
    kind = _as_kind(kind)
    n = int(alphabet_size)
    lam = np.ascontiguousarray(np.asarray(lambdas, dtype=np.float64))
    let = np.ascontiguousarray(np.asarray(letters, dtype=np.int64))
    if depth > 2:
        return stream_features(Stream(lam, let, n), kind, depth)

    phi = GradedTensor.unit(n, depth)
    if depth >= 1:
        phi.levels[1][:] = np.bincount(let, weights=lam, minlength=n)
    if depth == 2:
        level2 = phi.levels[2].reshape(n, n)
        running = np.zeros(n)
        for start in range(0, lam.size, _CHUNK):
            lam_c = lam[start : start + _CHUNK]
            let_c = let[start : start + _CHUNK]
            w = np.zeros((lam_c.size, n))
            w[np.arange(lam_c.size), let_c] = lam_c
            prefix = np.cumsum(w, axis=0) - w  # exclusive prefix within chunk
            chunk_tot = w.sum(axis=0)
            level2 += np.multiply.outer(running, chunk_tot)
            level2 += prefix.T @ w
            running += chunk_tot
        if kind is EventMapKind.EXP:
            diag = np.bincount(let, weights=lam * lam * 0.5, minlength=n)
            level2[np.arange(n), np.arange(n)] += diag
    return phi


def _runs_factorial(indices) -> int:
    # product of (run length)! over maximal runs of equal consecutive indices
    out, run = 1, 1
    for prev, cur in zip(indices, indices[1:]):
        if prev == cur:
            run += 1
        else:
            out *= math.factorial(run)
            run = 1
    return out * math.factorial(run)


def oracle_level(stream: Stream, m: int, kind) -> dict:
    """All nonzero level-m coordinates by direct tuple enumeration.

    Independent of the product path: iterates index tuples with
    ``itertools`` and accumulates weight products per spelled word.  Cost is
    combinatorial in the stream length; intended for small test instances.
    """
    kind = _as_kind(kind)
    if m == 0:
        return {(): 1.0}
    lam = stream.lambdas.tolist()
    let = stream.letters.tolist()
    acc: dict = {}
    if kind is EventMapKind.LINEAR:
        for tup in combinations(range(len(lam)), m):
            word = tuple(let[i] for i in tup)
            acc[word] = acc.get(word, 0.0) + math.prod(lam[i] for i in tup)
    else:
        for tup in combinations_with_replacement(range(len(lam)), m):
            word = tuple(let[i] for i in tup)
            weight = math.prod(lam[i] for i in tup) / _runs_factorial(tup)
            acc[word] = acc.get(word, 0.0) + weight
    return acc


def brute_force_oracle(stream: Stream, word, kind) -> float:
    """Single coordinate by direct enumeration (see :func:`oracle_level`)."""
    word = tuple(int(a) for a in word)
    for a in word:
        if not 0 <= a < stream.alphabet_size:
            raise ValueError(f"letter {a} outside alphabet")
    return oracle_level(stream, len(word), kind).get(word, 0.0)
