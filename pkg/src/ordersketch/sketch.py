"""Count-min style sketching of order-aware stream moments.

An `OrderSketch` keeps ``r`` independent feature tensors, each built over a
small bucket alphabet from a hashed copy of the stream.  Querying a word
hashes it letterwise under each table's function and takes the minimum of
the table coordinates.  Because every event weight is nonnegative, hashing
only merges mass: each table coordinate dominates the true coordinate, so

* estimates never underestimate, for every hash draw, and
* with ``bucket_count = ceil(2 / epsilon)`` and ``hash_count =
  ceil(log2(1 / delta))``, the estimate of a word of length m exceeds the
  truth by more than ``epsilon * (l1 mass of exact level m)`` with
  probability below ``delta``.

At depth 1 the table update degenerates to ``table[h(a)] += lam`` per event,
i.e. a classical count-min sketch, bit for bit.

`mine_heavy_patterns` runs the one-pass heavy-pattern search: letters whose
running estimate ever exceeds a threshold ``rho`` are retained, and after
the pass every word over the retained letters (up to the sketch depth) whose
estimate reaches ``rho ** len(word)`` is reported.  Overestimation makes the
survivor set a superset of the words that are truly heavy in that scaled
sense; false positives are controlled by the tail bound above.

Snapshots serialize the full sketch state to a self-describing, versioned
JSON document (table payloads as base64 little-endian float64) and round-trip
bit-exactly.
"""

from __future__ import annotations

import base64
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .features import EventMapKind, apply_event_inplace, features_from_arrays
from .hashing import (
    PRNG_ID,
    AffineHash,
    HashFamilySpec,
    eval_hash,
    eval_hash_array,
    sample_hashes,
)
from .tensor import GradedTensor, Stream, truncated_product, word_index

SNAPSHOT_FORMAT = "order-sketch-snapshot"
SNAPSHOT_VERSION = 1


class CandidateCapError(RuntimeError):
    """Raised when the heavy-pattern candidate set would exceed its cap."""


def table_shape_for(epsilon: float, delta: float) -> tuple[int, int]:
    """(bucket_count, hash_count) for an accuracy/confidence target."""
    if not 0 < epsilon <= 1:
        raise ValueError("need 0 < epsilon <= 1")
    if not 0 < delta < 1:
        raise ValueError("need 0 < delta < 1")
    buckets = math.ceil(2.0 / epsilon)
    hashes = max(1, math.ceil(math.log2(1.0 / delta)))
    return buckets, hashes


@dataclass
class OrderSketch:
    """r hashed feature tables plus the hash draws that define them."""

    epsilon: float
    delta: float
    depth: int
    kind: EventMapKind
    alphabet_size: int
    seed: int
    hashes: list = field(default_factory=list)  # list[AffineHash]
    tables: list = field(default_factory=list)  # list[GradedTensor]
    events_seen: int = 0
    stream_l1: float = 0.0

    @classmethod
    def from_parameters(
        cls,
        epsilon: float,
        delta: float,
        depth: int,
        kind,
        alphabet_size: int,
        seed: int,
    ) -> OrderSketch:
        """Size the tables from (epsilon, delta) and draw the hashes."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if alphabet_size < 1:
            raise ValueError("alphabet_size must be >= 1")
        buckets, hash_count = table_shape_for(epsilon, delta)
        spec = HashFamilySpec(alphabet_size, buckets, seed)
        return cls(
            epsilon=float(epsilon),
            delta=float(delta),
            depth=int(depth),
            kind=EventMapKind(kind),
            alphabet_size=int(alphabet_size),
            seed=int(seed),
            hashes=sample_hashes(spec, hash_count),
            tables=[GradedTensor.unit(buckets, depth) for _ in range(hash_count)],
        )

    @classmethod
    def from_table_shape(
        cls,
        bucket_count: int,
        hash_count: int,
        depth: int,
        kind,
        alphabet_size: int,
        seed: int,
    ) -> OrderSketch:
        """Construct by explicit table shape (diagnostics and sweeps).

        Stores the equivalent epsilon = 2/bucket_count and delta =
        2**-hash_count.  Unlike from_parameters, bucket_count = 1 is allowed.
        """
        if bucket_count < 1 or hash_count < 1:
            raise ValueError("bucket_count and hash_count must be >= 1")
        if depth < 1 or alphabet_size < 1:
            raise ValueError("depth and alphabet_size must be >= 1")
        spec = HashFamilySpec(alphabet_size, bucket_count, seed)
        return cls(
            epsilon=2.0 / bucket_count,
            delta=2.0**-hash_count,
            depth=int(depth),
            kind=EventMapKind(kind),
            alphabet_size=int(alphabet_size),
            seed=int(seed),
            hashes=sample_hashes(spec, hash_count),
            tables=[GradedTensor.unit(bucket_count, depth) for _ in range(hash_count)],
        )

    @classmethod
    def with_hashes(
        cls, hashes: list, depth: int, kind, alphabet_size: int, seed: int = 0
    ) -> OrderSketch:
        """Construct around externally chosen hash functions.

        All hashes must share (p, n).  Useful for forcing identity hashing
        (a=1, b=0, n >= alphabet_size) and for sharing draws with a reference
        implementation.
        """
        if not hashes:
            raise ValueError("need at least one hash")
        if len({(h.p, h.n) for h in hashes}) != 1:
            raise ValueError("hashes must share p and bucket count")
        buckets = hashes[0].n
        return cls(
            epsilon=2.0 / buckets,
            delta=2.0 ** -len(hashes),
            depth=int(depth),
            kind=EventMapKind(kind),
            alphabet_size=int(alphabet_size),
            seed=int(seed),
            hashes=list(hashes),
            tables=[GradedTensor.unit(buckets, depth) for _ in range(len(hashes))],
        )

    # -- size accounting ---------------------------------------------------

    @property
    def bucket_count(self) -> int:
        return self.tables[0].alphabet_size

    @property
    def hash_count(self) -> int:
        return len(self.hashes)

    def coordinate_count(self) -> int:
        """Total stored coordinates across tables, levels 1..depth."""
        per_table = sum(self.bucket_count**m for m in range(1, self.depth + 1))
        return self.hash_count * per_table

    # -- updates -----------------------------------------------------------

    def update(self, lam: float, letter: int) -> None:
        """Feed one event through every table (reference per-event path)."""
        if not 0 <= letter < self.alphabet_size:
            raise ValueError(f"letter {letter} outside alphabet of size {self.alphabet_size}")
        if lam < 0:
            raise ValueError("event weight must be nonnegative")
        for h, table in zip(self.hashes, self.tables):
            apply_event_inplace(table, (lam, eval_hash(h, letter)), self.kind)
        self.events_seen += 1
        self.stream_l1 += float(lam)

    def extend(self, stream: Stream, threads: int = 1) -> None:
        """Feed a whole stream; batch path, table results match `update`
        up to float addition order."""
        if stream.alphabet_size != self.alphabet_size:
            raise ValueError("stream alphabet does not match sketch")

        def build(i: int) -> GradedTensor:
            hashed = eval_hash_array(self.hashes[i], stream.letters)
            part = features_from_arrays(
                stream.lambdas, hashed, self.bucket_count, self.kind, self.depth
            )
            return truncated_product(self.tables[i], part)

        if threads > 1 and self.hash_count > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                self.tables = list(pool.map(build, range(self.hash_count)))
        else:
            self.tables = [build(i) for i in range(self.hash_count)]
        self.events_seen += len(stream)
        self.stream_l1 += stream.total_mass()

    # -- queries -----------------------------------------------------------

    def query(self, word) -> float:
        """Minimum over tables of the hashed-word coordinate.

        Never below the true coordinate of the ingested stream.  Words longer
        than the depth are a hard error.
        """
        word = tuple(int(a) for a in word)
        level, _ = word_index(word, self.alphabet_size)
        if level > self.depth:
            raise ValueError(f"word of length {level} exceeds sketch depth {self.depth}")
        best = math.inf
        for h, table in zip(self.hashes, self.tables):
            _, offset = word_index([eval_hash(h, a) for a in word], self.bucket_count)
            best = min(best, float(table.levels[level][offset]))
        return best

    def letter_estimates(self, letters: np.ndarray) -> np.ndarray:
        """Vectorized level-1 queries for an array of letter ids."""
        letters = np.asarray(letters, dtype=np.int64)
        best = np.full(letters.shape, np.inf)
        for h, table in zip(self.hashes, self.tables):
            np.minimum(best, table.levels[1][eval_hash_array(h, letters)], out=best)
        return best

    def merge(self, other: OrderSketch) -> OrderSketch:
        """Sketch of the concatenated streams (self first, then other).

        Tables multiply levelwise; all parameters including the seed must
        coincide so both sketches share hash draws.
        """
        mine = (
            self.epsilon,
            self.delta,
            self.depth,
            self.kind,
            self.alphabet_size,
            self.seed,
            tuple(self.hashes),
        )
        theirs = (
            other.epsilon,
            other.delta,
            other.depth,
            other.kind,
            other.alphabet_size,
            other.seed,
            tuple(other.hashes),
        )
        if mine != theirs:
            raise ValueError("cannot merge sketches with different parameters or hashes")
        out = OrderSketch(
            epsilon=self.epsilon,
            delta=self.delta,
            depth=self.depth,
            kind=self.kind,
            alphabet_size=self.alphabet_size,
            seed=self.seed,
            hashes=list(self.hashes),
            tables=[truncated_product(a, b) for a, b in zip(self.tables, other.tables)],
            events_seen=self.events_seen + other.events_seen,
            stream_l1=self.stream_l1 + other.stream_l1,
        )
        return out

    # -- persistence ---------------------------------------------------------

    def to_snapshot(self) -> bytes:
        doc = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "prng": PRNG_ID,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "depth": self.depth,
            "event_map": self.kind.value,
            "alphabet_size": self.alphabet_size,
            "seed": self.seed,
            "bucket_count": self.bucket_count,
            "hash_count": self.hash_count,
            "events_seen": self.events_seen,
            "stream_l1": self.stream_l1,
            "hashes": [{"a": h.a, "b": h.b, "p": h.p, "n": h.n} for h in self.hashes],
            "tables": [
                [
                    base64.b64encode(np.ascontiguousarray(level, dtype="<f8").tobytes()).decode(
                        "ascii"
                    )
                    for level in table.levels
                ]
                for table in self.tables
            ],
        }
        return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("ascii")

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_snapshot())

    @classmethod
    def from_snapshot(cls, payload: bytes) -> OrderSketch:
        doc = json.loads(payload.decode("ascii"))
        if doc.get("format") != SNAPSHOT_FORMAT:
            raise ValueError("not a sketch snapshot")
        if doc.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {doc.get('version')!r}")
        hashes = [AffineHash(h["a"], h["b"], h["p"], h["n"]) for h in doc["hashes"]]
        buckets = doc["bucket_count"]
        depth = doc["depth"]
        tables = []
        for levels_b64 in doc["tables"]:
            levels = [
                np.frombuffer(base64.b64decode(blob), dtype="<f8").astype(np.float64).copy()
                for blob in levels_b64
            ]
            tables.append(GradedTensor(buckets, depth, levels))
        return cls(
            epsilon=doc["epsilon"],
            delta=doc["delta"],
            depth=depth,
            kind=EventMapKind(doc["event_map"]),
            alphabet_size=doc["alphabet_size"],
            seed=doc["seed"],
            hashes=hashes,
            tables=tables,
            events_seen=doc["events_seen"],
            stream_l1=doc["stream_l1"],
        )

    @classmethod
    def load(cls, path) -> OrderSketch:
        with open(path, "rb") as fh:
            return cls.from_snapshot(fh.read())


def dense_pullback(sketch: OrderSketch, max_coordinates: int = 2_000_000) -> GradedTensor:
    """Estimates for every word over the original alphabet, as a tensor.

    Builds, per level, the hashed offset of each original word and gathers
    the tablewise minimum.  Refuses alphabets where the dense tensor would
    exceed ``max_coordinates`` entries.
    """
    n = sketch.alphabet_size
    total = sum(n**m for m in range(sketch.depth + 1))
    if total > max_coordinates:
        raise CandidateCapError(
            f"dense pull-back needs {total} coordinates, above the cap of {max_coordinates}"
        )
    out = GradedTensor.zero(n, sketch.depth)
    out.levels[0][0] = 1.0
    buckets = sketch.bucket_count
    for i, (h, table) in enumerate(zip(sketch.hashes, sketch.tables)):
        letter_map = eval_hash_array(h, np.arange(n))
        offsets = np.zeros(1, dtype=np.int64)
        for m in range(1, sketch.depth + 1):
            offsets = (offsets[:, None] * buckets + letter_map[None, :]).reshape(-1)
            gathered = table.levels[m][offsets]
            if i == 0:
                out.levels[m][:] = gathered
            else:
                np.minimum(out.levels[m], gathered, out=out.levels[m])
    return out


@dataclass(frozen=True)
class HeavyPatternResult:
    """Words that survived the threshold filter, with their estimates."""

    threshold: float
    depth: int
    hot_letters: tuple
    estimates: dict  # dict[Word, float]

    @property
    def words(self) -> set:
        return set(self.estimates)


def mine_heavy_patterns(
    stream: Stream,
    thresholds,
    epsilon: float,
    delta: float,
    depth: int,
    kind,
    seed: int,
    candidate_cap: int = 1_000_000,
    chunk_size: int = 1024,
) -> tuple[OrderSketch, dict]:
    """One pass, one sketch, any number of thresholds.

    The stream is ingested in chunks; after each chunk every letter occurring
    in it is tested against each threshold with its current estimate, and
    letters that ever pass stay retained (estimates only grow, so a letter
    hot at its last occurrence is hot at the chunk boundary too).  After the
    pass, words of length 1..depth over the retained letters are enumerated
    per threshold; a threshold whose candidate count would exceed
    ``candidate_cap`` raises :class:`CandidateCapError`.
    """
    rhos = [float(r) for r in thresholds]
    if not rhos:
        raise ValueError("need at least one threshold")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    sketch = OrderSketch.from_parameters(epsilon, delta, depth, kind, stream.alphabet_size, seed)
    hot: dict = {rho: set() for rho in rhos}
    for start in range(0, len(stream), chunk_size):
        chunk = stream.slice(start, start + chunk_size)
        sketch.extend(chunk)
        seen = np.unique(chunk.letters)
        if seen.size == 0:
            continue
        estimates = sketch.letter_estimates(seen)
        for rho in rhos:
            passing = seen[estimates > rho]
            if passing.size:
                hot[rho].update(int(a) for a in passing)

    results = {}
    for rho in rhos:
        letters = tuple(sorted(hot[rho]))
        k = len(letters)
        candidates = sum(k**m for m in range(1, depth + 1))
        if candidates > candidate_cap:
            raise CandidateCapError(
                f"threshold {rho}: {candidates} candidate words exceed the cap of"
                f" {candidate_cap}"
            )
        kept: dict = {}
        words = [()]
        for _ in range(depth):
            words = [w + (a,) for w in words for a in letters]
            for w in words:
                est = sketch.query(w)
                if est >= rho ** len(w):
                    kept[w] = est
        results[rho] = HeavyPatternResult(
            threshold=rho, depth=depth, hot_letters=letters, estimates=kept
        )
    return sketch, results


def heavy_hitter_patterns(
    stream: Stream,
    rho: float,
    epsilon: float,
    delta: float,
    depth: int,
    kind,
    seed: int,
    candidate_cap: int = 1_000_000,
    chunk_size: int = 1024,
) -> HeavyPatternResult:
    """Single-threshold wrapper around :func:`mine_heavy_patterns`."""
    _, results = mine_heavy_patterns(
        stream,
        [rho],
        epsilon,
        delta,
        depth,
        kind,
        seed,
        candidate_cap=candidate_cap,
        chunk_size=chunk_size,
    )
    return results[float(rho)]
