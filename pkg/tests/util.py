"""Shared test helpers: random streams, independent reference oracles, and
an in-process CLI runner."""

from __future__ import annotations

import io
from contextlib import redirect_stderr, redirect_stdout

import numpy as np

from ordersketch import Stream
from ordersketch.cli import main as cli_main


def four_event_stream() -> Stream:
    """The running example used in docs and worked-example tests."""
    return Stream.from_events([(1.0, 0), (1.5, 1), (1.0, 1), (2.0, 0)], alphabet_size=2)


def random_stream(rng: np.random.Generator, alphabet_size: int, length: int) -> Stream:
    lams = rng.uniform(0.1, 2.0, size=length)
    letters = rng.integers(0, alphabet_size, size=length)
    return Stream(lams, letters, alphabet_size)


def count_subsequences(letters, pattern) -> int:
    """Number of occurrences of ``pattern`` as a (strict) subsequence.

    Standard one-dimensional counting DP; independent of the tensor fold.
    """
    ways = [0] * (len(pattern) + 1)
    ways[0] = 1
    for c in letters:
        for j in range(len(pattern) - 1, -1, -1):
            if pattern[j] == c:
                ways[j + 1] += ways[j]
    return ways[-1]


class PlainCountMin:
    """Classical count-min sketch, written from scratch against the textbook
    definition so the depth-1 reduction test has an independent reference."""

    def __init__(self, hashes):
        self.hashes = list(hashes)
        self.tables = [np.zeros(h.n) for h in self.hashes]

    @staticmethod
    def _bucket(h, x: int) -> int:
        return ((h.a * x + h.b) % h.p) % h.n

    def update(self, weight: float, letter: int) -> None:
        for h, table in zip(self.hashes, self.tables):
            table[self._bucket(h, letter)] += weight

    def query(self, letter: int) -> float:
        return min(
            float(table[self._bucket(h, letter)])
            for h, table in zip(self.hashes, self.tables)
        )


def expand_by_positions(u: tuple, v: tuple, infiltration: bool) -> dict:
    """Word-product coefficients by brute enumeration over position subsets.

    The coefficient of w is the number of pairs (S, T) of position sets with
    S cup T = all positions of w, w restricted to S reads u and to T reads v;
    the shuffle variant additionally requires S and T disjoint.  Each valid
    (S, T) pair determines w outright (letters on the overlap must agree), so
    we enumerate pairs and materialize the words.
    """
    from itertools import combinations

    out: dict = {}
    lo = len(u) + len(v) if not infiltration else max(len(u), len(v))
    for length in range(lo, len(u) + len(v) + 1):
        for s_pos in combinations(range(length), len(u)):
            for t_pos in combinations(range(length), len(v)):
                if len(set(s_pos) | set(t_pos)) != length:
                    continue
                if not infiltration and set(s_pos) & set(t_pos):
                    continue
                w = [None] * length
                for i, a in zip(s_pos, u):
                    w[i] = a
                ok = True
                for i, a in zip(t_pos, v):
                    if w[i] is not None and w[i] != a:
                        ok = False
                        break
                    w[i] = a
                if ok:
                    word = tuple(w)
                    out[word] = out.get(word, 0) + 1
    return out


def run_cli(args) -> tuple:
    """Run the CLI in-process; returns (exit_code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli_main(list(args))
    return code, out.getvalue(), err.getvalue()


def parse_records(stdout: str) -> list:
    import json

    return [json.loads(line) for line in stdout.splitlines() if line]
