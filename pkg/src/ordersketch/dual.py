"""Finite linear combinations of words and their products.

`pairing` evaluates a functional against a feature tensor.  Two graded
products on word combinations mirror the two event maps:

* `shuffle_product` interleaves the factors (positions never shared); it is
  multiplicative for pairings against exp-map features.
* `infiltration_product` also allows matching letters to overlap; it is
  multiplicative for pairings against linear-map features.

Both products are built from the standard word recursions

    au # bv = a (u # bv) + b (au # v)                      (shuffle)
    au # bv = a (u # bv) + b (au # v) + [a == b] a (u # v) (infiltration)

with the empty word as unit, extended bilinearly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .tensor import GradedTensor, Word, word_from_text


@dataclass
class LinearFunctional:
    """A finite map word -> coefficient; zero coefficients are dropped."""

    terms: dict = field(default_factory=dict)  # dict[Word, float]

    def __post_init__(self):
        self.terms = {
            tuple(int(a) for a in w): float(c) for w, c in self.terms.items() if c != 0.0
        }

    @classmethod
    def from_word(cls, word) -> LinearFunctional:
        return cls({tuple(int(a) for a in word): 1.0})

    @classmethod
    def from_text(cls, text: str) -> LinearFunctional:
        return cls.from_word(word_from_text(text))

    def coefficient(self, word) -> float:
        return self.terms.get(tuple(word), 0.0)

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def __add__(self, other: LinearFunctional) -> LinearFunctional:
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0.0) + c
        return LinearFunctional(out)

    def scale(self, c: float) -> LinearFunctional:
        return LinearFunctional({w: c * v for w, v in self.terms.items()})


def pairing(ell: LinearFunctional, phi: GradedTensor) -> float:
    """<ell, phi> = sum of coefficient * coordinate over the terms of ell.

    Raises ValueError if any term is longer than the tensor's depth.
    """
    if ell.max_length() > phi.depth:
        raise ValueError(
            f"functional touches words of length {ell.max_length()}"
            f" beyond depth {phi.depth}"
        )
    return sum(c * phi.coordinate(w) for w, c in ell.terms.items())


@lru_cache(maxsize=None)
def _shuffle_words(u: Word, v: Word) -> tuple:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    acc: dict = {}
    for w, c in _shuffle_words(u[1:], v):
        key = (u[0],) + w
        acc[key] = acc.get(key, 0) + c
    for w, c in _shuffle_words(u, v[1:]):
        key = (v[0],) + w
        acc[key] = acc.get(key, 0) + c
    return tuple(acc.items())


@lru_cache(maxsize=None)
def _infiltration_words(u: Word, v: Word) -> tuple:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    acc: dict = {}
    for w, c in _infiltration_words(u[1:], v):
        key = (u[0],) + w
        acc[key] = acc.get(key, 0) + c
    for w, c in _infiltration_words(u, v[1:]):
        key = (v[0],) + w
        acc[key] = acc.get(key, 0) + c
    if u[0] == v[0]:
        for w, c in _infiltration_words(u[1:], v[1:]):
            key = (u[0],) + w
            acc[key] = acc.get(key, 0) + c
    return tuple(acc.items())


def _bilinear(x: LinearFunctional, y: LinearFunctional, word_product) -> LinearFunctional:
    acc: dict = {}
    for u, cu in x.terms.items():
        for v, cv in y.terms.items():
            for w, k in word_product(u, v):
                acc[w] = acc.get(w, 0.0) + cu * cv * k
    return LinearFunctional(acc)


def shuffle_product(x: LinearFunctional, y: LinearFunctional) -> LinearFunctional:
    """Commutative, associative; integer coefficients on word inputs."""
    return _bilinear(x, y, _shuffle_words)


def infiltration_product(x: LinearFunctional, y: LinearFunctional) -> LinearFunctional:
    """Commutative, associative; term lengths range over
    max(|u|,|v|) .. |u|+|v| for word inputs."""
    return _bilinear(x, y, _infiltration_words)
