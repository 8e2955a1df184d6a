"""Random inputs for tests and experiments; every sampler takes a numpy Generator."""
from __future__ import annotations

import itertools

import numpy as np

from .states import ProductStateSpec
from .words import AlgebraElement, PrefixFreeSet, Word


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def complex_normal(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = complex_normal(rng, dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction."""
    z = complex_normal(rng, (dim, dim)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_index(d: int, length: int, rng: np.random.Generator) -> tuple:
    return tuple(int(i) for i in rng.integers(1, d + 1, size=length))


def random_element(
    d: int,
    rng: np.random.Generator,
    *,
    terms: int = 4,
    max_length: int = 3,
    degree_zero: bool = False,
) -> AlgebraElement:
    """A sum of ``terms`` random words with complex coefficients."""
    out = {}
    for _ in range(terms):
        left = random_index(d, int(rng.integers(0, max_length + 1)), rng)
        if degree_zero:
            right = random_index(d, len(left), rng)
        else:
            right = random_index(d, int(rng.integers(0, max_length + 1)), rng)
        out[Word(left, right)] = complex(complex_normal(rng))
    return AlgebraElement(d, out)


def random_product_state(
    d: int,
    rng: np.random.Generator,
    *,
    sites: int = 4,
    head_level: int = 0,
    gauge_invariant: bool = True,
) -> ProductStateSpec:
    """Random head (possibly entangled) plus ``sites`` random tail vectors."""
    head = unit_vector(d**head_level, rng) if head_level else np.ones(1)
    prefix = tuple(unit_vector(d, rng) for _ in range(sites))
    period = (unit_vector(d, rng),)
    return ProductStateSpec(d, head=head, prefix=prefix, period=period, gauge_invariant=gauge_invariant)


def random_prefix_free(
    d: int, rng: np.random.Generator, *, max_depth: int = 3, max_words: int = 4, proper: bool = False
) -> PrefixFreeSet:
    """A nonempty random antichain built by growing a random prefix tree."""
    while True:
        words = [()]
        for _ in range(int(rng.integers(0, max_depth * (d - 1) + 1))):
            candidates = [w for w in words if len(w) < max_depth]
            if not candidates:
                break
            w = candidates[int(rng.integers(len(candidates)))]
            words.remove(w)
            words.extend(w + (k,) for k in range(1, d + 1))
        size = int(rng.integers(1, min(max_words, len(words)) + 1))
        picked = [words[i] for i in rng.choice(len(words), size=size, replace=False)]
        out = PrefixFreeSet(d, tuple(picked))
        if proper and not len(out.complement()):
            continue
        return out


def random_word_unitary(d: int, rng: np.random.Generator, *, depth: int = 2) -> AlgebraElement:
    """``sum_m c_m s_{Q_m} s_{P_m}*`` pairing two random complete antichains.

    Both antichains come from random refinements to a common size, and each
    pair gets a random phase, so the result is a unitary with mixed degrees.
    """
    def complete(depth_cap: int) -> list:
        words = [()]
        for _ in range(int(rng.integers(1, depth_cap * (d - 1) + 1))):
            candidates = [w for w in words if len(w) < depth_cap]
            if not candidates:
                break
            w = candidates[int(rng.integers(len(candidates)))]
            words.remove(w)
            words.extend(w + (k,) for k in range(1, d + 1))
        return words

    source, target = complete(depth), complete(depth)
    while len(source) != len(target):
        short = source if len(source) < len(target) else target
        w = min(short, key=len)
        short.remove(w)
        short.extend(w + (k,) for k in range(1, d + 1))
    perm = rng.permutation(len(target))
    phases = np.exp(2j * np.pi * rng.random(len(source)))
    return AlgebraElement(
        d, {Word(target[perm[m]], source[m]): phases[m] for m in range(len(source))}
    )


def all_words(d: int, max_total: int):
    """Every word ``(I, J)`` with ``|I| + |J| <= max_total``."""
    for total in range(max_total + 1):
        for k in range(total + 1):
            for left in itertools.product(range(1, d + 1), repeat=k):
                for right in itertools.product(range(1, d + 1), repeat=total - k):
                    yield Word(left, right)
