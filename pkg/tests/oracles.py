"""Independent reference implementations used to check the library."""
from __future__ import annotations

import itertools
from collections import defaultdict

import numpy as np


def perm_action(terms: dict, x: tuple) -> dict:
    """Permutative representation on sequences: ``s_I s_J*`` sends ``J y`` to ``I y``.

    ``x`` is read as the prefix of a generic infinite sequence, so outputs of
    different lengths never coincide.
    """
    out = defaultdict(complex)
    for (left, right), c in terms.items():
        assert len(x) >= len(right)
        if x[: len(right)] == right:
            out[left + x[len(right):]] += c
    return {k: v for k, v in out.items() if abs(v) > 1e-12}


def perm_compose(a_terms: dict, b_terms: dict, x: tuple) -> dict:
    out = defaultdict(complex)
    for y, c in perm_action(b_terms, x).items():
        for z, c2 in perm_action(a_terms, y).items():
            out[z] += c * c2
    return {k: v for k, v in out.items() if abs(v) > 1e-12}


def same_action(a: dict, b: dict, tol: float = 1e-10) -> bool:
    keys = set(a) | set(b)
    return all(abs(a.get(k, 0) - b.get(k, 0)) <= tol for k in keys)


def strings(d: int, length: int):
    return itertools.product(range(1, d + 1), repeat=length)


def unit_matrix(d: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((d, d))
    m[i - 1, j - 1] = 1.0
    return m


def kron_word(d: int, left: tuple, right: tuple, n: int) -> np.ndarray:
    """``e_{i1 j1} ⊗ ... ⊗ e_{ik jk} ⊗ 1 ⊗ ...`` built factor by factor."""
    out = np.ones((1, 1))
    for i, j in zip(left, right):
        out = np.kron(out, unit_matrix(d, i, j))
    for _ in range(n - len(left)):
        out = np.kron(out, np.eye(d))
    return out


def kron_element(a, n: int) -> np.ndarray:
    out = np.zeros((a.d**n, a.d**n), dtype=complex)
    for (left, right), c in a.items():
        out += c * kron_word(a.d, left, right, n)
    return out


def quadrature_expectation(a, points: int):
    """``(1/m) sum_k tau_{w^k}(a)`` coefficientwise."""
    out = defaultdict(complex)
    omega = np.exp(2j * np.pi / points)
    for (left, right), c in a.items():
        deg = len(left) - len(right)
        out[(left, right)] += c * sum(omega ** (k * deg) for k in range(points)) / points
    return dict(out)


def cuntz_word_value(xi: np.ndarray, left: tuple, right: tuple) -> complex:
    val = 1 + 0j
    for i in left:
        val *= xi[i - 1]
    for j in right:
        val *= np.conj(xi[j - 1])
    return val


def reduce_letters(left1: tuple, right1: tuple, left2: tuple, right2: tuple):
    """Reduce ``s_I1 s_J1* s_I2 s_J2*`` one letter pair at a time.

    Only the relation ``s_j* s_i = delta_ij`` is used.  Returns the reduced
    word ``(I, J)`` or ``None`` when the product vanishes.
    """
    # s_J1* = s_{j_k}* ... s_{j_1}*, so j_1 meets the first letter of I2
    stars = list(right1)
    gens = list(left2)
    while stars and gens:
        if stars.pop(0) != gens.pop(0):
            return None
    # leftover stars s_{j_k}* ... s_{j_m}* combine with s_J2* into (s_J2 s_rest)*
    return tuple(left1) + tuple(gens), tuple(right2) + tuple(stars)


def antichains(d: int, max_depth: int, max_size: int):
    """Every nonempty prefix-free set of at most ``max_size`` words of length <= ``max_depth``."""
    words = [w for n in range(max_depth + 1) for w in itertools.product(range(1, d + 1), repeat=n)]

    def comparable(a, b):
        k = min(len(a), len(b))
        return a[:k] == b[:k]

    def grow(start, chosen):
        if chosen:
            yield tuple(chosen)
        if len(chosen) == max_size:
            return
        for k in range(start, len(words)):
            w = words[k]
            if all(not comparable(w, c) for c in chosen):
                chosen.append(w)
                yield from grow(k + 1, chosen)
                chosen.pop()

    yield from grow(0, [])
