"""Symbolic calculus on words ``s_I s_J*`` in the Cuntz algebra O_d.

Elements of the dense *-subalgebra spanned by words are stored as finite maps
from :class:`Word` to complex coefficients.  Products are reduced with
``s_j* s_i = delta_ij``; the second Cuntz relation ``sum_i s_i s_i* = 1`` is
handled by :func:`canonicalize`, which gives every element a unique
representative so that equality is decidable.

Multi-indices are plain tuples of letters in ``1..d``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from numbers import Number
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

MultiIndex = tuple  # tuple[int, ...]

DROP_TOL = 1e-12
UNIT_TOL = 1e-10


class DimensionMismatch(ValueError):
    """Operands live in Cuntz algebras with different ``d``."""


class CongruenceError(ValueError):
    """Projection counts differ modulo ``d - 1`` (the K_0 obstruction)."""


class Word(NamedTuple):
    """The reduced word ``s_I s_J*``; ``Word((), ())`` is the unit."""

    left: MultiIndex
    right: MultiIndex

    @property
    def degree(self) -> int:
        return len(self.left) - len(self.right)


def _check_index(index: Iterable[int], d: int) -> MultiIndex:
    out = tuple(int(i) for i in index)
    for i in out:
        if not 1 <= i <= d:
            raise ValueError(f"letter {i} out of range 1..{d}")
    return out


def _cleaned(terms: Mapping[Word, complex], tol: float = DROP_TOL) -> dict:
    if not terms:
        return {}
    scale = max(abs(c) for c in terms.values())
    cut = tol * scale
    return {w: c for w, c in terms.items() if abs(c) > cut}


class AlgebraElement:
    """A finite complex combination of reduced words over a fixed ``d``.

    Instances are immutable.  Arithmetic operators are provided for
    convenience (``+``, ``-``, ``*`` with scalars or elements); ``==`` compares
    canonical forms up to the drop tolerance.
    """

    __slots__ = ("d", "_terms", "canonical")

    def __init__(
        self,
        d: int,
        terms: Mapping | Iterable = (),
        *,
        canonical: bool = False,
        _trusted: bool = False,
    ):
        if d < 2:
            raise ValueError("alphabet size d must be >= 2")
        if _trusted:
            merged = dict(terms)
        else:
            items = terms.items() if isinstance(terms, Mapping) else terms
            merged = defaultdict(complex)
            for key, coef in items:
                left, right = key
                word = Word(_check_index(left, d), _check_index(right, d))
                merged[word] += complex(coef)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "_terms", _cleaned(merged))
        object.__setattr__(self, "canonical", canonical)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # construction helpers -------------------------------------------------
    @classmethod
    def unit(cls, d: int) -> "AlgebraElement":
        return cls(d, {Word((), ()): 1.0}, _trusted=True)

    @classmethod
    def zero(cls, d: int) -> "AlgebraElement":
        return cls(d, {}, _trusted=True)

    @classmethod
    def word(
        cls, left: Sequence[int], right: Sequence[int], d: int, coef: complex = 1.0
    ) -> "AlgebraElement":
        return cls(d, {(tuple(left), tuple(right)): coef})

    @classmethod
    def generator(cls, i: int, d: int) -> "AlgebraElement":
        return cls.word((i,), (), d)

    # accessors ------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coefficient(self, left: Sequence[int], right: Sequence[int]) -> complex:
        return self._terms.get(Word(tuple(left), tuple(right)), 0j)

    def degrees(self) -> set[int]:
        return {w.degree for w in self._terms}

    def max_abs_degree(self) -> int:
        return max((abs(g) for g in self.degrees()), default=0)

    def max_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_zero(self, tol: float = DROP_TOL) -> bool:
        return self.max_coefficient() <= tol

    def star(self) -> "AlgebraElement":
        return adjoint(self)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            if other.d != self.d:
                raise DimensionMismatch(f"d={self.d} vs d={other.d}")
            return other
        if isinstance(other, (Number, np.number)):
            return AlgebraElement(self.d, {Word((), ()): complex(other)}, _trusted=True)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = defaultdict(complex, self._terms)
        for w, c in other._terms.items():
            out[w] += c
        return AlgebraElement(self.d, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + other.scale(-1.0)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: complex) -> "AlgebraElement":
        c = complex(c)
        return AlgebraElement(
            self.d, {w: c * v for w, v in self._terms.items()}, _trusted=True
        )

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        if isinstance(other, (Number, np.number)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Number, np.number)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Number, np.number)):
            return self.scale(1.0 / other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, (AlgebraElement, Number, np.number)):
            return NotImplemented
        other = self._coerce(other)
        return close(self, other)

    __hash__ = None

    def __repr__(self) -> str:
        from .parsing import format_element

        return f"AlgebraElement(d={self.d}, {format_element(self, mode='compressed')!r})"


# ---------------------------------------------------------------------------
# products


def _reduce_pair(w1: Word, w2: Word) -> Word | None:
    """Reduce ``s_I1 s_J1* s_I2 s_J2*`` to a single word, or ``None`` for 0."""
    (i1, j1), (i2, j2) = w1, w2
    n = min(len(j1), len(i2))
    if j1[:n] != i2[:n]:
        return None
    if len(i2) >= len(j1):
        return Word(i1 + i2[len(j1):], j2)
    return Word(i1, j2 + j1[len(i2):])


def _same_d(a: AlgebraElement, b: AlgebraElement) -> None:
    if a.d != b.d:
        raise DimensionMismatch(f"d={a.d} vs d={b.d}")


def reduce_word_product(w1: Word, w2: Word, d: int) -> AlgebraElement:
    """Product of two reduced words: either zero or a single word."""
    w1 = Word(_check_index(w1[0], d), _check_index(w1[1], d))
    w2 = Word(_check_index(w2[0], d), _check_index(w2[1], d))
    r = _reduce_pair(w1, w2)
    if r is None:
        return AlgebraElement.zero(d)
    return AlgebraElement(d, {r: 1.0}, _trusted=True)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same_d(a, b)
    out = defaultdict(complex)
    for w1, c1 in a._terms.items():
        for w2, c2 in b._terms.items():
            r = _reduce_pair(w1, w2)
            if r is not None:
                out[r] += c1 * c2
    return AlgebraElement(a.d, out, _trusted=True)


def product(factors: Sequence[AlgebraElement], d: int | None = None) -> AlgebraElement:
    if not factors:
        if d is None:
            raise ValueError("empty product needs d")
        return AlgebraElement.unit(d)
    out = factors[0]
    for f in factors[1:]:
        out = multiply(out, f)
    return out


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(
        a.d,
        {Word(w.right, w.left): c.conjugate() for w, c in a._terms.items()},
        _trusted=True,
    )


# ---------------------------------------------------------------------------
# canonical form


def _expand_to(terms: dict, word: Word, coef: complex, length: int, d: int) -> None:
    extra = length - len(word.right)
    if extra == 0:
        terms[word] += coef
        return
    for k in itertools.product(range(1, d + 1), repeat=extra):
        terms[Word(word.left + k, word.right + k)] += coef


def _family_value(coefs: list, d: int) -> complex:
    # exact copies contract without rounding so that expand/contract round-trips
    ref = coefs[0]
    return ref if all(c == ref for c in coefs) else sum(coefs) / d


def _contract_once(terms: dict, d: int, tol: float) -> dict | None:
    families: dict = {}
    for (left, right), c in terms.items():
        if not left or not right or left[-1] != right[-1]:
            return None
        families.setdefault(Word(left[:-1], right[:-1]), []).append(c)
    out = {}
    for parent, coefs in families.items():
        if len(coefs) != d:
            return None
        ref = coefs[0]
        if any(abs(c - ref) > tol for c in coefs):
            return None
        out[parent] = _family_value(coefs, d)
    return out


def canonicalize(a: AlgebraElement) -> AlgebraElement:
    """Per-degree common-right-length normal form.

    Within each degree class every word is expanded through
    ``s_I s_J* = sum_k s_Ik s_Jk*`` to the longest right-length present, and
    the class is then contracted back while every term belongs to a complete
    sibling family with equal coefficients.  The result is the unique
    representation of the class at the smallest common right-length.
    """
    if a.canonical:
        return a
    d = a.d
    by_degree: dict = defaultdict(dict)
    for w, c in a._terms.items():
        by_degree[w.degree][w] = c
    scale = a.max_coefficient()
    tol = DROP_TOL * scale
    out: dict = {}
    for group in by_degree.values():
        length = max(len(w.right) for w in group)
        expanded = defaultdict(complex)
        for w, c in group.items():
            _expand_to(expanded, w, c, length, d)
        current = {w: c for w, c in expanded.items() if abs(c) > tol}
        while current:
            smaller = _contract_once(current, d, tol)
            if smaller is None:
                break
            current = smaller
        out.update(current)
    return AlgebraElement(d, out, canonical=True, _trusted=True)


def close(a: AlgebraElement, b: AlgebraElement, tol: float = DROP_TOL) -> bool:
    """True when ``a`` and ``b`` agree in canonical form up to ``tol``.

    The tolerance is absolute with a floor relative to the operands' size.
    """
    _same_d(a, b)
    scale = max(1.0, a.max_coefficient(), b.max_coefficient())
    diff = canonicalize(a - b)
    return diff.max_coefficient() <= tol * scale


def compress(a: AlgebraElement) -> AlgebraElement:
    """Display form: greedily fold complete sibling families into parents."""
    d = a.d
    terms = defaultdict(complex, a._terms)
    tol = DROP_TOL * a.max_coefficient()
    changed = True
    while changed:
        changed = False
        parents = {
            Word(left[:-1], right[:-1])
            for left, right in terms
            if left and right and left[-1] == right[-1]
        }
        # deepest families first so that folded parents can fold again
        for parent in sorted(parents, key=lambda w: (-len(w.right), w)):
            kids = [Word(parent.left + (k,), parent.right + (k,)) for k in range(1, d + 1)]
            if not all(k in terms for k in kids):
                continue
            coefs = [terms[k] for k in kids]
            if any(abs(c - coefs[0]) > tol for c in coefs):
                continue
            for k in kids:
                del terms[k]
            terms[parent] += _family_value(coefs, d)
            changed = True
    return AlgebraElement(d, terms, _trusted=True)


# ---------------------------------------------------------------------------
# gauge actions, expectation, endomorphisms


def gauge_rotate(z: complex, a: AlgebraElement) -> AlgebraElement:
    """``tau_z``: multiply each word by ``z**degree``."""
    z = complex(z)
    if abs(abs(z) - 1.0) > UNIT_TOL:
        raise ValueError(f"|z| = {abs(z)} is not 1")
    return AlgebraElement(
        a.d, {w: c * z ** w.degree for w, c in a._terms.items()}, _trusted=True
    )


def _check_unitary_matrix(g: np.ndarray, d: int) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.shape != (d, d):
        raise DimensionMismatch(f"expected {d}x{d} matrix, got {g.shape}")
    if np.abs(g.conj().T @ g - np.eye(d)).max() > UNIT_TOL:
        raise ValueError("matrix is not unitary")
    return g


def unitary_rotate(g: np.ndarray, a: AlgebraElement) -> AlgebraElement:
    """``gamma_g``: the *-automorphism with ``s_i -> sum_j g[j, i] s_j``."""
    d = a.d
    g = _check_unitary_matrix(g, d)
    out = defaultdict(complex)
    letters = range(1, d + 1)
    for (left, right), c in a._terms.items():
        lefts = list(itertools.product(letters, repeat=len(left)))
        rights = list(itertools.product(letters, repeat=len(right)))
        lw = [np.prod([g[k - 1, i - 1] for k, i in zip(K, left)]) for K in lefts]
        rw = [np.conj(np.prod([g[k - 1, j - 1] for k, j in zip(L, right)])) for L in rights]
        for K, x in zip(lefts, lw):
            if x == 0:
                continue
            for L, y in zip(rights, rw):
                if y != 0:
                    out[Word(K, L)] += c * x * y
    return AlgebraElement(d, out, _trusted=True)


def expect_uhf(a: AlgebraElement) -> AlgebraElement:
    """Conditional expectation onto UHF_d: keep the degree-0 part."""
    return AlgebraElement(
        a.d, {w: c for w, c in a._terms.items() if w.degree == 0}, _trusted=True
    )


def canonical_endo(a: AlgebraElement) -> AlgebraElement:
    """``lambda(x) = sum_j s_j x s_j*``."""
    out = {}
    for (left, right), c in a._terms.items():
        for j in range(1, a.d + 1):
            out[Word((j,) + left, (j,) + right)] = c
    return AlgebraElement(a.d, out, _trusted=True)


def is_unitary(a: AlgebraElement, tol: float = DROP_TOL) -> tuple[bool, float]:
    one = AlgebraElement.unit(a.d)
    a_star = adjoint(a)
    defect = max(
        canonicalize(multiply(a_star, a) - one).max_coefficient(),
        canonicalize(multiply(a, a_star) - one).max_coefficient(),
    )
    return defect <= tol, defect


class _EndoImages:
    """Memoized images ``alpha_u(s_I)`` for a fixed unitary ``u``."""

    def __init__(self, u: AlgebraElement):
        self.u = u
        self.d = u.d
        self._cache = {(): AlgebraElement.unit(u.d)}

    def isometry(self, index: MultiIndex) -> AlgebraElement:
        hit = self._cache.get(index)
        if hit is None:
            prefix = self.isometry(index[:-1])
            step = multiply(self.u, AlgebraElement.generator(index[-1], self.d))
            hit = multiply(prefix, step)
            self._cache[index] = hit
        return hit


def apply_endo(
    u: AlgebraElement, a: AlgebraElement, *, verify: bool = False
) -> AlgebraElement:
    """Apply the endomorphism ``alpha_u`` determined by ``alpha_u(s_i) = u s_i``."""
    _same_d(u, a)
    if verify:
        ok, defect = is_unitary(u)
        if not ok:
            raise ValueError(f"u is not unitary (defect {defect:.3e})")
    images = _EndoImages(u)
    out = AlgebraElement.zero(a.d)
    for (left, right), c in a._terms.items():
        term = multiply(images.isometry(left), adjoint(images.isometry(right)))
        out = out + term.scale(c)
    return out


def endo_unitary(
    images: Sequence[AlgebraElement], *, verify: bool = True
) -> AlgebraElement:
    """Unitary ``u = sum_i alpha(s_i) s_i*`` of the endomorphism with given images."""
    if not images:
        raise ValueError("need d images")
    d = images[0].d
    if len(images) != d:
        raise DimensionMismatch(f"expected {d} images, got {len(images)}")
    for im in images:
        _same_d(images[0], im)
    one = AlgebraElement.unit(d)
    if verify:
        for i, j in itertools.product(range(d), repeat=2):
            target = one if i == j else AlgebraElement.zero(d)
            if not close(multiply(adjoint(images[j]), images[i]), target):
                raise ValueError(f"images violate s_{j + 1}* s_{i + 1} = delta")
        total = AlgebraElement.zero(d)
        for im in images:
            total = total + multiply(im, adjoint(im))
        if not close(total, one):
            raise ValueError("images violate sum_i s_i s_i* = 1")
    u = AlgebraElement.zero(d)
    for i, im in enumerate(images, start=1):
        u = u + multiply(im, AlgebraElement.word((), (i,), d))
    return u


def flip_unitary(g: np.ndarray, d: int) -> AlgebraElement:
    """The unitary ``sum_ij g[j, i] s_j s_i*`` in the span F of ``s_i s_j*``.

    ``alpha`` of this unitary is the gauge automorphism ``gamma_g``.
    """
    g = _check_unitary_matrix(g, d)
    return AlgebraElement(
        d,
        {((j, ), (i, )): g[j - 1, i - 1]
         for i in range(1, d + 1) for j in range(1, d + 1)},
    )


# ---------------------------------------------------------------------------
# cylinder projections


@dataclass(frozen=True)
class PrefixFreeSet:
    """A finite antichain of multi-indices.

    Represents the cylinder projection ``sum_I s_I s_I*``.  The empty set is
    the zero projection and ``{()}`` is the unit.
    """

    d: int
    words: tuple

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("alphabet size d must be >= 2")
        cleaned = sorted({_check_index(w, self.d) for w in self.words})
        for a, b in zip(cleaned, cleaned[1:]):
            # sorted order puts each word directly before its extensions
            if b[: len(a)] == a:
                raise ValueError(f"{a} is a prefix of {b}; set is not prefix-free")
        object.__setattr__(self, "words", tuple(cleaned))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def projection(self) -> AlgebraElement:
        return AlgebraElement(
            self.d, {Word(w, w): 1.0 for w in self.words}, _trusted=True
        )

    def depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def children(self, word: MultiIndex) -> tuple:
        return tuple(tuple(word) + (k,) for k in range(1, self.d + 1))

    def refine(self, word: MultiIndex) -> "PrefixFreeSet":
        """Replace ``word`` by its ``d`` children (same projection)."""
        word = tuple(word)
        if word not in self.words:
            raise KeyError(word)
        rest = [w for w in self.words if w != word]
        return PrefixFreeSet(self.d, tuple(rest) + self.children(word))

    def complement(self) -> "PrefixFreeSet":
        """Minimal prefix-free set whose projection is ``1 - self``."""
        members = set(self.words)
        out: list = []

        def walk(prefix: MultiIndex) -> None:
            if prefix in members:
                return
            if not any(w[: len(prefix)] == prefix for w in members):
                out.append(prefix)
                return
            for k in range(1, self.d + 1):
                walk(prefix + (k,))

        walk(())
        return PrefixFreeSet(self.d, tuple(out))

    def prepend(self, letter: int) -> "PrefixFreeSet":
        """Words of ``s_letter P s_letter*``."""
        return PrefixFreeSet(self.d, tuple((letter,) + w for w in self.words))

    def is_below(self, other: "PrefixFreeSet") -> bool:
        """``proj(self) <= proj(other)``: every word extends a word of ``other``."""
        return all(any(w[: len(v)] == v for v in other.words) for w in self.words)


def as_prefix_free(obj, d: int | None = None) -> PrefixFreeSet:
    if isinstance(obj, PrefixFreeSet):
        return obj
    if d is None:
        raise ValueError("d required to build a PrefixFreeSet")
    return PrefixFreeSet(d, tuple(tuple(w) for w in obj))


def _shortlex(word: MultiIndex):
    return (len(word), word)


def refine_to_count(p: PrefixFreeSet, count: int) -> PrefixFreeSet:
    """Refine ``p`` until it has ``count`` words, expanding shortlex-smallest first."""
    d = p.d
    if count < len(p) or (count - len(p)) % (d - 1):
        raise CongruenceError(f"cannot refine {len(p)} words to {count}")
    current = p
    for _ in range((count - len(p)) // (d - 1)):
        current = current.refine(min(current.words, key=_shortlex))
    return current


def cylinder_equivalence(p, q, d: int | None = None) -> AlgebraElement:
    """Partial isometry ``w`` with ``w*w = proj(p)`` and ``ww* = proj(q)``.

    The side with fewer words is refined until the counts match; refined
    word lists are paired in lexicographic order, giving
    ``w = sum_m s_{Q_m} s_{P_m}*``.  Raises :class:`CongruenceError` when the
    counts differ modulo ``d - 1``.
    """
    p = as_prefix_free(p, d)
    q = as_prefix_free(q, d if d is not None else p.d)
    if p.d != q.d:
        raise DimensionMismatch(f"d={p.d} vs d={q.d}")
    d = p.d
    if not len(p) and not len(q):
        return AlgebraElement.zero(d)
    if not len(p) or not len(q):
        raise CongruenceError("a nonzero projection is never equivalent to 0")
    if (len(p) - len(q)) % (d - 1):
        raise CongruenceError(
            f"|p|={len(p)} and |q|={len(q)} differ modulo d-1={d - 1}"
        )
    target = max(len(p), len(q))
    p_ref = refine_to_count(p, target)
    q_ref = refine_to_count(q, target)
    w = AlgebraElement(
        d,
        {Word(qw, pw): 1.0 for pw, qw in zip(sorted(p_ref.words), sorted(q_ref.words))},
        _trusted=True,
    )
    w_star = adjoint(w)
    if not close(multiply(w_star, w), p.projection()) or not close(
        multiply(w, w_star), q.projection()
    ):
        raise RuntimeError("cylinder_equivalence produced a non-partial-isometry")
    return w
