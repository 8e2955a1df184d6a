"""Cuntz states, gauge-invariant product states and finite-level diagnostics.

Product states are evaluated as vector states ``x -> <Omega, x Omega>`` (inner
product conjugate-linear in the first slot).  With that convention the
restriction of the Cuntz state ``f_xi`` to UHF_d is the product state whose
site vector is ``conj(xi)``; see :func:`cuntz_restriction`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .levels import LevelMatrix, embed_level, index_of
from .words import (
    AlgebraElement,
    DimensionMismatch,
    apply_endo,
    expect_uhf,
    is_unitary,
)

NORM_TOL = 1e-12


def _unit_vector(v, dim: int | None = None, what: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"{what} has length {v.shape[0]}, expected {dim}")
    if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
        raise ValueError(f"{what} is not a unit vector (norm {np.linalg.norm(v)})")
    return v


@dataclass(frozen=True, eq=False)
class CuntzStateSpec:
    """The Cuntz state ``f_xi`` given by a unit vector ``xi`` in ``C^d``."""

    d: int
    xi: np.ndarray

    def __post_init__(self):
        xi = _unit_vector(self.xi, self.d, "xi")
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def f0(cls, d: int) -> "CuntzStateSpec":
        xi = np.zeros(d)
        xi[0] = 1.0
        return cls(d, xi)


@dataclass(frozen=True, eq=False)
class ProductStateSpec:
    """A pure state on UHF_d that is a product beyond an optional head.

    ``head`` is a unit vector in ``(C^d)^{⊗ head_level}`` (possibly
    entangled).  Site ``k > head_level`` uses ``prefix[k - head_level - 1]``
    while available and then cycles through ``period``.  With
    ``gauge_invariant`` set the state is extended to O_d through the
    conditional expectation.
    """

    d: int
    head: np.ndarray = field(default_factory=lambda: np.ones(1))
    prefix: tuple = ()
    period: tuple = ()
    gauge_invariant: bool = True

    def __post_init__(self):
        d = self.d
        head = np.asarray(self.head, dtype=complex).reshape(-1)
        level = round(np.log(head.shape[0]) / np.log(d)) if head.shape[0] > 1 else 0
        if d**level != head.shape[0]:
            raise DimensionMismatch(f"head length {head.shape[0]} is not a power of {d}")
        head = _unit_vector(head, what="head")
        prefix = tuple(_unit_vector(v, d, "site vector") for v in self.prefix)
        period = tuple(_unit_vector(v, d, "site vector") for v in self.period)
        if not period:
            raise ValueError("tail period must contain at least one site vector")
        for arr in (head, *prefix, *period):
            arr.setflags(write=False)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "_head_level", level)

    @property
    def head_level(self) -> int:
        return self._head_level

    @classmethod
    def constant(cls, xi, d: int | None = None, **kw) -> "ProductStateSpec":
        xi = np.asarray(xi, dtype=complex)
        return cls(d or xi.shape[0], period=(xi,), **kw)

    @classmethod
    def from_sites(cls, sites: Sequence, period: Sequence | None = None, **kw):
        sites = [np.asarray(v, dtype=complex) for v in sites]
        d = sites[0].shape[0]
        return cls(d, prefix=tuple(sites), period=tuple(period or (sites[-1],)), **kw)

    def site_vector(self, k: int) -> np.ndarray:
        """Vector at site ``k`` (1-based, ``k > head_level``)."""
        j = k - self.head_level - 1
        if j < 0:
            raise ValueError(f"site {k} lies inside the head")
        if j < len(self.prefix):
            return self.prefix[j]
        return self.period[(j - len(self.prefix)) % len(self.period)]

    def state_vector(self, n: int) -> np.ndarray:
        """The vector of sites ``1..n`` (requires ``n >= head_level``)."""
        if n < self.head_level:
            raise ValueError(f"level {n} is smaller than the head level {self.head_level}")
        vec = self.head
        for k in range(self.head_level + 1, n + 1):
            vec = np.kron(vec, self.site_vector(k))
        return vec


def cuntz_restriction(s: CuntzStateSpec) -> ProductStateSpec:
    """Product state agreeing with ``f_xi`` on UHF_d (site vector ``conj(xi)``)."""
    return ProductStateSpec(s.d, period=(s.xi.conj(),))


def eval_cuntz(s: CuntzStateSpec, a: AlgebraElement) -> complex:
    """``f_xi(s_I s_J*) = xi_I conj(xi_J)``, extended linearly."""
    if a.d != s.d:
        raise DimensionMismatch(f"state over d={s.d}, element over d={a.d}")
    xi, xic = s.xi, s.xi.conj()
    total = 0j
    for (left, right), c in a.items():
        val = c
        for i in left:
            val *= xi[i - 1]
        for j in right:
            val *= xic[j - 1]
        total += val
    return complex(total)


def _word_value(psi: ProductStateSpec, left: tuple, right: tuple) -> complex:
    d, m = psi.d, psi.head_level
    k = len(left)
    if k <= m:
        block = psi.head.reshape(d**k, d ** (m - k))
        return complex(np.vdot(block[index_of(left, d)], block[index_of(right, d)]))
    head = psi.head
    val = head[index_of(left[:m], d)].conjugate() * head[index_of(right[:m], d)]
    for site in range(m + 1, k + 1):
        v = psi.site_vector(site)
        val *= v[left[site - 1] - 1].conjugate() * v[right[site - 1] - 1]
        if val == 0:
            break
    return complex(val)


def eval_product(psi: ProductStateSpec, a: AlgebraElement) -> complex:
    """Evaluate a product state (extended through the expectation if flagged)."""
    if a.d != psi.d:
        raise DimensionMismatch(f"state over d={psi.d}, element over d={a.d}")
    if psi.gauge_invariant:
        a = expect_uhf(a)
    elif any(g != 0 for g in a.degrees()):
        raise ValueError("state has no gauge-invariant extension; input has nonzero degree")
    return complex(sum(c * _word_value(psi, w.left, w.right) for w, c in a.items()))


def eval_product_matrix(psi: ProductStateSpec, m: LevelMatrix) -> complex:
    """``<Omega, m Omega>`` for a level matrix."""
    vec = psi.state_vector(m.level) if m.level >= psi.head_level else None
    if vec is None:
        raise ValueError("matrix level below the head level")
    return complex(np.vdot(vec, m.data @ vec))


def eval_product_embedded(psi: ProductStateSpec, a: AlgebraElement) -> complex:
    """Reference evaluation through :func:`embed_level` at the smallest level."""
    if psi.gauge_invariant:
        a = expect_uhf(a)
    n = max([psi.head_level] + [len(w.left) for w in a])
    return eval_product_matrix(psi, embed_level(a, n))


def evaluate_state(base, a: AlgebraElement) -> complex:
    if isinstance(base, CuntzStateSpec):
        return eval_cuntz(base, a)
    if isinstance(base, ProductStateSpec):
        return eval_product(base, a)
    if isinstance(base, StateHandle):
        return base.evaluate(a)
    raise TypeError(f"not a state: {type(base).__name__}")


@dataclass(frozen=True, eq=False)
class StateHandle:
    """A base state precomposed with endomorphisms ``alpha_u``.

    ``precompositions = (u_1, ..., u_k)`` denotes ``phi ∘ alpha_{u_1} ∘ ... ∘
    alpha_{u_k}``.  Images are computed only at evaluation time.
    """

    base: CuntzStateSpec | ProductStateSpec
    precompositions: tuple = ()

    @property
    def d(self) -> int:
        return self.base.d

    def evaluate(self, a: AlgebraElement) -> complex:
        for u in reversed(self.precompositions):
            a = apply_endo(u, a)
        return evaluate_state(self.base, a)


def compose_endo(h, u: AlgebraElement, *, verify: bool = False) -> StateHandle:
    """``h ∘ alpha_u``."""
    if not isinstance(h, StateHandle):
        h = StateHandle(h)
    if u.d != h.d:
        raise DimensionMismatch(f"state over d={h.d}, unitary over d={u.d}")
    if verify:
        ok, defect = is_unitary(u)
        if not ok:
            raise ValueError(f"u is not unitary (defect {defect:.3e})")
    return StateHandle(h.base, h.precompositions + (u,))


def disjointness_defect(
    psi1: ProductStateSpec, psi2: ProductStateSpec, shift: int, window: int
) -> float:
    """Finite-window overlap of ``psi1`` with ``psi2 ∘ sigma^shift``.

    Returns ``prod_k |<site_k(psi1), site_{k+shift}(psi2)>|`` over the sites
    ``k`` from just past both heads up to ``window``.  Values shrinking towards
    0 as the window grows indicate disjointness; values near 1 indicate
    equivalence.  This is a diagnostic, not a certificate.
    """
    if psi1.d != psi2.d:
        raise DimensionMismatch("states over different d")
    if shift < 0:
        raise ValueError("shift must be >= 0")
    start = max(psi1.head_level, psi2.head_level - shift) + 1
    if window < start:
        raise ValueError(f"window {window} smaller than head levels (first site {start})")
    out = 1.0
    for k in range(start, window + 1):
        out *= abs(np.vdot(psi1.site_vector(k), psi2.site_vector(k + shift)))
    return float(min(out, 1.0))


def purity_defect_level(psi: ProductStateSpec, n: int) -> float:
    """``1 - lambda_max`` of the reduced density matrix on sites ``1..n``."""
    d, m = psi.d, psi.head_level
    if n >= m:
        return 0.0
    block = psi.head.reshape(d**n, d ** (m - n))
    rho = block @ block.conj().T
    return float(max(0.0, 1.0 - np.linalg.eigvalsh(rho)[-1]))
