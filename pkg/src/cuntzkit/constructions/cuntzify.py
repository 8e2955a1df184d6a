"""Unitaries ``u`` with ``phi(u s_1) = 1`` for finitely supported pure states."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..levels import LevelMatrix, embed_level, lift_level
from ..states import CuntzStateSpec, ProductStateSpec, evaluate_state
from ..words import (
    AlgebraElement,
    CongruenceError,
    PrefixFreeSet,
    adjoint,
    canonical_endo,
    close,
    cylinder_equivalence,
    is_unitary,
    multiply,
)


def pure_to_cuntz_unitary(e: PrefixFreeSet) -> AlgebraElement:
    """``u = P s_1* + w`` with ``P = proj(e)`` and ``w: 1 - s_1 P s_1* -> 1 - P``.

    ``u s_1 P = P``, so ``phi(u s_1) = 1`` for every state ``phi`` supported
    under ``P``.
    """
    if not len(e):
        raise ValueError("support set is empty")
    d = e.d
    target = e.complement()
    if not len(target):
        raise ValueError("support set covers the whole algebra; need a proper cylinder")
    P = e.projection()
    source = e.prepend(1).complement()
    try:
        w = cylinder_equivalence(source, target)
    except CongruenceError as exc:  # counts always agree mod d - 1
        raise RuntimeError(f"congruence failed for a proper support: {exc}") from exc
    s1 = AlgebraElement.generator(1, d)
    u = multiply(P, adjoint(s1)) + w
    ok, defect = is_unitary(u)
    if not ok:
        raise RuntimeError(f"constructed u is not unitary (defect {defect:.3e})")
    if not close(multiply(multiply(u, s1), P), P):
        raise RuntimeError("u s_1 P differs from P")
    return u


def _site_rotation(x: np.ndarray) -> np.ndarray:
    """Unitary ``g`` with ``g x = e_1``: a phase followed by a Householder reflection."""
    dim = x.shape[0]
    theta = cmath.phase(x[0]) if abs(x[0]) > 0 else 0.0
    y = x * cmath.exp(-1j * theta)
    v = y.copy()
    v[0] -= 1.0
    phase = np.eye(dim, dtype=complex) * cmath.exp(-1j * theta)
    if np.linalg.norm(v) < 1e-15:
        return phase if theta else np.eye(dim, dtype=complex)
    house = np.eye(dim, dtype=complex) - 2 * np.outer(v, v.conj()) / np.vdot(v, v)
    return house @ phase


def align_support(psi: ProductStateSpec, n: int) -> tuple[LevelMatrix, PrefixFreeSet]:
    """Local unitary ``g`` in ``A_n`` rotating the level-``n`` support onto ``(1,...,1)``.

    The head block gets one rotation on its whole space and each tail site its
    own, so ``g`` is a tensor product.  Returns ``g`` and the cylinder
    ``{(1,...,1)}``.
    """
    if n < max(psi.head_level, 1):
        raise ValueError(f"level {n} is below the head level or zero")
    d, m = psi.d, psi.head_level
    g = _site_rotation(psi.head) if m else np.ones((1, 1), dtype=complex)
    for site in range(m + 1, n + 1):
        g = np.kron(g, _site_rotation(psi.site_vector(site)))
    return LevelMatrix(d, n, g), PrefixFreeSet(d, ((1,) * n,))


def cuntz_unitary_for_state(psi: ProductStateSpec, n: int) -> AlgebraElement:
    """``u' = G* u λ(G)`` with ``G = lift(g)``, so ``psi(u' s_1) = 1``."""
    g, e = align_support(psi, n)
    u = pure_to_cuntz_unitary(e)
    G = lift_level(g)
    return multiply(multiply(adjoint(G), u), canonical_endo(G))


@dataclass(frozen=True, eq=False)
class StrengthenResult:
    u1: AlgebraElement
    h: AlgebraElement
    level: int
    m: int
    value: complex
    phase_defect: float
    chord_defect: float

    @property
    def bound(self) -> float:
        """``2 pi 2**-m``."""
        return 2 * np.pi * 2.0 ** (-self.m)


def _check_decreasing(e_seq: Sequence[PrefixFreeSet]) -> None:
    for k, (a, b) in enumerate(zip(e_seq, e_seq[1:]), start=1):
        if not b.is_below(a):
            raise ValueError(f"support sequence increases at position {k + 1}")


def strengthen_unitary(u: AlgebraElement, e_seq: Sequence[PrefixFreeSet], m: int) -> AlgebraElement:
    """``u_1 = exp(2 pi i h_m) u`` with ``h_m = sum_{k <= m} 2**-k proj(e_k)``."""
    return _strengthen(u, e_seq, m)[0]


def _strengthen(u, e_seq, m):
    if m < 0 or m > len(e_seq):
        raise ValueError(f"truncation m={m} outside 0..{len(e_seq)}")
    e_seq = list(e_seq[:m])
    _check_decreasing(e_seq)
    if m == 0:
        return u, AlgebraElement.zero(u.d), 0
    d = u.d
    h = AlgebraElement.zero(d)
    for k, e in enumerate(e_seq, start=1):
        if e.d != d:
            raise ValueError("support sets over a different d")
        h = h + e.projection().scale(2.0**-k)
    level = max(e.depth() for e in e_seq)
    hm = embed_level(h, level).data
    vals, vecs = np.linalg.eigh((hm + hm.conj().T) / 2)
    expo = (vecs * np.exp(2j * np.pi * vals)) @ vecs.conj().T
    phase = lift_level(LevelMatrix(d, level, expo))
    return multiply(phase, u), h, level


def strengthen_report(
    u: AlgebraElement,
    e_seq: Sequence[PrefixFreeSet],
    m: int,
    state: CuntzStateSpec | ProductStateSpec | None = None,
) -> StrengthenResult:
    """Strengthen ``u`` and measure ``phi(u_1 s_1)`` (default ``phi = f_0``).

    ``phase_defect`` is ``|arg phi(u_1 s_1)|`` and halves exactly with each
    extra term of ``h``; ``chord_defect`` is ``|phi(u_1 s_1) - 1|``.
    """
    state = state if state is not None else CuntzStateSpec.f0(u.d)
    u1, h, level = _strengthen(u, e_seq, m)
    value = evaluate_state(state, multiply(u1, AlgebraElement.generator(1, u.d)))
    return StrengthenResult(
        u1=u1,
        h=h,
        level=level,
        m=m,
        value=value,
        phase_defect=abs(cmath.phase(value)),
        chord_defect=abs(value - 1),
    )
