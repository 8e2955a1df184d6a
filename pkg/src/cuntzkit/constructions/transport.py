"""Support-swapping unitaries and the block-by-block intertwiner for product states."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..levels import (
    PROJ_TOL,
    LevelMatrix,
    _polar,
    connect_arrays,
    index_of,
    op_norm,
    projection_defect,
)
from ..states import ProductStateSpec, _word_value
from ..words import DimensionMismatch

ORTHOGONALITY_THRESHOLD = 0.1
AGREEMENT_TOL = 1e-8


def _data(x) -> np.ndarray:
    return x.data if isinstance(x, LevelMatrix) else np.asarray(x, dtype=complex)


def swap_input(e1: np.ndarray, e2: np.ndarray, w: np.ndarray) -> np.ndarray:
    """The approximate unitary ``w + (1-e2) w* (1-e1) + (1-e2)(1-e1)``."""
    one = np.eye(e1.shape[0])
    c1, c2 = one - e1, one - e2
    return w + c2 @ w.conj().T @ c1 + c2 @ c1


def swap_residuals(e1, e2, w, v) -> dict:
    """Intertwining and unitarity norms for a swap ``v`` of ``w: e1 -> e2``."""
    e1, e2, w, v = (_data(x) for x in (e1, e2, w, v))
    one = np.eye(e1.shape[0])
    return {
        "overlap": op_norm(e1 @ e2),
        "right_defect": op_norm(v @ e1 - w @ e1),
        "left_defect": op_norm(e2 @ v - e2 @ w),
        "unitarity_defect": max(
            op_norm(v.conj().T @ v - one), op_norm(v @ v.conj().T - one)
        ),
    }


def smooth_swap(e1: LevelMatrix, e2: LevelMatrix, w: LevelMatrix, *, strict: bool = True) -> LevelMatrix:
    """Unitary ``v`` with ``v e1 = w e1`` and ``e2 v = e2 w``.

    ``v`` is the polar part of :func:`swap_input`.  That input ``x`` satisfies
    ``x e1 = w`` and ``e2 x = w``, so ``|x|`` fixes ``e1`` and the polar part
    intertwines exactly whenever ``x`` is invertible.  With ``strict`` the
    supports must be nearly orthogonal (``||e1 e2|| <= 0.1``) unless equal.
    """
    if not (e1.d == e2.d == w.d and e1.level == e2.level == w.level):
        raise DimensionMismatch("swap inputs live at different levels")
    a, b, x = e1.data, e2.data, w.data
    for name, p in (("e1", a), ("e2", b)):
        if projection_defect(p) > PROJ_TOL:
            raise ValueError(f"{name} is not a projection")
    if op_norm(x.conj().T @ x - a) > PROJ_TOL or op_norm(x @ x.conj().T - b) > PROJ_TOL:
        raise ValueError("w is not a partial isometry from e1 onto e2")
    if strict and not np.allclose(a, b, atol=PROJ_TOL):
        overlap = op_norm(a @ b)
        if overlap > ORTHOGONALITY_THRESHOLD:
            raise ValueError(
                f"supports overlap too much: ||e1 e2|| = {overlap:.3g} > {ORTHOGONALITY_THRESHOLD}"
            )
    return LevelMatrix(e1.d, e1.level, _polar(swap_input(a, b, x)))


@dataclass(eq=False)
class BlockMatch:
    """Outcome of :func:`intertwiner_pipeline`.

    ``unitaries[k]`` acts on the sites of block ``k``; ``embedded[k]`` is the
    same unitary placed in its tensor slot at the final level.
    """

    d: int
    boundaries: tuple
    supports1: list
    supports2: list
    shared: list
    unitaries: list
    embedded: list
    residuals: dict = field(default_factory=dict)

    @property
    def level(self) -> int:
        return self.boundaries[-1]

    def total(self) -> np.ndarray:
        """``v_K ... v_1`` at the final level."""
        out = np.eye(self.d**self.level, dtype=complex)
        for v in self.embedded:
            out = v @ out
        return out


def _block_vector(psi: ProductStateSpec, lo: int, hi: int) -> np.ndarray:
    if lo == 0:
        return psi.state_vector(hi)
    vec = np.ones(1, dtype=complex)
    for site in range(lo + 1, hi + 1):
        vec = np.kron(vec, psi.site_vector(site))
    return vec


def evaluation_agreement(psi1: ProductStateSpec, psi2: ProductStateSpec, V: np.ndarray, n: int) -> float:
    """``max |psi1(x) - psi2(V x V*)|`` over all words ``x`` of ``A_n``.

    ``psi1`` is evaluated symbolically word by word and ``psi2`` through the
    level-``n`` matrix ``V``.
    """
    d = psi1.d
    omega = V.conj().T @ psi2.state_vector(n)
    # <omega, (e_IJ ⊗ 1) omega> for every pair of row blocks
    worst = 0.0
    for k in range(n + 1):
        block = omega.reshape(d**k, d ** (n - k))
        gram = block.conj() @ block.T
        for left in itertools.product(range(1, d + 1), repeat=k):
            i = index_of(left, d)
            for right in itertools.product(range(1, d + 1), repeat=k):
                j = index_of(right, d)
                worst = max(worst, abs(_word_value(psi1, left, right) - gram[i, j]))
    return float(worst)


def intertwiner_pipeline(
    psi1: ProductStateSpec,
    psi2: ProductStateSpec,
    blocks: Sequence[int],
    K: int | None = None,
) -> BlockMatch:
    """Unitaries ``v_1, ..., v_K`` in disjoint tensor slots with
    ``Ad(v_K ... v_1)`` carrying the support of ``psi1`` onto that of ``psi2``.

    ``blocks`` lists increasing site boundaries ``n_1 < n_2 < ...``; block
    ``k`` covers sites ``n_{k-1}+1 .. n_k`` (with ``n_0 = 0``).  Heads must fit
    inside the first block.
    """
    if psi1.d != psi2.d:
        raise DimensionMismatch("states over different d")
    d = psi1.d
    bounds = tuple(int(b) for b in blocks)
    if K is not None:
        if not 1 <= K <= len(bounds):
            raise ValueError(f"K={K} outside 1..{len(bounds)}")
        bounds = bounds[:K]
    if not bounds or bounds[0] < 1 or any(b <= a for a, b in zip(bounds, bounds[1:])):
        raise ValueError("block boundaries must be increasing positive levels")
    if max(psi1.head_level, psi2.head_level) > bounds[0]:
        raise ValueError("state is not a product across the first block boundary")
    n = bounds[-1]

    sup1, sup2, shared, local, embedded = [], [], [], [], []
    stage = []
    lo = 0
    for hi in bounds:
        x1, x2 = _block_vector(psi1, lo, hi), _block_vector(psi2, lo, hi)
        e1, e2 = np.outer(x1, x1.conj()), np.outer(x2, x2.conj())
        for e in (e1, e2):
            if abs(np.trace(e).real - 1) > PROJ_TOL:
                raise ValueError("block support is not rank one")
        width = hi - lo
        E1, E2 = LevelMatrix(d, width, e1), LevelMatrix(d, width, e2)
        w = connect_arrays(e1, e2)
        same = bool(np.allclose(e1, e2, atol=1e-12))
        if same:
            v = LevelMatrix.identity(d, width)
        else:
            v = smooth_swap(E1, E2, LevelMatrix(d, width, w), strict=False)
        res = swap_residuals(e1, e2, w, v)
        stage.append(res)
        full = np.kron(np.kron(np.eye(d**lo), v.data), np.eye(d ** (n - hi)))
        sup1.append(E1)
        sup2.append(E2)
        shared.append(same)
        local.append(v)
        embedded.append(full)
        lo = hi

    match = BlockMatch(d, bounds, sup1, sup2, shared, local, embedded)
    V = match.total()
    S1, S2 = (np.outer(p.state_vector(n), p.state_vector(n).conj()) for p in (psi1, psi2))
    commute = all(
        np.array_equal(a @ b, b @ a) for a, b in itertools.combinations(embedded, 2)
    )
    misalignment = [
        op_norm(np.kron(np.eye(d), v) - np.kron(v, np.eye(d))) for v in embedded
    ]
    match.residuals = {
        "support_transport": op_norm(V @ S1 @ V.conj().T - S2),
        "evaluation_agreement": evaluation_agreement(psi1, psi2, V, n),
        "commute_exact": commute,
        "stages": stage,
        "shift_misalignment": misalignment,
    }
    return match
