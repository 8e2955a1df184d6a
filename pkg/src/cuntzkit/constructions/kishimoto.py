"""Averaged projection with small shift defect in the index-shift model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..levels import ShiftSystem, op_norm

MAX_EXPONENT = 6


@dataclass(frozen=True, eq=False)
class KishimotoResult:
    N: int
    system: ShiftSystem
    E: np.ndarray
    defect: float
    idempotent_defect: float
    selfadjoint_defect: float
    dropped: float

    @property
    def scaled_defect(self) -> float:
        """``defect * 2**((N + 1) / 2)``; stays near a constant."""
        return self.defect * 2 ** ((self.N + 1) / 2)

    @property
    def index_range(self) -> range:
        r = self.system.radius
        return range(-r, r + 1)


def averaged_projection(N: int, system: ShiftSystem) -> np.ndarray:
    """``E = e_00 + sum_l`` of rank-one projections on ``span(e_l, e_{l-M})``.

    With ``M = 2**(N + 1)``, the ``l``-th summand rotates weight from index
    ``l`` (weight ``(M - l)/M``) to index ``l - M`` (weight ``l/M``), so
    ``E`` is a sum of orthogonal rank-one projections.
    """
    M = 2 ** (N + 1)
    unit = system.matrix_unit
    E = unit(0, 0).astype(float)
    for ell in range(1, M):
        a, b = ell, ell - M
        E = E + ((M - ell) / M) * unit(a, a) + (ell / M) * unit(b, b)
        cross = np.sqrt((M - ell) * ell) / M
        E = E + cross * (unit(a, b) + unit(b, a))
    # the (1 - e_00) sandwich is a no-op: no summand touches index 0
    return E


def kishimoto_projection(N: int) -> KishimotoResult:
    """Build ``E`` for exponent ``N`` and measure ``||sigma(E) - E||``."""
    if not 1 <= N <= MAX_EXPONENT:
        raise ValueError(f"N must lie in 1..{MAX_EXPONENT}, got {N}")
    system = ShiftSystem.index(2 ** (N + 1))
    E = averaged_projection(N, system)
    shifted, dropped = system.shift_with_loss(E)
    if dropped > 0:
        raise RuntimeError(f"index translation dropped matrix units (norm {dropped})")
    return KishimotoResult(
        N=N,
        system=system,
        E=E,
        defect=op_norm(shifted - E),
        idempotent_defect=op_norm(E @ E - E),
        selfadjoint_defect=op_norm(E - E.conj().T),
        dropped=dropped,
    )
