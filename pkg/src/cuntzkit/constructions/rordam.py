"""Approximate one-cocycles ``v`` with ``v ≈ u λ(v)`` from Rohlin towers.

Everything runs in the cyclic model of :class:`ShiftSystem`: the carrier is
``A_{n + t}`` and the shift is ``λ̂ = Ad(P ⊗ 1)`` with ``P`` the cyclic
permutation of period ``p = d**n``.  The towers ``e_i = |i><i| ⊗ 1`` are
exact for ``λ̂``.  Towers ``f_i`` for ``Ad(u) λ̂`` come from grouping the
spectrum of ``W = u (P ⊗ 1)`` into rotated regular ``p``-gons; they are exact
for a nearby unitary ``W'`` and their defect for ``W`` is recorded.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..levels import (
    PROJ_TOL,
    LevelMatrix,
    ShiftSystem,
    _polar,
    connect_arrays,
    embed_level,
    op_norm,
    path_arrays,
    path_spacing,
    projection_defect,
    range_basis,
    unitarity_defect,
)
from ..words import AlgebraElement, DimensionMismatch

CLUSTER_TOL = 1e-8


@dataclass(eq=False)
class RordamData:
    system: ShiftSystem
    period: int
    u: np.ndarray
    towers_e: list
    towers_f: list
    tower_defects_e: list
    tower_defects_f: list
    w: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    path: list
    v: np.ndarray
    achieved: float
    spacing: float
    unitarity_defect: float
    corrections: tuple
    extras: dict = field(default_factory=dict)

    @property
    def bound(self) -> float:
        """The target ``4 / p``."""
        return 4.0 / self.period

    @property
    def tower_defect(self) -> float:
        return max(self.tower_defects_e + self.tower_defects_f)

    @property
    def certificate(self) -> float:
        """Upper bound ``spacing + ||v1 - 1|| + ||v2 - 1||`` on the achieved value."""
        return self.spacing + sum(self.corrections)


def _shift(sys: ShiftSystem, x: np.ndarray) -> np.ndarray:
    return sys.shift_array(x)


def tower_defects(towers, step) -> list[float]:
    p = len(towers)
    return [op_norm(step(towers[i]) - towers[(i + 1) % p]) for i in range(p)]


def check_towers(towers, dim: int) -> None:
    """Raise unless ``towers`` are orthogonal projections summing to 1."""
    total = np.zeros((dim, dim), dtype=complex)
    for i, e in enumerate(towers):
        if e.shape != (dim, dim):
            raise DimensionMismatch(f"tower {i} has shape {e.shape}, carrier is {dim}")
        if projection_defect(e) > PROJ_TOL:
            raise ValueError(f"tower {i} is not a projection")
        total = total + e
    if op_norm(total - np.eye(dim)) > PROJ_TOL:
        raise ValueError("towers do not sum to 1")
    for i in range(len(towers)):
        for j in range(i + 1, len(towers)):
            if op_norm(towers[i] @ towers[j]) > PROJ_TOL:
                raise ValueError(f"towers {i} and {j} are not orthogonal")


def _clusters(phi: np.ndarray) -> list[np.ndarray]:
    """Group circle angles whose neighbours are within ``CLUSTER_TOL``."""
    order = np.argsort(phi)
    groups = [[order[0]]]
    for a, b in zip(order, order[1:]):
        if phi[b] - phi[a] > CLUSTER_TOL:
            groups.append([])
        groups[-1].append(b)
    if len(groups) > 1 and phi[order[0]] + 2 * np.pi - phi[order[-1]] <= CLUSTER_TOL:
        groups[0] = groups.pop() + groups[0]
    return [np.array(g) for g in groups]


def _polygon_order(lam: np.ndarray, p: int) -> np.ndarray:
    """Order eigenvalues so consecutive runs of ``p`` are near ``p``-gons.

    Eigenvalues are sorted by ``arg(lam**p)``; inside a cluster of equal
    ``lam**p`` they are dealt out by polygon vertex so that degenerate
    spectra (such as that of ``P ⊗ 1`` itself) split into whole polygons.
    """
    phi = np.angle(lam**p)
    out = []
    for members in _clusters(phi):
        base = np.angle(np.sum(lam[members] ** p)) / p
        k = np.mod(np.round((np.angle(lam[members]) - base) * p / (2 * np.pi)), p)
        seen: dict = {}
        rank = []
        for kk in k:
            rank.append(seen.get(kk, 0))
            seen[kk] = rank[-1] + 1
        out.extend(members[np.lexsort((k, np.array(rank)))])
    return np.array(out)


def _fit_polygon(lam: np.ndarray, p: int) -> tuple[complex, np.ndarray, float]:
    """Best rotation ``mu`` and vertex labels for ``p`` eigenvalues."""
    omega = np.exp(2j * np.pi * np.arange(p) / p)
    mu = np.exp(1j * np.angle(np.sum(lam**p)) / p)
    cost = np.abs(lam[:, None] - mu * omega[None, :]) ** 2
    _, k = linear_sum_assignment(cost)
    mu = np.sum(lam * omega[k].conj())
    mu = mu / abs(mu) if abs(mu) > 0 else 1.0
    err = float(np.max(np.abs(lam - mu * omega[k])))
    return mu, k, err


def rotated_towers(W: np.ndarray, p: int) -> tuple[list[np.ndarray], float]:
    """Projections ``f_0..f_{p-1}`` cycled exactly by ``Ad(W')`` for ``W' ≈ W``.

    Returns the towers and ``||W - W'||``.
    """
    dim = W.shape[0]
    if dim % p:
        raise ValueError(f"carrier dimension {dim} is not a multiple of the period {p}")
    t, vecs = scipy.linalg.schur(W, output="complex")
    lam = np.diag(t)
    order = _polygon_order(lam, p)
    best = None
    for offset in range(p):
        rolled = np.roll(order, -offset)
        fits = [_fit_polygon(lam[rolled[g : g + p]], p) for g in range(0, dim, p)]
        worst = max(f[2] for f in fits)
        if best is None or worst < best[0] - 1e-15:
            best = (worst, rolled, fits)
    err, rolled, fits = best
    omega = np.exp(2j * np.pi * np.arange(p) / p)
    towers = [np.zeros((dim, dim), dtype=complex) for _ in range(p)]
    for g, (mu, k, _) in zip(range(0, dim, p), fits):
        group = vecs[:, rolled[g : g + p]]
        for i in range(p):
            # W' x_i = mu x_{i+1} with x_i = p^{-1/2} sum_k omega^{ik} v_k
            x = group @ (omega[k] ** i) / np.sqrt(p)
            towers[i] += np.outer(x, x.conj())
    return towers, err


def _carrier_unitary(u, sys: ShiftSystem) -> np.ndarray:
    if isinstance(u, AlgebraElement):
        if u.d != sys.d:
            raise DimensionMismatch(f"unitary over d={u.d}, system over d={sys.d}")
        u = embed_level(u, sys.level)
    if isinstance(u, LevelMatrix):
        if (u.d, u.level) != (sys.d, sys.level):
            raise DimensionMismatch(
                f"unitary at level {u.level} (d={u.d}); carrier is level {sys.level} (d={sys.d})"
            )
        u = u.data
    u = np.asarray(u, dtype=complex)
    if u.shape != (sys.dim, sys.dim):
        raise DimensionMismatch(f"unitary has shape {u.shape}, carrier is {sys.dim}")
    if unitarity_defect(u) > PROJ_TOL:
        raise ValueError("u is not unitary")
    return u


def rordam_v(u, sys: ShiftSystem, n: int | None = None, *, towers=None) -> RordamData:
    """Unitary ``v`` with ``||v - u λ̂(v)||`` of order ``1 / p``.

    With ``T(x) = v2 u λ̂(x) v1*``, the connector ``w: e_0 -> f_0`` and the path
    ``z_0 = w* T^p(w), ..., z_{p-1} = 1`` inside ``e_0``, the output is
    ``v = sum_i T^i(w z_i)``.  ``towers`` may supply ``(e, f)`` explicitly.
    """
    if sys.kind != "cyclic-model":
        raise ValueError(f"{sys.kind} systems carry no exact towers; use the cyclic model")
    if n is not None and n != sys.exponent:
        raise ValueError(f"tower exponent {n} does not match the system ({sys.exponent})")
    p, dim = sys.period, sys.dim
    if p < 2:
        raise ValueError("period must be at least 2")
    U = _carrier_unitary(u, sys)
    W = U @ sys.permutation()

    def step_e(x):
        return _shift(sys, x)

    def step_f(x):
        return U @ _shift(sys, x) @ U.conj().T

    extras: dict = {}
    if towers is None:
        e = sys.towers()
        f, fit = rotated_towers(W, p)
        extras["spectral_fit"] = fit
    else:
        e, f = (list(np.asarray(t, dtype=complex) for t in side) for side in towers)
        if len(e) != p or len(f) != p:
            raise ValueError(f"need {p} projections per tower")
    check_towers(e, dim)
    check_towers(f, dim)
    de, df = tower_defects(e, step_e), tower_defects(f, step_f)
    if max(de + df) >= 1.0:
        raise ValueError(f"tower defect {max(de + df):.3g} is too large to certify a bound")

    v1 = _polar(sum(e[(i + 1) % p] @ step_e(e[i]) for i in range(p)))
    v2 = _polar(sum(f[(i + 1) % p] @ step_f(f[i]) for i in range(p)))
    v1_star = v1.conj().T

    def T(x):
        return v2 @ U @ _shift(sys, x) @ v1_star

    w = connect_arrays(e[0], f[0])
    tw = w
    for _ in range(p):
        tw = T(tw)
    basis = range_basis(e[0])
    z_small = basis.conj().T @ (w.conj().T @ tw) @ basis
    path = path_arrays(z_small, p - 1)
    # Horner form: v = w z_0 + T(w z_1 + T(w z_2 + ...))
    v = np.zeros((dim, dim), dtype=complex)
    for z in reversed(path):
        v = w @ (basis @ z @ basis.conj().T) + T(v)
    achieved = op_norm(v - U @ _shift(sys, v))
    eye = np.eye(dim)
    return RordamData(
        system=sys,
        period=p,
        u=U,
        towers_e=e,
        towers_f=f,
        tower_defects_e=de,
        tower_defects_f=df,
        w=w,
        v1=v1,
        v2=v2,
        path=path,
        v=v,
        achieved=achieved,
        spacing=path_spacing(path),
        unitarity_defect=unitarity_defect(v),
        corrections=(op_norm(v1 - eye), op_norm(v2 - eye)),
        extras=extras,
    )


def sample_compatible_unitary(sys: ShiftSystem, rng: np.random.Generator) -> np.ndarray:
    """Random ``u`` for which ``u (P ⊗ 1)`` has exact ``p``-gon spectrum.

    ``u = g M g* (P ⊗ 1)*`` where ``g`` is Haar on the carrier and ``M`` is the
    block cycle ``block i -> block i+1`` with a Haar twist on the wrap-around
    block.  ``M**p`` is a direct sum of conjugates of the twist, so the
    spectrum of ``M`` splits into rotated ``p``-gons.
    """
    from ..sampling import haar_unitary

    p, r = sys.period, sys.d**sys.tail_level
    M = np.zeros((p * r, p * r), dtype=complex)
    for i in range(p - 1):
        M[(i + 1) * r : (i + 2) * r, i * r : (i + 1) * r] = np.eye(r)
    M[:r, (p - 1) * r :] = haar_unitary(r, rng)
    g = haar_unitary(p * r, rng)
    return g @ M @ g.conj().T @ sys.permutation().T
