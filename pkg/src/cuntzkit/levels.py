"""Finite-level matrix realizations of UHF_d and shift models.

Level ``n`` of UHF_d is ``A_n = M_d ⊗ ... ⊗ M_d`` (``n`` factors), realized as
dense ``d**n x d**n`` complex matrices.  Site 1 is the leftmost (most
significant) Kronecker factor, so the word ``s_I s_J*`` with ``|I| = |J| = k``
maps to ``e_{i1 j1} ⊗ ... ⊗ e_{ik jk} ⊗ 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .words import AlgebraElement, DimensionMismatch, Word

MAX_DIMENSION = 4096
PROJ_TOL = 1e-10
SINGULAR_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LevelMatrix:
    """An element of ``A_n`` stored as a dense ``d**n`` square matrix."""

    d: int
    level: int
    data: np.ndarray

    def __post_init__(self):
        if self.d < 2 or self.level < 0:
            raise ValueError("need d >= 2 and level >= 0")
        dim = self.d**self.level
        data = np.array(self.data, dtype=complex)
        if data.ndim == 0:
            data = data.reshape(1, 1)
        if data.shape != (dim, dim):
            raise DimensionMismatch(
                f"level {self.level} over d={self.d} needs {dim}x{dim}, got {data.shape}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.d**self.level

    @property
    def H(self) -> "LevelMatrix":
        return LevelMatrix(self.d, self.level, self.data.conj().T)

    @classmethod
    def identity(cls, d: int, level: int) -> "LevelMatrix":
        return cls(d, level, np.eye(d**level))

    def _peer(self, other: "LevelMatrix") -> np.ndarray:
        if not isinstance(other, LevelMatrix):
            return NotImplemented
        if (other.d, other.level) != (self.d, self.level):
            raise DimensionMismatch("level matrices of different shape")
        return other.data

    def __matmul__(self, other):
        data = self._peer(other)
        if data is NotImplemented:
            return data
        return LevelMatrix(self.d, self.level, self.data @ data)

    def __add__(self, other):
        data = self._peer(other)
        if data is NotImplemented:
            return data
        return LevelMatrix(self.d, self.level, self.data + data)

    def __sub__(self, other):
        data = self._peer(other)
        if data is NotImplemented:
            return data
        return LevelMatrix(self.d, self.level, self.data - data)

    def __mul__(self, c):
        return LevelMatrix(self.d, self.level, self.data * complex(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def tensor(self, other: "LevelMatrix") -> "LevelMatrix":
        if other.d != self.d:
            raise DimensionMismatch("tensor factors over different d")
        return LevelMatrix(self.d, self.level + other.level, np.kron(self.data, other.data))


def index_of(letters: Sequence[int], d: int) -> int:
    """Row index of the multi-index ``letters`` (1-based letters, site 1 first)."""
    out = 0
    for i in letters:
        out = out * d + (i - 1)
    return out


def letters_of(index: int, d: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        index, r = divmod(index, d)
        out.append(r + 1)
    return tuple(reversed(out))


def _check_dim(d: int, n: int) -> None:
    if d**n > MAX_DIMENSION:
        raise ValueError(
            f"level {n} over d={d} exceeds the level cap ({MAX_DIMENSION} rows)"
        )


def embed_level(a: AlgebraElement, n: int) -> LevelMatrix:
    """Matrix of a degree-0 element in ``A_n``."""
    d = a.d
    _check_dim(d, n)
    out = np.zeros((d**n, d**n), dtype=complex)
    for (left, right), c in a.items():
        if len(left) != len(right):
            raise ValueError(f"term s_{left} s_{right}* has nonzero degree")
        k = len(left)
        if k > n:
            raise ValueError(f"word of length {k} does not fit level {n}")
        block = d ** (n - k)
        tail = np.arange(block)
        out[index_of(left, d) * block + tail, index_of(right, d) * block + tail] += c
    return LevelMatrix(d, n, out)


def lift_level(m: LevelMatrix) -> AlgebraElement:
    """Expand a level matrix in matrix units ``s_I s_J*`` with ``|I| = |J| = n``."""
    d, n = m.d, m.level
    rows, cols = np.nonzero(m.data)
    terms = {
        Word(letters_of(r, d, n), letters_of(c, d, n)): complex(m.data[r, c])
        for r, c in zip(rows, cols)
    }
    return AlgebraElement(d, terms, _trusted=True)


def shift_level(m: LevelMatrix) -> LevelMatrix:
    """One-sided shift ``x -> 1 ⊗ x`` from level ``n`` to ``n + 1``."""
    _check_dim(m.d, m.level + 1)
    return LevelMatrix(m.d, m.level + 1, np.kron(np.eye(m.d), m.data))


def op_norm(m: LevelMatrix | np.ndarray) -> float:
    data = m.data if isinstance(m, LevelMatrix) else np.asarray(m)
    if data.size == 0:
        return 0.0
    return float(np.linalg.norm(data, 2))


def unitarity_defect(m: LevelMatrix | np.ndarray) -> float:
    data = m.data if isinstance(m, LevelMatrix) else np.asarray(m)
    eye = np.eye(data.shape[0])
    return max(
        op_norm(data.conj().T @ data - eye), op_norm(data @ data.conj().T - eye)
    )


def projection_defect(m: LevelMatrix | np.ndarray) -> float:
    data = m.data if isinstance(m, LevelMatrix) else np.asarray(m)
    return max(op_norm(data @ data - data), op_norm(data - data.conj().T))


def _polar(data: np.ndarray) -> np.ndarray:
    u, s, vh = np.linalg.svd(data)
    if s[-1] <= SINGULAR_TOL * max(s[0], 1.0):
        raise ValueError(
            f"matrix is (nearly) singular: smallest singular value {s[-1]:.3e}"
        )
    return u @ vh


def polar_unitary(m: LevelMatrix) -> LevelMatrix:
    """Unitary factor ``U`` of ``m = U |m|``; the nearest unitary to ``m``."""
    u = _polar(m.data)
    if unitarity_defect(u) > PROJ_TOL:
        raise RuntimeError("polar factor failed unitarity check")
    eye = np.eye(m.dim)
    gap = op_norm(u - m.data)
    budget = op_norm(m.data.conj().T @ m.data - eye)
    if gap > budget + 1e-12 * max(1.0, op_norm(m)):
        raise RuntimeError(f"polar distance {gap:.3e} exceeds |m*m - 1| = {budget:.3e}")
    return LevelMatrix(m.d, m.level, u)


def support_projection(state, n: int) -> LevelMatrix:
    """Rank-one projection onto the level-``n`` vector of a pure product state."""
    vec = state.state_vector(n)
    return LevelMatrix(state.d, n, np.outer(vec, vec.conj()))


def _range_basis(p: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((p + p.conj().T) / 2)
    keep = vals > 0.5
    vals, vecs = vals[keep], vecs[:, keep]
    cols = []
    for val, vec in zip(vals, vecs.T):
        lead = int(np.flatnonzero(np.abs(vec) > 1e-10)[0])
        vec = vec * (abs(vec[lead]) / vec[lead])
        cols.append((-round(float(val), 8), lead, vec))
    cols.sort(key=lambda t: (t[0], t[1]))
    if not cols:
        return np.zeros((p.shape[0], 0), dtype=complex)
    return np.column_stack([c[2] for c in cols])


def range_basis(p: LevelMatrix | np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the range of a projection, phase-normalized."""
    data = p.data if isinstance(p, LevelMatrix) else np.asarray(p, dtype=complex)
    return _range_basis(data)


def connect_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    for name, x in (("p", p), ("q", q)):
        if projection_defect(x) > PROJ_TOL:
            raise ValueError(f"{name} is not a projection")
    bp, bq = _range_basis(p), _range_basis(q)
    if bp.shape[1] != bq.shape[1]:
        raise ValueError(f"rank mismatch: {bp.shape[1]} vs {bq.shape[1]}")
    return bq @ bp.conj().T


def connect_projections(p: LevelMatrix, q: LevelMatrix) -> LevelMatrix:
    """Partial isometry ``w`` with ``w*w = p`` and ``ww* = q``.

    Range bases come from the spectral decomposition, ordered by eigenvalue
    and then by the position of the first nonzero coordinate, with that
    coordinate made real positive; ``w`` sends the k-th basis vector of ``p``
    to the k-th basis vector of ``q``.
    """
    if (p.d, p.level) != (q.d, q.level):
        raise DimensionMismatch("projections at different levels")
    return LevelMatrix(p.d, p.level, connect_arrays(p.data, q.data))


def _unitary_spectrum(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t, vecs = scipy.linalg.schur(z, output="complex")
    angles = np.angle(np.diag(t))
    # principal branch on (-pi, pi]
    angles = np.where(angles <= -np.pi + 1e-15, np.pi, angles)
    return angles, vecs


def path_arrays(z: np.ndarray, steps: int) -> list[np.ndarray]:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if unitarity_defect(z) > PROJ_TOL:
        raise ValueError("path start is not unitary")
    angles, vecs = _unitary_spectrum(z)
    out = [np.array(z, dtype=complex)]
    for t in range(1, steps):
        phases = np.exp(1j * angles * (1 - t / steps))
        out.append((vecs * phases) @ vecs.conj().T)
    out.append(np.eye(z.shape[0], dtype=complex))
    return out


def unitary_path(z: LevelMatrix, steps: int) -> list[LevelMatrix]:
    """Unitaries ``z_0 = z, ..., z_steps = 1`` with spacing at most ``pi / steps``.

    Eigenphases are taken on the principal branch, so every phase has modulus
    at most ``pi`` and consecutive steps differ by ``2 sin(|theta| / 2 steps)``.
    """
    return [LevelMatrix(z.d, z.level, x) for x in path_arrays(z.data, steps)]


def path_spacing(path: Sequence[LevelMatrix | np.ndarray]) -> float:
    return max((op_norm(_arr(a) - _arr(b)) for a, b in zip(path, path[1:])), default=0.0)


def _arr(x) -> np.ndarray:
    return x.data if isinstance(x, LevelMatrix) else np.asarray(x)


# ---------------------------------------------------------------------------
# shift systems

SHIFT_KINDS = ("uhf-level", "cyclic-model", "index-model")


@dataclass(frozen=True)
class ShiftSystem:
    """Carrier plus a shift-like unital *-endomorphism.

    ``uhf-level``
        level matrices with ``x -> 1 ⊗ x`` (raises the level by one).
    ``cyclic-model``
        ``A_{n + tail}`` with conjugation by ``P ⊗ 1``, where ``P`` cyclically
        permutes the ``p = d**n`` basis vectors of the first ``n`` sites.
        The projections ``e_i = |i><i| ⊗ 1`` form exact towers of period ``p``.
    ``index-model``
        matrices indexed by ``-radius..radius`` with ``e_ij -> e_{i+1, j+1}``;
        units pushed past the edge are dropped and reported.
    """

    kind: str
    d: int = 2
    exponent: int = 0
    tail_level: int = 1
    radius: int = 0
    max_level: int = 12

    def __post_init__(self):
        if self.kind not in SHIFT_KINDS:
            raise ValueError(f"unknown shift system kind {self.kind!r}")
        if self.kind == "cyclic-model":
            if self.exponent < 1 or self.tail_level < 0:
                raise ValueError("cyclic model needs exponent >= 1, tail_level >= 0")
            _check_dim(self.d, self.exponent + self.tail_level)
        if self.kind == "index-model" and self.radius < 1:
            raise ValueError("index model needs radius >= 1")

    @classmethod
    def uhf(cls, d: int = 2, max_level: int = 12) -> "ShiftSystem":
        return cls("uhf-level", d=d, max_level=max_level)

    @classmethod
    def cyclic(cls, d: int, exponent: int, tail_level: int = 1) -> "ShiftSystem":
        return cls("cyclic-model", d=d, exponent=exponent, tail_level=tail_level)

    @classmethod
    def index(cls, radius: int) -> "ShiftSystem":
        return cls("index-model", radius=radius)

    @property
    def period(self) -> int:
        if self.kind != "cyclic-model":
            raise AttributeError("only the cyclic model has a period")
        return self.d**self.exponent

    @property
    def level(self) -> int:
        return self.exponent + self.tail_level

    @property
    def dim(self) -> int:
        if self.kind == "cyclic-model":
            return self.d**self.level
        if self.kind == "index-model":
            return 2 * self.radius + 1
        raise AttributeError("uhf-level carrier has no fixed dimension")

    def permutation(self) -> np.ndarray:
        p = self.period
        cyc = np.roll(np.eye(p), 1, axis=0)  # |i> -> |i+1 mod p>
        return np.kron(cyc, np.eye(self.d**self.tail_level))

    def towers(self) -> list[np.ndarray]:
        """Exact towers ``e_0, ..., e_{p-1}`` of the cyclic model."""
        p, r = self.period, self.d**self.tail_level
        out = []
        for i in range(p):
            e = np.zeros((p, p))
            e[i, i] = 1.0
            out.append(np.kron(e, np.eye(r)))
        return out

    def shift_array(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "cyclic-model":
            perm = self.permutation()
            return perm @ x @ perm.T
        if self.kind == "index-model":
            return self.shift_with_loss(x)[0]
        raise ValueError("use shift() for the uhf-level system")

    def shift(self, x):
        if self.kind == "uhf-level":
            if x.level + 1 > self.max_level:
                raise ValueError("shift exceeds the level cap")
            return shift_level(x)
        if isinstance(x, LevelMatrix):
            return LevelMatrix(x.d, x.level, self.shift_array(x.data))
        return self.shift_array(np.asarray(x))

    def shift_with_loss(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        """Index translation and the norm of the matrix units that fell off."""
        if self.kind != "index-model":
            raise ValueError("only the index model can drop matrix units")
        x = np.asarray(x)
        out = np.zeros_like(x)
        out[1:, 1:] = x[:-1, :-1]
        lost = np.zeros_like(x)
        lost[-1, :] = x[-1, :]
        lost[:, -1] = x[:, -1]
        return out, op_norm(lost)

    def matrix_unit(self, i: int, j: int) -> np.ndarray:
        if self.kind != "index-model":
            raise ValueError("matrix units indexed by integers need the index model")
        if max(abs(i), abs(j)) > self.radius:
            raise IndexError("matrix unit outside the index range")
        out = np.zeros((self.dim, self.dim))
        out[i + self.radius, j + self.radius] = 1.0
        return out
