"""Occupation-sequence basis and state vectors for hard-core mode systems.

A system here consists of ``n`` spatial modes holding ``m`` identical
particles, each particle carrying ``p + 1`` internal levels, with at most one
particle per mode. A mode is therefore a ``(p + 2)``-dimensional site: the
``p + 1`` occupied levels plus the vacancy. Basis vectors are length-``n``
symbol tuples with exactly ``m`` nonzero entries, symbol ``0`` marking an
empty mode and symbol ``k`` (``1 <= k <= p + 1``) the k-th internal level.
For ``p = 1`` the two levels are spin-up (``1``) and spin-down (``2``).

Local matrices act on a mode in level-major order: matrix index ``0 .. p``
is level ``1 .. p + 1`` and the last index is the vacancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

#: amplitudes below this modulus are treated as structurally zero
ZERO_TOL = 1e-12

#: tolerance on norm**2 == 1 for preconditions that require normalized input
NORM_TOL = 1e-9

Occupation = Tuple[int, ...]


@dataclass(frozen=True)
class SystemShape:
    """Mode count, particle count and spin numerator of a sector."""

    modes: int
    particles: int
    spin_numerator: int

    def __post_init__(self) -> None:
        if self.modes < 1:
            raise ValueError(f"need at least one mode, got {self.modes}")
        if not 0 <= self.particles <= self.modes:
            raise ValueError(
                f"particles must lie in 0..modes, got m={self.particles} for n={self.modes}"
            )
        if self.spin_numerator < 0:
            raise ValueError(f"spin numerator must be non-negative, got {self.spin_numerator}")

    @property
    def levels(self) -> int:
        """Number of occupied internal levels per mode, ``p + 1``."""
        return self.spin_numerator + 1

    @property
    def local_dim(self) -> int:
        """Local Hilbert dimension per mode, levels plus vacancy."""
        return self.spin_numerator + 2

    @property
    def dimension(self) -> int:
        """Sector dimension ``C(n, m) * (p + 1)**m``."""
        return math.comb(self.modes, self.particles) * self.levels**self.particles


#: the two-particle, three-mode, spin-1/2 sector used throughout
SHAPE_321 = SystemShape(3, 2, 1)


def local_index(symbol: int, spin_numerator: int) -> int:
    """Map an occupation symbol to its level-major local matrix index."""
    return spin_numerator + 1 if symbol == 0 else symbol - 1


@lru_cache(maxsize=None)
def enumerate_basis(shape: SystemShape) -> Tuple[Occupation, ...]:
    """All admissible occupation sequences of ``shape`` in lexicographic order."""
    n, m, levels = shape.modes, shape.particles, shape.levels
    out: list[Occupation] = []
    prefix: list[int] = []

    def extend(left: int, need: int) -> None:
        if left == 0:
            out.append(tuple(prefix))
            return
        if need < left:
            prefix.append(0)
            extend(left - 1, need)
            prefix.pop()
        if need > 0:
            for sym in range(1, levels + 1):
                prefix.append(sym)
                extend(left - 1, need - 1)
                prefix.pop()

    extend(n, m)
    return tuple(out)


@lru_cache(maxsize=None)
def basis_index(shape: SystemShape) -> Mapping[Occupation, int]:
    """Occupation sequence -> position in :func:`enumerate_basis`."""
    return {occ: i for i, occ in enumerate(enumerate_basis(shape))}


def _check_admissible(shape: SystemShape, occ: Occupation) -> None:
    if len(occ) != shape.modes:
        raise ValueError(f"occupation {occ!r} has {len(occ)} modes, expected {shape.modes}")
    occupied = 0
    for sym in occ:
        if not 0 <= sym <= shape.levels:
            raise ValueError(f"occupation {occ!r} carries symbol {sym} outside 0..{shape.levels}")
        if sym:
            occupied += 1
    if occupied != shape.particles:
        raise ValueError(
            f"occupation {occ!r} holds {occupied} particles, expected {shape.particles}"
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Sparse complex amplitudes over the admissible occupation sequences.

    The amplitude map is owned by the instance after construction and must
    not be mutated by the caller.
    """

    shape: SystemShape
    amplitudes: Dict[Occupation, complex]

    def __post_init__(self) -> None:
        for occ in self.amplitudes:
            _check_admissible(self.shape, occ)

    def amplitude(self, occ: Iterable[int]) -> complex:
        return self.amplitudes.get(tuple(occ), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def dense(self) -> np.ndarray:
        """Dense vector in :func:`enumerate_basis` order."""
        idx = basis_index(self.shape)
        vec = np.zeros(self.shape.dimension, dtype=complex)
        for occ, amp in self.amplitudes.items():
            vec[idx[occ]] = amp
        return vec

    @classmethod
    def from_dense(cls, shape: SystemShape, vec: np.ndarray) -> "StateVector":
        basis = enumerate_basis(shape)
        if len(vec) != len(basis):
            raise ValueError(f"vector length {len(vec)} does not match dimension {len(basis)}")
        return cls(shape, {occ: complex(v) for occ, v in zip(basis, vec) if v != 0})


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A dim x dim complex matrix with the usual state-operator reading."""

    dim: int
    entries: np.ndarray

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


def reduced_density_matrix(state: StateVector, mode: int) -> DensityMatrix:
    """Partial trace of ``|state><state|`` onto one mode, level-major indexed.

    Amplitudes are grouped by the rest-of-system occupation, so the cost is
    quadratic in the group sizes rather than in the sector dimension. The
    state must be normalized.
    """
    shape = state.shape
    if not 0 <= mode < shape.modes:
        raise ValueError(f"mode {mode} out of range for {shape.modes} modes")
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise ValueError("reduced_density_matrix requires a normalized state")
    p = shape.spin_numerator
    d = shape.local_dim
    groups: Dict[Occupation, list] = {}
    for occ, amp in state.amplitudes.items():
        rest = occ[:mode] + occ[mode + 1 :]
        groups.setdefault(rest, []).append((local_index(occ[mode], p), amp))
    rho = np.zeros((d, d), dtype=complex)
    for entries in groups.values():
        for a, za in entries:
            for b, zb in entries:
                rho[a, b] += za * np.conj(zb)
    return DensityMatrix(d, rho)


def is_maximally_entangled(state: StateVector, tol: float = 1e-12) -> bool:
    """True iff every single-mode reduction is within ``tol`` of I/(p+2)."""
    d = state.shape.local_dim
    target = np.eye(d) / d
    for mode in range(state.shape.modes):
        rho = reduced_density_matrix(state, mode)
        if np.max(np.abs(rho.entries - target)) > tol:
            return False
    return True


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Sesquilinear inner product, conjugate-linear in the first argument."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if len(b.amplitudes) < len(a.amplitudes):
        return complex(np.conj(inner_product(b, a)))
    return sum(np.conj(amp) * b.amplitudes[occ] for occ, amp in a.amplitudes.items() if occ in b.amplitudes) + 0j


def normalize(state: StateVector) -> StateVector:
    nrm = state.norm()
    if nrm < ZERO_TOL:
        raise ValueError("cannot normalize a zero state vector")
    return StateVector(state.shape, {occ: amp / nrm for occ, amp in state.amplitudes.items()})


def global_phase_between(a: StateVector, b: StateVector, tol: float = 1e-9) -> complex:
    """The unit complex ``c`` with ``b = c * a``, for phase-equal states.

    The phase is read off the largest-modulus amplitude of ``a`` and then
    validated against the full residual ``||b - c a||``; inputs that are not
    equal up to a global phase raise ``ValueError``.
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    norm_a = a.norm()
    if norm_a < ZERO_TOL:
        raise ValueError("phase between states is undefined for a zero reference state")
    ref = max(a.amplitudes, key=lambda occ: abs(a.amplitudes[occ]))
    ratio = b.amplitude(ref) / a.amplitudes[ref]
    if abs(ratio) < ZERO_TOL:
        raise ValueError("states are not equal up to a global phase")
    c = ratio / abs(ratio)
    keys = set(a.amplitudes) | set(b.amplitudes)
    residual = math.sqrt(sum(abs(b.amplitude(k) - c * a.amplitude(k)) ** 2 for k in keys))
    if residual > tol * max(norm_a, 1.0):
        raise ValueError(f"states are not equal up to a global phase (residual {residual:.3e})")
    return c


def relabel_modes(state: StateVector, perm: Tuple[int, ...]) -> StateVector:
    """Permute mode labels: new mode ``k`` holds what old mode ``perm[k]`` held."""
    n = state.shape.modes
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm!r} is not a permutation of 0..{n - 1}")
    moved = {
        tuple(occ[perm[k]] for k in range(n)): amp for occ, amp in state.amplitudes.items()
    }
    return StateVector(state.shape, moved)


def random_state(shape: SystemShape, rng: np.random.Generator) -> StateVector:
    """Normalized state with i.i.d. complex Gaussian amplitudes on every slot."""
    dim = shape.dimension
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    vec /= np.linalg.norm(vec)
    return StateVector.from_dense(shape, vec)
