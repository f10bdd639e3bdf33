"""Number-conserving local operators and their action on sector states.

Every operator here acts on a single mode in level-major order (levels first,
vacancy last). An operator is superselection compliant when it never mixes
occupied levels with the vacancy, which makes it block diagonal: a
``(p+1) x (p+1)`` block on the levels and a scalar on the vacancy. Group
elements are per-mode tuples of such operators, applied as a tensor product
restricted to the fixed-particle-number sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from .states import (
    StateVector,
    SystemShape,
    enumerate_basis,
    local_index,
)

#: default tolerance for membership tests (unitarity, unit determinant)
MEMBER_TOL = 1e-10

_L1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
_L2 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
_L3 = np.diag([1.0, -1.0, 0.0]).astype(complex)
_L8 = np.diag([1.0, 1.0, -2.0]).astype(complex)

_GELL_MANN = {1: _L1, 2: _L2, 3: _L3, 8: _L8}


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """A complex matrix on one mode, vacancy indexed last."""

    dim: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(f"entries must be {self.dim}x{self.dim}, got {self.entries.shape}")

    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def is_superselection_compliant(self, tol: float = MEMBER_TOL) -> bool:
        v = self.dim - 1
        return bool(
            np.max(np.abs(self.entries[:v, v])) <= tol
            and np.max(np.abs(self.entries[v, :v])) <= tol
        )

    def is_unitary(self, tol: float = MEMBER_TOL) -> bool:
        defect = self.entries @ self.entries.conj().T - np.eye(self.dim)
        return bool(np.max(np.abs(defect)) <= tol)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """One local operator per mode; the exponent parameters used to build an
    element are construction inputs only and are not retained."""

    per_mode: Tuple[LocalOperator, ...]

    def is_superselection_compliant(self, tol: float = MEMBER_TOL) -> bool:
        return all(op.is_superselection_compliant(tol) for op in self.per_mode)

    def is_unitary(self, tol: float = MEMBER_TOL) -> bool:
        return all(op.is_unitary(tol) for op in self.per_mode)

    def is_special(self, tol: float = MEMBER_TOL) -> bool:
        return all(abs(op.det() - 1.0) <= tol for op in self.per_mode)

    def membership(self, tol: float = MEMBER_TOL) -> str:
        """Coarse tag: ``"SU"``, ``"SLOCC"`` or ``"neither"``."""
        if not self.is_superselection_compliant(tol) or not self.is_special(tol):
            return "neither"
        return "SU" if self.is_unitary(tol) else "SLOCC"


def gell_mann(index: int) -> LocalOperator:
    """One of the four diagonal-block generators on a three-level mode.

    Indices 1, 2, 3 act on the two occupied levels in the Pauli pattern and
    index 8 is the diagonal charge-like generator diag(1, 1, -2).
    """
    if index not in _GELL_MANN:
        raise ValueError(f"unsupported generator index {index}; valid indices are 1, 2, 3, 8")
    return LocalOperator(3, _GELL_MANN[index].copy())


def matrix_exp(op: LocalOperator) -> LocalOperator:
    """Matrix exponential via scaling-and-squaring (scipy's Pade implementation)."""
    if not np.all(np.isfinite(op.entries)):
        raise ValueError("matrix exponential of a non-finite matrix")
    return LocalOperator(op.dim, expm(op.entries))


def element_from_matrices(mats: Sequence[np.ndarray]) -> GroupElement:
    return GroupElement(tuple(LocalOperator(m.shape[0], np.asarray(m, dtype=complex)) for m in mats))


def identity_element(modes: int, dim: int) -> GroupElement:
    return element_from_matrices([np.eye(dim, dtype=complex)] * modes)


def make_slocc_element(coefficients: Sequence[Sequence[complex]]) -> GroupElement:
    """Exponentiate per-mode combinations of the four generators.

    ``coefficients`` holds one ``(c1, c2, c3, c8)`` tuple per mode; each mode
    contributes ``exp(c1 L1 + c2 L2 + c3 L3 + c8 L8)``. The exponents are
    traceless, so every factor has determinant one (verified).
    """
    mats = []
    for k, coeffs in enumerate(coefficients):
        c1, c2, c3, c8 = (complex(c) for c in coeffs)
        if not all(np.isfinite([c.real, c.imag]).all() for c in (c1, c2, c3, c8)):
            raise ValueError(f"non-finite exponent coefficients on mode {k}")
        mats.append(expm(c1 * _L1 + c2 * _L2 + c3 * _L3 + c8 * _L8))
    element = element_from_matrices(mats)
    for k, op in enumerate(element.per_mode):
        if abs(op.det() - 1.0) > 1e-9:
            raise ArithmeticError(f"factor on mode {k} drifted off determinant one")
    return element


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """The element acting as h first, then g."""
    if len(g.per_mode) != len(h.per_mode):
        raise ValueError("cannot compose elements over different mode counts")
    return element_from_matrices(
        [a.entries @ b.entries for a, b in zip(g.per_mode, h.per_mode)]
    )


def apply(element: GroupElement, state: StateVector) -> StateVector:
    """Act with a compliant element on a state; the result is not renormalized.

    Compliance keeps the occupation pattern of every basis vector intact, so
    each amplitude fans out only over the level assignments of its occupied
    modes. That keeps the cost proportional to the sparse support.
    """
    shape = state.shape
    if len(element.per_mode) != shape.modes:
        raise ValueError(
            f"element spans {len(element.per_mode)} modes, state has {shape.modes}"
        )
    for k, op in enumerate(element.per_mode):
        if op.dim != shape.local_dim:
            raise ValueError(f"operator on mode {k} has dim {op.dim}, expected {shape.local_dim}")
        if not op.is_superselection_compliant():
            raise ValueError(f"operator on mode {k} violates the superselection rule")
    p = shape.spin_numerator
    vac = p + 1
    levels = range(1, p + 2)
    out: Dict[Tuple[int, ...], complex] = {}
    for occ, amp in state.amplitudes.items():
        partial = [((), amp)]
        for k, sym in enumerate(occ):
            mat = element.per_mode[k].entries
            grown = []
            if sym == 0:
                w = mat[vac, vac]
                if w != 0:
                    grown = [(pre + (0,), val * w) for pre, val in partial]
            else:
                col = sym - 1
                for lev in levels:
                    w = mat[lev - 1, col]
                    if w != 0:
                        grown.extend((pre + (lev,), val * w) for pre, val in partial)
            partial = grown
            if not partial:
                break
        for new_occ, val in partial:
            out[new_occ] = out.get(new_occ, 0j) + val
    return StateVector(shape, out)


@lru_cache(maxsize=None)
def _index_columns(shape: SystemShape) -> Tuple[np.ndarray, ...]:
    basis = enumerate_basis(shape)
    p = shape.spin_numerator
    return tuple(
        np.array([local_index(occ[k], p) for occ in basis]) for k in range(shape.modes)
    )


def sector_matrix(element: GroupElement, shape: SystemShape) -> np.ndarray:
    """Dense matrix of a compliant element on the sector basis.

    Intended for batch sweeps on small sectors; refuses dimensions past 4096
    where the dense representation stops being reasonable.
    """
    dim = shape.dimension
    if dim > 4096:
        raise ValueError(f"sector dimension {dim} too large for a dense matrix")
    if len(element.per_mode) != shape.modes:
        raise ValueError("element mode count does not match the shape")
    for k, op in enumerate(element.per_mode):
        if not op.is_superselection_compliant():
            raise ValueError(f"operator on mode {k} violates the superselection rule")
    cols = _index_columns(shape)
    mat = np.ones((dim, dim), dtype=complex)
    for op, lk in zip(element.per_mode, cols):
        mat *= op.entries[np.ix_(lk, lk)]
    return mat


def occupation_scaling(r: float, phi: float = 0.0, p: int = 1) -> LocalOperator:
    """Diagonal determinant-one matrix scaling occupied levels against vacancy.

    Every occupied level is multiplied by ``r e^{i phi}`` and the vacancy by
    the compensating ``r^{-(p+1)} e^{-(p+1) i phi}``. Applied on all modes of
    an ``(n, m, p)`` sector state it rescales each amplitude by
    ``r^{(p+2)m - (p+1)n} e^{[(p+2)m - (p+1)n] i phi}``.
    """
    if r <= 0:
        raise ValueError(f"scale must be positive, got {r}")
    head = [r * np.exp(1j * phi)] * (p + 1)
    diag = head + [r ** (-(p + 1)) * np.exp(-1j * (p + 1) * phi)]
    return LocalOperator(p + 2, np.diag(diag).astype(complex))


def level_contraction(alpha: complex, p: int = 1) -> LocalOperator:
    """Diagonal determinant-one matrix that damps level one and the vacancy.

    The diagonal reads ``e^{-(p+1)a}`` on level one, ``e^{(p+3)a}`` on level
    two, ``e^{a}`` on the remaining levels and ``e^{-(p+1)a}`` on the
    vacancy. On states supported on level one and vacancy only it acts as the
    scalar ``e^{-(p+1)a}``, which is a norm change for real ``a`` and a pure
    phase for imaginary ``a``.
    """
    a = complex(alpha)
    diag = (
        [np.exp(-(p + 1) * a), np.exp((p + 3) * a)]
        + [np.exp(a)] * (p - 1)
        + [np.exp(-(p + 1) * a)]
    )
    return LocalOperator(p + 2, np.diag(diag).astype(complex))


def random_element(
    kind: str,
    seed: int,
    spread: float = 0.5,
    modes: int = 3,
) -> GroupElement:
    """Reproducible random group element on three-level modes.

    Generator coefficients are drawn i.i.d. normal with standard deviation
    ``spread`` per real component: fully complex for ``"SLOCC"``, purely
    imaginary for ``"SU"`` (anti-Hermitian exponents give unitaries). The
    distribution is an implementation choice, not a canonical measure.
    """
    if spread <= 0:
        raise ValueError(f"spread must be positive, got {spread}")
    if kind not in ("SLOCC", "SU"):
        raise ValueError(f"unknown element kind {kind!r}")
    rng = np.random.default_rng(seed)
    coeffs = []
    for _ in range(modes):
        imag = 1j * rng.normal(scale=spread, size=4)
        if kind == "SLOCC":
            coeffs.append(rng.normal(scale=spread, size=4) + imag)
        else:
            coeffs.append(imag)
    return make_slocc_element(coeffs)
