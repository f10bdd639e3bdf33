"""Polynomial invariants of the two-particle, three-mode, spin-1/2 sector.

The twelve amplitudes of a sector state split into three 2x2 pair blocks,
one per pair of modes that can jointly hold both particles. All quantities
here are built from those blocks: the pair determinants (concurrence
polynomials), their product I1, the degree-3 alternating polynomial I2, the
three non-negative cross-minor sums attached to the bipartitions, and the
sigma_y-sandwiched word matrix W whose traces generate the same ring.

I2 is evaluated from its explicit degree-3 polynomial; the equivalent trace
form satisfies trace(W) = i * I2 with the conventions fixed below. Both
routes are kept and cross-checked rather than collapsed into one.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
from scipy.linalg import expm

from .operators import GroupElement, apply, element_from_matrices
from .states import SHAPE_321, StateVector, basis_index

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)

_U, _D = 1, 2
_IDX = dict(basis_index(SHAPE_321))


def _slot(state: StateVector, a: int, b: int, c: int) -> complex:
    return state.amplitudes.get((a, b, c), 0j)


def _require_321(state: StateVector) -> None:
    if state.shape != SHAPE_321:
        raise ValueError(f"pair-block invariants need shape (3, 2, 1), got {state.shape}")


@dataclass(frozen=True, eq=False)
class PairBlocks:
    """Amplitude blocks of the three two-mode subspaces, rows and columns
    ordered (up, down)."""

    M_AB: np.ndarray
    M_BC: np.ndarray
    M_AC: np.ndarray


def pair_blocks(state: StateVector) -> PairBlocks:
    """Arrange the twelve amplitudes into the three pair-block matrices."""
    _require_321(state)
    m = state.amplitudes.get
    ab = np.array(
        [
            [m((_U, _U, 0), 0j), m((_U, _D, 0), 0j)],
            [m((_D, _U, 0), 0j), m((_D, _D, 0), 0j)],
        ]
    )
    bc = np.array(
        [
            [m((0, _U, _U), 0j), m((0, _U, _D), 0j)],
            [m((0, _D, _U), 0j), m((0, _D, _D), 0j)],
        ]
    )
    ac = np.array(
        [
            [m((_U, 0, _U), 0j), m((_U, 0, _D), 0j)],
            [m((_D, 0, _U), 0j), m((_D, 0, _D), 0j)],
        ]
    )
    return PairBlocks(M_AB=ab, M_BC=bc, M_AC=ac)


def _det2(m: np.ndarray) -> complex:
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _cross_minor_sum(x: np.ndarray, y: np.ndarray) -> float:
    """Sum of squared moduli of the 2x2 minors mixing a column of x with one of y."""
    total = 0.0
    for i in range(2):
        for j in range(2):
            total += abs(x[0, i] * y[1, j] - x[1, i] * y[0, j]) ** 2
    return total


def word_matrix(blocks: PairBlocks) -> np.ndarray:
    """The 2x2 word W = M_AB sy M_BC sy M_AC^T sy generating the trace invariants."""
    return blocks.M_AB @ SIGMA_Y @ blocks.M_BC @ SIGMA_Y @ blocks.M_AC.T @ SIGMA_Y


def _i2_polynomial(state: StateVector) -> complex:
    m = state.amplitudes.get
    z = 0j
    return complex(
        m((_U, _U, 0), z) * (m((0, _D, _D), z) * m((_D, 0, _U), z) - m((0, _D, _U), z) * m((_D, 0, _D), z))
        + m((_U, _D, 0), z) * (m((0, _U, _U), z) * m((_D, 0, _D), z) - m((0, _U, _D), z) * m((_D, 0, _U), z))
        + m((_D, _U, 0), z) * (m((0, _D, _U), z) * m((_U, 0, _D), z) - m((0, _D, _D), z) * m((_U, 0, _U), z))
        + m((_D, _D, 0), z) * (m((0, _U, _D), z) * m((_U, 0, _U), z) - m((0, _U, _U), z) * m((_U, 0, _D), z))
    )


@dataclass(frozen=True, eq=False)
class InvariantReport:
    """Every polynomial invariant of one state, plus the word matrix W."""

    I_AB: complex
    I_BC: complex
    I_AC: complex
    I1: complex
    I2: complex
    monotone1: float
    monotone2: float
    I_A_BC: float
    I_B_AC: float
    I_C_AB: float
    W: np.ndarray


def invariant_report(state: StateVector) -> InvariantReport:
    """Evaluate all invariants; the input need not be normalized.

    The pair quantities are the block determinants, I1 is their product and
    I2 the explicit alternating polynomial. The bipartition quantities are
    the cross-minor sums, which vanish exactly when the conditional states
    seen from one mode are proportional.
    """
    _require_321(state)
    blocks = pair_blocks(state)
    i_ab = _det2(blocks.M_AB)
    i_bc = _det2(blocks.M_BC)
    i_ac = _det2(blocks.M_AC)
    i1 = i_ab * i_bc * i_ac
    i2 = _i2_polynomial(state)
    return InvariantReport(
        I_AB=i_ab,
        I_BC=i_bc,
        I_AC=i_ac,
        I1=i1,
        I2=i2,
        monotone1=abs(i1) ** (1.0 / 3.0),
        monotone2=abs(i2) ** (2.0 / 3.0),
        I_A_BC=_cross_minor_sum(blocks.M_AB, blocks.M_AC),
        I_B_AC=_cross_minor_sum(blocks.M_AB.T, blocks.M_BC),
        I_C_AB=_cross_minor_sum(blocks.M_AC.T, blocks.M_BC.T),
        W=word_matrix(blocks),
    )


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """A form in the three mode variables, stored as oriented blocks.

    Keys are ordered variable pairs; the block for ``(a, b)`` carries the
    ``a`` index on rows and the ``b`` index on columns. A sector state gives
    the three blocks ``(x, y)``, ``(y, z)``, ``(x, z)``; transvection results
    carry whatever pairs survive.
    """

    blocks: Dict[Tuple[str, str], np.ndarray]

    @classmethod
    def from_state(cls, state: StateVector) -> "BilinearForm":
        b = pair_blocks(state)
        return cls({("x", "y"): b.M_AB, ("y", "z"): b.M_BC, ("x", "z"): b.M_AC})


_VARS = ("x", "y", "z")


def _as_pair(pair: Union[str, Tuple[str, str]]) -> Tuple[str, str]:
    a, b = tuple(pair)
    if a not in _VARS or b not in _VARS or a == b:
        raise ValueError(f"invalid variable pair {pair!r}")
    return a, b


def _oriented(form: BilinearForm, a: str, b: str) -> np.ndarray:
    if (a, b) in form.blocks:
        return form.blocks[(a, b)]
    if (b, a) in form.blocks:
        return form.blocks[(b, a)].T
    raise ValueError(f"form has no block for variable pair ({a}, {b})")


def transvect_double(
    a: BilinearForm, b: BilinearForm, pair: Union[str, Tuple[str, str]]
) -> complex:
    """Fully contract two forms over one variable pair.

    The value is ``trace(A^T sy B sy)`` on the oriented blocks of the pair.
    Contracting a state form with itself over ``(x, y)`` yields twice the
    determinant of the corresponding pair block.
    """
    u, v = _as_pair(pair)
    blk_a = _oriented(a, u, v)
    blk_b = _oriented(b, u, v)
    return complex(np.trace(blk_a.T @ SIGMA_Y @ blk_b @ SIGMA_Y))


def transvect_single(a: BilinearForm, b: BilinearForm, variable: str) -> BilinearForm:
    """Contract two forms over a single variable, leaving a new bilinear form.

    With ``u, w`` the surviving variables (first index from ``a``, second
    from ``b``), the four result blocks are ``A_u^T sy B_w`` where ``A_u`` is
    ``a``'s block oriented with the contracted variable on rows.
    """
    if variable not in _VARS:
        raise ValueError(f"invalid variable {variable!r}")
    rest = tuple(v for v in _VARS if v != variable)
    out: Dict[Tuple[str, str], np.ndarray] = {}
    for u in rest:
        blk_a = _oriented(a, variable, u)
        for w in rest:
            blk_b = _oriented(b, variable, w)
            out[(u, w)] = blk_a.T @ SIGMA_Y @ blk_b
    return BilinearForm(out)


def trace_word(state: StateVector, n: int) -> Tuple[complex, np.ndarray]:
    """Trace of the n-th power of the word matrix, together with W itself."""
    _require_321(state)
    if not 1 <= n <= 8:
        raise ValueError(f"word power must lie in 1..8, got {n}")
    w = word_matrix(pair_blocks(state))
    return complex(np.trace(np.linalg.matrix_power(w, n))), w


def generator_relation_check(state: StateVector, n: int) -> float:
    """Residual of the ring relations tying W to the pair determinants.

    Two families are checked: the entry identity ``G1 K1 = I_AB I_BC I_AC +
    F1 L1`` on the word matrix ``W = [[F1, G1], [K1, L1]]``, and the Newton
    recursion for ``trace(W^k)``, ``k <= n``, seeded by ``trace(W)`` and
    ``det(W)``. Both hold identically, so the residual is pure roundoff.
    """
    _require_321(state)
    rep = invariant_report(state)
    w = rep.W
    f1, g1 = w[0, 0], w[0, 1]
    k1, l1 = w[1, 0], w[1, 1]
    residual = abs(g1 * k1 - (rep.I_AB * rep.I_BC * rep.I_AC + f1 * l1))
    e1 = complex(np.trace(w))
    e2 = complex(np.linalg.det(w))
    p_prev, p_cur = 2.0 + 0j, e1
    residual = max(residual, abs(trace_word(state, 1)[0] - p_cur))
    for k in range(2, max(n, 1) + 1):
        p_prev, p_cur = p_cur, e1 * p_cur - e2 * p_prev
        residual = max(residual, abs(trace_word(state, k)[0] - p_cur))
    return residual


def localized_scenario_check(
    state: StateVector, alpha: float
) -> Tuple[complex, complex]:
    """Empirical scale factors of I_AB and I_AC when one particle is pinned.

    Acts with identity on mode A and ``exp(alpha L8)`` on modes B and C, the
    subgroup available when mode A always holds a particle, and returns the
    multiplicative factors picked up by I_AB and I_AC. For generic states
    both equal ``e^{-2 alpha}``, witnessing that no invariant of the pinned
    scenario exists. Factors are NaN where the input determinant vanishes.
    """
    _require_321(state)
    l8 = np.diag([1.0, 1.0, -2.0]).astype(complex)
    scaled = expm(alpha * l8)
    element: GroupElement = element_from_matrices([np.eye(3, dtype=complex), scaled, scaled])
    moved = apply(element, state)
    before = pair_blocks(state)
    after = pair_blocks(moved)
    out = []
    for pre, post in ((before.M_AB, after.M_AB), (before.M_AC, after.M_AC)):
        d0 = _det2(pre)
        out.append(_det2(post) / d0 if abs(d0) > 0 else complex(cmath.nan))
    return out[0], out[1]


# Dense-batch mirrors of I1 and I2, used by the Monte-Carlo sweeps. V holds
# dense state columns in enumerate_basis order, shape (12,) or (12, k).

_IUU0 = _IDX[(_U, _U, 0)]
_IUD0 = _IDX[(_U, _D, 0)]
_IDU0 = _IDX[(_D, _U, 0)]
_IDD0 = _IDX[(_D, _D, 0)]
_IU0U = _IDX[(_U, 0, _U)]
_IU0D = _IDX[(_U, 0, _D)]
_ID0U = _IDX[(_D, 0, _U)]
_ID0D = _IDX[(_D, 0, _D)]
_I0UU = _IDX[(0, _U, _U)]
_I0UD = _IDX[(0, _U, _D)]
_I0DU = _IDX[(0, _D, _U)]
_I0DD = _IDX[(0, _D, _D)]


def dense_invariant_pair(v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(I1, I2) for a dense column batch; mirrors :func:`invariant_report`."""
    det_ab = v[_IUU0] * v[_IDD0] - v[_IUD0] * v[_IDU0]
    det_bc = v[_I0UU] * v[_I0DD] - v[_I0UD] * v[_I0DU]
    det_ac = v[_IU0U] * v[_ID0D] - v[_IU0D] * v[_ID0U]
    i1 = det_ab * det_bc * det_ac
    i2 = (
        v[_IUU0] * (v[_I0DD] * v[_ID0U] - v[_I0DU] * v[_ID0D])
        + v[_IUD0] * (v[_I0UU] * v[_ID0D] - v[_I0UD] * v[_ID0U])
        + v[_IDU0] * (v[_I0DU] * v[_IU0D] - v[_I0DD] * v[_IU0U])
        + v[_IDD0] * (v[_I0UD] * v[_IU0U] - v[_I0UU] * v[_IU0D])
    )
    return i1, i2
