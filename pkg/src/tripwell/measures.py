"""Entanglement quantifiers for distinguishable qubits and indistinguishable fermions."""

from __future__ import annotations

import functools
import itertools
from dataclasses import asdict, dataclass
from math import comb, factorial, sqrt
from typing import Optional, Sequence

import numpy as np

from .fock import (
    NotAntisymmetricError,
    PureState,
    SlaterExpansion,
    purity,
    reduced_density,
    to_slater_expansion,
)

NORM_TOL = 1e-9
CLIP_TOL = 1e-10

_SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


@dataclass
class MeasureReport:
    """Measures evaluated on one state; fields that do not apply stay ``None``."""

    c2: Optional[float] = None
    cN: Optional[float] = None
    tangle3: Optional[float] = None
    cNf: Optional[float] = None
    tau_f: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _clip_nonnegative(value: float, what: str) -> float:
    if value < -CLIP_TOL:
        raise ArithmeticError(f"{what} evaluated to {value:.3e} < 0")
    return max(value, 0.0)


def _as_vector(state, dims: Sequence[int] | None) -> tuple[np.ndarray, tuple[int, ...]]:
    if isinstance(state, PureState):
        return state.amplitudes, (state.dim_single,) * state.n_particles
    psi = np.asarray(state, dtype=np.complex128).reshape(-1)
    if dims is None:
        n = int(round(np.log2(psi.size)))
        if 2**n != psi.size:
            raise ValueError("pass dims for non-qubit states")
        dims = (2,) * n
    dims = tuple(int(x) for x in dims)
    if int(np.prod(dims)) != psi.size:
        raise ValueError(f"dims {dims} do not match a vector of length {psi.size}")
    return psi, dims


def _check_normalized(psi: np.ndarray) -> None:
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {np.linalg.norm(psi):.12g})")


def _bipartition(psi: np.ndarray, dims: tuple[int, ...], keep: Sequence[int]) -> np.ndarray:
    keep = list(keep)
    rest = [k for k in range(len(dims)) if k not in keep]
    return np.transpose(psi.reshape(dims), keep + rest).reshape(int(np.prod([dims[k] for k in keep])), -1)


def linear_entropy(mat: np.ndarray) -> float:
    """``1 - Tr rho_A^2`` for the pure state with coefficient matrix ``mat`` (unit norm).

    Evaluated as half the summed squared 2x2 minors (Lagrange identity), so a
    product state gives round-off of order 1e-32 instead of 1e-16.
    """
    t = np.einsum("ij,kl->ijkl", mat, mat)
    return float(0.5 * np.sum(np.abs(t - t.transpose(0, 3, 2, 1)) ** 2))


def concurrence2(state, dims: Sequence[int] | None = None) -> float:
    """Pure-state bipartite concurrence ``sqrt(2 (1 - Tr rho_A^2))``.

    ``state`` is a two-slot :class:`PureState` or a vector with local ``dims``.
    """
    psi, dims = _as_vector(state, dims)
    if len(dims) != 2:
        raise ValueError("concurrence2 needs exactly two parties")
    _check_normalized(psi)
    return sqrt(2.0 * linear_entropy(_bipartition(psi, dims, [0])))


def concurrenceN(state, n_qubits: int | None = None) -> float:
    """Multipartite concurrence of an N-qubit pure state, summing over all proper reductions."""
    psi, dims = _as_vector(state, None if n_qubits is None else (2,) * n_qubits)
    n = len(dims)
    if n < 2:
        raise ValueError("concurrenceN needs at least two qubits")
    if any(d != 2 for d in dims):
        raise ValueError("concurrenceN is defined for qubits")
    _check_normalized(psi)
    inner = 0.0
    for size in range(1, n):
        for keep in itertools.combinations(range(n), size):
            inner += linear_entropy(_bipartition(psi, dims, keep))
    return 2 ** (1 - n / 2) * sqrt(inner)


def wootters_concurrence(rho: np.ndarray | None = None, factor: np.ndarray | None = None) -> float:
    """Two-qubit mixed-state concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are square roots of the eigenvalues of ``rho (sy x sy) rho* (sy x sy)``,
    evaluated as singular values of ``V^T (sy x sy) V`` for ``rho = V V^dagger``.
    Passing ``factor=V`` directly avoids square roots of round-off eigenvalues.
    """
    if factor is None:
        if rho is None:
            raise TypeError("need rho or factor")
        w, vecs = np.linalg.eigh(np.asarray(rho, dtype=np.complex128))
        factor = vecs * np.sqrt(np.clip(w, 0.0, None))
    factor = np.asarray(factor, dtype=np.complex128)
    if factor.shape[0] != 4:
        raise ValueError("two-qubit states only")
    lam = np.linalg.svd(factor.T @ _SIGMA_YY @ factor, compute_uv=False)
    lam = np.sort(np.concatenate([lam, np.zeros(max(0, 4 - lam.size))]))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def _pair_factor(psi: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    """Columns ``<c|psi>`` over the traced qubit: ``rho_pair = V V^dagger``."""
    other = ({0, 1, 2} - set(pair)).pop()
    return np.transpose(psi.reshape(2, 2, 2), list(pair) + [other]).reshape(4, 2)


def hyperdeterminant_tangle(state) -> float:
    """3-tangle as ``4 |Det|`` with Det Cayley's hyperdeterminant of the amplitudes."""
    psi, dims = _as_vector(state, (2, 2, 2))
    a = psi.reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return float(4 * abs(d1 - 2 * d2 + 4 * d3))


def tangle3(state, cross_check: bool = True) -> float:
    """Residual three-way entanglement ``tau_A(BC) - tau_AB - tau_AC`` of a 3-qubit pure state.

    With ``cross_check`` the result is compared against :func:`hyperdeterminant_tangle`
    and a disagreement above 1e-9 raises ``ArithmeticError``.
    """
    psi, dims = _as_vector(state, None)
    if dims != (2, 2, 2):
        raise ValueError(f"tangle3 needs three qubits, got local dimensions {dims}")
    _check_normalized(psi)
    tau_a_bc = 2.0 * linear_entropy(_bipartition(psi, dims, [0]))
    tau_ab = wootters_concurrence(factor=_pair_factor(psi, (0, 1))) ** 2
    tau_ac = wootters_concurrence(factor=_pair_factor(psi, (0, 2))) ** 2
    tau = _clip_nonnegative(tau_a_bc - tau_ab - tau_ac, "3-tangle")
    tau = min(tau, 1.0)
    if cross_check:
        other = hyperdeterminant_tangle(psi)
        if abs(tau - other) > 1e-9:
            raise ArithmeticError(f"3-tangle {tau!r} disagrees with hyperdeterminant {other!r}")
    return tau


def alpha_n(n: int, d: int) -> float:
    """Normalization constant of the fermionic concurrence."""
    denom = n - 1 - sum(comb(n, k) / comb(d, min(k, n - k)) for k in range(1, n))
    return 1.0 / denom


@functools.lru_cache(maxsize=None)
def _plucker_tables(n: int, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index tables for the quadratic Plucker relations over ordered label sets.

    One relation per pair ``(I, J)``, ``|I| = n - 1`` and ``|J| = n + 1`` (both
    increasing): ``sum_l (-1)^l P[I + j_l] P[J - j_l]``.
    """
    first, second, signs = [], [], []
    for i_set in itertools.combinations(range(d), n - 1):
        for j_set in itertools.combinations(range(d), n + 1):
            first.append([i_set + (j,) for j in j_set])
            second.append([j_set[:l] + j_set[l + 1 :] for l in range(n + 1)])
            signs.append([(-1) ** l for l in range(n + 1)])
    return np.array(first), np.array(second), np.array(signs, dtype=float)


def plucker_defect(state: PureState) -> float:
    """``Tr(g - g^2)`` for the one-body density ``g`` (trace N) of a normalized state.

    Zero exactly on Slater determinants.  Equal to the summed squared quadratic
    Plucker relations of the coefficient tensor over ordered label sets; each
    relation is quadratic in the amplitudes, so the defect carries no
    cancellation of the kind in ``N - Tr g^2``.
    """
    n, d = state.n_particles, state.dim_single
    if n not in (2, 3):
        raise ValueError("plucker_defect supports N = 2 or 3")
    p = state.tensor * sqrt(factorial(n))
    first, second, signs = _plucker_tables(n, d)
    lhs = p[tuple(np.moveaxis(first, -1, 0))]
    rhs = p[tuple(np.moveaxis(second, -1, 0))]
    rel = np.sum(signs * lhs * rhs, axis=1)
    return float(np.sum(np.abs(rel) ** 2))


def fermionic_concurrence(state: PureState, method: str = "plucker") -> float:
    """Multipartite fermionic concurrence of an antisymmetric pure state (N = 2 or 3).

    ``method`` selects how the purities entering the formula are obtained:

    ``"rho1"``
        ``Tr rho_1^2`` from the one-body reduction, with ``Tr rho_2^2 = Tr rho_1^2``
        for three fermions (complementary reductions of a pure state).
    ``"rho2"``
        ``Tr rho_2^2`` from the explicit two-body reduction.
    ``"plucker"``
        Same quantity rewritten through :func:`plucker_defect`.  For N <= 3 the
        bracket equals ``N - 1 - (2^N - 2)(N - X)/N^2`` with ``X = Tr(g - g^2)``,
        whose constant part cancels analytically.  This is the default because it
        returns ~1e-16 rather than ~1e-8 on Slater determinants.
    """
    n, d = state.n_particles, state.dim_single
    if n not in (2, 3):
        raise ValueError("fermionic_concurrence supports N = 2 or 3")
    if not state.is_antisymmetric():
        raise NotAntisymmetricError("fermionic_concurrence needs an antisymmetric state")
    _check_normalized(state.amplitudes)
    if method == "plucker":
        defect = plucker_defect(state)
        inner = defect / 2 if n == 2 else 2 * defect / 3
    elif method in ("rho1", "rho2"):
        p1 = purity(reduced_density(state, [1]))
        p2 = purity(reduced_density(state, [1, 2])) if (n == 3 and method == "rho2") else p1
        inner = n - 1 - sum(comb(n, k) * (p1 if k == 1 else p2) for k in range(1, n))
        inner = _clip_nonnegative(inner, "C_Nf^2 argument")
    else:
        raise ValueError(f"unknown method {method!r}")
    return sqrt(alpha_n(n, d) * inner)


def adjugate3(m: np.ndarray) -> np.ndarray:
    """Transpose of the cofactor matrix, from 2x2 minors (valid for singular ``m``)."""
    adj = np.empty((3, 3), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            minor = m[rows[0], cols[0]] * m[rows[1], cols[1]] - m[rows[0], cols[1]] * m[rows[1], cols[0]]
            adj[i, j] = (-1) ** (i + j) * minor
    return adj


def levay_matrices(expansion: SlaterExpansion) -> tuple[np.ndarray, np.ndarray]:
    """The 3x3 blocks ``A`` (rows 1-3) and ``B`` (rows 4-6) of the three-fermion invariant."""
    p = expansion
    a = np.array([[p[i, 5, 6], p[i, 6, 4], p[i, 4, 5]] for i in (1, 2, 3)], dtype=np.complex128)
    b = np.array([[p[i, 2, 3], p[i, 3, 1], p[i, 1, 2]] for i in (4, 5, 6)], dtype=np.complex128)
    return a, b


def fermionic_tangle(state: SlaterExpansion | PureState) -> float:
    """Three-fermion tangle for ``d = 6``; reported raw, without renormalization."""
    exp = to_slater_expansion(state) if isinstance(state, PureState) else state
    if exp.dim_single != 6 or exp.n_particles != 3:
        raise ValueError("fermionic_tangle is defined for three fermions with d = 6")
    a, b = levay_matrices(exp)
    p123, p456 = exp[1, 2, 3], exp[4, 5, 6]
    q = ((np.trace(a @ b) - p123 * p456) ** 2
         - 4 * np.trace(adjugate3(a) @ adjugate3(b))
         + 4 * p123 * np.linalg.det(a) + 4 * p456 * np.linalg.det(b))
    return float(4 * abs(q))


def measure_report(state: PureState) -> MeasureReport:
    """Every measure that applies to the shape of ``state``.

    Antisymmetric states of 2 or 3 fermions get the fermionic measures; qubit
    states (``dim_single == 2``) get the distinguishable-party ones.
    """
    report = MeasureReport()
    if state.dim_single == 2:
        if state.n_particles == 2:
            report.c2 = concurrence2(state)
        report.cN = concurrenceN(state)
        if state.n_particles == 3:
            report.tangle3 = tangle3(state)
        return report
    report.cNf = fermionic_concurrence(state)
    if state.n_particles == 3 and state.dim_single == 6:
        report.tau_f = fermionic_tangle(state)
    return report


__all__ = [
    "MeasureReport",
    "adjugate3",
    "alpha_n",
    "concurrence2",
    "concurrenceN",
    "fermionic_concurrence",
    "fermionic_tangle",
    "hyperdeterminant_tangle",
    "levay_matrices",
    "linear_entropy",
    "measure_report",
    "plucker_defect",
    "tangle3",
    "wootters_concurrence",
]
