"""First-quantized states of a few indistinguishable fermions.

States live in the full tensor space ``H_f^{(x)N}`` as dense complex vectors of
length ``d**N``; slot 1 is the most significant digit of the flat index.
Single-particle labels are 1-based and ordered site-major, spin-minor::

    1 = a up, 2 = a down, 3 = b up, 4 = b down, 5 = c up, 6 = c down
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

ALGEBRA_TOL = 1e-12
ZERO_TOL = 1e-10
# moduli below this are round-off whatever the largest coefficient is
NOISE_FLOOR = 1e-13

SITES = "abc"
SPINS = ("up", "down")


class PauliViolation(ValueError):
    """Two fermions were asked to occupy the same single-particle state."""


class NotAntisymmetricError(ValueError):
    pass


def site_of(index: int) -> int:
    """0-based well (a=0, b=1, c=2) of a 1-based single-particle label."""
    return (index - 1) // 2


def spin_of(index: int) -> int:
    """0 for up, 1 for down."""
    return (index - 1) % 2


def label(index: int) -> str:
    return f"{SITES[site_of(index)]}{'↑↓'[spin_of(index)]}"


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class PureState:
    """Pure state of ``n_particles`` particles, each with a ``dim_single``-dim space.

    ``amplitudes`` is stored read-only; build a new state instead of mutating.
    """

    n_particles: int
    dim_single: int
    amplitudes: np.ndarray = field(repr=False)
    antisymmetric: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.dim_single**self.n_particles:
            raise ValueError(
                f"expected {self.dim_single ** self.n_particles} amplitudes, got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.dim_single,) * self.n_particles)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "PureState":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return self._replace(self.amplitudes / nrm)

    def amplitude(self, *indices: int) -> complex:
        """Amplitude on the product ``|i1> (x) ... (x) |iN>`` (1-based labels)."""
        return complex(self.tensor[tuple(i - 1 for i in indices)])

    def permuted(self, perm: Sequence[int]) -> "PureState":
        """Apply the slot permutation ``P_sigma``: slot ``k`` of the result holds old slot ``perm[k]``."""
        return self._replace(np.transpose(self.tensor, perm).reshape(-1), self.antisymmetric)

    def is_antisymmetric(self, tol: float = ALGEBRA_TOL) -> bool:
        # adjacent transpositions generate every permutation
        psi = self.tensor
        for k in range(self.n_particles - 1):
            if np.max(np.abs(np.swapaxes(psi, k, k + 1) + psi), initial=0.0) > tol:
                return False
        return True

    def overlap(self, other: "PureState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _replace(self, amplitudes, antisymmetric: bool | None = None) -> "PureState":
        flag = self.antisymmetric if antisymmetric is None else antisymmetric
        return PureState(self.n_particles, self.dim_single, amplitudes, flag)


def _check_indices(indices: Sequence[int], d: int) -> None:
    for i in indices:
        if not 1 <= int(i) <= d:
            raise ValueError(f"single-particle index {i} outside 1..{d}")


def product_state(indices: Sequence[int], d: int) -> PureState:
    _check_indices(indices, d)
    amps = np.zeros(d ** len(indices), dtype=np.complex128)
    amps[np.ravel_multi_index([i - 1 for i in indices], (d,) * len(indices))] = 1.0
    return PureState(len(indices), d, amps)


def antisymmetrize(state: PureState) -> tuple[PureState, float]:
    """Apply ``(1/sqrt(N!)) sum_sigma sgn(sigma) P_sigma``.

    Returns the (generally unnormalized) antisymmetric image and its norm.
    """
    n = state.n_particles
    psi = state.tensor
    out = np.zeros_like(psi)
    for perm in itertools.permutations(range(n)):
        out += permutation_sign(perm) * np.transpose(psi, perm)
    out /= math.sqrt(math.factorial(n))
    result = PureState(n, state.dim_single, out.reshape(-1), antisymmetric=True)
    return result, result.norm()


def slater_determinant(indices: Sequence[int], d: int) -> PureState:
    """Normalized Slater determinant occupying the given single-particle labels.

    >>> psi = slater_determinant([2, 1], d=4)
    >>> round(psi.amplitude(2, 1).real, 12), round(psi.amplitude(1, 2).real, 12)
    (0.707106781187, -0.707106781187)
    """
    indices = [int(i) for i in indices]
    if len(indices) not in (2, 3):
        raise ValueError("only 2 or 3 particles are supported")
    _check_indices(indices, d)
    if len(set(indices)) != len(indices):
        raise PauliViolation(f"Pauli violation: repeated index in {indices}")
    state, _ = antisymmetrize(product_state(indices, d))
    return state


@dataclass(frozen=True)
class SlaterExpansion:
    """Coefficients ``P_{i1..iN}`` on ordered label tuples ``i1 < ... < iN``.

    ``|psi> = sum_{i<j<k} P_ijk |psi^sl_ijk>``; missing keys are zero.
    """

    coeffs: Mapping[tuple[int, ...], complex]
    n_particles: int = 3
    dim_single: int = 6

    def __getitem__(self, key: Iterable[int]) -> complex:
        """Antisymmetrically extended coefficient, e.g. ``exp[1, 6, 4] == -exp[1, 4, 6]``."""
        key = tuple(key)
        if len(set(key)) != len(key):
            return 0j
        order = sorted(range(len(key)), key=key.__getitem__)
        sign = permutation_sign(order)
        return sign * complex(self.coeffs.get(tuple(sorted(key)), 0j))

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def nonzero(self, rel_tol: float = ZERO_TOL, abs_tol: float = NOISE_FLOOR) -> dict[tuple[int, ...], complex]:
        """Coefficients whose modulus exceeds ``rel_tol`` times the largest modulus (and ``abs_tol``)."""
        scale = max((abs(c) for c in self.coeffs.values()), default=0.0)
        cut = max(rel_tol * scale, abs_tol)
        return {k: c for k, c in sorted(self.coeffs.items()) if abs(c) > cut}


def ordered_tuples(n: int, d: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(1, d + 1), n))


def to_slater_expansion(state: PureState, tol: float = ALGEBRA_TOL) -> SlaterExpansion:
    if not state.is_antisymmetric(tol):
        raise NotAntisymmetricError("state is not antisymmetric under particle exchange")
    scale = math.sqrt(math.factorial(state.n_particles))
    psi = state.tensor
    coeffs = {}
    for key in ordered_tuples(state.n_particles, state.dim_single):
        c = complex(psi[tuple(i - 1 for i in key)]) * scale
        if c != 0:
            coeffs[key] = c
    return SlaterExpansion(coeffs, state.n_particles, state.dim_single)


def from_slater_expansion(expansion: SlaterExpansion) -> PureState:
    n, d = expansion.n_particles, expansion.dim_single
    amps = np.zeros(d**n, dtype=np.complex128)
    for key, c in expansion.coeffs.items():
        if len(key) != n or list(key) != sorted(set(key)):
            raise ValueError(f"expansion keys must be strictly increasing {n}-tuples, got {key}")
        amps += c * slater_determinant(key, d).amplitudes
    return PureState(n, d, amps, antisymmetric=True)


def reduced_density(state: PureState, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix on the 1-based particle slots in ``keep``.

    The kept slots stay in increasing order; the result has shape
    ``(d**k, d**k)`` and unit trace.
    """
    n, d = state.n_particles, state.dim_single
    keep = sorted({int(k) for k in keep})
    if not keep or len(keep) == n or keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"keep must be a nonempty proper subset of 1..{n}, got {keep}")
    if abs(state.norm() - 1.0) > 1e-9:
        raise ValueError("reduced_density expects a normalized state")
    kept = [k - 1 for k in keep]
    traced = [k for k in range(n) if k not in kept]
    mat = np.transpose(state.tensor, kept + traced).reshape(d ** len(kept), -1)
    return mat @ mat.conj().T


def purity(rho: np.ndarray) -> float:
    """``Tr rho^2`` for a Hermitian ``rho``."""
    return float(np.real(np.sum(rho * rho.T)))


class OnePerWellProjector:
    """Orthogonal projector onto product tuples whose wells are a permutation of (a, b, ...).

    Diagonal in the product basis, so it is stored as a boolean mask.
    """

    def __init__(self, d: int = 6, n: int = 3):
        if d != 2 * n:
            raise ValueError("one-per-well projector needs d == 2 * n (two spin states per well)")
        self.d, self.n = d, n
        wells = list(range(n))
        self.mask = np.array(
            [sorted(site_of(i + 1) for i in tup) == wells for tup in itertools.product(range(d), repeat=n)]
        )

    def __call__(self, state: PureState) -> PureState:
        if (state.dim_single, state.n_particles) != (self.d, self.n):
            raise ValueError("projector shape does not match the state")
        return state._replace(np.where(self.mask, state.amplitudes, 0))

    def matrix(self) -> np.ndarray:
        return np.diag(self.mask.astype(np.complex128))


_PROJECTORS: dict[tuple[int, int], OnePerWellProjector] = {}


def one_per_well_projector(d: int = 6, n: int = 3) -> Callable[[PureState], PureState]:
    if (d, n) not in _PROJECTORS:
        _PROJECTORS[d, n] = OnePerWellProjector(d, n)
    return _PROJECTORS[d, n]


def apply_one_body(state: PureState, u: np.ndarray) -> PureState:
    """Apply ``u (x) u (x) ... (x) u`` without forming the ``d**N`` square matrix."""
    psi = state.tensor
    for axis in range(state.n_particles):
        psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [axis])), 0, axis)
    return state._replace(psi.reshape(-1))
