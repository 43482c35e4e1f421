"""Freezing one-per-well fermion states into distinguishable qubits (one per well)."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .fock import PureState, one_per_well_projector, to_slater_expansion
from .measures import concurrenceN, fermionic_concurrence, fermionic_tangle, tangle3

C3_MAX = math.sqrt(1.5)
SUPPORT_TOL = 1e-10
IDENTITY_TOL = 1e-10


def _site_ordered_index(spins: tuple[int, ...], d: int) -> int:
    """Flat index of the product tuple with slot k in well k and the given spins."""
    labels = [2 * well + spin for well, spin in enumerate(spins)]
    return int(np.ravel_multi_index(labels, (d,) * len(spins)))


def freeze(state: PureState) -> np.ndarray:
    """Qubit amplitudes ``q[s_A, s_B, ...]`` (up = 0, down = 1), flattened with Alice most significant.

    Each amplitude is ``sqrt(N!)`` times the fermionic amplitude on the site-ordered
    tuple ``(a s_A, b s_B, ...)``, so a one-per-well Slater determinant written with
    its labels in site order maps to the product of its spins with coefficient +1.
    """
    n, d = state.n_particles, state.dim_single
    if d != 2 * n:
        raise ValueError("freeze needs two spin states per well and one well per particle")
    if not state.is_antisymmetric():
        raise ValueError("freeze needs an antisymmetric state")
    outside = state.amplitudes[~one_per_well_projector(d, n).mask]
    if np.linalg.norm(outside) > SUPPORT_TOL:
        raise ValueError("state has support outside the one-per-well subspace")
    scale = math.sqrt(math.factorial(n))
    return np.array(
        [scale * state.amplitudes[_site_ordered_index(spins, d)] for spins in itertools.product((0, 1), repeat=n)],
        dtype=np.complex128,
    )


def unfreeze(qubits: np.ndarray) -> PureState:
    """Inverse of :func:`freeze` on the one-per-well antisymmetric subspace."""
    from .fock import slater_determinant

    qubits = np.asarray(qubits, dtype=np.complex128).reshape(-1)
    n = int(round(math.log2(qubits.size)))
    d = 2 * n
    amps = np.zeros(d**n, dtype=np.complex128)
    for q, spins in zip(qubits, itertools.product((0, 1), repeat=n)):
        if q != 0:
            amps += q * slater_determinant([2 * w + s + 1 for w, s in enumerate(spins)], d).amplitudes
    return PureState(n, d, amps, antisymmetric=True)


@dataclass
class IdentityReport:
    c3f: float
    c3: float
    ratio: float
    tau: float
    tau_f: float
    identity_ok: bool
    w_type: bool

    def to_dict(self) -> dict:
        return asdict(self)


def verify_measure_identity(state: PureState, tol: float = IDENTITY_TOL) -> IdentityReport:
    """Compare the fermionic measures of a one-per-well state with those of its frozen qubits.

    ``identity_ok`` requires ``C3f = C3 / sqrt(3/2)``; for W-type states it also
    requires ``tau = tau_f = 0``.
    """
    from .protocol import Classification, classify_state

    if (state.n_particles, state.dim_single) != (3, 6):
        raise ValueError("verify_measure_identity needs three fermions with d = 6")
    qubits = freeze(state)
    c3f = fermionic_concurrence(state)
    c3 = concurrenceN(qubits)
    tau = tangle3(qubits)
    tau_f = fermionic_tangle(state)
    ratio = c3 / C3_MAX
    w_type = classify_state(to_slater_expansion(state)) is Classification.W_TYPE
    ok = abs(c3f - ratio) <= tol
    if w_type:
        ok = ok and abs(tau) <= tol and abs(tau_f) <= tol
    return IdentityReport(c3f, c3, ratio, tau, tau_f, bool(ok), w_type)
