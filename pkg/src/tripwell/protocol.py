"""Tunneling plus particle-detection protocols for two and three fermions.

Three fermions start in ``A(|a up> |b up> |b down>)``, evolve under
``(T x S)^{(x)3}`` (tunneling ``T`` on the wells, spin flip ``S`` on the spin),
and are post-selected on one particle per well.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .fock import (
    NOISE_FLOOR,
    ZERO_TOL,
    PureState,
    SlaterExpansion,
    apply_one_body,
    one_per_well_projector,
    slater_determinant,
    to_slater_expansion,
)
from .measures import MeasureReport, fermionic_concurrence, fermionic_tangle

UNITARY_TOL = 1e-10
DETECTION_THRESHOLD = 1e-10

INITIAL_OCCUPATION = (1, 3, 4)
W_UPPER_TRIPLES = ((2, 3, 5), (1, 4, 5), (1, 3, 6))
W_LOWER_TRIPLES = ((1, 4, 6), (2, 3, 6), (2, 4, 5))


class NotUnitaryError(ValueError):
    pass


class Classification(str, enum.Enum):
    ZERO = "zero"
    SLATER = "slater"
    W_TYPE = "w_type"
    GHZ_TYPE = "ghz_type"
    OTHER = "other"


def check_unitary(m: np.ndarray, name: str = "matrix", tol: float = UNITARY_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotUnitaryError(f"{name} must be square, got shape {m.shape}")
    err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if err > tol:
        raise NotUnitaryError(f"{name} is not unitary (max |M^dag M - I| = {err:.3e})")
    return m


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary: QR of a complex Ginibre matrix with phase-fixed ``R``."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


@dataclass(frozen=True)
class ZParams:
    """Spin-flip monomials; only ``z6 - z3`` and ``z5 - z4`` reach the one-per-well component."""

    z1: complex
    z2: complex
    z3: complex
    z4: complex
    z5: complex
    z6: complex

    @classmethod
    def from_spin_flip(cls, s: np.ndarray) -> "ZParams":
        uu, ud, du, dd = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
        return cls(
            z1=uu**2 * ud,
            z2=du**2 * dd,
            z3=uu * ud * du,
            z4=dd * du * uu,
            z5=du**2 * ud,
            z6=uu**2 * dd,
        )

    @property
    def upper(self) -> complex:
        return self.z6 - self.z3

    @property
    def lower(self) -> complex:
        return self.z5 - self.z4


@dataclass(frozen=True)
class EtaParams:
    """Tunneling amplitudes for one, two and three particles hopping between wells.

    ``d1 = eta3 - eta2``, ``d2 = eta2 - eta1`` and ``d3 = -(d1 + d2)``, so the
    three differences sum to exactly zero in floating point.
    """

    eta1: complex
    eta2: complex
    eta3: complex

    @classmethod
    def from_tunneling(cls, t: np.ndarray) -> "EtaParams":
        a, b, c = 0, 1, 2
        return cls(
            eta1=t[a, a] * t[b, b] * t[c, b],
            eta2=t[c, a] * t[a, b] * t[b, b],
            eta3=t[b, a] * t[a, b] * t[c, b],
        )

    @property
    def d1(self) -> complex:
        return self.eta3 - self.eta2

    @property
    def d2(self) -> complex:
        return self.eta2 - self.eta1

    @property
    def d3(self) -> complex:
        return -(self.d1 + self.d2)

    @property
    def differences(self) -> tuple[complex, complex, complex]:
        return self.d1, self.d2, self.d3

    def probability(self) -> float:
        """Detection probability when the spin flip is trivial."""
        return float(sum(abs(x) ** 2 for x in self.differences))

    def nonzero_count(self, rel_tol: float = ZERO_TOL, abs_tol: float = NOISE_FLOOR) -> int:
        """Number of non-vanishing differences, relative to the largest ``|eta_i|``."""
        scale = max(abs(self.eta1), abs(self.eta2), abs(self.eta3))
        cut = max(rel_tol * scale, abs_tol)
        return sum(abs(x) > cut for x in self.differences)


@dataclass
class ProtocolOutcome:
    detection_probability: float
    final_state: Optional[PureState]
    eta: Optional[EtaParams]
    classification: Optional[Classification]
    measures: MeasureReport = field(default_factory=MeasureReport)
    expansion: Optional[SlaterExpansion] = None

    def to_dict(self) -> dict:
        out = {
            "P": self.detection_probability,
            "classification": None if self.classification is None else self.classification.value,
            "measures": self.measures.to_dict(),
        }
        if self.expansion is not None and self.final_state is not None:
            final = to_slater_expansion(self.final_state)
            out["slater"] = {
                "".join(map(str, k)): [c.real, c.imag] for k, c in final.nonzero().items()
            }
        if self.eta is not None:
            out["eta_differences"] = [[d.real, d.imag] for d in self.eta.differences]
        return out


_INITIAL = slater_determinant(INITIAL_OCCUPATION, 6)


def initial_state() -> PureState:
    return _INITIAL


def single_particle_unitary(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``T (x) S`` in the site-major, spin-minor single-particle basis."""
    return np.kron(t, s)


def evolve(t: np.ndarray, s: np.ndarray | None = None) -> PureState:
    t = check_unitary(t, "tunneling matrix")
    s = check_unitary(np.eye(2) if s is None else s, "spin flip")
    return apply_one_body(initial_state(), single_particle_unitary(t, s))


def analytic_projected_state(
    t: np.ndarray, s: np.ndarray | None = None
) -> tuple[PureState, ZParams, EtaParams]:
    """One-per-well component of the evolved state, assembled from the closed form.

    Six Slater terms weighted by products of an eta difference and a z branch.
    """
    t = check_unitary(t, "tunneling matrix")
    s = check_unitary(np.eye(2) if s is None else s, "spin flip")
    z = ZParams.from_spin_flip(s)
    eta = EtaParams.from_tunneling(t)
    weights = {
        (2, 3, 5): eta.d1 * z.upper,
        (1, 4, 6): eta.d1 * z.lower,
        (1, 4, 5): eta.d2 * z.upper,
        (2, 3, 6): eta.d2 * z.lower,
        # eta1 - eta3 taken directly rather than as -(d1 + d2)
        (1, 3, 6): (eta.eta1 - eta.eta3) * z.upper,
        (2, 4, 5): (eta.eta1 - eta.eta3) * z.lower,
    }
    amps = np.zeros(216, dtype=np.complex128)
    for triple, w in weights.items():
        amps += w * slater_determinant(triple, 6).amplitudes
    return PureState(3, 6, amps, antisymmetric=True), z, eta


def classify_state(
    expansion: SlaterExpansion, rel_tol: float = ZERO_TOL, abs_tol: float = NOISE_FLOOR
) -> Classification:
    """Entanglement class read off the Slater-coefficient pattern.

    GHZ-type: two determinants over disjoint triples.  W-type: three determinants
    that pairwise share exactly one label and together cover six labels.
    """
    keys = [frozenset(k) for k in expansion.nonzero(rel_tol, abs_tol)]
    if not keys:
        return Classification.ZERO
    if len(keys) == 1:
        return Classification.SLATER
    if len(keys) == 2 and not (keys[0] & keys[1]):
        return Classification.GHZ_TYPE
    if len(keys) == 3:
        pairwise_one = all(len(keys[i] & keys[j]) == 1 for i in range(3) for j in range(i + 1, 3))
        if pairwise_one and len(keys[0] | keys[1] | keys[2]) == 6:
            return Classification.W_TYPE
    return Classification.OTHER


def run_protocol(t: np.ndarray, s: np.ndarray | None = None) -> ProtocolOutcome:
    evolved = evolve(t, s)
    projected = one_per_well_projector(6, 3)(evolved)
    p = float(np.vdot(projected.amplitudes, projected.amplitudes).real)
    expansion = to_slater_expansion(projected)
    eta = EtaParams.from_tunneling(np.asarray(t, dtype=np.complex128))
    outcome = ProtocolOutcome(p, None, eta, classify_state(expansion), expansion=expansion)
    if p > DETECTION_THRESHOLD:
        final = projected.normalize()
        scale = 1.0 / math.sqrt(p)
        normalized = SlaterExpansion({k: c * scale for k, c in expansion.coeffs.items()})
        outcome.final_state = final
        outcome.measures = MeasureReport(cNf=fermionic_concurrence(final), tau_f=fermionic_tangle(normalized))
    return outcome


def w_condition_check(s: np.ndarray, tol: float = 1e-12) -> bool:
    """True when the spin flip kills one z branch (``s_up,up = 0`` or ``s_down,up = 0``)."""
    s = check_unitary(s, "spin flip")
    return bool(abs(s[0, 0]) <= tol or abs(s[1, 0]) <= tol)


def w_concurrence_closed_form(eta: EtaParams) -> float:
    """Fermionic concurrence of the post-selected W-type state from the eta differences alone."""
    p = eta.probability()
    if p == 0.0:
        raise ValueError("empty W state: all eta differences vanish")
    r4 = sum((abs(x) ** 2 / p) ** 2 for x in eta.differences)
    return math.sqrt(max(4.0 / 3.0 * (1.0 - r4), 0.0))


def two_well_tunneling(p: float) -> np.ndarray:
    """Spatial splitting ``|a> -> sqrt(1-p)|a> + sqrt(p)|b>``, completed by ``|b> -> -sqrt(p)|a> + sqrt(1-p)|b>``."""
    c, s = math.sqrt(1.0 - p), math.sqrt(p)
    return np.array([[c, -s], [s, c]])


def two_well_protocol(p: float) -> ProtocolOutcome:
    """Two fermions in ``A(|a down> |a up>)``, split with probability ``p``, detected one per well.

    ``measures.c2`` holds the qubit concurrence of the frozen pair.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"splitting probability must lie in [0, 1], got {p}")
    from .measures import concurrence2
    from .qubitmap import freeze

    init = slater_determinant([2, 1], 4)
    evolved = apply_one_body(init, np.kron(two_well_tunneling(p), np.eye(2)))
    if fermionic_concurrence(evolved) > 1e-10:
        raise ArithmeticError("splitting created fermionic entanglement")
    projected = one_per_well_projector(4, 2)(evolved)
    prob = projected.norm() ** 2
    outcome = ProtocolOutcome(prob, None, None, None, expansion=to_slater_expansion(projected))
    if prob > DETECTION_THRESHOLD:
        final = projected.normalize()
        outcome.final_state = final
        outcome.measures = MeasureReport(c2=concurrence2(freeze(final), dims=(2, 2)), cNf=fermionic_concurrence(final))
    return outcome


def random_symmetric_tunneling(rng: np.random.Generator) -> np.ndarray:
    """Random tunneling matrix with ``|t_ab|^2 = |t_ba|^2`` for every pair of wells.

    Euler-angle tuple with ``theta6 = theta2`` and ``theta5 = 0``; the outer
    phases ``theta1``, ``theta7``, ``theta8`` are drawn freely.
    """
    from .su3 import EulerAngles, euler_to_matrix

    t1, t3, t7 = rng.uniform(0, math.pi, 3)
    t2, t4 = rng.uniform(0, math.pi / 2, 2)
    t8 = rng.uniform(0, 2 * math.pi)
    return euler_to_matrix(EulerAngles(t1, t2, t3, t4, 0.0, t2, t7, t8))


# -- GHZ no-go scan -----------------------------------------------------------


@dataclass
class NoGoReport:
    samples: int
    seed: int
    counts: dict[str, int]
    failures: list[dict]
    structured: int = 0
    eta_counts: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "structured": self.structured,
            "counts": dict(self.counts),
            "eta_nonzero_counts": {str(k): v for k, v in sorted(self.eta_counts.items())},
            "failures": list(self.failures),
        }

    @property
    def ok(self) -> bool:
        return not self.failures


def _phase(x: float) -> complex:
    return complex(np.exp(1j * x))


def structured_grid() -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Deterministic (T, S) pairs: permutation-like T and spin flips with a zero entry, among others."""
    from .su3 import EulerAngles, euler_to_matrix, symmetric_matrix_entries, symmetric_solution

    perms = [np.eye(3)[list(p)] for p in itertools.permutations(range(3))]
    phases = np.diag([_phase(0.3), _phase(-1.1), _phase(2.0)])
    tunnelings = list(perms) + [p @ phases for p in perms]
    tunnelings += [symmetric_matrix_entries(symmetric_solution(x)) for x in (0.2, math.pi / 4, 1.1)]
    for t2 in (0.0, math.pi / 8, math.pi / 4, math.pi / 2):
        for t4 in (0.0, math.pi / 6, math.pi / 3, math.pi / 2):
            for t3 in (0.0, math.pi / 4, math.pi / 2):
                tunnelings.append(euler_to_matrix(EulerAngles(0.0, t2, t3, t4, 0.0, t2, 0.0, 0.0)))
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    spin_flips = [
        np.eye(2),
        np.array([[0, 1], [1, 0]]),
        np.diag([_phase(0.7), _phase(-0.4)]),
        np.array([[0, _phase(1.3)], [_phase(0.2), 0]]),
        h,
        np.array([[math.cos(0.4), -math.sin(0.4)], [math.sin(0.4), math.cos(0.4)]]),
    ]
    for t in tunnelings:
        for s in spin_flips:
            yield np.asarray(t, dtype=np.complex128), np.asarray(s, dtype=np.complex128)


def _classify_pair(t: np.ndarray, s: np.ndarray) -> tuple[str, int, Optional[dict]]:
    outcome = run_protocol(t, s)
    count = outcome.eta.nonzero_count()
    failure = None
    if outcome.classification is Classification.GHZ_TYPE or count == 1:
        failure = {
            "tunneling": [[[x.real, x.imag] for x in row] for row in t],
            "spin_flip": [[[x.real, x.imag] for x in row] for row in s],
            "classification": outcome.classification.value,
            "eta_nonzero_count": count,
        }
    return outcome.classification.value, count, failure


def _scan_chunk(seeds: list[np.random.SeedSequence]) -> list[tuple[str, int, Optional[dict]]]:
    out = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        out.append(_classify_pair(haar_unitary(3, rng), haar_unitary(2, rng)))
    return out


def ghz_no_go_scan(n_samples: int, seed: int, n_jobs: int = 1, structured: bool = True) -> NoGoReport:
    """Search for GHZ-type outcomes over Haar-random and structured (T, S) pairs.

    Each Haar sample draws from its own child of ``SeedSequence(seed)``, so the
    report does not depend on ``n_jobs``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    counts = {c.value: 0 for c in Classification}
    failures: list[dict] = []
    results = []
    n_structured = 0
    if structured:
        for t, s in structured_grid():
            results.append(_classify_pair(t, s))
            n_structured += 1
    children = np.random.SeedSequence(seed).spawn(n_samples)
    if n_jobs == 1:
        results.extend(_scan_chunk(children))
    else:
        size = math.ceil(n_samples / n_jobs)
        chunks = [children[i : i + size] for i in range(0, n_samples, size)]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for part in pool.map(_scan_chunk, chunks):
                results.extend(part)
    eta_counts: dict[int, int] = {}
    for label, count, failure in results:
        counts[label] += 1
        eta_counts[int(count)] = eta_counts.get(int(count), 0) + 1
        if failure is not None:
            failures.append(failure)
    return NoGoReport(n_samples, seed, counts, failures, structured=n_structured, eta_counts=dict(sorted(eta_counts.items())))
