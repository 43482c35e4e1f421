"""Euler-angle parametrization of SU(3) tunneling matrices and the equal-weight W family."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .protocol import EtaParams

EXCLUSION_TOL = 1e-12
DEFAULT_GRID_POINTS = 2001
GRID_OFFSET = 1e-6

CURVE_COLUMNS = ("theta2", "cos_theta4", "p_ab", "p_bc", "p_aa", "p_bb", "P")

_GELL_MANN = np.zeros((8, 3, 3), dtype=np.complex128)
_GELL_MANN[0] = [[0, 1, 0], [1, 0, 0], [0, 0, 0]]
_GELL_MANN[1] = [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]]
_GELL_MANN[2] = [[1, 0, 0], [0, -1, 0], [0, 0, 0]]
_GELL_MANN[3] = [[0, 0, 1], [0, 0, 0], [1, 0, 0]]
_GELL_MANN[4] = [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]]
_GELL_MANN[5] = [[0, 0, 0], [0, 0, 1], [0, 1, 0]]
_GELL_MANN[6] = [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]]
_GELL_MANN[7] = np.diag([1, 1, -2]) / math.sqrt(3)
_GELL_MANN.setflags(write=False)

# generator of each factor, left to right
EULER_GENERATORS = (3, 2, 3, 5, 3, 2, 3, 8)


def gell_mann(l: int) -> np.ndarray:
    """Gell-Mann matrix ``lambda_l`` (``l = 1..8``), normalized to ``Tr(l_i l_j) = 2 delta_ij``."""
    if not 1 <= l <= 8:
        raise ValueError(f"Gell-Mann index must be in 1..8, got {l}")
    return _GELL_MANN[l - 1].copy()


# (row, col) plane of each off-diagonal generator
_PLANES = {1: (0, 1), 2: (0, 1), 4: (0, 2), 5: (0, 2), 6: (1, 2), 7: (1, 2)}


def exp_gell_mann(l: int, angle: float) -> np.ndarray:
    """Closed-form ``exp(i * angle * lambda_l)``.

    Real generators (1, 4, 6) give ``cos`` on the diagonal and ``i sin`` off it;
    imaginary ones (2, 5, 7) give a real rotation; 3 and 8 give diagonal phases.
    """
    if l == 3:
        return np.diag([np.exp(1j * angle), np.exp(-1j * angle), 1.0])
    if l == 8:
        ph = angle / math.sqrt(3)
        return np.diag([np.exp(1j * ph), np.exp(1j * ph), np.exp(-2j * ph)])
    if l not in _PLANES:
        raise ValueError(f"Gell-Mann index must be in 1..8, got {l}")
    i, j = _PLANES[l]
    out = np.eye(3, dtype=np.complex128)
    c, s = math.cos(angle), math.sin(angle)
    out[i, i] = out[j, j] = c
    if l in (1, 4, 6):
        out[i, j] = out[j, i] = 1j * s
    else:
        out[i, j], out[j, i] = s, -s
    return out


class EulerAngles(NamedTuple):
    t1: float = 0.0
    t2: float = 0.0
    t3: float = 0.0
    t4: float = 0.0
    t5: float = 0.0
    t6: float = 0.0
    t7: float = 0.0
    t8: float = 0.0

    @property
    def theta(self) -> float:
        """Combined phase ``2 (theta3 + theta5)``, the only way theta3 and theta5 reach ``|eta_i - eta_j|``."""
        return 2.0 * (self.t3 + self.t5)

    def validate(self) -> "EulerAngles":
        half, full = math.pi / 2, math.pi
        for name, value, hi, closed in (
            ("theta1", self.t1, full, False),
            ("theta2", self.t2, half, True),
            ("theta3", self.t3, full, False),
            ("theta4", self.t4, half, True),
            ("theta5", self.t5, full, False),
            ("theta6", self.t6, half, True),
            ("theta7", self.t7, full, False),
            ("theta8", self.t8, 2 * full, False),
        ):
            if value < 0 or value > hi or (not closed and value == hi):
                raise ValueError(f"{name} = {value} outside its range")
        return self


def euler_to_matrix(angles: Sequence[float]) -> np.ndarray:
    """``exp(i t1 l3) exp(i t2 l2) exp(i t3 l3) exp(i t4 l5) exp(i t5 l3) exp(i t6 l2) exp(i t7 l3) exp(i t8 l8)``."""
    angles = EulerAngles(*angles)
    out = np.eye(3, dtype=np.complex128)
    for gen, angle in zip(EULER_GENERATORS, angles):
        out = out @ exp_gell_mann(gen, angle)
    return out


def eta_differences_closed_form(angles: Sequence[float]) -> tuple[float, float, float]:
    """``(|eta3 - eta2|^2, |eta2 - eta1|^2, |eta1 - eta3|^2)`` from theta2, theta4, theta6 and theta.

    With ``u = cos t4 sin t6``, ``v = cos t6`` and ``x = u v sin(2 t2) cos(theta)``.
    """
    a = EulerAngles(*angles)
    s2, c2 = math.sin(a.t2) ** 2, math.cos(a.t2) ** 2
    s4 = math.sin(a.t4) ** 2
    u = math.cos(a.t4) * math.sin(a.t6)
    v = math.cos(a.t6)
    x = u * v * math.sin(2 * a.t2) * math.cos(a.theta)
    d32 = c2 * s4 * (x + u * u * c2 + v * v * s2)
    d21 = s2 * s4 * (-x + u * u * s2 + v * v * c2)
    d13 = u * u * s4
    return d32, d21, d13


def _inside(angle: float) -> bool:
    return EXCLUSION_TOL < angle < math.pi / 2 - EXCLUSION_TOL


def solve_equal_coefficients(theta2: float, theta6: float) -> list[tuple[float, float]]:
    """All ``(theta4, theta)`` with ``theta4`` in (0, pi/2) and ``theta`` in [0, 2 pi) that equalize the
    three ``|eta_i - eta_j|``.

    Works in the pole-free form: ``u = v sin(2 t2) / sqrt(4 - sin^2(2 t2))`` fixes ``cos t4 = u / sin t6``,
    then ``cos(theta) = -u cos(2 t2) / (v sin(2 t2))``.  This stays finite at ``t2 = pi/4``,
    where ``tan(2 t2)`` diverges and ``cos(theta) = 0``.
    """
    if not (_inside(theta2) and _inside(theta6)):
        return []
    s = math.sin(2 * theta2)
    v = math.cos(theta6)
    u = v * s / math.sqrt(4 - s * s)
    cos_t4 = u / math.sin(theta6)
    if not EXCLUSION_TOL < cos_t4 < 1 - EXCLUSION_TOL:
        return []
    theta4 = math.acos(cos_t4)
    cos_theta = -u * math.cos(2 * theta2) / (v * s)
    base = math.acos(max(-1.0, min(1.0, cos_theta)))
    thetas = sorted({base, (2 * math.pi - base) % (2 * math.pi)})
    return [(theta4, th) for th in thetas]


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class SymmetricWSolution:
    """Tunneling matrix with symmetric hopping probabilities that yields equal-weight W states.

    ``branch`` is the sign of ``cos 2 theta3``.  ``rejected_cos_theta4`` is what the
    opposite sign would give (negative, hence outside the allowed range).
    """

    theta2: float
    theta3: float
    theta4: float
    branch: Branch
    rejected_cos_theta4: float

    @property
    def angles(self) -> EulerAngles:
        return EulerAngles(0.0, self.theta2, self.theta3, self.theta4, 0.0, self.theta2, 0.0, 0.0)

    def matrix(self) -> np.ndarray:
        return euler_to_matrix(self.angles)


def symmetric_solution(theta2: float) -> SymmetricWSolution:
    if not _inside(theta2):
        raise ValueError(f"theta2 must lie strictly inside (0, pi/2), got {theta2}")
    c2t2 = math.cos(2 * theta2)
    root = math.sqrt(3 + c2t2 * c2t2)
    cos_t4 = 2 * math.cos(theta2) ** 2 / root
    # sign(cos 2 theta3) = -sign(cos 2 theta2) keeps cos(theta4) positive
    cos_2t3 = -c2t2 / root
    theta3 = 0.5 * math.acos(cos_2t3)
    branch = Branch.PLUS if cos_2t3 >= 0 else Branch.MINUS
    return SymmetricWSolution(theta2, theta3, math.acos(cos_t4), branch, -cos_t4)


def symmetric_matrix_entries(sol: SymmetricWSolution) -> np.ndarray:
    """Tunneling matrix of a symmetric solution from the explicit entry formulas."""
    t2, t3, t4 = sol.theta2, sol.theta3, sol.theta4
    e = np.exp(1j * t3)
    c, s = math.cos(t2), math.sin(t2)
    t_cc = math.cos(t4)
    t_aa = e * t_cc * c * c - s * s / e
    t_bb = c * c / e - e * t_cc * s * s
    t_ab = c * s * (1 / e + t_cc * e)
    t_ac = e * c * math.sin(t4)
    t_bc = -e * s * math.sin(t4)
    return np.array(
        [
            [t_aa, t_ab, t_ac],
            [-t_ab, t_bb, t_bc],
            [-t_ac / e, t_bc / e, t_cc],
        ],
        dtype=np.complex128,
    )


def probability_closed_forms(theta2: np.ndarray | float) -> dict[str, np.ndarray]:
    """Hopping, staying and detection probabilities of the symmetric family as functions of theta2."""
    th = np.asarray(theta2, dtype=float)
    sin_sq_2 = np.sin(2 * th) ** 2
    denom = 7 + np.cos(4 * th)
    return {
        "theta2": th,
        "cos_theta4": 2 * np.cos(th) ** 2 / np.sqrt(3 + np.cos(2 * th) ** 2),
        "p_ab": sin_sq_2 / (4 - sin_sq_2),
        "p_bc": np.sin(th) ** 4 / (1 - np.sin(th) ** 2 * np.cos(th) ** 2),
        "p_aa": (5 + 3 * np.cos(4 * th)) / denom,
        "p_bb": 8 * np.cos(th) ** 4 / denom,
        "P": 12 * np.sin(2 * th) ** 4 / denom**2,
    }


def default_grid(n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(GRID_OFFSET, math.pi / 2 - GRID_OFFSET, n)


def probability_curves(
    grid: Sequence[float] | None = None, check: bool = True, tol: float = 1e-12
) -> dict[str, np.ndarray]:
    """Closed-form curves over a theta2 grid, plus the simulated concurrence ``c3f``.

    With ``check`` every row is compared to the moduli of the explicit matrix and
    to a protocol simulation; a discrepancy above ``tol`` raises ``ArithmeticError``.
    """
    from .measures import fermionic_concurrence
    from .protocol import analytic_projected_state, run_protocol

    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    curves = probability_closed_forms(grid)
    c3f = np.empty(grid.size)
    for row, th in enumerate(grid):
        sol = symmetric_solution(float(th))
        t = symmetric_matrix_entries(sol)
        outcome = run_protocol(t)
        # the analytic projected state stays well conditioned where P underflows the detection threshold
        projected, _, _ = analytic_projected_state(t, np.eye(2))
        c3f[row] = fermionic_concurrence(projected.normalize()) if projected.norm() > 0 else float("nan")
        if not check:
            continue
        prob = np.abs(t) ** 2
        observed = {
            "cos_theta4": t[2, 2].real,
            "p_ab": prob[0, 1],
            "p_bc": prob[1, 2],
            "p_aa": prob[0, 0],
            "p_bb": prob[1, 1],
            "P": outcome.detection_probability,
        }
        for key, value in observed.items():
            if abs(value - curves[key][row]) > tol:
                raise ArithmeticError(f"{key} at theta2={th}: closed form {curves[key][row]!r}, observed {value!r}")
    curves["c3f"] = c3f
    return curves


def symmetry_residuals(angles: Sequence[float]) -> np.ndarray:
    """``|t_ab|^2 - |t_ba|^2``, ``|t_ac|^2 - |t_ca|^2``, ``|t_bc|^2 - |t_cb|^2`` of the Euler matrix."""
    p = np.abs(euler_to_matrix(angles)) ** 2
    return np.array([p[0, 1] - p[1, 0], p[0, 2] - p[2, 0], p[1, 2] - p[2, 1]])


def w_relative_phases(eta: EtaParams) -> tuple[float, float]:
    """Phases of ``(eta3 - eta2)`` and ``(eta2 - eta1)`` relative to ``(eta1 - eta3)``, in radians."""
    d1, d2, d3 = eta.differences
    return float(np.angle(d1 / d3)), float(np.angle(d2 / d3))
