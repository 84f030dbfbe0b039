"""Loop-parameter optimization for target holonomic gates.

The reachable subgroup is SU(2) on the middle block (|01>, |10>) times the
U(1) generated by the half-total-number diagonal; targets are screened by
projecting their logarithm onto that algebra (global phase allowed) before
any optimization runs.  The search itself is a derivative-free simplex
with seeded restarts over rectangle-loop parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.optimize

from .connection import COORDINATES, ParamPoint, hat_matrices
from .errors import ReachabilityError
from .holonomy import (
    DEFAULT_XI_BUDGET,
    DEFAULT_ZETA_BUDGET,
    Line,
    LoopPath,
    holonomy,
    log_unitary,
    rectangle_loop,
)

_ORIGIN = ParamPoint(0j, 0j)


def _algebra_directions() -> list[np.ndarray]:
    """Real basis of the reachable algebra, plus the global-phase direction."""
    hm = hat_matrices()
    two_b = 2 * hm.b - np.eye(4)
    return [
        hm.e - hm.f,
        1j * (hm.e + hm.f),
        1j * hm.h,
        1j * two_b,
        1j * np.eye(4),
    ]


_DIRECTIONS = _algebra_directions()


@dataclass(frozen=True)
class LoopFamily:
    """Parametrized loop generator with box bounds on its parameters."""

    name: str
    bounds: np.ndarray  # (d, 2) array of (low, high)
    build: Callable[[np.ndarray], LoopPath]

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def clip(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(theta, self.bounds[:, 0], self.bounds[:, 1])


def _rect_builder(plane_u: str, plane_v: str):
    def build(theta: np.ndarray) -> LoopPath:
        width, height, off_u, off_v = theta
        coords = np.zeros(4)
        coords[COORDINATES.index(plane_u)] = off_u
        coords[COORDINATES.index(plane_v)] = off_v
        corner = ParamPoint.from_coords(coords)
        return rectangle_loop((plane_u, plane_v), corner, width, height, base=_ORIGIN)

    return build


def rect_xi_family(max_coord: float = 0.35) -> LoopFamily:
    """Rectangle in the (Re xi, Im xi) plane: theta = (w, h, off_re, off_im).

    The box keeps every loop point inside |xi| <= sqrt(2) * 2 * max_coord,
    which respects the default |xi| budget for max_coord = 0.35.
    """
    bounds = np.array([[-max_coord, max_coord]] * 4)
    return LoopFamily("rect_xi", bounds, _rect_builder("re_xi", "im_xi"))


def rect_zeta_family(max_coord: float = 0.17) -> LoopFamily:
    """Rectangle in the (Re zeta, Im zeta) plane; bounds respect the
    squeezing budget of the default cutoff."""
    bounds = np.array([[-max_coord, max_coord]] * 4)
    return LoopFamily("rect_zeta", bounds, _rect_builder("re_zeta", "im_zeta"))


def double_rect_family(
    xi_coord: float = 0.35, zeta_coord: float = 0.17
) -> LoopFamily:
    """Concatenation of the xi-plane and zeta-plane rectangles (8 parameters)."""
    fx = rect_xi_family(xi_coord)
    fz = rect_zeta_family(zeta_coord)

    def build(theta: np.ndarray) -> LoopPath:
        la = fx.build(theta[:4])
        lb = fz.build(theta[4:])
        return LoopPath(la.segments + lb.segments, base=_ORIGIN)

    return LoopFamily("double_rect", np.vstack([fx.bounds, fz.bounds]), build)


def rect_xi_at_zeta_family(
    xi_coord: float = 0.35, zeta_coord: float = 0.3
) -> LoopFamily:
    """Rectangle in the (Re xi, Im xi) plane held at a constant squeezing
    offset: theta = (w, h, off_re_xi, off_im_xi, re_zeta, im_zeta).

    The rectangle connects to the base point by straight lead-in/out lines.
    Loops of this family produce gates acting purely on the middle block
    (|01>, |10>): the connection restricted to the xi plane is flat at
    zeta = 0 but curves once the squeezing offset is nonzero, which is what
    makes middle-block rotations reachable at all.
    """
    bounds = np.array(
        [[-xi_coord, xi_coord]] * 4 + [[-zeta_coord, zeta_coord]] * 2
    )

    def build(theta: np.ndarray) -> LoopPath:
        w, h, off_re, off_im, z_re, z_im = theta
        corner = ParamPoint.from_coords(np.array([off_re, off_im, z_re, z_im]))
        rect = rectangle_loop(("re_xi", "im_xi"), corner, w, h)
        lead_in = Line(_ORIGIN, corner)
        lead_out = Line(corner, _ORIGIN)
        if np.linalg.norm(corner.coords()) == 0:
            return LoopPath(rect.segments, base=_ORIGIN)
        return LoopPath((lead_in, *rect.segments, lead_out), base=_ORIGIN)

    return LoopFamily("rect_xi_at_zeta", bounds, build)


def gate_fidelity(gamma: np.ndarray, target: np.ndarray, unitary_tol: float = 1e-8) -> float:
    """|tr(gamma† target)| / 4; equals 1 iff the gates agree up to a phase."""
    gamma = np.asarray(gamma, dtype=complex)
    target = np.asarray(target, dtype=complex)
    for name, u in (("gamma", gamma), ("target", target)):
        if u.shape != (4, 4):
            raise ValueError(f"{name} must be 4x4")
        defect = np.abs(u.conj().T @ u - np.eye(4)).max()
        if defect > unitary_tol:
            raise ValueError(f"{name} is not unitary (defect {defect:.2e})")
    return float(abs(np.trace(gamma.conj().T @ target)) / 4.0)


def reachability_residual(target: np.ndarray) -> float:
    """Distance of log(target) from the reachable algebra + global phase.

    Uses the principal logarithm, so targets are screened modulo 2*pi
    eigenvalue branches.
    """
    x = log_unitary(np.asarray(target, dtype=complex))
    rows = np.array(
        [np.concatenate([d.real.ravel(), d.imag.ravel()]) for d in _DIRECTIONS]
    ).T
    vec = np.concatenate([x.real.ravel(), x.imag.ravel()])
    coeffs = np.linalg.lstsq(rows, vec, rcond=None)[0]
    return float(np.linalg.norm(vec - rows @ coeffs))


@dataclass(frozen=True)
class SynthResult:
    """Best loop parameters found for a target gate."""

    theta: np.ndarray
    fidelity: float
    gamma: np.ndarray
    evaluations: int
    best_trace: tuple[float, ...]  # best fidelity after each evaluation


def synthesize(
    target: np.ndarray,
    family: LoopFamily,
    budget: int = 2000,
    seed: int = 0,
    steps: int = 512,
    final_steps: int = 1024,
    reachability_tol: float = 1e-6,
    xi_max: float = DEFAULT_XI_BUDGET,
    zeta_max: float = DEFAULT_ZETA_BUDGET,
) -> SynthResult:
    """Derivative-free search for loop parameters realizing `target`.

    Raises ReachabilityError when the target leaves the reachable
    subgroup.  Exhausting the budget below some fidelity threshold is not
    an error: the result simply carries the best fidelity found.  All
    randomness is derived from `seed`.
    """
    target = np.asarray(target, dtype=complex)
    residual = reachability_residual(target)
    if residual > reachability_tol:
        raise ReachabilityError(
            f"target is outside the reachable subgroup (residual {residual:.3e})"
        )

    state = {"count": 0, "best": -1.0, "best_theta": None, "trace": []}

    def objective(theta: np.ndarray) -> float:
        theta = family.clip(np.asarray(theta, dtype=float))
        result = holonomy(
            family.build(theta), steps=steps, xi_max=xi_max, zeta_max=zeta_max
        )
        fid = gate_fidelity(result.gamma, target)
        state["count"] += 1
        if fid > state["best"]:
            state["best"] = fid
            state["best_theta"] = theta.copy()
        state["trace"].append(state["best"])
        return 1.0 - fid

    rng = np.random.default_rng(seed)
    starts = [np.zeros(family.dim)]
    for _ in range(4):
        starts.append(rng.uniform(family.bounds[:, 0], family.bounds[:, 1]))
    share = max(budget // len(starts), 1)

    for x0 in starts:
        remaining = budget - state["count"]
        if remaining <= 0:
            break
        scipy.optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=family.bounds,
            options={
                "maxfev": min(share, remaining),
                "xatol": 1e-10,
                "fatol": 1e-12,
            },
        )
        if state["best"] >= 1.0 - 1e-13:
            break

    theta = state["best_theta"]
    final = holonomy(
        family.build(theta), steps=final_steps, xi_max=xi_max, zeta_max=zeta_max
    )
    fidelity = gate_fidelity(final.gamma, target)
    return SynthResult(
        theta=theta,
        fidelity=fidelity,
        gamma=final.gamma,
        evaluations=state["count"],
        best_trace=tuple(state["trace"]),
    )
