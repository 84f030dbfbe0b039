"""Loops in control space and the path-ordered holonomy integrator.

A loop is a closed chain of typed segments (lines and coordinate-plane
arcs) based at a point of the control manifold.  Its holonomy is the
path-ordered product of midpoint-rule factors exp(A(mid) . delta), each
factor exactly unitary, with later factors multiplying on the left (gate
convention: later path segments act after earlier ones).

Orientation convention: for a counterclockwise square of side eps in a
coordinate plane, log(holonomy) converges to STOKES_ORIENTATION * eps^2
times the curvature contracted on that plane.  The sign was fixed once
against a high-resolution integrator run and is pinned by a regression
test.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._backend import ordered_expm_product
from .connection import COORDINATES, ParamPoint, connection_batch, curvature_analytic
from .errors import BranchPointWarning, BudgetError, LoopClosureError

JOIN_TOL = 1e-12

#: Default budget box tied to the default cutoff (see the connection module).
DEFAULT_XI_BUDGET = 1.0
DEFAULT_ZETA_BUDGET = 0.5

#: Error estimates above this are considered unreliable by the CLI.
ERROR_BUDGET = 1e-7

#: Empirically fixed sign between the path-ordered loop integral and the
#: plane-contracted curvature (see module docstring).
STOKES_ORIENTATION = -1.0

#: The six coordinate 2-planes in canonical order.
ALL_PLANES = (
    ("re_xi", "im_xi"),
    ("re_xi", "re_zeta"),
    ("re_xi", "im_zeta"),
    ("im_xi", "re_zeta"),
    ("im_xi", "im_zeta"),
    ("re_zeta", "im_zeta"),
)


@dataclass(frozen=True)
class Line:
    """Straight segment between two control points."""

    start: ParamPoint
    end: ParamPoint

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return self.start.coords(), self.end.coords()

    def length(self) -> float:
        r0, r1 = self.endpoints()
        return float(np.linalg.norm(r1 - r0))

    def points(self, t: np.ndarray) -> np.ndarray:
        r0, r1 = self.endpoints()
        return r0 + np.outer(np.asarray(t, dtype=float), r1 - r0)

    def reversed(self) -> "Line":
        return Line(self.end, self.start)


@dataclass(frozen=True)
class Arc:
    """Circular arc in one coordinate 2-plane, other coordinates frozen."""

    center: ParamPoint
    plane: tuple[str, str]
    radius: float
    start_angle: float
    sweep: float

    def __post_init__(self):
        u, v = self.plane
        if u not in COORDINATES or v not in COORDINATES or u == v:
            raise ValueError(f"invalid arc plane {self.plane!r}")
        if self.radius < 0:
            raise ValueError("arc radius must be non-negative")

    def _axes(self) -> tuple[int, int]:
        return COORDINATES.index(self.plane[0]), COORDINATES.index(self.plane[1])

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        pts = self.points(np.array([0.0, 1.0]))
        return pts[0], pts[1]

    def length(self) -> float:
        return float(self.radius * abs(self.sweep))

    def points(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        ang = self.start_angle + t * self.sweep
        out = np.tile(self.center.coords(), (t.size, 1))
        i, j = self._axes()
        out[:, i] += self.radius * np.cos(ang)
        out[:, j] += self.radius * np.sin(ang)
        return out

    def reversed(self) -> "Arc":
        return Arc(
            self.center,
            self.plane,
            self.radius,
            self.start_angle + self.sweep,
            -self.sweep,
        )


Segment = Line | Arc


class LoopPath:
    """Piecewise-smooth closed curve through control space.

    Consecutive collinear line segments are merged before sampling, so a
    split of a segment into collinear pieces leaves the holonomy unchanged.
    """

    def __init__(self, segments, base: ParamPoint | None = None):
        segments = tuple(segments)
        if not segments and base is None:
            raise LoopClosureError("empty loop needs an explicit base point")
        if base is None:
            base = ParamPoint.from_coords(segments[0].endpoints()[0])
        self.base = base
        self.segments = segments
        self._validate()
        self._canonical = _merge_collinear(
            [s for s in segments if s.length() > 0.0]
        )

    def _validate(self):
        if not self.segments:
            return
        prev_end = self.base.coords()
        for k, seg in enumerate(self.segments):
            r0, r1 = seg.endpoints()
            if np.linalg.norm(r0 - prev_end) > JOIN_TOL:
                raise LoopClosureError(
                    f"segment {k} starts away from the previous endpoint "
                    f"(gap {np.linalg.norm(r0 - prev_end):.2e})"
                )
            prev_end = r1
        if np.linalg.norm(prev_end - self.base.coords()) > JOIN_TOL:
            raise LoopClosureError(
                f"loop does not return to its base "
                f"(gap {np.linalg.norm(prev_end - self.base.coords()):.2e})"
            )

    def length(self) -> float:
        return sum(seg.length() for seg in self._canonical)

    def reversed(self) -> "LoopPath":
        return LoopPath(
            tuple(seg.reversed() for seg in reversed(self.segments)), self.base
        )

    def sample(self, steps: int):
        """Midpoints and sub-interval displacements for `steps` intervals.

        Returns (xi, zeta, dxi, dzeta) arrays; empty for a zero-length loop.
        Steps are allocated to segments proportionally to length, so
        segment corners always coincide with interval boundaries.
        """
        segs = self._canonical
        if not segs:
            empty = np.zeros(0, dtype=complex)
            return empty, empty, empty, empty
        counts = _allocate_steps([s.length() for s in segs], steps)
        mids = []
        deltas = []
        for seg, n in zip(segs, counts):
            edges = seg.points(np.linspace(0.0, 1.0, n + 1))
            mids.append(seg.points((np.arange(n) + 0.5) / n))
            deltas.append(np.diff(edges, axis=0))
        mid = np.concatenate(mids, axis=0)
        delta = np.concatenate(deltas, axis=0)
        xi = mid[:, 0] + 1j * mid[:, 1]
        zeta = mid[:, 2] + 1j * mid[:, 3]
        dxi = delta[:, 0] + 1j * delta[:, 1]
        dzeta = delta[:, 2] + 1j * delta[:, 3]
        return xi, zeta, dxi, dzeta


def _merge_collinear(segments):
    merged: list[Segment] = []
    for seg in segments:
        if merged and isinstance(seg, Line) and isinstance(merged[-1], Line):
            prev = merged[-1]
            d_prev = prev.end.coords() - prev.start.coords()
            d_next = seg.end.coords() - seg.start.coords()
            u_prev = d_prev / np.linalg.norm(d_prev)
            u_next = d_next / np.linalg.norm(d_next)
            if np.linalg.norm(u_prev - u_next) < 1e-12:
                merged[-1] = Line(prev.start, seg.end)
                continue
        merged.append(seg)
    return tuple(merged)


def _allocate_steps(lengths, steps: int):
    lengths = np.asarray(lengths, dtype=float)
    raw = steps * lengths / lengths.sum()
    counts = np.maximum(np.floor(raw).astype(int), 1)
    deficit = steps - int(counts.sum())
    if deficit > 0:
        order = np.argsort(-(raw - np.floor(raw)))
        for idx in order[:deficit]:
            counts[idx] += 1
    return counts


def point_loop(base: ParamPoint) -> LoopPath:
    """The constant (zero length) loop at a point."""
    return LoopPath((), base)


def rectangle_loop(
    plane: tuple[str, str],
    corner: ParamPoint,
    width: float,
    height: float,
    base: ParamPoint | None = None,
) -> LoopPath:
    """Axis-aligned rectangle in a coordinate plane, traversed from `corner`.

    Positive width/height traverse counterclockwise.  When `base` differs
    from the corner, straight lead-in and lead-out lines connect them.
    """
    iu = COORDINATES.index(plane[0])
    iv = COORDINATES.index(plane[1])
    if iu == iv:
        raise ValueError("rectangle plane must use two distinct coordinates")
    c0 = corner.coords()
    cs = [c0.copy() for _ in range(4)]
    cs[1][iu] += width
    cs[2][iu] += width
    cs[2][iv] += height
    cs[3][iv] += height
    pts = [ParamPoint.from_coords(c) for c in cs]
    segments: list[Segment] = [
        Line(pts[0], pts[1]),
        Line(pts[1], pts[2]),
        Line(pts[2], pts[3]),
        Line(pts[3], pts[0]),
    ]
    if base is not None and np.linalg.norm(base.coords() - c0) > 0:
        segments = [Line(base, pts[0]), *segments, Line(pts[0], base)]
    return LoopPath(tuple(segments), base if base is not None else pts[0])


def square_loop(
    plane: tuple[str, str],
    corner: ParamPoint,
    size: float,
    base: ParamPoint | None = None,
) -> LoopPath:
    return rectangle_loop(plane, corner, size, size, base)


@dataclass(frozen=True)
class HolonomyResult:
    """Loop holonomy with a Richardson error estimate."""

    gamma: np.ndarray
    steps: int
    error_estimate: float
    base: ParamPoint

    def unitarity_defect(self) -> float:
        g = self.gamma
        return float(np.abs(g.conj().T @ g - np.eye(4)).max())


def _integrate(loop: LoopPath, provider, steps: int, xi_max, zeta_max) -> np.ndarray:
    xi, zeta, dxi, dzeta = loop.sample(steps)
    if xi.size == 0:
        return np.eye(4, dtype=complex)
    if xi_max is not None and np.abs(xi).max() > xi_max + 1e-9:
        raise BudgetError(
            f"loop reaches |xi| = {np.abs(xi).max():.4g} > budget {xi_max}"
        )
    if zeta_max is not None and np.abs(zeta).max() > zeta_max + 1e-9:
        raise BudgetError(
            f"loop reaches |zeta| = {np.abs(zeta).max():.4g} > budget {zeta_max}"
        )
    a_xi, a_zeta = provider(xi, zeta)
    s = a_xi * dxi[:, None, None] + a_zeta * dzeta[:, None, None]
    # Transport sign: a frame-dragged state's coefficients obey c' = -A c,
    # so each factor is exp(-(one-form value)); this is also what makes
    # small-loop holonomies pair with the curvature dA + A /\ A.
    increments = s.conj().transpose(0, 2, 1) - s
    return ordered_expm_product(increments)


def holonomy(
    loop: LoopPath,
    connection_provider=None,
    steps: int = 512,
    xi_max: float | None = DEFAULT_XI_BUDGET,
    zeta_max: float | None = DEFAULT_ZETA_BUDGET,
) -> HolonomyResult:
    """Path-ordered holonomy of a closed loop.

    `connection_provider` maps coordinate arrays (xi, zeta) to stacked
    (N, 4, 4) connection pairs; the closed-form connection is the default.
    The error estimate compares the requested resolution against double
    resolution (midpoint rule is second order, so the true error of the
    returned matrix is about 4/3 of the observed difference).
    """
    if steps < 8:
        raise ValueError("at least 8 steps are required")
    provider = connection_provider if connection_provider is not None else connection_batch
    gamma = _integrate(loop, provider, steps, xi_max, zeta_max)
    refined = _integrate(loop, provider, 2 * steps, xi_max, zeta_max)
    err = float(np.abs(gamma - refined).max()) * 4.0 / 3.0
    return HolonomyResult(gamma=gamma, steps=steps, error_estimate=err, base=loop.base)


def provider_from_sample_fn(sample_fn):
    """Adapt a pointwise ParamPoint -> ConnectionSample map to the batched
    provider interface (useful for driving the integrator off the numeric
    connection)."""

    def provider(xis, zetas):
        a_xi = np.empty((len(xis), 4, 4), dtype=complex)
        a_zeta = np.empty((len(xis), 4, 4), dtype=complex)
        for k, (x, z) in enumerate(zip(xis, zetas)):
            s = sample_fn(ParamPoint(complex(x), complex(z)))
            a_xi[k] = s.a_xi
            a_zeta[k] = s.a_zeta
        return a_xi, a_zeta

    return provider


def apply_gate(result: HolonomyResult, x) -> np.ndarray:
    """Act with the holonomy gate on a 4-component code-space vector."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {x.shape}")
    return result.gamma @ x


def compose(a: HolonomyResult, b: HolonomyResult) -> HolonomyResult:
    """Holonomy of traversing b's loop first, then a's; errors add."""
    if np.linalg.norm(a.base.coords() - b.base.coords()) > JOIN_TOL:
        raise ValueError("cannot compose holonomies with different base points")
    return HolonomyResult(
        gamma=a.gamma @ b.gamma,
        steps=min(a.steps, b.steps),
        error_estimate=a.error_estimate + b.error_estimate,
        base=a.base,
    )


def reverse(result: HolonomyResult) -> HolonomyResult:
    """Holonomy of the reversed loop (the inverse gate)."""
    return HolonomyResult(
        gamma=result.gamma.conj().T.copy(),
        steps=result.steps,
        error_estimate=result.error_estimate,
        base=result.base,
    )


def log_unitary(u: np.ndarray, unitary_tol: float = 1e-8) -> np.ndarray:
    """Principal anti-hermitian logarithm of a 4x4 unitary.

    Warns (BranchPointWarning) when an eigenvalue sits near -1, where the
    principal branch is ambiguous.
    """
    u = np.asarray(u, dtype=complex)
    defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if defect > unitary_tol:
        raise ValueError(f"input is not unitary (defect {defect:.2e})")
    t, q = scipy.linalg.schur(u, output="complex")
    angles = np.angle(np.diag(t))
    if np.any(np.pi - np.abs(angles) < 1e-9):
        warnings.warn(
            "eigenvalue at the -1 branch point; principal log is ambiguous",
            BranchPointWarning,
        )
    x = (q * (1j * angles)) @ q.conj().T
    return 0.5 * (x - x.conj().T)


# ---------------------------------------------------------------------------
# Holonomy-algebra dimension estimate


def _vectorize_real(mats) -> np.ndarray:
    stack = np.asarray(mats).reshape(len(mats), -1)
    return np.concatenate([stack.real, stack.imag], axis=1)


def _span_rank(rows: np.ndarray, tol: float):
    svals = np.linalg.svd(rows, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0, svals
    return int(np.sum(svals > tol * svals[0])), svals


def span_closure_dimension(generators, tol: float = 1e-8):
    """Real span dimension of anti-hermitian matrices, closed under brackets.

    Returns (dimension, singular values of the final closed collection).
    """
    mats = [np.asarray(g, dtype=complex) for g in generators]
    if not mats:
        raise ValueError("need at least one generator")
    for _ in range(8):
        rows = _vectorize_real(mats)
        rank, svals = _span_rank(rows, tol)
        if rank == 0:
            return 0, svals
        # Orthonormal basis of the current span, mapped back to matrices.
        _, _, vt = np.linalg.svd(rows, full_matrices=False)
        basis_rows = vt[:rank]
        n = mats[0].shape[0]
        basis = [
            (row[: n * n] + 1j * row[n * n :]).reshape(n, n) for row in basis_rows
        ]
        brackets = []
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                brackets.append(basis[i] @ basis[j] - basis[j] @ basis[i])
        if not brackets:
            return rank, svals
        new_rank, _ = _span_rank(_vectorize_real(basis + brackets), tol)
        if new_rank == rank:
            return rank, svals
        mats = basis + brackets
    return rank, svals


def holonomy_algebra_dimension(
    curvature_provider=None,
    sample_points=None,
    tol: float = 1e-8,
    planes=ALL_PLANES,
) -> int:
    """Dimension of the Lie algebra generated by curvature evaluations.

    Collects the curvature contracted on each coordinate 2-plane in
    `planes` at every sample point (anti-hermitian generators), closes the
    collection under commutators and returns the real span dimension.
    Restricting `planes` restricts the tangent directions probed, e.g. to
    loops confined to the xi coordinate plane.
    """
    dim, _ = holonomy_algebra_spectrum(curvature_provider, sample_points, tol, planes)
    return dim


def holonomy_algebra_spectrum(
    curvature_provider=None,
    sample_points=None,
    tol: float = 1e-8,
    planes=ALL_PLANES,
):
    """Like :func:`holonomy_algebra_dimension`, also returning the singular
    values backing the rank decision."""
    provider = curvature_provider if curvature_provider is not None else curvature_analytic
    if sample_points is None or len(sample_points) == 0:
        raise ValueError("need at least one sample point")
    generators = []
    for p in sample_points:
        sample = provider(p)
        for plane in planes:
            generators.append(sample.contract(plane))
    return span_closure_dimension(generators, tol)


def default_algebra_grid(
    count: int = 12,
    seed: int = 0,
    xi_max: float = DEFAULT_XI_BUDGET,
    zeta_max: float = DEFAULT_ZETA_BUDGET,
) -> list[ParamPoint]:
    """Deterministic generic sample points spread over the budget box."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        rx = 0.8 * xi_max * np.sqrt(rng.uniform(0.1, 1.0))
        rz = 0.8 * zeta_max * np.sqrt(rng.uniform(0.1, 1.0))
        ax, az = rng.uniform(0, 2 * np.pi, size=2)
        points.append(
            ParamPoint(rx * np.exp(1j * ax), rz * np.exp(1j * az))
        )
    return points
