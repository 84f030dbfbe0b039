"""Degenerate Kerr system, adiabatic connection and curvature over (xi, zeta).

The control manifold is C^2 with coordinates xi (beam-splitter amplitude)
and zeta (squeezing amplitude); the transported frame is the fourfold
degenerate kernel of the Kerr Hamiltonian, ordered |00>, |01>, |10>, |11>.
The connection pair (A_xi, A_zeta) is available through two independent
routes: closed-form coefficient functions, and frame matrix elements of
W^-1 dW computed with the exact directional derivative of the matrix
exponential.  The curvature likewise comes in closed form and as the
finite-difference assembly of dA + A /\\ A.

Complex-derivative convention: d/dxi = (d/dRe - i d/dIm)/2, with xi and
conj(xi) treated as independent variables throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coherent import (
    _expm_antihermitian,
    _su2_matrices,
    _su11_matrices,
    expm_and_directional_derivative,
)
from .errors import CutoffError
from .fock import (
    FockOperator,
    FockSpace,
    annihilator,
    basis_state,
    mode_difference_sectors,
    total_number_sectors,
)
from .scalars import (
    cos_deficit,
    cosh_excess,
    sin_ratio,
    sin_ratio_deficit,
    sinh_ratio,
    sinh_ratio_excess,
)

FRAME_OCCUPATIONS = ((0, 0), (0, 1), (1, 0), (1, 1))

#: Real coordinates on the control manifold, in canonical order.
COORDINATES = ("re_xi", "im_xi", "re_zeta", "im_zeta")

#: Wedge-basis order used by CurvatureSample.
WEDGE_NAMES = (
    "dxi_dzeta",
    "dxi_dxibar",
    "dxi_dzetabar",
    "dzeta_dxibar",
    "dzeta_dzetabar",
    "dxibar_dzetabar",
)


@dataclass(frozen=True)
class ParamPoint:
    """A point (xi, zeta) of the control manifold."""

    xi: complex = 0j
    zeta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "xi", complex(self.xi))
        object.__setattr__(self, "zeta", complex(self.zeta))
        if not (np.isfinite(self.xi) and np.isfinite(self.zeta)):
            raise ValueError("parameter point must be finite")

    def coords(self) -> np.ndarray:
        """Real coordinate 4-vector in COORDINATES order."""
        return np.array(
            [self.xi.real, self.xi.imag, self.zeta.real, self.zeta.imag],
            dtype=float,
        )

    @staticmethod
    def from_coords(r) -> "ParamPoint":
        r = np.asarray(r, dtype=float)
        return ParamPoint(complex(r[0], r[1]), complex(r[2], r[3]))


@dataclass(frozen=True)
class HatMatrices:
    """The six constant 4x4 matrices entering the closed-form results.

    e and f are the unit shift matrices of the middle block (|01>, |10>),
    h its balanced half-difference diagonal; a and c shift between the outer
    states |00> and |11>, and b is the half-total-number diagonal.
    """

    e: np.ndarray
    f: np.ndarray
    h: np.ndarray
    a: np.ndarray
    c: np.ndarray
    b: np.ndarray


def hat_matrices() -> HatMatrices:
    return _HAT


def _build_hats() -> HatMatrices:
    e = np.zeros((4, 4), dtype=complex)
    e[1, 2] = 1.0
    f = np.zeros((4, 4), dtype=complex)
    f[2, 1] = 1.0
    h = np.diag([0.0, 0.5, -0.5, 0.0]).astype(complex)
    a = np.zeros((4, 4), dtype=complex)
    a[0, 3] = 1.0
    c = np.zeros((4, 4), dtype=complex)
    c[3, 0] = 1.0
    b = np.diag([0.5, 1.0, 1.0, 1.5]).astype(complex)
    for m in (e, f, h, a, c, b):
        m.setflags(write=False)
    return HatMatrices(e=e, f=f, h=h, a=a, c=c, b=b)


_HAT = _build_hats()
_TWO_B_MINUS_1 = 2 * _HAT.b - np.eye(4)
_TWO_B_MINUS_1.setflags(write=False)

# Orthogonal (Frobenius) basis of the span that carries every curvature
# coefficient: e, f, h and 2b - 1.
_SPAN_BASIS = tuple(
    m / np.linalg.norm(m) for m in (_HAT.e, _HAT.f, _HAT.h, _TWO_B_MINUS_1)
)


@dataclass(frozen=True)
class ConnectionSample:
    """The pair (A_xi, A_zeta) at a parameter point."""

    a_xi: np.ndarray
    a_zeta: np.ndarray
    at: ParamPoint

    def one_form(self, dxi: complex, dzeta: complex) -> np.ndarray:
        """Anti-hermitian value of the connection on a tangent (dxi, dzeta)."""
        s = self.a_xi * dxi + self.a_zeta * dzeta
        return s - s.conj().T


@dataclass(frozen=True)
class CurvatureSample:
    """Coefficients of the curvature 2-form in the wedge basis WEDGE_NAMES."""

    dxi_dzeta: np.ndarray
    dxi_dxibar: np.ndarray
    dxi_dzetabar: np.ndarray
    dzeta_dxibar: np.ndarray
    dzeta_dzetabar: np.ndarray
    dxibar_dzetabar: np.ndarray
    at: ParamPoint

    def coefficients(self) -> tuple[np.ndarray, ...]:
        return (
            self.dxi_dzeta,
            self.dxi_dxibar,
            self.dxi_dzetabar,
            self.dzeta_dxibar,
            self.dzeta_dzetabar,
            self.dxibar_dzetabar,
        )

    def contract(self, plane: tuple[str, str]) -> np.ndarray:
        """Value of the 2-form on the unit bivector of a coordinate plane.

        The result is anti-hermitian for any pair of distinct real
        coordinates; these are the generators fed to the holonomy-algebra
        estimator.
        """
        u, v = plane
        du = _complex_differentials(u)
        dv = _complex_differentials(v)
        out = np.zeros((4, 4), dtype=complex)
        for name, coeff in zip(WEDGE_NAMES, self.coefficients()):
            alpha, beta = _WEDGE_FACTORS[name]
            weight = du[alpha] * dv[beta] - dv[alpha] * du[beta]
            if weight != 0:
                out = out + weight * coeff
        return out


_WEDGE_FACTORS = {
    "dxi_dzeta": ("dxi", "dzeta"),
    "dxi_dxibar": ("dxi", "dxibar"),
    "dxi_dzetabar": ("dxi", "dzetabar"),
    "dzeta_dxibar": ("dzeta", "dxibar"),
    "dzeta_dzetabar": ("dzeta", "dzetabar"),
    "dxibar_dzetabar": ("dxibar", "dzetabar"),
}


def _complex_differentials(coord: str) -> dict[str, complex]:
    """Values of dxi, dzeta and conjugates on a unit real coordinate vector."""
    if coord not in COORDINATES:
        raise ValueError(f"unknown coordinate {coord!r}")
    dxi = {"re_xi": 1.0, "im_xi": 1.0j}.get(coord, 0.0)
    dzeta = {"re_zeta": 1.0, "im_zeta": 1.0j}.get(coord, 0.0)
    return {
        "dxi": dxi,
        "dxibar": np.conj(dxi),
        "dzeta": dzeta,
        "dzetabar": np.conj(dzeta),
    }


class VacuumFrame:
    """The ordered orthonormal kernel frame |00>, |01>, |10>, |11>."""

    __slots__ = ("space", "columns")

    def __init__(self, space: FockSpace):
        self.space = space
        cols = np.zeros((space.total_dim, 4), dtype=complex)
        for j, (n1, n2) in enumerate(FRAME_OCCUPATIONS):
            cols[:, j] = basis_state(space, n1, n2).entries
        cols.setflags(write=False)
        self.columns = cols

    def project(self, full_operator: np.ndarray) -> np.ndarray:
        """4x4 matrix of frame matrix elements <v_i| M |v_j>."""
        return self.columns.conj().T @ full_operator @ self.columns


def vacuum_frame(space: FockSpace) -> VacuumFrame:
    return _cached_frame(space)


@lru_cache(maxsize=None)
def _cached_frame(space: FockSpace) -> VacuumFrame:
    return VacuumFrame(space)


def kerr_hamiltonian(space: FockSpace, x_const: float = 1.0) -> FockOperator:
    """Diagonal Kerr Hamiltonian x_const * [N1(N1-1) + N2(N2-1)].

    Its kernel is exactly the span of the vacuum frame and the smallest
    nonzero eigenvalue is 2 * x_const.
    """
    occ = space.occupations().astype(float)
    diag = x_const * (occ[:, 0] * (occ[:, 0] - 1) + occ[:, 1] * (occ[:, 1] - 1))
    return FockOperator(np.diag(diag.astype(complex)), space)


def control_unitary(space: FockSpace, p: ParamPoint) -> FockOperator:
    """W(xi, zeta) = u_op(xi) v_op(zeta); the identity at the base point."""
    sys = _system(space)
    return FockOperator(sys.u(p.xi) @ sys.v(p.zeta), space)


def projector(space: FockSpace, p: ParamPoint) -> FockOperator:
    """Rank-4 orthogonal projector W P0 W^-1 onto the transported frame."""
    w = control_unitary(space, p).matrix
    cols = vacuum_frame(space).columns
    wf = w @ cols
    return FockOperator(wf @ wf.conj().T, space)


class _System:
    """Per-space cache of generator matrices and sector structure."""

    def __init__(self, space: FockSpace):
        self.space = space
        self.jp, self.jm, self.j3 = _su2_matrices(space)
        self.kp, self.km, self.k3 = _su11_matrices(space)
        self.number_sectors = total_number_sectors(space)
        self.difference_sectors = mode_difference_sectors(space)
        self.frame = vacuum_frame(space)

    def xi_exponent(self, xi: complex) -> np.ndarray:
        return xi * self.jp - np.conj(xi) * self.jm

    def zeta_exponent(self, zeta: complex) -> np.ndarray:
        return zeta * self.kp - np.conj(zeta) * self.km

    def u(self, xi: complex) -> np.ndarray:
        return _expm_antihermitian(self.xi_exponent(xi), self.number_sectors)

    def v(self, zeta: complex) -> np.ndarray:
        return _expm_antihermitian(self.zeta_exponent(zeta), self.difference_sectors)


@lru_cache(maxsize=None)
def _system(space: FockSpace) -> _System:
    return _System(space)


# ---------------------------------------------------------------------------
# Closed-form connection


def connection_coefficients(xi, zeta):
    """Vectorized scalar weights (c_f, c_h, c_e, c_c, c_b, c_a).

    A_xi = c_f * f + c_h * h + c_e * e and A_zeta = c_c * c + c_b * b +
    c_a * a in terms of the hat matrices.
    """
    xi = np.asarray(xi, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    rx = np.abs(xi)
    rz = np.abs(zeta)
    ch = np.cosh(2 * rz)
    c_f = 0.5 * (1 + sin_ratio(rx)) * ch
    c_h = np.conj(xi) * cos_deficit(rx)
    c_e = np.conj(xi) ** 2 * sin_ratio_deficit(rx) * ch
    c_c = 0.5 * (1 + sinh_ratio(rz))
    c_b = np.conj(zeta) * cosh_excess(rz)
    c_a = np.conj(zeta) ** 2 * sinh_ratio_excess(rz)
    return c_f, c_h, c_e, c_c, c_b, c_a


def connection_analytic(p: ParamPoint) -> ConnectionSample:
    """Closed-form connection pair at a point."""
    a_xi, a_zeta = connection_batch(
        np.array([p.xi]), np.array([p.zeta])
    )
    return ConnectionSample(a_xi=a_xi[0], a_zeta=a_zeta[0], at=p)


def connection_batch(xis: np.ndarray, zetas: np.ndarray):
    """Closed-form connection at many points: two (N, 4, 4) stacks."""
    c_f, c_h, c_e, c_c, c_b, c_a = connection_coefficients(xis, zetas)
    hm = _HAT
    a_xi = (
        c_f[..., None, None] * hm.f
        + c_h[..., None, None] * hm.h
        + c_e[..., None, None] * hm.e
    )
    a_zeta = (
        c_c[..., None, None] * hm.c
        + c_b[..., None, None] * hm.b
        + c_a[..., None, None] * hm.a
    )
    return a_xi, a_zeta


# ---------------------------------------------------------------------------
# Numeric connection via the exact derivative of W


def operator_pullback_xi(
    space: FockSpace, p: ParamPoint, method: str = "spectral"
) -> FockOperator:
    """Full-space operator W^-1 dW/dxi = V^-1 (U^-1 dU/dxi) V."""
    sys = _system(space)
    u, du = expm_and_directional_derivative(
        sys.xi_exponent(p.xi), sys.jp, sys.number_sectors, method
    )
    v = sys.v(p.zeta)
    return FockOperator(v.conj().T @ (u.conj().T @ du) @ v, space)


def operator_pullback_zeta(
    space: FockSpace, p: ParamPoint, method: str = "spectral"
) -> FockOperator:
    """Full-space operator W^-1 dW/dzeta = V^-1 dV/dzeta."""
    sys = _system(space)
    v, dv = expm_and_directional_derivative(
        sys.zeta_exponent(p.zeta), sys.kp, sys.difference_sectors, method
    )
    return FockOperator(v.conj().T @ dv, space)


def connection_numeric(
    space: FockSpace, p: ParamPoint, method: str = "spectral"
) -> ConnectionSample:
    """Connection pair from frame matrix elements of W^-1 dW."""
    frame = vacuum_frame(space)
    a_xi = frame.project(operator_pullback_xi(space, p, method).matrix)
    a_zeta = frame.project(operator_pullback_zeta(space, p, method).matrix)
    return ConnectionSample(a_xi=a_xi, a_zeta=a_zeta, at=p)


def pullback_xi_from_generators(space: FockSpace, p: ParamPoint) -> FockOperator:
    """Closed-form W^-1 dW/dxi assembled from ladder products.

    Independent of the exact-derivative route; the two must agree on
    low-lying states within truncation tolerance.
    """
    sys = _system(space)
    rx = abs(p.xi)
    rz = abs(p.zeta)
    ch = np.cosh(2 * rz)
    s = sinh_ratio(rz)
    c1 = 0.5 * (1 + sin_ratio(rx))
    c2 = -np.conj(p.xi) * cos_deficit(rx)
    c3 = np.conj(p.xi) ** 2 * sin_ratio_deficit(rx)
    ad1a2 = sys.jp
    ad2a1 = sys.jm
    a1 = annihilator(space, 1).matrix
    a2 = annihilator(space, 2).matrix
    raise_sq1 = a1.conj().T @ a1.conj().T
    raise_sq2 = a2.conj().T @ a2.conj().T
    lower_sq1 = a1 @ a1
    lower_sq2 = a2 @ a2
    m = (
        c1 * (ch * ad1a2 + p.zeta * s * raise_sq1 + np.conj(p.zeta) * s * lower_sq2)
        + c2 * sys.j3
        + c3 * (ch * ad2a1 + np.conj(p.zeta) * s * lower_sq1 + p.zeta * s * raise_sq2)
    )
    return FockOperator(m, space)


def pullback_zeta_from_generators(space: FockSpace, p: ParamPoint) -> FockOperator:
    """Closed-form W^-1 dW/dzeta assembled from ladder products."""
    sys = _system(space)
    rz = abs(p.zeta)
    c1 = 0.5 * (1 + sinh_ratio(rz))
    c2 = np.conj(p.zeta) * cosh_excess(rz)
    c3 = np.conj(p.zeta) ** 2 * sinh_ratio_excess(rz)
    m = c1 * sys.kp + c2 * sys.k3 + c3 * sys.km
    return FockOperator(m, space)


def cutoff_agreement(
    cutoff: int, points, margin: int = 6, method: str = "spectral"
) -> float:
    """Max connection discrepancy between `cutoff` and `cutoff + margin`.

    Squeezing leaks population toward the cutoff; comparing two cutoffs
    makes that leakage observable.
    """
    lo = FockSpace(cutoff)
    hi = FockSpace(cutoff + margin)
    worst = 0.0
    for p in points:
        s_lo = connection_numeric(lo, p, method)
        s_hi = connection_numeric(hi, p, method)
        worst = max(
            worst,
            np.abs(s_lo.a_xi - s_hi.a_xi).max(),
            np.abs(s_lo.a_zeta - s_hi.a_zeta).max(),
        )
    return worst


def require_adequate_cutoff(cutoff: int, points, tol: float = 1e-10, margin: int = 6):
    """Raise CutoffError when two cutoffs disagree beyond `tol`."""
    worst = cutoff_agreement(cutoff, points, margin)
    if worst > tol:
        raise CutoffError(
            f"cutoff {cutoff} vs {cutoff + margin} disagree by {worst:.3e} (> {tol:.1e})"
        )
    return worst


# ---------------------------------------------------------------------------
# Curvature


def curvature_analytic(p: ParamPoint) -> CurvatureSample:
    """Closed-form curvature coefficients in the wedge basis."""
    x = p.xi
    z = p.zeta
    rx = abs(x)
    rz = abs(z)
    hm = _HAT
    one_plus = 1 + sin_ratio(rx)
    two_def = 2 * sin_ratio_deficit(rx)
    sh = sinh_ratio(rz)
    sz = z * sh
    szb = np.conj(z) * sh
    f_xz = -(one_plus * szb * hm.f + np.conj(x) ** 2 * two_def * szb * hm.e)
    f_xxb = 2 * sin_ratio(rx) * np.sinh(2 * rz) ** 2 * hm.h
    f_xzb = -(one_plus * sz * hm.f + np.conj(x) ** 2 * two_def * sz * hm.e)
    f_zxb = -(one_plus * szb * hm.e + x**2 * two_def * szb * hm.f)
    f_zzb = -2 * sh * _TWO_B_MINUS_1
    f_xbzb = one_plus * sz * hm.e + x**2 * two_def * sz * hm.f
    return CurvatureSample(
        dxi_dzeta=f_xz,
        dxi_dxibar=f_xxb,
        dxi_dzetabar=f_xzb,
        dzeta_dxibar=f_zxb,
        dzeta_dzetabar=f_zzb,
        dxibar_dzetabar=f_xbzb,
        at=p,
    )


def curvature_numeric(
    p: ParamPoint,
    connection_provider=connection_analytic,
    h: float = 1e-4,
) -> CurvatureSample:
    """Curvature assembled as dA + A /\\ A with central differences.

    `connection_provider` maps a ParamPoint to a ConnectionSample (closed
    form or numeric); h is the real/imaginary central-difference step for
    the complex-derivative pairs.
    """
    if not (1e-8 < h < 0.1):
        raise ValueError(f"step h = {h:.3e} outside the supported range")

    def shifted(dx: complex, dz: complex) -> ConnectionSample:
        return connection_provider(ParamPoint(p.xi + dx, p.zeta + dz))

    base = connection_provider(p)
    px, mx = shifted(h, 0), shifted(-h, 0)
    py, my = shifted(1j * h, 0), shifted(-1j * h, 0)
    pz, mz = shifted(0, h), shifted(0, -h)
    pw, mw = shifted(0, 1j * h), shifted(0, -1j * h)

    def partials(pick):
        d_re_x = (pick(px) - pick(mx)) / (2 * h)
        d_im_x = (pick(py) - pick(my)) / (2 * h)
        d_re_z = (pick(pz) - pick(mz)) / (2 * h)
        d_im_z = (pick(pw) - pick(mw)) / (2 * h)
        d_xi = 0.5 * (d_re_x - 1j * d_im_x)
        d_xibar = 0.5 * (d_re_x + 1j * d_im_x)
        d_zeta = 0.5 * (d_re_z - 1j * d_im_z)
        d_zetabar = 0.5 * (d_re_z + 1j * d_im_z)
        return d_xi, d_xibar, d_zeta, d_zetabar

    ax_x, ax_xb, ax_z, ax_zb = partials(lambda s: s.a_xi)
    az_x, az_xb, az_z, az_zb = partials(lambda s: s.a_zeta)
    ax = base.a_xi
    az = base.a_zeta
    axd = ax.conj().T
    azd = az.conj().T

    def comm(m, n):
        return m @ n - n @ m

    # d(M†)/dxi = (dM/dxibar)† and cyclic variants.
    f_xz = az_x - ax_z + comm(ax, az)
    f_xxb = -(ax_xb.conj().T + ax_xb + comm(ax, axd))
    f_xzb = -(az_xb.conj().T + ax_zb + comm(ax, azd))
    f_zxb = -(ax_zb.conj().T + az_xb + comm(az, axd))
    f_zzb = -(az_zb.conj().T + az_zb + comm(az, azd))
    f_xbzb = -(az_x.conj().T - ax_z.conj().T + comm(azd, axd))
    return CurvatureSample(
        dxi_dzeta=f_xz,
        dxi_dxibar=f_xxb,
        dxi_dzetabar=f_xzb,
        dzeta_dxibar=f_zxb,
        dzeta_dzetabar=f_zzb,
        dxibar_dzetabar=f_xbzb,
        at=p,
    )


def span_residual(matrix: np.ndarray) -> float:
    """Frobenius distance from span{e, f, h, 2b - 1}."""
    residual = matrix.astype(complex)
    for basis in _SPAN_BASIS:
        residual = residual - np.vdot(basis, residual) * basis
    return float(np.linalg.norm(residual))


def curvature_span_residual(sample: CurvatureSample) -> float:
    """Largest span residual over the six wedge coefficients."""
    return max(span_residual(c) for c in sample.coefficients())
