"""Bloch functions on the finite tube, checked numerically on a surface grid.

Functions live on the closed tube: the cylinder with the helical
identification ``r ~ T_{2L} r``.  Unrolled, that surface is the torus spanned
by the circumference vector ``C`` and the period vector ``P``.  Samples sit on
a uniform grid in the torus coordinates ``(u, v)``::

    (arc, z) = u * C + v * P,    u = i / n_theta,  v = k / n_z

so each row of fixed ``v`` is uniform in theta over [0, 2pi) and ``z`` covers
one period.  Every rotation-translation is a rigid shift in ``(u, v)``;
shifts by whole grid steps are exact rolls, the rest use trigonometric
interpolation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.constants as const

from .geometry import TubeGeometry, _sign
from .reciprocal import KPoint, _gauss_reduce
from .transforms import (
    CellIndex, RotTranslation, TubePoint, cell_transform, flat_lattice, make_transform, site_point, torus_lattice,
)

# hbar^2 / (2 m_e) in eV * angstrom^2
HBAR2_2M = const.hbar**2 / (2 * const.m_e) / const.e * 1e20

_INT_TOL = 1e-9


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the torus spanned by the circumference and a period vector.

    By default the period is the helical identification of the finite tube.
    ``period=(0, Z)`` gives a straight cylinder of length Z instead.
    """

    geom: TubeGeometry
    n_theta: int = 64
    n_z: int = 64
    period: tuple[float, float] | None = None

    def __post_init__(self):
        if self.n_theta < 8 or self.n_z < 8:
            raise ValueError("grid needs at least 8 points per direction")
        if self.period is not None and not self.period[1] > 0:
            raise ValueError("period must have a positive axial component")

    @classmethod
    def straight(cls, geom: TubeGeometry, length: float, n_theta: int = 64, n_z: int = 64) -> "TorusGrid":
        return cls(geom, n_theta, n_z, (0.0, float(length)))

    @property
    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        C, P = torus_lattice(self.geom)
        if self.period is not None:
            P = np.array(self.period, dtype=float)
        return C, P

    @property
    def u(self) -> np.ndarray:
        return np.arange(self.n_theta) / self.n_theta

    @property
    def v(self) -> np.ndarray:
        return np.arange(self.n_z) / self.n_z

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Unrolled (arc length, z) of every grid point, shape (n_theta, n_z)."""
        C, P = self.basis
        U, V = np.meshgrid(self.u, self.v, indexing="ij")
        return U * C[0] + V * P[0], U * C[1] + V * P[1]

    def theta_z(self) -> tuple[np.ndarray, np.ndarray]:
        x, z = self.flat()
        return x / self.geom.r_t, z

    @property
    def cell_area(self) -> float:
        C, P = self.basis
        return abs(C[0] * P[1] - C[1] * P[0]) / (self.n_theta * self.n_z)

    def to_uv(self, disp: np.ndarray) -> tuple[float, float]:
        """Torus coordinates of an unrolled displacement."""
        C, P = self.basis
        du, dv = np.linalg.solve(np.column_stack([C, P]), np.asarray(disp, dtype=float))
        return float(du), float(dv)


def resolved_grid(geom: TubeGeometry, spacing: float = 0.25, minimum: int = 64) -> TorusGrid:
    """Helical-torus grid with at most ``spacing`` angstrom between samples along C and P.

    ``n_z`` is rounded up to a multiple of 2L so that ``T_1`` along the cyclic
    branch is an exact shift by whole rows.
    """
    C, P = torus_lattice(geom)
    n_t = max(minimum, math.ceil(np.linalg.norm(C) / spacing))
    n_t += n_t % 2
    step = 2 * geom.L
    n_z = max(minimum, math.ceil(np.linalg.norm(P) / spacing))
    n_z = step * math.ceil(n_z / step)
    return TorusGrid(geom, n_t, n_z)


@dataclass(frozen=True)
class SurfaceFunction:
    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.grid.n_theta, self.grid.n_z):
            raise GridMismatch(f"values shape {vals.shape} does not match grid")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def geom(self) -> TubeGeometry:
        return self.grid.geom

    def with_values(self, values: np.ndarray) -> "SurfaceFunction":
        return SurfaceFunction(self.grid, values)


@dataclass(frozen=True)
class ModelOrbital:
    """Gaussian bump ``normalization * exp(-d^2 / 2 width^2)``, d the distance on the unrolled tube.

    ``center`` is an offset from the atom the orbital is attached to.
    """

    width: float
    center: tuple[float, float] = (0.0, 0.0)  # (theta, z) offset
    normalization: float = 1.0

    @classmethod
    def default(cls, geom: TubeGeometry) -> "ModelOrbital":
        return cls(width=0.3 * geom.a)


@dataclass(frozen=True)
class SchrodingerConfig:
    kinetic_prefactor: float = HBAR2_2M
    potential: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def V(self, theta: np.ndarray, z: np.ndarray) -> np.ndarray:
        if self.potential is None:
            return np.zeros(np.broadcast(theta, z).shape)
        return np.asarray(self.potential(theta, z))


@dataclass(frozen=True)
class BlochPhase:
    sigma: float
    eta: float

    @property
    def lam(self) -> complex:
        return complex(np.exp(1j * self.sigma))

    @property
    def mu(self) -> complex:
        return complex(np.exp(1j * self.eta))


# -- phases -------------------------------------------------------------------

def bloch_phases(geom: TubeGeometry, k: KPoint, r: TubePoint, j: int, branch: str) -> BlochPhase:
    """``sigma = ±kappa c j`` and ``eta = ±2 pi z j / c`` for ``T_j^±``."""
    sign = _sign(branch)
    c = geom.c(branch)
    if c <= 0:
        raise ValueError("rotation-only branch has no axial phase")
    return BlochPhase(sign * k.kappa * c * j, sign * 2 * math.pi * r.z * j / c)


def phase_inner(k: KPoint, r: TubePoint) -> float:
    """``k . r = pi cos(theta - tau) + kappa z`` for r on the tube and k on the reciprocal tube."""
    return float(_phase_grid(k, r.theta, r.z))


def _phase_grid(k: KPoint, theta, z):
    return math.pi * np.cos(np.asarray(theta) - k.tau) + k.kappa * np.asarray(z)


def plane_wave(k: KPoint, grid: TorusGrid) -> SurfaceFunction:
    theta, z = grid.theta_z()
    return SurfaceFunction(grid, np.exp(1j * _phase_grid(k, theta, z)))


# -- shifting -----------------------------------------------------------------

def _shift_phase(n: int, d: float) -> np.ndarray:
    p = np.fft.fftfreq(n, 1.0 / n)
    ph = np.exp(2j * math.pi * p * d)
    if n % 2 == 0:
        ph[n // 2] = math.cos(math.pi * n * d)
    return ph


def shift_values(values: np.ndarray, du: float, dv: float) -> np.ndarray:
    """Samples of ``f(u + du, v + dv)`` given samples of ``f(u, v)``."""
    nt, nz = values.shape
    iu, iv = du * nt, dv * nz
    if abs(iu - round(iu)) < _INT_TOL and abs(iv - round(iv)) < _INT_TOL:
        return np.roll(values, (-int(round(iu)), -int(round(iv))), axis=(0, 1))
    F = np.fft.fft2(values)
    F *= _shift_phase(nt, du)[:, None] * _shift_phase(nz, dv)[None, :]
    return np.fft.ifft2(F)


def transform_function(f: SurfaceFunction, t: RotTranslation) -> SurfaceFunction:
    """``(T f)(r) = f(T r)``."""
    du, dv = f.grid.to_uv([f.geom.r_t * t.dtheta, t.dz])
    return f.with_values(shift_values(f.values, du, dv))


# -- orbitals and Bloch sums ---------------------------------------------------

def _periodic_gaussian(grid: TorusGrid, dx: np.ndarray, dz: np.ndarray, width: float) -> np.ndarray:
    """Gaussian summed over torus images, enough of them to reach e^{-36} of the peak."""
    C, P = grid.basis
    v1, v2 = _gauss_reduce(C, P)
    B = np.column_stack([v1, v2])
    area = abs(np.linalg.det(B))
    reach = 8.5 * width
    # lattice rows along each reduced vector are spaced area/|other| apart
    k1 = int(math.ceil(reach * np.linalg.norm(v2) / area)) + 1
    k2 = int(math.ceil(reach * np.linalg.norm(v1) / area)) + 1
    frac = np.linalg.solve(B, np.stack([dx.ravel(), dz.ravel()]))
    frac -= np.round(frac)
    red = B @ frac
    out = np.zeros(red.shape[1])
    for i in range(-k1, k1 + 1):
        for j in range(-k2, k2 + 1):
            sh = red + (i * v1 + j * v2)[:, None]
            out += np.exp(-(sh[0] ** 2 + sh[1] ** 2) / (2 * width**2))
    return out.reshape(dx.shape)


def orbital_function(grid: TorusGrid, orbital: ModelOrbital, sublattice: str = "A",
                     transform: RotTranslation | None = None) -> SurfaceFunction:
    """``phi(T r)`` on the grid, phi centred on the given sublattice atom of the unit cell."""
    geom = grid.geom
    if orbital.width >= geom.r_t:
        raise ValueError("orbital width must be smaller than the tube radius")
    site = site_point(geom, CellIndex(0, 0), sublattice)
    cx = geom.r_t * (site.theta + orbital.center[0])
    cz = site.z + orbital.center[1]
    x, z = grid.flat()
    if transform is not None:
        x = x + geom.r_t * transform.dtheta
        z = z + transform.dz
    return SurfaceFunction(grid, orbital.normalization * _periodic_gaussian(grid, x - cx, z - cz, orbital.width))


def bloch_sum(geom: TubeGeometry, orbital: ModelOrbital, kappa_nu: float, sublattice: str = "A",
              grid: TorusGrid | None = None) -> SurfaceFunction:
    """Tight-binding Bloch function of one sublattice.

    Armchair/chiral: ``1/sqrt(N) sum_{s<m} e^{i s kappa c-} sum_{j=-L}^{L-1} e^{-i j kappa c+} phi(T_s^- T_j^+ r)``.
    Zigzag: ``1/sqrt(N) sum_{j<n} sum_{s=-L}^{L-1} e^{i s kappa c-} phi(R_j T_s^- r)``.
    """
    grid = grid or TorusGrid(geom)
    if orbital.width > geom.a / math.sqrt(3):
        warnings.warn("orbital width exceeds half the cell diameter; Bloch sum is poorly localized",
                      RuntimeWarning, stacklevel=2)
    L = geom.L
    if geom.is_zigzag:
        terms = [(s, j) for j in range(geom.n) for s in range(-L, L)]
    else:
        terms = [(s, j) for s in range(geom.m) for j in range(-L, L)]
    total = np.zeros((grid.n_theta, grid.n_z), dtype=complex)
    for s, j in terms:
        phase = np.exp(1j * kappa_nu * (s * geom.c_minus - j * geom.c_plus))
        t = cell_transform(geom, CellIndex(s, j))
        total += phase * orbital_function(grid, orbital, sublattice, t).values
    return SurfaceFunction(grid, total / math.sqrt(geom.n_cells))


def bloch_residual(f: SurfaceFunction, kappa: float, branch: str, l: int = 1) -> float:
    """``max |f(T_l r) - e^{± i l kappa c±} f(r)|`` over the grid."""
    geom = f.geom
    sign = _sign(branch)
    t = make_transform(geom, branch, l)
    factor = np.exp(1j * sign * l * kappa * geom.c(branch))
    return float(np.max(np.abs(transform_function(f, t).values - factor * f.values)))


def verify_bloch_property(phi: SurfaceFunction, geom: TubeGeometry, kappa_nu: float, branch: str,
                          l: int = 1) -> float:
    if phi.geom != geom:
        raise GridMismatch("function was built on a different tube")
    return bloch_residual(phi, kappa_nu, branch, l)


def kappa_index(geom: TubeGeometry, kappa: float) -> int:
    """``nu`` with ``kappa = pi nu / (L c)``; raises if kappa is off the quantized grid."""
    c = geom.c(geom.axial_branch)
    x = kappa * geom.L * c / math.pi
    nu = round(x)
    if abs(x - nu) > 1e-8:
        raise ValueError(f"kappa={kappa} is not on the quantized grid")
    return int(nu)


def cyclic_eigenfunction(seed: SurfaceFunction, geom: TubeGeometry, kappa_nu: float) -> SurfaceFunction:
    """``Psi = sum_{j=1}^{2L} e^{-i sgn pi nu j / L} seed(T_j r)`` along the cyclic branch.

    With this sign convention ``Psi(T_l r) = e^{± i l kappa c} Psi(r)`` for the
    ``+`` (armchair/chiral) and ``-`` (zigzag) branch alike.
    """
    nu = kappa_index(geom, kappa_nu)
    branch = geom.axial_branch
    sign = _sign(branch)
    L = geom.L
    total = np.zeros_like(seed.values)
    for j in range(1, 2 * L + 1):
        shifted = transform_function(seed, make_transform(geom, branch, j)).values
        total = total + np.exp(-1j * sign * math.pi * nu * j / L) * shifted
    return seed.with_values(total)


# -- inner products ------------------------------------------------------------

def _strip_weights(grid: TorusGrid, width: float) -> np.ndarray:
    h = 1.0 / grid.n_theta
    lo = grid.u - h / 2
    # a cell straddling u = 0 also reaches the top of the torus
    w = np.clip(np.minimum(lo + h, width) - np.maximum(lo, 0.0), 0.0, None)
    w += np.clip(np.minimum(lo + 1 + h, width) - np.maximum(lo + 1, 0.0), 0.0, None)
    return w / h


def overlap_integral(f: SurfaceFunction, g: SurfaceFunction, region: str = "strip") -> complex:
    """``integral conj(f) g dOmega`` by the periodic trapezoidal rule.

    The default ``region="strip"`` is the fundamental strip: the band swept by
    one cell under ``T_l``, l = -L .. L-1 (1/m of the circumference wide, 1/n
    for zigzag).  ``region="torus"`` integrates over the whole closed tube.
    """
    if f.grid != g.grid:
        raise GridMismatch("functions are sampled on different grids")
    grid = f.grid
    prod = np.conj(f.values) * g.values
    if region == "torus":
        return complex(prod.sum() * grid.cell_area)
    if region == "strip":
        geom = grid.geom
        width = 1.0 / (geom.n if geom.is_zigzag else geom.m)
        w = _strip_weights(grid, width)
        return complex((w[:, None] * prod).sum() * grid.cell_area)
    raise ValueError(f"unknown region {region!r}")


def overlap_decomposition(f: SurfaceFunction, g: SurfaceFunction) -> np.ndarray:
    """Contributions of the 2L bands ``T_l(band_0)``, l = 0 .. 2L-1, to the torus integral."""
    grid = f.grid
    L2 = 2 * grid.geom.L
    if grid.n_z % L2:
        raise GridMismatch(f"n_z={grid.n_z} is not a multiple of 2L={L2}")
    prod = (np.conj(f.values) * g.values).sum(axis=0) * grid.cell_area
    return prod.reshape(L2, grid.n_z // L2).sum(axis=1)


# -- differential operators ----------------------------------------------------

def _derivative_symbols(grid: TorusGrid) -> tuple[np.ndarray, np.ndarray]:
    """Fourier symbols of d/dtheta and d/dz on the grid (Nyquist modes dropped)."""
    geom = grid.geom
    _, P = grid.basis
    p = np.fft.fftfreq(grid.n_theta, 1.0 / grid.n_theta)
    q = np.fft.fftfreq(grid.n_z, 1.0 / grid.n_z)
    if grid.n_theta % 2 == 0:
        p[grid.n_theta // 2] = 0.0
    if grid.n_z % 2 == 0:
        q[grid.n_z // 2] = 0.0
    Pn, Qn = np.meshgrid(p, q, indexing="ij")
    d_theta = 1j * Pn
    d_z = (2j * math.pi * Qn - (P[0] / geom.r_t) * d_theta) / P[1]
    return d_theta, d_z


def _derivatives(f: SurfaceFunction):
    d_theta, d_z = _derivative_symbols(f.grid)
    F = np.fft.fft2(f.values)
    ift = np.fft.ifft2
    return ift(d_theta * F), ift(d_z * F), ift(d_theta**2 * F), ift(d_z**2 * F)


def laplacian(f: SurfaceFunction) -> SurfaceFunction:
    """Surface Laplacian ``(1/r_t^2) d^2/dtheta^2 + d^2/dz^2``."""
    _, _, f_tt, f_zz = _derivatives(f)
    return f.with_values(f_tt / f.geom.r_t**2 + f_zz)


def apply_hamiltonian(f: SurfaceFunction, cfg: SchrodingerConfig) -> SurfaceFunction:
    theta, z = f.grid.theta_z()
    return f.with_values(-cfg.kinetic_prefactor * laplacian(f).values + cfg.V(theta, z) * f.values)


def modified_laplacian(u: SurfaceFunction, k: KPoint) -> SurfaceFunction:
    """Operator acting on ``u`` once ``psi = e^{i k.r} u`` is substituted into the Laplacian."""
    r2 = u.geom.r_t**2
    theta, _ = u.grid.theta_z()
    u_t, u_z, u_tt, u_zz = _derivatives(u)
    s = np.sin(k.tau - theta)
    c = np.cos(k.tau - theta)
    out = (u_tt / r2 + u_zz
           + (2j * math.pi / r2) * s * u_t
           + 2j * k.kappa * u_z
           - (math.pi / r2) * (1j * c + math.pi * s**2) * u.values
           - k.kappa**2 * u.values)
    return u.with_values(out)


def modified_operator_apply(u: SurfaceFunction, k: KPoint, geom: TubeGeometry,
                            cfg: SchrodingerConfig) -> SurfaceFunction:
    """``(-hbar^2/2m) lap~ u + V u``, the equation obeyed by the periodic factor u."""
    if u.geom != geom:
        raise GridMismatch("function was built on a different tube")
    theta, z = u.grid.theta_z()
    return u.with_values(-cfg.kinetic_prefactor * modified_laplacian(u, k).values + cfg.V(theta, z) * u.values)


def factorization_residual(u: SurfaceFunction, k: KPoint, cfg: SchrodingerConfig) -> float:
    """``max |H(e^{ik.r} u) - e^{ik.r} H~ u|``."""
    pw = plane_wave(k, u.grid)
    lhs = apply_hamiltonian(u.with_values(pw.values * u.values), cfg).values
    rhs = pw.values * modified_operator_apply(u, k, u.geom, cfg).values
    return float(np.max(np.abs(lhs - rhs)))


# -- potentials ------------------------------------------------------------------

def lattice_potential(geom: TubeGeometry, depth: float = 1.0) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """A potential with the full rotation-translation symmetry of the tube.

    Built from the three shortest reciprocal vectors of the unrolled sheet, so
    it is invariant under every ``T_j^±``.
    """
    ap, am = flat_lattice(geom)
    G = 2 * math.pi * np.linalg.inv(np.column_stack([ap, am])).T
    g1, g2 = G[:, 0], G[:, 1]
    gs = (g1, g2, g1 + g2)
    r_t = geom.r_t

    def V(theta, z):
        x = r_t * np.asarray(theta)
        return depth * sum(np.cos(g[0] * x + g[1] * np.asarray(z)) for g in gs)

    return V


def potential_symmetry_defect(cfg: SchrodingerConfig, grid: TorusGrid, branch: str, j: int = 1) -> float:
    """``max |V(T_j r) - V(r)|`` over the grid points."""
    theta, z = grid.theta_z()
    t = make_transform(grid.geom, branch, j)
    return float(np.max(np.abs(cfg.V(theta + t.dtheta, z + t.dz) - cfg.V(theta, z))))


def naive_periodicity_residual(f: SurfaceFunction, k: KPoint, branch: str, j: int = 1) -> float:
    """``max |u(T_j r) - u(r)|`` for ``u = e^{-ik.r} f``, with k left untransformed.

    For a genuine Bloch function this is O(1): u is periodic only when the
    wave vector is carried along by the reciprocal transformation.
    """
    u = f.with_values(np.conj(plane_wave(k, f.grid).values) * f.values)
    t = make_transform(f.geom, branch, j)
    scale = float(np.max(np.abs(u.values))) or 1.0
    return float(np.max(np.abs(transform_function(u, t).values - u.values))) / scale


def smooth_test_function(geom: TubeGeometry, n_theta: int | None = None, n_z: int | None = None) -> SurfaceFunction:
    """A Gaussian of width a/2 on a straight cylinder one cyclic period long.

    On that grid ``e^{i kappa_nu z}`` is periodic, so the plane-wave factor
    can be differentiated spectrally together with u.  Grid sizes left as
    None are chosen to resolve the Gaussian (at most 0.3 angstrom spacing).
    """
    length = 2 * geom.L * geom.c(geom.axial_branch)
    if n_theta is None:
        n_theta = max(64, 2 * math.ceil(2 * math.pi * geom.r_t / 0.6))
    if n_z is None:
        n_z = max(64, 2 * math.ceil(length / 0.6))
    grid = TorusGrid.straight(geom, length, n_theta, n_z)
    return orbital_function(grid, ModelOrbital(0.5 * geom.a))
