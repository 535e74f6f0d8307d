"""Reciprocal tube, its Brillouin hexagon and the wave-vector domains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import CharacteristicVectors, SymmetryClass, TubeGeometry, _sign
from .transforms import RotTranslation


@dataclass(frozen=True)
class ReciprocalTube:
    symmetry: SymmetryClass
    r_tilde: float
    b_tilde_plus: np.ndarray = field(repr=False)
    b_tilde_minus: np.ndarray = field(repr=False)
    b_prime_plus: float
    b_prime_minus: float
    b_dprime_plus: float
    b_dprime_minus: float
    a_tilde: float | None
    alpha_plus: float
    alpha_minus: float
    c_plus: float
    c_minus: float

    @property
    def b_plus(self) -> np.ndarray:
        """Unrolled reciprocal lattice vector ``<b'_+, b''_+>``."""
        return np.array([self.b_prime_plus, self.b_dprime_plus])

    @property
    def b_minus(self) -> np.ndarray:
        return np.array([self.b_prime_minus, self.b_dprime_minus])

    @property
    def parallelogram_area(self) -> float:
        bp, bm = self.b_plus, self.b_minus
        return abs(bp[0] * bm[1] - bp[1] * bm[0])


@dataclass(frozen=True)
class KPoint:
    tau: float
    kappa: float

    def cartesian(self, r_tilde: float) -> np.ndarray:
        return np.array([-r_tilde * math.sin(self.tau), r_tilde * math.cos(self.tau), self.kappa])


@dataclass(frozen=True)
class KDomain:
    """Half-open box ``[kappa_min, kappa_max) x [tau_min, tau_max)``.

    For the zigzag rotation branch ``kappa`` is an unconstrained constant and
    the kappa bounds are ``None``.
    """

    kappa_min: float | None
    kappa_max: float | None
    tau_min: float
    tau_max: float
    branch: str
    rotation_only: bool = False

    def contains(self, k: KPoint) -> bool:
        ok_tau = self.tau_min <= k.tau < self.tau_max
        if self.rotation_only:
            return ok_tau
        return ok_tau and self.kappa_min <= k.kappa < self.kappa_max


@dataclass(frozen=True)
class BrillouinHexagon:
    vertices: np.ndarray  # (k, 2), counter-clockwise, unrolled (x~, z~)
    area: float

    def rolled(self, r_tilde: float) -> np.ndarray:
        """Vertices wrapped onto the reciprocal tube, as 3D points."""
        tau = self.vertices[:, 0] / r_tilde
        return np.column_stack([-r_tilde * np.sin(tau), r_tilde * np.cos(tau), self.vertices[:, 1]])


@dataclass(frozen=True)
class DualProducts:
    plus_plus: float
    minus_minus: float
    plus_minus: float
    minus_plus: float
    closed_plus_minus: float | None
    closed_minus_plus: float | None

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.plus_plus, self.minus_minus, self.plus_minus, self.minus_plus


class BrillouinError(ValueError):
    pass


def reciprocal_tube(geom: TubeGeometry) -> ReciprocalTube:
    rt = math.pi / geom.r_t
    ap, am = geom.alpha_plus, geom.alpha_minus
    bpp = 0.0 if geom.is_zigzag else 2 * math.pi / geom.c_plus
    bpm = -2 * math.pi / geom.c_minus
    b_plus = np.array([-rt * math.sin(ap), rt * math.cos(ap), bpp])
    b_minus = np.array([-rt * math.sin(am), rt * math.cos(am), bpm])
    a_tilde = None
    if geom.symmetry is SymmetryClass.ARMCHAIR:
        n = geom.n
        a_tilde = 2 * math.pi / geom.a * math.sqrt(4 + math.pi**4 / (3 * n**4))
    return ReciprocalTube(
        symmetry=geom.symmetry, r_tilde=rt,
        b_tilde_plus=b_plus, b_tilde_minus=b_minus,
        b_prime_plus=ap * rt, b_prime_minus=am * rt,
        b_dprime_plus=bpp, b_dprime_minus=bpm, a_tilde=a_tilde,
        alpha_plus=ap, alpha_minus=am, c_plus=geom.c_plus, c_minus=geom.c_minus,
    )


def dual_products(cv: CharacteristicVectors, rt: ReciprocalTube) -> DualProducts:
    """``a^_i . b~_j`` for i, j in {+, -}, with the closed-form cross terms where finite.

    For zigzag tubes ``c+ = 0`` makes the ``c-/c+`` closed form singular; that
    entry is returned as ``None`` and only the direct product is reported.
    """
    pp = float(cv.a_hat_plus @ rt.b_tilde_plus)
    mm = float(cv.a_hat_minus @ rt.b_tilde_minus)
    pm = float(cv.a_hat_plus @ rt.b_tilde_minus)
    mp = float(cv.a_hat_minus @ rt.b_tilde_plus)
    base = math.pi * math.cos(rt.alpha_plus - rt.alpha_minus)
    closed_pm = base - 2 * math.pi * rt.c_plus / rt.c_minus
    closed_mp = None if rt.c_plus == 0 else base - 2 * math.pi * rt.c_minus / rt.c_plus
    return DualProducts(pp, mm, pm, mp, closed_pm, closed_mp)


def _gauss_reduce(v1: np.ndarray, v2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v1, v2 = v1.astype(float), v2.astype(float)
    while True:
        if v1 @ v1 > v2 @ v2:
            v1, v2 = v2, v1
        mu = round(float(v1 @ v2) / float(v1 @ v1))
        if mu == 0:
            return v1, v2
        v2 = v2 - mu * v1


def _clip(poly: list[np.ndarray], g: np.ndarray) -> list[np.ndarray]:
    """Keep the part of ``poly`` with ``x . g <= |g|^2 / 2``."""
    h = 0.5 * float(g @ g)
    out = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        fp, fq = float(p @ g) - h, float(q @ g) - h
        if fp <= 0:
            out.append(p)
        if fp * fq < 0:
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    return out


def _polygon_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def brillouin_zone(rt: ReciprocalTube, dedup_tol: float = 1e-10) -> BrillouinHexagon:
    """Voronoi cell of the origin of the unrolled reciprocal lattice.

    The basis is Gauss-reduced first; the cell is then cut out by the
    perpendicular bisectors towards the 8 lattice points surrounding the
    origin in the reduced basis, which contain every Voronoi-relevant vector.
    """
    bp, bm = rt.b_plus, rt.b_minus
    cross = bp[0] * bm[1] - bp[1] * bm[0]
    if abs(cross) <= 1e-12 * np.linalg.norm(bp) * np.linalg.norm(bm):
        raise BrillouinError("reciprocal lattice vectors are collinear")
    v1, v2 = _gauss_reduce(bp, bm)
    big = 4 * (np.linalg.norm(v1) + np.linalg.norm(v2))
    poly = [np.array(p) for p in ((-big, -big), (big, -big), (big, big), (-big, big))]
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            if i or j:
                poly = _clip(poly, i * v1 + j * v2)
    verts: list[np.ndarray] = []
    for p in poly:
        if not any(np.linalg.norm(p - q) <= dedup_tol for q in verts):
            verts.append(p)
    if len(verts) > 1 and np.linalg.norm(verts[0] - verts[-1]) <= dedup_tol:
        verts.pop()
    v = np.array(verts)
    area = _polygon_area(v)
    if area < 0:
        v = v[::-1]
        area = -area
    return BrillouinHexagon(v, area)


def k_domain(geom: TubeGeometry, branch: str) -> KDomain:
    sign = _sign(branch)
    alpha = geom.alpha(branch)
    label = "shared" if geom.symmetry is SymmetryClass.ARMCHAIR else ("+" if sign > 0 else "-")
    if geom.is_zigzag and sign > 0:
        return KDomain(None, None, -alpha / 2, alpha / 2, "+", rotation_only=True)
    bound = math.pi / geom.c(branch)
    return KDomain(-bound, bound, -alpha / 2, alpha / 2, label)


def sample_kappa(geom: TubeGeometry, L: int | None = None) -> np.ndarray:
    """Quantized ``kappa_nu = pi nu / (L c)``, nu = -L .. L-1, on the cyclic branch.

    ``c`` is ``c_plus`` for armchair/chiral tubes and ``c_minus`` (= sqrt3 a/2)
    for zigzag tubes.
    """
    L = geom.L if L is None else L
    if L < 1:
        raise ValueError("L must be >= 1")
    c = geom.c(geom.axial_branch)
    nu = np.arange(-L, L)
    return math.pi * nu / (L * c)


def reciprocal_transform(rt: ReciprocalTube, branch: str, j: int) -> RotTranslation:
    """``T~_j^±`` acting on (tau, kappa): rotate by j*alpha, shift kappa by ±2*pi*j/c."""
    if _sign(branch) > 0:
        return RotTranslation(j * rt.alpha_plus, j * rt.b_dprime_plus)
    return RotTranslation(j * rt.alpha_minus, j * rt.b_dprime_minus)


def apply_k(t: RotTranslation, k: KPoint) -> KPoint:
    return KPoint(k.tau + t.dtheta, k.kappa + t.dz)
