"""Closed-form geometry of a rolled graphene tube (n, m).

Lengths are in angstrom, angles in radians.  The unrolled sheet uses the
lattice vectors ``a+ = a/2 (sqrt3, 1)`` and ``a- = a/2 (sqrt3, -1)``; rolling
maps ``a+`` to a rotation by ``alpha_plus`` with axial rise ``+c_plus`` and
``a-`` to a rotation by ``alpha_minus`` with axial drop ``-c_minus``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_A = 2.46  # graphene lattice constant, angstrom


class SymmetryClass(str, enum.Enum):
    ARMCHAIR = "Armchair"
    ZIGZAG = "Zigzag"
    CHIRAL = "Chiral"


class GeometryError(ValueError):
    """Raised for invalid chiral indices or cell counts."""


@dataclass(frozen=True)
class ChiralSpec:
    n: int
    m: int
    a: float = DEFAULT_A

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m:
            raise GeometryError(f"chiral indices must be integers, got ({self.n}, {self.m})")
        if self.n < 1:
            raise GeometryError(f"require n >= 1, got n={self.n}")
        if self.m < 0 or self.m > self.n:
            raise GeometryError(f"require m <= n and m >= 0, got ({self.n}, {self.m})")
        if not self.a > 0:
            raise GeometryError(f"lattice constant must be positive, got {self.a}")

    @property
    def cell_multiple(self) -> int:
        """Cell counts must be a multiple of this number (2m, or 2n for zigzag)."""
        return 2 * (self.m if self.m > 0 else self.n)


def classify(spec: ChiralSpec) -> SymmetryClass:
    if spec.m == spec.n:
        return SymmetryClass.ARMCHAIR
    if spec.m == 0:
        return SymmetryClass.ZIGZAG
    return SymmetryClass.CHIRAL


@dataclass(frozen=True)
class TubeGeometry:
    spec: ChiralSpec
    symmetry: SymmetryClass
    r_t: float
    theta_plus: float
    theta_minus: float
    alpha_plus: float
    alpha_minus: float
    c_plus: float
    c_minus: float
    chord_plus: float
    chord_minus: float
    ch_len: float
    t_len: float
    t1: int
    t2: int
    d: int
    d_R: int
    n_cells: int
    L: int

    @property
    def a(self) -> float:
        return self.spec.a

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def is_zigzag(self) -> bool:
        return self.symmetry is SymmetryClass.ZIGZAG

    @property
    def axial_branch(self) -> str:
        """Branch carrying the cyclic (Born-von Karman) condition: '+' unless zigzag."""
        return "-" if self.is_zigzag else "+"

    def alpha(self, branch: str) -> float:
        return self.alpha_plus if _sign(branch) > 0 else self.alpha_minus

    def c(self, branch: str) -> float:
        return self.c_plus if _sign(branch) > 0 else self.c_minus

    @property
    def chord_ratios(self) -> tuple[float, float]:
        return self.chord_plus / self.a, self.chord_minus / self.a


@dataclass(frozen=True)
class CharacteristicVectors:
    a_hat_plus: np.ndarray = field(repr=False)
    a_hat_minus: np.ndarray = field(repr=False)


def _sign(branch: str) -> int:
    if branch in ("+", "plus", 1, +1):
        return 1
    if branch in ("-", "minus", -1):
        return -1
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def translation_vector(spec: ChiralSpec) -> tuple[int, int, int, int, float]:
    """Return ``(t1, t2, d, d_R, |T|)`` for the shortest axial lattice translation.

    ``d_R = gcd(2n+m, n+2m)``; ``d`` is ``gcd(n, m)`` so that the usual rule
    ``d_R = 3d if (n-m) % 3d == 0 else d`` holds.
    """
    n, m = spec.n, spec.m
    d_R = math.gcd(2 * n + m, n + 2 * m)
    d = math.gcd(n, m)
    t1 = (n + 2 * m) // d_R
    t2 = -(2 * n + m) // d_R
    t_len = math.sqrt(3.0) * spec.a * math.sqrt(n * n + m * m + n * m) / d_R
    return t1, t2, d, d_R, t_len


def chiral_formulas(spec: ChiralSpec) -> dict[str, float]:
    """General (n, m) closed forms, valid for every 0 <= m <= n."""
    n, m, a = spec.n, spec.m, spec.a
    M2 = n * n + m * m + n * m
    root = math.sqrt(M2)
    ch_len = a * root
    r_t = ch_len / (2 * math.pi)
    theta_plus = math.acos(min(1.0, (2 * n + m) / (2 * root)))
    theta_minus = math.acos(min(1.0, (n + 2 * m) / (2 * root)))
    alpha_plus = math.pi * (2 * n + m) / M2
    alpha_minus = math.pi * (n + 2 * m) / M2
    c_plus = math.sqrt(3.0) * m * a / (2 * root)
    c_minus = math.sqrt(3.0) * n * a / (2 * root)
    chord_plus = math.sqrt(a**2 * math.sin(theta_plus) ** 2 + 4 * r_t**2 * math.sin(alpha_plus / 2) ** 2)
    chord_minus = math.sqrt(a**2 * math.sin(theta_minus) ** 2 + 4 * r_t**2 * math.sin(alpha_minus / 2) ** 2)
    return dict(
        r_t=r_t, theta_plus=theta_plus, theta_minus=theta_minus,
        alpha_plus=alpha_plus, alpha_minus=alpha_minus,
        c_plus=c_plus, c_minus=c_minus,
        chord_plus=chord_plus, chord_minus=chord_minus, ch_len=ch_len,
    )


def _armchair_formulas(spec: ChiralSpec) -> dict[str, float]:
    n, a = spec.n, spec.a
    alpha = math.pi / n
    chord = a * math.sqrt(0.25 + 3 * n * n / math.pi**2 * math.sin(math.pi / (2 * n)) ** 2)
    return dict(
        r_t=n * a * math.sqrt(3.0) / (2 * math.pi),
        theta_plus=math.pi / 6, theta_minus=math.pi / 6,
        alpha_plus=alpha, alpha_minus=alpha,
        c_plus=a / 2, c_minus=a / 2,
        chord_plus=chord, chord_minus=chord,
        ch_len=n * a * math.sqrt(3.0),
    )


def _zigzag_formulas(spec: ChiralSpec) -> dict[str, float]:
    n, a = spec.n, spec.a
    return dict(
        r_t=n * a / (2 * math.pi),
        theta_plus=0.0, theta_minus=math.pi / 3,
        alpha_plus=2 * math.pi / n, alpha_minus=math.pi / n,
        c_plus=0.0, c_minus=math.sqrt(3.0) * a / 2,
        chord_plus=a * n / math.pi * math.sin(math.pi / n),
        chord_minus=a * math.sqrt(0.75 + n * n / math.pi**2 * math.sin(math.pi / (2 * n)) ** 2),
        ch_len=n * a,
    )


def compute_geometry(spec: ChiralSpec, n_cells: int | None = None) -> TubeGeometry:
    """All derived scalars of tube ``spec`` with ``n_cells`` hexagonal cells.

    ``n_cells`` must be a positive multiple of ``2m`` (``2n`` for zigzag); the
    default is the smallest such count.  ``L`` is ``n_cells / (2m)`` (or
    ``n_cells / (2n)``).
    """
    symmetry = classify(spec)
    mult = spec.cell_multiple
    if n_cells is None:
        n_cells = mult
    if int(n_cells) != n_cells or n_cells <= 0 or n_cells % mult:
        raise GeometryError(
            f"n_cells={n_cells} is not a positive multiple of {mult} "
            f"(required for {symmetry.value.lower()} tube ({spec.n},{spec.m}))"
        )
    if symmetry is SymmetryClass.ARMCHAIR:
        f = _armchair_formulas(spec)
    elif symmetry is SymmetryClass.ZIGZAG:
        f = _zigzag_formulas(spec)
    else:
        f = chiral_formulas(spec)
    t1, t2, d, d_R, t_len = translation_vector(spec)
    return TubeGeometry(
        spec=spec, symmetry=symmetry, t_len=t_len, t1=t1, t2=t2, d=d, d_R=d_R,
        n_cells=int(n_cells), L=int(n_cells) // mult, **f,
    )


def characteristic_vectors(geom: TubeGeometry) -> CharacteristicVectors:
    """3D analogues of ``a+`` and ``a-``, measured from the fixed point (0, r_t, 0)."""
    r = geom.r_t
    ap = np.array([-r * math.sin(geom.alpha_plus), r * math.cos(geom.alpha_plus), geom.c_plus])
    am = np.array([-r * math.sin(geom.alpha_minus), r * math.cos(geom.alpha_minus), -geom.c_minus])
    return CharacteristicVectors(ap, am)
