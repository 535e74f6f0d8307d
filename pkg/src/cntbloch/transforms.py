"""Rotation-translation group of the tube, cell enumeration and atom sites.

A rotation-translation is stored as ``(dtheta, dz)``: rotate about the tube
axis by ``dtheta`` and shift along it by ``dz``.  On the unrolled sheet it is a
plain translation by ``(r_t * dtheta, dz)``, which is why composition simply
adds components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, TubeGeometry, _sign

TWO_PI = 2 * math.pi
_SEAM_SNAP = 1e-12


def wrap_angle(theta: float) -> float:
    """Reduce to [0, 2pi), snapping values within 1e-12 of the seam to 0."""
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    if t > TWO_PI - _SEAM_SNAP or t < _SEAM_SNAP:
        t = 0.0
    return t


@dataclass(frozen=True)
class RotTranslation:
    dtheta: float = 0.0
    dz: float = 0.0

    def __matmul__(self, other: "RotTranslation") -> "RotTranslation":
        return compose(self, other)

    def inverse(self) -> "RotTranslation":
        return RotTranslation(-self.dtheta, -self.dz)

    def power(self, j: int) -> "RotTranslation":
        return RotTranslation(j * self.dtheta, j * self.dz)

    def matrix(self) -> np.ndarray:
        """3x3 rotation part acting on Cartesian (x, y, z)."""
        c, s = math.cos(self.dtheta), math.sin(self.dtheta)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def apply_cartesian(self, r: np.ndarray) -> np.ndarray:
        return self.matrix() @ np.asarray(r, dtype=float) + np.array([0.0, 0.0, self.dz])

    def is_close(self, other: "RotTranslation", tol: float = 1e-12) -> bool:
        """Equality as maps of the cylinder (rotation compared mod 2pi)."""
        d = math.remainder(self.dtheta - other.dtheta, TWO_PI)
        return abs(d) <= tol and abs(self.dz - other.dz) <= tol


IDENTITY = RotTranslation(0.0, 0.0)


@dataclass(frozen=True)
class CellIndex:
    """Cell reached by ``s`` steps of T- and ``j`` steps of T+ from the unit cell."""

    s: int
    j: int


@dataclass(frozen=True)
class TubePoint:
    theta: float
    z: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def cartesian(self, r_t: float) -> np.ndarray:
        return np.array([-r_t * math.sin(self.theta), r_t * math.cos(self.theta), self.z])


@dataclass(frozen=True)
class AtomSite:
    position: np.ndarray
    sublattice: str
    cell: CellIndex
    point: TubePoint

    @property
    def normal(self) -> np.ndarray:
        """Outward unit surface normal."""
        return np.array([-math.sin(self.point.theta), math.cos(self.point.theta), 0.0])


def compose(t1: RotTranslation, t2: RotTranslation) -> RotTranslation:
    return RotTranslation(t1.dtheta + t2.dtheta, t1.dz + t2.dz)


def apply(t: RotTranslation, p: TubePoint) -> TubePoint:
    return TubePoint(p.theta + t.dtheta, p.z + t.dz)


def make_transform(geom: TubeGeometry, branch: str, j: int) -> RotTranslation:
    """``T_j^+`` (rotate j*alpha_plus, rise j*c_plus) or ``T_j^-`` (rotate j*alpha_minus, drop j*c_minus)."""
    sign = _sign(branch)
    if sign > 0:
        return RotTranslation(j * geom.alpha_plus, j * geom.c_plus)
    return RotTranslation(j * geom.alpha_minus, -j * geom.c_minus)


def rotation(geom: TubeGeometry, j: int) -> RotTranslation:
    """Pure rotation ``R_j`` by ``j * alpha_plus`` (the zigzag ``T_j^+``)."""
    return RotTranslation(j * geom.alpha_plus, 0.0)


def cell_transform(geom: TubeGeometry, cell: CellIndex) -> RotTranslation:
    """``M_{s,j} = T_s^- T_j^+``; for zigzag this is ``R_j T_s^-``."""
    return compose(make_transform(geom, "-", cell.s), make_transform(geom, "+", cell.j))


def period_transform(geom: TubeGeometry) -> RotTranslation:
    """The identification closing the finite tube: ``T_{2L}`` along the cyclic branch."""
    return make_transform(geom, geom.axial_branch, 2 * geom.L)


def enumerate_cells(geom: TubeGeometry, order: str = "-+") -> list[CellIndex]:
    """List the N cells of the finite tube, each exactly once.

    ``order="-+"`` (default) uses ``M_{s,j} = T_s^- T_j^+`` with s in [0, m) and
    j in [-L+s, L+s); for zigzag tubes it is the rotation/translation listing
    j in [0, n), s in [-L, L).  ``order="+-"`` is the alternative listing
    ``T_j^+ T_s^-`` with j in [0, n), s in [-L'+j, L'+j), N = 2nL'.
    """
    n, m, L = geom.n, geom.m, geom.L
    if geom.is_zigzag:
        return [CellIndex(s, j) for j in range(n) for s in range(-L, L)]
    if order == "-+":
        return [CellIndex(s, j) for s in range(m) for j in range(-L + s, L + s)]
    if order == "+-":
        if geom.n_cells % (2 * n):
            raise GeometryError(f"order '+-' needs n_cells to be a multiple of {2 * n}")
        Lp = geom.n_cells // (2 * n)
        return [CellIndex(s, j) for j in range(n) for s in range(-Lp + j, Lp + j)]
    raise ValueError(f"unknown order {order!r}")


def canonical_cell(geom: TubeGeometry, cell: CellIndex) -> CellIndex:
    """Representative of ``cell`` in the default listing, modulo the chiral vector and the period."""
    n, m, L = geom.n, geom.m, geom.L
    s, j = cell.s, cell.j
    if geom.is_zigzag:
        k = j // n
        j -= k * n
        s = (s + L) % (2 * L) - L
        return CellIndex(s, j)
    k = s // m
    s -= k * m
    j -= k * n
    j = (j - (-L + s)) % (2 * L) + (-L + s)
    return CellIndex(s, j)


def closure_defect(geom: TubeGeometry) -> float:
    """Max mismatch between ``M_{s,L+s} M_{s,-L+s}^{-1}`` and the period transform, over s."""
    period = period_transform(geom)
    worst = 0.0
    if geom.is_zigzag:
        pairs = [(CellIndex(-geom.L, j), CellIndex(geom.L, j)) for j in range(geom.n)]
    else:
        pairs = [(CellIndex(s, -geom.L + s), CellIndex(s, geom.L + s)) for s in range(geom.m)]
    for lo, hi in pairs:
        diff = compose(cell_transform(geom, hi), cell_transform(geom, lo).inverse())
        worst = max(worst, abs(math.remainder(diff.dtheta - period.dtheta, TWO_PI)), abs(diff.dz - period.dz))
    return worst


# -- unrolled-sheet helpers ---------------------------------------------------

def flat_lattice(geom: TubeGeometry) -> tuple[np.ndarray, np.ndarray]:
    """``a+`` and ``a-`` in unrolled (arc length, z) coordinates."""
    ap = np.array([geom.r_t * geom.alpha_plus, geom.c_plus])
    am = np.array([geom.r_t * geom.alpha_minus, -geom.c_minus])
    return ap, am


def torus_lattice(geom: TubeGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Circumference vector ``C`` and period vector ``P`` of the finite tube, unrolled."""
    t = period_transform(geom)
    return np.array([TWO_PI * geom.r_t, 0.0]), np.array([geom.r_t * t.dtheta, t.dz])


SUBLATTICE_OFFSET = {"A": 0.0, "B": 1.0 / 3.0}


def site_point(geom: TubeGeometry, cell: CellIndex, sublattice: str) -> TubePoint:
    """Rolled position of an atom: A at the origin, B displaced by (a+ + a-)/3."""
    u = SUBLATTICE_OFFSET[sublattice]
    p, q = cell.j + u, cell.s + u
    return TubePoint(p * geom.alpha_plus + q * geom.alpha_minus, p * geom.c_plus - q * geom.c_minus)


def atom_positions(geom: TubeGeometry, order: str = "-+") -> list[AtomSite]:
    """Two atoms per enumerated cell, 2N in total."""
    atoms = []
    for cell in enumerate_cells(geom, order):
        for sub in ("A", "B"):
            pt = site_point(geom, cell, sub)
            atoms.append(AtomSite(pt.cartesian(geom.r_t), sub, cell, pt))
    return atoms


@dataclass(frozen=True)
class Neighbor:
    index: int
    image: int
    distance: float
    site: AtomSite


def _image_point(geom: TubeGeometry, pt: TubePoint, k: int) -> TubePoint:
    return apply(period_transform(geom).power(k), pt)


def neighbor_shells(atoms: list[AtomSite], geom: TubeGeometry, shells: int = 2,
                    gap_tol: float = 1e-6) -> list[dict[int, list[Neighbor]]]:
    """First (3 atoms) and second (6 atoms) neighbor shells of every atom.

    Distances are 3D chords.  Periodic images under the finite-tube
    identification are included, so every atom has full shells.
    """
    if shells not in (1, 2):
        raise ValueError("shells must be 1 or 2")
    period = period_transform(geom)
    theta = np.array([s.point.theta for s in atoms])
    z = np.array([s.point.z for s in atoms])
    # the listing can spread over many periods along z; images must cover it
    reach = float(z.max() - z.min()) + 1.5 * geom.a
    K = int(math.ceil(reach / max(abs(period.dz), 1e-300))) + 1
    K = min(K, 4 * geom.n_cells)
    ks = np.arange(-K, K + 1)
    th_img = theta[None, :] + ks[:, None] * period.dtheta
    z_img = z[None, :] + ks[:, None] * period.dz
    xyz_img = np.stack([-geom.r_t * np.sin(th_img), geom.r_t * np.cos(th_img), z_img], axis=-1)
    pos = np.array([s.position for s in atoms])
    want = 3 if shells == 1 else 9
    out = []
    for i in range(len(atoms)):
        d = np.linalg.norm(xyz_img - pos[i], axis=-1)
        d[K, i] = np.inf
        flat = d.ravel()
        idx = np.argsort(flat, kind="stable")[: want + 1]
        ds = flat[idx]
        for cut in (3, 9)[:shells]:
            if ds[cut] - ds[cut - 1] < gap_tol:
                raise GeometryError(
                    f"ambiguous neighbor shell split at atom {i}: "
                    f"gap {ds[cut] - ds[cut - 1]:.3e} A < {gap_tol:g} A"
                )
        entry: dict[int, list[Neighbor]] = {}
        for shell, (lo, hi) in zip((1, 2), ((0, 3), (3, 9))):
            if shell > shells:
                break
            lst = []
            for f in idx[lo:hi]:
                kk, jj = divmod(int(f), len(atoms))
                img = int(ks[kk])
                src = atoms[jj]
                pt = _image_point(geom, src.point, img)
                site = AtomSite(pt.cartesian(geom.r_t), src.sublattice, src.cell, pt)
                lst.append(Neighbor(jj, img, float(flat[f]), site))
            entry[shell] = lst
        out.append(entry)
    return out
