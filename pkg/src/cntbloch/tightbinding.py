"""Two-band tight-binding model on the quantized wave-number grid.

One p_z-like orbital per sublattice gives 2x2 Hamiltonian and overlap
matrices.  Neighbor cells are addressed by their lattice offset ``(j, s)``,
meaning ``j a+ + s a-``; an offset contributes the phase ``e^{i kappa dz}``
with ``dz = j c+ - s c-`` its axial displacement.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .geometry import TubeGeometry
from .reciprocal import sample_kappa
from .transforms import AtomSite, CellIndex, site_point

# First-shell A -> B bonds, as the cell offset (j, s) of the B atom: the bond
# inside the cell, the one across a+ and the one across a-.
FIRST_SHELL = ((0, 0), (-1, 0), (0, -1))
# Second shell (same sublattice): +-a+, +-a-, +-(a+ - a-).
SECOND_SHELL = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))

METAL_GAP = 1e-6  # eV
_NEIGHBOR_SLACK = 1e-9


class Model(str, enum.Enum):
    FLAT = "Flat"
    CURVATURE_AWARE = "CurvatureAware"


class ParamsError(ValueError):
    """Invalid tight-binding parameters; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class SecularError(ValueError):
    pass


@dataclass(frozen=True)
class TBParams:
    eps_2p: float = 0.0
    t1: float = 2.7
    t2: float = 0.1
    s1: float = 0.1
    s2: float = 0.0
    model: Model = Model.FLAT
    t0: float = 2.7
    d_ref: float = 2.46 / math.sqrt(3.0)
    beta: float = 2.0

    def __post_init__(self):
        for f in fields(self):
            if f.name == "model":
                continue
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParamsError(f.name, f"expected a finite number, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        try:
            object.__setattr__(self, "model", Model(self.model))
        except ValueError:
            raise ParamsError("model", f"expected one of {[m.value for m in Model]}, got {self.model!r}") from None
        if self.t1 < 0:
            raise ParamsError("t1", "must be >= 0")
        if not abs(self.s1) < 1:
            raise ParamsError("s1", "must satisfy |s1| < 1")
        if self.beta < 0:
            raise ParamsError("beta", "must be >= 0")
        if self.d_ref <= 0:
            raise ParamsError("d_ref", "must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "TBParams":
        if not isinstance(data, dict):
            raise ParamsError("<root>", "parameter file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ParamsError(key, "unknown parameter")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "TBParams":
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParamsError("<json>", f"malformed JSON ({exc.msg} at line {exc.lineno})") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.value
        return d


@dataclass(frozen=True)
class HSMatrices:
    H: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    kappa: float = 0.0


@dataclass(frozen=True)
class BandStructure:
    nus: np.ndarray = field(repr=False)
    kappas: np.ndarray = field(repr=False)
    eps_plus: np.ndarray = field(repr=False)
    eps_minus: np.ndarray = field(repr=False)
    Q_values: np.ndarray = field(repr=False)
    gap: float
    gap_kappa: float
    cyclic: bool = True  # False for a dense sweep off the quantized grid


# -- hopping integrals ------------------------------------------------------------

def _check_neighbor(site_i: AtomSite, site_j: AtomSite, shell: int, bond: float) -> float:
    d = float(np.linalg.norm(site_i.position - site_j.position))
    same = site_i.sublattice == site_j.sublattice
    if shell == 1:
        ok = not same and 0.7 * bond < d <= bond * (1 + _NEIGHBOR_SLACK)
    elif shell == 2:
        ref = math.sqrt(3.0) * bond
        ok = same and 0.7 * ref < d <= ref * (1 + _NEIGHBOR_SLACK)
    else:
        raise ValueError("shell must be 1 or 2")
    if not ok:
        raise ValueError(f"sites at distance {d:.6f} A are not shell-{shell} neighbors")
    return d


def hopping_value(site_i: AtomSite, site_j: AtomSite, params: TBParams, shell: int,
                  bond_length: float | None = None) -> float:
    """Hopping integral between two neighboring atoms, in eV.

    ``bond_length`` is the flat-sheet C-C distance used to recognise
    neighbors; it defaults to ``params.d_ref``.  In the curvature-aware model
    the second shell decays from the flat second-neighbor distance and scales
    ``t2``, so both shells reduce to the flat values on a flat sheet.
    """
    bond = params.d_ref if bond_length is None else bond_length
    d = _check_neighbor(site_i, site_j, shell, bond)
    if params.model is Model.FLAT:
        return -params.t1 if shell == 1 else -params.t2
    align = min(1.0, max(0.0, float(site_i.normal @ site_j.normal)))
    if shell == 1:
        return -params.t0 * (params.d_ref / d) ** params.beta * align
    return -params.t2 * (math.sqrt(3.0) * params.d_ref / d) ** params.beta * align


def _site(geom: TubeGeometry, j: int, s: int, sublattice: str) -> AtomSite:
    cell = CellIndex(s, j)
    pt = site_point(geom, cell, sublattice)
    return AtomSite(pt.cartesian(geom.r_t), sublattice, cell, pt)


def _axial(geom: TubeGeometry, j: int, s: int) -> float:
    return j * geom.c_plus - s * geom.c_minus


def shell_hoppings(geom: TubeGeometry, params: TBParams) -> tuple[list[float], list[float]]:
    """Hoppings of the three first-shell and six second-shell neighbors of the A atom."""
    bond = geom.a / math.sqrt(3.0)
    a0 = _site(geom, 0, 0, "A")
    h1 = [hopping_value(a0, _site(geom, j, s, "B"), params, 1, bond) for j, s in FIRST_SHELL]
    h2 = [hopping_value(a0, _site(geom, j, s, "A"), params, 2, bond) for j, s in SECOND_SHELL]
    return h1, h2


def _phases(geom: TubeGeometry, kappa: float, offsets) -> np.ndarray:
    return np.array([np.exp(1j * kappa * _axial(geom, j, s)) for j, s in offsets])


def build_HS_first_nn(geom: TubeGeometry, params: TBParams, kappa_nu: float) -> HSMatrices:
    """``H_AB = h0 + h+ e^{i kappa c+} + h- e^{-i kappa c-}``; zigzag has ``c+ = 0``."""
    h1, _ = shell_hoppings(geom, params)
    # the a+ neighbor carries e^{+i kappa c+}, the a- neighbor e^{-i kappa c-}
    ph = np.conj(_phases(geom, kappa_nu, FIRST_SHELL))
    ph_conj = np.conj(ph)
    H_AB = complex(np.dot(h1, ph))
    H_BA = complex(np.dot(h1, ph_conj))
    S_AB = complex(params.s1 * ph.sum())
    S_BA = complex(params.s1 * ph_conj.sum())
    H = np.array([[params.eps_2p, H_AB], [H_BA, params.eps_2p]], dtype=complex)
    S = np.array([[1.0, S_AB], [S_BA, 1.0]], dtype=complex)
    return HSMatrices(H, S, float(kappa_nu))


def build_HS_second_nn(geom: TubeGeometry, params: TBParams, kappa_nu: float) -> HSMatrices:
    """First-shell matrices plus the six phased second-shell terms on the diagonal."""
    first = build_HS_first_nn(geom, params, kappa_nu)
    _, h2 = shell_hoppings(geom, params)
    ph = _phases(geom, kappa_nu, SECOND_SHELL)
    onsite_h = params.eps_2p + complex(np.dot(h2, ph))
    onsite_s = 1.0 + complex(params.s2 * ph.sum())
    H = first.H.copy()
    S = first.S.copy()
    H[0, 0] = H[1, 1] = onsite_h
    S[0, 0] = S[1, 1] = onsite_s
    return HSMatrices(H, S, float(kappa_nu))


def build_HS(geom: TubeGeometry, params: TBParams, kappa_nu: float, order: int) -> HSMatrices:
    if order == 1:
        return build_HS_first_nn(geom, params, kappa_nu)
    if order == 2:
        return build_HS_second_nn(geom, params, kappa_nu)
    raise ValueError("order must be 1 or 2")


# -- secular equation ---------------------------------------------------------------

def secular_coefficients(hs: HSMatrices) -> tuple[float, float, float]:
    """``(|S|, Q, |H|)`` with ``det(H - eps S) = |S| eps^2 + Q eps + |H|``."""
    H, S = hs.H, hs.S
    det_s = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
    det_h = H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]
    Q = S[0, 1] * H[1, 0] + S[1, 0] * H[0, 1] - S[0, 0] * H[1, 1] - S[1, 1] * H[0, 0]
    scale = max(1.0, abs(det_s), abs(Q), abs(det_h))
    for name, v in (("det S", det_s), ("Q", Q), ("det H", det_h)):
        if abs(v.imag) > 1e-10 * scale:
            raise SecularError(f"{name} is not real ({v}); H or S is not Hermitian")
    return float(det_s.real), float(Q.real), float(det_h.real)


def discriminant(hs: HSMatrices) -> float:
    """``Q^2 - 4 |S| |H|``, regrouped so that no O(1) terms cancel.

    With ``a, b = H_AA, H_BB``, ``alpha, beta = S_AA, S_BB``, ``x = H_AB`` and
    ``y = S_AB`` it equals
    ``(alpha b - beta a)^2 + 4 [Re((alpha x - a y) conj(beta x - b y)) - Im(y conj x)^2]``.
    Near a band crossing x and y are both small, so this keeps full relative
    accuracy where the textbook form loses half the digits.
    """
    H, S = hs.H, hs.S
    a, b, x = H[0, 0].real, H[1, 1].real, H[0, 1]
    alpha, beta, y = S[0, 0].real, S[1, 1].real, S[0, 1]
    cross = ((alpha * x - a * y) * np.conj(beta * x - b * y)).real
    im = (y * np.conj(x)).imag
    return float((alpha * b - beta * a) ** 2 + 4 * (cross - im * im))


def solve_secular(hs: HSMatrices, disc_tol: float = 1e-12) -> tuple[float, float]:
    """Roots ``(eps_plus, eps_minus)`` of ``det(H - eps S) = 0``, eps_plus >= eps_minus.

    ``eps = (-Q +- sqrt(Q^2 - 4|S||H|)) / (2|S|)``.
    """
    for M, name in ((hs.H, "H"), (hs.S, "S")):
        if np.max(np.abs(M - M.conj().T)) > 1e-12 * max(1.0, float(np.max(np.abs(M)))):
            raise SecularError(f"{name} is not Hermitian")
    det_s, Q, det_h = secular_coefficients(hs)
    if det_s <= 0 or hs.S[0, 0].real <= 0:
        raise SecularError(f"overlap matrix is not positive definite (det S = {det_s:.3e})")
    disc = discriminant(hs)
    if disc < 0:
        if disc < -disc_tol * max(1.0, Q * Q):
            raise SecularError(f"negative discriminant {disc:.3e}; input is not Hermitian")
        disc = 0.0
    root = math.sqrt(disc)
    # cancellation-free pair of roots
    q = -0.5 * (Q + math.copysign(root, Q))
    if q == 0.0:
        r1 = r2 = 0.0
    else:
        r1, r2 = q / det_s, det_h / q
    return max(r1, r2), min(r1, r2)


def det_residual(hs: HSMatrices, eps: float) -> float:
    M = hs.H - eps * hs.S
    return float(abs(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]))


# -- band sweeps ------------------------------------------------------------------------

def band_structure(geom: TubeGeometry, params: TBParams, L: int | None = None, order: int = 1,
                   dense: int | None = None) -> BandStructure:
    """Both bands over the quantized grid ``kappa_nu``, nu = -L .. L-1.

    ``dense=n`` instead samples n evenly spaced kappa over the same interval;
    those points do not satisfy the cyclic condition and the result is
    marked ``cyclic=False``.
    """
    L = geom.L if L is None else L
    if L < 2:
        raise ValueError("L must be >= 2")
    if dense is not None:
        if dense < 2:
            raise ValueError("dense sweep needs at least 2 points")
        c = geom.c(geom.axial_branch)
        kappas = np.linspace(-math.pi / c, math.pi / c, dense, endpoint=False)
        nus = np.arange(dense)
    else:
        kappas = sample_kappa(geom, L)
        nus = np.arange(-L, L)
    plus, minus, qs = [], [], []
    for kappa in kappas:
        hs = build_HS(geom, params, float(kappa), order)
        ep, em = solve_secular(hs)
        plus.append(ep)
        minus.append(em)
        qs.append(secular_coefficients(hs)[1])
    plus, minus = np.array(plus), np.array(minus)
    diff = plus - minus
    i = int(np.argmin(diff))
    return BandStructure(nus, np.asarray(kappas, dtype=float), plus, minus, np.array(qs),
                         float(diff[i]), float(kappas[i]), dense is None)


def band_gap(bands: BandStructure) -> tuple[float, str]:
    gap = float(np.min(bands.eps_plus - bands.eps_minus))
    return gap, "metal-like" if gap < METAL_GAP else "gapped"
