"""Invariant suites and reference-table comparison shared by the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import bloch, tightbinding as tb
from .geometry import (
    ChiralSpec, SymmetryClass, characteristic_vectors, chiral_formulas, compute_geometry,
)
from .reciprocal import brillouin_zone, dual_products, reciprocal_tube, sample_kappa
from .transforms import atom_positions, closure_defect, enumerate_cells, flat_lattice, neighbor_shells

TABLE_TOL = 5e-5

# Published chord ratios: armchair a*, then (a+*, a-*) for chiral and zigzag tubes.
REFERENCE_TABLES: dict[str, dict[tuple[int, int], tuple[float, ...]]] = {
    "armchair": {(4, 4): (0.9809,), (5, 5): (0.9877,), (6, 6): (0.9915,), (10, 10): (0.9969,), (20, 20): (0.9992,)},
    "chiral": {
        (4, 2): (0.9540, 0.9811), (6, 1): (0.9635, 0.9947), (6, 5): (0.9887, 0.9911),
        (7, 4): (0.9867, 0.9936), (8, 3): (0.9854, 0.9957),
    },
    "zigzag": {
        (5, 0): (0.9355, 0.9959), (6, 0): (0.9549, 0.9972), (8, 0): (0.9745, 0.9984),
        (10, 0): (0.9836, 0.9990), (20, 0): (0.9959, 0.9997),
    },
}


@dataclass(frozen=True)
class TableRow:
    table: str
    n: int
    m: int
    computed: tuple[float, ...]
    reference: tuple[float, ...]

    @property
    def deltas(self) -> tuple[float, ...]:
        return tuple(c - r for c, r in zip(self.computed, self.reference))

    @property
    def ok(self) -> bool:
        return all(abs(d) <= TABLE_TOL for d in self.deltas)


def table_rows() -> list[TableRow]:
    rows = []
    for table, entries in REFERENCE_TABLES.items():
        for (n, m), ref in entries.items():
            ratios = compute_geometry(ChiralSpec(n, m)).chord_ratios
            computed = ratios[:1] if table == "armchair" else ratios
            rows.append(TableRow(table, n, m, tuple(computed), ref))
    return rows


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    informational: bool = False
    note: str = ""

    @property
    def status(self) -> str:
        if self.informational:
            return "informational"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        text = f"{self.name} {self.status}  residual={self.value:.9f}  tol={self.tol:.1e}"
        return f"{text}  ({self.note})" if self.note else text


def _below(name: str, value: float, tol: float, note: str = "") -> CheckResult:
    return CheckResult(name, float(value), tol, bool(value < tol), note=note)


def _above(name: str, value: float, floor: float, note: str = "") -> CheckResult:
    return CheckResult(name, float(value), floor, bool(value >= floor), note=note)


# -- oracles ------------------------------------------------------------------------

def generalized_eigenvalues(hs: tb.HSMatrices) -> tuple[float, float]:
    """``(eps_plus, eps_minus)`` from a dense Hermitian-definite solve."""
    w = scipy.linalg.eigh(hs.H, hs.S, eigvals_only=True)
    return float(w[1]), float(w[0])


def secular_mismatch(hs: tb.HSMatrices) -> tuple[float, float]:
    """Relative root mismatch against the dense solve, and the worse det residual over ``||H||_F^2``."""
    ep, em = tb.solve_secular(hs)
    op, om = generalized_eigenvalues(hs)
    scale = max(abs(op), abs(om), 1e-300)
    rel = max(abs(ep - op), abs(em - om)) / scale
    hnorm2 = float(np.linalg.norm(hs.H) ** 2) or 1.0
    det = max(tb.det_residual(hs, ep), tb.det_residual(hs, em)) / hnorm2
    return rel, det


# -- suites -----------------------------------------------------------------------------

def geometry_checks(spec: ChiralSpec) -> list[CheckResult]:
    geom = compute_geometry(spec)
    out = [_below("theta_plus + theta_minus = pi/3", abs(geom.theta_plus + geom.theta_minus - math.pi / 3), 1e-12)]
    general = chiral_formulas(spec)
    worst = max(abs(general[k] - getattr(geom, k)) for k in general)
    out.append(_below("class closed forms = general formulas", worst, 1e-12))
    ap, am = flat_lattice(geom)
    t_vec = geom.t1 * ap + geom.t2 * am
    out.append(_below("|T| = |t1 a+ + t2 a-|", abs(np.hypot(*t_vec) - geom.t_len), 1e-10))
    out.append(_below("T is perpendicular to the chiral vector", abs(t_vec[0]), 1e-10))
    return out


def transform_checks(spec: ChiralSpec) -> list[CheckResult]:
    geom = compute_geometry(spec, n_cells=3 * spec.cell_multiple)
    out = [_below("finite-tube closure defect", closure_defect(geom), 1e-12)]
    cells = enumerate_cells(geom)
    out.append(_below("cell listing is a bijection", abs(len(set(cells)) - geom.n_cells), 0.5))
    atoms = atom_positions(geom)
    shells = neighbor_shells(atoms, geom, shells=2)
    bad = sum(
        sum(1 for nb in entry[1] if nb.site.sublattice == atoms[i].sublattice)
        + sum(1 for nb in entry[2] if nb.site.sublattice != atoms[i].sublattice)
        for i, entry in enumerate(shells)
    )
    out.append(_below("neighbor shells alternate sublattice", bad, 0.5))
    return out


def reciprocal_checks(spec: ChiralSpec) -> list[CheckResult]:
    geom = compute_geometry(spec)
    rt = reciprocal_tube(geom)
    duals = dual_products(characteristic_vectors(geom), rt)
    diag = max(abs(duals.plus_plus - 3 * math.pi), abs(duals.minus_minus - 3 * math.pi))
    name = "a_hat·b_tilde diag = 3π"
    out = []
    if geom.is_zigzag:
        note = f"a+·b+={duals.plus_plus:.9f} a-·b-={duals.minus_minus:.9f}; rotation-only + branch"
        out.append(CheckResult(name, diag, 1e-12, False, informational=True, note=note))
        out.append(_below("a_hat-·b_tilde- = 3π", abs(duals.minus_minus - 3 * math.pi), 1e-12))
        out.append(_below("a_hat+·b_tilde- closed form", abs(duals.plus_minus - duals.closed_plus_minus), 1e-12))
    else:
        out.append(_below(name, diag, 1e-12))
        cross = max(abs(duals.plus_minus - duals.closed_plus_minus), abs(duals.minus_plus - duals.closed_minus_plus))
        out.append(_below("a_hat·b_tilde cross = closed form", cross, 1e-12))
    bz = brillouin_zone(rt)
    rel = abs(bz.area - rt.parallelogram_area) / rt.parallelogram_area
    out.append(_below("hexagon area = parallelogram area (rel)", rel, 1e-10, note=f"{len(bz.vertices)} vertices"))
    return out


def bloch_checks(spec: ChiralSpec, L: int = 2) -> list[CheckResult]:
    geom = compute_geometry(spec, n_cells=L * spec.cell_multiple)
    grid = bloch.resolved_grid(geom)
    orb = bloch.ModelOrbital.default(geom)
    kappas = sample_kappa(geom)
    worst = 0.0
    for kappa in kappas:
        phi = bloch.bloch_sum(geom, orb, float(kappa), "A", grid)
        for branch in ("+", "-"):
            worst = max(worst, bloch.verify_bloch_property(phi, geom, float(kappa), branch))
    out = [_below("Bloch sum transformation law", worst, 1e-10)]
    half = float(kappas[0] + 0.5 * (kappas[1] - kappas[0]))
    off = bloch.verify_bloch_property(bloch.bloch_sum(geom, orb, half, "A", grid), geom, half, geom.axial_branch)
    out.append(_above("off-grid kappa breaks closure", off, 0.1))

    seed = bloch.orbital_function(grid, orb)
    psis = [bloch.cyclic_eigenfunction(seed, geom, float(k)) for k in kappas]
    norm = max(bloch.overlap_integral(p, p).real for p in psis)
    cross = max(
        (abs(bloch.overlap_integral(psis[i], psis[j])) for i in range(len(psis)) for j in range(len(psis)) if i != j),
        default=0.0,
    )
    out.append(_below("cyclic eigenfunctions orthogonal (rel)", cross / norm, 1e-8))

    cfg = bloch.SchrodingerConfig(potential=bloch.lattice_potential(geom, 1.0))
    u = bloch.smooth_test_function(geom)
    k = bloch.KPoint(0.3, float(kappas[1]))
    out.append(_below("modified operator factorization", bloch.factorization_residual(u, k, cfg), 1e-6))
    return out


def tightbinding_checks(spec: ChiralSpec, L: int = 3) -> list[CheckResult]:
    geom = compute_geometry(spec, n_cells=L * spec.cell_multiple)
    kappas = sample_kappa(geom)
    models = (tb.TBParams(s2=0.02), tb.TBParams(model="CurvatureAware", s2=0.02))
    rel = det = herm = 0.0
    for params in models:
        for order in (1, 2):
            for kappa in kappas:
                hs = tb.build_HS(geom, params, float(kappa), order)
                r, d = secular_mismatch(hs)
                rel, det = max(rel, r), max(det, d)
                herm = max(herm, float(np.max(np.abs(hs.H - hs.H.conj().T))), float(np.max(np.abs(hs.S - hs.S.conj().T))))
    out = [
        _below("secular roots = generalized eigen solve (rel)", rel, 1e-10),
        _below("det(H - eps S) / ||H||^2", det, 1e-8),
        _below("H and S Hermitian", herm, 1e-14),
    ]
    flat0 = tb.TBParams(s1=0.0, s2=0.0)
    b1 = tb.band_structure(geom, flat0, order=1)
    out.append(_below("particle-hole symmetry", float(np.max(np.abs(b1.eps_plus + b1.eps_minus))), 1e-12))
    b2 = tb.band_structure(geom, flat0, order=2)
    split = float(np.max(np.abs((b2.eps_plus - b2.eps_minus) - (b1.eps_plus - b1.eps_minus))))
    out.append(_below("second shell leaves band splitting unchanged", split, 1e-12))
    return out


def verify_suite(spec: ChiralSpec) -> list[CheckResult]:
    return (geometry_checks(spec) + transform_checks(spec) + reciprocal_checks(spec)
            + bloch_checks(spec) + tightbinding_checks(spec))
