import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cntbloch.geometry import ChiralSpec, GeometryError, compute_geometry
from cntbloch.transforms import (
    CellIndex, RotTranslation, TubePoint, apply, atom_positions, canonical_cell, cell_transform, closure_defect,
    compose, enumerate_cells, flat_lattice, make_transform, neighbor_shells, period_transform, wrap_angle,
)

angles = st.floats(-20, 20, allow_nan=False)
shifts = st.floats(-50, 50, allow_nan=False)


def tube(n, m, mult=3):
    spec = ChiralSpec(n, m)
    return compute_geometry(spec, n_cells=mult * spec.cell_multiple)


def test_wrap_angle_range_and_seam():
    assert wrap_angle(2 * math.pi) == 0.0
    assert wrap_angle(-1e-14) == 0.0
    assert 0 <= wrap_angle(-3.0) < 2 * math.pi


@given(angles, shifts, angles, shifts, angles, shifts)
def test_group_law(t1, z1, t2, z2, t3, z3):
    a, b, c = RotTranslation(t1, z1), RotTranslation(t2, z2), RotTranslation(t3, z3)
    assert compose(compose(a, b), c).is_close(compose(a, compose(b, c)), 1e-9)
    assert compose(a, a.inverse()).is_close(RotTranslation(), 1e-12)
    assert compose(a, b).is_close(compose(b, a), 1e-12)


@given(angles, shifts, st.floats(-5, 5), st.floats(-5, 5))
def test_cartesian_action_matches_cylinder_action(dt, dz, theta, z):
    r_t = 3.0
    t = RotTranslation(dt, dz)
    p = TubePoint(theta, z)
    direct = t.apply_cartesian(p.cartesian(r_t))
    assert np.allclose(direct, apply(t, p).cartesian(r_t), atol=1e-9)


def test_powers_add():
    g = tube(4, 2)
    for j in range(-3, 4):
        for l in range(-3, 4):
            lhs = compose(make_transform(g, "+", j), make_transform(g, "+", l))
            assert lhs.is_close(make_transform(g, "+", j + l))


def test_chiral_vector_is_a_full_turn():
    for nm in [(4, 2), (5, 5), (5, 0), (7, 3)]:
        g = tube(*nm)
        c = compose(make_transform(g, "+", g.n), make_transform(g, "-", g.m))
        assert c.is_close(RotTranslation(0.0, 0.0), 1e-12)


@pytest.mark.parametrize("nm", [(4, 2), (5, 5), (5, 0), (6, 1), (8, 3)])
def test_cell_listing_is_bijective(nm):
    g = tube(*nm)
    cells = enumerate_cells(g)
    assert len(cells) == g.n_cells
    canon = {canonical_cell(g, c) for c in cells}
    assert len(canon) == g.n_cells
    assert all(canonical_cell(g, c) == c for c in cells)


def test_alternative_listing_covers_same_cells():
    g = compute_geometry(ChiralSpec(4, 2), n_cells=16)
    a = {canonical_cell(g, c) for c in enumerate_cells(g, "-+")}
    b = {canonical_cell(g, c) for c in enumerate_cells(g, "+-")}
    assert a == b


def test_alternative_listing_requires_multiple_of_2n():
    with pytest.raises(GeometryError):
        enumerate_cells(tube(4, 2, 1), "+-")


@pytest.mark.parametrize("nm", [(4, 2), (5, 5), (5, 0), (6, 1)])
def test_closure(nm):
    assert closure_defect(tube(*nm)) < 1e-12


def test_period_is_helical_not_pure_turn():
    g = tube(4, 2)
    p = period_transform(g)
    assert abs(math.remainder(p.dtheta, 2 * math.pi)) > 1e-3


def test_flat_lattice_is_isometric():
    g = tube(6, 1)
    ap, am = flat_lattice(g)
    assert np.linalg.norm(ap) == pytest.approx(g.a)
    assert np.linalg.norm(am) == pytest.approx(g.a)
    assert ap @ am == pytest.approx(g.a**2 / 2)


@pytest.mark.parametrize("nm", [(5, 5), (4, 2), (5, 0), (10, 0), (8, 8)])
def test_neighbor_shells(nm):
    g = tube(*nm)
    atoms = atom_positions(g)
    assert len(atoms) == 2 * g.n_cells
    shells = neighbor_shells(atoms, g)
    bond = g.a / math.sqrt(3)
    for i, entry in enumerate(shells):
        assert len(entry[1]) == 3 and len(entry[2]) == 6
        assert all(nb.site.sublattice != atoms[i].sublattice for nb in entry[1])
        assert all(nb.site.sublattice == atoms[i].sublattice for nb in entry[2])
        assert all(0.9 * bond < nb.distance <= bond + 1e-12 for nb in entry[1])


def test_zigzag_has_two_bond_lengths():
    g = tube(5, 0)
    shells = neighbor_shells(atom_positions(g), g, shells=1)
    lengths = {round(nb.distance, 6) for entry in shells for nb in entry[1]}
    assert len(lengths) == 2


def test_cell_transform_moves_atoms_onto_atoms():
    g = tube(4, 2)
    atoms = atom_positions(g)
    pts = np.array([a.position for a in atoms])
    t = cell_transform(g, CellIndex(1, 2))
    for a in atoms[:10]:
        moved = t.apply_cartesian(a.position)
        images = [period_transform(g).power(k).apply_cartesian(moved) for k in range(-6, 7)]
        d = min(np.min(np.linalg.norm(pts - im, axis=1)) for im in images)
        assert d < 1e-9
