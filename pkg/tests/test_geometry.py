import math

import pytest
from hypothesis import given, strategies as st

from cntbloch.geometry import (
    ChiralSpec, GeometryError, SymmetryClass, characteristic_vectors, chiral_formulas, classify, compute_geometry,
    translation_vector,
)

from oracles import chord_ratio, translation_oracle

# Rolled chord / a from the high-precision oracle (tests/oracles.py), frozen.
FROZEN_CHORDS = {
    (4, 4): (0.980933689228705, 0.980933689228705),
    (10, 10): (0.9969211378455052, 0.9969211378455052),
    (4, 2): (0.9540318820604613, 0.9811472130004794),
    (6, 1): (0.9634950321491197, 0.9947497346992701),
    (8, 3): (0.9853973755778915, 0.9956928878618458),
    (5, 0): (0.935489283788639, 0.9959331314494813),
    (20, 0): (0.9958927352435614, 0.9997431573661273),
    (30, 17): (0.9992633218058516, 0.9996484056470621),
}

# Shortest axial translation from brute-force search, frozen.
FROZEN_TRANSLATIONS = {
    (4, 2): (4, -5), (5, 5): (1, -1), (5, 0): (1, -2), (6, 1): (8, -13), (7, 4): (5, -6), (9, 3): (5, -7),
}

index_pairs = st.integers(1, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n)))


@pytest.mark.parametrize("nm, expected", FROZEN_CHORDS.items())
def test_chord_ratios_match_rolled_oracle(nm, expected):
    geom = compute_geometry(ChiralSpec(*nm))
    assert geom.chord_ratios == pytest.approx(expected, abs=1e-13)


def test_chord_oracle_is_reproducible():
    assert chord_ratio(6, 1, "+") == pytest.approx(FROZEN_CHORDS[(6, 1)][0], abs=1e-15)


@pytest.mark.parametrize("nm, expected", FROZEN_TRANSLATIONS.items())
def test_translation_vector_matches_search(nm, expected):
    t1, t2, d, d_R, t_len = translation_vector(ChiralSpec(*nm))
    assert (t1, t2) == expected


def test_translation_search_oracle_small_case():
    assert translation_oracle(4, 2, 20) == (4, -5)


@pytest.mark.parametrize("n, m, d_R", [(5, 5, 15), (4, 2, 2), (5, 0, 5), (10, 10, 30), (7, 1, 3)])
def test_d_R_values(n, m, d_R):
    assert translation_vector(ChiralSpec(n, m))[3] == d_R


@given(index_pairs)
def test_d_R_follows_gcd_rule(nm):
    n, m = nm
    _, _, d, d_R, _ = translation_vector(ChiralSpec(n, m))
    assert d_R == (3 * d if (n - m) % (3 * d) == 0 else d)


def test_classification():
    assert classify(ChiralSpec(5, 5)) is SymmetryClass.ARMCHAIR
    assert classify(ChiralSpec(5, 0)) is SymmetryClass.ZIGZAG
    assert classify(ChiralSpec(5, 2)) is SymmetryClass.CHIRAL


@pytest.mark.parametrize("n, m", [(2, 5), (0, 0), (3, -1)])
def test_invalid_indices_rejected(n, m):
    with pytest.raises(GeometryError):
        ChiralSpec(n, m)


def test_error_message_names_ordering():
    with pytest.raises(GeometryError, match="require m <= n"):
        ChiralSpec(2, 5)


def test_cell_count_must_be_multiple():
    with pytest.raises(GeometryError, match="multiple of 10"):
        compute_geometry(ChiralSpec(5, 5), n_cells=15)
    with pytest.raises(GeometryError, match="multiple of 8"):
        compute_geometry(ChiralSpec(4, 0), n_cells=12)
    assert compute_geometry(ChiralSpec(4, 2), n_cells=12).L == 3


def test_armchair_closed_forms():
    g = compute_geometry(ChiralSpec(7, 7))
    assert g.alpha_plus == pytest.approx(math.pi / 7)
    assert g.c_plus == pytest.approx(g.a / 2)
    assert g.r_t == pytest.approx(7 * g.a * math.sqrt(3) / (2 * math.pi))


def test_zigzag_closed_forms():
    g = compute_geometry(ChiralSpec(9, 0))
    assert g.alpha_plus == pytest.approx(2 * math.pi / 9)
    assert g.alpha_minus == pytest.approx(math.pi / 9)
    assert g.c_plus == 0.0
    assert g.c_minus == pytest.approx(math.sqrt(3) * g.a / 2)


@given(index_pairs)
def test_class_forms_agree_with_general_formulas(nm):
    spec = ChiralSpec(*nm)
    g = compute_geometry(spec)
    general = chiral_formulas(spec)
    for key, value in general.items():
        assert getattr(g, key) == pytest.approx(value, abs=1e-12)


@given(index_pairs)
def test_chiral_angles_sum_to_sixty_degrees(nm):
    g = compute_geometry(ChiralSpec(*nm))
    assert abs(g.theta_plus + g.theta_minus - math.pi / 3) < 1e-12


@given(index_pairs)
def test_chords_shorter_than_flat(nm):
    g = compute_geometry(ChiralSpec(*nm))
    assert 0 < g.chord_plus <= g.a * (1 + 1e-15)
    assert 0 < g.chord_minus <= g.a * (1 + 1e-15)


@given(index_pairs)
def test_characteristic_vectors_have_chord_length(nm):
    g = compute_geometry(ChiralSpec(*nm))
    cv = characteristic_vectors(g)
    origin = [0.0, g.r_t, 0.0]
    assert math.dist(cv.a_hat_plus, origin) == pytest.approx(g.chord_plus, rel=1e-12)
    assert math.dist(cv.a_hat_minus, origin) == pytest.approx(g.chord_minus, rel=1e-12)


def test_chords_approach_flat_for_wide_tubes():
    assert compute_geometry(ChiralSpec(200, 200)).chord_ratios[0] > 0.9999
