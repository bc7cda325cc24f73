import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from argsector.functions import ExpPoly, Fryntov, Monomial, ZeroEntry, ZeroProduct, build_function
from argsector.sectors import (
    Sector,
    area_adaptive,
    area_adaptive_many,
    area_oracle,
    rect_disc_area,
    sector_contains,
    sector_grid,
    weighted_sector_mass,
)
from oracles import exp_strip_area

TWO_PI = 2 * math.pi


def test_sector_normalisation_and_membership():
    S = Sector(-math.pi / 2, math.pi)
    assert S.theta1 == pytest.approx(3 * math.pi / 2)
    assert S.contains(0.0)
    assert not S.contains(math.pi)
    assert not S.contains(math.pi / 2)  # open boundary
    assert S.contains(4 * math.pi + 0.1)
    full = Sector(1.0, TWO_PI)
    assert full.full and full.boundaries == ()
    assert sector_contains(full, np.array([0.3, np.nan])).tolist() == [True, False]


@pytest.mark.parametrize("alpha", [0.0, -1.0, 7.0])
def test_sector_rejects_bad_opening(alpha):
    with pytest.raises(ValueError):
        Sector(0.0, alpha)


def test_complement_and_grid():
    S = Sector(1.0, 2.0)
    C = S.complement()
    assert C.alpha == pytest.approx(TWO_PI - 2.0)
    assert C.theta1 == pytest.approx(3.0)
    grid = sector_grid(4, [1.0, 2.0])
    assert len(grid) == 8
    assert [s.alpha for s in grid[:4]] == [1.0] * 4
    assert grid[1].theta1 == pytest.approx(math.pi / 2)


def test_rect_disc_area_known_values():
    assert rect_disc_area(-2, 2, -2, 2, 1.0) == pytest.approx(math.pi)
    assert rect_disc_area(0, 2, 0, 2, 1.0) == pytest.approx(math.pi / 4)
    assert rect_disc_area(-0.1, 0.1, -0.1, 0.1, 1.0) == pytest.approx(0.04)
    assert rect_disc_area(2, 3, 2, 3, 1.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5),
       st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_rect_disc_area_is_additive(x0, xm, y0, wx, wy):
    x1 = x0 + wx
    y1 = y0 + wy
    xm = x0 + (xm + 1.5) / 3.0 * wx
    whole = rect_disc_area(x0, x1, y0, y1, 1.0)
    parts = rect_disc_area(x0, xm, y0, y1, 1.0) + rect_disc_area(xm, x1, y0, y1, 1.0)
    assert whole == pytest.approx(parts, abs=1e-12)
    assert -1e-15 <= whole <= wx * wy + 1e-15


def test_rect_disc_area_monte_carlo():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1, 1, size=(400_000, 2))
    x0, x1, y0, y1 = 0.2, 0.9, -0.5, 0.3
    inside = (pts[:, 0] ** 2 + pts[:, 1] ** 2 < 1) & (pts[:, 0] > x0) & (pts[:, 0] < x1) \
        & (pts[:, 1] > y0) & (pts[:, 1] < y1)
    assert rect_disc_area(x0, x1, y0, y1, 1.0) == pytest.approx(4 * inside.mean(), abs=0.01)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_monomial_areas_certified(n):
    f = build_function(Monomial(n))
    for S in [Sector(0.3, math.pi / 6), Sector(2.0, math.pi / 2), Sector(5.0, math.pi)]:
        e = area_adaptive(f, 1.0, S, 2e-3)
        assert e.certified
        assert e.low - 1e-12 <= S.alpha / TWO_PI <= e.high + 1e-12


def test_shared_tree_matches_single_sector():
    f = build_function(ZeroProduct((ZeroEntry(0.3 + 0.2j, 1), ZeroEntry(-0.5, 2)), g=(0.0, 0.5)))
    sectors = [Sector(0.0, 1.0), Sector(2.0, 3.0)]
    many = area_adaptive_many(f, 1.0, sectors, 2e-3)
    for S, e in zip(sectors, many):
        single = area_adaptive(f, 1.0, S, 2e-3)
        assert single.certified and e.certified
        assert max(e.low, single.low) <= min(e.high, single.high) + 1e-12


def test_complement_brackets_contain_one():
    f = build_function(ZeroProduct((ZeroEntry(0.3 + 0.2j, 1), ZeroEntry(-0.5, 2)), g=(0.0, 0.5)))
    S = Sector(0.7, 2.0)
    a, b = area_adaptive_many(f, 1.0, [S, S.complement()], 2e-3)
    assert a.low + b.low <= 1 + 1e-12 <= a.high + b.high + 2e-12


@settings(max_examples=8, deadline=None)
@given(st.lists(st.tuples(st.floats(-0.7, 0.7), st.floats(-0.7, 0.7)), min_size=1, max_size=6),
       st.floats(0, TWO_PI), st.floats(0.3, 6.0), st.floats(0.4, 1.2))
def test_bracket_agrees_with_grid_oracle(pairs, theta1, alpha, r):
    f = build_function(ZeroProduct(tuple(ZeroEntry(complex(a, b), 1) for a, b in pairs)))
    S = Sector(theta1, alpha)
    e = area_adaptive(f, r, S, 4e-3)
    oracle = area_oracle(f, r, S, 512)
    assert e.low - 6e-3 <= oracle <= e.high + 6e-3


def test_exponential_strip_small_radius():
    f = build_function(ExpPoly((0.0, 1.0)))
    S = Sector(-0.4, 1.1)
    e = area_adaptive(f, 4.0, S, 2e-3)
    exact = exp_strip_area(4.0, -0.4, 1.1)
    assert e.low - 1e-12 <= exact <= e.high + 1e-12


def test_rotation_invariance_for_monomials():
    f = build_function(Monomial(3))
    base = area_adaptive(f, 0.8, Sector(0.1, 1.0), 2e-3)
    turned = area_adaptive(f, 0.8, Sector(0.1 + 0.77, 1.0), 2e-3)
    assert max(base.low, turned.low) <= min(base.high, turned.high) + 1e-12


def test_uncertified_when_depth_exhausted():
    f = build_function(Monomial(3))
    e = area_adaptive(f, 1.0, Sector(0.0, 1.0), 1e-4, max_depth=2)
    assert not e.certified
    assert e.undecided_mass > 1e-4


def test_budget_validation():
    f = build_function(Monomial(1))
    with pytest.raises(ValueError):
        area_adaptive(f, 1.0, Sector(0.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        area_oracle(f, 1.0, Sector(0.0, 1.0), 16)


def test_weighted_mass_symmetric_case():
    f = build_function(Monomial(2))
    inside, total = weighted_sector_mass(f, Sector(0.2, math.pi / 2), 512)
    assert total == pytest.approx(math.pi / 2, rel=1e-3)
    assert inside / total == pytest.approx(0.25, abs=2e-3)


def test_weighted_mass_overflow():
    f = build_function(ExpPoly((0.0, 800.0)))
    with pytest.raises(OverflowError):
        weighted_sector_mass(f, Sector(0.0, 1.0), 128)


@pytest.mark.parametrize("R", [30.0, 300.0, 3000.0])
def test_fryntov_bracket_agrees_with_grid_oracle(R):
    f = build_function(Fryntov(10, 0.5, 3))
    for S in (Sector(0.4, math.pi / 6), Sector(2.0, math.pi)):
        e = area_adaptive(f, R, S, 4e-3)
        assert e.certified
        oracle = area_oracle(f, R, S, 1024)
        assert e.low - 3e-3 <= oracle <= e.high + 3e-3
