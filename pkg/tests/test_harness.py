import math

import numpy as np
import pytest

from argsector import harness
from argsector.functions import (
    CanonicalProduct,
    ExpPoly,
    Monomial,
    ZeroEntry,
    ZeroProduct,
    build_function,
)
from argsector.harness import (
    PreconditionError,
    SweepRow,
    SweepTable,
    equidistribution_sweep,
    find_thm1_radii,
    kappa_estimate,
    liminf_limsup_witness,
    select_radius_order_zero,
    thm1_conditions,
    thm4_check,
)
from argsector.sectors import Sector, sector_grid

TWO_PI = 2 * math.pi
QUARTERS = sector_grid(8, [math.pi / 2])


def simple_zeros(*moduli):
    return build_function(ZeroProduct(tuple(ZeroEntry(m, 1) for m in moduli)))


def test_order_zero_radius_three_moduli():
    assert select_radius_order_zero(simple_zeros(1.0, 2.0, 4.0), 0.1, 10) == (4.0, 400.0)


def test_order_zero_radius_single_zero():
    r_delta, R = select_radius_order_zero(simple_zeros(2.5), 0.3, 3)
    assert r_delta == 2.5 and R == pytest.approx(22.5)


def test_order_zero_radius_matches_dense_scan():
    T = 10.0
    mods = tuple((T ** k, int(math.floor(T ** (k / 2) + 1e-12))) for k in range(0, 5))
    f = build_function(CanonicalProduct(mods))
    for delta in (0.05, 0.3, 0.6, 0.9):
        r_delta, _ = select_radius_order_zero(f, delta, 10)
        grid = np.unique(np.concatenate([np.geomspace(0.5, 1e5, 200_001), [m for m, _ in mods]]))
        counts = np.array([sum(m for rho, m in mods if rho <= r) for r in grid], float)
        ratio = counts / grid ** delta
        best = ratio.max()
        assert counts[grid == r_delta][0] / r_delta ** delta == pytest.approx(best, rel=1e-12)
        assert r_delta == grid[np.flatnonzero(ratio >= best * (1 - 1e-12))[-1]]


def test_order_zero_radius_preconditions():
    with pytest.raises(PreconditionError):
        select_radius_order_zero(build_function(ExpPoly((0.0, 1.0))), 0.1, 10)
    with pytest.raises(PreconditionError):
        select_radius_order_zero(simple_zeros(1.0), 1.5, 10)
    with pytest.raises(PreconditionError):
        select_radius_order_zero(simple_zeros(1.0), 0.1, 1.0)


def test_monomial_sweep_and_verdict():
    table = equidistribution_sweep(build_function(Monomial(3)), [1.0], 8, [math.pi / 2], 2e-3)
    assert len(table.rows) == 8
    for row in table.rows:
        assert row.area_low <= 0.25 <= row.area_high
        assert row.area_high - row.area_low <= 2e-3
        assert row.omega == pytest.approx(6 * math.pi, abs=1e-9)
    (v,) = kappa_estimate(table)
    assert v.min_over_sectors == pytest.approx(1.0, abs=0.01)
    assert not v.flagged and v.n_certified == 8


def test_exponential_sweep_half_plane():
    table = equidistribution_sweep(build_function(ExpPoly((0.0, 1.0))), [50.0], 4, [math.pi], 5e-3)
    for row in table.rows:
        assert 0.48 <= row.area_low <= row.area_high <= 0.52


def test_sweep_row_order_and_determinism():
    f = build_function(ZeroProduct((ZeroEntry(0.3, 1), ZeroEntry(-0.4j, 2))))
    a = equidistribution_sweep(f, [0.5, 1.0], 3, [1.0, 2.0], 4e-3, threads=2)
    b = equidistribution_sweep(f, [0.5, 1.0], 3, [1.0, 2.0], 4e-3, threads=1)
    assert a.to_csv() == b.to_csv()
    keys = [(row.r, row.sector.alpha, row.sector.theta1) for row in a.rows]
    assert keys == sorted(keys)
    assert a.to_csv().splitlines()[0] == harness.CSV_HEADER


def test_sweep_flags_failures_without_aborting(monkeypatch):
    def boom(*args, **kwargs):
        raise ArithmeticError("forced")

    monkeypatch.setattr(harness, "area_adaptive_many", boom)
    table = equidistribution_sweep(build_function(Monomial(2)), [1.0, 2.0], 2, [1.0], 1e-3)
    assert len(table.rows) == 4
    assert all("area_failed:ArithmeticError" in row.flags for row in table.rows)
    assert all(math.isnan(v.min_over_sectors) and v.flagged for v in kappa_estimate(table))


def test_verdict_uses_certified_rows_only():
    S1, S2 = Sector(0.0, math.pi / 2), Sector(1.0, math.pi / 2)
    rows = [SweepRow(1.0, S1, 0.24, 0.26, 0, 0, 0, True),
            SweepRow(1.0, S2, 0.0, 0.9, 0, 0, 0, False, ("uncertified",))]
    (v,) = kappa_estimate(SweepTable("t", rows))
    assert v.flagged and v.n_certified == 1
    assert v.min_over_sectors == pytest.approx(TWO_PI * 0.24 / (math.pi / 2))
    assert v.max_deviation == pytest.approx(0.01)
    assert v.epsilon == pytest.approx(TWO_PI * 0.01)


def test_kappa_rejects_empty_table():
    with pytest.raises(PreconditionError):
        kappa_estimate(SweepTable("t", []))


def test_thm4_linear_closed_form():
    res = thm4_check(build_function(Monomial(1)), QUARTERS, 1e-3)
    assert res.beta_star == 2.0
    assert res.c_empirical == pytest.approx(math.log(2) / TWO_PI, rel=0.01)
    assert res.c_empirical <= math.log(2) / TWO_PI + 1e-12


def test_thm4_monomial_grows_with_degree():
    d = 12
    res = thm4_check(build_function(Monomial(d)), QUARTERS, 2e-3)
    assert res.beta == pytest.approx(d * math.log(2), abs=1e-9)
    assert res.c_empirical == pytest.approx(math.log(d * math.log(2)) / TWO_PI, rel=0.02)


def test_thm4_needs_zero_at_origin():
    with pytest.raises(PreconditionError):
        thm4_check(simple_zeros(0.5), QUARTERS, 1e-3)


def test_thm1_radii_monomial_and_exponential():
    assert find_thm1_radii(build_function(Monomial(3)), 0.1, 0.5, 2.0, 4) == [0.5, 1.0, 1.5, 2.0]
    radii = find_thm1_radii(build_function(ExpPoly((0.0, 1.0))), 1.0, 1.0, 6.0, 11)
    assert radii == [r for r in np.linspace(1.0, 6.0, 11) if r > math.pi]


def test_thm1_radii_match_finer_oracle(general_ensemble):
    item, f = next((it, g) for it, g in general_ensemble if it["degree"] == 8)
    rho = 0.5
    grid = np.linspace(0.2, 1.5, 14)
    found = find_thm1_radii(f, rho, 0.2, 1.5, 14)
    oracle = [float(r) for r in grid if all(thm1_conditions(f, float(r), rho, t_samples=80))]
    assert found == oracle, item["id"]


def test_thm1_property_on_known_orders():
    cases = [
        (build_function(ExpPoly((0.0, 1.0))), 1.0, 3.5, 6.0),
        (build_function(ExpPoly((0.0, 0.0, 1.0))), 2.0, 2.0, 3.0),
        (build_function(ZeroProduct((ZeroEntry(0.5, 1), ZeroEntry(-1j, 2)), g=(0.0, 1.0))),
         1.0, 3.5, 5.0),
    ]
    for f, rho, lo, hi in cases:
        radii = find_thm1_radii(f, rho, lo, hi, 4)
        assert radii
        verdicts = kappa_estimate(equidistribution_sweep(f, radii, 8, [math.pi / 2], 5e-3))
        for v in verdicts:
            assert v.min_over_sectors > 0


def test_order_zero_sweep_straddles_mean():
    T = 10.0
    mods = tuple((T ** k, int(math.floor(T ** (k / 2) + 1e-12))) for k in range(0, 5))
    f = build_function(CanonicalProduct(mods))
    table = equidistribution_sweep(f, [1.5, 3.0, 5.0, 15.0, 30.0, 50.0], 8, [math.pi / 2], 5e-3)
    witness = liminf_limsup_witness(table)
    assert witness is not None
    S, r_below, r_above = witness
    rows = {row.r: row for row in table.rows if row.sector == S}
    assert rows[r_below].area_high < 0.25 < rows[r_above].area_low


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("ARGSECTOR_THREADS", "1")
    assert harness.thread_count() == 1
    monkeypatch.setenv("ARGSECTOR_THREADS", "junk")
    assert harness.thread_count() >= 1
