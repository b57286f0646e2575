import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from squeezesar.metrics import (
    NoCrossing,
    ResolvableEverywhere,
    SweepRecord,
    UnresolvableInRange,
    crossing_from_below,
    min_resolvable_size,
    psnr_arrays,
    psnr_contours,
    resolvable,
    seed_average,
)


def test_psnr_single_pixel():
    truth = np.ones((200, 200))
    est = truth.copy()
    est[17, 42] += 1.0
    assert psnr_arrays(est, truth) == pytest.approx(10 * math.log10(40000), rel=1e-10)
    assert psnr_arrays(est, truth) == pytest.approx(46.02, abs=0.005)


def test_psnr_uniform_error():
    truth = np.ones((50, 40))
    assert psnr_arrays(truth + 0.1, truth) == pytest.approx(20.0, rel=1e-10)


def test_psnr_saturated():
    truth = np.random.default_rng(0).uniform(size=(5, 5))
    assert psnr_arrays(truth, truth) == math.inf


def test_psnr_dark_truth():
    assert psnr_arrays(np.full((3, 3), 0.1), np.zeros((3, 3))) == -math.inf


def test_psnr_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        psnr_arrays(np.zeros((3, 4)), np.zeros((4, 3)))


finite = st.floats(-2, 2, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 9), elements=finite), arrays(np.float64, (6, 9), elements=finite))
def test_psnr_transpose_invariant(a, b):
    assert psnr_arrays(a.T, b.T) == pytest.approx(psnr_arrays(a, b), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(0.1, 1)), st.floats(0.01, 1.0),
       st.integers(0, 24))
def test_more_error_lowers_psnr(truth, extra, idx):
    est = truth + 0.05
    worse = est.copy()
    worse.flat[idx] += extra
    assert psnr_arrays(worse, truth) < psnr_arrays(est, truth)


def test_resolvable_threshold():
    assert resolvable(14.0)
    assert not resolvable(12.0)
    assert resolvable(13.0)


def test_crossing_exact_hit():
    assert crossing_from_below([10, 20, 40], [11, 13, 15]) == pytest.approx(20.0, rel=1e-12)


def test_crossing_log_interpolation():
    assert crossing_from_below([10, 20], [12, 14]) == pytest.approx(math.sqrt(200), rel=1e-12)
    assert crossing_from_below([20, 10], [14, 12]) == pytest.approx(14.142, abs=1e-3)


def test_crossing_signals():
    with pytest.raises(UnresolvableInRange):
        crossing_from_below([10, 20, 40], [5, 8, 12.9])
    with pytest.raises(ResolvableEverywhere):
        crossing_from_below([10, 20], [13, 20])
    assert issubclass(UnresolvableInRange, NoCrossing) and issubclass(NoCrossing, ValueError)


def test_crossing_takes_first_upward():
    assert crossing_from_below([1, 2, 3, 4], [10, 14, 11, 15]) == pytest.approx(
        10 ** (0 + 0.75 * math.log10(2)), rel=1e-12)


def _rec(d, gain, seed, value, loss=100.0):
    return SweepRecord(d, gain, 0.1, loss, seed, value)


def test_min_resolvable_size_seed_average():
    records = [_rec(10, 0, 1, 11.0), _rec(10, 0, 2, 13.0),      # mean 12
               _rec(20, 0, 1, 13.5), _rec(20, 0, 2, 14.5)]      # mean 14
    assert min_resolvable_size(records) == pytest.approx(math.sqrt(200), rel=1e-12)


def test_seed_average_drops_saturated():
    records = [_rec(10, 0, 1, 12.0), _rec(10, 0, 2, math.inf), _rec(10, 0, 3, 14.0)]
    with pytest.warns(UserWarning, match="saturated"):
        avg = seed_average(records, key=lambda r: r.d_over_w0)
    assert avg == {10: 13.0}
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        seed_average(records[:1], key=lambda r: r.d_over_w0)


def test_record_row_round_trip():
    rec = SweepRecord(15.85, 4.0, 0.1, 100.0, 3, 12.345678901234567)
    row = dict(zip(("d_over_w0", "gain_db", "n_b_prime", "loss_db", "seed", "psnr_db"), rec.row()))
    assert SweepRecord.from_row(row) == rec
    assert SweepRecord(1, 0, 0, 0, 1, math.inf).saturated
    assert not SweepRecord(1, 0, 0, 0, 1, -math.inf).saturated


# ---------------------------------------------------------------- contours

D_AXIS = np.array([10, 15.85, 25.12, 39.81, 63.1, 100.0])
G_AXIS = np.array([0, 4, 8, 12, 16, 20.0])


def test_constant_grid_no_contours():
    grid = np.full((6, 6), 13.0)
    assert psnr_contours(grid, D_AXIS, G_AXIS, [12.0]) == []
    assert psnr_contours(grid, D_AXIS, G_AXIS, [13.0]) == []


def _monotone_grid():
    g, d = np.meshgrid(G_AXIS, np.log10(D_AXIS), indexing="ij")
    return 8.0 + 0.35 * g + 2.0 * np.sin(3 * d) + d


def _column_crossings(grid, level):
    """Brute force: for each d column, the linear crossing in gain."""
    out = {}
    for j in range(grid.shape[1]):
        col = grid[:, j]
        for i in range(len(col) - 1):
            if (col[i] - level) * (col[i + 1] - level) < 0:
                t = (level - col[i]) / (col[i + 1] - col[i])
                out[j] = G_AXIS[i] + t * (G_AXIS[i + 1] - G_AXIS[i])
    return out


@pytest.mark.parametrize("level", [11.0, 12.0, 14.0])
def test_monotone_grid_matches_column_scan(level):
    grid = _monotone_grid()
    lines = psnr_contours(grid, D_AXIS, G_AXIS, [level])
    expected = _column_crossings(grid, level)
    assert len(lines) == 1
    line = lines[0]
    on_columns = {}
    for d, g in zip(line.d_over_w0, line.gain_db):
        j = np.flatnonzero(np.isclose(D_AXIS, d, rtol=1e-9))
        if j.size:
            assert int(j[0]) not in on_columns     # single crossing per column
            on_columns[int(j[0])] = g
    assert on_columns.keys() == expected.keys()
    for j, g in expected.items():
        assert on_columns[j] == pytest.approx(g, rel=1e-9)


def test_lower_level_below_higher():
    grid = _monotone_grid()
    low = _column_crossings(grid, 12.0)
    high = _column_crossings(grid, 14.0)
    for j in low.keys() & high.keys():
        assert low[j] < high[j]
    l12, l14 = psnr_contours(grid, D_AXIS, G_AXIS, [12.0, 14.0])
    assert l12.level_db == 12.0 and l14.level_db == 14.0


def test_saddle_three_by_three():
    # level 0.5 crosses each of the 12 edges between neighbours exactly once
    grid = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    lines = psnr_contours(grid, [1.0, 10.0, 100.0], [0.0, 1.0, 2.0], [0.5])
    vertices = {(round(float(d), 9), round(float(g), 9))
                for line in lines for d, g in zip(line.d_over_w0, line.gain_db)}
    assert len(vertices) == 12


def test_contour_errors():
    grid = _monotone_grid()
    with pytest.raises(ValueError, match="match"):
        psnr_contours(grid[:5], D_AXIS, G_AXIS, [12.0])
    holed = grid.copy()
    holed[2, 2] = np.inf
    with pytest.raises(ValueError, match="finite"):
        psnr_contours(holed, D_AXIS, G_AXIS, [12.0])
    assert psnr_contours(grid, D_AXIS, G_AXIS, [100.0]) == []
