import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from besov.partition import angle_offset, build_partition, check_proposition1, covering_multiplicity


def test_level_zero_cells():
    cells = list(build_partition(1, 0).cells)
    assert [c.l for c in cells] == [(-1,), (0,)]
    for c in cells:
        assert c.radial == ((0.0, 0.5),)
        np.testing.assert_allclose(c.arcs[0][1] - c.arcs[0][0], math.pi)


def test_cell_count():
    assert len(build_partition(1, 1)) == 6
    assert len(build_partition(2, 1)) == 36


def test_center_of_level_one_cell():
    c = next(c for c in build_partition(1, 1).cells if c.k == (1,) and c.l == (0,))
    np.testing.assert_allclose(abs(c.center[0]), 0.625)
    np.testing.assert_allclose(np.angle(c.center[0]), math.pi / 4)


@pytest.mark.parametrize("n, K", [(1, 0), (1, 5), (2, 3)])
def test_measures_tile_the_polydisc(n, K):
    # cells with k <= K cover the polydisc of radius 1 - 2^-(K+1)
    total = build_partition(n, K).total_measure()
    np.testing.assert_allclose(total, (math.pi * (1 - 2.0 ** -(K + 1)) ** 2) ** n, rtol=1e-12)


@pytest.mark.parametrize("K", [0, 3, 8])
def test_radial_band(K):
    rep = check_proposition1(build_partition(1, K))
    lo, hi = rep.metrics["radial_band"]
    assert 0.75 * (1 - 1e-9) <= lo and hi <= 1.5 * (1 + 1e-9)
    assert rep.passed


def test_measure_band_within_loose_bounds():
    lo, hi = check_proposition1(build_partition(1, 8)).metrics["measure_band"]
    assert 0.05 <= lo and hi < 1.5


def test_measure_ratio_limit():
    # (1-|c|)^2 / |cell| tends to 9 / (8 pi) with the level
    rep = check_proposition1(build_partition(1, 12))
    last = [r["value"] for r in rep.rows if r["metric"] == "measure_ratio"][-1]
    np.testing.assert_allclose(last, 9 / (8 * math.pi), rtol=1e-3)


def test_covering_multiplicity():
    assert covering_multiplicity(build_partition(1, 2)) <= 9
    assert covering_multiplicity(build_partition(1, 3), enlarged=False) == 1
    assert covering_multiplicity(build_partition(1, 3)) == covering_multiplicity(build_partition(1, 6))


def test_csv_header_and_rows():
    text = build_partition(1, 1).to_csv()
    lines = text.splitlines()
    assert lines[0] == "level,index,center_re,center_im,measure"
    assert len(lines) == 7


def test_invalid_partition():
    with pytest.raises(ValueError):
        build_partition(0, 2)
    with pytest.raises(ValueError):
        check_proposition1(build_partition(1, 2), samples_per_cell=2)


@settings(max_examples=40, deadline=None)
@given(K=st.integers(0, 7), data=st.data())
def test_center_inside_cell(K, data):
    part = build_partition(1, K)
    cells = part.factor_cells
    c = cells[data.draw(st.integers(0, len(cells) - 1))]
    z = c.center
    assert c.r_lo <= abs(z) < c.r_hi
    np.testing.assert_allclose(1 - abs(z), 3 * 2.0 ** (-(c.k + 2)), rtol=1e-12)
    th = np.mod(np.angle(z) - c.th_lo, 2 * math.pi)
    assert th < c.th_hi - c.th_lo


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0, 0.999), th=st.floats(-math.pi, math.pi - 1e-9))
@example(r=0.0, th=-6.1e-92)
def test_every_point_in_exactly_one_cell(r, th):
    part = build_partition(1, 10)
    hits = [c for c in part.factor_cells
            if c.r_lo <= r < c.r_hi and angle_offset(th, c.th_lo) < c.th_hi - c.th_lo]
    assert len(hits) == (1 if r < 1 - 2.0 ** -11 else 0)
