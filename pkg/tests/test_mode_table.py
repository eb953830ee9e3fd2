import os

import numpy as np
import pytest

from geonresp import radial_modes as rm
from geonresp.errors import DomainError, TableError, TableRangeError
from geonresp.mode_table import (
    FrequencyGrid,
    ModeTable,
    build_table,
    cache_path,
    get_or_build,
)


@pytest.fixture(scope="module")
def small_table():
    return build_table(3.0, l_max=2, grid=FrequencyGrid(n_nodes=60))


class TestFrequencyGrid:
    def test_nodes_monotone_with_split(self):
        grid = FrequencyGrid()
        nodes = grid.nodes()
        assert len(nodes) == grid.n_nodes
        assert np.all(np.diff(nodes) > 0)
        assert nodes[0] == grid.omega_min
        assert nodes[-1] == grid.omega_max
        assert grid.split in nodes

    def test_log_spacing_below_split(self):
        nodes = FrequencyGrid().nodes()
        low = nodes[nodes <= 0.1]
        ratios = low[1:] / low[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-9)

    def test_invalid_grids(self):
        with pytest.raises(DomainError):
            FrequencyGrid(omega_min=1e-8)
        with pytest.raises(DomainError):
            FrequencyGrid(omega_min=0.5, omega_max=0.2)
        with pytest.raises(DomainError):
            FrequencyGrid(n_nodes=4)


class TestBuildAndInterpolate:
    def test_values_match_direct_solve(self, small_table):
        t = small_table
        for l in (0, 2):
            for i in (0, len(t.omegas) // 2, -1):
                om = float(t.omegas[i])
                in2, up2 = rm.amplitude_sq(l, om, 3.0)
                assert t.values[l, i, 0] == pytest.approx(in2, rel=1e-12)
                assert t.values[l, i, 1] == pytest.approx(up2, rel=1e-12)

    def test_interpolation_exact_at_nodes(self, small_table):
        t = small_table
        for i in (0, 10, -1):
            om = float(t.omegas[i])
            in2, up2 = t.interpolate(1, om)
            assert in2 == pytest.approx(t.values[1, i, 0], rel=1e-12)
            assert up2 == pytest.approx(t.values[1, i, 1], rel=1e-12)

    def test_interpolation_accuracy_between_nodes(self, table_r3):
        # midpoint values against a fresh solve
        for l, i in ((0, 50), (1, 250), (3, 300)):
            om = 0.5 * (table_r3.omegas[i] + table_r3.omegas[i + 1])
            in2, up2 = rm.amplitude_sq(l, float(om), 3.0)
            ti, tu = table_r3.interpolate(l, float(om))
            assert ti == pytest.approx(in2, rel=1e-5, abs=1e-300)
            assert tu == pytest.approx(up2, rel=1e-5, abs=1e-300)

    def test_interpolate_is_vectorized(self, small_table):
        oms = np.array([0.01, 0.1, 1.0, 5.0])
        in2, up2 = small_table.interpolate(0, oms)
        assert in2.shape == oms.shape
        for i, om in enumerate(oms):
            a, b = small_table.interpolate(0, float(om))
            assert in2[i] == a and up2[i] == b

    def test_range_errors(self, small_table):
        with pytest.raises(TableRangeError):
            small_table.interpolate(3, 0.5)  # l beyond l_max
        with pytest.raises(TableRangeError):
            small_table.interpolate(0, 1e-6)
        with pytest.raises(TableRangeError):
            small_table.interpolate(0, 9.0)

    def test_positivity_and_diagnostics(self, small_table):
        assert np.all(small_table.values >= 0.0)
        assert np.nanmax(small_table.defects) < 1e-6
        assert small_table.failures == ()

    def test_build_determinism(self):
        grid = FrequencyGrid(n_nodes=24, omega_min=1e-3, omega_max=2.0)
        a = build_table(3.0, l_max=0, grid=grid)
        b = build_table(3.0, l_max=0, grid=grid)
        assert np.array_equal(a.values, b.values)
        assert a.params_hash == b.params_hash


class TestPersistence:
    def test_round_trip_bit_exact(self, small_table, tmp_path):
        path = str(tmp_path / "t.bin")
        small_table.save(path)
        loaded = ModeTable.load(path)
        assert np.array_equal(loaded.values, small_table.values)
        assert np.array_equal(loaded.defects, small_table.defects)
        assert loaded.params_hash == small_table.params_hash
        assert loaded.r_det == 3.0 and loaded.l_max == 2

    def test_corruption_detected(self, small_table, tmp_path):
        path = str(tmp_path / "t.bin")
        small_table.save(path)
        data = bytearray(open(path, "rb").read())
        data[-9] ^= 0xFF  # flip a payload byte
        open(path, "wb").write(bytes(data))
        with pytest.raises(TableError):
            ModeTable.load(path)

    def test_not_a_table_file(self, tmp_path):
        path = str(tmp_path / "junk.bin")
        open(path, "wb").write(b"not a table")
        with pytest.raises(TableError):
            ModeTable.load(path)

    def test_parameter_mismatch_rejected(self, small_table, tmp_path):
        path = str(tmp_path / "t.bin")
        small_table.save(path)
        with pytest.raises(TableError):
            ModeTable.load(path, expect_r_det=4.0)
        with pytest.raises(TableError):
            ModeTable.load(path, expect_l_max=5)
        with pytest.raises(TableError):
            ModeTable.load(path, expect_grid=FrequencyGrid(n_nodes=61))

    def test_get_or_build_cache_hit(self, tmp_path):
        grid = FrequencyGrid(n_nodes=20, omega_min=1e-3, omega_max=1.0)
        t1, hit1 = get_or_build(3.0, l_max=0, grid=grid, cache_dir=str(tmp_path))
        t2, hit2 = get_or_build(3.0, l_max=0, grid=grid, cache_dir=str(tmp_path))
        assert not hit1 and hit2
        assert np.array_equal(t1.values, t2.values)
        assert os.path.exists(cache_path(str(tmp_path), 3.0, 0, grid))

    def test_cache_path_depends_on_params(self, tmp_path):
        g1 = FrequencyGrid(n_nodes=20, omega_min=1e-3, omega_max=1.0)
        g2 = FrequencyGrid(n_nodes=21, omega_min=1e-3, omega_max=1.0)
        assert cache_path(".", 3.0, 0, g1) != cache_path(".", 3.0, 0, g2)
        assert cache_path(".", 3.0, 0, g1) != cache_path(".", 4.0, 0, g1)

    def test_export_text(self, small_table, tmp_path):
        path = str(tmp_path / "t.txt")
        small_table.export_text(path)
        lines = open(path).read().splitlines()
        assert lines[0].startswith("# mode table")
        # header + comment + one row per (l, node)
        assert len(lines) == 2 + 3 * len(small_table.omegas)

    def test_summary_keys(self, small_table):
        s = small_table.summary()
        assert s["n_failures"] == 0
        assert s["worst_unitarity_defect"] < 1e-6
        assert s["n_nodes"] == len(small_table.omegas)
