import pytest

from gridshare import (
    CarrierConfig,
    ConfigError,
    LteCellConfig,
    Numerology,
    ReLabel,
    apply_lte,
    count_labels,
    crs_cells,
    make_grid,
)
from gridshare.grid import crs_count


def fdd15(n_prb=1, span_ms=1):
    return CarrierConfig(Numerology(15), n_prb=n_prb, duplex="FDD", span_ms=span_ms)


class TestCrsCells:
    @pytest.mark.parametrize("ports,expected", [(1, 8), (2, 16), (4, 24)])
    def test_density_per_prb(self, ports, expected):
        for cell_id in range(6):
            cfg = LteCellConfig(cell_id=cell_id, crs_ports=ports)
            assert len(crs_cells(cfg, 1)) == expected

    def test_density_scales_with_prbs(self):
        cfg = LteCellConfig(crs_ports=4)
        assert len(crs_cells(cfg, 5)) == 24 * 5

    def test_v_shift_periodicity(self):
        a = crs_cells(LteCellConfig(cell_id=2, crs_ports=4), 3)
        b = crs_cells(LteCellConfig(cell_id=8, crs_ports=4), 3)
        assert a == b

    def test_port_monotonicity(self):
        one = crs_cells(LteCellConfig(cell_id=1, crs_ports=1), 2)
        two = crs_cells(LteCellConfig(cell_id=1, crs_ports=2), 2)
        four = crs_cells(LteCellConfig(cell_id=1, crs_ports=4), 2)
        assert one < two < four

    def test_shift_3_combs_are_disjoint(self):
        a = {(s, sc) for s, sc, _ in crs_cells(LteCellConfig(cell_id=0, crs_ports=1), 1)}
        b = {(s, sc) for s, sc, _ in crs_cells(LteCellConfig(cell_id=3, crs_ports=1), 1)}
        assert not (a & b)

    def test_equal_shift_port0_overlap_is_total(self):
        a = {(s, sc) for s, sc, p in crs_cells(LteCellConfig(cell_id=1, crs_ports=1), 1) if p == 0}
        b = {(s, sc) for s, sc, p in crs_cells(LteCellConfig(cell_id=7, crs_ports=1), 1) if p == 0}
        assert a == b

    def test_symbols_used(self):
        cells = crs_cells(LteCellConfig(crs_ports=4), 1)
        assert {s for s, _, p in cells if p in (0, 1)} == {0, 4, 7, 11}
        assert {s for s, _, p in cells if p in (2, 3)} == {1, 8}

    def test_one_port_cells_in_two_symbol_control_region(self):
        cells = crs_cells(LteCellConfig(crs_ports=1), 1)
        assert sum(1 for s, _, _ in cells if s < 2) == 2  # symbol 0 only


class TestConfigValidation:
    def test_invalid_ports(self):
        with pytest.raises(ConfigError):
            LteCellConfig(crs_ports=3)

    def test_invalid_pdcch(self):
        with pytest.raises(ConfigError):
            LteCellConfig(pdcch_symbols=0)

    def test_v_shift(self):
        assert LteCellConfig(cell_id=20).v_shift == 2


class TestApplyLte:
    def test_requires_15khz(self):
        carrier = CarrierConfig(
            Numerology(30), n_prb=1, duplex="FDD", span_ms=1
        )
        with pytest.raises(ConfigError, match="15 kHz"):
            apply_lte(make_grid(carrier), LteCellConfig())

    def test_four_ports_shared_slot_arithmetic(self):
        # Per PRB: 24 CRS (8 in control), 16 PDCCH, 128 data-region Unlabeled.
        grid = apply_lte(make_grid(fdd15()), LteCellConfig(crs_ports=4, pdcch_symbols=2))
        counts = count_labels(grid)
        assert crs_count(counts) == 24
        assert counts[ReLabel.LTE_PDCCH] == 24 - 8
        assert counts[ReLabel.UNLABELED] == 128

    def test_crs_in_control_region_countable(self):
        grid = apply_lte(make_grid(fdd15()), LteCellConfig(crs_ports=4, pdcch_symbols=2))
        control = grid.labels[0, :2, :]
        in_control = sum(
            (control == int(ReLabel.lte_crs(p))).sum() for p in range(4)
        )
        assert in_control == 8

    def test_one_port_data_region(self):
        grid = apply_lte(make_grid(fdd15()), LteCellConfig(crs_ports=1, pdcch_symbols=2))
        assert count_labels(grid)[ReLabel.UNLABELED] == 138

    def test_mbsfn_subframe_muting(self):
        cfg = LteCellConfig(crs_ports=1, pdcch_symbols=2, mbsfn_subframes={0},
                            non_mbsfn_region_len=2)
        grid = apply_lte(make_grid(fdd15()), cfg)
        counts = count_labels(grid)
        # CRS only at symbols 0..1 (symbol 0 for 1 port), control as normal,
        # everything after symbol 1 muted with no CRS inside.
        assert counts[ReLabel.LTE_MBSFN_MUTED] == 144
        assert crs_count(counts) == 2
        assert (grid.labels[0, 2:, :] == ReLabel.LTE_MBSFN_MUTED).all()

    def test_sync_and_pbch_footprint(self):
        # Subframe 0: PSS/SSS on symbols 5-6 and PBCH on 7-10, center 72 sc,
        # PBCH rate-matched around the CRS comb.
        cfg = LteCellConfig(crs_ports=1, pdcch_symbols=2)
        grid = apply_lte(make_grid(fdd15(n_prb=6)), cfg, subframes=[0])
        counts = count_labels(grid)
        crs_in_pbch = 12  # symbol 7 carries 2 CRS cells/PRB across 6 PRBs
        assert counts[ReLabel.LTE_PSS_SSS_PBCH] == 2 * 72 + 4 * 72 - crs_in_pbch

    def test_sync_skipped_on_plain_subframes(self):
        cfg = LteCellConfig(crs_ports=1, pdcch_symbols=2)
        grid = apply_lte(make_grid(fdd15(n_prb=6, span_ms=10)), cfg)
        for sf in range(10):
            present = (grid.labels[sf] == ReLabel.LTE_PSS_SSS_PBCH).any()
            assert present == (sf in (0, 5))

    def test_include_sync_false(self):
        cfg = LteCellConfig(crs_ports=1)
        grid = apply_lte(make_grid(fdd15(n_prb=6)), cfg, include_sync=False)
        assert ReLabel.LTE_PSS_SSS_PBCH not in count_labels(grid)

    def test_subframe_out_of_range(self):
        with pytest.raises(ConfigError):
            apply_lte(make_grid(fdd15()), LteCellConfig(), subframes=[1])
