import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridshare import (
    BeamSignal,
    CarrierConfig,
    ConfigError,
    ConflictError,
    ControlMode,
    ControlModeKind,
    Coreset1Spec,
    CsiRsSpec,
    DssMechanism,
    LteCellConfig,
    Mitigation,
    Numerology,
    NrOverlaySet,
    PlacementError,
    SchedPolicy,
    TddPattern,
    TrafficModel,
    TrsSpec,
    alignment_check,
    apply_nr,
    classify_mrss,
    dss_mechanism_budget,
    make_grid,
    neighbor_interference,
    place_6g_ssb,
    reserve_iot,
    simulate,
)
from gridshare.mrss import CAT_CONTROL, CAT_NON_DL, CAT_RESERVED, CAT_SHARED


def wideband_tdd_carrier():
    return CarrierConfig(
        Numerology(30), n_prb=273, duplex="TDD", span_ms=20,
        tdd_pattern=TddPattern("DDDSU", (6, 4, 4)),
    )


def full_overlay():
    return NrOverlaySet(
        period_ms=20,
        ssb=BeamSignal(4, 20, 4),
        coreset0=BeamSignal(4, 48, 2),
        sib1=BeamSignal(4, 24, 4),
        coreset1=Coreset1Spec(270, 2),
        csi_rs=CsiRsSpec(32, 1, 272, 1),
        trs=TrsSpec(52, 2, 6, 4, 2),
    )


def wideband_map(control_mode=ControlMode()):
    grid = apply_nr(make_grid(wideband_tdd_carrier()), full_overlay())
    return classify_mrss(grid, control_mode=control_mode)


def fdd_map(n_prb=1, span_ms=1):
    carrier = CarrierConfig(Numerology(15), n_prb=n_prb, duplex="FDD",
                            span_ms=span_ms)
    return classify_mrss(make_grid(carrier))


class TestClassify:
    def test_wideband_partition_sizes(self):
        cmap = wideband_map()
        assert cmap.downlink_size == 1_257_984
        assert cmap.reserved_size == 26_752
        assert cmap.control_region_size == 207_360
        assert cmap.shared_pool_size == 1_023_872

    def test_partition_is_exact(self):
        cmap = wideband_map()
        assert (
            cmap.shared_pool_size + cmap.reserved_size + cmap.control_region_size
            == cmap.downlink_size
        )
        assert set(np.unique(cmap.categories)) <= {
            CAT_NON_DL, CAT_SHARED, CAT_RESERVED, CAT_CONTROL,
        }

    def test_separate_control_doubles_footprint(self):
        cmap = wideband_map(ControlMode(ControlModeKind.SEPARATE))
        assert cmap.control_region_size == 414_720
        assert cmap.shared_pool_size == 1_023_872 - 207_360

    def test_partially_overlapping(self):
        mode = ControlMode(ControlModeKind.PARTIALLY_OVERLAPPING, shared_fraction=0.5)
        cmap = wideband_map(mode)
        assert cmap.control_region_size == 207_360 + 103_680
        assert cmap.shared_pool_size == 1_023_872 - 103_680

    def test_no_overlay_all_shared(self):
        grid = make_grid(wideband_tdd_carrier())
        cmap = classify_mrss(grid)
        assert cmap.shared_pool_size == cmap.downlink_size == 1_257_984
        assert cmap.reserved_size == 0
        assert cmap.control_region_size == 0

    def test_fdd_grid_fully_shared(self):
        cmap = fdd_map()
        assert cmap.shared_pool_size == 168

    def test_control_mode_validation(self):
        with pytest.raises(ConfigError):
            ControlMode(ControlModeKind.PARTIALLY_OVERLAPPING)
        with pytest.raises(ConfigError):
            ControlMode(ControlModeKind.SEPARATE, shared_fraction=0.5)

    def test_separate_exhausting_shared_pool(self):
        carrier = CarrierConfig(Numerology(15), n_prb=1, duplex="FDD", span_ms=1)
        grid = make_grid(carrier)
        arr = grid.writable_labels()
        from gridshare import ReLabel, ResourceGrid

        arr[:, :13, :] = ReLabel.NR_PDCCH_CORESET1
        big = ResourceGrid(carrier, arr)
        with pytest.raises(PlacementError):
            classify_mrss(big, control_mode=ControlMode(ControlModeKind.SEPARATE))

    def test_misaligned_6g_carrier_rejected(self):
        other = CarrierConfig(Numerology(15), n_prb=273, duplex="FDD", span_ms=20)
        with pytest.raises(ConfigError, match="scs"):
            classify_mrss(make_grid(wideband_tdd_carrier()), carrier_6g=other)


class TestAlignment:
    def test_aligned(self):
        assert alignment_check(wideband_tdd_carrier(), wideband_tdd_carrier()).aligned

    def test_first_mismatch_reported_in_order(self):
        a = wideband_tdd_carrier()
        b = CarrierConfig(Numerology(15), n_prb=100, duplex="FDD", span_ms=20)
        assert alignment_check(a, b).reason == "scs"
        c = CarrierConfig(
            Numerology(30), n_prb=273, duplex="TDD", span_ms=20,
            tdd_pattern=TddPattern("DDDSU", (8, 2, 4)),
        )
        assert alignment_check(a, c).reason == "tdd_pattern"


class TestReserveIot:
    def test_reservation_shrinks_shared_pool(self):
        cmap = fdd_map(n_prb=4)
        out = reserve_iot(cmap, (0, 1))
        assert out.reserved_size == 168
        assert out.shared_pool_size == cmap.shared_pool_size - 168
        assert cmap.reserved_size == 0  # input map untouched

    def test_empty_range_is_identity(self):
        cmap = fdd_map(n_prb=4)
        out = reserve_iot(cmap, (2, 2))
        assert out.reserved_size == 0
        assert np.array_equal(out.categories, cmap.categories)

    def test_skips_non_downlink_cells(self):
        grid = make_grid(wideband_tdd_carrier())
        out = reserve_iot(classify_mrss(grid), (0, 1), slots=[4])
        # Slot 4 is uplink: nothing there is downlink-capable.
        assert out.reserved_size == 0

    def test_overlap_with_existing_footprint_rejected(self):
        cmap = wideband_map()
        with pytest.raises(ConflictError, match="shared pool"):
            reserve_iot(cmap, (0, 273), slots=[0])

    def test_range_validation(self):
        cmap = fdd_map(n_prb=4)
        with pytest.raises(ConfigError):
            reserve_iot(cmap, (3, 5))
        with pytest.raises(ConfigError):
            reserve_iot(cmap, (0, 1), slots=[9])


class TestPlace6gSsb:
    def test_four_beams_reserve_3840(self):
        cmap = wideband_map()
        occasions = [(10, 2, 100), (10, 8, 100), (11, 2, 100), (11, 8, 100)]
        out = place_6g_ssb(cmap, occasions)
        assert out.reserved_size == cmap.reserved_size + 3840
        assert out.shared_pool_size == cmap.shared_pool_size - 3840

    def test_zero_occasions_identity(self):
        cmap = wideband_map()
        out = place_6g_ssb(cmap, [])
        assert np.array_equal(out.categories, cmap.categories)

    def test_collision_with_5g_footprint(self):
        cmap = wideband_map()
        # Symbol 0 of a downlink slot carries CORESET 1 on PRBs 0..269.
        with pytest.raises(PlacementError, match="not hidden"):
            place_6g_ssb(cmap, [(0, 0, 0)])

    def test_out_of_range_occasion(self):
        cmap = wideband_map()
        with pytest.raises(ConfigError):
            place_6g_ssb(cmap, [(0, 11, 0)])  # symbols 11..14 overflow


class TestSimulate:
    def test_under_load_everyone_served(self):
        cmap = fdd_map()  # pool of 168 per slot
        result = simulate(cmap, TrafficModel(30, 10), SchedPolicy.PROPORTIONAL_SHARE)
        assert result.grants_5g == (30,)
        assert result.grants_6g == (10,)
        assert result.unused == (128,)
        assert result.dropped_5g == (0,) and result.dropped_6g == (0,)

    def test_conservation_per_slot(self):
        cmap = wideband_map()
        result = simulate(cmap, TrafficModel((0, 40000), (0, 40000), seed=3),
                          SchedPolicy.PROPORTIONAL_SHARE)
        pools = cmap.shared_cells_per_slot()
        for g5, g6, u, pool in zip(result.grants_5g, result.grants_6g,
                                   result.unused, pools.tolist()):
            assert g5 + g6 + u == pool
            assert u >= 0

    def test_proportional_symmetric_overload(self):
        cmap = fdd_map()
        result = simulate(cmap, TrafficModel(200, 200), SchedPolicy.PROPORTIONAL_SHARE)
        assert result.grants_5g == (84,)
        assert result.grants_6g == (84,)
        assert result.unused == (0,)

    def test_priority_5g_starves_6g(self):
        cmap = fdd_map()
        result = simulate(cmap, TrafficModel(200, 200), SchedPolicy.PRIORITY_5G)
        assert result.grants_5g == (168,)
        assert result.grants_6g == (0,)

    def test_idle_rat_frees_whole_pool(self):
        cmap = fdd_map()
        for policy in SchedPolicy:
            result = simulate(cmap, TrafficModel(500, 0), policy)
            assert result.grants_5g == (168,)
            assert result.grants_6g == (0,)
            assert result.efficiency_vs_pure_5g == 1.0
            assert result.efficiency_vs_pure_6g == 1.0

    def test_seed_determinism(self):
        cmap = wideband_map()
        t = TrafficModel((0, 50000), (0, 50000), seed=11)
        a = simulate(cmap, t, SchedPolicy.PROPORTIONAL_SHARE)
        b = simulate(cmap, t, SchedPolicy.PROPORTIONAL_SHARE)
        assert a == b

    def test_different_seeds_differ(self):
        cmap = wideband_map()
        a = simulate(cmap, TrafficModel((0, 50000), 0, seed=1),
                     SchedPolicy.PRIORITY_5G)
        b = simulate(cmap, TrafficModel((0, 50000), 0, seed=2),
                     SchedPolicy.PRIORITY_5G)
        assert a.grants_5g != b.grants_5g

    @settings(max_examples=60, deadline=None)
    @given(d5=st.integers(0, 400), d6=st.integers(0, 400))
    def test_policy_dominance_for_5g(self, d5, d6):
        cmap = fdd_map()
        g5 = {
            policy: simulate(cmap, TrafficModel(d5, d6), policy).total_5g
            for policy in SchedPolicy
        }
        assert g5[SchedPolicy.PRIORITY_5G] >= g5[SchedPolicy.PROPORTIONAL_SHARE]
        assert g5[SchedPolicy.PROPORTIONAL_SHARE] >= g5[SchedPolicy.PRIORITY_6G]

    def test_window_validation(self):
        cmap = fdd_map()
        with pytest.raises(ConfigError):
            simulate(cmap, TrafficModel(1, 1), SchedPolicy.PRIORITY_5G, n_slots=2)

    def test_traffic_validation(self):
        with pytest.raises(ConfigError):
            TrafficModel(-1, 0)
        with pytest.raises(ConfigError):
            TrafficModel((5, 2), 0)


class TestDssMechanisms:
    def test_crs_rate_match_matches_budget_table(self):
        budget = dss_mechanism_budget(DssMechanism("CrsRateMatch"),
                                      LteCellConfig(crs_ports=1, pdcch_symbols=2))
        assert budget.nr_usable_re == 102
        assert budget.lte_usable_re == 138

    def test_mbsfn_share(self):
        budget = dss_mechanism_budget(
            DssMechanism("MbsfnShare"),
            LteCellConfig(crs_ports=1, pdcch_symbols=2, non_mbsfn_region_len=2),
        )
        assert budget.nr_usable_re == (12 - 3) * 12 == 108
        assert budget.lte_usable_re == 0

    def test_minislot(self):
        budget = dss_mechanism_budget(
            DssMechanism("MiniSlot", minislot_len=4, dmrs_per_minislot=1),
            LteCellConfig(crs_ports=1, pdcch_symbols=2),
        )
        assert budget.nr_usable_re == 102
        assert budget.unused_symbols == 0

    def test_minislot_remainder_symbols(self):
        budget = dss_mechanism_budget(
            DssMechanism("MiniSlot", minislot_len=5, dmrs_per_minislot=1),
            LteCellConfig(crs_ports=1, pdcch_symbols=2),
        )
        assert budget.unused_symbols == 2

    def test_mechanism_validation(self):
        with pytest.raises(ConfigError):
            DssMechanism("Puncture")
        with pytest.raises(ConfigError):
            DssMechanism("MiniSlot", minislot_len=2, dmrs_per_minislot=3)


class TestNeighborInterference:
    def serving(self):
        return LteCellConfig(cell_id=0, crs_ports=1, pdcch_symbols=2)

    def test_co_shift_neighbor_is_invisible(self):
        # Same comb offset: every neighbor CRS cell already sits under the
        # serving CRS, outside the pool.
        report = neighbor_interference(
            self.serving(), [LteCellConfig(cell_id=6, crs_ports=1)],
            Mitigation("ServingOnlyRateMatch"),
        )
        assert report.pool_re == 102
        assert report.dirty_re == 0
        assert report.clean_re == 102

    def test_shifted_neighbor_dirty_cells(self):
        report = neighbor_interference(
            self.serving(), [LteCellConfig(cell_id=3, crs_ports=1)],
            Mitigation("ServingOnlyRateMatch"),
        )
        assert report.dirty_re == 6
        assert report.sacrificed_re == 0

    def test_neighbor_aware_trades_dirty_for_sacrificed(self):
        report = neighbor_interference(
            self.serving(), [LteCellConfig(cell_id=3, crs_ports=1)],
            Mitigation("NeighborAwareRateMatch"),
        )
        assert report.dirty_re == 0
        assert report.sacrificed_re == 6
        assert report.clean_re == 96

    def test_symbol_mute_sacrifices_whole_symbols(self):
        neighbors = [LteCellConfig(cell_id=3, crs_ports=1),
                     LteCellConfig(cell_id=7, crs_ports=1)]
        report = neighbor_interference(self.serving(), neighbors,
                                       Mitigation("SymbolLevelMute"))
        # Neighbor CRS rides symbols 4, 7, 11 inside the pool; each has
        # 10 pool cells after serving-CRS rate matching.
        assert report.sacrificed_re == 30
        assert report.dirty_re == 0

    def test_receiver_cancellation_extremes(self):
        serving = self.serving()
        neighbors = [LteCellConfig(cell_id=3, crs_ports=1)]
        full = neighbor_interference(serving, neighbors,
                                     Mitigation("ReceiverCancellation", 1.0))
        assert full.dirty_re == 0 and full.clean_re == full.pool_re
        none = neighbor_interference(serving, neighbors,
                                     Mitigation("ReceiverCancellation", 0.0))
        baseline = neighbor_interference(serving, neighbors,
                                         Mitigation("ServingOnlyRateMatch"))
        assert (none.clean_re, none.dirty_re) == (baseline.clean_re, baseline.dirty_re)

    def test_partial_cancellation_floors(self):
        report = neighbor_interference(
            self.serving(), [LteCellConfig(cell_id=3, crs_ports=1)],
            Mitigation("ReceiverCancellation", 0.5),
        )
        assert report.dirty_re == 3
        assert report.clean_re == report.pool_re - 3

    @settings(max_examples=60, deadline=None)
    @given(
        serving_id=st.integers(0, 11),
        serving_ports=st.sampled_from([1, 2, 4]),
        neighbor_ids=st.lists(st.integers(0, 11), max_size=3),
        neighbor_ports=st.sampled_from([1, 2, 4]),
        kind=st.sampled_from(Mitigation.KINDS),
        eff=st.floats(0.0, 1.0),
    )
    def test_conservation_invariant(self, serving_id, serving_ports,
                                    neighbor_ids, neighbor_ports, kind, eff):
        serving = LteCellConfig(cell_id=serving_id, crs_ports=serving_ports)
        neighbors = [LteCellConfig(cell_id=i, crs_ports=neighbor_ports)
                     for i in neighbor_ids]
        mit = Mitigation(kind, eff if kind == "ReceiverCancellation" else None)
        report = neighbor_interference(serving, neighbors, mit)
        assert report.clean_re + report.sacrificed_re + report.dirty_re == report.pool_re
        assert min(report.clean_re, report.sacrificed_re, report.dirty_re) >= 0

    def test_mitigation_validation(self):
        with pytest.raises(ConfigError):
            Mitigation("Nothing")
        with pytest.raises(ConfigError):
            Mitigation("ReceiverCancellation")
        with pytest.raises(ConfigError):
            Mitigation("SymbolLevelMute", effectiveness=0.5)
