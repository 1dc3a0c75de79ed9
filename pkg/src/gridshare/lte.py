"""LTE incumbent footprints: CRS combs, PDCCH region, sync/PBCH, MBSFN.

CRS mapping (normal CP, per 14-symbol subframe, v_shift = cell_id mod 6):
ports 0/1 sit on subframe symbols {0, 4, 7, 11}, ports 2/3 on {1, 8}; each
port contributes a period-6 comb with two cells per PRB per symbol. Port 0
uses subcarrier offset v at symbols 0/7 and v+3 at symbols 4/11; port 1
swaps the two offsets; port 2 uses v, port 3 uses v+3 (offsets mod 6).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import ConfigError
from .grid import (
    SC_PER_PRB,
    SYMBOLS_PER_SLOT,
    CarrierConfig,
    ReLabel,
    ResourceGrid,
)

CRS_SYMBOLS_P01 = (0, 4, 7, 11)
CRS_SYMBOLS_P23 = (1, 8)

SYNC_SUBCARRIERS = 72  # center 6 PRBs
PSS_SSS_SYMBOLS = (5, 6)  # last two symbols of slot 0
PBCH_SYMBOLS = (7, 8, 9, 10)  # first four symbols of slot 1


@dataclass(frozen=True)
class LteCellConfig:
    cell_id: int = 0
    crs_ports: int = 4
    pdcch_symbols: int = 2
    mbsfn_subframes: FrozenSet[int] = frozenset()
    non_mbsfn_region_len: int = 2

    def __post_init__(self):
        object.__setattr__(self, "mbsfn_subframes", frozenset(self.mbsfn_subframes))
        if self.cell_id < 0:
            raise ConfigError(f"cell_id must be >= 0, got {self.cell_id}")
        if self.crs_ports not in (1, 2, 4):
            raise ConfigError(f"crs_ports must be 1, 2 or 4, got {self.crs_ports}")
        if self.pdcch_symbols not in (1, 2, 3):
            raise ConfigError(f"pdcch_symbols must be 1..3, got {self.pdcch_symbols}")
        if self.non_mbsfn_region_len not in (1, 2):
            raise ConfigError(
                f"non_mbsfn_region_len must be 1 or 2, got {self.non_mbsfn_region_len}"
            )

    @property
    def v_shift(self) -> int:
        return self.cell_id % 6


def _port_symbol_offsets(cfg: LteCellConfig, port: int) -> Dict[int, int]:
    """Map subframe symbol -> in-PRB comb offset (0..5) for one CRS port."""
    k0 = cfg.v_shift % 6
    k1 = (cfg.v_shift + 3) % 6
    if port == 0:
        return {0: k0, 4: k1, 7: k0, 11: k1}
    if port == 1:
        return {0: k1, 4: k0, 7: k1, 11: k0}
    if port == 2:
        return {1: k0, 8: k0}
    if port == 3:
        return {1: k1, 8: k1}
    raise ConfigError(f"CRS port must be 0..3, got {port}")


def crs_symbols(cfg: LteCellConfig) -> FrozenSet[int]:
    """Subframe symbols that carry CRS for this port configuration."""
    symbols = set(CRS_SYMBOLS_P01)
    if cfg.crs_ports == 4:
        symbols.update(CRS_SYMBOLS_P23)
    return frozenset(symbols)


def crs_cells(
    cfg: LteCellConfig, n_prb: int, subframe_index: int = 0
) -> Set[Tuple[int, int, int]]:
    """CRS cell set as (symbol, subcarrier, port) tuples for one subframe.

    The pattern repeats every subframe; 8/16/24 cells per PRB for 1/2/4 ports.
    """
    del subframe_index  # pattern is subframe-invariant
    cells: Set[Tuple[int, int, int]] = set()
    for port in range(cfg.crs_ports):
        for symbol, offset in _port_symbol_offsets(cfg, port).items():
            for prb in range(n_prb):
                base = prb * SC_PER_PRB
                cells.add((symbol, base + offset, port))
                cells.add((symbol, base + offset + 6, port))
    return cells


def crs_positions_per_prb(cfg: LteCellConfig) -> Set[Tuple[int, int]]:
    """(symbol, subcarrier 0..11) CRS positions inside a single PRB."""
    return {(sym, sc) for (sym, sc, _port) in crs_cells(cfg, 1)}


def apply_lte(
    grid: ResourceGrid,
    cfg: LteCellConfig,
    subframes: Optional[Sequence[int]] = None,
    include_sync: bool = True,
) -> ResourceGrid:
    """Overlay one LTE cell's downlink structure onto a 15 kHz grid.

    CRS takes label precedence inside the PDCCH region so control-region vs
    data-region CRS stays countable. In MBSFN subframes the control region is
    non_mbsfn_region_len symbols and everything after it is muted, with no
    CRS beyond the non-MBSFN region. PSS/SSS sit in subframes 0 and 5 mod 10
    and PBCH in subframe 0 mod 10, on the center 72 subcarriers (requires
    n_prb >= 6; skipped when include_sync is False).
    """
    carrier = grid.config
    if carrier.numerology.scs_khz != 15:
        raise ConfigError("LTE requires 15 kHz")
    if subframes is None:
        subframes = range(carrier.n_slots)
    for sf in subframes:
        if not 0 <= sf < carrier.n_slots:
            raise ConfigError(f"subframe index {sf} out of range")

    arr = grid.writable_labels()
    n_sc = carrier.n_subcarriers
    cells = crs_cells(cfg, carrier.n_prb)
    for sf in subframes:
        mbsfn = sf in cfg.mbsfn_subframes
        ctrl_len = cfg.non_mbsfn_region_len if mbsfn else cfg.pdcch_symbols
        crs_limit = cfg.non_mbsfn_region_len if mbsfn else SYMBOLS_PER_SLOT
        for symbol, sc, port in cells:
            if symbol < crs_limit:
                arr[sf, symbol, sc] = ReLabel.lte_crs(port)
        control = arr[sf, 0:ctrl_len, :]
        control[control == ReLabel.UNLABELED] = ReLabel.LTE_PDCCH
        if mbsfn:
            muted = arr[sf, cfg.non_mbsfn_region_len :, :]
            muted[muted == ReLabel.UNLABELED] = ReLabel.LTE_MBSFN_MUTED
        elif include_sync and carrier.n_prb >= 6:
            lo = (n_sc - SYNC_SUBCARRIERS) // 2
            hi = lo + SYNC_SUBCARRIERS
            if sf % 5 == 0:  # PSS/SSS in subframes 0 and 5 of each frame
                for symbol in PSS_SSS_SYMBOLS:
                    row = arr[sf, symbol, lo:hi]
                    row[row == ReLabel.UNLABELED] = ReLabel.LTE_PSS_SSS_PBCH
            if sf % 10 == 0:  # PBCH in subframe 0, rate-matched around CRS
                for symbol in PBCH_SYMBOLS:
                    row = arr[sf, symbol, lo:hi]
                    row[row == ReLabel.UNLABELED] = ReLabel.LTE_PSS_SSS_PBCH
    return ResourceGrid(carrier, arr)
