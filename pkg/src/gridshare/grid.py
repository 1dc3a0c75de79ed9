"""Numerology, carrier configuration, and the labeled time-frequency grid.

The grid is a dense (slot, symbol, subcarrier) lattice where every resource
element carries exactly one label. All operations are pure: they validate,
copy, and return new grids, so grids behave as immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .errors import ConfigError, ConflictError

SYMBOLS_PER_SLOT = 14
SC_PER_PRB = 12


class SlotKind(Enum):
    DOWNLINK = "D"
    SPECIAL = "S"
    UPLINK = "U"


class ReLabel(IntEnum):
    """Closed label alphabet for resource elements."""

    UNLABELED = 0
    LTE_PDCCH = 1
    LTE_CRS_P0 = 2
    LTE_CRS_P1 = 3
    LTE_CRS_P2 = 4
    LTE_CRS_P3 = 5
    LTE_PSS_SSS_PBCH = 6
    LTE_DATA = 7
    LTE_MBSFN_MUTED = 8
    NR_PDCCH_CORESET0 = 9
    NR_PDCCH_CORESET1 = 10
    NR_SSB = 11
    NR_SIB1 = 12
    NR_DMRS = 13
    NR_CSI_RS = 14
    NR_TRS = 15
    NR_DATA = 16
    SIXG_SSB = 17
    SIXG_CONTROL = 18
    SIXG_DATA = 19
    RESERVED_IOT = 20
    GUARD_SYMBOL = 21
    UPLINK_SYMBOL = 22

    @staticmethod
    def lte_crs(port: int) -> "ReLabel":
        if port not in (0, 1, 2, 3):
            raise ConfigError(f"CRS port index must be 0..3, got {port}")
        return ReLabel(ReLabel.LTE_CRS_P0 + port)


LTE_CRS_LABELS = frozenset(
    {ReLabel.LTE_CRS_P0, ReLabel.LTE_CRS_P1, ReLabel.LTE_CRS_P2, ReLabel.LTE_CRS_P3}
)


class OverridePolicy(Enum):
    ERROR_ON_CONFLICT = "ErrorOnConflict"
    OVERWRITE = "Overwrite"


@dataclass(frozen=True)
class Numerology:
    """Subcarrier spacing and derived slot timing (normal cyclic prefix)."""

    scs_khz: int = 15

    def __post_init__(self):
        if self.scs_khz not in (15, 30):
            raise ConfigError(f"scs_khz must be 15 or 30, got {self.scs_khz}")

    @property
    def symbols_per_slot(self) -> int:
        return SYMBOLS_PER_SLOT

    @property
    def slots_per_ms(self) -> int:
        return self.scs_khz // 15


@dataclass(frozen=True)
class TddPattern:
    """Ordered slot-kind cycle plus the DL/guard/UL split of special slots."""

    cycle: Tuple[SlotKind, ...]
    special_split: Tuple[int, int, int] = (6, 4, 4)

    def __post_init__(self):
        if isinstance(self.cycle, str):
            object.__setattr__(self, "cycle", tuple(SlotKind(c) for c in self.cycle))
        else:
            object.__setattr__(self, "cycle", tuple(SlotKind(c) if isinstance(c, str) else c for c in self.cycle))
        object.__setattr__(self, "special_split", tuple(self.special_split))
        if not self.cycle:
            raise ConfigError("TDD cycle must be non-empty")
        if len(self.special_split) != 3 or any(x < 0 for x in self.special_split):
            raise ConfigError("special_split must be three non-negative counts")
        if sum(self.special_split) != SYMBOLS_PER_SLOT:
            raise ConfigError(
                f"special_split must sum to {SYMBOLS_PER_SLOT}, got {sum(self.special_split)}"
            )

    @property
    def cycle_str(self) -> str:
        return "".join(k.value for k in self.cycle)


@dataclass(frozen=True)
class CarrierConfig:
    """Carrier-level parameters fixing the grid dimensions."""

    numerology: Numerology
    n_prb: int
    duplex: str = "FDD"
    span_ms: int = 1
    tdd_pattern: Optional[TddPattern] = None

    def __post_init__(self):
        if self.n_prb < 1:
            raise ConfigError(f"n_prb must be >= 1, got {self.n_prb}")
        if self.duplex not in ("FDD", "TDD"):
            raise ConfigError(f"duplex must be FDD or TDD, got {self.duplex!r}")
        if self.duplex == "TDD" and self.tdd_pattern is None:
            raise ConfigError("TDD carrier requires a tdd_pattern")
        if self.duplex == "FDD" and self.tdd_pattern is not None:
            raise ConfigError("FDD carrier must not carry a tdd_pattern")
        slots = self.span_ms * self.numerology.slots_per_ms
        if slots != int(slots) or slots < 1:
            raise ConfigError(
                f"span_ms x slots_per_ms must be a positive integer slot count, got {slots}"
            )
        if self.duplex == "TDD" and int(slots) % len(self.tdd_pattern.cycle) != 0:
            raise ConfigError(
                f"TDD span of {int(slots)} slots is not a whole number of "
                f"{len(self.tdd_pattern.cycle)}-slot cycles"
            )

    @property
    def n_slots(self) -> int:
        return int(self.span_ms * self.numerology.slots_per_ms)

    @property
    def n_subcarriers(self) -> int:
        return SC_PER_PRB * self.n_prb

    def slot_kind(self, slot: int) -> SlotKind:
        if self.duplex == "FDD":
            return SlotKind.DOWNLINK
        return self.tdd_pattern.cycle[slot % len(self.tdd_pattern.cycle)]

    def dl_symbols_in_slot(self, slot: int) -> int:
        """Count of downlink-capable symbols in a slot (leading symbols)."""
        kind = self.slot_kind(slot)
        if kind is SlotKind.DOWNLINK:
            return SYMBOLS_PER_SLOT
        if kind is SlotKind.SPECIAL:
            return self.tdd_pattern.special_split[0]
        return 0

    def dl_bearing_slots(self) -> Tuple[int, ...]:
        return tuple(s for s in range(self.n_slots) if self.dl_symbols_in_slot(s) > 0)


@dataclass(frozen=True)
class ResourceGrid:
    """Dense label lattice indexed (slot, symbol, subcarrier)."""

    config: CarrierConfig
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (self.config.n_slots, SYMBOLS_PER_SLOT, self.config.n_subcarriers)
        if self.labels.shape != expected:
            raise ConfigError(f"label lattice shape {self.labels.shape} != {expected}")
        self.labels.setflags(write=False)

    @property
    def n_cells(self) -> int:
        return int(self.labels.size)

    def writable_labels(self) -> np.ndarray:
        return self.labels.copy()


def make_grid(config: CarrierConfig) -> ResourceGrid:
    """Fresh grid; TDD uplink/guard symbols are pre-labeled at construction."""
    arr = np.zeros(
        (config.n_slots, SYMBOLS_PER_SLOT, config.n_subcarriers), dtype=np.uint8
    )
    if config.duplex == "TDD":
        dl, guard, _ul = config.tdd_pattern.special_split
        for slot in range(config.n_slots):
            kind = config.slot_kind(slot)
            if kind is SlotKind.UPLINK:
                arr[slot, :, :] = ReLabel.UPLINK_SYMBOL
            elif kind is SlotKind.SPECIAL:
                arr[slot, dl : dl + guard, :] = ReLabel.GUARD_SYMBOL
                arr[slot, dl + guard :, :] = ReLabel.UPLINK_SYMBOL
    return ResourceGrid(config, arr)


def apply_overlay(
    grid: ResourceGrid,
    cells: Iterable[Tuple[int, int, int]],
    label: ReLabel,
    override_policy: OverridePolicy = OverridePolicy.ERROR_ON_CONFLICT,
) -> ResourceGrid:
    """Label a cell set atomically.

    Under ERROR_ON_CONFLICT any already-labeled cell aborts the whole
    application and the input grid is returned unchanged (it is never
    mutated). OVERWRITE is restricted to MBSFN muting semantics:
    LteData/Unlabeled -> LteMbsfnMuted.
    """
    cfg = grid.config
    ordered = sorted(set(cells))
    for slot, symbol, sc in ordered:
        if not (0 <= slot < cfg.n_slots and 0 <= symbol < SYMBOLS_PER_SLOT and 0 <= sc < cfg.n_subcarriers):
            raise ConfigError(f"cell index out of range: {(slot, symbol, sc)}")

    if override_policy is OverridePolicy.OVERWRITE:
        if label is not ReLabel.LTE_MBSFN_MUTED:
            raise ConflictError(
                "Overwrite is only permitted for MBSFN muting (target LteMbsfnMuted), "
                f"got {label.name}"
            )
        allowed = {ReLabel.LTE_DATA, ReLabel.UNLABELED}
        for cell in ordered:
            existing = ReLabel(grid.labels[cell])
            if existing not in allowed:
                raise ConflictError(
                    f"cannot mute cell {cell}: existing label {existing.name}"
                )
    else:
        for cell in ordered:
            existing = ReLabel(grid.labels[cell])
            if existing is not ReLabel.UNLABELED:
                raise ConflictError(
                    f"conflict at cell {cell}: existing {existing.name}, new {label.name}"
                )

    arr = grid.writable_labels()
    for cell in ordered:
        arr[cell] = label
    return ResourceGrid(cfg, arr)


def count_labels(
    grid: ResourceGrid,
    slot_range: Optional[Tuple[int, int]] = None,
    prb_range: Optional[Tuple[int, int]] = None,
) -> Dict[ReLabel, int]:
    """Exact per-label cell counts over a half-open (slot, PRB) sub-window.

    Only labels with non-zero counts appear; counts sum to the window size.
    """
    cfg = grid.config
    s0, s1 = slot_range if slot_range is not None else (0, cfg.n_slots)
    p0, p1 = prb_range if prb_range is not None else (0, cfg.n_prb)
    if not (0 <= s0 < s1 <= cfg.n_slots):
        raise ConfigError(f"empty or inverted slot range ({s0}, {s1})")
    if not (0 <= p0 < p1 <= cfg.n_prb):
        raise ConfigError(f"empty or inverted PRB range ({p0}, {p1})")
    window = grid.labels[s0:s1, :, p0 * SC_PER_PRB : p1 * SC_PER_PRB]
    values, counts = np.unique(window, return_counts=True)
    return {ReLabel(int(v)): int(c) for v, c in zip(values, counts)}


def count_label(grid: ResourceGrid, label: ReLabel) -> int:
    return int(np.count_nonzero(grid.labels == label))


def crs_count(counts: Dict[ReLabel, int]) -> int:
    """Aggregate CRS count across the four per-port labels."""
    return sum(counts.get(l, 0) for l in LTE_CRS_LABELS)
