"""Dual-RAT coexistence behavior on top of the labeled grid.

Covers the three-category MRSS resource model with a slot-level scheduler,
the classic DSS sharing mechanisms as per-PRB budgets, and neighbor-cell
CRS interference with its mitigation strategies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .budget import DssLayout, default_dmrs_symbols, dss_pool_per_prb, ports_on_symbol
from .errors import ConfigError, ConflictError, PlacementError
from .grid import (
    SC_PER_PRB,
    SYMBOLS_PER_SLOT,
    CarrierConfig,
    ReLabel,
    ResourceGrid,
)
from .lte import LteCellConfig, crs_positions_per_prb

# Category codes of the MRSS partition lattice.
CAT_NON_DL = 0
CAT_SHARED = 1
CAT_RESERVED = 2
CAT_CONTROL = 3

DEFAULT_RESERVED_LABELS = frozenset(
    {
        ReLabel.NR_SSB,
        ReLabel.NR_PDCCH_CORESET0,
        ReLabel.NR_SIB1,
        ReLabel.NR_CSI_RS,
        ReLabel.NR_TRS,
        ReLabel.RESERVED_IOT,
        ReLabel.SIXG_SSB,
    }
)

CONTROL_LABELS = frozenset({ReLabel.NR_PDCCH_CORESET1, ReLabel.SIXG_CONTROL})

_NON_DL_LABELS = frozenset({ReLabel.UPLINK_SYMBOL, ReLabel.GUARD_SYMBOL})


class ControlModeKind(Enum):
    FULLY_OVERLAPPING = "FullyOverlapping"
    PARTIALLY_OVERLAPPING = "PartiallyOverlapping"
    SEPARATE = "Separate"


@dataclass(frozen=True)
class ControlMode:
    kind: ControlModeKind = ControlModeKind.FULLY_OVERLAPPING
    shared_fraction: Optional[float] = None

    def __post_init__(self):
        if self.kind is ControlModeKind.PARTIALLY_OVERLAPPING:
            if self.shared_fraction is None or not 0.0 <= self.shared_fraction <= 1.0:
                raise ConfigError("PartiallyOverlapping needs shared_fraction in [0, 1]")
        elif self.shared_fraction is not None:
            raise ConfigError(f"{self.kind.value} takes no shared_fraction")

    @property
    def footprint_factor(self) -> float:
        if self.kind is ControlModeKind.FULLY_OVERLAPPING:
            return 1.0
        if self.kind is ControlModeKind.SEPARATE:
            return 2.0
        return 2.0 - self.shared_fraction


class SchedPolicy(Enum):
    PRIORITY_5G = "Priority5G"
    PRIORITY_6G = "Priority6G"
    PROPORTIONAL_SHARE = "ProportionalShare"


@dataclass(frozen=True)
class Mitigation:
    kind: str  # ServingOnlyRateMatch | NeighborAwareRateMatch | SymbolLevelMute | ReceiverCancellation
    effectiveness: Optional[float] = None

    KINDS = (
        "ServingOnlyRateMatch",
        "NeighborAwareRateMatch",
        "SymbolLevelMute",
        "ReceiverCancellation",
    )

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown mitigation {self.kind!r}")
        if self.kind == "ReceiverCancellation":
            if self.effectiveness is None or not 0.0 <= self.effectiveness <= 1.0:
                raise ConfigError("ReceiverCancellation needs effectiveness in [0, 1]")
        elif self.effectiveness is not None:
            raise ConfigError(f"{self.kind} takes no effectiveness")


@dataclass(frozen=True)
class TrafficModel:
    """Per-RAT offered load in REs per slot; constant or seeded uniform."""

    demand_5g: object  # int or (lo, hi)
    demand_6g: object
    seed: int = 0

    def __post_init__(self):
        for name, d in (("demand_5g", self.demand_5g), ("demand_6g", self.demand_6g)):
            if isinstance(d, (list, tuple)):
                if len(d) != 2 or d[0] < 0 or d[1] < d[0]:
                    raise ConfigError(f"{name} range must be (lo, hi) with 0 <= lo <= hi")
                object.__setattr__(self, name, (int(d[0]), int(d[1])))
            elif isinstance(d, int) and not isinstance(d, bool):
                if d < 0:
                    raise ConfigError(f"{name} must be >= 0")
            else:
                raise ConfigError(f"{name} must be an int or a (lo, hi) pair")

    def demands(self, n_slots: int) -> Tuple[np.ndarray, np.ndarray]:
        """Per-slot demand sequences; identical seed yields identical draws."""
        rng = np.random.default_rng(self.seed)

        def draw(d):
            if isinstance(d, tuple):
                return rng.integers(d[0], d[1] + 1, size=n_slots, dtype=np.int64)
            return np.full(n_slots, d, dtype=np.int64)

        return draw(self.demand_5g), draw(self.demand_6g)


@dataclass
class MrssCategoryMap:
    """Partition of the downlink-capable cells into shared/reserved/control."""

    grid: ResourceGrid
    categories: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    control_mode: ControlMode = field(default_factory=ControlMode)

    @property
    def shared_pool_size(self) -> int:
        return int(np.count_nonzero(self.categories == CAT_SHARED))

    @property
    def reserved_size(self) -> int:
        return int(np.count_nonzero(self.categories == CAT_RESERVED))

    @property
    def control_region_size(self) -> int:
        return int(np.count_nonzero(self.categories == CAT_CONTROL))

    @property
    def downlink_size(self) -> int:
        return int(np.count_nonzero(self.categories != CAT_NON_DL))

    def shared_cells_per_slot(self) -> np.ndarray:
        return (self.categories == CAT_SHARED).sum(axis=(1, 2)).astype(np.int64)

    def cell_sets(self) -> Dict[str, Set[Tuple[int, int, int]]]:
        """Explicit cell sets; intended for small grids and invariant checks."""
        out = {"shared_pool": set(), "reserved": set(), "control_region": set()}
        names = {CAT_SHARED: "shared_pool", CAT_RESERVED: "reserved", CAT_CONTROL: "control_region"}
        for cat, name in names.items():
            idx = np.argwhere(self.categories == cat)
            out[name] = {tuple(map(int, c)) for c in idx}
        return out


@dataclass(frozen=True)
class SimResult:
    grants_5g: Tuple[int, ...]
    grants_6g: Tuple[int, ...]
    unused: Tuple[int, ...]
    dropped_5g: Tuple[int, ...]
    dropped_6g: Tuple[int, ...]
    shared_pool_size: int
    total_5g: int
    total_6g: int
    unused_shared: int
    efficiency_vs_pure_5g: float
    efficiency_vs_pure_6g: float


@dataclass(frozen=True)
class InterferenceReport:
    """Per-PRB classification of the serving cell's NR data pool."""

    pool_re: int
    clean_re: int
    sacrificed_re: int
    dirty_re: int


@dataclass(frozen=True)
class MechanismBudget:
    nr_usable_re: int
    lte_usable_re: int
    unused_symbols: int = 0


@dataclass(frozen=True)
class AlignmentResult:
    aligned: bool
    reason: Optional[str] = None


def alignment_check(carrier_5g: CarrierConfig, carrier_6g: CarrierConfig) -> AlignmentResult:
    """Numerology/slot-structure compatibility gate for fine-grained sharing."""
    if carrier_5g.numerology.scs_khz != carrier_6g.numerology.scs_khz:
        return AlignmentResult(False, "scs")
    if carrier_5g.n_prb != carrier_6g.n_prb:
        return AlignmentResult(False, "n_prb")
    if carrier_5g.duplex != carrier_6g.duplex:
        return AlignmentResult(False, "duplex")
    if carrier_5g.tdd_pattern != carrier_6g.tdd_pattern:
        return AlignmentResult(False, "tdd_pattern")
    return AlignmentResult(True)


def classify_mrss(
    grid: ResourceGrid,
    reserved_labels: FrozenSet[ReLabel] = DEFAULT_RESERVED_LABELS,
    control_mode: ControlMode = ControlMode(),
    carrier_6g: Optional[CarrierConfig] = None,
) -> MrssCategoryMap:
    """Partition downlink-capable cells into shared pool, reserved, control.

    The 5G control footprint (CORESET1 cells) anchors the control region;
    partially-overlapping and separate 6G control grow it by
    footprint x (factor - 1) additional cells taken from the shared pool in
    deterministic scan order.
    """
    if reserved_labels & CONTROL_LABELS:
        raise ConfigError("reserved labels overlap the control labels")
    if carrier_6g is not None:
        result = alignment_check(grid.config, carrier_6g)
        if not result.aligned:
            raise ConfigError(f"5G/6G carriers misaligned: {result.reason}")

    labels = grid.labels
    categories = np.full(labels.shape, CAT_SHARED, dtype=np.uint8)
    non_dl = np.isin(labels, [int(l) for l in _NON_DL_LABELS])
    categories[non_dl] = CAT_NON_DL
    reserved = np.isin(labels, [int(l) for l in reserved_labels])
    categories[reserved] = CAT_RESERVED
    control = np.isin(labels, [int(l) for l in CONTROL_LABELS])
    categories[control] = CAT_CONTROL

    footprint = int(np.count_nonzero(control))
    extra = int(footprint * (control_mode.footprint_factor - 1.0))
    if extra > 0:
        flat = categories.reshape(-1)
        shared_idx = np.flatnonzero(flat == CAT_SHARED)
        if extra > shared_idx.size:
            raise PlacementError(
                f"separate control needs {extra} cells but only {shared_idx.size} are shared"
            )
        flat[shared_idx[:extra]] = CAT_CONTROL
    return MrssCategoryMap(
        grid=grid,
        categories=categories,
        labels=grid.writable_labels(),
        control_mode=control_mode,
    )


def reserve_iot(
    cmap: MrssCategoryMap,
    prb_range: Tuple[int, int],
    slots: Optional[Iterable[int]] = None,
) -> MrssCategoryMap:
    """Semi-static IoT reservation: move shared-pool cells to reserved.

    Applies to the downlink-capable cells of the named PRBs/slots; any cell
    there that is not currently in the shared pool is an error.
    """
    cfg = cmap.grid.config
    p0, p1 = prb_range
    if not 0 <= p0 <= p1 <= cfg.n_prb:
        raise ConfigError(f"PRB range ({p0}, {p1}) out of bounds")
    slot_list = list(range(cfg.n_slots)) if slots is None else sorted(set(slots))
    for s in slot_list:
        if not 0 <= s < cfg.n_slots:
            raise ConfigError(f"slot {s} out of range")

    categories = cmap.categories.copy()
    labels = cmap.labels.copy()
    for s in slot_list:
        window = categories[s, :, p0 * SC_PER_PRB : p1 * SC_PER_PRB]
        dl = window != CAT_NON_DL
        if np.any(window[dl] != CAT_SHARED):
            bad = np.argwhere(dl & (window != CAT_SHARED))[0]
            raise ConflictError(
                f"cell (slot {s}, symbol {int(bad[0])}, sc {p0 * SC_PER_PRB + int(bad[1])}) "
                "is not in the shared pool"
            )
        window[dl] = CAT_RESERVED
        lw = labels[s, :, p0 * SC_PER_PRB : p1 * SC_PER_PRB]
        lw[dl] = ReLabel.RESERVED_IOT
    return MrssCategoryMap(cmap.grid, categories, labels, cmap.control_mode)


def place_6g_ssb(
    cmap: MrssCategoryMap,
    occasions: Sequence[Tuple[int, int, int]],
    prbs: int = 20,
    symbols: int = 4,
) -> MrssCategoryMap:
    """Reserve 6G SSB beam blocks at (slot, first_symbol, first_prb) anchors.

    The hidden-from-5G constraint is structural: every targeted cell must be
    an unlabeled shared-pool cell, so a collision with any 5G footprint
    (SSB, control, ...) is rejected as "not hidden".
    """
    cfg = cmap.grid.config
    categories = cmap.categories.copy()
    labels = cmap.labels.copy()
    for slot, symbol, prb in occasions:
        if not (0 <= slot < cfg.n_slots and 0 <= symbol and symbol + symbols <= SYMBOLS_PER_SLOT and 0 <= prb and prb + prbs <= cfg.n_prb):
            raise ConfigError(f"6G SSB occasion {(slot, symbol, prb)} out of range")
        sl = slice(prb * SC_PER_PRB, (prb + prbs) * SC_PER_PRB)
        cat = categories[slot, symbol : symbol + symbols, sl]
        lab = labels[slot, symbol : symbol + symbols, sl]
        if np.any(cat != CAT_SHARED) or np.any(lab != ReLabel.UNLABELED):
            raise PlacementError(
                f"6G SSB occasion {(slot, symbol, prb)} is not hidden: "
                "collides with a 5G footprint or leaves the shared pool"
            )
        cat[:] = CAT_RESERVED
        lab[:] = ReLabel.SIXG_SSB
    return MrssCategoryMap(cmap.grid, categories, labels, cmap.control_mode)


def _grant_slot(pool: int, d5: int, d6: int, policy: SchedPolicy) -> Tuple[int, int]:
    if policy is SchedPolicy.PRIORITY_5G:
        g5 = min(d5, pool)
        return g5, min(d6, pool - g5)
    if policy is SchedPolicy.PRIORITY_6G:
        g6 = min(d6, pool)
        return min(d5, pool - g6), g6
    # ProportionalShare
    total = d5 + d6
    if total <= pool:
        return d5, d6
    g5 = pool * d5 // total
    g6 = pool * d6 // total
    leftover = pool - g5 - g6
    # Leftover cells go to the larger-demand RAT first; ties favor 5G.
    first_5g = d5 >= d6
    for _ in range(leftover):
        if first_5g and g5 < d5:
            g5 += 1
        elif g6 < d6:
            g6 += 1
        elif g5 < d5:
            g5 += 1
        else:
            break
    return g5, g6


def simulate(
    cmap: MrssCategoryMap,
    traffic: TrafficModel,
    policy: SchedPolicy,
    n_slots: Optional[int] = None,
) -> SimResult:
    """Slot-level dual-RAT scheduling over the shared pool.

    Per slot: grants(5G) + grants(6G) + unused = shared cells available that
    slot; excess demand is dropped and reported. Deterministic given the
    traffic seed.
    """
    per_slot = cmap.shared_cells_per_slot()
    if n_slots is None:
        n_slots = per_slot.size
    if not 0 < n_slots <= per_slot.size:
        raise ConfigError(f"n_slots {n_slots} outside grid window of {per_slot.size}")
    per_slot = per_slot[:n_slots]
    d5s, d6s = traffic.demands(n_slots)

    g5s: List[int] = []
    g6s: List[int] = []
    unused: List[int] = []
    drop5: List[int] = []
    drop6: List[int] = []
    pure5 = 0
    pure6 = 0
    for pool, d5, d6 in zip(per_slot.tolist(), d5s.tolist(), d6s.tolist()):
        g5, g6 = _grant_slot(pool, d5, d6, policy)
        g5s.append(g5)
        g6s.append(g6)
        unused.append(pool - g5 - g6)
        drop5.append(d5 - g5)
        drop6.append(d6 - g6)
        pure5 += min(d5, pool)
        pure6 += min(d6, pool)

    total5 = sum(g5s)
    total6 = sum(g6s)
    return SimResult(
        grants_5g=tuple(g5s),
        grants_6g=tuple(g6s),
        unused=tuple(unused),
        dropped_5g=tuple(drop5),
        dropped_6g=tuple(drop6),
        shared_pool_size=int(per_slot.sum()),
        total_5g=total5,
        total_6g=total6,
        unused_shared=sum(unused),
        efficiency_vs_pure_5g=(total5 / pure5) if pure5 else 1.0,
        efficiency_vs_pure_6g=(total6 / pure6) if pure6 else 1.0,
    )


@dataclass(frozen=True)
class DssMechanism:
    """One of the practical DSS sharing mechanisms."""

    kind: str  # MbsfnShare | MiniSlot | CrsRateMatch
    minislot_len: Optional[int] = None
    dmrs_per_minislot: Optional[int] = None

    KINDS = ("MbsfnShare", "MiniSlot", "CrsRateMatch")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown DSS mechanism {self.kind!r}")
        if self.kind == "MiniSlot":
            if not self.minislot_len or self.minislot_len < 1:
                raise ConfigError("MiniSlot needs minislot_len >= 1")
            if self.dmrs_per_minislot is None or not 0 <= self.dmrs_per_minislot <= self.minislot_len:
                raise ConfigError("MiniSlot needs dmrs_per_minislot in 0..minislot_len")


def dss_mechanism_budget(
    mechanism: DssMechanism,
    lte_cfg: LteCellConfig,
    layout: DssLayout = DssLayout(),
) -> MechanismBudget:
    """Per-PRB usable REs for NR and LTE under one DSS sharing mechanism."""
    if mechanism.kind == "CrsRateMatch":
        dmrs = default_dmrs_symbols(lte_cfg.crs_ports, layout.control_end, layout.dmrs_count)
        nr = dss_pool_per_prb(lte_cfg.crs_ports, layout.lte_pdcch, layout.nr_pdcch, dmrs)
        lte = (SYMBOLS_PER_SLOT - layout.lte_pdcch) * SC_PER_PRB - sum(
            2 * ports_on_symbol(lte_cfg.crs_ports, s)
            for s in range(layout.lte_pdcch, SYMBOLS_PER_SLOT)
        )
        return MechanismBudget(nr_usable_re=nr, lte_usable_re=lte)

    if mechanism.kind == "MbsfnShare":
        # LTE mutes its data region; NR places control + DMRS inside the
        # CRS-free muted block.
        region = SYMBOLS_PER_SLOT - lte_cfg.non_mbsfn_region_len
        overhead = layout.nr_pdcch + layout.dmrs_count
        if overhead > region:
            raise ConfigError("NR control+DMRS exceed the MBSFN muted region")
        return MechanismBudget(
            nr_usable_re=(region - overhead) * SC_PER_PRB,
            lte_usable_re=0,
        )

    # MiniSlot: NR occupies mini-slots after the LTE control region, paying
    # one DMRS burden per mini-slot; CRS cells are still rate-matched.
    start = lte_cfg.pdcch_symbols
    run = SYMBOLS_PER_SLOT - start
    n_mini = run // mechanism.minislot_len
    remainder = run - n_mini * mechanism.minislot_len
    usable = 0
    for m in range(n_mini):
        first = start + m * mechanism.minislot_len
        for offset in range(mechanism.minislot_len):
            sym = first + offset
            if offset < mechanism.dmrs_per_minislot:
                continue  # DMRS symbol, no data
            usable += SC_PER_PRB - 2 * ports_on_symbol(lte_cfg.crs_ports, sym)
    lte = (SYMBOLS_PER_SLOT - lte_cfg.pdcch_symbols) * SC_PER_PRB - sum(
        2 * ports_on_symbol(lte_cfg.crs_ports, s)
        for s in range(lte_cfg.pdcch_symbols, SYMBOLS_PER_SLOT)
    )
    return MechanismBudget(nr_usable_re=usable, lte_usable_re=lte, unused_symbols=remainder)


def neighbor_interference(
    serving: LteCellConfig,
    neighbors: Sequence[LteCellConfig],
    mitigation: Mitigation,
    layout: DssLayout = DssLayout(),
) -> InterferenceReport:
    """Classify the serving cell's per-PRB NR data pool against neighbor CRS.

    A pool cell is dirty if any neighbor's CRS occupies it. Mitigations
    trade dirty cells against sacrificed pool cells; clean + sacrificed +
    dirty always equals the original pool size.
    """
    dmrs = set(default_dmrs_symbols(serving.crs_ports, layout.control_end, layout.dmrs_count))
    serving_crs = crs_positions_per_prb(serving)
    pool = {
        (sym, sc)
        for sym in range(layout.control_end, SYMBOLS_PER_SLOT)
        if sym not in dmrs
        for sc in range(SC_PER_PRB)
    } - serving_crs
    neighbor_crs: Set[Tuple[int, int]] = set()
    for n in neighbors:
        neighbor_crs |= crs_positions_per_prb(n)
    dirty_cells = pool & neighbor_crs

    pool_n = len(pool)
    if mitigation.kind == "ServingOnlyRateMatch":
        dirty = len(dirty_cells)
        return InterferenceReport(pool_n, pool_n - dirty, 0, dirty)
    if mitigation.kind == "NeighborAwareRateMatch":
        sacrificed = len(dirty_cells)
        return InterferenceReport(pool_n, pool_n - sacrificed, sacrificed, 0)
    if mitigation.kind == "SymbolLevelMute":
        # Broad avoidance: any symbol carrying any neighbor CRS is muted,
        # whether or not its cells collide with the serving pattern.
        mute_symbols = {sym for (sym, _sc) in neighbor_crs}
        sacrificed = sum(1 for (sym, _sc) in pool if sym in mute_symbols)
        return InterferenceReport(pool_n, pool_n - sacrificed, sacrificed, 0)
    # ReceiverCancellation: a deterministic count-level fraction of dirty
    # cells becomes clean (floor), nothing is sacrificed.
    dirty = len(dirty_cells)
    reclaimed = int(mitigation.effectiveness * dirty)
    return InterferenceReport(pool_n, pool_n - dirty + reclaimed, 0, dirty - reclaimed)
