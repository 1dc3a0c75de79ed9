"""5G NR (and numerology-aligned 6G) signal footprints.

Covers the periodic broadcast/control/reference footprints of an NR carrier
(SSB, CORESET0/SIB1, regular CORESET, CSI-RS, TRS) and the per-slot DSS
layout where NR rate-matches around an incumbent LTE cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, PlacementError
from .grid import (
    SC_PER_PRB,
    SYMBOLS_PER_SLOT,
    CarrierConfig,
    ReLabel,
    ResourceGrid,
)
from .lte import LteCellConfig, crs_symbols

SIGNAL_SSB = "SSB"
SIGNAL_CORESET0 = "CORESET 0"
SIGNAL_SIB1 = "SIB1"
SIGNAL_CORESET1 = "CORESET 1"
SIGNAL_CSI_RS = "CSI-RS"
SIGNAL_TRS = "TRS"

SIGNAL_ORDER = (
    SIGNAL_SSB,
    SIGNAL_CORESET0,
    SIGNAL_SIB1,
    SIGNAL_CORESET1,
    SIGNAL_CSI_RS,
    SIGNAL_TRS,
)


@dataclass(frozen=True)
class BeamSignal:
    """A beam-repeated block footprint (SSB, CORESET0, SIB1)."""

    beams: int
    prbs: int
    symbols: int

    def __post_init__(self):
        if min(self.beams, self.prbs, self.symbols) < 0:
            raise ConfigError("beam signal counts must be >= 0")

    @property
    def re_count(self) -> int:
        return self.beams * self.prbs * SC_PER_PRB * self.symbols


@dataclass(frozen=True)
class Coreset1Spec:
    """Regular PDCCH region; slots=None monitors every DL-bearing slot."""

    prbs: int
    symbols: int
    slots: Optional[int] = None

    def __post_init__(self):
        if min(self.prbs, self.symbols) < 0:
            raise ConfigError("coreset1 counts must be >= 0")
        if self.slots is not None and self.slots < 0:
            raise ConfigError("coreset1 slots must be >= 0")

    def monitored_count(self, carrier: CarrierConfig) -> int:
        return len(carrier.dl_bearing_slots()) if self.slots is None else self.slots

    def re_count(self, carrier: CarrierConfig) -> int:
        return self.prbs * SC_PER_PRB * self.symbols * self.monitored_count(carrier)


@dataclass(frozen=True)
class CsiRsSpec:
    ports: int
    density_re_per_port_per_prb: int
    prbs: int
    occasions_per_period: int

    def __post_init__(self):
        if min(self.ports, self.density_re_per_port_per_prb, self.prbs, self.occasions_per_period) < 0:
            raise ConfigError("csi_rs counts must be >= 0")

    @property
    def re_per_prb(self) -> int:
        return self.ports * self.density_re_per_port_per_prb

    @property
    def re_count(self) -> int:
        return self.re_per_prb * self.prbs * self.occasions_per_period


@dataclass(frozen=True)
class TrsSpec:
    prbs: int
    slots_per_occasion: int
    re_per_prb_per_slot: int
    beams: int
    occasions_per_period: int

    def __post_init__(self):
        if min(self.prbs, self.slots_per_occasion, self.re_per_prb_per_slot, self.beams, self.occasions_per_period) < 0:
            raise ConfigError("trs counts must be >= 0")

    @property
    def re_count(self) -> int:
        return (
            self.prbs
            * self.re_per_prb_per_slot
            * self.slots_per_occasion
            * self.beams
            * self.occasions_per_period
        )


@dataclass(frozen=True)
class NrOverlaySet:
    """Declarative description of the periodic NR footprints in one period."""

    period_ms: int
    ssb: Optional[BeamSignal] = None
    coreset0: Optional[BeamSignal] = None
    sib1: Optional[BeamSignal] = None
    coreset1: Optional[Coreset1Spec] = None
    csi_rs: Optional[CsiRsSpec] = None
    trs: Optional[TrsSpec] = None
    dmrs_symbols: FrozenSet[int] = frozenset({3, 12})

    def __post_init__(self):
        object.__setattr__(self, "dmrs_symbols", frozenset(self.dmrs_symbols))
        if self.period_ms < 1:
            raise ConfigError("period_ms must be >= 1")
        if any(s < 0 or s >= SYMBOLS_PER_SLOT for s in self.dmrs_symbols):
            raise ConfigError("dmrs_symbols must lie in 0..13")

    def check_fits(self, carrier: CarrierConfig) -> None:
        for name, prbs in (
            (SIGNAL_SSB, self.ssb.prbs if self.ssb else 0),
            (SIGNAL_CORESET0, self.coreset0.prbs if self.coreset0 else 0),
            (SIGNAL_SIB1, self.sib1.prbs if self.sib1 else 0),
            (SIGNAL_CORESET1, self.coreset1.prbs if self.coreset1 else 0),
            (SIGNAL_CSI_RS, self.csi_rs.prbs if self.csi_rs else 0),
            (SIGNAL_TRS, self.trs.prbs if self.trs else 0),
        ):
            if prbs > carrier.n_prb:
                raise ConfigError(f"{name} spans {prbs} PRBs > carrier {carrier.n_prb}")

    def signal_counts(self, carrier: CarrierConfig) -> Dict[str, int]:
        """Closed-form RE count per signal over one period."""
        self.check_fits(carrier)
        return {
            SIGNAL_SSB: self.ssb.re_count if self.ssb else 0,
            SIGNAL_CORESET0: self.coreset0.re_count if self.coreset0 else 0,
            SIGNAL_SIB1: self.sib1.re_count if self.sib1 else 0,
            SIGNAL_CORESET1: self.coreset1.re_count(carrier) if self.coreset1 else 0,
            SIGNAL_CSI_RS: self.csi_rs.re_count if self.csi_rs else 0,
            SIGNAL_TRS: self.trs.re_count if self.trs else 0,
        }


_NR_LABELS = {
    SIGNAL_SSB: ReLabel.NR_SSB,
    SIGNAL_CORESET0: ReLabel.NR_PDCCH_CORESET0,
    SIGNAL_SIB1: ReLabel.NR_SIB1,
    SIGNAL_CORESET1: ReLabel.NR_PDCCH_CORESET1,
    SIGNAL_CSI_RS: ReLabel.NR_CSI_RS,
    SIGNAL_TRS: ReLabel.NR_TRS,
}

_SIXG_LABELS = {
    SIGNAL_SSB: ReLabel.SIXG_SSB,
    SIGNAL_CORESET0: ReLabel.SIXG_CONTROL,
    SIGNAL_SIB1: ReLabel.SIXG_CONTROL,
    SIGNAL_CORESET1: ReLabel.SIXG_CONTROL,
    SIGNAL_CSI_RS: ReLabel.SIXG_CONTROL,
    SIGNAL_TRS: ReLabel.SIXG_CONTROL,
}


def apply_nr(grid: ResourceGrid, overlay: NrOverlaySet, rat: str = "5g") -> ResourceGrid:
    """Place the overlay's footprints into disjoint downlink cells.

    Placement spreads beam/occasion units across distinct downlink slots:
    CORESET1 takes the first symbols of every monitored slot, and each other
    unit (one SSB/CORESET0/SIB1 beam, one TRS slot-visit, one CSI-RS
    occasion) gets its own downlink slot starting at the lowest PRBs just
    after the CORESET1 symbols. The accounting (signal_counts) is
    placement-invariant; only disjointness depends on this scheme.
    """
    carrier = grid.config
    if overlay.period_ms != carrier.span_ms:
        raise ConfigError(
            f"overlay period {overlay.period_ms} ms != carrier span {carrier.span_ms} ms"
        )
    overlay.check_fits(carrier)
    if rat not in ("5g", "6g"):
        raise ConfigError(f"rat must be '5g' or '6g', got {rat!r}")
    labels = _NR_LABELS if rat == "5g" else _SIXG_LABELS

    arr = grid.writable_labels()
    dl_slots = list(carrier.dl_bearing_slots())

    monitored: List[int] = []
    if overlay.coreset1 and overlay.coreset1.re_count(carrier) > 0:
        n_mon = overlay.coreset1.monitored_count(carrier)
        if n_mon > len(dl_slots):
            raise PlacementError(
                f"{SIGNAL_CORESET1}: {n_mon} monitored slots > {len(dl_slots)} DL-bearing slots"
            )
        monitored = dl_slots[:n_mon]
        for slot in monitored:
            if overlay.coreset1.symbols > carrier.dl_symbols_in_slot(slot):
                raise PlacementError(
                    f"{SIGNAL_CORESET1}: {overlay.coreset1.symbols} symbols do not fit slot {slot}"
                )
            block = arr[slot, : overlay.coreset1.symbols, : overlay.coreset1.prbs * SC_PER_PRB]
            if np.any(block != ReLabel.UNLABELED):
                raise PlacementError(f"{SIGNAL_CORESET1}: collision in slot {slot}")
            block[:] = labels[SIGNAL_CORESET1]
    monitored_set = set(monitored)
    ctrl_symbols = overlay.coreset1.symbols if overlay.coreset1 else 0

    # One (name, block geometry or per-PRB RE need) unit per DL slot.
    units: List[Tuple[str, str, int, int]] = []
    for name, sig in ((SIGNAL_SSB, overlay.ssb), (SIGNAL_CORESET0, overlay.coreset0), (SIGNAL_SIB1, overlay.sib1)):
        if sig and sig.re_count > 0:
            units.extend((name, "block", sig.prbs, sig.symbols) for _ in range(sig.beams))
    if overlay.trs and overlay.trs.re_count > 0:
        visits = overlay.trs.beams * overlay.trs.occasions_per_period * overlay.trs.slots_per_occasion
        units.extend(
            (SIGNAL_TRS, "re", overlay.trs.prbs, overlay.trs.re_per_prb_per_slot)
            for _ in range(visits)
        )
    if overlay.csi_rs and overlay.csi_rs.re_count > 0:
        units.extend(
            (SIGNAL_CSI_RS, "re", overlay.csi_rs.prbs, overlay.csi_rs.re_per_prb)
            for _ in range(overlay.csi_rs.occasions_per_period)
        )

    if len(units) > len(dl_slots):
        raise PlacementError(
            f"{len(units)} occasion units need distinct DL slots but only "
            f"{len(dl_slots)} are available"
        )

    for (name, kind, prbs, amount), slot in zip(units, dl_slots):
        base = ctrl_symbols if slot in monitored_set else 0
        dl_syms = carrier.dl_symbols_in_slot(slot)
        if kind == "block":
            if base + amount > dl_syms:
                raise PlacementError(f"{name}: {amount} symbols do not fit slot {slot}")
            block = arr[slot, base : base + amount, : prbs * SC_PER_PRB]
            if np.any(block != ReLabel.UNLABELED):
                raise PlacementError(f"{name}: collision in slot {slot}")
            block[:] = labels[name]
        else:
            if amount > (dl_syms - base) * SC_PER_PRB:
                raise PlacementError(f"{name}: needs {amount} RE/PRB in slot {slot}")
            for prb in range(prbs):
                lo = prb * SC_PER_PRB
                sub = arr[slot, base:dl_syms, lo : lo + SC_PER_PRB]
                free = np.flatnonzero(sub == ReLabel.UNLABELED)
                if free.size < amount:
                    raise PlacementError(f"{name}: collision in slot {slot}, PRB {prb}")
                rows, cols = np.unravel_index(free[:amount], sub.shape)
                sub[rows, cols] = labels[name]
    return ResourceGrid(carrier, arr)


def nr_dss_slot(
    grid: ResourceGrid,
    lte_cfg: LteCellConfig,
    dmrs_symbols: Iterable[int],
    nr_pdcch_symbol: int,
    slots: Optional[Sequence[int]] = None,
) -> ResourceGrid:
    """NR control + DMRS layout in slots already carrying the LTE overlay.

    The remaining Unlabeled cells form the schedulable NR data pool,
    rate-matched around CRS by construction. DMRS must avoid CRS-bearing
    and control symbols (no puncturing machinery is modeled).
    """
    carrier = grid.config
    if carrier.numerology.scs_khz != 15:
        raise ConfigError("DSS layout requires a 15 kHz grid")
    dmrs = sorted(set(dmrs_symbols))
    if nr_pdcch_symbol < lte_cfg.pdcch_symbols:
        raise ConfigError(
            f"NR PDCCH symbol {nr_pdcch_symbol} lies inside the {lte_cfg.pdcch_symbols}-symbol LTE control region"
        )
    if nr_pdcch_symbol >= SYMBOLS_PER_SLOT:
        raise ConfigError(f"NR PDCCH symbol {nr_pdcch_symbol} out of range")
    blocked = crs_symbols(lte_cfg)
    for s in dmrs:
        if not 0 <= s < SYMBOLS_PER_SLOT:
            raise ConfigError(f"DMRS symbol {s} out of range")
        if s in blocked:
            raise ConfigError(f"DMRS symbol {s} collides with a CRS-bearing symbol")
        if s <= nr_pdcch_symbol:
            raise ConfigError(f"DMRS symbol {s} collides with the control region")

    if slots is None:
        slots = range(carrier.n_slots)
    arr = grid.writable_labels()
    for slot in slots:
        row = arr[slot, nr_pdcch_symbol, :]
        row[row == ReLabel.UNLABELED] = ReLabel.NR_PDCCH_CORESET1
        for s in dmrs:
            row = arr[slot, s, :]
            row[row == ReLabel.UNLABELED] = ReLabel.NR_DMRS
    return ResourceGrid(carrier, arr)
