"""gridshare: RE-accurate LTE/5G/6G spectrum-sharing coexistence modeling."""

from .budget import (
    BudgetRow,
    DssLayout,
    OverheadReport,
    OverheadRow,
    default_dmrs_symbols,
    dominance_share,
    downlink_re,
    dss_pool_by_grid,
    dss_pool_per_prb,
    dss_table,
    lte_pool_per_prb,
    nr_overhead,
    nr_pool_per_prb,
    verify_overhead_by_grid,
)
from .errors import (
    ConfigError,
    ConflictError,
    GridShareError,
    PlacementError,
    ScenarioError,
)
from .grid import (
    CarrierConfig,
    Numerology,
    OverridePolicy,
    ReLabel,
    ResourceGrid,
    SlotKind,
    TddPattern,
    apply_overlay,
    count_labels,
    make_grid,
)
from .lte import LteCellConfig, apply_lte, crs_cells
from .mrss import (
    ControlMode,
    ControlModeKind,
    DssMechanism,
    Mitigation,
    MrssCategoryMap,
    SchedPolicy,
    SimResult,
    TrafficModel,
    alignment_check,
    classify_mrss,
    dss_mechanism_budget,
    neighbor_interference,
    place_6g_ssb,
    reserve_iot,
    simulate,
)
from .nr import (
    BeamSignal,
    Coreset1Spec,
    CsiRsSpec,
    NrOverlaySet,
    TrsSpec,
    apply_nr,
    nr_dss_slot,
)
from .scenario import Scenario, emit_scenario, parse_scenario

__version__ = "0.1.0"
