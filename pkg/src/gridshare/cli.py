"""Scenario-driven command line front end.

    gridshare <command> -s <scenario.json> [-f md|csv|json] [-o <path>] [--seed N]

Commands: budget, overhead, classify, simulate, interference, sweep.
Exit codes: 0 success, 1 scenario/validation error, 2 computation error.
Set GRIDSHARE_NO_COLOR to disable ANSI styling on terminals.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from .budget import dss_table, nr_overhead
from .errors import GridShareError, ScenarioError
from .grid import ResourceGrid, make_grid
from .lte import apply_lte
from .mrss import (
    MrssCategoryMap,
    classify_mrss,
    neighbor_interference,
    place_6g_ssb,
    reserve_iot,
    simulate,
)
from .nr import apply_nr
from .scenario import Scenario, emit_scenario, parse_scenario

COMMANDS = ("budget", "overhead", "classify", "simulate", "interference", "sweep")
FORMATS = ("md", "csv", "json")

BUDGET_MD_HEADERS = (
    "No. of LTE CRS ports",
    "No. of NR PDSCH REs on DSS carrier",
    "No. of NR PDSCH REs on NR carrier",
    "No. of NR PDSCH REs on LTE carrier",
    "NR DSS loss vs. NR carrier",
    "NR DSS loss vs. LTE carrier",
)
BUDGET_CSV_HEADERS = ("crs_ports", "dss_re", "nr_re", "lte_re", "loss_vs_nr_pct", "loss_vs_lte_pct")

OVERHEAD_CSV_HEADERS = ("signal", "configuration", "re_count", "pct_of_total", "pct_of_downlink")


def _md_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(headers) + " |",
             "| " + " | ".join("---" for _ in headers) + " |"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _csv_text(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def build_grid(scenario: Scenario) -> ResourceGrid:
    grid = make_grid(scenario.carrier)
    if scenario.lte is not None and scenario.carrier.numerology.scs_khz == 15:
        grid = apply_lte(grid, scenario.lte)
    if scenario.nr is not None:
        grid = apply_nr(grid, scenario.nr)
    return grid


def build_map(scenario: Scenario) -> MrssCategoryMap:
    grid = build_grid(scenario)
    mode = scenario.mrss.control_mode if scenario.mrss else None
    cmap = classify_mrss(grid, control_mode=mode) if mode else classify_mrss(grid)
    if scenario.mrss is not None:
        for r in scenario.mrss.iot_reservations:
            cmap = reserve_iot(cmap, (r.prb_start, r.prb_stop), r.slots)
        if scenario.mrss.sixg_ssb is not None:
            s = scenario.mrss.sixg_ssb
            cmap = place_6g_ssb(cmap, s.occasions, prbs=s.prbs, symbols=s.symbols)
    return cmap


def run_budget(scenario: Scenario, fmt: str) -> str:
    rows = dss_table(
        dmrs_count=scenario.budget.layout.dmrs_count,
        lte_pdcch=scenario.budget.layout.lte_pdcch,
        nr_pdcch=scenario.budget.layout.nr_pdcch,
        ports=scenario.budget.ports,
    )
    if fmt == "json":
        return _json_text([r.__dict__ for r in rows])
    if fmt == "csv":
        return _csv_text(
            BUDGET_CSV_HEADERS,
            [(r.crs_ports, r.dss_re, r.nr_re, r.lte_re,
              f"{r.loss_vs_nr_pct:.2f}", f"{r.loss_vs_lte_pct:.2f}") for r in rows],
        )
    return _md_table(
        BUDGET_MD_HEADERS,
        [
            (str(r.crs_ports), str(r.dss_re), str(r.nr_re), str(r.lte_re),
             f"{r.loss_vs_nr_pct:.2f}%", f"{r.loss_vs_lte_pct:.2f}%")
            for r in rows
        ],
    )


def run_overhead(scenario: Scenario, fmt: str) -> str:
    if scenario.nr is None:
        raise ScenarioError("overhead command requires an 'nr' section", "nr")
    report = nr_overhead(scenario.carrier, scenario.nr)
    all_rows = list(report.rows) + [report.total_row]
    if fmt == "json":
        return _json_text(
            {
                "rows": [r.__dict__ for r in report.rows],
                "total": report.total_row.__dict__,
                "total_re": report.total_re,
                "downlink_re": report.downlink_re,
            }
        )
    if fmt == "csv":
        return _csv_text(
            OVERHEAD_CSV_HEADERS,
            [
                (r.signal_name, r.config_summary, r.re_count,
                 f"{r.pct_of_total:.2f}", f"{r.pct_of_downlink:.2f}")
                for r in all_rows
            ],
        )
    headers = (
        "Signal / channel",
        "Configuration",
        f"Total RE in {scenario.nr.period_ms} ms",
        "Overhead vs. total RE (%)",
        "Overhead vs. total downlink RE (%)",
    )
    return _md_table(
        headers,
        [
            (r.signal_name, r.config_summary, f"{r.re_count:,}",
             f"{r.pct_of_total:.2f}%", f"{r.pct_of_downlink:.2f}%")
            for r in all_rows
        ],
    )


def run_classify(scenario: Scenario, fmt: str) -> str:
    cmap = build_map(scenario)
    data = {
        "shared_pool": cmap.shared_pool_size,
        "reserved": cmap.reserved_size,
        "control_region": cmap.control_region_size,
        "downlink_cells": cmap.downlink_size,
        "total_cells": cmap.grid.n_cells,
    }
    if fmt == "json":
        return _json_text(data)
    if fmt == "csv":
        return _csv_text(("category", "cells"), list(data.items()))
    return _md_table(("Category", "Cells"), [(k, f"{v:,}") for k, v in data.items()])


def run_simulate(scenario: Scenario, fmt: str, seed_override: Optional[int] = None) -> str:
    if scenario.traffic is None or scenario.policy is None:
        raise ScenarioError("simulate command requires 'traffic' and 'policy' sections")
    traffic = scenario.traffic
    if seed_override is not None:
        from .mrss import TrafficModel

        traffic = TrafficModel(traffic.demand_5g, traffic.demand_6g, seed_override)
    cmap = build_map(scenario)
    result = simulate(cmap, traffic, scenario.policy)
    summary = {
        "policy": scenario.policy.value,
        "seed": traffic.seed,
        "n_slots": len(result.grants_5g),
        "shared_pool_size": result.shared_pool_size,
        "total_5g": result.total_5g,
        "total_6g": result.total_6g,
        "unused_shared": result.unused_shared,
        "dropped_5g": sum(result.dropped_5g),
        "dropped_6g": sum(result.dropped_6g),
        "efficiency_vs_pure_5g": round(result.efficiency_vs_pure_5g, 4),
        "efficiency_vs_pure_6g": round(result.efficiency_vs_pure_6g, 4),
    }
    if fmt == "json":
        return _json_text({"summary": summary, "per_slot": {
            "grants_5g": list(result.grants_5g),
            "grants_6g": list(result.grants_6g),
            "unused": list(result.unused),
        }})
    if fmt == "csv":
        d5, d6 = traffic.demands(len(result.grants_5g))
        rows = [
            (slot, int(result.grants_5g[slot] + result.grants_6g[slot] + result.unused[slot]),
             int(d5[slot]), int(d6[slot]),
             result.grants_5g[slot], result.grants_6g[slot], result.unused[slot])
            for slot in range(len(result.grants_5g))
        ]
        return _csv_text(
            ("slot", "pool", "demand_5g", "demand_6g", "grant_5g", "grant_6g", "unused"), rows
        )
    return _md_table(("Metric", "Value"), [(k, str(v)) for k, v in summary.items()])


def run_interference(scenario: Scenario, fmt: str) -> str:
    if scenario.lte is None or scenario.mitigation is None:
        raise ScenarioError("interference command requires 'lte' and 'mitigation' sections")
    report = neighbor_interference(
        scenario.lte, scenario.lte_neighbors, scenario.mitigation, scenario.budget.layout
    )
    data = {
        "mitigation": scenario.mitigation.kind,
        "pool_re_per_prb": report.pool_re,
        "clean_re_per_prb": report.clean_re,
        "sacrificed_re_per_prb": report.sacrificed_re,
        "dirty_re_per_prb": report.dirty_re,
    }
    if fmt == "json":
        return _json_text(data)
    if fmt == "csv":
        return _csv_text(("metric", "value"), list(data.items()))
    return _md_table(("Metric", "Value"), [(k, str(v)) for k, v in data.items()])


def _set_path(doc: dict, path: str, value: object) -> None:
    parts = path.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ScenarioError(f"sweep path traverses a non-object at {part!r}", path)
    node[parts[-1]] = value


def _flatten(obj: object, prefix: str, out: Dict[str, object]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(v, f"{prefix}.{k}" if prefix else str(k), out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}[{i}]", out)
    else:
        out[prefix] = obj


def run_sweep(scenario: Scenario, fmt: str, seed_override: Optional[int]) -> str:
    if scenario.sweep is None:
        raise ScenarioError("sweep command requires a 'sweep' section", "sweep")
    base = emit_scenario(scenario)
    base.pop("sweep", None)
    params = scenario.sweep.parameters
    runner = {
        "budget": run_budget,
        "overhead": run_overhead,
        "classify": run_classify,
        "interference": run_interference,
    }
    records: List[Dict[str, object]] = []
    for index, combo in enumerate(itertools.product(*(p.values for p in params))):
        doc = json.loads(json.dumps(base))
        for p, v in zip(params, combo):
            _set_path(doc, p.path, v)
        point = parse_scenario(doc)
        if scenario.sweep.command == "simulate":
            text = run_simulate(point, "json", seed_override)
        else:
            text = runner[scenario.sweep.command](point, "json")
        flat: Dict[str, object] = {}
        _flatten(json.loads(text), "", flat)
        record: Dict[str, object] = {"point": index}
        record.update({p.path: v for p, v in zip(params, combo)})
        record.update(flat)
        records.append(record)

    columns: List[str] = []
    for record in records:
        for key in record:
            if key not in columns:
                columns.append(key)
    if fmt == "json":
        return _json_text(records)
    rows = [[record.get(c, "") for c in columns] for record in records]
    if fmt == "csv":
        return _csv_text(columns, rows)
    return _md_table(columns, [[str(v) for v in row] for row in rows])


def _style(text: str, out_path: Optional[str]) -> str:
    if out_path is not None or os.environ.get("GRIDSHARE_NO_COLOR"):
        return text
    if not sys.stdout.isatty():
        return text
    first, _, rest = text.partition("\n")
    return f"\033[1m{first}\033[0m\n{rest}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridshare",
        description="Resource-element-accurate LTE/5G/6G spectrum-sharing coexistence reports",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("-s", "--scenario", required=True, help="path to a scenario JSON file")
    parser.add_argument("-f", "--format", choices=FORMATS, default="md")
    parser.add_argument("-o", "--output", default=None, help="write the report to a file")
    parser.add_argument("--seed", type=int, default=None, help="override the traffic seed")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            scenario = parse_scenario(fh.read())
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 1
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "budget":
            text = run_budget(scenario, args.format)
        elif args.command == "overhead":
            text = run_overhead(scenario, args.format)
        elif args.command == "classify":
            text = run_classify(scenario, args.format)
        elif args.command == "simulate":
            text = run_simulate(scenario, args.format, args.seed)
        elif args.command == "interference":
            text = run_interference(scenario, args.format)
        else:
            text = run_sweep(scenario, args.format, args.seed)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GridShareError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(_style(text, args.output))
    return 0


if __name__ == "__main__":
    sys.exit(main())
