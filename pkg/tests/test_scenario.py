import json

import pytest

from gridshare import ScenarioError, emit_scenario, parse_scenario


MINIMAL = {"carrier": {"scs_khz": 15, "n_prb": 1, "duplex": "FDD", "span_ms": 1}}


def full_doc():
    return {
        "carrier": {
            "scs_khz": 30, "n_prb": 273, "duplex": "TDD", "span_ms": 20,
            "tdd_pattern": {"cycle": "DDDSU", "special_split": [6, 4, 4]},
        },
        "nr": {
            "period_ms": 20,
            "ssb": {"beams": 4, "prbs": 20, "symbols": 4},
            "coreset0": {"beams": 4, "prbs": 48, "symbols": 2},
            "sib1": {"beams": 4, "prbs": 24, "symbols": 4},
            "coreset1": {"prbs": 270, "symbols": 2, "slots": None},
            "csi_rs": {"ports": 32, "density_re_per_port_per_prb": 1,
                       "prbs": 272, "occasions_per_period": 1},
            "trs": {"prbs": 52, "slots_per_occasion": 2, "re_per_prb_per_slot": 6,
                    "beams": 4, "occasions_per_period": 2},
        },
        "mrss": {
            "control_mode": "PartiallyOverlapping",
            "shared_fraction": 0.5,
            "iot_reservations": [{"prb_start": 0, "prb_stop": 2, "slots": [0, 1]}],
            "sixg_ssb": {"occasions": [[10, 2, 100]], "prbs": 20, "symbols": 4},
        },
        "traffic": {"demand_5g": [0, 1000], "demand_6g": 500, "seed": 3},
        "policy": "Priority6G",
        "seed": 9,
        "sweep": {
            "command": "simulate",
            "parameters": [{"path": "policy", "values": ["Priority5G", "Priority6G"]}],
        },
    }


class TestParse:
    def test_minimal_defaults(self):
        s = parse_scenario(MINIMAL)
        assert s.carrier.n_prb == 1
        assert s.lte is None and s.nr is None and s.mrss is None
        assert s.budget.ports == (1, 2, 4)
        assert s.budget.layout.control_end == 3
        assert s.seed == 0

    def test_accepts_json_text(self):
        s = parse_scenario(json.dumps(MINIMAL))
        assert s.carrier.duplex == "FDD"

    def test_invalid_json_reports_position(self):
        with pytest.raises(ScenarioError, match="line 1"):
            parse_scenario("{bad json}")

    def test_missing_carrier(self):
        with pytest.raises(ScenarioError, match="carrier"):
            parse_scenario({})

    def test_unknown_top_level_key(self):
        doc = dict(MINIMAL, extra=1)
        with pytest.raises(ScenarioError, match="unknown key 'extra'"):
            parse_scenario(doc)

    def test_invalid_crs_ports_reports_path(self):
        doc = dict(MINIMAL, lte={"crs_ports": 3})
        with pytest.raises(ScenarioError) as err:
            parse_scenario(doc)
        assert err.value.path == "lte.crs_ports"

    def test_nested_unknown_key_path(self):
        doc = dict(MINIMAL)
        doc["carrier"] = dict(MINIMAL["carrier"], bandwidth=20)
        with pytest.raises(ScenarioError) as err:
            parse_scenario(doc)
        assert err.value.path == "carrier.bandwidth"

    def test_config_error_rewrapped_with_path(self):
        doc = {"carrier": {"scs_khz": 30, "n_prb": 1, "duplex": "TDD",
                           "span_ms": 20,
                           "tdd_pattern": {"cycle": "DDDSU", "special_split": [6, 4, 3]}}}
        with pytest.raises(ScenarioError) as err:
            parse_scenario(doc)
        assert err.value.path == "carrier.tdd_pattern"

    def test_neighbors_only_under_top_level_lte(self):
        doc = dict(MINIMAL, lte={"neighbors": [{"cell_id": 3, "neighbors": []}]})
        with pytest.raises(ScenarioError, match="unknown key 'neighbors'"):
            parse_scenario(doc)

    def test_bad_policy(self):
        doc = dict(MINIMAL, policy="RoundRobin")
        with pytest.raises(ScenarioError) as err:
            parse_scenario(doc)
        assert err.value.path == "policy"

    def test_bad_sweep_command(self):
        doc = dict(MINIMAL, sweep={"command": "fly", "parameters": [
            {"path": "seed", "values": [1]}]})
        with pytest.raises(ScenarioError) as err:
            parse_scenario(doc)
        assert err.value.path == "sweep.command"

    def test_traffic_range_demand(self):
        doc = dict(MINIMAL, traffic={"demand_5g": [10, 20], "demand_6g": 0})
        s = parse_scenario(doc)
        assert s.traffic.demand_5g == (10, 20)
        assert s.traffic.demand_6g == 0


class TestRoundTrip:
    def test_minimal(self):
        s = parse_scenario(MINIMAL)
        assert parse_scenario(emit_scenario(s)) == s

    def test_full_document(self):
        s = parse_scenario(full_doc())
        assert parse_scenario(emit_scenario(s)) == s

    def test_emitted_document_is_json_serializable(self):
        s = parse_scenario(full_doc())
        text = json.dumps(emit_scenario(s))
        assert parse_scenario(text) == s

    def test_shipped_scenarios_round_trip(self):
        import pathlib

        scenarios = pathlib.Path(__file__).parent.parent / "scenarios"
        for path in sorted(scenarios.glob("*.json")):
            s = parse_scenario(path.read_text())
            assert parse_scenario(emit_scenario(s)) == s, path.name
