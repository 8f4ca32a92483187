"""Unit tests for scenario parsing, validation, and derived helpers."""

import json
import math

import numpy as np
import pytest

from nrlinksim.scenario import (DEFAULT_SINR_CAP_DB, NoiseModel, Scenario,
                                ScenarioError, parse_scenario,
                                scenario_from_dict)

from conftest import SCENARIO_DIR, scenario_path

H_2X4_REF = [[1.0, 0.5, 0.25, 0.125], [0.125, 0.25, 0.5, 1.0]]


def _fixed_cfg(**extra):
    cfg = {"channel": {"type": "fixed", "matrix": H_2X4_REF}}
    cfg.update(extra)
    return cfg


class TestDefaults:
    def test_minimal_rice_shorthand(self):
        sc = scenario_from_dict({"channel": "rice1"})
        assert sc.channel.kind == "rice1"
        assert sc.channel.k_factor == 1.0
        assert sc.channel.coherence_slots == 10
        assert sc.n_prb == 106
        assert sc.scs_khz == 30
        assert sc.n_tx == 4 and sc.n_rx == 2
        assert sc.n_slots == 2000 and sc.n_drops == 20
        assert sc.csi_period == 10
        assert sc.seed == 0
        assert sc.csi.gamma_th == 2.5
        assert sc.max_harq_tx == 4
        assert sc.sinr_cap_db == DEFAULT_SINR_CAP_DB
        assert sc.noise.mode == "noise_free"
        assert sc.dl_duty_factor == 1.0

    def test_bad_shorthand(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rayleigh"})

    def test_fixed_matrix_pins_n_tx(self):
        sc = scenario_from_dict(_fixed_cfg())
        assert sc.n_tx == 4
        sc2 = scenario_from_dict({"channel": {"type": "fixed",
                                              "matrix": [[1, 0.5], [0.5, 1]]}})
        assert sc2.n_tx == 2


class TestValidation:
    def test_n_tx_3_rejected(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rice1", "n_tx": 3})

    def test_unknown_top_level_key(self):
        with pytest.raises(ScenarioError, match="bandwidth"):
            scenario_from_dict({"channel": "rice1", "bandwidth": 100})

    def test_unknown_channel_key(self):
        with pytest.raises(ScenarioError, match="doppler"):
            scenario_from_dict({"channel": {"type": "rice1", "doppler": 5}})

    def test_unknown_noise_key(self):
        with pytest.raises(ScenarioError, match="figure"):
            scenario_from_dict({"channel": "rice1",
                                "noise": {"mode": "noise_free", "figure": 9}})

    def test_unknown_csi_key(self):
        with pytest.raises(ScenarioError, match="subband"):
            scenario_from_dict({"channel": "rice1", "csi": {"subband": True}})

    def test_missing_channel(self):
        with pytest.raises(ScenarioError, match="channel"):
            scenario_from_dict({"n_slots": 10})

    def test_fixed_needs_matrix(self):
        with pytest.raises(ScenarioError, match="matrix"):
            scenario_from_dict({"channel": {"type": "fixed"}})

    def test_rice_params_rejected_on_fixed(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": {"type": "fixed", "matrix": H_2X4_REF,
                                            "k_factor": 2.0}})

    def test_matrix_shape_crosscheck(self):
        with pytest.raises(ScenarioError, match="shape"):
            scenario_from_dict(_fixed_cfg(n_tx=2))

    def test_matrix_cell_validation(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": {"type": "fixed",
                                            "matrix": [[1, "x"], [0, 1]]}})
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": {"type": "fixed",
                                            "matrix": [[1, 2], [3]]}})

    def test_complex_matrix_cells(self):
        sc = scenario_from_dict({"channel": {"type": "fixed",
                                             "matrix": [[[0, 1], 1], [1, [0, -1]]]}})
        assert sc.channel.matrix[0, 0] == 1j
        assert sc.channel.matrix[1, 1] == -1j

    @pytest.mark.parametrize("field,value", [
        ("n_rx", 3), ("n_prb", 0), ("scs_khz", 15), ("n_slots", 0),
        ("n_drops", 0), ("csi_period", 0), ("dl_duty_factor", 0.0),
        ("dl_duty_factor", 1.5), ("seed", -1), ("est_error_var", -0.5),
        ("max_harq_tx", 0),
    ])
    def test_out_of_range_fields(self, field, value):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rice1", field: value})

    def test_non_integer_count_rejected(self):
        with pytest.raises(ScenarioError, match="n_slots"):
            scenario_from_dict({"channel": "rice1", "n_slots": 10.5})

    def test_csi_field_validation(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rice1", "csi": {"force_ri": 3}})
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rice1", "csi": {"gamma_th": 1.0}})

    def test_noise_mode_validation(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rice1", "noise": {"mode": "awgn"}})
        with pytest.raises(ScenarioError, match="snr_db"):
            scenario_from_dict({"channel": "rice1", "noise": {"mode": "snr"}})
        with pytest.raises(ScenarioError, match="snr_db_list"):
            scenario_from_dict({"channel": "rice1", "noise": {"mode": "snr_sweep"}})
        with pytest.raises(ScenarioError, match="variance"):
            scenario_from_dict({"channel": "rice1", "noise": {"mode": "variance"}})


class TestCaps:
    def test_partial_override(self):
        sc = scenario_from_dict({"channel": "rice1", "sinr_cap_db": {"2": 12.5}})
        assert sc.sinr_cap_db == {1: DEFAULT_SINR_CAP_DB[1], 2: 12.5}

    def test_null_disables(self):
        sc = scenario_from_dict({"channel": "rice1",
                                 "sinr_cap_db": {"1": None, "2": None}})
        assert sc.sinr_cap_db == {1: math.inf, 2: math.inf}

    def test_bad_key(self):
        with pytest.raises(ScenarioError, match="sinr_cap_db"):
            scenario_from_dict({"channel": "rice1", "sinr_cap_db": {"3": 10}})

    def test_nonpositive_cap_rejected(self):
        with pytest.raises(ScenarioError):
            scenario_from_dict({"channel": "rice1", "sinr_cap_db": {"1": 0}})


class TestDerivedHelpers:
    def test_grid_for_block_fixed(self):
        sc = scenario_from_dict(_fixed_cfg(n_prb=5))
        grid = sc.grid_for_block(drop_seed=1, block_id=0)
        assert grid.n_sc == 5 and grid.flat
        assert np.array_equal(grid.matrices[0], np.asarray(H_2X4_REF, complex))
        assert sc.coherence_slots is None and not sc.is_fading

    def test_grid_for_block_rice(self):
        sc = scenario_from_dict({"channel": "rice1", "n_prb": 3, "n_tx": 2})
        a = sc.grid_for_block(drop_seed=9, block_id=2)
        b = sc.grid_for_block(drop_seed=9, block_id=2)
        assert np.array_equal(a.matrices, b.matrices)
        assert a.n_tx == 2 and a.n_sc == 3
        assert sc.coherence_slots == 10 and sc.is_fading

    def test_noise_for_modes(self):
        grid = scenario_from_dict(_fixed_cfg()).grid_for_block(0, 0)
        free = scenario_from_dict(_fixed_cfg())
        assert free.noise_for(grid).variance == 0.0
        var = scenario_from_dict(_fixed_cfg(noise={"mode": "variance",
                                                   "variance": 0.25}))
        assert var.noise_for(grid).variance == 0.25
        snr = scenario_from_dict(_fixed_cfg(noise={"mode": "snr", "snr_db": 0}))
        assert snr.noise_for(grid).variance == pytest.approx(0.33203125)

    def test_noise_for_rejects_unexpanded_sweep(self):
        sc = scenario_from_dict(_fixed_cfg(noise={"mode": "snr_sweep",
                                                  "snr_db_list": [0, 10]}))
        with pytest.raises(ScenarioError):
            sc.noise_for(sc.grid_for_block(0, 0))

    def test_at_snr(self):
        sc = scenario_from_dict(_fixed_cfg(noise={"mode": "snr_sweep",
                                                  "snr_db_list": [0, 10]}))
        pinned = sc.at_snr(10.0)
        assert pinned.noise == NoiseModel(mode="snr", snr_db=10.0)
        assert pinned.channel == sc.channel

    def test_with_forced_cqi(self):
        sc = scenario_from_dict(_fixed_cfg())
        forced = sc.with_forced_cqi(7)
        assert forced.csi.force_cqi == 7
        assert sc.csi.force_cqi is None


class TestParseScenario:
    def test_golden_files_parse(self):
        for path in sorted(SCENARIO_DIR.glob("*.json")):
            sc = parse_scenario(path)
            assert isinstance(sc, Scenario), path.name

    def test_golden_reference_matrix(self):
        sc = parse_scenario(scenario_path("cqi_sweep_fixed_2x4.json"))
        assert sc.channel.kind == "fixed"
        assert np.array_equal(sc.channel.matrix, np.asarray(H_2X4_REF, complex))
        assert sc.csi.force_ri == 2
        assert sc.noise.mode == "noise_free"

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(ScenarioError, match="JSON"):
            parse_scenario(p)

    def test_non_object_document(self, tmp_path):
        p = tmp_path / "list.json"
        p.write_text(json.dumps([1, 2, 3]), encoding="utf-8")
        with pytest.raises(ScenarioError):
            parse_scenario(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_scenario(tmp_path / "absent.json")
