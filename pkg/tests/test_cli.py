import json

import numpy as np
import pytest

from kgnf.cli import main
from kgnf.config import config_dict, config_hash, parse_config


class TestConfigParsing:
    def test_minimal_file_fills_defaults(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("model = g11u\nn = 256\n")
        cfg = parse_config(str(path))
        assert cfg.model == "g11u" and cfg.n == 256
        echo = config_dict(cfg)
        for key in ("dt", "T", "eps", "seed", "profile", "theta"):
            assert key in echo

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("eps = 0.1, 0.05\n")
        cfg = parse_config(str(path), {"eps": "0.01"})
        assert cfg.eps == (0.01,)

    def test_power_of_two_rule_named(self):
        with pytest.raises(ValueError, match="'n'.*power of two"):
            parse_config(None, {"n": "100"})

    def test_unknown_key_named(self):
        with pytest.raises(ValueError, match="unknown config key 'frobnicate'"):
            parse_config(None, {"frobnicate": "1"})

    def test_type_mismatch_named(self):
        with pytest.raises(ValueError, match="'dt'"):
            parse_config(None, {"dt": "fast"})

    def test_pi_literals(self):
        cfg = parse_config(None, {"L": "64pi"})
        assert abs(cfg.L - 64 * np.pi) < 1e-12

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# run\n\nmodel = fu2  # quadratic source\n")
        assert parse_config(str(path)).model == "fu2"

    def test_hash_stable_under_key_order(self, tmp_path):
        a = tmp_path / "a.cfg"
        b = tmp_path / "b.cfg"
        a.write_text("n = 64\nmodel = g11u\n")
        b.write_text("model = g11u\nn = 64\n")
        assert config_hash(parse_config(str(a))) == config_hash(parse_config(str(b)))


class TestCliDispatch:
    def test_nf_check_passes_on_flat(self, tmp_path, capsys):
        out = tmp_path / "rep"
        code = main(["nf-check", "--model", "flat", "--samples", "200",
                     "--out", str(out)])
        assert code == 0
        payload = json.loads((tmp_path / "rep.json").read_text())
        assert payload["passed"] is True

    def test_nf_check_fault_injection_fails(self, tmp_path, capsys):
        out = tmp_path / "rep"
        code = main(["nf-check", "--model", "g11u", "--samples", "200",
                     "--fault", "a0_scale", "--out", str(out)])
        assert code == 1

    def test_drift_sweep_requires_three_points(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = main(["drift-sweep", "--n", "64", "--dt", "2e-3", "--T", "0.1",
                     "--eps", "0.02,0.01", "--models", "g11u", "--s", "2",
                     "--out", str(out)])
        assert code != 0

    def test_bad_config_returns_usage_error(self, capsys):
        assert main(["evolve", "--n", "100"]) == 2

    def test_evolve_writes_versioned_csv(self, tmp_path):
        out = tmp_path / "traj"
        code = main(["evolve", "--model", "g11u", "--eps", "0.01", "--n", "64",
                     "--T", "0.1", "--dt", "2e-3", "--s", "2", "--k2", "2",
                     "--out", str(out)])
        assert code == 0
        lines = (tmp_path / "traj.csv").read_text().splitlines()
        assert lines[0].startswith("# kgnf-csv v1 schema=trajectory config=")
        assert lines[1].split(",")[:4] == ["t", "E1", "E1para", "Es"]
        summary = json.loads((tmp_path / "traj.json").read_text())
        assert summary["blew_up"] is False
        assert summary["config"]["n"] == 64

    def test_determinism_byte_identical(self, tmp_path):
        args = ["evolve", "--model", "generic", "--eps", "0.01", "--n", "64",
                "--T", "0.1", "--dt", "2e-3", "--s", "2", "--seed", "7",
                "--profile", "random"]
        outs = []
        for tag in ("one", "two"):
            out = tmp_path / tag
            assert main(args + ["--out", str(out)]) == 0
            outs.append((tmp_path / f"{tag}.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_custom_model_channels(self, tmp_path):
        out = tmp_path / "rep"
        code = main(["nf-check", "--model", "custom", "--custom", "g11.u=0.5",
                     "--samples", "200", "--out", str(out)])
        assert code == 0
        payload = json.loads((tmp_path / "rep.json").read_text())
        assert payload["config"]["custom"] == {"g11.u": 0.5}
