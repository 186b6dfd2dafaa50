import json
import math

import numpy as np
import pytest

from abvortex.cli import RunConfig, UsageError, main, parse_config


def read_csv(path):
    text = path.read_bytes().decode("utf-8")
    lines = text.split("\n")
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if l and not l.startswith("#")]
    meta = dict(l[2:].split("=", 1) for l in header)
    return meta, body[0].split(","), [r.split(",") for r in body[1:]], text


def test_parse_xsec_example(tmp_path):
    cfg = parse_config(["xsec", "--alpha", "0.5", "--eta", "0", "--krc", "100", "--grid", "2001",
                        "--tier", "all", "--out", str(tmp_path / "run1")])
    assert isinstance(cfg, RunConfig)
    assert cfg.alpha == 0.5 and cfg.grid == 2001 and cfg.wavenumber == 100.0
    assert cfg.tiers == ("exact", "quasiclassical", "classical")


def test_k_and_krc_conflict():
    with pytest.raises(UsageError, match="k"):
        parse_config(["xsec", "--k", "3.0", "--krc", "100"])
    assert main(["xsec", "--k", "3.0", "--krc", "100"]) == 2


def test_flags_override_file(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# scenario\neta = 0.2\nalpha=0.25  # flux\nk = 2\n")
    cfg = parse_config(["xsec", "--config", str(conf), "--eta", "0.3"])
    assert cfg.eta == 0.3 and cfg.alpha == 0.25 and cfg.k == 2.0
    # a flag for either wavenumber replaces the file's choice
    cfg = parse_config(["xsec", "--config", str(conf), "--krc", "50"])
    assert cfg.k is None and cfg.krc == 50.0


@pytest.mark.parametrize("text, key", [("bogus = 1\n", "bogus"), ("eta = abc\n", "eta"),
                                       ("k = 1\nkrc = 2\n", "k"), ("eta\n", "line 1")])
def test_config_file_errors_name_key(tmp_path, text, key):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    with pytest.raises(UsageError, match=key):
        parse_config(["xsec", "--config", str(conf)])


@pytest.mark.parametrize("argv, key", [
    (["xsec", "--krc", "10", "--eta", "1e"], "eta"),
    (["xsec", "--krc", "10", "--phi-max", "90deg"], "degrees"),
    (["xsec", "--krc", "10", "--grid", "1"], "grid"),
    (["xsec", "--krc", "10", "--spin", "left"], "spin"),
    (["xsec"], "krc"),
    (["sweep", "--krc", "10", "--axis", "alpha", "--values", "0:1:0.3"], "values"),
    (["xsec", "--krc", "10", "--unknown", "1"], "unknown"),
])
def test_usage_errors(argv, key):
    with pytest.raises(UsageError, match=key):
        parse_config(argv)
    assert main(argv) == 2


def test_xsec_outputs(tmp_path):
    out = tmp_path / "run1"
    assert main(["xsec", "--alpha", "0.5", "--eta", "0", "--krc", "100", "--grid", "201",
                 "--tier", "all", "--out", str(out)]) == 0
    for tier in ("exact", "quasiclassical", "classical"):
        meta, cols, rows, text = read_csv(out / f"xsec_{tier}.csv")
        assert cols == ["phi", "dsigma_dphi", "tier", "flag"]
        assert len(rows) == 201 and all(r[2] == tier for r in rows)
        assert "\r" not in text and meta["alpha"] == "0.5" and meta["krc"] == "100.0"
        assert float(rows[0][0]) == -math.pi
    _, _, rows, _ = read_csv(out / "xsec_exact.csv")
    forward = min(rows, key=lambda r: abs(float(r[0])))
    assert forward[3] == "distributional"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["totals"] == {"sigma_tot": 4.0, "sigma_classical": 2.0}
    assert summary["checks"] == [] and summary["config"]["grid"] == 201


def test_csv_uses_17_significant_digits(tmp_path):
    main(["xsec", "--alpha", "0.3", "--krc", "20", "--grid", "5", "--tier", "exact", "--out", str(tmp_path)])
    _, _, rows, _ = read_csv(tmp_path / "xsec_exact.csv")
    assert rows[1][0] == format(-math.pi / 2, ".17g")
    assert float(rows[1][1]) == float(format(float(rows[1][1]), ".17g"))


def test_failed_tier_rows_are_flagged(tmp_path):
    assert main(["xsec", "--eta", "0.7", "--krc", "20", "--grid", "5", "--tier", "classical",
                 "--out", str(tmp_path)]) == 0
    _, _, rows, _ = read_csv(tmp_path / "xsec_classical.csv")
    assert all(r[1] == "nan" and r[3].startswith("error:") for r in rows)


def test_sweep_traces_forward_cos2_law(tmp_path):
    assert main(["sweep", "--axis", "alpha", "--values", "0:1:0.05", "--eta", "0", "--krc", "100",
                 "--phi", "0", "--out", str(tmp_path)]) == 0
    _, cols, rows, _ = read_csv(tmp_path / "sweep_alpha.csv")
    assert cols == ["alpha", "phi", "dsigma_dphi", "tier", "flag"] and len(rows) == 21
    alpha = np.array([float(r[0]) for r in rows])
    value = np.array([float(r[2]) for r in rows])
    np.testing.assert_allclose(value / value[0], np.cos(np.pi * alpha) ** 2, atol=0.15)
    assert value[10] < value[0] / 100


def test_sweep_over_hardness(tmp_path):
    assert main(["sweep", "--axis", "krc", "--values", "20,40", "--phi", "2.0", "--tier", "all",
                 "--out", str(tmp_path)]) == 0
    _, _, rows, _ = read_csv(tmp_path / "sweep_krc.csv")
    assert len(rows) == 6


def test_mc_is_byte_identical(tmp_path):
    argv = ["mc", "--eta", "-0.5", "--samples", "200000", "--seed", "7", "--out", str(tmp_path)]
    assert main(argv) == 0
    first = [(tmp_path / n).read_bytes() for n in ("mc_classical.csv", "summary.json")]
    assert main(argv + ["--threads", "4"]) != 2
    main(argv)
    assert [(tmp_path / n).read_bytes() for n in ("mc_classical.csv", "summary.json")] == first
    _, _, rows, _ = read_csv(tmp_path / "mc_classical.csv")
    centre = [r for r in rows if abs(float(r[0])) < 0.9]
    assert all(r[1] == "0" and r[3] == "empty" for r in centre)


def test_validate_conical_closure(tmp_path):
    assert main(["validate", "--eta", "0.2", "--alpha", "0.25", "--krc", "100", "--samples", "200000",
                 "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    checks = {c["name"]: c for c in summary["checks"]}
    closure = checks["peak_optical_closure[alpha=0.25]"]
    assert closure["pass"] and abs(closure["value"] - 3.2) < 1e-11
    assert summary["pass"] and summary["totals"]["sigma_tot"] == pytest.approx(3.2)


def test_validate_exit_status_reflects_checks(tmp_path):
    # a ladder too short for a slope fit is a configuration error, not a pass
    assert main(["validate", "--krc", "20", "--ladder", "20,40", "--out", str(tmp_path)]) == 1
    assert main(["validate", "--krc", "20", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert "tier_equivalence" in summary["skipped"]
