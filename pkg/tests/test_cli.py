"""End-to-end runs of the fracpoisson command line."""

import csv
import io
import json
import math

import pytest

from fracpoisson.cli.main import build_parser, load_config_file, run
from fracpoisson.errors import InputError


def table(text: str):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def header(text: str):
    return [line for line in text.splitlines() if line.startswith("#")]


def test_every_subcommand_is_registered():
    _, registered = build_parser()
    assert set(registered) == {
        "ml-eval",
        "pmf",
        "sample",
        "rate",
        "entropy",
        "ldp-profile",
        "compare-subordinated",
        "ruin",
    }


def test_ml_eval(capsys):
    assert run(["ml-eval", "--alpha", "1", "--z", "1"]) == 0
    rows = table(capsys.readouterr().out)
    assert abs(float(rows[0]["value"]) - math.e) < 1e-12


def test_rate_composition_value(capsys):
    assert run(["rate", "--nu", "0.5", "--lambda", "1", "--x", "1"]) == 0
    out = capsys.readouterr().out
    rows = table(out)
    expected = math.log(0.5 + 0.5 * math.sqrt(3.0)) - (0.5 * math.sqrt(3.0) - 0.5) ** 2
    assert abs(float(rows[0]["value"]) - expected) < 1e-12
    assert rows[0]["method"] == "closed_nu_half"
    assert "# h=1" in header(out)
    assert "# subcommand=rate" in header(out)


def test_config_echo_has_no_execution_details(capsys):
    assert run(["rate", "--nu", "1", "--lambda", "2", "--x", "1", "--workers", "2"]) == 0
    lines = header(capsys.readouterr().out)
    assert not any(line.startswith("# workers=") for line in lines)
    assert "# lambda=2" in lines


def test_config_echo_includes_settings(tmp_path, capsys):
    argv = ["sample", "--kind", "count", "--nu", "0.5", "--lambda", "1", "--t", "2", "--n-rep", "50"]
    assert run(argv) == 0
    default_header = header(capsys.readouterr().out)
    assert "# settings.mc_chunk_size=4096" in default_header
    assert "# settings.ml_series_guard=100" in default_header
    assert not any(line.startswith("# settings.workers=") for line in default_header)
    assert not any(line.startswith("# settings.log_level=") for line in default_header)

    config = tmp_path / "chunks.conf"
    config.write_text("settings.mc_chunk_size = 20\n")
    assert run(argv + ["--config", str(config)]) == 0
    chunked_header = header(capsys.readouterr().out)
    assert "# settings.mc_chunk_size=20" in chunked_header
    assert chunked_header != default_header


def test_rate_composition_kind(capsys):
    assert run(["rate", "--nu", "0.5", "--lambda", "1", "--x", "1", "--kind", "composition"]) == 0
    rows = table(capsys.readouterr().out)
    expected = math.log(0.5 + 0.5 * math.sqrt(3.0)) - (0.5 * math.sqrt(3.0) - 0.5) ** 2
    assert abs(float(rows[0]["value"]) - expected) < 1e-9


def test_premium_flag_is_not_an_abbreviation(capsys):
    code = run(["ruin", "--nu", "1", "--h", "1", "--lambda", "1", "--c", "0.5", "--claims", "exp:1", "--u-grid", "5"])
    assert code == 3
    err = capsys.readouterr().err
    assert "net profit" in err
    assert "config file" not in err


def test_entropy_summary(capsys):
    assert run(["entropy", "--nu", "0.5", "--lambda1", "1", "--lambda2", "2", "--t-grid", "10,20"]) == 0
    out = capsys.readouterr().out
    assert len(table(out)) == 2
    limit = [line for line in header(out) if line.startswith("# summary.limit=")][0]
    assert abs(float(limit.split("=", 1)[1]) - (3.0 - math.log(4.0))) < 1e-12


def test_pmf_classical(capsys):
    assert run(["pmf", "--nu", "1", "--lambda", "2", "--t", "1", "--k-max", "3"]) == 0
    rows = table(capsys.readouterr().out)
    assert [row["k"] for row in rows] == ["0", "1", "2", "3"]
    assert abs(float(rows[0]["pmf"]) - math.exp(-2.0)) < 1e-14


def test_json_output_writes_infinity_as_text(capsys):
    assert run(["rate", "--nu", "0.5", "--lambda", "1", "--x=-1,1", "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["config"]["subcommand"] == "rate"
    assert document["config"]["lambda"] == 1.0
    assert document["rows"][0]["value"] == "inf"
    assert isinstance(document["rows"][1]["value"], float)


def test_output_file(tmp_path):
    target = tmp_path / "rate.csv"
    assert run(["rate", "--nu", "1", "--lambda", "1", "--x", "2", "--output", str(target)]) == 0
    rows = table(target.read_text())
    assert abs(float(rows[0]["value"]) - (2.0 * math.log(2.0) - 1.0)) < 1e-14


def test_net_profit_failure(capsys):
    code = run(["ruin", "--nu", "1", "--lambda", "1", "--c", "0.5", "--claims", "exp:1", "--u-grid", "1"])
    assert code == 3
    assert "net profit" in capsys.readouterr().err


def test_ruin_estimates(capsys):
    code = run(
        ["ruin", "--nu", "1", "--lambda", "1", "--c", "2", "--claims", "exp:1", "--u-grid", "5", "--n-rep", "2000"]
    )
    assert code == 0
    out = capsys.readouterr().out
    rows = table(out)
    assert abs(float(rows[0]["estimate"]) - 0.5 * math.exp(-2.5)) < 4.0 * float(rows[0]["std_error"]) + 1e-12
    w_line = [line for line in header(out) if line.startswith("# summary.w=")][0]
    assert abs(float(w_line.split("=", 1)[1]) - 0.5) < 1e-12


def test_unknown_flag_is_a_usage_error(capsys):
    assert run(["rate", "--nu", "0.5", "--lambda", "1", "--x", "1", "--bogus"]) == 2


def test_invalid_parameter(capsys):
    assert run(["rate", "--nu", "1.5", "--lambda", "1", "--x", "1"]) == 2


def test_invalid_claim_law(capsys):
    code = run(["ruin", "--nu", "1", "--lambda", "1", "--c", "2", "--claims", "pareto:1", "--u-grid", "1"])
    assert code == 2


def test_insufficient_replications(capsys):
    code = run(
        ["ldp-profile", "--nu", "0.5", "--lambda", "1", "--x", "50", "--t-grid", "1,2", "--n-rep", "100"]
    )
    assert code == 4


def test_profile_rows(capsys):
    code = run(["ldp-profile", "--nu", "1", "--lambda", "1", "--x", "2", "--t-grid", "5,10"])
    assert code == 0
    rows = table(capsys.readouterr().out)
    assert [row["stderr_or_bound_flag"] for row in rows] == ["exact", "exact"]


def test_output_independent_of_workers(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("# small chunks so that two workers share the run\nmc_chunk_size = 50\n")
    argv = ["sample", "--kind", "count", "--nu", "0.5", "--lambda", "1", "--t", "2", "--n-rep", "200"]
    argv += ["--config", str(config)]
    assert run(argv + ["--workers", "1"]) == 0
    serial = capsys.readouterr().out
    assert run(argv + ["--workers", "2"]) == 0
    parallel = capsys.readouterr().out
    assert serial == parallel
    assert len(table(serial)) == 200


def test_flags_override_config_file(tmp_path, capsys):
    config = tmp_path / "rate.conf"
    config.write_text("nu = 1\nlambda = 1\nx = 2\n")
    assert run(["rate", "--config", str(config)]) == 0
    assert float(table(capsys.readouterr().out)[0]["x"]) == 2.0
    assert run(["rate", "--config", str(config), "--x", "3"]) == 0
    assert float(table(capsys.readouterr().out)[0]["x"]) == 3.0


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("colour = blue\n")
    assert run(["rate", "--nu", "1", "--lambda", "1", "--x", "1", "--config", str(config)]) == 2


def test_config_file_errors(tmp_path):
    with pytest.raises(InputError):
        load_config_file(str(tmp_path / "missing.conf"))
    broken = tmp_path / "broken.conf"
    broken.write_text("just words\n")
    with pytest.raises(InputError):
        load_config_file(str(broken))
