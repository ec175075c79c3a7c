"""Config validation, experiment dispatch, serialization, CLI exit codes."""

import json
import os

import pytest

from blmix.cli import main
from blmix.config import (ExperimentConfig, ResultRecord, emit, format_value,
                          parse_config, parse_csv, parse_json, render_csv,
                          render_json, run)
from blmix.errors import ConfigError


def minimal(experiment="schedule", **extra) -> str:
    doc = {"experiment": experiment, "n": 100, "lambda": 0.25}
    doc.update(extra)
    return json.dumps(doc)


# ------------------------------------------------------------------- parsing

def test_parse_minimal_applies_defaults():
    cfg = parse_config(minimal())
    assert cfg.experiment == "schedule"
    assert cfg.n_grid == (100,)
    assert cfg.epsilons == (0.25, 0.5, 0.75)
    assert cfg.replicas == 10_000
    assert cfg.kappa1 == cfg.kappa4 == 10.0
    assert cfg.k_for(100) == 25


def test_parse_rejects_unknown_fields():
    with pytest.raises(ConfigError, match="unknown config fields"):
        parse_config(minimal(replics=5))


def test_parse_rejects_boundary_lambda():
    with pytest.raises(ConfigError, match=r"open interval \(0, 1/2\)"):
        parse_config(minimal(**{"lambda": 0.5}))
    with pytest.raises(ConfigError):
        parse_config('{"experiment":"schedule","n":100,"lambda":0.0}')
    with pytest.raises(ConfigError):
        parse_config('{"experiment":"schedule","n":100}')


def test_parse_grid_rules():
    with pytest.raises(ConfigError, match="not both"):
        parse_config(minimal(n_grid=[10, 20]))
    with pytest.raises(ConfigError):
        parse_config('{"experiment":"schedule","lambda":0.25}')
    with pytest.warns(UserWarning, match="duplicate n=100"):
        cfg = parse_config(
            '{"experiment":"schedule","n_grid":[100,200,100],"lambda":0.25}')
    assert cfg.n_grid == (100, 200)


def test_parse_value_validation():
    with pytest.raises(ConfigError, match="epsilons"):
        parse_config(minimal(epsilons=[0.5, 1.5]))
    with pytest.raises(ConfigError, match="replicas"):
        parse_config(minimal(replicas=0))
    with pytest.raises(ConfigError, match="explicit"):
        parse_config(minimal(k_rule="explicit"))
    with pytest.raises(ConfigError, match="kappa2"):
        parse_config(minimal(kappa2=-1.0))
    with pytest.raises(ConfigError, match="not valid JSON"):
        parse_config("{nope")


def test_digest_is_stable_and_sensitive():
    a = parse_config(minimal())
    b = parse_config(minimal())
    c = parse_config(minimal(master_seed=999))
    assert a.digest == b.digest
    assert len(a.digest) == 8
    assert a.digest != c.digest


# ----------------------------------------------------------------- rendering

def test_format_value_contract():
    assert format_value(None) == ""
    assert format_value(True) == "true" and format_value(False) == "false"
    assert format_value(3) == "3"
    x = 0.1 + 0.2
    assert float(format_value(x)) == x  # 17 significant digits round-trip


def test_schedule_record_columns_and_digest_column():
    record = run(parse_config(minimal()))
    assert record.columns == ("n", "k", "lambda", "delta_n", "t_n", "s_n",
                              "p_lambda", "r_n", "config_digest")
    assert all(row[-1] == record.config_digest for row in record.rows)


def test_csv_json_csv_round_trip_is_byte_identical():
    record = run(parse_config(
        '{"experiment":"mixtime","n_grid":[100,200],"lambda":0.25}'))
    first = render_csv(record)
    assert first.endswith("\r\n")
    via_json = parse_json(render_json(parse_csv(first)))
    assert render_csv(via_json) == first


def test_emit_file_naming(tmp_path):
    record = run(parse_config(minimal()))
    paths = emit(record, str(tmp_path))
    names = sorted(os.path.basename(p) for p in paths)
    assert names == [f"schedule-{record.config_digest}.csv",
                     f"schedule-{record.config_digest}.json"]
    for p in paths:
        assert os.path.getsize(p) > 0


# --------------------------------------------------------------- CLI surface

def write_config(tmp_path, text: str) -> str:
    path = tmp_path / "config.json"
    path.write_text(text)
    return str(path)


def coupling_config(tmp_path, out_dir, seed=1, **extra) -> str:
    doc = {"experiment": "coupling", "n": 60, "lambda": 0.25, "replicas": 300,
           "horizon": 8, "master_seed": seed, "output_dir": str(out_dir)}
    doc.update(extra)
    return write_config(tmp_path, json.dumps(doc))


def test_cli_success_and_output(tmp_path, capsys):
    cfg = coupling_config(tmp_path, tmp_path)
    assert main(["coupling", "--config", cfg]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 2
    assert all(os.path.exists(p) for p in out)


def test_cli_exit_codes(tmp_path):
    bad = write_config(tmp_path, minimal(**{"lambda": 0.9}))
    assert main(["schedule", "--config", bad]) == 2
    big = write_config(tmp_path, json.dumps(
        {"experiment": "profile", "n": 5000, "lambda": 0.25,
         "start_policy": "all_states", "output_dir": str(tmp_path)}))
    assert main(["profile", "--config", big]) == 3
    assert main(["schedule", "--config", str(tmp_path / "missing.json")]) == 4
    gone = write_config(tmp_path, minimal(output_dir=str(tmp_path / "nope")))
    assert main(["schedule", "--config", gone]) == 4


def read_output(out_dir) -> bytes:
    csvs = [p for p in os.listdir(out_dir) if p.endswith(".csv")]
    assert len(csvs) == 1
    with open(os.path.join(out_dir, csvs[0]), "rb") as fh:
        return fh.read()


def test_cli_seed_precedence(tmp_path, monkeypatch):
    """config < BLMIX_SEED < --seed, verified through the emitted payloads."""
    outs = {name: tmp_path / name for name in ("a", "b", "c", "d")}
    for d in outs.values():
        d.mkdir()

    monkeypatch.delenv("BLMIX_SEED", raising=False)
    main(["coupling", "--config", coupling_config(tmp_path, outs["a"], seed=2)])
    monkeypatch.setenv("BLMIX_SEED", "2")
    main(["coupling", "--config", coupling_config(tmp_path, outs["b"], seed=1)])
    main(["coupling", "--config", coupling_config(tmp_path, outs["c"], seed=1),
          "--seed", "3"])
    monkeypatch.delenv("BLMIX_SEED")
    main(["coupling", "--config", coupling_config(tmp_path, outs["d"], seed=3)])

    payload = {k: read_output(v) for k, v in outs.items()}
    assert payload["a"] == payload["b"]  # env overrode the config seed
    assert payload["c"] == payload["d"]  # flag overrode the env seed
    assert payload["a"] != payload["c"]


def test_cli_bad_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("BLMIX_SEED", "not-a-number")
    cfg = coupling_config(tmp_path, tmp_path)
    assert main(["coupling", "--config", cfg]) == 2


def test_cli_threads_do_not_change_bytes(tmp_path):
    cfg = coupling_config(tmp_path, tmp_path, seed=77)
    assert main(["coupling", "--config", cfg, "--threads", "1"]) == 0
    first = read_output(tmp_path)
    assert main(["coupling", "--config", cfg, "--threads", "8"]) == 0
    assert read_output(tmp_path) == first
