import json

import pytest

from snaptrust.base import ConfigError
from snaptrust.cli import _sweep_value, build_parser, main, overrides_from_args
from snaptrust.commands import CommandCollection, CommandFailure, CommandResult
from snaptrust.config import OUTPUT_ROOT_ENV, Profile, infer_profile, resolve_config


@pytest.fixture
def dataset(write_edge_list):
    """Raters 1-5 trust each other; every fourth tick one of them distrusts node 6 or 7.

    Nodes 6 and 7 never rate anyone, so they are the only Bad nodes. 12 self-loops
    are skipped, leaving 68 edges of which 20 cross the Good/Bad boundary.
    """
    lines = ["# source,target,rating,timestamp"]
    for tick in range(80):
        source = tick % 5 + 1
        if tick % 4 == 3:
            target, rating = 6 + (tick // 4) % 2, -3
        else:
            target, rating = (tick * 3 + 1) % 5 + 1, 4
        if source == target:
            continue
        lines.append(f"{source},{target},{rating},{1000 + tick}")
    return write_edge_list("\n".join(lines) + "\n", name="soc-sign-toy.csv")


@pytest.fixture
def config_file(tmp_path):
    def write(content) -> str:
        path = tmp_path / "run.json"
        path.write_text(json.dumps(content))
        return str(path)

    return write


def fast_flags(out) -> list[str]:
    return ["--snapshots", "3", "--epochs", "2", "--seeds", "0", "--out", str(out), "--log-level", "WARNING"]


def test_profile_defaults():
    config = resolve_config({"data": {"dataset": "data/soc-sign-bitcoinotc.csv"}})
    assert config.profile is Profile.OTC
    assert config.temporal["heads"] == 8
    assert config.spatial["threshold"] == 0.5

    alpha = resolve_config({"data": {"dataset": "data/soc-sign-bitcoinalpha.csv"}})
    assert alpha.profile is Profile.ALPHA
    assert alpha.temporal["heads"] == 16
    assert alpha.spatial["threshold"] == 0.3


def test_infer_profile():
    assert infer_profile("x/Bitcoin-Alpha.csv") is Profile.ALPHA
    assert infer_profile(None) is Profile.OTC


def test_file_overrides_profile_and_flags_override_file(config_file):
    path = config_file({"profile": "alpha", "temporal": {"heads": 4}, "spatial": {"threshold": 0.2}})
    config = resolve_config({"temporal": {"heads": 2}}, config_file=path)
    assert config.profile is Profile.ALPHA
    assert config.temporal["heads"] == 2
    assert config.spatial["threshold"] == 0.2
    assert config.train_config().temporal.heads == 2

    explicit = resolve_config(config_file=path, profile="otc")
    assert explicit.profile is Profile.OTC
    assert explicit.temporal["heads"] == 4


def test_unset_flags_do_not_override(config_file):
    path = config_file({"train": {"epochs": 7}})
    args = build_parser().parse_args(["train"])
    config = resolve_config(overrides_from_args(args), config_file=path)
    assert config.train["epochs"] == 7
    assert config.spatial["defense"] is True


@pytest.mark.parametrize(
    "content",
    [
        {"spatial": {"thresh": 0.2}},
        {"extra": {}},
        {"temporal": {"heads": 0}},
        {"spatial": {"threshold": 1.0}},
        {"profile": "epinions"},
    ],
)
def test_invalid_config_files_rejected(config_file, content):
    with pytest.raises(ConfigError):
        resolve_config(config_file=config_file(content))


def test_missing_or_malformed_config_file(tmp_path):
    with pytest.raises(ConfigError):
        resolve_config(config_file=tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError):
        resolve_config(config_file=broken)


def test_cross_field_errors_surface_at_resolution():
    with pytest.raises(ConfigError):
        resolve_config({"spatial": {"layers": 2, "layer_dims": [8, 8, 8]}})


def test_task_spec_is_built_on_demand():
    config = resolve_config({"data": {"snapshots": 2}})
    with pytest.raises(ConfigError):
        config.task_spec()


def test_attack_spec():
    assert resolve_config().attack_spec() is None
    spec = resolve_config({"attack": {"kind": "good"}}).attack_spec()
    assert spec.kind == "good"
    assert spec.target_fraction == 0.1


def test_output_root_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    assert resolve_config().output_dir("sweep") == tmp_path / "root" / "sweep"
    assert resolve_config({"output": {"directory": "elsewhere"}}).output_dir("sweep").name == "elsewhere"
    monkeypatch.delenv(OUTPUT_ROOT_ENV)
    assert str(resolve_config().output_dir("train")) == "runs/train"


def test_overrides_from_args():
    args = build_parser().parse_args(
        ["attack", "--defense", "off", "--attack", "onoff", "--query", "3", "5", "--sweep-values", "2", "0.5", "time"]
    )
    overrides = overrides_from_args(args)
    assert overrides["spatial"]["defense"] is False
    assert overrides["attack"]["kind"] == "onoff"
    assert overrides["output"]["query"] == [3, 5]
    assert overrides["output"]["plots"] is None
    assert overrides["sweep"]["values"] == [2, 0.5, "time"]


def test_sweep_value_casts():
    assert _sweep_value("4") == 4
    assert _sweep_value("0.25") == 0.25
    assert _sweep_value("event") == "event"


def test_command_result_combines():
    combined = CommandResult(output="a", artifacts=()) + CommandFailure(error="b", exit_status=3)
    assert combined.output == "a"
    assert combined.error == "b"
    assert combined.exit_status == 3
    assert not CommandResult()
    assert CommandResult(output="x").replace(output="y").output == "y"


def test_unknown_command_is_a_config_failure():
    result = CommandCollection.default().run(name="serve", config=resolve_config())
    assert result.exit_status == 2
    assert "serve" in result.error


def test_homophily_command(tmp_path, dataset, capsys):
    out = tmp_path / "homophily"
    assert main(["homophily", "--dataset", str(dataset), "--out", str(out), "--log-level", "WARNING"]) == 0
    payload = json.loads((out / "homophily.json").read_text())
    assert payload["ratio"] == pytest.approx(48 / 68)
    assert payload["good_nodes"] == 5
    assert payload["bad_nodes"] == 2
    assert capsys.readouterr().out.startswith("homophily=")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "homophily"
    assert manifest["config"]["data"]["dataset"] == str(dataset)


def test_ingest_command(tmp_path, dataset):
    out = tmp_path / "ingest"
    assert main(["ingest", "--dataset", str(dataset), "--snapshots", "2", "--out", str(out)]) == 0
    records = [json.loads(line) for line in (out / "snapshots.jsonl").read_text().splitlines()]
    assert [record["snapshot"] for record in records] == [0, 1]


def test_missing_dataset_is_a_data_error(tmp_path, capsys):
    status = main(["ingest", "--dataset", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "x")])
    assert status == 3
    assert "absent.csv" in capsys.readouterr().err


def test_no_dataset_is_a_config_error(tmp_path):
    assert main(["ingest", "--out", str(tmp_path / "x")]) == 2


def test_unknown_config_key_exits_with_config_status(tmp_path, dataset, config_file):
    path = config_file({"train": {"epoch": 3}})
    assert main(["train", "--dataset", str(dataset), "--config", path, "--out", str(tmp_path)]) == 2


def test_train_checkpoint_is_reproducible(tmp_path, dataset):
    out = tmp_path / "train"
    flags = ["train", "--dataset", str(dataset), "--layers", "2", "--heads", "2", *fast_flags(out)]
    checkpoints = []
    for _ in range(2):
        assert main(flags) == 0
        checkpoints.append((out / "model.npz").read_bytes())
    assert checkpoints[0] == checkpoints[1]
    epochs = (out / "epochs.jsonl").read_text().splitlines()
    assert len(epochs) == 2
    assert (out / "coefficients.csv").exists()
    assert (out / "attention_trend.csv").exists()


def test_train_rejects_out_of_range_prefix(tmp_path, dataset):
    flags = ["train", "--dataset", str(dataset), "--train-upto", "9", *fast_flags(tmp_path)]
    assert main(flags) == 2


def test_evaluate_command(tmp_path, dataset):
    out = tmp_path / "evaluate"
    flags = ["evaluate", "--dataset", str(dataset), "--layers", "1", "--heads", "2", *fast_flags(out)]
    assert main(flags) == 0
    assert (out / "metrics.csv").exists()
    assert (out / "subtasks.csv").exists()


def test_sweep_command_requires_parameter(tmp_path, dataset):
    assert main(["sweep", "--dataset", str(dataset), *fast_flags(tmp_path)]) == 2


def test_attack_command_compares_defense(tmp_path, dataset):
    out = tmp_path / "attack"
    flags = ["attack", "--dataset", str(dataset), "--attack", "bad", "--layers", "1", "--heads", "2", *fast_flags(out)]
    assert main(flags) == 0
    gap = (out / "defense_gap.csv").read_text().splitlines()
    assert gap[0] == "seed,mcc_on,mcc_off,gap"
    assert len(gap) == 2
    assert (out / "injections.csv").exists()


def test_attack_command_needs_an_attack(tmp_path, dataset):
    assert main(["attack", "--dataset", str(dataset), *fast_flags(tmp_path)]) == 2


def test_explain_command(tmp_path, dataset):
    out = tmp_path / "explain"
    flags = [
        "explain", "--dataset", str(dataset), "--attack", "good", "--query", "1", "2",
        "--layers", "2", "--heads", "2", "--plots", *fast_flags(out),
    ]
    assert main(flags) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["query"] == [0, 1]
    assert len(summary["prediction"]) == 2
    for name in ("coefficients.csv", "paths.csv", "injections.csv", "coefficients.png", "attention_trend.png"):
        assert (out / name).exists()


def test_explain_rejects_unknown_query_node(tmp_path, dataset):
    flags = ["explain", "--dataset", str(dataset), "--query", "1", "99", "--layers", "1", "--heads", "2", *fast_flags(tmp_path)]
    assert main(flags) == 3
