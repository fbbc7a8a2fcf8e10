import json

import pandas as pd
import pytest

from mspe_lab.artifacts import (
    MANIFEST_NAME,
    ArtifactWriter,
    read_experiment_csv,
    write_csv,
)
from mspe_lab.errors import ConfigError
from mspe_lab.models import RunManifest, ScenarioConfig
from mspe_lab.simulation import run_scenario_experiment


def _manifest() -> RunManifest:
    return RunManifest(command="test", tool_version="0.0")


def test_artifacts_are_published_on_success(tmp_path):
    out = tmp_path / "run"
    with ArtifactWriter(out) as writer:
        writer.write_frame("table.csv", pd.DataFrame({"a": [1, 2]}))
        writer.write_json("data.json", {"x": 1.5})
        writer.write_manifest(_manifest())
        assert not out.exists()

    names = sorted(p.name for p in out.iterdir())
    assert names == ["data.json", MANIFEST_NAME, "table.csv"]
    manifest = json.loads((out / MANIFEST_NAME).read_text())
    published = ("table.csv", "data.json", MANIFEST_NAME)
    assert manifest["artifacts"] == [str(out / n) for n in published]
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".mspe-lab-")]


def test_nothing_is_published_on_error(tmp_path):
    out = tmp_path / "run"
    with pytest.raises(RuntimeError):
        with ArtifactWriter(out) as writer:
            writer.write_frame("table.csv", pd.DataFrame({"a": [1]}))
            raise RuntimeError("interrupted")
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_path_requires_context(tmp_path):
    with pytest.raises(RuntimeError):
        ArtifactWriter(tmp_path).path("x.csv")


def test_unwritable_parent_is_config_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigError):
        with ArtifactWriter(blocker / "sub" / "run"):
            pass


def test_csv_format(tmp_path):
    target = tmp_path / "t.csv"
    write_csv(pd.DataFrame({"k": [0, 1], "v": [0.5, None]}), target)
    assert target.read_bytes() == b"k,v\n0,0.5\n1,\n"


def test_experiment_table_ingest(tmp_path):
    result = run_scenario_experiment(ScenarioConfig(scenario_id=1, n=30, p=28, seed=1))
    target = tmp_path / "results.csv"
    write_csv(result.to_frame(), target)

    rows = read_experiment_csv(target)
    assert rows == result.rows
    # AICc is undefined at k >= n - 2
    assert rows[-1].aicc is None and rows[-1].gray_aicc is None


def test_unreadable_table(tmp_path):
    with pytest.raises(ConfigError):
        read_experiment_csv(tmp_path / "missing.csv")
