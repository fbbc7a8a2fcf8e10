"""
Run outputs: atomic staging of CSV/JSON/SVG artifacts and run manifests
"""

import json
import logging
import math
import os
import shutil
import tempfile
from pathlib import Path
from types import TracebackType
from typing import Any, Dict, List, Optional, Type, Union

import pandas as pd
from pydantic import BaseModel

from .errors import ConfigError
from .models import ExperimentRow, RunManifest

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class ArtifactWriter:
    """
    Stage all outputs of a run and publish them together

    Files are written into a hidden staging directory next to the output
    directory and moved into place only when the block exits cleanly; on
    error the staging directory is removed and nothing is published.
    """

    def __init__(self, out_dir: Union[str, Path]) -> None:
        self.out_dir = Path(out_dir).expanduser()
        self.names: List[str] = []
        self._stage: Optional[Path] = None

    def __enter__(self) -> "ArtifactWriter":
        parent = self.out_dir.parent
        try:
            parent.mkdir(parents=True, exist_ok=True)
            self._stage = Path(tempfile.mkdtemp(prefix=".mspe-lab-", dir=parent))
        except OSError as e:
            raise ConfigError(f"Cannot create output directory {self.out_dir}: {e}")
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        assert self._stage is not None
        try:
            if exc_type is None:
                self._publish()
        finally:
            shutil.rmtree(self._stage, ignore_errors=True)
            self._stage = None

    def _publish(self) -> None:
        assert self._stage is not None
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for name in self.names:
            os.replace(self._stage / name, self.out_dir / name)
        logger.info("Wrote %d artifacts to %s", len(self.names), self.out_dir)

    def path(self, name: str) -> Path:
        """Staging path for an artifact, registered for publication"""
        if self._stage is None:
            raise RuntimeError("ArtifactWriter must be used as a context manager")
        if name not in self.names:
            self.names.append(name)
        return self._stage / name

    @property
    def final_paths(self) -> List[str]:
        return [str(self.out_dir / name) for name in self.names]

    def write_frame(self, name: str, frame: pd.DataFrame) -> None:
        write_csv(frame, self.path(name))

    def write_json(self, name: str, payload: Union[BaseModel, Dict[str, Any]]) -> None:
        if isinstance(payload, BaseModel):
            text = payload.model_dump_json(indent=2)
        else:
            text = json.dumps(payload, indent=2)
        self.path(name).write_text(text + "\n", encoding="utf-8")

    def write_manifest(self, manifest: RunManifest) -> None:
        """Record the run; the manifest lists every artifact including itself"""
        self.path(MANIFEST_NAME)
        manifest.artifacts = self.final_paths
        self.write_json(MANIFEST_NAME, manifest)


def write_csv(frame: pd.DataFrame, target: Any) -> None:
    """Comma-separated, '.' decimal point, LF line endings, UTF-8"""
    frame.to_csv(target, index=False, lineterminator="\n", encoding="utf-8")


def read_experiment_csv(path: Union[str, Path]) -> List[ExperimentRow]:
    """Ingest a scenario result table written by the scenario command"""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, ValueError) as e:
        raise ConfigError(f"Cannot read experiment table {path}: {e}")

    rows = []
    for record in frame.to_dict("records"):
        cleaned = {
            key: None if isinstance(value, float) and math.isnan(value) else value
            for key, value in record.items()
        }
        cleaned["model_id"] = int(cleaned["model_id"])
        cleaned["order"] = int(cleaned["order"])
        rows.append(ExperimentRow(**cleaned))
    return rows
