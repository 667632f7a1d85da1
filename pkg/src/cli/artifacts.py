import json
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from pydantic import BaseModel, Field  # noqa: E402

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.1.0"


class ResultRecord(BaseModel):
    config_hash: str
    command: str
    tool_version: str = TOOL_VERSION
    payload: dict = Field(default_factory=dict)
    diagnostics: dict = Field(default_factory=dict)
    warnings: list[str] = Field(default_factory=list)
    files: list[str] = Field(default_factory=list)

    def provenance(self) -> dict[str, str]:
        return {"config_hash": self.config_hash, "tool_version": self.tool_version, "command": self.command}


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value.tolist()]
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def record_document(record: ResultRecord) -> dict:
    return _jsonable(record.model_dump())


def write_json(record: ResultRecord, out_dir: Path, name: str = "report.json") -> Path:
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record_document(record), indent=2, sort_keys=True) + "\n")
    record.files.append(path.name)
    return path


def write_csv(frame: pd.DataFrame, record: ResultRecord, out_dir: Path, name: str) -> Path:
    """CSV with `# key: value` provenance lines ahead of the header row."""
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        for key, value in record.provenance().items():
            handle.write(f"# {key}: {value}\n")
        frame.to_csv(handle, index=False, float_format="%.12e", lineterminator="\n")
    record.files.append(path.name)
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def _save_svg(figure, record: ResultRecord, path: Path):
    description = " ".join(f"{key}={value}" for key, value in record.provenance().items())
    with plt.rc_context({"svg.hashsalt": record.config_hash}):
        figure.savefig(path, format="svg", metadata={"Date": None, "Description": description})
    plt.close(figure)
    record.files.append(path.name)


def line_plot(x, series: dict, record: ResultRecord, out_dir: Path, name: str, xlabel: str, ylabel: str,
              logy: bool = False) -> Path:
    figure, axes = plt.subplots(figsize=(6, 4))
    for label, values in series.items():
        axes.plot(x, values, marker="o", label=label)
    if logy:
        axes.set_yscale("log")
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)
    axes.legend()
    figure.tight_layout()
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    _save_svg(figure, record, path)
    return path


def heat_map(axis, values, record: ResultRecord, out_dir: Path, name: str, xlabel: str, ylabel: str,
             title: str = "") -> Path:
    """`values[k, j]` drawn with axis[k] horizontal and axis[j] vertical."""
    figure, axes = plt.subplots(figsize=(5, 4.5))
    extent = (axis[0], axis[-1], axis[0], axis[-1])
    image = axes.imshow(np.asarray(values).T, origin="lower", extent=extent, cmap="RdBu_r")
    figure.colorbar(image, ax=axes)
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)
    axes.set_title(title)
    figure.tight_layout()
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    _save_svg(figure, record, path)
    return path
