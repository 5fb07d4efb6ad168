"""Render one plot job: a JSON description of input CSVs and an output image.

Jobs come in two kinds.  ``region2d`` overlays the Pareto boundaries in
one or more ``x,y`` CSVs.  ``sweep`` draws success rate against bin rate
from a ``rhat,success_rate,ci_lo,ci_hi`` CSV, with an optional vertical
threshold marker.  The renderer only reads the CSVs; every number in a
figure comes from an input file or the job itself.

Figures use a fixed size and resolution.  A sidecar ``<output>.meta.json``
records the drawn geometry (curve hashes, labels, threshold) so two runs
can be compared structurally instead of pixel by pixel.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import jsonschema
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["JOB_SCHEMA", "JobError", "plot"]

FIGSIZE = (6.0, 4.0)
DPI = 150

JOB_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "kind", "inputs", "output"],
    "properties": {
        "version": {"const": 1},
        "kind": {"enum": ["region2d", "sweep"]},
        "inputs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["path"],
                "properties": {
                    "path": {"type": "string"},
                    "label": {"type": "string"},
                },
            },
        },
        "output": {"type": "string"},
        "title": {"type": "string"},
        "xlabel": {"type": "string"},
        "ylabel": {"type": "string"},
        "threshold": {"type": "number"},
    },
}

_HEADERS = {
    "region2d": ["x", "y"],
    "sweep": ["rhat", "success_rate", "ci_lo", "ci_hi"],
}


class JobError(ValueError):
    """Invalid job or unusable input CSV."""


def _read_csv(path: Path, header: list[str]) -> list[list[float]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise JobError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows or rows[0] != header:
        raise JobError(f"{path}: expected header {','.join(header)}")
    if len(rows) == 1:
        raise JobError(f"{path}: no data rows")
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise JobError(f"{path}: line {i} has {len(row)} fields")
        try:
            out.append([float(v) for v in row])
        except ValueError as exc:
            raise JobError(f"{path}: line {i}: {exc}") from exc
    return out


def _curve_hash(points) -> str:
    payload = ";".join(f"{x:.9g},{y:.9g}" for x, y in points)
    return hashlib.sha256(payload.encode()).hexdigest()


def plot(job: dict, base_dir: Path | str = ".") -> dict:
    """Validate the job, draw the figure, write image plus metadata.

    Relative paths resolve against ``base_dir``.  Nothing is written
    until every input has parsed.  Returns the metadata document.
    """
    try:
        jsonschema.validate(job, JOB_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise JobError(f"job: {exc.message}") from exc
    kind = job["kind"]
    if kind == "region2d" and "threshold" in job:
        raise JobError("job: region2d takes no threshold")
    base = Path(base_dir)
    header = _HEADERS[kind]
    datasets = []
    for i, item in enumerate(job["inputs"]):
        label = item.get("label", f"input {i + 1}")
        datasets.append((label, _read_csv(base / item["path"], header)))
    if kind == "sweep" and len(datasets) != 1:
        raise JobError("job: sweep takes exactly one input")

    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    curves = []
    if kind == "region2d":
        for label, rows in datasets:
            xs = [r[0] for r in rows]
            ys = [r[1] for r in rows]
            ax.plot(xs, ys, marker="o", label=label)
            curves.append(
                {"label": label, "points": len(rows), "hash": _curve_hash(zip(xs, ys))}
            )
        ax.set_xlabel(job.get("xlabel", "R1"))
        ax.set_ylabel(job.get("ylabel", "R2"))
    else:
        label, rows = datasets[0]
        xs = [r[0] for r in rows]
        ys = [r[1] for r in rows]
        ax.fill_between(xs, [r[2] for r in rows], [r[3] for r in rows], alpha=0.25)
        ax.plot(xs, ys, marker="o", label=label)
        curves.append(
            {"label": label, "points": len(rows), "hash": _curve_hash(zip(xs, ys))}
        )
        if "threshold" in job:
            ax.axvline(job["threshold"], linestyle="--", color="k")
        ax.set_xlabel(job.get("xlabel", "bin rate (bits)"))
        ax.set_ylabel(job.get("ylabel", "success rate"))
        ax.set_ylim(-0.05, 1.05)
    if "title" in job:
        ax.set_title(job["title"])
    ax.legend()
    out_path = base / job["output"]
    fig.savefig(out_path)
    plt.close(fig)

    meta = {
        "kind": kind,
        "figsize": list(FIGSIZE),
        "dpi": DPI,
        "curves": curves,
        "threshold": job.get("threshold"),
        "title": job.get("title"),
    }
    Path(str(out_path) + ".meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n"
    )
    return meta
