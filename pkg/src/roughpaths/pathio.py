"""CSV path ingestion and JSON round-trips for the documented schemas."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .covers import CompactCover
from .manifold import LocalRoughPath
from .rough import GridFunctional, RoughPath
from .tensor import TruncTensor
from .variation import SampledPath


def read_path_csv(path) -> SampledPath:
    """Read a sampled path from CSV with header t,x1,...,xd."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    columns = [c.strip() for c in header.split(",")]
    if not columns or columns[0] != "t":
        raise ValueError(f"{path}: expected header 't,x1,...,xd', got {header!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(columns):
        raise ValueError(f"{path}: row width does not match header")
    return SampledPath(data[:, 0], data[:, 1:])


def write_path_csv(path, sampled: SampledPath) -> None:
    header = "t," + ",".join(f"x{i + 1}" for i in range(sampled.dim))
    rows = np.hstack([sampled.times[:, None], sampled.values])
    np.savetxt(path, rows, delimiter=",", header=header, comments="")


def cover_to_dict(cover: CompactCover) -> dict:
    return {"span": list(cover.span), "intervals": [list(iv) for iv in cover.intervals]}


def cover_from_dict(payload: dict) -> CompactCover:
    return CompactCover(
        tuple(tuple(iv) for iv in payload["intervals"]), tuple(payload["span"])
    )


def load_json(path) -> dict:
    with Path(path).open() as fh:
        return json.load(fh)


def dump_json(payload, path=None, indent=2) -> str:
    text = json.dumps(payload, indent=indent)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def detect_and_load(path):
    """Load a JSON artifact by shape: tensor, rough path or local rough path."""
    payload = load_json(path)
    if "items" in payload:
        return LocalRoughPath.from_dict(payload)
    if "cells" in payload and "start" in payload:
        return RoughPath.from_dict(payload)
    if "cells" in payload:
        return GridFunctional.from_dict(payload)
    if "levels" in payload:
        return TruncTensor.from_dict(payload)
    raise ValueError(f"{path}: unrecognized JSON schema")
