"""CSV / JSON writers with provenance sidecars."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from pathlib import Path

import numpy as np

OUT_ENV = "CHEBYHMC_OUT"


def default_out_dir() -> str:
    return os.environ.get(OUT_ENV, "results")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def content_hash(config: dict, extra_files=()) -> str:
    """sha256 over the canonical config JSON and the bytes of any input files."""
    h = hashlib.sha256()
    h.update(json.dumps(config, sort_keys=True, default=_jsonable).encode())
    for f in extra_files:
        h.update(Path(f).read_bytes())
    return h.hexdigest()


def provenance(command: str, config: dict, seeds=None, inputs=()) -> dict:
    from .. import __version__

    return {
        "command": command,
        "config": config,
        "seeds": seeds or {},
        "input_hash": content_hash(config, inputs),
        "package_version": __version__,
    }


def write_csv(path, header, rows, prov: dict | None = None) -> Path:
    """Write a CSV and, when ``prov`` is given, ``<name>.provenance.json`` beside it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    if prov is not None:
        dump_json(path.with_name(path.name + ".provenance.json"), dict(prov, file=path.name))
    return path


def write_trace(path, samples, schedule, seed: int, extra: dict | None = None) -> Path:
    """Trace CSV (one row per iteration, one column per coordinate) + JSON sidecar."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    header = ["k"] + [f"x{j}" for j in range(samples.shape[1])]
    rows = ([k + 1, *map(float, s)] for k, s in enumerate(samples))
    path = write_csv(path, header, rows)
    meta = {"schedule": schedule.to_dict(), "seed": seed}
    if extra:
        meta.update(extra)
    dump_json(path.with_name(path.name + ".json"), meta)
    return path


def read_trace(path):
    """Inverse of :func:`write_trace`: ``(samples, sidecar dict)``."""
    path = Path(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    return data[:, 1:], meta
