"""Artifact writing: versioned JSON/CSV, config digests, plot-data files."""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path
from typing import Any

from . import __version__

TOOL = "rdpair"
CACHE_ENV = "RDPAIR_CACHE_DIR"


def cache_dir() -> Path:
    """Cache directory from $RDPAIR_CACHE_DIR, else ~/.cache/rdpair."""
    p = os.environ.get(CACHE_ENV)
    return Path(p) if p else Path.home() / ".cache" / TOOL


def _cache_path(key: str) -> Path:
    safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in key)
    return cache_dir() / f"{safe}.json"


def cache_load(key: str):
    """Cached JSON value, or None.  Only active when $RDPAIR_CACHE_DIR is set."""
    if not os.environ.get(CACHE_ENV):
        return None
    p = _cache_path(key)
    if not p.exists():
        return None
    return json.loads(p.read_text())


def cache_store(key: str, value) -> None:
    if not os.environ.get(CACHE_ENV):
        return
    p = _cache_path(key)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(value))


def canonical_json(obj: Any) -> str:
    return json.dumps(_clean(obj), sort_keys=True, separators=(",", ":"))


def digest(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def envelope(schema: str, config: dict, payload: dict) -> dict:
    """Wrap a payload with schema, tool version and config digest (stable field order)."""
    return {
        "schema": f"{TOOL}.{schema}/1",
        "tool": {"name": TOOL, "version": __version__},
        "configDigest": digest(config),
        "config": config,
        **payload,
    }


def write_json(path: Path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(doc), indent=2) + "\n")
    return path


def write_csv(path: Path, text: str, config: dict, schema: str) -> Path:
    """CSV with a leading comment line carrying schema, version and digest."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    head = f"# schema={TOOL}.{schema}/1 tool={TOOL}-{__version__} config={digest(config)}\n"
    path.write_text(head + text)
    return path


def _write_series(path: Path, rows, header: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        for x, y in rows:
            fh.write(f"{x!r} {y!r}\n")
    return path


def emit_plot_data(report, path) -> list:
    """Two-column (x, y) text files, one per curve, named ``<stem>.<curve>.dat``.

    GrowthSeries -> growth (r, gamma(r)); ExponentFit -> rdfit
    (log(1+R), log M(R)) plus an ``rdfit.fit`` sidecar with the fitted
    lines; WalkReport -> walk (n, P_2n^(1/2n)).
    """
    from .balls import GrowthSeries
    from .rdlab import ExponentFit
    from .walks import WalkReport

    stem = Path(path)
    out = []
    if isinstance(report, GrowthSeries):
        rows = [(r, c) for r, c in enumerate(report.counts)]
        out.append(_write_series(stem.with_name(stem.name + ".growth.dat"), rows, "r gamma(r)"))
    elif isinstance(report, ExponentFit):
        rows = [(math.log(1 + R), math.log(m)) for R, m in zip(report.radii, report.ratios)]
        out.append(_write_series(stem.with_name(stem.name + ".rdfit.dat"), rows, "log(1+R) log(M(R))"))
        side = stem.with_name(stem.name + ".rdfit.fit.dat")
        side.write_text(
            "# fit slope intercept rms\n"
            f"loglog {report.loglog[0]!r} {report.loglog[1]!r} {report.loglog[2]!r}\n"
            f"semilog {report.semilog[0]!r} {report.semilog[1]!r} {report.semilog[2]!r}\n"
        )
        out.append(side)
    elif isinstance(report, WalkReport):
        rows = list(enumerate(report.radius_sequence, start=1))
        out.append(_write_series(stem.with_name(stem.name + ".walk.dat"), rows, "n P_2n^(1/2n)"))
    else:
        raise TypeError(f"no plot data for {type(report).__name__}")
    return out
