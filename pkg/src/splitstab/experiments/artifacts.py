"""Writing scenario results to an artifact directory."""

from __future__ import annotations

import csv
import json
import math
import os
import shutil
import tempfile
import warnings
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config
from .runners import RunResult, resolve, run_config
from .svg import plot_lines


def default_out_root() -> Path:
    return Path(os.environ.get("SPLITSTAB_OUT", "splitstab-out"))


def _fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def write_csv(path: Path, table: dict[str, np.ndarray]) -> None:
    cols = list(table)
    data = [np.asarray(table[c], dtype=float) for c in cols]
    n = {d.size for d in data}
    if len(n) != 1:
        raise ValueError(f"{path.name}: columns have different lengths {sorted(n)}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in zip(*data):
            w.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def write_result(directory: Path, cfg: ScenarioConfig, result: RunResult) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "inputs.json").write_text(cfg.to_json(), encoding="utf-8")
    for name, table in result.tables.items():
        write_csv(directory / f"{name}.csv", table)
    for name, doc in result.documents.items():
        write_json(directory / name, doc)
    write_json(directory / "summary.json", result.summary)
    if result.crash is not None:
        write_json(directory / "crash.json", result.crash.to_json())
    if result.plots:
        plots = directory / "plots"
        plots.mkdir(exist_ok=True)
        used: dict[str, int] = {}
        for table, spec in result.plots:
            k = used.get(table, 0)
            used[table] = k + 1
            stem = table if k == 0 else f"{table}_{k}"
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                plot_lines(directory / f"{table}.csv", spec, plots / f"{stem}.svg")


def run_scenario(config: ScenarioConfig | str | Path, out_root: str | Path | None = None, seed: int | None = None) -> tuple[Path, RunResult]:
    """Run one scenario and write its artifact directory ``out_root/<name>``.

    The config is validated (and its options resolved) before anything is
    written. Results are assembled in a temporary directory that replaces
    the target only when complete.
    """
    cfg = config if isinstance(config, ScenarioConfig) else load_config(config)
    if seed is not None:
        cfg = cfg.with_overrides(seed=seed)
    cfg = resolve(cfg)
    root = Path(out_root) if out_root is not None else default_out_root()
    result = run_config(cfg)
    root.mkdir(parents=True, exist_ok=True)
    target = root / cfg.name
    tmp = Path(tempfile.mkdtemp(prefix=f".{cfg.name}-", dir=root))
    try:
        write_result(tmp, cfg, result)
        if target.exists():
            shutil.rmtree(target)
        tmp.rename(target)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return target, result
