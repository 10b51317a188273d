"""Result persistence: CSV with metadata header lines, optional JSON mirror.

Every output starts with `#`-prefixed metadata: a schema version line, a
build id (first 12 hex digits of the SHA-1 of the canonical metadata string),
and the config echo. Only content-determining fields are echoed (experiment,
p, grids, exponents, noise levels, trials, seed, kinds); execution plumbing
such as the output path, worker count, or overwrite flag is excluded so that
identical (config, seed) runs produce byte-identical files regardless of how
they were executed. No timestamps for the same reason.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os

from .config import ConfigError, ExperimentConfig

SCHEMA_VERSION = 1

_ECHO_FIELDS = (
    "experiment",
    "p",
    "n",
    "m",
    "alpha",
    "beta_exp",
    "sigma_t_sq",
    "sigma_s_sq",
    "trials",
    "seed",
    "kinds",
)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def config_echo(cfg: ExperimentConfig) -> dict:
    return {name: format_value(getattr(cfg, name)) for name in _ECHO_FIELDS}


def schema_tag(experiment: str) -> str:
    return f"w2s-lab/{experiment}/v{SCHEMA_VERSION}"


def build_id(cfg: ExperimentConfig) -> str:
    echo = config_echo(cfg)
    canonical = schema_tag(cfg.experiment) + ";" + ";".join(
        f"{k}={echo[k]}" for k in _ECHO_FIELDS
    )
    return hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:12]


def render_csv(cfg: ExperimentConfig, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={schema_tag(cfg.experiment)}\n")
    buf.write(f"# build_id={build_id(cfg)}\n")
    for key, value in config_echo(cfg).items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise RuntimeError(
                f"internal inconsistency: row has {len(row)} fields, schema has {len(columns)}"
            )
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_json(cfg: ExperimentConfig, columns, rows) -> str:
    def jsonable(value):
        if isinstance(value, float):
            return value
        if isinstance(value, (int, str, bool)) or value is None:
            return value
        return format_value(value)

    doc = {
        "schema": schema_tag(cfg.experiment),
        "build_id": build_id(cfg),
        "config": config_echo(cfg),
        "columns": list(columns),
        "rows": [[jsonable(v) for v in row] for row in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _refuse_existing(path: str, force: bool) -> None:
    if os.path.exists(path) and not force:
        raise ConfigError(f"out: {path} exists; pass --force to overwrite")


def write_outputs(cfg: ExperimentConfig, columns, rows) -> list:
    """Write the CSV (and JSON mirror when configured) to cfg.out.

    Returns the list of paths written. Parent directories are created;
    existing files are refused unless the config carries force=True.
    """
    if cfg.out is None:
        raise ConfigError("out: no output path configured")
    paths = [cfg.out]
    if cfg.json_mirror:
        root, ext = os.path.splitext(cfg.out)
        paths.append(root + ".json" if ext.lower() == ".csv" else cfg.out + ".json")
    for path in paths:
        _refuse_existing(path, cfg.force)
    parent = os.path.dirname(cfg.out)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(paths[0], "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(cfg, columns, rows))
    if cfg.json_mirror:
        with open(paths[1], "w", encoding="utf-8", newline="") as fh:
            fh.write(render_json(cfg, columns, rows))
    return paths
