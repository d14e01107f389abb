"""Run and bench configuration files.

A run config is a YAML mapping with sections ``target``, ``strategy``,
``ladder``, ``schedule`` and ``run`` (plus ``bench`` for benchmark suites).
``--set section.key=value`` overrides are applied to the raw mapping before
validation.
"""
import copy
import os

import yaml

from .exceptions import ConfigError
from .sampler import SamplerConfig
from .targets.io import load_yaml

# section -> {file key: SamplerConfig field}
SECTIONS = {
    "ladder": {
        "levels_initial": "levels_initial", "t_max": "t_max", "temps": "temps", "n0": "n0",
        "check_interval": "check_interval", "reduction": "reduction", "gap_bounds": "gap_bounds",
    },
    "schedule": {"c": "gamma_c", "alpha": "gamma_alpha"},
    "run": {
        "burn_in": "burn_in", "main_iters": "main_iters", "seed": "seed", "thin": "thin",
        "start": "start", "theta_init": "theta_init", "theta_bounds": "theta_bounds",
        "record": "record", "threads": "threads",
    },
}
BENCH_KEYS = {"runs", "base_seed", "grid"}
TOP_LEVEL = {"target", "strategy", "bench"} | set(SECTIONS)


def parse_override(text):
    """``a.b=value`` to ``(["a", "b"], parsed_value)``; values are read as YAML scalars."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {text!r}", field=key or text)
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError:
        value = raw
    return key.split("."), value


def apply_overrides(doc, overrides):
    doc = copy.deepcopy(doc)
    for text in overrides or ():
        path, value = parse_override(text)
        dotted = ".".join(path)
        head = path[0]
        if head not in TOP_LEVEL:
            raise ConfigError("unknown config section", field=dotted)
        if head in SECTIONS and len(path) != 2:
            raise ConfigError("expected section.key", field=dotted)
        if head in SECTIONS and path[1] not in SECTIONS[head]:
            raise ConfigError("unknown config key", field=dotted)
        if head == "bench" and (len(path) != 2 or path[1] not in BENCH_KEYS):
            raise ConfigError("unknown config key", field=dotted)
        if head == "strategy" and len(path) != 1:
            raise ConfigError("strategy takes a single value", field=dotted)
        node = doc
        for part in path[:-1]:
            if not isinstance(node.get(part), dict):
                if head == "target" and isinstance(node.get(part), str):
                    node[part] = {"file": node[part]}
                else:
                    node[part] = {}
            node = node[part]
        node[path[-1]] = value
    return doc


def _reduction_value(value):
    # YAML reads bare on/off as booleans
    if value is True:
        return "strict"
    if value is False or value is None:
        return "off"
    return value


def sampler_config_from_dict(doc, base_dir="."):
    unknown = set(doc) - TOP_LEVEL
    if unknown:
        raise ConfigError("unknown config section", field=sorted(unknown)[0])
    kwargs = {"base_dir": base_dir}
    if "target" in doc:
        kwargs["target"] = doc["target"]
    if "strategy" in doc:
        kwargs["strategy"] = doc["strategy"]
    for section, mapping in SECTIONS.items():
        body = doc.get(section) or {}
        if not isinstance(body, dict):
            raise ConfigError("section must be a mapping", field=section)
        for key, value in body.items():
            if key not in mapping:
                raise ConfigError("unknown config key", field=f"{section}.{key}")
            if key == "reduction":
                value = _reduction_value(value)
            if key in ("gap_bounds", "theta_bounds") and value is not None:
                value = tuple(float(v) for v in value)
            if key == "t_max" and value is not None:
                value = float(value)
            if key == "theta_init" and value is not None:
                value = [float(v) for v in value] if isinstance(value, list) else float(value)
            kwargs[mapping[key]] = value
    for key in ("gamma_c", "gamma_alpha"):
        if key in kwargs:
            kwargs[key] = float(kwargs[key])
    try:
        cfg = SamplerConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def load_run_config(path, overrides=()):
    """Read, override and validate a run config; returns ``(SamplerConfig, raw_dict)``."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    doc = apply_overrides(load_yaml(path), overrides)
    base_dir = os.path.dirname(os.path.abspath(path))
    return sampler_config_from_dict(doc, base_dir), doc


def parse_grid(spec):
    """``"ee,ra:3,5"`` to ``[("ee", 3), ("ee", 5), ("ra", 3), ("ra", 5)]``; lists of mappings pass through."""
    if isinstance(spec, list):
        cells = []
        for item in spec:
            if not isinstance(item, dict) or "strategy" not in item or "L" not in item:
                raise ConfigError("grid entries need strategy and L", field="bench.grid")
            cells.append((str(item["strategy"]), int(item["L"])))
        return cells
    text = str(spec)
    strategies, sep, levels = text.rpartition(":")
    if not sep or not strategies:
        raise ConfigError(f"grid must look like ee,ra:3,5 (got {text!r})", field="bench.grid")
    # rings:<...> strategies contain commas of their own, so split on ';' when present
    names = strategies.split(";") if ";" in strategies else strategies.split(",")
    try:
        Ls = [int(v) for v in levels.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad level counts in {text!r}", field="bench.grid") from None
    return [(s.strip(), L) for s in names if s.strip() for L in Ls]
