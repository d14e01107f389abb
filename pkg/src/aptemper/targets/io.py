"""Target configuration files and regression CSV ingestion."""
import csv
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from ..exceptions import AptemperError, ConfigError, ConstantColumn, ParseError
from .bridge import BridgeModel
from .mixture import GaussianMixture
from .product import ProductExtendedTarget

BUILTIN = {"peaks20": "peaks20.cfg", "peaks20_8d": "peaks20_8d.cfg"}


@dataclass
class StandardizationReport:
    feature_names: list
    response_name: str
    x_shift: np.ndarray
    x_scale: np.ndarray
    y_shift: float
    n_rows: int = 0
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "feature_names": list(self.feature_names),
            "response_name": self.response_name,
            "x_shift": [float(v) for v in self.x_shift],
            "x_scale": [float(v) for v in self.x_scale],
            "y_shift": float(self.y_shift),
            "n_rows": self.n_rows,
        }


def read_regression_csv(path):
    """Raw ``(X, y, header)`` from a CSV whose last column is the response."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise ParseError(f"{path}: need at least one feature and a response column")
    values = []
    for r, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}", row=r)
        parsed = []
        for c, cell in enumerate(row):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{path}: row {r}, column {c + 1} ({header[c]!r}): not a number: {cell!r}",
                    row=r, column=c + 1,
                ) from None
        values.append(parsed)
    if not values:
        raise ParseError(f"{path}: no data rows")
    data = np.asarray(values)
    return data[:, :-1], data[:, -1], header


def standardize(X, y, feature_names=None, response_name="y"):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(X.shape[1])]
    shift = X.mean(axis=0)
    scale = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
    for j, sd in enumerate(scale):
        if not sd > 0:
            raise ConstantColumn(f"column {feature_names[j]!r} has zero variance")
    y_shift = float(y.mean())
    report = StandardizationReport(list(feature_names), response_name, shift, scale, y_shift, X.shape[0])
    return (X - shift) / scale, y - y_shift, report


def load_regression_csv(path):
    """Standardized ``(X, y, report)``: unit-sd centered features, centered response."""
    X, y, header = read_regression_csv(path)
    return standardize(X, y, header[:-1], header[-1])


def load_yaml(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def builtin_target_config(name):
    if name not in BUILTIN:
        raise ConfigError(f"unknown built-in target {name!r}", field="target")
    text = resources.files("aptemper.targets").joinpath(BUILTIN[name]).read_text(encoding="utf-8")
    return yaml.safe_load(text)


def resolve_target_spec(spec, base_dir="."):
    """Turn a name, path or mapping into a target-config mapping."""
    if isinstance(spec, str):
        if spec in BUILTIN:
            return builtin_target_config(spec), base_dir
        path = spec if os.path.isabs(spec) else os.path.join(base_dir, spec)
        return load_yaml(path), os.path.dirname(os.path.abspath(path))
    if isinstance(spec, dict):
        if "file" in spec or "name" in spec:
            inner, inner_dir = resolve_target_spec(spec.get("file", spec.get("name")), base_dir)
            merged = dict(inner)
            merged.update({k: v for k, v in spec.items() if k not in ("file", "name")})
            return merged, inner_dir
        return spec, base_dir
    raise ConfigError(f"cannot interpret target spec {spec!r}", field="target")


def build_target(spec, base_dir="."):
    """Construct a target from a config mapping, a file path or a built-in name."""
    cfg, base_dir = resolve_target_spec(spec, base_dir)
    kind = cfg.get("type")
    try:
        if kind == "mixture":
            means = np.asarray(cfg["means"], dtype=float)
            weights = cfg.get("weights", "uniform")
            if isinstance(weights, str):
                if weights != "uniform":
                    raise ConfigError(f"unknown weights keyword {weights!r}", field="target.weights")
                weights = None
            return GaussianMixture(means, float(cfg["sigma"]), weights)
        if kind == "product":
            base = build_target(cfg["base"], base_dir)
            k = int(cfg["extra_dims"])
            bounds = cfg.get("bounds", [[0.0, 1.0]] * k)
            bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
            if bounds.shape[0] != k:
                raise ConfigError(f"{bounds.shape[0]} bounds for extra_dims={k}", field="target.bounds")
            return ProductExtendedTarget(base, bounds)
        if kind == "bridge":
            csv_path = cfg["csv_path"]
            if not os.path.isabs(csv_path):
                csv_path = os.path.join(base_dir, csv_path)
            X, y, report = load_regression_csv(csv_path)
            model = BridgeModel(X, y, lam=float(cfg.get("lambda", 1.0)), q=float(cfg.get("q", 0.5)),
                                intercept=report.y_shift)
            model.report = report
            return model
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r} for target type {kind!r}", field="target") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, AptemperError):
            raise
        raise ConfigError(str(exc), field="target") from None
    raise ConfigError(f"type must be one of mixture, product, bridge; got {kind!r}", field="target.type")
