"""Run diagnostics: mode occupancy, missing modes, MAE, moment RMSE, swap acceptance."""
import json
import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .targets import GaussianMixture, ProductExtendedTarget

logger = logging.getLogger(__name__)

UNASSIGNED = -1
REPORT_COLUMNS = [
    "strategy", "L", "no_missing_pct", "avg_missing", "mae",
    "rmse_EX1", "rmse_EX2", "rmse_EX1sq", "rmse_EX2sq", "swap_acc",
]


@dataclass(frozen=True)
class ModeMap:
    """Mode centers with a capture radius.

    With ``strict`` (the default) the centers must be farther apart than
    twice the radius, so capture regions are disjoint.  Overlapping maps are
    allowed with ``strict=False``; points then go to the nearest center and
    exact ties to the lowest index.
    """

    centers: np.ndarray
    capture_radius: float
    strict: bool = True

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", centers)
        if not self.capture_radius > 0:
            raise ValueError("capture_radius must be positive")
        m = centers.shape[0]
        if self.strict and m > 1:
            gaps = np.linalg.norm(centers[:, None] - centers[None], axis=-1)[np.triu_indices(m, 1)]
            if gaps.min() <= 2 * self.capture_radius:
                raise ValueError("mode centers must be farther apart than twice the capture radius")

    @property
    def n_modes(self):
        return self.centers.shape[0]

    def predict(self, X):
        """Vectorized :func:`assign_mode` over the rows of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))[:, :self.centers.shape[1]]
        dist = np.linalg.norm(X[:, None, :] - self.centers[None], axis=-1)
        nearest = dist.argmin(axis=1)  # first minimum wins ties
        inside = dist[np.arange(X.shape[0]), nearest] <= self.capture_radius
        return np.where(inside, nearest, UNASSIGNED)


def modemap_for(target, radius_sigmas=3.0):
    """Default mode map: component means with a ``3 sigma`` capture radius."""
    if isinstance(target, ProductExtendedTarget):
        return modemap_for(target.base, radius_sigmas)
    if isinstance(target, GaussianMixture):
        radius = radius_sigmas * target.sigma
        try:
            return ModeMap(target.means, radius)
        except ValueError:
            logger.warning("capture regions of radius %g overlap; assigning to the nearest center", radius)
            return ModeMap(target.means, radius, strict=False)
    return None


def assign_mode(x, modemap):
    """Index of the nearest center within the capture radius, else ``UNASSIGNED``.

    Only the leading coordinates matching the centers' dimension are used.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] < modemap.centers.shape[1]:
        raise ValueError("point has fewer coordinates than the mode centers")
    return int(modemap.predict(x[None, :])[0])


def occupancy(labels, n_modes):
    """Fractions of time per mode followed by the unassigned fraction."""
    labels = np.asarray(labels)
    counts = np.bincount(labels[labels >= 0], minlength=n_modes).astype(float)
    out = np.append(counts, np.sum(labels < 0))
    return out / max(labels.size, 1)


def mode_mae(mode_occupancy):
    """``(1/m) sum |t_i - 1/m| / (1/m)`` over occupancies renormalized to the modes."""
    t = np.asarray(mode_occupancy, dtype=float)
    m = t.shape[0]
    total = t.sum()
    if total > 0:
        t = t / total
    return float(np.mean(np.abs(t - 1.0 / m)) * m)


def rmse_over_runs(estimates, truth):
    """Per-moment root mean squared deviation from ``truth`` over runs (rows)."""
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    truth = np.asarray(truth, dtype=float)
    return np.sqrt(np.mean((est - truth) ** 2, axis=0))


@dataclass
class RunSummary:
    occupancy: np.ndarray
    missing_modes: int
    mae: float
    moments: dict
    swap_acc: float
    rw_acc: np.ndarray
    final_L: int
    strategy: str = ""
    L0: int = 0
    extra: dict = field(default_factory=dict)

    def moment_vector(self):
        """``(E X1, E X2, E X1^2, E X2^2)`` of the base chain."""
        ex, ex2 = self.moments["EX"], self.moments["EX2"]
        return np.array([ex[0], ex[1] if len(ex) > 1 else np.nan,
                         ex2[0], ex2[1] if len(ex2) > 1 else np.nan])

    def to_json(self):
        moments = OrderedDict()
        for k, (a, b) in enumerate(zip(self.moments["EX"], self.moments["EX2"]), start=1):
            moments[f"EX{k}"] = _num(a)
            moments[f"EX{k}sq"] = _num(b)
        return {
            "final_L": int(self.final_L),
            "swap_acceptance": _num(self.swap_acc),
            "rw_acceptance": [_num(v) for v in self.rw_acc],
            "moments": moments,
            "occupancy": [_num(v) for v in self.occupancy],
            "missing_modes": None if self.missing_modes is None else int(self.missing_modes),
            "mae": _num(self.mae),
        }


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def summarize_run(trace, target, modemap=None):
    if modemap is None:
        modemap = modemap_for(target)
    base = trace.base
    moments = {"EX": base.mean(axis=0), "EX2": (base ** 2).mean(axis=0)}
    if modemap is not None:
        labels = modemap.predict(base)
        occ = occupancy(labels, modemap.n_modes)
        per_mode = occ[:-1]
        missing = int(np.sum(per_mode == 0))
        mae = mode_mae(per_mode)
    else:
        occ, missing, mae = np.empty(0), None, math.nan
    used = trace.rw_accept_count > 0
    rw_acc = trace.rw_accept_sum[used] / trace.rw_accept_count[used]
    swap_acc = trace.swap_accepts / trace.swap_attempts if trace.swap_attempts else math.nan
    final = trace.final_state
    return RunSummary(
        occupancy=occ, missing_modes=missing, mae=mae, moments=moments, swap_acc=swap_acc,
        rw_acc=rw_acc, final_L=final.L if final is not None else trace.L0,
        strategy=str(final.strategy) if final is not None else "", L0=trace.L0,
    )


def acceptance_table(summaries):
    """Mean swap acceptance keyed by ``(strategy, L0)``."""
    groups = OrderedDict()
    for s in summaries:
        groups.setdefault((s.strategy, s.L0), []).append(s.swap_acc)
    return OrderedDict((k, float(np.nanmean(v))) for k, v in groups.items())


def group_report(strategy, L, summaries, truth=None):
    """One report row aggregating the runs of a ``(strategy, L)`` cell."""
    missing = np.array([s.missing_modes for s in summaries], dtype=float)
    row = OrderedDict(strategy=str(strategy), L=int(L))
    row["no_missing_pct"] = float(100.0 * np.mean(missing == 0))
    row["avg_missing"] = float(missing.mean())
    row["mae"] = float(np.mean([s.mae for s in summaries]))
    if truth is not None:
        rmse = rmse_over_runs([s.moment_vector() for s in summaries], truth)
    else:
        rmse = np.full(4, np.nan)
    for name, v in zip(("rmse_EX1", "rmse_EX2", "rmse_EX1sq", "rmse_EX2sq"), rmse):
        row[name] = float(v)
    row["swap_acc"] = float(np.nanmean([s.swap_acc for s in summaries]))
    return row


def moment_truth(target):
    """Exact ``(E X1, E X2, E X1^2, E X2^2)`` for a (product-extended) mixture."""
    if isinstance(target, ProductExtendedTarget):
        return moment_truth(target.base)
    if isinstance(target, GaussianMixture):
        first, second = target.moments()
        if first.shape[0] < 2:
            return np.array([first[0], np.nan, second[0], np.nan])
        return np.array([first[0], first[1], second[0], second[1]])
    return None


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return repr(v) if math.isfinite(v) else "nan"


def write_report(rows, csv_path, json_path, meta=None):
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in REPORT_COLUMNS) + "\n")
    doc = dict(meta or {})
    doc["columns"] = REPORT_COLUMNS
    doc["rows"] = [{k: (_num(v) if k not in ("strategy", "L") else v) for k, v in row.items()} for row in rows]
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
