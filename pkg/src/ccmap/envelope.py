"""Correlation-complexity map points and binwise envelope estimators."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cci import cci
from .datasets import BitDataset
from .errors import InsufficientDataError
from .spectrum import qcli

PROVENANCES = ("classical", "quantum")


@dataclass(frozen=True)
class MapPoint:
    label: str
    qcli: float
    cci: float
    provenance: str = "classical"

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        for name in ("qcli", "cci"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


def map_point(d: BitDataset, label: str, provenance: str = "classical", budget: int = 20000, seed: int = 0) -> MapPoint:
    """Place a dataset on the map; exact QCLI up to 20 bits, Monte Carlo above."""
    return MapPoint(label, float(qcli(d, budget, seed)), cci(d).cci, provenance)


def write_map_csv(points: Iterable[MapPoint], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "qcli", "cci", "provenance"])
        for p in points:
            w.writerow([p.label, repr(p.qcli), repr(p.cci), p.provenance])
    return path


@dataclass(frozen=True)
class EnvelopeCurve:
    anchors: tuple[tuple[float, float], ...]
    kind: str
    smoothed: tuple[tuple[float, float], ...]

    def __post_init__(self):
        xs = [x for x, _ in self.anchors]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("anchor x values must be strictly increasing")

    def __call__(self, x) -> np.ndarray:
        """Piecewise-linear evaluation of the smoothed curve, flat beyond the ends."""
        xs, ys = np.array(self.smoothed).T
        return np.interp(x, xs, ys)


def moving_average(y: Sequence[float], window: int) -> np.ndarray:
    """Centred moving average; the window shrinks symmetrically at the edges."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    y = np.asarray(y, dtype=float)
    half = window // 2
    out = np.empty_like(y)
    for i in range(y.size):
        h = min(half, i, y.size - 1 - i)
        out[i] = y[i - h : i + h + 1].mean()
    return out


def _bin_extremes(x: np.ndarray, y: np.ndarray, ids: np.ndarray, pick) -> list[tuple[float, float]]:
    out = []
    for b in np.unique(ids):
        sel = np.flatnonzero(ids == b)
        # order by (y, x) so ties resolve the same way for any input order
        key = np.lexsort((x[sel], y[sel]))
        j = sel[key[pick]]
        out.append((float(x[j]), float(y[j])))
    return out


def _dedupe(anchors: list[tuple[float, float]]) -> list[tuple[float, float]]:
    anchors.sort()
    out: list[tuple[float, float]] = []
    for a in anchors:
        if out and a[0] <= out[-1][0]:
            continue
        out.append(a)
    return out


def scatter_envelopes(points, bin_width: float = 0.09, min_count: int = 1, window: int = 3) -> tuple[EnvelopeCurve, EnvelopeCurve]:
    """Upper and lower binwise envelopes of a (qcli, loss) cloud.

    Bins are ``[j*w, (j+1)*w)``.  Each nonempty bin contributes its highest and
    lowest point, keeping the point's own x coordinate.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    ids = np.floor(x / bin_width).astype(np.int64)
    keep = np.isin(ids, [b for b in np.unique(ids) if np.count_nonzero(ids == b) >= min_count])
    x, y, ids = x[keep], y[keep], ids[keep]
    if np.unique(ids).size < 2:
        raise InsufficientDataError("envelopes need at least two nonempty bins")
    curves = []
    for kind, pick in (("upper", -1), ("lower", 0)):
        anchors = _dedupe(_bin_extremes(x, y, ids, pick))
        ys = moving_average([a[1] for a in anchors], window)
        smoothed = tuple((a[0], float(v)) for a, v in zip(anchors, ys))
        curves.append(EnvelopeCurve(tuple(anchors), kind, smoothed))
    return curves[0], curves[1]


def frontier_envelope(points, bins: int = 20, min_count: int = 3, window: int = 3) -> EnvelopeCurve:
    """Lower frontier of a (qcli, cci) cloud.

    Per QCLI bin with at least ``min_count`` points the minimum CCI is anchored
    at the bin centre.  The curve is extended flat to the data range and then
    smoothed with a centred moving average.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    if x.size == 0:
        raise InsufficientDataError("no points")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    ids = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, bins - 1)
    anchors = []
    for b in range(bins):
        sel = ids == b
        if np.count_nonzero(sel) >= min_count:
            anchors.append((0.5 * (edges[b] + edges[b + 1]), float(y[sel].min())))
    if not anchors:
        raise InsufficientDataError(f"no bin holds {min_count} or more points")
    ext = list(anchors)
    if x.min() < ext[0][0]:
        ext.insert(0, (float(x.min()), ext[0][1]))
    if x.max() > ext[-1][0]:
        ext.append((float(x.max()), ext[-1][1]))
    ys = moving_average([a[1] for a in ext], window)
    smoothed = tuple((a[0], float(v)) for a, v in zip(ext, ys))
    return EnvelopeCurve(tuple(anchors), "frontier", smoothed)


def write_envelope_csv(curves: Iterable[EnvelopeCurve], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "series", "x", "y"])
        for c in curves:
            for series, pts in (("anchor", c.anchors), ("smoothed", c.smoothed)):
                for x, y in pts:
                    w.writerow([c.kind, series, repr(x), repr(y)])
    return path
