"""Report rows, emitters and batch aggregation used by the CLI.

A row is a plain dict keyed by column name.  Pixel-count columns (IR, MIR
and their bounds, external detector counts) can be scaled by 1e-3 for
table-style output; entropies and MI stay in nats.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DimensionMismatch, IRMIRError, IoError, ParseError, ZeroMeanChannel
from .ingest import CHANNEL_NAMES, Image, ManifestEntry, decode_image
from .measures import match, measure
from .optimizer import OptimizeConfig, optimize_k, two_symbol_profile
from .transform import quantize

log = logging.getLogger(__name__)

ANALYZE_COLUMNS = ["image", "format", "channel", "d", "nm", "levels", "entropy", "ir", "lir"]
MATCH_COLUMNS = [
    "image_a", "image_b", "format", "channel", "d", "nm", "levels",
    "mi", "joint_entropy", "mir", "lmir",
]
SWEEP_COLUMNS = ["image", "channel", "d", "K", "ir", "lir"]
OPTIMIZE_COLUMNS = [
    "image", "channel", "d", "status", "k_optimizer", "ir_at_one", "ir_at_k", "evaluations",
]
TWOSYMBOL_COLUMNS = ["p", "count_a", "count_b", "normalized_ir", "normalized_entropy", "singleton"]

PIXEL_COLUMNS = {"ir", "lir", "mir", "lmir", "ir_at_one", "ir_at_k"}
MEAN_COLUMNS = {
    "analyze": ["entropy", "ir", "lir"],
    "match": ["mi", "joint_entropy", "mir", "lmir"],
    "optimize": ["k_optimizer", "ir_at_one", "ir_at_k"],
}


def select_channels(selector: str) -> list[str]:
    if selector == "all":
        return list(CHANNEL_NAMES)
    if selector not in CHANNEL_NAMES:
        raise ValueError(f"unknown channel {selector!r}")
    return [selector]


# -- external detector counts --------------------------------------------


def _norm(p) -> str:
    return os.path.normcase(os.path.realpath(p))


@dataclass
class ExternalCounts:
    """Detector counts keyed by image path (and optionally channel)."""

    columns: list[str]
    by_path: dict = field(default_factory=dict)
    by_name: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "ExternalCounts":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"{path}: {exc}") from exc
        reader = csv.DictReader(io.StringIO(text))
        if not reader.fieldnames or "image" not in reader.fieldnames:
            raise ParseError(f"{path}: external counts need an 'image' column", 1, 1)
        columns = [c for c in reader.fieldnames if c not in ("image", "channel")]
        ext = cls(columns)
        names: dict = {}
        for lineno, rec in enumerate(reader, start=2):
            values = {}
            for c in columns:
                raw = (rec.get(c) or "").strip()
                if raw == "":
                    values[c] = None
                    continue
                try:
                    values[c] = float(raw)
                except ValueError:
                    raise ParseError(f"{path}: non-numeric value {raw!r} in column {c}", lineno, 1) from None
            chan = (rec.get("channel") or "").strip().lower() or None
            img = Path(rec["image"])
            full = img if img.is_absolute() else path.parent / img
            ext.by_path[(_norm(full), chan)] = values
            names.setdefault((img.name, chan), []).append(values)
        ext.by_name = {k: v[0] for k, v in names.items() if len(v) == 1}
        return ext

    def lookup(self, image_path, channel: str) -> dict:
        key = _norm(image_path)
        name = Path(image_path).name
        for table, k in (
            (self.by_path, (key, channel)),
            (self.by_path, (key, None)),
            (self.by_name, (name, channel)),
            (self.by_name, (name, None)),
        ):
            if k in table:
                return table[k]
        return {c: None for c in self.columns}


def _attach_external(rows, ext, key_column):
    if ext is None:
        return rows
    for row in rows:
        row.update(ext.lookup(row[key_column], row["channel"]))
    return rows


# -- per-command rows -----------------------------------------------------


def analyze_rows(image_id, image: Image, channels, distances, ext=None) -> list[dict]:
    rows = []
    for c in channels:
        for d in distances:
            rep = measure(quantize(image.channel(c), d), d)
            rows.append({
                "image": str(image_id), "format": image.source_format, "channel": c, "d": d,
                "nm": rep.nm, "levels": rep.levels,
                "entropy": rep.entropy, "ir": rep.ir, "lir": rep.lir,
            })
    return _attach_external(rows, ext, "image")


def match_rows(id_a, a: Image, id_b, b: Image, channels, distances, ext=None) -> list[dict]:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(
            f"{id_a} is {a.width}x{a.height} but {id_b} is {b.width}x{b.height}; resample first"
        )
    fmt = a.source_format if a.source_format == b.source_format else f"{a.source_format}+{b.source_format}"
    rows = []
    for c in channels:
        for d in distances:
            rep = match(quantize(a.channel(c), d), quantize(b.channel(c), d), d)
            rows.append({
                "image_a": str(id_a), "image_b": str(id_b), "format": fmt, "channel": c, "d": d,
                "nm": rep.nm, "levels": rep.levels,
                "mi": rep.mutual_information, "joint_entropy": rep.joint_entropy,
                "mir": rep.mir, "lmir": rep.lmir,
            })
    return _attach_external(rows, ext, "image_a")


def optimize_rows(image_id, image: Image, channels, distances, timing=False, ext=None) -> list[dict]:
    rows = []
    for c in channels:
        for d in distances:
            row = {"image": str(image_id), "channel": c, "d": d}
            try:
                res = optimize_k(image.channel(c), OptimizeConfig(d=d))
            except ZeroMeanChannel:
                log.warning("%s channel %s: zero mean, optimization skipped", image_id, c)
                row.update(status="zero_mean", k_optimizer=None, ir_at_one=None,
                           ir_at_k=None, evaluations=None)
                if timing:
                    row["elapsed"] = None
            else:
                row.update(status="ok" if res.early_stop else "grid_max",
                           k_optimizer=res.k_optimizer, ir_at_one=res.ir_at_one,
                           ir_at_k=res.ir_at_k, evaluations=res.evaluations)
                if timing:
                    row["elapsed"] = res.elapsed
            rows.append(row)
    return _attach_external(rows, ext, "image")


def twosymbol_rows(nm, p_grid) -> list[dict]:
    return [
        {"p": pt.p, "count_a": pt.count_a, "count_b": pt.count_b,
         "normalized_ir": pt.normalized_ir, "normalized_entropy": pt.normalized_entropy,
         "singleton": int(pt.singleton)}
        for pt in two_symbol_profile(nm, p_grid)
    ]


# -- batch ----------------------------------------------------------------


@dataclass
class BatchOutcome:
    rows: list
    failures: list  # (entry, message)
    skipped: list
    processed: int


def _run_entry(entry: ManifestEntry, mode, channels, distances, ext):
    """Rows for one entry, or None when the entry does not take part in this mode."""
    if mode == "match":
        if entry.pair_with is None:
            return None
        a, b = decode_image(entry.path), decode_image(entry.pair_with)
        return match_rows(entry.path, a, entry.pair_with, b, channels, distances, ext)
    img = decode_image(entry.path)
    if mode == "analyze":
        return analyze_rows(entry.path, img, channels, distances, ext)
    return optimize_rows(entry.path, img, channels, distances, ext=ext)


def run_batch(entries, mode, channels, distances, ext=None, jobs=1) -> BatchOutcome:
    def work(entry):
        try:
            return entry, _run_entry(entry, mode, channels, distances, ext), None
        except IRMIRError as exc:
            return entry, None, exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, entries))
    else:
        results = [work(e) for e in entries]

    # collected in manifest order regardless of completion order
    out = BatchOutcome([], [], [], 0)
    for entry, rows, exc in results:
        if isinstance(exc, DimensionMismatch):
            log.warning("skipping %s: %s", entry.path, exc)
            out.skipped.append((entry, str(exc)))
        elif exc is not None:
            log.error("failed %s: %s", entry.path, exc)
            out.failures.append((entry, str(exc)))
        elif rows is not None:
            out.processed += 1
            for r in rows:
                r["category"] = entry.category
            out.rows.extend(rows)
    return out


def _mean(values):
    vals = [v for v in values if v is not None]
    return math.fsum(vals) / len(vals) if vals else None


def aggregate(rows, mode, external_columns=()) -> list[dict]:
    """Per (category, channel, d) means, groups in first-appearance order."""
    groups: OrderedDict = OrderedDict()
    for r in rows:
        if r.get("status") == "zero_mean":
            continue
        groups.setdefault((r["category"], r["channel"], r["d"]), []).append(r)
    cols = MEAN_COLUMNS[mode] + list(external_columns)
    out = []
    for (cat, chan, d), members in groups.items():
        row = {"category": cat, "channel": chan, "d": d, "n": len(members)}
        for c in cols:
            row[c] = _mean(m.get(c) for m in members)
        if mode == "optimize":
            for c in external_columns:
                opt = f"{c}_optimized"
                if opt in external_columns and row.get(c):
                    row[f"{c}_improvement_pct"] = (
                        None if row[opt] is None else 100.0 * (row[opt] - row[c]) / row[c]
                    )
        out.append(row)
    return out


def batch_columns(mode, external_columns=()) -> list[str]:
    cols = ["category", "channel", "d", "n"] + MEAN_COLUMNS[mode] + list(external_columns)
    if mode == "optimize":
        cols += [f"{c}_improvement_pct" for c in external_columns
                 if f"{c}_optimized" in external_columns]
    return cols


# -- emitters -------------------------------------------------------------


def scale_e03(rows, extra=()):
    cols = PIXEL_COLUMNS | set(extra)
    for r in rows:
        for c in cols:
            if r.get(c) is not None:
                r[c] = r[c] * 1e-3
    return rows


# fixed decimals instead of significant digits
FIXED_COLUMNS = {"elapsed": 6}


def _fmt(v, precision, column=None):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v} in report")
        if column in FIXED_COLUMNS:
            return f"{v:.{FIXED_COLUMNS[column]}f}"
        return f"{v:.{precision}g}"
    return str(v)


def _json_value(v, precision, column=None):
    if isinstance(v, float):
        if column in FIXED_COLUMNS:
            return round(v, FIXED_COLUMNS[column])
        return float(f"{v:.{precision}g}")
    if isinstance(v, bool):
        return int(v)
    return v


def to_csv(rows, columns, precision=6) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c), precision, c) for c in columns])
    return buf.getvalue()


def to_json(rows, columns, precision=6) -> str:
    doc = [{c: _json_value(r.get(c), precision, c) for c in columns} for r in rows]
    return json.dumps(doc, indent=2) + "\n"


def render(rows, columns, fmt="csv", precision=6) -> str:
    if fmt == "json":
        return to_json(rows, columns, precision)
    return to_csv(rows, columns, precision)
