"""File formats: survival records, band exports and coverage tables.

All outputs are plain CSV with ``#``-prefixed ``key = value`` metadata
lines ahead of the header, so any plotting tool can consume them.
Floats are written with ``repr`` so a parsed band export reproduces the
in-memory step functions exactly.
"""

from __future__ import annotations

import numpy as np

from .bands import ConfidenceBand
from .errors import DataFormatError, InvalidInputError
from .process import HazardEstimate
from .simulation import CoverageTable, ExperimentConfig


def parse_survival_csv(lines) -> tuple[np.ndarray, np.ndarray]:
    """Read ``time,status`` rows; status 1 marks an event, 0 a censoring.

    Returns (times, observed) arrays in file order, duplicates preserved.
    """
    times: list[float] = []
    observed: list[bool] = []
    header_seen = False
    line_no = 0
    for line_no, raw in enumerate(lines, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            cols = [c.strip().lower() for c in line.split(",")]
            if cols != ["time", "status"]:
                raise DataFormatError("expected header 'time,status'", line=line_no)
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DataFormatError("expected two comma-separated fields", line=line_no)
        try:
            t = float(parts[0])
        except ValueError:
            raise DataFormatError(f"bad time value {parts[0]!r}", line=line_no) from None
        status = parts[1].strip()
        if status not in ("0", "1"):
            raise DataFormatError(f"status must be 0 or 1, got {status!r}", line=line_no)
        if t <= 0:
            raise DataFormatError("times must be positive", line=line_no)
        times.append(t)
        observed.append(status == "1")
    if not header_seen or not times:
        raise InvalidInputError("no survival records found")
    return np.asarray(times, dtype=float), np.asarray(observed, dtype=bool)


def _write_meta(fh, meta: dict):
    for key, value in meta.items():
        fh.write(f"# {key} = {value}\n")


def band_export_points(band: ConfidenceBand, estimate: HazardEstimate):
    """(x, a_hat, lower, upper) at every band breakpoint plus the S endpoints."""
    s = band.s
    x = np.concatenate(([s.start], band.lower.breakpoints, [s.end]))
    x = np.unique(x)
    return x, estimate.cum_hazard(x), band.lower(x), band.upper(x)


def write_band_csv(path, band: ConfidenceBand, estimate: HazardEstimate, seed: int):
    crit = ", ".join(repr(c) for c in band.critical_values)
    meta = {
        "method": band.method,
        "theta": repr(band.theta),
        "s_start": repr(band.s.start),
        "s_end": repr(band.s.end),
        "seed": seed,
        "critical_values": crit,
    }
    x, a_hat, lower, upper = band_export_points(band, estimate)
    with open(path, "w", encoding="utf-8") as fh:
        _write_meta(fh, meta)
        fh.write("x,a_hat,lower,upper\n")
        for row in zip(x, a_hat, lower, upper):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_band_csv(path):
    """Parse a band export back into (meta, x, a_hat, lower, upper)."""
    meta: dict[str, str] = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if line.startswith("x,"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise DataFormatError("expected four columns", line=line_no)
            rows.append([float(p) for p in parts])
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        raise InvalidInputError("band export holds no rows")
    return meta, data[:, 0], data[:, 1], data[:, 2], data[:, 3]


def write_coverage_csv(path, table: CoverageTable, config: ExperimentConfig):
    # worker count deliberately left out: equal seeds must give equal bytes
    meta = {
        "seed": config.master_seed,
        "iterations": config.iterations,
        "resamples": config.b_resamples,
        "theta": repr(config.theta),
        "s_start": repr(config.s.start),
        "s_end": repr(config.s.end),
        "termination_mean": repr(config.termination_mean),
        "alphas": ",".join(config.alphas),
        "y0": ",".join(str(y) for y in config.y0_values),
        "methods": ",".join(config.methods),
    }
    with open(path, "w", encoding="utf-8") as fh:
        _write_meta(fh, meta)
        fh.write("alpha,y0,method,left_pct,right_pct,coverage_pct,degenerate_pct\n")
        for row in table.rows:
            fh.write(
                f"{row.alpha},{row.y0},{row.method},"
                f"{row.left_pct:.4f},{row.right_pct:.4f},"
                f"{row.coverage_pct:.4f},{row.degenerate_pct:.4f}\n"
            )


def read_config_file(path) -> dict:
    """Flat ``key = value`` experiment configuration; '#' starts a comment."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DataFormatError("expected 'key = value'", line=line_no)
            out[key.strip().lower().replace("-", "_")] = value.strip()
    return out
