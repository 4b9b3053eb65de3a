"""Turn raw 6-hourly drifter temperature readings into daily curves.

Each drifter becomes one curve over the 365 days of a year: a day's value is
the median of that day's readings, ignoring missing ones.  In leap years
February 29 is removed after folding it into its neighbours: February 28
becomes the mean of the February 28 and 29 medians, March 1 the mean of the
February 29 and March 1 medians.  Days are UTC calendar days.
"""

from __future__ import annotations

import calendar
import csv
import warnings
from datetime import date, datetime, timezone
from typing import Dict, List, Optional, Tuple

import numpy as np

from .formats import PathOrFile, _open_read
from .model import DataError, FunctionalSample, Grid

ID_COLUMNS = ("id", "drifter", "drifter_id", "platform", "platform_code")
TIME_COLUMNS = ("time", "timestamp", "datetime", "date")
TEMP_COLUMNS = ("temperature", "temp", "sst", "value")
DAYS = 365


def _find(header: List[str], names) -> int:
    low = [h.strip().lower() for h in header]
    for name in names:
        if name in low:
            return low.index(name)
    raise DataError(f"missing column: expected one of {', '.join(names)}")


def parse_timestamp(text: str) -> datetime:
    """ISO 8601 timestamp as an aware UTC datetime (naive values are taken as UTC)."""
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    ts = datetime.fromisoformat(s)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def read_raw(src: PathOrFile) -> Dict[str, List[Tuple[datetime, float]]]:
    """Readings grouped by drifter id; missing temperatures become NaN."""
    fh, close = _open_read(src)
    try:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty drifter file") from None
        ci, ct, cv = _find(header, ID_COLUMNS), _find(header, TIME_COLUMNS), _find(header, TEMP_COLUMNS)
        out: Dict[str, List[Tuple[datetime, float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not any(c.strip() for c in row):
                continue
            try:
                ts = parse_timestamp(row[ct])
                cell = row[cv].strip()
                temp = np.nan if cell in ("", "NA", "NaN", "nan") else float(cell)
            except (ValueError, IndexError):
                raise DataError(f"row {lineno}: cannot parse drifter reading") from None
            out.setdefault(row[ci].strip(), []).append((ts, temp))
        return out
    finally:
        if close:
            fh.close()


def daily_medians(readings: List[Tuple[datetime, float]], year: int) -> np.ndarray:
    """Median per calendar day of ``year`` (366 entries in leap years), NaN if no reading."""
    ndays = 366 if calendar.isleap(year) else 365
    buckets: List[List[float]] = [[] for _ in range(ndays)]
    start = date(year, 1, 1).toordinal()
    for ts, temp in readings:
        if ts.year == year and np.isfinite(temp):
            buckets[ts.date().toordinal() - start].append(temp)
    return np.array([np.median(b) if b else np.nan for b in buckets])


def fold_leap_day(days: np.ndarray) -> np.ndarray:
    """Drop February 29 (index 59), averaging it into February 28 and March 1."""
    if days.size == 365:
        return days.copy()
    out = np.delete(days, 59)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN pairs stay NaN
        out[58] = np.nanmean(days[58:60])
        out[59] = np.nanmean(days[59:61])
    return out


def prep_drifter(src: PathOrFile, year: int, mode: str = "full",
                 ids: Optional[List[str]] = None) -> FunctionalSample:
    """Daily temperature curves on ``linspace(0, 1, 365)``, one per drifter.

    ``mode="full"`` drops drifters missing any whole calendar day (judged on
    the daily medians before the leap-day fold); ``mode="masked"`` keeps them
    with the missing days masked.  Drifters without any reading in ``year`` are
    skipped.  If ``ids`` is given it receives the ids of the kept curves.
    """
    if mode not in ("full", "masked"):
        raise ValueError("mode must be 'full' or 'masked'")
    raw = read_raw(src)
    curves, masks, kept = [], [], []
    for did in sorted(raw):
        days = daily_medians(raw[did], year)
        if np.all(np.isnan(days)):
            continue
        if mode == "full" and np.any(np.isnan(days)):
            continue
        folded = fold_leap_day(days)
        obs = ~np.isnan(folded)
        curves.append(np.where(obs, folded, 0.0))
        masks.append(obs)
        kept.append(did)
    if not curves:
        raise DataError(f"no drifter curves left for {year} in {mode} mode")
    if ids is not None:
        ids.extend(kept)
    return FunctionalSample(Grid(np.linspace(0.0, 1.0, DAYS)), np.array(curves), np.array(masks))
