"""Loading posts, transcripts, and attention series; daily bucketing and controls.

Input formats (all dates ISO-8601):

* posts: one JSON record per line with ``id``, ``created_at`` (ISO-8601
  with offset), ``content``.
* transcripts: CSV with header ``date,hits,words,shows,shows_with_hits``,
  one file per keyword/outlet.
* external attention series: CSV ``date,value`` rows (header optional).
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np

log = logging.getLogger(__name__)

CALENDAR_COLUMNS = (
    "dow_mon", "dow_tue", "dow_wed", "dow_thu", "dow_fri", "dow_sat",
    "month_02", "month_03", "month_04", "month_05", "month_06", "month_07",
    "month_08", "month_09", "month_10", "month_11", "month_12",
    "post_inauguration",
)
INTENSITY_COLUMNS = ("post_count", "log1p_post_count")

DEFAULT_TIMEZONE = "America/New_York"
DEFAULT_INAUGURATION = date(2025, 1, 20)


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class PostRecord:
    id: str
    timestamp: datetime  # UTC
    text: str
    embedding_row: int | None = None  # row in the embedding file (file order)


@dataclass(frozen=True)
class DailyBucket:
    date: date
    post_count: int
    embedding_rows: tuple[int, ...]


@dataclass(frozen=True)
class TranscriptDay:
    date: date
    hits: int
    words: int
    shows: int
    shows_with_hits: int


@dataclass(frozen=True)
class ExposureSeries:
    """Daily attention measure; ``z`` is standardized over non-missing days."""

    name: str
    dates: tuple[date, ...]
    raw: np.ndarray
    z: np.ndarray | None = None

    @property
    def coverage_start(self) -> date:
        return self.dates[0]

    @property
    def coverage_end(self) -> date:
        return self.dates[-1]

    def aligned_z(self, index: tuple[date, ...]) -> np.ndarray:
        """z values on an analysis index; days outside coverage are NaN."""
        if self.z is None:
            raise IngestError(f"exposure {self.name!r} has not been standardized")
        lookup = {d: v for d, v in zip(self.dates, self.z)}
        return np.array([lookup.get(d, np.nan) for d in index], dtype=float)


@dataclass(frozen=True)
class ControlMatrix:
    dates: tuple[date, ...]
    columns: tuple[str, ...]
    values: np.ndarray  # len(dates) x len(columns)

    def select(self, names) -> "ControlMatrix":
        idx = []
        for name in names:
            if name not in self.columns:
                raise IngestError(f"unknown control column {name!r}")
            idx.append(self.columns.index(name))
        return ControlMatrix(self.dates, tuple(names), self.values[:, idx])


def _parse_timestamp(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        raise ValueError("timestamp lacks a UTC offset")
    return ts.astimezone(ZoneInfo("UTC"))


def resolve_timezone(tz_name: str) -> ZoneInfo:
    try:
        return ZoneInfo(tz_name)
    except Exception as exc:
        raise IngestError(f"unknown timezone {tz_name!r}") from exc


def load_posts(path, timezone: str = DEFAULT_TIMEZONE) -> list[PostRecord]:
    """Read a posts file. Records come back sorted by timestamp; the
    ``embedding_row`` of each record is its position in the file, which is
    the row-order contract of the embedding file."""
    resolve_timezone(timezone)
    posts: list[PostRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: malformed record: {exc}") from exc
            if not isinstance(rec, dict):
                raise IngestError(f"{path}:{lineno}: record is not an object")
            missing = [k for k in ("id", "created_at", "content") if k not in rec]
            if missing:
                raise IngestError(f"{path}:{lineno}: missing field(s) {missing}")
            post_id = str(rec["id"])
            if post_id in seen:
                raise IngestError(f"{path}:{lineno}: duplicate id {post_id!r}")
            seen.add(post_id)
            try:
                ts = _parse_timestamp(str(rec["created_at"]))
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: bad timestamp: {exc}") from exc
            posts.append(
                PostRecord(post_id, ts, str(rec["content"]), embedding_row=len(posts))
            )
    posts.sort(key=lambda p: p.timestamp)
    return posts


def bucket_daily(posts: list[PostRecord], timezone: str = DEFAULT_TIMEZONE) -> list[DailyBucket]:
    """Group posts into local-time calendar days; the bucket sequence spans
    min to max date with zero-post days represented explicitly."""
    if not posts:
        raise IngestError("no posts")
    tz = resolve_timezone(timezone)
    by_day: dict[date, list[int]] = {}
    for post in posts:
        day = post.timestamp.astimezone(tz).date()
        by_day.setdefault(day, []).append(post.embedding_row)
    first, last = min(by_day), max(by_day)
    buckets = []
    day = first
    while day <= last:
        rows = by_day.get(day, [])
        if any(r is None for r in rows):
            raise IngestError(f"{day}: posts lack embedding rows")
        buckets.append(DailyBucket(day, len(rows), tuple(rows)))
        day += timedelta(days=1)
    return buckets


def load_transcript_days(path) -> list[TranscriptDay]:
    days: list[TranscriptDay] = []
    seen: set[date] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"date", "hits", "words", "shows", "shows_with_hits"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise IngestError(f"{path}: expected columns {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                day = date.fromisoformat(row["date"])
                hits = int(row["hits"])
                words = int(row["words"])
                shows = int(row["shows"])
                shows_with_hits = int(row["shows_with_hits"])
            except (ValueError, TypeError) as exc:
                raise IngestError(f"{path}:{lineno}: bad row: {exc}") from exc
            if min(hits, words, shows, shows_with_hits) < 0:
                raise IngestError(f"{path}:{lineno}: negative count")
            if shows_with_hits > shows:
                raise IngestError(f"{path}:{lineno}: shows_with_hits > shows")
            if words == 0 and hits != 0:
                raise IngestError(f"{path}:{lineno}: hits without words")
            if day in seen:
                raise IngestError(f"{path}:{lineno}: duplicate date {day}")
            seen.add(day)
            days.append(TranscriptDay(day, hits, words, shows, shows_with_hits))
    days.sort(key=lambda d: d.date)
    return days


def transcript_density(days: list[TranscriptDay], name: str = "density") -> ExposureSeries:
    """Keyword density per 1,000 transcript words; zero-word days get
    density 0 (with a warning) so the daily index stays contiguous."""
    if not days:
        raise IngestError("no transcript days")
    dates = tuple(d.date for d in days)
    raw = np.empty(len(days))
    for i, d in enumerate(days):
        if d.hits < 0 or d.words < 0:
            raise IngestError(f"{d.date}: negative hits or words")
        if d.words == 0:
            log.warning("%s: zero transcript words on %s; density set to 0", name, d.date)
            raw[i] = 0.0
        else:
            raw[i] = 1000.0 * d.hits / d.words
    return ExposureSeries(name, dates, raw)


def transcript_mentions(days: list[TranscriptDay], name: str = "mentions") -> ExposureSeries:
    """Raw daily keyword hit counts as an exposure measure."""
    if not days:
        raise IngestError("no transcript days")
    dates = tuple(d.date for d in days)
    raw = np.array([float(d.hits) for d in days])
    return ExposureSeries(name, dates, raw)


def zscore_full_sample(values) -> np.ndarray:
    """Standardize to mean 0, sample (n-1) sd 1 over non-missing entries;
    missing entries stay missing."""
    values = np.asarray(values, dtype=float)
    mask = np.isfinite(values)
    if mask.sum() < 2:
        raise IngestError("need at least 2 non-missing values to standardize")
    mean = values[mask].mean()
    sd = values[mask].std(ddof=1)
    if sd == 0.0 or not math.isfinite(sd):
        raise IngestError("degenerate series: zero variance")
    out = np.full(values.shape, np.nan)
    out[mask] = (values[mask] - mean) / sd
    return out


def standardize_exposure(series: ExposureSeries) -> ExposureSeries:
    return replace(series, z=zscore_full_sample(series.raw))


def load_external_series(path, name: str) -> ExposureSeries:
    """Read a (date, value) file; the series keeps its own coverage window."""
    dates: list[date] = []
    values: list[float] = []
    seen: set[date] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if lineno == 1 and row[0].strip().lower() in ("date", "day"):
                continue
            if len(row) < 2:
                raise IngestError(f"{path}:{lineno}: expected date,value")
            try:
                day = date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: bad date: {exc}") from exc
            try:
                value = float(row[1])
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: non-numeric value") from exc
            if day in seen:
                raise IngestError(f"{path}:{lineno}: duplicate date {day}")
            seen.add(day)
            dates.append(day)
            values.append(value)
    if not dates:
        raise IngestError(f"{path}: empty series")
    order = np.argsort(np.array([d.toordinal() for d in dates]))
    return ExposureSeries(
        name,
        tuple(dates[i] for i in order),
        np.array([values[i] for i in order]),
    )


def combine_mean(series_list: list[ExposureSeries], name: str) -> ExposureSeries:
    """Average of the component z-scores on their common date span (itself
    re-standardized downstream like any other exposure)."""
    if not series_list:
        raise IngestError("no series to combine")
    all_dates = sorted({d for s in series_list for d in s.dates})
    stacked = np.vstack([s.aligned_z(tuple(all_dates)) for s in series_list])
    raw = stacked.mean(axis=0)
    keep = np.isfinite(raw)
    return ExposureSeries(
        name,
        tuple(d for d, k in zip(all_dates, keep) if k),
        raw[keep],
    )


def calendar_controls(
    dates,
    inauguration_date: date = DEFAULT_INAUGURATION,
    post_counts=None,
) -> ControlMatrix:
    """Day-of-week (Sunday omitted) and month (January omitted) dummies, a
    post-inauguration indicator (inclusive of the day itself), and, when
    post counts are given, the posting-intensity columns."""
    dates = tuple(dates)
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days != 1:
            raise IngestError(f"dates not a contiguous daily index at {cur}")
    columns = list(CALENDAR_COLUMNS)
    n = len(dates)
    values = np.zeros((n, len(columns)))
    for i, day in enumerate(dates):
        wd = day.weekday()  # Monday=0 .. Sunday=6
        if wd != 6:
            values[i, wd] = 1.0
        if day.month != 1:
            values[i, 6 + day.month - 2] = 1.0
        values[i, 17] = 1.0 if day >= inauguration_date else 0.0
    if post_counts is not None:
        counts = np.asarray(post_counts, dtype=float)
        if counts.shape != (n,):
            raise IngestError("post_counts length does not match dates")
        values = np.column_stack([values, counts, np.log1p(counts)])
        columns += list(INTENSITY_COLUMNS)
    return ControlMatrix(dates, tuple(columns), values)
