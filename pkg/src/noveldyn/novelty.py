"""Daily distributional-novelty series with sample-size gating."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path

import numpy as np

from .distances import (
    DEFAULT_GAMMA_RULE,
    UNBIASED,
    energy_distance,
    mmd2,
)
from .ingest import DailyBucket, IngestError, zscore_full_sample
from .whitening import EmbeddingMatrix, STAGE_UNIT

GATE_OK = "ok"
GATE_LOW_SAMPLE = "low_sample"
GATE_ZERO_POST = "zero_post"

METRIC_ENERGY = "energy"
METRIC_MMD2 = "mmd2"
DEFAULT_WINDOWS = {METRIC_ENERGY: 7, METRIC_MMD2: 30}


class NoveltyError(ValueError):
    pass


@dataclass(frozen=True)
class NoveltyConfig:
    metric: str = METRIC_ENERGY
    window_days: int | None = None  # defaults per metric: energy 7, mmd2 30
    min_day_posts: int = 3
    min_ref_posts: int = 10
    within: str = UNBIASED
    gamma_rule: str = DEFAULT_GAMMA_RULE

    def __post_init__(self):
        if self.metric not in DEFAULT_WINDOWS:
            raise NoveltyError(f"unknown metric {self.metric!r}")
        if self.window_days is None:
            object.__setattr__(self, "window_days", DEFAULT_WINDOWS[self.metric])
        if self.window_days < 1:
            raise NoveltyError("window_days must be >= 1")
        if self.min_day_posts < 1 or self.min_ref_posts < 1:
            raise NoveltyError("gating thresholds must be >= 1")


@dataclass(frozen=True)
class NoveltySeries:
    dates: tuple[date, ...]
    values: np.ndarray          # N_t, NaN where gated
    z: np.ndarray | None        # N_tz, NaN where gated
    day_posts: np.ndarray       # int
    ref_posts: np.ndarray       # int
    gate_flags: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.dates)

    def ok_mask(self) -> np.ndarray:
        return np.array([g == GATE_OK for g in self.gate_flags])


def daily_novelty(
    buckets: list[DailyBucket],
    embeddings: EmbeddingMatrix,
    config: NoveltyConfig,
) -> NoveltySeries:
    """Per-day two-sample distance between day t and the trailing
    reference window of days t-W..t-1.

    A day is gated (value missing) if it has fewer than ``min_day_posts``
    posts or the trailing window contributes fewer than ``min_ref_posts``;
    the reference window itself includes every post regardless of gates.
    """
    if not buckets:
        raise NoveltyError("no buckets")
    if embeddings.stage != STAGE_UNIT:
        raise NoveltyError(
            f"embeddings must be unit-normalized (stage {embeddings.stage!r})"
        )
    max_row = max((max(b.embedding_rows) for b in buckets if b.embedding_rows), default=-1)
    if max_row >= embeddings.n_posts:
        raise NoveltyError("bucket rows exceed the embedding matrix")
    w = config.window_days
    n = len(buckets)
    values = np.full(n, np.nan)
    day_posts = np.zeros(n, dtype=int)
    ref_posts = np.zeros(n, dtype=int)
    flags: list[str] = []
    for t, bucket in enumerate(buckets):
        day_posts[t] = bucket.post_count
        ref_rows: list[int] = []
        for j in range(max(0, t - w), t):
            ref_rows.extend(buckets[j].embedding_rows)
        ref_posts[t] = len(ref_rows)
        if bucket.post_count == 0:
            flags.append(GATE_ZERO_POST)
            continue
        if bucket.post_count < config.min_day_posts or ref_posts[t] < config.min_ref_posts:
            flags.append(GATE_LOW_SAMPLE)
            continue
        a = embeddings.row_sample(bucket.embedding_rows)
        b = embeddings.row_sample(ref_rows)
        if config.metric == METRIC_ENERGY:
            values[t] = energy_distance(a, b, within=config.within)
        else:
            values[t] = mmd2(
                a, b, within=config.within, gamma_rule=config.gamma_rule
            )
        flags.append(GATE_OK)
    return NoveltySeries(
        dates=tuple(b.date for b in buckets),
        values=values,
        z=None,
        day_posts=day_posts,
        ref_posts=ref_posts,
        gate_flags=tuple(flags),
    )


def standardize_novelty(series: NoveltySeries) -> NoveltySeries:
    """z-score over gated-ok days only; gated days stay missing."""
    ok = series.ok_mask()
    if ok.sum() < 2:
        raise NoveltyError("need at least 2 gated-ok days to standardize")
    masked = np.where(ok, series.values, np.nan)
    try:
        z = zscore_full_sample(masked)
    except IngestError as exc:
        raise NoveltyError(str(exc)) from exc
    return replace(series, z=z)


def write_novelty_csv(series: NoveltySeries, path, provenance: str | None = None) -> None:
    """date, N_t, N_tz, day_posts, ref_posts, gate_flag; missing as empty."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if provenance:
            fh.write(f"# provenance={provenance}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", "N_t", "N_tz", "day_posts", "ref_posts", "gate_flag"])
        z = series.z if series.z is not None else np.full(len(series), np.nan)
        for i, day in enumerate(series.dates):
            writer.writerow([
                day.isoformat(),
                repr(float(series.values[i])) if np.isfinite(series.values[i]) else "",
                repr(float(z[i])) if np.isfinite(z[i]) else "",
                int(series.day_posts[i]),
                int(series.ref_posts[i]),
                series.gate_flags[i],
            ])


def read_novelty_csv(path) -> NoveltySeries:
    dates: list[date] = []
    values: list[float] = []
    zs: list[float] = []
    day_posts: list[int] = []
    ref_posts: list[int] = []
    flags: list[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    for row in rows[1:]:
        dates.append(date.fromisoformat(row[0]))
        values.append(float(row[1]) if row[1] else np.nan)
        zs.append(float(row[2]) if row[2] else np.nan)
        day_posts.append(int(row[3]))
        ref_posts.append(int(row[4]))
        flags.append(row[5])
    return NoveltySeries(
        dates=tuple(dates),
        values=np.array(values),
        z=np.array(zs),
        day_posts=np.array(day_posts, dtype=int),
        ref_posts=np.array(ref_posts, dtype=int),
        gate_flags=tuple(flags),
    )
