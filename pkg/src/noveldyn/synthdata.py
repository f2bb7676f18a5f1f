"""Deterministic synthetic corpus for end-to-end runs and tests.

``build_fixture`` writes a complete miniature input set under one
directory: a posts file, a matching embedding file, two keyword
transcript files, an externally sourced series with late coverage, and
a run config wired to all of them. One configured transcript file is
deliberately left unwritten so skip paths can be exercised.

The generated world has a known structure: day-level content drifts
along a fixed direction in embedding space in proportion to a latent
attention signal, and the keyword hit counts track the same signal, so
the measured novelty series genuinely responds to the primary exposure.
Day 30 carries a large spike, making it the top novelty day.
"""

from __future__ import annotations

import json
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .embfile import corpus_content_hash, write_embeddings

DEFAULT_DAYS = 40
SPIKE_DAY = 30
ZERO_POST_DAY = 5
LOW_SAMPLE_DAY = 12
ZERO_WORDS_DAY = 20
EXTERNAL_START_DAY = 15
EMBED_DIM = 16
FIRST_DAY = date(2025, 1, 1)

_CONFIG_TEMPLATE = """\
timezone: America/New_York
inauguration_date: 2025-01-20
output_dir: out
seed: {seed}
paths:
  posts: posts.jsonl
  embeddings: embeddings.bin
  transcripts:
    topic: t_topic.csv
    other: t_other.csv
    missing: t_missing.csv
  external:
    trends: trends.csv
novelty:
  metric: energy
  window_days: 7
  min_day_posts: 3
  min_ref_posts: 10
exposures:
  topic_density: {{transcript: topic, measure: density}}
  topic_mentions: {{transcript: topic, measure: mentions}}
  other_density: {{transcript: other, measure: density}}
  missing_density: {{transcript: missing, measure: density}}
  trends: {{external: trends}}
  combo: {{mean_of: [topic_density, trends]}}
primary_exposure: topic_density
falsification: [other_density, missing_density]
specs:
  - {{p: 2, q: 1, hac_bandwidth: 3}}
  - {{p: 2, q: 3, hac_bandwidth: 3}}
leads_spec: {{p: 2, q: 2, lead_order: 2, hac_bandwidth: 3}}
irf: {{h_min: -3, h_max: 5}}
lp_windows: [[-2, -1], [0, 2], [0, 4]]
"""


def _latent_signal(rng: np.random.Generator, days: int) -> np.ndarray:
    s = np.zeros(days)
    for t in range(1, days):
        s[t] = 0.5 * s[t - 1] + rng.normal(0.0, 1.0)
    if days > SPIKE_DAY:
        s[SPIKE_DAY] += 7.0
    return s


def _post_counts(rng: np.random.Generator, days: int) -> np.ndarray:
    counts = rng.integers(6, 13, size=days)
    counts[0] = 12
    if days > ZERO_POST_DAY:
        counts[ZERO_POST_DAY] = 0
    if days > LOW_SAMPLE_DAY:
        counts[LOW_SAMPLE_DAY] = 2
    return counts


def _write_posts(root: Path, rng, counts, signal) -> tuple[int, str]:
    """Posts in chronological file order plus the embedding file keyed to
    them; returns (n_posts, corpus_hash)."""
    direction = rng.normal(size=EMBED_DIM)
    direction /= np.linalg.norm(direction)
    spread = np.linspace(1.0, 0.25, EMBED_DIM)
    records = []
    vectors = []
    for t, n in enumerate(counts):
        day = FIRST_DAY + timedelta(days=t)
        for j in range(int(n)):
            hour = int(rng.integers(12, 23))     # 07:00-17:00 eastern
            minute = int(rng.integers(0, 60))
            pid = f"p{t:03d}{j:02d}"
            text = f"note {t}-{j} theme {int(rng.integers(0, 5))}"
            ts = f"{day.isoformat()}T{hour:02d}:{minute:02d}:00Z"
            records.append({"id": pid, "created_at": ts, "content": text})
            vectors.append(0.6 * signal[t] * direction + rng.normal(size=EMBED_DIM) * spread)
    with open(root / "posts.jsonl", "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    chash = corpus_content_hash((r["id"], r["content"]) for r in records)
    write_embeddings(
        root / "embeddings.bin", np.array(vectors), chash, model_id="synthetic-v1"
    )
    return len(records), chash


def _write_transcript(path: Path, rng, days: int, hits: np.ndarray, zero_day: int | None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,hits,words,shows,shows_with_hits\n")
        for t in range(days):
            day = FIRST_DAY + timedelta(days=t)
            if zero_day is not None and t == zero_day:
                fh.write(f"{day.isoformat()},0,0,0,0\n")
                continue
            words = int(rng.integers(15000, 25001))
            shows = int(rng.integers(10, 17))
            swh = int(rng.integers(0, shows + 1))
            fh.write(f"{day.isoformat()},{int(hits[t])},{words},{shows},{swh}\n")


def _write_external(path: Path, rng, days: int, signal: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,value\n")
        for t in range(EXTERNAL_START_DAY, days):
            day = FIRST_DAY + timedelta(days=t)
            value = 50.0 + 30.0 * signal[t] + rng.normal(0.0, 3.0)
            fh.write(f"{day.isoformat()},{value:.3f}\n")


def build_fixture(root, seed: int = 0, days: int = DEFAULT_DAYS) -> Path:
    """Write the full synthetic input set under ``root``; returns the path
    of the generated config file. ``t_missing.csv`` is referenced by the
    config but never written."""
    if days < 35:
        raise ValueError("fixture needs at least 35 days for the spec grid")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    signal = _latent_signal(rng, days)
    counts = _post_counts(rng, days)
    _write_posts(root, rng, counts, signal)
    topic_hits = rng.poisson(18.0 + 10.0 * np.clip(signal, 0.0, None))
    _write_transcript(root / "t_topic.csv", rng, days, topic_hits, ZERO_WORDS_DAY)
    other_hits = rng.poisson(12.0, size=days)
    _write_transcript(root / "t_other.csv", rng, days, other_hits, None)
    _write_external(root / "trends.csv", rng, days, signal)
    config_path = root / "config.yaml"
    config_path.write_text(_CONFIG_TEMPLATE.format(seed=seed), encoding="utf-8")
    return config_path
