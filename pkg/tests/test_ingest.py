"""Posts/transcripts/exposure ingestion and calendar-control construction."""

import json
import logging
import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noveldyn.ingest import (
    CALENDAR_COLUMNS,
    INTENSITY_COLUMNS,
    ExposureSeries,
    IngestError,
    TranscriptDay,
    bucket_daily,
    calendar_controls,
    combine_mean,
    load_external_series,
    load_posts,
    load_transcript_days,
    standardize_exposure,
    transcript_density,
    transcript_mentions,
    zscore_full_sample,
)


def write_posts(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


# ---------------------------------------------------------------------------
# posts and daily buckets
# ---------------------------------------------------------------------------


def test_load_posts_sorted_with_file_order_rows(tmp_path):
    p = tmp_path / "posts.jsonl"
    write_posts(
        p,
        [
            {"id": "b", "created_at": "2025-03-02T10:00:00Z", "content": "later"},
            {"id": "a", "created_at": "2025-03-01T10:00:00+00:00", "content": "earlier"},
        ],
    )
    posts = load_posts(p)
    assert [x.id for x in posts] == ["a", "b"]
    # embedding_row stays tied to file position, not sort position
    assert [x.embedding_row for x in posts] == [1, 0]
    assert posts[0].timestamp.utcoffset().total_seconds() == 0


def test_load_posts_duplicate_id(tmp_path):
    p = tmp_path / "posts.jsonl"
    write_posts(
        p,
        [
            {"id": "a", "created_at": "2025-03-01T10:00:00Z", "content": "x"},
            {"id": "a", "created_at": "2025-03-02T10:00:00Z", "content": "y"},
        ],
    )
    with pytest.raises(IngestError, match=r"posts\.jsonl:2: duplicate id 'a'"):
        load_posts(p)


def test_load_posts_malformed_json(tmp_path):
    p = tmp_path / "posts.jsonl"
    p.write_text('{"id": "a"\n', encoding="utf-8")
    with pytest.raises(IngestError, match=r":1: malformed record"):
        load_posts(p)


def test_load_posts_missing_field(tmp_path):
    p = tmp_path / "posts.jsonl"
    write_posts(p, [{"id": "a", "content": "x"}])
    with pytest.raises(IngestError, match="missing field"):
        load_posts(p)


def test_load_posts_naive_timestamp_rejected(tmp_path):
    p = tmp_path / "posts.jsonl"
    write_posts(p, [{"id": "a", "created_at": "2025-03-01T10:00:00", "content": "x"}])
    with pytest.raises(IngestError, match="bad timestamp"):
        load_posts(p)


def test_bucket_daily_local_midnight_boundary(tmp_path):
    # 03:30 UTC is 22:30 the previous evening in New York (EST)
    p = tmp_path / "posts.jsonl"
    write_posts(
        p,
        [
            {"id": "a", "created_at": "2025-02-10T03:30:00Z", "content": "evening"},
            {"id": "b", "created_at": "2025-02-10T15:00:00Z", "content": "midday"},
        ],
    )
    posts = load_posts(p)
    buckets = bucket_daily(posts)
    assert [b.date for b in buckets] == [date(2025, 2, 9), date(2025, 2, 10)]
    assert [b.post_count for b in buckets] == [1, 1]
    assert buckets[0].embedding_rows == (0,)


def test_bucket_daily_zero_post_gap(tmp_path):
    p = tmp_path / "posts.jsonl"
    write_posts(
        p,
        [
            {"id": "a", "created_at": "2025-06-01T12:00:00Z", "content": "x"},
            {"id": "b", "created_at": "2025-06-04T12:00:00Z", "content": "y"},
            {"id": "c", "created_at": "2025-06-04T13:00:00Z", "content": "z"},
        ],
    )
    buckets = bucket_daily(load_posts(p), timezone="UTC")
    assert [b.date for b in buckets] == [
        date(2025, 6, 1), date(2025, 6, 2), date(2025, 6, 3), date(2025, 6, 4)
    ]
    assert [b.post_count for b in buckets] == [1, 0, 0, 2]
    assert buckets[3].embedding_rows == (1, 2)


def test_bucket_daily_empty():
    with pytest.raises(IngestError, match="no posts"):
        bucket_daily([])


def test_unknown_timezone(tmp_path):
    p = tmp_path / "posts.jsonl"
    write_posts(p, [{"id": "a", "created_at": "2025-06-01T12:00:00Z", "content": "x"}])
    with pytest.raises(IngestError, match="unknown timezone"):
        load_posts(p, timezone="Mars/Olympus")


# ---------------------------------------------------------------------------
# transcripts and exposure series
# ---------------------------------------------------------------------------


def write_transcript(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,hits,words,shows,shows_with_hits\n")
        for r in rows:
            fh.write(",".join(str(v) for v in r) + "\n")


def test_load_transcript_days(tmp_path):
    p = tmp_path / "t.csv"
    write_transcript(p, [("2025-01-02", 4, 8000, 3, 2), ("2025-01-01", 0, 7500, 3, 0)])
    days = load_transcript_days(p)
    assert [d.date for d in days] == [date(2025, 1, 1), date(2025, 1, 2)]
    assert days[1] == TranscriptDay(date(2025, 1, 2), 4, 8000, 3, 2)


def test_transcript_invariants(tmp_path):
    p = tmp_path / "t.csv"
    write_transcript(p, [("2025-01-01", 4, 8000, 2, 3)])
    with pytest.raises(IngestError, match="shows_with_hits > shows"):
        load_transcript_days(p)
    write_transcript(p, [("2025-01-01", 4, 0, 2, 1)])
    with pytest.raises(IngestError, match="hits without words"):
        load_transcript_days(p)
    write_transcript(p, [("2025-01-01", -1, 10, 2, 1)])
    with pytest.raises(IngestError, match="negative count"):
        load_transcript_days(p)


def test_transcript_missing_column(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("date,hits\n2025-01-01,3\n", encoding="utf-8")
    with pytest.raises(IngestError, match="expected columns"):
        load_transcript_days(p)


def test_density_per_thousand_words():
    days = [
        TranscriptDay(date(2025, 1, 1), 5, 10000, 3, 2),
        TranscriptDay(date(2025, 1, 2), 0, 8000, 3, 0),
    ]
    s = transcript_density(days, "kw")
    assert s.name == "kw"
    np.testing.assert_allclose(s.raw, [0.5, 0.0])


def test_density_zero_words_warns(caplog):
    days = [
        TranscriptDay(date(2025, 1, 1), 0, 0, 0, 0),
        TranscriptDay(date(2025, 1, 2), 3, 6000, 3, 1),
    ]
    with caplog.at_level(logging.WARNING):
        s = transcript_density(days)
    assert s.raw[0] == 0.0
    assert "zero transcript words" in caplog.text


def test_mentions_series():
    days = [TranscriptDay(date(2025, 1, 1), 7, 100, 1, 1)]
    assert transcript_mentions(days).raw.tolist() == [7.0]


def test_zscore_ddof1_and_nan_passthrough():
    z = zscore_full_sample([1.0, np.nan, 2.0, 3.0])
    assert math.isnan(z[1])
    np.testing.assert_allclose(z[[0, 2, 3]], [-1.0, 0.0, 1.0])
    got = z[np.isfinite(z)]
    assert got.mean() == pytest.approx(0.0, abs=1e-15)
    assert got.std(ddof=1) == pytest.approx(1.0, abs=1e-15)


def test_zscore_degenerate():
    with pytest.raises(IngestError, match="zero variance"):
        zscore_full_sample([2.0, 2.0, 2.0])
    with pytest.raises(IngestError, match="at least 2 non-missing"):
        zscore_full_sample([1.0, np.nan])


def test_standardize_exposure_alignment():
    s = ExposureSeries(
        "x",
        (date(2025, 1, 2), date(2025, 1, 3)),
        np.array([1.0, 3.0]),
    )
    s = standardize_exposure(s)
    index = (date(2025, 1, 1), date(2025, 1, 2), date(2025, 1, 3), date(2025, 1, 4))
    aligned = s.aligned_z(index)
    assert math.isnan(aligned[0]) and math.isnan(aligned[3])
    np.testing.assert_allclose(aligned[1:3], [-math.sqrt(0.5), math.sqrt(0.5)])


def test_aligned_z_requires_standardization():
    s = ExposureSeries("x", (date(2025, 1, 2),), np.array([1.0]))
    with pytest.raises(IngestError, match="not been standardized"):
        s.aligned_z((date(2025, 1, 2),))


def test_load_external_series(tmp_path):
    p = tmp_path / "ext.csv"
    p.write_text("date,value\n2025-02-02,3.5\n2025-02-01,1.25\n", encoding="utf-8")
    s = load_external_series(p, "ext")
    assert s.dates == (date(2025, 2, 1), date(2025, 2, 2))
    np.testing.assert_array_equal(s.raw, [1.25, 3.5])
    assert (s.coverage_start, s.coverage_end) == (date(2025, 2, 1), date(2025, 2, 2))


def test_load_external_series_no_header(tmp_path):
    p = tmp_path / "ext.csv"
    p.write_text("2025-02-01,1.0\n2025-02-02,2.0\n", encoding="utf-8")
    assert len(load_external_series(p, "ext").dates) == 2


def test_load_external_series_duplicate_date(tmp_path):
    p = tmp_path / "ext.csv"
    p.write_text("2025-02-01,1.0\n2025-02-01,2.0\n", encoding="utf-8")
    with pytest.raises(IngestError, match="duplicate date"):
        load_external_series(p, "ext")


def test_combine_mean_union_coverage():
    a = standardize_exposure(
        ExposureSeries(
            "a",
            (date(2025, 1, 1), date(2025, 1, 2), date(2025, 1, 3)),
            np.array([1.0, 2.0, 3.0]),
        )
    )
    b = standardize_exposure(
        ExposureSeries(
            "b",
            (date(2025, 1, 2), date(2025, 1, 3), date(2025, 1, 4)),
            np.array([5.0, 9.0, 7.0]),
        )
    )
    c = combine_mean([a, b], "cable")
    # only days covered by every component survive the mean
    assert c.dates == (date(2025, 1, 2), date(2025, 1, 3))
    # a: z = [-1, 0, 1]; b: z = [-1, 1, 0]; mean on the overlap days
    np.testing.assert_allclose(c.raw, [(0.0 + -1.0) / 2, (1.0 + 1.0) / 2])


# ---------------------------------------------------------------------------
# calendar controls
# ---------------------------------------------------------------------------


def days_range(start, n):
    from datetime import timedelta

    return tuple(start + timedelta(days=i) for i in range(n))


def test_calendar_columns_layout():
    dates = days_range(date(2025, 1, 18), 4)  # Sat, Sun, Mon(inauguration), Tue
    cm = calendar_controls(dates)
    assert cm.columns == CALENDAR_COLUMNS
    by = {name: cm.values[:, i] for i, name in enumerate(cm.columns)}
    np.testing.assert_array_equal(by["dow_sat"], [1, 0, 0, 0])
    np.testing.assert_array_equal(by["dow_mon"], [0, 0, 1, 0])
    np.testing.assert_array_equal(by["dow_tue"], [0, 0, 0, 1])
    # Sunday is the omitted category: its row is all-zero across dow cols
    sunday_row = cm.values[1, :6]
    np.testing.assert_array_equal(sunday_row, np.zeros(6))
    # January is the omitted month
    np.testing.assert_array_equal(cm.values[:, 6:17], np.zeros((4, 11)))
    np.testing.assert_array_equal(by["post_inauguration"], [0, 0, 1, 1])


def test_calendar_month_dummies():
    dates = days_range(date(2025, 2, 27), 3)  # Feb 27, Feb 28, Mar 1
    cm = calendar_controls(dates)
    by = {name: cm.values[:, i] for i, name in enumerate(cm.columns)}
    np.testing.assert_array_equal(by["month_02"], [1, 1, 0])
    np.testing.assert_array_equal(by["month_03"], [0, 0, 1])


def test_calendar_intensity_columns():
    dates = days_range(date(2025, 5, 1), 3)
    cm = calendar_controls(dates, post_counts=[0, 4, 10])
    assert cm.columns == CALENDAR_COLUMNS + INTENSITY_COLUMNS
    np.testing.assert_array_equal(cm.values[:, 18], [0, 4, 10])
    np.testing.assert_allclose(cm.values[:, 19], np.log1p([0, 4, 10]))


def test_calendar_requires_contiguous_dates():
    dates = (date(2025, 5, 1), date(2025, 5, 3))
    with pytest.raises(IngestError, match="contiguous"):
        calendar_controls(dates)


def test_control_matrix_select():
    dates = days_range(date(2025, 5, 1), 2)
    cm = calendar_controls(dates)
    sub = cm.select(["post_inauguration", "dow_fri"])
    assert sub.columns == ("post_inauguration", "dow_fri")
    np.testing.assert_array_equal(sub.values[:, 0], [1, 1])
    with pytest.raises(IngestError, match="unknown control column"):
        cm.select(["nope"])


@settings(max_examples=60, deadline=None)
@given(st.dates(date(2024, 1, 1), date(2026, 6, 1)), st.integers(2, 90))
def test_calendar_dummy_invariants(start, n):
    dates = days_range(start, n)
    cm = calendar_controls(dates)
    dow = cm.values[:, :6]
    month = cm.values[:, 6:17]
    # at most one dummy fires per group; zero row exactly on the omitted level
    assert set(np.unique(dow)) <= {0.0, 1.0}
    for i, day in enumerate(dates):
        assert dow[i].sum() == (0 if day.weekday() == 6 else 1)
        assert month[i].sum() == (0 if day.month == 1 else 1)
    # post_inauguration is monotone nondecreasing over a contiguous index
    flags = cm.values[:, 17]
    assert np.all(np.diff(flags) >= 0)
