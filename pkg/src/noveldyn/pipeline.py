"""Config-driven orchestration: ingest, whiten, novelty, regressions, and
table/plot-data emission.

Every stage writes its files to a temporary directory first and moves them
into place only on success, so a failed stage leaves nothing behind. Each
output carries a provenance hash binding it to the content of the exact
inputs that stage read, the analysis constants, and the package version.
File bodies contain no timestamps: identical config and inputs give
byte-identical outputs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import shutil
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, validate_paths
from .embfile import corpus_content_hash, read_embeddings
from .ingest import (
    ExposureSeries,
    IngestError,
    bucket_daily,
    calendar_controls,
    combine_mean,
    load_external_series,
    load_posts,
    load_transcript_days,
    standardize_exposure,
    transcript_density,
    transcript_mentions,
)
from .lp import cumulative_lp, irf, joint_pretrend_wald
from .novelty import daily_novelty, standardize_novelty, write_novelty_csv
from .regression import RegressionSpec, ardl
from .stationarity import StationarityError, stationarity_report
from .whitening import apply_whitener, fit_whitener, unit_normalize

log = logging.getLogger(__name__)

Z95 = 1.959963984540054  # standard normal 97.5% quantile


class PipelineError(RuntimeError):
    pass


@dataclass
class ResultBundle:
    output_dir: Path
    provenance: dict = field(default_factory=dict)  # stage -> hash
    files: dict = field(default_factory=dict)       # stage -> [paths]

    def record(self, stage: str, prov: str, paths) -> None:
        self.provenance[stage] = prov
        self.files.setdefault(stage, []).extend(Path(p) for p in paths)


# ---------------------------------------------------------------------------
# staged output writing
# ---------------------------------------------------------------------------


class _Stage:
    """Collects a stage's output files in a temp dir; on success they move
    into the output directory, on failure the partial files are removed."""

    def __init__(self, name: str, output_dir: Path):
        self.name = name
        self.output_dir = Path(output_dir)
        self._targets: list[str] = []
        self._tmp: Path | None = None

    def __enter__(self):
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._tmp = Path(tempfile.mkdtemp(prefix=f".{self.name}-", dir=self.output_dir))
        return self

    def path(self, relpath: str) -> Path:
        target = self._tmp / relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        self._targets.append(relpath)
        return target

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            for rel in self._targets:
                final = self.output_dir / rel
                final.parent.mkdir(parents=True, exist_ok=True)
                shutil.move(str(self._tmp / rel), str(final))
            shutil.rmtree(self._tmp, ignore_errors=True)
            return False
        shutil.rmtree(self._tmp, ignore_errors=True)
        if isinstance(exc, PipelineError):
            return False
        raise PipelineError(f"[{self.name}] {exc}") from exc

    def finals(self) -> list[Path]:
        return [self.output_dir / rel for rel in self._targets]


# ---------------------------------------------------------------------------
# provenance
# ---------------------------------------------------------------------------


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _config_echo(config: RunConfig) -> dict:
    """Analysis constants only; paths are covered by input content hashes
    so the hash does not depend on filesystem layout."""
    return {
        "timezone": config.timezone,
        "inauguration_date": config.inauguration_date.isoformat(),
        "seed": config.seed,
        "novelty": asdict(config.novelty),
        "exposures": {
            name: {k: v for k, v in asdict(d).items() if k != "name" and v is not None}
            for name, d in sorted(config.exposures.items())
        },
        "primary_exposure": config.primary_exposure,
        "falsification": list(config.falsification),
        "specs": [asdict(s) for s in config.specs],
        "leads_spec": asdict(config.leads_spec),
        "irf_range": list(config.irf_range),
        "lp_windows": [list(w) for w in config.lp_windows],
        "version": __version__,
    }


def provenance_hash(config: RunConfig, input_paths) -> str:
    doc = {
        "inputs": {p.name: _sha256_file(p) for p in sorted(set(input_paths))},
        "config": _config_echo(config),
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return obj.name
    if isinstance(obj, date):
        return obj.isoformat()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _write_csv(path: Path, provenance: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# provenance={provenance}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value, digits=3) -> str:
    if value is None or (isinstance(value, float) and not np.isfinite(value)):
        return ""
    return f"{value:.{digits}f}"


def _fmt_p(p: float) -> str:
    # human tables truncate tiny p-values like the published layout
    if not np.isfinite(p):
        return ""
    return "<0.001" if p < 0.001 else f"{p:.3f}"


def _full(value) -> str:
    return repr(float(value)) if np.isfinite(value) else ""


# ---------------------------------------------------------------------------
# loading and derived series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisFrame:
    """Everything the regression stages consume: the daily index, the
    standardized novelty outcome, controls, and per-day post counts."""

    dates: tuple[date, ...]
    novelty_values: np.ndarray  # N_t, NaN where gated
    novelty_z: np.ndarray       # N_tz, NaN where gated
    day_posts: np.ndarray
    ref_posts: np.ndarray
    gate_flags: tuple[str, ...]
    controls: object            # ControlMatrix


def load_frame(config: RunConfig):
    """Posts -> buckets -> whitened unit embeddings -> standardized
    novelty + calendar controls. Returns (frame, novelty_series)."""
    posts = load_posts(config.posts_path, timezone=config.timezone)
    if not posts:
        raise IngestError(f"{config.posts_path}: no posts")
    header, vectors = read_embeddings(config.embeddings_path)
    by_row = sorted(posts, key=lambda p: p.embedding_row)
    expected = corpus_content_hash((p.id, p.text) for p in by_row)
    if header.corpus_hash != expected:
        raise IngestError(
            f"{config.embeddings_path}: corpus hash {header.corpus_hash[:12]}... "
            f"does not match the posts file ({expected[:12]}...)"
        )
    if header.count != len(posts):
        raise IngestError(
            f"{config.embeddings_path}: {header.count} vectors for {len(posts)} posts"
        )
    buckets = bucket_daily(posts, timezone=config.timezone)
    model = fit_whitener(vectors)
    unit = unit_normalize(apply_whitener(model, vectors).values)
    series = standardize_novelty(daily_novelty(buckets, unit, config.novelty))
    dates = series.dates
    controls = calendar_controls(
        dates,
        inauguration_date=config.inauguration_date,
        post_counts=series.day_posts,
    )
    frame = AnalysisFrame(
        dates=dates,
        novelty_values=series.values,
        novelty_z=series.z,
        day_posts=series.day_posts,
        ref_posts=series.ref_posts,
        gate_flags=series.gate_flags,
        controls=controls,
    )
    return frame, series


def build_exposure(config: RunConfig, name: str, cache: dict | None = None) -> ExposureSeries:
    """Resolve one configured exposure to a standardized daily series."""
    if cache is not None and name in cache:
        return cache[name]
    d = config.exposure_def(name)
    if d.kind() == "transcript":
        days = load_transcript_days(config.transcript_paths[d.transcript])
        builder = transcript_density if d.measure == "density" else transcript_mentions
        series = builder(days, name)
    elif d.kind() == "external":
        series = load_external_series(config.external_paths[d.external], name)
    else:
        components = [build_exposure(config, c, cache) for c in d.mean_of]
        series = combine_mean(components, name)
    series = standardize_exposure(series)
    if cache is not None:
        cache[name] = series
    return series


def _spec_inputs(config: RunConfig, exposure_names) -> list[Path]:
    """Input files a stage reads: posts + embeddings + exactly the
    transcript/external files behind the named exposures."""
    return validate_paths(config, exposure_names=exposure_names)


def main_spec(config: RunConfig) -> RegressionSpec:
    for spec in config.specs:
        if spec.q == 3 and spec.lead_order == 0 and not spec.include_trend:
            return spec
    return config.specs[0]


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def run_novelty(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    inputs = [config.posts_path, config.embeddings_path]
    missing = [str(p) for p in inputs if not p.is_file()]
    if missing:
        raise PipelineError("[novelty] missing input file(s): " + ", ".join(missing))
    prov = provenance_hash(config, inputs)
    with _Stage("novelty", config.output_dir) as stage:
        frame, series = load_frame(config)
        write_novelty_csv(series, stage.path("novelty.csv"), provenance=prov)
        flags = np.array(series.gate_flags)
        _write_json(
            stage.path("novelty_meta.json"),
            {
                "provenance": prov,
                "metric": config.novelty.metric,
                "window_days": config.novelty.window_days,
                "min_day_posts": config.novelty.min_day_posts,
                "min_ref_posts": config.novelty.min_ref_posts,
                "days_total": len(series),
                "days_ok": int(series.ok_mask().sum()),
                "days_zero_post": int((flags == "zero_post").sum()),
                "days_low_sample": int((flags == "low_sample").sum()),
                "posts_total": int(series.day_posts.sum()),
                "inputs": {p.name: _sha256_file(p) for p in inputs},
            },
        )
    bundle.record("novelty", prov, stage.finals())
    return bundle


def _exposure_on_frame(config, frame, name, cache):
    series = build_exposure(config, name, cache)
    return series, series.aligned_z(frame.dates)


def _spec_doc(label: str, fit, provenance: str) -> dict:
    result = fit.result
    cov = result.hac_cov
    lower = [[float(cov[i, j]) for j in range(i + 1)] for i in range(cov.shape[0])]
    doc = {
        "provenance": provenance,
        "spec": {
            "id": label,
            **asdict(fit.spec),
            "hac_small_sample_correction": "none",
        },
        "column_labels": list(result.column_labels),
        "coef": [float(c) for c in result.coef],
        "hac_cov_lower": lower,
        "n": result.n,
        "r2": result.r2,
        "beta_sum": asdict(fit.beta_sum),
    }
    if fit.delta_sum is not None:
        doc["delta_sum"] = asdict(fit.delta_sum)
    return doc


def _table_cells(spec_id: str, mapping: dict) -> list[dict]:
    return [
        {"spec": spec_id, "column": col, "value": value}
        for col, value in mapping.items()
    ]


def _fit_spec(frame, exposure_z, spec):
    return ardl(
        frame.novelty_z, exposure_z, frame.controls, spec, dates=frame.dates
    )


def run_main_table(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    """The spec-grid table (one row per q) plus the per-lag plot data for
    the q=3 specification."""
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    inputs = _spec_inputs(config, [config.primary_exposure])
    prov = provenance_hash(config, inputs)
    with _Stage("main-table", config.output_dir) as stage:
        frame, _ = load_frame(config)
        cache: dict = {}
        _, e = _exposure_on_frame(config, frame, config.primary_exposure, cache)
        rows = []
        sidecar_rows = []
        perlag_spec = main_spec(config)
        perlag_rows = []
        for spec in config.specs:
            fitted = _fit_spec(frame, e, spec)
            label = spec.label()
            _write_json(
                stage.path(f"specs/{label}.json"), _spec_doc(label, fitted, prov)
            )
            b = fitted.beta_sum
            rows.append([
                label, spec.q, _fmt(b.estimate), _fmt(b.se), _fmt(b.t, 2),
                _fmt_p(b.p), fitted.result.n, _fmt(fitted.result.r2),
            ])
            sidecar_rows.append({
                "spec": label,
                "cells": _table_cells(label, {
                    "q": spec.q,
                    "beta_sum": b.estimate,
                    "se": b.se,
                    "t": b.t,
                    "p": b.p,
                    "n": fitted.result.n,
                    "r2": fitted.result.r2,
                }),
            })
            if spec == perlag_spec:
                for j in range(spec.q + 1):
                    lbl = f"E_lag{j}"
                    coef = fitted.result.coef_by_label(lbl)
                    se = fitted.result.se_by_label(lbl)
                    perlag_rows.append([
                        j, _full(coef), _full(se),
                        _full(coef - Z95 * se), _full(coef + Z95 * se),
                    ])
        _write_csv(
            stage.path("main_table.csv"), prov,
            ["spec", "q", "beta_sum", "se", "t", "p", "n", "r2"], rows,
        )
        _write_json(
            stage.path("main_table.json"),
            {"provenance": prov, "table": "main", "rows": sidecar_rows},
        )
        _write_csv(
            stage.path("perlag.csv"), prov,
            ["lag", "coef", "se", "ci_lo", "ci_hi"], perlag_rows,
        )
    bundle.record("main-table", prov, stage.finals())
    return bundle


def run_leads(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    """The timing-placebo row: leads_spec with the delta-sum test."""
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    inputs = _spec_inputs(config, [config.primary_exposure])
    prov = provenance_hash(config, inputs)
    with _Stage("leads", config.output_dir) as stage:
        frame, _ = load_frame(config)
        _, e = _exposure_on_frame(config, frame, config.primary_exposure, {})
        spec = config.leads_spec
        fitted = _fit_spec(frame, e, spec)
        label = spec.label()
        _write_json(stage.path(f"specs/{label}.json"), _spec_doc(label, fitted, prov))
        b, d = fitted.beta_sum, fitted.delta_sum
        _write_csv(
            stage.path("leads.csv"), prov,
            ["spec", "beta_sum", "beta_p", "delta_sum", "delta_se", "delta_t",
             "delta_p", "n"],
            [[label, _fmt(b.estimate), _fmt_p(b.p), _fmt(d.estimate),
              _fmt(d.se), _fmt(d.t, 2), _fmt_p(d.p), fitted.result.n]],
        )
        _write_json(
            stage.path("leads.json"),
            {
                "provenance": prov,
                "table": "leads",
                "rows": [{
                    "spec": label,
                    "cells": _table_cells(label, {
                        "beta_sum": b.estimate, "beta_p": b.p,
                        "delta_sum": d.estimate, "delta_se": d.se,
                        "delta_t": d.t, "delta_p": d.p, "n": fitted.result.n,
                    }),
                }],
            },
        )
    bundle.record("leads", prov, stage.finals())
    return bundle


def run_irf(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    """Level and cumulative impulse responses with 95% pointwise HAC
    bands, the cumulative-window table, and the joint pre-trend test."""
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    inputs = _spec_inputs(config, [config.primary_exposure])
    prov = provenance_hash(config, inputs)
    spec = main_spec(config)
    p, H = spec.p, spec.hac_bandwidth
    with _Stage("irf", config.output_dir) as stage:
        frame, _ = load_frame(config)
        _, e = _exposure_on_frame(config, frame, config.primary_exposure, {})
        y, controls = frame.novelty_z, frame.controls
        h_min, h_max = config.irf_range
        level = irf(y, e, controls, h_min=h_min, h_max=h_max, p=p, H=H)
        _write_csv(
            stage.path("irf_level.csv"), prov,
            ["h", "theta", "se", "ci_lo", "ci_hi", "n"],
            [
                [h, _full(t), _full(s), _full(t - Z95 * s), _full(t + Z95 * s), n]
                for h, t, s, n in zip(level.horizons, level.theta, level.se, level.n)
            ],
        )
        cum_rows = []
        for h in range(0, h_max + 1):
            win = cumulative_lp(y, e, controls, 0, h, p=p, H=H)
            cum_rows.append([
                h, _full(win.estimate), _full(win.se),
                _full(win.estimate - Z95 * win.se),
                _full(win.estimate + Z95 * win.se), win.n,
            ])
        _write_csv(
            stage.path("irf_cumulative.csv"), prov,
            ["h", "estimate", "se", "ci_lo", "ci_hi", "n"], cum_rows,
        )
        window_rows = []
        window_cells = []
        for a, b in config.lp_windows:
            win = cumulative_lp(y, e, controls, a, b, p=p, H=H)
            wid = f"{a}–{b}"
            window_rows.append([
                wid, _fmt(win.estimate), _fmt(win.se), _fmt(win.t, 2),
                _fmt_p(win.p), win.n,
            ])
            window_cells.append({
                "spec": f"lp_window_{a}_{b}",
                "cells": _table_cells(f"lp_window_{a}_{b}", {
                    "window": wid, "estimate": win.estimate, "se": win.se,
                    "t": win.t, "p": win.p, "n": win.n,
                }),
            })
        _write_csv(
            stage.path("lp_windows.csv"), prov,
            ["window", "estimate", "se", "t", "p", "n"], window_rows,
        )
        _write_json(
            stage.path("lp_windows.json"),
            {"provenance": prov, "table": "lp_windows", "rows": window_cells},
        )
        wald = joint_pretrend_wald(y, e, controls, p=p, H=H)
        _write_json(
            stage.path("pretrend.json"),
            {
                "provenance": prov,
                "statistic": wald.statistic,
                "df": wald.df,
                "p": wald.p,
                "n": wald.n,
                "horizons": [-5, -4, -3, -2, -1],
            },
        )
    bundle.record("irf", prov, stage.finals())
    return bundle


def _split_available(config: RunConfig, names):
    """Partition exposures into those whose input files all exist and
    those to be skipped (absent keyword/series files)."""
    available, skipped = [], []
    for name in names:
        try:
            validate_paths(config, exposure_names=[name])
        except ConfigError:
            skipped.append(name)
        else:
            available.append(name)
    return available, skipped


def run_falsification(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    """beta_sum under each placebo exposure, same spec as the main model.
    A missing keyword file marks its row skipped; the run continues."""
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    if not config.falsification:
        raise PipelineError("[falsify] no falsification exposures configured")
    available, skipped = _split_available(config, config.falsification)
    inputs = _spec_inputs(config, available) if available else [
        config.posts_path, config.embeddings_path
    ]
    prov = provenance_hash(config, inputs)
    spec = main_spec(config)
    with _Stage("falsify", config.output_dir) as stage:
        frame, _ = load_frame(config)
        cache: dict = {}
        rows = []
        cells = []
        for name in config.falsification:
            if name in skipped:
                log.warning("falsification exposure %s: input file missing; skipped", name)
                rows.append([name, "", "", "", "", "", "skipped"])
                cells.append({
                    "spec": f"falsify_{name}",
                    "cells": _table_cells(f"falsify_{name}", {"status": "skipped"}),
                })
                continue
            _, e = _exposure_on_frame(config, frame, name, cache)
            fitted = _fit_spec(frame, e, spec)
            b = fitted.beta_sum
            rows.append([
                name, _fmt(b.estimate), _fmt(b.se), _fmt(b.t, 2), _fmt_p(b.p),
                fitted.result.n, "ok",
            ])
            cells.append({
                "spec": f"falsify_{name}",
                "cells": _table_cells(f"falsify_{name}", {
                    "exposure": name, "beta_sum": b.estimate, "se": b.se,
                    "t": b.t, "p": b.p, "n": fitted.result.n, "status": "ok",
                }),
            })
        _write_csv(
            stage.path("falsification.csv"), prov,
            ["exposure", "beta_sum", "se", "t", "p", "n", "status"], rows,
        )
        _write_json(
            stage.path("falsification.json"),
            {"provenance": prov, "table": "falsification", "spec": spec.label(),
             "rows": cells},
        )
    bundle.record("falsify", prov, stage.finals())
    return bundle


def run_exposure_grid(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    """beta_sum for every configured exposure with its own coverage
    window; exposures with absent input files are listed as skipped."""
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    names = sorted(config.exposures)
    available, skipped = _split_available(config, names)
    if not available:
        raise PipelineError("[exposures] every exposure is missing input files")
    inputs = _spec_inputs(config, available)
    prov = provenance_hash(config, inputs)
    spec = main_spec(config)
    with _Stage("exposures", config.output_dir) as stage:
        frame, _ = load_frame(config)
        cache: dict = {}
        rows = []
        cells = []
        for name in names:
            if name in skipped:
                log.warning("exposure %s: input file missing; skipped", name)
                rows.append([name, "", "", "", "", "", "", "", "skipped"])
                cells.append({
                    "spec": f"exposure_{name}",
                    "cells": _table_cells(f"exposure_{name}", {"status": "skipped"}),
                })
                continue
            series, e = _exposure_on_frame(config, frame, name, cache)
            fitted = _fit_spec(frame, e, spec)
            b = fitted.beta_sum
            rows.append([
                name, series.coverage_start.isoformat(),
                series.coverage_end.isoformat(), _fmt(b.estimate), _fmt(b.se),
                _fmt(b.t, 2), _fmt_p(b.p), fitted.result.n, "ok",
            ])
            cells.append({
                "spec": f"exposure_{name}",
                "cells": _table_cells(f"exposure_{name}", {
                    "exposure": name,
                    "coverage_start": series.coverage_start.isoformat(),
                    "coverage_end": series.coverage_end.isoformat(),
                    "beta_sum": b.estimate, "se": b.se, "t": b.t, "p": b.p,
                    "n": fitted.result.n, "status": "ok",
                }),
            })
        _write_csv(
            stage.path("exposure_grid.csv"), prov,
            ["exposure", "coverage_start", "coverage_end", "beta_sum", "se",
             "t", "p", "n", "status"],
            rows,
        )
        _write_json(
            stage.path("exposure_grid.json"),
            {"provenance": prov, "table": "exposure_grid", "spec": spec.label(),
             "rows": cells},
        )
    bundle.record("exposures", prov, stage.finals())
    return bundle


def run_diagnostics(config: RunConfig, bundle: ResultBundle | None = None) -> ResultBundle:
    """Sample accounting, posting-intensity summary, novelty/posting
    correlation, top novelty days, and stationarity reports."""
    bundle = bundle or ResultBundle(output_dir=config.output_dir)
    inputs = _spec_inputs(config, [config.primary_exposure])
    prov = provenance_hash(config, inputs)
    with _Stage("diagnostics", config.output_dir) as stage:
        frame, series = load_frame(config)
        ok = series.ok_mask()
        flags = np.array(series.gate_flags)
        counts = series.day_posts
        corr = None
        corr_note = None
        if np.ptp(counts[ok]) == 0 or np.ptp(series.values[ok]) == 0:
            corr_note = "degenerate: constant series"
        else:
            corr = float(np.corrcoef(series.values[ok], counts[ok])[0, 1])
        finite = np.nonzero(np.isfinite(series.z))[0]
        ranked = finite[np.argsort(series.z[finite], kind="stable")][::-1]
        top = [
            {"date": series.dates[i].isoformat(), "z": float(series.z[i])}
            for i in ranked[:5]
        ]
        doc = {
            "provenance": prov,
            "days_total": len(series),
            "days_ok": int(ok.sum()),
            "days_missing": int((~ok).sum()),
            "missing_share": float((~ok).sum() / len(series)),
            "days_zero_post": int((flags == "zero_post").sum()),
            "days_low_sample": int((flags == "low_sample").sum()),
            "posts_per_day": {
                "median": float(np.median(counts)),
                "p10": float(np.quantile(counts, 0.10)),
                "p90": float(np.quantile(counts, 0.90)),
            },
            "corr_novelty_posts": corr,
            "corr_novelty_posts_note": corr_note,
            "top_novelty_days": top,
        }
        _, e = _exposure_on_frame(config, frame, config.primary_exposure, {})
        for label, values in (("novelty_z", series.z), ("exposure_z", e)):
            entry = {}
            for det in ("constant", "constant+trend"):
                try:
                    rep = stationarity_report(values, label, deterministic=det)
                except StationarityError as exc:
                    entry[det] = {"error": str(exc)}
                    continue
                entry[det] = {
                    "adf_stat": rep.adf.statistic,
                    "adf_lags": rep.adf.lags,
                    "adf_decision": rep.adf.decision,
                    "kpss_stat": rep.kpss.statistic,
                    "kpss_bandwidth": rep.kpss.bandwidth,
                    "kpss_decision": rep.kpss.decision,
                }
            doc.setdefault("stationarity", {})[label] = entry
        _write_json(stage.path("diagnostics.json"), doc)
    bundle.record("diagnostics", prov, stage.finals())
    return bundle


def run_main(config: RunConfig) -> ResultBundle:
    """Grid + leads + per-lag + IRF outputs (the main results bundle)."""
    bundle = ResultBundle(output_dir=config.output_dir)
    run_main_table(config, bundle)
    run_leads(config, bundle)
    run_irf(config, bundle)
    return bundle


def run_all(config: RunConfig) -> ResultBundle:
    bundle = ResultBundle(output_dir=config.output_dir)
    run_novelty(config, bundle)
    run_main_table(config, bundle)
    run_leads(config, bundle)
    run_irf(config, bundle)
    run_falsification(config, bundle)
    run_exposure_grid(config, bundle)
    run_diagnostics(config, bundle)
    return bundle
