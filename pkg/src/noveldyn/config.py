"""Run configuration: a YAML file mapping input paths, analysis constants,
exposure definitions, and the regression spec grid.

Example::

    timezone: America/New_York
    inauguration_date: 2025-01-20
    output_dir: out
    seed: 0
    paths:
      posts: data/posts.jsonl
      embeddings: data/embeddings.bin
      transcripts:
        epstein: data/tv_epstein.csv
        taylor_swift: data/tv_taylor_swift.csv
      external:
        google_trends: data/trends_epstein.csv
    novelty:
      metric: energy
      window_days: 7
      min_day_posts: 3
      min_ref_posts: 10
    exposures:
      fox_density: {transcript: epstein, measure: density}
      fox_mentions: {transcript: epstein, measure: mentions}
      google_trends: {external: google_trends}
      cable_mean: {mean_of: [fox_density, msnbc_density, cnn_density]}
    primary_exposure: fox_density
    falsification: [taylor_swift_density, ncaa_density]
    specs:
      - {p: 7, q: 1, hac_bandwidth: 7}
      - {p: 7, q: 3, hac_bandwidth: 7}
      - {p: 7, q: 7, hac_bandwidth: 7}
    leads_spec: {p: 7, q: 3, lead_order: 3, hac_bandwidth: 7}
    irf: {h_min: -5, h_max: 14}
    lp_windows: [[-3, -1], [0, 1], [0, 3], [0, 7], [0, 14]]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import yaml

from .ingest import DEFAULT_INAUGURATION, DEFAULT_TIMEZONE, resolve_timezone
from .novelty import NoveltyConfig
from .regression import RegressionSpec

DEFAULT_SPEC_GRID = (
    RegressionSpec(p=7, q=1, hac_bandwidth=7),
    RegressionSpec(p=7, q=3, hac_bandwidth=7),
    RegressionSpec(p=7, q=7, hac_bandwidth=7),
)
DEFAULT_LEADS_SPEC = RegressionSpec(p=7, q=3, lead_order=3, hac_bandwidth=7)
DEFAULT_IRF_RANGE = (-5, 14)
DEFAULT_LP_WINDOWS = ((-3, -1), (0, 1), (0, 3), (0, 7), (0, 14))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExposureDef:
    """One exposure series: a transcript measure, an external file, or the
    mean of other defined exposures' z-scores."""

    name: str
    transcript: str | None = None
    measure: str = "density"  # density | mentions
    external: str | None = None
    mean_of: tuple[str, ...] | None = None

    def kind(self) -> str:
        if self.transcript is not None:
            return "transcript"
        if self.external is not None:
            return "external"
        return "mean"


@dataclass(frozen=True)
class RunConfig:
    posts_path: Path
    embeddings_path: Path
    transcript_paths: dict  # keyword -> Path
    external_paths: dict    # name -> Path
    output_dir: Path
    exposures: dict         # name -> ExposureDef
    primary_exposure: str
    falsification: tuple[str, ...] = ()
    timezone: str = DEFAULT_TIMEZONE
    inauguration_date: date = DEFAULT_INAUGURATION
    seed: int = 0
    novelty: NoveltyConfig = field(default_factory=NoveltyConfig)
    specs: tuple[RegressionSpec, ...] = DEFAULT_SPEC_GRID
    leads_spec: RegressionSpec = DEFAULT_LEADS_SPEC
    irf_range: tuple[int, int] = DEFAULT_IRF_RANGE
    lp_windows: tuple[tuple[int, int], ...] = DEFAULT_LP_WINDOWS

    def exposure_def(self, name: str) -> ExposureDef:
        try:
            return self.exposures[name]
        except KeyError:
            raise ConfigError(f"exposure {name!r} is not defined") from None

    def transcripts_for(self, exposure_names) -> set:
        """Transcript keywords required to build the named exposures.
        Keeps unrelated keyword files out of a stage's reads."""
        needed: set = set()
        for name in exposure_names:
            d = self.exposure_def(name)
            if d.kind() == "transcript":
                needed.add(d.transcript)
            elif d.kind() == "mean":
                needed |= self.transcripts_for(d.mean_of)
        return needed

    def externals_for(self, exposure_names) -> set:
        """External series names required to build the named exposures."""
        needed: set = set()
        for name in exposure_names:
            d = self.exposure_def(name)
            if d.kind() == "external":
                needed.add(d.external)
            elif d.kind() == "mean":
                needed |= self.externals_for(d.mean_of)
        return needed


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return mapping[key]


def _as_date(value, context: str) -> date:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError as exc:
        raise ConfigError(f"{context}: bad date {value!r}") from exc


def _parse_exposure(name: str, raw, context: str) -> ExposureDef:
    if not isinstance(raw, dict):
        raise ConfigError(f"{context}: exposure {name!r} must be a mapping")
    keys = {"transcript", "external", "mean_of"} & set(raw)
    if len(keys) != 1:
        raise ConfigError(
            f"{context}: exposure {name!r} needs exactly one of "
            f"transcript/external/mean_of"
        )
    measure = raw.get("measure", "density")
    if measure not in ("density", "mentions"):
        raise ConfigError(f"{context}: exposure {name!r} has unknown measure {measure!r}")
    if "transcript" in raw:
        return ExposureDef(name, transcript=str(raw["transcript"]), measure=measure)
    if "external" in raw:
        return ExposureDef(name, external=str(raw["external"]))
    comps = raw["mean_of"]
    if not isinstance(comps, list) or not comps:
        raise ConfigError(f"{context}: exposure {name!r} mean_of must be a non-empty list")
    return ExposureDef(name, mean_of=tuple(str(c) for c in comps))


def _parse_spec(raw, context: str) -> RegressionSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"{context}: spec entries must be mappings")
    known = {"p", "q", "lead_order", "hac_bandwidth", "controls", "include_trend"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{context}: unknown spec key(s) {sorted(unknown)}")
    kwargs = dict(raw)
    if "controls" in kwargs and kwargs["controls"] is not None:
        kwargs["controls"] = tuple(str(c) for c in kwargs["controls"])
    return RegressionSpec(**kwargs)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse the YAML config; ``overrides`` replaces top-level scalar keys
    (CLI flags) before interpretation."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    ctx = str(path)

    paths = _require(raw, "paths", ctx)
    base = path.parent
    posts = base / str(_require(paths, "posts", f"{ctx}: paths"))
    embeddings = base / str(_require(paths, "embeddings", f"{ctx}: paths"))
    transcripts = {
        str(k): base / str(v) for k, v in (paths.get("transcripts") or {}).items()
    }
    external = {str(k): base / str(v) for k, v in (paths.get("external") or {}).items()}

    novelty_raw = raw.get("novelty") or {}
    known_nov = {"metric", "window_days", "min_day_posts", "min_ref_posts",
                 "within", "gamma_rule"}
    unknown = set(novelty_raw) - known_nov
    if unknown:
        raise ConfigError(f"{ctx}: unknown novelty key(s) {sorted(unknown)}")
    novelty = NoveltyConfig(**novelty_raw)

    exposures_raw = _require(raw, "exposures", ctx)
    if not isinstance(exposures_raw, dict) or not exposures_raw:
        raise ConfigError(f"{ctx}: exposures must be a non-empty mapping")
    exposures = {
        str(name): _parse_exposure(str(name), spec, ctx)
        for name, spec in exposures_raw.items()
    }

    specs_raw = raw.get("specs")
    specs = (
        tuple(_parse_spec(s, ctx) for s in specs_raw)
        if specs_raw is not None
        else DEFAULT_SPEC_GRID
    )
    leads_raw = raw.get("leads_spec")
    leads_spec = _parse_spec(leads_raw, ctx) if leads_raw is not None else DEFAULT_LEADS_SPEC

    irf_raw = raw.get("irf") or {}
    irf_range = (
        int(irf_raw.get("h_min", DEFAULT_IRF_RANGE[0])),
        int(irf_raw.get("h_max", DEFAULT_IRF_RANGE[1])),
    )
    windows_raw = raw.get("lp_windows")
    if windows_raw is None:
        lp_windows = DEFAULT_LP_WINDOWS
    else:
        lp_windows = tuple((int(a), int(b)) for a, b in windows_raw)

    config = RunConfig(
        posts_path=posts,
        embeddings_path=embeddings,
        transcript_paths=transcripts,
        external_paths=external,
        output_dir=base / str(raw.get("output_dir", "out")),
        exposures=exposures,
        primary_exposure=str(_require(raw, "primary_exposure", ctx)),
        falsification=tuple(str(k) for k in raw.get("falsification") or ()),
        timezone=str(raw.get("timezone", DEFAULT_TIMEZONE)),
        inauguration_date=_as_date(
            raw.get("inauguration_date", DEFAULT_INAUGURATION), ctx
        ),
        seed=int(raw.get("seed", 0)),
        novelty=novelty,
        specs=specs,
        leads_spec=leads_spec,
        irf_range=irf_range,
        lp_windows=lp_windows,
    )
    check_config(config)
    return config


def check_config(config: RunConfig) -> None:
    """Structural validity: references resolve, constants in range. Path
    existence is checked separately so configs can be built before data."""
    resolve_timezone(config.timezone)
    if not config.specs:
        raise ConfigError("spec grid is empty")
    if config.leads_spec.lead_order < 1:
        raise ConfigError("leads_spec must include at least one lead")
    if config.irf_range[0] > config.irf_range[1]:
        raise ConfigError("irf h_min exceeds h_max")
    for a, b in config.lp_windows:
        if a > b:
            raise ConfigError(f"lp window start {a} exceeds end {b}")
    for name, d in config.exposures.items():
        if d.kind() == "transcript" and d.transcript not in config.transcript_paths:
            raise ConfigError(
                f"exposure {name!r} references unknown transcript {d.transcript!r}"
            )
        if d.kind() == "external" and d.external not in config.external_paths:
            raise ConfigError(
                f"exposure {name!r} references unknown external series {d.external!r}"
            )
        if d.kind() == "mean":
            for comp in d.mean_of:
                if comp not in config.exposures:
                    raise ConfigError(
                        f"exposure {name!r} averages undefined exposure {comp!r}"
                    )
                if config.exposures[comp].kind() == "mean":
                    raise ConfigError(
                        f"exposure {name!r}: nested mean_of {comp!r} is not supported"
                    )
    config.exposure_def(config.primary_exposure)
    for name in config.falsification:
        config.exposure_def(name)


def validate_paths(config: RunConfig, exposure_names=None) -> list[Path]:
    """Check that every input file a run would read exists; returns the
    ordered path list (for provenance hashing). Restricting to
    ``exposure_names`` keeps unrelated keyword files out of the check."""
    paths = [config.posts_path, config.embeddings_path]
    if exposure_names is None:
        paths.extend(config.transcript_paths[k] for k in sorted(config.transcript_paths))
        paths.extend(config.external_paths[k] for k in sorted(config.external_paths))
    else:
        for kw in sorted(config.transcripts_for(exposure_names)):
            paths.append(config.transcript_paths[kw])
        for name in sorted(config.externals_for(exposure_names)):
            paths.append(config.external_paths[name])
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise ConfigError("missing input file(s): " + ", ".join(missing))
    return paths
