"""Flat key-value configuration files.

Grammar: one "key = value" per line; '#' starts a comment; blank lines are
skipped; keys are lowercase [a-z0-9_]+ and may not repeat. Values are plain
strings; list-valued keys use commas. Command-line flags override file keys
before validation, and the sha256 hash of the effective mapping is stamped
into every artifact header so reruns are attributable to an exact
configuration.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .evaluate import KEYWORD_CRITERIA, REVIEW_CRITERIA
from .features import VARIANTS
from .rankers import RANKER_KINDS

_KEY_RE = re.compile(r"^[a-z0-9_]+$")


class ConfigError(ValueError):
    """Invalid configuration file or option set."""


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"{origin}:{lineno}: bad key {key!r}")
        if key in mapping:
            raise ConfigError(f"{origin}:{lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def load_config(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), origin=str(path))


def config_hash(mapping: Mapping[str, str]) -> str:
    """Digest of the experiment parameters.

    The output location is excluded so the same experiment written to two
    directories produces byte-identical artifacts.
    """
    canonical = "\n".join(f"{k}={mapping[k]}" for k in sorted(mapping) if k != "outdir")
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _as_int(mapping: Mapping[str, str], key: str, default: int | None = None) -> int:
    if key not in mapping:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(mapping[key])
    except ValueError:
        raise ConfigError(f"key {key!r} must be an integer, got {mapping[key]!r}") from None


def _as_str_list(mapping: Mapping[str, str], key: str) -> tuple[str, ...]:
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r}")
    items = tuple(part.strip() for part in mapping[key].split(",") if part.strip())
    if not items:
        raise ConfigError(f"key {key!r} must list at least one value")
    return items


def _as_int_list(mapping: Mapping[str, str], key: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in _as_str_list(mapping, key))
    except ValueError:
        raise ConfigError(f"key {key!r} must be a comma-separated integer list") from None


def _as_path(mapping: Mapping[str, str], key: str, base: Path) -> Path:
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r}")
    path = Path(mapping[key])
    return path if path.is_absolute() else base / path


DATASET_KEYS = ("venues", "users", "requests", "qrels")
KNOWN_VARIANTS = tuple(VARIANTS) + ("LinearCatRev",)


@dataclass(eq=False)
class ExperimentConfig:
    """Validated settings for the run and sweep commands."""

    venues: Path
    users: Path
    requests: Path
    qrels: Path
    outdir: Path
    seed: int
    variants: tuple[str, ...]
    ranker: str
    reference: str
    hyper_seeds: tuple[int, ...]
    n_folds: int
    sweep_axis: str | None
    sweep_criteria: tuple[str, ...]
    sweep_k_values: tuple[int, ...]
    n_random_repeats: int
    hash: str

    @classmethod
    def from_mapping(
        cls,
        mapping: Mapping[str, str],
        base_dir: str | Path = ".",
        need_sweep: bool = False,
    ) -> "ExperimentConfig":
        base = Path(base_dir)
        paths = {key: _as_path(mapping, key, base) for key in DATASET_KEYS}
        for key, path in paths.items():
            if not path.is_file():
                raise ConfigError(f"{key} file not found: {path}")
        outdir = _as_path(mapping, "outdir", base)

        seed = _as_int(mapping, "seed")  # mandatory for reproducibility
        if seed < 0:
            raise ConfigError("seed must be non-negative")

        variants = _as_str_list(mapping, "variants") if "variants" in mapping else ("LTR-S",)
        for name in variants:
            if name not in KNOWN_VARIANTS:
                raise ConfigError(
                    f"unknown variant {name!r}; expected one of {sorted(KNOWN_VARIANTS)}"
                )
        if len(set(variants)) != len(variants):
            raise ConfigError("duplicate variant names")

        ranker = mapping.get("ranker", "coordinate-ascent")
        if ranker not in RANKER_KINDS:
            raise ConfigError(f"unknown ranker {ranker!r}; expected one of {RANKER_KINDS}")

        reference = mapping.get("reference", variants[0])
        if reference not in variants:
            raise ConfigError(f"reference {reference!r} is not among the variants")

        hyper_seeds = (
            _as_int_list(mapping, "hyper_seeds") if "hyper_seeds" in mapping else (0, 1, 2)
        )
        n_folds = _as_int(mapping, "folds", 5)
        if n_folds < 2:
            raise ConfigError("folds must be >= 2")

        sweep_axis = mapping.get("axis")
        sweep_criteria: tuple[str, ...] = ()
        sweep_k_values: tuple[int, ...] = ()
        n_random_repeats = _as_int(mapping, "n_random_repeats", 5)
        if need_sweep:
            if sweep_axis not in ("reviews", "keywords"):
                raise ConfigError("sweep config needs axis = reviews | keywords")
            allowed = REVIEW_CRITERIA if sweep_axis == "reviews" else KEYWORD_CRITERIA
            sweep_criteria = _as_str_list(mapping, "criteria")
            for criterion in sweep_criteria:
                if criterion not in allowed:
                    raise ConfigError(
                        f"criterion {criterion!r} invalid for axis {sweep_axis!r}; "
                        f"expected one of {allowed}"
                    )
            sweep_k_values = _as_int_list(mapping, "k_values")

        return cls(
            venues=paths["venues"],
            users=paths["users"],
            requests=paths["requests"],
            qrels=paths["qrels"],
            outdir=outdir,
            seed=seed,
            variants=variants,
            ranker=ranker,
            reference=reference,
            hyper_seeds=hyper_seeds,
            n_folds=n_folds,
            sweep_axis=sweep_axis,
            sweep_criteria=sweep_criteria,
            sweep_k_values=sweep_k_values,
            n_random_repeats=n_random_repeats,
            hash=config_hash(mapping),
        )
