"""Job configuration: flat key=value files with command-line overrides.

A config file collects everything a run needs so that batch jobs are
reproducible from one artifact:

    # train + index settings
    corpus = corpus.txt
    model = model.pcm
    stopwords = stop_en.txt, stop_extra.txt
    feature = token
    k = 6
    seed = 42

Keys mirror the CLI flags (see ``profcat --help``); a flag given on the
command line always wins over the file.  Unknown keys are rejected rather
than ignored, because a typo that silently disables a setting is worse than
an error.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["ConfigError", "KNOWN_KEYS", "parse_config_file"]


class ConfigError(ValueError):
    """Bad configuration file or invalid setting."""


KNOWN_KEYS = frozenset(
    {
        "corpus",
        "model",
        "input_file",
        "input_dir",
        "output",
        "k",
        "format",
        "blacklist",
        "stopwords",
        "thesaurus",
        "feature",
        "seed",
        "n_folds",
        "test_ids",
        "strict_rank_denominator",
        "min_docs_per_category",
        "min_doc_length_tokens",
        "min_word_corpus_freq",
        "min_loglikelihood",
        "descriptor_count_weighting",
        "max_associates_per_profile",
        "host",
        "port",
        "lang",
        "out_dir",
        "workers",
        "in_place",
        "split_plan",
    }
)


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines.  ``#`` starts a comment, blank lines are
    ignored, keys must be known."""
    settings: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        if "=" not in entry:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = entry.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in settings:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        settings[key] = value
    return settings


def as_bool(value: str, key: str) -> bool:
    low = value.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def split_paths(value: str) -> list[str]:
    """Comma-separated path lists in config values."""
    return [p.strip() for p in value.split(",") if p.strip()]
