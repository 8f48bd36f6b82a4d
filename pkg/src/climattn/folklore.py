"""Environmental classification of folklore motifs and the group score.

A motif counts as environmental when its description contains any dictionary
word, or all words of a dictionary phrase consecutively. Matching is on
lowercase alphanumeric tokens, so case, punctuation, and dash style never
matter. The group score is ln(1 + env / total), bounded by ln 2.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .utils import SchemaError, read_csv_rows

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class TermDictionary:
    words: frozenset[str]
    phrases: tuple[tuple[str, ...], ...]

    @classmethod
    def from_terms(cls, terms) -> "TermDictionary":
        words = set()
        phrases = set()
        for term in terms:
            tokens = tuple(tokenize(term))
            if not tokens:
                continue
            if len(tokens) == 1:
                words.add(tokens[0])
            else:
                phrases.add(tokens)
        return cls(frozenset(words), tuple(sorted(phrases)))

    @classmethod
    def from_file(cls, path: str | Path) -> "TermDictionary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls.from_terms(line for line in lines if line.strip() and not line.lstrip().startswith("#"))


def seed_dictionary() -> TermDictionary:
    """The packaged environmental term list."""
    text = resources.files("climattn").joinpath("data/seed_terms.txt").read_text(encoding="utf-8")
    return TermDictionary.from_terms(
        line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")
    )


@dataclass(frozen=True)
class MotifCatalog:
    """Motif descriptions keyed by (group_id, motif_id), both unique together."""

    entries: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        seen = set()
        for group_id, motif_id, _ in self.entries:
            key = (group_id, motif_id)
            if key in seen:
                raise ValueError(f"duplicate motif key {key}")
            seen.add(key)

    def groups(self) -> dict[str, list[str]]:
        by_group: dict[str, list[str]] = {}
        for group_id, _, description in self.entries:
            by_group.setdefault(group_id, []).append(description)
        return by_group


@dataclass(frozen=True)
class FolkloreScore:
    group_id: str
    env_motifs: int
    total_motifs: int
    score: float


def classify_motif(description: str, dictionary: TermDictionary) -> bool:
    tokens = tokenize(description)
    if any(tok in dictionary.words for tok in tokens):
        return True
    for phrase in dictionary.phrases:
        span = len(phrase)
        for i in range(len(tokens) - span + 1):
            if tuple(tokens[i : i + span]) == phrase:
                return True
    return False


def score_group(flags) -> tuple[int, int, float]:
    """(env, total, ln(1 + env / total)) from per-motif environmental flags."""
    flags = list(flags)
    if not flags:
        raise ValueError("cannot score a group with zero motifs")
    env = sum(1 for f in flags if f)
    total = len(flags)
    return env, total, math.log1p(env / total)


def score_catalog(catalog: MotifCatalog, dictionary: TermDictionary) -> list[FolkloreScore]:
    by_group = catalog.groups()
    scores = []
    for group_id in sorted(by_group):
        env, total, score = score_group(classify_motif(d, dictionary) for d in by_group[group_id])
        scores.append(FolkloreScore(group_id, env, total, score))
    return scores


# ---------------------------------------------------------------------------
# file formats


def read_catalog(path: str | Path) -> MotifCatalog:
    rows = read_csv_rows(path, ["group_id", "motif_id", "description"])
    return MotifCatalog(tuple((r["group_id"], r["motif_id"], r["description"]) for r in rows))


def write_scores(path: str | Path, scores: list[FolkloreScore]) -> None:
    from .utils import write_csv

    write_csv(
        path,
        ["group_id", "env_motifs", "total_motifs", "score"],
        [[s.group_id, s.env_motifs, s.total_motifs, s.score] for s in scores],
    )
