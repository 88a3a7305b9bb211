"""Dataset loading and storage in line-oriented text formats.

venues.jsonl / users.jsonl / requests.jsonl hold one JSON object per line;
qrels.txt is whitespace-separated "user_id 0 venue_id rating"; ranked output
goes to 6-column TREC run files. Lines starting with '#' are comments in
every format (artifact headers use them). Exact field names are frozen in
FORMATS.md at the repository root.

Loading is single-threaded; the resulting Collection is read-only and safe
to share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import (
    MAX_RANKED_LIST,
    RankingRequest,
    UserHistory,
    USER_RATING_MAX,
    USER_RATING_MIN,
    Venue,
)


class ParseError(ValueError):
    """A malformed line in a dataset file; message names file and line."""


class ValidationError(ValueError):
    """Cross-reference failure between dataset files."""


@dataclass
class Collection:
    venues: dict[str, Venue]
    users: dict[str, UserHistory]
    requests: list[RankingRequest]
    qrels: dict[tuple[str, str], int]
    _qrels_by_user: dict[str, dict[str, int]] = field(
        init=False, repr=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        for (user_id, venue_id), rating in self.qrels.items():
            self._qrels_by_user.setdefault(user_id, {})[venue_id] = rating

    def venue(self, venue_id: str) -> Venue:
        try:
            return self.venues[venue_id]
        except KeyError:
            raise ValidationError(f"unknown venue id {venue_id!r}") from None

    def qrels_for_user(self, user_id: str) -> dict[str, int]:
        return self._qrels_by_user.get(user_id, {})

    def request_for_user(self, user_id: str) -> RankingRequest | None:
        for request in self.requests:
            if request.user_id == user_id:
                return request
        return None

    def replace_venues(self, venues: dict[str, Venue]) -> "Collection":
        """Copy with a substituted venue table (used by sweep transforms)."""
        return Collection(
            venues=venues,
            users=self.users,
            requests=self.requests,
            qrels=self.qrels,
        )


def _iter_content_lines(path: Path) -> Iterable[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def _load_jsonl(path: Path, from_dict, what: str) -> list:
    records = []
    for lineno, line in _iter_content_lines(path):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON in {what} file: {exc}") from None
        if not isinstance(obj, dict):
            raise ParseError(f"{path}:{lineno}: expected a JSON object")
        try:
            records.append(from_dict(obj))
        except (KeyError, TypeError, ValueError) as exc:
            detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
            raise ParseError(f"{path}:{lineno}: bad {what} record: {detail}") from None
    return records


def _load_qrels(path: Path) -> dict[tuple[str, str], int]:
    qrels: dict[tuple[str, str], int] = {}
    for lineno, line in _iter_content_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(
                f"{path}:{lineno}: qrels line needs 4 fields "
                f"(user_id 0 venue_id rating), got {len(parts)}"
            )
        user_id, _iteration, venue_id, rating_text = parts
        try:
            rating = int(rating_text)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: rating {rating_text!r} is not an integer") from None
        if not USER_RATING_MIN <= rating <= USER_RATING_MAX:
            raise ParseError(f"{path}:{lineno}: rating {rating} outside [0, 4]")
        qrels[(user_id, venue_id)] = rating
    return qrels


def load_collection(
    venues_path: str | Path,
    users_path: str | Path,
    requests_path: str | Path,
    qrels_path: str | Path,
) -> Collection:
    """Load and cross-link the four dataset files.

    Raises ParseError with file and line number on malformed input, and
    ValidationError listing the offending ids on dangling references.
    """
    venues_path, users_path = Path(venues_path), Path(users_path)
    requests_path, qrels_path = Path(requests_path), Path(qrels_path)
    for path in (venues_path, users_path, requests_path, qrels_path):
        if not path.is_file():
            raise FileNotFoundError(f"dataset file not found: {path}")

    venue_list = _load_jsonl(venues_path, Venue.from_dict, "venue")
    venues: dict[str, Venue] = {}
    for venue in venue_list:
        if venue.id in venues:
            raise ValidationError(f"duplicate venue id {venue.id!r}")
        venues[venue.id] = venue

    user_list = _load_jsonl(users_path, UserHistory.from_dict, "user")
    users: dict[str, UserHistory] = {}
    for user in user_list:
        if user.user_id in users:
            raise ValidationError(f"duplicate user id {user.user_id!r}")
        users[user.user_id] = user

    requests = _load_jsonl(requests_path, RankingRequest.from_dict, "request")
    qrels = _load_qrels(qrels_path)

    _validate(venues, users, requests, qrels)
    return Collection(venues=venues, users=users, requests=requests, qrels=qrels)


def _validate(venues, users, requests, qrels) -> None:
    dangling_history = sorted(
        {
            venue_id
            for user in users.values()
            for venue_id, _ in user.rated_venues
            if venue_id not in venues
        }
    )
    if dangling_history:
        raise ValidationError(
            "user histories reference unknown venues: " + ", ".join(dangling_history)
        )

    seen_request_users: set[str] = set()
    dangling_candidates: list[str] = []
    for request in requests:
        if request.user_id in seen_request_users:
            raise ValidationError(f"multiple requests for user {request.user_id!r}")
        seen_request_users.add(request.user_id)
        if request.user_id not in users:
            raise ValidationError(f"request for unknown user {request.user_id!r}")
        for venue_id in request.candidates:
            if venue_id not in venues:
                dangling_candidates.append(venue_id)
            elif venues[venue_id].city != request.city:
                raise ValidationError(
                    f"candidate {venue_id!r} is in {venues[venue_id].city!r}, "
                    f"request city is {request.city!r}"
                )
    if dangling_candidates:
        raise ValidationError(
            "requests reference unknown venues: "
            + ", ".join(sorted(set(dangling_candidates)))
        )

    candidate_pool = {
        (request.user_id, venue_id)
        for request in requests
        for venue_id in request.candidates
    }
    dangling_qrels = sorted(
        {venue_id for key in qrels if key not in candidate_pool for venue_id in [key[1]]}
    )
    if dangling_qrels:
        raise ValidationError(
            "qrels reference venues outside any request candidate list: "
            + ", ".join(dangling_qrels)
        )


def write_collection(collection: Collection, outdir: str | Path, header: str | None = None) -> dict[str, Path]:
    """Write the four dataset files with canonical ordering; returns their paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "venues": outdir / "venues.jsonl",
        "users": outdir / "users.jsonl",
        "requests": outdir / "requests.jsonl",
        "qrels": outdir / "qrels.txt",
    }
    head = [f"# {header}"] if header else []
    _write_lines(
        paths["venues"],
        head + [collection.venues[vid].to_json_line() for vid in sorted(collection.venues)],
    )
    _write_lines(
        paths["users"],
        head + [collection.users[uid].to_json_line() for uid in sorted(collection.users)],
    )
    _write_lines(paths["requests"], head + [r.to_json_line() for r in collection.requests])
    _write_lines(
        paths["qrels"],
        head
        + [
            f"{user_id} 0 {venue_id} {collection.qrels[(user_id, venue_id)]}"
            for user_id, venue_id in sorted(collection.qrels)
        ],
    )
    return paths


def _write_lines(path: Path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


def write_run(
    ranked: Sequence[tuple[str, Sequence[tuple[str, float]]]],
    tag: str,
    path: str | Path,
    header: str | None = None,
) -> None:
    """Write ranked lists as TREC 6-column lines "user Q0 venue rank score tag".

    Input lists must already be in canonical order: non-increasing score,
    ties by ascending venue id. Each list is truncated to the top 30; a
    duplicate venue within one user's list is a validation error.
    """
    lines: list[str] = []
    if header:
        lines.append(f"# {header}")
    for user_id, entries in ranked:
        seen: set[str] = set()
        prev_score: float | None = None
        prev_id: str | None = None
        for rank, (venue_id, score) in enumerate(entries[:MAX_RANKED_LIST], start=1):
            if venue_id in seen:
                raise ValidationError(
                    f"duplicate venue {venue_id!r} in ranked list for {user_id!r}"
                )
            seen.add(venue_id)
            if prev_score is not None:
                if score > prev_score:
                    raise ValidationError(
                        f"scores for {user_id!r} are not non-increasing at {venue_id!r}"
                    )
                if score == prev_score and prev_id is not None and venue_id < prev_id:
                    raise ValidationError(
                        f"tie between {prev_id!r} and {venue_id!r} for {user_id!r} "
                        "not broken by ascending venue id"
                    )
            prev_score, prev_id = score, venue_id
            lines.append(f"{user_id} Q0 {venue_id} {rank} {float(score)} {tag}")
    _write_lines(Path(path), lines)


def read_run(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    """Read a TREC run file back into per-user ranked lists (comments skipped)."""
    runs: dict[str, list[tuple[str, float]]] = {}
    for lineno, line in _iter_content_lines(Path(path)):
        parts = line.split()
        if len(parts) != 6:
            raise ParseError(f"{path}:{lineno}: run line needs 6 fields, got {len(parts)}")
        user_id, _q0, venue_id, _rank, score_text, _tag = parts
        try:
            score = float(score_text)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: score {score_text!r} is not a number") from None
        runs.setdefault(user_id, []).append((venue_id, score))
    return runs


def read_qrels(path: str | Path) -> dict[tuple[str, str], int]:
    """Read a standalone qrels file (for evaluating externally produced runs)."""
    return _load_qrels(Path(path))
