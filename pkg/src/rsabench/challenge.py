"""Challenge backend: authenticated intake, scoring, quotas, leaderboards.

The service holds one loaded reference bundle per track, with noise
ceilings computed once at startup. All durable state lives in an
append-only journal of scored submissions; in-memory leaderboards, quota
counters, and per-team histories are pure folds over that journal, so a
restart reproduces them exactly.

Scoring runs outside the lock (it is CPU work with no shared state); the
quota re-check, journal append, and state update form one critical
section, so concurrent submissions cannot race past a quota boundary.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Any, Callable

from .bundles import ReferenceBundle, read_reference_bundle
from .errors import (
    AttestationRequired,
    ChallengeClosed,
    ConfigInvalid,
    NoiseCeilingUndefined,
    QuotaExceeded,
    ReferenceSetDegenerate,
    RsaBenchError,
    Unauthorized,
    UnknownTrack,
    ValidationFailed,
    WrongConditionSet,
    ZeroRankVariance,
)
from .fileformat import parse_rdm_document, sub_targets_for
from .journal import Journal, replay
from .scoring import NoiseCeiling, ScoreRecord, noise_ceiling, score_submission

DEFAULT_QUOTA = 5


@dataclass(frozen=True)
class Team:
    team_id: str
    display_name: str
    token_sha256: str


@dataclass(frozen=True)
class Submission:
    submission_id: str
    team_id: str
    track: str
    received_at: int  # UTC milliseconds
    payload_digest: str
    attestation: bool
    report_url: str | None = None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "submission_id": self.submission_id,
            "team_id": self.team_id,
            "track": self.track,
            "received_at": self.received_at,
            "payload_digest": self.payload_digest,
            "attestation": self.attestation,
            "report_url": self.report_url,
        }

    @classmethod
    def from_json_dict(cls, d: dict[str, Any]) -> "Submission":
        return cls(
            submission_id=str(d["submission_id"]),
            team_id=str(d["team_id"]),
            track=str(d["track"]),
            received_at=int(d["received_at"]),
            payload_digest=str(d["payload_digest"]),
            attestation=bool(d["attestation"]),
            report_url=d.get("report_url"),
        )


@dataclass(frozen=True)
class LeaderboardEntry:
    rank: int
    team_id: str
    display_name: str
    track_score_pct: float
    submission_id: str
    received_at: int


def _parse_utc(value: str, label: str) -> datetime:
    try:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError) as exc:
        raise ConfigInvalid(f"{label} is not an ISO-8601 timestamp: {value!r}") from exc
    if dt.tzinfo is None:
        raise ConfigInvalid(f"{label} must carry an explicit UTC offset: {value!r}")
    return dt.astimezone(timezone.utc)


@dataclass(frozen=True)
class ChallengeConfig:
    """Validated service configuration."""

    bundle_paths: dict[str, str]
    quota_per_day: int
    window_open: datetime
    window_close: datetime
    teams: tuple[Team, ...]
    journal_path: str

    @classmethod
    def from_file(cls, path: str) -> "ChallengeConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigInvalid("config must be a JSON object")
        base = os.path.dirname(os.path.abspath(path))
        return cls.from_dict(raw, base)

    @classmethod
    def from_dict(cls, raw: dict[str, Any], base_dir: str = ".") -> "ChallengeConfig":
        missing = {"tracks", "window", "teams", "journal"} - set(raw)
        if missing:
            raise ConfigInvalid(f"config missing keys: {sorted(missing)}")

        tracks = raw["tracks"]
        if not isinstance(tracks, dict) or not tracks:
            raise ConfigInvalid("config tracks must be a non-empty object")
        bundle_paths = {}
        for track, rel in tracks.items():
            sub_targets_for(str(track))  # raises UnknownTrack for junk names
            bundle_paths[str(track)] = os.path.join(base_dir, str(rel))

        quota = raw.get("quota_per_day", DEFAULT_QUOTA)
        if not isinstance(quota, int) or quota < 1:
            raise ConfigInvalid(f"quota_per_day must be an integer >= 1, got {quota!r}")

        window = raw["window"]
        if not isinstance(window, dict) or set(window) != {"open", "close"}:
            raise ConfigInvalid("config window must be an object with open and close")
        window_open = _parse_utc(window["open"], "window.open")
        window_close = _parse_utc(window["close"], "window.close")
        if window_close <= window_open:
            raise ConfigInvalid("window.close must be after window.open")

        teams_raw = raw["teams"]
        if not isinstance(teams_raw, list) or not teams_raw:
            raise ConfigInvalid("config teams must be a non-empty list")
        teams = []
        seen_ids: set[str] = set()
        for entry in teams_raw:
            if not isinstance(entry, dict) or not {
                "team_id",
                "display_name",
                "token_sha256",
            } <= set(entry):
                raise ConfigInvalid(
                    "each team needs team_id, display_name, and token_sha256"
                )
            team_id = str(entry["team_id"])
            if team_id in seen_ids:
                raise ConfigInvalid(f"duplicate team_id {team_id!r}")
            seen_ids.add(team_id)
            digest = str(entry["token_sha256"]).lower()
            if len(digest) != 64 or any(c not in "0123456789abcdef" for c in digest):
                raise ConfigInvalid(
                    f"team {team_id!r} token_sha256 must be 64 hex characters"
                )
            teams.append(Team(team_id, str(entry["display_name"]), digest))

        journal_path = os.path.join(base_dir, str(raw["journal"]))
        return cls(
            bundle_paths=bundle_paths,
            quota_per_day=quota,
            window_open=window_open,
            window_close=window_close,
            teams=tuple(teams),
            journal_path=journal_path,
        )


def hash_token(token: str) -> str:
    return hashlib.sha256(token.encode("utf-8")).hexdigest()


@dataclass
class _TrackState:
    """Mutable per-track fold of the journal."""

    # team_id -> (track_score_pct, received_at, submission_id)
    best: dict[str, tuple[float, int, str]] = field(default_factory=dict)


class ChallengeService:
    """One running challenge. Thread-safe."""

    def __init__(
        self,
        config: ChallengeConfig,
        clock: Callable[[], float] = time.time,
    ):
        self.config = config
        self._clock = clock
        self._teams_by_hash = {t.token_sha256: t for t in config.teams}
        self._teams_by_id = {t.team_id: t for t in config.teams}

        self.bundles: dict[str, ReferenceBundle] = {}
        self.ceilings: dict[str, dict[str, NoiseCeiling]] = {}
        for track, path in config.bundle_paths.items():
            try:
                bundle = read_reference_bundle(path)
            except RsaBenchError as exc:
                raise ConfigInvalid(f"track {track!r} bundle at {path}: {exc}") from exc
            if bundle.track != track:
                raise ConfigInvalid(
                    f"bundle at {path} is for track {bundle.track!r}, "
                    f"config says {track!r}"
                )
            per_target = {}
            for name, subjects in bundle.subject_sets.items():
                try:
                    per_target[name] = noise_ceiling(subjects)
                except (NoiseCeilingUndefined, ZeroRankVariance) as exc:
                    raise ReferenceSetDegenerate(
                        f"track {track!r} sub-target {name!r}: {exc}"
                    ) from exc
            self.bundles[track] = bundle
            self.ceilings[track] = per_target

        self._lock = threading.Lock()
        self._history: dict[str, list[tuple[Submission, ScoreRecord]]] = {
            t.team_id: [] for t in config.teams
        }
        self._track_state: dict[str, _TrackState] = {
            track: _TrackState() for track in config.bundle_paths
        }
        # (team_id, track, UTC date iso) -> accepted submissions that day
        self._quota_used: dict[tuple[str, str, str], int] = {}
        self._last_received: dict[str, int] = {}
        self._seq = 0

        for record in replay(config.journal_path):
            self._fold(record)
        self._journal = Journal(config.journal_path)

    # -- state folding ------------------------------------------------------

    def _fold(self, record: dict[str, Any]) -> None:
        submission = Submission.from_json_dict(record["submission"])
        score = ScoreRecord.from_json_dict(record["score"])
        history = self._history.setdefault(submission.team_id, [])
        history.append((submission, score))
        day = _utc_day(submission.received_at)
        key = (submission.team_id, submission.track, day)
        self._quota_used[key] = self._quota_used.get(key, 0) + 1
        last = self._last_received.get(submission.team_id, -1)
        self._last_received[submission.team_id] = max(last, submission.received_at)
        self._seq += 1

        state = self._track_state.setdefault(submission.track, _TrackState())
        current = state.best.get(submission.team_id)
        if current is None or score.track_score_pct > current[0]:
            state.best[submission.team_id] = (
                score.track_score_pct,
                submission.received_at,
                submission.submission_id,
            )

    # -- helpers ------------------------------------------------------------

    def authenticate(self, token: str) -> Team:
        digest = hash_token(token)
        for known_hash, team in self._teams_by_hash.items():
            if hmac.compare_digest(digest, known_hash):
                return team
        raise Unauthorized("unknown token")

    def _now_ms(self) -> int:
        return int(self._clock() * 1000)

    def _window_check(self, now_ms: int) -> None:
        now = datetime.fromtimestamp(now_ms / 1000.0, tz=timezone.utc)
        if not (self.config.window_open <= now < self.config.window_close):
            raise ChallengeClosed(
                f"challenge window is {self.config.window_open.isoformat()} to "
                f"{self.config.window_close.isoformat()}"
            )

    def _quota_check(self, team_id: str, track: str, now_ms: int) -> None:
        day = _utc_day(now_ms)
        used = self._quota_used.get((team_id, track, day), 0)
        if used >= self.config.quota_per_day:
            raise QuotaExceeded(self.config.quota_per_day, _next_utc_midnight(now_ms))

    # -- operations ---------------------------------------------------------

    def submit(
        self,
        token: str,
        track: str,
        payload: bytes,
        attestation: bool,
        report_url: str | None = None,
    ) -> tuple[Submission, ScoreRecord]:
        team = self.authenticate(token)
        if attestation is not True:
            raise AttestationRequired(
                "submissions must attest that no held-out brain responses were used"
            )
        now_ms = self._now_ms()
        self._window_check(now_ms)
        if track not in self.bundles:
            raise UnknownTrack(track)
        with self._lock:
            self._quota_check(team.team_id, track, now_ms)

        bundle = self.bundles[track]
        try:
            text = payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValidationFailed(exc) from exc
        try:
            file_track, targets = parse_rdm_document(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationFailed(exc) from exc
        except RsaBenchError as exc:
            raise ValidationFailed(exc) from exc
        if file_track != track:
            raise ValidationFailed(
                UnknownTrack(f"file is for track {file_track!r}, submission says {track!r}")
            )
        some = next(iter(targets.values()))
        if some.conditions != bundle.conditions:
            if some.n != bundle.conditions.n:
                raise WrongConditionSet(
                    f"expected {bundle.conditions.n} conditions, got {some.n}"
                )
            raise WrongConditionSet("condition identifiers do not match the test set")

        # CPU-heavy part, deliberately outside the lock
        score = score_submission(
            targets, bundle.subject_sets, track, self.ceilings[track]
        )
        digest = hashlib.sha256(payload).hexdigest()

        with self._lock:
            now_ms = self._now_ms()
            self._quota_check(team.team_id, track, now_ms)
            received_at = max(now_ms, self._last_received.get(team.team_id, -1) + 1)
            submission = Submission(
                submission_id=f"sub-{self._seq + 1:06d}-{digest[:8]}",
                team_id=team.team_id,
                track=track,
                received_at=received_at,
                payload_digest=digest,
                attestation=True,
                report_url=report_url,
            )
            record = {
                "submission": submission.to_json_dict(),
                "score": score.to_json_dict(),
            }
            self._journal.append(record)
            self._fold(record)
        return submission, score

    def leaderboard(self, track: str, limit: int | None = None) -> list[LeaderboardEntry]:
        if track not in self._track_state:
            raise UnknownTrack(track)
        with self._lock:
            rows = [
                (team_id, best) for team_id, best in self._track_state[track].best.items()
            ]
        rows.sort(key=lambda r: (-r[1][0], r[1][1], r[0]))
        if limit is not None:
            rows = rows[: max(0, limit)]
        entries = []
        for rank, (team_id, (score_pct, received_at, submission_id)) in enumerate(
            rows, start=1
        ):
            team = self._teams_by_id.get(team_id)
            display = team.display_name if team else team_id
            entries.append(
                LeaderboardEntry(
                    rank=rank,
                    team_id=team_id,
                    display_name=display,
                    track_score_pct=score_pct,
                    submission_id=submission_id,
                    received_at=received_at,
                )
            )
        return entries

    def team_history(self, token: str) -> list[dict[str, Any]]:
        team = self.authenticate(token)
        with self._lock:
            pairs = list(self._history.get(team.team_id, ()))
        pairs.sort(key=lambda p: p[0].received_at, reverse=True)
        return [
            {**submission.to_json_dict(), **score.to_json_dict()}
            for submission, score in pairs
        ]

    def challenge_info(self) -> dict[str, Any]:
        tracks = {}
        for track, bundle in self.bundles.items():
            tracks[track] = {
                "sub_targets": list(bundle.sub_targets),
                "n_conditions": bundle.conditions.n,
                "subjects": bundle.subject_count,
                "ceiling_r2": {
                    name: ceiling.ceiling_r2
                    for name, ceiling in self.ceilings[track].items()
                },
            }
        return {
            "tracks": tracks,
            "quota_per_day": self.config.quota_per_day,
            "window": {
                "open": _iso_z(self.config.window_open),
                "close": _iso_z(self.config.window_close),
            },
        }

    def close(self) -> None:
        self._journal.close()


def _utc_day(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc).date().isoformat()


def _next_utc_midnight(ms: int) -> str:
    now = datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)
    tomorrow = (now + timedelta(days=1)).replace(
        hour=0, minute=0, second=0, microsecond=0
    )
    return _iso_z(tomorrow)


def _iso_z(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
