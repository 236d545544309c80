"""HTTP JSON API over a running ChallengeService.

One app factory, four endpoints. Handlers are async and delegate all
service work to a threadpool, since scoring is CPU-bound and the journal
append blocks on fsync. Domain errors map to stable machine-readable
codes; validation failures carry the offending entry's coordinates so a
client can point at the bad cell.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse

from .challenge import ChallengeService
from .errors import (
    AttestationRequired,
    ChallengeClosed,
    MalformedFile,
    QuotaExceeded,
    RsaBenchError,
    Unauthorized,
    ValidationFailed,
)
from .fileformat import payload_digest_bytes

_STATUS_BY_CODE = {
    "unauthorized": 401,
    "attestation_required": 403,
    "challenge_closed": 403,
    "quota_exceeded": 429,
}


def _error_payload(exc: RsaBenchError) -> dict[str, Any]:
    body: dict[str, Any] = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, ValidationFailed):
        body["cause_code"] = exc.cause_code
        if exc.row is not None:
            body["row"] = exc.row
        if exc.col is not None:
            body["col"] = exc.col
    if isinstance(exc, QuotaExceeded):
        body["retry_after_utc"] = exc.retry_after_utc
    return {"error": body}


def _bearer_token(request: Request) -> str:
    header = request.headers.get("authorization", "")
    parts = header.split()
    if len(parts) != 2 or parts[0].lower() != "bearer":
        raise Unauthorized("missing or malformed Authorization header")
    return parts[1]


def create_app(service: ChallengeService) -> FastAPI:
    app = FastAPI(title="rsabench", docs_url=None, redoc_url=None)

    @app.exception_handler(RsaBenchError)
    async def _domain_error(request: Request, exc: RsaBenchError) -> JSONResponse:
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=_error_payload(exc))

    @app.post("/api/v1/submissions", status_code=201)
    async def create_submission(request: Request) -> JSONResponse:
        token = _bearer_token(request)
        try:
            body = await request.json()
        except Exception as exc:
            raise MalformedFile(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise MalformedFile("request body must be a JSON object")
        for key in ("track", "attestation", "rdm_file"):
            if key not in body:
                raise MalformedFile(f"request body missing {key!r}")
        if not isinstance(body["rdm_file"], dict):
            raise MalformedFile("rdm_file must be the RDM document object, inline")
        report_url = body.get("report_url")
        if report_url is not None and not isinstance(report_url, str):
            raise MalformedFile("report_url must be a string when present")

        payload = payload_digest_bytes(body["rdm_file"])
        submission, score = await run_in_threadpool(
            service.submit,
            token,
            str(body["track"]),
            payload,
            body["attestation"],
            report_url,
        )
        return JSONResponse(
            status_code=201,
            content={"submission_id": submission.submission_id, **score.to_json_dict()},
        )

    @app.get("/api/v1/leaderboard")
    async def get_leaderboard(request: Request) -> JSONResponse:
        track = request.query_params.get("track", "")
        limit_raw = request.query_params.get("limit")
        limit = None
        if limit_raw is not None:
            try:
                limit = int(limit_raw)
            except ValueError as exc:
                raise MalformedFile(f"limit must be an integer, got {limit_raw!r}") from exc
        entries = await run_in_threadpool(service.leaderboard, track, limit)
        return JSONResponse(
            content={
                "track": track,
                "entries": [
                    {
                        "rank": e.rank,
                        "display_name": e.display_name,
                        "track_score_pct": e.track_score_pct,
                        "submission_id": e.submission_id,
                        "received_at": e.received_at,
                    }
                    for e in entries
                ],
            }
        )

    @app.get("/api/v1/teams/me/submissions")
    async def get_own_submissions(request: Request) -> JSONResponse:
        token = _bearer_token(request)
        history = await run_in_threadpool(service.team_history, token)
        return JSONResponse(content={"submissions": history})

    @app.get("/api/v1/challenge")
    async def get_challenge(request: Request) -> JSONResponse:
        info = await run_in_threadpool(service.challenge_info)
        return JSONResponse(content=info)

    return app
