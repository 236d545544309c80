"""Command-line tool: evaluate, validate, generate, serve, submit.

Exit codes are part of the interface so scripts can branch on failure
category:

    0  success
    2  file or format error (parse, shape, symmetry, diagonal, finiteness)
    3  condition mismatch between model and reference
    4  degenerate reference set (noise ceiling undefined)

Reports are deterministic: stable field order, percentages at 6 decimal
places, raw values at 17 significant digits, no locale or wall-clock
dependence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import urllib.error
import urllib.request

import numpy as np

from . import __version__
from .bundles import (
    MANIFEST_NAME,
    ReferenceBundle,
    read_reference_bundle,
    write_reference_bundle,
)
from .challenge import ChallengeConfig, ChallengeService
from .errors import (
    ConditionMismatch,
    NoiseCeilingUndefined,
    ReferenceSetDegenerate,
    RsaBenchError,
    WrongConditionSet,
    ZeroRankVariance,
)
from .fileformat import (
    FORMAT_VERSION,
    TRACKS,
    format_float,
    parse_rdm_document,
    sub_targets_for,
)
from .rdm import ASYMMETRY_RTOL, DIAGONAL_ATOL
from .scoring import NoiseCeiling, ScoreRecord, noise_ceiling, score_submission
from .synthetic import SyntheticSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 2
EXIT_CONDITIONS = 3
EXIT_DEGENERATE = 4


def _exit_code_for(exc: RsaBenchError) -> int:
    if isinstance(exc, (ConditionMismatch, WrongConditionSet)):
        return EXIT_CONDITIONS
    if isinstance(exc, (NoiseCeilingUndefined, ReferenceSetDegenerate, ZeroRankVariance)):
        return EXIT_DEGENERATE
    return EXIT_FORMAT


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _bundle_digest(directory: str) -> str:
    """Digest of manifest plus every listed file, in manifest order."""
    manifest_path = os.path.join(directory, MANIFEST_NAME)
    with open(manifest_path, "rb") as fh:
        manifest_bytes = fh.read()
    manifest = json.loads(manifest_bytes)
    h = hashlib.sha256(manifest_bytes)
    for fname in list(manifest["subject_files"]) + [manifest["truth_file"]]:
        with open(os.path.join(directory, fname), "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


def render_report(
    track: str, model_digest: str, reference_digest: str, score: ScoreRecord
) -> str:
    names = sub_targets_for(track)
    lines = [
        "{",
        '  "tool": "rsabench",',
        f'  "version": "{__version__}",',
        f'  "track": "{track}",',
        f'  "model_sha256": "{model_digest}",',
        f'  "reference_sha256": "{reference_digest}",',
        '  "sub_targets": {',
    ]
    for i, name in enumerate(names):
        s = score.sub_targets[name]
        comma = "," if i < len(names) - 1 else ""
        lines.append(
            f'    "{name}": {{"raw_r2": {format_float(s.raw_r2)}, '
            f'"ceiling_r2": {format_float(s.ceiling_r2)}, '
            f'"normalized_pct": {s.normalized_pct:.6f}, '
            f'"degenerate": {"true" if s.degenerate else "false"}}}{comma}'
        )
    lines.append("  },")
    lines.append(f'  "track_score_pct": {score.track_score_pct:.6f}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def evaluate_file(model_path: str, bundle: ReferenceBundle) -> ScoreRecord:
    """Offline scoring shared by cmd_evaluate and tests."""
    with open(model_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    track, targets = parse_rdm_document(doc)
    if track != bundle.track:
        raise WrongConditionSet(
            f"model file is for track {track!r}, reference bundle is {bundle.track!r}"
        )
    some = next(iter(targets.values()))
    if some.conditions != bundle.conditions:
        raise WrongConditionSet("model condition set does not match the reference")
    ceilings: dict[str, NoiseCeiling] = {}
    for name, subjects in bundle.subject_sets.items():
        ceilings[name] = noise_ceiling(subjects)
    return score_submission(targets, bundle.subject_sets, track, ceilings)


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        bundle = read_reference_bundle(args.reference)
        try:
            score = evaluate_file(args.model, bundle)
        except (NoiseCeilingUndefined, ZeroRankVariance) as exc:
            raise ReferenceSetDegenerate(str(exc)) from exc
    except json.JSONDecodeError as exc:
        print(f"error [malformed_file]: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error [malformed_file]: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except RsaBenchError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    report = render_report(
        bundle.track, _sha256_file(args.model), _bundle_digest(args.reference), score
    )
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report)
    return EXIT_OK


# -- validate -----------------------------------------------------------------

_CHECKS = ("parse", "track", "sub-targets", "size", "symmetry", "diagonal", "finiteness")


def _first_bad_entry(matrices: dict[str, np.ndarray], pred) -> tuple[str, int, int] | None:
    for name, m in matrices.items():
        bad = np.argwhere(pred(m))
        if len(bad):
            i, j = bad[0]
            return name, int(i), int(j)
    return None


def run_validation_checks(path: str) -> tuple[dict[str, str], bool]:
    """Run the seven file checks; returns ({check: message}, all_passed).

    Messages start with "pass", "FAIL", or "skipped". Later checks that
    depend on an earlier failure are skipped rather than guessed at.
    """
    results: dict[str, str] = {}

    def skip_rest(from_check: str, reason: str) -> None:
        started = False
        for c in _CHECKS:
            if c == from_check:
                started = True
            if started and c not in results:
                results[c] = f"skipped ({reason})"

    # parse: JSON with the right top-level shape
    doc = None
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        results["parse"] = f"FAIL {exc}"
    if doc is not None:
        required = {"format_version", "track", "condition_ids", "targets"}
        if not isinstance(doc, dict) or set(doc) != required:
            results["parse"] = "FAIL top-level keys must be exactly " + str(
                sorted(required)
            )
        elif doc["format_version"] != FORMAT_VERSION:
            results["parse"] = (
                f"FAIL unsupported format_version {doc['format_version']!r}"
            )
        elif not isinstance(doc["condition_ids"], list) or not all(
            isinstance(c, str) for c in doc["condition_ids"]
        ):
            results["parse"] = "FAIL condition_ids must be a list of strings"
        elif len(set(doc["condition_ids"])) != len(doc["condition_ids"]):
            results["parse"] = "FAIL condition_ids contains duplicates"
        elif not isinstance(doc["targets"], dict):
            results["parse"] = "FAIL targets must be an object"
        else:
            results["parse"] = "pass"
    if results["parse"] != "pass":
        skip_rest("track", "parse failed")
        return results, False

    track = doc["track"]
    if track in TRACKS:
        results["track"] = f"pass ({track})"
    else:
        results["track"] = f"FAIL unknown track {track!r}"
        skip_rest("sub-targets", "track unknown")
        return results, False

    expected = set(sub_targets_for(track))
    got = set(doc["targets"])
    if got == expected:
        results["sub-targets"] = "pass (" + ", ".join(sub_targets_for(track)) + ")"
    else:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        detail = []
        if missing:
            detail.append(f"missing {missing}")
        if extra:
            detail.append(f"unexpected {extra}")
        results["sub-targets"] = "FAIL " + ", ".join(detail)
        skip_rest("size", "sub-targets wrong")
        return results, False

    n = len(doc["condition_ids"])
    matrices: dict[str, np.ndarray] = {}
    size_fail = None
    for name in sub_targets_for(track):
        rows = doc["targets"][name]
        ok = (
            isinstance(rows, list)
            and len(rows) == n
            and all(
                isinstance(r, list)
                and len(r) == n
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in r)
                for r in rows
            )
        )
        if not ok:
            size_fail = f"FAIL {name} is not a numeric {n}x{n} matrix"
            break
        matrices[name] = np.asarray(rows, dtype=np.float64)
    if n < 3 and size_fail is None:
        size_fail = f"FAIL need at least 3 conditions, got {n}"
    if size_fail:
        results["size"] = size_fail
        skip_rest("symmetry", "size wrong")
        return results, False
    results["size"] = f"pass ({n}x{n})"

    finite = all(np.all(np.isfinite(m)) for m in matrices.values())
    if not finite:
        results["symmetry"] = "skipped (non-finite entries)"
        results["diagonal"] = "skipped (non-finite entries)"
    else:
        sym_fail = None
        for name, m in matrices.items():
            tol = ASYMMETRY_RTOL * (1.0 + float(np.max(np.abs(m))))
            delta = np.abs(m - m.T)
            bad = np.argwhere(delta > tol)
            if len(bad):
                i, j = (int(bad[0][0]), int(bad[0][1]))
                sym_fail = (
                    f"FAIL {name}[{i}][{j}] differs from [{j}][{i}] "
                    f"by {delta[i, j]:.3e} (tolerance {tol:.3e})"
                )
                break
        results["symmetry"] = sym_fail or "pass"

        diag_fail = None
        for name, m in matrices.items():
            d = np.abs(np.diag(m))
            bad = np.argwhere(d > DIAGONAL_ATOL)
            if len(bad):
                i = int(bad[0][0])
                diag_fail = f"FAIL {name}[{i}][{i}] = {m[i, i]:.3e}, expected 0"
                break
        results["diagonal"] = diag_fail or "pass"

    hit = _first_bad_entry(matrices, lambda m: ~np.isfinite(m))
    if hit is None:
        results["finiteness"] = "pass"
    else:
        name, i, j = hit
        results["finiteness"] = f"FAIL {name}[{i}][{j}] is {matrices[name][i, j]}"

    all_pass = all(results[c].startswith("pass") for c in _CHECKS)
    return results, all_pass


def cmd_validate(args: argparse.Namespace) -> int:
    results, all_pass = run_validation_checks(args.file)
    width = max(len(c) for c in _CHECKS)
    for check in _CHECKS:
        print(f"{check:<{width}}  {results[check]}")
    return EXIT_OK if all_pass else EXIT_FORMAT


# -- generate -----------------------------------------------------------------

def cmd_generate(args: argparse.Namespace) -> int:
    kind = "block-structured" if args.kind == "block" else args.kind
    try:
        spec = SyntheticSpec(
            n_conditions=args.n,
            n_subjects=args.subjects,
            noise_sigma=args.sigma,
            seed=args.seed,
            truth_kind=kind,
            block_jitter=args.jitter,
        )
    except ValueError as exc:
        print(f"error [usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_reference_bundle(args.out, spec, args.track)
    bundle = read_reference_bundle(args.out)
    for name in bundle.sub_targets:
        ceiling = noise_ceiling(bundle.subject_sets[name])
        print(f"ceiling_r2[{name}] = {ceiling.ceiling_r2:.6f}")
    return EXIT_OK


# -- serve --------------------------------------------------------------------

def cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = ChallengeConfig.from_file(args.config)
        service = ChallengeService(config)
    except RsaBenchError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    for track in sorted(service.ceilings):
        for name, ceiling in service.ceilings[track].items():
            print(f"startup ceiling_r2 {track}/{name} = {ceiling.ceiling_r2:.6f}")

    import uvicorn

    from .webapi import create_app

    app = create_app(service)

    @app.on_event("shutdown")
    async def _close_journal() -> None:
        service.close()

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# -- submit (participant helper) ------------------------------------------------

def cmd_submit(args: argparse.Namespace) -> int:
    token = os.environ.get("ALGONAUTS_TOKEN")
    if not token:
        print("error [usage]: set ALGONAUTS_TOKEN to your team token", file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error [malformed_file]: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    body = {
        "track": args.track or doc.get("track"),
        "attestation": True,
        "rdm_file": doc,
    }
    if args.report_url:
        body["report_url"] = args.report_url
    request = urllib.request.Request(
        args.url.rstrip("/") + "/api/v1/submissions",
        data=json.dumps(body).encode("utf-8"),
        headers={
            "Authorization": f"Bearer {token}",
            "Content-Type": "application/json",
        },
        method="POST",
    )
    try:
        with urllib.request.urlopen(request) as response:
            print(response.read().decode("utf-8"))
        return EXIT_OK
    except urllib.error.HTTPError as exc:
        print(exc.read().decode("utf-8"), file=sys.stderr)
        return 1
    except urllib.error.URLError as exc:
        print(f"error [connection]: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsabench",
        description="Score model RDMs against multi-subject reference RDMs.",
    )
    parser.add_argument("--version", action="version", version=f"rsabench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score a model RDM file against a reference bundle")
    p.add_argument("--model", required=True, help="model RDM file (JSON)")
    p.add_argument("--reference", required=True, help="reference bundle directory")
    p.add_argument("--out", help="also write the report to this path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("validate", help="check an RDM file against the format rules")
    p.add_argument("file", help="RDM file to check")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a seeded synthetic reference bundle")
    p.add_argument("--n", type=int, default=78, help="number of conditions")
    p.add_argument("--subjects", type=int, default=15, help="number of subjects")
    p.add_argument("--sigma", type=float, default=0.5, help="subject noise scale")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument(
        "--kind",
        choices=["random-features", "block"],
        default="random-features",
        help="ground-truth structure",
    )
    p.add_argument("--jitter", type=float, default=0.05, help="block value jitter")
    p.add_argument("--track", choices=sorted(TRACKS), default="fmri")
    p.add_argument("--out", required=True, help="bundle output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="run the challenge service")
    p.add_argument("--config", required=True, help="challenge config file (JSON)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("submit", help="send an RDM file to a running challenge service")
    p.add_argument("--file", required=True, help="RDM file to submit")
    p.add_argument("--url", required=True, help="service base URL")
    p.add_argument("--track", help="track override (defaults to the file's track)")
    p.add_argument("--report-url", help="optional link to an accompanying report")
    p.set_defaults(func=cmd_submit)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
