"""Headless runner and admin tool.

Subcommands:

    run     run a meeting (mock or real backends) to completion and export it
    export  re-export the document for a logged meeting
    replay  rebuild a meeting from its event log and verify it against the
            saved snapshot (event-sourcing equality)
    eval    score-analysis statistics from a judges CSV
    serve   start the HTTP server

Exit codes: 0 ok, 1 runtime error, 2 usage error. ``run`` writes a
machine-readable ``summary.json`` next to its outputs. In mock mode the
meeting id, clock and backends all derive from ``--seed``, so identical
invocations produce byte-identical logs and exports.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

from . import errors
from .backends import (
    BackendDescriptor,
    JsonSearchClient,
    OpenAIChatTextClient,
    SDWebUICaptionClient,
    SDWebUIImageClient,
    Toolbox,
)
from .domain import EngineConfig, RequirementForm, canonical_dumps
from .engine import Interjection, MeetingEngine, SteppingClock
from .mocks import mock_toolbox
from .persistence import MeetingStore
from .registry import roles_by_id
from .stats import compute_report, emit_plot_data, ingest_scores


def _load_form(path: str) -> RequirementForm:
    if path == "demo":
        raw = resources.files("studiomeet.data").joinpath("demo_form.json").read_text()
    else:
        raw = Path(path).read_text(encoding="utf-8")
    return RequirementForm.from_dict(json.loads(raw))


def _load_script(path: str | None, image_store) -> list[Interjection]:
    if not path:
        return []
    entries = json.loads(Path(path).read_text(encoding="utf-8"))
    script = []
    for entry in entries:
        image_ref = None
        if entry.get("image_path"):
            data = Path(entry["image_path"]).read_bytes()
            image_ref = image_store.store(data).id
        script.append(Interjection(turn=int(entry["turn"]), text=entry["text"],
                                   image_ref=image_ref))
    return script


def _real_toolbox(config: EngineConfig, image_root) -> Toolbox:
    from .backends import ImageStore

    endpoints = dict(config.backend_endpoints)
    store = ImageStore(image_root)

    def desc(kind: str, default_env: str) -> BackendDescriptor:
        endpoint = endpoints.get(kind)
        if not endpoint:
            raise errors.BackendUnavailable(
                f"no endpoint configured for {kind}; set config.backend_endpoints[{kind!r}]"
            )
        return BackendDescriptor(kind=kind, endpoint=endpoint, auth_env=default_env,
                                 timeout_ms=config.backend_timeout_ms,
                                 retries=config.backend_retries)

    image_desc = desc("image_txt2img", "STUDIOMEET_IMAGE_TOKEN")
    return Toolbox(
        text=OpenAIChatTextClient(desc("text_gen", "STUDIOMEET_TEXT_TOKEN")),
        image=SDWebUIImageClient(image_desc, store),
        captioner=SDWebUICaptionClient(image_desc, store),
        search=JsonSearchClient(desc("web_search", "STUDIOMEET_SEARCH_TOKEN")),
        image_store=store,
    )


def _deterministic_meeting_id(form: RequirementForm, seed: int) -> str:
    digest = hashlib.sha256(f"{canonical_dumps(form.to_dict())}:{seed}".encode()).hexdigest()
    return f"mock-{digest[:10]}"


def cmd_run(args) -> int:
    out_root = Path(args.out)
    store = MeetingStore(out_root)
    form = _load_form(args.form)
    roster = roles_by_id(args.roles.split(",") if args.roles else None)
    overrides = json.loads(Path(args.config).read_text()) if args.config else {}
    config = EngineConfig.from_dict({
        **EngineConfig().to_dict(),
        "seed": args.seed,
        **overrides,
    })

    if args.backends == "mock":
        meeting_id = _deterministic_meeting_id(form, args.seed)
        toolbox = mock_toolbox(args.seed, store.meetings_dir / meeting_id / "images")
        clock = SteppingClock()
    else:
        meeting_id = None
        toolbox = None  # built after the id exists
        clock = None

    summary: dict = {"backends": args.backends, "seed": args.seed}
    try:
        engine = MeetingEngine(toolbox, clock=clock, on_message=store.append_event)
        meeting = engine.create_meeting(form, roster, config, meeting_id=meeting_id)
        if args.backends == "real":
            engine.toolbox = _real_toolbox(config, store.meetings_dir / meeting.id / "images")
        store.create(meeting)
        script = _load_script(args.script, store.image_store(meeting.id))
        meeting, _plan = engine.run_to_completion(meeting, script)
        store.save_snapshot(meeting)
        bundle = store.export_document(meeting)
        summary.update(
            meeting_id=meeting.id,
            stage=meeting.stage.value,
            artifacts=[a.kind.value for a in meeting.artifact_list()],
            degraded=[a.kind.value for a in meeting.artifact_list() if a.degraded],
            plan_md=str(bundle.markdown_path),
            plan_json=str(bundle.sidecar_path),
            status="ok",
        )
        code = 0
    except errors.BudgetExhausted as exc:
        store.save_snapshot(exc.meeting)
        summary.update(meeting_id=exc.meeting.id, stage=exc.meeting.stage.value,
                       status="budget_exhausted")
        code = 1
    except errors.StudiomeetError as exc:
        summary.update(status="error", error=f"{type(exc).__name__}: {exc}")
        code = 1
    (out_root / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return code


def cmd_export(args) -> int:
    store = MeetingStore(args.root)
    try:
        meeting = store.load_meeting(args.meeting)
        bundle = store.export_document(meeting, out_dir=args.out)
    except errors.StudiomeetError as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return 1
    print(bundle.markdown_path)
    return 0


def cmd_replay(args) -> int:
    store = MeetingStore(args.root)
    try:
        replayed = store.load_meeting(args.meeting)
    except errors.StudiomeetError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 1
    snapshot = store.load_snapshot(args.meeting)
    if snapshot is None:
        print("replay ok (no snapshot to compare against)")
        return 0
    if canonical_dumps(replayed.to_dict()) != canonical_dumps(snapshot.to_dict()):
        print("replay mismatch: event-sourced state differs from snapshot", file=sys.stderr)
        return 1
    print(f"replay ok: {len(replayed.transcript)} events reproduce the snapshot")
    return 0


def cmd_eval(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        records = ingest_scores(args.scores)
        report = compute_report(records, alpha=args.alpha)
    except errors.StatsError as exc:
        print(f"eval failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    (out_dir / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    (out_dir / "plot_data.csv").write_text(emit_plot_data(report))
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    from .service import main as serve_main

    serve_args = ["--root", args.root, "--host", args.host, "--port", str(args.port),
                  "--seed", str(args.seed)]
    return serve_main(serve_args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="studiomeet")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one meeting to completion and export it")
    run.add_argument("--form", required=True,
                     help="requirement form JSON file, or 'demo' for the bundled form")
    run.add_argument("--roles", default=None, help="comma-separated registry role ids")
    run.add_argument("--script", default=None, help="interjection script JSON file")
    run.add_argument("--backends", choices=["mock", "real"], default="mock")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--config", default=None, help="engine config overrides JSON file")
    run.add_argument("--out", default="./studiomeet-out")
    run.set_defaults(fn=cmd_run)

    export = sub.add_parser("export", help="export the document for a logged meeting")
    export.add_argument("--meeting", required=True)
    export.add_argument("--root", default="./studiomeet-out")
    export.add_argument("--out", default=None)
    export.set_defaults(fn=cmd_export)

    replay = sub.add_parser("replay", help="verify event-sourcing equality for a meeting")
    replay.add_argument("--meeting", required=True)
    replay.add_argument("--root", default="./studiomeet-out")
    replay.set_defaults(fn=cmd_replay)

    evaluate = sub.add_parser("eval", help="judge-score statistics from a CSV")
    evaluate.add_argument("--scores", required=True)
    evaluate.add_argument("--out", default="./studiomeet-eval")
    evaluate.add_argument("--alpha", type=float, default=0.05)
    evaluate.set_defaults(fn=cmd_eval)

    serve = sub.add_parser("serve", help="start the HTTP server")
    serve.add_argument("--root", default="./studiomeet-data")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8642)
    serve.add_argument("--seed", type=int, default=0)
    serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
