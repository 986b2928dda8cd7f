"""HTTP surface: meeting lifecycle endpoints plus a live event stream.

The server only advances a meeting when asked (the UI's auto-advance loop or
the CLI drives continuous meetings), which keeps behavior deterministic under
test. Commands for one meeting are serialized behind a per-meeting lock;
event fan-out never blocks the engine. The stream endpoint replays the log
from ``?from_seq=`` and then follows live appends as newline-delimited JSON.
"""

from __future__ import annotations

import argparse
import base64
import binascii
import threading
from pathlib import Path
from typing import Iterator

import uvicorn
from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from . import errors
from .domain import (
    EngineConfig,
    Meeting,
    Message,
    RequirementForm,
    SOPStage,
    canonical_dumps,
    validate_form,
)
from .engine import MeetingEngine, SteppingClock, global_turn_budget
from .mocks import mock_toolbox
from .persistence import MeetingStore
from .registry import default_registry, roles_by_id

MAX_IMAGE_BYTES = 8 * 1024 * 1024


class CreateMeetingRequest(BaseModel):
    form: dict
    role_ids: list[str] | None = None
    config: dict = Field(default_factory=dict)


class PostMessageRequest(BaseModel):
    text: str = ""
    image_b64: str | None = None
    image_media_type: str = "image/png"


class AdvanceRequest(BaseModel):
    turns: int | None = None
    run_to_completion: bool = False


class _MeetingRuntime:
    def __init__(self, meeting: Meeting, engine: MeetingEngine):
        self.meeting = meeting
        self.engine = engine
        self.lock = threading.Lock()
        self.changed = threading.Condition()

    def notify(self):
        with self.changed:
            self.changed.notify_all()


class MeetingService:
    """Owns live meeting state, the store, and per-meeting serialization."""

    def __init__(self, root: str | Path, seed: int = 0):
        self.store = MeetingStore(root)
        self.seed = seed
        self._runtimes: dict[str, _MeetingRuntime] = {}
        self._registry_lock = threading.Lock()

    # -- helpers -------------------------------------------------------------

    def _runtime(self, meeting_id: str) -> _MeetingRuntime:
        runtime = self._runtimes.get(meeting_id)
        if runtime is None:
            raise errors.UnknownMeeting(meeting_id)
        return runtime

    def _build_engine(self, meeting_id: str, config: EngineConfig) -> MeetingEngine:
        toolbox = mock_toolbox(
            config.seed or self.seed,
            self.store.meetings_dir / meeting_id / "images",
        )

        def on_message(mid: str, message: Message):
            self.store.append_event(mid, message)
            runtime = self._runtimes.get(mid)
            if runtime is not None:
                runtime.notify()

        return MeetingEngine(toolbox, clock=SteppingClock(), on_message=on_message)

    # -- commands -------------------------------------------------------------

    def create_meeting(self, form_data: dict, role_ids: list[str] | None,
                       config_overrides: dict) -> Meeting:
        form = RequirementForm.from_dict(form_data)
        report = validate_form(form)
        if not report.ok:
            raise errors.InvalidForm(report.violations)
        roster = roles_by_id(role_ids)
        config = EngineConfig.from_dict({**EngineConfig().to_dict(), **config_overrides})
        with self._registry_lock:
            import uuid

            meeting_id = uuid.uuid4().hex[:12]
            engine = self._build_engine(meeting_id, config)
            meeting = engine.create_meeting(form, roster, config, meeting_id=meeting_id)
            self.store.create(meeting)
            self._runtimes[meeting_id] = _MeetingRuntime(meeting, engine)
        return meeting

    def post_message(self, meeting_id: str, text: str, image_bytes: bytes | None = None,
                     media_type: str = "image/png") -> int:
        runtime = self._runtime(meeting_id)
        with runtime.lock:
            meeting = runtime.meeting
            image_ref = None
            if image_bytes is not None:
                store = runtime.engine.toolbox.image_store
                image_ref = store.store(image_bytes, media_type).id
            runtime.meeting = runtime.engine.inject_user_message(meeting, text, image_ref)
            return runtime.meeting.transcript[-1].id

    def advance(self, meeting_id: str, turns: int | None, run_to_completion: bool):
        runtime = self._runtime(meeting_id)
        with runtime.lock:
            meeting = runtime.meeting
            if meeting.stage is SOPStage.COMPLETED:
                raise errors.MeetingCompleted(meeting_id)
            results = []
            budget_exhausted = False
            if run_to_completion:
                budget = global_turn_budget(meeting.config)
                for _ in range(budget):
                    if meeting.stage is SOPStage.COMPLETED:
                        break
                    meeting, result = runtime.engine.advance(meeting)
                    results.append(result)
                budget_exhausted = meeting.stage is not SOPStage.COMPLETED
            else:
                for _ in range(max(1, turns or 1)):
                    if meeting.stage is SOPStage.COMPLETED:
                        break
                    meeting, result = runtime.engine.advance(meeting)
                    results.append(result)
            runtime.meeting = meeting
            self.store.save_snapshot(meeting)
            return results, budget_exhausted

    def snapshot(self, meeting_id: str) -> Meeting:
        return self._runtime(meeting_id).meeting

    def export(self, meeting_id: str):
        runtime = self._runtime(meeting_id)
        with runtime.lock:
            return self.store.export_document(runtime.meeting)

    def events_after(self, meeting_id: str, after_seq: int) -> list[Message]:
        meeting = self._runtime(meeting_id).meeting
        return [m for m in meeting.transcript if m.id > after_seq]

    def stream(self, meeting_id: str, from_seq: int) -> Iterator[str]:
        runtime = self._runtime(meeting_id)
        last = from_seq - 1
        while True:
            fresh = self.events_after(meeting_id, last)
            for message in fresh:
                last = message.id
                yield canonical_dumps(message.to_dict()) + "\n"
            if runtime.meeting.stage is SOPStage.COMPLETED and not self.events_after(meeting_id, last):
                return
            with runtime.changed:
                runtime.changed.wait(timeout=0.25)


def create_app(service: MeetingService, api_token: str | None = None) -> FastAPI:
    """App factory. When ``api_token`` is set (or ``$STUDIOMEET_API_TOKEN`` at
    server start), every endpoint except /health requires the matching
    ``X-Api-Token`` header."""
    app = FastAPI(title="studiomeet", version="0.1.0")
    app.state.service = service

    if api_token:

        @app.middleware("http")
        async def require_token(request, call_next):
            if request.url.path != "/health" and request.headers.get("x-api-token") != api_token:
                from fastapi.responses import JSONResponse

                return JSONResponse(status_code=401, content={"detail": "invalid API token"})
            return await call_next(request)

    def handle(fn):
        try:
            return fn()
        except errors.UnknownMeeting as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except errors.MeetingCompleted as exc:
            raise HTTPException(status_code=409, detail="meeting completed") from exc
        except errors.NoArtifacts as exc:
            raise HTTPException(status_code=409, detail="meeting has no artifacts yet") from exc
        except (errors.InvalidForm, KeyError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/roles")
    def roles():
        return {"roles": [card.to_dict() for card in default_registry()]}

    @app.post("/meetings", status_code=201)
    def create_meeting(body: CreateMeetingRequest):
        meeting = handle(lambda: service.create_meeting(body.form, body.role_ids, body.config))
        return {"meeting_id": meeting.id}

    @app.get("/meetings/{meeting_id}")
    def get_meeting(meeting_id: str):
        return handle(lambda: service.snapshot(meeting_id).to_dict())

    @app.post("/meetings/{meeting_id}/messages", status_code=202)
    def post_message(meeting_id: str, body: PostMessageRequest):
        image_bytes = None
        if body.image_b64:
            try:
                image_bytes = base64.b64decode(body.image_b64, validate=True)
            except (binascii.Error, ValueError) as exc:
                raise HTTPException(status_code=422, detail="invalid base64 image") from exc
            if len(image_bytes) > MAX_IMAGE_BYTES:
                raise HTTPException(status_code=413, detail="image exceeds 8 MiB")
        seq = handle(
            lambda: service.post_message(meeting_id, body.text, image_bytes,
                                         body.image_media_type)
        )
        return {"seq": seq}

    @app.post("/meetings/{meeting_id}/advance")
    def advance(meeting_id: str, body: AdvanceRequest):
        results, budget_exhausted = handle(
            lambda: service.advance(meeting_id, body.turns, body.run_to_completion)
        )
        return {
            "turns": [r.to_dict() for r in results],
            "budget_exhausted": budget_exhausted,
            "stage": service.snapshot(meeting_id).stage.value,
        }

    @app.get("/meetings/{meeting_id}/export")
    def export(meeting_id: str):
        bundle = handle(lambda: service.export(meeting_id))
        meeting = service.snapshot(meeting_id)
        images = []
        for path in bundle.image_paths:
            data = path.read_bytes()
            images.append({"name": path.name, "b64": base64.b64encode(data).decode("ascii")})
        return {
            "plan_md": bundle.markdown_path.read_text(encoding="utf-8"),
            "plan_json": meeting.to_dict(),
            "images": images,
        }

    @app.get("/meetings/{meeting_id}/events")
    def events(meeting_id: str, from_seq: int = 1):
        handle(lambda: service.snapshot(meeting_id))  # 404 before the stream starts
        return StreamingResponse(
            service.stream(meeting_id, from_seq), media_type="application/x-ndjson"
        )

    return app


def main(argv: list[str] | None = None) -> int:
    import os

    parser = argparse.ArgumentParser(description="Run the studiomeet meeting server")
    parser.add_argument("--root", default="./studiomeet-data", help="storage root directory")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8642)
    parser.add_argument("--seed", type=int, default=0, help="seed for the mock backends")
    args = parser.parse_args(argv)
    token = os.environ.get("STUDIOMEET_API_TOKEN") or None
    app = create_app(MeetingService(args.root, seed=args.seed), api_token=token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
