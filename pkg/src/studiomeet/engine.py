"""The meeting state machine.

One ``advance`` call executes exactly one agent turn: drain pending human
inputs, pick the role responsible for the current stage, assemble the prompt,
call the text backend, and either store a validated stage artifact (moving
the meeting forward) or keep discussing. A stage completes when its
responsible role emits a message whose payload validates as the stage's
artifact kind; when the per-stage turn budget runs out the engine forces the
transition with a best-effort artifact flagged degraded, so uncooperative
backends can never livelock a meeting.

All state evolution funnels through :func:`apply_message`, which is also what
the event-sourced replay in :mod:`studiomeet.persistence` folds the log with —
live state and replayed state agree by construction, and the test suite
checks that they do.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

from . import prompting
from .backends import ImageParams, Toolbox
from .domain import (
    FREE_TEXT,
    HUMAN_SPEAKER,
    ArtifactKind,
    EngineConfig,
    Meeting,
    Message,
    MessageKind,
    RequirementForm,
    RoleCard,
    RoleTitle,
    Skill,
    SOPStage,
    StageArtifact,
    ToolKind,
    minimal_body,
    ordered_artifacts,
    sop_index,
    validate_artifact,
    validate_form,
)
from .errors import (
    BudgetExhausted,
    EmptyRoster,
    InvalidForm,
    MeetingCompleted,
    MissingCoreRole,
)

#: Stage count used for the global turn budget (RequirementImport..Output).
BUDGET_STAGES = 6


@dataclass(frozen=True)
class StageDuty:
    title: RoleTitle
    artifact_kind: ArtifactKind


#: Which role answers for each working stage, and the artifact that closes it.
STAGE_ASSIGNMENT: Mapping[SOPStage, StageDuty] = {
    SOPStage.REQUIREMENT_ANALYSIS: StageDuty(RoleTitle.PRODUCT_MANAGER, ArtifactKind.REQUIREMENT_ANALYSIS),
    SOPStage.DESIGN_PROPOSAL: StageDuty(RoleTitle.DESIGN_DIRECTOR, ArtifactKind.SCHEME_LIST),
    SOPStage.DETAILED_DESIGN: StageDuty(RoleTitle.CMF_DESIGNER, ArtifactKind.CMF_SCHEME_LIST),
    SOPStage.EVALUATION_REPORT: StageDuty(RoleTitle.RECORDER, ArtifactKind.EVALUATION_REPORT),
    SOPStage.OUTPUT: StageDuty(RoleTitle.RECORDER, ArtifactKind.DESIGN_PLAN),
}

_NEXT_STAGE_AFTER_KIND: Mapping[ArtifactKind, SOPStage] = {
    ArtifactKind.REQUIREMENT_ANALYSIS: SOPStage.DESIGN_PROPOSAL,
    ArtifactKind.SCHEME_LIST: SOPStage.DETAILED_DESIGN,
    ArtifactKind.CMF_SCHEME_LIST: SOPStage.EVALUATION_REPORT,
}


@dataclass(frozen=True)
class TurnResult:
    """What one advance did."""

    message: Message
    stage_before: SOPStage
    stage_after: SOPStage
    artifact_emitted: ArtifactKind | None = None
    backend_calls: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        forward = sop_index(self.stage_after) >= sop_index(self.stage_before)
        revision = (
            self.stage_before is SOPStage.EVALUATION_REPORT
            and self.stage_after is SOPStage.DETAILED_DESIGN
        )
        if not (forward or revision):
            raise ValueError(f"illegal transition {self.stage_before} -> {self.stage_after}")

    def to_dict(self) -> dict:
        return {
            "message": self.message.to_dict(),
            "stage_before": self.stage_before.value,
            "stage_after": self.stage_after.value,
            "artifact_emitted": self.artifact_emitted.value if self.artifact_emitted else None,
            "backend_calls": [[kind, duration] for kind, duration in self.backend_calls],
        }


@dataclass(frozen=True)
class Interjection:
    """One scripted human message: applied just before advance number ``turn``."""

    turn: int
    text: str
    image_ref: str | None = None


def global_turn_budget(config: EngineConfig) -> int:
    return config.max_turns_per_stage * BUDGET_STAGES * (1 + config.max_revision_loops)


# ---------------------------------------------------------------------------
# pure state transitions


def create_meeting(
    form: RequirementForm,
    roster: Sequence[RoleCard],
    config: EngineConfig,
    *,
    meeting_id: str | None = None,
    now: float | None = None,
) -> Meeting:
    """A fresh meeting at RequirementImport with the topic announced."""
    report = validate_form(form)
    if not report.ok:
        raise InvalidForm(report.violations)
    if not roster:
        raise EmptyRoster("a meeting needs at least one role")
    for duty in STAGE_ASSIGNMENT.values():
        role = next((r for r in roster if r.title == duty.title.value), None)
        if role is None:
            raise MissingCoreRole(f"roster lacks a {duty.title.value}")
        if role.skill_for(duty.artifact_kind.value) is None:
            raise MissingCoreRole(
                f"{duty.title.value} has no skill producing {duty.artifact_kind.value}"
            )
    meeting = Meeting(
        id=meeting_id or uuid.uuid4().hex[:12],
        form=form,
        roster=tuple(roster),
        stage=SOPStage.REQUIREMENT_IMPORT,
        config=config,
    )
    announcement = Message(
        id=1,
        speaker=HUMAN_SPEAKER,
        stage=SOPStage.REQUIREMENT_IMPORT,
        kind=MessageKind.SYSTEM,
        content=f'Meeting topic set to the design requirement: "{form.topic}".',
        timestamp=time.time() if now is None else now,
    )
    return apply_message(meeting, announcement)


def inject_user_message(
    meeting: Meeting,
    text: str,
    image_ref: str | None = None,
    *,
    now: float | None = None,
) -> Meeting:
    """Append a human interjection; it is consumed by the next agent turn."""
    if meeting.stage is SOPStage.COMPLETED:
        raise MeetingCompleted(meeting.id)
    message = Message(
        id=meeting.next_message_id(),
        speaker=HUMAN_SPEAKER,
        stage=meeting.stage,
        kind=MessageKind.IMAGE if image_ref else MessageKind.CHAT,
        content=text,
        attachments=(image_ref,) if image_ref else (),
        timestamp=time.time() if now is None else now,
    )
    return apply_message(meeting, message)


def maybe_revise(meeting: Meeting) -> Meeting:
    """Decide the post-evaluation transition: one more detailed-design pass
    when any scheme scored under the revision threshold and the loop bound
    still allows it; Output otherwise."""
    artifact = meeting.artifacts.get(ArtifactKind.EVALUATION_REPORT)
    if artifact is None:
        raise ValueError("maybe_revise requires a stored evaluation_report")
    worst = min(
        min(entry["scores"][dim] for dim in entry["scores"])
        for entry in artifact.body["entries"]
    )
    config = meeting.config
    if worst < config.revision_threshold and meeting.iteration_count < config.max_revision_loops:
        return replace(
            meeting, stage=SOPStage.DETAILED_DESIGN, iteration_count=meeting.iteration_count + 1
        )
    return replace(meeting, stage=SOPStage.OUTPUT)


def apply_message(meeting: Meeting, message: Message) -> Meeting:
    """Fold one message into the meeting state.

    This is the single source of truth for state evolution: the live engine
    and the event-log replay both use it, so they cannot drift apart.
    """
    if message.id != meeting.next_message_id():
        raise ValueError(
            f"message id {message.id} breaks monotonicity (expected {meeting.next_message_id()})"
        )
    transcript = meeting.transcript + (message,)
    if message.speaker == HUMAN_SPEAKER:
        pending = meeting.pending_user_inputs
        if message.kind in (MessageKind.CHAT, MessageKind.IMAGE):
            pending = pending + (message.id,)
        return replace(meeting, transcript=transcript, pending_user_inputs=pending)

    # Agent turn: it consumed every pending input, and it speaks at the
    # engine's effective stage (which records the unconditional import hop).
    updated = replace(
        meeting, transcript=transcript, pending_user_inputs=(), stage=message.stage
    )
    if message.kind is not MessageKind.ARTIFACT:
        return updated
    artifact = message.artifact
    updated = replace(updated, artifacts=ordered_artifacts(updated.artifacts, artifact))
    if artifact.kind is ArtifactKind.EVALUATION_REPORT:
        return maybe_revise(updated)
    if artifact.kind is ArtifactKind.DESIGN_PLAN:
        return replace(updated, stage=SOPStage.COMPLETED)
    return replace(updated, stage=_NEXT_STAGE_AFTER_KIND[artifact.kind])


def turns_in_stage(meeting: Meeting, stage: SOPStage) -> int:
    """Agent turns spent in the current residence of ``stage`` (the suffix of
    the transcript authored at that stage)."""
    count = 0
    for message in reversed(meeting.transcript):
        if message.stage is not stage:
            break
        if message.speaker != HUMAN_SPEAKER:
            count += 1
    return count


def _addressed_role(meeting: Meeting, responsible: RoleCard) -> tuple[RoleCard, Skill] | None:
    """A summoned, non-responsible role speaks only when a pending human
    message names it."""
    texts = [m.content.lower() for m in meeting.pending_messages() if m.content]
    if not texts:
        return None
    for role in meeting.roster:
        if role.id == responsible.id:
            continue
        if any(role.name.lower() in text for text in texts):
            skill = role.skill_for(FREE_TEXT)
            if skill is not None:
                return role, skill
    return None


class SteppingClock:
    """Deterministic wall clock for mock runs: fixed start, fixed step."""

    def __init__(self, start: float = 1735689600.0, step: float = 1.0):
        self._now = start
        self._step = step

    def __call__(self) -> float:
        value = self._now
        self._now += self._step
        return value


class MeetingEngine:
    """Drives meetings over a backend toolbox.

    The engine holds no meeting state; callers thread the ``Meeting`` value
    through. ``on_message`` (if given) sees every message the engine appends,
    which is how the persistence layer and the event stream hook in.
    """

    def __init__(
        self,
        toolbox: Toolbox,
        clock: Callable[[], float] | None = None,
        on_message: Callable[[str, Message], None] | None = None,
    ):
        self.toolbox = toolbox
        self.clock = clock or time.time
        self.on_message = on_message

    # -- lifecycle ---------------------------------------------------------

    def create_meeting(
        self,
        form: RequirementForm,
        roster: Sequence[RoleCard],
        config: EngineConfig,
        meeting_id: str | None = None,
    ) -> Meeting:
        return create_meeting(
            form, roster, config, meeting_id=meeting_id, now=self.clock()
        )

    def inject_user_message(self, meeting: Meeting, text: str, image_ref: str | None = None) -> Meeting:
        updated = inject_user_message(meeting, text, image_ref, now=self.clock())
        self._emit(updated.id, updated.transcript[-1])
        return updated

    # -- one agent turn ------------------------------------------------------

    def advance(self, meeting: Meeting) -> tuple[Meeting, TurnResult]:
        if meeting.stage is SOPStage.COMPLETED:
            raise MeetingCompleted(meeting.id)
        stage_before = meeting.stage
        stage = meeting.stage
        if stage is SOPStage.REQUIREMENT_IMPORT:
            stage = SOPStage.REQUIREMENT_ANALYSIS

        calls: list[tuple[str, float]] = []
        duty = STAGE_ASSIGNMENT[stage]
        responsible = meeting.role_by_title(duty.title)
        assert responsible is not None  # guaranteed by create_meeting

        addressed = _addressed_role(meeting, responsible)
        if addressed is not None:
            role, skill = addressed
            expected_kind = None
        else:
            role = responsible
            skill = role.skill_for(duty.artifact_kind.value)
            expected_kind = duty.artifact_kind

        augmentations = self._caption_pending(meeting, calls)
        if addressed is None and any(s.tool == ToolKind.WEB_SEARCH.value for s in role.skills):
            augmentations += self._search_snippets(meeting, calls)

        prompt = prompting.assemble(role, skill, replace(meeting, stage=stage), augmentations)
        reply = self._timed(calls, ToolKind.TEXT_GEN.value, lambda: self.toolbox.text.complete(prompt.text))

        artifact: StageArtifact | None = None
        attachments: tuple[str, ...] = ()
        if expected_kind is not None:
            body = prompting.parse_fenced_json(reply)
            if body is not None and validate_artifact(expected_kind, body).ok:
                body, attachments = self._enrich(meeting, stage, expected_kind, dict(body), calls)
                artifact = StageArtifact(expected_kind, body, role.id)
            elif turns_in_stage(meeting, stage) + 1 >= meeting.config.max_turns_per_stage:
                body = self._degraded_body(meeting, expected_kind)
                artifact = StageArtifact(expected_kind, body, role.id)

        message = Message(
            id=meeting.next_message_id(),
            speaker=role.id,
            stage=stage,
            kind=MessageKind.ARTIFACT if artifact else MessageKind.CHAT,
            content=reply,
            attachments=attachments,
            timestamp=self.clock(),
            artifact=artifact,
        )
        updated = apply_message(meeting, message)
        self._emit(updated.id, message)
        return updated, TurnResult(
            message=message,
            stage_before=stage_before,
            stage_after=updated.stage,
            artifact_emitted=artifact.kind if artifact else None,
            backend_calls=tuple(calls),
        )

    def run_to_completion(
        self,
        meeting: Meeting,
        interjections: Iterable[Interjection] = (),
    ) -> tuple[Meeting, StageArtifact]:
        """Loop advance (applying scripted interjections) until the meeting
        completes or the global turn budget runs out."""
        script = sorted(interjections, key=lambda i: i.turn)
        budget = global_turn_budget(meeting.config)
        turn = 0
        while meeting.stage is not SOPStage.COMPLETED:
            turn += 1
            if turn > budget:
                raise BudgetExhausted(meeting, budget)
            while script and script[0].turn <= turn:
                entry = script.pop(0)
                meeting = self.inject_user_message(meeting, entry.text, entry.image_ref)
            meeting, _ = self.advance(meeting)
        return meeting, meeting.artifacts[ArtifactKind.DESIGN_PLAN]

    # -- internals -----------------------------------------------------------

    def _emit(self, meeting_id: str, message: Message) -> None:
        if self.on_message is not None:
            self.on_message(meeting_id, message)

    def _timed(self, calls: list[tuple[str, float]], kind: str, fn):
        start = time.perf_counter()
        result = fn()
        calls.append((kind, time.perf_counter() - start))
        return result

    def _caption_pending(self, meeting: Meeting, calls: list) -> list[str]:
        captions: list[str] = []
        for message in meeting.pending_messages():
            for ref in message.attachments:
                text = self._timed(
                    calls, ToolKind.CAPTION.value, lambda r=ref: self.toolbox.captioner.caption(r)
                )
                captions.append(f"CAPTION: {text}")
        return captions

    def _search_snippets(self, meeting: Meeting, calls: list) -> list[str]:
        results = self._timed(
            calls,
            ToolKind.WEB_SEARCH.value,
            lambda: self.toolbox.search.search(meeting.form.topic, meeting.config.search_results),
        )
        return [f"SEARCH: {r.title} - {r.snippet} ({r.url})" for r in results]

    def _image_params(self, config: EngineConfig, salt: int) -> ImageParams:
        return ImageParams(
            seed=config.seed * 1000 + salt,
            steps=config.image_steps,
            width=config.image_size,
            height=config.image_size,
        )

    def _enrich(
        self,
        meeting: Meeting,
        stage: SOPStage,
        kind: ArtifactKind,
        body: dict,
        calls: list,
    ) -> tuple[dict, tuple[str, ...]]:
        """Run the skill's API tool over a freshly parsed artifact body:
        concept images for the scheme list, canny-conditioned variants for the
        CMF list, and the compiled sections of the design plan."""
        if kind is ArtifactKind.SCHEME_LIST:
            return self._enrich_schemes(meeting, body, calls)
        if kind is ArtifactKind.CMF_SCHEME_LIST:
            return self._enrich_cmf(meeting, body, calls)
        if kind is ArtifactKind.DESIGN_PLAN:
            sections = {k.value: dict(a.body) for k, a in meeting.artifacts.items()}
            return {**body, "sections": sections}, ()
        return body, ()

    def _enrich_schemes(self, meeting: Meeting, body: dict, calls: list) -> tuple[dict, tuple[str, ...]]:
        preview = replace(
            meeting,
            artifacts=ordered_artifacts(
                meeting.artifacts, StageArtifact(ArtifactKind.SCHEME_LIST, body, "preview")
            ),
        )
        schemes = []
        refs: list[str] = []
        for i, scheme in enumerate(body["schemes"]):
            tag_prompt = self._timed(
                calls,
                ToolKind.TEXT_GEN.value,
                lambda s=scheme: prompting.compose_image_prompt(preview, s, self.toolbox.text),
            )
            ref = self._timed(
                calls,
                ToolKind.IMAGE_TXT2IMG.value,
                lambda p=tag_prompt, i=i: self.toolbox.image.txt2img(
                    p, self._image_params(meeting.config, 101 + i)
                ),
            )
            refs.append(ref.id)
            schemes.append({**scheme, "image_refs": list(scheme.get("image_refs", [])) + [ref.id]})
        return {**body, "schemes": schemes}, tuple(refs)

    def _enrich_cmf(self, meeting: Meeting, body: dict, calls: list) -> tuple[dict, tuple[str, ...]]:
        store = self.toolbox.image_store
        scheme_art = meeting.artifacts.get(ArtifactKind.SCHEME_LIST)
        fallback_bases = [
            ref
            for scheme in (scheme_art.body.get("schemes", []) if scheme_art else [])
            for ref in scheme.get("image_refs", [])
            if store.exists(ref)
        ]
        entries = []
        refs: list[str] = []
        for i, entry in enumerate(body["entries"]):
            base = entry.get("base_image_ref") or ""
            if not store.exists(base):
                base = fallback_bases[i % len(fallback_bases)] if fallback_bases else ""
            cmf_prompt = ", ".join(
                filter(None, (entry["color"], entry["material"], entry["finishing"], entry.get("prompt", "")))
            )
            result_refs = list(entry.get("result_image_refs", []))
            if base:
                ref = self._timed(
                    calls,
                    ToolKind.IMAGE_CANNY.value,
                    lambda b=base, p=cmf_prompt, i=i: self.toolbox.image.canny_img2img(
                        b, p, self._image_params(meeting.config, 211 + i)
                    ),
                )
                result_refs.append(ref.id)
                refs.append(ref.id)
            entries.append(
                {**entry, "base_image_ref": base, "prompt": cmf_prompt, "result_image_refs": result_refs}
            )
        return {**body, "entries": entries}, tuple(refs)

    def _degraded_body(self, meeting: Meeting, kind: ArtifactKind) -> dict:
        scheme_art = meeting.artifacts.get(ArtifactKind.SCHEME_LIST)
        titles = [
            s.get("title", "") for s in (scheme_art.body.get("schemes", []) if scheme_art else [])
        ]
        body = minimal_body(kind, topic=meeting.form.topic, scheme_titles=[t for t in titles if t])
        if kind is ArtifactKind.DESIGN_PLAN:
            body["sections"] = {k.value: dict(a.body) for k, a in meeting.artifacts.items()}
        body["degraded"] = True
        return body
