"""Core domain types for the design-meeting engine.

Pure data plus validation: no I/O, no backend calls. Every type serializes
to a canonical snake_case JSON form (``to_dict`` / ``from_dict``) that is
the wire and storage format for the rest of the package. Values are
immutable after construction and safe to share across threads.

Token counting everywhere uses the whitespace word-count proxy
(:func:`word_count`), which is backend-independent and testable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence

from .errors import UnknownArtifactKind

HUMAN_SPEAKER = "HUMAN"

FREE_TEXT = "free_text"

#: Placeholder slots a skill template may use.
PLACEHOLDERS = ("requirement", "history", "user_input", "augmentations", "format_rules")

_PLACEHOLDER_RE = re.compile(r"\{([A-Za-z_]+)\}")


def word_count(text: str) -> int:
    """Whitespace-delimited token count; the token measure used everywhere."""
    return len(text.split())


def canonical_dumps(payload: Any) -> str:
    """Canonical JSON text: sorted keys, compact separators, UTF-8 verbatim."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class ToolKind(str, Enum):
    TEXT_GEN = "text_gen"
    IMAGE_TXT2IMG = "image_txt2img"
    IMAGE_CANNY = "image_canny"
    CAPTION = "caption"
    WEB_SEARCH = "web_search"
    NONE = "none"


TOOL_KINDS = frozenset(k.value for k in ToolKind)


class RoleTitle(str, Enum):
    VIRTUAL_USER = "VirtualUser"
    BOSS = "Boss"
    PRODUCT_MANAGER = "ProductManager"
    DESIGN_DIRECTOR = "DesignDirector"
    CMF_DESIGNER = "CmfDesigner"
    RECORDER = "Recorder"
    TECHNICAL_STAFF = "TechnicalStaff"


ROLE_TITLES = frozenset(t.value for t in RoleTitle)

#: Titles the SOP assigns stage work to; a meeting roster must cover these.
CORE_TITLES = (
    RoleTitle.PRODUCT_MANAGER,
    RoleTitle.DESIGN_DIRECTOR,
    RoleTitle.CMF_DESIGNER,
    RoleTitle.RECORDER,
)


class SOPStage(str, Enum):
    REQUIREMENT_IMPORT = "requirement_import"
    REQUIREMENT_ANALYSIS = "requirement_analysis"
    DESIGN_PROPOSAL = "design_proposal"
    DETAILED_DESIGN = "detailed_design"
    EVALUATION_REPORT = "evaluation_report"
    OUTPUT = "output"
    COMPLETED = "completed"


SOP_ORDER: tuple[SOPStage, ...] = tuple(SOPStage)
_SOP_INDEX = {stage: i for i, stage in enumerate(SOP_ORDER)}


def sop_index(stage: SOPStage) -> int:
    return _SOP_INDEX[stage]


class ArtifactKind(str, Enum):
    REQUIREMENT_ANALYSIS = "requirement_analysis"
    SCHEME_LIST = "scheme_list"
    CMF_SCHEME_LIST = "cmf_scheme_list"
    EVALUATION_REPORT = "evaluation_report"
    DESIGN_PLAN = "design_plan"


ARTIFACT_ORDER: tuple[ArtifactKind, ...] = tuple(ArtifactKind)
_ARTIFACT_INDEX = {kind: i for i, kind in enumerate(ARTIFACT_ORDER)}

ARTIFACT_KINDS = frozenset(k.value for k in ArtifactKind)

#: Valid values for a skill's ``output_schema``.
OUTPUT_SCHEMAS = ARTIFACT_KINDS | {FREE_TEXT}

SCORE_DIMENSIONS = ("novelty", "completeness", "feasibility")

SCORE_MIN, SCORE_MAX = 1, 7


def artifact_index(kind: ArtifactKind) -> int:
    return _ARTIFACT_INDEX[kind]


class MessageKind(str, Enum):
    CHAT = "chat"
    ARTIFACT = "artifact"
    IMAGE = "image"
    SYSTEM = "system"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation pass: a list of violations, empty when clean."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# role cards and skills


@dataclass(frozen=True)
class Skill:
    """One ability of a role: a prompt template plus the tool it drives.

    ``tool`` is the tool kind used after/with the text step (``none`` for a
    plain chat skill). ``output_schema`` names the artifact kind the skill
    must emit, or ``free_text``.
    """

    name: str
    prompt_template: str
    output_schema: str = FREE_TEXT
    tool: str = ToolKind.TEXT_GEN.value

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "prompt_template": self.prompt_template,
            "output_schema": self.output_schema,
            "tool": self.tool,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Skill":
        return cls(
            name=data["name"],
            prompt_template=data["prompt_template"],
            output_schema=data.get("output_schema", FREE_TEXT),
            tool=data.get("tool", ToolKind.TEXT_GEN.value),
        )


@dataclass(frozen=True)
class RoleCard:
    """An agent's definition: identity, job responsibilities and skills."""

    id: str
    name: str
    title: str
    responsibilities: str
    skills: tuple[Skill, ...] = ()
    avatar: str | None = None

    def skill_for(self, output_schema: str) -> Skill | None:
        for skill in self.skills:
            if skill.output_schema == output_schema:
                return skill
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "title": self.title,
            "responsibilities": self.responsibilities,
            "skills": [s.to_dict() for s in self.skills],
            "avatar": self.avatar,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RoleCard":
        return cls(
            id=data["id"],
            name=data["name"],
            title=data["title"],
            responsibilities=data["responsibilities"],
            skills=tuple(Skill.from_dict(s) for s in data.get("skills", [])),
            avatar=data.get("avatar"),
        )


def validate_role_card(card: RoleCard) -> ValidationReport:
    """Check every role-card invariant; violations are reported, not thrown."""
    violations: list[str] = []
    if not card.id:
        violations.append("role id must be non-empty")
    if not card.name:
        violations.append("role name must be non-empty")
    if card.title not in ROLE_TITLES:
        violations.append(f"unknown role title {card.title!r}")
    for skill in card.skills:
        if skill.tool not in TOOL_KINDS:
            violations.append(f"skill {skill.name!r} uses unknown tool {skill.tool!r}")
        if skill.output_schema not in OUTPUT_SCHEMAS:
            violations.append(
                f"skill {skill.name!r} declares unknown output schema {skill.output_schema!r}"
            )
        for placeholder in _PLACEHOLDER_RE.findall(skill.prompt_template):
            if placeholder not in PLACEHOLDERS:
                violations.append(
                    f"skill {skill.name!r} template uses unknown placeholder {{{placeholder}}}"
                )
    return ValidationReport(tuple(violations))


def validate_registry(cards: Sequence[RoleCard]) -> ValidationReport:
    """Registry-level invariants: per-card validity, unique ids, core titles."""
    violations: list[str] = []
    seen: set[str] = set()
    for card in cards:
        violations.extend(validate_role_card(card).violations)
        if card.id in seen:
            violations.append(f"duplicate role id {card.id!r}")
        seen.add(card.id)
    titles = {card.title for card in cards}
    for title in CORE_TITLES:
        if title.value not in titles:
            violations.append(f"registry missing core title {title.value}")
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# requirement form


@dataclass(frozen=True)
class RequirementForm:
    """The imported design requirement; its topic becomes the meeting topic."""

    topic: str
    description: str = ""
    constraints: tuple[str, ...] = ()
    quantity: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "topic": self.topic,
            "description": self.description,
            "constraints": list(self.constraints),
            "quantity": self.quantity,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RequirementForm":
        quantity = data.get("quantity")
        return cls(
            topic=data["topic"],
            description=data.get("description", ""),
            constraints=tuple(data.get("constraints") or ()),
            quantity=int(quantity) if quantity is not None else None,
        )


def validate_form(form: RequirementForm) -> ValidationReport:
    violations: list[str] = []
    if not form.topic.strip():
        violations.append("topic must be non-empty")
    if form.quantity is not None and form.quantity < 1:
        violations.append("quantity must be >= 1 when present")
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# stage artifacts


@dataclass(frozen=True)
class StageArtifact:
    """Structured output that completes a stage. ``body`` is schema-checked
    against the artifact kind; treat it as immutable."""

    kind: ArtifactKind
    body: Mapping[str, Any]
    producer: str

    @property
    def degraded(self) -> bool:
        return bool(self.body.get("degraded"))

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "body": json.loads(json.dumps(dict(self.body))),
            "producer": self.producer,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StageArtifact":
        return cls(
            kind=ArtifactKind(data["kind"]),
            body=dict(data["body"]),
            producer=data["producer"],
        )


def _require_str(body: Mapping[str, Any], key: str, where: str, violations: list[str]) -> None:
    value = body.get(key)
    if not isinstance(value, str) or not value.strip():
        violations.append(f"{where}: {key} must be a non-empty string")


def _optional_str(body: Mapping[str, Any], key: str, where: str, violations: list[str]) -> None:
    value = body.get(key)
    if value is not None and not isinstance(value, str):
        violations.append(f"{where}: {key} must be a string when present")


def _optional_str_list(body: Mapping[str, Any], key: str, where: str, violations: list[str]) -> None:
    value = body.get(key)
    if value is None:
        return
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        violations.append(f"{where}: {key} must be a list of strings")


def _entries(body: Mapping[str, Any], key: str, where: str, violations: list[str]) -> list:
    value = body.get(key)
    if not isinstance(value, list) or not value:
        violations.append(f"{where}: {key} must be a non-empty list")
        return []
    bad = [i for i, v in enumerate(value) if not isinstance(v, Mapping)]
    for i in bad:
        violations.append(f"{where}: {key}[{i}] must be an object")
    return [v for v in value if isinstance(v, Mapping)]


def _validate_requirement_analysis(body: Mapping[str, Any], violations: list[str]) -> None:
    _require_str(body, "market_notes", "requirement_analysis", violations)
    _require_str(body, "product_definition", "requirement_analysis", violations)
    personas = body.get("user_personas")
    if not isinstance(personas, list) or not personas:
        violations.append("requirement_analysis: user_personas must be a non-empty list")
    else:
        for i, p in enumerate(personas):
            if not isinstance(p, str) or not p.strip():
                violations.append(f"requirement_analysis: user_personas[{i}] must be a non-empty string")


def _validate_scheme_list(body: Mapping[str, Any], violations: list[str]) -> None:
    for i, scheme in enumerate(_entries(body, "schemes", "scheme_list", violations)):
        where = f"scheme_list.schemes[{i}]"
        _require_str(scheme, "title", where, violations)
        _require_str(scheme, "concept", where, violations)
        _optional_str_list(scheme, "image_refs", where, violations)


def _validate_cmf_scheme_list(body: Mapping[str, Any], violations: list[str]) -> None:
    for i, entry in enumerate(_entries(body, "entries", "cmf_scheme_list", violations)):
        where = f"cmf_scheme_list.entries[{i}]"
        for cmf_field in ("color", "material", "finishing"):
            _require_str(entry, cmf_field, where, violations)
        _optional_str(entry, "base_image_ref", where, violations)
        _optional_str(entry, "prompt", where, violations)
        _optional_str_list(entry, "result_image_refs", where, violations)


def _validate_evaluation_report(body: Mapping[str, Any], violations: list[str]) -> None:
    for i, entry in enumerate(_entries(body, "entries", "evaluation_report", violations)):
        where = f"evaluation_report.entries[{i}]"
        _require_str(entry, "scheme", where, violations)
        _optional_str(entry, "notes", where, violations)
        scores = entry.get("scores")
        if not isinstance(scores, Mapping):
            violations.append(f"{where}: scores must be an object")
            continue
        for dim in SCORE_DIMENSIONS:
            value = scores.get(dim)
            if not isinstance(value, int) or isinstance(value, bool):
                violations.append(f"{where}: scores.{dim} must be an integer")
            elif not SCORE_MIN <= value <= SCORE_MAX:
                violations.append(
                    f"{where}: scores.{dim}={value} outside [{SCORE_MIN},{SCORE_MAX}]"
                )


def _validate_design_plan(body: Mapping[str, Any], violations: list[str]) -> None:
    _require_str(body, "summary", "design_plan", violations)
    sections = body.get("sections")
    if sections is None:
        return
    if not isinstance(sections, Mapping):
        violations.append("design_plan: sections must be an object")
        return
    prior = ARTIFACT_KINDS - {ArtifactKind.DESIGN_PLAN.value}
    for key, value in sections.items():
        if key not in prior:
            violations.append(f"design_plan: sections key {key!r} is not a prior artifact kind")
        elif not isinstance(value, Mapping):
            violations.append(f"design_plan: sections[{key!r}] must be an object")


_VALIDATORS = {
    ArtifactKind.REQUIREMENT_ANALYSIS: _validate_requirement_analysis,
    ArtifactKind.SCHEME_LIST: _validate_scheme_list,
    ArtifactKind.CMF_SCHEME_LIST: _validate_cmf_scheme_list,
    ArtifactKind.EVALUATION_REPORT: _validate_evaluation_report,
    ArtifactKind.DESIGN_PLAN: _validate_design_plan,
}


def validate_artifact(kind: ArtifactKind | str, body: Any) -> ValidationReport:
    """Check ``body`` against the schema of ``kind``.

    Unknown top-level keys are tolerated (the ``degraded`` flag rides along
    this way); raises :class:`UnknownArtifactKind` for a kind this package
    does not know.
    """
    try:
        resolved = ArtifactKind(kind)
    except ValueError:
        raise UnknownArtifactKind(str(kind)) from None
    if not isinstance(body, Mapping):
        return ValidationReport((f"{resolved.value}: body must be a JSON object",))
    violations: list[str] = []
    _VALIDATORS[resolved](body, violations)
    return ValidationReport(tuple(violations))


def minimal_body(
    kind: ArtifactKind | str,
    *,
    topic: str = "the brief",
    scheme_titles: Sequence[str] = (),
) -> dict[str, Any]:
    """Smallest body that validates for ``kind``; the best-effort fallback the
    engine stores when a stage's turn budget runs out."""
    try:
        resolved = ArtifactKind(kind)
    except ValueError:
        raise UnknownArtifactKind(str(kind)) from None
    titles = list(scheme_titles) or ["Scheme 1"]
    if resolved is ArtifactKind.REQUIREMENT_ANALYSIS:
        return {
            "market_notes": f"Market context for {topic} was not established in time.",
            "user_personas": [f"Primary user interested in {topic}"],
            "product_definition": f"Product responding to: {topic}",
        }
    if resolved is ArtifactKind.SCHEME_LIST:
        return {
            "schemes": [
                {"title": title, "concept": f"Placeholder concept for {topic}", "image_refs": []}
                for title in titles
            ]
        }
    if resolved is ArtifactKind.CMF_SCHEME_LIST:
        return {
            "entries": [
                {
                    "base_image_ref": "",
                    "color": "neutral grey",
                    "material": "matte ceramic",
                    "finishing": "soft touch",
                    "prompt": "",
                    "result_image_refs": [],
                }
            ]
        }
    if resolved is ArtifactKind.EVALUATION_REPORT:
        return {
            "entries": [
                {
                    "scheme": title,
                    "notes": "No evaluation was produced within the stage budget.",
                    "scores": {dim: 4 for dim in SCORE_DIMENSIONS},
                }
                for title in titles
            ]
        }
    return {"summary": f"Design plan for {topic}.", "sections": {}}


def artifact_one_line(artifact: StageArtifact) -> str:
    """Deterministic one-line summary used when history truncation drops the
    artifact's full body."""
    kind = artifact.kind
    body = artifact.body
    if kind is ArtifactKind.SCHEME_LIST:
        titles = ", ".join(s.get("title", "?") for s in body.get("schemes", []))
        detail = f"schemes: {titles}"
    elif kind is ArtifactKind.CMF_SCHEME_LIST:
        detail = f"{len(body.get('entries', []))} CMF variants"
    elif kind is ArtifactKind.EVALUATION_REPORT:
        detail = f"{len(body.get('entries', []))} schemes scored"
    elif kind is ArtifactKind.DESIGN_PLAN:
        detail = str(body.get("summary", ""))
    else:
        detail = str(body.get("product_definition", ""))
    line = f"[artifact {kind.value} by {artifact.producer}] {detail}".strip()
    return " ".join(line.split())


# ---------------------------------------------------------------------------
# messages


@dataclass(frozen=True)
class Message:
    """One transcript entry. Artifact-kind messages must carry a payload whose
    body validates against its kind."""

    id: int
    speaker: str
    stage: SOPStage
    kind: MessageKind
    content: str
    attachments: tuple[str, ...] = ()
    timestamp: float = 0.0
    artifact: StageArtifact | None = None

    def __post_init__(self):
        if self.kind is MessageKind.ARTIFACT:
            if self.artifact is None:
                raise ValueError("artifact message must carry a payload")
            report = validate_artifact(self.artifact.kind, self.artifact.body)
            if not report.ok:
                raise ValueError(f"artifact payload invalid: {'; '.join(report.violations)}")
        elif self.artifact is not None:
            raise ValueError(f"{self.kind.value} message must not carry an artifact payload")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "speaker": self.speaker,
            "stage": self.stage.value,
            "kind": self.kind.value,
            "content": self.content,
            "attachments": list(self.attachments),
            "timestamp": self.timestamp,
            "artifact": self.artifact.to_dict() if self.artifact else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Message":
        artifact = data.get("artifact")
        return cls(
            id=int(data["id"]),
            speaker=data["speaker"],
            stage=SOPStage(data["stage"]),
            kind=MessageKind(data["kind"]),
            content=data["content"],
            attachments=tuple(data.get("attachments") or ()),
            timestamp=float(data.get("timestamp", 0.0)),
            artifact=StageArtifact.from_dict(artifact) if artifact else None,
        )


# ---------------------------------------------------------------------------
# engine configuration


@dataclass(frozen=True)
class EngineConfig:
    """Bounds and backend settings for a meeting run."""

    max_turns_per_stage: int = 6
    max_revision_loops: int = 1
    history_token_budget: int = 3000
    revision_threshold: int = 4
    seed: int = 0
    backend_endpoints: Mapping[str, str] = field(default_factory=dict)
    backend_timeout_ms: int = 30000
    backend_retries: int = 2
    search_results: int = 3
    image_steps: int = 30
    image_size: int = 512

    def __post_init__(self):
        if self.max_turns_per_stage < 1:
            raise ValueError("max_turns_per_stage must be positive")
        if self.max_revision_loops < 0:
            raise ValueError("max_revision_loops must be non-negative")
        if self.history_token_budget < 1:
            raise ValueError("history_token_budget must be positive")
        if self.backend_timeout_ms < 1:
            raise ValueError("backend_timeout_ms must be positive")
        if self.backend_retries < 0:
            raise ValueError("backend_retries must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_turns_per_stage": self.max_turns_per_stage,
            "max_revision_loops": self.max_revision_loops,
            "history_token_budget": self.history_token_budget,
            "revision_threshold": self.revision_threshold,
            "seed": self.seed,
            "backend_endpoints": dict(self.backend_endpoints),
            "backend_timeout_ms": self.backend_timeout_ms,
            "backend_retries": self.backend_retries,
            "search_results": self.search_results,
            "image_steps": self.image_steps,
            "image_size": self.image_size,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EngineConfig":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        if "backend_endpoints" in known:
            known["backend_endpoints"] = dict(known["backend_endpoints"])
        return cls(**known)


# ---------------------------------------------------------------------------
# the meeting itself


@dataclass(frozen=True)
class Meeting:
    """Requirement form + roster + SOP position + transcript + artifacts.

    Updated functionally: operations return a new ``Meeting``; the per-meeting
    command queue in the service layer is what serializes writers.
    """

    id: str
    form: RequirementForm
    roster: tuple[RoleCard, ...]
    stage: SOPStage
    transcript: tuple[Message, ...] = ()
    artifacts: Mapping[ArtifactKind, StageArtifact] = field(default_factory=dict)
    pending_user_inputs: tuple[int, ...] = ()
    config: EngineConfig = field(default_factory=EngineConfig)
    iteration_count: int = 0

    def next_message_id(self) -> int:
        return self.transcript[-1].id + 1 if self.transcript else 1

    def role_by_title(self, title: RoleTitle | str) -> RoleCard | None:
        wanted = title.value if isinstance(title, RoleTitle) else title
        for card in self.roster:
            if card.title == wanted:
                return card
        return None

    def role_by_id(self, role_id: str) -> RoleCard | None:
        for card in self.roster:
            if card.id == role_id:
                return card
        return None

    def pending_messages(self) -> tuple[Message, ...]:
        by_id = {m.id: m for m in self.transcript}
        return tuple(by_id[i] for i in self.pending_user_inputs if i in by_id)

    def artifact_list(self) -> tuple[StageArtifact, ...]:
        return tuple(self.artifacts[k] for k in ARTIFACT_ORDER if k in self.artifacts)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "form": self.form.to_dict(),
            "roster": [r.to_dict() for r in self.roster],
            "stage": self.stage.value,
            "transcript": [m.to_dict() for m in self.transcript],
            "artifacts": [a.to_dict() for a in self.artifact_list()],
            "pending_user_inputs": list(self.pending_user_inputs),
            "config": self.config.to_dict(),
            "iteration_count": self.iteration_count,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Meeting":
        artifacts = [StageArtifact.from_dict(a) for a in data.get("artifacts", [])]
        return cls(
            id=data["id"],
            form=RequirementForm.from_dict(data["form"]),
            roster=tuple(RoleCard.from_dict(r) for r in data.get("roster", [])),
            stage=SOPStage(data["stage"]),
            transcript=tuple(Message.from_dict(m) for m in data.get("transcript", [])),
            artifacts={a.kind: a for a in sorted(artifacts, key=lambda a: artifact_index(a.kind))},
            pending_user_inputs=tuple(int(i) for i in data.get("pending_user_inputs", [])),
            config=EngineConfig.from_dict(data.get("config", {})),
            iteration_count=int(data.get("iteration_count", 0)),
        )


def ordered_artifacts(
    artifacts: Mapping[ArtifactKind, StageArtifact], new: StageArtifact
) -> dict[ArtifactKind, StageArtifact]:
    """Insert/replace ``new`` keeping the mapping in SOP order."""
    merged = dict(artifacts)
    merged[new.kind] = new
    return {k: merged[k] for k in ARTIFACT_ORDER if k in merged}


def validate_meeting(meeting: Meeting) -> ValidationReport:
    """Cross-cutting meeting invariants, used by property tests."""
    violations: list[str] = []
    last_id = 0
    for msg in meeting.transcript:
        if msg.id <= last_id:
            violations.append(f"message ids not strictly increasing at {msg.id}")
        last_id = msg.id
    kinds = [a.kind for a in meeting.artifact_list()]
    if kinds != sorted(kinds, key=artifact_index):
        violations.append("artifacts not in SOP order")
    has_plan = ArtifactKind.DESIGN_PLAN in meeting.artifacts
    if (meeting.stage is SOPStage.COMPLETED) != has_plan:
        violations.append("stage Completed must coincide with a stored design_plan")
    return ValidationReport(tuple(violations))
