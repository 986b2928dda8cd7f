"""Prompt assembly: rebuilds the text sent to the generation backend from the
role definition, the active skill, format rules, user input, history and
augmentations.

History is budgeted with the word-count token proxy: truncation drops oldest
messages first but always keeps a one-line summary for every artifact message
whose body no longer fits. The system part (role identity + skill
instructions + format rules) is never truncated; it gets a fixed overhead
allowance of :data:`SYSTEM_OVERHEAD_ALLOWANCE` word tokens.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

from .domain import (
    FREE_TEXT,
    ArtifactKind,
    Meeting,
    Message,
    MessageKind,
    RoleCard,
    Skill,
    artifact_one_line,
    word_count,
)
from .errors import SchemeNotFound, SkillNotOwned

#: Word-token allowance for the never-truncated system part.
SYSTEM_OVERHEAD_ALLOWANCE = 500

#: Cap on one artifact summary line, and the per-artifact overflow the history
#: budget may exceed by in the worst (header-only) case.
SUMMARY_MAX_TOKENS = 24
SUMMARY_HEADER_TOKENS = 4

EMPTY_HISTORY_MARKER = "(no history yet)"
EMPTY_SLOT_MARKER = "(none)"

_FIELD_HINTS: dict[ArtifactKind, str] = {
    ArtifactKind.REQUIREMENT_ANALYSIS: (
        '"market_notes" (string), "user_personas" (list of strings), '
        '"product_definition" (string)'
    ),
    ArtifactKind.SCHEME_LIST: (
        '"schemes": list of {"title", "concept", "image_refs" (may be empty)}'
    ),
    ArtifactKind.CMF_SCHEME_LIST: (
        '"entries": list of {"base_image_ref", "color", "material", "finishing",'
        ' "prompt", "result_image_refs"} - color, material and finishing are all'
        " required"
    ),
    ArtifactKind.EVALUATION_REPORT: (
        '"entries": list of {"scheme", "notes", "scores": {"novelty",'
        ' "completeness", "feasibility"} each an integer 1-7}'
    ),
    ArtifactKind.DESIGN_PLAN: '"summary" (string), "sections" (object, may be empty)',
}

_FENCED_RE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.DOTALL)
_PLACEHOLDER_SPLIT_RE = re.compile(r"\{(requirement|history|user_input|augmentations|format_rules)\}")


@dataclass(frozen=True)
class AssembledPrompt:
    """A fully rendered prompt, split into the never-truncated system part and
    the budgeted context part."""

    system_part: str
    context_part: str
    text: str
    token_estimate: int


def format_rules_for(output_schema: str) -> str:
    """The output-format block appended to every prompt."""
    if output_schema == FREE_TEXT:
        return "FORMAT RULES:\nReply in plain conversational text. Do not emit JSON."
    kind = ArtifactKind(output_schema)
    return (
        "FORMAT RULES:\n"
        f'When your work for this stage is ready, emit the artifact kind "{kind.value}"'
        " as a fenced JSON code block (```json ... ```) containing exactly one object"
        f" with fields: {_FIELD_HINTS[kind]}. Free discussion may precede the block;"
        " the last fenced block in your reply is the one that is parsed."
    )


def parse_fenced_json(text: str) -> Mapping[str, Any] | None:
    """Extract and decode the last fenced JSON block, or ``None``."""
    blocks = _FENCED_RE.findall(text)
    if not blocks:
        return None
    try:
        parsed = json.loads(blocks[-1])
    except json.JSONDecodeError:
        return None
    return parsed if isinstance(parsed, Mapping) else None


# ---------------------------------------------------------------------------
# history truncation


def render_history_line(message: Message) -> str:
    content = " ".join(message.content.split())
    return f"{message.speaker}: {content}"


def _summary_message(message: Message) -> Message:
    line = artifact_one_line(message.artifact)
    tokens = line.split()
    if len(tokens) > SUMMARY_MAX_TOKENS:
        line = " ".join(tokens[:SUMMARY_MAX_TOKENS])
    return replace(message, content=line, attachments=())


def _header_message(message: Message) -> Message:
    return replace(
        message, content=f"[artifact {message.artifact.kind.value}]", attachments=()
    )


def truncate_history(transcript: Sequence[Message], budget: int) -> list[Message]:
    """Budgeted suffix of the transcript, most recent messages first kept.

    Artifact messages whose bodies fall off the front are still represented
    by one-line summaries (which count against the budget; summaries shrink
    to bare headers when even they do not fit). Order is preserved. With a
    degenerate budget the result is the summaries alone, or empty.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    artifact_msgs = [m for m in transcript if m.kind is MessageKind.ARTIFACT]
    summaries = {m.id: _summary_message(m) for m in artifact_msgs}
    reserve = sum(word_count(render_history_line(s)) for s in summaries.values())
    if reserve > budget:
        summaries = {m.id: _header_message(m) for m in artifact_msgs}
        reserve = sum(word_count(render_history_line(s)) for s in summaries.values())

    remaining = budget - reserve
    suffix: list[Message] = []
    for message in reversed(transcript):
        tokens = word_count(render_history_line(message))
        if tokens > remaining:
            break
        suffix.append(message)
        remaining -= tokens
    suffix.reverse()

    kept_ids = {m.id for m in suffix}
    dropped_summaries = [summaries[m.id] for m in artifact_msgs if m.id not in kept_ids]
    return dropped_summaries + suffix


# ---------------------------------------------------------------------------
# block rendering


def render_requirement(meeting: Meeting) -> str:
    form = meeting.form
    lines = ["REQUIREMENT:", f"- topic: {form.topic}"]
    lines.append(f"- description: {form.description or EMPTY_SLOT_MARKER}")
    if form.constraints:
        lines.append("- constraints: " + "; ".join(form.constraints))
    else:
        lines.append(f"- constraints: {EMPTY_SLOT_MARKER}")
    lines.append(f"- quantity: {form.quantity if form.quantity is not None else EMPTY_SLOT_MARKER}")
    return "\n".join(lines)


def render_history_block(messages: Sequence[Message]) -> str:
    if not messages:
        return f"HISTORY:\n{EMPTY_HISTORY_MARKER}"
    return "HISTORY:\n" + "\n".join(render_history_line(m) for m in messages)


def render_user_inputs(messages: Sequence[Message]) -> str:
    if not messages:
        return f"USER INPUT:\n{EMPTY_SLOT_MARKER}"
    return "USER INPUT:\n" + "\n".join(f"- {m.content}" for m in messages)


def render_augmentations(augmentations: Sequence[str]) -> str:
    if not augmentations:
        return f"ADDITIONAL CONTEXT:\n{EMPTY_SLOT_MARKER}"
    return "ADDITIONAL CONTEXT:\n" + "\n".join(augmentations)


def _role_header(role: RoleCard, skill: Skill) -> str:
    return (
        f"You are {role.name}, the {role.title} of the design studio.\n"
        f"Responsibilities: {role.responsibilities}\n"
        f"Active skill: {skill.name}."
    )


def assemble(
    role: RoleCard,
    skill: Skill,
    meeting: Meeting,
    augmentations: Sequence[str] = (),
) -> AssembledPrompt:
    """Render the prompt for one turn of ``role`` using ``skill``.

    All five placeholder slots are filled (or explicitly marked empty); slots
    the template omits are appended at the end so nothing routed to the agent
    can be lost. Pure given its inputs: identical arguments produce identical
    text.
    """
    if skill not in role.skills:
        raise SkillNotOwned(f"role {role.id!r} does not own skill {skill.name!r}")

    history = truncate_history(meeting.transcript, meeting.config.history_token_budget)
    blocks = {
        "requirement": render_requirement(meeting),
        "history": render_history_block(history),
        "user_input": render_user_inputs(meeting.pending_messages()),
        "augmentations": render_augmentations(tuple(augmentations)),
        "format_rules": format_rules_for(skill.output_schema),
    }
    context_slots = ("requirement", "history", "user_input", "augmentations")

    pieces: list[str] = []
    static_parts: list[str] = []
    seen: set[str] = set()
    cursor = 0
    template = skill.prompt_template
    for match in _PLACEHOLDER_SPLIT_RE.finditer(template):
        static = template[cursor : match.start()]
        pieces.append(static)
        static_parts.append(static)
        name = match.group(1)
        pieces.append(blocks[name])
        seen.add(name)
        cursor = match.end()
    tail = template[cursor:]
    pieces.append(tail)
    static_parts.append(tail)
    for name in ("requirement", "history", "user_input", "augmentations", "format_rules"):
        if name not in seen:
            pieces.append("\n" + blocks[name])

    header = _role_header(role, skill)
    text = header + "\n\n" + "".join(pieces)
    system_part = header + "\n" + "".join(static_parts).strip() + "\n" + blocks["format_rules"]
    context_part = "\n".join(blocks[name] for name in context_slots)
    return AssembledPrompt(
        system_part=system_part,
        context_part=context_part,
        text=text,
        token_estimate=word_count(text),
    )


# ---------------------------------------------------------------------------
# image prompt composition

_IMAGE_META_PROMPT = """\
Turn the design scheme below into a single-line, comma-separated tag prompt
for an image generation model. Mention the product, its key traits and the
setting; answer with the tags only.

REQUIREMENT: {req}
MEETING SO FAR: {hist}
SCHEME {title}: {concept}
"""


def compose_image_prompt(meeting: Meeting, scheme: Mapping[str, Any], text_backend) -> str:
    """One text-backend call that produces the tag-style image prompt for a
    scheme, collapsed to a single line."""
    stored = meeting.artifacts.get(ArtifactKind.SCHEME_LIST)
    titles = [s.get("title") for s in (stored.body.get("schemes", []) if stored else [])]
    if scheme.get("title") not in titles:
        raise SchemeNotFound(f"scheme {scheme.get('title')!r} not in the stored scheme list")
    hist = "; ".join(artifact_one_line(a) for a in meeting.artifact_list()) or EMPTY_SLOT_MARKER
    prompt = _IMAGE_META_PROMPT.format(
        req=meeting.form.topic,
        hist=hist,
        title=scheme.get("title", ""),
        concept=scheme.get("concept", ""),
    )
    reply = text_backend.complete(prompt)
    single = ", ".join(part.strip() for part in reply.splitlines() if part.strip())
    return single.strip()
