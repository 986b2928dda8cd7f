"""Append-only event log per meeting, event-sourced reload, and document export.

Storage layout under one root directory:

    meetings/<id>/meeting.json    header: form, roster, config as created
    meetings/<id>/events.ndjson   one canonical-JSON message per line
    meetings/<id>/images/         content-addressed image bytes
    exports/<id>/plan.md          the process document
    exports/<id>/plan.json        canonical meeting encoding
    exports/<id>/images/          images referenced by the document

Newline-delimited JSON keeps the log human-inspectable, append-only and
diff-friendly; replaying it through :func:`studiomeet.engine.apply_message`
reconstructs the live meeting state at any prefix.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .backends import ImageStore
from .domain import (
    ArtifactKind,
    EngineConfig,
    Meeting,
    Message,
    RequirementForm,
    RoleCard,
    SOPStage,
    StageArtifact,
    canonical_dumps,
)
from .engine import apply_message
from .errors import CorruptLog, NoArtifacts, StorageFailure, UnknownMeeting

ARTIFACT_SECTION_TITLES: dict[ArtifactKind, str] = {
    ArtifactKind.REQUIREMENT_ANALYSIS: "Requirement Analysis",
    ArtifactKind.SCHEME_LIST: "Design Proposals",
    ArtifactKind.CMF_SCHEME_LIST: "CMF Variants",
    ArtifactKind.EVALUATION_REPORT: "Evaluation Report",
    ArtifactKind.DESIGN_PLAN: "Final Design Plan",
}


@dataclass(frozen=True)
class ExportBundle:
    markdown_path: Path
    sidecar_path: Path
    image_paths: tuple[Path, ...]


class MeetingStore:
    """Filesystem-backed store for meeting logs, images and exports."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.meetings_dir = self.root / "meetings"
        self.exports_dir = self.root / "exports"
        self.meetings_dir.mkdir(parents=True, exist_ok=True)
        self.exports_dir.mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------------

    def _meeting_dir(self, meeting_id: str) -> Path:
        return self.meetings_dir / meeting_id

    def _events_path(self, meeting_id: str) -> Path:
        return self._meeting_dir(meeting_id) / "events.ndjson"

    def image_store(self, meeting_id: str) -> ImageStore:
        return ImageStore(self._meeting_dir(meeting_id) / "images")

    def meeting_ids(self) -> list[str]:
        return sorted(p.name for p in self.meetings_dir.iterdir() if p.is_dir())

    # -- writing ---------------------------------------------------------------

    def create(self, meeting: Meeting) -> None:
        """Register a meeting: write the header and log any messages it
        already carries (the topic announcement)."""
        directory = self._meeting_dir(meeting.id)
        if self._events_path(meeting.id).exists():
            raise StorageFailure(f"meeting {meeting.id} already exists")
        directory.mkdir(parents=True, exist_ok=True)
        header = {
            "id": meeting.id,
            "form": meeting.form.to_dict(),
            "roster": [r.to_dict() for r in meeting.roster],
            "config": meeting.config.to_dict(),
        }
        (directory / "meeting.json").write_text(canonical_dumps(header) + "\n")
        (directory / "images").mkdir(exist_ok=True)
        self._events_path(meeting.id).touch()
        for message in meeting.transcript:
            self.append_event(meeting.id, message)

    def append_event(self, meeting_id: str, message: Message) -> int:
        """Durably append one message; the returned sequence is the message id."""
        path = self._events_path(meeting_id)
        if not path.exists():
            raise UnknownMeeting(meeting_id)
        try:
            with path.open("a", encoding="utf-8") as fh:
                fh.write(canonical_dumps(message.to_dict()) + "\n")
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        return message.id

    def save_snapshot(self, meeting: Meeting) -> None:
        path = self._meeting_dir(meeting.id) / "snapshot.json"
        path.write_text(canonical_dumps(meeting.to_dict()) + "\n")

    def load_snapshot(self, meeting_id: str) -> Meeting | None:
        path = self._meeting_dir(meeting_id) / "snapshot.json"
        if not path.exists():
            return None
        return Meeting.from_dict(json.loads(path.read_text()))

    # -- reading ---------------------------------------------------------------

    def events(self, meeting_id: str, from_seq: int = 1) -> list[Message]:
        path = self._events_path(meeting_id)
        if not path.exists():
            raise UnknownMeeting(meeting_id)
        messages = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                messages.append(Message.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise CorruptLog(f"{meeting_id} events line {lineno}: {exc}") from exc
        return [m for m in messages if m.id >= from_seq]

    def load_meeting(self, meeting_id: str, upto_seq: int | None = None) -> Meeting:
        """Event-sourced rebuild: fold the log (or a prefix of it) over the
        header state with the engine's own reducer."""
        directory = self._meeting_dir(meeting_id)
        header_path = directory / "meeting.json"
        if not header_path.exists():
            raise UnknownMeeting(meeting_id)
        try:
            header = json.loads(header_path.read_text())
            meeting = Meeting(
                id=header["id"],
                form=RequirementForm.from_dict(header["form"]),
                roster=tuple(RoleCard.from_dict(r) for r in header["roster"]),
                stage=SOPStage.REQUIREMENT_IMPORT,
                config=EngineConfig.from_dict(header["config"]),
            )
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CorruptLog(f"{meeting_id} header: {exc}") from exc
        for message in self.events(meeting_id):
            if upto_seq is not None and message.id > upto_seq:
                break
            try:
                meeting = apply_message(meeting, message)
            except ValueError as exc:
                raise CorruptLog(f"{meeting_id} replay at seq {message.id}: {exc}") from exc
        return meeting

    # -- export ------------------------------------------------------------------

    def export_document(self, meeting: Meeting, out_dir: str | Path | None = None) -> ExportBundle:
        """Write the process document: Markdown with sections in SOP order,
        the canonical JSON sidecar, and every referenced image. Deterministic:
        identical meetings export byte-identical bundles."""
        if not meeting.artifacts:
            raise NoArtifacts(meeting.id)
        dest = Path(out_dir) if out_dir is not None else self.exports_dir / meeting.id
        dest.mkdir(parents=True, exist_ok=True)
        images_dir = dest / "images"

        store = self.image_store(meeting.id)
        copied: list[Path] = []

        def image_link(ref_id: str, alt: str) -> str | None:
            found = store.find(ref_id)
            if found is None:
                return None
            target = images_dir / Path(found.path).name
            if not target.exists():
                images_dir.mkdir(parents=True, exist_ok=True)
                shutil.copyfile(found.path, target)
                copied.append(target)
            return f"![{alt}](images/{target.name})"

        markdown = render_markdown(meeting, image_link)
        md_path = dest / "plan.md"
        md_path.write_text(markdown, encoding="utf-8")
        sidecar_path = dest / "plan.json"
        sidecar_path.write_text(
            json.dumps(meeting.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        return ExportBundle(md_path, sidecar_path, tuple(sorted(copied)))


def _fmt_time(timestamp: float) -> str:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


def render_markdown(meeting: Meeting, image_link=None) -> str:
    """The process document text; ``image_link`` maps (ref id, alt) to a
    Markdown image line or ``None`` when the bytes are unavailable."""
    if image_link is None:
        image_link = lambda ref_id, alt: None  # noqa: E731

    names = {role.id: f"{role.name} ({role.title})" for role in meeting.roster}
    names["HUMAN"] = "Designer"

    lines: list[str] = [f"# Design Plan: {meeting.form.topic}", ""]
    lines += ["## Requirement", ""]
    lines.append(f"- Topic: {meeting.form.topic}")
    if meeting.form.description:
        lines.append(f"- Description: {meeting.form.description}")
    for constraint in meeting.form.constraints:
        lines.append(f"- Constraint: {constraint}")
    if meeting.form.quantity is not None:
        lines.append(f"- Quantity: {meeting.form.quantity}")
    lines.append("")

    for artifact in meeting.artifact_list():
        lines += [f"## {ARTIFACT_SECTION_TITLES[artifact.kind]}", ""]
        if artifact.degraded:
            lines += ["*Best-effort artifact: the stage turn budget ran out.*", ""]
        lines += _artifact_section(artifact, names, image_link)
        lines.append("")

    lines += ["## Transcript", ""]
    for message in meeting.transcript:
        who = names.get(message.speaker, message.speaker)
        stamp = _fmt_time(message.timestamp)
        content = " ".join(message.content.split()) or "(image)"
        lines.append(f"- `{stamp}` **{who}** [{message.stage.value}/{message.kind.value}]: {content}")
    lines.append("")
    return "\n".join(lines)


def _artifact_section(artifact: StageArtifact, names, image_link) -> list[str]:
    body = artifact.body
    lines: list[str] = [f"Produced by {names.get(artifact.producer, artifact.producer)}.", ""]
    kind = artifact.kind
    if kind is ArtifactKind.REQUIREMENT_ANALYSIS:
        lines += [f"**Market notes.** {body['market_notes']}", ""]
        lines += ["**User personas.**"]
        lines += [f"- {p}" for p in body["user_personas"]]
        lines += ["", f"**Product definition.** {body['product_definition']}"]
    elif kind is ArtifactKind.SCHEME_LIST:
        for scheme in body["schemes"]:
            lines += [f"### {scheme['title']}", "", scheme["concept"], ""]
            for ref in scheme.get("image_refs", []):
                link = image_link(ref, scheme["title"])
                lines.append(link if link else f"(image {ref[:12]} unavailable)")
    elif kind is ArtifactKind.CMF_SCHEME_LIST:
        for i, entry in enumerate(body["entries"], start=1):
            lines += [
                f"### Variant {i}",
                "",
                f"- Color: {entry['color']}",
                f"- Material: {entry['material']}",
                f"- Finishing: {entry['finishing']}",
            ]
            if entry.get("prompt"):
                lines.append(f"- Prompt used: {entry['prompt']}")
            lines.append("")
            for ref in entry.get("result_image_refs", []):
                link = image_link(ref, f"Variant {i}")
                lines.append(link if link else f"(image {ref[:12]} unavailable)")
    elif kind is ArtifactKind.EVALUATION_REPORT:
        lines += ["| Scheme | Novelty | Completeness | Feasibility | Notes |",
                  "| --- | --- | --- | --- | --- |"]
        for entry in body["entries"]:
            scores = entry["scores"]
            notes = " ".join(str(entry.get("notes", "")).split())
            lines.append(
                f"| {entry['scheme']} | {scores['novelty']} | {scores['completeness']} |"
                f" {scores['feasibility']} | {notes} |"
            )
    else:  # design plan
        lines += [body["summary"], ""]
        sections = body.get("sections", {})
        if sections:
            lines.append("Compiled from: " + ", ".join(sorted(sections.keys())) + ".")
    return lines
