#!/usr/bin/env python3
"""Run the bundled demo meeting against seeded mock backends and print a
short tour of what happened: stage by stage, who spoke, which artifacts were
produced, and where the export landed.

Usage: python3 scripts/demo_meeting.py [--seed N] [--out DIR]
"""

import argparse
import json
from importlib import resources
from pathlib import Path

from studiomeet.domain import EngineConfig, RequirementForm
from studiomeet.engine import Interjection, MeetingEngine, SteppingClock
from studiomeet.mocks import mock_toolbox
from studiomeet.persistence import MeetingStore
from studiomeet.registry import core_roster


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="./demo-out")
    args = parser.parse_args()

    raw = resources.files("studiomeet.data").joinpath("demo_form.json").read_text()
    form = RequirementForm.from_dict(json.loads(raw))
    config = EngineConfig(seed=args.seed)

    store = MeetingStore(args.out)
    meeting_id = f"demo-{args.seed:04d}"
    toolbox = mock_toolbox(args.seed, store.meetings_dir / meeting_id / "images")
    engine = MeetingEngine(toolbox, clock=SteppingClock(), on_message=store.append_event)

    meeting = engine.create_meeting(form, core_roster(), config, meeting_id=meeting_id)
    store.create(meeting)
    print(f"meeting {meeting.id}: {form.topic!r}")

    script = [Interjection(turn=3, text="make Scheme 1 more innovative")]
    meeting, plan = engine.run_to_completion(meeting, script)
    store.save_snapshot(meeting)

    names = {r.id: r.name for r in meeting.roster}
    for message in meeting.transcript:
        who = names.get(message.speaker, message.speaker)
        tag = f"[{message.stage.value}/{message.kind.value}]"
        first_line = message.content.splitlines()[0] if message.content else "(image)"
        print(f"  #{message.id:>2} {who:<8} {tag:<40} {first_line[:70]}")

    print("\nartifacts:", ", ".join(a.kind.value for a in meeting.artifact_list()))
    print("plan summary:", plan.body["summary"])
    bundle = store.export_document(meeting)
    print("exported:", bundle.markdown_path)


if __name__ == "__main__":
    main()
