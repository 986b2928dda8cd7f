"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints one PASS line on success (run with ``pytest -s`` to see
them); a failing criterion shows up as a failing test.
"""

import json
import random
import time
from importlib import resources
from pathlib import Path

import pytest

from studiomeet import errors
from studiomeet.domain import (
    ARTIFACT_ORDER,
    HUMAN_SPEAKER,
    ArtifactKind,
    EngineConfig,
    MessageKind,
    RequirementForm,
    canonical_dumps,
    minimal_body,
    validate_artifact,
    validate_meeting,
    SOPStage,
)
from studiomeet.engine import (
    Interjection,
    MeetingEngine,
    SteppingClock,
    global_turn_budget,
)
from studiomeet.mocks import SOPPlayerTextBackend, mock_toolbox
from studiomeet.persistence import ARTIFACT_SECTION_TITLES, MeetingStore
from studiomeet.registry import core_roster
from studiomeet.stats import (
    inter_rater_reliability,
    percent_improvement,
    t_test_one_tailed,
)

from stats_fixtures import ICC_FIXTURES, T_TEST_FIXTURES


def bundled_demo_form() -> RequirementForm:
    raw = resources.files("studiomeet.data").joinpath("demo_form.json").read_text()
    return RequirementForm.from_dict(json.loads(raw))


def test_a1_end_to_end_sop_run(tmp_path):
    """Seeded mocks + bundled demo requirement: five artifacts in SOP order,
    a Markdown export with 5 artifact sections, in under 5 seconds."""
    started = time.perf_counter()
    store = MeetingStore(tmp_path)
    meeting_id = "acceptance-e2e"
    toolbox = mock_toolbox(7, store.meetings_dir / meeting_id / "images")
    engine = MeetingEngine(toolbox, clock=SteppingClock(), on_message=store.append_event)
    meeting = engine.create_meeting(bundled_demo_form(), core_roster(), EngineConfig(seed=7),
                                    meeting_id=meeting_id)
    store.create(meeting)
    meeting, plan = engine.run_to_completion(meeting)
    bundle = store.export_document(meeting)
    elapsed = time.perf_counter() - started

    assert [a.kind for a in meeting.artifact_list()] == list(ARTIFACT_ORDER)
    assert plan.kind is ArtifactKind.DESIGN_PLAN
    markdown = bundle.markdown_path.read_text()
    for title in ARTIFACT_SECTION_TITLES.values():
        assert markdown.count(f"## {title}") == 1
    assert elapsed < 5.0, f"end-to-end run took {elapsed:.2f}s"
    print(f"\nACCEPTANCE end-to-end SOP run: PASS ({elapsed:.2f}s)")


def test_a2_interjection_causality(tmp_path):
    """100 randomized (turn, text) cases: the interjection appears verbatim in
    the prompt assembled at that turn."""
    rng = random.Random(12345)
    words = ["innovative", "playful", "cheaper", "rounder", "greener", "lighter",
             "minimal", "bold", "ergonomic", "quiet"]
    for case in range(100):
        # echo mocks force-degrade each stage, so the run is exactly 5 * 3 turns
        k = rng.randint(1, 15)
        text = (f"steer {case}: make Scheme {rng.randint(1, 3)} more "
                + " ".join(rng.sample(words, 3)))
        config = EngineConfig(max_turns_per_stage=3, history_token_budget=300,
                              seed=case, image_size=32)
        toolbox = mock_toolbox(case, tmp_path / f"img{case}", sop_player=False)
        engine = MeetingEngine(toolbox, clock=SteppingClock())
        meeting = engine.create_meeting(bundled_demo_form(), core_roster(), config)
        for turn in range(1, k + 1):
            if turn == k:
                meeting = engine.inject_user_message(meeting, text)
            calls_before = len(toolbox.text.calls)
            meeting, _ = engine.advance(meeting)
            if turn == k:
                prompt_at_k = toolbox.text.calls[calls_before]
                assert text in prompt_at_k, f"case {case}: interjection missing at turn {k}"
    print("\nACCEPTANCE interjection causality (100 cases): PASS")


def test_a3_replay_determinism(tmp_path):
    """Identical seeds/scripts give byte-identical logs and exports, and the
    event-sourced rebuild equals the live state after every prefix, over 50
    randomized scripted meetings."""
    rng = random.Random(777)
    for case in range(50):
        seed = rng.randint(0, 10**6)
        config = EngineConfig(
            max_turns_per_stage=rng.choice([1, 2, 3]),
            history_token_budget=rng.choice([80, 300, 1500]),
            max_revision_loops=rng.choice([0, 1]),
            seed=seed,
            image_size=32,
        )
        script = [
            Interjection(turn=rng.randint(1, 8), text=f"scripted steer {rng.randint(0, 9999)}")
            for _ in range(rng.randint(0, 2))
        ]
        sop = rng.random() < 0.7

        def run(subdir):
            store = MeetingStore(tmp_path / f"case{case}" / subdir)
            meeting_id = f"m{seed:07d}"
            toolbox = mock_toolbox(seed, store.meetings_dir / meeting_id / "images",
                                   sop_player=sop)
            engine = MeetingEngine(toolbox, clock=SteppingClock(),
                                   on_message=store.append_event)
            meeting = engine.create_meeting(
                RequirementForm(topic=f"case {case} requirement", quantity=2),
                core_roster(), config, meeting_id=meeting_id)
            store.create(meeting)
            snapshots = {meeting.transcript[-1].id: meeting}
            pending_script = sorted(script, key=lambda i: i.turn)
            turn = 0
            while meeting.stage is not SOPStage.COMPLETED:
                turn += 1
                while pending_script and pending_script[0].turn <= turn:
                    entry = pending_script.pop(0)
                    meeting = engine.inject_user_message(meeting, entry.text)
                    snapshots[meeting.transcript[-1].id] = meeting
                meeting, _ = engine.advance(meeting)
                snapshots[meeting.transcript[-1].id] = meeting
            bundle = store.export_document(meeting)
            events = (store.meetings_dir / meeting_id / "events.ndjson").read_bytes()
            return store, meeting_id, snapshots, events, bundle.markdown_path.read_bytes()

        store_a, mid, snapshots, events_a, export_a = run("a")
        _, _, _, events_b, export_b = run("b")
        assert events_a == events_b, f"case {case}: event logs differ"
        assert export_a == export_b, f"case {case}: exports differ"
        for seq, live in snapshots.items():
            replayed = store_a.load_meeting(mid, upto_seq=seq)
            assert replayed == live, f"case {case}: prefix {seq} diverges"
    print("\nACCEPTANCE replay determinism (50 meetings, every prefix): PASS")


def test_a4_termination_under_adversarial_mocks(tmp_path):
    """Garbage and in-budget timeouts never push a run past the global turn
    budget; every run ends Completed or BudgetExhausted."""
    from studiomeet.backends import call_with_retries

    rng = random.Random(31337)

    class AdversarialText:
        def __init__(self, rng, seed):
            self.rng = rng
            self.player = SOPPlayerTextBackend(seed)
            self.consecutive_failures = 0
            self.calls = []

        def complete(self, prompt):
            self.calls.append(prompt)
            roll = self.rng.random()
            if roll < 0.2 and self.consecutive_failures < 2:
                self.consecutive_failures += 1
                raise errors.Timeout("adversarial timeout")
            self.consecutive_failures = 0
            if roll < 0.6:
                return "unparseable " * rng.randint(1, 30)
            return self.player.complete(prompt)

    class Retrying:
        def __init__(self, inner, retries):
            self.inner = inner
            self.retries = retries

        def complete(self, prompt):
            return call_with_retries(lambda: self.inner.complete(prompt),
                                     retries=self.retries, backoff_s=0)

    outcomes = {"completed": 0, "budget_exhausted": 0}
    for case in range(30):
        config = EngineConfig(max_turns_per_stage=rng.randint(1, 4), seed=case,
                              history_token_budget=200, image_size=32,
                              backend_retries=2)
        budget = global_turn_budget(config)
        toolbox = mock_toolbox(case, tmp_path / f"img{case}")
        toolbox.text = Retrying(AdversarialText(rng, case), config.backend_retries)
        engine = MeetingEngine(toolbox, clock=SteppingClock())
        meeting = engine.create_meeting(
            RequirementForm(topic="adversarial termination"), core_roster(), config)
        script = [Interjection(turn=rng.randint(1, budget), text="Xiao D please reconsider")
                  for _ in range(rng.randint(0, 2))]
        try:
            meeting, _ = engine.run_to_completion(meeting, script)
            assert meeting.stage is SOPStage.COMPLETED
            outcomes["completed"] += 1
        except errors.BudgetExhausted as exc:
            meeting = exc.meeting
            outcomes["budget_exhausted"] += 1
        agent_turns = [m for m in meeting.transcript
                       if m.speaker != HUMAN_SPEAKER and m.kind is not MessageKind.SYSTEM]
        assert len(agent_turns) <= budget, f"case {case}: exceeded turn budget"
        assert validate_meeting(meeting).ok
    assert outcomes["completed"] > 0
    print(f"\nACCEPTANCE termination under adversarial mocks: PASS ({outcomes})")


def test_a5_statistics_oracle_equivalence():
    """t-test and reliability match the committed brute-force oracle values on
    the frozen fixtures to 1e-6, and the trivial identities hold."""
    assert len(T_TEST_FIXTURES) >= 5
    for g1, g2, t_exp, df_exp, p_exp in T_TEST_FIXTURES:
        result = t_test_one_tailed(g1, g2)
        assert abs(result.t - t_exp) < 1e-6
        assert abs(result.df - df_exp) < 1e-6
        assert abs(result.p - p_exp) < 1e-6

    assert len(ICC_FIXTURES) >= 5
    for matrix, pearson_exp, icc_exp in ICC_FIXTURES:
        result = inter_rater_reliability(matrix)
        assert abs(result.pearson - pearson_exp) < 1e-6
        assert abs(result.icc2k - icc_exp) < 1e-6

    identical = t_test_one_tailed([3.0, 4.0, 5.0], [3.0, 4.0, 5.0])
    assert identical.t == 0.0 and abs(identical.p - 0.5) < 1e-12
    duplicated = inter_rater_reliability([[1, 5, 3, 7, 2], [1, 5, 3, 7, 2]])
    assert abs(duplicated.pearson - 1.0) < 1e-12
    assert abs(duplicated.icc2k - 1.0) < 1e-9
    for m in (0.5, 1.0, 4.0, 123.456):
        assert percent_improvement(m, m) == 0.0
    print("\nACCEPTANCE statistics oracle equivalence: PASS "
          f"({len(T_TEST_FIXTURES)} t-test + {len(ICC_FIXTURES)} reliability fixtures)")


def test_a6_artifact_validation_rejects_all_negatives():
    """Seven-point range and CMF schema enforcement reject 100% of generated
    negative payloads."""
    rng = random.Random(2024)
    rejected = 0
    total = 0

    # out-of-range scores in every dimension
    for _ in range(60):
        body = minimal_body(ArtifactKind.EVALUATION_REPORT, scheme_titles=["S1", "S2"])
        entry = rng.choice(body["entries"])
        dim = rng.choice(["novelty", "completeness", "feasibility"])
        bad = rng.choice([rng.randint(-5, 0), rng.randint(8, 99)])
        entry["scores"] = {**entry["scores"], dim: bad}
        total += 1
        rejected += not validate_artifact("evaluation_report", body).ok

    # CMF entries missing one of the three required dimensions, or blanked
    for _ in range(60):
        body = minimal_body(ArtifactKind.CMF_SCHEME_LIST)
        entry = dict(body["entries"][0])
        field = rng.choice(["color", "material", "finishing"])
        if rng.random() < 0.5:
            del entry[field]
        else:
            entry[field] = rng.choice(["", "   "])
        total += 1
        rejected += not validate_artifact("cmf_scheme_list", {"entries": [entry]}).ok

    # structurally empty payloads
    for body, kind in [({"schemes": []}, "scheme_list"), ({"entries": []}, "cmf_scheme_list"),
                       ({"entries": []}, "evaluation_report"), ({}, "requirement_analysis"),
                       ({}, "design_plan")]:
        total += 1
        rejected += not validate_artifact(kind, body).ok

    assert rejected == total, f"only {rejected}/{total} negatives rejected"
    print(f"\nACCEPTANCE artifact validation negatives: PASS ({rejected}/{total} rejected)")
