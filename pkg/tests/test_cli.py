import json
from pathlib import Path

import pytest

from studiomeet.cli import main
from stats_fixtures import SCORES_CSV


def read_summary(out_dir):
    return json.loads((Path(out_dir) / "summary.json").read_text())


def test_run_demo_mock(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", "--form", "demo", "--backends", "mock", "--seed", "3",
                 "--out", str(out)])
    assert code == 0
    summary = read_summary(out)
    assert summary["status"] == "ok"
    assert summary["artifacts"] == [
        "requirement_analysis", "scheme_list", "cmf_scheme_list",
        "evaluation_report", "design_plan",
    ]
    assert Path(summary["plan_md"]).exists()
    assert Path(summary["plan_md"]).read_text().startswith("# Design Plan:")


def test_run_missing_form_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--out", str(tmp_path)])
    assert excinfo.value.code == 2


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2


def test_run_same_seed_byte_identical(tmp_path):
    out1, out2 = tmp_path / "one", tmp_path / "two"
    assert main(["run", "--form", "demo", "--seed", "11", "--out", str(out1)]) == 0
    assert main(["run", "--form", "demo", "--seed", "11", "--out", str(out2)]) == 0
    m1 = read_summary(out1)["meeting_id"]
    m2 = read_summary(out2)["meeting_id"]
    assert m1 == m2
    events1 = (out1 / "meetings" / m1 / "events.ndjson").read_bytes()
    events2 = (out2 / "meetings" / m2 / "events.ndjson").read_bytes()
    assert events1 == events2
    assert (out1 / "exports" / m1 / "plan.md").read_bytes() == \
        (out2 / "exports" / m2 / "plan.md").read_bytes()
    assert (out1 / "exports" / m1 / "plan.json").read_bytes() == \
        (out2 / "exports" / m2 / "plan.json").read_bytes()


def test_run_with_interjection_script(tmp_path):
    script_path = tmp_path / "script.json"
    script_path.write_text(json.dumps([{"turn": 2, "text": "make Scheme 1 more innovative"}]))
    out = tmp_path / "out"
    assert main(["run", "--form", "demo", "--script", str(script_path), "--seed", "4",
                 "--out", str(out)]) == 0
    meeting_id = read_summary(out)["meeting_id"]
    events = (out / "meetings" / meeting_id / "events.ndjson").read_text().splitlines()
    assert any("make Scheme 1 more innovative" in line for line in events)


def test_replay_on_intact_log(tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", "--form", "demo", "--seed", "5", "--out", str(out)])
    meeting_id = read_summary(out)["meeting_id"]
    assert main(["replay", "--meeting", meeting_id, "--root", str(out)]) == 0
    assert "replay ok" in capsys.readouterr().out


def test_replay_detects_corruption(tmp_path):
    out = tmp_path / "out"
    main(["run", "--form", "demo", "--seed", "6", "--out", str(out)])
    meeting_id = read_summary(out)["meeting_id"]
    events = out / "meetings" / meeting_id / "events.ndjson"
    events.write_text(events.read_text()[:-40])
    assert main(["replay", "--meeting", meeting_id, "--root", str(out)]) == 1


def test_export_from_log(tmp_path):
    out = tmp_path / "out"
    main(["run", "--form", "demo", "--seed", "8", "--out", str(out)])
    meeting_id = read_summary(out)["meeting_id"]
    dest = tmp_path / "re-export"
    assert main(["export", "--meeting", meeting_id, "--root", str(out),
                 "--out", str(dest)]) == 0
    assert (dest / "plan.md").exists()
    original = (out / "exports" / meeting_id / "plan.md").read_bytes()
    assert (dest / "plan.md").read_bytes() == original


def test_export_unknown_meeting(tmp_path):
    assert main(["export", "--meeting", "ghost", "--root", str(tmp_path)]) == 1


def test_eval_fixture_csv(tmp_path, capsys):
    scores = tmp_path / "scores.csv"
    scores.write_text(SCORES_CSV)
    out = tmp_path / "report"
    assert main(["eval", "--scores", str(scores), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert set(report["dimensions"]) == {"novelty", "completeness", "feasibility"}
    plot = (out / "plot_data.csv").read_text().strip().splitlines()
    assert len(plot) == 7


def test_eval_bad_csv(tmp_path):
    scores = tmp_path / "scores.csv"
    scores.write_text("judge,scheme,strategy,novelty,completeness,feasibility\nJ1,S1,1,9,4,4\n")
    assert main(["eval", "--scores", str(scores), "--out", str(tmp_path / "r")]) == 1
