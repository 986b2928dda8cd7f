import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from studiomeet.domain import EngineConfig, RequirementForm
from studiomeet.engine import MeetingEngine, SteppingClock
from studiomeet.mocks import mock_toolbox
from studiomeet.registry import core_roster


@pytest.fixture
def demo_form():
    return RequirementForm(
        topic="three cups for young people in the office",
        description="Desk-friendly cups with personality.",
        constraints=("dishwasher safe",),
        quantity=3,
    )


@pytest.fixture
def fast_config():
    return EngineConfig(max_turns_per_stage=3, history_token_budget=400, seed=7)


def make_engine(tmp_path, seed=7, *, text_script=None, sop_player=True, on_message=None):
    toolbox = mock_toolbox(seed, tmp_path / "images", text_script=text_script,
                           sop_player=sop_player)
    engine = MeetingEngine(toolbox, clock=SteppingClock(), on_message=on_message)
    return engine, toolbox


@pytest.fixture
def engine_factory(tmp_path):
    def factory(seed=7, text_script=None, sop_player=True, on_message=None):
        return make_engine(tmp_path, seed, text_script=text_script,
                           sop_player=sop_player, on_message=on_message)

    return factory


@pytest.fixture
def roster():
    return core_roster()
