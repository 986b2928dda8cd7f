import json

import pytest

from studiomeet import errors
from studiomeet.backends import ImageParams, ImageStore
from studiomeet.domain import ArtifactKind, validate_artifact
from studiomeet.mocks import (
    ECHO_TOKENS,
    MockCaptionBackend,
    MockImageBackend,
    MockSearchBackend,
    MockTextBackend,
    SOPPlayerTextBackend,
    echo_digest,
)
from studiomeet.prompting import format_rules_for


def test_text_mock_echo_deterministic():
    mock = MockTextBackend(seed=3)
    prompt = "one two three " * 10
    assert mock.complete(prompt) == mock.complete(prompt)
    assert mock.complete(prompt) == " ".join(prompt.split()[:ECHO_TOKENS])


def test_text_mock_script_then_echo_fallback():
    mock = MockTextBackend(seed=0, script=["first reply", "second reply"])
    assert mock.complete("p1") == "first reply"
    assert mock.complete("p2") == "second reply"
    long_prompt = " ".join(f"w{i}" for i in range(40))
    assert mock.complete(long_prompt) == " ".join(long_prompt.split()[:20])
    assert mock.calls == ["p1", "p2", long_prompt]


def test_echo_digest_short_prompt():
    assert echo_digest("just a few words") == "just a few words"


def test_sop_player_emits_valid_artifacts():
    player = SOPPlayerTextBackend(seed=11)
    for kind in ArtifactKind:
        prompt = f"- topic: test cups\n- quantity: 3\n{format_rules_for(kind.value)}"
        reply = player.complete(prompt)
        from studiomeet.prompting import parse_fenced_json

        body = parse_fenced_json(reply)
        assert body is not None, kind
        assert validate_artifact(kind, body).ok, kind
    # determinism: identical prompt, identical reply
    prompt = f"- topic: t\n{format_rules_for('scheme_list')}"
    assert player.complete(prompt) == player.complete(prompt)


def test_sop_player_chats_without_format_rules():
    player = SOPPlayerTextBackend(seed=2)
    reply = player.complete("- topic: desk lamp\njust chat please")
    assert "```" not in reply
    assert "desk lamp" in reply


def test_image_mock_determinism(tmp_path):
    store = ImageStore(tmp_path)
    mock = MockImageBackend(store, seed=1)
    params = ImageParams(seed=1, steps=5, width=16, height=16)
    ref1 = mock.txt2img("red mug", params)
    ref2 = mock.txt2img("red mug", params)
    assert ref1.id == ref2.id
    assert store.exists(ref1.id)
    other = mock.txt2img("blue mug", params)
    assert other.id != ref1.id


def test_image_mock_invalid_params(tmp_path):
    mock = MockImageBackend(ImageStore(tmp_path), seed=1)
    with pytest.raises(errors.InvalidParams):
        mock.txt2img("", ImageParams(width=16, height=16))
    with pytest.raises(errors.InvalidParams):
        mock.txt2img("mug", ImageParams(width=0, height=0))


def test_canny_mock_keyed_on_base_and_prompt(tmp_path):
    store = ImageStore(tmp_path)
    mock = MockImageBackend(store, seed=1)
    params = ImageParams(seed=1, steps=5, width=16, height=16)
    base = mock.txt2img("base sketch", params)
    v1 = mock.canny_img2img(base.id, "matte ceramic, pastel green", params)
    v1_again = mock.canny_img2img(base.id, "matte ceramic, pastel green", params)
    v2 = mock.canny_img2img(base.id, "glossy steel, ink blue", params)
    assert v1.id == v1_again.id
    assert v1.id != v2.id
    with pytest.raises(errors.MissingImage):
        mock.canny_img2img("00" * 32, "prompt", params)


def test_caption_mock(tmp_path):
    store = ImageStore(tmp_path)
    image = MockImageBackend(store, seed=1)
    ref = image.txt2img("mug", ImageParams(width=16, height=16, steps=1))
    captioner = MockCaptionBackend(store)
    caption = captioner.caption(ref.id)
    assert caption == captioner.caption(ref.id)
    assert caption == f"mock caption of {ref.id[:12]}"
    assert "\n" not in caption
    with pytest.raises(errors.MissingImage):
        captioner.caption("00" * 32)


def test_search_mock_fixture_corpus():
    search = MockSearchBackend()
    results = search.search("office cup market", 3)
    assert results, "fixture corpus must answer the bundled query"
    assert results[0].title == "Office drinkware market snapshot"
    assert all(r.snippet and r.url for r in results)
    assert len(search.search("office cup market", 1)) == 1
    assert search.search("quantum flux capacitors", 3) == []
    with pytest.raises(errors.InvalidParams):
        search.search("x", 0)
