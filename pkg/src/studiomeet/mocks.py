"""Deterministic seeded mocks for every backend kind.

All mocks are pure functions of (seed, inputs) — full-meeting replay
determinism rests on this. Tests may load an ordered script of responses;
an exhausted script falls back to echo mode (the first 20 word tokens of the
prompt) instead of erroring so long property-test runs terminate.
"""

from __future__ import annotations

import hashlib
import io
import json
import random
import re
from importlib import resources
from typing import Sequence

from .backends import ImageParams, ImageRef, ImageStore, SearchResult
from .domain import ArtifactKind
from .errors import InvalidParams, MissingImage

ECHO_TOKENS = 20

_KIND_REQUEST_RE = re.compile(r'artifact kind "([a-z_]+)"')
_TOPIC_RE = re.compile(r"^- topic: (.+)$", re.MULTILINE)
_QUANTITY_RE = re.compile(r"^- quantity: (\d+)$", re.MULTILINE)

_COLORS = ["pastel green", "warm terracotta", "ink blue", "soft coral", "stone grey"]
_MATERIALS = ["matte ceramic", "frosted glass", "brushed steel", "recycled PP", "bamboo fiber"]
_FINISHES = ["soft-touch coat", "glossy glaze", "sandblasted", "micro-textured", "satin lacquer"]


def _digest(*parts) -> int:
    joined = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(joined.encode("utf-8")).digest()[:8], "big")


def echo_digest(prompt: str) -> str:
    return " ".join(prompt.split()[:ECHO_TOKENS])


class MockTextBackend:
    """Scripted or echoing text backend.

    Pops scripted replies in order; once the script is exhausted (or when no
    script was given) it echoes the first 20 word tokens of the prompt.
    Every prompt it sees is recorded in ``calls``.
    """

    def __init__(self, seed: int = 0, script: Sequence[str] | None = None):
        self.seed = seed
        self._script = list(script or [])
        self.calls: list[str] = []

    def complete(self, prompt: str) -> str:
        self.calls.append(prompt)
        if self._script:
            return self._script.pop(0)
        return echo_digest(prompt)


class SOPPlayerTextBackend:
    """Seeded text backend that plays along with the SOP.

    When the prompt's format rules request an artifact kind it emits a valid
    fenced JSON body for that kind, derived deterministically from
    (seed, prompt); otherwise it chats one short line. Pure per input, so two
    identical calls give identical replies.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.calls: list[str] = []

    def complete(self, prompt: str) -> str:
        self.calls.append(prompt)
        match = _KIND_REQUEST_RE.search(prompt)
        if match is None:
            return self._chat_line(prompt)
        kind = ArtifactKind(match.group(1))
        body = self._body_for(kind, prompt)
        lead = self._chat_line(prompt)
        return f"{lead}\n```json\n{json.dumps(body, indent=2)}\n```"

    def _rng(self, prompt: str) -> random.Random:
        return random.Random(_digest(self.seed, prompt))

    def _chat_line(self, prompt: str) -> str:
        topic = self._topic(prompt)
        n = _digest(self.seed, prompt) % 97
        return f"Thoughts on {topic} (note {n})."

    @staticmethod
    def _topic(prompt: str) -> str:
        match = _TOPIC_RE.search(prompt)
        return match.group(1).strip() if match else "the brief"

    def _body_for(self, kind: ArtifactKind, prompt: str) -> dict:
        rng = self._rng(prompt)
        topic = self._topic(prompt)
        qty_match = _QUANTITY_RE.search(prompt)
        count = min(int(qty_match.group(1)), 4) if qty_match else 2
        if kind is ArtifactKind.REQUIREMENT_ANALYSIS:
            return {
                "market_notes": f"The market around {topic} favors compact, personal products"
                f" (signal {rng.randint(10, 99)}).",
                "user_personas": [
                    f"A young professional who wants {topic} to fit a shared desk",
                    "A commuter who values easy cleaning and a secure lid",
                ],
                "product_definition": f"A focused take on {topic} with one memorable trait.",
            }
        if kind is ArtifactKind.SCHEME_LIST:
            return {
                "schemes": [
                    {
                        "title": f"Concept {i + 1}",
                        "concept": f"{rng.choice(_MATERIALS)} form exploring {topic},"
                        f" emphasis on {rng.choice(['stackability', 'grip', 'thermal hold', 'expression'])}.",
                        "image_refs": [],
                    }
                    for i in range(count)
                ]
            }
        if kind is ArtifactKind.CMF_SCHEME_LIST:
            return {
                "entries": [
                    {
                        "base_image_ref": "",
                        "color": rng.choice(_COLORS),
                        "material": rng.choice(_MATERIALS),
                        "finishing": rng.choice(_FINISHES),
                        "prompt": "",
                        "result_image_refs": [],
                    }
                    for _ in range(2)
                ]
            }
        if kind is ArtifactKind.EVALUATION_REPORT:
            return {
                "entries": [
                    {
                        "scheme": f"Concept {i + 1}",
                        "notes": f"Feasible with standard tooling; risk note {rng.randint(1, 9)}.",
                        "scores": {
                            "novelty": rng.randint(3, 7),
                            "completeness": rng.randint(3, 7),
                            "feasibility": rng.randint(3, 7),
                        },
                    }
                    for i in range(count)
                ]
            }
        return {"summary": f"Design plan for {topic}.", "sections": {}}


class MockImageBackend:
    """Renders a deterministic solid-color placeholder per (inputs, seed)."""

    def __init__(self, store: ImageStore, seed: int = 0):
        self.store = store
        self.seed = seed

    def _render(self, key: int, params: ImageParams) -> ImageRef:
        from PIL import Image

        color = ((key >> 16) & 0xFF, (key >> 8) & 0xFF, key & 0xFF)
        img = Image.new("RGB", (params.width, params.height), color)
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return self.store.store(buf.getvalue(), "image/png", params.width, params.height)

    def txt2img(self, image_prompt: str, params: ImageParams) -> ImageRef:
        if not image_prompt.strip():
            raise InvalidParams("empty image prompt")
        params.validate()
        key = _digest(self.seed, "txt2img", image_prompt, params.seed, params.steps,
                      params.width, params.height)
        return self._render(key, params)

    def canny_img2img(self, base_id: str, cmf_prompt: str, params: ImageParams) -> ImageRef:
        if not self.store.exists(base_id):
            raise MissingImage(base_id)
        params.validate()
        key = _digest(self.seed, "canny", base_id, cmf_prompt, params.seed)
        return self._render(key, params)


class MockCaptionBackend:
    def __init__(self, store: ImageStore, seed: int = 0):
        self.store = store
        self.seed = seed

    def caption(self, image_id: str) -> str:
        if not self.store.exists(image_id):
            raise MissingImage(image_id)
        return f"mock caption of {image_id[:12]}"


class MockSearchBackend:
    """Serves results from the bundled fixture corpus, keyed by keyword
    overlap with the query."""

    def __init__(self, corpus: list[dict] | None = None):
        if corpus is None:
            raw = resources.files("studiomeet.data").joinpath("search_corpus.json").read_text()
            corpus = json.loads(raw)
        self.corpus = corpus

    def search(self, query: str, k: int) -> list[SearchResult]:
        if k < 1:
            raise InvalidParams("k must be >= 1")
        tokens = {t for t in re.split(r"\W+", query.lower()) if t}
        scored = []
        for entry in self.corpus:
            overlap = len(tokens & {kw.lower() for kw in entry["keywords"]})
            if overlap:
                scored.append((-overlap, entry["title"], entry))
        scored.sort()
        return [
            SearchResult(title=e["title"], snippet=e["snippet"], url=e["url"])
            for _, _, e in scored[:k]
        ]


def mock_toolbox(seed: int, image_root, *, text_script: Sequence[str] | None = None,
                 sop_player: bool = True):
    """Assemble a full mock backend set rooted at ``image_root``."""
    from .backends import Toolbox

    store = ImageStore(image_root)
    if text_script is not None:
        text = MockTextBackend(seed, script=text_script)
    elif sop_player:
        text = SOPPlayerTextBackend(seed)
    else:
        text = MockTextBackend(seed)
    return Toolbox(
        text=text,
        image=MockImageBackend(store, seed),
        captioner=MockCaptionBackend(store, seed),
        search=MockSearchBackend(),
        image_store=store,
    )
