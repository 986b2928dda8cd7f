"""Adapters for the external generative services.

Each tool kind gets a uniform interface: text generation speaks the
OpenAI-compatible chat-completion wire format, the two image operations speak
the Stable-Diffusion-WebUI txt2img/img2img format (with a controlnet canny
unit for the conditioned variant), captioning uses the interrogate endpoint,
and web search hits a simple JSON endpoint. Edge extraction for the canny
path is the remote service's job; the adapter only ships the base image and
the prompt.

Adapters are stateless and safe to call from several meetings concurrently.
Every failure maps to a typed error the engine knows how to handle.
"""

from __future__ import annotations

import base64
import hashlib
import io
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Protocol

import requests

from .errors import BackendUnavailable, InvalidParams, MissingImage, Timeout

DEFAULT_CONTROLNET_MODEL = "control_v11p_sd15_canny"

_MEDIA_EXT = {"image/png": ".png", "image/jpeg": ".jpg", "image/webp": ".webp"}
_EXT_MEDIA = {v: k for k, v in _MEDIA_EXT.items()}


@dataclass(frozen=True)
class BackendDescriptor:
    """Where one backend lives and how patient to be with it."""

    kind: str
    endpoint: str
    auth_env: str = ""
    timeout_ms: int = 30000
    retries: int = 2
    max_concurrent: int = 8

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")
        if self.max_concurrent < 1:
            raise ValueError("max_concurrent must be positive")

    @property
    def timeout_s(self) -> float:
        return self.timeout_ms / 1000.0

    def auth_token(self) -> str:
        return os.environ.get(self.auth_env, "") if self.auth_env else ""


@dataclass(frozen=True)
class ImageRef:
    """Content-addressed handle to stored image bytes."""

    id: str
    media_type: str
    width: int
    height: int
    path: str


@dataclass(frozen=True)
class ImageParams:
    seed: int = 0
    steps: int = 30
    width: int = 512
    height: int = 512

    def validate(self) -> None:
        if self.steps <= 0 or self.width <= 0 or self.height <= 0:
            raise InvalidParams(f"bad image params: {self}")


@dataclass(frozen=True)
class SearchResult:
    title: str
    snippet: str
    url: str

    def to_dict(self) -> dict[str, str]:
        return {"title": self.title, "snippet": self.snippet, "url": self.url}


class ImageStore:
    """Content-addressed image files under a two-level hex prefix layout.

    Storing identical bytes twice yields the same id (the sha256 of the
    bytes), so rewrites are idempotent.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path_for(self, image_id: str, ext: str) -> Path:
        return self.root / image_id[:2] / image_id[2:4] / f"{image_id}{ext}"

    def store(self, data: bytes, media_type: str = "image/png",
              width: int = 0, height: int = 0) -> ImageRef:
        image_id = hashlib.sha256(data).hexdigest()
        ext = _MEDIA_EXT.get(media_type, ".bin")
        path = self._path_for(image_id, ext)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(data)
        if (not width or not height) and media_type in _MEDIA_EXT:
            width, height = _probe_dimensions(data, width, height)
        return ImageRef(id=image_id, media_type=media_type, width=width, height=height,
                        path=str(path))

    def find(self, image_id: str) -> ImageRef | None:
        for ext, media in _EXT_MEDIA.items():
            path = self._path_for(image_id, ext)
            if path.exists():
                data = path.read_bytes()
                width, height = _probe_dimensions(data, 0, 0)
                return ImageRef(id=image_id, media_type=media, width=width,
                                height=height, path=str(path))
        path = self._path_for(image_id, ".bin")
        if path.exists():
            return ImageRef(id=image_id, media_type="application/octet-stream",
                            width=0, height=0, path=str(path))
        return None

    def exists(self, image_id: str) -> bool:
        return self.find(image_id) is not None

    def load_bytes(self, image_id: str) -> bytes:
        ref = self.find(image_id)
        if ref is None:
            raise MissingImage(image_id)
        return Path(ref.path).read_bytes()


def _probe_dimensions(data: bytes, width: int, height: int) -> tuple[int, int]:
    if width and height:
        return width, height
    try:
        from PIL import Image

        with Image.open(io.BytesIO(data)) as img:
            return img.width, img.height
    except Exception:
        return width, height


# ---------------------------------------------------------------------------
# protocols the engine programs against


class TextBackend(Protocol):
    def complete(self, prompt: str) -> str: ...


class ImageBackend(Protocol):
    def txt2img(self, image_prompt: str, params: ImageParams) -> ImageRef: ...

    def canny_img2img(self, base_id: str, cmf_prompt: str, params: ImageParams) -> ImageRef: ...


class CaptionBackend(Protocol):
    def caption(self, image_id: str) -> str: ...


class SearchBackend(Protocol):
    def search(self, query: str, k: int) -> list[SearchResult]: ...


@dataclass
class Toolbox:
    """The full backend set one meeting runs against."""

    text: TextBackend
    image: ImageBackend
    captioner: CaptionBackend
    search: SearchBackend
    image_store: ImageStore


# ---------------------------------------------------------------------------
# retry helper shared by the HTTP clients


def call_with_retries(fn: Callable[[], Any], retries: int, backoff_s: float = 0.2):
    """Run ``fn`` up to ``retries + 1`` times; re-raise the last typed error."""
    last: Exception | None = None
    for attempt in range(retries + 1):
        try:
            return fn()
        except (Timeout, BackendUnavailable) as exc:
            last = exc
            if attempt < retries and backoff_s:
                time.sleep(backoff_s * (attempt + 1))
    assert last is not None
    raise last


def _concurrency_gate(desc: BackendDescriptor) -> threading.BoundedSemaphore:
    return threading.BoundedSemaphore(desc.max_concurrent)


def _post_json(desc: BackendDescriptor, url: str, payload: dict,
               gate: threading.BoundedSemaphore | None = None) -> dict:
    headers = {"Content-Type": "application/json"}
    token = desc.auth_token()
    if token:
        headers["Authorization"] = f"Bearer {token}"

    def once():
        try:
            response = requests.post(url, json=payload, headers=headers, timeout=desc.timeout_s)
        except requests.Timeout as exc:
            raise Timeout(f"{url} timed out after {desc.timeout_ms} ms") from exc
        except requests.RequestException as exc:
            raise BackendUnavailable(f"{url}: {exc}") from exc
        if response.status_code >= 500:
            raise BackendUnavailable(f"{url} returned {response.status_code}")
        if response.status_code >= 400:
            raise InvalidParams(f"{url} rejected the request: {response.status_code}")
        return response.json()

    def gated():
        if gate is None:
            return once()
        with gate:
            return once()

    return call_with_retries(gated, desc.retries)


# ---------------------------------------------------------------------------
# real clients


class OpenAIChatTextClient:
    """Text generation over the OpenAI-compatible chat-completion API."""

    def __init__(self, descriptor: BackendDescriptor, model: str = "gpt-4",
                 temperature: float = 0.7):
        self.descriptor = descriptor
        self.model = model
        self.temperature = temperature
        self._gate = _concurrency_gate(descriptor)

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        url = self.descriptor.endpoint.rstrip("/") + "/chat/completions"
        data = _post_json(self.descriptor, url, payload, self._gate)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendUnavailable(f"malformed chat completion response: {data!r}") from exc


class SDWebUIImageClient:
    """Image generation over the Stable-Diffusion-WebUI HTTP API.

    ``txt2img`` posts to /sdapi/v1/txt2img; the canny-conditioned variant
    posts to /sdapi/v1/img2img with a controlnet unit set to the canny module
    so the service extracts the line draft itself.
    """

    def __init__(self, descriptor: BackendDescriptor, store: ImageStore,
                 controlnet_model: str = DEFAULT_CONTROLNET_MODEL):
        self.descriptor = descriptor
        self.store = store
        self.controlnet_model = controlnet_model
        self._gate = _concurrency_gate(descriptor)

    def _decode_and_store(self, data: dict, params: ImageParams) -> ImageRef:
        try:
            image_b64 = data["images"][0]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendUnavailable(f"malformed image response: {data!r}") from exc
        raw = base64.b64decode(image_b64.split(",")[-1])
        return self.store.store(raw, "image/png", params.width, params.height)

    def txt2img(self, image_prompt: str, params: ImageParams) -> ImageRef:
        if not image_prompt.strip():
            raise InvalidParams("empty image prompt")
        params.validate()
        payload = {
            "prompt": image_prompt,
            "seed": params.seed,
            "steps": params.steps,
            "width": params.width,
            "height": params.height,
        }
        url = self.descriptor.endpoint.rstrip("/") + "/sdapi/v1/txt2img"
        return self._decode_and_store(
            _post_json(self.descriptor, url, payload, self._gate), params)

    def canny_img2img(self, base_id: str, cmf_prompt: str, params: ImageParams) -> ImageRef:
        base_bytes = self.store.load_bytes(base_id)
        params.validate()
        base_b64 = base64.b64encode(base_bytes).decode("ascii")
        payload = {
            "init_images": [base_b64],
            "prompt": cmf_prompt,
            "seed": params.seed,
            "steps": params.steps,
            "width": params.width,
            "height": params.height,
            "alwayson_scripts": {
                "controlnet": {
                    "args": [
                        {
                            "enabled": True,
                            "module": "canny",
                            "model": self.controlnet_model,
                            "image": base_b64,
                        }
                    ]
                }
            },
        }
        url = self.descriptor.endpoint.rstrip("/") + "/sdapi/v1/img2img"
        return self._decode_and_store(
            _post_json(self.descriptor, url, payload, self._gate), params)


class SDWebUICaptionClient:
    """Image-to-text over the WebUI interrogate endpoint."""

    def __init__(self, descriptor: BackendDescriptor, store: ImageStore,
                 model: str = "clip"):
        self.descriptor = descriptor
        self.store = store
        self.model = model
        self._gate = _concurrency_gate(descriptor)

    def caption(self, image_id: str) -> str:
        image_b64 = base64.b64encode(self.store.load_bytes(image_id)).decode("ascii")
        url = self.descriptor.endpoint.rstrip("/") + "/sdapi/v1/interrogate"
        data = _post_json(self.descriptor, url, {"image": image_b64, "model": self.model},
                          self._gate)
        caption = str(data.get("caption", ""))
        return " ".join(caption.split())


class JsonSearchClient:
    """Web search against a JSON endpoint returning [{title, snippet, url}]."""

    def __init__(self, descriptor: BackendDescriptor):
        self.descriptor = descriptor

    def search(self, query: str, k: int) -> list[SearchResult]:
        if k < 1:
            raise InvalidParams("k must be >= 1")

        def once():
            try:
                response = requests.get(
                    self.descriptor.endpoint,
                    params={"q": query, "k": k},
                    timeout=self.descriptor.timeout_s,
                )
            except requests.Timeout as exc:
                raise Timeout(str(exc)) from exc
            except requests.RequestException as exc:
                raise BackendUnavailable(str(exc)) from exc
            if response.status_code >= 400:
                raise BackendUnavailable(f"search returned {response.status_code}")
            return response.json()

        rows = call_with_retries(once, self.descriptor.retries)
        results = [
            SearchResult(title=r.get("title", ""), snippet=r.get("snippet", ""),
                         url=r.get("url", ""))
            for r in rows
        ]
        return results[:k]
