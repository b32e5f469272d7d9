"""Chat-completion formalizer: HTTP client, prompt assets, transcripts.

Each formalizer step issues a single chat-completion request (system prompt =
the language guide, user prompt = the step's instructions plus the puzzle),
and extracts the first fenced code block from the reply. Every request and
reply can be appended to a JSONL transcript; replaying a transcript through
the same extraction path reproduces a pipeline run bit for bit.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

from ..errors import ExtractionError, TransportError
from ..frontend.parser import SourceText
from .pipeline import ExpectedFormat

ENDPOINT_ENV = "LOGIC_AGENT_ENDPOINT"
MODEL_ENV = "LOGIC_AGENT_MODEL"
API_KEY_ENV = "LOGIC_AGENT_API_KEY"

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


@dataclass(frozen=True)
class LlmClientConfig:
    endpoint: str
    model: str
    api_key: str = ""
    timeout: float = 120.0
    temperature: float = 0.0
    max_in_flight: int = 16

    @staticmethod
    def from_env() -> "LlmClientConfig":
        endpoint = os.environ.get(ENDPOINT_ENV, "")
        model = os.environ.get(MODEL_ENV, "")
        if not endpoint or not model:
            raise TransportError(
                f"set {ENDPOINT_ENV} and {MODEL_ENV} to use the LLM formalizer"
            )
        return LlmClientConfig(endpoint, model, os.environ.get(API_KEY_ENV, ""))


@dataclass(frozen=True)
class Prompts:
    language_guide: str
    data_structure: str
    constraints: str

    @staticmethod
    def load() -> "Prompts":
        base = resources.files("logicforge.agent") / "prompts"
        return Prompts(
            (base / "language_guide.md").read_text(encoding="utf-8"),
            (base / "data_structure.md").read_text(encoding="utf-8"),
            (base / "constraints.md").read_text(encoding="utf-8"),
        )


def extract_code_block(reply: str) -> str:
    """The body of the first fenced code block in a model reply."""
    match = _FENCE_RE.search(reply)
    if match is None:
        raise ExtractionError("reply contains no fenced code block")
    return match.group(1)


class TranscriptWriter:
    """Appends one JSON object per formalizer exchange to a JSONL file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def record(self, step: str, request: dict | None, response_text: str) -> None:
        entry = {"step": step, "request": request, "response_text": response_text}
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


class LlmFormalizer:
    """Formalizer backed by a chat-completion HTTP endpoint."""

    def __init__(
        self,
        config: LlmClientConfig,
        prompts: Prompts | None = None,
        transcript: TranscriptWriter | None = None,
        session: requests.Session | None = None,
    ):
        self.config = config
        self.prompts = prompts or Prompts.load()
        self.transcript = transcript
        self.session = session or requests.Session()
        self._slots = threading.Semaphore(config.max_in_flight)

    def gen_data_structure(self, puzzle_text: str, expected_format: ExpectedFormat) -> SourceText:
        user = self.prompts.data_structure.format(
            puzzle=puzzle_text,
            expected_format=json.dumps(expected_format.to_json_dict()),
        )
        reply, request = self._complete(user)
        if self.transcript:
            self.transcript.record("data_structure", request, reply)
        return SourceText(extract_code_block(reply), "llm:data_structure")

    def gen_constraints(self, data_structure_source: SourceText, puzzle_text: str) -> SourceText:
        user = self.prompts.constraints.format(
            data_structure=data_structure_source.text, puzzle=puzzle_text
        )
        reply, request = self._complete(user)
        if self.transcript:
            self.transcript.record("constraints", request, reply)
        return SourceText(extract_code_block(reply), "llm:constraints")

    def _complete(self, user_prompt: str) -> tuple[str, dict]:
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": self.prompts.language_guide},
                {"role": "user", "content": user_prompt},
            ],
            "temperature": self.config.temperature,
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        with self._slots:
            try:
                resp = self.session.post(
                    self.config.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=self.config.timeout,
                )
            except requests.RequestException as exc:
                raise TransportError(f"request failed: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"endpoint returned HTTP {resp.status_code}")
        try:
            body = resp.json()
            reply = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion response: {exc}") from exc
        return reply, payload


def llm_formalizer(
    config: LlmClientConfig | None = None,
    prompts: Prompts | None = None,
    transcript: TranscriptWriter | None = None,
) -> LlmFormalizer:
    """Build the LLM formalizer, reading endpoint settings from the
    environment when no config is given."""
    return LlmFormalizer(config or LlmClientConfig.from_env(), prompts, transcript)


class ReplayFormalizer:
    """Serves recorded replies in order, through the normal extraction path."""

    def __init__(self, transcript_path: str | Path):
        self.entries = []
        with open(transcript_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self.entries.append(json.loads(line))
        self._next = 0

    def _take(self, step: str) -> str:
        if self._next >= len(self.entries):
            raise ExtractionError("transcript exhausted")
        entry = self.entries[self._next]
        if entry["step"] != step:
            raise ExtractionError(
                f"transcript expects step {entry['step']!r}, pipeline asked for {step!r}"
            )
        self._next += 1
        return entry["response_text"]

    def gen_data_structure(self, puzzle_text: str, expected_format: ExpectedFormat) -> SourceText:
        return SourceText(extract_code_block(self._take("data_structure")), "replay:data_structure")

    def gen_constraints(self, data_structure_source: SourceText, puzzle_text: str) -> SourceText:
        return SourceText(extract_code_block(self._take("constraints")), "replay:constraints")


class RecordingFormalizer:
    """Wraps any formalizer and records its outputs as fenced transcripts."""

    def __init__(self, inner, transcript: TranscriptWriter):
        self.inner = inner
        self.transcript = transcript

    def gen_data_structure(self, puzzle_text: str, expected_format: ExpectedFormat) -> SourceText:
        out = self.inner.gen_data_structure(puzzle_text, expected_format)
        self.transcript.record("data_structure", None, f"```\n{out.text}\n```")
        return out

    def gen_constraints(self, data_structure_source: SourceText, puzzle_text: str) -> SourceText:
        out = self.inner.gen_constraints(data_structure_source, puzzle_text)
        self.transcript.record("constraints", None, f"```\n{out.text}\n```")
        return out
