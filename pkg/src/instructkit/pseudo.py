"""Chat-completion client that fills in pseudo-labels for input-only samples.

Requests are deduplicated by fingerprint, cached to disk across runs, rate
limited, and retried with exponential backoff. The wire format is a plain
chat-completion POST: {"model", "messages"} in, first message text out.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
import urllib.error
import urllib.request
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from concurrent.futures import ThreadPoolExecutor

from .corpus import LabelSource, RawSample, TargetText, TaskSpec
from .errors import ConfigError, ToolkitError
from .forge import PSEUDO_LABEL
from .render import choose_prompt, fill_template
from .seeding import derive_seed

_BACKOFF_BASE = 0.5
_BACKOFF_CAP = 30.0


@dataclass(frozen=True)
class ClientConfig:
    endpoint: str
    model: str
    auth_env: str | None = None
    max_retries: int = 3
    timeout: float = 10.0
    max_concurrency: int = 1
    requests_per_minute: int = 600

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.max_concurrency < 1:
            raise ConfigError("max_concurrency must be >= 1")
        if self.requests_per_minute < 1:
            raise ConfigError("requests_per_minute must be >= 1")


def fingerprint(model: str, prompt: str) -> str:
    """Stable across runs and platforms; collisions are treated as hits."""
    h = hashlib.sha256()
    h.update(model.encode("utf-8"))
    h.update(b"\x00")
    h.update(prompt.encode("utf-8"))
    return h.hexdigest()


class PseudoCache:
    """Append-only fingerprint -> completion map, persisted as JSONL."""

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path is not None else None
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        obj = json.loads(line)
                        self._entries[obj["fingerprint"]] = obj["completion"]

    def get(self, fp: str) -> str | None:
        with self._lock:
            return self._entries.get(fp)

    def put(self, fp: str, completion: str, timestamp: float) -> None:
        with self._lock:
            if fp in self._entries:
                return
            self._entries[fp] = completion
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(
                        json.dumps(
                            {"fingerprint": fp, "completion": completion, "timestamp": timestamp},
                            ensure_ascii=False,
                            sort_keys=True,
                        )
                    )
                    fh.write("\n")

    def __len__(self) -> int:
        return len(self._entries)


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class TransportError(ToolkitError):
    """Transient transport or HTTP failure; eligible for retry."""


# transport(url, payload, headers, timeout) -> response dict
Transport = Callable[[str, dict, dict, float], dict]


def urllib_transport(url: str, payload: dict, headers: dict, timeout: float) -> dict:
    body = json.dumps(payload).encode("utf-8")
    request = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json", **headers}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        raise TransportError(f"HTTP {exc.code}") from exc
    except (urllib.error.URLError, TimeoutError, OSError) as exc:
        raise TransportError(str(exc)) from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise TransportError(f"bad response body: {exc}") from exc


class _RateLimiter:
    """Sliding-window limiter: at most `cap` sends in any 60 s window."""

    def __init__(self, cap: int, clock: Clock) -> None:
        self.cap = cap
        self.clock = clock
        self._sent: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        with self._lock:
            while True:
                now = self.clock.now()
                while self._sent and now - self._sent[0] >= 60.0:
                    self._sent.popleft()
                if len(self._sent) < self.cap:
                    self._sent.append(now)
                    return
                self.clock.sleep(self._sent[0] + 60.0 - now)


@dataclass
class PseudoResult:
    samples: list[RawSample]
    requests_made: int = 0
    cache_hits: int = 0
    skipped_failures: int = 0
    skipped_empty: int = 0
    diagnostics: list[str] = field(default_factory=list)


def build_prompt(sample: RawSample, spec: TaskSpec, seed: int) -> str:
    """Full user message for the completion request; the sample text is
    appended when the template does not place it itself."""
    index = choose_prompt(spec, derive_seed(seed, "pseudo-prompt", spec.task_id, sample.id))
    template = spec.prompts[index]
    filled = fill_template(template, sample, spec)
    if "{input}" not in template:
        filled = f"{filled}\n\n{sample.input_text}"
    return filled


def generate_pseudo_labels(
    samples: list[RawSample],
    spec: TaskSpec,
    cfg: ClientConfig,
    cache: PseudoCache,
    *,
    seed: int = 0,
    transport: Transport | None = None,
    clock: Clock | None = None,
    rng: random.Random | None = None,
) -> PseudoResult:
    """Label every sample under `spec` via the completion service.

    Cache hits never touch the network; a warm rerun issues zero requests.
    Transport failures past the retry budget and empty completions skip the
    sample and are counted.
    """
    transport = transport if transport is not None else urllib_transport
    clock = clock if clock is not None else SystemClock()
    rng = rng if rng is not None else random.Random(derive_seed(seed, "pseudo-jitter"))

    headers: dict[str, str] = {}
    if cfg.auth_env:
        credential = os.environ.get(cfg.auth_env)
        if not credential:
            raise ConfigError(f"credential environment variable {cfg.auth_env} is not set")
        headers["Authorization"] = f"Bearer {credential}"

    prompts = [build_prompt(sample, spec, seed) for sample in samples]
    fps = [fingerprint(cfg.model, p) for p in prompts]

    # One request per distinct uncached fingerprint.
    pending: dict[str, str] = {}
    for fp, prompt in zip(fps, prompts):
        if cache.get(fp) is None and fp not in pending:
            pending[fp] = prompt

    result = PseudoResult(samples=[])
    limiter = _RateLimiter(cfg.requests_per_minute, clock)
    counter_lock = threading.Lock()
    failures: dict[str, str] = {}

    def fetch(fp: str, prompt: str) -> None:
        payload = {
            "model": cfg.model,
            "messages": [
                {"role": "system", "content": spec.task_description},
                {"role": "user", "content": prompt},
            ],
        }
        attempts = cfg.max_retries + 1
        for attempt in range(attempts):
            limiter.acquire()
            with counter_lock:
                result.requests_made += 1
            try:
                response = transport(cfg.endpoint, payload, headers, cfg.timeout)
            except TransportError as exc:
                if attempt + 1 >= attempts:
                    failures[fp] = str(exc)
                    return
                delay = min(_BACKOFF_CAP, _BACKOFF_BASE * (2**attempt))
                clock.sleep(delay * (0.5 + rng.random() / 2))
                continue
            completion = _completion_text(response)
            cache.put(fp, completion, clock.now())
            return

    if pending:
        items = list(pending.items())
        if cfg.max_concurrency > 1:
            with ThreadPoolExecutor(max_workers=cfg.max_concurrency) as pool:
                list(pool.map(lambda kv: fetch(*kv), items))
        else:
            for fp, prompt in items:
                fetch(fp, prompt)

    for sample, fp in zip(samples, fps):
        if fp in failures:
            result.skipped_failures += 1
            result.diagnostics.append(f"{sample.id}: transport failed ({failures[fp]})")
            continue
        completion = cache.get(fp)
        if completion is None:
            result.skipped_failures += 1
            result.diagnostics.append(f"{sample.id}: no completion")
            continue
        if not completion.strip():
            result.skipped_empty += 1
            result.diagnostics.append(f"{sample.id}: empty completion")
            continue
        if fp not in pending:
            result.cache_hits += 1
        result.samples.append(
            sample.derive(
                id_suffix=spec.task_id,
                dataset_id=spec.dataset_id,
                annotations=TargetText(completion),
                transform=PSEUDO_LABEL,
                label_source=LabelSource.PSEUDO,
            )
        )
    return result


def _completion_text(response: dict) -> str:
    try:
        return response["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        return ""
