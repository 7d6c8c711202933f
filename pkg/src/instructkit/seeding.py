"""Named-stream seed derivation.

One root seed in the run config; every stage / record draws from its own
stream so adding a stage never shifts another stage's randomness.
"""

from __future__ import annotations

import hashlib


def derive_seed(root: int, *stream: str) -> int:
    h = hashlib.sha256(str(root).encode("ascii"))
    for name in stream:
        h.update(b"\x1f")
        h.update(name.encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")
