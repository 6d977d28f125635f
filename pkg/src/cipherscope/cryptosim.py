"""Deterministic simulator for ransomware intermittent-encryption modes.

Planning and byte transformation are split: a plan is an ordered list of
non-overlapping (offset, length) ranges derived from a mode and a file
length, and applying a plan replaces exactly those ranges with AES-128-GCM
ciphertext while leaving every other byte untouched. Plans double as ground
truth for coverage during evaluation.

Modes:

* head      - encrypt the first round(alpha * N) bytes;
* dot       - split the file into fixed-size blocks and encrypt the first
              floor(alpha * block_len) bytes of each (the final partial block
              is treated proportionally);
* hybrid    - head rule on block 0, dot rule on the remaining blocks;
* adaptive  - full encryption for files at or below a size threshold,
              hybrid above it;
* full      - encrypt everything.

Aggregate histogram statistics depend only on the encrypted fraction, not on
where the ranges sit, so the run-at-block-start placement is as good as any.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Tuple

from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .errors import AlphaOutOfRangeError, LengthMismatchError, NonceReuseError

HEAD = "head"
DOT = "dot"
HYBRID = "hybrid"
ADAPTIVE = "adaptive"
FULL = "full"
VARIANTS = (HEAD, DOT, HYBRID, ADAPTIVE, FULL)

DEFAULT_BLOCK_SIZE = 64 * 1024
DEFAULT_SIZE_THRESHOLD = 10 * 1024 * 1024

KEY_BYTES = 16  # AES-128
NONCE_BYTES = 12  # 96-bit GCM nonce
_TAG_BYTES = 16


@dataclass(frozen=True)
class EncryptionMode:
    variant: str
    fraction: float = 1.0
    block_size: int = DEFAULT_BLOCK_SIZE
    size_threshold: int = DEFAULT_SIZE_THRESHOLD

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        if not 0.0 <= self.fraction <= 1.0:
            raise AlphaOutOfRangeError(f"fraction must be in [0, 1], got {self.fraction}")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.size_threshold < 1:
            raise ValueError("size_threshold must be >= 1")


@dataclass(frozen=True)
class EncryptionPlan:
    ranges: Tuple[Tuple[int, int], ...]  # sorted, non-overlapping (offset, length)
    file_length: int
    achieved_coverage: float
    mode: EncryptionMode

    def __post_init__(self):
        prev_end = 0
        for off, length in self.ranges:
            if length <= 0 or off < prev_end or off + length > self.file_length:
                raise ValueError("plan ranges must be sorted, non-overlapping, in-bounds")
            prev_end = off + length
        covered = sum(length for _, length in self.ranges)
        expect = covered / self.file_length if self.file_length else 0.0
        if abs(expect - self.achieved_coverage) > 1e-12:
            raise ValueError("achieved_coverage inconsistent with ranges")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _head_ranges(alpha: float, start: int, length: int) -> list:
    n = _round_half_up(alpha * length)
    return [(start, n)] if n > 0 else []


def _dot_ranges(alpha: float, start: int, length: int, block_size: int) -> list:
    ranges = []
    pos = 0
    while pos < length:
        block_len = min(block_size, length - pos)
        n = int(math.floor(alpha * block_len))
        if n > 0:
            ranges.append((start + pos, n))
        pos += block_len
    return ranges


def plan(mode: EncryptionMode, file_length: int) -> EncryptionPlan:
    """Derive the encryption plan for a file of the given length."""
    if file_length < 0:
        raise ValueError("file_length must be >= 0")
    alpha = mode.fraction
    if file_length == 0:
        return EncryptionPlan(ranges=(), file_length=0, achieved_coverage=0.0, mode=mode)

    if mode.variant == FULL:
        ranges = [(0, file_length)]
    elif mode.variant == HEAD:
        ranges = _head_ranges(alpha, 0, file_length)
    elif mode.variant == DOT:
        ranges = _dot_ranges(alpha, 0, file_length, mode.block_size)
    elif mode.variant == HYBRID:
        first = min(mode.block_size, file_length)
        ranges = _head_ranges(alpha, 0, first)
        ranges += _dot_ranges(alpha, first, file_length - first, mode.block_size)
    else:  # adaptive
        if file_length <= mode.size_threshold:
            ranges = [(0, file_length)]
        else:
            first = min(mode.block_size, file_length)
            ranges = _head_ranges(alpha, 0, first)
            ranges += _dot_ranges(alpha, first, file_length - first, mode.block_size)

    covered = sum(length for _, length in ranges)
    return EncryptionPlan(ranges=tuple(ranges), file_length=file_length,
                          achieved_coverage=covered / file_length, mode=mode)


def coverage(plan: EncryptionPlan) -> float:
    """Fraction of the file inside encrypted ranges (0 for an empty file)."""
    if plan.file_length == 0:
        return 0.0
    return sum(length for _, length in plan.ranges) / plan.file_length


def apply(plaintext: bytes, plan: EncryptionPlan, key: bytes, nonce: bytes) -> bytes:
    """Replace the plan's ranges with AES-128-GCM ciphertext.

    The ranges are encrypted as one logical message in order; the
    authentication tag is computed and dropped so the output length equals
    the input length. Bytes outside the ranges are copied verbatim.
    """
    if plan.file_length != len(plaintext):
        raise LengthMismatchError(
            f"plan is for {plan.file_length} bytes, got {len(plaintext)}")
    if len(key) != KEY_BYTES:
        raise ValueError(f"key must be {KEY_BYTES} bytes (AES-128)")
    if len(nonce) != NONCE_BYTES:
        raise ValueError(f"nonce must be {NONCE_BYTES} bytes (96-bit GCM)")
    if not plan.ranges:
        return bytes(plaintext)

    message = b"".join(plaintext[off:off + length] for off, length in plan.ranges)
    ciphertext = AESGCM(key).encrypt(nonce, message, None)[:-_TAG_BYTES]

    out = bytearray(plaintext)
    pos = 0
    for off, length in plan.ranges:
        out[off:off + length] = ciphertext[pos:pos + length]
        pos += length
    return bytes(out)


def derive_key_nonce(seed: int, index: int) -> Tuple[bytes, bytes]:
    """Deterministic per-file key and nonce for reproducible experiment runs."""
    key = hashlib.sha256(f"cipherscope-key:{seed}:{index}".encode()).digest()[:KEY_BYTES]
    nonce = hashlib.sha256(f"cipherscope-nonce:{seed}:{index}".encode()).digest()[:NONCE_BYTES]
    return key, nonce


def key_id(key: bytes) -> str:
    """Short stable identifier for a key; the key itself is never persisted."""
    return hashlib.sha256(key).hexdigest()[:16]


@dataclass
class NonceRegistry:
    """Tracks nonces within one run and rejects reuse across files."""

    _seen: set = field(default_factory=set)

    def register(self, nonce: bytes) -> None:
        if nonce in self._seen:
            raise NonceReuseError(f"nonce {nonce.hex()} already used in this run")
        self._seen.add(nonce)
