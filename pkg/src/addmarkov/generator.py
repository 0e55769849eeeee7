"""Seeded sequence synthesis and sequence file formats.

Random stream: xoshiro256** seeded with four successive SplitMix64 outputs
of the user seed. A symbol is 1 iff ``u < P(1|window)``, with ``u`` built
from the top 53 bits of one generator output.

Packed file layout::

    b"AMC1" | version 0x01 | uint64 LE symbol count | payload

with symbol ``i`` stored at byte ``i // 8``, bit ``i % 8`` (LSB first).
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._backend import kernels
from .chain import AdditiveChainSpec, ChainSpec, require_valid

PRNG_ID = "xoshiro256**/splitmix64 v1"
MAGIC = b"AMC1"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sBQ")
HEADER_SIZE = _HEADER.size


class SequenceFormatError(ValueError):
    pass


def seed_state(seed: int) -> np.ndarray:
    """Expand a 64-bit seed into a xoshiro256** state."""
    x = int(seed) & 0xFFFFFFFFFFFFFFFF
    words = []
    for _ in range(4):
        z, x = kernels.splitmix64(x)
        words.append(z)
    return np.array(words, dtype=np.uint64)


def derive_seed(seed: int, worker_index: int) -> int:
    """Seed for ensemble member ``worker_index``; independent of scheduling."""
    z, _ = kernels.splitmix64((int(seed) ^ int(worker_index)) & 0xFFFFFFFFFFFFFFFF)
    return int(z)


@dataclass(frozen=True)
class GenerationConfig:
    length: int
    seed: int = 0
    burn_in: Optional[int] = None

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")

    def burn_in_for(self, order: int) -> int:
        return 10 * order + 1000 if self.burn_in is None else self.burn_in


@dataclass(eq=False)
class SymbolSequence:
    symbols: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        symbols = np.ascontiguousarray(self.symbols, dtype=np.uint8).reshape(-1)
        if symbols.size and symbols.max() > 1:
            raise SequenceFormatError("symbols must be 0 or 1")
        self.symbols = symbols

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        if not isinstance(other, SymbolSequence):
            return NotImplemented
        return np.array_equal(self.symbols, other.symbols)

    @property
    def mean(self) -> float:
        return float(self.symbols.mean())


def generate(spec: ChainSpec, config: GenerationConfig) -> SymbolSequence:
    require_valid(spec)
    state = seed_state(config.seed)
    burn_in = config.burn_in_for(spec.order)
    if isinstance(spec, AdditiveChainSpec):
        symbols = kernels.run_additive(np.ascontiguousarray(spec.memory, dtype=float),
                                       float(spec.mean), state, burn_in, config.length)
    else:
        symbols = kernels.run_stepwise(spec.order, float(spec.mu), float(spec.nu),
                                       state, burn_in, config.length)
    provenance = {"spec": spec.to_dict(), "seed": int(config.seed), "burn_in": burn_in,
                  "length": int(config.length), "prng": PRNG_ID,
                  "backend": kernels.BACKEND}
    return SymbolSequence(symbols, provenance)


def worker_count() -> int:
    env = os.environ.get("ADDMARKOV_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def generate_ensemble(spec: ChainSpec, config: GenerationConfig, replicas: int,
                      workers: Optional[int] = None) -> list:
    """Independent replicas with seeds ``derive_seed(config.seed, i)``."""
    configs = [GenerationConfig(config.length, derive_seed(config.seed, i), config.burn_in)
               for i in range(replicas)]
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        return list(pool.map(lambda c: generate(spec, c), configs))


def to_text(seq: SymbolSequence) -> str:
    return (seq.symbols + ord("0")).tobytes().decode("ascii") + "\n"


def from_text(text: str) -> SymbolSequence:
    body = text[:-1] if text.endswith("\n") else text
    raw = np.frombuffer(body.encode("ascii", errors="replace"), dtype=np.uint8)
    symbols = raw - ord("0")
    if raw.size and (raw.min() < ord("0") or raw.max() > ord("1")):
        raise SequenceFormatError("text sequence may contain only '0' and '1'")
    return SymbolSequence(symbols)


def to_packed(seq: SymbolSequence) -> bytes:
    payload = np.packbits(seq.symbols, bitorder="little").tobytes()
    return _HEADER.pack(MAGIC, FORMAT_VERSION, len(seq)) + payload


def from_packed(data: bytes) -> SymbolSequence:
    if len(data) < _HEADER.size:
        raise SequenceFormatError("packed file shorter than its header")
    magic, version, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SequenceFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise SequenceFormatError(f"unsupported packed format version {version}")
    payload = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
    need = (count + 7) // 8
    if payload.size != need:
        raise SequenceFormatError(
            f"payload has {payload.size} bytes, header announces {count} symbols ({need} bytes)")
    return SymbolSequence(np.unpackbits(payload, count=count, bitorder="little"))


def write_sequence(seq: SymbolSequence, destination, format: str = "packed") -> None:
    if format == "text":
        Path(destination).write_text(to_text(seq))
    elif format == "packed":
        Path(destination).write_bytes(to_packed(seq))
    else:
        raise ValueError(f"unknown sequence format {format!r}")


def read_sequence(source) -> SymbolSequence:
    """Read a text or packed file; the format is detected from the magic bytes."""
    data = Path(source).read_bytes()
    if data.startswith(MAGIC):
        return from_packed(data)
    try:
        return from_text(data.decode("ascii"))
    except UnicodeDecodeError as exc:
        raise SequenceFormatError("file is neither packed nor a 0/1 text sequence") from exc
