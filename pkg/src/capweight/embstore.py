"""Binary storage of per-token embedding vectors.

File layout, all little-endian: magic ``WEMB``, u32 version (1), u32 dim,
u64 record count; then one record per sub-word vector: u16 byte length +
UTF-8 transcript id, u32 sentence index, u32 token index, u16 sub-word
index, and dim float32 components. Records are sorted by
(transcript_id, sentence_idx, token_idx, subword_idx) with sub-word
indices contiguous from 0 for each token. An optional sidecar JSON
manifest (``<path>.manifest.json``) records the source model and
creation parameters.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Token, TokenKey
from .errors import EmbeddingLookupError, StoreFormatError

MAGIC = b"WEMB"
VERSION = 1

RecordKey = tuple[str, int, int, int]


class EmbeddingStore:
    """Immutable, dim-typed table of per-sub-word vectors keyed by token."""

    def __init__(self, dim: int, records: Sequence[tuple[RecordKey, np.ndarray]]):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = int(dim)
        self.records: list[tuple[RecordKey, np.ndarray]] = []
        self._by_token: dict[TokenKey, list[np.ndarray]] = {}
        prev_key: RecordKey | None = None
        for key, vec in records:
            vec = np.asarray(vec, dtype=np.float32)
            if vec.shape != (self.dim,):
                raise ValueError(f"record {key!r}: expected {self.dim} components, got {vec.shape}")
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"record {key!r}: non-finite component")
            if prev_key is not None and not prev_key < key:
                raise ValueError(f"records not sorted: {prev_key!r} then {key!r}")
            token_key = key[:3]
            subwords = self._by_token.setdefault(token_key, [])
            if key[3] != len(subwords):
                raise ValueError(
                    f"record {key!r}: sub-word indices must be contiguous from 0"
                )
            subwords.append(vec)
            self.records.append((key, vec))
            prev_key = key

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingStore):
            return NotImplemented
        return (
            self.dim == other.dim
            and len(self.records) == len(other.records)
            and all(
                ka == kb and np.array_equal(va, vb)
                for (ka, va), (kb, vb) in zip(self.records, other.records)
            )
        )

    def __contains__(self, token_key: TokenKey) -> bool:
        return token_key in self._by_token

    def token_keys(self) -> list[TokenKey]:
        return list(self._by_token.keys())

    @classmethod
    def build(cls, dim: int, records: Iterable[tuple[RecordKey, np.ndarray]]) -> "EmbeddingStore":
        """Construct a store from records in any order."""
        return cls(dim, sorted(records, key=lambda item: item[0]))


def lookup_subwords(store: EmbeddingStore, token: Token) -> list[np.ndarray]:
    """All sub-word vectors for a token, in sub-word order."""
    vectors = store._by_token.get(token.key)
    if vectors is None:
        raise EmbeddingLookupError(f"no embedding for token {token.key!r}")
    return list(vectors)


def write_store(path: str | Path, store: EmbeddingStore, manifest: dict | None = None) -> None:
    """Write a store to disk; optionally write the sidecar manifest."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIQ", VERSION, store.dim, len(store.records)))
        for (tid, sidx, tidx, sub), vec in store.records:
            tid_bytes = tid.encode("utf-8")
            if len(tid_bytes) > 0xFFFF:
                raise ValueError(f"transcript id too long: {tid!r}")
            fh.write(struct.pack("<H", len(tid_bytes)))
            fh.write(tid_bytes)
            fh.write(struct.pack("<IIH", sidx, tidx, sub))
            fh.write(vec.astype("<f4", copy=False).tobytes())
    if manifest is not None:
        body = {"dim": store.dim, **manifest}
        manifest_path = Path(str(path) + ".manifest.json")
        manifest_path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")


def read_store(path: str | Path) -> EmbeddingStore:
    """Read a store from disk, validating structure and finiteness."""
    data = Path(path).read_bytes()
    offset = 0

    def take(n: int, what: str) -> bytes:
        nonlocal offset
        if offset + n > len(data):
            raise StoreFormatError(f"truncated while reading {what}", offset)
        chunk = data[offset : offset + n]
        offset += n
        return chunk

    if take(4, "magic") != MAGIC:
        raise StoreFormatError("bad magic, not an embedding store", 0)
    version, dim, count = struct.unpack("<IIQ", take(16, "header"))
    if version != VERSION:
        raise StoreFormatError(f"unsupported version {version}", 4)
    if dim == 0:
        raise StoreFormatError("dim must be positive", 8)

    records: list[tuple[RecordKey, np.ndarray]] = []
    for _ in range(count):
        record_offset = offset
        (tid_len,) = struct.unpack("<H", take(2, "transcript id length"))
        tid = take(tid_len, "transcript id").decode("utf-8")
        sidx, tidx, sub = struct.unpack("<IIH", take(10, "record key"))
        vec = np.frombuffer(take(4 * dim, "vector"), dtype="<f4")
        if not np.all(np.isfinite(vec)):
            raise StoreFormatError(
                f"non-finite component in record ({tid!r}, {sidx}, {tidx}, {sub})",
                record_offset,
            )
        records.append(((tid, sidx, tidx, sub), vec.copy()))
    if offset != len(data):
        raise StoreFormatError("trailing bytes after last record", offset)

    try:
        return EmbeddingStore(dim, records)
    except ValueError as exc:
        raise StoreFormatError(str(exc)) from exc


def read_manifest(path: str | Path) -> dict | None:
    """Load the sidecar manifest for a store, if present."""
    manifest_path = Path(str(path) + ".manifest.json")
    if not manifest_path.exists():
        return None
    return json.loads(manifest_path.read_text())
