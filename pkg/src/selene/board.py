"""Append-only hash-chained bulletin board.

Entry hash layout (normative):

    entry_hash = SHA-256( prev_hash || be8(index) || lp(kind) || lp(payload) )

where be8 is an 8-byte big-endian index, lp is the 4-byte length prefix
from encoding.canon, prev_hash of entry 0 is 32 zero bytes.

Persistence is one log file per election, one line per entry:

    index \\t kind \\t payload-hex \\t prev_hash-hex \\t entry_hash-hex \\n
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass
from pathlib import Path

from .encoding import lp

GENESIS_PREV = b"\x00" * 32

KINDS = ("Setup", "Ballot", "Result", "Proof")


class BoardIntegrityError(Exception):
    pass


class TrackerRowNotFound(KeyError):
    pass


@dataclass(frozen=True)
class BulletinEntry:
    index: int
    kind: str
    payload: bytes
    prev_hash: bytes
    entry_hash: bytes

    def to_line(self) -> str:
        return "\t".join(
            [
                str(self.index),
                self.kind,
                self.payload.hex(),
                self.prev_hash.hex(),
                self.entry_hash.hex(),
            ]
        )

    @classmethod
    def from_line(cls, line: str) -> "BulletinEntry":
        idx, kind, payload, prev_hash, entry_hash = line.rstrip("\n").split("\t")
        return cls(
            index=int(idx),
            kind=kind,
            payload=bytes.fromhex(payload),
            prev_hash=bytes.fromhex(prev_hash),
            entry_hash=bytes.fromhex(entry_hash),
        )


def entry_hash(prev_hash: bytes, index: int, kind: str, payload: bytes) -> bytes:
    data = prev_hash + struct.pack(">Q", index) + lp(kind.encode()) + lp(payload)
    return hashlib.sha256(data).digest()


def verify_chain(entries: list[BulletinEntry]) -> tuple[bool, int | None]:
    """Returns (ok, first bad index)."""
    prev = GENESIS_PREV
    for i, e in enumerate(entries):
        if e.index != i or e.prev_hash != prev or e.kind not in KINDS:
            return False, i
        if e.entry_hash != entry_hash(prev, i, e.kind, e.payload):
            return False, i
        prev = e.entry_hash
    return True, None


@dataclass(frozen=True)
class ResultRow:
    tracker_display: str
    candidate_id: str

    def to_payload(self) -> bytes:
        return f"{self.tracker_display}:{self.candidate_id}".encode()

    @classmethod
    def from_payload(cls, payload: bytes) -> "ResultRow":
        tracker, candidate = payload.decode().split(":", 1)
        return cls(tracker_display=tracker, candidate_id=candidate)


def find_tracker_row(entries: list[BulletinEntry], tracker_display: str) -> tuple[int, ResultRow]:
    matches = []
    for e in entries:
        if e.kind != "Result":
            continue
        row = ResultRow.from_payload(e.payload)
        if row.tracker_display == tracker_display:
            matches.append((e.index, row))
    if not matches:
        raise TrackerRowNotFound(tracker_display)
    if len(matches) > 1:
        raise BoardIntegrityError(f"duplicate result rows for tracker {tracker_display}")
    return matches[0]


class BulletinBoard:
    """Single-writer board; readers get immutable entry snapshots."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: list[BulletinEntry] = []
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with open(self.path) as f:
            self._entries = [BulletinEntry.from_line(line) for line in f if line.strip()]
        ok, bad = verify_chain(self._entries)
        if not ok:
            raise BoardIntegrityError(f"chain broken at entry {bad} in {self.path}")

    def __len__(self):
        return len(self._entries)

    def entries(self, start: int = 0, stop: int | None = None) -> list[BulletinEntry]:
        stop = len(self._entries) if stop is None else stop
        if start < 0 or stop > len(self._entries) or start > stop:
            raise IndexError(f"range [{start}, {stop}) out of bounds for board of {len(self._entries)}")
        return list(self._entries[start:stop])

    def append(self, kind: str, payload: bytes) -> BulletinEntry:
        if kind not in KINDS:
            raise ValueError(f"unknown entry kind {kind!r}")
        index = len(self._entries)
        prev = self._entries[-1].entry_hash if self._entries else GENESIS_PREV
        entry = BulletinEntry(
            index=index,
            kind=kind,
            payload=payload,
            prev_hash=prev,
            entry_hash=entry_hash(prev, index, kind, payload),
        )
        if self.path is not None:
            # write-then-publish: the line hits disk before readers see it
            with open(self.path, "a") as f:
                f.write(entry.to_line() + "\n")
                f.flush()
                os.fsync(f.fileno())
        self._entries.append(entry)
        return entry

    def verify(self) -> tuple[bool, int | None]:
        return verify_chain(self._entries)
