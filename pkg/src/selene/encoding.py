"""Canonical byte encodings shared by hashing, signatures and the wire.

Group elements and scalars encode as minimal big-endian byte strings with
a 4-byte big-endian length prefix.  This layout is normative: signatures,
Fiat-Shamir challenges and bulletin-board hashes are all computed over it,
so both sides of the wire must agree bit-exactly.
"""

from __future__ import annotations

import hashlib
import struct


def int_bytes(n: int) -> bytes:
    if n < 0:
        raise ValueError("negative integer has no canonical encoding")
    if n == 0:
        return b""
    return n.to_bytes((n.bit_length() + 7) // 8, "big")


def lp(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def canon(*parts) -> bytes:
    """Concatenate length-prefixed encodings of ints and byte strings."""
    out = bytearray()
    for part in parts:
        if isinstance(part, int):
            part = int_bytes(part)
        elif isinstance(part, str):
            part = part.encode("utf-8")
        out += lp(part)
    return bytes(out)


def hash_bytes(*parts) -> bytes:
    return hashlib.sha256(canon(*parts)).digest()


def hash_to_scalar(q: int, *parts) -> int:
    return int.from_bytes(hash_bytes(*parts), "big") % q


def to_hex(n: int) -> str:
    return int_bytes(n).hex() or "00"


def from_hex(s: str) -> int:
    return int.from_bytes(bytes.fromhex(s), "big")
