"""Tracking numbers: exponential encoding, trapdoor commitment opening,
the coercion-mitigation fake-alpha, and the lettered display form.

A tracker n is committed as beta = g^n * h^r with h the voter's trapdoor
public key.  The genuine opening is alpha = g^r; the trapdoor holder can
also forge alpha' = (beta / g^n')^(1/sk) opening the same beta to any n'.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .groups import GroupCtx

# Crockford base-32: no I, L, O, U.
_B32_ALPHABET = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"
_B32_REVERSE = {c: i for i, c in enumerate(_B32_ALPHABET)}


def tracker_display(value: int) -> str:
    if value < 0:
        raise ValueError("tracker value must be non-negative")
    if value == 0:
        return "0"
    digits = []
    while value:
        value, d = divmod(value, 32)
        digits.append(_B32_ALPHABET[d])
    return "".join(reversed(digits))


def tracker_parse(display: str) -> int:
    value = 0
    for c in display.upper():
        value = value * 32 + _B32_REVERSE[c]
    return value


@dataclass(frozen=True)
class Tracker:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("tracker value must be non-negative")

    @property
    def display(self) -> str:
        return tracker_display(self.value)


class TrackerDecodeError(ValueError):
    """g^n matched no tracker in the pool (corrupted alpha or wrong key)."""


def encode_tracker(ctx: GroupCtx, n: Tracker) -> int:
    if n.value >= ctx.q:
        raise ValueError(f"tracker {n.value} out of range for group order {ctx.q}")
    return ctx.gexp(n.value)


def decode_table(ctx: GroupCtx, pool: Iterable[Tracker]) -> dict[int, Tracker]:
    return {ctx.gexp(n.value): n for n in pool}


def decode_tracker(ctx: GroupCtx, e: int, pool: Iterable[Tracker]) -> Tracker:
    table = pool if isinstance(pool, dict) else decode_table(ctx, pool)
    try:
        return table[e]
    except KeyError:
        raise TrackerDecodeError(f"element {e} matches no pool tracker") from None


def open_commitment(ctx: GroupCtx, beta: int, alpha: int, trapdoor_sk: int, pool) -> Tracker:
    encoded = ctx.div(beta, ctx.exp(alpha, trapdoor_sk))
    return decode_tracker(ctx, encoded, pool)


def fake_alpha(ctx: GroupCtx, beta: int, fake_n: Tracker, trapdoor_sk: int) -> int:
    sk_inv = pow(trapdoor_sk, -1, ctx.q)
    return ctx.exp(ctx.div(beta, encode_tracker(ctx, fake_n)), sk_inv)
