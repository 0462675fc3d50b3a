"""Schnorr signatures over the election group.

Challenge is SHA-256 over the canonical length-prefixed encodings of
(g, pk, commit, message), reduced mod q.
"""

from __future__ import annotations

from dataclasses import dataclass

from .encoding import hash_to_scalar
from .groups import GroupCtx


@dataclass(frozen=True)
class Signature:
    commit: int
    response: int


def sign(ctx: GroupCtx, sk: int, message: bytes, rng=None, nonce: int | None = None) -> Signature:
    k = nonce if nonce is not None else ctx.rand_scalar(rng)
    commit = ctx.gexp(k)
    pk = ctx.gexp(sk)
    c = hash_to_scalar(ctx.q, ctx.g, pk, commit, message)
    return Signature(commit=commit, response=(k + sk * c) % ctx.q)


def verify_sig(ctx: GroupCtx, pk: int, message: bytes, sig: Signature) -> bool:
    try:
        if not ctx.is_member(sig.commit) or not ctx.is_scalar(sig.response):
            return False
        c = hash_to_scalar(ctx.q, ctx.g, pk, sig.commit, message)
        return ctx.gexp(sig.response) == ctx.mul(sig.commit, ctx.exp(pk, c))
    except (ValueError, TypeError, AttributeError):
        return False
