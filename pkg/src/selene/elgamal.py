"""ElGamal over a prime-order subgroup: keys, encryption, re-encryption,
homomorphic combination.

A ciphertext (alpha, beta) = (g^r, pk^r * m) doubles as the tracker
commitment: beta goes public at election start, alpha is withheld and
split among the tellers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import GroupCtx, GroupError


@dataclass(frozen=True)
class KeyPair:
    ctx: GroupCtx
    sk: int
    pk: int

    def __post_init__(self):
        if not 1 <= self.sk < self.ctx.q:
            raise GroupError(f"secret key must be in [1, q-1], got {self.sk}")
        if self.pk != self.ctx.gexp(self.sk):
            raise GroupError("public key does not match secret key")

    @classmethod
    def from_sk(cls, ctx: GroupCtx, sk: int) -> "KeyPair":
        return cls(ctx=ctx, sk=sk, pk=ctx.gexp(sk))


@dataclass(frozen=True)
class Ciphertext:
    alpha: int
    beta: int


def keygen(ctx: GroupCtx, rng=None) -> KeyPair:
    return KeyPair.from_sk(ctx, ctx.rand_scalar(rng))


def encrypt(ctx: GroupCtx, pk: int, m: int, r: int) -> Ciphertext:
    ctx.require_member(m, "plaintext")
    if not ctx.is_scalar(r):
        raise GroupError(f"randomness must be in [0, q-1], got {r}")
    return Ciphertext(alpha=ctx.gexp(r), beta=ctx.mul(ctx.exp(pk, r), m))


def decrypt(ctx: GroupCtx, sk: int, ct: Ciphertext) -> int:
    return ctx.div(ct.beta, ctx.exp(ct.alpha, sk))


def reencrypt(ctx: GroupCtx, pk: int, ct: Ciphertext, r2: int) -> Ciphertext:
    return Ciphertext(
        alpha=ctx.mul(ct.alpha, ctx.gexp(r2)),
        beta=ctx.mul(ct.beta, ctx.exp(pk, r2)),
    )


def combine(ctx: GroupCtx, ct1: Ciphertext, ct2: Ciphertext) -> Ciphertext:
    return Ciphertext(
        alpha=ctx.mul(ct1.alpha, ct2.alpha),
        beta=ctx.mul(ct1.beta, ct2.beta),
    )
