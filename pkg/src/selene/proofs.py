"""Chaum-Pedersen proofs of discrete-log equality.

Used in two places: a full-key decryption proof (log_g pk = log_alpha
(beta / m)) and a teller's partial-decryption proof (log_g pk_j =
log_alpha share).  Fiat-Shamir challenge is SHA-256 over the canonical
encodings of (g, pk, alpha, beta, claimed value, both commits), mod q.
"""

from __future__ import annotations

from dataclasses import dataclass

from .elgamal import Ciphertext
from .encoding import hash_to_scalar
from .groups import GroupCtx


@dataclass(frozen=True)
class DecryptionProof:
    commit_a: int
    commit_b: int
    response: int


def _challenge(ctx: GroupCtx, pk: int, ct: Ciphertext, claimed: int, a: int, b: int) -> int:
    return hash_to_scalar(ctx.q, ctx.g, pk, ct.alpha, ct.beta, claimed, a, b)


def _prove(ctx: GroupCtx, sk: int, ct: Ciphertext, claimed: int, rng=None) -> DecryptionProof:
    # Proves log_g pk = log_alpha y for the y implied by `claimed` at
    # verification time; the challenge binds the whole statement.
    w = ctx.rand_scalar(rng)
    a = ctx.gexp(w)
    b = ctx.exp(ct.alpha, w)
    pk = ctx.gexp(sk)
    c = _challenge(ctx, pk, ct, claimed, a, b)
    return DecryptionProof(commit_a=a, commit_b=b, response=(w + sk * c) % ctx.q)


def _verify(ctx: GroupCtx, pk: int, ct: Ciphertext, claimed: int, y: int, proof: DecryptionProof) -> bool:
    try:
        if not (ctx.is_member(proof.commit_a) and ctx.is_member(proof.commit_b)):
            return False
        if not ctx.is_scalar(proof.response):
            return False
        c = _challenge(ctx, pk, ct, claimed, proof.commit_a, proof.commit_b)
        lhs_g = ctx.gexp(proof.response)
        lhs_a = ctx.exp(ct.alpha, proof.response)
        return lhs_g == ctx.mul(proof.commit_a, ctx.exp(pk, c)) and lhs_a == ctx.mul(
            proof.commit_b, ctx.exp(y, c)
        )
    except (ValueError, TypeError, AttributeError):
        return False


def prove_decryption(ctx: GroupCtx, sk: int, ct: Ciphertext, claimed_m: int, rng=None) -> DecryptionProof:
    return _prove(ctx, sk, ct, claimed_m, rng)


def verify_decryption(ctx: GroupCtx, pk: int, ct: Ciphertext, claimed_m: int, proof: DecryptionProof) -> bool:
    try:
        y = ctx.div(ct.beta, claimed_m)
    except (ValueError, ZeroDivisionError):
        return False
    return _verify(ctx, pk, ct, claimed_m, y, proof)


def prove_partial_decryption(ctx: GroupCtx, key_share: int, ct: Ciphertext, rng=None) -> tuple[int, DecryptionProof]:
    """Teller's share alpha^s_j plus proof it matches its public key g^s_j."""
    share = ctx.exp(ct.alpha, key_share)
    return share, _prove(ctx, key_share, ct, share, rng)


def verify_partial_decryption(ctx: GroupCtx, teller_pk: int, ct: Ciphertext, share: int, proof: DecryptionProof) -> bool:
    return _verify(ctx, teller_pk, ct, share, share, proof)
