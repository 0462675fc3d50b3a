"""Schnorr signatures, including the fixed-nonce TEST vector.

The vector's challenge is recomputed here with a standalone hash oracle
over the canonical length-prefixed encoding, independent of the signer.
"""

import hashlib
import struct

import pytest

from selene.groups import TEST
from selene.schnorr import Signature, sign, verify_sig


def oracle_challenge(ctx, pk, commit, message):
    def lp(b):
        return struct.pack(">I", len(b)) + b

    def enc(n):
        return b"" if n == 0 else n.to_bytes((n.bit_length() + 7) // 8, "big")

    digest = hashlib.sha256(lp(enc(ctx.g)) + lp(enc(pk)) + lp(enc(commit)) + lp(message)).digest()
    return int.from_bytes(digest, "big") % ctx.q


def test_roundtrip(rng):
    for _ in range(20):
        sk = TEST.rand_scalar(rng)
        msg = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        assert verify_sig(TEST, TEST.gexp(sk), msg, sign(TEST, sk, msg, rng))


def test_flipped_message_byte_rejected(rng):
    sk, msg = 3, b"ballot for candidate A"
    sig = sign(TEST, sk, msg, rng)
    pk = TEST.gexp(sk)
    assert verify_sig(TEST, pk, msg, sig)
    tampered = bytes([msg[0] ^ 1]) + msg[1:]
    assert not verify_sig(TEST, pk, tampered, sig)


def test_fixed_nonce_vector():
    # sk=3, nonce k=5, message "ballot": commit = g^5 = 9,
    # response = (5 + 3c) mod 11 with c from the hash oracle
    sig = sign(TEST, 3, b"ballot", nonce=5)
    assert sig.commit == 9
    c = oracle_challenge(TEST, pk=8, commit=9, message=b"ballot")
    assert sig.response == (5 + 3 * c) % 11
    assert verify_sig(TEST, 8, b"ballot", sig)


def test_malformed_sig_returns_false_never_raises():
    pk = 8
    for sig in [
        Signature(commit=0, response=3),
        Signature(commit=5, response=3),      # commit outside subgroup
        Signature(commit=9, response=11),     # response out of scalar range
        Signature(commit=9, response=-1),
        Signature(commit=24, response=2),
    ]:
        assert verify_sig(TEST, pk, b"x", sig) is False


def test_wrong_key_rejected(rng):
    sig = sign(TEST, 3, b"msg", rng)
    assert not verify_sig(TEST, TEST.gexp(4), b"msg", sig)
