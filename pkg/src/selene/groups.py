"""Prime-order subgroup arithmetic over Z_p*.

Two built-in profiles:

* TEST  -- p=23, q=11, g=2.  Small enough that every law can be checked
  exhaustively and trackers brute-forced in tests.
* PROD  -- the 2048-bit MODP safe-prime group from RFC 3526 (group 14),
  with g=2 generating the order-q subgroup of quadratic residues
  (p = 7 mod 8, so 2 is a QR).
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupCtx:
    name: str
    p: int
    q: int
    g: int

    def __post_init__(self):
        if self.g in (0, 1) or pow(self.g, self.q, self.p) != 1:
            raise GroupError("g does not generate an order-q subgroup")

    # -- element arithmetic ------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return (a * pow(b, -1, self.p)) % self.p

    def exp(self, base: int, e: int) -> int:
        return pow(base, e % self.q, self.p)

    def gexp(self, e: int) -> int:
        return pow(self.g, e % self.q, self.p)

    def is_member(self, x: int) -> bool:
        return 0 < x < self.p and pow(x, self.q, self.p) == 1

    def require_member(self, x: int, what: str = "element") -> int:
        if not self.is_member(x):
            raise GroupError(f"{what} {x} is not in the order-{self.q} subgroup")
        return x

    # -- scalars -----------------------------------------------------------

    def rand_scalar(self, rng=None, lower: int = 1) -> int:
        rng = rng if rng is not None else secrets.SystemRandom()
        return rng.randrange(lower, self.q)

    def is_scalar(self, x: int) -> bool:
        return 0 <= x < self.q


TEST = GroupCtx(name="TEST", p=23, q=11, g=2)

# RFC 3526, 2048-bit MODP group (id 14).  Safe prime: p = 2q + 1.
_RFC3526_P = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF",
    16,
)

PROD = GroupCtx(name="PROD", p=_RFC3526_P, q=(_RFC3526_P - 1) // 2, g=2)

PROFILES = {"TEST": TEST, "PROD": PROD}


def profile(name: str) -> GroupCtx:
    try:
        return PROFILES[name.upper()]
    except KeyError:
        raise GroupError(f"unknown group profile {name!r}") from None
