"""Tracker-based end-to-end verifiable voting: ElGamal trapdoor tracker
commitments, a teller ceremony engine, an append-only bulletin board, an
election server and a voter client with coercion mitigation."""

from .groups import PROD, TEST, GroupCtx, profile

__all__ = ["GroupCtx", "TEST", "PROD", "profile"]
__version__ = "0.1.0"
