"""Stable error codes shared by the engine, server API and client.

The HTTP layer serializes these as {"code": ..., "message": ...}; the
client raises the matching class when it sees the code on the wire.
"""

from __future__ import annotations


class SeleneError(Exception):
    code = "Error"
    http_status = 400

    @property
    def message(self) -> str:
        return str(self) or self.code


class BadCredential(SeleneError):
    code = "BadCredential"
    http_status = 401


class BadAdminCredential(SeleneError):
    code = "BadAdminCredential"
    http_status = 401


class InvalidToken(SeleneError):
    code = "InvalidToken"
    http_status = 401


class UnknownVoter(SeleneError):
    code = "UnknownVoter"
    http_status = 404


class AlreadyVoted(SeleneError):
    code = "AlreadyVoted"
    http_status = 409


class BadSignature(SeleneError):
    code = "BadSignature"
    http_status = 400


class WrongPhase(SeleneError):
    code = "WrongPhase"
    http_status = 409


class IllegalTransition(SeleneError):
    code = "IllegalTransition"
    http_status = 409


class ResultsNotPublished(SeleneError):
    code = "ResultsNotPublished"
    http_status = 409


class RangeOutOfBounds(SeleneError):
    code = "RangeOutOfBounds"
    http_status = 416


class NotFound(SeleneError):
    code = "NotFound"
    http_status = 404


class NoSuchCandidateRow(SeleneError):
    code = "NoSuchCandidateRow"
    http_status = 404


class ChainBroken(SeleneError):
    code = "ChainBroken"
    http_status = 502

    def __init__(self, first_bad_index: int | None = None):
        super().__init__(f"board hash chain broken at entry {first_bad_index}")
        self.first_bad_index = first_bad_index


class TrackerNotOnBoard(SeleneError):
    code = "TrackerNotOnBoard"
    http_status = 404


class WorkflowError(SeleneError):
    code = "WorkflowError"


CODE_MAP = {
    cls.code: cls
    for cls in [
        BadCredential,
        BadAdminCredential,
        InvalidToken,
        UnknownVoter,
        AlreadyVoted,
        BadSignature,
        WrongPhase,
        IllegalTransition,
        ResultsNotPublished,
        RangeOutOfBounds,
        NotFound,
        NoSuchCandidateRow,
        TrackerNotOnBoard,
        WorkflowError,
    ]
}
