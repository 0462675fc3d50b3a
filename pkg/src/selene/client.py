"""Voter-side protocol logic: the linear cast workflow, the one-button
verification, the pre-notification board visit, and the fake-tracker
coercion flow.

A session records its request transcript (method + path, no bodies), used
in tests to show that the fake-tracker flow is indistinguishable on the
wire from an honest board browse, and that verification is read-only.
"""

from __future__ import annotations

import json
import secrets
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from . import elgamal, engine, schnorr, trackers
from .board import (
    BoardIntegrityError,
    BulletinEntry,
    ResultRow,
    TrackerRowNotFound,
    find_tracker_row,
    verify_chain,
)
from .encoding import from_hex, to_hex
from .errors import (
    CODE_MAP,
    ChainBroken,
    NoSuchCandidateRow,
    SeleneError,
    TrackerNotOnBoard,
    WorkflowError,
    WrongPhase,
)
from .groups import profile

# Linear workflow; back-steps one at a time, forward only along this order.
POSITIONS = ("Login", "Instructions", "Select", "Confirm", "Cast", "Done", "QnA", "Verified")


@dataclass
class VerificationOutcome:
    tracker_display: str
    row_index: int
    row_candidate: str
    chain_ok: bool
    match: bool | None   # None when no local cast record was retained

    def to_dict(self) -> dict:
        return {
            "tracker_display": self.tracker_display,
            "row_index": self.row_index,
            "row_candidate": self.row_candidate,
            "chain_ok": self.chain_ok,
            "match": self.match,
        }


def _raise_for_api_error(resp: httpx.Response):
    if resp.status_code < 400:
        return
    try:
        body = resp.json()
        cls = CODE_MAP.get(body.get("code"), SeleneError)
        raise cls(body.get("message", resp.text))
    except (ValueError, KeyError):
        raise SeleneError(f"HTTP {resp.status_code}: {resp.text}") from None


def entries_from_api(rows: list[dict]) -> list[BulletinEntry]:
    return [
        BulletinEntry(
            index=r["index"],
            kind=r["kind"],
            payload=bytes.fromhex(r["payload"]),
            prev_hash=bytes.fromhex(r["prev_hash"]),
            entry_hash=bytes.fromhex(r["entry_hash"]),
        )
        for r in rows
    ]


def verify_against_entries(
    ctx,
    entries: list[BulletinEntry],
    alpha_shares: list[engine.AlphaShare],
    beta: int,
    trapdoor_sk: int,
    remembered_choice: str | None,
) -> VerificationOutcome:
    """Pure detection logic behind verify_vote; also the tamper-test seam."""
    ok, bad = verify_chain(entries)
    if not ok:
        raise ChainBroken(bad)
    alpha = engine.assemble_alpha(ctx, alpha_shares)
    pool = _pool_from_entries(entries)
    try:
        tracker = trackers.open_commitment(ctx, beta, alpha, trapdoor_sk, pool)
    except trackers.TrackerDecodeError as e:
        raise TrackerNotOnBoard(str(e)) from None
    try:
        row_index, row = find_tracker_row(entries, tracker.display)
    except TrackerRowNotFound:
        raise TrackerNotOnBoard(tracker.display) from None
    return VerificationOutcome(
        tracker_display=tracker.display,
        row_index=row_index,
        row_candidate=row.candidate_id,
        chain_ok=True,
        match=(row.candidate_id == remembered_choice) if remembered_choice is not None else None,
    )


def _pool_from_entries(entries: list[BulletinEntry]) -> list[trackers.Tracker]:
    for e in entries:
        if e.kind == "Setup":
            row = json.loads(e.payload)
            if row.get("row") == "election":
                return [trackers.Tracker(v) for v in row["pool"]]
    raise BoardIntegrityError("board carries no election setup row")


class ClientSession:
    def __init__(
        self,
        server: str,
        voter_id: str,
        credential: str,
        trapdoor_sk: int | None = None,
        signing_sk: int | None = None,
        retain_choice: bool = False,
        http: httpx.Client | None = None,
        rng=None,
    ):
        self.server = server.rstrip("/")
        self.voter_id = voter_id
        self.credential = credential
        self.trapdoor_sk = trapdoor_sk
        self.signing_sk = signing_sk
        self.retain_choice = retain_choice
        self.rng = rng if rng is not None else secrets.SystemRandom()
        self.http = http or httpx.Client(base_url=self.server, timeout=30.0)
        self.token: str | None = None
        self.status: dict | None = None
        self.position = "Login"
        self.selected_candidate: str | None = None
        self.cast_choice: str | None = None
        self.cast_board_index: int | None = None
        self.transcript: list[str] = []

    # -- transport ----------------------------------------------------------

    def _request(self, method: str, path: str, **kwargs) -> httpx.Response:
        self.transcript.append(f"{method} {path}")
        headers = dict(kwargs.pop("headers", {}))
        if self.token:
            headers["X-Selene-Token"] = self.token
        resp = self.http.request(method, path, headers=headers, **kwargs)
        _raise_for_api_error(resp)
        return resp

    # -- workflow navigation --------------------------------------------------

    def _goto(self, position: str):
        self.position = position

    def back(self):
        i = POSITIONS.index(self.position)
        if i == 0:
            raise WorkflowError("already at the first screen")
        self.position = POSITIONS[i - 1]

    def login(self) -> dict:
        resp = self._request("POST", "/api/auth", json={"voter_id": self.voter_id, "credential": self.credential})
        self.token = resp.json()["token"]
        self.refresh_status()
        self._goto("Instructions")
        return self.status

    def refresh_status(self) -> dict:
        self.status = self._request("GET", "/api/status").json()
        return self.status

    def select_candidate(self, candidate_id: str):
        if self.position != "Instructions":
            raise WorkflowError(f"cannot select a candidate from {self.position}")
        if candidate_id not in [c[0] for c in self.status["candidates"]]:
            raise WorkflowError(f"unknown candidate {candidate_id!r}")
        self.selected_candidate = candidate_id
        self._goto("Select")

    def confirm(self):
        if self.position != "Select":
            raise WorkflowError(f"cannot confirm from {self.position}")
        self._goto("Confirm")

    def acknowledge_qna(self):
        if self.position not in ("Instructions", "Done"):
            raise WorkflowError(f"cannot enter Q&A from {self.position}")
        self._goto("QnA")

    # -- casting ---------------------------------------------------------------

    def cast_vote(self, candidate_id: str | None = None) -> int:
        if candidate_id is not None and self.position == "Instructions":
            # scripted path walks the mandatory screens itself
            self.select_candidate(candidate_id)
            self.confirm()
        if self.position != "Confirm":
            raise WorkflowError("casting requires passing Select and Confirm first")
        if self.signing_sk is None or self.trapdoor_sk is None:
            raise WorkflowError("voting requires both secret keys")
        self.refresh_status()
        if self.status["phase"] != "Vote":
            raise WrongPhase(f"cannot cast in phase {self.status['phase']}")

        ctx = profile(self.status["group_profile"])
        cand_ids = [c[0] for c in self.status["candidates"]]
        m = engine.candidate_encoding(ctx, cand_ids)[self.selected_candidate]
        r = ctx.rand_scalar(self.rng)
        enc_vote = elgamal.encrypt(ctx, from_hex(self.status["election_pk"]), m, r)
        msg = engine.ballot_message(self.status["election_id"], self.voter_id, enc_vote)
        sig = schnorr.sign(ctx, self.signing_sk, msg, self.rng)

        resp = self._request(
            "POST",
            "/api/ballot",
            json={
                "enc_vote": engine.ct_to_dict(enc_vote),
                "sig": {"commit": to_hex(sig.commit), "response": to_hex(sig.response)},
            },
        )
        self.cast_board_index = resp.json()["board_index"]
        if self.retain_choice:
            self.cast_choice = self.selected_candidate
        self._goto("Cast")
        self._goto("Done")
        return self.cast_board_index

    # -- board / verification ----------------------------------------------------

    def _fetch_board(self) -> list[BulletinEntry]:
        resp = self._request("GET", "/api/board")
        return entries_from_api(resp.json()["entries"])

    def browse_board(self) -> tuple[list[BulletinEntry], bool]:
        self.refresh_status()
        if self.status["phase"] not in ("Published", "Verify"):
            raise WrongPhase(f"board browsing opens at publication, not {self.status['phase']}")
        entries = self._fetch_board()
        ok, _ = verify_chain(entries)
        return entries, ok

    def verify_vote(self) -> VerificationOutcome:
        if self.position != "QnA":
            raise WorkflowError("the Q&A screens are mandatory before verification")
        if self.trapdoor_sk is None:
            raise WorkflowError("verification requires the trapdoor key")
        self.refresh_status()
        if self.status["phase"] != "Verify":
            raise WrongPhase(f"verification opens in the Verify phase, not {self.status['phase']}")
        alpha_resp = self._request("GET", "/api/alpha").json()
        shares = [engine.AlphaShare.from_dict(s) for s in alpha_resp["shares"]]
        beta = from_hex(alpha_resp["beta"])
        entries = self._fetch_board()
        ctx = profile(self.status["group_profile"])
        outcome = verify_against_entries(
            ctx, entries, shares, beta, self.trapdoor_sk, self.cast_choice
        )
        self._goto("Verified")
        self._last_verification = (outcome, entries, shares, beta)
        return outcome

    def fake_tracker(self, coerced_candidate_id: str) -> tuple[str, int]:
        """Pick a published tracker pointing at the coercer's candidate and
        forge the alpha that opens this voter's beta to it.  Issues exactly
        the same requests as browse_board."""
        if self.trapdoor_sk is None:
            raise WorkflowError("faking requires the trapdoor key")
        self.refresh_status()
        if self.status["phase"] not in ("Published", "Verify"):
            raise WrongPhase(f"no published trackers in phase {self.status['phase']}")
        entries = self._fetch_board()

        beta = None
        candidates_rows: list[ResultRow] = []
        for e in entries:
            if e.kind == "Setup":
                row = json.loads(e.payload)
                if row.get("row") == "voter" and row["voter_id"] == self.voter_id:
                    beta = from_hex(row["beta"])
            elif e.kind == "Result":
                row = ResultRow.from_payload(e.payload)
                if row.candidate_id == coerced_candidate_id:
                    candidates_rows.append(row)
        if beta is None:
            raise BoardIntegrityError(f"no setup row for voter {self.voter_id}")
        if not candidates_rows:
            raise NoSuchCandidateRow(coerced_candidate_id)

        chosen = candidates_rows[self.rng.randrange(len(candidates_rows))]
        fake_n = trackers.Tracker(trackers.tracker_parse(chosen.tracker_display))
        ctx = profile(self.status["group_profile"])
        alpha = trackers.fake_alpha(ctx, beta, fake_n, self.trapdoor_sk)
        return chosen.tracker_display, alpha

    # -- evidence -------------------------------------------------------------

    def export_evidence(self, path, outcome: VerificationOutcome | None = None) -> dict:
        if outcome is None:
            if not hasattr(self, "_last_verification"):
                raise WorkflowError("no verification attempted yet")
            outcome = self._last_verification[0]
        _, entries, shares, beta = self._last_verification
        evidence = {
            "version": 1,
            "election_id": self.status["election_id"],
            "group_profile": self.status["group_profile"],
            "voter_id": self.voter_id,
            "trapdoor_sk": to_hex(self.trapdoor_sk),
            "beta": to_hex(beta),
            "alpha_shares": [s.to_dict() for s in shares],
            "outcome": outcome.to_dict(),
            "board": [e.to_line() for e in entries],
        }
        Path(path).write_text(json.dumps(evidence, sort_keys=True, indent=1) + "\n")
        return evidence


def verify_evidence(path_or_dict) -> VerificationOutcome:
    """Offline auditor check: re-verify an exported evidence file with no
    network access.  Raises ChainBroken / TrackerNotOnBoard on tampering."""
    if isinstance(path_or_dict, dict):
        evidence = path_or_dict
    else:
        evidence = json.loads(Path(path_or_dict).read_text())
    ctx = profile(evidence["group_profile"])
    entries = [BulletinEntry.from_line(line) for line in evidence["board"]]
    shares = [engine.AlphaShare.from_dict(s) for s in evidence["alpha_shares"]]
    return verify_against_entries(
        ctx,
        entries,
        shares,
        from_hex(evidence["beta"]),
        from_hex(evidence["trapdoor_sk"]),
        None,
    )
