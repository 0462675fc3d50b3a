"""The networked election service: credential auth, the vote/verify flag
machine, ballot intake, admin lifecycle control, alpha-share delivery and
board serving.

Phases move only along Setup -> Vote -> Published -> Verify -> Closed.
Published is the window where results sit on the board but alpha shares
are still withheld, so a voter can browse without learning her tracker.

All state mutations go through one lock and are recorded in an append-only
event log (events.log) next to the board log; restart replays the events
and reloads the board file byte-identically.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse

from . import engine as eng
from .board import BulletinBoard
from .encoding import from_hex, to_hex
from .errors import (
    BadAdminCredential,
    BadCredential,
    IllegalTransition,
    InvalidToken,
    RangeOutOfBounds,
    SeleneError,
    WrongPhase,
)

PHASES = ("Setup", "Vote", "Published", "Verify", "Closed")

TOKEN_TTL_SECONDS = 3600


@dataclass
class ServerConfig:
    addr: str = "127.0.0.1:8480"
    data_dir: str = "./selene-data"
    group_profile: str = "TEST"
    display_mode: str = "baseline"   # baseline | extended
    admin_credential: str = "admin"

    @classmethod
    def load(cls, path: str | None = None) -> "ServerConfig":
        cfg = cls()
        if path:
            with open(path) as f:
                data = json.load(f)
            for key in ("addr", "data_dir", "group_profile", "display_mode", "admin_credential"):
                if key in data:
                    setattr(cfg, key, data[key])
        env = {
            "SELENE_ADDR": "addr",
            "SELENE_DATA_DIR": "data_dir",
            "SELENE_GROUP": "group_profile",
            "SELENE_DISPLAY_MODE": "display_mode",
        }
        for var, attr in env.items():
            if os.environ.get(var):
                setattr(cfg, attr, os.environ[var])
        return cfg


@dataclass
class VoterRecord:
    voter_id: str
    credential_salt: bytes
    credential_hash: bytes
    trapdoor_pk: int
    signing_pk: int


def _hash_credential(salt: bytes, credential: str) -> bytes:
    return hashlib.sha256(salt + credential.encode()).digest()


@dataclass
class Session:
    token: str
    voter_id: str
    expiry: float


class ElectionServer:
    """One election per instance; state is replayed from disk on start."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.data_dir = Path(config.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.board = BulletinBoard(self.data_dir / "board.log")
        self.events_path = self.data_dir / "events.log"
        self.lock = threading.Lock()

        self.phase = "Setup"
        self.engine: eng.ElectionEngine | None = None
        self.voters: dict[str, VoterRecord] = {}
        self.sessions: dict[str, Session] = {}

        if self.events_path.exists():
            self._replay()

    # -- persistence --------------------------------------------------------

    def _log_event(self, event: dict):
        with open(self.events_path, "a") as f:
            f.write(json.dumps(event, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())

    def _replay(self):
        with open(self.events_path) as f:
            for line in f:
                if not line.strip():
                    continue
                event = json.loads(line)
                kind = event["type"]
                if kind == "setup":
                    self.engine = eng.ElectionEngine.from_dict(event["engine"])
                    self.voters = {
                        vid: VoterRecord(
                            voter_id=vid,
                            credential_salt=bytes.fromhex(v["salt"]),
                            credential_hash=bytes.fromhex(v["hash"]),
                            trapdoor_pk=from_hex(v["trapdoor_pk"]),
                            signing_pk=from_hex(v["signing_pk"]),
                        )
                        for vid, v in event["voters"].items()
                    }
                elif kind == "ballot":
                    record = eng.BallotRecord.from_dict(event["ballot"])
                    self.engine.ballots.append(record)
                    self.engine.voted.add(record.voter_id)
                elif kind == "transition":
                    self.phase = event["phase"]
                    if event.get("mixed"):
                        self.engine.mixed = eng.MixBatch.from_dict(event["mixed"])
                    if event.get("tally"):
                        self.engine.tally_result = eng.TallyResult.from_dict(event["tally"])

    # -- auth ----------------------------------------------------------------

    def authenticate(self, voter_id: str, credential: str) -> str:
        with self.lock:
            voter = self.voters.get(voter_id)
            if voter is None or not hmac.compare_digest(
                voter.credential_hash, _hash_credential(voter.credential_salt, credential)
            ):
                # uniform error: no voter enumeration
                raise BadCredential("authentication failed")
            token = secrets.token_hex(32)
            self.sessions[token] = Session(
                token=token, voter_id=voter_id, expiry=time.time() + TOKEN_TTL_SECONDS
            )
            return token

    def _session(self, token: str | None) -> Session:
        if not token:
            raise InvalidToken("missing token")
        session = self.sessions.get(token)
        if session is None or session.expiry < time.time():
            self.sessions.pop(token, None)
            raise InvalidToken("unknown or expired token")
        return session

    def _check_admin(self, credential: str):
        if not hmac.compare_digest(
            credential.encode(), self.config.admin_credential.encode()
        ):
            raise BadAdminCredential("admin authentication failed")

    # -- lifecycle -----------------------------------------------------------

    def admin_setup(self, admin_credential: str, config_payload: dict) -> dict:
        self._check_admin(admin_credential)
        with self.lock:
            if self.phase != "Setup" or self.engine is not None:
                raise IllegalTransition("election already set up")
            roster = []
            credentials = {}
            for v in config_payload["roster"]:
                roster.append(
                    eng.RosterEntry(
                        voter_id=v["voter_id"],
                        trapdoor_pk=from_hex(v["trapdoor_pk"]),
                        signing_pk=from_hex(v["signing_pk"]),
                    )
                )
                credentials[v["voter_id"]] = v["credential"]
            cfg = eng.ElectionConfig(
                election_id=config_payload["election_id"],
                candidates=tuple((c[0], c[1]) for c in config_payload["candidates"]),
                roster=tuple(roster),
                teller_count=config_payload.get("teller_count", 3),
                group_profile=config_payload.get("group_profile", self.config.group_profile),
                pool_bound=config_payload.get("pool_bound"),
            )
            self.engine = eng.ElectionEngine(cfg)
            for entry in roster:
                salt = secrets.token_bytes(16)
                self.voters[entry.voter_id] = VoterRecord(
                    voter_id=entry.voter_id,
                    credential_salt=salt,
                    credential_hash=_hash_credential(salt, credentials[entry.voter_id]),
                    trapdoor_pk=entry.trapdoor_pk,
                    signing_pk=entry.signing_pk,
                )

            header = {"row": "election", **self.engine.bundle.to_dict(),
                      "display_mode": self.config.display_mode}
            self.board.append("Setup", json.dumps(header, sort_keys=True).encode())
            for entry in roster:
                a = self.engine.assignments[entry.voter_id]
                voter_row = {
                    "row": "voter",
                    "voter_id": entry.voter_id,
                    "trapdoor_pk": to_hex(entry.trapdoor_pk),
                    "beta": to_hex(a.beta),
                    "enc_tracker": eng.ct_to_dict(a.enc_tracker),
                }
                self.board.append("Setup", json.dumps(voter_row, sort_keys=True).encode())

            self._log_event(
                {
                    "type": "setup",
                    "engine": self.engine.to_dict(),
                    "voters": {
                        vid: {
                            "salt": rec.credential_salt.hex(),
                            "hash": rec.credential_hash.hex(),
                            "trapdoor_pk": to_hex(rec.trapdoor_pk),
                            "signing_pk": to_hex(rec.signing_pk),
                        }
                        for vid, rec in self.voters.items()
                    },
                }
            )
            return {"election_pk": to_hex(self.engine.bundle.election_pk)}

    def admin_transition(self, admin_credential: str, target: str) -> str:
        self._check_admin(admin_credential)
        with self.lock:
            if target not in PHASES:
                raise IllegalTransition(f"unknown phase {target!r}")
            if PHASES.index(target) != PHASES.index(self.phase) + 1:
                raise IllegalTransition(f"cannot move {self.phase} -> {target}")
            if target == "Vote" and self.engine is None:
                raise IllegalTransition("election not set up")

            event = {"type": "transition", "phase": target}
            if target == "Published":
                result = self.engine.mix_and_tally()
                for i, row in enumerate(result.row_proofs):
                    payload = json.dumps(
                        {"mixed_row": i, "proofs": [p.to_dict() for p in row]},
                        sort_keys=True,
                    ).encode()
                    self.board.append("Proof", payload)
                for tracker, candidate in result.pairs:
                    self.board.append("Result", f"{tracker.display}:{candidate}".encode())
                event["mixed"] = self.engine.mixed.to_dict()
                event["tally"] = result.to_dict()
            self.phase = target
            self._log_event(event)
            return self.phase

    # -- voter-facing ----------------------------------------------------------

    def get_status(self, token: str | None) -> dict:
        session = self._session(token)
        if self.engine is None:
            raise WrongPhase("election not set up")
        return {
            "phase": self.phase,
            "has_voted": session.voter_id in self.engine.voted,
            "candidates": [list(c) for c in self.engine.cfg.candidates],
            "security_display": self.config.display_mode,
            "election_id": self.engine.cfg.election_id,
            "group_profile": self.engine.cfg.group_profile,
            "election_pk": to_hex(self.engine.bundle.election_pk),
        }

    def submit_ballot(self, token: str | None, payload: dict) -> int:
        session = self._session(token)
        with self.lock:
            if self.phase != "Vote":
                raise WrongPhase(f"ballots are not accepted in phase {self.phase}")
            enc_vote = eng.ct_from_dict(payload["enc_vote"])
            sig = eng.schnorr.Signature(
                commit=from_hex(payload["sig"]["commit"]),
                response=from_hex(payload["sig"]["response"]),
            )
            record = self.engine.accept_ballot(session.voter_id, enc_vote, sig)
            entry = self.board.append(
                "Ballot", json.dumps(record.to_dict(), sort_keys=True).encode()
            )
            self._log_event(
                {"type": "ballot", "ballot": record.to_dict(), "board_index": entry.index}
            )
            return entry.index

    def get_alpha(self, token: str | None) -> dict:
        session = self._session(token)
        if self.phase != "Verify":
            raise WrongPhase(f"alpha shares are not served in phase {self.phase}")
        shares, beta = self.engine.release_alpha(session.voter_id)
        return {
            "shares": [s.to_dict() for s in shares],
            "beta": to_hex(beta),
        }

    def get_board(self, start: int | None, stop: int | None) -> list[dict]:
        try:
            entries = self.board.entries(
                start if start is not None else 0,
                stop,
            )
        except IndexError as e:
            raise RangeOutOfBounds(str(e)) from None
        return [
            {
                "index": e.index,
                "kind": e.kind,
                "payload": e.payload.hex(),
                "prev_hash": e.prev_hash.hex(),
                "entry_hash": e.entry_hash.hex(),
            }
            for e in entries
        ]


# ---------------------------------------------------------------------------
# HTTP layer


def create_app(config: ServerConfig | None = None, server: ElectionServer | None = None) -> FastAPI:
    server = server or ElectionServer(config or ServerConfig.load())
    app = FastAPI(title="selene-election-server")
    app.state.server = server

    @app.exception_handler(SeleneError)
    async def selene_error_handler(request: Request, exc: SeleneError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.post("/api/auth")
    async def auth(payload: dict):
        token = server.authenticate(payload.get("voter_id", ""), payload.get("credential", ""))
        return {"token": token}

    @app.get("/api/status")
    async def status(x_selene_token: str | None = Header(default=None)):
        return server.get_status(x_selene_token)

    @app.post("/api/ballot")
    async def ballot(payload: dict, x_selene_token: str | None = Header(default=None)):
        index = server.submit_ballot(x_selene_token, payload)
        return {"board_index": index}

    @app.get("/api/board")
    async def board(request: Request):
        params = request.query_params
        start = int(params["from"]) if "from" in params else None
        stop = int(params["to"]) if "to" in params else None
        return {"entries": server.get_board(start, stop)}

    @app.get("/api/alpha")
    async def alpha(x_selene_token: str | None = Header(default=None)):
        return server.get_alpha(x_selene_token)

    @app.post("/api/admin/transition")
    async def transition(payload: dict):
        phase = server.admin_transition(
            payload.get("admin_credential", ""), payload.get("phase", "")
        )
        return {"phase": phase}

    @app.post("/api/admin/setup")
    async def setup(payload: dict):
        return server.admin_setup(
            payload.get("admin_credential", ""), payload.get("config", {})
        )

    return app
