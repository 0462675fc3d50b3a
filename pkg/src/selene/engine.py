"""Election lifecycle ceremonies: setup, tracker assignment, ballot
intake, the re-encryption mix, joint tally with decryption proofs, and
post-tally alpha-share release.

Tellers hold additive shares s_j of the election key (full-quorum
decryption, no threshold) and per-voter randomness r_ij whose sum blinds
the tracker commitment beta_i = g^{n_i} * h_i^{sum_j r_ij}.  The tracker
assignment passes the encrypted pool through every teller's secret
permutation, so no single teller can link voters to trackers; the quorum
jointly learns the link when it decrypts the assignment rows.
"""

from __future__ import annotations

import secrets
from collections import Counter
from dataclasses import dataclass, field

from . import elgamal, proofs, schnorr, trackers
from .elgamal import Ciphertext
from .encoding import canon, from_hex, to_hex
from .errors import (
    AlreadyVoted,
    BadSignature,
    ResultsNotPublished,
    UnknownVoter,
)
from .groups import GroupCtx, profile
from .proofs import DecryptionProof
from .trackers import Tracker, TrackerDecodeError

TEST_POOL_BOUND = 11        # = q of the TEST group; trackers must stay below q
PROD_POOL_BOUND = 1 << 20   # display fits in 4 base-32 chars


def default_pool_bound(ctx: GroupCtx) -> int:
    return min(PROD_POOL_BOUND, ctx.q)


@dataclass(frozen=True)
class RosterEntry:
    voter_id: str
    trapdoor_pk: int
    signing_pk: int


@dataclass(frozen=True)
class ElectionConfig:
    election_id: str
    candidates: tuple[tuple[str, str], ...]   # (id, label), ordered
    roster: tuple[RosterEntry, ...]
    teller_count: int = 3
    group_profile: str = "TEST"
    pool_bound: int | None = None

    def validate(self):
        cids = [c[0] for c in self.candidates]
        if len(set(cids)) != len(cids):
            raise ValueError("duplicate candidate ids")
        vids = [v.voter_id for v in self.roster]
        if len(set(vids)) != len(vids):
            raise ValueError("duplicate voter ids")
        if self.teller_count < 1:
            raise ValueError("teller_count must be >= 1")
        ctx = self.ctx
        bound = self.pool_bound or default_pool_bound(ctx)
        if bound > ctx.q:
            raise ValueError("pool bound exceeds group order")
        if len(self.roster) > bound:
            raise ValueError(
                f"roster of {len(self.roster)} exceeds tracker pool bound {bound}"
            )

    @property
    def ctx(self) -> GroupCtx:
        return profile(self.group_profile)

    def candidate_ids(self) -> list[str]:
        return [c[0] for c in self.candidates]

    def to_dict(self) -> dict:
        return {
            "election_id": self.election_id,
            "candidates": [list(c) for c in self.candidates],
            "roster": [
                {
                    "voter_id": v.voter_id,
                    "trapdoor_pk": to_hex(v.trapdoor_pk),
                    "signing_pk": to_hex(v.signing_pk),
                }
                for v in self.roster
            ],
            "teller_count": self.teller_count,
            "group_profile": self.group_profile,
            "pool_bound": self.pool_bound,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ElectionConfig":
        return cls(
            election_id=d["election_id"],
            candidates=tuple((c[0], c[1]) for c in d["candidates"]),
            roster=tuple(
                RosterEntry(
                    voter_id=v["voter_id"],
                    trapdoor_pk=from_hex(v["trapdoor_pk"]),
                    signing_pk=from_hex(v["signing_pk"]),
                )
                for v in d["roster"]
            ),
            teller_count=d.get("teller_count", 3),
            group_profile=d.get("group_profile", "TEST"),
            pool_bound=d.get("pool_bound"),
        )


@dataclass
class TellerState:
    teller_id: int
    key_share: int                                  # additive share s_j
    voter_randomness: dict[str, int] = field(default_factory=dict)  # r_ij
    assign_permutation: list[int] | None = None
    assign_randomness: list[int] | None = None
    mix_permutation: list[int] | None = None
    mix_randomness: list[tuple[int, int]] | None = None

    def to_dict(self) -> dict:
        return {
            "teller_id": self.teller_id,
            "key_share": to_hex(self.key_share),
            "voter_randomness": {k: to_hex(v) for k, v in self.voter_randomness.items()},
            "assign_permutation": self.assign_permutation,
            "assign_randomness": [to_hex(r) for r in self.assign_randomness or []],
            "mix_permutation": self.mix_permutation,
            "mix_randomness": [[to_hex(a), to_hex(b)] for a, b in self.mix_randomness or []],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TellerState":
        return cls(
            teller_id=d["teller_id"],
            key_share=from_hex(d["key_share"]),
            voter_randomness={k: from_hex(v) for k, v in d["voter_randomness"].items()},
            assign_permutation=d.get("assign_permutation"),
            assign_randomness=[from_hex(r) for r in d.get("assign_randomness") or []] or None,
            mix_permutation=d.get("mix_permutation"),
            mix_randomness=[(from_hex(a), from_hex(b)) for a, b in d.get("mix_randomness") or []] or None,
        )


@dataclass(frozen=True)
class AlphaShare:
    teller_id: int
    voter_id: str
    share: int   # g^{r_ij}

    def to_dict(self) -> dict:
        return {"teller_id": self.teller_id, "voter_id": self.voter_id, "share": to_hex(self.share)}

    @classmethod
    def from_dict(cls, d: dict) -> "AlphaShare":
        return cls(teller_id=d["teller_id"], voter_id=d["voter_id"], share=from_hex(d["share"]))


@dataclass(frozen=True)
class TrackerAssignment:
    voter_id: str
    tracker: Tracker
    beta: int
    enc_tracker: Ciphertext   # under the joint election pk, post-mix
    alpha_shares: tuple[AlphaShare, ...]

    def to_dict(self) -> dict:
        return {
            "voter_id": self.voter_id,
            "tracker": self.tracker.value,
            "beta": to_hex(self.beta),
            "enc_tracker": ct_to_dict(self.enc_tracker),
            "alpha_shares": [s.to_dict() for s in self.alpha_shares],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrackerAssignment":
        return cls(
            voter_id=d["voter_id"],
            tracker=Tracker(d["tracker"]),
            beta=from_hex(d["beta"]),
            enc_tracker=ct_from_dict(d["enc_tracker"]),
            alpha_shares=tuple(AlphaShare.from_dict(s) for s in d["alpha_shares"]),
        )


def ct_to_dict(ct: Ciphertext) -> dict:
    return {"alpha": to_hex(ct.alpha), "beta": to_hex(ct.beta)}


def ct_from_dict(d: dict) -> Ciphertext:
    return Ciphertext(alpha=from_hex(d["alpha"]), beta=from_hex(d["beta"]))


@dataclass(frozen=True)
class SetupBundle:
    """Public election parameters; everything here goes on the board."""

    election_id: str
    election_pk: int
    teller_pks: tuple[int, ...]
    pool: tuple[int, ...]             # tracker values, public
    candidates: tuple[tuple[str, str], ...]

    def to_dict(self) -> dict:
        return {
            "election_id": self.election_id,
            "election_pk": to_hex(self.election_pk),
            "teller_pks": [to_hex(t) for t in self.teller_pks],
            "pool": list(self.pool),
            "candidates": [list(c) for c in self.candidates],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SetupBundle":
        return cls(
            election_id=d["election_id"],
            election_pk=from_hex(d["election_pk"]),
            teller_pks=tuple(from_hex(t) for t in d["teller_pks"]),
            pool=tuple(d["pool"]),
            candidates=tuple((c[0], c[1]) for c in d["candidates"]),
        )


@dataclass(frozen=True)
class BallotRecord:
    voter_id: str
    enc_vote: Ciphertext
    sig: schnorr.Signature
    enc_tracker: Ciphertext

    def to_dict(self) -> dict:
        return {
            "voter_id": self.voter_id,
            "enc_vote": ct_to_dict(self.enc_vote),
            "sig": {"commit": to_hex(self.sig.commit), "response": to_hex(self.sig.response)},
            "enc_tracker": ct_to_dict(self.enc_tracker),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BallotRecord":
        return cls(
            voter_id=d["voter_id"],
            enc_vote=ct_from_dict(d["enc_vote"]),
            sig=schnorr.Signature(
                commit=from_hex(d["sig"]["commit"]), response=from_hex(d["sig"]["response"])
            ),
            enc_tracker=ct_from_dict(d["enc_tracker"]),
        )


@dataclass
class MixBatch:
    rows: list[tuple[Ciphertext, Ciphertext]]   # (enc_tracker, enc_vote)

    def to_dict(self) -> dict:
        return {"rows": [[ct_to_dict(a), ct_to_dict(b)] for a, b in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "MixBatch":
        return cls(rows=[(ct_from_dict(a), ct_from_dict(b)) for a, b in d["rows"]])


@dataclass(frozen=True)
class TallyRowProof:
    teller_id: int
    tracker_share: int
    tracker_proof: DecryptionProof
    vote_share: int
    vote_proof: DecryptionProof

    def to_dict(self) -> dict:
        return {
            "teller_id": self.teller_id,
            "tracker_share": to_hex(self.tracker_share),
            "tracker_proof": proof_to_dict(self.tracker_proof),
            "vote_share": to_hex(self.vote_share),
            "vote_proof": proof_to_dict(self.vote_proof),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TallyRowProof":
        return cls(
            teller_id=d["teller_id"],
            tracker_share=from_hex(d["tracker_share"]),
            tracker_proof=proof_from_dict(d["tracker_proof"]),
            vote_share=from_hex(d["vote_share"]),
            vote_proof=proof_from_dict(d["vote_proof"]),
        )


def proof_to_dict(p: DecryptionProof) -> dict:
    return {"a": to_hex(p.commit_a), "b": to_hex(p.commit_b), "r": to_hex(p.response)}


def proof_from_dict(d: dict) -> DecryptionProof:
    return DecryptionProof(commit_a=from_hex(d["a"]), commit_b=from_hex(d["b"]), response=from_hex(d["r"]))


@dataclass
class TallyResult:
    pairs: list[tuple[Tracker, str]]          # sorted by tracker value
    counts: dict[str, int]
    row_proofs: list[list[TallyRowProof]]     # per mixed row, per teller
    invalid_rows: list[int]

    def to_dict(self) -> dict:
        return {
            "pairs": [[t.value, c] for t, c in self.pairs],
            "counts": self.counts,
            "row_proofs": [[p.to_dict() for p in row] for row in self.row_proofs],
            "invalid_rows": self.invalid_rows,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TallyResult":
        return cls(
            pairs=[(Tracker(t), c) for t, c in d["pairs"]],
            counts=dict(d["counts"]),
            row_proofs=[[TallyRowProof.from_dict(p) for p in row] for row in d["row_proofs"]],
            invalid_rows=list(d["invalid_rows"]),
        )


class TellerMisbehaviour(Exception):
    def __init__(self, teller_id: int, detail: str):
        super().__init__(f"teller {teller_id}: {detail}")
        self.teller_id = teller_id


# ---------------------------------------------------------------------------
# ceremonies


def ballot_message(election_id: str, voter_id: str, enc_vote: Ciphertext) -> bytes:
    return canon(election_id, voter_id, enc_vote.alpha, enc_vote.beta)


def candidate_encoding(ctx: GroupCtx, candidate_ids: list[str]) -> dict[str, int]:
    return {cid: ctx.gexp(i) for i, cid in enumerate(candidate_ids)}


def _rng(rng):
    return rng if rng is not None else secrets.SystemRandom()


def assign_trackers(
    ctx: GroupCtx,
    election_pk: int,
    election_sk: int,
    tellers: list[TellerState],
    pool: list[Tracker],
    voter_ids: list[str],
    rng=None,
    forced: list[tuple[list[int], list[int]]] | None = None,
) -> list[tuple[str, Tracker, Ciphertext]]:
    """Mix the encrypted pool through every teller, then jointly decrypt
    row i as voter i's tracker.  Permutations and randomness are recorded
    on each TellerState for replay in audits."""
    rng = _rng(rng)
    n = len(voter_ids)
    rows = [elgamal.encrypt(ctx, election_pk, trackers.encode_tracker(ctx, t), 0) for t in pool]
    for j, teller in enumerate(tellers):
        if forced is not None:
            perm, rands = forced[j]
        else:
            perm = list(range(n))
            rng.shuffle(perm)
            rands = [ctx.rand_scalar(rng) for _ in range(n)]
        teller.assign_permutation = perm
        teller.assign_randomness = rands
        rows = [elgamal.reencrypt(ctx, election_pk, rows[perm[i]], rands[i]) for i in range(n)]
    table = trackers.decode_table(ctx, pool)
    out = []
    for voter_id, ct in zip(voter_ids, rows):
        m = elgamal.decrypt(ctx, election_sk, ct)
        out.append((voter_id, trackers.decode_tracker(ctx, m, table), ct))
    return out


def setup_election(cfg: ElectionConfig, rng=None, forced_fixture: dict | None = None):
    """Returns (SetupBundle, tellers, assignments).

    forced_fixture pins trackers and randomness for deterministic tests:
    {"trackers": {voter_id: value}, "voter_randomness": {voter_id: [r_j...]}}.
    """
    cfg.validate()
    ctx = cfg.ctx
    rng = _rng(rng)
    forced_fixture = forced_fixture or {}

    tellers = [
        TellerState(teller_id=j, key_share=ctx.rand_scalar(rng))
        for j in range(cfg.teller_count)
    ]
    election_sk = sum(t.key_share for t in tellers) % ctx.q
    election_pk = ctx.gexp(election_sk)

    bound = cfg.pool_bound or default_pool_bound(ctx)
    if "trackers" in forced_fixture:
        pool = [Tracker(forced_fixture["trackers"][v.voter_id]) for v in cfg.roster]
        assigned = [
            (v.voter_id, pool[i], elgamal.encrypt(ctx, election_pk, trackers.encode_tracker(ctx, pool[i]), 0))
            for i, v in enumerate(cfg.roster)
        ]
    else:
        pool = [Tracker(v) for v in rng.sample(range(bound), len(cfg.roster))]
        assigned = assign_trackers(
            ctx, election_pk, election_sk, tellers, pool,
            [v.voter_id for v in cfg.roster], rng,
        )

    by_voter = {v.voter_id: v for v in cfg.roster}
    assignments: dict[str, TrackerAssignment] = {}
    forced_r = forced_fixture.get("voter_randomness", {})
    for voter_id, tracker, enc_tracker in assigned:
        voter = by_voter[voter_id]
        shares = []
        r_total = 0
        for j, teller in enumerate(tellers):
            r = forced_r[voter_id][j] if voter_id in forced_r else ctx.rand_scalar(rng)
            teller.voter_randomness[voter_id] = r
            r_total = (r_total + r) % ctx.q
            shares.append(AlphaShare(teller_id=j, voter_id=voter_id, share=ctx.gexp(r)))
        beta = ctx.mul(trackers.encode_tracker(ctx, tracker), ctx.exp(voter.trapdoor_pk, r_total))
        assignments[voter_id] = TrackerAssignment(
            voter_id=voter_id,
            tracker=tracker,
            beta=beta,
            enc_tracker=enc_tracker,
            alpha_shares=tuple(shares),
        )

    bundle = SetupBundle(
        election_id=cfg.election_id,
        election_pk=election_pk,
        teller_pks=tuple(ctx.gexp(t.key_share) for t in tellers),
        pool=tuple(t.value for t in pool),
        candidates=cfg.candidates,
    )
    return bundle, tellers, assignments


def mix(
    ctx: GroupCtx,
    election_pk: int,
    batch: MixBatch,
    tellers: list[TellerState],
    rng=None,
    forced: list[tuple[list[int], list[tuple[int, int]]]] | None = None,
) -> MixBatch:
    """Each teller permutes the (tracker, vote) pairs with one secret
    permutation and re-encrypts both components of every row."""
    rng = _rng(rng)
    rows = list(batch.rows)
    n = len(rows)
    for j, teller in enumerate(tellers):
        if forced is not None:
            perm, rands = forced[j]
        else:
            perm = list(range(n))
            rng.shuffle(perm)
            rands = [(ctx.rand_scalar(rng), ctx.rand_scalar(rng)) for _ in range(n)]
        teller.mix_permutation = perm
        teller.mix_randomness = rands
        rows = [
            (
                elgamal.reencrypt(ctx, election_pk, rows[perm[i]][0], rands[i][0]),
                elgamal.reencrypt(ctx, election_pk, rows[perm[i]][1], rands[i][1]),
            )
            for i in range(n)
        ]
    return MixBatch(rows=rows)


def _joint_decrypt(
    ctx: GroupCtx,
    tellers: list[TellerState],
    teller_pks: tuple[int, ...],
    ct: Ciphertext,
    rng=None,
) -> tuple[int, list[tuple[int, int, DecryptionProof]]]:
    """Full-quorum decryption with per-teller Chaum-Pedersen proofs.
    Returns (plaintext, [(teller_id, share, proof)])."""
    contributions = []
    combined = 1
    for teller in tellers:
        share, proof = proofs.prove_partial_decryption(ctx, teller.key_share, ct, rng)
        if not proofs.verify_partial_decryption(ctx, teller_pks[teller.teller_id], ct, share, proof):
            raise TellerMisbehaviour(teller.teller_id, "partial decryption proof rejected")
        contributions.append((teller.teller_id, share, proof))
        combined = ctx.mul(combined, share)
    return ctx.div(ct.beta, combined), contributions


def tally(
    ctx: GroupCtx,
    bundle: SetupBundle,
    mixed: MixBatch,
    tellers: list[TellerState],
    rng=None,
) -> TallyResult:
    pool_table = trackers.decode_table(ctx, [Tracker(v) for v in bundle.pool])
    cand_ids = [c[0] for c in bundle.candidates]
    cand_table = {v: k for k, v in candidate_encoding(ctx, cand_ids).items()}

    pairs: list[tuple[Tracker, str]] = []
    row_proofs: list[list[TallyRowProof]] = []
    invalid: list[int] = []
    for i, (enc_tracker, enc_vote) in enumerate(mixed.rows):
        m_tracker, tr_contrib = _joint_decrypt(ctx, tellers, bundle.teller_pks, enc_tracker, rng)
        m_vote, vt_contrib = _joint_decrypt(ctx, tellers, bundle.teller_pks, enc_vote, rng)
        row_proofs.append(
            [
                TallyRowProof(
                    teller_id=tid,
                    tracker_share=ts,
                    tracker_proof=tp,
                    vote_share=vs,
                    vote_proof=vp,
                )
                for (tid, ts, tp), (_, vs, vp) in zip(tr_contrib, vt_contrib)
            ]
        )
        try:
            tracker = trackers.decode_tracker(ctx, m_tracker, pool_table)
            candidate = cand_table[m_vote]
        except (TrackerDecodeError, KeyError):
            invalid.append(i)
            continue
        pairs.append((tracker, candidate))

    pairs.sort(key=lambda p: p[0].value)
    counts = Counter(c for _, c in pairs)
    return TallyResult(
        pairs=pairs,
        counts={cid: counts.get(cid, 0) for cid in cand_ids},
        row_proofs=row_proofs,
        invalid_rows=invalid,
    )


def assemble_alpha(ctx: GroupCtx, shares: list[AlphaShare]) -> int:
    alpha = 1
    for s in shares:
        alpha = ctx.mul(alpha, s.share)
    return alpha


# ---------------------------------------------------------------------------
# stateful orchestration (flag machine lives in the server; this object
# owns the cryptographic state and the vote/release guards)


class ElectionEngine:
    def __init__(self, cfg: ElectionConfig, rng=None, forced_fixture: dict | None = None):
        cfg.validate()
        self.cfg = cfg
        self.ctx = cfg.ctx
        self.bundle, self.tellers, self.assignments = setup_election(cfg, rng, forced_fixture)
        self.roster = {v.voter_id: v for v in cfg.roster}
        self.ballots: list[BallotRecord] = []
        self.voted: set[str] = set()
        self.mixed: MixBatch | None = None
        self.tally_result: TallyResult | None = None

    # -- ballots -----------------------------------------------------------

    def accept_ballot(self, voter_id: str, enc_vote: Ciphertext, sig: schnorr.Signature) -> BallotRecord:
        voter = self.roster.get(voter_id)
        if voter is None:
            raise UnknownVoter(voter_id)
        if voter_id in self.voted:
            raise AlreadyVoted(voter_id)
        msg = ballot_message(self.cfg.election_id, voter_id, enc_vote)
        if not schnorr.verify_sig(self.ctx, voter.signing_pk, msg, sig):
            raise BadSignature(f"ballot signature rejected for {voter_id}")
        record = BallotRecord(
            voter_id=voter_id,
            enc_vote=enc_vote,
            sig=sig,
            enc_tracker=self.assignments[voter_id].enc_tracker,
        )
        self.ballots.append(record)
        self.voted.add(voter_id)
        return record

    # -- close-out ---------------------------------------------------------

    def mix_and_tally(self, rng=None) -> TallyResult:
        batch = MixBatch(rows=[(b.enc_tracker, b.enc_vote) for b in self.ballots])
        self.mixed = mix(self.ctx, self.bundle.election_pk, batch, self.tellers, rng)
        self.tally_result = tally(self.ctx, self.bundle, self.mixed, self.tellers, rng)
        return self.tally_result

    def release_alpha(self, voter_id: str) -> tuple[list[AlphaShare], int]:
        if self.tally_result is None:
            raise ResultsNotPublished("alpha shares are withheld until the tally is published")
        assignment = self.assignments.get(voter_id)
        if assignment is None:
            raise UnknownVoter(voter_id)
        return list(assignment.alpha_shares), assignment.beta

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "config": self.cfg.to_dict(),
            "bundle": self.bundle.to_dict(),
            "tellers": [t.to_dict() for t in self.tellers],
            "assignments": {k: v.to_dict() for k, v in self.assignments.items()},
            "ballots": [b.to_dict() for b in self.ballots],
            "mixed": self.mixed.to_dict() if self.mixed else None,
            "tally": self.tally_result.to_dict() if self.tally_result else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ElectionEngine":
        eng = cls.__new__(cls)
        eng.cfg = ElectionConfig.from_dict(d["config"])
        eng.ctx = eng.cfg.ctx
        eng.bundle = SetupBundle.from_dict(d["bundle"])
        eng.tellers = [TellerState.from_dict(t) for t in d["tellers"]]
        eng.assignments = {k: TrackerAssignment.from_dict(v) for k, v in d["assignments"].items()}
        eng.roster = {v.voter_id: v for v in eng.cfg.roster}
        eng.ballots = [BallotRecord.from_dict(b) for b in d["ballots"]]
        eng.voted = {b.voter_id for b in eng.ballots}
        eng.mixed = MixBatch.from_dict(d["mixed"]) if d.get("mixed") else None
        eng.tally_result = TallyResult.from_dict(d["tally"]) if d.get("tally") else None
        return eng
