"""Election ceremonies: setup, tracker assignment, ballot intake, mix,
tally and alpha release.  TEST-group oracles decrypt everything with the
known joint key to check multisets and counts."""

import random
from collections import Counter

import pytest

from selene import elgamal, schnorr, trackers
from selene.elgamal import Ciphertext
from selene.engine import (
    AlphaShare,
    ElectionConfig,
    ElectionEngine,
    MixBatch,
    RosterEntry,
    TellerMisbehaviour,
    TellerState,
    assemble_alpha,
    assign_trackers,
    ballot_message,
    candidate_encoding,
    mix,
    setup_election,
    tally,
)
from selene.errors import AlreadyVoted, BadSignature, ResultsNotPublished, UnknownVoter
from selene.groups import TEST
from selene.trackers import Tracker, open_commitment


def make_cfg(voters, teller_count=3, candidates=(("A", "a"), ("B", "b"), ("C", "c"))):
    return ElectionConfig(
        election_id="eng-test",
        candidates=tuple(candidates),
        roster=tuple(
            RosterEntry(voter_id=v[0], trapdoor_pk=TEST.gexp(v[1]), signing_pk=TEST.gexp(v[2]))
            for v in voters
        ),
        teller_count=teller_count,
        group_profile="TEST",
    )


VOTERS = [("v0", 3, 4), ("v1", 5, 6), ("v2", 7, 8), ("v3", 9, 10), ("v4", 2, 1)]
TRAPDOOR = {v[0]: v[1] for v in VOTERS}
SIGNING = {v[0]: v[2] for v in VOTERS}


class TestSetup:
    def test_single_voter_single_teller_law(self, rng):
        cfg = make_cfg(VOTERS[:1], teller_count=1)
        bundle, tellers, assignments = setup_election(cfg, rng)
        a = assignments["v0"]
        alpha = assemble_alpha(TEST, list(a.alpha_shares))
        opened = open_commitment(TEST, a.beta, alpha, TRAPDOOR["v0"], [Tracker(v) for v in bundle.pool])
        assert opened == a.tracker

    def test_cardinalities(self, rng):
        cfg = make_cfg(VOTERS)
        bundle, tellers, assignments = setup_election(cfg, rng)
        assert len(assignments) == 5
        assert len({a.tracker.value for a in assignments.values()}) == 5
        assert len(bundle.pool) == 5
        assert sum(len(a.alpha_shares) for a in assignments.values()) == 3 * 5

    def test_forced_fixture_matches_crypto_core(self):
        # n=2, r-shares {2,3}, voter sk=3 (h=8): beta = 4*8^5 = 18, alpha = g^5 = 9
        cfg = make_cfg(VOTERS[:1], teller_count=2)
        bundle, tellers, assignments = setup_election(
            cfg,
            random.Random(0),
            forced_fixture={"trackers": {"v0": 2}, "voter_randomness": {"v0": [2, 3]}},
        )
        a = assignments["v0"]
        assert a.beta == 18
        assert assemble_alpha(TEST, list(a.alpha_shares)) == 9
        assert [s.share for s in a.alpha_shares] == [4, 8]

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            make_cfg([("v0", 3, 4), ("v0", 5, 6)]).validate()
        with pytest.raises(ValueError):
            make_cfg(VOTERS[:1], candidates=(("A", "x"), ("A", "y"))).validate()

    def test_roster_larger_than_pool_rejected(self):
        roster = [(f"v{i}", 1 + i % 10, 1 + (i + 1) % 10) for i in range(12)]
        with pytest.raises(ValueError):
            make_cfg(roster).validate()


class TestAssignTrackers:
    def setup_method(self):
        self.tellers = [TellerState(teller_id=j, key_share=j + 2) for j in range(3)]
        self.sk = sum(t.key_share for t in self.tellers) % TEST.q
        self.pk = TEST.gexp(self.sk)
        self.pool = [Tracker(1), Tracker(4), Tracker(6)]
        self.voters = ["v0", "v1", "v2"]

    def test_identity_passes_preserve_pool_order(self):
        forced = [(list(range(3)), [0, 0, 0])] * 3
        out = assign_trackers(TEST, self.pk, self.sk, self.tellers, self.pool, self.voters,
                              forced=forced)
        assert [(v, t) for v, t, _ in out] == list(zip(self.voters, self.pool))

    def test_multiset_preserved_any_randomness(self, rng):
        out = assign_trackers(TEST, self.pk, self.sk, self.tellers, self.pool, self.voters, rng)
        assert sorted(t.value for _, t, _ in out) == sorted(t.value for t in self.pool)

    def test_seeded_assignment_reproduced_by_permutation_replay(self):
        out = assign_trackers(TEST, self.pk, self.sk, self.tellers, self.pool, self.voters,
                              random.Random(42))
        # replay the three recorded permutations on the plaintext pool
        order = list(range(3))
        for teller in self.tellers:
            order = [order[teller.assign_permutation[i]] for i in range(3)]
        replayed = [self.pool[order[i]] for i in range(3)]
        assert [t for _, t, _ in out] == replayed


def build_election(rng, teller_count=3):
    cfg = make_cfg(VOTERS, teller_count=teller_count)
    return ElectionEngine(cfg, rng)


def cast(engine, voter_id, candidate, rng):
    enc_table = candidate_encoding(TEST, [c[0] for c in engine.cfg.candidates])
    enc_vote = elgamal.encrypt(TEST, engine.bundle.election_pk, enc_table[candidate],
                               TEST.rand_scalar(rng))
    msg = ballot_message(engine.cfg.election_id, voter_id, enc_vote)
    sig = schnorr.sign(TEST, SIGNING[voter_id], msg, rng)
    return engine.accept_ballot(voter_id, enc_vote, sig)


class TestAcceptBallot:
    def test_honest_ballot_flips_has_voted(self, rng):
        engine = build_election(rng)
        cast(engine, "v0", "A", rng)
        assert "v0" in engine.voted
        assert len(engine.ballots) == 1

    def test_replay_rejected(self, rng):
        engine = build_election(rng)
        cast(engine, "v0", "A", rng)
        with pytest.raises(AlreadyVoted):
            cast(engine, "v0", "B", rng)
        assert len(engine.ballots) == 1

    def test_wrong_signing_key_rejected(self, rng):
        engine = build_election(rng)
        enc_table = candidate_encoding(TEST, ["A", "B", "C"])
        enc_vote = elgamal.encrypt(TEST, engine.bundle.election_pk, enc_table["A"], 5)
        msg = ballot_message(engine.cfg.election_id, "v0", enc_vote)
        sig = schnorr.sign(TEST, SIGNING["v1"], msg, rng)   # not v0's key
        with pytest.raises(BadSignature):
            engine.accept_ballot("v0", enc_vote, sig)

    def test_unknown_voter(self, rng):
        engine = build_election(rng)
        with pytest.raises(UnknownVoter):
            engine.accept_ballot("ghost", Ciphertext(1, 1), schnorr.Signature(1, 0))


class TestMix:
    def test_identity_mix(self, rng):
        engine = build_election(rng)
        for v, c in zip([v[0] for v in VOTERS], ["A", "A", "B", "C", "A"]):
            cast(engine, v, c, rng)
        batch = MixBatch(rows=[(b.enc_tracker, b.enc_vote) for b in engine.ballots])
        forced = [(list(range(5)), [(0, 0)] * 5)] * 3
        out = mix(TEST, engine.bundle.election_pk, batch, engine.tellers, forced=forced)
        assert out.rows == batch.rows

    def test_multiset_preserved_oracle(self, rng):
        engine = build_election(rng)
        for v, c in zip([v[0] for v in VOTERS], ["A", "A", "B", "C", "A"]):
            cast(engine, v, c, rng)
        sk = sum(t.key_share for t in engine.tellers) % TEST.q
        batch = MixBatch(rows=[(b.enc_tracker, b.enc_vote) for b in engine.ballots])
        out = mix(TEST, engine.bundle.election_pk, batch, engine.tellers, rng)

        def plaintexts(b):
            return Counter(
                (elgamal.decrypt(TEST, sk, t), elgamal.decrypt(TEST, sk, v)) for t, v in b.rows
            )

        assert plaintexts(out) == plaintexts(batch)

    def test_single_row_rerandomized(self, rng):
        engine = build_election(rng)
        cast(engine, "v0", "B", rng)
        batch = MixBatch(rows=[(engine.ballots[0].enc_tracker, engine.ballots[0].enc_vote)])
        out = mix(TEST, engine.bundle.election_pk, batch, engine.tellers, rng)
        sk = sum(t.key_share for t in engine.tellers) % TEST.q
        assert elgamal.decrypt(TEST, sk, out.rows[0][1]) == elgamal.decrypt(TEST, sk, batch.rows[0][1])
        assert out.rows[0] != batch.rows[0]


class TestTally:
    def test_counts(self, rng):
        engine = build_election(rng)
        votes = dict(zip([v[0] for v in VOTERS], ["A", "A", "B", "C", "A"]))
        for v, c in votes.items():
            cast(engine, v, c, rng)
        result = engine.mix_and_tally(rng)
        assert result.counts == {"A": 3, "B": 1, "C": 1}
        assert len(result.pairs) == 5
        assert [p[0].value for p in result.pairs] == sorted(p[0].value for p in result.pairs)
        assert result.invalid_rows == []

    def test_zero_ballots(self, rng):
        engine = build_election(rng)
        result = engine.mix_and_tally(rng)
        assert result.pairs == []
        assert result.counts == {"A": 0, "B": 0, "C": 0}

    def test_corrupt_teller_named(self, rng):
        engine = build_election(rng)
        cast(engine, "v0", "A", rng)
        batch = MixBatch(rows=[(b.enc_tracker, b.enc_vote) for b in engine.ballots])
        mixed = mix(TEST, engine.bundle.election_pk, batch, engine.tellers, rng)
        engine.tellers[1].key_share = (engine.tellers[1].key_share + 1) % TEST.q or 1
        with pytest.raises(TellerMisbehaviour) as exc:
            tally(TEST, engine.bundle, mixed, engine.tellers, rng)
        assert exc.value.teller_id == 1


class TestReleaseAlpha:
    def test_refused_before_tally(self, rng):
        engine = build_election(rng)
        with pytest.raises(ResultsNotPublished):
            engine.release_alpha("v0")

    def test_single_teller_share_is_alpha(self, rng):
        cfg = make_cfg(VOTERS[:1], teller_count=1)
        engine = ElectionEngine(cfg, rng)
        engine.mix_and_tally(rng)
        shares, beta = engine.release_alpha("v0")
        assert len(shares) == 1
        assert assemble_alpha(TEST, shares) == shares[0].share

    def test_fixture_share_product(self):
        shares = [AlphaShare(0, "v", 4), AlphaShare(1, "v", 8)]
        assert assemble_alpha(TEST, shares) == 9

    def test_unknown_voter(self, rng):
        engine = build_election(rng)
        engine.mix_and_tally(rng)
        with pytest.raises(UnknownVoter):
            engine.release_alpha("ghost")


class TestEndToEnd:
    def test_individual_verifiability(self, rng):
        engine = build_election(rng)
        votes = dict(zip([v[0] for v in VOTERS], ["A", "B", "B", "C", "A"]))
        for v, c in votes.items():
            cast(engine, v, c, rng)
        result = engine.mix_and_tally(rng)
        published = {t.value: c for t, c in result.pairs}
        pool = [Tracker(v) for v in engine.bundle.pool]
        seen_trackers = set()
        for voter_id, choice in votes.items():
            shares, beta = engine.release_alpha(voter_id)
            alpha = assemble_alpha(TEST, shares)
            tracker = open_commitment(TEST, beta, alpha, TRAPDOOR[voter_id], pool)
            assert published[tracker.value] == choice
            seen_trackers.add(tracker.value)
        assert len(seen_trackers) == 5

    def test_snapshot_roundtrip(self, rng):
        engine = build_election(rng)
        cast(engine, "v0", "A", rng)
        engine.mix_and_tally(rng)
        clone = ElectionEngine.from_dict(engine.to_dict())
        assert clone.to_dict() == engine.to_dict()
        assert clone.voted == {"v0"}
        assert clone.tally_result.counts == engine.tally_result.counts
