"""Bulletin board: hash chaining, persistence round-trip, tracker lookup."""

import hashlib
import struct

import pytest

from selene.board import (
    GENESIS_PREV,
    BoardIntegrityError,
    BulletinBoard,
    BulletinEntry,
    ResultRow,
    TrackerRowNotFound,
    find_tracker_row,
    verify_chain,
)


def oracle_hash(prev, index, kind, payload):
    def lp(b):
        return struct.pack(">I", len(b)) + b

    return hashlib.sha256(prev + struct.pack(">Q", index) + lp(kind.encode()) + lp(payload)).digest()


def result_entry_list(rows, board=None):
    board = board or BulletinBoard()
    for display, candidate in rows:
        board.append("Result", ResultRow(display, candidate).to_payload())
    return board.entries()


class TestAppend:
    def test_first_entry_genesis(self):
        board = BulletinBoard()
        e = board.append("Setup", b"hello")
        assert e.index == 0
        assert e.prev_hash == GENESIS_PREV

    def test_chain_links(self):
        board = BulletinBoard()
        e0 = board.append("Setup", b"a")
        e1 = board.append("Ballot", b"b")
        assert e1.prev_hash == e0.entry_hash
        assert e1.index == 1

    def test_pinned_hash_fixture(self):
        board = BulletinBoard()
        genesis = board.append("Setup", b"genesis")
        entry = board.append("Result", b"16J:A")
        assert genesis.entry_hash == oracle_hash(GENESIS_PREV, 0, "Setup", b"genesis")
        assert entry.entry_hash == oracle_hash(genesis.entry_hash, 1, "Result", b"16J:A")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            BulletinBoard().append("Gossip", b"x")


class TestVerifyChain:
    def test_fresh_board_ok(self):
        entries = result_entry_list([("16J", "A"), ("2Q", "B"), ("7", "C")])
        assert verify_chain(entries) == (True, None)

    def test_empty_board_ok(self):
        assert verify_chain([]) == (True, None)

    def test_payload_flip_detected_at_index(self):
        entries = result_entry_list([("16J", "A"), ("2Q", "B"), ("7", "C")])
        for k in range(len(entries)):
            mutated = list(entries)
            e = mutated[k]
            mutated[k] = BulletinEntry(e.index, e.kind, e.payload + b"x", e.prev_hash, e.entry_hash)
            assert verify_chain(mutated) == (False, k)

    def test_reordered_entries_detected(self):
        entries = result_entry_list([("1", "A"), ("2", "B")])
        assert verify_chain([entries[1], entries[0]])[0] is False


class TestFindTrackerRow:
    def test_found(self):
        entries = result_entry_list([("16J", "A"), ("2Q", "B")])
        index, row = find_tracker_row(entries, "2Q")
        assert index == 1
        assert row.candidate_id == "B"

    def test_absent(self):
        entries = result_entry_list([("16J", "A")])
        with pytest.raises(TrackerRowNotFound):
            find_tracker_row(entries, "ZZZ")

    def test_duplicate_is_integrity_error(self):
        entries = result_entry_list([("16J", "A"), ("16J", "B")])
        with pytest.raises(BoardIntegrityError):
            find_tracker_row(entries, "16J")


class TestPersistence:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "board.log"
        board = BulletinBoard(path)
        board.append("Setup", b"\x00binary\xffdata")
        board.append("Result", b"16J:A")
        reloaded = BulletinBoard(path)
        assert reloaded.entries() == board.entries()
        assert reloaded.verify() == (True, None)

    def test_append_only_reread(self, tmp_path):
        path = tmp_path / "board.log"
        board = BulletinBoard(path)
        first = [board.append("Ballot", bytes([i])) for i in range(5)]
        for i in range(5, 10):
            board.append("Ballot", bytes([i]))
        assert BulletinBoard(path).entries(0, 5) == first

    def test_tampered_file_detected_on_load(self, tmp_path):
        path = tmp_path / "board.log"
        board = BulletinBoard(path)
        board.append("Setup", b"a")
        board.append("Ballot", b"b")
        lines = path.read_text().splitlines()
        parts = lines[0].split("\t")
        parts[2] = "ff" + parts[2]
        lines[0] = "\t".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(BoardIntegrityError):
            BulletinBoard(path)

    def test_normative_line_format(self, tmp_path):
        path = tmp_path / "board.log"
        board = BulletinBoard(path)
        e = board.append("Result", b"16J:A")
        line = path.read_text().rstrip("\n")
        assert line == f"0\tResult\t{b'16J:A'.hex()}\t{'00' * 32}\t{e.entry_hash.hex()}"
