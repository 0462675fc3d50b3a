"""CLI verbs end to end against a live server, including exit codes."""

import json

import pytest
from click.testing import CliRunner

from selene.cli import main
from selene.groups import TEST
from selene.keyfile import read_keyfile, write_keyfile

from conftest import ADMIN, config_payload, make_voters


@pytest.fixture
def cli_election(live_server, tmp_path, rng):
    srv = live_server("cli")
    voters = make_voters(TEST, 3, rng)
    cfg_path = tmp_path / "election.json"
    cfg_path.write_text(json.dumps(config_payload(voters)))
    keyfiles = {}
    for v in voters:
        path = tmp_path / f"{v.voter_id}.key"
        write_keyfile(path, v.trapdoor_sk, v.signing_sk)
        keyfiles[v.voter_id] = str(path)
    return srv, voters, cfg_path, keyfiles


def run_cli(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def test_keyfile_roundtrip(tmp_path):
    path = tmp_path / "k.key"
    write_keyfile(path, 3, 7)
    assert read_keyfile(path) == (3, 7)
    assert path.read_text().splitlines()[0] == "SELENE-KEY-V1"


def test_full_cli_journey(cli_election, tmp_path):
    srv, voters, cfg_path, keyfiles = cli_election

    r = run_cli("setup", "--server", srv.url, "--config", str(cfg_path),
                "--admin-credential", ADMIN)
    assert r.exit_code == 0, r.output
    r = run_cli("transition", "--server", srv.url, "--phase", "Vote",
                "--admin-credential", ADMIN)
    assert r.exit_code == 0, r.output

    for v, choice in zip(voters, ["A", "B", "A"]):
        r = run_cli("vote", "--server", srv.url, "--voter-id", v.voter_id,
                    "--credential", v.credential, "--keyfile", keyfiles[v.voter_id],
                    "--candidate", choice)
        assert r.exit_code == 0, r.output
        assert "board index" in r.output

    # voting again must fail (server-side AlreadyVoted)
    r = run_cli("vote", "--server", srv.url, "--voter-id", voters[0].voter_id,
                "--credential", voters[0].credential,
                "--keyfile", keyfiles[voters[0].voter_id], "--candidate", "C")
    assert r.exit_code != 0

    for phase in ["Published", "Verify"]:
        r = run_cli("transition", "--server", srv.url, "--phase", phase,
                    "--admin-credential", ADMIN)
        assert r.exit_code == 0, r.output

    r = run_cli("tally-status", "--server", srv.url)
    assert r.exit_code == 0
    assert "A\t2" in r.output and "B\t1" in r.output

    evidence_path = tmp_path / "evidence.json"
    r = run_cli("verify", "--server", srv.url, "--voter-id", voters[1].voter_id,
                "--credential", voters[1].credential,
                "--keyfile", keyfiles[voters[1].voter_id],
                "--export", str(evidence_path))
    assert r.exit_code == 0, r.output
    assert "chain ok" in r.output

    r = run_cli("verify-evidence", str(evidence_path))
    assert r.exit_code == 0, r.output

    r = run_cli("board", "--server", srv.url, "--voter-id", voters[0].voter_id,
                "--credential", voters[0].credential)
    assert r.exit_code == 0
    assert "chain ok" in r.output

    r = run_cli("fake-tracker", "--server", srv.url, "--voter-id", voters[1].voter_id,
                "--credential", voters[1].credential,
                "--keyfile", keyfiles[voters[1].voter_id],
                "--coerced-candidate", "A")
    assert r.exit_code == 0
    assert r.output.startswith("tracker ")


def test_exit_codes(cli_election):
    srv, voters, cfg_path, keyfiles = cli_election
    run_cli("setup", "--server", srv.url, "--config", str(cfg_path),
            "--admin-credential", ADMIN)
    run_cli("transition", "--server", srv.url, "--phase", "Vote",
            "--admin-credential", ADMIN)

    # auth failure -> 3
    r = run_cli("vote", "--server", srv.url, "--voter-id", voters[0].voter_id,
                "--credential", "wrong", "--keyfile", keyfiles[voters[0].voter_id],
                "--candidate", "A")
    assert r.exit_code == 3

    # phase error -> 4 (verification during Vote phase)
    r = run_cli("verify", "--server", srv.url, "--voter-id", voters[0].voter_id,
                "--credential", voters[0].credential,
                "--keyfile", keyfiles[voters[0].voter_id])
    assert r.exit_code == 4
