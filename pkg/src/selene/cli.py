"""Command-line interface.

Exit codes: 0 success, 2 verification mismatch or chain failure,
3 authentication failure, 4 phase error.
"""

from __future__ import annotations

import json
import sys

import click

from .board import ResultRow
from .client import ClientSession, verify_evidence
from .errors import (
    BadAdminCredential,
    BadCredential,
    ChainBroken,
    InvalidToken,
    SeleneError,
    TrackerNotOnBoard,
    WrongPhase,
)
from .keyfile import read_keyfile

EXIT_VERIFY_FAIL = 2
EXIT_AUTH_FAIL = 3
EXIT_PHASE_ERROR = 4


def _exit_for(e: SeleneError) -> int:
    if isinstance(e, (BadCredential, BadAdminCredential, InvalidToken)):
        return EXIT_AUTH_FAIL
    if isinstance(e, WrongPhase):
        return EXIT_PHASE_ERROR
    if isinstance(e, (ChainBroken, TrackerNotOnBoard)):
        return EXIT_VERIFY_FAIL
    return 1


def _run(fn):
    try:
        return fn()
    except SeleneError as e:
        click.echo(f"error [{e.code}]: {e.message}", err=True)
        sys.exit(_exit_for(e))


@click.group()
def main():
    """Tracker-based verifiable voting client and admin tool."""


def _session(server, voter_id, credential, keyfile, retain=False) -> ClientSession:
    trapdoor_sk = signing_sk = None
    if keyfile:
        trapdoor_sk, signing_sk = read_keyfile(keyfile)
    return ClientSession(
        server=server,
        voter_id=voter_id,
        credential=credential,
        trapdoor_sk=trapdoor_sk,
        signing_sk=signing_sk,
        retain_choice=retain,
    )


@main.command()
@click.option("--server", required=True)
@click.option("--voter-id", required=True)
@click.option("--credential", required=True)
@click.option("--keyfile", required=True, type=click.Path(exists=True))
@click.option("--candidate", required=True)
def vote(server, voter_id, credential, keyfile, candidate):
    """Cast a ballot through the linear workflow."""

    def go():
        session = _session(server, voter_id, credential, keyfile)
        session.login()
        index = session.cast_vote(candidate)
        click.echo(f"ballot recorded at board index {index}")

    _run(go)


@main.command()
@click.option("--server", required=True)
@click.option("--voter-id", required=True)
@click.option("--credential", required=True)
@click.option("--keyfile", required=True, type=click.Path(exists=True))
@click.option("--export", "export_path", type=click.Path(), default=None)
def verify(server, voter_id, credential, keyfile, export_path):
    """Fetch alpha shares, open the tracker commitment and locate the row."""

    def go():
        session = _session(server, voter_id, credential, keyfile)
        session.login()
        session.acknowledge_qna()
        outcome = session.verify_vote()
        click.echo(
            f"tracker {outcome.tracker_display}: row {outcome.row_index} "
            f"shows {outcome.row_candidate} (chain ok)"
        )
        if export_path:
            session.export_evidence(export_path, outcome)
            click.echo(f"evidence written to {export_path}")
        if outcome.match is False:
            click.echo("MISMATCH: the board row does not show your remembered choice", err=True)
            sys.exit(EXIT_VERIFY_FAIL)

    _run(go)


@main.command()
@click.option("--server", required=True)
@click.option("--voter-id", required=True)
@click.option("--credential", required=True)
def board(server, voter_id, credential):
    """Browse the bulletin board (Published or Verify phase)."""

    def go():
        session = _session(server, voter_id, credential, None)
        session.login()
        entries, ok = session.browse_board()
        for e in entries:
            if e.kind == "Result":
                row = ResultRow.from_payload(e.payload)
                click.echo(f"{e.index}\tResult\t{row.tracker_display}\t{row.candidate_id}")
            else:
                click.echo(f"{e.index}\t{e.kind}")
        click.echo(f"chain {'ok' if ok else 'BROKEN'}")
        if not ok:
            sys.exit(EXIT_VERIFY_FAIL)

    _run(go)


@main.command("fake-tracker")
@click.option("--server", required=True)
@click.option("--voter-id", required=True)
@click.option("--credential", required=True)
@click.option("--keyfile", required=True, type=click.Path(exists=True))
@click.option("--coerced-candidate", required=True)
def fake_tracker(server, voter_id, credential, keyfile, coerced_candidate):
    """Produce a tracker (and forged alpha) pointing at the coercer's candidate."""

    def go():
        session = _session(server, voter_id, credential, keyfile)
        session.login()
        display, alpha = session.fake_tracker(coerced_candidate)
        click.echo(f"tracker {display}")

    _run(go)


@main.command()
@click.option("--server", required=True)
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--admin-credential", required=True)
def setup(server, config_path, admin_credential):
    """Install an election config on the server (admin)."""

    def go():
        import httpx

        with open(config_path) as f:
            cfg = json.load(f)
        resp = httpx.post(
            f"{server}/api/admin/setup",
            json={"admin_credential": admin_credential, "config": cfg},
            timeout=120.0,
        )
        from .client import _raise_for_api_error

        _raise_for_api_error(resp)
        click.echo(f"election pk {resp.json()['election_pk']}")

    _run(go)


@main.command()
@click.option("--server", required=True)
@click.option("--phase", required=True)
@click.option("--admin-credential", required=True)
def transition(server, phase, admin_credential):
    """Advance the election phase (admin)."""

    def go():
        import httpx

        resp = httpx.post(
            f"{server}/api/admin/transition",
            json={"admin_credential": admin_credential, "phase": phase},
            timeout=300.0,
        )
        from .client import _raise_for_api_error

        _raise_for_api_error(resp)
        click.echo(f"phase {resp.json()['phase']}")

    _run(go)


@main.command("tally-status")
@click.option("--server", required=True)
def tally_status(server):
    """Report published results from the public board."""

    def go():
        import httpx

        from .client import _raise_for_api_error, entries_from_api

        resp = httpx.get(f"{server}/api/board", timeout=30.0)
        _raise_for_api_error(resp)
        entries = entries_from_api(resp.json()["entries"])
        counts: dict[str, int] = {}
        for e in entries:
            if e.kind == "Result":
                row = ResultRow.from_payload(e.payload)
                counts[row.candidate_id] = counts.get(row.candidate_id, 0) + 1
        if not counts:
            click.echo("no results published yet")
        else:
            for cid in sorted(counts):
                click.echo(f"{cid}\t{counts[cid]}")

    _run(go)


@main.command("verify-evidence")
@click.argument("evidence_file", type=click.Path(exists=True))
def verify_evidence_cmd(evidence_file):
    """Offline auditor check of an exported evidence file."""

    def go():
        outcome = verify_evidence(evidence_file)
        click.echo(
            f"tracker {outcome.tracker_display}: row {outcome.row_index} "
            f"shows {outcome.row_candidate} (chain ok)"
        )

    _run(go)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(config_path):
    """Run the election server."""
    import uvicorn

    from .server import ServerConfig, create_app

    cfg = ServerConfig.load(config_path)
    host, _, port = cfg.addr.rpartition(":")
    uvicorn.run(create_app(cfg), host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
