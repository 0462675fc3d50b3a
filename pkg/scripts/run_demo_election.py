#!/usr/bin/env python3
"""End-to-end demo election on a local server.

Starts the HTTP server in a background thread, provisions a small
election, walks every voter through the cast workflow, publishes the
tally, verifies every tracker, and demonstrates a coercion-resistant
fake tracker. Everything runs over real HTTP on localhost.

    python3 scripts/run_demo_election.py [--voters 5] [--port 8731]
"""

import argparse
import random
import socket
import tempfile
import threading
import time

import httpx
import uvicorn

from selene.client import ClientSession
from selene.encoding import to_hex
from selene.groups import TEST
from selene.server import ServerConfig, create_app

ADMIN = "demo-admin-credential"


def start_server(port, data_dir):
    config = ServerConfig(addr=f"127.0.0.1:{port}", data_dir=data_dir,
                          admin_credential=ADMIN)
    server = uvicorn.Server(uvicorn.Config(
        create_app(config), host="127.0.0.1", port=port, log_level="warning"))
    threading.Thread(target=server.run, daemon=True).start()
    url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 10
    while time.time() < deadline:
        try:
            httpx.get(url + "/api/board", timeout=1.0)
            return server, url
        except httpx.TransportError:
            time.sleep(0.05)
    raise RuntimeError("server did not start")


def admin(url, endpoint, **payload):
    r = httpx.post(f"{url}/api/admin/{endpoint}",
                   json={"admin_credential": ADMIN, **payload}, timeout=120.0)
    r.raise_for_status()
    return r.json()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--voters", type=int, default=5)
    ap.add_argument("--port", type=int, default=0)
    ap.add_argument("--seed", type=int, default=20260823)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    port = args.port
    if not port:
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]

    candidates = [["A", "Alice"], ["B", "Bob"], ["C", "Carol"]]
    voters = []
    roster = []
    for i in range(args.voters):
        t_sk, s_sk = TEST.rand_scalar(rng), TEST.rand_scalar(rng)
        voters.append({
            "voter_id": f"voter{i:02d}", "credential": f"cred-{i:02d}",
            "trapdoor_sk": t_sk, "signing_sk": s_sk,
        })
        roster.append({
            "voter_id": f"voter{i:02d}", "credential": f"cred-{i:02d}",
            "trapdoor_pk": to_hex(TEST.gexp(t_sk)),
            "signing_pk": to_hex(TEST.gexp(s_sk)),
        })

    with tempfile.TemporaryDirectory() as data_dir:
        _, url = start_server(port, data_dir)
        print(f"server up at {url}")

        admin(url, "setup", config={
            "election_id": "demo", "candidates": candidates,
            "roster": roster, "teller_count": 3, "group_profile": "TEST",
        })
        admin(url, "transition", phase="Vote")
        print("phase: Vote")

        choices = [candidates[rng.randrange(len(candidates))][0]
                   for _ in voters]
        sessions = []
        for voter, choice in zip(voters, choices):
            s = ClientSession(server=url, voter_id=voter["voter_id"],
                              credential=voter["credential"],
                              trapdoor_sk=voter["trapdoor_sk"],
                              signing_sk=voter["signing_sk"],
                              retain_choice=True)
            s.login()
            index = s.cast_vote(choice)
            sessions.append(s)
            print(f"  {voter['voter_id']} voted {choice} (board index {index})")

        admin(url, "transition", phase="Published")
        admin(url, "transition", phase="Verify")
        print("phase: Verify (tally published)")

        for voter, s, choice in zip(voters, sessions, choices):
            s.acknowledge_qna()
            outcome = s.verify_vote()
            status = "MATCH" if outcome.match else "MISMATCH"
            print(f"  {voter['voter_id']} tracker {outcome.tracker_display} "
                  f"-> {outcome.row_candidate} [{status}]")
            assert outcome.match

        # a coerced voter shows the coercer a tracker for candidate A
        coerced = ClientSession(server=url, voter_id=voters[0]["voter_id"],
                                credential=voters[0]["credential"],
                                trapdoor_sk=voters[0]["trapdoor_sk"])
        coerced.login()
        try:
            display, _ = coerced.fake_tracker("A")
            print(f"coercion demo: {voters[0]['voter_id']} can show tracker "
                  f"{display} pointing at candidate A")
        except Exception as e:
            print(f"coercion demo skipped: {e}")

        r = httpx.get(f"{url}/api/board", timeout=30.0)
        results = [e for e in r.json()["entries"] if e["kind"] == "Result"]
        counts = {}
        for e in results:
            cid = bytes.fromhex(e["payload"]).decode().split(":", 1)[1]
            counts[cid] = counts.get(cid, 0) + 1
        print("final tally:", ", ".join(f"{c}={n}" for c, n in sorted(counts.items())))


if __name__ == "__main__":
    main()
