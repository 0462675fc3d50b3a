#!/usr/bin/env python3
"""Provision an election: voter keys, credentials, keyfiles and a server
config payload ready for `selene setup`.

Example:
    python3 scripts/make_election.py --out /tmp/demo --voters 5 \
        --candidates A:Alice,B:Bob,C:Carol --group TEST
"""

import argparse
import json
import random
import secrets
from pathlib import Path

from selene.encoding import to_hex
from selene.groups import profile
from selene.keyfile import write_keyfile


def parse_candidates(arg):
    pairs = []
    for item in arg.split(","):
        cid, _, name = item.partition(":")
        pairs.append([cid.strip(), (name or cid).strip()])
    return pairs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--voters", type=int, default=5)
    ap.add_argument("--candidates", default="A:Alice,B:Bob,C:Carol")
    ap.add_argument("--group", default="TEST", choices=["TEST", "PROD"])
    ap.add_argument("--election-id", default="demo-election")
    ap.add_argument("--tellers", type=int, default=3)
    ap.add_argument("--seed", type=int, default=None,
                    help="deterministic keys for testing (omit for secure randomness)")
    args = ap.parse_args()

    ctx = profile(args.group)
    rng = random.Random(args.seed) if args.seed is not None else random.SystemRandom()

    out = Path(args.out)
    keys_dir = out / "keys"
    keys_dir.mkdir(parents=True, exist_ok=True)

    roster = []
    credentials = {}
    for i in range(args.voters):
        voter_id = f"voter{i:02d}"
        trapdoor_sk = ctx.rand_scalar(rng)
        signing_sk = ctx.rand_scalar(rng)
        credential = secrets.token_urlsafe(12)
        write_keyfile(keys_dir / f"{voter_id}.key", trapdoor_sk, signing_sk)
        roster.append({
            "voter_id": voter_id,
            "trapdoor_pk": to_hex(ctx.gexp(trapdoor_sk)),
            "signing_pk": to_hex(ctx.gexp(signing_sk)),
            "credential": credential,
        })
        credentials[voter_id] = credential

    config = {
        "election_id": args.election_id,
        "candidates": parse_candidates(args.candidates),
        "roster": roster,
        "teller_count": args.tellers,
        "group_profile": args.group,
    }
    (out / "election.json").write_text(json.dumps(config, indent=2) + "\n")
    (out / "credentials.json").write_text(json.dumps(credentials, indent=2) + "\n")

    print(f"wrote {out / 'election.json'} ({args.voters} voters, {args.group} group)")
    print(f"keyfiles in {keys_dir}/, credentials in {out / 'credentials.json'}")
    print("next: selene setup --server URL --config election.json --admin-credential ...")


if __name__ == "__main__":
    main()
