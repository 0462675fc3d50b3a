"""Voter key files: one file per voter holding the hex trapdoor and
signing secret keys behind a version header.

    SELENE-KEY-V1
    trapdoor_sk=<hex>
    signing_sk=<hex>
"""

from __future__ import annotations

from pathlib import Path

from .encoding import from_hex, to_hex

HEADER = "SELENE-KEY-V1"


def write_keyfile(path, trapdoor_sk: int, signing_sk: int):
    lines = [HEADER, f"trapdoor_sk={to_hex(trapdoor_sk)}", f"signing_sk={to_hex(signing_sk)}"]
    Path(path).write_text("\n".join(lines) + "\n")


def read_keyfile(path) -> tuple[int, int]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != HEADER:
        raise ValueError(f"{path}: not a {HEADER} key file")
    fields = dict(line.split("=", 1) for line in lines[1:] if line.strip())
    return from_hex(fields["trapdoor_sk"]), from_hex(fields["signing_sk"])
