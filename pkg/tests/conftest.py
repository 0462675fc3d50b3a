import random
import socket
import threading
import time
from dataclasses import dataclass

import httpx
import pytest
import uvicorn

from selene.encoding import to_hex
from selene.groups import TEST
from selene.server import ElectionServer, ServerConfig, create_app

ADMIN = "test-admin-credential"


@dataclass
class VoterFixture:
    voter_id: str
    credential: str
    trapdoor_sk: int
    trapdoor_pk: int
    signing_sk: int
    signing_pk: int


def make_voters(ctx, n, rng) -> list[VoterFixture]:
    voters = []
    for i in range(n):
        t_sk = ctx.rand_scalar(rng)
        s_sk = ctx.rand_scalar(rng)
        voters.append(
            VoterFixture(
                voter_id=f"voter{i:02d}",
                credential=f"cred-{i:02d}-{rng.randrange(10**6)}",
                trapdoor_sk=t_sk,
                trapdoor_pk=ctx.gexp(t_sk),
                signing_sk=s_sk,
                signing_pk=ctx.gexp(s_sk),
            )
        )
    return voters


def config_payload(voters, candidates=(("A", "Alice"), ("B", "Bob"), ("C", "Carol")),
                   election_id="test-election", teller_count=3, group_profile="TEST"):
    return {
        "election_id": election_id,
        "candidates": [list(c) for c in candidates],
        "roster": [
            {
                "voter_id": v.voter_id,
                "trapdoor_pk": to_hex(v.trapdoor_pk),
                "signing_pk": to_hex(v.signing_pk),
                "credential": v.credential,
            }
            for v in voters
        ],
        "teller_count": teller_count,
        "group_profile": group_profile,
    }


class Env:
    """In-process server plus ASGI-backed HTTP clients."""

    def __init__(self, data_dir):
        self.data_dir = data_dir
        self.config = ServerConfig(data_dir=str(data_dir), admin_credential=ADMIN)
        self.restart()

    def restart(self):
        self.server = ElectionServer(self.config)
        self.app = create_app(server=self.server)

    def client(self) -> httpx.Client:
        from fastapi.testclient import TestClient

        return TestClient(self.app, base_url="http://board")

    def admin_setup(self, payload):
        with self.client() as c:
            r = c.post("/api/admin/setup", json={"admin_credential": ADMIN, "config": payload})
            assert r.status_code == 200, r.text
            return r.json()

    def transition(self, phase):
        with self.client() as c:
            r = c.post("/api/admin/transition", json={"admin_credential": ADMIN, "phase": phase})
            assert r.status_code == 200, r.text
            return r.json()


@pytest.fixture
def env(tmp_path):
    return Env(tmp_path / "election")


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def ctx():
    return TEST


class LiveServer:
    """Real uvicorn server on a localhost socket, for live-wire tests."""

    def __init__(self, data_dir, admin_credential=ADMIN):
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            self.port = s.getsockname()[1]
        self.config = ServerConfig(
            addr=f"127.0.0.1:{self.port}",
            data_dir=str(data_dir),
            admin_credential=admin_credential,
        )
        self.url = f"http://127.0.0.1:{self.port}"
        self._server = None
        self._thread = None

    def start(self):
        app = create_app(self.config)
        uv_config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self._server = uvicorn.Server(uv_config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self._thread.start()
        deadline = time.time() + 10
        while time.time() < deadline:
            try:
                httpx.get(self.url + "/api/board", timeout=1.0)
                return self
            except httpx.TransportError:
                time.sleep(0.02)
        raise RuntimeError("live server did not come up")

    def stop(self):
        if self._server is not None:
            self._server.should_exit = True
            self._thread.join(timeout=10)

    def admin_setup(self, payload):
        r = httpx.post(
            self.url + "/api/admin/setup",
            json={"admin_credential": self.config.admin_credential, "config": payload},
            timeout=60.0,
        )
        assert r.status_code == 200, r.text
        return r.json()

    def transition(self, phase):
        r = httpx.post(
            self.url + "/api/admin/transition",
            json={"admin_credential": self.config.admin_credential, "phase": phase},
            timeout=120.0,
        )
        assert r.status_code == 200, r.text
        return r.json()


@pytest.fixture
def live_server(tmp_path):
    servers = []

    def make(subdir="live"):
        srv = LiveServer(tmp_path / subdir).start()
        servers.append(srv)
        return srv

    yield make
    for srv in servers:
        srv.stop()
