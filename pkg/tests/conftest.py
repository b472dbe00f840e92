"""Shared test helpers: a live HTTP service wrapper and the acceptance summary."""

from __future__ import annotations

import threading
import time
from pathlib import Path

import uvicorn

from riskboard.service import ServiceConfig, create_app

# Lines recorded by the acceptance tests, echoed after the run so the
# verdict for each criterion is visible even when capture is on.
acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)


class LiveService:
    """Runs the API on an ephemeral localhost port in a daemon thread."""

    def __init__(self, data_dir: Path):
        config = uvicorn.Config(
            create_app(ServiceConfig(data_dir=Path(data_dir))),
            host="127.0.0.1",
            port=0,
            log_level="warning",
        )
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.url = ""

    def __enter__(self) -> "LiveService":
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("service did not start within 10s")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        self.url = f"http://127.0.0.1:{port}"
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)
