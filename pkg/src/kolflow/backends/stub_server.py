"""Reference model server wrapping a built-in algorithm.

Speaks the /v1 wire protocol over plain HTTP. Used by integration tests to
prove local/remote transparency, and runnable standalone:

    python -m kolflow.backends.stub_server --algorithm mock_makeup --port 8701

Test hooks: ``delay_s`` stalls each invoke (timeout tests) and ``fault``
switches the server into a failure mode ("remote_error" returns a structured
fault, "garbage" returns an unparseable body).
"""

from __future__ import annotations

import argparse
import base64
import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from kolflow import capabilities as caps
from kolflow.backends.local import get_algorithm, invoke_local
from kolflow.core.artifacts import Artifact, ArtifactType
from kolflow.errors import KolflowError


def descriptor_doc(algorithm_id: str) -> dict:
    descriptor, _fn = get_algorithm(algorithm_id)
    return {
        "algorithm_id": descriptor.algorithm_id,
        "capability": descriptor.capability,
        "deterministic": descriptor.deterministic,
        "inputs": [
            {"port": p.name, "type": p.artifact_type.value, "required": p.required}
            for p in caps.CAPABILITY_INPUTS[descriptor.capability]
        ],
        "outputs": [
            {"port": p.name, "type": p.artifact_type.value}
            for p in caps.CAPABILITY_OUTPUTS[descriptor.capability]
        ],
        "parameters": dict(descriptor.parameters),
    }


class StubModelServer:
    """Threaded HTTP server exposing one algorithm behind the wire protocol."""

    def __init__(self, algorithm_id: str, host: str = "127.0.0.1", port: int = 0,
                 delay_s: float = 0.0, fault: str | None = None):
        self.algorithm_id = algorithm_id
        self.delay_s = delay_s
        self.fault = fault
        get_algorithm(algorithm_id)  # fail fast on unknown ids

        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output clean
                pass

            def _send_json(self, doc: dict, status: int = 200) -> None:
                body = json.dumps(doc).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/v1/health":
                    self._send_json({"status": "ok"})
                elif self.path == "/v1/descriptor":
                    self._send_json(descriptor_doc(stub.algorithm_id))
                else:
                    self._send_json({"status": "error", "code": "NOT_FOUND",
                                     "message": f"no route {self.path}"}, 404)

            def do_POST(self):
                if self.path != "/v1/invoke":
                    self._send_json({"status": "error", "code": "NOT_FOUND",
                                     "message": f"no route {self.path}"}, 404)
                    return
                if stub.delay_s:
                    time.sleep(stub.delay_s)
                if stub.fault == "remote_error":
                    self._send_json({"status": "error", "code": "OOM",
                                     "message": "simulated out-of-memory"})
                    return
                if stub.fault == "garbage":
                    body = b"this is not json"
                    self.send_response(200)
                    self.send_header("Content-Type", "text/plain")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
                try:
                    length = int(self.headers.get("Content-Length", "0"))
                    request = json.loads(self.rfile.read(length))
                    inputs = {
                        name: Artifact(ArtifactType.parse(entry["type"]),
                                       base64.b64decode(entry["payload_b64"]))
                        for name, entry in request.get("inputs", {}).items()
                    }
                    outputs = invoke_local(stub.algorithm_id, inputs,
                                           request.get("params", {}))
                except KolflowError as exc:
                    self._send_json({"status": "error", "code": exc.code,
                                     "message": str(exc)})
                    return
                except Exception as exc:
                    self._send_json({"status": "error", "code": "INTERNAL",
                                     "message": str(exc)})
                    return
                self._send_json({
                    "status": "ok",
                    "outputs": {
                        name: {
                            "type": artifact.artifact_type.value,
                            "payload_b64": base64.b64encode(artifact.payload).decode(),
                        }
                        for name, artifact in outputs.items()
                    },
                })

        self._server = ThreadingHTTPServer((host, port), Handler)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "StubModelServer":
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "StubModelServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="serve one built-in algorithm "
                                                 "behind the model-server protocol")
    parser.add_argument("--algorithm", required=True)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8701)
    parser.add_argument("--delay", type=float, default=0.0,
                        help="stall each invoke this many seconds (testing)")
    args = parser.parse_args(argv)

    server = StubModelServer(args.algorithm, host=args.host, port=args.port,
                             delay_s=args.delay)
    print(f"serving {args.algorithm} at {server.base_url}")
    try:
        server._server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
