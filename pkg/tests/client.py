"""Minimal raw-binary gateway client used by the HTTP and acceptance tests."""

from __future__ import annotations

import http.client
import itertools

from flexdesk import amf3
from flexdesk.amf3 import AmfMessage, AmfPacket


class CallFailed(Exception):
    def __init__(self, fault: dict):
        super().__init__(f"{fault.get('code')}: {fault.get('message')}")
        self.fault = fault


class AmfClient:
    def __init__(self, port: int, host: str = "127.0.0.1"):
        self.host = host
        self.port = port
        self._response_ids = itertools.count(1)

    def post_raw(self, body: bytes, path: str = "/gateway") -> tuple[int, str, bytes]:
        conn = http.client.HTTPConnection(self.host, self.port, timeout=10)
        try:
            conn.request("POST", path, body=body, headers={"Content-Type": amf3.AMF_CONTENT_TYPE})
            response = conn.getresponse()
            return response.status, response.getheader("Content-Type", ""), response.read()
        finally:
            conn.close()

    def get(self, path: str) -> tuple[int, str, bytes]:
        conn = http.client.HTTPConnection(self.host, self.port, timeout=10)
        try:
            conn.request("GET", path)
            response = conn.getresponse()
            return response.status, response.getheader("Content-Type", ""), response.read()
        finally:
            conn.close()

    def call_many(self, calls: list[tuple[str, list]]) -> list[tuple[str, object]]:
        """POST one packet with several messages; returns [(kind, body)]."""
        uris = [f"/{next(self._response_ids)}" for _ in calls]
        packet = AmfPacket(
            messages=[
                AmfMessage(target, uri, list(args))
                for (target, args), uri in zip(calls, uris)
            ]
        )
        status, content_type, payload = self.post_raw(amf3.encode_packet(packet))
        if status != 200:
            raise CallFailed({"code": "http", "message": f"status {status}"})
        assert content_type == amf3.AMF_CONTENT_TYPE
        response = amf3.decode_packet(payload)
        assert len(response.messages) == len(calls)
        results = []
        for message, uri in zip(response.messages, uris):
            if message.target_uri == uri + "/onResult":
                results.append(("result", message.body))
            elif message.target_uri == uri + "/onStatus":
                results.append(("fault", message.body))
            else:
                raise AssertionError(f"uncorrelated reply target {message.target_uri!r}")
        return results

    def call(self, target: str, *args) -> object:
        kind, body = self.call_many([(target, list(args))])[0]
        if kind == "fault":
            raise CallFailed(body)
        return body
