#!/usr/bin/env python3
"""Smoke tour against a running gateway: auth, layout, search, chat, log.

Start a server first, e.g.:

    flexdesk-server --port 8080 --data-dir ./data --seed-file tests/data/records_seed.csv

then:  python scripts/demo_client.py --port 8080
"""

from __future__ import annotations

import argparse
import http.client
import secrets

from flexdesk import amf3


def call(host: str, port: int, target: str, *args) -> object:
    packet = amf3.AmfPacket(messages=[amf3.AmfMessage(target, "/1", list(args))])
    conn = http.client.HTTPConnection(host, port, timeout=10)
    try:
        conn.request("POST", "/gateway", body=amf3.encode_packet(packet),
                     headers={"Content-Type": amf3.AMF_CONTENT_TYPE})
        response = conn.getresponse()
        payload = response.read()
    finally:
        conn.close()
    if response.status != 200:
        raise SystemExit(f"gateway answered HTTP {response.status}")
    message = amf3.decode_packet(payload).messages[0]
    if message.target_uri.endswith("/onStatus"):
        fault = message.body
        raise SystemExit(f"fault {fault['code']}: {fault['message']}")
    return message.body


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args()

    username = f"demo_{secrets.token_hex(3)}"
    print(f"echo          -> {call(args.host, args.port, 'echo.echo', 'ping')!r}")
    session = call(args.host, args.port, "auth.register", username, "demo-password")
    token = session["token"]
    print(f"registered    -> {username} (user id {session['user_id']})")

    layout = [
        {"component_id": "clock", "x": 40, "y": 30, "visible": True, "z_order": 1, "props": {}},
        {"component_id": "notes", "x": 420, "y": 60, "visible": True, "z_order": 2,
         "props": {"text": "hello"}},
    ]
    call(args.host, args.port, "gui.saveStates", token, layout)
    restored = call(args.host, args.port, "gui.loadStates", token)
    print(f"layout        -> saved and restored {len(restored)} component states")

    result = call(args.host, args.port, "search.run", token, "sql",
                  "SELECT id, name FROM records WHERE name LIKE '%box%' LIMIT 5")
    print(f"sql search    -> {result['total']} rows via {result['interpreted']!r}")
    for row in result["rows"]:
        print(f"                 {row}")

    result = call(args.host, args.port, "search.run", token, "phrase", "gear 5mm")
    print(f"phrase search -> {result['total']} rows for {result['interpreted']!r}")

    sent = call(args.host, args.port, "chat.send", token, "hello from the demo client")
    messages = call(args.host, args.port, "chat.poll", token, sent["seq"] - 1)
    print(f"chat          -> seq {sent['seq']} delivered {[m['text'] for m in messages]}")

    entries = call(args.host, args.port, "log.get", token, 5)
    print(f"action log    -> {[e['action'] for e in entries]}")
    call(args.host, args.port, "auth.logout", token)
    print("logged out.")


if __name__ == "__main__":
    main()
