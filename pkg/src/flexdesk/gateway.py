"""Packet dispatch: route request messages to service operations.

Each request message is routed by target URI, independently of its
siblings; the response packet carries exactly one message per request
message, in order.  Success replies go to ``<response_uri>/onResult``
with the operation's result as the body; failures go to
``<response_uri>/onStatus`` with a fault object.  Request bodies are
dense arrays of positional arguments.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from . import amf3
from .amf3 import AmfMessage, AmfPacket
from .faults import ServiceFault, bad_arguments
from .services import DEFAULT_ROUTES, OPERATIONS, AppServices

log = logging.getLogger(__name__)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Route:
    target: str
    op_id: str
    method: str
    arity: int


class ServiceRegistry:
    """Immutable after startup: target name -> operation descriptor."""

    def __init__(self) -> None:
        self._routes: dict[str, Route] = {}

    def register(self, target: str, op_id: str, arity: int | None = None) -> None:
        if not target:
            raise ConfigError("route target must be non-empty")
        if target in self._routes:
            raise ConfigError(f"duplicate route {target!r}")
        if op_id not in OPERATIONS:
            raise ConfigError(f"route {target!r} names unknown operation {op_id!r}")
        method, catalog_arity = OPERATIONS[op_id]
        self._routes[target] = Route(target, op_id, method, arity or catalog_arity)

    def resolve(self, target: str) -> Route | None:
        return self._routes.get(target)

    def targets(self) -> list[str]:
        return sorted(self._routes)

    def __len__(self) -> int:
        return len(self._routes)


def parse_routes_config(text: str) -> list[tuple[str, str]]:
    """Lines of ``target=operation``; ``#`` comments and blanks skipped."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"routes line {lineno}: want target=operation")
        target, _, op_id = line.partition("=")
        target, op_id = target.strip(), op_id.strip()
        if not target or not op_id:
            raise ConfigError(f"routes line {lineno}: empty target or operation")
        pairs.append((target, op_id))
    return pairs


def build_registry(pairs: list[tuple[str, str]]) -> ServiceRegistry:
    registry = ServiceRegistry()
    for target, op_id in pairs:
        registry.register(target, op_id)
    return registry


def default_registry() -> ServiceRegistry:
    return build_registry(DEFAULT_ROUTES)


def load_registry(path: Path | None) -> ServiceRegistry:
    if path is None or not path.exists():
        return default_registry()
    return build_registry(parse_routes_config(path.read_text(encoding="utf-8")))


@dataclass
class ServerContext:
    services: AppServices


def dispatch(request: AmfPacket, registry: ServiceRegistry, ctx: ServerContext) -> AmfPacket:
    """One response message per request message, same order, faults typed."""
    return AmfPacket(messages=[_dispatch_one(m, registry, ctx) for m in request.messages])


def _dispatch_one(message: AmfMessage, registry: ServiceRegistry, ctx: ServerContext) -> AmfMessage:
    def status(fault: ServiceFault) -> AmfMessage:
        return AmfMessage(message.response_uri + "/onStatus", "", fault.to_value())

    route = registry.resolve(message.target_uri)
    if route is None:
        return status(ServiceFault("gateway.no_such_target", f"no target '{message.target_uri}'"))
    if not isinstance(message.body, list):
        return status(bad_arguments("request body must be a dense array of arguments"))
    if len(message.body) != route.arity:
        return status(bad_arguments(f"want {route.arity} arguments, got {len(message.body)}"))
    try:
        result = getattr(ctx.services, route.method)(*message.body)
        amf3.encode_value(result)  # fault now if a handler returned junk
    except ServiceFault as fault:
        return status(fault)
    except Exception:
        log.exception("handler for %s failed", message.target_uri)
        return status(ServiceFault("internal.error", "unexpected server error"))
    return AmfMessage(message.response_uri + "/onResult", "", result)


def handle_http(body: bytes, registry: ServiceRegistry, ctx: ServerContext) -> tuple[int, bytes]:
    """Gateway POST body -> (status, reply body); never raises."""
    try:
        packet = amf3.decode_packet(body)
    except amf3.AmfError as err:
        log.debug("undecodable packet: %s", err)
        return 400, b""
    if not packet.messages:
        return 400, b""
    response = dispatch(packet, registry, ctx)
    return 200, amf3.encode_packet(response)
