"""The remote service operations behind the gateway targets.

Six families: authentication, component-layout persistence, UI-settings
persistence, action log, chat, and the search entry point.  Every
operation except register/login/echo takes the session token as its
first argument and answers an ``auth.required`` fault for anything not
issued by login/register (or already logged out / idle-expired).

Every successful authenticated operation appends one action-log entry
for the calling user, after its result is computed.
"""

from __future__ import annotations

import hashlib
import hmac
import re
import secrets
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Callable

from . import search as search_engine
from .faults import ServiceFault, bad_arguments
from .store import Store

SESSION_IDLE_SECONDS = 24 * 60 * 60
PBKDF2_ITERATIONS = 60_000
MAX_LAYOUT_STATES = 256
CHAT_POLL_CAP = 100

DEFAULT_UI_SETTINGS = {
    "background_color": "#FFFFFF",
    "font_family": "sans-serif",
    "font_size": 12,
    "theme": "light",
}

_USERNAME_RE = re.compile(r"^[A-Za-z0-9_]{3,32}$")
_COLOR_RE = re.compile(r"^#[0-9A-Fa-f]{6}$")

_STATE_KEYS = {"component_id", "x", "y", "visible", "z_order", "props"}
_SETTINGS_KEYS = {"background_color", "font_family", "font_size", "theme"}


@dataclass
class Session:
    token: str
    user_id: int
    username: str
    login_seq: int
    last_active: float


def _now_iso(clock: Callable[[], float]) -> str:
    return datetime.fromtimestamp(clock(), tz=timezone.utc).isoformat()


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


class AppServices:
    def __init__(self, store: Store, clock: Callable[[], float] = time.time):
        self.store = store
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()
        self._register_lock = threading.Lock()

    # -- authentication ----------------------------------------------------

    def register_user(self, username: object, password: object) -> dict:
        if not isinstance(username, str) or not _USERNAME_RE.match(username):
            raise bad_arguments("username must be 3-32 chars of [A-Za-z0-9_]")
        if not isinstance(password, str) or len(password) < 6:
            raise bad_arguments("password must be at least 6 chars")
        with self._register_lock:
            if self.store.get("users", username) is not None:
                raise ServiceFault("auth.duplicate_user", f"user '{username}' exists")
            user_id = 1 + max(
                (record["id"] for _, record in self.store.items("users")), default=0
            )
            salt = secrets.token_bytes(16)
            digest = hashlib.pbkdf2_hmac(
                "sha256", password.encode("utf-8"), salt, PBKDF2_ITERATIONS
            )
            self.store.put(
                "users",
                username,
                {
                    "id": user_id,
                    "salt": salt.hex(),
                    "hash": digest.hex(),
                    "iterations": PBKDF2_ITERATIONS,
                },
            )
        session = self._create_session(user_id, username)
        self._log(user_id, "auth.register")
        return self._session_value(session)

    def login(self, username: object, password: object) -> dict:
        if not isinstance(username, str) or not isinstance(password, str):
            raise bad_arguments("username and password must be strings")
        record = self.store.get("users", username)
        # hash either way so unknown-user and wrong-password look identical
        salt = bytes.fromhex(record["salt"]) if record else b"\x00" * 16
        iterations = record["iterations"] if record else PBKDF2_ITERATIONS
        digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)
        if record is None or not hmac.compare_digest(digest.hex(), record["hash"]):
            raise ServiceFault("auth.invalid", "unknown user or wrong password")
        session = self._create_session(record["id"], username)
        self._log(record["id"], "auth.login")
        return self._session_value(session)

    def logout(self, token: object) -> bool:
        with self._sessions_lock:
            session = self._sessions.pop(token, None) if isinstance(token, str) else None
        if session is not None:
            self._log(session.user_id, "auth.logout")
        return True

    def validate(self, token: object) -> int:
        return self._session(token).user_id

    def _create_session(self, user_id: int, username: str) -> Session:
        token = secrets.token_hex(16)
        session = Session(
            token=token,
            user_id=user_id,
            username=username,
            login_seq=self.store.last_index("chat"),
            last_active=self.clock(),
        )
        with self._sessions_lock:
            self._sessions[token] = session
        return session

    def _session(self, token: object) -> Session:
        with self._sessions_lock:
            session = self._sessions.get(token) if isinstance(token, str) else None
            if session is not None:
                now = self.clock()
                if now - session.last_active > SESSION_IDLE_SECONDS:
                    del self._sessions[token]
                    session = None
                else:
                    session.last_active = now
        if session is None:
            raise ServiceFault("auth.required", "login first")
        return session

    @staticmethod
    def _session_value(session: Session) -> dict:
        return {"token": session.token, "user_id": session.user_id, "username": session.username}

    # -- component layout ----------------------------------------------------

    def save_component_states(self, token: object, states: object) -> bool:
        session = self._session(token)
        if not isinstance(states, list):
            raise bad_arguments("states must be an array")
        if len(states) > MAX_LAYOUT_STATES:
            raise bad_arguments(f"at most {MAX_LAYOUT_STATES} states")
        normalized = [self._check_state(state) for state in states]
        z_orders = [state["z_order"] for state in normalized]
        if len(set(z_orders)) != len(z_orders):
            raise bad_arguments("z_order values must be unique")
        self.store.put("layouts", str(session.user_id), normalized)
        self._log(session.user_id, "gui.saveStates")
        return True

    @staticmethod
    def _check_state(state: object) -> dict:
        if not isinstance(state, dict) or not set(state) <= _STATE_KEYS:
            raise bad_arguments("component state has unexpected shape")
        component_id = state.get("component_id")
        if not isinstance(component_id, str) or not component_id:
            raise bad_arguments("component_id must be a non-empty string")
        x, y = state.get("x"), state.get("y")
        if not (_is_int(x) and _is_int(y) and x >= 0 and y >= 0):
            raise bad_arguments("x and y must be non-negative integers")
        if not isinstance(state.get("visible"), bool):
            raise bad_arguments("visible must be a boolean")
        if not _is_int(state.get("z_order")):
            raise bad_arguments("z_order must be an integer")
        props = state.get("props", {})
        if isinstance(props, dict):
            ok = all(isinstance(k, str) and isinstance(v, str) for k, v in props.items())
        else:
            ok = False
        if not ok:
            raise bad_arguments("props must map strings to strings")
        return {
            "component_id": component_id,
            "x": x,
            "y": y,
            "visible": state["visible"],
            "z_order": state["z_order"],
            "props": dict(props),
        }

    def load_component_states(self, token: object) -> list:
        session = self._session(token)
        states = self.store.get("layouts", str(session.user_id)) or []
        self._log(session.user_id, "gui.loadStates")
        return states

    # -- UI settings ---------------------------------------------------------

    def save_ui_settings(self, token: object, settings: object) -> bool:
        session = self._session(token)
        if not isinstance(settings, dict) or set(settings) != _SETTINGS_KEYS:
            raise bad_arguments("settings must carry exactly the four settings keys")
        if not isinstance(settings["background_color"], str) or not _COLOR_RE.match(
            settings["background_color"]
        ):
            raise bad_arguments("background_color must be #RRGGBB")
        if not isinstance(settings["font_family"], str):
            raise bad_arguments("font_family must be a string")
        if not _is_int(settings["font_size"]) or not 6 <= settings["font_size"] <= 72:
            raise bad_arguments("font_size must be an integer in [6, 72]")
        if not isinstance(settings["theme"], str):
            raise bad_arguments("theme must be a string")
        self.store.put("settings", str(session.user_id), dict(settings))
        self._log(session.user_id, "gui.saveSettings")
        return True

    def load_ui_settings(self, token: object) -> dict:
        session = self._session(token)
        settings = self.store.get("settings", str(session.user_id))
        if settings is None:
            settings = dict(DEFAULT_UI_SETTINGS)
        self._log(session.user_id, "gui.loadSettings")
        return settings

    # -- action log ------------------------------------------------------------

    def get_action_log(self, token: object, limit: object) -> list:
        session = self._session(token)
        if not _is_int(limit) or not 1 <= limit <= 500:
            raise bad_arguments("limit must be an integer in [1, 500]")
        own = [
            entry
            for _, entry in self.store.scan("action_log")
            if entry["user_id"] == session.user_id
        ]
        newest_first = own[::-1][:limit]
        self._log(session.user_id, "log.get")
        return newest_first

    def _log(self, user_id: int, action: str, detail: str | None = None) -> None:
        self.store.append(
            "action_log",
            {"ts": _now_iso(self.clock), "user_id": user_id, "action": action, "detail": detail},
        )

    # -- chat --------------------------------------------------------------------

    def send_chat(self, token: object, text: object) -> dict:
        session = self._session(token)
        if not isinstance(text, str) or not 1 <= len(text) <= 1000:
            raise bad_arguments("chat text must be 1-1000 chars")
        entry = {"sender": session.username, "ts": _now_iso(self.clock), "text": text}
        seq = self.store.append("chat", entry)
        self._log(session.user_id, "chat.send")
        return {"seq": seq, **entry}

    def poll_chat(self, token: object, after_seq: object) -> list:
        session = self._session(token)
        if not _is_int(after_seq) or after_seq < 0:
            raise bad_arguments("after_seq must be a non-negative integer")
        cursor = max(after_seq, session.login_seq)
        messages = [
            {"seq": seq, **entry}
            for seq, entry in self.store.scan("chat", from_index=cursor, limit=CHAT_POLL_CAP)
        ]
        self._log(session.user_id, "chat.poll")
        return messages

    # -- search ------------------------------------------------------------------

    def search(self, token: object, mode: object, query: object) -> dict:
        session = self._session(token)
        if mode not in ("phrase", "sql"):
            raise bad_arguments(f"mode must be 'phrase' or 'sql', got {mode!r}")
        if not isinstance(query, str):
            raise bad_arguments("query must be a string")
        if mode == "phrase":
            result = search_engine.phrase_search(query, self.store)
        else:
            try:
                ast = search_engine.parse_sql(query)
                result = search_engine.execute_sql(ast, self.store)
            except search_engine.ForbiddenError as err:
                raise ServiceFault("query.forbidden", str(err), details=query) from None
            except search_engine.ParseError as err:
                raise ServiceFault("query.parse_error", str(err), details=query) from None
        self._log(session.user_id, "search.run", detail=query)
        return result.to_value()

    # -- diagnostics ---------------------------------------------------------------

    def echo(self, value: object) -> object:
        return value


#: operation id -> (AppServices method, positional arity)
OPERATIONS: dict[str, tuple[str, int]] = {
    "register_user": ("register_user", 2),
    "login": ("login", 2),
    "logout": ("logout", 1),
    "save_component_states": ("save_component_states", 2),
    "load_component_states": ("load_component_states", 1),
    "save_ui_settings": ("save_ui_settings", 2),
    "load_ui_settings": ("load_ui_settings", 1),
    "get_action_log": ("get_action_log", 2),
    "send_chat": ("send_chat", 2),
    "poll_chat": ("poll_chat", 2),
    "search": ("search", 3),
    "echo": ("echo", 1),
}

#: the built-in target map, also shipped as data/routes.conf
DEFAULT_ROUTES: list[tuple[str, str]] = [
    ("auth.register", "register_user"),
    ("auth.login", "login"),
    ("auth.logout", "logout"),
    ("gui.saveStates", "save_component_states"),
    ("gui.loadStates", "load_component_states"),
    ("gui.saveSettings", "save_ui_settings"),
    ("gui.loadSettings", "load_ui_settings"),
    ("log.get", "get_action_log"),
    ("chat.send", "send_chat"),
    ("chat.poll", "poll_chat"),
    ("search.run", "search"),
    ("echo.echo", "echo"),
]
