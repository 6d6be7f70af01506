"""Service-layer tests: auth, layouts, settings, action log, chat, search."""

from __future__ import annotations

import re
import threading

import pytest

from flexdesk.faults import ServiceFault
from flexdesk.services import DEFAULT_UI_SETTINGS, AppServices
from flexdesk.store import ingest_seed, open_store
from sql_support import SEED_CSV

TOKEN_RE = re.compile(r"^[0-9a-f]{32}$")


class FakeClock:
    def __init__(self, now: float = 1_700_000_000.0):
        self.now = now

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def services(tmp_path, clock):
    return AppServices(open_store(tmp_path / "data"), clock=clock)


def fault_code(excinfo) -> str:
    return excinfo.value.code


STATES = [
    {"component_id": "clock", "x": 10, "y": 20, "visible": True, "z_order": 1, "props": {}},
    {"component_id": "notes", "x": 5, "y": 0, "visible": False, "z_order": 2,
     "props": {"text": "todo"}},
    {"component_id": "chat", "x": 300, "y": 120, "visible": True, "z_order": 3, "props": {}},
]


class TestAuth:
    def test_register_returns_live_session(self, services):
        session = services.register_user("alice", "secret1")
        assert TOKEN_RE.match(session["token"])
        assert session["user_id"] == 1
        assert services.validate(session["token"]) == 1

    def test_duplicate_username(self, services):
        services.register_user("alice", "secret1")
        with pytest.raises(ServiceFault) as err:
            services.register_user("alice", "other password")
        assert fault_code(err) == "auth.duplicate_user"

    @pytest.mark.parametrize(
        "username,password",
        [("a", "x"), ("ab", "longenough"), ("has space", "longenough"),
         ("x" * 33, "longenough"), ("alice", "short"), (7, "longenough"), ("bob", None)],
    )
    def test_malformed_registration(self, services, username, password):
        with pytest.raises(ServiceFault) as err:
            services.register_user(username, password)
        assert fault_code(err) == "gateway.bad_arguments"

    def test_login_success_and_distinct_tokens(self, services):
        services.register_user("alice", "secret1")
        first = services.login("alice", "secret1")
        second = services.login("alice", "secret1")
        assert first["token"] != second["token"]
        assert services.validate(first["token"]) == services.validate(second["token"]) == 1

    def test_wrong_password_and_unknown_user_look_identical(self, services):
        services.register_user("alice", "secret1")
        with pytest.raises(ServiceFault) as wrong:
            services.login("alice", "wrongpw")
        with pytest.raises(ServiceFault) as unknown:
            services.login("nobody", "wrongpw")
        assert wrong.value.code == unknown.value.code == "auth.invalid"
        assert wrong.value.message == unknown.value.message
        assert wrong.value.details == unknown.value.details

    def test_logout_is_idempotent(self, services):
        token = services.register_user("alice", "secret1")["token"]
        assert services.logout(token) is True
        assert services.logout(token) is True
        with pytest.raises(ServiceFault) as err:
            services.validate(token)
        assert fault_code(err) == "auth.required"

    def test_garbage_tokens_rejected(self, services):
        for token in ["", "nope", 42, None, "f" * 32]:
            with pytest.raises(ServiceFault) as err:
                services.validate(token)
            assert fault_code(err) == "auth.required"

    def test_idle_expiry_with_sliding_window(self, services, clock):
        token = services.register_user("alice", "secret1")["token"]
        clock.advance(23 * 3600)
        assert services.validate(token) == 1  # refreshes last_active
        clock.advance(23 * 3600)
        assert services.validate(token) == 1
        clock.advance(24 * 3600 + 1)
        with pytest.raises(ServiceFault) as err:
            services.validate(token)
        assert fault_code(err) == "auth.required"

    def test_password_never_stored_in_plaintext(self, services, tmp_path):
        password = "hunter2secretphrase"
        services.register_user("alice", password)
        services.login("alice", password)
        blobs = [p.read_bytes() for p in (tmp_path / "data").iterdir() if p.is_file()]
        assert blobs
        for blob in blobs:
            assert password.encode() not in blob

    def test_user_record_is_salted_hash(self, services):
        services.register_user("alice", "secret1")
        services.register_user("bob", "secret1")
        alice = services.store.get("users", "alice")
        bob = services.store.get("users", "bob")
        assert alice["salt"] != bob["salt"]
        assert alice["hash"] != bob["hash"]  # same password, different salt


class TestLayouts:
    def test_save_then_load_round_trip(self, services):
        token = services.register_user("alice", "secret1")["token"]
        assert services.save_component_states(token, STATES) is True
        assert services.load_component_states(token) == STATES

    def test_fresh_user_has_empty_layout(self, services):
        token = services.register_user("alice", "secret1")["token"]
        assert services.load_component_states(token) == []

    def test_empty_save_clears(self, services):
        token = services.register_user("alice", "secret1")["token"]
        services.save_component_states(token, STATES)
        services.save_component_states(token, [])
        assert services.load_component_states(token) == []

    def test_duplicate_z_order_rejected(self, services):
        token = services.register_user("alice", "secret1")["token"]
        twice = [dict(STATES[0]), dict(STATES[1], z_order=1)]
        with pytest.raises(ServiceFault) as err:
            services.save_component_states(token, twice)
        assert fault_code(err) == "gateway.bad_arguments"

    @pytest.mark.parametrize(
        "state",
        [
            "not a dict",
            {},
            dict(STATES[0], component_id=""),
            dict(STATES[0], x=-1),
            dict(STATES[0], y=True),
            dict(STATES[0], visible="yes"),
            dict(STATES[0], z_order=1.5),
            dict(STATES[0], props={"k": 3}),
            dict(STATES[0], extra="field"),
        ],
    )
    def test_malformed_state_rejected(self, services, state):
        token = services.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            services.save_component_states(token, [state])
        assert fault_code(err) == "gateway.bad_arguments"

    def test_too_many_states_rejected(self, services):
        token = services.register_user("alice", "secret1")["token"]
        many = [dict(STATES[0], component_id=f"c{i}", z_order=i) for i in range(257)]
        with pytest.raises(ServiceFault):
            services.save_component_states(token, many)

    def test_layout_survives_logout_login(self, services):
        token = services.register_user("alice", "secret1")["token"]
        services.save_component_states(token, STATES)
        services.logout(token)
        token = services.login("alice", "secret1")["token"]
        assert services.load_component_states(token) == STATES

    def test_layout_survives_restart(self, tmp_path, clock):
        services = AppServices(open_store(tmp_path / "data"), clock=clock)
        token = services.register_user("alice", "secret1")["token"]
        services.save_component_states(token, STATES)
        reopened = AppServices(open_store(tmp_path / "data"), clock=clock)
        token = reopened.login("alice", "secret1")["token"]
        assert reopened.load_component_states(token) == STATES

    def test_layouts_are_per_user(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        bob = services.register_user("bob", "secret2")["token"]
        services.save_component_states(alice, STATES)
        assert services.load_component_states(bob) == []


class TestSettings:
    GOOD = {"background_color": "#102030", "font_family": "serif", "font_size": 14,
            "theme": "dark"}

    def test_save_then_load(self, services):
        token = services.register_user("alice", "secret1")["token"]
        services.save_ui_settings(token, self.GOOD)
        assert services.load_ui_settings(token) == self.GOOD

    def test_fresh_load_returns_default(self, services):
        token = services.register_user("alice", "secret1")["token"]
        assert services.load_ui_settings(token) == DEFAULT_UI_SETTINGS

    @pytest.mark.parametrize(
        "settings",
        [
            dict(GOOD, background_color="#12XYZ0"),
            dict(GOOD, background_color="102030"),
            dict(GOOD, font_size=5),
            dict(GOOD, font_size=73),
            dict(GOOD, font_size=12.5),
            dict(GOOD, theme=7),
            {"background_color": "#102030"},
            "nope",
        ],
    )
    def test_invalid_settings_rejected(self, services, settings):
        token = services.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            services.save_ui_settings(token, settings)
        assert fault_code(err) == "gateway.bad_arguments"


class TestActionLog:
    def test_flow_is_logged_newest_first(self, services):
        token = services.register_user("alice", "secret1")["token"]
        services.logout(token)
        token = services.login("alice", "secret1")["token"]
        services.save_component_states(token, STATES)
        entries = services.get_action_log(token, 10)
        actions = [entry["action"] for entry in entries]
        assert actions == ["gui.saveStates", "auth.login", "auth.logout", "auth.register"]
        stamps = [entry["ts"] for entry in entries]
        assert stamps == sorted(stamps, reverse=True)

    def test_limit_one_returns_newest(self, services):
        token = services.register_user("alice", "secret1")["token"]
        services.save_component_states(token, [])
        entries = services.get_action_log(token, 1)
        assert [e["action"] for e in entries] == ["gui.saveStates"]

    def test_other_users_actions_invisible(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        bob = services.register_user("bob", "secret2")["token"]
        services.save_component_states(bob, STATES)
        actions = {e["action"] for e in services.get_action_log(alice, 100)}
        assert actions == {"auth.register"}

    @pytest.mark.parametrize("limit", [0, 501, -3, 2.5, True, "10"])
    def test_limit_out_of_range(self, services, limit):
        token = services.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            services.get_action_log(token, limit)
        assert fault_code(err) == "gateway.bad_arguments"

    def test_every_successful_call_appends_exactly_one(self, services):
        token = services.register_user("alice", "secret1")["token"]
        store = services.store
        calls = [
            lambda: services.save_component_states(token, STATES),
            lambda: services.load_component_states(token),
            lambda: services.save_ui_settings(token, TestSettings.GOOD),
            lambda: services.load_ui_settings(token),
            lambda: services.send_chat(token, "hello"),
            lambda: services.poll_chat(token, 0),
            lambda: services.search(token, "phrase", "anything"),
            lambda: services.get_action_log(token, 5),
        ]
        for call in calls:
            before = store.last_index("action_log")
            call()
            assert store.last_index("action_log") == before + 1

    def test_failed_auth_appends_nothing(self, services):
        services.register_user("alice", "secret1")
        store = services.store
        before = store.last_index("action_log")
        for call in [
            lambda: services.load_component_states("badtoken"),
            lambda: services.search("badtoken", "phrase", "x"),
            lambda: services.login("alice", "wrongpw"),
        ]:
            with pytest.raises(ServiceFault):
                call()
        assert store.last_index("action_log") == before

    def test_failed_validation_appends_nothing(self, services):
        token = services.register_user("alice", "secret1")["token"]
        before = services.store.last_index("action_log")
        with pytest.raises(ServiceFault):
            services.save_ui_settings(token, "garbage")
        assert services.store.last_index("action_log") == before


class TestChat:
    def test_first_message_is_seq_one(self, services):
        token = services.register_user("alice", "secret1")["token"]
        message = services.send_chat(token, "hello")
        assert message["seq"] == 1
        assert message["sender"] == "alice"
        assert message["text"] == "hello"

    def test_two_senders_get_consecutive_seqs(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        bob = services.register_user("bob", "secret2")["token"]
        first = services.send_chat(alice, "from alice")
        second = services.send_chat(bob, "from bob")
        assert (first["seq"], second["seq"]) == (1, 2)

    @pytest.mark.parametrize("text", ["", "x" * 1001, 42, None])
    def test_bad_text_rejected(self, services, text):
        token = services.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            services.send_chat(token, text)
        assert fault_code(err) == "gateway.bad_arguments"

    def test_exactly_once_with_cursor_discipline(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        bob = services.register_user("bob", "secret2")["token"]
        services.send_chat(alice, "one")
        services.send_chat(alice, "two")
        seen = []
        cursor = 0
        while True:
            batch = services.poll_chat(bob, cursor)
            if not batch:
                break
            seen.extend(batch)
            cursor = batch[-1]["seq"]
        assert [m["text"] for m in seen] == ["one", "two"]
        assert services.poll_chat(bob, cursor) == []

    def test_messages_before_login_never_delivered(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        services.send_chat(alice, "before bob existed")
        bob = services.register_user("bob", "secret2")["token"]
        assert services.poll_chat(bob, 0) == []
        services.send_chat(alice, "after")
        assert [m["text"] for m in services.poll_chat(bob, 0)] == ["after"]

    def test_relogin_moves_subscription_point(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        bob_first = services.register_user("bob", "secret2")["token"]
        services.send_chat(alice, "while bob logged in elsewhere")
        services.logout(bob_first)
        bob_second = services.login("bob", "secret2")["token"]
        assert services.poll_chat(bob_second, 0) == []

    def test_poll_capped_at_hundred(self, services):
        alice = services.register_user("alice", "secret1")["token"]
        bob = services.register_user("bob", "secret2")["token"]
        for i in range(150):
            services.send_chat(alice, f"m{i}")
        batch = services.poll_chat(bob, 0)
        assert len(batch) == 100
        rest = services.poll_chat(bob, batch[-1]["seq"])
        assert len(rest) == 50
        assert [m["seq"] for m in batch + rest] == list(range(1, 151))

    def test_bad_after_seq(self, services):
        token = services.register_user("alice", "secret1")["token"]
        for bad in [-1, 1.5, "0", None, True]:
            with pytest.raises(ServiceFault) as err:
                services.poll_chat(token, bad)
            assert fault_code(err) == "gateway.bad_arguments"

    def test_concurrent_sends_are_gap_free(self, services):
        tokens = [
            services.register_user(f"user{i}", "secret1")["token"] for i in range(4)
        ]
        seqs: list[int] = []
        lock = threading.Lock()

        def sender(token):
            for _ in range(25):
                seq = services.send_chat(token, "ping")["seq"]
                with lock:
                    seqs.append(seq)

        threads = [threading.Thread(target=sender, args=(t,)) for t in tokens]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(seqs) == list(range(1, 101))


class TestSearchGating:
    @pytest.fixture
    def seeded(self, tmp_path, clock):
        store = open_store(tmp_path / "data")
        ingest_seed(store, SEED_CSV)
        return AppServices(store, clock=clock)

    def test_bad_token_is_auth_required_even_with_bad_mode(self, seeded):
        with pytest.raises(ServiceFault) as err:
            seeded.search("nope", "xml", "q")
        assert fault_code(err) == "auth.required"

    def test_unknown_mode_rejected(self, seeded):
        token = seeded.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            seeded.search(token, "xml", "q")
        assert fault_code(err) == "gateway.bad_arguments"

    def test_empty_phrase_query_is_empty_result(self, seeded):
        token = seeded.register_user("alice", "secret1")["token"]
        result = seeded.search(token, "phrase", "")
        assert result["rows"] == [] and result["total"] == 0

    def test_sql_path_end_to_end(self, seeded):
        token = seeded.register_user("alice", "secret1")["token"]
        result = seeded.search(token, "sql", "SELECT name FROM records WHERE id = 1")
        assert result["rows"] == [["Gear box"]]
        assert result["interpreted"] == "SELECT name FROM records WHERE id = 1"

    def test_forbidden_statement(self, seeded):
        token = seeded.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            seeded.search(token, "sql", "DROP TABLE users")
        assert fault_code(err) == "query.forbidden"

    def test_parse_error_carries_query(self, seeded):
        token = seeded.register_user("alice", "secret1")["token"]
        with pytest.raises(ServiceFault) as err:
            seeded.search(token, "sql", "SELECT FROM")
        assert fault_code(err) == "query.parse_error"
        assert err.value.details == "SELECT FROM"

    def test_search_logged_with_query_text(self, seeded):
        token = seeded.register_user("alice", "secret1")["token"]
        seeded.search(token, "phrase", "gear box")
        newest = seeded.get_action_log(token, 1)[0]
        assert newest["action"] == "search.run"
        assert newest["detail"] == "gear box"
