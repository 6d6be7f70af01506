"""Closed catalog of machine-readable fault codes and the fault shape."""

from __future__ import annotations

FAULT_CODES = frozenset(
    {
        "gateway.no_such_target",
        "gateway.bad_arguments",
        "auth.required",
        "auth.invalid",
        "auth.duplicate_user",
        "query.parse_error",
        "query.forbidden",
        "store.not_found",
        "internal.error",
    }
)


class ServiceFault(Exception):
    """Raised by service operations; travels to clients on the onStatus path."""

    def __init__(self, code: str, message: str, details: str | None = None):
        assert code in FAULT_CODES, f"unknown fault code {code!r}"
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.details = details

    def to_value(self) -> dict:
        return make_fault(self.code, self.message, self.details)


def make_fault(code: str, message: str, details: str | None = None) -> dict:
    """The wire shape of a fault: exactly code/message/details."""
    assert code in FAULT_CODES, f"unknown fault code {code!r}"
    return {"code": code, "message": message, "details": details}


def bad_arguments(message: str, details: str | None = None) -> ServiceFault:
    return ServiceFault("gateway.bad_arguments", message, details)
