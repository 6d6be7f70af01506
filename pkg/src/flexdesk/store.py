"""Durable file-backed store: keyed snapshot tables plus append journals.

Keyed tables (``users``, ``layouts``, ``settings``, ``records``) live in
one ``<name>.tbl`` snapshot file each, one JSON ``[key, value]`` record
per line, rewritten whole via write-temp / fsync / rename so the on-disk
file is always either the previous or the next complete snapshot.
Stream tables (``action_log``, ``chat``) are append-only ``<name>.jnl``
journals of JSON ``[index, entry]`` lines, fsynced before the append is
acknowledged; indices are dense from 1.

A journal's trailing line may be partial after a crash (the write was
never acknowledged) and is dropped on open; corruption anywhere else is
a startup error naming the file.

``crash_hook`` is a test seam: when set, it is called with a label at
every durability boundary and may raise to simulate the process dying
there.
"""

from __future__ import annotations

import csv
import json
import os
import threading
from pathlib import Path
from typing import Any, Callable

KEYED_TABLES = ("users", "layouts", "settings", "records")
STREAM_TABLES = ("action_log", "chat")

RECORDS_HEADER = ["id", "name", "category", "description"]


class StoreError(Exception):
    pass


class StartupError(StoreError):
    """A snapshot or journal file could not be read back."""


class IngestError(StoreError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class Store:
    def __init__(self, data_dir: str | Path, crash_hook: Callable[[str], None] | None = None):
        self.data_dir = Path(data_dir)
        self.crash_hook = crash_hook
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._tables: dict[str, dict[str, Any]] = {t: {} for t in KEYED_TABLES}
        self._streams: dict[str, list[Any]] = {t: [] for t in STREAM_TABLES}
        self._locks = {t: threading.Lock() for t in KEYED_TABLES + STREAM_TABLES}
        for table in KEYED_TABLES:
            self._load_table(table)
        for table in STREAM_TABLES:
            self._load_journal(table)

    # -- startup ---------------------------------------------------------

    def _table_path(self, table: str) -> Path:
        return self.data_dir / f"{table}.tbl"

    def _journal_path(self, table: str) -> Path:
        return self.data_dir / f"{table}.jnl"

    def _load_table(self, table: str) -> None:
        path = self._table_path(table)
        if not path.exists():
            return
        rows = self._tables[table]
        for lineno, line in enumerate(path.read_bytes().split(b"\n"), start=1):
            if not line:
                continue
            try:
                key, value = json.loads(line)
            except (ValueError, TypeError):
                raise StartupError(f"corrupt snapshot {path} at line {lineno}") from None
            rows[key] = value

    def _load_journal(self, table: str) -> None:
        path = self._journal_path(table)
        if not path.exists():
            return
        entries = self._streams[table]
        lines = path.read_bytes().split(b"\n")
        # a missing final newline marks a torn, never-acknowledged append
        torn_tail = bool(lines and lines[-1])
        if not torn_tail:
            lines = lines[:-1]
        for lineno, line in enumerate(lines, start=1):
            last = lineno == len(lines)
            try:
                index, entry = json.loads(line)
            except (ValueError, TypeError):
                if last and torn_tail:
                    return
                raise StartupError(f"corrupt journal {path} at line {lineno}") from None
            if index != len(entries) + 1:
                raise StartupError(
                    f"corrupt journal {path} at line {lineno}: index {index} out of sequence"
                )
            entries.append(entry)

    # -- durability ------------------------------------------------------

    def _hook(self, label: str) -> None:
        if self.crash_hook is not None:
            self.crash_hook(label)

    def _write_snapshot(self, table: str) -> None:
        path = self._table_path(table)
        tmp = path.with_name(f".{table}.tbl.tmp")
        self._hook(f"{table}:snapshot:begin")
        payload = "".join(
            json.dumps([key, value], ensure_ascii=False) + "\n"
            for key, value in self._tables[table].items()
        )
        fd = os.open(tmp, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o644)
        try:
            os.write(fd, payload.encode("utf-8"))
            os.fsync(fd)
        finally:
            os.close(fd)
        self._hook(f"{table}:snapshot:pre_rename")
        os.replace(tmp, path)
        self._fsync_dir()
        self._hook(f"{table}:snapshot:post_rename")

    def _fsync_dir(self) -> None:
        fd = os.open(self.data_dir, os.O_RDONLY)
        try:
            os.fsync(fd)
        finally:
            os.close(fd)

    # -- keyed tables ----------------------------------------------------

    def put(self, table: str, key: str, value: Any) -> None:
        assert table in KEYED_TABLES, table
        with self._locks[table]:
            self._tables[table][key] = value
            self._write_snapshot(table)

    def get(self, table: str, key: str) -> Any | None:
        assert table in KEYED_TABLES, table
        with self._locks[table]:
            return self._tables[table].get(key)

    def items(self, table: str) -> list[tuple[str, Any]]:
        assert table in KEYED_TABLES, table
        with self._locks[table]:
            return list(self._tables[table].items())

    def replace_table(self, table: str, rows: dict[str, Any]) -> None:
        assert table in KEYED_TABLES, table
        with self._locks[table]:
            self._tables[table] = dict(rows)
            self._write_snapshot(table)

    # -- stream tables ---------------------------------------------------

    def append(self, table: str, entry: Any) -> int:
        assert table in STREAM_TABLES, table
        with self._locks[table]:
            index = len(self._streams[table]) + 1
            self._hook(f"{table}:append:begin")
            line = json.dumps([index, entry], ensure_ascii=False) + "\n"
            fd = os.open(self._journal_path(table), os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
            try:
                os.write(fd, line.encode("utf-8"))
                self._hook(f"{table}:append:pre_fsync")
                os.fsync(fd)
            finally:
                os.close(fd)
            self._streams[table].append(entry)
            self._hook(f"{table}:append:post_fsync")
            return index

    def scan(self, table: str, from_index: int = 0, limit: int | None = None) -> list[tuple[int, Any]]:
        """Entries with index > from_index, ascending, at most ``limit``."""
        assert table in STREAM_TABLES, table
        with self._locks[table]:
            entries = self._streams[table][max(from_index, 0):]
            if limit is not None:
                entries = entries[:limit]
            return [(from_index + i + 1, entry) for i, entry in enumerate(entries)]

    def last_index(self, table: str) -> int:
        assert table in STREAM_TABLES, table
        with self._locks[table]:
            return len(self._streams[table])

    # -- seed data -------------------------------------------------------

    def records(self) -> list[dict[str, Any]]:
        """The searchable rows, in ingestion order (a snapshot copy)."""
        with self._locks["records"]:
            return list(self._tables["records"].values())


def open_store(data_dir: str | Path, crash_hook: Callable[[str], None] | None = None) -> Store:
    return Store(data_dir, crash_hook=crash_hook)


def ingest_seed(store: Store, csv_path: str | Path) -> int:
    """Replace the records table from a seed CSV; returns the row count."""
    rows: dict[str, Any] = {}
    with open(csv_path, newline="", encoding="utf-8-sig") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty seed file: missing header", 1) from None
        if header != RECORDS_HEADER:
            raise IngestError(f"bad header {header!r}, want {RECORDS_HEADER!r}", 1)
        for row in reader:
            line = reader.line_num
            if len(row) != len(RECORDS_HEADER):
                raise IngestError(f"want {len(RECORDS_HEADER)} fields, got {len(row)}", line)
            try:
                record_id = int(row[0])
            except ValueError:
                raise IngestError(f"non-integer id {row[0]!r}", line) from None
            key = str(record_id)
            if key in rows:
                raise IngestError(f"duplicate id {record_id}", line)
            rows[key] = {
                "id": record_id,
                "name": row[1],
                "category": row[2],
                "description": row[3],
            }
    store.replace_table("records", rows)
    return len(rows)
