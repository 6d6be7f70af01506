"""Phrase search and the safe SQL SELECT subset over the records table.

The SQL grammar is ``SELECT cols FROM table [WHERE pred] [LIMIT n]``:
keywords are case-insensitive, string literals are single-quoted with
``''`` as the escape, predicates are comparisons (``= != < <= > >=
LIKE``) combined with AND/OR and parentheses.  Anything that is not a
SELECT is refused outright; unknown tables or columns, syntax errors and
comparison type mismatches are parse errors carrying a 1-based character
position where one exists.

Phrase queries are tokenized (lowercase, split on non-alphanumerics) and
match records whose text fields contain every query token; ranking is by
the number of query-token occurrences in the record, ties by ascending
id.  An empty query matches nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Union

TABLES: dict[str, list[str]] = {
    "records": ["id", "name", "category", "description"],
}
COLUMN_TYPES: dict[str, dict[str, str]] = {
    "records": {"id": "int", "name": "text", "category": "text", "description": "text"},
}

_KEYWORDS = {"SELECT", "FROM", "WHERE", "LIMIT", "AND", "OR", "LIKE"}
_FORBIDDEN = {
    "INSERT", "UPDATE", "DELETE", "DROP", "CREATE", "ALTER", "TRUNCATE",
    "REPLACE", "MERGE", "GRANT", "REVOKE", "ATTACH", "DETACH", "VACUUM",
    "PRAGMA", "EXPLAIN", "WITH", "BEGIN", "COMMIT", "ROLLBACK", "SET",
    "USE", "CALL", "EXEC", "EXECUTE",
}
_OPS = ("<=", ">=", "!=", "=", "<", ">")
_MAX_PAREN_DEPTH = 64


class ParseError(Exception):
    """Query text the parser rejects; ``position`` is 1-based when known."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (position {position})"
        super().__init__(message)


class ForbiddenError(Exception):
    """A statement other than SELECT."""


@dataclass(frozen=True)
class Comparison:
    column: str
    op: str
    value: int | float | str


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


Predicate = Union[Comparison, And, Or]


@dataclass(frozen=True)
class SqlQuery:
    columns: tuple[str, ...] | str  # "*" or explicit projection
    table: str
    predicate: Predicate | None = None
    limit: int | None = None


@dataclass
class SearchResult:
    columns: list[str]
    rows: list[list[Any]]
    interpreted: str
    total: int = field(default=0)

    def __post_init__(self) -> None:
        self.total = len(self.rows)

    def to_value(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
            "interpreted": self.interpreted,
            "total": self.total,
        }


# -- phrase search ---------------------------------------------------------

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumerics; empties dropped."""
    return _TOKEN_RE.findall(text.lower())


def phrase_search(text: str, store) -> SearchResult:
    query_tokens = tokenize(text)
    interpreted = "phrase:" + " ".join(query_tokens)
    columns = list(TABLES["records"])
    if not query_tokens:
        return SearchResult(columns, [], interpreted)
    wanted = set(query_tokens)
    scored = []
    for row in store.records():
        row_tokens = tokenize(f"{row['name']} {row['category']} {row['description']}")
        if wanted <= set(row_tokens):
            score = sum(1 for token in row_tokens if token in wanted)
            scored.append((-score, row["id"], row))
    scored.sort(key=lambda item: item[:2])
    rows = [[row[c] for c in columns] for _, _, row in scored]
    return SearchResult(columns, rows, interpreted)


# -- SQL lexer ---------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # word | number | string | op | punct | end
    text: str
    value: Any
    pos: int  # 1-based character position


_DIGITS = set("0123456789")
_WORD_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_WORD_BODY = _WORD_START | _DIGITS


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        pos = i + 1
        if ch in _WORD_START:
            j = i + 1
            while j < n and text[j] in _WORD_BODY:
                j += 1
            word = text[i:j]
            tokens.append(_Token("word", word, word, pos))
            i = j
            continue
        if ch in _DIGITS or (ch == "-" and i + 1 < n and text[i + 1] in _DIGITS):
            j = i + 1
            is_float = False
            while j < n and text[j] in _DIGITS:
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1] in _DIGITS:
                is_float = True
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k] in _DIGITS:
                    is_float = True
                    j = k
                    while j < n and text[j] in _DIGITS:
                        j += 1
            value: Any = float(text[i:j]) if is_float else int(text[i:j])
            tokens.append(_Token("number", text[i:j], value, pos))
            i = j
            continue
        if ch == "'":
            j = i + 1
            parts: list[str] = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string literal", pos)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        parts.append("'")
                        j += 2
                        continue
                    j += 1
                    break
                parts.append(text[j])
                j += 1
            tokens.append(_Token("string", text[i:j], "".join(parts), pos))
            i = j
            continue
        two = text[i : i + 2]
        if two in _OPS:
            tokens.append(_Token("op", two, two, pos))
            i += 2
            continue
        if ch in _OPS:
            tokens.append(_Token("op", ch, ch, pos))
            i += 1
            continue
        if ch in "(),*;":
            tokens.append(_Token("punct", ch, ch, pos))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", None, n + 1))
    return tokens


# -- SQL parser --------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        token = self.tokens[self.i]
        self.i += 1
        return token

    def expect_keyword(self, word: str) -> None:
        token = self.take()
        if token.kind != "word" or token.text.upper() != word:
            raise ParseError(f"expected {word}", token.pos)

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token.kind == "word" and token.text.upper() == word

    def identifier(self, what: str) -> _Token:
        token = self.take()
        if token.kind != "word" or token.text.upper() in _KEYWORDS:
            raise ParseError(f"expected {what}", token.pos)
        return token

    def parse(self) -> SqlQuery:
        first = self.peek()
        if first.kind != "word":
            raise ParseError("expected SELECT", first.pos)
        head = first.text.upper()
        if head in _FORBIDDEN:
            raise ForbiddenError(f"{head} statements are not allowed")
        if head != "SELECT":
            raise ParseError("expected SELECT", first.pos)
        self.take()

        columns: tuple[str, ...] | str
        if self.peek().kind == "punct" and self.peek().text == "*":
            self.take()
            columns = "*"
        else:
            names = [self.identifier("column name")]
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.take()
                names.append(self.identifier("column name"))
            columns = tuple(token.text for token in names)
            column_tokens = names

        self.expect_keyword("FROM")
        table_token = self.identifier("table name")
        table = table_token.text
        if table not in TABLES:
            raise ParseError(f"unknown table '{table}'", table_token.pos)
        schema = set(TABLES[table])
        if columns != "*":
            for token in column_tokens:
                if token.text not in schema:
                    raise ParseError(f"unknown column '{token.text}'", token.pos)

        predicate = None
        if self.at_keyword("WHERE"):
            self.take()
            predicate = self.parse_or(schema, 0)

        limit = None
        if self.at_keyword("LIMIT"):
            self.take()
            token = self.take()
            if token.kind != "number" or not isinstance(token.value, int) or token.value < 0:
                raise ParseError("LIMIT wants a non-negative integer", token.pos)
            limit = token.value

        if self.peek().kind == "punct" and self.peek().text == ";":
            self.take()
        trailing = self.peek()
        if trailing.kind != "end":
            raise ParseError(f"unexpected {trailing.text!r} after statement", trailing.pos)
        return SqlQuery(columns=columns, table=table, predicate=predicate, limit=limit)

    def parse_or(self, schema: set[str], depth: int) -> Predicate:
        node = self.parse_and(schema, depth)
        while self.at_keyword("OR"):
            self.take()
            node = Or(node, self.parse_and(schema, depth))
        return node

    def parse_and(self, schema: set[str], depth: int) -> Predicate:
        node = self.parse_factor(schema, depth)
        while self.at_keyword("AND"):
            self.take()
            node = And(node, self.parse_factor(schema, depth))
        return node

    def parse_factor(self, schema: set[str], depth: int) -> Predicate:
        token = self.peek()
        if token.kind == "punct" and token.text == "(":
            if depth >= _MAX_PAREN_DEPTH:
                raise ParseError("predicate nesting too deep", token.pos)
            self.take()
            node = self.parse_or(schema, depth + 1)
            closing = self.take()
            if closing.kind != "punct" or closing.text != ")":
                raise ParseError("expected ')'", closing.pos)
            return node
        column_token = self.identifier("column name")
        if column_token.text not in schema:
            raise ParseError(f"unknown column '{column_token.text}'", column_token.pos)
        op_token = self.take()
        if op_token.kind == "op":
            op = op_token.text
        elif op_token.kind == "word" and op_token.text.upper() == "LIKE":
            op = "LIKE"
        else:
            raise ParseError("expected a comparison operator", op_token.pos)
        literal = self.take()
        if literal.kind not in ("number", "string"):
            raise ParseError("expected a literal", literal.pos)
        return Comparison(column_token.text, op, literal.value)


def parse_sql(text: str) -> SqlQuery:
    """Parse the SELECT subset; raises ParseError or ForbiddenError."""
    if len(text) > 64 * 1024:
        raise ParseError("query too long", 1)
    tokens = _lex(text)
    if tokens[0].kind == "end":
        raise ParseError("empty query", 1)
    return _Parser(tokens).parse()


# -- canonical rendering -----------------------------------------------------


def _render_literal(value: int | float | str) -> str:
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    return repr(value)


def _render_predicate(node: Predicate) -> str:
    if isinstance(node, Comparison):
        return f"{node.column} {node.op} {_render_literal(node.value)}"
    joiner = " AND " if isinstance(node, And) else " OR "
    return joiner.join(_wrap(part) for part in (node.left, node.right))


def _wrap(node: Predicate) -> str:
    rendered = _render_predicate(node)
    return rendered if isinstance(node, Comparison) else f"({rendered})"


def render_sql(ast: SqlQuery) -> str:
    """Canonical text of an AST; ``parse_sql(render_sql(a)) == a``."""
    cols = "*" if ast.columns == "*" else ", ".join(ast.columns)
    text = f"SELECT {cols} FROM {ast.table}"
    if ast.predicate is not None:
        text += f" WHERE {_render_predicate(ast.predicate)}"
    if ast.limit is not None:
        text += f" LIMIT {ast.limit}"
    return text


# -- executor ----------------------------------------------------------------


def _like_pattern(pattern: str) -> re.Pattern:
    parts = []
    for ch in pattern:
        if ch == "%":
            parts.append(".*")
        elif ch == "_":
            parts.append(".")
        else:
            parts.append(re.escape(ch))
    return re.compile("".join(parts), re.IGNORECASE | re.DOTALL)


def _check_types(node: Predicate, types: dict[str, str]) -> None:
    if isinstance(node, (And, Or)):
        _check_types(node.left, types)
        _check_types(node.right, types)
        return
    column_type = types[node.column]
    if node.op == "LIKE":
        if column_type != "text" or not isinstance(node.value, str):
            raise ParseError(f"LIKE needs a text column and pattern, got {node.column}")
        return
    if column_type == "int" and not isinstance(node.value, (int, float)):
        raise ParseError(f"column '{node.column}' is numeric, literal is not")
    if column_type == "text" and not isinstance(node.value, str):
        raise ParseError(f"column '{node.column}' is text, literal is not")


def _matches(node: Predicate, row: dict) -> bool:
    if isinstance(node, And):
        return _matches(node.left, row) and _matches(node.right, row)
    if isinstance(node, Or):
        return _matches(node.left, row) or _matches(node.right, row)
    cell = row[node.column]
    op = node.op
    if op == "LIKE":
        return _like_pattern(node.value).fullmatch(cell) is not None
    if op == "=":
        return cell == node.value
    if op == "!=":
        return cell != node.value
    if op == "<":
        return cell < node.value
    if op == "<=":
        return cell <= node.value
    if op == ">":
        return cell > node.value
    return cell >= node.value


def execute_sql(ast: SqlQuery, store) -> SearchResult:
    """Filter, project and limit over a read-only snapshot of the rows."""
    types = COLUMN_TYPES[ast.table]
    if ast.predicate is not None:
        _check_types(ast.predicate, types)
    columns = TABLES[ast.table] if ast.columns == "*" else list(ast.columns)
    selected = store.records()
    if ast.predicate is not None:
        selected = [row for row in selected if _matches(ast.predicate, row)]
    if ast.limit is not None:
        selected = selected[: ast.limit]
    rows = [[row[c] for c in columns] for row in selected]
    return SearchResult(list(columns), rows, render_sql(ast))
