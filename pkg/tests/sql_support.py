"""Independent SQL oracle and random AST generator.

``oracle_execute`` interprets a query AST over raw CSV rows with its own
comparison and LIKE logic (dynamic-programming matcher, no regex), so
executor bugs cannot hide in shared code.  ``random_ast`` generates
type-correct ASTs over the records schema.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

from flexdesk.search import And, Comparison, Or, SqlQuery

SEED_CSV = Path(__file__).parent / "data" / "records_seed.csv"

COLUMNS = ["id", "name", "category", "description"]


def load_seed_rows(path: Path = SEED_CSV) -> list[dict]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        return [
            {
                "id": int(row["id"]),
                "name": row["name"],
                "category": row["category"],
                "description": row["description"],
            }
            for row in reader
        ]


def like_match(pattern: str, text: str) -> bool:
    """Case-insensitive SQL LIKE via dynamic programming (no regex)."""
    p = pattern.lower()
    t = text.lower()
    # reachable[j] = pattern[:j] can consume the text processed so far
    reachable = [True] + [False] * len(p)
    for j in range(1, len(p) + 1):
        reachable[j] = reachable[j - 1] and p[j - 1] == "%"
    for ch in t:
        nxt = [False] * (len(p) + 1)
        for j in range(1, len(p) + 1):
            pc = p[j - 1]
            if pc == "%":
                nxt[j] = nxt[j - 1] or reachable[j]
            elif pc == "_" or pc == ch:
                nxt[j] = reachable[j - 1]
        reachable = nxt
    return reachable[len(p)]


def _holds(node, row: dict) -> bool:
    if isinstance(node, And):
        return _holds(node.left, row) and _holds(node.right, row)
    if isinstance(node, Or):
        return _holds(node.left, row) or _holds(node.right, row)
    assert isinstance(node, Comparison)
    cell = row[node.column]
    if node.op == "LIKE":
        return like_match(node.value, cell)
    if node.op == "=":
        return cell == node.value
    if node.op == "!=":
        return cell != node.value
    if node.op == "<":
        return cell < node.value
    if node.op == "<=":
        return cell <= node.value
    if node.op == ">":
        return cell > node.value
    if node.op == ">=":
        return cell >= node.value
    raise AssertionError(node.op)


def oracle_execute(ast: SqlQuery, rows: list[dict]) -> tuple[list[str], list[list]]:
    """Interpret every row naively; returns (columns, projected rows)."""
    kept = [row for row in rows if ast.predicate is None or _holds(ast.predicate, row)]
    if ast.limit is not None:
        kept = kept[: ast.limit]
    columns = COLUMNS if ast.columns == "*" else list(ast.columns)
    return list(columns), [[row[c] for c in columns] for row in kept]


_WORDS = ["gear", "box", "bearing", "panel", "steel", "nylon", "drive",
          "tool", "Compact", "spacer", "8mm", "it's"]
_PATTERNS = ["%box%", "ge%", "%5mm%", "%ing", "_ear%", "%a_e%", "%", "box", "%'%"]
_TEXT_COLUMNS = ["name", "category", "description"]
_NUM_OPS = ["=", "!=", "<", "<=", ">", ">="]
_TEXT_OPS = _NUM_OPS + ["LIKE"]


def random_comparison(rng: random.Random) -> Comparison:
    if rng.random() < 0.4:
        value = rng.randint(-5, 130) if rng.random() < 0.8 else rng.uniform(0, 125)
        return Comparison("id", rng.choice(_NUM_OPS), value)
    column = rng.choice(_TEXT_COLUMNS)
    op = rng.choice(_TEXT_OPS)
    if op == "LIKE":
        return Comparison(column, op, rng.choice(_PATTERNS))
    return Comparison(column, op, rng.choice(_WORDS))


def random_predicate(rng: random.Random, depth: int = 0):
    if depth >= 3 or rng.random() < 0.5:
        return random_comparison(rng)
    combiner = And if rng.random() < 0.5 else Or
    return combiner(random_predicate(rng, depth + 1), random_predicate(rng, depth + 1))


def random_ast(rng: random.Random) -> SqlQuery:
    if rng.random() < 0.3:
        columns: tuple[str, ...] | str = "*"
    else:
        count = rng.randint(1, len(COLUMNS))
        columns = tuple(rng.sample(COLUMNS, count))
    predicate = random_predicate(rng) if rng.random() < 0.8 else None
    limit = rng.choice([None, None, 0, 1, 3, 10, 200])
    return SqlQuery(columns=columns, table="records", predicate=predicate, limit=limit)
