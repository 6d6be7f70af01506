"""Shared test helpers: value equality and random value generation."""

from __future__ import annotations

import math
import random
import string

from hypothesis import strategies as st

from flexdesk.values import AmfDate, MixedArray, undefined


def values_equal(a: object, b: object) -> bool:
    """Deep structural equality where NaN compares equal to NaN."""
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, float) and isinstance(b, float):
        if math.isnan(a) and math.isnan(b):
            return True
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if isinstance(a, AmfDate) and isinstance(b, AmfDate):
        return values_equal(a.millis, b.millis)
    if isinstance(a, MixedArray) or isinstance(b, MixedArray):
        da, xa = _array_parts(a)
        db, xb = _array_parts(b)
        if da is None or db is None:
            return False
        return values_equal(da, db) and values_equal(xa, xb)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(values_equal(a[k], b[k]) for k in a)
    if type(a) is not type(b):
        return False
    return a == b


def _array_parts(v: object) -> tuple[list | None, dict | None]:
    if isinstance(v, MixedArray):
        return v.dense, v.assoc
    if isinstance(v, list):
        return v, {}
    return None, None


_KEY_CHARS = string.ascii_lowercase + string.digits + "_"
_TEXT_CHARS = string.printable[:70] + "éüß日本語‰"


def random_value(rng: random.Random, depth: int = 0, max_depth: int = 8) -> object:
    """One random wire value, nested at most ``max_depth`` containers deep."""
    scalar = depth >= max_depth
    kind = rng.randrange(9 if scalar else 12)
    if kind == 0:
        return None
    if kind == 1:
        return undefined
    if kind == 2:
        return rng.random() < 0.5
    if kind == 3:
        if rng.random() < 0.1:
            return rng.choice([2**53, -(2**53), 2**29, -(2**29)])
        return rng.randint(-(2**28), 2**28 - 1)
    if kind == 4:
        if rng.random() < 0.1:
            return rng.choice([float("inf"), float("-inf"), float("nan"), -0.0])
        return rng.uniform(-1e9, 1e9)
    if kind == 5:
        return "".join(rng.choice(_TEXT_CHARS) for _ in range(rng.randrange(12)))
    if kind == 6:
        return rng.randbytes(rng.randrange(16))
    if kind == 7:
        return AmfDate(float(rng.randint(-(2**40), 2**40)))
    if kind == 8:
        return "".join(rng.choice(_KEY_CHARS) for _ in range(1, 5))
    if kind == 9:
        return [random_value(rng, depth + 1, max_depth) for _ in range(rng.randrange(4))]
    if kind == 10:
        return {
            _random_key(rng): random_value(rng, depth + 1, max_depth)
            for _ in range(rng.randrange(4))
        }
    dense = [random_value(rng, depth + 1, max_depth) for _ in range(rng.randrange(3))]
    assoc = {
        _random_key(rng): random_value(rng, depth + 1, max_depth)
        for _ in range(1, rng.randrange(1, 4))
    }
    return MixedArray(dense, assoc)


def _random_key(rng: random.Random) -> str:
    return "".join(rng.choice(_KEY_CHARS) for _ in range(1, rng.randrange(2, 9)))


_keys = st.text(alphabet=_KEY_CHARS, min_size=1, max_size=8)

_scalars = st.one_of(
    st.none(),
    st.just(undefined),
    st.booleans(),
    st.integers(min_value=-(2**28), max_value=2**28 - 1),
    # wider ints travel as doubles; stay within the exactly-representable range
    st.integers(min_value=-(2**53), max_value=2**53 - 2**28).map(lambda n: n + 2**28),
    st.floats(allow_nan=True, allow_infinity=True),
    st.text(max_size=20),
    st.binary(max_size=20),
    st.floats(allow_nan=False, allow_infinity=False, width=32).map(AmfDate),
)


def amf_values(max_leaves: int = 20) -> st.SearchStrategy:
    """Hypothesis strategy over valid wire values, depth-bounded by leaves."""
    return st.recursive(
        _scalars,
        lambda children: st.one_of(
            st.lists(children, max_size=4),
            st.dictionaries(_keys, children, max_size=4),
            st.builds(
                MixedArray,
                st.lists(children, max_size=3),
                st.dictionaries(_keys, children, min_size=1, max_size=3),
            ),
        ),
        max_leaves=max_leaves,
    )
