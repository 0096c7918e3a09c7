"""Partial fixed-point-free involutions in one-line notation.

An element of PF_n is stored as the tuple ``w`` with ``w[i-1] = j`` when the
matrix has a 1 at (i, j) and ``w[i-1] = 0`` when row i is empty. Elements are
enumerated in lexicographic order of ``w``; n = 0 yields the single empty
element.
"""
from threading import Lock
from typing import Dict, List, Optional, Tuple

import numpy as np
import orjson
import structlog
from cachetools import cached, LRUCache
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.utils.config_loader import CONFIG
from app.utils.exceptions import InvalidElementError, InvalidParameterError, SizeGuardError

logger = structlog.get_logger(__name__)


class Arc(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _ordered(self):
        if self.i >= self.j:
            raise ValueError(f"arc ({self.i},{self.j}) must satisfy i < j")
        return self

    def as_tuple(self) -> Tuple[int, int]:
        return (self.i, self.j)


class PartialInvolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    w: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_involution(self):
        if len(self.w) != self.n:
            raise ValueError(f"expected {self.n} entries, got {len(self.w)}")
        for i, j in enumerate(self.w, start=1):
            if not 0 <= j <= self.n:
                raise ValueError(f"entry {j} at position {i} is outside 0..{self.n}")
            if j == i:
                raise ValueError(f"fixed point at position {i}")
            if j and self.w[j - 1] != i:
                raise ValueError(f"not symmetric: w[{i}]={j} but w[{j}]={self.w[j - 1]}")
        return self

    @classmethod
    def of(cls, w) -> "PartialInvolution":
        """Build from a sequence, raising InvalidElementError on bad input."""
        w = tuple(w)
        try:
            return cls(n=len(w), w=w)
        except ValidationError as e:
            message = "; ".join(err["msg"] for err in e.errors())
            logger.warning("Invalid partial involution", w=list(w), error=message)
            raise InvalidElementError(f"{format_tuple(w)} is not a partial fixed-point-free involution: {message}")

    @property
    def rank(self) -> int:
        return sum(1 for j in self.w if j)

    @property
    def arcs(self) -> List[Arc]:
        return [Arc(i=i, j=j) for i, j in enumerate(self.w, start=1) if i < j]

    @property
    def empty_rows(self) -> Tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.w, start=1) if j == 0)

    def oneline(self) -> str:
        return format_tuple(self.w)


class Involution(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    w: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_involution(self):
        if len(self.w) != self.n:
            raise ValueError(f"expected {self.n} entries, got {len(self.w)}")
        for i, j in enumerate(self.w, start=1):
            if not 1 <= j <= self.n:
                raise ValueError(f"entry {j} at position {i} is outside 1..{self.n}")
            if self.w[j - 1] != i:
                raise ValueError(f"w[w[{i}]] != {i}")
        return self

    def fixed_points(self) -> Tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.w, start=1) if i == j)


class RankControlMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    rows: Tuple[Tuple[int, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int16).reshape(self.n, self.n)

    def padded(self) -> np.ndarray:
        """The (n+1)x(n+1) matrix with the virtual zero row and column."""
        out = np.zeros((self.n + 1, self.n + 1), dtype=np.int16)
        out[1:, 1:] = self.as_array()
        return out

    def is_well_formed(self) -> bool:
        r = self.padded()
        steps_down = np.diff(r, axis=0)
        steps_right = np.diff(r, axis=1)
        idx = np.arange(self.n + 1)
        return bool(
            np.all(r >= 0)
            and np.all(r <= np.minimum.outer(idx, idx))
            and np.isin(steps_down, (0, 1)).all()
            and np.isin(steps_right, (0, 1)).all()
            and np.array_equal(r, r.T)
        )


class SupportReduction(BaseModel):
    model_config = ConfigDict(frozen=True)

    empty: Tuple[int, ...]
    reduced: PartialInvolution


class RecurrenceSplit(BaseModel):
    """First-row decomposition of an element.

    ``partner`` is x(1), 0 when row 1 is empty. ``rest`` is the element left
    after deleting row/column 1 (and the partner's row/column), and ``shift``
    is ℓ(x) − ℓ(rest).
    """
    model_config = ConfigDict(frozen=True)

    partner: int
    rest: PartialInvolution
    shift: int


def format_tuple(w) -> str:
    return ",".join(str(v) for v in w)


def format_oneline(x: PartialInvolution) -> str:
    return x.oneline()


def parse_oneline(text: str, n: Optional[int] = None) -> PartialInvolution:
    """Parse ``"2,1,0,0"`` or the JSON array ``[2,1,0,0]``."""
    text = text.strip()
    try:
        if text.startswith("["):
            values = orjson.loads(text)
            # JSON true/false would pass an int check
            if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in values):
                raise ValueError("expected a JSON array of integers")
        else:
            values = [int(part) for part in text.split(",")] if text else []
    except (ValueError, orjson.JSONDecodeError) as e:
        raise InvalidElementError(f"cannot parse '{text}' as one-line notation: {e}")
    if n is not None and len(values) != n:
        raise InvalidElementError(f"'{text}' has {len(values)} entries, expected n={n}")
    return PartialInvolution.of(values)


def _check_enum_size(n: int) -> None:
    if n < 0:
        raise InvalidParameterError(f"n must be nonnegative, got {n}")
    if n > CONFIG['MAX_ENUM_N']:
        raise SizeGuardError(f"enumeration of PF_{n} exceeds MAX_ENUM_N={CONFIG['MAX_ENUM_N']}")


def _matchings(free: Tuple[int, ...]):
    # partial matchings on the sorted index tuple `free`, as partner dicts
    if not free:
        yield {}
        return
    first, rest = free[0], free[1:]
    for partial in _matchings(rest):
        yield partial
    for pos, partner in enumerate(rest):
        remaining = rest[:pos] + rest[pos + 1:]
        for partial in _matchings(remaining):
            yield {**partial, first: partner, partner: first}


@cached(cache=LRUCache(maxsize=CONFIG['CACHE_MAXSIZE']), lock=Lock())
def _enumerate_tuples(n: int) -> Tuple[Tuple[int, ...], ...]:
    words = [tuple(m.get(i, 0) for i in range(1, n + 1)) for m in _matchings(tuple(range(1, n + 1)))]
    return tuple(sorted(words))


def enumerate_pf(n: int) -> List[PartialInvolution]:
    """Every element of PF_n, lexicographic on one-line notation."""
    _check_enum_size(n)
    return [PartialInvolution(n=n, w=w) for w in _enumerate_tuples(n)]


def enumerate_arcs(n: int, k: int) -> List[PartialInvolution]:
    """Elements of PF_n with exactly k arcs; empty when k > n // 2."""
    _check_enum_size(n)
    if k < 0:
        raise InvalidParameterError(f"arc count must be nonnegative, got {k}")
    if 2 * k > n:
        return []
    return [PartialInvolution(n=n, w=w) for w in _enumerate_tuples(n) if sum(1 for j in w if j) == 2 * k]


def involution_number(n: int) -> int:
    """|I_n| = |PF_n| by a(n) = a(n-1) + (n-1) a(n-2)."""
    if n < 0:
        raise InvalidParameterError(f"n must be nonnegative, got {n}")
    prev, cur = 1, 1
    for m in range(2, n + 1):
        prev, cur = cur, cur + (m - 1) * prev
    return cur


def complete(x: PartialInvolution) -> Involution:
    return Involution(n=x.n, w=tuple(j if j else i for i, j in enumerate(x.w, start=1)))


def uncomplete(v: Involution) -> PartialInvolution:
    return PartialInvolution(n=v.n, w=tuple(0 if j == i else j for i, j in enumerate(v.w, start=1)))


def _pattern(w: Tuple[int, ...]) -> np.ndarray:
    n = len(w)
    m = np.zeros((n, n), dtype=np.int16)
    rows = [i for i, j in enumerate(w) if j]
    m[rows, [w[i] - 1 for i in rows]] = 1
    return m


def rank_control_array(w: Tuple[int, ...]) -> np.ndarray:
    """r[i,j] = rank of the upper-left i x j block, padded with row/column 0."""
    n = len(w)
    out = np.zeros((n + 1, n + 1), dtype=np.int16)
    out[1:, 1:] = _pattern(w).cumsum(axis=0).cumsum(axis=1)
    return out


def rank_control(x: PartialInvolution) -> RankControlMatrix:
    r = rank_control_array(x.w)[1:, 1:]
    return RankControlMatrix(n=x.n, rows=tuple(tuple(int(v) for v in row) for row in r))


def _diagonal_matches(w: Tuple[int, ...]) -> np.ndarray:
    r = rank_control_array(w)
    return r[1:, 1:] == r[:-1, :-1]


def rho_lt(x: PartialInvolution) -> int:
    return int(np.triu(_diagonal_matches(x.w), k=1).sum())


def rho_leq(x: PartialInvolution) -> int:
    return int(np.triu(_diagonal_matches(x.w)).sum())


def length_pf(x: PartialInvolution) -> int:
    return rho_lt(x)


def length_via_rho_leq(x: PartialInvolution) -> int:
    return rho_leq(x) - (2 * x.n - x.rank) // 2


def standard_form(v: Involution) -> List[Arc]:
    return [Arc(i=i, j=j) for i, j in enumerate(v.w, start=1) if i < j]


def length_via_arcs(x: PartialInvolution) -> int:
    v = complete(x)
    word = [e for arc in standard_form(v) for e in arc.as_tuple()]
    inversions = sum(1 for a in range(len(word)) for b in range(a + 1, len(word)) if word[a] > word[b])
    return inversions + sum(x.n - a for a in v.fixed_points())


def minimum_element(n: int) -> PartialInvolution:
    w = [0] * n
    for i in range(1, n - n % 2, 2):
        w[i - 1], w[i] = i + 1, i
    return PartialInvolution(n=n, w=tuple(w))


def maximum_element(n: int) -> PartialInvolution:
    return PartialInvolution(n=n, w=(0,) * n)


def _restrict(w: Tuple[int, ...], keep: List[int]) -> PartialInvolution:
    relabel: Dict[int, int] = {old: new for new, old in enumerate(keep, start=1)}
    return PartialInvolution(n=len(keep), w=tuple(relabel.get(w[old - 1], 0) for old in keep))


def reduce_support(x: PartialInvolution) -> SupportReduction:
    """Split x into its empty rows and the full-rank element on its support.

    ℓ(x) = Σ_{a empty} (n − a) + ℓ(reduced).
    """
    support = [i for i, j in enumerate(x.w, start=1) if j]
    return SupportReduction(empty=x.empty_rows, reduced=_restrict(x.w, support))


def recurrence_split(x: PartialInvolution) -> RecurrenceSplit:
    if x.n == 0:
        raise InvalidParameterError("the empty element has no first row")
    partner = x.w[0]
    if partner == 0:
        rest = _restrict(x.w, list(range(2, x.n + 1)))
        return RecurrenceSplit(partner=0, rest=rest, shift=x.n - 1)
    rest = _restrict(x.w, [i for i in range(2, x.n + 1) if i != partner])
    return RecurrenceSplit(partner=partner, rest=rest, shift=partner - 2)
