"""The Bruhat order on PF_n.

x ≤ y iff Rk(y) ≤ Rk(x) entrywise. The order is stored as a dense boolean
matrix indexed by the canonical enumeration; the Hasse diagram is its
transitive reduction.
"""
from dataclasses import dataclass
from itertools import combinations
from threading import Lock
from time import perf_counter
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from cachetools import cached, TTLCache

from app.involutions import (
    PartialInvolution,
    enumerate_pf,
    involution_number,
    length_pf,
    rank_control_array,
)
from app.utils.config_loader import CONFIG
from app.utils.exceptions import (
    InvalidElementError,
    InvalidParameterError,
    NotComparableError,
    PosetError,
    SizeGuardError,
)

logger = structlog.get_logger(__name__)
perf_logger = structlog.get_logger("performance")

Edge = Tuple[int, int]


class Poset:
    """A finite bounded poset on a list of elements.

    ``order[i, j]`` is True iff elements[i] ≤ elements[j]; ``hasse`` lists the
    cover edges (child, parent) in row-major order.
    """

    def __init__(self, n: int, elements: Sequence[PartialInvolution], order: np.ndarray, rank: Sequence[int]):
        self.n = n
        self.elements = list(elements)
        self.index = {x.w: i for i, x in enumerate(self.elements)}
        self.order = order
        self.rank = np.asarray(rank, dtype=np.int64)

        size = len(self.elements)
        self.lt = order & ~np.eye(size, dtype=bool)
        lt_f = self.lt.astype(np.float32)
        # between[i, j] = #{k : i < k < j}
        self.between = np.rint(lt_f @ lt_f).astype(np.int64)
        self.hasse_mask = self.lt & (self.between == 0)
        self.hasse: List[Edge] = [(int(c), int(p)) for c, p in np.argwhere(self.hasse_mask)]
        self.parents = [np.flatnonzero(row).tolist() for row in self.hasse_mask]
        self.children = [np.flatnonzero(col).tolist() for col in self.hasse_mask.T]
        # down-set sizes strictly increase along the order
        self.extension = np.argsort(order.sum(axis=0), kind="stable").tolist()

        bottoms = np.flatnonzero(order.all(axis=1))
        tops = np.flatnonzero(order.all(axis=0))
        if len(bottoms) != 1 or len(tops) != 1:
            raise PosetError(f"PF_{n} order is not bounded: {len(bottoms)} minima, {len(tops)} maxima")
        self.bottom = int(bottoms[0])
        self.top = int(tops[0])

        self._mobius_rows: Dict[int, np.ndarray] = {}
        self._labels = None
        self._lock = Lock()

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def max_rank(self) -> int:
        return int(self.rank[self.top])

    def idx(self, x: PartialInvolution) -> int:
        try:
            return self.index[x.w]
        except KeyError:
            raise InvalidElementError(f"{x.oneline()} is not an element of PF_{self.n}")

    def leq(self, i: int, j: int) -> bool:
        return bool(self.order[i, j])

    def mobius_row(self, i: int) -> np.ndarray:
        """μ(elements[i], z) for every z, zero off the up-set of i."""
        with self._lock:
            row = self._mobius_rows.get(i)
        if row is not None:
            return row
        row = np.zeros(len(self), dtype=np.int64)
        row[i] = 1
        above = self.order[i]
        for z in self.extension:
            if z != i and above[z]:
                row[z] = -row[self.lt[:, z]].sum()
        with self._lock:
            self._mobius_rows.setdefault(i, row)
        return row


@dataclass(frozen=True)
class Interval:
    poset: Poset
    bottom: int
    top: int
    members: Tuple[int, ...]

    @property
    def length(self) -> int:
        return int(self.poset.rank[self.top] - self.poset.rank[self.bottom])

    def __len__(self) -> int:
        return len(self.members)


def leq(x: PartialInvolution, y: PartialInvolution) -> bool:
    if x.n != y.n:
        raise InvalidParameterError(f"cannot compare elements of PF_{x.n} and PF_{y.n}")
    return bool(np.all(rank_control_array(y.w) <= rank_control_array(x.w)))


def compare(x: PartialInvolution, y: PartialInvolution) -> str:
    below, above = leq(x, y), leq(y, x)
    if below and above:
        return "="
    if below:
        return "<"
    if above:
        return ">"
    return "incomparable"


def order_matrix(elements: Sequence[PartialInvolution]) -> np.ndarray:
    keys = np.stack([rank_control_array(x.w).ravel() for x in elements])
    order = np.empty((len(elements), len(elements)), dtype=bool)
    for i, key in enumerate(keys):
        # elements[i] ≤ elements[j] iff Rk_j ≤ Rk_i
        order[i] = np.all(keys <= key, axis=1)
    return order


def check_size(n: int, force: bool = False, limit: Optional[int] = None) -> None:
    limit = CONFIG['MAX_POSET_N'] if limit is None else limit
    if n < 0:
        raise InvalidParameterError(f"n must be nonnegative, got {n}")
    if n > limit and not force:
        size = involution_number(n)
        raise SizeGuardError(
            f"PF_{n} has {size} elements; poset operations are limited to n <= {limit} (use --force)"
        )


def memory_estimate(n: int) -> int:
    """Approximate bytes for the order matrix and its float32 square."""
    size = involution_number(n)
    return size * size * (1 + 4 + 4 + 8)


@cached(cache=TTLCache(maxsize=CONFIG['CACHE_MAXSIZE'], ttl=CONFIG['CACHE_TTL']), lock=Lock())
def _construct(n: int) -> Poset:
    start = perf_counter()
    elements = enumerate_pf(n)
    order = order_matrix(elements)
    rank = [length_pf(x) for x in elements]
    poset = Poset(n, elements, order, rank)

    graded = poset.lt & ((poset.rank[None, :] - poset.rank[:, None]) == 1)
    if not np.array_equal(graded, poset.hasse_mask):
        mismatches = int((graded ^ poset.hasse_mask).sum())
        logger.error("Length shortcut disagrees with transitive reduction", n=n, mismatches=mismatches)
        raise PosetError(f"PF_{n}: {mismatches} pairs where ℓ-difference 1 and covering disagree")

    perf_logger.info(
        "Poset built",
        n=n,
        elements=len(poset),
        covers=len(poset.hasse),
        elapsed=round(perf_counter() - start, 4)
    )
    return poset


def build_poset(n: int, force: bool = False) -> Poset:
    check_size(n, force)
    return _construct(n)


def dual(poset: Poset) -> Poset:
    top_rank = poset.max_rank
    return Poset(poset.n, poset.elements, poset.order.T.copy(), [top_rank - r for r in poset.rank])


def structural_rank(poset: Poset) -> np.ndarray:
    """Ranks read off the Hasse diagram alone (longest chain from the bottom)."""
    rank = np.zeros(len(poset), dtype=np.int64)
    for z in poset.extension:
        below = poset.children[z]
        if below:
            rank[z] = max(rank[w] for w in below) + 1
    return rank


def covers(poset: Poset, x: PartialInvolution) -> List[PartialInvolution]:
    return [poset.elements[p] for p in poset.parents[poset.idx(x)]]


def cocovers(poset: Poset, x: PartialInvolution) -> List[PartialInvolution]:
    return [poset.elements[c] for c in poset.children[poset.idx(x)]]


def interval(poset: Poset, x: PartialInvolution, y: PartialInvolution) -> Interval:
    i, j = poset.idx(x), poset.idx(y)
    if not poset.order[i, j]:
        raise NotComparableError(f"{x.oneline()} is not below {y.oneline()} in PF_{poset.n}")
    members = np.flatnonzero(poset.order[i] & poset.order[:, j])
    return Interval(poset=poset, bottom=i, top=j, members=tuple(int(m) for m in members))


def mobius(poset: Poset, x: PartialInvolution, y: PartialInvolution) -> int:
    i, j = poset.idx(x), poset.idx(y)
    if not poset.order[i, j]:
        raise NotComparableError(f"μ({x.oneline()}, {y.oneline()}) requires x ≤ y")
    return int(poset.mobius_row(i)[j])


def mobius_bounds(poset: Poset) -> int:
    return int(poset.mobius_row(poset.bottom)[poset.top])


def rank_selected_mobius(poset: Poset, ranks: Iterable[int]) -> int:
    """μ(0̂, 1̂) of the subposet on the selected ranks with both bounds adjoined."""
    selected = set(ranks)
    keep = np.array([
        z == poset.bottom or z == poset.top or int(poset.rank[z]) in selected
        for z in range(len(poset))
    ])
    mu = np.zeros(len(poset), dtype=np.int64)
    mu[poset.bottom] = 1
    for z in poset.extension:
        if z != poset.bottom and keep[z]:
            mu[z] = -mu[poset.lt[:, z] & keep].sum()
    return int(mu[poset.top])


def descent_set_counts(poset: Poset, label_key: Callable[[Edge], tuple]) -> Dict[int, int]:
    """Number of maximal chains per descent set, keyed by bitmask over ranks.

    Bit r is set when the step ending at rank r carries a label strictly
    greater than the next step's label.
    """
    states: List[Dict[Tuple[Optional[tuple], int], int]] = [dict() for _ in range(len(poset))]
    states[poset.bottom][(None, 0)] = 1
    for z in poset.extension:
        here = states[z]
        if not here:
            continue
        bit = 1 << int(poset.rank[z])
        for p in poset.parents[z]:
            label = label_key((z, p))
            there = states[p]
            for (last, mask), count in here.items():
                # strict: consecutive labels along a cover chain never tie for n <= 6
                new_mask = mask | bit if last is not None and last > label else mask
                there[(label, new_mask)] = there.get((label, new_mask), 0) + count
    histogram: Dict[int, int] = {}
    for (_, mask), count in states[poset.top].items():
        histogram[mask] = histogram.get(mask, 0) + count
    return histogram


def rank_selected_check(poset: Poset, label_key: Callable[[Edge], tuple], ranks: Iterable[int],
                        histogram: Optional[Dict[int, int]] = None) -> bool:
    """(−1)^{|S|−1} μ_S(0̂, 1̂) equals the number of maximal chains with descent set S."""
    selected = sorted(set(ranks))
    if any(not 1 <= r < poset.max_rank for r in selected):
        raise InvalidParameterError(f"ranks must lie in 1..{poset.max_rank - 1}, got {selected}")
    if histogram is None:
        histogram = descent_set_counts(poset, label_key)
    mask = sum(1 << r for r in selected)
    sign = -1 if (len(selected) - 1) % 2 else 1
    return sign * rank_selected_mobius(poset, selected) == histogram.get(mask, 0)


def all_rank_subsets(poset: Poset):
    inner = range(1, poset.max_rank)
    for size in range(len(inner) + 1):
        yield from combinations(inner, size)


def cached_sizes() -> List[int]:
    """Sizes n whose poset is currently held in the build cache."""
    return sorted(key[0] for key in list(_construct.cache.keys()))
