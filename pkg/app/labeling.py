"""Cover classification and the EL-labeling of PF_n.

Labels are derived by diffing the two endpoints of a Hasse edge. Moves that
keep the support rearrange two arcs on four indices (c-moves, labelled by the
rise of the covering transformation on the completions); moves that change
the support either slide one arc endpoint or remove one arc (r-moves).
"""
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from time import perf_counter
from typing import Dict, List, Optional, Tuple

import structlog
from pydantic import BaseModel, ConfigDict

from app.involutions import Involution, PartialInvolution, complete
from app.poset import Edge, Poset, build_poset, check_size
from app.utils.config_loader import CONFIG
from app.utils.exceptions import CoverClassificationError, InvalidMoveError, NotComparableError

logger = structlog.get_logger(__name__)
perf_logger = structlog.get_logger("performance")

executor = ThreadPoolExecutor(max_workers=CONFIG['MAX_WORKERS'])


class MoveType(str, Enum):
    C_MOVE = "c"
    R_SLIDE = "rs"
    R_REMOVAL = "rr"


class CoverLabel(BaseModel):
    """An element of the label alphabet, compared lexicographically on (a, b)."""
    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    move: MoveType

    @property
    def key(self) -> Tuple[int, int]:
        return (self.a, self.b)

    def __lt__(self, other: "CoverLabel") -> bool:
        return self.key < other.key

    def __le__(self, other: "CoverLabel") -> bool:
        return self.key <= other.key

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


class ElIntervalReport(BaseModel):
    bottom: str
    top: str
    increasing_chains: int
    lex_smallest_ok: bool

    @property
    def passed(self) -> bool:
        return self.increasing_chains == 1 and self.lex_smallest_ok


class ElSummary(BaseModel):
    n: int
    intervals: int
    covers: int
    passed: bool
    failures: List[ElIntervalReport]


def _arc_set(w: Tuple[int, ...]) -> set:
    return {(i, j) for i, j in enumerate(w, start=1) if i < j}


def ct_noncrossing_ee(v: Involution, i1: int, i2: int) -> Involution:
    w = v.w
    if not (1 <= i1 < i2 <= v.n and i2 < w[i1 - 1] < w[i2 - 1]):
        raise InvalidMoveError(f"({i1},{i2}) is not an ee-rise of {w}")
    a, b = w[i1 - 1], w[i2 - 1]
    out = list(w)
    out[i1 - 1], out[b - 1] = b, i1
    out[i2 - 1], out[a - 1] = a, i2
    return Involution(n=v.n, w=tuple(out))


def ct_ed(v: Involution, i1: int, i2: int) -> Involution:
    w = v.w
    if not (1 <= i1 < i2 <= v.n):
        raise InvalidMoveError(f"({i1},{i2}) is not a pair of positions of {w}")
    a, b = w[i1 - 1], w[i2 - 1]
    if not (a > i1 and b < i2 and a < b):
        raise InvalidMoveError(f"({i1},{i2}) is not an ed-rise of {w}")
    out = list(w)
    out[i1 - 1], out[b - 1] = b, i1
    out[a - 1], out[i2 - 1] = i2, a
    return Involution(n=v.n, w=tuple(out))


def _is_ee(w, i1, i2) -> bool:
    return i2 < w[i1 - 1] < w[i2 - 1]


def _is_ed(w, i1, i2) -> bool:
    a, b = w[i1 - 1], w[i2 - 1]
    return a > i1 and b < i2 and a < b


def find_rise(y_hat: Involution, x_hat: Involution) -> Tuple[int, int]:
    """The unique rise (i1, i2) whose covering transformation maps y_hat to x_hat."""
    w = y_hat.w
    matches = []
    for i1 in range(1, y_hat.n + 1):
        for i2 in range(i1 + 1, y_hat.n + 1):
            if _is_ee(w, i1, i2) and ct_noncrossing_ee(y_hat, i1, i2) == x_hat:
                matches.append((i1, i2))
            elif _is_ed(w, i1, i2) and ct_ed(y_hat, i1, i2) == x_hat:
                matches.append((i1, i2))
    if len(matches) != 1:
        raise CoverClassificationError(
            f"expected one rise taking {w} to {x_hat.w}, found {len(matches)}: {matches}"
        )
    return matches[0]


def _slide(y: PartialInvolution, x: PartialInvolution):
    lost = _arc_set(y.w) - _arc_set(x.w)
    gained = _arc_set(x.w) - _arc_set(y.w)
    if len(lost) != 1 or len(gained) != 1:
        return None
    (a, b), (c, d) = lost.pop(), gained.pop()
    return (a, b), (c, d)


def classify_cover(y: PartialInvolution, x: PartialInvolution) -> MoveType:
    """Move type of the cover y ⋖ x."""
    if x.rank == y.rank - 2:
        if _arc_set(x.w) < _arc_set(y.w):
            return MoveType.R_REMOVAL
    elif x.rank == y.rank:
        if x.empty_rows == y.empty_rows:
            changed = [i for i in range(1, y.n + 1) if y.w[i - 1] != x.w[i - 1]]
            if x.w != y.w and len(changed) <= 4:
                return MoveType.C_MOVE
        else:
            slide = _slide(y, x)
            if slide is not None:
                (a, b), (c, d) = slide
                if b == d or a == c:
                    return MoveType.R_SLIDE
                if a == d or b == c:
                    raise CoverClassificationError(
                        f"arc ({a},{b}) of {y.oneline()} slides across the diagonal to ({c},{d})"
                    )
    logger.error("Unclassifiable cover", child=y.oneline(), parent=x.oneline())
    raise CoverClassificationError(f"{y.oneline()} -> {x.oneline()} matches no move pattern")


def label_cover(y: PartialInvolution, x: PartialInvolution) -> CoverLabel:
    n = y.n
    move = classify_cover(y, x)
    if move is MoveType.C_MOVE:
        i1, i2 = find_rise(complete(y), complete(x))
        return CoverLabel(a=n - i1, b=n - i2, move=move)
    if move is MoveType.R_REMOVAL:
        (a, b), = _arc_set(y.w) - _arc_set(x.w)
        return CoverLabel(a=b + n, b=n + 1, move=move)
    (a, b), (c, d) = _slide(y, x)
    if b == d:
        # minimum endpoint a moved to c
        return CoverLabel(a=b + n, b=c, move=move)
    return CoverLabel(a=a + n, b=d, move=move)


def label_poset(poset: Poset) -> Dict[Edge, CoverLabel]:
    """Labels of every Hasse edge, memoised on the poset."""
    if poset._labels is None:
        elements = poset.elements
        labels = {(c, p): label_cover(elements[c], elements[p]) for c, p in poset.hasse}
        with poset._lock:
            if poset._labels is None:
                poset._labels = labels
    return poset._labels


def _lex_tables(poset: Poset, labels: Dict[Edge, CoverLabel], bottom: int):
    """Per element z above bottom: the lexicographically least label sequence of
    saturated chains bottom → z, its last step, and the number of weakly
    increasing such chains."""
    above = poset.order[bottom]
    best: Dict[int, Tuple[Tuple[int, int], ...]] = {bottom: ()}
    pred: Dict[int, int] = {}
    rising: Dict[int, Dict[Optional[Tuple[int, int]], int]] = {bottom: {None: 1}}
    for z in poset.extension:
        if z == bottom or not above[z]:
            continue
        best_seq, best_pred = None, None
        counts: Dict[Optional[Tuple[int, int]], int] = {}
        for w in poset.children[z]:
            if w not in best:
                continue
            key = labels[(w, z)].key
            seq = best[w] + (key,)
            if best_seq is None or seq < best_seq:
                best_seq, best_pred = seq, w
            for last, count in rising[w].items():
                if last is None or last <= key:
                    counts[key] = counts.get(key, 0) + count
        best[z], pred[z], rising[z] = best_seq, best_pred, counts
    return best, pred, rising


def _is_weakly_increasing(seq) -> bool:
    return all(a <= b for a, b in zip(seq, seq[1:]))


def _reports_from(poset: Poset, labels: Dict[Edge, CoverLabel], bottom: int) -> List[ElIntervalReport]:
    best, _, rising = _lex_tables(poset, labels, bottom)
    reports = []
    for top in sorted(best):
        if top == bottom:
            continue
        increasing = sum(rising[top].values())
        reports.append(ElIntervalReport(
            bottom=poset.elements[bottom].oneline(),
            top=poset.elements[top].oneline(),
            increasing_chains=increasing,
            lex_smallest_ok=_is_weakly_increasing(best[top])
        ))
    return reports


def verify_el_interval(poset: Poset, labels: Dict[Edge, CoverLabel],
                       x: PartialInvolution, y: PartialInvolution) -> ElIntervalReport:
    i, j = poset.idx(x), poset.idx(y)
    if i == j or not poset.order[i, j]:
        raise NotComparableError(f"[{x.oneline()}, {y.oneline()}] is not an interval of length >= 1")
    best, _, rising = _lex_tables(poset, labels, i)
    return ElIntervalReport(
        bottom=x.oneline(),
        top=y.oneline(),
        increasing_chains=sum(rising[j].values()),
        lex_smallest_ok=_is_weakly_increasing(best[j])
    )


def increasing_chain(poset: Poset, labels: Dict[Edge, CoverLabel],
                     x: PartialInvolution, y: PartialInvolution) -> List[int]:
    """Indices along the lexicographically least saturated chain x → y."""
    i, j = poset.idx(x), poset.idx(y)
    if not poset.order[i, j]:
        raise NotComparableError(f"{x.oneline()} is not below {y.oneline()}")
    _, pred, _ = _lex_tables(poset, labels, i)
    chain = [j]
    while chain[-1] != i:
        chain.append(pred[chain[-1]])
    return chain[::-1]


def verify_el_poset(n: int, force: bool = False) -> ElSummary:
    check_size(n, force, limit=CONFIG['EL_VERIFY_MAX_N'])
    start = perf_counter()
    poset = build_poset(n, force=True)
    labels = label_poset(poset)
    bottoms = list(range(len(poset)))
    if len(poset) > CONFIG['PARALLEL_THRESHOLD']:
        batches = list(executor.map(lambda b: _reports_from(poset, labels, b), bottoms))
    else:
        batches = [_reports_from(poset, labels, b) for b in bottoms]
    reports = [r for batch in batches for r in batch]
    failures = [r for r in reports if not r.passed]
    perf_logger.info(
        "EL verification finished",
        n=n,
        intervals=len(reports),
        failures=len(failures),
        elapsed=round(perf_counter() - start, 4)
    )
    if failures:
        logger.warning("EL verification failed", n=n, failures=len(failures))
    return ElSummary(n=n, intervals=len(reports), covers=len(labels), passed=not failures, failures=failures)
