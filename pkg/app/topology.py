"""Order-complex statistics of PF_n and the ball certificate."""
from collections import Counter
from enum import Enum
from math import comb
from time import perf_counter
from typing import Dict, Iterator, List, Optional, Tuple

import structlog
from pydantic import BaseModel

from app.labeling import verify_el_poset
from app.poset import Poset, build_poset, check_size, mobius_bounds
from app.utils.config_loader import CONFIG
from app.utils.exceptions import InvalidParameterError, PosetError

logger = structlog.get_logger(__name__)
perf_logger = structlog.get_logger("performance")


class Verdict(str, Enum):
    BALL = "BALL"
    SPHERE = "SPHERE"
    INCONCLUSIVE = "INCONCLUSIVE"


class BallCertificate(BaseModel):
    n: int
    dim_complex: int
    pure: bool
    thin_ok: bool
    shellable: bool
    euler_reduced: int
    euler_face_count: Optional[int] = None
    interval_sizes: Dict[int, int]
    maximal_chains: int
    verdict: Verdict

    def summary(self) -> str:
        checks = (
            f"dim={self.dim_complex} pure={self.pure} thin={self.thin_ok} "
            f"shellable={self.shellable} euler={self.euler_reduced}"
        )
        if self.euler_face_count is not None:
            checks += f" euler_faces={self.euler_face_count}"
        return f"PF_{self.n}: {self.verdict.value} ({checks})"


def complex_dimension(n: int, poset: Optional[Poset] = None) -> int:
    """dim Δ(PF_n) = C(n, 2), checked against the top rank of the poset."""
    if n < 2:
        raise InvalidParameterError(f"complex_dimension needs n >= 2, got {n}")
    poset = poset or build_poset(n)
    if poset.max_rank != comb(n, 2):
        raise PosetError(f"PF_{n} has top rank {poset.max_rank}, expected {comb(n, 2)}")
    return comb(n, 2)


def count_maximal_chains(poset: Poset) -> int:
    paths = [0] * len(poset)
    paths[poset.bottom] = 1
    for z in poset.extension:
        for p in poset.parents[z]:
            paths[p] += paths[z]
    return paths[poset.top]


def maximal_chains(poset: Poset) -> Iterator[Tuple[int, ...]]:
    """Every saturated chain 0̂ ⋖ … ⋖ 1̂ as a tuple of element indices."""
    stack = [(poset.bottom,)]
    while stack:
        chain = stack.pop()
        last = chain[-1]
        if last == poset.top:
            yield chain
            continue
        for p in reversed(poset.parents[last]):
            stack.append(chain + (p,))


def check_pure(poset: Poset) -> bool:
    """All maximal chains have length equal to the top rank."""
    shortest = [None] * len(poset)
    longest = [None] * len(poset)
    shortest[poset.bottom] = longest[poset.bottom] = 0
    for z in poset.extension:
        if shortest[z] is None:
            continue
        for p in poset.parents[z]:
            shortest[p] = shortest[z] + 1 if shortest[p] is None else min(shortest[p], shortest[z] + 1)
            longest[p] = longest[z] + 1 if longest[p] is None else max(longest[p], longest[z] + 1)
    return shortest[poset.top] == longest[poset.top] == poset.max_rank


def interval_size_histogram(poset: Poset) -> Dict[int, int]:
    """Sizes of all length-2 intervals [x, z]."""
    length_two = poset.lt & ((poset.rank[None, :] - poset.rank[:, None]) == 2)
    sizes = poset.between[length_two] + 2
    return dict(sorted(Counter(int(s) for s in sizes).items()))


def check_thin(poset: Poset) -> bool:
    return all(size in (3, 4) for size in interval_size_histogram(poset))


def reduced_euler(poset: Poset) -> int:
    return mobius_bounds(poset)


def proper_chain_counts(poset: Poset) -> List[int]:
    """f-vector of Δ(proper part): entry k counts chains with k elements, k ≥ 0."""
    # ending[z][k]: chains 0̂ < x1 < … < xk = z
    ending: List[List[int]] = [[] for _ in range(len(poset))]
    ending[poset.bottom] = [1]
    for z in poset.extension:
        if z == poset.bottom:
            continue
        counts: List[int] = [0]
        for w in poset.lt[:, z].nonzero()[0]:
            for k, c in enumerate(ending[w]):
                if k + 1 >= len(counts):
                    counts.extend([0] * (k + 2 - len(counts)))
                counts[k + 1] += c
        ending[z] = counts
    # a chain 0̂ < x1 < … < xk = 1̂ carries k − 1 proper elements
    return [c for c in ending[poset.top][1:]]


def face_count_euler(poset: Poset) -> int:
    if poset.n > CONFIG['FACE_COUNT_MAX_N']:
        raise InvalidParameterError(
            f"face counts are limited to n <= {CONFIG['FACE_COUNT_MAX_N']}, got {poset.n}"
        )
    if poset.bottom == poset.top:
        raise InvalidParameterError("the one-element poset has no proper part")
    counts = proper_chain_counts(poset)
    # k proper elements span a face of dimension k − 1
    return sum((-1) ** (k + 1) * c for k, c in enumerate(counts))


def ball_certificate(n: int, force: bool = False) -> BallCertificate:
    if n < 3:
        raise InvalidParameterError(f"ball_certificate needs n >= 3, got {n}")
    check_size(n, force, limit=CONFIG['EL_VERIFY_MAX_N'])
    start = perf_counter()
    poset = build_poset(n, force=True)
    dim = complex_dimension(n, poset) - 2
    pure = check_pure(poset)
    sizes = interval_size_histogram(poset)
    thin = all(size in (3, 4) for size in sizes)
    shellable = verify_el_poset(n, force=True).passed
    euler = reduced_euler(poset)
    euler_faces = face_count_euler(poset) if n <= CONFIG['FACE_COUNT_MAX_N'] else None

    verdict = Verdict.INCONCLUSIVE
    consistent = euler_faces is None or euler_faces == euler
    if pure and thin and shellable and consistent:
        if euler == 0:
            verdict = Verdict.BALL
        elif euler == (-1) ** dim:
            verdict = Verdict.SPHERE

    certificate = BallCertificate(
        n=n,
        dim_complex=dim,
        pure=pure,
        thin_ok=thin,
        shellable=shellable,
        euler_reduced=euler,
        euler_face_count=euler_faces,
        interval_sizes=sizes,
        maximal_chains=count_maximal_chains(poset),
        verdict=verdict
    )
    perf_logger.info("Ball certificate assembled", n=n, verdict=verdict.value,
                     elapsed=round(perf_counter() - start, 4))
    return certificate
