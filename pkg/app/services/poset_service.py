import structlog
from typing import List, Optional

from app.api.models import (
    CompareResponse,
    CoverEdge,
    ElementsResponse,
    HasseResponse,
    IntervalResponse,
    MobiusResponse,
    PolyRow,
    PolysResponse,
    ZetaResponse,
)
from app.involutions import enumerate_arcs, enumerate_pf, parse_oneline
from app.labeling import increasing_chain, label_poset, verify_el_interval
from app.poset import build_poset, compare, interval, mobius
from app.qseries import (
    check_closed_form,
    check_i_recurrence,
    check_p_recurrence,
    formula_counts,
    i_poly_enum,
    p_poly,
    skew_rank_census,
)
from app.utils.exceptions import InvalidParameterError

logger = structlog.get_logger(__name__)

CHECKS = ("closed", "recurrence", "all")


class PosetService:
    def __init__(self, force: bool = False):
        self.force = force

    def enumerate(self, n: int, arcs: Optional[int] = None) -> ElementsResponse:
        """List PF_n, optionally restricted to elements with `arcs` arcs."""
        elements = enumerate_pf(n) if arcs is None else enumerate_arcs(n, arcs)
        logger.info("Enumerated elements", n=n, arcs=arcs, count=len(elements))
        return ElementsResponse(n=n, arcs=arcs, count=len(elements), elements=[list(x.w) for x in elements])

    def hasse(self, n: int, labels: bool = False, highlight: bool = False) -> HasseResponse:
        poset = build_poset(n, force=self.force)
        edges = []
        table = label_poset(poset) if labels or highlight else {}
        chain_edges = set()
        if highlight:
            chain = increasing_chain(poset, table, poset.elements[poset.bottom], poset.elements[poset.top])
            chain_edges = set(zip(chain, chain[1:]))
        for child, parent in poset.hasse:
            edge = CoverEdge(child=child, parent=parent)
            if labels:
                label = table[(child, parent)]
                edge.label = [label.a, label.b]
                edge.movetype = label.move.value
            if highlight:
                edge.highlight = (child, parent) in chain_edges
            edges.append(edge)
        logger.info("Hasse diagram exported", n=n, labels=labels, covers=len(edges))
        return HasseResponse(n=n, elements=[list(x.w) for x in poset.elements], covers=edges)

    def compare(self, n: int, x: str, y: str) -> CompareResponse:
        left, right = parse_oneline(x, n), parse_oneline(y, n)
        return CompareResponse(n=n, x=left.oneline(), y=right.oneline(), relation=compare(left, right))

    def interval(self, n: int, x: str, y: str, check_el: bool = False) -> IntervalResponse:
        poset = build_poset(n, force=self.force)
        bottom, top = parse_oneline(x, n), parse_oneline(y, n)
        span = interval(poset, bottom, top)
        report = None
        if check_el and span.bottom != span.top:
            report = verify_el_interval(poset, label_poset(poset), bottom, top)
        return IntervalResponse(
            n=n,
            bottom=bottom.oneline(),
            top=top.oneline(),
            length=span.length,
            size=len(span),
            members=[poset.elements[m].oneline() for m in span.members],
            el=report
        )

    def mobius(self, n: int, x: Optional[str] = None, y: Optional[str] = None) -> MobiusResponse:
        poset = build_poset(n, force=self.force)
        bottom = parse_oneline(x, n) if x else poset.elements[poset.bottom]
        top = parse_oneline(y, n) if y else poset.elements[poset.top]
        return MobiusResponse(n=n, bottom=bottom.oneline(), top=top.oneline(), mobius=mobius(poset, bottom, top))

    def polys(self, n: int, k: Optional[int] = None, check: Optional[str] = None) -> PolysResponse:
        if check is not None and check not in CHECKS:
            raise InvalidParameterError(f"check must be one of {list(CHECKS)}, got '{check}'")
        ks: List[int] = list(range(n // 2 + 1)) if k is None else [k]
        rows = []
        for arcs in ks:
            poly = i_poly_enum(n, arcs)
            rows.append(PolyRow(n=n, k=str(arcs), coefficients=poly.csv(), polynomial=str(poly)))
        if k is None:
            total = p_poly(n)
            rows.append(PolyRow(n=n, k="*", coefficients=total.csv(), polynomial=str(total)))

        checks = {}
        if check in ("closed", "all"):
            checks["closed"] = all(check_closed_form(n, arcs) for arcs in ks)
        if check in ("recurrence", "all"):
            if n < 2:
                raise InvalidParameterError(f"the recurrences are checked from n >= 2, got {n}")
            # i(n, k) from i(n−1, ·) and i(n−2, ·)
            checks["i_recurrence"] = all(check_i_recurrence(n - 1, arcs) for arcs in ks)
            checks["p_recurrence"] = check_p_recurrence(n - 1)
        return PolysResponse(n=n, rows=rows, checks=checks)

    def zeta(self, n: int, q: int, oracle: bool = False) -> ZetaResponse:
        if q < 2:
            raise InvalidParameterError(f"q must be at least 2, got {q}")
        formula = formula_counts(n, q)
        response = ZetaResponse(n=n, q=q, formula=formula, total=sum(formula.values()))
        if oracle:
            counts = skew_rank_census(n, q, force=self.force)
            response.counts = counts
            response.agrees = counts == {rank: c for rank, c in formula.items() if c}
        return response
