import random
from time import perf_counter
from typing import Callable, Dict, List

import numpy as np
import structlog

from app.api.models import SUITES, SuiteReport
from app.involutions import (
    complete,
    involution_number,
    length_pf,
    length_via_arcs,
    length_via_rho_leq,
    maximum_element,
    minimum_element,
    rank_control,
    recurrence_split,
    reduce_support,
)
from app.labeling import MoveType, label_poset, verify_el_poset
from app.poset import (
    all_rank_subsets,
    build_poset,
    check_size,
    descent_set_counts,
    dual,
    mobius_bounds,
    rank_selected_check,
    structural_rank,
)
from app.qseries import (
    census_sizes,
    check_census,
    check_closed_form,
    check_double_factorial,
    check_gauss_identity,
    check_i_recurrence,
    check_p_evaluation,
    check_p_recurrence,
    check_skew_identity,
    orbit_count_poly,
    skew_count_poly,
)
from app.topology import Verdict, ball_certificate, check_pure, check_thin, reduced_euler
from app.utils.config_loader import CONFIG
from app.utils.exceptions import InvalidParameterError, PosetError, SizeGuardError

logger = structlog.get_logger(__name__)
perf_logger = structlog.get_logger("performance")


class VerificationService:
    """Runs the exhaustive verification suites and grades them."""

    def __init__(self, force: bool = False):
        self.force = force
        self.suites: Dict[str, Callable[[int], SuiteReport]] = {
            "grading": self.grading,
            "length": self.length,
            "el": self.el,
            "topology": self.topology,
            "qseries": self.qseries,
        }

    def run(self, n: int, suite: str = "all") -> List[SuiteReport]:
        if n < 1:
            raise InvalidParameterError(f"n must be at least 1, got {n}")
        names = SUITES if suite == "all" else [suite]
        unknown = [name for name in names if name not in self.suites]
        if unknown:
            raise InvalidParameterError(f"unknown suite '{unknown[0]}'; expected one of {SUITES + ['all']}")
        reports = []
        for name in names:
            start = perf_counter()
            try:
                report = self.suites[name](n)
            except PosetError as e:
                if isinstance(e, (InvalidParameterError, SizeGuardError)):
                    raise
                logger.error("Suite raised", suite=name, n=n, error=e.detail)
                report = SuiteReport(suite=name, n=n, passed=False, failures=[f"{type(e).__name__}: {e.detail}"])
            perf_logger.info("Suite finished", suite=name, n=n, passed=report.passed,
                             elapsed=round(perf_counter() - start, 4))
            reports.append(report)
        return reports

    @staticmethod
    def _report(suite: str, n: int, failures: List[str], details: Dict) -> SuiteReport:
        return SuiteReport(suite=suite, n=n, passed=not failures, failures=failures, details=details)

    def grading(self, n: int) -> SuiteReport:
        poset = build_poset(n, force=self.force)
        failures: List[str] = []
        size = len(poset)
        if size != involution_number(n):
            failures.append(f"|PF_{n}| = {size}, expected {involution_number(n)}")

        order = poset.order
        if np.any(order & order.T & ~np.eye(size, dtype=bool)):
            failures.append("antisymmetry violated")
        if n <= CONFIG['EXHAUSTIVE_AXIOM_MAX_N']:
            order_f = order.astype(np.float32)
            if np.any(((order_f @ order_f) > 0) & ~order):
                failures.append("transitivity violated")
            axiom_mode = "exhaustive"
        else:
            rng = random.Random(CONFIG['SAMPLE_SEED'])
            for _ in range(CONFIG['SAMPLE_TRIPLES']):
                a, b, c = (rng.randrange(size) for _ in range(3))
                if order[a, b] and order[b, c] and not order[a, c]:
                    failures.append(f"transitivity violated at {a}, {b}, {c}")
                    break
            axiom_mode = f"{CONFIG['SAMPLE_TRIPLES']} random triples"

        if poset.elements[poset.bottom] != minimum_element(n):
            failures.append(f"bottom is {poset.elements[poset.bottom].oneline()}")
        if poset.elements[poset.top] != maximum_element(n):
            failures.append(f"top is {poset.elements[poset.top].oneline()}")
        if not np.array_equal(structural_rank(poset), poset.rank):
            failures.append("structural rank differs from length")

        matrices = [rank_control(x) for x in poset.elements]
        if len({m.rows for m in matrices}) != size:
            failures.append("rank_control is not injective")
        malformed = [x.oneline() for x, m in zip(poset.elements, matrices) if not m.is_well_formed()]
        if malformed:
            failures.append(f"malformed rank-control matrices: {malformed[:5]}")
        diagonal_steps = {int(d) for m in matrices for d in np.diff(np.diagonal(m.padded()))}
        if not diagonal_steps <= {0, 2}:
            failures.append(f"diagonal rank steps {sorted(diagonal_steps)}")

        completions = {complete(x).w for x in poset.elements}
        if len(completions) != size:
            failures.append("completion is not injective")

        dual_mu = mobius_bounds(dual(poset))
        if dual_mu != mobius_bounds(poset):
            failures.append(f"μ on the dual is {dual_mu}, on PF_{n} {mobius_bounds(poset)}")

        return self._report("grading", n, failures, {
            "elements": size,
            "covers": len(poset.hasse),
            "max_rank": poset.max_rank,
            "axioms": axiom_mode,
        })

    def length(self, n: int) -> SuiteReport:
        poset = build_poset(n, force=self.force)
        failures: List[str] = []
        structural = structural_rank(poset)
        for i, x in enumerate(poset.elements):
            values = {length_pf(x), length_via_arcs(x), length_via_rho_leq(x), int(structural[i])}
            if len(values) != 1:
                failures.append(f"{x.oneline()}: lengths {sorted(values)}")
                continue
            ell = values.pop()
            reduction = reduce_support(x)
            if ell != sum(n - a for a in reduction.empty) + length_pf(reduction.reduced):
                failures.append(f"{x.oneline()}: support reduction does not split the length")
            split = recurrence_split(x)
            if ell != length_pf(split.rest) + split.shift:
                failures.append(f"{x.oneline()}: first-row split shifts by {ell - length_pf(split.rest)}")
        return self._report("length", n, failures[:50], {"elements": len(poset), "failed": len(failures)})

    def el(self, n: int) -> SuiteReport:
        check_size(n, self.force, limit=CONFIG['EL_VERIFY_MAX_N'])
        summary = verify_el_poset(n, force=True)
        poset = build_poset(n, force=True)
        labels = label_poset(poset)
        failures = [f"[{r.bottom}, {r.top}]: {r.increasing_chains} increasing chains, "
                    f"lex smallest {'ok' if r.lex_smallest_ok else 'violated'}" for r in summary.failures[:50]]

        c_labels = [lab.key for lab in labels.values() if lab.move is MoveType.C_MOVE]
        r_labels = [lab.key for lab in labels.values() if lab.move is not MoveType.C_MOVE]
        if c_labels and r_labels and max(c_labels) >= min(r_labels):
            failures.append("some c-label is not below every r-label")
        moves = {move.value: sum(1 for lab in labels.values() if lab.move is move) for move in MoveType}

        details = {"intervals": summary.intervals, "covers": summary.covers, "moves": moves}
        if 1 <= poset.max_rank and n <= CONFIG['RANK_SELECTED_MAX_N']:
            key = lambda edge: labels[edge].key
            histogram = descent_set_counts(poset, key)
            subsets = list(all_rank_subsets(poset))
            bad = [s for s in subsets if not rank_selected_check(poset, key, s, histogram)]
            failures.extend(f"rank-selected Möbius mismatch for S={list(s)}" for s in bad[:20])
            details["rank_selected_subsets"] = len(subsets)
        return self._report("el", n, failures, details)

    def topology(self, n: int) -> SuiteReport:
        check_size(n, self.force, limit=CONFIG['EL_VERIFY_MAX_N'])
        failures: List[str] = []
        if n < 3:
            poset = build_poset(n, force=True)
            expected = -1 if n == 2 else 1
            euler = reduced_euler(poset)
            if euler != expected:
                failures.append(f"μ(0̂, 1̂) = {euler}, expected {expected}")
            if not (check_pure(poset) and check_thin(poset)):
                failures.append(f"PF_{n} is not pure and thin")
            return self._report("topology", n, failures, {"euler_reduced": euler})
        certificate = ball_certificate(n, force=True)
        if certificate.verdict is not Verdict.BALL:
            failures.append(certificate.summary())
        if 3 not in certificate.interval_sizes:
            failures.append("no length-2 interval with three elements")
        return self._report("topology", n, failures, certificate.model_dump(mode="json"))

    def qseries(self, n: int) -> SuiteReport:
        failures: List[str] = []
        details: Dict = {}
        for k in range(n // 2 + 1):
            if not check_closed_form(n, k):
                failures.append(f"closed form differs at k={k}")
            if not check_skew_identity(n, k):
                failures.append(f"skew identity fails at k={k}")
            if orbit_count_poly(n, k) != skew_count_poly(n, k):
                failures.append(f"orbit count differs from the skew count at k={k}")
        for k in range(1, n // 2 + 1):
            if not check_double_factorial(k):
                failures.append(f"i(2k, k) != [2k-1]!! at k={k}")

        extended = []
        for m in range(1, n):
            for k in range((m + 1) // 2 + 1):
                holds = check_i_recurrence(m, k)
                if k >= 2 and not holds:
                    failures.append(f"i-recurrence fails at n={m}, k={k}")
                elif k < 2 and not holds:
                    extended.append(f"n={m}, k={k}")
            if not check_p_recurrence(m):
                failures.append(f"p-recurrence fails at n={m}")
        details["extended_recurrence_failures"] = extended
        if not check_p_evaluation(n):
            failures.append(f"p(n) at q=1, degree or leading coefficient wrong for n={n}")

        gauss_max = CONFIG['GAUSS_MAX_J']
        bad_gauss = [j for j in range(gauss_max + 1) if not check_gauss_identity(j)]
        failures.extend(f"Gaussian identity fails at j={j}" for j in bad_gauss)
        details["gauss_max_j"] = gauss_max

        census_checked = []
        for prime in CONFIG['census']['primes']:
            if n in census_sizes(prime):
                if not check_census(n, prime):
                    failures.append(f"census over F_{prime} disagrees with the formula")
                census_checked.append(prime)
        details["census_primes"] = census_checked
        return self._report("qseries", n, failures, details)
