"""Exact q-polynomials, the length generating functions of PF_n, and the
finite-field point counts of alternating matrices."""
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from math import comb
from threading import Lock
from time import perf_counter
from typing import Dict, Iterable, List, Sequence, Union

import structlog
from cachetools import cached, LRUCache
from sympy import GF, Matrix, Poly, Symbol, ZZ
from sympy.polys.matrices import DomainMatrix

from app.involutions import enumerate_pf, involution_number, length_pf
from app.utils.config_loader import CONFIG
from app.utils.exceptions import InexactDivisionError, InvalidParameterError, SizeGuardError

logger = structlog.get_logger(__name__)
perf_logger = structlog.get_logger("performance")

q = Symbol("q")

executor = ThreadPoolExecutor(max_workers=CONFIG['MAX_WORKERS'])


class QPoly:
    """Integer polynomial in q; coefficients are listed from q^0 upward."""

    __slots__ = ("_poly",)

    def __init__(self, coefficients: Union[Sequence[int], Poly] = ()):
        if isinstance(coefficients, Poly):
            self._poly = coefficients
        else:
            high_to_low = [int(c) for c in reversed(list(coefficients))] or [0]
            self._poly = Poly.from_list(high_to_low, q, domain=ZZ)

    @classmethod
    def from_counts(cls, exponents: Dict[int, int]) -> "QPoly":
        if not exponents:
            return cls()
        coefficients = [0] * (max(exponents) + 1)
        for e, c in exponents.items():
            coefficients[e] += c
        return cls(coefficients)

    @property
    def coefficients(self) -> tuple:
        if self._poly.is_zero:
            return ()
        return tuple(int(c) for c in reversed(self._poly.all_coeffs()))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def _coerce(self, other) -> "QPoly":
        if isinstance(other, QPoly):
            return other
        if isinstance(other, int):
            return QPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly(self._poly + other._poly)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly(self._poly - other._poly)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QPoly(self._poly * other._poly)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QPoly":
        return QPoly(self._poly ** exponent)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def exact_div(self, other: "QPoly") -> "QPoly":
        quotient, remainder = self._poly.div(other._poly, auto=False)
        if not remainder.is_zero:
            raise InexactDivisionError(f"{self} is not divisible by {other}")
        return QPoly(quotient)

    def evaluate(self, value: int) -> int:
        return sum(c * value ** e for e, c in enumerate(self.coefficients))

    def csv(self) -> str:
        return ",".join(str(c) for c in self.coefficients) or "0"

    def __str__(self) -> str:
        terms = []
        for e, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if e == 0:
                term = str(c)
            else:
                power = "q" if e == 1 else f"q^{e}"
                term = power if c == 1 else f"-{power}" if c == -1 else f"{c}{power}"
            if terms and not term.startswith("-"):
                term = "+" + term
            terms.append(term)
        return "".join(terms) or "0"

    def __repr__(self) -> str:
        return f"QPoly({str(self)})"


ZERO = QPoly()
ONE = QPoly([1])


def q_power(e: int) -> QPoly:
    if e < 0:
        raise InvalidParameterError(f"negative exponent {e}")
    return QPoly([0] * e + [1])


def q_bracket(n: int) -> QPoly:
    """[n]_q = 1 + q + … + q^{n-1}."""
    if n < 0:
        raise InvalidParameterError(f"[n]_q needs n >= 0, got {n}")
    return QPoly([1] * n)


def q_factorial(n: int) -> QPoly:
    result = ONE
    for m in range(1, n + 1):
        result = result * q_bracket(m)
    return result


def q_binomial(n: int, k: int) -> QPoly:
    if k < 0 or k > n:
        return ZERO
    return q_factorial(n).exact_div(q_factorial(k) * q_factorial(n - k))


def q_odd_double_factorial(k: int) -> QPoly:
    """[2k−1]_q!! = [1]_q [3]_q ⋯ [2k−1]_q."""
    result = ONE
    for i in range(1, k + 1):
        result = result * q_bracket(2 * i - 1)
    return result


@cached(cache=LRUCache(maxsize=CONFIG['CACHE_MAXSIZE']), lock=Lock())
def _length_counts(n: int) -> Dict[int, Counter]:
    """Arc count → Counter of lengths over PF_n."""
    counts: Dict[int, Counter] = {}
    for x in enumerate_pf(n):
        counts.setdefault(x.rank // 2, Counter())[length_pf(x)] += 1
    return counts


def i_poly_enum(n: int, k: int) -> QPoly:
    """Σ q^ℓ(x) over elements with k arcs; zero when k < 0 or 2k > n."""
    if k < 0 or 2 * k > n:
        return ZERO
    return QPoly.from_counts(dict(_length_counts(n).get(k, {})))


def i_poly_closed(n: int, k: int) -> QPoly:
    if k < 0 or 2 * k > n:
        return ZERO
    return q_power(comb(n - 2 * k, 2)) * q_binomial(n, 2 * k) * q_odd_double_factorial(k)


def check_closed_form(n: int, k: int) -> bool:
    return i_poly_enum(n, k) == i_poly_closed(n, k)


def check_double_factorial(k: int) -> bool:
    return i_poly_enum(2 * k, k) == q_odd_double_factorial(k)


def check_i_recurrence(n: int, k: int) -> bool:
    """i(n+1, k) = q^n i(n, k) + [n]_q i(n−1, k−1), with i(m, −1) = 0."""
    if n < 1:
        raise InvalidParameterError(f"the recurrence needs n >= 1, got {n}")
    lhs = i_poly_enum(n + 1, k)
    rhs = q_power(n) * i_poly_enum(n, k) + q_bracket(n) * i_poly_enum(n - 1, k - 1)
    return lhs == rhs


def p_poly(n: int) -> QPoly:
    result = ZERO
    for k in range(n // 2 + 1):
        result = result + i_poly_enum(n, k)
    return result


def check_p_recurrence(n: int) -> bool:
    """p(n+1) = q^n p(n) + [n]_q p(n−1)."""
    if n < 1:
        raise InvalidParameterError(f"the recurrence needs n >= 1, got {n}")
    return p_poly(n + 1) == q_power(n) * p_poly(n) + q_bracket(n) * p_poly(n - 1)


def check_p_evaluation(n: int) -> bool:
    poly = p_poly(n)
    return (
        poly.evaluate(1) == involution_number(n)
        and poly.degree == comb(n, 2)
        and poly.coefficients[-1] == 1
    )


def gauss_product(j: int) -> List[QPoly]:
    """∏_{i<j} (1 + x q^i) as the list of its x-coefficients."""
    coefficients = [ONE]
    for i in range(j):
        shifted = q_power(i)
        coefficients = [
            (coefficients[k] if k < len(coefficients) else ZERO)
            + (shifted * coefficients[k - 1] if k >= 1 else ZERO)
            for k in range(len(coefficients) + 1)
        ]
    return coefficients


def gauss_sum(j: int) -> List[QPoly]:
    return [q_power(comb(k, 2)) * q_binomial(j, k) for k in range(j + 1)]


def check_gauss_identity(j: int) -> bool:
    if j < 0:
        raise InvalidParameterError(f"j must be nonnegative, got {j}")
    return gauss_product(j) == gauss_sum(j)


def skew_count_poly(n: int, k: int) -> QPoly:
    """Number of rank-2k alternating n x n matrices over F_q."""
    if k < 0 or 2 * k > n:
        raise InvalidParameterError(f"need 0 <= 2k <= n, got n={n}, k={k}")
    q_minus_one = QPoly([-1, 1])
    return (q_power(2 * comb(k, 2)) * q_minus_one ** k
            * q_binomial(n, 2 * k) * q_odd_double_factorial(k))


def check_skew_identity(n: int, k: int) -> bool:
    """q^{C(n−2k,2)} |Skew| = i(n, k) q^{2 C(k,2)} (q − 1)^k."""
    q_minus_one = QPoly([-1, 1])
    lhs = q_power(comb(n - 2 * k, 2)) * skew_count_poly(n, k)
    rhs = i_poly_enum(n, k) * q_power(2 * comb(k, 2)) * q_minus_one ** k
    return lhs == rhs


def _gl_order(m: int) -> QPoly:
    result = ONE
    for i in range(m):
        result = result * (q_power(m) - q_power(i))
    return result


def _sp_order(k: int) -> QPoly:
    result = q_power(k * k)
    for i in range(1, k + 1):
        result = result * (q_power(2 * i) - ONE)
    return result


def orbit_count_poly(n: int, k: int) -> QPoly:
    """|GL_n| / |stabiliser of a rank-2k alternating form|, by exact division."""
    if k < 0 or 2 * k > n:
        raise InvalidParameterError(f"need 0 <= 2k <= n, got n={n}, k={k}")
    stabiliser = _gl_order(n - 2 * k) * _sp_order(k) * q_power(2 * k * (n - 2 * k))
    return _gl_order(n).exact_div(stabiliser)


def _census_limit(q_value: int) -> int:
    census = CONFIG['census']
    if q_value not in census['primes']:
        raise InvalidParameterError(f"census supports q in {census['primes']}, got {q_value}")
    return census['max_n'][str(q_value)]


def _rank_mod(entries: Sequence[int], n: int, q_value: int) -> int:
    rows = [[0] * n for _ in range(n)]
    pos = 0
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = entries[pos]
            rows[j][i] = (-entries[pos]) % q_value
            pos += 1
    return DomainMatrix.from_Matrix(Matrix(rows)).convert_to(GF(q_value)).rank()


def _census_block(n: int, q_value: int, first: int) -> Counter:
    tally: Counter = Counter()
    for rest in product(range(q_value), repeat=comb(n, 2) - 1):
        tally[_rank_mod((first,) + rest, n, q_value)] += 1
    return tally


def skew_rank_census(n: int, q_value: int, force: bool = False) -> Dict[int, int]:
    """Exhaustive rank tally of alternating n x n matrices over F_q."""
    limit = _census_limit(q_value)
    if n < 0:
        raise InvalidParameterError(f"n must be nonnegative, got {n}")
    if n > limit and not force:
        raise SizeGuardError(
            f"census over F_{q_value} enumerates {q_value}^{comb(n, 2)} matrices; limited to n <= {limit}"
        )
    start = perf_counter()
    if n < 2:
        counts = Counter({0: 1})
    else:
        blocks = executor.map(lambda first: _census_block(n, q_value, first), range(q_value))
        counts = sum(blocks, Counter())
    perf_logger.info("Census finished", n=n, q=q_value, matrices=sum(counts.values()),
                     elapsed=round(perf_counter() - start, 4))
    return dict(sorted(counts.items()))


def formula_counts(n: int, q_value: int) -> Dict[int, int]:
    return {2 * k: skew_count_poly(n, k).evaluate(q_value) for k in range(n // 2 + 1)}


def check_census(n: int, q_value: int, force: bool = False) -> bool:
    census = skew_rank_census(n, q_value, force=force)
    expected = formula_counts(n, q_value)
    agrees = all(census.get(rank, 0) == count for rank, count in expected.items())
    return agrees and set(census) <= set(expected) and sum(census.values()) == q_value ** comb(n, 2)


def census_sizes(q_value: int) -> Iterable[int]:
    return range(1, _census_limit(q_value) + 1)
