import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from itertools import combinations
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .core_algebra import (
    Exponent,
    MvPoly,
    Scalar,
    format_rational,
    grlex_key,
    mv_product,
    to_rational,
)
from .errors import (
    NonHomogeneous,
    NonSymmetricInput,
    ReductionDidNotTerminate,
    WeightMismatch,
)

logger = logging.getLogger(__name__)


@total_ordering
@dataclass(frozen=True)
class Partition:
    """Integer partition with non-increasing positive parts.

    Sorting puts heavier partitions last and, within one weight, follows
    reverse lexicographic order: [3] < [2, 1] < [1, 1, 1].
    """

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"Partition parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"Partition parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> "Partition":
        """Sort arbitrary non-negative parts and drop zeros"""
        parts = list(parts)
        if any(p < 0 for p in parts):
            raise ValueError(f"Negative part in {parts}")
        return cls(tuple(sorted((p for p in parts if p), reverse=True)))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __lt__(self, other: "Partition") -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        if self.weight != other.weight:
            return self.weight < other.weight
        return self.parts > other.parts

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(
            sum(1 for p in self.parts if p >= k) for k in range(1, self.parts[0] + 1)
        ))

    def label(self) -> str:
        """Chern monomial such as c1^2·c6, indices ascending"""
        if not self.parts:
            return "1"
        counts: Dict[int, int] = {}
        for p in self.parts:
            counts[p] = counts.get(p, 0) + 1
        return "·".join(
            f"c{k}" if m == 1 else f"c{k}^{m}" for k, m in sorted(counts.items())
        )

    def __str__(self) -> str:
        return "[" + ",".join(str(p) for p in self.parts) + "]"


def _generate(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _generate(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def partitions_of(n: int) -> Tuple[Partition, ...]:
    """All partitions of n in canonical order"""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return tuple(Partition(parts) for parts in _generate(n, n))


class ChernCombo:
    """Rational linear combination of the Chern numbers c_lambda, |lambda| = weight"""

    __slots__ = ("weight", "terms")

    def __init__(self, weight: int, terms: Mapping[Partition, Scalar] = None):
        clean: Dict[Partition, Fraction] = {}
        for partition, coeff in (terms or {}).items():
            if not isinstance(partition, Partition):
                partition = Partition.from_parts(partition)
            if partition.weight != weight:
                raise WeightMismatch(
                    f"Partition {partition} has weight {partition.weight}, expected {weight}")
            coeff = to_rational(coeff)
            total = clean.get(partition, Fraction(0)) + coeff
            if total:
                clean[partition] = total
            else:
                clean.pop(partition, None)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "terms", {p: clean[p] for p in sorted(clean)})

    def __setattr__(self, name, value):
        raise AttributeError("ChernCombo is immutable")

    def __reduce__(self):
        # results cross process boundaries in the parallel verifier
        return (ChernCombo, (self.weight, dict(self.terms)))

    @classmethod
    def zero(cls, weight: int) -> "ChernCombo":
        return cls(weight)

    @classmethod
    def from_monomials(cls, weight: int, monomials: Iterable[Tuple[Scalar, Sequence[int]]]) -> "ChernCombo":
        """Instantiate a closed form written with Chern-class indices.

        c_0 is the unit, so zero indices are dropped; a monomial containing a
        negative index is zero and skipped. Repeated keys are summed, which
        matters for small n where e.g. c1·c_{n-1} and c1^2·c_{n-2} coincide.
        """
        terms: Dict[Partition, Fraction] = {}
        for coeff, indices in monomials:
            if any(k < 0 for k in indices):
                continue
            partition = Partition.from_parts(indices)
            terms[partition] = terms.get(partition, Fraction(0)) + to_rational(coeff)
        return cls(weight, terms)

    def coefficient(self, partition: Union[Partition, Sequence[int]]) -> Fraction:
        if not isinstance(partition, Partition):
            partition = Partition.from_parts(partition)
        return self.terms.get(partition, Fraction(0))

    def items(self) -> List[Tuple[Partition, Fraction]]:
        return list(self.terms.items())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChernCombo):
            return NotImplemented
        return self.weight == other.weight and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.weight, tuple(self.terms.items())))

    def _check_weight(self, other: "ChernCombo") -> None:
        if self.weight != other.weight:
            raise WeightMismatch(f"Cannot combine weights {self.weight} and {other.weight}")

    def __add__(self, other: "ChernCombo") -> "ChernCombo":
        if not isinstance(other, ChernCombo):
            return NotImplemented
        self._check_weight(other)
        terms = dict(self.terms)
        for partition, coeff in other.terms.items():
            terms[partition] = terms.get(partition, Fraction(0)) + coeff
        return ChernCombo(self.weight, terms)

    def __neg__(self) -> "ChernCombo":
        return self * -1

    def __sub__(self, other: "ChernCombo") -> "ChernCombo":
        return self + (-other)

    def __mul__(self, factor: Scalar) -> "ChernCombo":
        if not isinstance(factor, (int, Fraction)):
            return NotImplemented
        return ChernCombo(self.weight, {p: c * factor for p, c in self.terms.items()})

    __rmul__ = __mul__

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weight": self.weight,
            "terms": [
                {"partition": list(p.parts), "coeff": format_rational(c)}
                for p, c in self.terms.items()
            ],
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> "ChernCombo":
        try:
            weight = int(document["weight"])
            terms = {
                Partition.from_parts(entry["partition"]): to_rational(entry["coeff"])
                for entry in document["terms"]
            }
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed ChernCombo document: {e}") from e
        return cls(weight, terms)

    def format(self) -> str:
        """Human-readable form such as 1/2·c3 + 7/12·c1·c2"""
        if not self.terms:
            return "0"
        text = ""
        for partition, coeff in self.terms.items():
            sign = "-" if coeff < 0 else "+"
            magnitude = abs(coeff)
            monomial = partition.label()
            if monomial == "1":
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = monomial
            else:
                body = f"{format_rational(magnitude)}·{monomial}"
            if not text:
                text = body if sign == "+" else f"-{body}"
            else:
                text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"ChernCombo(weight={self.weight}, {self.format()})"


@dataclass(frozen=True)
class IdentityCheck:
    """One verified (or refuted) identity between two Chern combinations"""

    n: int
    identity: str
    passed: bool
    lhs: ChernCombo
    rhs: ChernCombo

    @classmethod
    def compare(cls, n: int, identity: str, lhs: ChernCombo, rhs: ChernCombo) -> "IdentityCheck":
        check = cls(n, identity, lhs == rhs, lhs, rhs)
        if not check.passed:
            logger.warning(f"Identity {identity} failed at n={n}: {lhs.format()} != {rhs.format()}")
        return check

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "identity": self.identity,
            "pass": self.passed,
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
        }


def elementary(k: int, n: int) -> MvPoly:
    """e_k(x_1, ..., x_n); zero when k > n"""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    terms = {}
    for chosen in combinations(range(n), k):
        terms[tuple(1 if i in chosen else 0 for i in range(n))] = 1
    return MvPoly(n, terms)


@lru_cache(maxsize=None)
def elementary_product(partition: Partition, n: int) -> MvPoly:
    """e_lambda = prod_j e_{lambda_j} in n variables, truncated at degree n"""
    if not partition.parts:
        return MvPoly.constant(1, n)
    return mv_product([elementary(k, n) for k in partition.parts])


def _is_dominant(exponent: Exponent) -> bool:
    return all(a >= b for a, b in zip(exponent, exponent[1:]))


@lru_cache(maxsize=None)
def _dominant_terms(partition: Partition, n: int) -> Tuple[Tuple[Exponent, int], ...]:
    # a symmetric polynomial is fixed by its coefficients on non-increasing exponents
    product = elementary_product(partition, n)
    return tuple((e, c) for e, c in product.terms.items() if _is_dominant(e))


def check_symmetric(f: MvPoly) -> None:
    """Raise NonSymmetricInput unless every adjacent transposition fixes f"""
    for i in range(f.nvars - 1):
        if f.swap_variables(i, i + 1) != f:
            raise NonSymmetricInput(f"Polynomial changes under x{i + 1} <-> x{i + 2}")


def h_component(f: MvPoly, n: int) -> MvPoly:
    """The homogeneous component of degree n"""
    return f.homogeneous_component(n)


def reduce_to_chern(f: MvPoly, n: int) -> ChernCombo:
    """Write a symmetric homogeneous degree-n polynomial in the e_lambda basis.

    Leading-term elimination: the graded-lex leading monomial x^alpha of a
    symmetric polynomial has non-increasing alpha, and e_lambda with lambda
    the conjugate of alpha has the same leading monomial with coefficient 1.
    Only the non-increasing exponents are tracked once symmetry is checked.
    """
    if f.ring != "rational":
        raise ValueError("reduce_to_chern needs rational coefficients")
    if f.nvars != n:
        raise ValueError(f"Expected {n} variables, got {f.nvars}")
    stray = [d for d in f.degrees() if d != n]
    if stray:
        raise NonHomogeneous(f"Expected degree {n} only, found degrees {f.degrees()}")
    check_symmetric(f)

    remainder = {e: c for e, c in f.terms.items() if _is_dominant(e)}
    result: Dict[Partition, Fraction] = {}
    limit = len(partitions_of(n)) + 1
    steps = 0
    while remainder:
        steps += 1
        if steps > limit:
            raise ReductionDidNotTerminate(f"No termination after {limit} steps at n={n}")
        lead = max(remainder, key=grlex_key)
        coeff = remainder[lead]
        partition = Partition.from_parts(lead).conjugate()
        result[partition] = coeff
        logger.debug(f"reduce n={n}: lead {lead} -> {partition.label()} with {coeff}")
        for exponent, c in _dominant_terms(partition, n):
            value = remainder.get(exponent, Fraction(0)) - coeff * c
            if value:
                remainder[exponent] = value
            else:
                remainder.pop(exponent, None)
    return ChernCombo(n, result)


LEMMA23_IDENTITIES = ("h1", "h11", "h2", "h12", "h22", "h3")

# exponents placed on the distinguished roots; one entry per summand
_LEMMA23_SHAPES = {
    "h1": [(1,)],
    "h2": [(2,)],
    "h3": [(3,)],
    "h11": [(1, 1)],
    "h12": [(2, 1), (1, 2)],
    "h22": [(2, 2)],
}


def _monomial(n: int, exponents: Mapping[int, int]) -> MvPoly:
    return MvPoly(n, {tuple(exponents.get(i, 0) for i in range(n)): 1})


def lemma23_lhs(which: str, n: int) -> ChernCombo:
    """Build the defining sum for h1 ... h3 literally, take h, reduce.

    For example h2 is h(sum_i x_i^2 prod_{j != i} (1 + x_j)).
    """
    if which not in _LEMMA23_SHAPES:
        raise ValueError(f"Unknown identity {which!r}; expected one of {LEMMA23_IDENTITIES}")
    return _lemma23_lhs(which, n)


@lru_cache(maxsize=None)
def _lemma23_lhs(which: str, n: int) -> ChernCombo:
    shapes = _LEMMA23_SHAPES[which]
    arity = len(shapes[0])
    if n < max(arity, 1):
        raise ValueError(f"{which} needs n >= {max(arity, 1)}, got {n}")

    one_plus = [MvPoly.constant(1, n) + MvPoly.variable(k + 1, n) for k in range(n)]
    total = MvPoly(n)
    for roots in combinations(range(n), arity):
        marked = MvPoly(n)
        for shape in shapes:
            marked = marked + _monomial(n, dict(zip(roots, shape)))
        rest = [one_plus[k] for k in range(n) if k not in roots]
        total = total + (mv_product([marked] + rest) if rest else marked)
    return reduce_to_chern(h_component(total, n), n)


def lemma23_rhs(which: str, n: int) -> ChernCombo:
    """Closed forms of the six h identities, instantiated at n"""
    q = Fraction
    forms = {
        "h1": [(n, [n])],
        "h11": [(q(n * (n - 1), 2), [n])],
        "h2": [(-n, [n]), (1, [1, n - 1])],
        "h12": [(-(n - 2) * n, [n]), (n - 2, [1, n - 1])],
        "h22": [(q(n * (n - 3), 2), [n]), (-(n - 2), [1, n - 1]), (1, [2, n - 2])],
        "h3": [(n, [n]), (-1, [1, n - 1]), (1, [1, 1, n - 2]), (-2, [2, n - 2])],
    }
    if which not in forms:
        raise ValueError(f"Unknown identity {which!r}; expected one of {LEMMA23_IDENTITIES}")
    return ChernCombo.from_monomials(n, forms[which])


def verify_lemma23(n: int) -> List[IdentityCheck]:
    """Check all six h identities at n; failures are entries, not exceptions"""
    if n < 2:
        raise ValueError(f"verify_lemma23 needs n >= 2, got {n}")
    return [
        IdentityCheck.compare(n, which, lemma23_lhs(which, n), lemma23_rhs(which, n))
        for which in LEMMA23_IDENTITIES
    ]
