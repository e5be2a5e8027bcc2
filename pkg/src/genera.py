"""Genus tables in the y- and z-parametrizations and the identity verifiers
built on them.

A genus of an n-dimensional almost-complex manifold is the degree-n part of
prod_i F(x_i) for a per-root factor F. Each power of the parameter then
carries a symmetric polynomial, which is reduced to Chern numbers.
"""

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Tuple, Union

from .core_algebra import GenusKind, MvPoly, genus_factor, mv_product, mv_substitute
from .errors import ResourceLimitExceeded
from .symmetric import ChernCombo, IdentityCheck, h_component, lemma23_lhs, reduce_to_chern

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 10

KindLike = Union[str, GenusKind]


@dataclass(frozen=True)
class GenusTable:
    """Row p is the Chern-number expression of chi^p, A(M, L^p T*) or L(M, L^p T*)"""

    kind: GenusKind
    n: int
    rows: Tuple[ChernCombo, ...]

    def __post_init__(self):
        if len(self.rows) != self.n + 1:
            raise ValueError(f"Expected {self.n + 1} rows, got {len(self.rows)}")
        if any(row.weight != self.n for row in self.rows):
            raise ValueError(f"Every row must have weight {self.n}")

    def is_symmetric(self) -> bool:
        """rows[n - p] == (-1)^n rows[p] for every p"""
        sign = (-1) ** self.n
        return all(self.rows[self.n - p] == self.rows[p] * sign for p in range(self.n + 1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "rows": [row.to_dict() for row in self.rows],
        }


@dataclass(frozen=True)
class ZExpansion:
    """Coefficients of the genus in powers of z = 1 + y"""

    kind: GenusKind
    n: int
    order: int
    coeffs: Tuple[ChernCombo, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError(f"Expected {self.order + 1} coefficients, got {len(self.coeffs)}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "order": self.order,
            "coeffs": [c.to_dict() for c in self.coeffs],
        }


def _check_dimension(n: int, max_n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if n > max_n:
        raise ResourceLimitExceeded(f"n={n} exceeds the configured maximum {max_n}")


def genus_product(kind: KindLike, param: str, n: int, pcap: int) -> MvPoly:
    """prod_{i=1..n} F(x_i) truncated at total degree n, parameter degree pcap"""
    factor = genus_factor(kind, param, n, pcap)
    return mv_product([mv_substitute(factor, i, n) for i in range(1, n + 1)])


def _reduce_powers(product: MvPoly, n: int, count: int) -> Tuple[ChernCombo, ...]:
    top = h_component(product, n)
    return tuple(reduce_to_chern(top.coefficient_slice(k), n) for k in range(count))


@lru_cache(maxsize=None)
def _genus_table(kind: GenusKind, n: int) -> GenusTable:
    started = time.perf_counter()
    product = genus_product(kind, "y", n, n)
    table = GenusTable(kind, n, _reduce_powers(product, n, n + 1))
    logger.info(f"{kind.value} table for n={n} in {time.perf_counter() - started:.2f}s")
    return table


def genus_table(kind: KindLike, n: int, max_n: int = DEFAULT_MAX_N) -> GenusTable:
    """Chern-number expressions of the y-power coefficients of the genus"""
    kind = GenusKind.parse(kind)
    _check_dimension(n, max_n)
    return _genus_table(kind, n)


@lru_cache(maxsize=None)
def _z_expand(kind: GenusKind, n: int, order: int) -> ZExpansion:
    started = time.perf_counter()
    product = genus_product(kind, "z", n, order)
    expansion = ZExpansion(kind, n, order, _reduce_powers(product, n, order + 1))
    logger.info(
        f"{kind.value} z-expansion for n={n}, order {order} in {time.perf_counter() - started:.2f}s")
    return expansion


def z_expand(kind: KindLike, n: int, order: int, max_n: int = DEFAULT_MAX_N) -> ZExpansion:
    """Expand the genus around y = -1 directly from the z-parametrized factor"""
    kind = GenusKind.parse(kind)
    _check_dimension(n, max_n)
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    return _z_expand(kind, n, order)


def weighted_alternating_sum(table: GenusTable, k: int) -> ChernCombo:
    """sum_p (-1)^p C(p, k) row_p"""
    if not 0 <= k <= table.n:
        raise ValueError(f"k must lie in 0..{table.n}, got {k}")
    total = ChernCombo.zero(table.n)
    for p, row in enumerate(table.rows):
        total = total + row * ((-1) ** p * math.comb(p, k))
    return total


def binomial_transform(table: GenusTable, k: int) -> ChernCombo:
    """sum_p (-1)^(p-k) C(p, k) row_p, the z^k coefficient implied by the y-table"""
    return weighted_alternating_sum(table, k) * (-1) ** k


def theorem_mr_rhs(kind: KindLike, k: int, n: int) -> ChernCombo:
    """Closed forms for the weighted alternating sums of the twisted A and L indices"""
    kind = GenusKind.parse(kind)
    q = Fraction
    if kind is GenusKind.A_Y:
        forms = {
            0: [(1, [n])],
            1: [(q(n, 2), [n]), (q(1, 2), [1, n - 1])],
            2: [(q(n * (3 * n - 5), 24), [n]), (q(3 * n - 2, 12), [1, n - 1]),
                (q(1, 8), [1, 1, n - 2])],
        }
    elif kind is GenusKind.L_Y:
        scale = q(2) ** (n - 2)
        forms = {
            0: [(2 ** n, [n])],
            1: [(q(2) ** (n - 1) * n, [n]), (q(2) ** (n - 1), [1, n - 1])],
            2: [(scale * q(n * (3 * n - 5), 6), [n]), (scale * q(3 * n - 2, 3), [1, n - 1]),
                (scale, [1, 1, n - 2]), (-scale, [2, n - 2])],
        }
    else:
        raise ValueError("Closed forms exist only for the a-y and l-y kinds")
    if k not in forms:
        raise ValueError(f"Closed forms are known for k = 0, 1, 2 only, got {k}")
    return ChernCombo.from_monomials(n, forms[k])


def libgober_wood_rhs(n: int) -> ChernCombo:
    return ChernCombo.from_monomials(
        n, [(Fraction(n * (3 * n - 5), 24), [n]), (Fraction(1, 12), [1, n - 1])])


def verify_theorem_mr(n: int, max_n: int = DEFAULT_MAX_N) -> List[IdentityCheck]:
    """The six weighted alternating sum identities for the twisted A and L genera"""
    if n < 2:
        raise ValueError(f"verify_theorem_mr needs n >= 2, got {n}")
    checks = []
    for kind in (GenusKind.A_Y, GenusKind.L_Y):
        table = genus_table(kind, n, max_n)
        for k in range(3):
            checks.append(IdentityCheck.compare(
                n, f"{kind.value}-k{k}", weighted_alternating_sum(table, k), theorem_mr_rhs(kind, k, n)))
    return checks


def verify_libgober_wood(n: int, max_n: int = DEFAULT_MAX_N) -> List[IdentityCheck]:
    """sum_p (-1)^p C(p, 2) chi^p in closed form, and its split into h2 and h11"""
    if n < 2:
        raise ValueError(f"verify_libgober_wood needs n >= 2, got {n}")
    table = genus_table(GenusKind.CHI_Y, n, max_n)
    z2 = z_expand(GenusKind.CHI_Y, n, 2, max_n).coeffs[2]
    decomposition = lemma23_lhs("h2", n) * Fraction(1, 12) + lemma23_lhs("h11", n) * Fraction(1, 4)
    return [
        IdentityCheck.compare(n, "libgober-wood", weighted_alternating_sum(table, 2), libgober_wood_rhs(n)),
        IdentityCheck.compare(n, "libgober-wood-h-decomposition", z2, decomposition),
    ]


def verify_h_decomposition(n: int, max_n: int = DEFAULT_MAX_N) -> List[IdentityCheck]:
    """The z and z^2 coefficients of the A and L genera written through h1 ... h3"""
    if n < 2:
        raise ValueError(f"verify_h_decomposition needs n >= 2, got {n}")
    h = {which: lemma23_lhs(which, n) for which in ("h1", "h11", "h2", "h12", "h22", "h3")}
    q = Fraction

    def combine(weights: Dict[str, Fraction]) -> ChernCombo:
        total = ChernCombo.zero(n)
        for which, weight in weights.items():
            total = total + h[which] * weight
        return total

    a_coeffs = z_expand(GenusKind.A_Y, n, 2, max_n).coeffs
    l_coeffs = z_expand(GenusKind.L_Y, n, 2, max_n).coeffs
    two = q(2)
    expected = [
        ("a-y-z1", a_coeffs[1], {"h1": q(-1), "h2": q(-1, 2)}),
        ("a-y-z2", a_coeffs[2], {"h2": q(11, 24), "h3": q(1, 8), "h11": q(1),
                                 "h12": q(1, 2), "h22": q(1, 4)}),
        ("l-y-z1", l_coeffs[1], {"h1": -two ** n, "h2": -two ** (n - 1)}),
        ("l-y-z2", l_coeffs[2], {"h2": 7 * two ** (n - 2) / 3, "h3": two ** (n - 2),
                                 "h11": two ** n, "h12": two ** (n - 1), "h22": two ** (n - 2)}),
    ]
    return [IdentityCheck.compare(n, name, lhs, combine(weights)) for name, lhs, weights in expected]


def verify_binomial_transform(kind: KindLike, n: int, max_n: int = DEFAULT_MAX_N) -> List[IdentityCheck]:
    """Direct z-expansion against the binomial transform of the y-table, orders 0..n"""
    kind = GenusKind.parse(kind)
    table = genus_table(kind, n, max_n)
    expansion = z_expand(kind, n, n, max_n)
    return [
        IdentityCheck.compare(n, f"{kind.value}-z{k}", expansion.coeffs[k], binomial_transform(table, k))
        for k in range(n + 1)
    ]
