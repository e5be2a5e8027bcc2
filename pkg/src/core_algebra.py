"""Ring substrate: exact rationals, capped univariate polynomials, bivariate
genus-factor series and sparse truncated multivariate polynomials.

Every value here is immutable after construction and every operation
returns a new value, so results can be shared between threads and
processes freely.
"""

import logging
import math
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction]

PARAMETERS = ("y", "z")
RINGS = ("rational", "unipoly")


def to_rational(value: Union[int, str, Fraction]) -> Rational:
    """Coerce an int, a Fraction or a "p/q" string to a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise ValueError(f"Not a rational number: {value!r}") from e
    raise TypeError(f"Cannot convert {type(value).__name__} to a rational")


def format_rational(value: Rational) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1"""
    value = to_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class GenusKind(Enum):
    """Closed set of genera the engine knows how to build"""

    CHI_Y = "chi-y"
    A_Y = "a-y"
    L_Y = "l-y"

    @classmethod
    def parse(cls, tag: Union[str, "GenusKind"]) -> "GenusKind":
        if isinstance(tag, GenusKind):
            return tag
        key = str(tag).strip().lower().replace("_", "").replace("-", "")
        for kind in cls:
            if key == kind.value.replace("-", ""):
                return kind
        raise ValueError(f"Unknown genus kind: {tag!r}")


def _check_parameter(param: str) -> str:
    if param not in PARAMETERS:
        raise ValueError(f"Unknown parameter tag: {param!r} (expected one of {PARAMETERS})")
    return param


def _trim(values: List[Fraction]) -> Tuple[Fraction, ...]:
    end = len(values)
    while end and not values[end - 1]:
        end -= 1
    return tuple(values[:end])


class UniPoly:
    """Polynomial in y or z with rational coefficients, truncated above ``cap``.

    Coefficients are stored densely and trimmed of trailing zeros, so two
    equal polynomials always have identical ``coeffs``.
    """

    __slots__ = ("var", "coeffs", "cap")

    def __init__(self, var: str, coeffs: Iterable[Scalar] = (), cap: int = 0):
        if cap < 0:
            raise ValueError(f"cap must be non-negative, got {cap}")
        values = [to_rational(c) for c in coeffs][: cap + 1]
        object.__setattr__(self, "var", _check_parameter(var))
        object.__setattr__(self, "coeffs", _trim(values))
        object.__setattr__(self, "cap", cap)

    @classmethod
    def _raw(cls, var: str, coeffs: Tuple[Fraction, ...], cap: int) -> "UniPoly":
        # trusted fast path: coeffs already trimmed, truncated and Fraction-typed
        poly = object.__new__(cls)
        object.__setattr__(poly, "var", var)
        object.__setattr__(poly, "coeffs", coeffs)
        object.__setattr__(poly, "cap", cap)
        return poly

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def constant(cls, value: Scalar, var: str = "y", cap: int = 0) -> "UniPoly":
        return cls(var, [value], cap)

    @property
    def degree(self) -> int:
        """Degree of the trimmed polynomial, -1 for zero"""
        return len(self.coeffs) - 1

    def coefficient(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.var == other.var and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim([to_rational(other)])
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.var, self.coeffs))

    def _check_compatible(self, other: "UniPoly") -> int:
        if self.var != other.var:
            raise ValueError(f"Parameter mismatch: {self.var} vs {other.var}")
        return min(self.cap, other.cap)

    def __add__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly._raw(self.var, _trim([to_rational(other)]), self.cap)
        if not isinstance(other, UniPoly):
            return NotImplemented
        cap = self._check_compatible(other)
        a, b = self.coeffs, other.coeffs
        size = min(max(len(a), len(b)), cap + 1)
        out = [
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
            for i in range(size)
        ]
        return UniPoly._raw(self.var, _trim([Fraction(v) for v in out]), cap)

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly._raw(self.var, tuple(-c for c in self.coeffs), self.cap)

    def __sub__(self, other) -> "UniPoly":
        return self + (-other)

    def __rsub__(self, other) -> "UniPoly":
        return (-self) + other

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return UniPoly._raw(self.var, (), self.cap)
            return UniPoly._raw(self.var, tuple(c * other for c in self.coeffs), self.cap)
        if not isinstance(other, UniPoly):
            return NotImplemented
        cap = self._check_compatible(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly._raw(self.var, (), cap)
        size = min(len(a) + len(b) - 1, cap + 1)
        out = [Fraction(0)] * size
        for i, ai in enumerate(a[:size]):
            if not ai:
                continue
            for j, bj in enumerate(b[: size - i]):
                out[i + j] += ai * bj
        return UniPoly._raw(self.var, _trim(out), cap)

    __rmul__ = __mul__

    def evaluate(self, value: Scalar) -> Fraction:
        value = to_rational(value)
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def shift(self, var: str, offset: Scalar) -> "UniPoly":
        """Re-expand p(t) as a polynomial in s where t = s + offset.

        Used for y = z - 1, i.e. ``p.shift("z", -1)``; the result keeps the cap.
        """
        offset = to_rational(offset)
        out = [Fraction(0)] * len(self.coeffs)
        for k, a in enumerate(self.coeffs):
            if not a:
                continue
            for i in range(k + 1):
                out[i] += a * math.comb(k, i) * offset ** (k - i)
        return UniPoly(var, out, self.cap)

    def __repr__(self) -> str:
        return f"UniPoly({self.var}, {self!s}, cap={self.cap})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(format_rational(c))
            else:
                power = self.var if k == 1 else f"{self.var}^{k}"
                parts.append(power if c == 1 else f"{format_rational(c)}*{power}")
        return " + ".join(parts).replace("+ -", "- ")


class FactorSeries:
    """Truncated series sum a[j][k] * x^j * t^k with j <= xcap, k <= pcap.

    ``t`` is the parameter named by ``param``. A single-variable series is
    simply one with ``pcap == 0``.
    """

    __slots__ = ("xcap", "pcap", "param", "coeffs")

    def __init__(self, xcap: int, pcap: int, coeffs: Sequence[Sequence[Scalar]] = (), param: str = "y"):
        if xcap < 0 or pcap < 0:
            raise ValueError(f"Caps must be non-negative, got xcap={xcap}, pcap={pcap}")
        table = []
        for j in range(xcap + 1):
            row = list(coeffs[j]) if j < len(coeffs) else []
            row = [to_rational(c) for c in row[: pcap + 1]]
            table.append(tuple(row + [Fraction(0)] * (pcap + 1 - len(row))))
        object.__setattr__(self, "xcap", xcap)
        object.__setattr__(self, "pcap", pcap)
        object.__setattr__(self, "param", _check_parameter(param))
        object.__setattr__(self, "coeffs", tuple(table))

    def __setattr__(self, name, value):
        raise AttributeError("FactorSeries is immutable")

    @classmethod
    def constant(cls, value: Scalar, xcap: int, pcap: int = 0, param: str = "y") -> "FactorSeries":
        return cls(xcap, pcap, [[value]], param)

    @classmethod
    def from_univariate(
        cls,
        values: Sequence[Scalar],
        pcap: int = 0,
        param: str = "y",
        scaled: bool = False,
    ) -> "FactorSeries":
        """Lift s(u) = sum values[j] u^j to a bivariate series.

        With ``scaled`` the argument u becomes x*t, so values[j] lands on x^j t^j.
        """
        xcap = len(values) - 1
        table = [[Fraction(0)] * (pcap + 1) for _ in range(xcap + 1)]
        for j, v in enumerate(values):
            k = j if scaled else 0
            if k <= pcap:
                table[j][k] = to_rational(v)
        return cls(xcap, pcap, table, param)

    def coefficient(self, j: int, k: int) -> Fraction:
        if 0 <= j <= self.xcap and 0 <= k <= self.pcap:
            return self.coeffs[j][k]
        return Fraction(0)

    def x_coefficient(self, j: int) -> UniPoly:
        """Coefficient of x^j as a polynomial in the parameter"""
        if 0 <= j <= self.xcap:
            return UniPoly(self.param, self.coeffs[j], self.pcap)
        return UniPoly(self.param, (), self.pcap)

    def univariate(self) -> List[Fraction]:
        """The parameter-free column a[j][0]"""
        return [row[0] for row in self.coeffs]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactorSeries):
            return NotImplemented
        return (self.xcap, self.pcap, self.param, self.coeffs) == (
            other.xcap, other.pcap, other.param, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.xcap, self.pcap, self.param, self.coeffs))

    def _caps_with(self, other: "FactorSeries") -> Tuple[int, int]:
        if self.param != other.param:
            raise ValueError(f"Parameter mismatch: {self.param} vs {other.param}")
        return min(self.xcap, other.xcap), min(self.pcap, other.pcap)

    def __add__(self, other) -> "FactorSeries":
        if isinstance(other, (int, Fraction)):
            other = FactorSeries.constant(other, self.xcap, self.pcap, self.param)
        if not isinstance(other, FactorSeries):
            return NotImplemented
        xcap, pcap = self._caps_with(other)
        table = [
            [self.coeffs[j][k] + other.coeffs[j][k] for k in range(pcap + 1)]
            for j in range(xcap + 1)
        ]
        return FactorSeries(xcap, pcap, table, self.param)

    __radd__ = __add__

    def __neg__(self) -> "FactorSeries":
        return self * -1

    def __sub__(self, other) -> "FactorSeries":
        return self + (-other)

    def __mul__(self, other) -> "FactorSeries":
        if isinstance(other, (int, Fraction)):
            table = [[c * other for c in row] for row in self.coeffs]
            return FactorSeries(self.xcap, self.pcap, table, self.param)
        if not isinstance(other, FactorSeries):
            return NotImplemented
        xcap, pcap = self._caps_with(other)
        table = [[Fraction(0)] * (pcap + 1) for _ in range(xcap + 1)]
        for j1 in range(xcap + 1):
            for k1 in range(pcap + 1):
                a = self.coeffs[j1][k1]
                if not a:
                    continue
                for j2 in range(xcap + 1 - j1):
                    row = other.coeffs[j2]
                    for k2 in range(pcap + 1 - k1):
                        if row[k2]:
                            table[j1 + j2][k1 + k2] += a * row[k2]
        return FactorSeries(xcap, pcap, table, self.param)

    __rmul__ = __mul__

    def with_caps(self, xcap: Optional[int] = None, pcap: Optional[int] = None) -> "FactorSeries":
        """Truncate, or pad with zeros; padding is only exact for untruncated input"""
        xcap = self.xcap if xcap is None else xcap
        pcap = self.pcap if pcap is None else pcap
        return FactorSeries(xcap, pcap, self.coeffs, self.param)

    def times_parameter(self, power: int = 1) -> "FactorSeries":
        """Multiply by t^power"""
        table = [[Fraction(0)] * power + list(row) for row in self.coeffs]
        return FactorSeries(self.xcap, self.pcap, table, self.param)

    def rescale_x_by_parameter(self) -> "FactorSeries":
        """Replace x by x*t: a[j][k] moves to a[j][k + j]"""
        table = [[Fraction(0)] * j + list(row) for j, row in enumerate(self.coeffs)]
        return FactorSeries(self.xcap, self.pcap, table, self.param)

    def divide_by_parameter(self) -> "FactorSeries":
        """Exact division by t; the t^0 column must vanish"""
        if any(row[0] for row in self.coeffs):
            raise ValueError("Series is not divisible by its parameter")
        table = [list(row[1:]) for row in self.coeffs]
        return FactorSeries(self.xcap, self.pcap, table, self.param)

    def substitute_parameter(self, param: str, offset: Scalar) -> "FactorSeries":
        """Substitute t = s + offset in every coefficient; ``s`` is named ``param``"""
        table = [
            UniPoly(self.param, row, self.pcap).shift(param, offset).coeffs
            for row in self.coeffs
        ]
        return FactorSeries(self.xcap, self.pcap, table, param)

    def __repr__(self) -> str:
        return f"FactorSeries(xcap={self.xcap}, pcap={self.pcap}, {self!s})"

    def __str__(self) -> str:
        parts = []
        for j in range(self.xcap + 1):
            poly = self.x_coefficient(j)
            if not poly:
                continue
            x = "" if j == 0 else ("x" if j == 1 else f"x^{j}")
            if j == 0:
                parts.append(f"({poly})")
            else:
                parts.append(f"({poly})*{x}")
        return " + ".join(parts) if parts else "0"


def series_todd(xcap: int) -> FactorSeries:
    """Taylor coefficients of u/(1 - e^-u) through u^xcap.

    Solved term by term from todd(u) * (1 - e^-u)/u = 1, where
    (1 - e^-u)/u = sum_j (-1)^j u^j / (j+1)!.
    """
    if xcap < 0:
        raise ValueError(f"xcap must be non-negative, got {xcap}")
    inverse = [Fraction((-1) ** j, math.factorial(j + 1)) for j in range(xcap + 1)]
    todd = [Fraction(1)]
    for m in range(1, xcap + 1):
        todd.append(-sum(inverse[i] * todd[m - i] for i in range(1, m + 1)))
    return FactorSeries.from_univariate(todd)


def series_exp_scaled(a: Scalar, xcap: int) -> FactorSeries:
    """Coefficients of e^(a*u): a^j / j!"""
    if xcap < 0:
        raise ValueError(f"xcap must be non-negative, got {xcap}")
    a = to_rational(a)
    return FactorSeries.from_univariate([a ** j / math.factorial(j) for j in range(xcap + 1)])


def genus_factor(kind: Union[str, GenusKind], param: str, xcap: int, pcap: int) -> FactorSeries:
    """Per-Chern-root factor of the chosen genus as a bivariate series.

    y-parametrization: (1 + y e^-x) * todd(x), times e^(-x/2) for AY or
    (1 + e^-x) for LY.
    z-parametrization (z = 1 + y, x inside the transcendental parts scaled
    by z): -x(z - 1) + todd(xz), times e^(-xz/2) for AY or (1 + e^-xz) for LY.
    """
    kind = GenusKind.parse(kind)
    _check_parameter(param)
    if xcap < 0 or pcap < 0:
        raise ValueError(f"Caps must be non-negative, got xcap={xcap}, pcap={pcap}")

    todd = series_todd(xcap).univariate()
    half = series_exp_scaled(Fraction(-1, 2), xcap).univariate()
    full = series_exp_scaled(-1, xcap).univariate()

    if param == "y":
        def lift(values):
            return FactorSeries.from_univariate(values, pcap, "y")
        core = (lift([1]).with_caps(xcap=xcap) + lift(full).times_parameter()) * lift(todd)
        if kind is GenusKind.A_Y:
            core = core * lift(half)
        elif kind is GenusKind.L_Y:
            core = core * (lift(full) + 1)
        return core

    def lift_scaled(values):
        return FactorSeries.from_univariate(values, pcap, "z", scaled=True)
    table = [[Fraction(0)] * (pcap + 1) for _ in range(xcap + 1)]
    if xcap >= 1:
        # -x(z - 1) = x - xz
        table[1][0] = Fraction(1)
        if pcap >= 1:
            table[1][1] = Fraction(-1)
    core = FactorSeries(xcap, pcap, table, "z") + lift_scaled(todd)
    if kind is GenusKind.A_Y:
        core = core * lift_scaled(half)
    elif kind is GenusKind.L_Y:
        core = core * (lift_scaled(full) + 1)
    return core


def reparametrize_factor(series: FactorSeries, pcap: int) -> FactorSeries:
    """Turn a y-parametrized factor F(x, y) into F(xz, z - 1) / z.

    The y-factors are exact polynomials of degree one in y, so padding the
    parameter cap before rescaling loses nothing; the constant term
    F(0, y) = c * (1 + y) makes the division by z exact.
    """
    if series.param != "y" or series.pcap < 1:
        raise ValueError("Expected a y-parametrized series with parameter cap >= 1")
    widened = series.with_caps(pcap=max(series.pcap, pcap + 1))
    shifted = widened.substitute_parameter("z", -1)
    return shifted.rescale_x_by_parameter().divide_by_parameter().with_caps(pcap=pcap)


Exponent = Tuple[int, ...]


def grlex_key(exponent: Exponent) -> Tuple[int, Exponent]:
    """Graded lexicographic sort key; larger key means larger monomial"""
    return (sum(exponent), exponent)


class MvPoly:
    """Sparse polynomial in x_1..x_nvars truncated at total degree ``degree_cap``.

    Coefficients are Fractions (ring "rational") or UniPolys (ring
    "unipoly"). ``var_caps`` optionally bounds each exponent separately,
    which models relations g^(k+1) = 0. Zero coefficients are never stored.
    """

    __slots__ = ("nvars", "ring", "degree_cap", "var_caps", "terms")

    def __init__(
        self,
        nvars: int,
        terms: Optional[Mapping[Exponent, object]] = None,
        ring: str = "rational",
        degree_cap: Optional[int] = None,
        var_caps: Optional[Sequence[int]] = None,
    ):
        if nvars < 0:
            raise ValueError(f"Variable count must be non-negative, got {nvars}")
        if ring not in RINGS:
            raise ValueError(f"Unknown coefficient ring: {ring!r}")
        degree_cap = nvars if degree_cap is None else degree_cap
        if var_caps is not None:
            var_caps = tuple(var_caps)
            if len(var_caps) != nvars:
                raise ValueError("var_caps must have one entry per variable")
        clean: Dict[Exponent, object] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(exponent)
            if len(exponent) != nvars or any(e < 0 for e in exponent):
                raise ValueError(f"Bad exponent vector {exponent} for {nvars} variables")
            if sum(exponent) > degree_cap:
                continue
            if var_caps is not None and any(e > m for e, m in zip(exponent, var_caps)):
                continue
            if ring == "rational":
                coeff = to_rational(coeff)
            elif not isinstance(coeff, UniPoly):
                raise TypeError("unipoly ring needs UniPoly coefficients")
            if coeff:
                clean[exponent] = clean[exponent] + coeff if exponent in clean else coeff
                if not clean[exponent]:
                    del clean[exponent]
        self._init(nvars, ring, degree_cap, var_caps, clean)

    def _init(self, nvars, ring, degree_cap, var_caps, terms) -> None:
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "degree_cap", degree_cap)
        object.__setattr__(self, "var_caps", var_caps)
        object.__setattr__(self, "terms", terms)

    def _like(self, terms: Dict[Exponent, object], ring: Optional[str] = None) -> "MvPoly":
        poly = object.__new__(MvPoly)
        poly._init(self.nvars, ring or self.ring, self.degree_cap, self.var_caps, terms)
        return poly

    def __setattr__(self, name, value):
        raise AttributeError("MvPoly is immutable")

    @classmethod
    def constant(cls, value, nvars: int, ring: str = "rational", **caps) -> "MvPoly":
        return cls(nvars, {(0,) * nvars: value}, ring, **caps)

    @classmethod
    def variable(cls, index: int, nvars: int, **caps) -> "MvPoly":
        """x_index over the rationals, 1-based"""
        if not 1 <= index <= nvars:
            raise ValueError(f"Variable index {index} out of range 1..{nvars}")
        exponent = tuple(1 if i == index - 1 else 0 for i in range(nvars))
        return cls(nvars, {exponent: 1}, "rational", **caps)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MvPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def sorted_terms(self) -> List[Tuple[Exponent, object]]:
        """Terms in canonical (descending graded lexicographic) order"""
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]), reverse=True)

    def leading_term(self) -> Tuple[Exponent, object]:
        if not self.terms:
            raise ValueError("The zero polynomial has no leading term")
        exponent = max(self.terms, key=grlex_key)
        return exponent, self.terms[exponent]

    def degrees(self) -> List[int]:
        return sorted({sum(e) for e in self.terms})

    def coefficient(self, exponent: Sequence[int]):
        return self.terms.get(tuple(exponent), 0)

    def _check_compatible(self, other: "MvPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"Variable count mismatch: {self.nvars} vs {other.nvars}")
        if self.ring != other.ring:
            raise ValueError(f"Coefficient ring mismatch: {self.ring} vs {other.ring}")
        if self.var_caps != other.var_caps:
            raise ValueError("Per-variable caps differ")

    def __add__(self, other) -> "MvPoly":
        if not isinstance(other, MvPoly):
            return NotImplemented
        self._check_compatible(other)
        cap = min(self.degree_cap, other.degree_cap)
        out = {e: c for e, c in self.terms.items() if sum(e) <= cap}
        for exponent, coeff in other.terms.items():
            if sum(exponent) > cap:
                continue
            if exponent in out:
                total = out[exponent] + coeff
                if total:
                    out[exponent] = total
                else:
                    del out[exponent]
            else:
                out[exponent] = coeff
        result = self._like(out)
        object.__setattr__(result, "degree_cap", cap)
        return result

    def __neg__(self) -> "MvPoly":
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MvPoly":
        return self + (-other)

    def scale(self, factor) -> "MvPoly":
        """Multiply every coefficient by a rational or UniPoly factor"""
        if isinstance(factor, UniPoly) and self.ring == "rational":
            raise ValueError("Cannot scale a rational polynomial by a UniPoly")
        out = {}
        for exponent, coeff in self.terms.items():
            product = coeff * factor
            if product:
                out[exponent] = product
        return self._like(out)

    def __mul__(self, other) -> "MvPoly":
        if isinstance(other, MvPoly):
            return mv_mul(self, other)
        if isinstance(other, (int, Fraction, UniPoly)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> "MvPoly":
        if isinstance(other, (int, Fraction, UniPoly)):
            return self.scale(other)
        return NotImplemented

    def homogeneous_component(self, degree: int) -> "MvPoly":
        return self._like({e: c for e, c in self.terms.items() if sum(e) == degree})

    def swap_variables(self, i: int, j: int) -> "MvPoly":
        """Exchange x_i and x_j (0-based positions)"""
        out = {}
        for exponent, coeff in self.terms.items():
            swapped = list(exponent)
            swapped[i], swapped[j] = swapped[j], swapped[i]
            out[tuple(swapped)] = coeff
        return self._like(out)

    def coefficient_slice(self, power: int) -> "MvPoly":
        """Rational polynomial of the t^power coefficients of a unipoly-ring polynomial"""
        if self.ring != "unipoly":
            raise ValueError("coefficient_slice needs UniPoly coefficients")
        out = {}
        for exponent, coeff in self.terms.items():
            value = coeff.coefficient(power)
            if value:
                out[exponent] = value
        return self._like(out, ring="rational")

    def evaluate(self, point: Sequence[Scalar]):
        """Evaluate at a point of length nvars"""
        if len(point) != self.nvars:
            raise ValueError(f"Expected {self.nvars} coordinates, got {len(point)}")
        point = [to_rational(v) for v in point]
        total = Fraction(0)
        for exponent, coeff in self.terms.items():
            monomial = Fraction(1)
            for value, e in zip(point, exponent):
                if e:
                    monomial *= value ** e
            total = coeff * monomial + total
        return total

    def __repr__(self) -> str:
        return f"MvPoly(nvars={self.nvars}, ring={self.ring}, {self!s})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exponent, coeff in self.sorted_terms():
            factors = [
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                for i, e in enumerate(exponent) if e
            ]
            if isinstance(coeff, UniPoly):
                text = f"({coeff})"
            else:
                text = format_rational(coeff)
            if factors:
                monomial = "*".join(factors)
                parts.append(monomial if text == "1" else f"{text}*{monomial}")
            else:
                parts.append(text)
        return " + ".join(parts).replace("+ -", "- ")


def mv_mul(p: MvPoly, q: MvPoly) -> MvPoly:
    """Sparse product, dropping every term above the degree and variable caps"""
    p._check_compatible(q)
    cap = min(p.degree_cap, q.degree_cap)
    var_caps = p.var_caps
    right = [(e, sum(e), c) for e, c in q.terms.items()]
    out: Dict[Exponent, object] = {}
    for e1, c1 in p.terms.items():
        d1 = sum(e1)
        for e2, d2, c2 in right:
            if d1 + d2 > cap:
                continue
            exponent = tuple(a + b for a, b in zip(e1, e2))
            if var_caps is not None and any(e > m for e, m in zip(exponent, var_caps)):
                continue
            product = c1 * c2
            if exponent in out:
                out[exponent] = out[exponent] + product
            else:
                out[exponent] = product
    result = p._like({e: c for e, c in out.items() if c})
    object.__setattr__(result, "degree_cap", cap)
    return result


def mv_product(factors: Sequence[MvPoly]) -> MvPoly:
    """Left fold of mv_mul over a non-empty sequence"""
    if not factors:
        raise ValueError("mv_product needs at least one factor")
    return reduce(mv_mul, factors)


def mv_substitute(series: FactorSeries, var_index: int, n: int) -> MvPoly:
    """Instantiate a factor series at x_var_index inside n variables.

    The coefficient of x_var_index^j is the parameter polynomial
    sum_k a[j][k] t^k.
    """
    if not 1 <= var_index <= n:
        raise ValueError(f"Variable index {var_index} out of range 1..{n}")
    if series.xcap < n:
        raise ValueError(f"Series x-order {series.xcap} is below the truncation degree {n}")
    terms = {}
    for j in range(n + 1):
        coeff = series.x_coefficient(j)
        if coeff:
            exponent = tuple(j if i == var_index - 1 else 0 for i in range(n))
            terms[exponent] = coeff
    return MvPoly(n, terms, ring="unipoly")
