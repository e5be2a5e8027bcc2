import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .core_algebra import GenusKind, MvPoly, format_rational, mv_product
from .errors import IncompleteChernData, ModelSpecError, NotDecidable, WeightMismatch
from .genera import DEFAULT_MAX_N, genus_table, libgober_wood_rhs
from .symmetric import ChernCombo, Partition, partitions_of

logger = logging.getLogger(__name__)


class ManifoldModel:
    """A concrete almost-complex manifold that can report its Chern numbers"""

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ProjectiveSpace(ManifoldModel):
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"Complex dimension must be at least 1, got {self.n}")

    @property
    def dimension(self) -> int:
        return self.n

    @property
    def label(self) -> str:
        return f"CP^{self.n}"


@dataclass(frozen=True)
class ProductOfProjectiveSpaces(ManifoldModel):
    dims: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"Factor dimensions must be positive, got {self.dims}")

    @property
    def dimension(self) -> int:
        return sum(self.dims)

    @property
    def label(self) -> str:
        return " x ".join(f"CP^{d}" for d in self.dims)


@dataclass(frozen=True)
class RawChernData(ManifoldModel):
    """Externally supplied Chern numbers; nothing else about the manifold is known"""

    weight: int
    numbers: Mapping[Partition, int] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"Complex dimension must be at least 1, got {self.weight}")
        clean = {}
        for partition, value in self.numbers.items():
            if not isinstance(partition, Partition):
                partition = Partition.from_parts(partition)
            if partition.weight != self.weight:
                raise WeightMismatch(f"Partition {partition} does not have weight {self.weight}")
            clean[partition] = int(value)
        object.__setattr__(self, "numbers", {p: clean[p] for p in sorted(clean)})

    @property
    def dimension(self) -> int:
        return self.weight

    @property
    def label(self) -> str:
        return f"raw(n={self.weight})"


@lru_cache(maxsize=None)
def _product_chern_numbers(dims: Tuple[int, ...]) -> Dict[Partition, int]:
    # Z[g_1..g_k] / (g_f^(n_f + 1)), with the top class g_1^n_1 ... g_k^n_k evaluating to 1
    n = sum(dims)
    k = len(dims)
    caps = {"degree_cap": n, "var_caps": dims}
    total = MvPoly.constant(1, k, **caps)
    for f, d in enumerate(dims):
        factor_terms = {
            tuple(j if i == f else 0 for i in range(k)): math.comb(d + 1, j) for j in range(d + 1)
        }
        total = total * MvPoly(k, factor_terms, **caps)
    classes = [total.homogeneous_component(i) for i in range(n + 1)]
    numbers = {}
    for partition in partitions_of(n):
        value = mv_product([classes[p] for p in partition.parts]).coefficient(dims)
        numbers[partition] = int(value)
    return numbers


def chern_numbers(m: ManifoldModel) -> Dict[Partition, int]:
    """c_lambda[M] for every partition of the complex dimension"""
    if isinstance(m, ProjectiveSpace):
        return {
            p: math.prod(math.comb(m.n + 1, part) for part in p.parts)
            for p in partitions_of(m.n)
        }
    if isinstance(m, ProductOfProjectiveSpaces):
        return dict(_product_chern_numbers(m.dims))
    if isinstance(m, RawChernData):
        return dict(m.numbers)
    raise TypeError(f"Unsupported manifold model: {type(m).__name__}")


def evaluate(combo: ChernCombo, m: ManifoldModel) -> Fraction:
    """sum_lambda combo(lambda) * c_lambda[M], exactly"""
    if combo.weight != m.dimension:
        raise WeightMismatch(
            f"Combination of weight {combo.weight} cannot be evaluated on {m.label} "
            f"(dimension {m.dimension})")
    numbers = chern_numbers(m)
    total = Fraction(0)
    for partition, coeff in combo.items():
        if partition not in numbers:
            raise IncompleteChernData(f"{m.label} has no value for c_{partition}")
        total += coeff * numbers[partition]
    return total


def is_spin(m: ManifoldModel) -> bool:
    """c1 even: for CP^n that is n odd, for products every factor odd"""
    if isinstance(m, ProjectiveSpace):
        return m.n % 2 == 1
    if isinstance(m, ProductOfProjectiveSpaces):
        return all(d % 2 == 1 for d in m.dims)
    raise NotDecidable(f"Spin cannot be decided from Chern numbers alone ({m.label})")


def _spin_or_none(m: ManifoldModel) -> Optional[bool]:
    try:
        return is_spin(m)
    except NotDecidable:
        return None


@dataclass(frozen=True)
class DivisibilityRecord:
    model: str
    n: int
    value: int
    divisible_by_8: bool
    quotient: Optional[int]
    remainder: int
    spin: Optional[bool]

    @property
    def violates(self) -> bool:
        """A spin model whose value is not a multiple of 8"""
        return bool(self.spin) and not self.divisible_by_8

    def format(self) -> str:
        text = f"value={self.value} divisible={str(self.divisible_by_8).lower()}"
        if self.divisible_by_8:
            return f"{text} quotient={self.quotient}"
        return f"{text} remainder={self.remainder}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "n": self.n,
            "value": self.value,
            "divisible_by_8": self.divisible_by_8,
            "quotient": self.quotient,
            "remainder": self.remainder,
            "spin": self.spin,
        }


def divisibility_combo(n: int) -> ChernCombo:
    """2(n-1) c1 c_{n-1} + c1^2 c_{n-2}"""
    return ChernCombo.from_monomials(n, [(2 * (n - 1), [1, n - 1]), (1, [1, 1, n - 2])])


def divisibility_check(m: ManifoldModel) -> DivisibilityRecord:
    n = m.dimension
    if n < 2:
        raise ValueError(f"The divisibility check needs dimension >= 2, got {n}")
    value = evaluate(divisibility_combo(n), m)
    if value.denominator != 1:
        raise ValueError(f"Chern numbers of {m.label} produced a non-integer {value}")
    value = value.numerator
    quotient, remainder = divmod(value, 8)
    record = DivisibilityRecord(
        model=m.label,
        n=n,
        value=value,
        divisible_by_8=remainder == 0,
        quotient=quotient if remainder == 0 else None,
        remainder=remainder,
        spin=_spin_or_none(m),
    )
    if record.violates:
        logger.warning(f"Spin model {m.label} fails divisibility by 8: {record.format()}")
    return record


def projective_divisibility_closed_form(k: int) -> int:
    """8(k+1)^2 [k(2k+1) + k(k+1)(2k+1)/3], the value for CP^(2k+1)"""
    value = 8 * (k + 1) ** 2 * (Fraction(k * (2 * k + 1)) + Fraction(k * (k + 1) * (2 * k + 1), 3))
    return int(value)


@dataclass(frozen=True)
class IndexTable:
    kind: GenusKind
    model: str
    values: Tuple[Fraction, ...]

    @property
    def integral(self) -> Tuple[bool, ...]:
        return tuple(v.denominator == 1 for v in self.values)

    @property
    def all_integral(self) -> bool:
        return all(self.integral)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "model": self.model,
            "values": [format_rational(v) for v in self.values],
            "integral": list(self.integral),
        }


def index_table(kind: Union[str, GenusKind], m: ManifoldModel, max_n: int = DEFAULT_MAX_N) -> IndexTable:
    """Evaluate every row of the genus table on the model"""
    kind = GenusKind.parse(kind)
    table = genus_table(kind, m.dimension, max_n)
    values = tuple(evaluate(row, m) for row in table.rows)
    result = IndexTable(kind, m.label, values)
    if not result.all_integral:
        logger.info(f"{kind.value} index table of {m.label} has non-integral entries")
    return result


def libgober_wood_number(m: ManifoldModel) -> Dict[str, Any]:
    """n(3n-5)/24 c_n + 1/12 c1 c_{n-1}, an integer on every almost-complex manifold"""
    value = evaluate(libgober_wood_rhs(m.dimension), m)
    return {"model": m.label, "value": format_rational(value), "integral": value.denominator == 1}


def _alternating(values: Tuple[Fraction, ...], k: int) -> Fraction:
    return sum(((-1) ** p * math.comb(p, k) * v for p, v in enumerate(values)), Fraction(0))


def recover_chern_numbers(m: ManifoldModel, max_n: int = DEFAULT_MAX_N) -> Dict[str, Any]:
    """Solve the weighted A and L index sums back for c_n, c1c_{n-1}, c1^2c_{n-2}, c2c_{n-2}.

    Only the numeric index tables feed the solve; the directly computed
    Chern numbers are reported next to the recovered ones.
    """
    n = m.dimension
    if n < 2:
        raise ValueError(f"Recovery needs dimension >= 2, got {n}")
    a_values = index_table(GenusKind.A_Y, m, max_n).values
    l_values = index_table(GenusKind.L_Y, m, max_n).values

    c_n = _alternating(a_values, 0)
    c1_cn1 = 2 * _alternating(a_values, 1) - n * c_n
    c1sq_cn2 = 8 * (_alternating(a_values, 2) - Fraction(n * (3 * n - 5), 24) * c_n
                    - Fraction(3 * n - 2, 12) * c1_cn1)
    l_part = (Fraction(2) ** (2 - n) * _alternating(l_values, 2) - Fraction(n * (3 * n - 5), 6) * c_n
              - Fraction(3 * n - 2, 3) * c1_cn1)
    c2_cn2 = c1sq_cn2 - l_part

    recovered = [
        ("c_n", [n], c_n),
        ("c1c_{n-1}", [1, n - 1], c1_cn1),
        ("c1^2c_{n-2}", [1, 1, n - 2], c1sq_cn2),
        ("c2c_{n-2}", [2, n - 2], c2_cn2),
    ]
    entries: List[Dict[str, Any]] = []
    for name, indices, value in recovered:
        direct = evaluate(ChernCombo.from_monomials(n, [(1, indices)]), m)
        entries.append({
            "number": name,
            "partition": list(Partition.from_parts(indices).parts),
            "recovered": format_rational(value),
            "direct": format_rational(direct),
            "match": value == direct,
        })
    matches = all(entry["match"] for entry in entries)
    if not matches:
        logger.warning(f"Recovered Chern numbers of {m.label} disagree with the direct values")
    return {"model": m.label, "n": n, "entries": entries, "match": matches}


def _parse_projective(token: str) -> int:
    token = token.strip().lower()
    digits = token[3:] if token.startswith("cp:") else token[2:] if token.startswith("cp") else ""
    if not digits.isdigit() or int(digits) < 1:
        raise ModelSpecError(f"Expected a projective factor like cp3, got {token!r}")
    return int(digits)


def raw_model_from_document(document: Mapping[str, Any]) -> RawChernData:
    """RawChernData from the ChernCombo-shaped JSON schema with integer coefficients"""
    try:
        weight = int(document["weight"])
        numbers: Dict[Partition, int] = {}
        for entry in document["terms"]:
            coeff = Fraction(str(entry["coeff"]))
            if coeff.denominator != 1:
                raise ModelSpecError(f"Chern numbers must be integers, got {entry['coeff']}")
            partition = Partition.from_parts(entry["partition"])
            if partition in numbers:
                raise ModelSpecError(f"Chern number c_{partition} is given twice")
            numbers[partition] = coeff.numerator
        return RawChernData(weight, numbers)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelSpecError(f"Malformed Chern data document: {e}") from e


def parse_model(spec: str) -> ManifoldModel:
    """Parse "cp:3", "prod:cp1,cp3", inline JSON Chern data or a path to a JSON file"""
    text = spec.strip()
    try:
        if text.startswith("{"):
            return raw_model_from_document(json.loads(text))
        if text.lower().startswith("prod:"):
            tokens = [t for t in text[5:].split(",") if t.strip()]
            if not tokens:
                raise ModelSpecError("A product needs at least one factor")
            return ProductOfProjectiveSpaces(tuple(_parse_projective(t) for t in tokens))
        if text.lower().startswith("cp"):
            return ProjectiveSpace(_parse_projective(text))
        path = Path(text)
        if path.suffix.lower() == ".json" and path.exists():
            with open(path, "r") as file:
                return raw_model_from_document(json.load(file))
    except json.JSONDecodeError as e:
        raise ModelSpecError(f"Invalid JSON Chern data: {e}") from e
    except WeightMismatch as e:
        raise ModelSpecError(str(e)) from e
    raise ModelSpecError(f"Unrecognized model specification: {spec!r}")


def manifold_summary(m: ManifoldModel, kind: Union[str, GenusKind], max_n: int = DEFAULT_MAX_N) -> Dict[str, Any]:
    """Everything the manifold command reports for one model and genus kind"""
    numbers = chern_numbers(m)
    table = index_table(kind, m, max_n)
    summary: Dict[str, Any] = {
        "model": m.label,
        "n": m.dimension,
        "spin": _spin_or_none(m),
        "chern_numbers": {
            "weight": m.dimension,
            "terms": [{"partition": list(p.parts), "coeff": v} for p, v in numbers.items()],
        },
        "index_table": table.to_dict(),
        "libgober_wood": libgober_wood_number(m),
    }
    if m.dimension >= 2:
        summary["recovered"] = recover_chern_numbers(m, max_n)
    return summary
