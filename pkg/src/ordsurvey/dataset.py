"""Ordinal survey datasets: CSV parsing, validation, labeled/unlabeled split, synthetic data.

CSV dialect: comma separated, first row is the header, an empty cell is a
missing value, UTF-8. Every present value must be an integer inside the
declared scale of its column; nothing is rebinned.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ordsurvey.errors import InputError

KANO_TYPES = ("basic", "performance", "excitement", "noise")


class MissingResponseColumn(InputError):
    def __init__(self, column: str):
        super().__init__(f"response column {column!r} not found in header")
        self.column = column


class SchemaViolation(InputError):
    """A cell that is not an integer inside its column's scale.

    ``row`` is the 1-based data row number (the header is not counted).
    """

    def __init__(self, row: int, column: str | None, value: str, reason: str = ""):
        where = f"column {column!r}" if column is not None else "row arity"
        msg = f"row {row}, {where}: {value!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)
        self.row = row
        self.column = column
        self.value = value
        self.reason = reason


class EmptyDataset(InputError):
    pass


class InvalidSpec(InputError):
    pass


@dataclass(frozen=True)
class Scale:
    min: int
    max: int

    def __post_init__(self):
        if int(self.min) != self.min or int(self.max) != self.max:
            raise InputError(f"scale bounds must be integers, got {self.min}..{self.max}")
        if self.max <= self.min:
            raise InputError(f"scale max must exceed min, got {self.min}..{self.max}")

    @property
    def values(self) -> range:
        return range(self.min, self.max + 1)

    @property
    def size(self) -> int:
        return self.max - self.min + 1

    @property
    def span(self) -> int:
        return self.max - self.min

    def __contains__(self, v) -> bool:
        return self.min <= v <= self.max

    @classmethod
    def parse(cls, text: str) -> "Scale":
        """Parse ``"1:5"`` (or ``"1..5"``) into a scale."""
        sep = ".." if ".." in text else ":"
        try:
            lo, hi = (int(p) for p in text.split(sep))
        except ValueError:
            raise InputError(f"bad scale {text!r}, expected MIN:MAX") from None
        return cls(lo, hi)

    def to_list(self) -> list[int]:
        return [self.min, self.max]


LIKERT = Scale(1, 5)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class OrdinalDataset:
    """Respondents x ordinal attributes plus an ordinal response.

    ``X`` is an (n, a) float array and ``y`` an (n,) float array; missing
    cells are NaN. Both arrays are read-only.
    """

    attribute_names: tuple[str, ...]
    scales: tuple[Scale, ...]
    response_name: str
    response_scale: Scale
    X: np.ndarray
    y: np.ndarray
    row_ids: tuple[str, ...]
    id_column: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))
        object.__setattr__(self, "scales", tuple(self.scales))
        object.__setattr__(self, "row_ids", tuple(str(r) for r in self.row_ids))
        X = _frozen(self.X).reshape(len(self.row_ids), len(self.attribute_names))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", _frozen(self.y).reshape(len(self.row_ids)))
        if len(set(self.attribute_names)) != len(self.attribute_names):
            raise InputError("attribute names must be unique")
        if len(self.scales) != len(self.attribute_names):
            raise InputError("one scale per attribute is required")
        for a, sc in enumerate(self.scales):
            col = X[:, a]
            present = col[~np.isnan(col)]
            if present.size and (present.min() < sc.min or present.max() > sc.max
                                 or np.any(present != np.round(present))):
                raise InputError(f"attribute {self.attribute_names[a]!r} has values outside {sc.min}..{sc.max}")
        present = self.y[~np.isnan(self.y)]
        if present.size and (present.min() < self.response_scale.min
                             or present.max() > self.response_scale.max):
            raise InputError("response values outside the response scale")

    @property
    def n(self) -> int:
        return len(self.row_ids)

    @property
    def n_attributes(self) -> int:
        return len(self.attribute_names)

    @property
    def labeled_mask(self) -> np.ndarray:
        return ~np.isnan(self.y)

    def schema(self) -> dict:
        """Keyword arguments that make :func:`parse_dataset` rebuild this dataset."""
        scales = dict(zip(self.attribute_names, self.scales))
        scales[self.response_name] = self.response_scale
        return {"response": self.response_name, "scales": scales, "id_column": self.id_column}

    def attribute_index(self, name: str) -> int:
        try:
            return self.attribute_names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def take(self, indices: Iterable[int]) -> "OrdinalDataset":
        idx = np.asarray(list(indices), dtype=int)
        return OrdinalDataset(
            self.attribute_names, self.scales, self.response_name, self.response_scale,
            self.X[idx] if idx.size else np.empty((0, self.n_attributes)),
            self.y[idx], tuple(self.row_ids[i] for i in idx), self.id_column,
        )

    def with_response(self, y: np.ndarray) -> "OrdinalDataset":
        return OrdinalDataset(self.attribute_names, self.scales, self.response_name,
                              self.response_scale, self.X, y, self.row_ids, self.id_column)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrdinalDataset):
            return NotImplemented
        return (
            self.attribute_names == other.attribute_names
            and self.scales == other.scales
            and self.response_name == other.response_name
            and self.response_scale == other.response_scale
            and self.row_ids == other.row_ids
            and self.id_column == other.id_column
            and np.array_equal(self.X, other.X, equal_nan=True)
            and np.array_equal(self.y, other.y, equal_nan=True)
        )

    __hash__ = None


def _read_rows(csv_text: str) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(io.StringIO(csv_text))
    rows = [r for r in reader if r]
    if not rows:
        raise EmptyDataset("no header row")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def _cell(text: str, scale: Scale, row: int, column: str) -> tuple[float, SchemaViolation | None]:
    text = text.strip()
    if text == "":
        return math.nan, None
    try:
        v = int(text)
    except ValueError:
        return math.nan, SchemaViolation(row, column, text, "not an integer")
    if v not in scale:
        return math.nan, SchemaViolation(row, column, text, f"outside {scale.min}..{scale.max}")
    return float(v), None


def _resolve_schema(header, response, scales, default_scale, id_column):
    if response not in header:
        raise MissingResponseColumn(response)
    if len(set(header)) != len(header):
        raise InputError("duplicate column names in header")
    if id_column is not None and id_column not in header:
        raise InputError(f"id column {id_column!r} not found in header")
    scales = dict(scales or {})
    attrs = [h for h in header if h not in (response, id_column)]
    col_scales = {h: scales.get(h, default_scale) for h in attrs + [response]}
    return attrs, col_scales


def _scan(csv_text, response, scales, default_scale, id_column, stop_at_first):
    header, body = _read_rows(csv_text)
    attrs, col_scales = _resolve_schema(header, response, scales, default_scale, id_column)
    pos = {h: i for i, h in enumerate(header)}
    X = np.full((len(body), len(attrs)), np.nan)
    y = np.full(len(body), np.nan)
    # invalid cells are NaN too; this mask keeps them apart from empty cells
    bad = np.zeros((len(body), len(attrs) + 1), dtype=bool)
    ids: list[str] = []
    violations: list[SchemaViolation] = []
    for r, raw in enumerate(body):
        rownum = r + 1
        if len(raw) != len(header):
            violations.append(SchemaViolation(rownum, None, ",".join(raw),
                                              f"expected {len(header)} cells, got {len(raw)}"))
            if stop_at_first:
                raise violations[0]
            bad[r] = True
            ids.append(str(rownum))
            continue
        for a, name in enumerate(attrs):
            X[r, a], err = _cell(raw[pos[name]], col_scales[name], rownum, name)
            if err:
                violations.append(err)
                bad[r, a] = True
        y[r], err = _cell(raw[pos[response]], col_scales[response], rownum, response)
        if err:
            violations.append(err)
            bad[r, -1] = True
        if violations and stop_at_first:
            raise violations[0]
        ids.append(raw[pos[id_column]].strip() if id_column else str(rownum))
    return header, attrs, col_scales, X, y, ids, violations, bad


def parse_dataset(
    csv_text: str,
    response: str,
    scales: Mapping[str, Scale] | None = None,
    default_scale: Scale = LIKERT,
    id_column: str | None = None,
) -> OrdinalDataset:
    """Parse CSV text into an :class:`OrdinalDataset`.

    Columns not listed in ``scales`` get ``default_scale``. The optional
    ``id_column`` supplies row identifiers; without it rows are numbered
    ``"1"``, ``"2"``, ... Raises :class:`SchemaViolation` at the first bad
    cell; use :func:`check_csv` to collect every violation.
    """
    _, attrs, col_scales, X, y, ids, _, _ = _scan(csv_text, response, scales, default_scale,
                                               id_column, stop_at_first=True)
    if not ids:
        raise EmptyDataset("header present but no data rows")
    return OrdinalDataset(tuple(attrs), tuple(col_scales[a] for a in attrs), response,
                          col_scales[response], X, y, tuple(ids), id_column)


@dataclass
class CsvDiagnostics:
    attribute_names: list[str]
    n_rows: int
    violations: list[SchemaViolation]
    missing: dict[str, int]
    value_counts: dict[str, dict[int, int]]
    scales: dict[str, Scale] = field(default_factory=dict)

    def unused_values(self) -> dict[str, list[int]]:
        """Scale values no respondent chose, per column."""
        return {
            col: [v for v, c in counts.items() if c == 0]
            for col, counts in self.value_counts.items()
            if any(c == 0 for c in counts.values())
        }


def check_csv(
    csv_text: str,
    response: str,
    scales: Mapping[str, Scale] | None = None,
    default_scale: Scale = LIKERT,
    id_column: str | None = None,
) -> CsvDiagnostics:
    """Validate CSV text and collect every schema violation plus per-column counts.

    Header-level problems (missing response column, empty file) still raise.
    """
    header, attrs, col_scales, X, y, ids, violations, bad = _scan(
        csv_text, response, scales, default_scale, id_column, stop_at_first=False)
    missing, counts = {}, {}
    for c, (name, col) in enumerate([*zip(attrs, X.T), (response, y)]):
        missing[name] = int((np.isnan(col) & ~bad[:, c]).sum())
        counts[name] = {v: int((col == v).sum()) for v in col_scales[name].values}
    return CsvDiagnostics(attrs + [response], len(ids), violations, missing, counts, col_scales)


def _fmt(v: float) -> str:
    return "" if math.isnan(v) else str(int(v))


def serialize_dataset(ds: OrdinalDataset) -> str:
    """Write ``ds`` back to the CSV dialect read by :func:`parse_dataset`.

    Column order: id column (when the dataset has one), attributes, response.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    lead = [ds.id_column] if ds.id_column else []
    w.writerow(lead + list(ds.attribute_names) + [ds.response_name])
    for i in range(ds.n):
        lead = [ds.row_ids[i]] if ds.id_column else []
        w.writerow(lead + [_fmt(v) for v in ds.X[i]] + [_fmt(ds.y[i])])
    return buf.getvalue()


def split_labeled(ds: OrdinalDataset) -> tuple[OrdinalDataset, OrdinalDataset]:
    """Split into rows with a present response and rows without one."""
    mask = ds.labeled_mask
    return ds.take(np.flatnonzero(mask)), ds.take(np.flatnonzero(~mask))


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic survey with planted Kano-type attributes.

    ``types[a]`` is one of basic, performance, excitement, noise. ``pivots[a]``
    is required for basic and excitement attributes and ignored otherwise.
    ``noise`` is the standard deviation of Gaussian noise added to the
    contribution sum after it has been mapped onto [0, 1].
    """

    n: int
    types: tuple[str, ...]
    pivots: tuple[int | None, ...] | None = None
    noise: float = 0.0
    scales: tuple[Scale, ...] | None = None
    response_scale: Scale = LIKERT
    names: tuple[str, ...] | None = None

    def validated(self) -> "SyntheticSpec":
        a = len(self.types)
        if self.n < 1:
            raise InvalidSpec("n must be at least 1")
        bad = [t for t in self.types if t not in KANO_TYPES]
        if bad:
            raise InvalidSpec(f"unknown attribute types {bad}")
        if not any(t != "noise" for t in self.types):
            raise InvalidSpec("at least one planted (non-noise) attribute is required")
        if not 0.0 <= self.noise <= 1.0:
            raise InvalidSpec("noise level must lie in [0, 1]")
        scales = tuple(self.scales) if self.scales is not None else (LIKERT,) * a
        pivots = tuple(self.pivots) if self.pivots is not None else (None,) * a
        names = tuple(self.names) if self.names is not None else tuple(f"a{i + 1}" for i in range(a))
        if not len(scales) == len(pivots) == len(names) == a:
            raise InvalidSpec("types, pivots, scales and names must have equal length")
        for t, p, sc in zip(self.types, pivots, scales):
            if t in ("basic", "excitement") and (p is None or p not in sc):
                raise InvalidSpec(f"{t} attribute needs a pivot inside {sc.min}..{sc.max}, got {p}")
        return SyntheticSpec(self.n, tuple(self.types), pivots, self.noise, scales,
                             self.response_scale, names)


def _contribution(kind: str, v: np.ndarray, pivot: int | None, sc: Scale):
    """Contribution of one attribute and its theoretical (low, high) range."""
    if kind == "performance":
        return v, (sc.min, sc.max)
    if kind == "basic":
        return np.minimum(v, pivot), (sc.min, pivot)
    if kind == "excitement":
        return np.maximum(v - pivot, 0), (0, sc.max - pivot)
    return np.zeros_like(v), (0, 0)


def generate_synthetic(spec: SyntheticSpec, seed: int) -> OrdinalDataset:
    """Draw a synthetic dataset whose response follows the planted attribute types.

    Attributes are uniform over their scales. The contribution sum is mapped
    affinely from its theoretical range onto [0, 1], Gaussian noise is added,
    and the result is mapped onto the response scale, rounded half up and
    clamped.
    """
    spec = spec.validated()
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.integers(sc.min, sc.max + 1, size=spec.n) for sc in spec.scales])
    X = X.astype(float)
    total = np.zeros(spec.n)
    lo = hi = 0.0
    for a, (kind, pivot, sc) in enumerate(zip(spec.types, spec.pivots, spec.scales)):
        c, (clo, chi) = _contribution(kind, X[:, a], pivot, sc)
        total += c
        lo += clo
        hi += chi
    if hi <= lo:
        raise InvalidSpec("planted attributes have no variation (check pivots)")
    u = (total - lo) / (hi - lo)
    if spec.noise > 0:
        u = u + spec.noise * rng.standard_normal(spec.n)
    rs = spec.response_scale
    y = np.clip(np.floor(rs.min + u * rs.span + 0.5), rs.min, rs.max)
    return OrdinalDataset(spec.names, spec.scales, "response", rs, X, y,
                          tuple(str(i + 1) for i in range(spec.n)))


def kano_spec(n: int, noise: float, per_type: int = 3, pivot: int = 3,
              extra_noise: int = 0, scale: Scale = LIKERT) -> SyntheticSpec:
    """Convenience spec with ``per_type`` attributes of each planted Kano type."""
    types: list[str] = []
    for t in ("performance", "basic", "excitement"):
        types += [t] * per_type
    types += ["noise"] * extra_noise
    pivots = [None if t in ("performance", "noise") else pivot for t in types]
    return SyntheticSpec(n, tuple(types), tuple(pivots), noise, (scale,) * len(types))


def dataset_from_arrays(X: Sequence[Sequence[float]], y: Sequence[float],
                        scales: Sequence[Scale] | Scale = LIKERT,
                        response_scale: Scale = LIKERT,
                        names: Sequence[str] | None = None,
                        row_ids: Sequence[str] | None = None) -> OrdinalDataset:
    """Build a dataset from in-memory values; ``None`` or NaN marks missing."""
    X = np.array([[math.nan if v is None else v for v in row] for row in X], dtype=float)
    if X.ndim == 1:
        X = X.reshape(len(X), 0)
    n, a = X.shape
    y = np.array([math.nan if v is None else v for v in y], dtype=float)
    if isinstance(scales, Scale):
        scales = (scales,) * a
    names = tuple(names) if names is not None else tuple(f"a{i + 1}" for i in range(a))
    row_ids = tuple(row_ids) if row_ids is not None else tuple(str(i + 1) for i in range(n))
    return OrdinalDataset(names, tuple(scales), "response", response_scale, X, y, row_ids)
