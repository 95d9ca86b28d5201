"""
Filename: data.py

Description:
    Loads, validates and labels right-censored survival data.
    Covariates are standardized at load time and the parameters are
    kept so prediction-time data can be mapped the same way.

    Index pairs are stored as (k, 2) integer arrays with i < j in
    every row, listed in lexicographic order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import pandas as pd

from dipoletree.utilities.errors import (
    DataError, DimensionError, EmptyLabelsError, SchemaError, UsageError
)

logger = logging.getLogger(__name__)

# Guards floor(zeta * ell) against representation error, e.g. 0.29 * 100
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True, slots=True)
class Observation:
    """ A single (covariates, time, status) triple """
    covariates: np.ndarray
    time: float
    status: int

    def __post_init__(self) -> None:
        if not self.time > 0:
            raise DataError("Observation", f"time must be positive, got {self.time!r}")

        if self.status not in (0, 1):
            raise DataError("Observation", f"status must be 0 or 1, got {self.status!r}")

        if not np.all(np.isfinite(self.covariates)):
            raise DataError("Observation", "covariates must be finite")


@dataclass(frozen=True)
class Standardization:
    """ Per-covariate (mean, sd) pairs applied at load """
    means: np.ndarray
    scales: np.ndarray

    @classmethod
    def fit(cls, raw: np.ndarray) -> Standardization:
        """ Sample (n-1) standard deviation; constant columns keep scale 1 """
        raw = np.asarray(raw, dtype=float)
        means = raw.mean(axis=0)

        if raw.shape[0] > 1:
            scales = raw.std(axis=0, ddof=1)
        else:
            scales = np.ones(raw.shape[1])

        scales = np.where(scales > 0, scales, 1.0)
        return cls(means, scales)

    @property
    def p(self) -> int:
        """ Number of covariates """
        return int(self.means.shape[0])

    def apply(self, raw: np.ndarray) -> np.ndarray:
        """ Maps raw covariates to standardized coordinates """
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        if raw.shape[1] != self.p:
            raise DimensionError("Standardization.apply", self.p, raw.shape[1])

        return (raw - self.means) / self.scales

    def invert(self, standardized: np.ndarray) -> np.ndarray:
        """ Maps standardized covariates back to raw units """
        return np.asarray(standardized, dtype=float) * self.scales + self.means

    def to_dict(self) -> dict[str, list[float]]:
        """ Returns a JSON compatible record """
        return {"means": self.means.tolist(), "scales": self.scales.tolist()}

    @classmethod
    def from_dict(cls, record: dict) -> Standardization:
        """ Rebuilds the parameters from a record """
        return cls(np.asarray(record["means"], dtype=float), np.asarray(record["scales"], dtype=float))


@dataclass(frozen=True)
class CsvSchema:
    """ Column mapping for survival CSV files """
    time: str = "time"
    status: str = "status"
    exclude: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Survival observations with standardized covariates.

    Subsets share the parent's standardization, so node data, folds
    and bootstrap resamples all live in the same coordinates.
    """
    covariates: np.ndarray
    times: np.ndarray
    statuses: np.ndarray
    standardization: Standardization
    names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        covariates = np.atleast_2d(np.asarray(self.covariates, dtype=float))
        times = np.asarray(self.times, dtype=float).reshape(-1)
        statuses = np.asarray(self.statuses).reshape(-1)

        if covariates.shape[0] != times.shape[0] or times.shape[0] != statuses.shape[0]:
            raise DataError("Dataset", "covariates, times and statuses differ in length")

        if times.shape[0] == 0:
            raise DataError("Dataset", "a dataset needs at least one observation")

        if np.any(~np.isfinite(covariates)):
            raise DataError("Dataset", "covariates must be finite")

        if np.any(~(times > 0)):
            raise DataError("Dataset", "survival times must be positive")

        if np.any((statuses != 0) & (statuses != 1)):
            raise DataError("Dataset", "statuses must be 0 or 1")

        if covariates.shape[1] != self.standardization.p:
            raise DimensionError("Dataset", self.standardization.p, covariates.shape[1])

        names = self.names or tuple(f"x{q + 1}" for q in range(covariates.shape[1]))
        if len(names) != covariates.shape[1]:
            raise DimensionError("Dataset.names", covariates.shape[1], len(names))

        # Frozen dataclass, normalized views are set once here
        object.__setattr__(self, "covariates", covariates)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "statuses", statuses.astype(np.int64))
        object.__setattr__(self, "names", tuple(names))

    @classmethod
    def from_arrays(
        cls,
        raw_covariates: np.ndarray,
        times: Sequence[float] | np.ndarray,
        statuses: Sequence[int] | np.ndarray,
        names: Sequence[str] | None = None,
        standardization: Standardization | None = None,
    ) -> Dataset:
        """ Standardizes raw covariates (fitting parameters unless given) """
        raw = np.asarray(raw_covariates, dtype=float)
        if raw.ndim == 1:
            # A flat vector is a single covariate column
            raw = raw.reshape(-1, 1)

        if standardization is None:
            if raw.shape[0] < 2:
                raise DataError("Dataset.from_arrays", "at least two observations are required")
            standardization = Standardization.fit(raw)

        return cls(
            standardization.apply(raw), np.asarray(times, dtype=float),
            np.asarray(statuses), standardization, tuple(names or ())
        )

    @property
    def n(self) -> int:
        """ Number of observations """
        return int(self.times.shape[0])

    @property
    def p(self) -> int:
        """ Covariate dimension """
        return int(self.covariates.shape[1])

    @property
    def censored_fraction(self) -> float:
        """ Share of observations with status 0 """
        return float(1.0 - self.statuses.mean())

    def observation(self, index: int) -> Observation:
        """ Returns one row as an Observation """
        return Observation(self.covariates[index], float(self.times[index]), int(self.statuses[index]))

    def __iter__(self) -> Iterator[Observation]:
        for index in range(self.n):
            yield self.observation(index)

    def __len__(self) -> int:
        return self.n

    def subset(self, indices: Sequence[int] | np.ndarray) -> Dataset:
        """ Rows at indices, in the given order """
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size == 0:
            raise DataError("Dataset.subset", "empty subset")

        return Dataset(
            self.covariates[indices], self.times[indices], self.statuses[indices],
            self.standardization, self.names
        )

    def raw_covariates(self) -> np.ndarray:
        """ Covariates in their original units """
        return self.standardization.invert(self.covariates)


def load_csv(
    path: str | Path,
    schema: CsvSchema | None = None,
    standardization: Standardization | None = None,
    covariates: Sequence[str] | None = None,
) -> Dataset:
    """
    Reads a survival CSV file.

    Every numeric column other than time, status and the excluded
    ones is a covariate. When `covariates` is given (prediction time)
    exactly those columns are used, in that order, and the supplied
    standardization is applied instead of fitting a new one.
    """
    schema = schema or CsvSchema()
    path = Path(path)
    if not path.is_file():
        raise DataError("load_csv", f"file {str(path)!r} does not exist")

    try:
        frame = pd.read_csv(path, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError("load_csv", f"{path.name!r} is not a readable CSV: {e}") from e

    frame.columns = [str(name).strip() for name in frame.columns]
    for column in (schema.time, schema.status):
        if column not in frame.columns:
            raise SchemaError(path, column)

    if covariates is None:
        skipped = {schema.time, schema.status, *schema.exclude}
        covariates = [name for name in frame.columns if name not in skipped]
    else:
        for column in covariates:
            if column not in frame.columns:
                raise SchemaError(path, column)

    if not covariates:
        raise DataError("load_csv", f"{path.name!r} has no covariate columns")

    columns = [*covariates, schema.time, schema.status]
    numeric = _numeric_frame(frame[columns], path)

    times = numeric[schema.time].to_numpy(dtype=float)
    statuses = numeric[schema.status].to_numpy(dtype=float)

    if np.any(times <= 0):
        row = int(np.flatnonzero(times <= 0)[0])
        raise DataError("load_csv", f"non-positive time {times[row]!r} on data row {row + 1}")

    if np.any((statuses != 0) & (statuses != 1)):
        row = int(np.flatnonzero((statuses != 0) & (statuses != 1))[0])
        raise DataError("load_csv", f"status {statuses[row]!r} on data row {row + 1} is not 0 or 1")

    if standardization is None and len(frame) < 2:
        raise DataError("load_csv", f"{path.name!r} holds fewer than two observations")

    raw = numeric[list(covariates)].to_numpy(dtype=float)
    dataset = Dataset.from_arrays(
        raw, times, statuses.astype(np.int64), tuple(covariates), standardization
    )

    logger.debug("Loaded %s: n=%d, p=%d", path.name, dataset.n, dataset.p)
    return dataset


def _numeric_frame(frame: pd.DataFrame, path: Path) -> pd.DataFrame:
    """ Rejects missing and non-numeric cells """
    if frame.isna().to_numpy().any():
        row, col = np.argwhere(frame.isna().to_numpy())[0]
        raise DataError("load_csv", f"missing value in column {frame.columns[col]!r}, data row {row + 1}")

    converted = {}
    for column in frame.columns:
        try:
            converted[column] = pd.to_numeric(frame[column], errors="raise")
        except (ValueError, TypeError) as e:
            raise DataError("load_csv", f"non-numeric cell in column {column!r} of {path.name!r}") from e

    return pd.DataFrame(converted)


def write_csv(dataset: Dataset, path: str | Path, schema: CsvSchema | None = None) -> None:
    """ Writes a dataset in the format load_csv reads """
    schema = schema or CsvSchema()
    frame = pd.DataFrame(dataset.raw_covariates(), columns=list(dataset.names))
    frame[schema.time] = dataset.times
    frame[schema.status] = dataset.statuses

    frame.to_csv(Path(path), index=False, encoding="utf-8", float_format="%.12g")


def pair_set(pairs: np.ndarray) -> set[tuple[int, int]]:
    """ Converts a (k, 2) pair array to a set of tuples """
    return {(int(i), int(j)) for i, j in np.asarray(pairs).reshape(-1, 2)}


def right_comparable_pairs(d: Dataset) -> np.ndarray:
    """
    Pairs whose smaller observed time is uncensored.

    Tied times are comparable when either of the tied observations
    is an event.
    """
    first, second = np.triu_indices(d.n, k=1)
    t_first, t_second = d.times[first], d.times[second]
    s_first, s_second = d.statuses[first] == 1, d.statuses[second] == 1

    comparable = np.where(
        t_first < t_second, s_first,
        np.where(t_second < t_first, s_second, s_first | s_second)
    )
    return np.column_stack((first[comparable], second[comparable])).astype(np.int64)


@dataclass(frozen=True, eq=False)
class DipoleLabels:
    """ Pure and mixed dipoles of a node, with the Delta-T vector they came from """
    pure: np.ndarray
    mixed: np.ndarray
    zeta1: float
    zeta2: float
    delta_t: np.ndarray
    comparable: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))

    def __post_init__(self) -> None:
        if not 0 < self.zeta1 < self.zeta2 < 1:
            raise UsageError("DipoleLabels", f"need 0 < zeta1 < zeta2 < 1, got {self.zeta1}, {self.zeta2}")

        object.__setattr__(self, "pure", np.asarray(self.pure, dtype=np.int64).reshape(-1, 2))
        object.__setattr__(self, "mixed", np.asarray(self.mixed, dtype=np.int64).reshape(-1, 2))

    @property
    def n_dipoles(self) -> int:
        """ Number of labelled (pure or mixed) dipoles """
        return int(self.pure.shape[0] + self.mixed.shape[0])

    @property
    def is_empty(self) -> bool:
        """ True when nothing was labelled """
        return self.n_dipoles == 0


def _order_statistic(ordered: np.ndarray, zeta: float) -> float:
    """ Returns Delta-T at index floor(zeta * ell), clamped to [1, ell] """
    ell = ordered.shape[0]
    index = min(max(math.floor(zeta * ell + _FLOOR_GUARD), 1), ell)
    return float(ordered[index - 1])


def label_dipoles(d: Dataset, zeta1: float = 0.3, zeta2: float = 0.6) -> DipoleLabels:
    """ Labels right-comparable pairs as pure, mixed or neither """
    if not 0 < zeta1 < zeta2 < 1:
        raise UsageError("label_dipoles", f"need 0 < zeta1 < zeta2 < 1, got {zeta1}, {zeta2}")

    comparable = right_comparable_pairs(d)
    if comparable.shape[0] == 0:
        raise EmptyLabelsError(d.n)

    delta_t = np.abs(d.times[comparable[:, 0]] - d.times[comparable[:, 1]])
    ordered = np.sort(delta_t)
    pure_cut = _order_statistic(ordered, zeta1)
    mixed_cut = _order_statistic(ordered, zeta2)

    both_events = (d.statuses[comparable[:, 0]] == 1) & (d.statuses[comparable[:, 1]] == 1)
    pure = comparable[both_events & (delta_t < pure_cut)]
    mixed = comparable[delta_t >= mixed_cut]

    return DipoleLabels(pure, mixed, zeta1, zeta2, delta_t, comparable)


def stratified_holdout(
    d: Dataset, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """
    Splits indices into (train, holdout) keeping the status mix.

    Each status group gives floor(fraction * size) rows to the
    holdout; both index arrays come back sorted.
    """
    train, holdout = [], []
    for status in (0, 1):
        group = np.flatnonzero(d.statuses == status)
        group = rng.permutation(group)
        cut = int(math.floor(fraction * group.size))

        holdout.append(group[:cut])
        train.append(group[cut:])

    return np.sort(np.concatenate(train)), np.sort(np.concatenate(holdout))


def stratified_folds(d: Dataset, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """ Splits indices into k folds dealing each status group round robin """
    if k < 2:
        raise UsageError("stratified_folds", f"need at least 2 folds, got {k}")

    if k > d.n:
        raise UsageError("stratified_folds", f"{k} folds exceed {d.n} observations")

    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for status in (0, 1):
        group = rng.permutation(np.flatnonzero(d.statuses == status))
        for position, index in enumerate(group):
            folds[(position + offset) % k].append(int(index))
        offset += group.size

    return [np.sort(np.asarray(fold, dtype=np.int64)) for fold in folds]
