"""
Filename: kernel.py

Description:
    Kernel functions and Gram-matrix assembly for the kernelized
    dual of the node splitter.

    Kernels are written in a small notation shared by the command
    line and the config file: linear, quad, poly:d,c, gauss[:s2].
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, auto
from typing import Any

import numpy as np
from scipy.spatial.distance import cdist

from dipoletree.utilities.errors import DimensionError, UnknownKernel, UsageError


class KernelKind(Enum):
    """ Map of supported kernel families """
    LINEAR = auto()
    POLYNOMIAL = auto()
    GAUSSIAN = auto()

    @property
    def notation(self) -> str:
        """ Returns the canonical notation via direct lookup """
        return _LOOKUP_KINDS[self]

    @classmethod
    def from_notation(cls, text: str) -> KernelKind:
        """ Creation of kernel kind via notation direct lookup """
        kind = _LOOKUP_NOTATION.get(text.strip().lower())
        if kind is None:
            raise UnknownKernel(text, cls.all_notations())

        return kind

    @classmethod
    def all_notations(cls) -> list[str]:
        """ Returns a list of all accepted notations """
        return list(_LOOKUP_NOTATION.keys())


# Direct lookup table for kernel notation
_LOOKUP_NOTATION = {
    "linear": KernelKind.LINEAR,
    "lin": KernelKind.LINEAR,
    "quad": KernelKind.POLYNOMIAL,
    "poly": KernelKind.POLYNOMIAL,
    "polynomial": KernelKind.POLYNOMIAL,
    "gauss": KernelKind.GAUSSIAN,
    "gaussian": KernelKind.GAUSSIAN,
    "rbf": KernelKind.GAUSSIAN,
}

_LOOKUP_KINDS = {
    KernelKind.LINEAR: "linear",
    KernelKind.POLYNOMIAL: "poly",
    KernelKind.GAUSSIAN: "gauss",
}


@dataclass(frozen=True, slots=True)
class KernelSpec:
    """
    Kernel parameterization.

    A Gaussian spec with variance None is unresolved: it takes the
    default variance of the training points once `resolve` is called.
    """
    kind: KernelKind = KernelKind.LINEAR
    degree: int = 1
    offset: float = 0.0
    variance: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, KernelKind):
            raise TypeError(f"Kernel kind must be a KernelKind, not {type(self.kind)}")

        if isinstance(self.degree, bool) or not isinstance(self.degree, (int, np.integer)):
            raise TypeError(f"Kernel degree must be an integer, not {type(self.degree)}")

        if self.degree < 1:
            raise UsageError("KernelSpec", f"degree must be >= 1, got {self.degree}")

        if self.offset < 0:
            raise UsageError("KernelSpec", f"offset must be >= 0, got {self.offset}")

        if self.variance is not None and not self.variance > 0:
            raise UsageError("KernelSpec", f"variance must be > 0, got {self.variance}")

    @classmethod
    def linear(cls) -> KernelSpec:
        """ u . v """
        return cls(KernelKind.LINEAR)

    @classmethod
    def polynomial(cls, degree: int, offset: float) -> KernelSpec:
        """ (u . v + c)^d """
        return cls(KernelKind.POLYNOMIAL, int(degree), float(offset))

    @classmethod
    def quadratic(cls) -> KernelSpec:
        """ (u . v + 1)^2 """
        return cls.polynomial(2, 1.0)

    @classmethod
    def gaussian(cls, variance: float | None = None) -> KernelSpec:
        """ exp(-|u - v|^2 / (2 s2)) """
        return cls(KernelKind.GAUSSIAN, variance=None if variance is None else float(variance))

    @classmethod
    def parse(cls, text: str) -> KernelSpec:
        """ Parses linear | quad | poly:d,c | gauss[:s2] """
        head, _, tail = text.strip().partition(":")
        kind = KernelKind.from_notation(head)
        name = head.strip().lower()

        try:
            if kind is KernelKind.LINEAR:
                if tail:
                    raise UnknownKernel(text, KernelKind.all_notations())
                return cls.linear()

            if kind is KernelKind.GAUSSIAN:
                return cls.gaussian(float(tail) if tail else None)

            if name == "quad":
                if tail:
                    raise UnknownKernel(text, KernelKind.all_notations())
                return cls.quadratic()

            degree, _, offset = tail.partition(",")
            if not degree:
                raise UsageError("KernelSpec.parse", f"{text!r} needs poly:d,c")

            return cls.polynomial(int(degree), float(offset) if offset else 0.0)

        except ValueError as e:
            if isinstance(e, UsageError):
                raise
            raise UsageError("KernelSpec.parse", f"{text!r} has malformed parameters") from e

    @property
    def notation(self) -> str:
        """ Inverse of parse """
        if self.kind is KernelKind.LINEAR:
            return "linear"

        if self.kind is KernelKind.POLYNOMIAL:
            return f"poly:{self.degree},{self.offset:g}"

        return "gauss" if self.variance is None else f"gauss:{self.variance:.17g}"

    @property
    def is_resolved(self) -> bool:
        """ False only for a Gaussian awaiting its default variance """
        return self.kind is not KernelKind.GAUSSIAN or self.variance is not None

    def resolve(self, points: np.ndarray) -> KernelSpec:
        """ Fills an omitted Gaussian variance from the given points """
        if self.is_resolved:
            return self

        return replace(self, variance=default_gaussian_variance(points))

    def to_dict(self) -> dict[str, Any]:
        """ Returns a JSON compatible record """
        return {
            "kind": self.kind.notation, "degree": int(self.degree),
            "offset": float(self.offset), "variance": self.variance,
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> KernelSpec:
        """ Rebuilds a spec from to_dict output """
        variance = record.get("variance")
        return cls(
            KernelKind.from_notation(record["kind"]), int(record.get("degree", 1)),
            float(record.get("offset", 0.0)), None if variance is None else float(variance),
        )

    def __str__(self) -> str:
        return self.notation


def _as_points(points: Any) -> np.ndarray:
    """ Coerces a point list to a 2-D float array """
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        array = array.reshape(1, -1)

    return array


def kernel_eval(spec: KernelSpec, u: np.ndarray, v: np.ndarray) -> float:
    """ K(u, v) for a single pair """
    u, v = np.asarray(u, dtype=float).ravel(), np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise DimensionError("kernel_eval", u.shape[0], v.shape[0])

    return float(cross_gram(spec, u.reshape(1, -1), v.reshape(1, -1))[0, 0])


def cross_gram(spec: KernelSpec, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """ Matrix of K(left_i, right_j) """
    left, right = _as_points(left), _as_points(right)
    if left.shape[1] != right.shape[1]:
        raise DimensionError("cross_gram", left.shape[1], right.shape[1])

    if spec.kind is KernelKind.LINEAR:
        return left @ right.T

    if spec.kind is KernelKind.POLYNOMIAL:
        return (left @ right.T + spec.offset) ** spec.degree

    if spec.variance is None:
        raise UsageError("cross_gram", "Gaussian variance is unresolved, call resolve() first")

    return np.exp(-cdist(left, right, "sqeuclidean") / (2.0 * spec.variance))


def gram_matrix(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    """ Symmetric Gram matrix over node-local points """
    points = _as_points(points)
    if points.shape[0] == 0:
        raise UsageError("gram_matrix", "point list is empty")

    gram = cross_gram(spec, points, points)
    gram = 0.5 * (gram + gram.T)

    if spec.kind is KernelKind.GAUSSIAN:
        np.fill_diagonal(gram, 1.0)

    return gram


def default_gaussian_variance(points: Any) -> float:
    """ Mean squared distance to the centroid; 1 when all points coincide """
    if hasattr(points, "covariates"):
        points = points.covariates

    points = _as_points(points)
    centred = points - points.mean(axis=0)
    variance = float(np.mean(np.sum(centred ** 2, axis=1)))

    return variance if variance > 0 else 1.0
