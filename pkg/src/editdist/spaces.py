"""Editable weight spaces.

An editable space is a metric monoid ``(X, combine, zero, distance)`` in which
the norm ``distance(zero, .)`` is additive under ``combine`` and the metric is
invariant under combining both arguments with the same element.  Three
instances are provided:

* :class:`RealSpace` - non-negative reals under addition;
* :class:`ProductSpace` - finite products with a weighted-sum metric;
* :class:`StepSpace` - non-negative step functions on a closed interval with
  the L1 metric.

Weights are plain immutable values (``float``, ``tuple`` or
:class:`StepFunction`); the space object carries the algebra.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Any, Sequence, Union

__all__ = [
    "SpaceMismatchError",
    "StepFunction",
    "EditableSpace",
    "RealSpace",
    "ProductSpace",
    "StepSpace",
    "Weight",
    "space_of",
    "combine",
    "distance",
    "zero",
    "norm",
    "encode_weight",
    "decode_weight",
    "encode_space",
    "decode_space",
]


class SpaceMismatchError(ValueError):
    """Raised when weights from different editable spaces are mixed."""


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function on ``interval``.

    ``pieces[k] = (t_k, v_k)`` means the function equals ``v_k`` on
    ``[t_k, t_{k+1})`` (the last piece runs to the interval end) and is zero
    before ``t_0``.  The constructor canonicalizes the piece list so that equal
    functions compare equal.
    """

    interval: tuple[float, float]
    pieces: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        a, b = (float(x) for x in self.interval)
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise ValueError(f"invalid interval {self.interval!r}")
        prev_t = -math.inf
        prev_v = 0.0
        canon: list[tuple[float, float]] = []
        for t, v in self.pieces:
            t, v = float(t), float(v)
            if not (a <= t <= b):
                raise ValueError(f"breakpoint {t} outside interval [{a}, {b}]")
            if t <= prev_t:
                raise ValueError("breakpoints must be strictly increasing")
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"step values must be finite and non-negative, got {v}")
            prev_t = t
            if t == b:
                continue
            if v == prev_v:
                continue
            canon.append((t, v))
            prev_v = v
        object.__setattr__(self, "interval", (a, b))
        object.__setattr__(self, "pieces", tuple(canon))

    @property
    def breakpoints(self) -> list[float]:
        return [t for t, _ in self.pieces]

    def __call__(self, x: float) -> float:
        k = bisect.bisect_right(self.breakpoints, x) - 1
        return 0.0 if k < 0 else self.pieces[k][1]

    def _grid(self, other: "StepFunction") -> list[float]:
        a, b = self.interval
        return sorted({a, b, *self.breakpoints, *other.breakpoints})


Weight = Union[float, tuple, StepFunction]


@dataclass(frozen=True)
class EditableSpace:
    """Base class; ``tol`` is used for comparisons only, never in the algebra."""

    tol: float = field(default=1e-9, compare=False, kw_only=True)

    def zero(self) -> Weight:  # pragma: no cover - abstract
        raise NotImplementedError

    def combine(self, a: Weight, b: Weight) -> Weight:  # pragma: no cover
        raise NotImplementedError

    def distance(self, a: Weight, b: Weight) -> float:  # pragma: no cover
        raise NotImplementedError

    def validate(self, a: Any) -> Weight:  # pragma: no cover
        raise NotImplementedError

    def split(self, a: Weight, fraction: float) -> tuple[Weight, Weight]:  # pragma: no cover
        raise NotImplementedError

    def norm(self, a: Weight) -> float:
        return self.distance(self.zero(), a)

    def is_zero(self, a: Weight) -> bool:
        return self.norm(a) == 0.0

    def close(self, a: Weight, b: Weight) -> bool:
        return self.distance(a, b) <= self.tol

    def combine_all(self, weights: Sequence[Weight]) -> Weight:
        out = self.zero()
        for w in weights:
            out = self.combine(out, w)
        return out


@dataclass(frozen=True)
class RealSpace(EditableSpace):
    """Non-negative reals with addition and absolute difference."""

    def zero(self) -> float:
        return 0.0

    def validate(self, a: Any) -> float:
        if isinstance(a, (tuple, list, StepFunction)) or isinstance(a, bool):
            raise SpaceMismatchError(f"expected a non-negative real, got {a!r}")
        try:
            x = float(a)
        except (TypeError, ValueError) as exc:
            raise SpaceMismatchError(f"expected a non-negative real, got {a!r}") from exc
        if not math.isfinite(x) or x < 0:
            raise ValueError(f"real weights must be finite and non-negative, got {a!r}")
        return x

    def combine(self, a: Weight, b: Weight) -> float:
        return self.validate(a) + self.validate(b)

    def distance(self, a: Weight, b: Weight) -> float:
        return abs(self.validate(a) - self.validate(b))

    def split(self, a: Weight, fraction: float) -> tuple[float, float]:
        x = self.validate(a)
        lo = x * fraction
        return lo, x - lo


@dataclass(frozen=True)
class ProductSpace(EditableSpace):
    """Finite product of editable spaces; metric is the scaled sum of factor metrics."""

    factors: tuple[EditableSpace, ...] = ()
    scales: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("a product space needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))
        scales = (1.0,) * len(self.factors) if self.scales is None else tuple(float(s) for s in self.scales)
        if len(scales) != len(self.factors):
            raise ValueError("one scale per factor is required")
        if any(not (s > 0 and math.isfinite(s)) for s in scales):
            raise ValueError("product scales must be strictly positive")
        object.__setattr__(self, "scales", scales)

    def zero(self) -> tuple:
        return tuple(f.zero() for f in self.factors)

    def validate(self, a: Any) -> tuple:
        if not isinstance(a, (tuple, list)):
            raise SpaceMismatchError(f"expected a tuple weight, got {a!r}")
        if len(a) != len(self.factors):
            raise SpaceMismatchError(f"tuple arity {len(a)} does not match product arity {len(self.factors)}")
        return tuple(f.validate(x) for f, x in zip(self.factors, a))

    def combine(self, a: Weight, b: Weight) -> tuple:
        a, b = self.validate(a), self.validate(b)
        return tuple(f.combine(x, y) for f, x, y in zip(self.factors, a, b))

    def distance(self, a: Weight, b: Weight) -> float:
        a, b = self.validate(a), self.validate(b)
        return sum(s * f.distance(x, y) for f, s, x, y in zip(self.factors, self.scales, a, b))

    def split(self, a: Weight, fraction: float) -> tuple[tuple, tuple]:
        parts = [f.split(x, fraction) for f, x in zip(self.factors, self.validate(a))]
        return tuple(p[0] for p in parts), tuple(p[1] for p in parts)


@dataclass(frozen=True)
class StepSpace(EditableSpace):
    """Non-negative step functions on ``interval`` with pointwise sum and L1 metric."""

    interval: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "interval", (float(self.interval[0]), float(self.interval[1])))

    def zero(self) -> StepFunction:
        return StepFunction(self.interval)

    def validate(self, a: Any) -> StepFunction:
        if not isinstance(a, StepFunction):
            raise SpaceMismatchError(f"expected a step function, got {a!r}")
        if a.interval != self.interval:
            raise SpaceMismatchError(f"step function on {a.interval} does not live on {self.interval}")
        return a

    def combine(self, a: Weight, b: Weight) -> StepFunction:
        f, g = self.validate(a), self.validate(b)
        grid = f._grid(g)[:-1]
        return StepFunction(self.interval, tuple((t, f(t) + g(t)) for t in grid))

    def distance(self, a: Weight, b: Weight) -> float:
        f, g = self.validate(a), self.validate(b)
        grid = f._grid(g)
        total = 0.0
        for lo, hi in zip(grid[:-1], grid[1:]):
            total += abs(f(lo) - g(lo)) * (hi - lo)
        return total

    def split(self, a: Weight, fraction: float) -> tuple[StepFunction, StepFunction]:
        f = self.validate(a)
        lo = StepFunction(self.interval, tuple((t, v * fraction) for t, v in f.pieces))
        hi = StepFunction(self.interval, tuple((t, v - v * fraction) for t, v in f.pieces))
        return lo, hi


def space_of(a: Weight) -> EditableSpace:
    """Infer the (unit-scaled) space a weight value belongs to."""
    if isinstance(a, StepFunction):
        return StepSpace(a.interval)
    if isinstance(a, (tuple, list)):
        return ProductSpace(tuple(space_of(x) for x in a))
    return RealSpace()


def _pick_space(a: Weight, b: Weight, space: EditableSpace | None) -> EditableSpace:
    if space is not None:
        return space
    sa, sb = space_of(a), space_of(b)
    if sa != sb:
        raise SpaceMismatchError(f"weights {a!r} and {b!r} live in different spaces")
    return sa


def combine(a: Weight, b: Weight, space: EditableSpace | None = None) -> Weight:
    return _pick_space(a, b, space).combine(a, b)


def distance(a: Weight, b: Weight, space: EditableSpace | None = None) -> float:
    return _pick_space(a, b, space).distance(a, b)


def zero(space: EditableSpace) -> Weight:
    return space.zero()


def norm(a: Weight, space: EditableSpace | None = None) -> float:
    return (space or space_of(a)).norm(a)


# -- JSON ---------------------------------------------------------------------


def encode_weight(a: Weight) -> dict:
    if isinstance(a, StepFunction):
        return {"kind": "step", "interval": list(a.interval), "pieces": [list(p) for p in a.pieces]}
    if isinstance(a, (tuple, list)):
        return {"kind": "tuple", "v": [encode_weight(x) for x in a]}
    return {"kind": "real", "v": float(a)}


def decode_weight(obj: Any) -> Weight:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return float(obj)
    if isinstance(obj, list):
        return tuple(decode_weight(x) for x in obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"cannot decode weight {obj!r}")
    kind = obj["kind"]
    if kind == "real":
        return RealSpace().validate(obj["v"])
    if kind == "tuple":
        return tuple(decode_weight(x) for x in obj["v"])
    if kind == "step":
        return StepFunction(tuple(obj["interval"]), tuple(tuple(p) for p in obj.get("pieces", [])))
    raise ValueError(f"unknown weight kind {kind!r}")


def encode_space(space: EditableSpace) -> dict:
    if isinstance(space, ProductSpace):
        return {
            "kind": "product",
            "factors": [encode_space(f) for f in space.factors],
            "scales": list(space.scales),
        }
    if isinstance(space, StepSpace):
        return {"kind": "step", "interval": list(space.interval)}
    return {"kind": "real"}


def decode_space(obj: dict) -> EditableSpace:
    kind = obj.get("kind")
    if kind == "real":
        return RealSpace()
    if kind == "step":
        return StepSpace(tuple(obj["interval"]))
    if kind == "product":
        return ProductSpace(tuple(decode_space(f) for f in obj["factors"]), obj.get("scales"))
    raise ValueError(f"unknown space kind {kind!r}")
