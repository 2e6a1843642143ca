"""p-products of convex bodies and the higher-dimensional systolic bookkeeping.

A p-product ``X (x)_p Y`` is the body ``{(u, v) : g_X(u)^p + g_Y(v)^p <= 1}``
(``max`` for ``p = inf``).  Bodies are kept implicit, as gauge evaluators with
known dimension and volume; capacities of products are never computed, only
carried through the identities that hold when the factors have equal
capacity, and are reported as asserted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, PreconditionViolated
from .geometry import Polygon2, area, gauge_many, polygon_from_dict, regular_polygon

INF = math.inf
CAPACITY_RTOL = 1e-9
Z99 = 2.5758293035489004  # two-sided 99% normal quantile

# pentagon K = {v_k}, T = K rotated by 90 degrees
PENTAGON_CAPACITY = 2 * math.cos(math.pi / 10) * (1 + math.cos(math.pi / 5))
PENTAGON_SYS = (math.sqrt(5) + 3) / 5


def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise InvalidArgument(f"p must lie in [1, inf], got {p}")
    return p


def volume_factor(m: int, n: int, p: float) -> float:
    """``Vol(X (x)_p Y) / (Vol(X) Vol(Y))`` for factors of dimensions ``m`` and ``n``."""
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise InvalidArgument("dimensions must be positive integers")
    p = _check_p(p)
    if p == INF:
        return 1.0
    a, b, c = 1 + m / p, 1 + n / p, 1 + (m + n) / p
    if c < 170:
        return math.gamma(a) * math.gamma(b) / math.gamma(c)
    # beyond the double range of gamma
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(c))


@dataclass
class Component:
    """A convex body with the origin inside, given by its gauge."""

    kind: str  # polygon | interval | product
    dim: int
    volume: float
    radius: float  # sup-norm bound, used for bounding boxes
    gauge: object  # callable: (N, dim) array -> (N,) gauges
    capacity: float | None = None
    detail: object = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim, "volume": self.volume}
        if self.capacity is not None:
            out["capacity"] = self.capacity
        if isinstance(self.detail, ProductSpec):
            out["spec"] = self.detail.to_dict()
        return out


def polygon_component(P: Polygon2, capacity: float | None = None) -> Component:
    P.require_interior_origin("product factor")
    r = float(np.abs(P.vertices).max())
    return Component("polygon", 2, area(P), r, lambda x: gauge_many(P, x), capacity, P)


def interval_component(l: float) -> Component:
    """The symmetric interval ``[-l, l]``."""
    if not l > 0:
        raise InvalidArgument("interval half-length must be positive")
    return Component("interval", 1, 2 * l, l, lambda x: np.abs(x[:, 0]) / l, None, l)


def cube_component(dim: int, half: float = 1.0) -> Component:
    """The cube ``[-half, half]^dim``."""
    if dim < 1 or not half > 0:
        raise InvalidArgument("cube needs positive dimension and half-width")
    return Component("cube", dim, (2 * half) ** dim, half, lambda x: np.abs(x).max(axis=1) / half, None, half)


def ball_component(dim: int, radius: float = 1.0) -> Component:
    """The Euclidean ball of the given radius."""
    if dim < 1 or not radius > 0:
        raise InvalidArgument("ball needs positive dimension and radius")
    vol = math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius**dim
    return Component("ball", dim, vol, radius, lambda x: np.linalg.norm(x, axis=1) / radius, None, radius)


@dataclass
class ProductSpec:
    """Implicit body ``{g_1(x_1)^p + ... + g_k(x_k)^p <= 1}`` (max for ``p = inf``)."""

    components: list[Component]
    p: float
    capacity: float | None = None  # carried, never computed: always asserted
    asserted: bool = field(default=True)

    def __post_init__(self):
        self.p = _check_p(self.p)
        if not self.components:
            raise InvalidArgument("a product needs at least one component")

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components)

    @property
    def radius(self) -> float:
        return max(c.radius for c in self.components)

    @property
    def volume(self) -> float:
        """Analytic volume, folding the factor chain left to right."""
        vol = self.components[0].volume
        d = self.components[0].dim
        for c in self.components[1:]:
            vol *= c.volume * volume_factor(d, c.dim, self.p)
            d += c.dim
        return vol

    def gauge(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise InvalidArgument(f"expected points of dimension {self.dim}")
        parts = []
        i = 0
        for c in self.components:
            parts.append(c.gauge(x[:, i : i + c.dim]))
            i += c.dim
        g = np.stack(parts, axis=1)
        if self.p == INF:
            return g.max(axis=1)
        # scale by the max before powering to avoid overflow for large p
        top = g.max(axis=1)
        safe = np.where(top > 0, top, 1.0)
        return top * ((g / safe[:, None]) ** self.p).sum(axis=1) ** (1 / self.p)

    def contains(self, x) -> np.ndarray:
        return self.gauge(x) <= 1.0

    def as_component(self) -> Component:
        return Component("product", self.dim, self.volume, self.radius, self.gauge, self.capacity, self)

    def to_dict(self) -> dict:
        return {
            "p": "inf" if self.p == INF else self.p,
            "dim": self.dim,
            "volume": self.volume,
            "components": [c.to_dict() for c in self.components],
        }


def p_product(X, Y, p: float) -> ProductSpec:
    """``X (x)_p Y`` for components or specs."""
    to_c = lambda b: b.as_component() if isinstance(b, ProductSpec) else b  # noqa: E731
    return ProductSpec([to_c(X), to_c(Y)], p)


def _equal_capacities(a: float, b: float, what: str):
    if not abs(a - b) <= CAPACITY_RTOL * max(abs(a), abs(b)):
        raise PreconditionViolated(f"{what} requires equal capacities, got {a!r} and {b!r}")


def sys_product2(sysX: float, sysY: float, capX: float, capY: float) -> float:
    """Systolic ratio of ``X (x)_2 Y`` for factors of equal capacity."""
    _equal_capacities(capX, capY, "the 2-product identity")
    return sysX * sysY


def sys_product_1_inf(sys1: float, sys2: float, cap1: float, cap2: float) -> float:
    """Systolic ratio of ``(X_1 (x)_1 X_2) x (Y_1 (x)_inf Y_2)`` for equal capacities."""
    _equal_capacities(cap1, cap2, "the (1, inf)-product identity")
    return sys1 * sys2


def pentagon_pair() -> tuple[Polygon2, Polygon2]:
    return regular_polygon(5), regular_polygon(5, 1.0, -math.pi / 2)


@dataclass
class KnTn:
    n: int
    K: ProductSpec
    T: ProductSpec
    capacity: float
    l: float
    predicted_sys: float
    asserted: bool = True

    @property
    def sys_from_volumes(self) -> float:
        """``c^n / (n! Vol(K_n) Vol(T_n))`` from the analytic volumes."""
        return self.capacity**self.n / (math.factorial(self.n) * self.K.volume * self.T.volume)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "l": self.l,
            "capacity": self.capacity,
            "vol_K": self.K.volume,
            "vol_T": self.T.volume,
            "predicted_sys": self.predicted_sys,
            "sys_from_volumes": self.sys_from_volumes,
            "asserted": self.asserted,
        }


def construct_KnTn(n: int, capacity: float = PENTAGON_CAPACITY) -> KnTn:
    """The family ``K_n, T_n``: ``K_{2k} = K (x)_1 ... (x)_1 K``, ``T_{2k}`` likewise with ``(x)_inf``.

    Odd ``n`` appends ``[-l, l]`` with ``l = sqrt(capacity) / 2`` to both.
    """
    if int(n) != n or n < 2:
        raise InvalidArgument("n must be an integer >= 2")
    n = int(n)
    K, T = pentagon_pair()
    l = math.sqrt(capacity) / 2
    k = n // 2
    kc = [polygon_component(K, capacity) for _ in range(k)]
    tc = [polygon_component(T, capacity) for _ in range(k)]
    if n % 2:
        kc.append(interval_component(l))
        tc.append(interval_component(l))
    Kn = ProductSpec(kc, 1.0, capacity)
    Tn = ProductSpec(tc, INF, capacity)
    return KnTn(n, Kn, Tn, capacity, l, PENTAGON_SYS**k)


@dataclass
class MCVolume:
    estimate: float
    low: float
    high: float
    samples: int
    seed: int

    def covers(self, value: float) -> bool:
        return self.low <= value <= self.high

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "ci99": [self.low, self.high], "samples": self.samples, "seed": self.seed}


def mc_volume(spec, samples: int = 10**6, seed: int = 0, batch: int = 2**18) -> MCVolume:
    """Hit-or-miss volume over the bounding box, with a 99% normal-approximation interval."""
    if samples < 10**4:
        raise InvalidArgument("mc_volume needs at least 10^4 samples")
    if isinstance(spec, Component):
        spec = ProductSpec([spec], INF)
    rng = np.random.Generator(np.random.Philox(seed))
    r = spec.radius
    box = (2 * r) ** spec.dim
    hits = 0
    left = samples
    while left:
        b = min(batch, left)
        x = rng.uniform(-r, r, size=(b, spec.dim))
        hits += int(np.count_nonzero(spec.contains(x)))
        left -= b
    frac = hits / samples
    half = Z99 * math.sqrt(frac * (1 - frac) / samples)
    return MCVolume(box * frac, box * (frac - half), box * (frac + half), samples, seed)


# ---------------------------------------------------------------------------
# spec JSON


def spec_from_dict(data: dict) -> ProductSpec:
    """``{"p": number | "inf", "components": [{"polygon": {...}} | {"interval": l} | spec]}``."""
    if not isinstance(data, dict) or "components" not in data:
        raise InvalidArgument("product spec needs a 'components' list")
    p = data.get("p", "inf")
    if isinstance(p, str):
        if p.lower() not in ("inf", "infinity"):
            raise InvalidArgument(f"bad exponent {p!r}")
        p = INF
    comps = []
    for item in data["components"]:
        if not isinstance(item, dict):
            raise InvalidArgument("each component must be an object")
        if "polygon" in item:
            comps.append(polygon_component(polygon_from_dict(item["polygon"])))
        elif "interval" in item:
            comps.append(interval_component(float(item["interval"])))
        elif "cube" in item:
            comps.append(cube_component(int(item["cube"]), float(item.get("half", 1.0))))
        elif "ball" in item:
            comps.append(ball_component(int(item["ball"]), float(item.get("radius", 1.0))))
        elif "components" in item:
            comps.append(spec_from_dict(item).as_component())
        else:
            raise InvalidArgument(f"unknown component {sorted(item)}")
    return ProductSpec(comps, p)


def read_spec(path) -> ProductSpec:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"malformed JSON in {path}: {exc.msg}") from None
    return spec_from_dict(data)
