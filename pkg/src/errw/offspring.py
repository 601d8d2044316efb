"""Offspring distributions, per-run random streams, and count samplers.

Every family has support in {1, 2, ...} (no deaths) and mean > 1. Sums of
many i.i.d. offspring and binomial thinnings are sampled exactly up to 10^6
trials and by a rounded, clamped Gaussian above that. Samplers return ints
for int inputs and floats for float inputs, so integer-mode arithmetic in
the process state stays exact.
"""

import math
from dataclasses import dataclass

import numpy as np

EXACT_SAMPLING_LIMIT = 10**6


class InvalidOffspring(ValueError):
    """Offspring parameters violate support or mean constraints."""


@dataclass(frozen=True)
class OffspringSpec:
    """One offspring law: family tag, parameters, and its first two moments."""
    family: str
    params: dict
    mean: float
    variance: float
    support_min: int
    support_max: int | None  # None for unbounded support

    def to_config(self) -> dict:
        return {"family": self.family, **self.params}


def constant(k: int) -> OffspringSpec:
    if not isinstance(k, int) or k < 2:
        raise InvalidOffspring(f"constant family needs integer k >= 2, got {k!r}")
    return OffspringSpec("constant", {"k": k}, float(k), 0.0, k, k)


def two_point(a: int, b: int, prob_b: float) -> OffspringSpec:
    if not (isinstance(a, int) and isinstance(b, int)) or a < 1 or b < 1 or a == b:
        raise InvalidOffspring(f"two_point needs distinct integers >= 1, got {a!r}, {b!r}")
    if not 0.0 < prob_b < 1.0:
        raise InvalidOffspring(f"prob_b must be in (0, 1), got {prob_b!r}")
    mean = a * (1.0 - prob_b) + b * prob_b
    if mean <= 1.0:
        raise InvalidOffspring(f"mean offspring must exceed 1, got {mean}")
    var = prob_b * (1.0 - prob_b) * (b - a) ** 2
    return OffspringSpec("two_point", {"a": a, "b": b, "prob_b": prob_b},
                         mean, var, min(a, b), max(a, b))


def shifted_geometric(success_prob: float) -> OffspringSpec:
    if not 0.0 < success_prob < 1.0:
        raise InvalidOffspring(f"success_prob must be in (0, 1), got {success_prob!r}")
    mean = 1.0 / success_prob
    var = (1.0 - success_prob) / success_prob**2
    return OffspringSpec("shifted_geometric", {"success_prob": success_prob},
                         mean, var, 1, None)


_FACTORIES = {"constant": constant, "two_point": two_point, "shifted_geometric": shifted_geometric}


def make_offspring(config: dict) -> OffspringSpec:
    """Build a spec from a config mapping with a 'family' tag."""
    cfg = dict(config)
    family = cfg.pop("family", None)
    if family not in _FACTORIES:
        raise InvalidOffspring(f"unknown offspring family: {family!r}")
    try:
        return _FACTORIES[family](**cfg)
    except TypeError as exc:
        raise InvalidOffspring(f"bad parameters for {family}: {cfg!r}") from exc


def stream(master_seed: int, run_index: int = 0) -> np.random.Generator:
    """Independent counter-based stream for one run, derived from the master seed."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))
    return np.random.Generator(np.random.Philox(seq))


def _match_type(value: float, like) -> int | float:
    return int(value) if isinstance(like, int) else float(value)


def sample_binomial(n, p: float, rng: np.random.Generator):
    """Binomial(n, p) draw: exact for n <= 10^6, Gaussian beyond, in [0, n]."""
    if n < 0:
        raise ValueError(f"negative trial count: {n!r}")
    if n == 0 or p <= 0.0:
        return _match_type(0, n)
    if p >= 1.0:
        return n
    if n <= EXACT_SAMPLING_LIMIT:
        return _match_type(int(rng.binomial(int(round(n)), p)), n)
    mu = n * p
    sd = math.sqrt(n * p * (1.0 - p))
    val = round(mu + sd * rng.standard_normal())
    val = min(max(val, 0.0), n)
    return _match_type(val, n)


def sample_offspring_sum(n, spec: OffspringSpec, rng: np.random.Generator):
    """Sum of n i.i.d. offspring counts.

    Exact family-specific composition for n <= 10^6 (binomial mixture for
    two-point, negative binomial for shifted geometric), Gaussian with the
    exact moments above that, clamped to the support of the sum.
    """
    if n < 0:
        raise ValueError(f"negative particle count: {n!r}")
    if n == 0:
        return _match_type(0, n)
    if spec.family == "constant":
        return n * spec.params["k"]
    if n <= EXACT_SAMPLING_LIMIT:
        ni = int(round(n))
        if spec.family == "two_point":
            a, b = spec.params["a"], spec.params["b"]
            hits = int(rng.binomial(ni, spec.params["prob_b"]))
            return _match_type(a * ni + (b - a) * hits, n)
        # shifted geometric: n successes plus the failures before them
        total = ni + int(rng.negative_binomial(ni, spec.params["success_prob"]))
        return _match_type(total, n)
    mu = n * spec.mean
    sd = math.sqrt(n * spec.variance)
    val = round(mu + sd * rng.standard_normal())
    val = max(val, float(n) * spec.support_min)
    if spec.support_max is not None:
        val = min(val, float(n) * spec.support_max)
    return _match_type(val, n)
