"""Generators for named photon-number distribution families.

Infinite families (Poisson, thermal) are cut at the smallest n_max whose
analytic remainder bound falls below the requested ``tail_target``; that
bound becomes the distribution's ``tail_bound``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import BadParameter, EmptyInput, TailNotReachable, WeightMismatch
from .fock_core import PhotonNumberDistribution, validate_pnd

N_MAX_CAP = 4096
DEFAULT_TAIL_TARGET = 1e-12
MAX_TAIL_TARGET = 1e-6
WEIGHT_TOL = 1e-12

FAMILIES = ("fock", "poisson", "thermal", "binomial", "vacuum_two_mixture", "mixture", "file")


@dataclass(frozen=True)
class FamilySpec:
    """A named family plus its parameters, e.g. ``FamilySpec("poisson", {"mu": 1.0})``.

    For ``mixture`` the parameters are indexed components: ``mu_<k>`` for a
    Poisson component or ``nbar_<k>`` for a thermal one, each with weight
    ``w_<k>``.  ``file`` specs carry a ``path`` instead of parameters.
    """

    name: str
    params: Mapping[str, float] = field(default_factory=dict)
    tail_target: float = DEFAULT_TAIL_TARGET
    path: str | None = None

    def as_dict(self) -> dict:
        out: dict = {"family": self.name}
        if self.name == "file":
            out["path"] = self.path
        else:
            out["params"] = {k: self.params[k] for k in sorted(self.params)}
            out["tail_target"] = self.tail_target
        return out


def _as_int(value, name: str, lo: int) -> int:
    if isinstance(value, float):
        if not value.is_integer():
            raise BadParameter(f"{name} must be an integer, got {value}")
        value = int(value)
    if not isinstance(value, (int, np.integer)) or value < lo:
        raise BadParameter(f"{name} must be an integer >= {lo}, got {value}")
    return int(value)


def _check_range(value: float, name: str, lo: float, hi: float = math.inf) -> float:
    value = float(value)
    if not (lo <= value <= hi):
        raise BadParameter(f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


def _check_tail_target(tail_target: float) -> float:
    tail_target = float(tail_target)
    if not 0.0 < tail_target <= MAX_TAIL_TARGET:
        raise BadParameter(f"tail_target must lie in (0, {MAX_TAIL_TARGET}], got {tail_target}")
    return tail_target


def make_fock(m: int) -> PhotonNumberDistribution:
    m = _as_int(m, "m", 0)
    probs = np.zeros(max(m, 1) + 1)
    probs[m] = 1.0
    return validate_pnd(probs)


def poisson_remainder_bound(mu: float, n: int) -> float:
    """Upper bound on sum_{k>n} e^{-mu} mu^k / k!, valid for n + 2 > mu.

    Successive term ratios beyond k = n+1 are at most mu/(n+2), so the tail
    is dominated by a geometric series started at p(n+1).
    """
    log_next = -mu + (n + 1) * math.log(mu) - math.lgamma(n + 2)
    return math.exp(log_next) / (1.0 - mu / (n + 2))


def make_poisson(mu: float, tail_target: float = DEFAULT_TAIL_TARGET) -> PhotonNumberDistribution:
    """Coherent-state statistics p(n) = e^{-mu} mu^n / n!, truncated by tail bound."""
    mu = _check_range(mu, "mu", 0.0)
    tail_target = _check_tail_target(tail_target)
    if mu == 0.0:
        return validate_pnd([1.0])

    n = max(0, math.floor(mu) - 1)
    while poisson_remainder_bound(mu, n) >= tail_target:
        n += 1
        if n > N_MAX_CAP:
            raise TailNotReachable(
                f"Poisson mu={mu} needs n_max > {N_MAX_CAP} to reach tail {tail_target}"
            )
    ks = np.arange(n + 1)
    log_p = -mu + ks * math.log(mu) - np.array([math.lgamma(k + 1) for k in ks])
    return validate_pnd(np.exp(log_p), poisson_remainder_bound(mu, n))


def make_thermal(nbar: float, tail_target: float = DEFAULT_TAIL_TARGET) -> PhotonNumberDistribution:
    """Bose-Einstein statistics p(n) = nbar^n / (1+nbar)^{n+1}; the geometric tail is exact."""
    nbar = _check_range(nbar, "nbar", 0.0)
    tail_target = _check_tail_target(tail_target)
    if nbar == 0.0:
        return validate_pnd([1.0])

    ratio = nbar / (1.0 + nbar)
    n = max(0, math.ceil(math.log(tail_target) / math.log(ratio)) - 1)
    while ratio ** (n + 1) >= tail_target:
        n += 1
    while n > 0 and ratio**n < tail_target:
        n -= 1
    if n > N_MAX_CAP:
        raise TailNotReachable(
            f"thermal nbar={nbar} needs n_max > {N_MAX_CAP} to reach tail {tail_target}"
        )
    ks = np.arange(n + 1)
    probs = np.power(ratio, ks) / (1.0 + nbar)
    return validate_pnd(probs, ratio ** (n + 1))


def make_binomial(M: int, eta: float) -> PhotonNumberDistribution:
    """M photons each surviving independently with probability eta."""
    M = _as_int(M, "M", 1)
    eta = _check_range(eta, "eta", 0.0, 1.0)
    probs = [math.comb(M, n) * eta**n * (1.0 - eta) ** (M - n) for n in range(M + 1)]
    return validate_pnd(probs)


def make_vacuum_two_mixture(lam: float) -> PhotonNumberDistribution:
    """(1 - lam) |0><0| + lam |2><2|."""
    lam = _check_range(lam, "lambda", 0.0, 1.0)
    return validate_pnd([1.0 - lam, 0.0, lam])


def make_mixture(
    components: Sequence[PhotonNumberDistribution], weights: Sequence[float]
) -> PhotonNumberDistribution:
    if len(components) == 0:
        raise EmptyInput("mixture needs at least one component")
    weights = [float(w) for w in weights]
    if len(weights) != len(components):
        raise WeightMismatch(f"{len(components)} components but {len(weights)} weights")
    if any(w < 0 for w in weights):
        raise WeightMismatch(f"weights must be nonnegative, got {weights}")
    if abs(math.fsum(weights) - 1.0) > WEIGHT_TOL:
        raise WeightMismatch(f"weights sum to {math.fsum(weights)!r}, not 1")

    n_max = max(c.n_max for c in components)
    probs = sum(w * c.padded(n_max) for c, w in zip(components, weights))
    tail = math.fsum(w * c.tail_bound for c, w in zip(components, weights))
    return validate_pnd(probs, tail)


_COMPONENT_KEY = re.compile(r"^(mu|nbar|w)_(\d+)$")


def _mixture_from_params(params: Mapping[str, float], tail_target: float) -> PhotonNumberDistribution:
    parts: dict[int, dict[str, float]] = {}
    for key, value in params.items():
        match = _COMPONENT_KEY.match(key)
        if match is None:
            raise BadParameter(f"mixture parameter {key!r} is not of the form mu_k, nbar_k or w_k")
        parts.setdefault(int(match.group(2)), {})[match.group(1)] = value
    components, weights = [], []
    for k in sorted(parts):
        part = parts[k]
        if "w" not in part or ("mu" in part) == ("nbar" in part):
            raise BadParameter(f"mixture component {k} needs w_{k} and exactly one of mu_{k}, nbar_{k}")
        if "mu" in part:
            components.append(make_poisson(part["mu"], tail_target))
        else:
            components.append(make_thermal(part["nbar"], tail_target))
        weights.append(part["w"])
    return make_mixture(components, weights)


_REQUIRED = {
    "fock": ("m",),
    "poisson": ("mu",),
    "thermal": ("nbar",),
    "binomial": ("M", "eta"),
    "vacuum_two_mixture": ("lambda",),
}


def build_pnd(spec: FamilySpec) -> PhotonNumberDistribution:
    """Generate the distribution a FamilySpec describes (all families except ``file``)."""
    name = spec.name.replace("-", "_")
    params = dict(spec.params)
    if name == "mixture":
        return _mixture_from_params(params, spec.tail_target)
    if name not in _REQUIRED:
        raise BadParameter(f"unknown or non-generated family {spec.name!r}")
    missing = [k for k in _REQUIRED[name] if k not in params]
    extra = sorted(set(params) - set(_REQUIRED[name]))
    if missing or extra:
        raise BadParameter(
            f"family {spec.name!r} takes parameters {_REQUIRED[name]}; missing {missing}, unexpected {extra}"
        )
    if name == "fock":
        return make_fock(params["m"])
    if name == "poisson":
        return make_poisson(params["mu"], spec.tail_target)
    if name == "thermal":
        return make_thermal(params["nbar"], spec.tail_target)
    if name == "binomial":
        return make_binomial(params["M"], params["eta"])
    return make_vacuum_two_mixture(params["lambda"])
