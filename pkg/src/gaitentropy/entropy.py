"""Sample entropy of scalar series.

Sample entropy (SampEn) is -ln(A/B), where B counts pairs of length-m
templates lying within tolerance r of each other and A counts the same
pairs after extending every template by one sample.  Low values mean a
regular, self-similar signal; higher values mean more irregularity.

Conventions fixed here (and relied on by every test):

* templates start at positions 0..N-m-1, so each length-m template also
  has a length-(m+1) extension; a constant series therefore gives A == B
  and SampEn exactly 0,
* distance is Chebyshev (max absolute coordinate difference),
* the comparison is inclusive (``<= r``),
* self-matches are excluded by counting unordered pairs i < j,
* logarithm is natural; values are in nats.

Undefined results (too few samples, no template matches) are returned as
values, not raised: real sessions produce them and profile aggregation
has to carry them through.

``count_matches_naive`` is the brute-force reference: a direct double
loop over template pairs, kept deliberately independent of the
vectorized path so the two can check each other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .preprocess import smooth


class UndefinedReason(enum.Enum):
    NO_M_MATCHES = "no_m_matches"
    NO_M1_MATCHES = "no_m1_matches"
    TOO_SHORT = "too_short"
    ZERO_VARIANCE_ABSOLUTE_R = "zero_variance_absolute_r"


@dataclass(frozen=True)
class EntropyValue:
    """Either a defined nonnegative entropy (nats) or a reason it is undefined."""

    value: float | None
    reason: UndefinedReason | None = None

    @classmethod
    def defined(cls, value: float) -> "EntropyValue":
        if not (math.isfinite(value) and value >= 0.0):
            raise ValueError(f"entropy value must be finite and >= 0, got {value}")
        return cls(value=value, reason=None)

    @classmethod
    def undefined(cls, reason: UndefinedReason) -> "EntropyValue":
        return cls(value=None, reason=reason)

    @property
    def is_defined(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class ToleranceRule:
    """How the match tolerance r is derived from a series.

    ``relative``: r = value * sample standard deviation (divisor N-1).
    ``absolute``: r = value, in the series' own units.
    """

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("relative", "absolute"):
            raise ValueError(f"tolerance kind must be 'relative' or 'absolute', got {self.kind!r}")
        if self.kind == "relative" and not self.value > 0:
            raise ValueError(f"relative r factor must be > 0, got {self.value}")
        if self.kind == "absolute" and not self.value >= 0:
            raise ValueError(f"absolute r must be >= 0, got {self.value}")


def relative_tolerance(r_factor: float = 0.2) -> ToleranceRule:
    return ToleranceRule("relative", r_factor)


def absolute_tolerance(r_value: float) -> ToleranceRule:
    return ToleranceRule("absolute", r_value)


VARIANT_SAMPEN = "sampen"
VARIANT_SAMPEN_DETRENDED = "sampen_detrended"


@dataclass(frozen=True)
class EntropyConfig:
    """Knobs for one entropy evaluation.

    m=2 with relative r=0.2*SD is the de-facto standard for postural and
    gait series and is the default here.  ``min_length`` guards against
    estimating entropy on segments too short to be meaningful.
    """

    m: int = 2
    tolerance: ToleranceRule = relative_tolerance(0.2)
    variant: str = VARIANT_SAMPEN
    detrend_window: int | None = None
    min_length: int = 60

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"embedding dimension m must be >= 1, got {self.m}")
        if self.min_length < 2:
            raise ValueError(f"min_length must be >= 2, got {self.min_length}")
        if self.variant == VARIANT_SAMPEN_DETRENDED:
            w = self.detrend_window
            if w is None or w < 1 or w % 2 == 0:
                raise ValueError(f"detrended variant needs an odd detrend_window, got {w}")


def tolerance(series: np.ndarray, rule: ToleranceRule) -> float:
    """Resolve a tolerance rule against a series; same units as the series."""
    if rule.kind == "absolute":
        return rule.value
    x = np.asarray(series, dtype=float)
    if len(x) < 2:
        raise ValueError("relative tolerance needs at least 2 samples")
    return rule.value * float(np.std(x, ddof=1))


def count_matches(series: np.ndarray, m: int, r: float) -> tuple[int, int]:
    """Template match counts (B, A) for lengths m and m+1.

    Vectorized over the full pairwise distance matrix; O(N^2) time and
    memory, fine for the few-hundred-sample walk segments this package
    deals in.  Bit-for-bit identical to ``count_matches_naive``.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < m + 2:
        raise ValueError(f"need at least m + 2 = {m + 2} samples, got {n}")
    nt = n - m  # templates of length m that still have an (m+1)-extension
    diff = np.abs(x[:, None] - x[None, :])
    cheb_m = diff[:nt, :nt].copy()
    for k in range(1, m):
        np.maximum(cheb_m, diff[k:k + nt, k:k + nt], out=cheb_m)
    upper = np.triu_indices(nt, k=1)
    b = int(np.count_nonzero(cheb_m[upper] <= r))
    cheb_m1 = np.maximum(cheb_m, diff[m:m + nt, m:m + nt])
    a = int(np.count_nonzero(cheb_m1[upper] <= r))
    return b, a


def count_matches_naive(series: np.ndarray, m: int, r: float) -> tuple[int, int]:
    """Brute-force (B, A): explicit double loop over template pairs.

    Reference implementation for testing; shares no code with
    ``count_matches``.
    """
    x = [float(v) for v in series]
    n = len(x)
    if n < m + 2:
        raise ValueError(f"need at least m + 2 = {m + 2} samples, got {n}")
    nt = n - m
    b = 0
    a = 0
    for i in range(nt):
        for j in range(i + 1, nt):
            within = True
            for k in range(m):
                if abs(x[i + k] - x[j + k]) > r:
                    within = False
                    break
            if within:
                b += 1
                if abs(x[i + m] - x[j + m]) <= r:
                    a += 1
    return b, a


def sample_entropy(series: np.ndarray, config: EntropyConfig = EntropyConfig(),
                   counter: Callable[..., tuple[int, int]] = count_matches) -> EntropyValue:
    """Sample entropy of a series under the given config.

    Returns an undefined ``EntropyValue`` rather than raising when the
    series is too short or produces no template matches.  A zero-variance
    series under the relative rule is exactly 0 (every template matches
    every other at r = 0); under an absolute rule it is reported as
    undefined, since a fixed tolerance presumes a signal scale the flat
    series does not have.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < config.min_length or n < config.m + 2:
        return EntropyValue.undefined(UndefinedReason.TOO_SHORT)
    if config.tolerance.kind == "absolute" and float(np.std(x, ddof=1)) == 0.0:
        return EntropyValue.undefined(UndefinedReason.ZERO_VARIANCE_ABSOLUTE_R)
    r = tolerance(x, config.tolerance)
    b, a = counter(x, config.m, r)
    if b == 0:
        return EntropyValue.undefined(UndefinedReason.NO_M_MATCHES)
    if a == 0:
        return EntropyValue.undefined(UndefinedReason.NO_M1_MATCHES)
    return EntropyValue.defined(-math.log(a / b) + 0.0)  # +0.0 folds -0.0 into 0.0


def _variant_sampen(series: np.ndarray, config: EntropyConfig) -> EntropyValue:
    return sample_entropy(series, config)


def detrend(series: np.ndarray, window: int) -> np.ndarray:
    """Subtract a centered moving average (odd window) from the series."""
    x = np.asarray(series, dtype=float)
    return x - smooth(x, window)


def _variant_sampen_detrended(series: np.ndarray, config: EntropyConfig) -> EntropyValue:
    # window 1 subtracts the series from itself: the residual is all-zero
    # and the value is 0 under the (default) relative rule.
    residual = detrend(series, config.detrend_window)
    return sample_entropy(residual, config)


# Registry so additional revisions of the statistic can be plugged in
# without touching callers.  None of the shipped variants claims to be
# anything beyond what its docstring says.
_VARIANTS: dict[str, Callable[[np.ndarray, EntropyConfig], EntropyValue]] = {
    VARIANT_SAMPEN: _variant_sampen,
    VARIANT_SAMPEN_DETRENDED: _variant_sampen_detrended,
}


def register_variant(name: str,
                     fn: Callable[[np.ndarray, EntropyConfig], EntropyValue]) -> None:
    _VARIANTS[name] = fn


def variant_names() -> tuple[str, ...]:
    return tuple(sorted(_VARIANTS))


def sample_entropy_variant(series: np.ndarray,
                           config: EntropyConfig = EntropyConfig()) -> EntropyValue:
    """Dispatch to the configured entropy variant."""
    try:
        fn = _VARIANTS[config.variant]
    except KeyError:
        valid = ", ".join(variant_names())
        raise ValueError(f"unknown variant {config.variant!r} (expected one of {{{valid}}})") from None
    return fn(series, config)
