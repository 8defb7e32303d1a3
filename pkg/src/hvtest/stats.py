"""Observation vectors from empirical counts, and violation confidence.

project() turns an EmpiricalDistribution into the observation vector a
model's features expect, dispatching on the feature label grammar defined
in models.py.  hoeffding_confidence() converts a certified violation into
a probability statement; it treats samples as independent, which network
edge samples are not, so callers owe their readers that caveat.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from math import comb
from typing import Dict, Tuple

import numpy as np

from .simulator import EmpiricalDistribution
from .sos_compiler import ModelSpec, TestCertificate

_COIN = re.compile(r"^h=(\d+)$")
_SIGN_PAIR = re.compile(r"^[+-]+\|[+-]+$")
_CONDITIONAL = re.compile(r"^[01]+\|[01]+$")
_CORRELATOR = re.compile(r"^[AB]\d+(\*[AB]\d+)*$")


@dataclass(frozen=True)
class ObservationVector:
    values: np.ndarray
    sample_size: int
    labels: Tuple[str, ...]


def project(dist: EmpiricalDistribution, spec: ModelSpec) -> ObservationVector:
    """Empirical means of the model's observables, by feature label family.

    Head-count labels average per-sequence probabilities within a class,
    sign-pair labels are joint outcome frequencies, digit-pair labels are
    frequencies conditional on the setting after the bar, and correlator
    labels average products of signs.
    """
    labels = spec.feature_labels
    if labels is None:
        raise ValueError("model has no feature labels; cannot project counts")
    M = dist.sample_size
    if M < 1:
        raise ValueError("empty distribution")
    counts = dist.counts

    if all(_COIN.match(l) for l in labels):
        k = max(int(_COIN.match(l).group(1)) for l in labels)
        class_counts: Dict[int, int] = {}
        for key, c in counts.items():
            if len(key) != k or set(key) - set("HT"):
                raise ValueError("outcome %r is not a %d-toss H/T string" % (key, k))
            h = key.count("H")
            class_counts[h] = class_counts.get(h, 0) + c
        vals = np.array([class_counts.get(int(_COIN.match(l).group(1)), 0)
                         / (M * comb(k, int(_COIN.match(l).group(1))))
                         for l in labels])
        return ObservationVector(vals, M, tuple(labels))

    if all(_SIGN_PAIR.match(l) for l in labels):
        known = set(labels)
        for key in counts:
            if key not in known:
                raise ValueError("outcome %r is not among the model's %d outcomes"
                                 % (key, len(known)))
        vals = np.array([counts.get(l, 0) / M for l in labels], dtype=float)
        return ObservationVector(vals, M, tuple(labels))

    if all(_CONDITIONAL.match(l) for l in labels):
        known = set(labels)
        for key in counts:
            if key not in known:
                raise ValueError("outcome %r is not among the model's %d outcomes"
                                 % (key, len(known)))
        setting_totals: Dict[str, int] = {}
        for key, c in counts.items():
            setting_totals.setdefault(key.split("|")[1], 0)
            setting_totals[key.split("|")[1]] += c
        vals = []
        for l in labels:
            setting = l.split("|")[1]
            denom = setting_totals.get(setting, 0)
            if denom == 0:
                raise ValueError("no samples for setting %r" % setting)
            vals.append(counts.get(l, 0) / denom)
        return ObservationVector(np.array(vals), M, tuple(labels))

    if all(_CORRELATOR.match(l) for l in labels):
        vals = np.zeros(len(labels))
        for key, c in counts.items():
            if not _SIGN_PAIR.match(key):
                raise ValueError("outcome %r is not a sign-pair string" % key)
            a_str, b_str = key.split("|")
            for j, l in enumerate(labels):
                v = 1.0
                for tok in l.split("*"):
                    seq = a_str if tok[0] == "A" else b_str
                    t = int(tok[1:]) - 1
                    if t >= len(seq):
                        raise ValueError("label %r indexes time %d but outcomes "
                                         "have %d slices" % (l, t + 1, len(seq)))
                    v *= 1.0 if seq[t] == "+" else -1.0
                vals[j] += c * v
        return ObservationVector(vals / M, M, tuple(labels))

    raise ValueError("unrecognized feature label family: %r" % (labels[:4],))


def observable_range(cert: TestCertificate, spec: ModelSpec) -> Tuple[float, float, float]:
    """Per-sample range of the certified observable over the outcome set.

    Only defined when the features are joint-outcome indicators: the
    observable then takes the value of one hyperplane coefficient per
    sample (shifted by the centering constant when the test was centered).
    Returns (lo, hi, hi - lo).
    """
    labels = spec.feature_labels
    if labels is None or not all(_SIGN_PAIR.match(l) for l in labels):
        raise ValueError(
            "observable range needs joint indicator features; this model's "
            "observable is not a per-sample quantity, supply bounds manually")
    b = np.asarray(cert.hyperplane, dtype=float)
    if b.shape != (len(labels),):
        raise ValueError("certificate hyperplane length %d does not match "
                         "%d features" % (b.size, len(labels)))
    shift = float(b @ spec.center) if spec.center is not None else 0.0
    vals = b - shift
    return float(vals.min()), float(vals.max()), float(vals.max() - vals.min())


def hoeffding_confidence(mean: float, M: int, delta: float,
                         threshold: float = 1.0) -> float:
    """1 - exp(-2 M (mean - threshold)^2 / delta^2), clamped to [0, 1].

    The probability that a sample mean of M independent observations with
    range delta exceeds `mean` while the true mean is below `threshold`.
    Returns 0 when the observed mean does not exceed the threshold.
    """
    if delta <= 0 or not math.isfinite(delta):
        raise ValueError("observable range delta must be positive, got %r" % (delta,))
    if M < 1:
        raise ValueError("sample size must be >= 1, got %r" % (M,))
    if not math.isfinite(mean):
        raise ValueError("mean must be finite, got %r" % (mean,))
    if mean <= threshold:
        return 0.0
    x = 2.0 * M * (mean - threshold) ** 2 / delta ** 2
    return min(1.0, max(0.0, -math.expm1(-x)))


def hoeffding_tail_log10(mean: float, M: int, delta: float,
                         threshold: float = 1.0) -> float:
    """log10 of 1 - hoeffding_confidence, exact even when the tail underflows."""
    if delta <= 0 or not math.isfinite(delta):
        raise ValueError("observable range delta must be positive, got %r" % (delta,))
    if M < 1:
        raise ValueError("sample size must be >= 1, got %r" % (M,))
    if mean <= threshold:
        return 0.0
    return -2.0 * M * (mean - threshold) ** 2 / (delta ** 2 * math.log(10.0))
