"""Built-in model families.

Each builder returns a ModelSpec whose features are exact symbolic
polynomials in the latent parameters, obtained by expanding the model's
defining product form over outcome sequences.  The observable helpers
(chsh_observable, time_shift_observable) produce coefficient vectors
aligned with the corresponding builder's feature order.

Feature label grammar, shared with stats.project:
  coin          "h=<int>"                head count of the outcome class
  correlations  "<a1><a2>|<x1><x2>"      0/1 outcomes given 0/1 settings
  paired chains "++-|+-+"                A sign sequence | B sign sequence
  correlators   "A<s>*B<t>"              product of signs at 1-based times
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from .polynomial import Polynomial
from .sos_compiler import ModelSpec

SIGNS = (1, -1)


def _sign_str(seq: Sequence[int]) -> str:
    return "".join("+" if s == 1 else "-" for s in seq)


def build_coin(k: int) -> ModelSpec:
    """Mixture-of-coins model: k tosses of a coin with hidden bias.

    Features are the per-sequence probabilities of the head-count classes
    h = k..1, i.e. eta^h (1-eta)^(k-h).  The h=0 class is dropped since the
    classes sum to 1 after weighting by binomial counts.
    """
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ValueError("sequence length must be an integer, got %r" % (k,))
    if not 2 <= k <= 12:
        raise ValueError("sequence length k=%d outside supported range 2..12" % k)
    eta = Polynomial.variable(1, 0)
    one = Polynomial.constant(1, 1.0)
    feats = []
    labels = []
    for h in range(k, 0, -1):
        p = Polynomial.constant(1, 1.0)
        for _ in range(h):
            p = p * eta
        for _ in range(k - h):
            p = p * (one - eta)
        feats.append(p)
        labels.append("h=%d" % h)
    return ModelSpec(
        nvars=1,
        domain_polys=[eta * (one - eta)],
        features=feats,
        feature_labels=tuple(labels),
        name="coin%d" % k,
    )


def _facet_products(nvars: int, max_factors: int) -> List[Polynomial]:
    """Products of up to max_factors box facets, one facet per variable.

    Multiplying facet constraints is what lets a fixed low relaxation degree
    certify facets of the correlation polytope: the cubic products make the
    exact separating certificate representable with constant multipliers.
    """
    one = Polynomial.constant(nvars, 1.0)
    pieces = []
    for v in range(nvars):
        x = Polynomial.variable(nvars, v)
        pieces.append((x, one - x))
    out = []
    for r in range(1, max_factors + 1):
        for vs in combinations(range(nvars), r):
            for choice in product((0, 1), repeat=r):
                g = Polynomial.constant(nvars, 1.0)
                for v, c in zip(vs, choice):
                    g = g * pieces[v][c]
                out.append(g)
    return out


def build_chsh() -> ModelSpec:
    """Two-party correlation experiment with a shared hidden variable.

    Parameters are the four conditional probabilities
    (P(A1=1|X1=0), P(A1=1|X1=1), P(A2=1|X2=0), P(A2=1|X2=1)); each of the
    16 features P(a1,a2|x1,x2) factorizes into a product of one marginal
    per party.  The domain lists all products of up to three box facets so
    that the polytope's facets are certifiable at low degree.
    """
    nvars = 4
    one = Polynomial.constant(nvars, 1.0)
    p = [Polynomial.variable(nvars, i) for i in range(nvars)]
    feats = []
    labels = []
    for x1, x2 in product((0, 1), repeat=2):
        m1 = (p[x1], one - p[x1])        # P(A1=1|x1), P(A1=0|x1)
        m2 = (p[2 + x2], one - p[2 + x2])
        for a1, a2 in product((0, 1), repeat=2):
            feats.append(m1[0 if a1 == 1 else 1] * m2[0 if a2 == 1 else 1])
            labels.append("%d%d|%d%d" % (a1, a2, x1, x2))
    return ModelSpec(
        nvars=nvars,
        domain_polys=_facet_products(nvars, 3),
        features=feats,
        feature_labels=tuple(labels),
        name="chsh",
    )


def chsh_observable() -> np.ndarray:
    """Indicator coefficients of the standard correlation game.

    Entry for feature (a1,a2|x1,x2) is 1 when a1 xor a2 equals x1*x2.
    Summed over settings this scores how often the parity condition holds;
    factorizing models cannot exceed 3 of the 4 settings.
    """
    c = np.zeros(16)
    i = 0
    for x1, x2 in product((0, 1), repeat=2):
        for a1, a2 in product((0, 1), repeat=2):
            if (a1 ^ a2) == (x1 & x2):
                c[i] = 1.0
            i += 1
    return c


def _chain_sequence_polys(
    T: int,
    flip_plus: Polynomial,
    flip_minus: Polynomial,
    start_plus: Polynomial,
) -> Tuple[List[Tuple[int, ...]], List[Polynomial]]:
    """Probability polynomial of every sign sequence of a two-state chain.

    flip_plus is P(next = -1 | current = +1), flip_minus the reverse flip,
    start_plus the probability the first slice is +1.
    """
    nvars = flip_plus.nvars
    one = Polynomial.constant(nvars, 1.0)
    seqs = list(product(SIGNS, repeat=T))
    polys = []
    for s in seqs:
        prob = start_plus if s[0] == 1 else one - start_plus
        for t in range(T - 1):
            if s[t] == 1:
                prob = prob * (flip_plus if s[t + 1] == -1 else one - flip_plus)
            else:
                prob = prob * (flip_minus if s[t + 1] == 1 else one - flip_minus)
        polys.append(prob)
    return seqs, polys


class _ProductFeatures(Sequence[Polynomial]):
    """Joint-outcome features as on-demand products of per-chain polynomials.

    The full indicator set has 4^T members; materializing every product up
    front costs hundreds of megabytes at T=6, while each product is cheap
    to expand when asked for.
    """

    def __init__(self, chain_a: List[Polynomial], chain_b: List[Polynomial]):
        self._a = chain_a
        self._b = chain_b

    def __len__(self) -> int:
        return len(self._a) * len(self._b)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        n = len(self._b)
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        return self._a[k // n] * self._b[k % n]


ObservableSpec = Union[str, Tuple[str, Callable], Tuple[str, Callable, Callable]]


def _parse_correlator(label: str, T: int) -> List[Tuple[int, int]]:
    """Parse "A2*B3" style labels into (chain, 0-based time) factor lists."""
    factors = []
    for tok in label.split("*"):
        tok = tok.strip()
        if len(tok) < 2 or tok[0] not in "AB" or not tok[1:].isdigit():
            raise ValueError("cannot parse correlator factor %r in %r" % (tok, label))
        t = int(tok[1:])
        if not 1 <= t <= T:
            raise ValueError("time index %d in %r outside 1..%d" % (t, label, T))
        factors.append((0 if tok[0] == "A" else 1, t - 1))
    return factors


def build_slh(
    T: int,
    mode: str = "full",
    observables: Union[str, Sequence[ObservableSpec]] = "indicators",
    prior: float = 0.125,
) -> ModelSpec:
    """Two hidden Markov chains observed jointly over T time slices.

    Chains A and B evolve independently given their latent transition
    parameters; any correlation between the observed sequences must come
    from the latent draw.  Full mode exposes six parameters
    (alpha_plus, alpha_minus, alpha0, beta_plus, beta_minus, beta0), where
    alpha_plus = P(A flips down), alpha_minus = P(A flips up) and alpha0 is
    the start probability.  Symmetric mode ties alpha_plus = alpha_minus
    and fixes both start probabilities at `prior`, leaving two parameters.

    observables selects the feature set: "indicators" (default) yields one
    feature per joint sign-sequence pair; otherwise pass a sequence whose
    entries are correlator labels like "A2*B3", or (label, fn(a, b)) pairs
    scoring each sequence pair, or (label, fa(a), fb(b)) separable pairs.
    """
    if not isinstance(T, (int, np.integer)) or isinstance(T, bool):
        raise ValueError("window length must be an integer, got %r" % (T,))
    if not 2 <= T <= 6:
        raise ValueError("window length T=%d outside supported range 2..6" % T)
    if mode not in ("full", "symmetric"):
        raise ValueError("mode must be 'full' or 'symmetric', got %r" % (mode,))
    if not 0.0 <= prior <= 1.0:
        raise ValueError("start probability %r outside [0,1]" % (prior,))

    if mode == "full":
        nvars = 6
        ap, am, a0 = (Polynomial.variable(6, i) for i in range(3))
        bp, bm, b0 = (Polynomial.variable(6, i) for i in range(3, 6))
        groups = ((0, 1, 2), (3, 4, 5))
        name = "slh%d" % T
    else:
        nvars = 2
        alpha = Polynomial.variable(2, 0)
        beta = Polynomial.variable(2, 1)
        start = Polynomial.constant(2, prior)
        ap = am = alpha
        bp = bm = beta
        a0 = b0 = start
        groups = ((0,), (1,))
        name = "slh%d-sym" % T

    seqs_a, chain_a = _chain_sequence_polys(T, ap, am, a0)
    seqs_b, chain_b = _chain_sequence_polys(T, bp, bm, b0)

    if observables == "indicators":
        feats: Sequence[Polynomial] = _ProductFeatures(chain_a, chain_b)
        labels = tuple(
            "%s|%s" % (_sign_str(a), _sign_str(b))
            for a in seqs_a for b in seqs_b
        )
    else:
        feats = []
        labels_l = []
        for ob in observables:
            if isinstance(ob, str):
                factors = _parse_correlator(ob, T)
                fa = _seq_score(factors, 0)
                fb = _seq_score(factors, 1)
                label = ob
            elif len(ob) == 3:
                label, fa, fb = ob
            else:
                label, fn = ob
                fa = fb = None
            if fa is not None:
                # separable: E[O] = (sum_a fa(a) P_a)(sum_b fb(b) P_b)
                pa = _weighted_sum(seqs_a, chain_a, fa)
                pb = _weighted_sum(seqs_b, chain_b, fb)
                feats.append(pa * pb)
            else:
                acc = Polynomial.zero(nvars)
                for a, qa in zip(seqs_a, chain_a):
                    for b, qb in zip(seqs_b, chain_b):
                        w = float(fn(a, b))
                        if w != 0.0:
                            acc = acc + (qa * qb).scale(w)
                feats.append(acc)
            labels_l.append(label)
        labels = tuple(labels_l)

    one = Polynomial.constant(nvars, 1.0)
    domain = []
    for v in range(nvars):
        x = Polynomial.variable(nvars, v)
        domain.append(x * (one - x))
    return ModelSpec(
        nvars=nvars,
        domain_polys=domain,
        features=feats,
        feature_labels=labels,
        var_groups=groups,
        name=name,
    )


def _seq_score(factors: List[Tuple[int, int]], chain: int) -> Callable:
    mine = [t for c, t in factors if c == chain]
    def score(seq: Sequence[int]) -> float:
        v = 1.0
        for t in mine:
            v *= seq[t]
        return v
    return score


def _weighted_sum(seqs, polys, weight: Callable) -> Polynomial:
    acc = Polynomial.zero(polys[0].nvars)
    for s, q in zip(seqs, polys):
        w = float(weight(s))
        if w != 0.0:
            acc = acc + q.scale(w)
    return acc


def time_shift_observable(T: int) -> np.ndarray:
    """Time-shift contrast observable over joint indicator features.

    Scores each sequence pair by the average lagged cross-correlation
    A_{t+1} B_t minus the average two-step autocorrelation B_t B_{t+2}.
    Influence from B to A raises the first sum without the second; a pair
    of independent stationary chains cannot do that beyond the certified
    bound.  Coefficient order matches build_slh(T, ..., "indicators").
    """
    if not isinstance(T, (int, np.integer)) or isinstance(T, bool):
        raise ValueError("window length must be an integer, got %r" % (T,))
    if T < 3:
        raise ValueError(
            "window length T=%d too short: the autocorrelation sum needs T >= 3" % T)
    seqs = list(product(SIGNS, repeat=T))
    n = len(seqs)
    c = np.zeros(n * n)
    for ia, a in enumerate(seqs):
        for ib, b in enumerate(seqs):
            cross = sum(a[t + 1] * b[t] for t in range(T - 1)) / (T - 1)
            within = sum(b[t] * b[t + 2] for t in range(T - 2)) / (T - 2)
            c[ia * n + ib] = cross - within
    return c
