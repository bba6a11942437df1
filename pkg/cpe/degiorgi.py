"""
Level-set decay certificates

If a bounded non-increasing g satisfies ::

    g(l) <= C (l - k)^{-β} g(k)^{1+α}        for all l > k

then g vanishes beyond an explicit level L. We build L the way the
iteration h_i = h_{i-1} + i^{-2}, h_0 = κ does, and check hypotheses
on sampled (k, g(k)) data.
"""

# license: Public domain

from collections import namedtuple
import logging
import math

import numpy as np

from .errors import HypothesisError

_LOG = logging.getLogger(__name__)

# Σ_{i≥1} i^{-2}
BASEL = math.pi ** 2 / 6

# fallback exponents when a fit is meaningless
DEFAULT_ALPHA = 1.0 / 3
DEFAULT_BETA = 4.0

_FIT_INFLATION = 1.1
_MAX_DOUBLINGS = 2000


class DecayParams(namedtuple('DecayParams', 'C alpha beta')):
    """
    :param C: multiplicative constant
    :param alpha: super-linearity exponent α
    :param beta: gap exponent β
    """

    def validate(self):
        "raise `ValueError` unless all three are finite and positive"
        for name, val in zip(self._fields, self):
            if not (np.isfinite(val) and val > 0):
                raise ValueError("decay parameter {} must be finite and "
                                 "positive (got {})".format(name, val))
        return self


class DeGiorgiCertificate(namedtuple('DeGiorgiCertificate',
                                     'kappa L c_prime checks')):
    """
    :param kappa: starting level κ (a power of 2)
    :param L: vanishing level κ + π²/6
    :param c_prime: C' with g(l) <= C' l^{-β} for l >= 2
    :param checks: dict from condition name to (value, holds)
    """


class ViolationReport(namedtuple('ViolationReport', 'violations n_pairs')):
    """
    :param violations: [(k, l, g(l), bound)]
    :param n_pairs: number of pairs checked
    """

    @property
    def ok(self):
        "no violating pair"
        return not self.violations


class VanishingReport(namedtuple('VanishingReport',
                                 ['params', 'hypothesis', 'certificate',
                                  'l_observed', 'consistent'])):
    """
    :param params: the `DecayParams` used (supplied or fitted)
    :param hypothesis: `ViolationReport`
    :param certificate: `DeGiorgiCertificate`, None on hypothesis failure
    :param l_observed: first threshold with zero measure, or the last
                       threshold if none vanish
    :param consistent: L_certified >= l_observed (None without certificate)
    """

# ---------------------------------------------------------------------
# hypothesis
# ---------------------------------------------------------------------


def check_samples(samples):
    """
    Raise `HypothesisError` unless the thresholds increase strictly
    and g is non-negative and non-increasing ::

        [(Float, Float)] -> [(Float, Float)]
    """
    samples = [(float(k), float(g)) for k, g in samples]
    for (k1, g1), (k2, g2) in zip(samples, samples[1:]):
        if not k2 > k1:
            raise HypothesisError("thresholds must increase strictly "
                                  "({} then {})".format(k1, k2))
        if g2 > g1:
            raise HypothesisError("g must be non-increasing "
                                  "(g({}) = {} < g({}) = {})"
                                  .format(k1, g1, k2, g2))
    if any(g < 0 for _, g in samples):
        raise HypothesisError("g must be non-negative")
    return samples


def decay_bound(k, l, g_k, params):
    "C (l-k)^{-β} g(k)^{1+α}"
    return params.C * (l - k) ** (-params.beta) * g_k ** (1 + params.alpha)


def verify_hypothesis(samples, params):
    """
    All sample pairs l > k that break the decay inequality ::

        ([(Float, Float)], DecayParams) -> ViolationReport
    """
    samples = check_samples(samples)
    params.validate()
    violations = []
    n_pairs = 0
    for i, (k, g_k) in enumerate(samples):
        for l, g_l in samples[i + 1:]:
            n_pairs += 1
            bound = decay_bound(k, l, g_k, params)
            if g_l > bound:
                violations.append((k, l, g_l, bound))
    return ViolationReport(violations=violations, n_pairs=n_pairs)

# ---------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------


def c_prime(g1, params):
    """
    C' = 2^β C g(1)^{1+α}, so that g(l) <= C' l^{-β} once l >= 2
    """
    return 2 ** params.beta * params.C * g1 ** (1 + params.alpha)


def _conditions(kappa, cprime, params):
    "the largeness conditions on κ, as {name: (value, holds)}"
    alpha, beta, C = params.alpha, params.beta, params.C
    recursion = (C * cprime ** (alpha / 2) *
                 2 ** ((2 * alpha * beta + 4 * beta) / alpha) *
                 kappa ** (-alpha * beta / 2))
    ratio = (cprime / kappa) ** (1 + alpha / 2)
    start = cprime * kappa ** (-beta)
    return {'recursion': (recursion, recursion <= 1),
            'ratio': (ratio, ratio <= 1),
            'start': (start, start <= 1)}


def compute_bound(g1, params):
    """
    Smallest κ = 2^j >= 2 meeting every largeness condition, and
    L = κ + π²/6 ::

        (Float, DecayParams) -> DeGiorgiCertificate
    """
    if g1 < 0:
        raise HypothesisError("g(1) must be non-negative (got {})"
                              .format(g1))
    params.validate()
    cprime = c_prime(g1, params)
    kappa = 2.0
    for _ in range(_MAX_DOUBLINGS):
        checks = _conditions(kappa, cprime, params)
        if all(holds for _, holds in checks.values()):
            return DeGiorgiCertificate(kappa=kappa, L=kappa + BASEL,
                                       c_prime=cprime, checks=checks)
        kappa *= 2
    raise HypothesisError("no admissible kappa below 2^{}"
                          .format(_MAX_DOUBLINGS))


def extremal_sequence(cert, params, n_terms):
    """
    Values at h_0, ..., h_{n-1} of the worst g the hypothesis allows:
    start at g(h_0) = C' κ^{-β} and saturate
    g(h_i) = C i^{2β} g(h_{i-1})^{1+α} (capped by monotonicity)
    ::

        (DeGiorgiCertificate, DecayParams, Int) -> [(Float, Float)]
    """
    level = cert.kappa
    value = min(cert.c_prime * cert.kappa ** (-params.beta), 1.0)
    out = [(level, value)]
    for i in range(1, n_terms):
        level += 1.0 / i ** 2
        value = min(value,
                    params.C * i ** (2 * params.beta) *
                    value ** (1 + params.alpha))
        out.append((level, value))
    return out

# ---------------------------------------------------------------------
# empirical use
# ---------------------------------------------------------------------


def g_at_one(samples):
    """
    Upper bound for g(1) from samples: g at the largest threshold <= 1
    (monotonicity). Samples that start above 1 only bound g(1) from
    below, so they cannot certify anything
    """
    below = [g for k, g in samples if k <= 1]
    if not below:
        raise HypothesisError("no sample at or below k = 1")
    return below[-1]


def fit_decay_params(samples):
    """
    Least squares on log g(l) = log C - β log(l-k) + (1+α) log g(k)
    over pairs with positive values; C is then raised to 1.1 times the
    largest pairwise ratio so that the fitted constants verify
    """
    samples = check_samples(samples)
    rows = []
    rhs = []
    pairs = []
    for i, (k, g_k) in enumerate(samples):
        for l, g_l in samples[i + 1:]:
            pairs.append((k, l, g_k, g_l))
            if g_k > 0 and g_l > 0:
                rows.append([1.0, -math.log(l - k), math.log(g_k)])
                rhs.append(math.log(g_l))
    alpha, beta = DEFAULT_ALPHA, DEFAULT_BETA
    if len(rows) >= 3:
        coef = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
        if coef[1] > 0 and coef[2] > 1:
            beta, alpha = float(coef[1]), float(coef[2] - 1)
        else:
            _LOG.info("decay fit not positive (beta=%g, alpha=%g); using "
                      "defaults", coef[1], coef[2] - 1)
    ratio = 0.0
    for k, l, g_k, g_l in pairs:
        if g_l > 0:
            ratio = max(ratio,
                        g_l * (l - k) ** beta / g_k ** (1 + alpha))
    C = _FIT_INFLATION * ratio if ratio > 0 else 1.0
    return DecayParams(C=C, alpha=alpha, beta=beta)


def observed_level(samples):
    """
    First threshold from which g is 0; the last threshold otherwise
    """
    for k, g_k in samples:
        if g_k == 0:
            return k
    return samples[-1][0]


def empirical_vanishing_level(samples, params=None):
    """
    Fit (or take) decay constants, verify them on the data and, if they
    hold, certify a vanishing level ::

        ([(Float, Float)], Maybe DecayParams) -> VanishingReport
    """
    samples = check_samples(samples)
    if not samples:
        raise HypothesisError("no level-set samples")
    if params is None:
        params = fit_decay_params(samples)
    hypothesis = verify_hypothesis(samples, params)
    l_observed = observed_level(samples)
    if not hypothesis.ok:
        return VanishingReport(params=params, hypothesis=hypothesis,
                               certificate=None, l_observed=l_observed,
                               consistent=None)
    cert = compute_bound(g_at_one(samples), params)
    return VanishingReport(params=params, hypothesis=hypothesis,
                           certificate=cert, l_observed=l_observed,
                           consistent=cert.L >= l_observed)


def profile_samples(profile):
    """
    (k, a_k) pairs from a `LevelSetProfile`
    """
    return list(zip(profile.thresholds, profile.measures))
