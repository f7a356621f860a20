"""Cox per-observation loss, its proximal map, and the elastic-net proximal map.

The per-observation loss is g(x, lam, delta) = lam * exp(x) - delta * x,
i.e. the part of the (profiled) negative log likelihood that depends on a
single linear predictor, with lam the cumulative hazard at the observed
time and delta the event indicator.

All maps are elementwise and accept scalars or numpy arrays.
"""

from dataclasses import dataclass

import numpy as np

from .scalar import lambert_w0_exp, soft_threshold


@dataclass(frozen=True)
class ElasticNetPenalty:
    """Elastic-net penalty alpha * ||b||_1 + (eta/2) * ||b||_2^2.

    Carries both parametrizations: the weights (alpha, eta) and the
    (strength, mixing) pair (rho, l1_ratio) with alpha = rho * l1_ratio,
    eta = rho * (1 - l1_ratio).  Construct through `from_weights` or
    `from_strength` so whichever pair you supplied is stored exactly.
    """

    alpha: float
    eta: float
    rho: float
    l1_ratio: float

    def __post_init__(self):
        if self.alpha < 0 or self.eta < 0:
            raise ValueError("penalty weights must be nonnegative")

    @staticmethod
    def from_weights(alpha, eta):
        rho = alpha + eta
        l1 = alpha / rho if rho > 0 else 1.0
        return ElasticNetPenalty(float(alpha), float(eta), float(rho), float(l1))

    @staticmethod
    def from_strength(rho, l1_ratio):
        if not 0.0 <= l1_ratio <= 1.0:
            raise ValueError("l1_ratio must lie in [0, 1]")
        return ElasticNetPenalty(float(rho * l1_ratio), float(rho * (1.0 - l1_ratio)),
                                 float(rho), float(l1_ratio))


def g(x, lam, delta):
    """Cox per-observation loss lam * exp(x) - delta * x."""
    return np.exp(x) * lam - delta * x


def g_dot(x, lam, delta):
    """First derivative of g in x: lam * exp(x) - delta."""
    return lam * np.exp(x) - delta


def g_ddot(x, lam, delta):
    """Second derivative of g in x: lam * exp(x)."""
    return lam * np.exp(x)


def _w_of(u, lam, delta, tau):
    # W0 of tau*lam*exp(tau*delta + u), evaluated through the log of the
    # argument so that divergent inputs degrade gracefully instead of
    # overflowing; lam == 0 gives log(0) = -inf and W0 = 0 exactly.
    with np.errstate(divide="ignore"):
        log_arg = tau * delta + u + np.log(tau * lam)
    return lambert_w0_exp(log_arg)


def prox_g(u, lam, delta, tau):
    """Proximal map of g: argmin_z (z-u)^2/(2 tau) + g(z, lam, delta).

    Closed form u + tau*delta - W0(tau * lam * exp(tau*delta + u)) via
    the Lambert function; requires tau > 0, lam >= 0.
    """
    return u + tau * delta - _w_of(u, lam, delta, tau)


def moreau_dot_g(u, lam, delta, tau):
    """Gradient in u of the Moreau envelope of g at step tau.

    Equals (u - prox)/tau = g_dot(prox); computed as W/tau - delta with
    W the Lambert factor of the proximal map, which cannot overflow.
    """
    return _w_of(u, lam, delta, tau) / tau - delta


def moreau_ddot_g(u, lam, delta, tau):
    """Second derivative in u of the Moreau envelope of g.

    Equals g_ddot(prox) / (1 + tau * g_ddot(prox)), always in [0, 1/tau).
    Since tau * g_ddot(prox) equals the Lambert factor W exactly, this is
    W / (tau * (1 + W)).
    """
    w = _w_of(u, lam, delta, tau)
    return w / (tau * (1.0 + w))


def cox_prox_bundle(u, lam, delta, tau):
    """Return (prox_g, moreau_dot_g, moreau_ddot_g) from one Lambert solve."""
    w = _w_of(u, lam, delta, tau)
    return u + tau * delta - w, w / tau - delta, w / (tau * (1.0 + w))


def prox_enet(u, tauhat, pen):
    """Elastic-net proximal map st(u, alpha*tauhat) / (1 + eta*tauhat)."""
    return soft_threshold(u, pen.alpha * tauhat) / (1.0 + pen.eta * tauhat)


def prox_enet_dot(u, tauhat, pen):
    """Derivative in u of the elastic-net proximal map.

    Takes the value 1/(1 + eta*tauhat) on the active set |u| > alpha*tauhat
    and 0 elsewhere; the kink |u| = alpha*tauhat is assigned 0 (left limit)
    so it never inflates the active-set fraction.
    """
    u = np.asarray(u, dtype=float)
    out = (np.abs(u) > pen.alpha * tauhat) / (1.0 + pen.eta * tauhat)
    return float(out) if out.ndim == 0 else out
