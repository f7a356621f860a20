"""Independent oracles used by the test suite.

Nothing here touches the solver internals: the proximal-gradient
minimizer drives the penalized partial likelihood through its raw
definition, scalar proxima are found by golden-section search, and
envelopes by bounded 1-D minimization.
"""

import numpy as np
from scipy.optimize import minimize_scalar

from coxfield.prox import prox_enet
from coxfield.survival import nelson_aalen, penalized_partial_likelihood
from coxfield.prox import ElasticNetPenalty

_NO_PEN = ElasticNetPenalty.from_weights(0.0, 0.0)


def bisect_lambert(x, lo=-1.0, hi=800.0, iters=200):
    """Solve w * exp(w) = x by bisection on [-1, hi]."""
    f = lambda w: w * np.exp(w) - x
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_prox_g(u, lam, delta, tau, width=60.0):
    """Minimize (z-u)^2/(2 tau) + lam e^z - delta z by golden-section."""
    obj = lambda z: (z - u) ** 2 / (2.0 * tau) + lam * np.exp(z) - delta * z
    res = minimize_scalar(obj, bracket=(u + tau * delta - width, u + tau * delta + 1.0),
                          method="golden", options={"xtol": 1e-13})
    return res.x


def envelope_g(u, lam, delta, tau, width=60.0):
    """Moreau envelope value of the Cox loss by bounded minimization."""
    obj = lambda z: (z - u) ** 2 / (2.0 * tau) + lam * np.exp(z) - delta * z
    res = minimize_scalar(obj, bounds=(u + tau * delta - width, u + tau * delta + 1.0),
                          method="bounded", options={"xatol": 1e-12})
    return obj(res.x)


def ppl_gradient(data, beta):
    """Gradient of the unpenalized partial likelihood (profile identity)."""
    lp = data.design @ beta
    hz = nelson_aalen(data.times, data.events, lp)
    return data.design.T @ (hz.evaluate(data.times) * np.exp(lp) - data.events)


def prox_gradient_minimizer(data, pen, tol=1e-12, max_iter=200000):
    """Proximal-gradient minimizer of the penalized partial likelihood.

    Backtracking line search on the smooth part; independent of both
    production solvers.
    """
    beta = np.zeros(data.p)
    step = 1.0
    loss = penalized_partial_likelihood(data, beta, _NO_PEN)
    for _ in range(max_iter):
        grad = ppl_gradient(data, beta)
        while True:
            cand = prox_enet(beta - step * grad, step, pen)
            cand_loss = penalized_partial_likelihood(data, cand, _NO_PEN)
            diff = cand - beta
            if cand_loss <= loss + grad @ diff + diff @ diff / (2 * step) + 1e-15:
                break
            step *= 0.5
        if np.max(np.abs(cand - beta)) < tol:
            return cand
        beta, loss = cand, cand_loss
        step *= 1.25
    return beta
