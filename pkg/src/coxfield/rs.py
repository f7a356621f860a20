"""Replica-symmetric theory solver.

Solves the six coupled RS equations for the order parameters
(w, v, tau, w_hat, v_hat, tau_hat) of the regularized Cox model, with the
functional cumulative-hazard fixed point evaluated over a Monte Carlo
population of tuples (Delta, T, Z0, Q).  The prior-side expectations use
elastic-net closed forms (Gaussian tail/density); the data-side
expectations are population averages.
"""

from dataclasses import dataclass

import numpy as np

from .prox import prox_enet, prox_g
from .scalar import std_normal_pdf, std_normal_tail
from .synthgen import _sample_times_given_eta
from .survival import nelson_aalen


class RsInconsistencyError(RuntimeError):
    """The RS right-hand side left the admissible region."""


class RsNonConvergenceError(RuntimeError):
    """A fixed-point loop exhausted its iteration budget."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


@dataclass
class OrderParameters:
    """The six RS scalars."""

    w: float
    v: float
    tau: float
    w_hat: float
    v_hat: float
    tau_hat: float

    def as_array(self):
        return np.array([self.w, self.v, self.tau,
                         self.w_hat, self.v_hat, self.tau_hat])

    @staticmethod
    def from_array(a):
        return OrderParameters(*map(float, a))


@dataclass(frozen=True)
class RsPopulation:
    """Monte Carlo population (Z0, Q, Delta, T) with (Delta, T) | Z0 drawn
    from the survival generator at linear predictor theta0 * Z0."""

    z0: np.ndarray
    q: np.ndarray
    delta: np.ndarray
    t: np.ndarray
    theta0: float

    @property
    def size(self):
        return self.t.shape[0]

    def _sorted(self):
        cached = getattr(self, "_sorted_cache", None)
        if cached is None:
            cached = _SortedPopulation(self)
            object.__setattr__(self, "_sorted_cache", cached)
        return cached


@dataclass(frozen=True)
class RsLambda:
    """Piecewise-constant cumulative hazard at the sorted population times."""

    times: np.ndarray
    values: np.ndarray

    def evaluate(self, t):
        idx = np.searchsorted(self.times, t, side="right")
        padded = np.concatenate([[0.0], self.values])
        out = padded[idx]
        return float(out) if np.ndim(t) == 0 else out

    __call__ = evaluate


def sample_population(gen, theta0, n_pop=5000, seed=0):
    """Draw an i.i.d. RS population of size n_pop (at least 100)."""
    if n_pop < 100:
        raise ValueError("population size must be at least 100")
    rng = np.random.default_rng(seed)
    z0 = rng.standard_normal(n_pop)
    q = rng.standard_normal(n_pop)
    t, delta = _sample_times_given_eta(theta0 * z0, gen, rng)
    return RsPopulation(z0=z0, q=q, delta=delta, t=t, theta0=theta0)


class _SortedPopulation:
    """Population pre-sorted by time, with risk-set bookkeeping."""

    def __init__(self, pop):
        order = np.argsort(pop.t, kind="stable")
        self.t = pop.t[order]
        self.delta = pop.delta[order]
        self.u_base = order  # permutation into the original arrays
        self.n = pop.size
        # first index of each tie group (ties have measure zero for the
        # continuous generator but are handled exactly anyway)
        self.first = np.searchsorted(self.t, self.t, side="left")
        self.last = np.searchsorted(self.t, self.t, side="right") - 1

    def lambda_map(self, xi, lam_unused=None):
        # one application of the functional fixed-point map:
        # S(t_i) = mean_j Theta(t_j - t_i) e^{xi_j};
        # Lambda(t_i) = mean_j Theta(t_i - t_j) delta_j / S(t_j)
        expxi = np.exp(xi)
        suffix = np.cumsum(expxi[::-1])[::-1]
        s_at = suffix[self.first] / self.n
        contrib = self.delta / s_at / self.n
        return np.cumsum(contrib)[self.last]


def solve_lambda(pop, w, v, tau, damping=0.5, tol=1e-8, max_iter=500, init=None):
    """Solve the self-consistent cumulative-hazard equations at (w, v, tau).

    Damped fixed-point iteration over the population-discretized pair
    (Lambda, S); stops when the sup-norm of the *undamped* map residual
    falls below tol, so the returned hazard satisfies the first hazard
    equation to that accuracy.

    Returns an RsLambda on the sorted population times.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    sp = pop._sorted()
    u = (w * pop.z0 + v * pop.q)[sp.u_base]
    if init is not None:
        lam = np.asarray(init, dtype=float).copy()
    else:
        # tau-free initialization: population Nelson-Aalen at the raw field
        hz = nelson_aalen(sp.t, sp.delta, u)
        lam = hz.evaluate(sp.t)
    residual = np.inf
    for _ in range(max_iter):
        xi = prox_g(u, lam, sp.delta, tau)
        lam_new = sp.lambda_map(xi)
        residual = np.max(np.abs(lam_new - lam))
        if residual <= tol:
            # return the pre-update iterate: it is the one whose undamped
            # map residual was just verified
            return RsLambda(times=sp.t, values=lam)
        lam = (1.0 - damping) * lam + damping * lam_new
    raise RsNonConvergenceError("hazard fixed point did not converge", residual)


def enet_prior_moments(w_hat, v_hat, tau_hat, pen, nu):
    """Closed-form Gaussian expectations over the elastic-net prox.

    For the Gauss-Bernoulli signal prior, returns
    (E[beta0 phi]/theta0, E[prox'], E[phi^2]) where
    phi = prox_enet(w_hat*beta0/theta0 + v_hat*Z, tau_hat).
    """
    if v_hat <= 0:
        raise RsInconsistencyError("v_hat must be positive for the prior moments")
    a = pen.alpha * tau_hat
    shrink = 1.0 + pen.eta * tau_hat
    sigma1 = np.sqrt(v_hat ** 2 + w_hat ** 2 / nu)
    chi0 = a / v_hat
    chi1 = a / sigma1
    tail0, tail1 = std_normal_tail(chi0), std_normal_tail(chi1)
    pdf0, pdf1 = std_normal_pdf(chi0), std_normal_pdf(chi1)
    overlap = 2.0 * w_hat * tail1 / shrink
    active = 2.0 * (nu * tail1 + (1.0 - nu) * tail0)
    second = 2.0 * (nu * ((sigma1 ** 2 + a ** 2) * tail1 - sigma1 * a * pdf1)
                    + (1.0 - nu) * ((v_hat ** 2 + a ** 2) * tail0 - v_hat * a * pdf0)) \
        / shrink ** 2
    return overlap, active / shrink, second


def rs_rhs_enet(op, pop, lam, pen, nu, zeta):
    """Evaluate the right-hand sides of the six RS equations.

    Prior side (from w_hat, v_hat, tau_hat, in closed form): proposed
    w, tau, and v via the second moment of phi.  Data side (population
    averages of xi at the current w, v, tau and the hazard `lam`):
    proposed w_hat, tau_hat, v_hat.  Pure function of its inputs.

    Raises
    ------
    RsInconsistencyError
        If v_hat = 0, the proposed squared v is negative, or the
        tau_hat denominator v - E[Q xi] is not positive.
    """
    u = op.w * pop.z0 + op.v * pop.q
    xi = prox_g(u, lam.evaluate(pop.t), pop.delta, op.tau)
    e_z0xi = np.mean(pop.z0 * xi)
    e_qxi = np.mean(pop.q * xi)
    e_sq = np.mean((xi - u) ** 2)

    w_hat_new = op.w - (op.tau_hat / (zeta * op.tau)) * (op.w - e_z0xi)
    denom = op.v - e_qxi
    if denom <= 0:
        raise RsInconsistencyError("nonpositive tau_hat denominator v - E[Q xi]")
    tau_hat_new = zeta * op.tau * op.v / denom
    v_hat_new = (op.tau_hat / op.tau) * np.sqrt(e_sq / zeta)

    overlap, active, second = enet_prior_moments(op.w_hat, op.v_hat, op.tau_hat,
                                                 pen, nu)
    w_new = overlap
    tau_new = op.tau_hat * active
    disc = second - w_new ** 2
    if disc < 0:
        raise RsInconsistencyError("RS inconsistency: negative proposed v^2")
    return OrderParameters(w=w_new, v=float(np.sqrt(disc)), tau=tau_new,
                           w_hat=float(w_hat_new), v_hat=float(v_hat_new),
                           tau_hat=float(tau_hat_new))


_DEFAULT_INIT = OrderParameters(w=0.5, v=0.5, tau=1.0,
                                w_hat=0.5, v_hat=0.5, tau_hat=1.0)


def solve_rs(pen, nu, theta0, zeta, gen, n_pop=5000, seed=0, damping=0.5,
             tol=1e-6, max_iter=500, init=None, pop=None):
    """Solve the six RS equations by damped fixed-point iteration.

    Alternates the functional hazard solve with one evaluation of the
    right-hand sides; converged when the sup-change of the six scalars
    falls below tol.  Pass `pop` to reuse one population across calls
    (common random numbers along a regularization path).

    Returns
    -------
    (OrderParameters, RsLambda)
    """
    if pop is None:
        pop = sample_population(gen, theta0, n_pop, seed)
    op = init or OrderParameters(w=_DEFAULT_INIT.w * theta0, v=_DEFAULT_INIT.v,
                                 tau=_DEFAULT_INIT.tau,
                                 w_hat=_DEFAULT_INIT.w_hat * theta0,
                                 v_hat=_DEFAULT_INIT.v_hat,
                                 tau_hat=_DEFAULT_INIT.tau_hat)
    lam_values = None
    residual = np.inf
    for _ in range(max_iter):
        lam = solve_lambda(pop, op.w, op.v, op.tau, damping=damping,
                           init=lam_values)
        lam_values = lam.values
        prop = rs_rhs_enet(op, pop, lam, pen, nu, zeta)
        residual = np.max(np.abs(prop.as_array() - op.as_array()))
        op = OrderParameters.from_array((1.0 - damping) * op.as_array()
                                        + damping * prop.as_array())
        if residual <= tol:
            lam = solve_lambda(pop, op.w, op.v, op.tau, damping=damping,
                               init=lam_values)
            return op, lam
    raise RsNonConvergenceError("RS fixed point did not converge", residual)


def solve_rs_path(pens, nu, theta0, zeta, gen, n_pop=5000, seed=0,
                  damping=0.5, tol=1e-6, max_iter=500, inits=None):
    """Solve the RS equations along a penalty grid with warm starts.

    One population is drawn once and reused at every grid point.  Points
    that fail (non-convergence or RS inconsistency) are returned as None.
    `inits` optionally supplies a per-point starting OrderParameters
    (e.g. a previously solved path on another population); otherwise each
    point starts from the previous point's solution.
    """
    pop = sample_population(gen, theta0, n_pop, seed)
    results = []
    init = None
    for i, pen in enumerate(pens):
        start = init
        if inits is not None and inits[i] is not None:
            start = inits[i]
        try:
            op, lam = solve_rs(pen, nu, theta0, zeta, gen, seed=seed,
                               damping=damping, tol=tol, max_iter=max_iter,
                               init=start, pop=pop)
        except (RsInconsistencyError, RsNonConvergenceError):
            results.append(None)
        else:
            init = op
            results.append((op, lam))
    return results


def sample_prior(nu, theta0, n_draws, seed):
    """i.i.d. draws from the Gauss-Bernoulli signal prior and N(0,1)."""
    rng = np.random.default_rng(seed)
    beta0 = np.where(rng.uniform(size=n_draws) < nu,
                     rng.normal(0.0, theta0 / np.sqrt(nu), size=n_draws), 0.0)
    z = rng.standard_normal(n_draws)
    return beta0, z


def rs_residuals_general(op, pop, beta0_draws, z_draws, pen, theta0, zeta,
                         lam=None):
    """Monte Carlo residuals of the six RS equations in their general form.

    Uses phi = prox_enet(w_hat*beta0/theta0 + v_hat*Z, tau_hat) on the
    prior side (no closed forms), and the population on the data side;
    cross-validates the closed-form solution path.  Returns an array of
    six residuals ordered (rs1, ..., rs6).
    """
    phi = prox_enet(op.w_hat * beta0_draws / theta0 + op.v_hat * z_draws,
                    op.tau_hat, pen)
    if lam is None:
        lam = solve_lambda(pop, op.w, op.v, op.tau)
    u = op.w * pop.z0 + op.v * pop.q
    xi = prox_g(u, lam.evaluate(pop.t), pop.delta, op.tau)
    r = np.empty(6)
    r[0] = op.w - np.mean(beta0_draws * phi) / theta0
    r[1] = op.v_hat * op.tau / op.tau_hat - np.mean(z_draws * phi)
    r[2] = (op.w ** 2 + op.v ** 2) - np.mean(phi ** 2)
    r[3] = op.w_hat - (op.w - (op.tau_hat / (zeta * op.tau))
                       * (op.w - np.mean(pop.z0 * xi)))
    r[4] = op.v * (1.0 - zeta * op.tau / op.tau_hat) - np.mean(pop.q * xi)
    r[5] = zeta * op.v_hat ** 2 - (op.tau_hat / op.tau) ** 2 * np.mean((xi - u) ** 2)
    return r
