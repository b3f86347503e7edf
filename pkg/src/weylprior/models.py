"""Parametric statistical families: charts, sample spaces, densities, scores.

A ModelSpec evaluates log-densities and analytic scores in its reference
chart; alternate charts carry smooth bijections to the reference chart with
Jacobians, and chart-native scores follow by the chain rule.

Built-in families: gaussian1d (reference chart (mu, sigma^2)), gaussian_mv(n)
(reference chart (mu, vech Sigma), vech = upper triangle, row-major),
bernoulli, poisson.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidConfigError, UnknownModelError

# margin used for interiority checks of chart domains; FD stencils need room
DOMAIN_MARGIN = 1e-10

LOG_2PI = np.log(2.0 * np.pi)


class Chart:
    """A coordinate system with an optional bijection to the reference chart.

    ``to_reference``/``from_reference`` are None for the reference chart
    itself (identity).  ``jacobian`` evaluates d(theta_ref)/d(theta_chart).
    """

    def __init__(self, name, coords, contains,
                 to_reference=None, from_reference=None, jacobian=None):
        self.name = name
        self.coords = list(coords)
        self.dim = len(self.coords)
        self._contains = contains
        self._to_ref = to_reference
        self._from_ref = from_reference
        self._jacobian = jacobian

    def contains(self, theta, margin=DOMAIN_MARGIN):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,) or not np.all(np.isfinite(theta)):
            return False
        return bool(self._contains(theta, margin))

    def to_reference(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self._to_ref is None:
            return theta
        return np.asarray(self._to_ref(theta), dtype=float)

    def from_reference(self, theta_ref):
        theta_ref = np.asarray(theta_ref, dtype=float)
        if self._from_ref is None:
            return theta_ref
        return np.asarray(self._from_ref(theta_ref), dtype=float)

    def jacobian(self, theta):
        """d(theta_ref)/d(theta_chart), an (m, m) matrix."""
        theta = np.asarray(theta, dtype=float)
        if self._jacobian is None:
            return np.eye(self.dim)
        return np.asarray(self._jacobian(theta), dtype=float)


@dataclass(frozen=True)
class SampleSpace:
    """Continuous R^d or a discrete support with an accuracy-bounded truncation."""

    kind: str                       # "continuous" | "discrete"
    dim: int
    support: Optional[Callable] = None   # theta_ref -> sample points, discrete only
    tail_bound: float = 1e-12


@dataclass
class ModelSpec:
    id: str
    dim: int                        # manifold dimension m
    sample_space: SampleSpace
    charts: dict
    reference: str
    log_density: Callable           # (x, theta_ref) -> (q,)
    analytic_score: Optional[Callable] = None  # (x, theta_ref) -> (q, m)
    standardize: Optional[Callable] = None     # theta_ref -> (mean (d,), chol (d, d))
    log_partition: dict = field(default_factory=dict)  # chart name -> callable

    def chart(self, name=None):
        if name is None:
            return self.charts[self.reference]
        try:
            return self.charts[name]
        except KeyError:
            raise UnknownModelError(
                f"model {self.id!r} has no chart {name!r}; "
                f"available: {sorted(self.charts)}") from None

    def require_interior(self, theta, chart=None, margin=DOMAIN_MARGIN):
        ch = self.chart(chart) if isinstance(chart, (str, type(None))) else chart
        if not ch.contains(theta, margin):
            raise DomainError(
                f"theta={np.asarray(theta, dtype=float).tolist()} is not interior "
                f"to the domain of chart {ch.name!r} of model {self.id!r}")
        return ch

    def score_ref(self, x, theta_ref):
        """Score in the reference chart; analytic when available, else central FD."""
        if self.analytic_score is not None:
            return np.asarray(self.analytic_score(x, theta_ref), dtype=float)
        return _fd_score(self, x, theta_ref)


def _fd_score(model, x, theta_ref, rel_step=1e-5):
    theta_ref = np.asarray(theta_ref, dtype=float)
    m = model.dim
    x = np.asarray(x, dtype=float)
    q = x.shape[0] if x.ndim else 1
    out = np.empty((q, m))
    for i in range(m):
        h = rel_step * (abs(theta_ref[i]) + 1.0)
        tp = theta_ref.copy()
        tm = theta_ref.copy()
        tp[i] += h
        tm[i] -= h
        out[:, i] = (model.log_density(x, tp) - model.log_density(x, tm)) / (2.0 * h)
    return out


def score(model, x, theta, chart=None):
    """Score vector(s) d/dtheta log p(x|theta) in the given chart.

    Applies the chain rule through the chart's bijection to the reference
    chart: s_chart = J^T s_ref with J = d(theta_ref)/d(theta_chart).
    """
    ch = model.require_interior(theta, chart)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    if scalar:
        x = x.reshape(1)
    theta_ref = ch.to_reference(theta)
    s = model.score_ref(x, theta_ref)
    if ch.name != model.reference:
        s = s @ ch.jacobian(theta)
    return s[0] if scalar else s


def log_density(model, x, theta, chart=None):
    """log p(x|theta) with theta given in the requested chart."""
    ch = model.require_interior(theta, chart)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0 and model.sample_space.dim == 1
    if scalar:
        x = x.reshape(1)
    out = np.asarray(model.log_density(x, ch.to_reference(theta)), dtype=float)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"non-finite log-density for model {model.id!r} at "
                          f"theta={np.asarray(theta, dtype=float).tolist()}")
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# vech helpers (upper triangle, row-major)

def vech_indices(n):
    return [(i, j) for i in range(n) for j in range(i, n)]

def mat_from_vech(v, n):
    sig = np.empty((n, n))
    for k, (i, j) in enumerate(vech_indices(n)):
        sig[i, j] = v[k]
        sig[j, i] = v[k]
    return sig

def vech_from_mat(a):
    n = a.shape[0]
    return np.array([a[i, j] for i, j in vech_indices(n)])


# ---------------------------------------------------------------------------
# gaussian1d

def _gaussian1d():
    def contains_ms2(t, margin):
        return t[1] > margin

    ref = Chart("mu_sigma2", ["mu", "s2"], contains_ms2)

    mu_sigma = Chart(
        "mu_sigma", ["mu", "sigma"],
        lambda t, margin: t[1] > margin,
        to_reference=lambda t: np.array([t[0], t[1] ** 2]),
        from_reference=lambda t: np.array([t[0], np.sqrt(t[1])]),
        jacobian=lambda t: np.array([[1.0, 0.0], [0.0, 2.0 * t[1]]]),
    )

    def nat_to_ref(e):
        s2 = -1.0 / (2.0 * e[1])
        return np.array([e[0] * s2, s2])

    def nat_from_ref(t):
        return np.array([t[0] / t[1], -1.0 / (2.0 * t[1])])

    def nat_jac(e):
        # mu = -e1/(2 e2), s2 = -1/(2 e2)
        return np.array([
            [-1.0 / (2.0 * e[1]), e[0] / (2.0 * e[1] ** 2)],
            [0.0, 1.0 / (2.0 * e[1] ** 2)],
        ])

    natural = Chart("natural", ["eta1", "eta2"],
                    lambda t, margin: t[1] < -margin,
                    to_reference=nat_to_ref, from_reference=nat_from_ref,
                    jacobian=nat_jac)

    def logp(x, t):
        mu, s2 = t
        return -0.5 * (LOG_2PI + np.log(s2)) - (x - mu) ** 2 / (2.0 * s2)

    def sc(x, t):
        mu, s2 = t
        d = x - mu
        return np.column_stack([d / s2, d ** 2 / (2.0 * s2 ** 2) - 1.0 / (2.0 * s2)])

    def std(t):
        return np.array([t[0]]), np.array([[np.sqrt(t[1])]])

    def psi(eta):
        # log-partition of exp(eta1 x + eta2 x^2 - psi)
        return -eta[0] ** 2 / (4.0 * eta[1]) + 0.5 * np.log(-np.pi / eta[1])

    return ModelSpec(
        id="gaussian1d", dim=2,
        sample_space=SampleSpace("continuous", 1),
        charts={c.name: c for c in (ref, mu_sigma, natural)},
        reference="mu_sigma2",
        log_density=logp, analytic_score=sc, standardize=std,
        log_partition={"natural": psi},
    )


# ---------------------------------------------------------------------------
# gaussian_mv(n)

def _gaussian_mv(n):
    m = n + n * (n + 1) // 2
    idx = vech_indices(n)

    def split(t):
        mu = np.asarray(t[:n], dtype=float)
        sig = mat_from_vech(np.asarray(t[n:], dtype=float), n)
        return mu, sig

    def contains(t, margin):
        _, sig = split(t)
        try:
            np.linalg.cholesky(sig - margin * np.eye(n))
        except np.linalg.LinAlgError:
            return False
        return True

    coords = [f"mu{i}" for i in range(n)] + [f"s{i}{j}" for i, j in idx]
    ref = Chart("mu_vech", coords, contains)

    def logp(x, t):
        mu, sig = split(t)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        L = np.linalg.cholesky(sig)
        z = np.linalg.solve(L, (x - mu).T)  # (n, q)
        logdet = 2.0 * np.sum(np.log(np.diag(L)))
        return -0.5 * (n * LOG_2PI + logdet + np.sum(z * z, axis=0))

    def sc(x, t):
        mu, sig = split(t)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        p = np.linalg.inv(sig)
        z = (x - mu) @ p                       # (q, n), = Sigma^{-1}(x-mu)
        a = 0.5 * (z[:, :, None] * z[:, None, :] - p)  # dl/dSigma as a matrix
        cols = [z[:, i] for i in range(n)]
        for i, j in idx:
            cols.append(a[:, i, j] if i == j else 2.0 * a[:, i, j])
        return np.column_stack(cols)

    def std(t):
        mu, sig = split(t)
        return mu, np.linalg.cholesky(sig)

    return ModelSpec(
        id=f"gaussian_mv:{n}", dim=m,
        sample_space=SampleSpace("continuous", n),
        charts={ref.name: ref}, reference="mu_vech",
        log_density=logp, analytic_score=sc, standardize=std,
    )


# ---------------------------------------------------------------------------
# bernoulli

def _bernoulli():
    ref = Chart("p", ["p"], lambda t, margin: margin < t[0] < 1.0 - margin)

    natural = Chart(
        "natural", ["eta"], lambda t, margin: True,
        to_reference=lambda e: np.array([1.0 / (1.0 + np.exp(-e[0]))]),
        from_reference=lambda t: np.array([np.log(t[0] / (1.0 - t[0]))]),
        jacobian=lambda e: np.array(
            [[np.exp(-e[0]) / (1.0 + np.exp(-e[0])) ** 2]]),
    )

    def logp(x, t):
        p = t[0]
        return x * np.log(p) + (1.0 - x) * np.log1p(-p)

    def sc(x, t):
        p = t[0]
        return ((x - p) / (p * (1.0 - p))).reshape(-1, 1)

    return ModelSpec(
        id="bernoulli", dim=1,
        sample_space=SampleSpace("discrete", 1,
                                 support=lambda t: np.array([0.0, 1.0])),
        charts={c.name: c for c in (ref, natural)}, reference="p",
        log_density=logp, analytic_score=sc,
        log_partition={"natural": lambda e: np.logaddexp(0.0, e[0])},
    )


# ---------------------------------------------------------------------------
# poisson

def poisson_truncation(lam, tail_bound=1e-12):
    """Smallest support size N+1 such that P(X > N) < tail_bound."""
    n = int(lam + 10.0 * np.sqrt(lam) + 20.0)
    logpmf = lambda k: k * np.log(lam) - lam - gammaln(k + 1.0)
    # extend until the remaining mass bound (geometric tail estimate) is tiny
    while True:
        # for k >= n, pmf(k+1)/pmf(k) = lam/(k+1) <= r < 1
        r = lam / (n + 1.0)
        tail = np.exp(logpmf(n + 1)) / (1.0 - r)
        if tail < tail_bound:
            return n
        n = int(1.5 * n) + 1


def _poisson():
    ref = Chart("lam", ["lam"], lambda t, margin: t[0] > margin)
    natural = Chart(
        "natural", ["eta"], lambda t, margin: np.isfinite(t[0]),
        to_reference=lambda e: np.array([np.exp(e[0])]),
        from_reference=lambda t: np.array([np.log(t[0])]),
        jacobian=lambda e: np.array([[np.exp(e[0])]]),
    )

    def logp(x, t):
        lam = t[0]
        return x * np.log(lam) - lam - gammaln(x + 1.0)

    def sc(x, t):
        lam = t[0]
        return (x / lam - 1.0).reshape(-1, 1)

    def support(t):
        return np.arange(poisson_truncation(t[0]) + 1, dtype=float)

    return ModelSpec(
        id="poisson", dim=1,
        sample_space=SampleSpace("discrete", 1, support=support),
        charts={c.name: c for c in (ref, natural)}, reference="lam",
        log_density=logp, analytic_score=sc,
        log_partition={"natural": lambda e: np.exp(e[0])},
    )


# ---------------------------------------------------------------------------

def get_model(model_id, n=None):
    """Build one of the registered families.

    ids: "gaussian1d", "gaussian_mv" (requires n >= 1), "bernoulli",
    "poisson".  The CLI syntax "gaussian_mv:2" is accepted too.
    """
    if ":" in str(model_id):
        base, _, arg = str(model_id).partition(":")
        if base != "gaussian_mv":
            raise UnknownModelError(f"unknown model id {model_id!r}")
        try:
            n = int(arg)
        except ValueError:
            raise InvalidConfigError(
                f"bad dimension in model spec {model_id!r}") from None
        model_id = base
    if model_id == "gaussian1d":
        return _gaussian1d()
    if model_id == "gaussian_mv":
        if n is None or int(n) < 1:
            raise InvalidConfigError("gaussian_mv requires data dimension n >= 1")
        return _gaussian_mv(int(n))
    if model_id == "bernoulli":
        return _bernoulli()
    if model_id == "poisson":
        return _poisson()
    raise UnknownModelError(f"unknown model id {model_id!r}")
