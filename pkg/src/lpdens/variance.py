"""Standard errors for the local fit.

Three routes: the automatic Gamma-hat estimator (default, boundary
adaptive, no support knowledge needed), a jackknife variant built from
leave-one-out averages of the symmetrized U-statistic kernel, and a
plug-in variant that combines quadrature moment matrices with the
estimated density.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeDensity, NonPositiveVariance
from .kernels import BasisKind, factorial, moments, selector_index
from .lpfit import LocalFit, derivative_estimate, fit_local
from .sample import Sample, edf, edf_values

_NEG_TOL = 1e-12


@dataclass(frozen=True)
class VarianceEstimate:
    method: str  # "gamma_hat" | "jackknife" | "plugin"
    Gamma_hat: np.ndarray | None
    V_hat: float
    se: float
    v: int
    scaling_note: str


def gamma_hat(sample: Sample, fit: LocalFit) -> np.ndarray:
    """Automatic variance matrix Gamma-hat.

    Defined as a triple sum over observations; computed through the exact
    factorization over the inner index, which reduces it to a double sum
    over in-window points:

        Gamma = n^-2 sum_{j,k} w_j w_k r_j r_k'
                      (EDF(min(x_j, x_k)) - EDF(x_j) EDF(x_k)).
    """
    A = fit.R * fit.w[:, None]
    F = edf_values(sample, fit.xw)
    # xw sorted, EDF monotone, so EDF(min(x_j,x_k)) = min(F_j, F_k)
    M = np.minimum.outer(F, F) - np.outer(F, F)
    return (A.T @ M @ A) / fit.n**2


def _quadratic_form(fit: LocalFit, Gamma: np.ndarray, vec: np.ndarray) -> float:
    z = fit.solve_S(vec)
    return float(z @ Gamma @ z)


def _se_from_form(q: float, n: int, h: float, v: int) -> float:
    if q < -_NEG_TOL:
        raise NonPositiveVariance(f"variance quadratic form is negative ({q:.3e})")
    return factorial(v) * np.sqrt(max(q, 0.0) / (n * h ** (2 * v)))


def standard_error(
    sample: Sample, fit: LocalFit, v: int, side: str | None = None
) -> VarianceEstimate:
    """Gamma-hat standard error for the order-v derivative estimate."""
    G = gamma_hat(sample, fit)
    e = np.zeros(fit.d)
    e[selector_index(fit.p, fit.basis, v, side)] = 1.0
    q = _quadratic_form(fit, G, e)
    se = _se_from_form(q, fit.n, fit.h, v)
    return VarianceEstimate(
        method="gamma_hat",
        Gamma_hat=G,
        V_hat=q,
        se=se,
        v=v,
        scaling_note="se = v! sqrt(q / (n h^{2v})); no interior/boundary branch",
    )


def difference_se(sample: Sample, fit: LocalFit) -> tuple[float, np.ndarray]:
    """Standard error of the density jump f(c+) - f(c-) from a joint cutoff fit.

    Uses the difference quadratic form with selector e_{1,+} - e_{1,-};
    returns (se, Gamma_hat).
    """
    if fit.basis is BasisKind.STANDARD:
        raise ValueError("difference_se requires a cutoff basis")
    G = gamma_hat(sample, fit)
    e = np.zeros(fit.d)
    e[selector_index(fit.p, fit.basis, 1, "right")] = 1.0
    e[selector_index(fit.p, fit.basis, 1, "left")] = -1.0
    q = _quadratic_form(fit, G, e)
    return _se_from_form(q, fit.n, fit.h, v=1), G


def jackknife_gamma(sample: Sample, fit: LocalFit) -> np.ndarray:
    """Gamma-hat^JK from leave-one-out averages of the symmetrized kernel.

    O(n m) via suffix sums of the weighted basis rows over the window.
    """
    n = fit.n
    values = sample.values
    G = fit.R * fit.w[:, None]  # g_j = r_j K_h(x_j - x), in-window rows
    pred = fit.fitted
    sumGpred = G.T @ pred

    # suffix sums over the sorted window: sum_{j: x_j >= t} g_j
    suffix = np.zeros((len(fit.xw) + 1, fit.d))
    suffix[:-1] = np.cumsum(G[::-1], axis=0)[::-1]

    pos = np.searchsorted(fit.xw, values, side="left")
    abar = suffix[pos] - sumGpred  # sum_{j in win} g_j (1[x_i <= x_j] - pred_j)

    # window members: remove the j=i term and add the fixed-i side term
    lo = int(np.searchsorted(values, fit.x - fit.h, side="left"))
    win = slice(lo, lo + len(fit.xw))
    Fw = edf_values(sample, fit.xw)
    abar[win] -= G * (1.0 - pred)[:, None]
    abar[win] += G * (n * Fw - 1.0 - (n - 1) * pred)[:, None]
    abar /= n - 1

    ubar = abar.mean(axis=0)
    return (abar.T @ abar) / n - np.outer(ubar, ubar)


def jackknife_se(
    sample: Sample, fit: LocalFit, v: int, side: str | None = None
) -> VarianceEstimate:
    """Jackknife-based standard error; same assembly as the Gamma-hat route."""
    G = jackknife_gamma(sample, fit)
    e = np.zeros(fit.d)
    e[selector_index(fit.p, fit.basis, v, side)] = 1.0
    q = _quadratic_form(fit, G, e)
    se = _se_from_form(q, fit.n, fit.h, v)
    return VarianceEstimate(
        method="jackknife",
        Gamma_hat=G,
        V_hat=q,
        se=se,
        v=v,
        scaling_note="se = v! sqrt(q / (n h^{2v})) with Gamma-hat^JK",
    )


def plugin_se(
    sample: Sample, x: float, h: float, p: int, v: int, kernel: str = "triangular"
) -> VarianceEstimate:
    """Plug-in standard error: quadrature S, Gamma plus the estimated density.

    Requires knowledge of the support (through the evaluation region) and a
    positive density estimate; raises :class:`NegativeDensity` otherwise.
    """
    if p < 1 or v < 1:
        raise ValueError("plug-in route requires p >= 1 and v >= 1")
    fit = fit_local(sample, x, h, p, kernel)
    f_hat = derivative_estimate(fit, 1)
    if f_hat <= 0:
        raise NegativeDensity(f"estimated density {f_hat} <= 0 at x={x}")
    mom = moments(kernel, fit.region, p)
    e = np.zeros(p + 1)
    e[v] = 1.0
    z = np.linalg.solve(mom.S, e)
    V_hat = factorial(v) ** 2 * f_hat * float(z @ mom.Gamma @ z)
    se = float(np.sqrt(V_hat / (sample.n * h ** (2 * v - 1))))
    return VarianceEstimate(
        method="plugin",
        Gamma_hat=None,
        V_hat=V_hat,
        se=se,
        v=v,
        scaling_note="se = sqrt(V / (n h^{2v-1})), V = (v!)^2 f S^-1 Gamma S^-1",
    )
