"""Insider objective, first-order conditions, and zero-impact directions.

The insider with signal s_t trading schedule W earns

    J(W) = E[ int W(x) (eta(x, s_t) - P(x)) dx ],

where P is the market maker's posterior-mean price curve.  Perturbing W by
eps * v moves J through three channels: the direct payoff int v eta dx, the
price paid int v P dx, and the price pressure of v on P via the likelihoods.
foc_terms reports all three next to a central finite difference computed on
the same shocks, so the comparison is exact up to discretization and O(eps^2)
curvature rather than Monte Carlo noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import NoiseProfile, PayoffFamily, StateGrid, weighted_inner_product
from .orderflow import iter_shock_blocks, log_likelihoods, posterior_weights

_ERR = "adkyle.objective"

FD_REL_EPS = 1e-3     # eps = FD_REL_EPS * |W|_inf / |v|_inf, floored below
FD_EPS_FLOOR = 1e-4
DEFAULT_FOC_PATHS = 20_000
GS_DROP_TOL = 1e-8    # relative residual below which a direction is dependent


@dataclass(frozen=True)
class FocReport:
    """Directional first-order condition, analytic terms vs finite difference.

    Attributes:
        payoff_term: int v eta(., s_t) dx (exact quadrature, no noise).
        adverse_selection_term: E[int v P dx].
        impact_term: E[int W Cov_post(eta(x, .), <v, W_tilde_.>_sigma) dx].
        analytic_total: payoff - adverse_selection - impact.
        fd_total: central difference (J(W+eps v) - J(W-eps v)) / (2 eps) on
            common shocks.
        fd_epsilon: step used for the central difference.
        diff: analytic_total - fd_total.
        std_err_diff: standard error of the per-path coupled residual; the
            natural yardstick when the two estimators share shocks.
        std_err_fd: standard error of fd_total as a plain Monte Carlo mean;
            the yardstick for |fd_total| itself (e.g. stationarity checks).
        n_paths: Monte Carlo paths.
        seed: seed for the shock stream.
    """

    payoff_term: float
    adverse_selection_term: float
    impact_term: float
    analytic_total: float
    fd_total: float
    fd_epsilon: float
    diff: float
    std_err_diff: float
    std_err_fd: float
    n_paths: int
    seed: int


def _check_rows(grid: StateGrid, **rows: np.ndarray) -> dict[str, np.ndarray]:
    out = {}
    for name, row in rows.items():
        arr = np.asarray(row, dtype=float)
        if arr.shape != (grid.n,):
            raise ValueError(f"{_ERR}: {name} must have length n={grid.n}")
        out[name] = arr
    return out


def expected_utility(
    w_row: np.ndarray,
    w_tilde: np.ndarray,
    family: PayoffFamily,
    true_index: int,
    noise: NoiseProfile,
    grid: StateGrid,
    n_paths: int = DEFAULT_FOC_PATHS,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte Carlo estimate of J(W) and its standard error.

    The market maker prices with the candidate schedules w_tilde (I x n); the
    insider actually trades w_row while the realized signal is true_index.
    """
    w_row = _check_rows(grid, w_row=w_row)["w_row"]
    eta_t = family.eta[true_index]
    gw = grid.quad_weights
    trade_w = gw * w_row  # quadrature-weighted trade sizes
    h = grid.h
    drift = w_row[:-1] * h
    scale = noise.sigma[:-1] * math.sqrt(h)

    profits = np.empty(int(n_paths))
    for offset, shocks in iter_shock_blocks(grid, seed, int(n_paths)):
        inc = drift + scale * shocks
        pi = posterior_weights(log_likelihoods(w_tilde, inc, noise, grid))
        price = pi @ family.eta
        profits[offset : offset + inc.shape[0]] = (eta_t[None, :] - price) @ trade_w
    mean = float(profits.mean())
    std_err = float(profits.std(ddof=1) / math.sqrt(len(profits))) if len(profits) > 1 else 0.0
    return mean, std_err


def foc_terms(
    w_row: np.ndarray,
    v_row: np.ndarray,
    w_tilde: np.ndarray,
    family: PayoffFamily,
    true_index: int,
    noise: NoiseProfile,
    grid: StateGrid,
    n_paths: int = DEFAULT_FOC_PATHS,
    seed: int = 0,
) -> FocReport:
    """Directional derivative of the insider objective, three ways decomposed.

    The impact channel uses the per-path posterior exactly (covariance over
    the I signal atoms), so no nested simulation is required.  The finite
    difference reuses the same shocks with drift shifted by +- eps * v; no
    re-simulation.

    Raises:
        ValueError: if the direction v is identically zero.
    """
    rows = _check_rows(grid, w_row=w_row, v_row=v_row)
    w_row, v_row = rows["w_row"], rows["v_row"]
    w_tilde = np.asarray(w_tilde, dtype=float)
    v_max = float(np.max(np.abs(v_row)))
    if v_max == 0.0:
        raise ValueError(f"{_ERR}: direction v is identically zero")
    w_max = float(np.max(np.abs(w_row)))
    eps = max(FD_REL_EPS * w_max / v_max, FD_EPS_FLOOR)

    eta = family.eta
    eta_t = eta[true_index]
    gw = grid.quad_weights
    h = grid.h

    payoff_term = float(np.dot(gw * v_row, eta_t))
    # Likelihood sensitivities to the direction, one per candidate signal.
    d_vec = np.array([weighted_inner_product(v_row, row, noise, grid) for row in w_tilde])

    drift = w_row[:-1] * h
    shift = v_row[:-1] * h  # drift change per unit eps (left endpoint)
    scale = noise.sigma[:-1] * math.sqrt(h)
    trade_w = gw * w_row
    trade_v = gw * v_row
    trade_plus = gw * (w_row + eps * v_row)
    trade_minus = gw * (w_row - eps * v_row)
    eta_d = d_vec[:, None] * eta  # I x n, rows scaled by sensitivity

    n_paths = int(n_paths)
    ad = np.empty(n_paths)
    impact = np.empty(n_paths)
    fd = np.empty(n_paths)
    for offset, shocks in iter_shock_blocks(grid, seed, n_paths):
        m = shocks.shape[0]
        sl = slice(offset, offset + m)
        noise_part = scale * shocks
        inc = drift + noise_part

        pi = posterior_weights(log_likelihoods(w_tilde, inc, noise, grid))
        price = pi @ eta
        ad[sl] = price @ trade_v
        # Cov_pi(eta(x, .), d) = sum_i pi_i d_i eta_i(x) - P(x) * (pi . d)
        cov = pi @ eta_d - price * (pi @ d_vec)[:, None]
        impact[sl] = cov @ trade_w

        pi_p = posterior_weights(log_likelihoods(w_tilde, inc + eps * shift, noise, grid))
        pi_m = posterior_weights(log_likelihoods(w_tilde, inc - eps * shift, noise, grid))
        profit_p = (eta_t[None, :] - pi_p @ eta) @ trade_plus
        profit_m = (eta_t[None, :] - pi_m @ eta) @ trade_minus
        fd[sl] = (profit_p - profit_m) / (2.0 * eps)

    analytic_per_path = payoff_term - ad - impact
    residual = analytic_per_path - fd
    std_err = float(residual.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else 0.0
    std_err_fd = float(fd.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else 0.0
    return FocReport(
        payoff_term=payoff_term,
        adverse_selection_term=float(ad.mean()),
        impact_term=float(impact.mean()),
        analytic_total=float(analytic_per_path.mean()),
        fd_total=float(fd.mean()),
        fd_epsilon=eps,
        diff=float(residual.mean()),
        std_err_diff=std_err,
        std_err_fd=std_err_fd,
        n_paths=n_paths,
        seed=int(seed),
    )


def zero_impact_basis(
    w_tilde: np.ndarray,
    noise: NoiseProfile,
    grid: StateGrid,
    drop_tol: float = GS_DROP_TOL,
) -> np.ndarray:
    """Smooth directions that move no posterior: <v, W_tilde_i>_sigma = 0 for all i.

    Candidates are the first 2I Legendre polynomials mapped to the grid; each
    is projected off the span of the candidate schedules (and previously kept
    directions) by two-pass Gram-Schmidt in the sigma-weighted inner product.
    Directions whose residual norm falls below drop_tol of their original norm
    are discarded as numerically dependent.

    Returns:
        (k, n) matrix of sigma-orthonormal zero-impact directions (k >= 1 for
        any kernel of rank < 2I).
    """
    w_tilde = np.atleast_2d(np.asarray(w_tilde, dtype=float))
    if w_tilde.shape[1] != grid.n:
        raise ValueError(f"{_ERR}: candidate schedules must have n={grid.n} columns")
    I = w_tilde.shape[0]

    def norm(f):
        return math.sqrt(max(weighted_inner_product(f, f, noise, grid), 0.0))

    # Orthonormalize the span to project against (rank-tolerant).
    span: list[np.ndarray] = []
    max_norm = max((norm(r) for r in w_tilde), default=0.0)
    for row in w_tilde:
        u = row.copy()
        for _ in range(2):
            for b in span:
                u = u - weighted_inner_product(u, b, noise, grid) * b
        nu = norm(u)
        if max_norm > 0.0 and nu > drop_tol * max_norm:
            span.append(u / nu)

    t = (2.0 * grid.nodes - (grid.x_min + grid.x_max)) / (grid.x_max - grid.x_min)
    dictionary = np.polynomial.legendre.legvander(t, 2 * I - 1).T  # 2I rows

    basis: list[np.ndarray] = []
    for cand in dictionary:
        n0 = norm(cand)
        if n0 == 0.0:
            continue
        u = cand.copy()
        for _ in range(2):
            for b in span + basis:
                u = u - weighted_inner_product(u, b, noise, grid) * b
        nu = norm(u)
        if nu > drop_tol * n0:
            basis.append(u / nu)
    if not basis:
        raise ValueError(f"{_ERR}: no zero-impact direction survived; enlarge the dictionary")
    return np.stack(basis)
