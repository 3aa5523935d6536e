"""Compiled inner loops shared by the public step, metric and training code.

Every arithmetic path that touches a codebook goes through these functions so
that the per-step API and the fused training loop produce identical floats.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def decay(t, hi, lo, tau):
    # hi*e + lo*(1-e) keeps both endpoints exact (e=1 -> hi, e=0 -> lo)
    e = math.exp(-t / tau)
    return hi * e + lo * (1.0 - e)


@njit(cache=True)
def bump(t, hi, lo, center, width):
    dt = t - center
    e = math.exp(-(dt * dt) / (2.0 * width * width))
    return hi * e + lo * (1.0 - e)


@njit(cache=True)
def grid_sqdist(locations, i, j):
    s = 0.0
    for d in range(locations.shape[1]):
        diff = locations[i, d] - locations[j, d]
        s += diff * diff
    return s


@njit(cache=True)
def neg_inv_width(spread):
    return -1.0 / (2.0 * spread * spread)


@njit(cache=True)
def kernel(rate, spread, sqdist):
    return rate * math.exp(sqdist * neg_inv_width(spread))


@njit(cache=True)
def sqdist_row(W, k, x):
    s = 0.0
    for j in range(W.shape[1]):
        diff = x[j] - W[k, j]
        s += diff * diff
    return s


@njit(cache=True)
def winner(W, x):
    best = 0
    best_d = np.inf
    for k in range(W.shape[0]):
        d = sqdist_row(W, k, x)
        if d < best_d:
            best_d = d
            best = k
    return best


@njit(cache=True)
def winner_pair(W, x):
    b1 = -1
    b2 = -1
    d1 = np.inf
    d2 = np.inf
    for k in range(W.shape[0]):
        d = sqdist_row(W, k, x)
        if b1 < 0 or d < d1:
            b2 = b1
            d2 = d1
            b1 = k
            d1 = d
        elif b2 < 0 or d < d2:
            b2 = k
            d2 = d
    return b1, b2


@njit(cache=True)
def winners(W, X):
    out = np.empty(X.shape[0], dtype=np.int64)
    for n in range(X.shape[0]):
        out[n] = winner(W, X[n])
    return out


@njit(cache=True)
def winner_pairs(W, X):
    out = np.empty((X.shape[0], 2), dtype=np.int64)
    for n in range(X.shape[0]):
        a, b = winner_pair(W, X[n])
        out[n, 0] = a
        out[n, 1] = b
    return out


@njit(cache=True)
def pull(W, x, center, rate, spread, locations):
    """Move every row toward x by rate * gaussian(grid distance to center)."""
    # same arithmetic as kernel(), with the width term hoisted
    neg = neg_inv_width(spread)
    for k in range(W.shape[0]):
        f = rate * math.exp(grid_sqdist(locations, center, k) * neg)
        for j in range(W.shape[1]):
            W[k, j] += f * (x[j] - W[k, j])


@njit(cache=True)
def data_update(W, x, t, a_max, a_min, tau_a, s_max, s_min, tau_s, locations):
    kd = winner(W, x)
    pull(W, x, kd, decay(t, a_max, a_min, tau_a), decay(t, s_max, s_min, tau_s), locations)
    return kd


@njit(cache=True)
def landmark_update(W, x, node, t, b_max, b_min, t_center, rho_b, r_max, r_min, tau_r, locations):
    pull(W, x, node, bump(t, b_max, b_min, t_center, rho_b), decay(t, r_max, r_min, tau_r), locations)


@njit(cache=True)
def run_steps(W, X, LX, lnodes, locations, t0, is_landmark, index, dp, lp):
    """Apply a block of pre-drawn steps in place.

    dp = (a_max, a_min, tau_a, sigma_max, sigma_min, tau_sigma)
    lp = (b_max, b_min, t_center, rho_b, rho_max, rho_min, tau_rho)
    """
    for i in range(index.shape[0]):
        t = float(t0 + i)
        if is_landmark[i]:
            m = index[i]
            landmark_update(W, LX[m], lnodes[m], t, lp[0], lp[1], lp[2], lp[3], lp[4], lp[5], lp[6], locations)
        else:
            data_update(W, X[index[i]], t, dp[0], dp[1], dp[2], dp[3], dp[4], dp[5], locations)
