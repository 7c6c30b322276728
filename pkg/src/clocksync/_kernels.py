"""Numerical kernels shared by the numba and numpy backends.

Everything here is written in the overlap dialect: vectorized numpy that
numba's nopython mode compiles unchanged. The decorator applies numba when
that backend is active and is a no-op otherwise, so both paths execute the
same source. Kernels never raise; failures travel as integer status codes
and the public wrappers turn them into exceptions.
"""

import numpy as np

from ._backend import njit_or_identity

OK = 0
RANK_DEFICIENT = 1
DEGENERATE_GEOMETRY = 2
DEGENERATE_SKEW = 3


@njit_or_identity
def forward_matrix(t1, alpha, beta, d, b, x, y):
    """Build the N x 4 timestamp matrix of one cycle from pre-drawn noise."""
    n = t1.shape[0]
    m = np.empty((n, 4))
    m[:, 0] = t1
    m[:, 1] = alpha * (t1 + d + x) + beta
    m[:, 2] = m[:, 1] + b
    m[:, 3] = (m[:, 2] - beta) / alpha + d + y
    return m


@njit_or_identity
def build_stacked_arrays(m):
    """Stack N rounds into the 2N x 3 design and 2N response of the solver."""
    n = m.shape[0]
    ta = np.empty((2 * n, 3))
    ta[:n, 0] = m[:, 1]
    ta[n:, 0] = -m[:, 2]
    ta[:n, 1] = -1.0
    ta[n:, 1] = 1.0
    ta[:, 2] = -1.0
    tb = np.concatenate((m[:, 0], -m[:, 3]))
    return ta, tb


@njit_or_identity
def solve_stacked(ta, tb):
    """Least-squares solve for psi. Returns (psi, residual_norm, status)."""
    psi, _, rank, _ = np.linalg.lstsq(ta, tb, -1.0)
    if rank < 3:
        return psi, 0.0, RANK_DEFICIENT
    r = tb - ta @ psi
    return psi, np.sqrt(np.sum(r * r)), OK


@njit_or_identity
def estimate_from_matrix(m):
    """Recover (alpha, beta, d, residual_norm, status) from a timestamp matrix.

    Timestamps are re-centered at T1 of the first round before solving so the
    design stays well conditioned for large absolute times; the offset is
    un-shifted afterward.
    """
    c = m[0, 0]
    ta, tb = build_stacked_arrays(m - c)
    psi, resid, status = solve_stacked(ta, tb)
    if status != OK:
        return 0.0, 0.0, 0.0, 0.0, status
    if not np.isfinite(psi[0]) or psi[0] == 0.0:
        return 0.0, 0.0, 0.0, 0.0, DEGENERATE_SKEW
    alpha = 1.0 / psi[0]
    beta = psi[1] / psi[0] - (alpha - 1.0) * c
    return alpha, beta, psi[2], resid, OK


@njit_or_identity
def truncate_singular_values(m, k):
    """Best Frobenius rank-k approximation by zeroing trailing singular values."""
    u, s, vt = np.linalg.svd(m, False)
    sk = s.copy()
    sk[k:] = 0.0
    return (u * sk) @ vt


@njit_or_identity
def soft_threshold_singular_values(m, tau):
    """Proximal map of the nuclear norm: shrink every singular value by tau."""
    u, s, vt = np.linalg.svd(m, False)
    sk = np.maximum(s - tau, 0.0)
    return (u * sk) @ vt


@njit_or_identity
def residual_noise_std(gn, ghat):
    """Per-delay noise scale from a denoising residual (2N delays per cycle)."""
    diff = gn - ghat
    n = gn.shape[0]
    return np.sqrt(np.sum(diff * diff) / (2.0 * n))


@njit_or_identity
def universal_threshold(sigma_hat, n_rows, n_cols):
    return sigma_hat * (np.sqrt(float(n_rows)) + np.sqrt(float(n_cols)))


@njit_or_identity
def crlb_terms(alpha, beta, d, sigma2, t1, t3):
    """Closed-form skew/offset variance bounds. Returns (skew, offset, status)."""
    n = t1.shape[0]
    a = t1 + d
    r = t3 - beta
    a2 = alpha * alpha
    big_u = np.sum(a2 * a * a + a2 * sigma2 + r * r) / (a2 * a2)
    big_v = np.sum(alpha * a + r) / (a2 * alpha)
    big_w = np.sum(alpha * a - r) / a2
    den = 2.0 * n * big_u - a2 * big_v * big_v - big_w * big_w
    if den <= 0.0:
        return 0.0, 0.0, DEGENERATE_GEOMETRY
    skew_bound = 2.0 * n * sigma2 / den
    offset_bound = sigma2 * a2 * (2.0 * n * big_u - big_v * big_v) / (2.0 * n * den)
    return skew_bound, offset_bound, OK


@njit_or_identity
def run_single_trial(t1, alpha, beta, d, b, sigma2, rank_k, x, y):
    """One simulate/denoise/estimate/bound pass.

    Output layout: [err_a_raw, err_b_raw, err_a_svd, err_b_svd, err_a_lrma,
    err_b_lrma, crlb_a, crlb_b, crlb_a_hat, crlb_b_hat, status, sigma_hat_lrma]
    where the _hat bounds use the noise scale re-estimated from the nuclear
    norm denoising residual.
    """
    out = np.zeros(12)
    n = t1.shape[0]
    m = forward_matrix(t1, alpha, beta, d, b, x, y)
    t3n = alpha * (t1 + d) + beta + b

    a_hat, b_hat, _, _, st = estimate_from_matrix(m)
    if st != OK:
        out[10] = st
        return out
    out[0] = (a_hat - alpha) ** 2
    out[1] = (b_hat - beta) ** 2

    mk = truncate_singular_values(m, rank_k)
    a_hat, b_hat, _, _, st = estimate_from_matrix(mk)
    if st != OK:
        out[10] = st
        return out
    out[2] = (a_hat - alpha) ** 2
    out[3] = (b_hat - beta) ** 2

    sig_hat = residual_noise_std(m, truncate_singular_values(m, 2))
    tau = universal_threshold(sig_hat, n, 4)
    ml = soft_threshold_singular_values(m, tau)
    a_hat, b_hat, _, _, st = estimate_from_matrix(ml)
    if st != OK:
        out[10] = st
        return out
    out[4] = (a_hat - alpha) ** 2
    out[5] = (b_hat - beta) ** 2

    ca, cb, st = crlb_terms(alpha, beta, d, sigma2, t1, t3n)
    if st != OK:
        out[10] = st
        return out
    out[6] = ca
    out[7] = cb

    sig_l = residual_noise_std(m, ml)
    ca, cb, st = crlb_terms(alpha, beta, d, sig_l * sig_l, t1, t3n)
    if st != OK:
        out[10] = st
        return out
    out[8] = ca
    out[9] = cb
    out[11] = sig_l
    return out


@njit_or_identity
def run_trial_batch(t1, alphas, betas, ds, b, sigma2, rank_k, xs, ys):
    """Sequential batch of trials; one output row per trial."""
    trials = alphas.shape[0]
    out = np.empty((trials, 12))
    for i in range(trials):
        out[i] = run_single_trial(
            t1, alphas[i], betas[i], ds[i], b, sigma2, rank_k, xs[i], ys[i]
        )
    return out
