"""Pure-numpy implementations of the hot recursion kernels.

Mirrors the Cython module `_ensemble_cy`; `_backend` picks one at import.
Sequential recursions loop over time steps in Python and vectorize across
paths, so batched calls are fast while single-path calls pay per-step
interpreter overhead (see benchmarks/bench_backends.py).

Conventions shared by both backends:

- Riccati / fundamental coefficient tables are sampled at half the
  integration step: integrating `nsub` steps of size `dt` needs tables of
  length ``2 * nsub + 1`` (value at every step endpoint and midpoint).
- "reverse" integrations start from the last point and fill the path
  backwards; returned paths are always ordered from index 0 to nsub.
"""

import numpy as np

name = "python"


def _sym(M):
    return 0.5 * (M + M.swapaxes(-1, -2))


def riccati_rk4(F, S, C, M0, dt, sign, reverse):
    """Integrate dM/dt = sign * (F M + M F^T - M S M + C), symmetrizing each step.

    F, S, C: (2*nsub+1, n, n) coefficient tables at dt/2 resolution.
    Returns the (nsub+1, n, n) path; entry 0 (forward) or nsub (reverse) is M0.
    """
    nsub = (F.shape[0] - 1) // 2
    n = F.shape[1]
    path = np.empty((nsub + 1, n, n))

    def rhs(j, M):
        Fj, Sj, Cj = F[j], S[j], C[j]
        return sign * (Fj @ M + M @ Fj.T - M @ Sj @ M + Cj)

    M = _sym(np.array(M0, dtype=float))
    if not reverse:
        path[0] = M
        for k in range(nsub):
            q = 2 * k
            k1 = rhs(q, M)
            k2 = rhs(q + 1, M + 0.5 * dt * k1)
            k3 = rhs(q + 1, M + 0.5 * dt * k2)
            k4 = rhs(q + 2, M + dt * k3)
            M = _sym(M + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            path[k + 1] = M
    else:
        path[nsub] = M
        for k in range(nsub - 1, -1, -1):
            q = 2 * k + 2
            k1 = rhs(q, M)
            k2 = rhs(q - 1, M - 0.5 * dt * k1)
            k3 = rhs(q - 1, M - 0.5 * dt * k2)
            k4 = rhs(q - 2, M - dt * k3)
            M = _sym(M - (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
            path[k] = M
    return path


def fundamental_rk4(A, dt, reverse):
    """Integrate dU/dt = A(t) U from the identity.

    A: (2*nsub+1, n, n) coefficient table at dt/2 resolution.
    Forward: U[0] = I, so U[k] is the transition from the start to point k.
    Reverse: U[nsub] = I, filling the path from the end downwards.
    """
    nsub = (A.shape[0] - 1) // 2
    n = A.shape[1]
    path = np.empty((nsub + 1, n, n))
    U = np.eye(n)
    if not reverse:
        path[0] = U
        for k in range(nsub):
            q = 2 * k
            k1 = A[q] @ U
            k2 = A[q + 1] @ (U + 0.5 * dt * k1)
            k3 = A[q + 1] @ (U + 0.5 * dt * k2)
            k4 = A[q + 2] @ (U + dt * k3)
            U = U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            path[k + 1] = U
    else:
        path[nsub] = U
        for k in range(nsub - 1, -1, -1):
            q = 2 * k + 2
            k1 = A[q] @ U
            k2 = A[q - 1] @ (U - 0.5 * dt * k1)
            k3 = A[q - 1] @ (U - 0.5 * dt * k2)
            k4 = A[q - 2] @ (U - dt * k3)
            U = U - (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            path[k] = U
    return path


def em_simulate(Aeul, fh, Gq, Hh, hh, Rs, x0, y0, xi, eta):
    """Euler-Maruyama recursion for a batch of paths.

    Aeul: (N, n, n) = I + h F(tau_k);       fh: (N, n) = h f(tau_k)
    Gq:   (N, n, p) = sqrt(h) G Q^{1/2};    Hh: (N, m, n) = h H(tau_k)
    hh:   (N, m)   = h h_drift(tau_k);      Rs: (N, m, m) = sqrt(h) R^{1/2}
    x0:   (P, n) initial states; y0: (m,) shared initial observation
    xi:   (P, N, p), eta: (P, N, m) standard normal draws

    Returns x: (P, N+1, n), y: (P, N+1, m).
    """
    P, N = xi.shape[0], xi.shape[1]
    n, m = Aeul.shape[1], Hh.shape[1]
    x = np.empty((P, N + 1, n))
    y = np.empty((P, N + 1, m))
    x[:, 0] = x0
    y[:, 0] = y0
    for k in range(N):
        xk = x[:, k]
        y[:, k + 1] = y[:, k] + xk @ Hh[k].T + hh[k] + eta[:, k] @ Rs[k].T
        x[:, k + 1] = xk @ Aeul[k].T + fh[k] + xi[:, k] @ Gq[k].T
    return x, y


def filter_pass(Tmat, B, Hh, dyt):
    """Forward filter recursion on centered increments, batched over paths.

    Tmat: (N, n, n) = I + h (F - Pi H* R^-1 H) at panel left endpoints
    B:    (N, n, m) = Pi H* R^-1 at panel left endpoints
    Hh:   (N, m, n) = h H at panel left endpoints
    dyt:  (P, N, m) centered observation increments

    Returns r: (P, N+1, n) and innovation increments de: (P, N, m) with
    de_k = dyt_k - h H r_k.
    """
    P, N = dyt.shape[0], dyt.shape[1]
    n = Tmat.shape[1]
    r = np.empty((P, N + 1, n))
    de = np.empty_like(dyt)
    r[:, 0] = 0.0
    for k in range(N):
        rk = r[:, k]
        de[:, k] = dyt[:, k] - rk @ Hh[k].T
        r[:, k + 1] = rk @ Tmat[k].T + dyt[:, k] @ B[k].T
    return r, de


def rts_pass(Psi, Cg, de):
    """Backward smoother accumulation, batched over paths.

    Psi: (N, n, n) = Phi_{F,Pi}(tau_{k+1}, tau_k) per panel
    Cg:  (N, n, m) = H* R^-1 at panel left endpoints
    de:  (P, N, m) innovation increments

    Returns a: (P, N+1, n) with a_N = 0 and the adjoint recursion
    a_k = Psi_k^T (a_{k+1} + Cg_k de_k).
    """
    P, N = de.shape[0], de.shape[1]
    n = Psi.shape[1]
    a = np.empty((P, N + 1, n))
    a[:, N] = 0.0
    for k in range(N - 1, -1, -1):
        a[:, k] = (a[:, k + 1] + de[:, k] @ Cg[k].T) @ Psi[k]
    return a
