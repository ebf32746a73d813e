# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot recursion kernels.

Same contracts as `_ensemble_np` (the pure-numpy twin); `_backend` selects
one of the two at import time.  Loops release the GIL so callers may run
path chunks on worker threads.
"""

import numpy as np

name = "compiled"


cdef inline void _matmul(const double[:, :] A, const double[:, :] B,
                         double[:, :] out,
                         Py_ssize_t r, Py_ssize_t s, Py_ssize_t c) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(r):
        for j in range(c):
            acc = 0.0
            for k in range(s):
                acc += A[i, k] * B[k, j]
            out[i, j] = acc


cdef inline void _ric_rhs(const double[:, :] F, const double[:, :] S,
                          const double[:, :] C, const double[:, :] M,
                          double[:, :] t1, double[:, :] t2, double[:, :] t3,
                          double[:, :] out, double sign, Py_ssize_t n) noexcept nogil:
    # out = sign * (F M + M F^T - M S M + C); M and S symmetric, so
    # F M + M F^T = t1 + t1^T with t1 = F M.
    cdef Py_ssize_t i, j
    _matmul(F, M, t1, n, n, n)
    _matmul(M, S, t2, n, n, n)
    _matmul(t2, M, t3, n, n, n)
    for i in range(n):
        for j in range(n):
            out[i, j] = sign * (t1[i, j] + t1[j, i] - t3[i, j] + C[i, j])


def riccati_rk4(const double[:, :, ::1] F, const double[:, :, ::1] S,
                const double[:, :, ::1] C, const double[:, ::1] M0,
                double dt, double sign, bint reverse):
    """See `_ensemble_np.riccati_rk4`."""
    cdef Py_ssize_t nsub = (F.shape[0] - 1) // 2
    cdef Py_ssize_t n = F.shape[1]
    path_arr = np.empty((nsub + 1, n, n))
    cdef double[:, :, ::1] path = path_arr
    scratch = np.empty((8, n, n))
    cdef double[:, :, ::1] w = scratch
    cdef double[:, :] M = w[0], Ms = w[1], t1 = w[2], t2 = w[3], t3 = w[4]
    cdef double[:, :] k1 = w[5], k2 = w[6], k3 = w[7]
    cdef Py_ssize_t i, j, k, q
    cdef double step = dt if not reverse else -dt
    with nogil:
        for i in range(n):
            for j in range(n):
                M[i, j] = 0.5 * (M0[i, j] + M0[j, i])
        if not reverse:
            for i in range(n):
                for j in range(n):
                    path[0, i, j] = M[i, j]
        else:
            for i in range(n):
                for j in range(n):
                    path[nsub, i, j] = M[i, j]
        for k in range(nsub):
            if not reverse:
                q = 2 * k
            else:
                q = 2 * (nsub - 1 - k) + 2
            _ric_rhs(F[q], S[q], C[q], M, t1, t2, t3, k1, sign, n)
            for i in range(n):
                for j in range(n):
                    Ms[i, j] = M[i, j] + 0.5 * step * k1[i, j]
            if not reverse:
                q = q + 1
            else:
                q = q - 1
            _ric_rhs(F[q], S[q], C[q], Ms, t1, t2, t3, k2, sign, n)
            for i in range(n):
                for j in range(n):
                    Ms[i, j] = M[i, j] + 0.5 * step * k2[i, j]
            _ric_rhs(F[q], S[q], C[q], Ms, t1, t2, t3, k3, sign, n)
            for i in range(n):
                for j in range(n):
                    Ms[i, j] = M[i, j] + step * k3[i, j]
            if not reverse:
                q = q + 1
            else:
                q = q - 1
            # k4 reuses t1..t3 and is folded straight into the update
            _ric_rhs(F[q], S[q], C[q], Ms, t1, t2, t3, Ms, sign, n)
            for i in range(n):
                for j in range(n):
                    M[i, j] = M[i, j] + (step / 6.0) * (
                        k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + Ms[i, j])
            # symmetrize
            for i in range(n):
                for j in range(i + 1, n):
                    M[i, j] = 0.5 * (M[i, j] + M[j, i])
                    M[j, i] = M[i, j]
            if not reverse:
                q = k + 1
            else:
                q = nsub - 1 - k
            for i in range(n):
                for j in range(n):
                    path[q, i, j] = M[i, j]
    return path_arr


def fundamental_rk4(const double[:, :, ::1] A, double dt, bint reverse):
    """See `_ensemble_np.fundamental_rk4`."""
    cdef Py_ssize_t nsub = (A.shape[0] - 1) // 2
    cdef Py_ssize_t n = A.shape[1]
    path_arr = np.empty((nsub + 1, n, n))
    cdef double[:, :, ::1] path = path_arr
    scratch = np.empty((6, n, n))
    cdef double[:, :, ::1] w = scratch
    cdef double[:, :] U = w[0], Us = w[1], k1 = w[2], k2 = w[3], k3 = w[4], k4 = w[5]
    cdef Py_ssize_t i, j, k, q, pos
    cdef double step = dt if not reverse else -dt
    with nogil:
        for i in range(n):
            for j in range(n):
                U[i, j] = 1.0 if i == j else 0.0
        pos = 0 if not reverse else nsub
        for i in range(n):
            for j in range(n):
                path[pos, i, j] = U[i, j]
        for k in range(nsub):
            if not reverse:
                q = 2 * k
            else:
                q = 2 * (nsub - 1 - k) + 2
            _matmul(A[q], U, k1, n, n, n)
            for i in range(n):
                for j in range(n):
                    Us[i, j] = U[i, j] + 0.5 * step * k1[i, j]
            if not reverse:
                q = q + 1
            else:
                q = q - 1
            _matmul(A[q], Us, k2, n, n, n)
            for i in range(n):
                for j in range(n):
                    Us[i, j] = U[i, j] + 0.5 * step * k2[i, j]
            _matmul(A[q], Us, k3, n, n, n)
            for i in range(n):
                for j in range(n):
                    Us[i, j] = U[i, j] + step * k3[i, j]
            if not reverse:
                q = q + 1
            else:
                q = q - 1
            _matmul(A[q], Us, k4, n, n, n)
            for i in range(n):
                for j in range(n):
                    U[i, j] = U[i, j] + (step / 6.0) * (
                        k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
            pos = k + 1 if not reverse else nsub - 1 - k
            for i in range(n):
                for j in range(n):
                    path[pos, i, j] = U[i, j]
    return path_arr


def em_simulate(const double[:, :, ::1] Aeul, const double[:, ::1] fh,
                const double[:, :, ::1] Gq, const double[:, :, ::1] Hh,
                const double[:, ::1] hh, const double[:, :, ::1] Rs,
                const double[:, ::1] x0, const double[::1] y0,
                const double[:, :, ::1] xi, const double[:, :, ::1] eta):
    """See `_ensemble_np.em_simulate`."""
    cdef Py_ssize_t P = xi.shape[0], N = xi.shape[1]
    cdef Py_ssize_t n = Aeul.shape[1], p = Gq.shape[2], m = Hh.shape[1]
    x_arr = np.empty((P, N + 1, n))
    y_arr = np.empty((P, N + 1, m))
    cdef double[:, :, ::1] x = x_arr, y = y_arr
    cdef Py_ssize_t ip, k, i, j
    cdef double acc
    with nogil:
        for ip in range(P):
            for i in range(n):
                x[ip, 0, i] = x0[ip, i]
            for i in range(m):
                y[ip, 0, i] = y0[i]
            for k in range(N):
                for i in range(m):
                    acc = y[ip, k, i] + hh[k, i]
                    for j in range(n):
                        acc += Hh[k, i, j] * x[ip, k, j]
                    for j in range(m):
                        acc += Rs[k, i, j] * eta[ip, k, j]
                    y[ip, k + 1, i] = acc
                for i in range(n):
                    acc = fh[k, i]
                    for j in range(n):
                        acc += Aeul[k, i, j] * x[ip, k, j]
                    for j in range(p):
                        acc += Gq[k, i, j] * xi[ip, k, j]
                    x[ip, k + 1, i] = acc
    return x_arr, y_arr


def filter_pass(const double[:, :, ::1] Tmat, const double[:, :, ::1] B,
                const double[:, :, ::1] Hh, const double[:, :, ::1] dyt):
    """See `_ensemble_np.filter_pass`."""
    cdef Py_ssize_t P = dyt.shape[0], N = dyt.shape[1]
    cdef Py_ssize_t n = Tmat.shape[1], m = Hh.shape[1]
    r_arr = np.empty((P, N + 1, n))
    de_arr = np.empty((P, N, m))
    cdef double[:, :, ::1] r = r_arr, de = de_arr
    cdef Py_ssize_t ip, k, i, j
    cdef double acc
    with nogil:
        for ip in range(P):
            for i in range(n):
                r[ip, 0, i] = 0.0
            for k in range(N):
                for i in range(m):
                    acc = dyt[ip, k, i]
                    for j in range(n):
                        acc -= Hh[k, i, j] * r[ip, k, j]
                    de[ip, k, i] = acc
                for i in range(n):
                    acc = 0.0
                    for j in range(n):
                        acc += Tmat[k, i, j] * r[ip, k, j]
                    for j in range(m):
                        acc += B[k, i, j] * dyt[ip, k, j]
                    r[ip, k + 1, i] = acc
    return r_arr, de_arr


def rts_pass(const double[:, :, ::1] Psi, const double[:, :, ::1] Cg,
             const double[:, :, ::1] de):
    """See `_ensemble_np.rts_pass`."""
    cdef Py_ssize_t P = de.shape[0], N = de.shape[1]
    cdef Py_ssize_t n = Psi.shape[1], m = Cg.shape[2]
    a_arr = np.empty((P, N + 1, n))
    cdef double[:, :, ::1] a = a_arr
    work = np.empty(n)
    cdef double[::1] v = work
    cdef Py_ssize_t ip, k, i, j
    cdef double acc
    with nogil:
        for ip in range(P):
            for i in range(n):
                a[ip, N, i] = 0.0
            for k in range(N - 1, -1, -1):
                for i in range(n):
                    acc = a[ip, k + 1, i]
                    for j in range(m):
                        acc += Cg[k, i, j] * de[ip, k, j]
                    v[i] = acc
                for i in range(n):
                    acc = 0.0
                    for j in range(n):
                        acc += Psi[k, j, i] * v[j]
                    a[ip, k, i] = acc
    return a_arr
