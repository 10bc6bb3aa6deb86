# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory stepping kernel.

Same contract as starkmon._kernel_py.advance_block (see that module for
the documented semantics and status codes); this version drives BLAS and
LAPACK directly on Fortran-ordered buffers to keep the per-step cost at
one zgemm plus one QR for typical (L <= a few hundred) chains.
"""

import numpy as np

from libc.stdint cimport int64_t
from libc.math cimport cos, sin, sqrt
from scipy.linalg.cython_blas cimport zgemm, zaxpy, zswap, zscal, zcopy
from scipy.linalg.cython_lapack cimport zgeqrf, zungqr

cdef double RANK_TOL = 1e-12


cdef int _qr_inplace(double complex* A, int L, int N,
                     double complex* tau, double complex* work, int lwork):
    """Replace A (F-order, L x N) by its orthonormal Q factor.

    Returns 1 on LAPACK failure or when any |R_ii| < RANK_TOL.
    """
    cdef int info = 0
    cdef int i
    cdef double complex r
    zgeqrf(&L, &N, A, &L, tau, work, &lwork, &info)
    if info != 0:
        return 1
    for i in range(N):
        r = A[i + i * L]
        if sqrt(r.real * r.real + r.imag * r.imag) < RANK_TOL:
            return 1
    zungqr(&L, &N, &N, A, &L, tau, work, &lwork, &info)
    if info != 0:
        return 1
    return 0


def advance_block(double complex[::1, :] U, double complex[::1, :] P,
                  int64_t[::1] lo, int64_t[::1] hi, int64_t[::1] fb,
                  double gamma_dt, double theta, object uniforms,
                  int n_steps, double[::1] stats):
    cdef int L = U.shape[0]
    cdef int N = U.shape[1]
    cdef int n_bonds = lo.shape[0]
    cdef int LN = L * N
    cdef int inc1 = 1
    cdef int s, j, n, k, i, la, lb
    cdef double s2 = sqrt(0.5)
    cdef double ar, ai, asq, amax, psum, pj, pmax
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    cdef double complex alpha
    cdef double complex phase = cos(theta) + 1j * sin(theta)
    cdef bint no_click = uniforms is None

    cdef double[:, ::1] tape
    if not no_click:
        tape = uniforms

    W_arr = np.empty((L, N), dtype=np.complex128, order="F")
    tau_arr = np.empty(N, dtype=np.complex128)
    amp_arr = np.empty(N, dtype=np.complex128)
    p_arr = np.empty(n_bonds, dtype=np.float64)
    cdef double complex[::1, :] W = W_arr
    cdef double complex[::1] tau = tau_arr
    cdef double complex[::1] amp = amp_arr
    cdef double[::1] p = p_arr

    # workspace query for zgeqrf/zungqr (lwork = -1 asks for the optimum)
    cdef int query = -1
    cdef int lwork
    cdef int info = 0
    cdef double complex wq
    zgeqrf(&L, &N, &W[0, 0], &L, &tau[0], &wq, &query, &info)
    lwork = <int>wq.real
    query = -1
    zungqr(&L, &N, &N, &W[0, 0], &L, &tau[0], &wq, &query, &info)
    if <int>wq.real > lwork:
        lwork = <int>wq.real
    if lwork < N:
        lwork = N
    work_arr = np.empty(lwork, dtype=np.complex128)
    cdef double complex[::1] work = work_arr

    for s in range(n_steps):
        # drift: U <- Q of qr(P @ U)
        zgemm("N", "N", &L, &N, &L, &one, &P[0, 0], &L, &U[0, 0], &L,
              &zero, &W[0, 0], &L)
        if _qr_inplace(&W[0, 0], L, N, &tau[0], &work[0], lwork):
            return 1
        zcopy(&LN, &W[0, 0], &inc1, &U[0, 0], &inc1)
        if no_click:
            continue

        pmax = 0.0
        for j in range(n_bonds):
            la = <int>lo[j]
            lb = <int>hi[j]
            psum = 0.0
            for n in range(N):
                ar = U[la, n].real - U[lb, n].imag
                ai = U[la, n].imag + U[lb, n].real
                psum += ar * ar + ai * ai
            p[j] = gamma_dt * 0.5 * psum
            if p[j] > pmax:
                pmax = p[j]
        if pmax > stats[0]:
            stats[0] = pmax
        if pmax >= 1.0:
            return 3

        for j in range(n_bonds):
            if tape[s, j] >= p[j]:
                continue
            la = <int>lo[j]
            lb = <int>hi[j]
            # quasimode components of each orbital, from the current U
            amax = 0.0
            k = 0
            for n in range(N):
                amp[n] = s2 * (U[la, n] + 1j * U[lb, n])
                asq = amp[n].real * amp[n].real + amp[n].imag * amp[n].imag
                if asq > amax:
                    amax = asq
                    k = n
            if amax < RANK_TOL * RANK_TOL:
                return 2
            if k != 0:
                zswap(&L, &U[0, k], &inc1, &U[0, 0], &inc1)
                alpha = amp[0]
                amp[0] = amp[k]
                amp[k] = alpha
            for n in range(1, N):
                alpha = -amp[n] / amp[0]
                zaxpy(&L, &alpha, &U[0, 0], &inc1, &U[0, n], &inc1)
            for i in range(L):
                U[i, 0] = zero
            U[la, 0] = s2
            U[lb, 0] = -1j * s2
            zscal(&N, &phase, &U[<int>fb[j], 0], &L)
            if _qr_inplace(&U[0, 0], L, N, &tau[0], &work[0], lwork):
                return 1
            stats[1] += 1.0
    return 0
