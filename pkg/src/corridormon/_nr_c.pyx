# cython: boundscheck=False, wraparound=False, cdivision=True
"""Dense Newton-Raphson power-flow kernel, compiled implementation.

Same contract as :mod:`corridormon._nr_py` (see that module for the bus kind
and status code conventions).  The Jacobian is assembled from the classic
polar partial derivatives and solved in place with partially pivoted Gaussian
elimination; the systems are small and dense, so no sparse machinery.
"""

import numpy as np

from libc.math cimport cos, fabs, hypot, isfinite, sin

SLACK_CODE = 0
PV_CODE = 1
PQ_CODE = 2

OK = 0
NO_CONVERGENCE = 1
SINGULAR = 2

cdef double _VM_FLOOR = 1e-8


cdef int _solve_inplace(double[:, ::1] a, double[:] rhs, int m) noexcept:
    """Gaussian elimination with partial pivoting; returns 0 or SINGULAR."""
    cdef int col, row, k, piv
    cdef double best, factor, tmp, scale = 0.0

    for row in range(m):
        for col in range(m):
            if fabs(a[row, col]) > scale:
                scale = fabs(a[row, col])

    for col in range(m):
        piv = col
        best = fabs(a[col, col])
        for row in range(col + 1, m):
            if fabs(a[row, col]) > best:
                best = fabs(a[row, col])
                piv = row
        if best <= 1e-14 * (1.0 + scale):
            return SINGULAR
        if piv != col:
            for k in range(m):
                tmp = a[col, k]
                a[col, k] = a[piv, k]
                a[piv, k] = tmp
            tmp = rhs[col]
            rhs[col] = rhs[piv]
            rhs[piv] = tmp
        for row in range(col + 1, m):
            factor = a[row, col] / a[col, col]
            if factor != 0.0:
                for k in range(col, m):
                    a[row, k] -= factor * a[col, k]
                rhs[row] -= factor * rhs[col]

    for col in range(m - 1, -1, -1):
        for k in range(col + 1, m):
            rhs[col] -= a[col, k] * rhs[k]
        rhs[col] /= a[col, col]
    return 0


def nr_solve(double[:, ::1] g, double[:, ::1] b, long[:] kind,
             double[:] p_spec, double[:] q_spec,
             double[:] vm0, double[:] va0, double tol, int max_iter):
    """Solve the mismatch equations; returns (vm, va, iterations, mismatch, status)."""
    cdef int n = g.shape[0]
    cdef int i, k, ra, rq, m, n_a, n_v, iterations, status
    cdef double ang, pij, qij, mismatch, dp, dq
    cdef bint ok

    vm_arr = np.array(vm0, dtype=np.float64, copy=True)
    va_arr = np.array(va0, dtype=np.float64, copy=True)
    cdef double[:] vm = vm_arr
    cdef double[:] va = va_arr

    p_calc_arr = np.zeros(n)
    q_calc_arr = np.zeros(n)
    cdef double[:] p_calc = p_calc_arr
    cdef double[:] q_calc = q_calc_arr

    # index maps: angle unknowns for every non-slack bus, magnitude for PQ
    pvpq_arr = np.flatnonzero(np.asarray(kind) != SLACK_CODE).astype(np.intp)
    pq_arr = np.flatnonzero(np.asarray(kind) == PQ_CODE).astype(np.intp)
    cdef Py_ssize_t[:] pvpq = pvpq_arr
    cdef Py_ssize_t[:] pq = pq_arr
    n_a = <int> pvpq_arr.size
    n_v = <int> pq_arr.size
    m = n_a + n_v

    # position of each bus inside the unknown vector (-1 when fixed);
    # for a PQ bus the magnitude column index doubles as its Q-row index.
    col_a_arr = np.full(n, -1, dtype=np.intp)
    col_v_arr = np.full(n, -1, dtype=np.intp)
    for i in range(n_a):
        col_a_arr[pvpq_arr[i]] = i
    for i in range(n_v):
        col_v_arr[pq_arr[i]] = n_a + i
    cdef Py_ssize_t[:] col_a = col_a_arr
    cdef Py_ssize_t[:] col_v = col_v_arr

    jac_arr = np.zeros((m, m)) if m > 0 else np.zeros((1, 1))
    rhs_arr = np.zeros(m) if m > 0 else np.zeros(1)
    cdef double[:, ::1] jac = jac_arr
    cdef double[:] rhs = rhs_arr

    iterations = 0
    while True:
        # injected power at every bus for the current iterate
        for i in range(n):
            p_calc[i] = 0.0
            q_calc[i] = 0.0
            for k in range(n):
                if g[i, k] == 0.0 and b[i, k] == 0.0:
                    continue
                ang = va[i] - va[k]
                p_calc[i] += vm[i] * vm[k] * (g[i, k] * cos(ang) + b[i, k] * sin(ang))
                q_calc[i] += vm[i] * vm[k] * (g[i, k] * sin(ang) - b[i, k] * cos(ang))

        mismatch = 0.0
        for i in range(n):
            if kind[i] == SLACK_CODE:
                continue
            dp = p_spec[i] - p_calc[i]
            dq = q_spec[i] - q_calc[i] if kind[i] == PQ_CODE else 0.0
            if hypot(dp, dq) > mismatch:
                mismatch = hypot(dp, dq)

        if mismatch <= tol:
            status = OK
            break
        if iterations >= max_iter or m == 0:
            status = NO_CONVERGENCE
            break

        # Jacobian of calculated injections w.r.t. (angles, magnitudes)
        for i in range(m):
            for k in range(m):
                jac[i, k] = 0.0
        for i in range(n):
            if kind[i] == SLACK_CODE:
                continue
            ra = <int> col_a[i]
            rq = <int> col_v[i]  # -1 unless PQ
            for k in range(n):
                if i == k or (g[i, k] == 0.0 and b[i, k] == 0.0):
                    continue
                ang = va[i] - va[k]
                pij = vm[i] * vm[k] * (g[i, k] * cos(ang) + b[i, k] * sin(ang))
                qij = vm[i] * vm[k] * (g[i, k] * sin(ang) - b[i, k] * cos(ang))
                if col_a[k] >= 0:
                    jac[ra, col_a[k]] = qij
                    if rq >= 0:
                        jac[rq, col_a[k]] = -pij
                if col_v[k] >= 0:
                    jac[ra, col_v[k]] = pij / vm[k]
                    if rq >= 0:
                        jac[rq, col_v[k]] = qij / vm[k]
            jac[ra, ra] = -q_calc[i] - b[i, i] * vm[i] * vm[i]
            if rq >= 0:
                jac[ra, rq] = p_calc[i] / vm[i] + g[i, i] * vm[i]
                jac[rq, ra] = p_calc[i] - g[i, i] * vm[i] * vm[i]
                jac[rq, rq] = q_calc[i] / vm[i] - b[i, i] * vm[i]

        for i in range(n_a):
            rhs[i] = p_spec[pvpq[i]] - p_calc[pvpq[i]]
        for i in range(n_v):
            rhs[n_a + i] = q_spec[pq[i]] - q_calc[pq[i]]

        if _solve_inplace(jac, rhs, m) == SINGULAR:
            status = SINGULAR
            break
        ok = True
        for i in range(m):
            if not isfinite(rhs[i]):
                ok = False
        if not ok:
            status = SINGULAR
            break

        for i in range(n_a):
            va[pvpq[i]] += rhs[i]
        for i in range(n_v):
            vm[pq[i]] += rhs[n_a + i]
        iterations += 1

        ok = True
        for i in range(n):
            if not isfinite(vm[i]) or not isfinite(va[i]):
                ok = False
            elif kind[i] == PQ_CODE and vm[i] <= _VM_FLOOR:
                ok = False
        if not ok:
            mismatch = float("inf")
            status = NO_CONVERGENCE
            break

    return vm_arr, va_arr, iterations, mismatch, status
