"""Dense Newton-Raphson power-flow kernel, NumPy implementation.

This is the fallback for :mod:`corridormon._nr_c` and the reference the
compiled kernel is tested against.  Both expose the same ``nr_solve``
signature and status codes.

Bus kind codes: 0 slack (V and angle fixed), 1 PV (P and V fixed),
2 PQ (P and Q fixed).  ``p_spec``/``q_spec`` are net injections in per unit
(consumption enters negative).  Status codes: 0 converged, 1 no convergence,
2 singular Jacobian.
"""

from __future__ import annotations

import numpy as np

SLACK_CODE = 0
PV_CODE = 1
PQ_CODE = 2

OK = 0
NO_CONVERGENCE = 1
SINGULAR = 2

# Voltage magnitudes at or below this are treated as a diverged iterate.
_VM_FLOOR = 1e-8


def nr_solve(g, b, kind, p_spec, q_spec, vm0, va0, tol, max_iter):
    """Solve the mismatch equations; returns (vm, va, iterations, mismatch, status).

    ``iterations`` counts Newton updates actually applied.  ``mismatch`` is the
    largest per-bus complex power residual magnitude (PV buses count only the
    real part).
    """
    ybus = np.asarray(g, dtype=float) + 1j * np.asarray(b, dtype=float)
    kind = np.asarray(kind)
    vm = np.array(vm0, dtype=float, copy=True)
    va = np.array(va0, dtype=float, copy=True)
    s_spec = np.asarray(p_spec, dtype=float) + 1j * np.asarray(q_spec, dtype=float)

    pvpq = np.flatnonzero(kind != SLACK_CODE)
    pq = np.flatnonzero(kind == PQ_CODE)
    n_a = pvpq.size
    n_v = pq.size

    iterations = 0
    while True:
        v = vm * np.exp(1j * va)
        ibus = ybus @ v
        ds = s_spec - v * np.conj(ibus)
        # PV buses regulate Q, so only their P residual counts.
        resid = ds.copy()
        resid[kind == PV_CODE] = resid[kind == PV_CODE].real
        resid[kind == SLACK_CODE] = 0.0
        mismatch = float(np.max(np.abs(resid))) if resid.size else 0.0

        if mismatch <= tol:
            return vm, va, iterations, mismatch, OK
        if iterations >= max_iter or n_a == 0:
            return vm, va, iterations, mismatch, NO_CONVERGENCE

        diag_v = np.diag(v)
        diag_i = np.diag(ibus)
        diag_vn = np.diag(v / np.abs(v))
        ds_dva = 1j * diag_v @ np.conj(diag_i - ybus @ diag_v)
        ds_dvm = diag_v @ np.conj(ybus @ diag_vn) + np.conj(diag_i) @ diag_vn

        jac = np.empty((n_a + n_v, n_a + n_v))
        jac[:n_a, :n_a] = ds_dva[np.ix_(pvpq, pvpq)].real
        jac[:n_a, n_a:] = ds_dvm[np.ix_(pvpq, pq)].real
        jac[n_a:, :n_a] = ds_dva[np.ix_(pq, pvpq)].imag
        jac[n_a:, n_a:] = ds_dvm[np.ix_(pq, pq)].imag

        rhs = np.concatenate([ds[pvpq].real, ds[pq].imag])
        try:
            dx = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            return vm, va, iterations, mismatch, SINGULAR
        if not np.all(np.isfinite(dx)):
            return vm, va, iterations, mismatch, SINGULAR

        va[pvpq] += dx[:n_a]
        vm[pq] += dx[n_a:]
        iterations += 1

        if not (np.all(np.isfinite(vm)) and np.all(np.isfinite(va))):
            return vm, va, iterations, float("inf"), NO_CONVERGENCE
        if np.any(vm[pq] <= _VM_FLOOR):
            return vm, va, iterations, float("inf"), NO_CONVERGENCE
