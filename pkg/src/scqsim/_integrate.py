"""Fixed-step RK4 integrators for time-dependent Hamiltonians.

Internal plumbing shared by the drive simulations (Rabi traces, CNOT
pulses).  Same unit conventions as :mod:`scqsim.core`: the Schrodinger /
Lindblad generators carry an explicit 2*pi on the Hamiltonian term.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def schrodinger_td(h_of_t, psi0: np.ndarray, t_grid, steps_per_ns: float):
    """Integrate i (1/2pi) dpsi/dt = H(t) psi, returning psi at each grid time.

    ``psi0`` may be a vector or a matrix of column states (all columns are
    propagated together).  ``h_of_t`` maps a time in ns to an ndarray in GHz.
    """
    psi = np.array(psi0, dtype=complex)
    t_grid = np.asarray(t_grid, dtype=float)

    def rhs(t, y):
        return -1j * TWO_PI * (h_of_t(t) @ y)

    out = []
    t = 0.0
    for tk in t_grid:
        span = float(tk) - t
        if span > 0:
            n = max(1, int(np.ceil(span * steps_per_ns)))
            h = span / n
            for _ in range(n):
                k1 = rhs(t, psi)
                k2 = rhs(t + 0.5 * h, psi + 0.5 * h * k1)
                k3 = rhs(t + 0.5 * h, psi + 0.5 * h * k2)
                k4 = rhs(t + h, psi + h * k3)
                psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                t += h
            t = float(tk)
        out.append(psi.copy())
    return out


def lindblad_td(h_of_t, channels, rho0: np.ndarray, t_grid, steps_per_ns: float):
    """RK4 propagation of the Lindblad equation with a time-dependent H."""
    pre = []
    for op, rate in channels:
        L = np.asarray(op, dtype=complex)
        if rate > 0:
            pre.append((rate, L, L.conj().T, L.conj().T @ L))

    def rhs(t, rho):
        ht = h_of_t(t)
        out = -1j * TWO_PI * (ht @ rho - rho @ ht)
        for rate, L, Ld, LdL in pre:
            out += rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
        return out

    rho = np.array(rho0, dtype=complex)
    t_grid = np.asarray(t_grid, dtype=float)
    out = []
    t = 0.0
    for tk in t_grid:
        span = float(tk) - t
        if span > 0:
            n = max(1, int(np.ceil(span * steps_per_ns)))
            h = span / n
            for _ in range(n):
                k1 = rhs(t, rho)
                k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1)
                k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2)
                k4 = rhs(t + h, rho + h * k3)
                rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                rho = 0.5 * (rho + rho.conj().T)
                t += h
            t = float(tk)
        out.append(rho.copy())
    return out
