"""Compiled forward/adjoint sweeps for circuits whose generators do not commute.

Gate codes: 0 flips the bits of ``mask`` (X string), 1 is the sum of single
qubit X operators, 2 is a diagonal generator stored as row ``row``. A diagonal
row is kept as its distinct values ``levels[row]`` plus per-entry indices
``level_of[row]``, so each gate evaluates only a handful of phases.
"""
from __future__ import annotations

import numpy as np
from numba import njit

X_STRING, X_SUM, DIAGONAL = 0, 1, 2


@njit(cache=True)
def _apply(code, mask, row, tables, n, theta, psi, out):
    """out = exp(-i theta G) psi."""
    N = psi.size
    if code == DIAGONAL:
        levels, level_of, n_levels = tables[1], tables[2], tables[3]
        phase = np.empty(n_levels[row], dtype=np.complex128)
        for i in range(n_levels[row]):
            ph = theta * levels[row, i]
            phase[i] = np.cos(ph) - 1j * np.sin(ph)
        idx = level_of[row]
        for z in range(N):
            out[z] = psi[z] * phase[idx[z]]
        return
    c, s = np.cos(theta), np.sin(theta)
    if code == X_STRING:
        for z in range(N):
            out[z] = c * psi[z] - 1j * s * psi[z ^ mask]
        return
    cur = psi.copy()
    for q in range(n):
        bit = 1 << q
        for z in range(N):
            out[z] = c * cur[z] - 1j * s * cur[z ^ bit]
        cur[:] = out


@njit(cache=True)
def _overlap_im(code, mask, row, tables, n, lam, psi):
    """Im <lam| G |psi>."""
    acc = 0.0
    N = psi.size
    if code == X_STRING:
        for z in range(N):
            v = psi[z ^ mask]
            acc += lam[z].real * v.imag - lam[z].imag * v.real
    elif code == X_SUM:
        for q in range(n):
            bit = 1 << q
            for z in range(N):
                v = psi[z ^ bit]
                acc += lam[z].real * v.imag - lam[z].imag * v.real
    else:
        d = tables[0][row]
        for z in range(N):
            v = psi[z]
            acc += d[z] * (lam[z].real * v.imag - lam[z].imag * v.real)
    return acc


@njit(cache=True)
def forward(codes, masks, rows, tables, n, theta, psi0):
    psi = psi0.copy()
    out = np.empty_like(psi)
    for j in range(codes.size):
        _apply(codes[j], masks[j], rows[j], tables, n, theta[j], psi, out)
        psi, out = out, psi
    return psi


@njit(cache=True)
def value_and_grad(codes, masks, rows, tables, n, theta, psi0, energies):
    psi = forward(codes, masks, rows, tables, n, theta, psi0)
    N = psi.size
    J = 0.0
    lam = np.empty_like(psi)
    for z in range(N):
        J += energies[z] * (psi[z].real ** 2 + psi[z].imag ** 2)
        lam[z] = energies[z] * psi[z]
    M = codes.size
    grad = np.empty(M)
    tmp = np.empty_like(psi)
    for j in range(M - 1, -1, -1):
        grad[j] = 2.0 * _overlap_im(codes[j], masks[j], rows[j], tables, n, lam, psi)
        _apply(codes[j], masks[j], rows[j], tables, n, -theta[j], psi, tmp)
        psi, tmp = tmp, psi
        _apply(codes[j], masks[j], rows[j], tables, n, -theta[j], lam, tmp)
        lam, tmp = tmp, lam
    return J, grad
