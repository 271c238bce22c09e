"""Statevector kernels: numba-compiled when available, plain numpy otherwise.

Set ``REUSEQ_NO_NUMBA=1`` to force the numpy path. Qubit ``q`` is bit ``q``
of the basis-state index.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("REUSEQ_NO_NUMBA", "0").lower() in ("0", "", "false", "no")

try:
    from numba import njit
except ImportError:
    USE_NUMBA = False


def apply_1q_np(state: np.ndarray, q: int, mat: np.ndarray) -> None:
    v = state.reshape(-1, 2, 1 << q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
    v[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b


def apply_cx_np(state: np.ndarray, c: int, t: int) -> None:
    idx = np.arange(state.size)
    sel = idx[((idx >> c) & 1 == 1) & ((idx >> t) & 1 == 0)]
    other = sel | (1 << t)
    state[sel], state[other] = state[other], state[sel].copy()


def apply_swap_np(state: np.ndarray, a: int, b: int) -> None:
    idx = np.arange(state.size)
    sel = idx[((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 0)]
    other = sel ^ (1 << a) ^ (1 << b)
    state[sel], state[other] = state[other], state[sel].copy()


def prob_one_np(state: np.ndarray, q: int) -> float:
    v = state.reshape(-1, 2, 1 << q)
    return float(np.sum(np.abs(v[:, 1, :]) ** 2))


def project_np(state: np.ndarray, q: int, bit: int, scale: float) -> None:
    v = state.reshape(-1, 2, 1 << q)
    v[:, 1 - bit, :] = 0.0
    v[:, bit, :] *= scale


if USE_NUMBA:
    @njit(cache=True)
    def apply_1q_nb(state, q, mat):
        step = 1 << q
        m00, m01, m10, m11 = mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1]
        for i in range(state.size):
            if i & step == 0:
                a = state[i]
                b = state[i | step]
                state[i] = m00 * a + m01 * b
                state[i | step] = m10 * a + m11 * b

    @njit(cache=True)
    def apply_cx_nb(state, c, t):
        cm = 1 << c
        tm = 1 << t
        for i in range(state.size):
            if i & cm and not i & tm:
                j = i | tm
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp

    @njit(cache=True)
    def apply_swap_nb(state, a, b):
        am = 1 << a
        bm = 1 << b
        for i in range(state.size):
            if i & am and not i & bm:
                j = i ^ am ^ bm
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp

    @njit(cache=True)
    def prob_one_nb(state, q):
        m = 1 << q
        total = 0.0
        for i in range(state.size):
            if i & m:
                total += state[i].real ** 2 + state[i].imag ** 2
        return total

    @njit(cache=True)
    def project_nb(state, q, bit, scale):
        m = 1 << q
        for i in range(state.size):
            if ((i >> q) & 1) == bit:
                state[i] *= scale
            else:
                state[i] = 0.0

    apply_1q, apply_cx, apply_swap, prob_one, project = apply_1q_nb, apply_cx_nb, apply_swap_nb, prob_one_nb, project_nb
else:
    apply_1q, apply_cx, apply_swap, prob_one, project = apply_1q_np, apply_cx_np, apply_swap_np, prob_one_np, project_np

BACKEND = "numba" if USE_NUMBA else "numpy"
