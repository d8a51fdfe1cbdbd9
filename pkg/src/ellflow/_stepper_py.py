"""Pure-numpy stepper kernel for the quadratic matrix flow.

Fallback implementation of the hot loop; the compiled twin lives in
``_stepper_cy.pyx`` and exposes the identical interface.  The state is a
stacked (2, n, n) complex array ``y`` with ``y[0] = delta`` and ``y[1] = d``.
"""

from __future__ import annotations

import numpy as np

from ._dopri5 import A, B, E

NAME = "python"


def flow_rhs(ups0, delta, d, out_ddelta, out_dd):
    """Flow right-hand side: ``16 D D*`` and ``-2 (Ups D + D Ups^T)``."""
    ups = ups0 + delta
    np.matmul(d, d.conj().T, out=out_ddelta)
    out_ddelta *= 16.0
    np.matmul(ups, d, out=out_dd)
    out_dd += d @ ups.T
    out_dd *= -2.0


def flow_step(ups0, y, h, k, y5, yerr, ytmp, ups_work):
    """One Dormand-Prince 5(4) step of the flow, FSAL convention.

    ``k`` is the (7, 2, n, n) stage buffer with ``k[0] = f(y)`` already
    filled; on return ``k[6]`` holds the derivative at ``y5``.
    """
    for i in range(1, 7):
        np.multiply(h, np.tensordot(A[i], k[:i], axes=(0, 0)), out=ytmp)
        ytmp += y
        flow_rhs(ups0, ytmp[0], ytmp[1], k[i, 0], k[i, 1])
        if i == 6:
            y5[...] = ytmp
    yerr[...] = np.tensordot(E, k, axes=(0, 0))
    yerr *= h


# The 7th stage row of A equals B, so y5 computed above already carries the
# 5th-order update; keep the identity explicit for readers.
assert np.allclose(A[6], B[:6])
