"""Slope limiting shared by the fluid and electromagnetic reconstructions."""

import numpy as np


def minmod3(a, b, c):
    """Three-point MinMod acting on consecutive cell values (a, b, c).

    Returns sign(b - a) * min(|c - b|, |b - a|) where the one-sided
    differences agree in sign, else zero.  The result is a limited
    difference; traces are formed as b +/- minmod3(...) / 2.
    """
    db = b - a
    df = c - b
    same = db * df > 0.0
    return np.where(same, np.sign(db) * np.minimum(np.abs(df), np.abs(db)), 0.0)


def muscl_traces(q0, q1, q2, q3):
    """Second-order interface traces between cells 1 and 2 of a 4-cell stencil.

    Returns (q_minus, q_plus): the left cell's value extrapolated to the
    interface and the right cell's, each limited by minmod3.
    """
    qm = q1 + 0.5 * minmod3(q0, q1, q2)
    qp = q2 - 0.5 * minmod3(q1, q2, q3)
    return qm, qp
