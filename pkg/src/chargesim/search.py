"""One-dimensional bracketed maximization by golden-section search."""

from __future__ import annotations

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0

__all__ = ["golden_section_maximize"]


def golden_section_maximize(f, lo: float, hi: float, rel_tol: float,
                            max_iter: int = 200) -> tuple[float, float]:
    """Maximize ``f`` on [lo, hi], assumed unimodal there.

    Shrinks the bracket until its width drops below ``rel_tol`` relative to
    the bracket midpoint.  Returns the best evaluated point ``(x, f(x))``.
    """
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    a, b = lo, hi
    h = b - a
    c = a + INV_PHI_SQ * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    best_x, best_y = (c, yc) if yc >= yd else (d, yd)
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if b - a <= rel_tol * abs(mid):
            break
        if yc > yd:
            b, d, yd = d, c, yc
            h = b - a
            c = a + INV_PHI_SQ * h
            yc = f(c)
            x, y = c, yc
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + INV_PHI * h
            yd = f(d)
            x, y = d, yd
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y
