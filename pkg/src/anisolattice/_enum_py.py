"""Pure-Python twin of the compiled enumeration kernel.

Same loop structure, arbitrary-precision integers, no overflow limits.
"""

from __future__ import annotations

import itertools

from .exact import sign_parts


def enumerate_box(lo, hi, q0, q1, l0, l1, k0, k1, d: int) -> list[tuple[int, ...]]:
    n = len(lo)
    if n == 0 or any(a > b for a, b in zip(lo, hi)):
        return []
    last = n - 1
    nc = len(k0)
    found = []
    t_range = range(lo[last], hi[last] + 1)
    prefixes = itertools.product(*(range(lo[i], hi[i] + 1) for i in range(last)))
    for prefix in prefixes:
        coefs = []
        for c in range(nc):
            Q0, Q1, L0, L1 = q0[c], q1[c], l0[c], l1[c]
            a1 = L0[last] + sum(Q0[i][last] * prefix[i] for i in range(last))
            b1 = L1[last] + sum(Q1[i][last] * prefix[i] for i in range(last))
            a0 = k0[c]
            b0 = k1[c]
            for i in range(last):
                ki = prefix[i]
                a0 += L0[i] * ki
                b0 += L1[i] * ki
                for j in range(i, last):
                    kk = ki * prefix[j]
                    a0 += Q0[i][j] * kk
                    b0 += Q1[i][j] * kk
            coefs.append((Q0[last][last], a1, a0, Q1[last][last], b1, b0))
        for t in t_range:
            for a2, a1, a0, b2, b1, b0 in coefs:
                if sign_parts((a2 * t + a1) * t + a0, (b2 * t + b1) * t + b0, d) >= 0:
                    break
            else:
                found.append(prefix + (t,))
    return found
