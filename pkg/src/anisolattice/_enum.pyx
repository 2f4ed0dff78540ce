# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration of integer points in a box that satisfy a set of
strict sign constraints ``alpha(k) + beta(k) sqrt(d) < 0``.

alpha and beta are integer quadratic polynomials.  The caller guarantees
(by an a priori magnitude bound) that every partial sum fits in int64 and
that alpha^2 and d*beta^2 fit in 128 bits, so the test is exact.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    typedef unsigned __int128 anl_u128;
    """
    ctypedef unsigned long long anl_u128


cdef inline bint _negative(int64_t a, int64_t b, int64_t d) noexcept nogil:
    cdef anl_u128 aa, bb
    if b == 0 or d == 0:
        return a < 0
    if a <= 0 and b <= 0:
        return True
    if a >= 0 and b >= 0:
        return False
    aa = <anl_u128>(a if a > 0 else -a)
    aa = aa * aa
    bb = <anl_u128>(b if b > 0 else -b)
    bb = bb * bb * <anl_u128>d
    if a > 0:
        return bb > aa
    return aa > bb


def enumerate_box(const int64_t[::1] lo, const int64_t[::1] hi,
                  const int64_t[:, :, ::1] q0, const int64_t[:, :, ::1] q1,
                  const int64_t[:, ::1] l0, const int64_t[:, ::1] l1,
                  const int64_t[::1] k0, const int64_t[::1] k1,
                  int64_t d, int64_t[:, ::1] out):
    """Write inside points into ``out`` (up to its capacity); return their count.

    ``q0[c, i, j]`` for i <= j is the coefficient of k_i k_j in alpha for
    constraint c; ``q1`` holds the sqrt(d) parts.  Entries with i > j are ignored.
    """
    cdef Py_ssize_t n = lo.shape[0]
    cdef Py_ssize_t nc = k0.shape[0]
    cdef Py_ssize_t cap = out.shape[0]
    cdef Py_ssize_t last = n - 1
    cdef Py_ssize_t i, j, c
    cdef int64_t t, va, vb, count = 0
    cdef int64_t sa, sb
    cdef bint inside
    cdef int64_t *k
    cdef int64_t *coef

    if n == 0:
        return 0
    for i in range(n):
        if lo[i] > hi[i]:
            return 0

    k = <int64_t *> malloc(n * sizeof(int64_t))
    coef = <int64_t *> malloc(6 * (nc if nc > 0 else 1) * sizeof(int64_t))
    if k == NULL or coef == NULL:
        free(k)
        free(coef)
        raise MemoryError()

    with nogil:
        for i in range(n):
            k[i] = lo[i]
        while True:
            # coefficients of the quadratic in the last coordinate, per constraint
            for c in range(nc):
                # layout: a2, b2, a1, b1, a0, b0
                coef[6 * c] = q0[c, last, last]
                coef[6 * c + 1] = q1[c, last, last]
                sa = l0[c, last]
                sb = l1[c, last]
                for i in range(last):
                    sa = sa + q0[c, i, last] * k[i]
                    sb = sb + q1[c, i, last] * k[i]
                coef[6 * c + 2] = sa
                coef[6 * c + 3] = sb
                sa = k0[c]
                sb = k1[c]
                for i in range(last):
                    sa = sa + l0[c, i] * k[i]
                    sb = sb + l1[c, i] * k[i]
                    for j in range(i, last):
                        sa = sa + q0[c, i, j] * k[i] * k[j]
                        sb = sb + q1[c, i, j] * k[i] * k[j]
                coef[6 * c + 4] = sa
                coef[6 * c + 5] = sb
            t = lo[last]
            while t <= hi[last]:
                inside = True
                for c in range(nc):
                    va = (coef[6 * c] * t + coef[6 * c + 2]) * t + coef[6 * c + 4]
                    vb = (coef[6 * c + 1] * t + coef[6 * c + 3]) * t + coef[6 * c + 5]
                    if not _negative(va, vb, d):
                        inside = False
                        break
                if inside:
                    if count < cap:
                        for i in range(last):
                            out[count, i] = k[i]
                        out[count, last] = t
                    count += 1
                t += 1
            i = last - 1
            while i >= 0:
                k[i] += 1
                if k[i] <= hi[i]:
                    break
                k[i] = lo[i]
                i -= 1
            if i < 0:
                break

    free(k)
    free(coef)
    return count
