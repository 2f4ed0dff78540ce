import itertools
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from anisolattice import kernels
from anisolattice._enum_py import enumerate_box
from anisolattice.exact import QuadScalar, sign
from anisolattice.kernels import enumerate_points, fits_compiled, pack_constraints

needs_compiled = pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="compiled kernel not built")


def direct(lo, hi, raw, d):
    """Evaluate every constraint k^T Q k + L.k + K < 0 on every box point, exactly."""
    out = []
    for k in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        ok = True
        for Q, L, K in raw:
            z = QuadScalar(0, 0, d)
            val = z + K + sum((L[i] * k[i] for i in range(len(k))), z)
            if Q is not None:
                val += sum((Q[i][j] * k[i] * k[j] for i in range(len(k)) for j in range(len(k))), z)
            if sign(val) >= 0:
                ok = False
                break
        if ok:
            out.append(k)
    return out


coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def problems(draw):
    n = draw(st.integers(1, 3))
    d = draw(st.sampled_from([0, 2, 5]))
    raw = []
    for _ in range(draw(st.integers(1, 2))):
        Q = [[draw(coef) for _ in range(n)] for _ in range(n)]
        Q = [[(Q[i][j] + Q[j][i]) / 2 for j in range(n)] for i in range(n)]
        if d:
            Q[0][0] = Q[0][0] + QuadScalar(0, draw(coef), d)
        L = [draw(coef) for _ in range(n)]
        raw.append((Q, L, draw(coef) - 2))
    lo = [draw(st.integers(-4, 0)) for _ in range(n)]
    hi = [a + draw(st.integers(0, 5)) for a in lo]
    return n, d, raw, lo, hi


@settings(max_examples=60, deadline=None)
@given(problems())
def test_python_kernel_matches_direct_evaluation(prob):
    n, d, raw, lo, hi = prob
    cons = pack_constraints(raw, n, d)
    got = enumerate_box(lo, hi, cons.q0, cons.q1, cons.l0, cons.l1, cons.k0, cons.k1, d)
    assert got == direct(lo, hi, raw, d)


@needs_compiled
@settings(max_examples=60, deadline=None)
@given(problems(), st.integers(1, 3))
def test_compiled_kernel_matches_python(prob, threads):
    n, d, raw, lo, hi = prob
    cons = pack_constraints(raw, n, d)
    a = enumerate_points(lo, hi, cons, backend="python")
    b = enumerate_points(lo, hi, cons, backend="compiled", threads=threads)
    assert a.shape == b.shape and (a == b).all()


def test_large_coefficients_fall_back_to_python():
    big = 10 ** 12
    raw = [([[big]], [0], -big * 4)]  # big * k^2 < 4 big  <=>  |k| < 2
    cons = pack_constraints(raw, 1, 0)
    lo, hi = [-10 ** 4], [10 ** 4]
    assert not fits_compiled(cons, lo, hi)
    pts = enumerate_points(lo, hi, cons)
    assert pts.ravel().tolist() == [-1, 0, 1]
    if kernels.HAVE_COMPILED:
        with pytest.raises(RuntimeError):
            enumerate_points(lo, hi, cons, backend="compiled")


def test_empty_box():
    cons = pack_constraints([(None, [1], -1)], 1, 0)
    assert enumerate_points([3], [2], cons).shape == (0, 1)


def test_unknown_backend():
    cons = pack_constraints([(None, [1], -1)], 1, 0)
    with pytest.raises(ValueError):
        enumerate_points([0], [1], cons, backend="gpu")


def test_environment_switch_disables_compiled():
    env = dict(os.environ, ANISOLATTICE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import anisolattice.kernels as k; print(k.HAVE_COMPILED)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
