import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinsep import SpinSystem, basis_vector, build
from spinsep.kernels import BACKENDS, Propagator, record_count


@given(st.integers(0, 60), st.integers(1, 7), st.integers(0, 20), st.booleans())
def test_record_count_matches_enumeration(n_steps, stride, offset, include_last):
    last = n_steps if include_last else n_steps - 1
    expected = sum(1 for j in range(last + 1) if (j + offset) % stride == 0)
    assert record_count(n_steps, stride, offset, include_last) == expected


def test_zero_generator_keeps_state(backend):
    v = np.array([0.6, 0.8j, 0, 0])
    recs, final = Propagator(np.zeros((4, 4)), backend).run(v, 0.1, 5)
    assert np.array_equal(final, v) and recs.shape == (6, 4)


def test_input_not_modified(backend, paper_h):
    v = basis_vector(2, 3)
    Propagator(paper_h, backend).run(v, 1e-3, 10)
    assert np.array_equal(v, basis_vector(2, 3))


def test_segments_equal_single_run(backend, paper_h):
    prop = Propagator(paper_h, backend)
    v = basis_vector(2, 3)
    whole, final = prop.run(v, 1e-3, 97, 5)
    a, mid = prop.run(v, 1e-3, 33, 5, 0, False)
    b, end = prop.run(mid, 1e-3, 64, 5, 33, True)
    assert np.array_equal(np.concatenate([a, b]), whole)
    assert np.array_equal(end, final)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@pytest.mark.parametrize("n", [3, 5])
def test_backends_agree(n):
    rng = np.random.default_rng(n)
    couplings = {(i, j): rng.normal() for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    h = build(SpinSystem(n, 4.0, couplings))
    v = rng.normal(size=h.dim) + 1j * rng.normal(size=h.dim)
    v /= np.linalg.norm(v)
    ra, fa = Propagator(h, "cython").run(v, 2e-3, 2000, 50)
    rb, fb = Propagator(h, "python").run(v, 2e-3, 2000, 50)
    np.testing.assert_allclose(ra, rb, rtol=0, atol=1e-12)
    np.testing.assert_allclose(fa, fb, rtol=0, atol=1e-12)


def test_complex_hamiltonian(backend):
    # generic Hermitian generator, compared with the exact RK4 polynomial
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    dt = 0.01
    z = -1j * dt * h
    r = np.eye(4) + z + z @ z / 2 + z @ z @ z / 6 + z @ z @ z @ z / 24
    v = np.array([1, 0, 0, 0], complex)
    _, final = Propagator(h, backend).run(v, dt, 3)
    np.testing.assert_allclose(final, r @ r @ r @ v, atol=1e-14)


def test_bad_arguments(paper_h):
    prop = Propagator(paper_h)
    with pytest.raises(ValueError):
        prop.run(np.zeros(4), 1e-3, 1)
    with pytest.raises(ValueError):
        prop.run(basis_vector(1, 3), 1e-3, 1, stride=0)
    with pytest.raises(ValueError):
        Propagator(paper_h, "fortran")


def test_env_var_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, SPINSEP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import spinsep; print(spinsep.BACKENDS)"],
                         capture_output=True, text=True, env=env, check=True).stdout
    assert out.strip() == "('python',)"
