"""Pure-numpy RK4 loop, used when the compiled kernel is unavailable."""
import numpy as np


def propagate(minus_ih, psi, dt, n_steps, stride, offset, include_last, out):
    """Same contract as the compiled ``propagate`` but on complex arrays.

    ``minus_ih`` is the dense generator -iH; ``psi`` is updated in place.
    """
    c = psi.copy()
    n_rec = 0
    half = 0.5 * dt
    h6 = dt / 6.0
    for j in range(n_steps + 1):
        if j == n_steps and not include_last:
            break
        if (j + offset) % stride == 0:
            if n_rec >= out.shape[0]:
                break
            out[n_rec] = c
            n_rec += 1
        if j == n_steps:
            break
        k1 = minus_ih @ c
        k2 = minus_ih @ (c + half * k1)
        k3 = minus_ih @ (c + half * k2)
        k4 = minus_ih @ (c + dt * k3)
        c = c + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    psi[:] = c
    return n_rec
