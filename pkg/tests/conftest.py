import numpy as np
import pytest


def random_rotation(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_spd(rng, n, low=0.2, high=3.0):
    q = random_rotation(rng, n)
    a = (q * rng.uniform(low, high, n)) @ q.T
    return 0.5 * (a + a.T)


def fd_gradient(f, lam, step=1e-5):
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    for i in range(lam.size):
        e = np.zeros(lam.size)
        e[i] = step
        out[i] = (f.value(lam + e) - f.value(lam - e)) / (2.0 * step)
    return out


def fd_hessian(f, lam, step=1e-4):
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    out = np.zeros((n, n))
    base = f.value(lam)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        out[i, i] = (f.value(lam + ei) - 2.0 * base + f.value(lam - ei)) / step ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = step
            out[i, j] = out[j, i] = (
                f.value(lam + ei + ej) - f.value(lam + ei - ej)
                - f.value(lam - ei + ej) + f.value(lam - ei - ej)) / (4.0 * step ** 2)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)
