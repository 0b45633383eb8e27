"""CSS reference values for ARIMA tests, computed with scipy on an
independent Python recursion."""
import numpy as np
from scipy.optimize import minimize_scalar

from support import SplitMix64


def ma1(seed, n, theta, mean):
    rng = SplitMix64(seed)
    out, prev = [], 0.0
    for _ in range(n):
        e = rng.normal()
        out.append(mean + e + theta * prev)
        prev = e
    return np.array(out)


def css_ma1(w, theta):
    # e_t = (w_t - mu) - theta e_{t-1}; residuals are affine in mu.
    a = np.zeros(len(w)); b = np.zeros(len(w))
    for t in range(len(w)):
        a[t] = w[t] - (theta * a[t - 1] if t else 0.0)
        b[t] = 1.0 - (theta * b[t - 1] if t else 0.0)
    mu = (a @ b) / (b @ b)
    e = a - mu * b
    return e @ e, mu


w = ma1(777, 1500, 0.4, 2.0)
res = minimize_scalar(lambda th: css_ma1(w, th)[0], bounds=(-0.99, 0.99), method="bounded",
                      options={"xatol": 1e-12})
ssr, mu = css_ma1(w, res.x)
n = len(w)
ll = -0.5 * n * (np.log(2 * np.pi * ssr / n) + 1)
print(f"theta {res.x!r} mu {mu!r} ll {ll!r} aic {2*3 - 2*ll!r}")
