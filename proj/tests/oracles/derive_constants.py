"""Independent high-precision evaluation of the solver's derived constants.

Run with `python3 derive_constants.py`; the printed values are frozen into
tests/test_regularization.cpp and the acceptance suite.
"""
from mpmath import mp, mpf, log, ceil, exp

mp.dps = 50


def packing(m, n, rho, alpha, eps):
    m, n, rho, alpha, eps = map(mpf, (m, n, rho, alpha, eps))
    beta = (eps / 4) / ((1 + alpha) * log(4 * m * n * rho / eps))
    logc = log(1 + eps / 2) / beta
    out = {"beta": beta, "logC": logc}
    if alpha < 1:
        bp = (1 - alpha) * (eps / 4) / log(n * rho / (1 - eps))
        h = (1 - alpha) * beta * bp / (16 * eps * (1 + alpha * beta))
        out.update(beta_prime=bp, h=h, K=int(ceil(2 / ((1 - alpha) * h * eps))))
    elif alpha == 1:
        out.update(K=int(ceil(10 * log(8 * rho * m * n / eps) ** 2 / (eps * beta))))
    else:
        mn = min(alpha - 1, 1)
        out.update(K=int(ceil(800 * (1 + alpha) ** 2 * log(n * rho / (eps * mn)) / (beta * mn))))
    return out


def covering(m, n, rho, beta, eps):
    m, n, rho, beta, eps = map(mpf, (m, n, rho, beta, eps))
    floor = (eps / 4) / log(m * n * rho / eps)
    if beta <= 0:
        beta = floor
    bp = (eps / 4) / ((1 + beta) * log(m * n * rho / eps))
    h = beta * bp / (16 * eps)
    return {"beta": beta, "beta_prime": bp, "h": h, "K": 1 + int(ceil(2 / (h * eps)))}


if __name__ == "__main__":
    for args in [(10, 10, 1, 1, 0.1), (1, 1, 1, 0, 0.1), (2, 2, 1, 0, 0.1), (3, 3, 1, 0.5, 0.1),
                 (3, 3, 1, 0.5, 0.05), (1, 2, 1, 1, 0.1), (1, 2, 1, 2, 0.05), (5, 7, 30, 0.3, 0.1),
                 (4, 6, 12.5, 1.5, 0.2), (8, 3, 100, 3, 0.05), (20, 20, 50, 0.9, 0.1), (1, 1, 1, 2, 0.05)]:
        print("pack", args, {k: (mp.nstr(v, 17) if not isinstance(v, int) else v) for k, v in packing(*args).items()})
    for args in [(1, 1, 1, 1, 0.1), (1, 1, 1, 0, 0.1), (2, 2, 1, 1, 0.1), (2, 1, 1, 1, 0.1),
                 (2, 2, 1, 0, 0.1), (6, 4, 20, 2, 0.2), (3, 5, 7, 0.5, 0.5)]:
        print("cover", args, {k: (mp.nstr(v, 17) if not isinstance(v, int) else v) for k, v in covering(*args).items()})
    # init example: alpha=0, eps=0.1, n=2, rho=1 -> z0
    bp = (mpf("0.1") / 4) / log(2 / mpf("0.9"))
    print("z0", mp.nstr(mpf("0.45") ** (-bp) - 1, 17), mp.nstr(exp(mpf("0.025")) - 1, 17))
