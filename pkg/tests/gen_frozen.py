"""Regenerate tests/frozen.py with mpmath at 40 digits.

Nothing here imports thetazeta, so the frozen numbers are independent of
the package.  Run: python tests/gen_frozen.py > tests/frozen.py
"""

import mpmath as mp

mp.mp.dps = 40


def theta(x):
    return mp.jtheta(3, 0, mp.exp(-mp.pi * x))


def z_alpha(s, a):
    # 1/(s-a) - 1/s + int_1^inf (theta(t^2)^a - 1)(t^s + t^{a-s}) dt/t
    f = lambda t: (theta(t * t) ** a - 1) * (t ** s + t ** (a - s)) / t
    return 1 / (s - a) - 1 / s + mp.quad(f, [1, 2, 4, mp.inf])


def gamma_alpha(a):
    f = lambda t: (theta(t * t) ** a - 1) * (t ** a + 1) / t
    return -1 / a + mp.quad(f, [1, 2, 4, mp.inf])


def tau(n_max):
    # q prod (1 - q^n)^24
    c = [mp.mpf(0)] * (n_max + 1)
    c[0] = mp.mpf(1)
    for n in range(1, n_max + 1):
        for _ in range(24):
            for k in range(n_max, n - 1, -1):
                c[k] -= c[k - n]
    return [int(v) for v in c[: n_max]]  # tau(n) = c[n-1]


def delta(y, taus):
    return mp.fsum(t * mp.exp(-2 * mp.pi * (n + 1) * y) for n, t in enumerate(taus))


def lstar_delta(s, taus):
    f = lambda y: delta(y, taus) * (y ** s + y ** (12 - s)) / y
    return mp.quad(f, [1, 2, 4, 8, 16])


def c(x):
    x = mp.mpc(x)
    return complex(x)


def r(x):
    return float(mp.re(x))


out = {}
out["K"] = [((nu, x), c(mp.besselk(nu, x))) for nu, x in
            ((0.5, 1.0), (0.25 + 3j, 2.0), (5j, 1.0), (2 + 3j, 5.0), (10.0, 0.5), (0.1j, 30.0), (7.5 - 12j, 4.0))]
out["GAMMA"] = [(z, c(mp.gamma(z))) for z in (0.5, 3.7, 0.25 + 0.5j, -2.5 + 1j, 10 + 20j)]
out["THETA"] = [(x, r(theta(x))) for x in (0.1, 0.5, 1.0, 2.0, 10.0)]
out["ZETA_STAR"] = [(s, c(mp.pi ** (-mp.mpc(s) / 2) * mp.gamma(mp.mpc(s) / 2) * mp.zeta(s)))
                    for s in (2.0, 0.5 + 14.134725j, -0.7 + 3j, 0.3 + 2j, 1.5 - 25j, 0.5 + 40j)]
out["ZETA"] = [(s, c(mp.zeta(s))) for s in (2.0, 0.0, 0.5, -2.5 + 10j, 0.5 + 30j, 3 - 80j)]
out["Z_ALPHA"] = [((s, a), c(z_alpha(mp.mpc(s), a))) for s, a in
                  ((2.0, 0.5), (0.3 + 2j, 0.25), (-1.0 + 4j, 0.75), (0.17, 0.5), (1.2 - 7j, 1.5))]
out["GAMMA_ALPHA"] = [(a, r(gamma_alpha(a))) for a in (0.25, 0.5, 1.0)]
out["CATALAN"] = float(mp.catalan)
out["L_HALF_CHI4"] = r(mp.dirichlet(0.5, [0, 1, 0, -1]))
out["L_CHI8"] = [(s, c(mp.dirichlet(s, [0, 1, 0, -1, 0, -1, 0, 1]))) for s in (0.5, 2.0, -0.5 + 3j)]
taus = tau(80)
out["TAU"] = taus[:12]
out["LSTAR_DELTA"] = [(s, c(lstar_delta(mp.mpc(s), taus))) for s in (6.0, 6.5, 4.5 + 3j)]
out["HURWITZ"] = [((s, a), c(mp.zeta(s, a))) for s, a in ((3.0, 0.25), (0.5 + 5j, 1 / 3), (-1.5 + 2j, 0.125))]

print('"""Reference values from tests/gen_frozen.py (mpmath, 40 digits)."""')
print()
for k, v in out.items():
    print(f"{k} = {v!r}")
