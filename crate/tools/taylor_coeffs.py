"""Taylor coefficients at e = 0 of the trace bounds.

The closed forms carry 1/e^2 and 1/e^4 factors that cancel, so near e = 0
they are evaluated from a polynomial instead. The hat variants of the
piecewise bounds have a genuine 1/e pole and are not expanded. Coefficients come from a
discrete Cauchy integral on |e| = R, where the formulas are well conditioned.
Quadrature pieces use Gauss-Legendre with complex e.

Usage: python3 tools/taylor_coeffs.py > crates/core/src/trace_engine/taylor.rs
"""
import numpy as np
from numpy import pi, sqrt, log, cos, sin

R = 0.3
M = 96
DEG = 16
NGL = 160

xg, wg = np.polynomial.legendre.leggauss(NGL)


def gl(f, a, b):
    x = 0.5 * (b - a) * xg + 0.5 * (b + a)
    return 0.5 * (b - a) * np.sum(wg * f(x))


def rho0(e, t):
    return gl(lambda x: (1 + e * cos(x)) ** -2, 0.0, t)


def rho1(e):
    return gl(lambda s: (pi - s) * (1 + e * cos(s)) ** -2, 0.0, pi)


def rho2(e):
    return gl(lambda s: (pi - s) * (1 + e * cos(s)) ** -1, 0.0, pi)


def rho0_vec(e, xs):
    return np.array([rho0(e, x) for x in xs])


def rho3(e):
    x = 0.5 * pi * xg + 0.5 * pi
    return 0.5 * pi * np.sum(wg * (pi - x) * rho0_vec(e, x))


L = lambda e: log((1 + e) / (1 - e))


def a0p(e):
    return (1 / (36 * e**4 * (e * e - 1) ** 3)) * (
        -382 * e**7 - 54 * pi**2 * e**6 + 532 * e**5 + 90 * pi**2 * e**4 + 120 * e**3 - 54 * pi**2 * e**2 + 18 * pi**2
        + 18 * pi**2 * (e - 1) ** 3 * (e + 1) ** 2 * (e * e + 1) * sqrt((1 + e) / (1 - e))
        - (45 * e**8 + 249 * e**6 - 300 * e**4 + 6 * e**2) * L(e))


def a0m(e):
    s = sqrt(1 - e * e)
    return (1 / (36 * e**4 * (1 - e * e) ** 5)) * (
        -382 * e**11 + 72 * pi**2 * e**10 + 1296 * e**9 + 81 * pi**4 * e**8 - 36 * pi**2 * e**8 - 1326 * e**7
        + 162 * pi**4 * e**6 + 558 * pi**2 * e**6 + 292 * e**5 + 81 * pi**4 * e**4 - 666 * pi**2 * e**4 + 120 * e**3
        + 90 * pi**2 * e**2 + 216 * pi**2 * (e**4 - 1) * s * e**4 * log(e + 1)
        + pi**2 * (216 * e**4 - 216 * e**8) * s * log(s / 2 + 0.5)
        - 3 * (e * e - 1) * (15 * e**8 + 68 * e**6 + 6 * (12 * pi**2 * s + 17) * e**2 + 3 * (24 * pi**2 * s - 61) * e**4 - 2) * e**2 * L(e)
        + pi**2 * (126 * e**10 - 108 * e**9 - 180 * e**8 + 648 * e**7 + 486 * e**6 + 756 * e**5 + 954 * e**4 - 108 * e**2 + 18) * s
        - 18 * pi**2)


a1p = lambda e: (16 - e**4) / (4 * (1 - e * e) ** 2)
a2p = lambda e: (7 * e**4 + 12 * e * e - 3) / (2 * e * e * (1 - e * e) ** 2)
a2m = lambda e: -a2p(e)
a3m = lambda e: 9 * pi * (e * e + 1) ** 2 / (1 - e * e) ** 3.5


def a1m(e):
    s = sqrt(1 - e * e)
    return (e**8 - 2 * e**6 - 8 * (9 * pi**2 * s - 4) * e**2 - 4 * (9 * pi**2 * s + 4)
            - 3 * (12 * pi**2 * s + 5) * e**4) / (4 * (1 - e * e) ** 4)


def hp_s(e, s):
    return e**3 * cos(3 * s) + 4 * e * e * cos(2 * s) + (e * e + 6) * e * cos(s) + 2 * e * e + 2


def hp_t(e, t):
    return (e * cos(t) + 1) * (e * e * cos(2 * t) + 2 * e * cos(t) + 1)


def hm(e, t):
    return 3 * hp_s(e, t) * (3 * (e * e + 1) * t + e * sin(t) * (e * e * cos(2 * t) + 2 * e * e + 6 * e * cos(t) + 9)) / (4 * (e * e - 1) ** 2)


def f_l_plus(e):
    x = 0.5 * pi * xg + 0.5 * pi
    r0 = rho0_vec(e, x)
    tail = np.array([gl(lambda t: hp_t(e, t), s, pi) for s in x])
    i2 = 0.5 * pi * np.sum(wg * hp_s(e, x) * r0**2 * tail) * 9 / (4 * (e * e - 1) ** 2)
    return a0p(e) + a1p(e) * rho1(e) + a2p(e) * rho2(e) + i2


def f_l_minus(e):
    x = 0.5 * pi * xg + 0.5 * pi
    i1 = 0.5 * pi * np.sum(wg * hm(e, x) * rho0_vec(e, x) ** 2)
    return a0m(e) + a1m(e) * rho1(e) + a2m(e) * rho2(e) + a3m(e) * rho3(e) + i1


def ta0(e):
    s = sqrt(1 - e * e)
    return (1 / (e**4 * (1 - e * e) ** 5)) * (
        140 * e**11 + 29 * pi**2 * e**10 + 6 * e**9 + 36 * pi**4 * e**8 + 17 * pi**2 * e**8 - 408 * e**7
        + 36 * pi**4 * e**6 + 47 * pi**2 * e**6 + 238 * e**5 + 9 * pi**4 * e**4 - 101 * pi**2 * e**4 + 24 * e**3
        + 10 * pi**2 * e**2 - 2 * pi**2 - 36 * pi**2 * s * (-2 * e**4 + e * e + 1) * e**4 * log(e + 1)
        + pi**2 * (-72 * e**8 + 36 * e**6 + 36 * e**4) * s * log(s / 2 + 0.5)
        + (e * e - 1) * (6 * e**8 - 47 * e**6 - 3 * (12 * pi**2 * s + 13) * e**2 + (78 - 72 * pi**2 * s) * e**4 + 2) * e**2 * L(e)
        + pi**2 * (-26 * e**10 + 72 * e**9 + 20 * e**8 + 180 * e**7 + 172 * e**6 + 72 * e**5 + 170 * e**4 - 14 * e**2 + 2) * s)


ta1 = lambda e: -3 * (4 * e**4 + 43 * e * e + 28) / (1 - e * e) ** 2 - 36 * (2 * pi * e * e + pi) ** 2 / (1 - e * e) ** 3.5
ta2 = lambda e: 2 * (18 * e**4 + e * e + 5) / (e * e * (1 - e * e) ** 2)
ta3 = lambda e: 36 * pi * (2 * e * e + 1) ** 2 / (1 - e * e) ** 3.5
th_ = lambda e, t: 18 * (e * cos(t) + 1) * (e * e + 2 * e * cos(t) + 1) * (2 * e * e * t + e * sin(t) * (e * e + e * cos(t) + 3) + t) / (1 - e * e) ** 2


def f_tilde(e):
    x = 0.5 * pi * xg + 0.5 * pi
    i1 = 0.5 * pi * np.sum(wg * th_(e, x) * rho0_vec(e, x) ** 2)
    return ta0(e) + ta1(e) * rho1(e) + ta2(e) * rho2(e) + ta3(e) * rho3(e) + i1


def g_l_plus(e):
    t1 = (5 * e**4 + 3) * (4 * e - pi**2) / (4 * e * e * (e * e - 1) ** 2)
    t2 = -6 * pi**2 * (e * e + 1) * (e + log(1 - e)) / ((e - 1) ** 2 * e * e * (e + 1) ** 3)
    t3 = -pi**2 * (e**4 - 16) / (8 * (1 - e * e) ** 3.5)
    t4 = 3 * (15 * e**6 + 83 * e**4 - 100 * e * e + 2) * e * e * log((1 - e) / (1 + e)) / (36 * e**4 * (e * e - 1) ** 3)
    t5 = (27 * (3 * pi**2 - 16) * e**6 + (-112 + 441 * pi**2 - 18 * pi**4) * e**5 - 27 * (48 + 3 * pi**2 + 4 * pi**4) * e**4
          + (7536 + 972 * pi**2 - 9 * pi**4) * e**3 - 90 * pi**2 * (6 + pi**2) * e**2 + 5184 * e - 18 * pi**4) / (48 * (e * e - 1) ** 5)
    t6 = (-191 * e**7 - 27 * pi**2 * e**6 + 266 * e**5 + 45 * pi**2 * e**4 + 60 * e**3 - 27 * pi**2 * e**2
          + 9 * pi**2 * (e - 1) ** 3 * (e + 1) ** 2 * (e * e + 1) * sqrt((1 + e) / (1 - e)) + 9 * pi**2) / (18 * e**4 * (e * e - 1) ** 3)
    return t1 + t2 + t3 + t4 + t5 + t6


def g_l_minus_check(e):
    s = sqrt(1 - e * e)
    r = sqrt((1 + e) / (1 - e))
    b = (-45 * pi**2 * e**14 + 360 * e**13 + 45 * pi**2 * e**12 + 225 * pi**2 * e**11 - 1844 * e**11 + 27 * pi**2 * e**10 - 225 * pi**2 * e**9
         + 3888 * e**9 + 162 * pi**4 * e**8 - 324 * pi**3 * e**8 - 45 * pi**2 * e**8 - 162 * pi**4 * e**7 - 648 * pi**3 * e**7 - 360 * pi**2 * e**7 - 3660 * e**7 - 486 * pi**4 * e**6
         + 1647 * pi**2 * e**6 - 324 * pi**4 * e**5 + 2592 * pi**3 * e**5 + 360 * pi**2 * e**5 + 1232 * e**5 + 810 * pi**4 * e**4 + 4212 * pi**3 * e**4 - 1827 * pi**2 * e**4
         + 810 * pi**4 * e**3 + 1944 * pi**3 * e**3 + 24 * e**3 + 1458 * pi**4 * e**2 + 234 * pi**2 * e**2 + 972 * pi**4 * e - 36 * pi**2
         + 216 * pi * (e * e + 1) * ((2 * pi - 3) * e * e - 2 * pi - 3) * s * e**4 * log(e + 1)
         + (216 * e**8 + 1296 * e**6 + 1080 * e**4) * (pi**2 * s * L(e) + pi**2 * s * log(s / 2 + 0.5))
         - 324 * pi**3 * (e - 1) * (2 * e**6 + 8 * e**5 + 3 * pi * e**4 + 16 * e**4 + 6 * pi * e**3 + 16 * e**3 + 6 * pi * e**2 + 6 * e**2 + 6 * pi * e + 3 * pi) * log(1 - e)
         - 648 * pi**3 * (e - 1) * pi * (e * e + 1) ** 2 * r * e * log(1 - e)
         + (-108 * e**12 - 282 * e**10 + 1776 * e**8 - 2286 * e**6 + 912 * e**4 - 12 * e**2) * L(e)
         + pi**4 * (-324 * e**8 - 324 * e**7 - 648 * e**5 + 972 * e**4 - 324 * e**3 + 648 * e**2) * r
         + pi**2 * (252 * e**10 - 216 * e**9 - 360 * e**8 + 1296 * e**7 + 972 * e**6 + 1512 * e**5 + 1908 * e**4 - 216 * e**2 + 36) * s)
    return b / (72 * e**4 * (1 - e * e) ** 5)


def rho2_hi_small(e):
    return pi**2 / 2 - 2 * e + pi**2 * e * e / 4


def rho2_hi_large(e):
    return -pi**2 * (e + log(1 - e)) / (e * e * (1 + e))


def g_l_minus_hat(e):
    return g_l_minus_check(e) + 3 / (2 * e * e * (1 - e * e) ** 2) * (rho2_hi_large(e) - rho2_hi_small(e))


def g_tilde_check(e):
    s = sqrt(1 - e * e)
    q = sqrt((1 - e) / (e + 1))
    b = (s * (-pi**2 * (-72 * e**8 + 36 * e**6 + 36 * e**4) * log(1 - e) - pi * (144 * e**8 + 144 * e**6 + 36 * e**4) * log(e + 1)
              + pi**2 * (72 * e**8 + 180 * e**6 + 72 * e**4) * log(s / 2 + 0.5)
              + pi**2 * (-26 * e**10 + 72 * e**9 + 20 * e**8 + 180 * e**7 + 172 * e**6 + 72 * e**5 + 170 * e**4 - 14 * e**2 + 2))
         - 9 * pi**2 * e**14 + 72 * e**13 + 17 * pi**2 * e**12 / 2 - 72 * e**11 + 99 * pi**2 * e**10 / 2 - 72 * pi**2 * e**9 + 534 * e**9 + 54 * pi**4 * e**8 - 273 * pi**2 * e**8 / 8
         - 252 * pi**2 * e**7 + 528 * e**7 + 54 * pi**4 * e**6 + 77 * pi**2 * e**6 / 2 - 108 * pi**2 * e**5 + 726 * e**5 + 27 * pi**4 * e**4 / 2 - 225 * pi**2 * e**4 / 2 + 4 * e**3 + 15 * pi**2 * e**2
         + (e * e - 1) ** 3 * (6 * e**4 - 35 * e * e + 2) * e * e * log(e + 1) + pi**4 * (-72 * e**7 + 144 * e**6 - 72 * e**5 + 144 * e**4 - 18 * e**3 + 36 * e**2) * q
         - (e - 1) * (6 * e**10 + 6 * e**9 - 47 * e**8 - 47 * e**7 + 78 * e**6 + 78 * e**5 + 3 * (48 * pi**4 * q - 13) * e**4 - 39 * e**3
                      + 2 * (72 * pi**4 * q + 1) * e**2 + 2 * e + 36 * pi**4 * q) * e * log(1 - e) - 2 * pi**2)
    return b / (e**4 * (1 - e * e) ** 5)


def g_tilde_hat(e):
    s = sqrt(1 - e * e)
    inner1 = (140 * e**11 + 121 * pi**2 * e**10 / 2 - 108 * pi**2 * e**9 + 310 * e**9 + 54 * pi**4 * e**8 - 505 * pi**2 * e**8 / 8
              - 182 * pi**2 * e**7 + 648 * e**7 + 54 * pi**4 * e**6 + 115 * pi**2 * e**6 / 2 - 150 * pi**2 * e**5 + 670 * e**5 + 27 * pi**4 * e**4 / 2 - 119 * pi**2 * e**4
              - 10 * pi**2 * e - 2 * pi**2 + 18 * pi**2 * e**3 + 24 * e**3 + 20 * pi**2 * e**2 + (e * e - 1) ** 3 * (6 * e**4 - 35 * e * e + 2) * e * e * log(e + 1)
              - (e - 1) ** 3 * (e + 1) ** 2 * (6 * e**7 + 6 * e**6 - 35 * e**5 - (35 + 36 * pi**2) * e**4 + 2 * e**3 - 2 * (pi**2 - 1) * e**2 - 10 * pi**2) * log(1 - e))
    inner2 = 2 * pi * (18 * (4 * e**6 - 3 * e * e - 1) * e**4 * log(e + 1) - 18 * pi * (e - 1) ** 2 * (2 * e * e + 1) * (e**5 + 2 * e**4 + e**3 - 2 * pi**2 * e**2 - pi**2) * e * log(1 - e)
                       + pi * (13 * e**12 - 36 * e**11 - 23 * e**10 - 54 * e**9 + 4 * (9 * pi**2 - 19) * e**8 - 54 * (2 * pi**2 - 1) * e**7 + (1 + 108 * pi**2) * e**6
                               - 36 * (3 * pi**2 - 1) * e**5 + (92 + 81 * pi**2) * e**4 - 27 * pi**2 * e**3 + 2 * (9 * pi**2 - 4) * e**2
                               - 18 * (2 * e**6 + 3 * e**4 - 3 * e**2 - 2) * e**4 * log(s / 2 + 0.5) + 1))
    return (s * inner1 + inner2) / (e**4 * (1 - e * e) ** 5 * s)


FUNCS = [
    ("F_L_PLUS", f_l_plus),
    ("F_L_MINUS", f_l_minus),
    ("F_TILDE", f_tilde),
    ("G_L_PLUS", g_l_plus),
    ("G_L_MINUS_CHECK", g_l_minus_check),
    ("G_TILDE_CHECK", g_tilde_check),
]


def taylor(f):
    w = np.exp(2j * pi * np.arange(M) / M)
    vals = np.array([f(R * z) for z in w])
    c = np.fft.fft(vals) / M
    return [(c[k] / R**k).real for k in range(DEG + 1)]


def main():
    print("// Generated by tools/taylor_coeffs.py; do not edit.")
    print(f"// Taylor coefficients at e = 0, degree {DEG}.")
    print()
    for name, f in FUNCS:
        cs = taylor(f)
        print(f"pub(crate) const {name}: [f64; {DEG + 1}] = [")
        for c in cs:
            print(f"    {c:.17e},")
        print("];")
        print()


if __name__ == "__main__":
    main()
