"""High-precision reference values for the closed-form calculators.

Each formula is written out directly in mpmath at 50 significant digits,
independently of the Rust implementation. Run with `python3 pins.py` and
copy the printed rows into `PINS` in src/verify.rs.
"""

from mpmath import mp, mpf, exp, log, sqrt, pi, e, floor

mp.dps = 50


def measurement_class(n, r, g):
    return 2 * mpf(2) ** n * (n + 1) ** r * mpf(g) ** r


def low_complexity(kind, n, r, delta, g):
    d = mpf(2) ** n
    pre = 4 * d * (n + 1) ** r * mpf(g) ** r
    delta = mpf(delta)
    if kind == "so":
        return pre * exp(mpf(9) / 64) * exp(-(d - 2) * (1 - delta) ** 2 / 32)
    if kind == "sp":
        return pre * exp(mpf(7) / 32) * exp(-d * (1 - delta) ** 2 / 16)
    return pre * exp(mpf(3) / 32) * exp(-d * (1 - delta) ** 2 / 16)


def design_low_complexity(kind, n, r, delta, g, k, eps):
    d = mpf(2) ** n
    t = mpf(k) / 3
    circ = mpf(g) ** r * (n + 1) ** r
    if kind == "so":
        main = 4 * circ * (32 * t) ** t * d * (d - 2) ** (-t)
    elif kind == "sp":
        main = 4 * circ * (16 * t) ** t * d * (d + 2) ** (-t)
    else:
        main = 4 * circ * (16 * t) ** t * d ** (1 - t)
    return mpf(2) ** (2 * t) * (main + mpf(eps))


def design_low_complexity_integer(kind, n, r, delta, g, k, eps):
    d = mpf(2) ** n
    m = floor(mpf(k) / 3)
    x = {"so": 32 / (d - 2), "sp": 8 / (d / 2 + 1), "su": 16 / d}[kind]
    main = 4 * d * (n + 1) ** r * mpf(g) ** r * (x * m) ** m
    design = mpf(eps) / d ** k * (d ** mpf(1.5) + 1) ** (2 * m)
    return (1 - 1 / d - mpf(delta)) ** (-2 * m) * (main + design)


def packing(kind, d, delta):
    d, q = mpf(d), mpf(delta) ** 4
    if kind == "so":
        return exp(mpf(-29) / 64) * exp(d * q / 32) / 4
    if kind == "sp":
        return exp(-1) * exp(d * q / 8) / 4
    return exp(mpf(-1) / 4) * exp(d * q / 16) / 4


def design_packing(kind, d, delta, k, eps):
    d, delta = mpf(d), mpf(delta)
    x = {"so": 16 * k / (d - 2), "sp": 8 * k / (d + 2), "su": 8 * k / d}[kind]
    return ((2 - delta) * delta - 1 / d) ** k / 2 / (2 * x ** (mpf(k) / 2) + mpf(2) ** k * mpf(eps))


def sq_lower(kind, n, tau, eps, beta):
    d = mpf(2) ** n
    tau, eps, beta = mpf(tau), mpf(eps), mpf(beta)
    if kind == "so":
        m, delta = sqrt(2 / (pi * e)), 1 / sqrt(2 * d)
    else:
        m, delta = 1 / e, mpf(2) ** (-mpf(n) / 2 - 1)
    xi = m - delta - (eps + tau)
    if kind == "so":
        num = beta - 2 * exp(-(d - 2) * xi ** 2 / 8)
        den = 2 * exp(-(d - 2) * tau ** 2 / 32)
    elif kind == "sp":
        num = beta - 2 * exp(-(d / 2 + 1) * xi ** 2 / 2)
        den = 2 * exp(-(d / 2 + 1) * tau ** 2 / 8)
    else:
        num = beta - 2 * exp(-d * xi ** 2 / 4)
        den = 2 * exp(-d * tau ** 2 / 16)
    return num / den - 1


def design_deviation(d, k, eps, alpha, mean_abs, delta, m, a):
    d, delta = mpf(d), mpf(delta)
    return (2 * (mpf(m) / a) ** m + mpf(eps) / d ** k * (alpha + mean_abs) ** (2 * m)) / delta ** (2 * m)


def levy(c, lip, tau):
    return 2 * exp(-mpf(tau) ** 2 / (2 * mpf(lip) ** 2 * c))


PINS = [
    ("measurement_class n=3 r=2 G=2", measurement_class(3, 2, 2)),
    ("measurement_class n=10 r=5 G=3", measurement_class(10, 5, 3)),
    ("low_complexity SU n=10 r=1 delta=0.5 G=2", low_complexity("su", 10, 1, "0.5", 2)),
    ("low_complexity SO n=12 r=3 delta=0.3 G=4", low_complexity("so", 12, 3, "0.3", 4)),
    ("low_complexity Sp n=11 r=2 delta=0.4 G=2", low_complexity("sp", 11, 2, "0.4", 2)),
    ("design_low_complexity SU n=8 r=2 delta=0.1 G=2 k=6 eps=0", design_low_complexity("su", 8, 2, "0.1", 2, 6, 0)),
    ("design_low_complexity SO n=10 r=1 delta=0.2 G=2 k=12 eps=1e-3", design_low_complexity("so", 10, 1, "0.2", 2, 12, "1e-3")),
    ("design_low_complexity Sp n=12 r=2 delta=0.2 G=2 k=9 eps=1e-6", design_low_complexity("sp", 12, 2, "0.2", 2, 9, "1e-6")),
    ("design_low_complexity_integer Sp n=10 r=1 delta=0.2 G=2 k=7 eps=1e-6", design_low_complexity_integer("sp", 10, 1, "0.2", 2, 7, "1e-6")),
    ("packing SO D=1024 Delta=0.5", packing("so", 1024, "0.5")),
    ("packing SU D=4096 Delta=0.3", packing("su", 4096, "0.3")),
    ("packing Sp D=2048 Delta=0.6", packing("sp", 2048, "0.6")),
    ("design_packing SU D=256 Delta=0.5 k=8 eps=0", design_packing("su", 256, "0.5", 8, 0)),
    ("design_packing SO D=1024 Delta=0.4 k=5 eps=1e-4", design_packing("so", 1024, "0.4", 5, "1e-4")),
    ("sq SU n=10 tau=0.1 eps=0.1 beta=0.5", sq_lower("su", 10, "0.1", "0.1", "0.5")),
    ("sq SO n=12 tau=0.05 eps=0.1 beta=0.9", sq_lower("so", 12, "0.05", "0.1", "0.9")),
    ("sq Sp n=14 tau=0.04 eps=0.2 beta=0.7", sq_lower("sp", 14, "0.04", "0.2", "0.7")),
    ("design_deviation SU D=8 k=4 eps=0 K=1 m=2 delta=0.5 a=D/16", design_deviation(8, 4, 0, 8 * sqrt(8), 1, "0.5", 2, mpf(8) / 16)),
    ("design_deviation SU D=8 k=4 eps=0.01 K=1 m=2 delta=0.5 a=D/16", design_deviation(8, 4, "0.01", 8 * sqrt(8), 1, "0.5", 2, mpf(8) / 16)),
    ("levy SO D=16 L=2 tau=0.3", levy(mpf(4) / 14, 2, "0.3")),
]

if __name__ == "__main__":
    for name, value in PINS:
        print(f'    ("{name}", {mp.nstr(value, 17, min_fixed=-5, max_fixed=6)}),')
