"""Recompute the frozen values in tests/oracles.py with 40-digit arithmetic.

Independent of epmspdc: coefficients are re-typed from the data file's
sources, derivatives come from mpmath.diff, the EPM root from mpmath.findroot.
Needs mpmath (``pip install mpmath``).

    python scripts/freeze_oracles.py
"""

import mpmath as mp

mp.mp.dps = 40
C0 = mp.mpf(299792458)
L = mp.mpf("0.01")

# (A, B, C, D), lambda in um
Y = (mp.mpf("2.09930"), [mp.mpf("0.922683")], [mp.mpf("0.0467695")], mp.mpf("0.0138408"))
Z = (
    mp.mpf("2.12725"),
    [mp.mpf("1.18431"), mp.mpf("0.6603")],
    [mp.mpf("0.0514852"), mp.mpf("100.00507")],
    mp.mpf("0.00968956"),
)


def n(s, lam_m):
    a, b, cc, d = s
    lam = lam_m * mp.mpf(10) ** 6
    l2 = lam * lam
    return mp.sqrt(a + sum(bj / (1 - cj / l2) for bj, cj in zip(b, cc)) - d * l2)


def k(s, w):
    return n(s, 2 * mp.pi * C0 / w) * w / C0


def k1(s, w):
    return mp.diff(lambda x: k(s, x), w)


def k2(s, w):
    return mp.diff(lambda x: k(s, x), w, 2)


def main():
    for name, s in (("Y", Y), ("Z", Z)):
        print(f"N_{name}_1584 = {mp.nstr(n(s, mp.mpf('1.584e-6')), 19)}")
        print(f"N_{name}_792 = {mp.nstr(n(s, mp.mpf('0.792e-6')), 19)}")
        w = 2 * mp.pi * C0 / mp.mpf("1.584e-6")
        print(f"K1_{name}_1584 = {mp.nstr(k1(s, w), 19)}")
        print(f"K2_{name}_1584 = {mp.nstr(k2(s, w), 19)}")

    def slope(lam_nm):
        wp = 2 * mp.pi * C0 / (lam_nm * mp.mpf(10) ** -9)
        return (k1(Y, wp) - (k1(Y, wp / 2) + k1(Z, wp / 2)) / 2) * 10**15

    lam = mp.findroot(slope, (mp.mpf(780), mp.mpf(800)), solver="anderson", tol=1e-30) * mp.mpf(10) ** -9
    wp = 2 * mp.pi * C0 / lam
    dk = k(Y, wp) - k(Y, wp / 2) - k(Z, wp / 2)
    print(f"EPM_PUMP_WAVELENGTH = {mp.nstr(lam, 19)}")
    print(f"EPM_MATERIAL_MISMATCH = {mp.nstr(dk, 19)}")
    print(f"EPM_PERIOD = {mp.nstr(2 * mp.pi / abs(dk), 19)}")
    print(f"EPM_WALKOFF_TIMES_L = {mp.nstr((k1(Y, wp / 2) - k1(Z, wp / 2)) * L, 19)}")
    print(f"EPM_CURVATURE = {mp.nstr(k2(Y, wp) - (k2(Y, wp / 2) + k2(Z, wp / 2)) / 4, 19)}")
    x = mp.findroot(lambda x: mp.sin(x) / x - 1 / mp.sqrt(2), 1.39)
    print(f"SINC2_HALF_MAX_X = {mp.nstr(x, 16)}")


if __name__ == "__main__":
    main()
