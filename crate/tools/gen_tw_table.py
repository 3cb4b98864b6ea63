#!/usr/bin/env python3
"""Generate the Tracy-Widom GUE CDF table shipped in crates/core/data.

F2(s) = det(I - K_Airy) on L^2(s, inf), evaluated with Gauss-Legendre
quadrature of the Fredholm determinant (Nystrom discretisation).
Usage: python3 tools/gen_tw_table.py > crates/core/data/tw_gue_cdf.csv
"""
import numpy as np
from scipy.special import airy

LO, HI, STEP = -8.0, 6.0, 0.01
NODES = 96
SPAN = 18.0


def airy_kernel(x, y):
    ai_x, aip_x, _, _ = airy(x)
    ai_y, aip_y, _, _ = airy(y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    AX, AY = np.meshgrid(ai_x, ai_y, indexing="ij")
    PX, PY = np.meshgrid(aip_x, aip_y, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (AX * PY - PX * AY) / (X - Y)
    diag = aip_x ** 2 - x * ai_x ** 2
    k[np.diag_indices_from(k)] = diag
    return k


def f2(s):
    t, w = np.polynomial.legendre.leggauss(NODES)
    x = s + (t + 1.0) * SPAN / 2.0
    w = w * SPAN / 2.0
    sw = np.sqrt(w)
    k = airy_kernel(x, x)
    return float(np.linalg.det(np.eye(NODES) - sw[:, None] * k * sw[None, :]))


def main():
    grid = np.round(np.arange(LO, HI + STEP / 2, STEP), 10)
    print("# Tracy-Widom GUE distribution function F2(s) = det(I - K_Airy)|L2(s,inf)")
    print(f"# Gauss-Legendre Nystrom discretisation, {NODES} nodes on [s, s+{SPAN}]")
    print("s,cdf")
    for s in grid:
        v = min(max(f2(s), 0.0), 1.0)
        print(f"{s:.2f},{v:.12e}")


if __name__ == "__main__":
    main()
