"""High-precision mean Landsberg curvature of the incomplete slab metric.

F = (sqrt(q^2 + |y|^2 w) - q) / w, q = s v - t u, w = 1 - s^2 - t^2, n = 3.
Everything is differentiated symbolically with sympy and evaluated with
mpmath at 50 digits. Writes slab_landsberg.json next to this file.
"""

import json
from pathlib import Path

import mpmath as mp
import sympy as sp

mp.mp.dps = 50

X = sp.symbols("x0:3", real=True)
Y = sp.symbols("y0:3", real=True)
s, t = X[0], X[1]
u, v = Y[0], Y[1]
q = s * v - t * u
w = 1 - s**2 - t**2
yy = sum(c**2 for c in Y)
F = (sp.sqrt(q**2 + yy * w) - q) / w
L = F**2

POINTS = [
    ([0.1, -0.2, 0.3], [1.0, 0.5, -0.25]),
    ([0.5, 0.3, -0.7], [0.2, -1.0, 0.4]),
    ([-0.4, 0.6, 0.0], [0.7, 0.7, 0.1]),
    ([0.0, 0.0, 0.5], [0.3, -0.4, 1.2]),
    ([-0.7, -0.3, 0.9], [-0.6, 0.2, 0.8]),
]


def main():
    n = 3
    g = sp.Matrix(n, n, lambda i, j: sp.diff(L, Y[i], Y[j]) / 2)
    dg_y = [[[sp.diff(g[i, j], Y[k]) for k in range(n)] for j in range(n)] for i in range(n)]
    dL_x = [sp.diff(L, X[l]) for l in range(n)]
    dL_xy = [[sp.diff(L, X[k], Y[l]) for l in range(n)] for k in range(n)]
    syms = list(X) + list(Y)
    f_g = sp.lambdify(syms, g, "mpmath")
    f_L = sp.lambdify(syms, L, "mpmath")
    f_dLx = sp.lambdify(syms, dL_x, "mpmath")
    f_dLxy = sp.lambdify(syms, dL_xy, "mpmath")

    def metric(xv, yv):
        return mp.matrix(f_g(*xv, *yv))

    def cartan(xv, yv):
        # I_i = 1/2 g^{jk} dg_jk/dy^i, with dg/dy by mp.diff on the lambdified g
        gi = metric(xv, yv) ** -1
        out = []
        for i in range(n):
            def gij(h, i=i):
                yh = list(yv)
                yh[i] += h
                return metric(xv, yh)
            dg = mp.matrix(n, n)
            for a in range(n):
                for b in range(n):
                    dg[a, b] = mp.diff(lambda h: gij(h)[a, b], 0)
            out.append(sum(gi[a, b] * dg[b, a] for a in range(n) for b in range(n)) / 2)
        return out

    def spray(xv, yv):
        gi = metric(xv, yv) ** -1
        dLx = f_dLx(*xv, *yv)
        dLxy = f_dLxy(*xv, *yv)
        rhs = [sum(dLxy[k][l] * yv[k] for k in range(n)) - dLx[l] for l in range(n)]
        return [sum(gi[i, l] * rhs[l] for l in range(n)) / 4 for i in range(n)]

    results = []
    for xf, yf in POINTS:
        xv = [mp.mpf(c) for c in xf]
        yv = [mp.mpf(c) for c in yf]
        I = cartan(xv, yv)
        G = spray(xv, yv)
        # N^m_i = dG^m/dy^i
        N = [[mp.diff(lambda h, m=m, i=i: spray(xv, [yv[k] + (h if k == i else 0) for k in range(n)])[m], 0)
              for i in range(n)] for m in range(n)]

        def I_shift(dx, dy):
            return cartan([xv[k] + dx[k] for k in range(n)], [yv[k] + dy[k] for k in range(n)])

        J = []
        for i in range(n):
            along_x = mp.diff(lambda h: I_shift([h * c for c in yv], [0] * n)[i], 0)
            along_g = mp.diff(lambda h: I_shift([0] * n, [h * c for c in G])[i], 0)
            J.append(along_x - 2 * along_g - sum(N[m][i] * I[m] for m in range(n)))
        gi = metric(xv, yv) ** -1
        norm = mp.sqrt(sum(J[a] * gi[a, b] * J[b] for a in range(n) for b in range(n)))
        results.append({
            "x": xf,
            "y": yf,
            "F": float(f_L(*xv, *yv) ** 0.5),
            "J": [float(c) for c in J],
            "J_norm": float(norm),
        })
        print(xf, yf, mp.nstr(norm, 20))

    threshold = 0.5 * min(r["J_norm"] for r in results)
    out = {"points": results, "threshold": threshold}
    Path(__file__).with_name("slab_landsberg.json").write_text(json.dumps(out, indent=2) + "\n")
    print("threshold", threshold)


if __name__ == "__main__":
    main()
