"""Generate genus-2 theta fixtures with high-precision oracle values.

Usage: python gen_theta_fixtures.py [outdir]
"""
import random
import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
BOX = 12
MIN_DIST = 0.2
ALPHA = [mp.mpf(1) / 2, mp.mpf(1) / 2]
BETA = [mp.mpf(1) / 2, mp.mpf(0)]


def theta(omega, z, alpha=ALPHA, beta=BETA):
    """Value and gradient of theta[alpha, beta] at z by direct box summation."""
    g = len(z)
    val = mp.mpc(0)
    grad = [mp.mpc(0)] * g
    rng = range(-BOX, BOX + 1)
    for n0 in rng:
        for n1 in rng:
            v = [n0 + alpha[0], n1 + alpha[1]]
            quad = sum(omega[i][j] * v[i] * v[j] for i in range(g) for j in range(g))
            lin = sum((z[i] + beta[i]) * v[i] for i in range(g))
            t = mp.exp(mp.pi * 1j * quad + 2 * mp.pi * 1j * lin)
            val += t
            for i in range(g):
                grad[i] += 2 * mp.pi * 1j * v[i] * t
    return val, grad


def divisor_distance(omega, u):
    """Newton estimate |theta| / |grad theta| of the distance to the divisor."""
    val, grad = theta(omega, u)
    return abs(val) / mp.sqrt(sum(abs(g) ** 2 for g in grad))


def cfmt(c):
    c = mp.mpc(c)
    return f"{mp.nstr(c.real, 20, min_fixed=-1, max_fixed=0)} {mp.nstr(c.imag, 20, min_fixed=-1, max_fixed=0)}"


def vfmt(v):
    return " ".join(cfmt(c) for c in v)


def write(path, title, omega, seed):
    rnd = random.Random(seed)

    def rc(scale_re, scale_im):
        return mp.mpc(rnd.uniform(-scale_re, scale_re), rnd.uniform(-scale_im, scale_im))

    h = [mp.mpc(1, 0), mp.mpc(mp.mpf("0.5"), mp.mpf("0.25"))]
    s = [x * mp.mpf("0.01") for x in h]
    # pairwise differences are kept away from the theta divisor
    while True:
        points = {k: [rc(0.6, 0.1), rc(0.6, 0.1)] for k in ("z", "w", "P")}
        pairs = [("z", "w"), ("z", "P"), ("w", "P")]
        if all(divisor_distance(omega, [a - b for a, b in zip(points[x], points[y])]) >= MIN_DIST for x, y in pairs):
            break
    zero = [mp.mpc(0), mp.mpc(0)]
    _, grad = theta(omega, zero)
    lines = [f"# {title}", "genus 2"]
    lines.append("omega " + vfmt([omega[i][j] for i in range(2) for j in range(2)]))
    lines.append("alpha 0.5 0.5")
    lines.append("beta 0.5 0")
    lines.append("h " + vfmt(h))
    lines.append("e " + vfmt(zero))
    lines.append("s " + vfmt(s))
    for k, p in points.items():
        lines.append(f"point {k} " + vfmt(p))
    lines.append("direction V " + vfmt([mp.mpc(1, 0), mp.mpc(mp.mpf("0.3"), mp.mpf("-0.2"))]))
    lines.append("direction T " + vfmt([grad[1], -grad[0]]))
    lines.append("gradient " + vfmt(grad))
    oracles = {"origin": zero}
    oracles.update(points)
    for i in range(4):
        oracles[f"r{i}"] = [rc(0.5, 0.3), rc(0.5, 0.3)]
    for k, p in oracles.items():
        val, _ = theta(omega, p)
        lines.append(f"oracle {k} {vfmt(p)} {cfmt(val)}")
    Path(path).write_text("\n".join(lines) + "\n")


def tabulated():
    r2 = mp.sqrt(2)
    d = (-1 + 2 * r2 * 1j) / 3
    o = (2 - r2 * 1j) / 3
    return [[d, o], [o, d]]


def random_omega(seed):
    rnd = random.Random(seed)
    a = [[rnd.uniform(-0.6, 0.6) for _ in range(2)] for _ in range(2)]
    y = [[sum(a[i][k] * a[j][k] for k in range(2)) + (0.6 if i == j else 0.0) for j in range(2)] for i in range(2)]
    x = [[0.0, 0.0], [0.0, 0.0]]
    for i in range(2):
        for j in range(i, 2):
            x[i][j] = x[j][i] = rnd.uniform(-0.5, 0.5)
    return [[mp.mpc(x[i][j], y[i][j]) for j in range(2)] for i in range(2)]


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures")
    out.mkdir(parents=True, exist_ok=True)
    write(out / "g2.fx", "genus 2, tabulated period matrix, odd characteristic", tabulated(), 11)
    write(out / "g2_random.fx", "genus 2, random period matrix (seed 20240607), odd characteristic", random_omega(20240607), 23)


if __name__ == "__main__":
    main()
