"""Brute-force reference implementations, written loop-by-loop and sharing no
code with the package. Indices follow the package: ``a[j, i]`` with ``i``
the column and ``j`` the row.
"""
import math

import numpy as np


def clamp(v, lo, hi):
    return min(max(v, lo), hi)


def ghost(a, i, j):
    n_rows, n_cols = a.shape
    return a[clamp(j, 0, n_rows - 1), clamp(i, 0, n_cols - 1)]


def flux_stencil(I, g, h=1.0):
    """Literal arithmetic-mean stencil, one pixel at a time."""
    n_rows, n_cols = I.shape
    out = np.zeros_like(I, dtype=float)
    for j in range(n_rows):
        for i in range(n_cols):
            gc = g[j, i]
            gE, gW = ghost(g, i + 1, j), ghost(g, i - 1, j)
            gN, gS = ghost(g, i, j + 1), ghost(g, i, j - 1)
            x = ((gc + gE) * ghost(I, i + 1, j) + (gc + gW) * ghost(I, i - 1, j)
                 - (gE + 2 * gc + gW) * I[j, i])
            y = ((gc + gN) * ghost(I, i, j + 1) + (gc + gS) * ghost(I, i, j - 1)
                 - (gN + 2 * gc + gS) * I[j, i])
            out[j, i] = 0.5 / h**2 * (x + y)
    return out


def laplacian5(I, h=1.0):
    n_rows, n_cols = I.shape
    out = np.zeros_like(I, dtype=float)
    for j in range(n_rows):
        for i in range(n_cols):
            out[j, i] = (ghost(I, i + 1, j) + ghost(I, i - 1, j) + ghost(I, i, j + 1)
                         + ghost(I, i, j - 1) - 4 * I[j, i]) / h**2
    return out


def gaussian_2d_direct(I, xi):
    """Direct (non-separable) 2D convolution with a truncated, renormalized Gaussian."""
    r = math.ceil(3 * xi)
    w = {}
    for dj in range(-r, r + 1):
        for di in range(-r, r + 1):
            w[di, dj] = math.exp(-(di * di + dj * dj) / (2 * xi * xi))
    total = sum(w.values())
    n_rows, n_cols = I.shape
    out = np.zeros_like(I, dtype=float)
    for j in range(n_rows):
        for i in range(n_cols):
            s = 0.0
            for (di, dj), wk in w.items():
                s += wk * I[clamp(j + dj, 0, n_rows - 1), clamp(i + di, 0, n_cols - 1)]
            out[j, i] = s / total
    return out


def psnr(ref, test):
    n_rows, n_cols = ref.shape
    acc = 0.0
    for j in range(n_rows):
        for i in range(n_cols):
            acc += (ref[j, i] - test[j, i]) ** 2
    mse = acc / (n_rows * n_cols)
    peak = max(max(row) for row in ref.tolist())
    return 10 * math.log10(peak**2 / mse)


def ssim_mean(x, y, win, sigma=1.5, data_range=None):
    if data_range is None:
        data_range = max(max(row) for row in x.tolist())
    r = win // 2
    w = [[math.exp(-((a - r) ** 2 + (b - r) ** 2) / (2 * sigma**2)) for b in range(win)]
         for a in range(win)]
    tot = sum(sum(row) for row in w)
    c1, c2 = (0.01 * data_range) ** 2, (0.03 * data_range) ** 2
    vals = []
    n_rows, n_cols = x.shape
    for j0 in range(n_rows - win + 1):
        for i0 in range(n_cols - win + 1):
            mx = my = 0.0
            for a in range(win):
                for b in range(win):
                    mx += w[a][b] * x[j0 + a, i0 + b] / tot
                    my += w[a][b] * y[j0 + a, i0 + b] / tot
            vx = vy = cxy = 0.0
            for a in range(win):
                for b in range(win):
                    dx = x[j0 + a, i0 + b] - mx
                    dy = y[j0 + a, i0 + b] - my
                    vx += w[a][b] * dx * dx / tot
                    vy += w[a][b] * dy * dy / tot
                    cxy += w[a][b] * dx * dy / tot
            vals.append((2 * mx * my + c1) * (2 * cxy + c2)
                        / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return sum(vals) / len(vals)


def mean_var(values):
    values = list(values)
    m = sum(values) / len(values)
    return m, sum((v - m) ** 2 for v in values) / len(values)


def mor_vor(noisy, restored):
    return mean_var(noisy[j, i] / restored[j, i]
                    for j in range(noisy.shape[0]) for i in range(noisy.shape[1]))


def despeckling_gain(clean, noisy, restored):
    e_n = sum((clean[j, i] - noisy[j, i]) ** 2 for j in range(clean.shape[0]) for i in range(clean.shape[1]))
    e_r = sum((clean[j, i] - restored[j, i]) ** 2 for j in range(clean.shape[0]) for i in range(clean.shape[1]))
    return 10 * math.log10(e_n / e_r)


def enl(values):
    m, v = mean_var(values)
    return m * m / v


def speckle_index(I, window=3):
    r = window // 2
    n_rows, n_cols = I.shape
    total = 0.0
    for j in range(n_rows):
        for i in range(n_cols):
            vals = [ghost(I, i + di, j + dj) for dj in range(-r, r + 1) for di in range(-r, r + 1)]
            m, v = mean_var(vals)
            total += math.sqrt(v) / m
    return total / (n_rows * n_cols)


def fom(ref, test, a=1 / 9):
    ref_pts = [(j, i) for j in range(ref.shape[0]) for i in range(ref.shape[1]) if ref[j, i]]
    test_pts = [(j, i) for j in range(test.shape[0]) for i in range(test.shape[1]) if test[j, i]]
    s = 0.0
    for (j, i) in test_pts:
        d2 = min((j - q) ** 2 + (i - p) ** 2 for (q, p) in ref_pts)
        s += 1 / (1 + a * d2)
    return s / max(len(ref_pts), len(test_pts))
