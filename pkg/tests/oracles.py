"""Slow, loop-based reference implementations used only by the tests."""
import bisect
import math


def interp(x, xs, ys):
    """Piecewise-linear interpolation, clamped to the end values."""
    if x <= xs[0]:
        return ys[0]
    if x >= xs[-1]:
        return ys[-1]
    i = bisect.bisect_right(xs, x) - 1
    if xs[i] == x:
        return ys[i]
    w = (x - xs[i]) / (xs[i + 1] - xs[i])
    return ys[i] + w * (ys[i + 1] - ys[i])


def grid(ta, tb, rate):
    out = []
    k = 0
    while True:
        g = ta + k / rate
        if g > tb + 1e-9 / rate:
            return out
        out.append(g)
        k += 1


def cc(a, b):
    num = math.fsum(x * y for x, y in zip(a, b))
    return num / (math.sqrt(math.fsum(x * x for x in a)) * math.sqrt(math.fsum(y * y for y in b)))


def rmse(a, b):
    return math.sqrt(math.fsum((x - y) ** 2 for x, y in zip(a, b)) / len(a))


def tcr(est_t, est_h, ref_t, ref_h, duration, t0=0.5, tth=50.0):
    n_seg = int(math.floor(duration / t0 + 1e-9))
    covered = 0
    for n in range(n_seg):
        lo, hi = n * t0, (n + 1) * t0
        for t, h in zip(est_t, est_h):
            if lo <= t < hi and abs(h - interp(t, ref_t, ref_h)) <= tth:
                covered += 1
                break
    return 100.0 * covered / n_seg


def report(est_t, est_h, ref_t, ref_h, duration, rate=10.0):
    est_t, est_h, ref_t, ref_h = map(list, (est_t, est_h, ref_t, ref_h))
    ta, tb = max(est_t[0], ref_t[0]), min(est_t[-1], ref_t[-1])
    g = grid(ta, tb, rate)
    h = [interp(x, est_t, est_h) for x in g]
    h0 = [interp(x, ref_t, ref_h) for x in g]
    return cc(h, h0), rmse(h, h0), tcr(est_t, est_h, ref_t, ref_h, duration)
