"""Independent brute-force counts used to check the library."""
from fractions import Fraction
from itertools import combinations


def plane_partition_counts(n_max):
    """Number of plane partitions of n for n = 0..n_max, by listing them row by row."""
    counts = [0] * (n_max + 1)

    def rows_below(prev, budget):
        # weakly decreasing rows bounded entrywise by prev
        def rec(i, acc, left):
            if acc:
                yield tuple(acc), left
            if i == len(prev):
                return
            cap = min(prev[i], acc[-1] if acc else prev[i], left)
            for x in range(1, cap + 1):
                yield from rec(i + 1, acc + [x], left - x)
        yield from rec(0, [], budget)

    def grow(prev, left):
        counts[n_max - left] += 1
        for row, rest in rows_below(prev, left):
            grow(row, rest)

    grow((n_max,) * n_max, n_max)
    return counts


def _lam(p):
    return (p[0], -p[1])


def _det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _inside(p, d):
    return p[0] >= 0 and p[1] >= 0 and p[0] + p[1] <= d


def _half(path, d, target, sign, memo):
    if path == target:
        return 1
    if path in memo:
        return memo[path]
    total = 0
    for j in range(1, len(path) - 1):
        a, b, c = path[j - 1], path[j], path[j + 1]
        turn = _det(_sub(b, a), _sub(c, b))
        if sign * turn > 0:
            area = abs(_det(_sub(b, a), _sub(c, a)))
            total = area * _half(path[:j] + path[j + 1:], d, target, sign, memo)
            flip = (a[0] + c[0] - b[0], a[1] + c[1] - b[1])
            if _inside(flip, d):
                total += _half(path[:j] + (flip,) + path[j + 1:], d, target, sign, memo)
            break
    memo[path] = total
    return total


def lattice_path_count(d, genus=0):
    """Weighted count of λ-increasing lattice paths in the degree-d triangle, with
    λ(x, y) = x - εy. Equals the number of possibly reducible plane curves of
    degree d and the given genus through 3d - 1 + genus generic points; for genus 0
    and d <= 3 no reducible curve contributes."""
    pts = sorted(((x, y) for x in range(d + 1) for y in range(d + 1 - x)), key=_lam)
    p, q = pts[0], pts[-1]
    n = 3 * d - 1 + genus
    # clockwise boundary runs along the hypotenuse, counterclockwise through the origin
    plus = tuple((i, d - i) for i in range(d + 1))
    minus = tuple([(0, d - i) for i in range(d)] + [(i, 0) for i in range(d + 1)])
    plus = tuple(sorted(set(plus), key=_lam))
    minus = tuple(sorted(set(minus), key=_lam))
    total, mp, mm = 0, {}, {}
    for mid in combinations(pts[1:-1], n - 1):
        path = (p,) + mid + (q,)
        total += _half(path, d, plus, 1, mp) * _half(path, d, minus, -1, mm)
    return total


def lines_through(points, directions=((1, 0), (0, 1), (-1, -1))):
    """Tropical lines through two points, by trying every pair of ends."""
    (x1, y1), (x2, y2) = points
    found = set()
    for i, a in enumerate(directions):
        for j, b in enumerate(directions):
            if i == j:
                continue
            # vertex v with p1 = v + s a and p2 = v + u b, s, u >= 0
            det = _det(a, b)
            r = (x2 - x1, y2 - y1)
            s = Fraction(-_det(r, b), det)
            u = Fraction(-_det(r, a), det)
            v = (x1 - s * a[0], y1 - s * a[1])
            if s >= 0 and u >= 0 and (v[0] + u * b[0], v[1] + u * b[1]) == (x2, y2):
                found.add(v)
    return found
