"""Independent brute-force reference implementations used by the tests.

Nothing here imports the package's feature code; DDQC intervals are decided
in exact rational arithmetic (bounds of the form a + b*sqrt(V)).
"""
from collections import Counter
from fractions import Fraction
from itertools import combinations


def degrees_from_edges(n, edges):
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def pmf_from_degrees(degrees):
    n = len(degrees)
    return {d: c / n for d, c in sorted(Counter(degrees).items())}


def all_graphs(n):
    """Every labeled simple graph on n nodes, as edge lists."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if mask >> i & 1]


def is_connected(n, edges):
    if n == 0:
        return False
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def _ge(x, b, v):
    """Exact test x >= b * sqrt(v) for rationals x, b and integer v >= 0."""
    if b == 0 or v == 0:
        return x >= 0
    if b > 0:
        return x >= 0 and x * x >= b * b * v
    return x >= 0 or x * x <= b * b * v


def _le(x, b, v):
    return _ge(-x, -b, v)


class _Bound:
    # value a + b*sqrt(v)
    def __init__(self, a, b, v):
        self.a, self.b, self.v = Fraction(a), Fraction(b), v

    def le_int(self, d):  # bound <= d
        return _ge(Fraction(d) - self.a, self.b, self.v)

    def gt_int(self, d):  # bound > d
        return not self.le_int(d)

    def ge_int(self, d):  # bound >= d
        return _le(Fraction(d) - self.a, self.b, self.v)

    def lt(self, other):
        return not _ge(self.a - other.a, other.b - self.b, self.v)

    def mid(self, other):
        return _Bound((self.a + other.a) / 2, (self.b + other.b) / 2, self.v)


def ddqc_features(degrees):
    n = len(degrees)
    s = sum(degrees)
    v = n * sum(d * d for d in degrees) - s * s
    mu = Fraction(s, n)
    lo, hi = min(degrees), max(degrees)
    pts = [
        _Bound(lo, 0, v),
        _Bound(mu, Fraction(-1, n), v),
        _Bound(mu, 0, v),
        _Bound(mu, Fraction(1, n), v),
        _Bound(hi, 0, v),
    ]
    intervals = []
    for r in range(4):
        left, right = pts[r], pts[r + 1]
        mid = left.mid(right) if left.lt(right) else left
        intervals += [(left, mid), (mid, right)]
    counts = [0] * 8
    for d in degrees:
        for i, (left, right) in enumerate(intervals):
            if not left.le_int(d):
                continue
            if (i == 7 and right.ge_int(d)) or (i < 7 and right.gt_int(d)):
                counts[i] += 1
                break
    return [c / n for c in counts]


def ks(degrees_a, degrees_b):
    top = max(max(degrees_a), max(degrees_b))
    best = 0.0
    for d in range(top + 1):
        fa = sum(1 for x in degrees_a if x <= d) / len(degrees_a)
        fb = sum(1 for x in degrees_b if x <= d) / len(degrees_b)
        best = max(best, abs(fa - fb))
    return best


def l1(a, b):
    return sum(abs(x - y) for x, y in zip(a, b))


def knn_accuracy(dist, labels, k):
    n = len(labels)
    correct = 0
    for i in range(n):
        others = sorted((dist[i][j], j) for j in range(n) if j != i)[:k]
        votes = {}
        for dd, j in others:
            c, s = votes.get(labels[j], (0, 0.0))
            votes[labels[j]] = (c + 1, s + dd)
        best = sorted(votes.items(), key=lambda kv: (-kv[1][0], kv[1][1], kv[0]))[0][0]
        correct += best == labels[i]
    return correct / n


def precision_at_k(dist, labels, k):
    n = len(labels)
    total = 0.0
    for i in range(n):
        others = sorted((dist[i][j], j) for j in range(n) if j != i)[:k]
        total += sum(labels[j] == labels[i] for _, j in others) / k
    return total / n


def dunn(dist, labels):
    classes = sorted(set(labels))
    groups = {c: [i for i, x in enumerate(labels) if x == c] for c in classes}
    spread = 0.0
    for c in classes:
        m = groups[c]
        tot = sum(dist[x][y] for x in m for y in m if x != y)
        spread = max(spread, tot / (len(m) * (len(m) - 1)))
    sep = min(
        sum(dist[x][y] for x in groups[a] for y in groups[b]) / (len(groups[a]) * len(groups[b]))
        for a, b in combinations(classes, 2)
    )
    return sep / spread
