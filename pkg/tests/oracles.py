"""Slow, independent reference implementations used only by the tests.

Everything here works on Python ints as bitmasks (bit j = coordinate j) and
shares no code with the package.
"""

from itertools import combinations


def rows_as_ints(dense):
    return [sum(int(b) << j for j, b in enumerate(row)) for row in dense]


def rank_ints(rows):
    """Rank by repeated elimination on the highest set bit."""
    basis = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def span_ints(vectors):
    out = {0}
    for v in vectors:
        out |= {s ^ v for s in out}
    return out


def columns_as_ints(dense):
    dense = [list(r) for r in dense]
    if not dense:
        return []
    return [sum(int(dense[i][j]) << i for i in range(len(dense))) for j in range(len(dense[0]))]


# GF(2)[x] and F_{2^q}

def clmul(a, b):
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def clmod(a, m):
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def gf_mul(a, b, modulus):
    return clmod(clmul(a, b), modulus)


def has_factor_of_degree_at_most(p, k):
    """Trial division by every polynomial of degree 1..k over GF(2)."""
    for deg in range(1, k + 1):
        for low in range(1 << deg):
            d = (1 << deg) | low
            if clmod(p, d) == 0 and d != p:
                return True
    return False


# polynomials over F_Q as lists, X^0 first

def fq_poly_mul(f, g, modulus):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] ^= gf_mul(a, b, modulus)
    return out


def fq_poly_divmod(f, g, modulus, q):
    """Long division; g must be monic."""
    f = list(f)
    assert g[-1] == 1
    dg = len(g) - 1
    quot = [0] * max(len(f) - dg, 1)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i]
        if c:
            quot[i - dg] = c
            for j, b in enumerate(g):
                f[i - dg + j] ^= gf_mul(c, b, modulus)
    return quot, (f[:dg] + [0] * dg)[:dg]


def fq_eval_terms(f, y, modulus):
    """Sum of c_i·y^i with every power computed from scratch."""
    total = 0
    for i, c in enumerate(f):
        p = 1
        for _ in range(i):
            p = gf_mul(p, y, modulus)
        total ^= gf_mul(c, p, modulus)
    return total


# Reed-Muller from first principles

def rm_codewords_basis(m, r):
    """Evaluation vectors of all monomials of degree <= r, as ints over points."""
    out = []
    for deg in range(r + 1):
        for S in combinations(range(m), deg):
            word = 0
            for x in range(1 << m):
                if all(x >> i & 1 for i in S):
                    word |= 1 << x
            out.append(word)
    return out


def binom_sum(n, lo, hi):
    from math import comb
    return sum(comb(n, i) for i in range(lo, hi + 1))


def gf_inv_brute(a, modulus, Q):
    return next(b for b in range(1, Q) if gf_mul(a, b, modulus) == 1)


def fq_trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def fq_poly_gcd(f, g, modulus, q):
    """Monic gcd by the Euclidean algorithm with brute-force inverses."""
    Q = 1 << q
    f, g = fq_trim(f), fq_trim(g)
    while g:
        inv = gf_inv_brute(g[-1], modulus, Q)
        g = [gf_mul(c, inv, modulus) for c in g]
        if len(f) < len(g):
            f, g = g, f
            continue
        _, r = fq_poly_divmod(f, g, modulus, q)
        f, g = g, fq_trim(r)
    inv = gf_inv_brute(f[-1], modulus, Q)
    return [gf_mul(c, inv, modulus) for c in f]


def fq_power_mod(f, e, E, modulus, q):
    """f^e mod E by e - 1 plain multiplications."""
    out = [1]
    for _ in range(e):
        out = fq_poly_divmod(fq_poly_mul(out, f, modulus), E, modulus, q)[1]
    return out


# GUV parameter sets (q, pvDeg, pvLen, t) exercised across the suite
GUV_TEST_MATRIX = [
    (2, 2, 1, 1),
    (2, 2, 2, 1),
    (2, 1, 1, 1),
    (3, 1, 2, 1),
    (3, 2, 1, 2),
    (3, 2, 2, 1),
    (4, 2, 1, 1),
]


def erf_series(x, terms=80):
    """Maclaurin series of erf; plenty of terms for |x| <= 3."""
    import math
    total = 0.0
    for n in range(terms):
        total += (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
    return 2 / math.sqrt(math.pi) * total


def phi_series(a):
    import math
    return 0.5 * (1 + erf_series(a / math.sqrt(2)))
