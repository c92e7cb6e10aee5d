#!/usr/bin/env python3
"""Generate classical modular polynomials Phi_l(X, J) from q-expansions of j.

Output format (one block per l):
    ell <l>
    i j c        # c * X^i * J^j, only i >= j is needed but both halves are written
Usage: gen_modpoly.py 3 5 7 11 13 > modular_polynomials.txt
"""
import sys
from fractions import Fraction


def sigma3(n):
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def series_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for k, y in enumerate(b[: n - i]):
            out[i + k] += x * y
    return out


def j_coefficients(n):
    """Coefficients c_{-1}, c_0, ..., c_{n-2} of j(q) = q^-1 + 744 + ..."""
    e4 = [1] + [240 * sigma3(k) for k in range(1, n + 1)]
    e4_3 = series_mul(series_mul(e4, e4, n + 1), e4, n + 1)
    # Delta / q = prod (1 - q^k)^24
    eta = [1] + [0] * n
    for k in range(1, n + 1):
        for _ in range(24):
            for i in range(n, k - 1, -1):
                eta[i] -= eta[i - k]
    # invert eta
    inv = [0] * (n + 1)
    inv[0] = 1
    for i in range(1, n + 1):
        inv[i] = -sum(eta[k] * inv[i - k] for k in range(1, i + 1))
    return series_mul(e4_3, inv, n)  # index i -> coefficient of q^(i-1)


class Laurent:
    """Truncated Laurent series: val is the exponent of coeffs[0]."""

    def __init__(self, val, coeffs):
        self.val, self.coeffs = val, coeffs

    def mul(self, other, prec):
        n = prec - (self.val + other.val)
        return Laurent(self.val + other.val, series_mul(self.coeffs, other.coeffs, max(n, 0)))


def modular_polynomial(l):
    deg = l + 1
    prec = 4          # positive q-precision kept for the final check
    top = deg + (l + 2) * deg  # slack: products of series with poles down to q^(-l*deg)
    n_terms = l * (top + prec + 2) + 2
    jc = j_coefficients(n_terms)
    j = Laurent(-1, jc)
    # powers of j(q) truncated at q^(top*l + prec*l)
    hi = l * (top + prec + 1)
    jp = [Laurent(0, [1] + [0] * (hi))]
    for m in range(1, deg + 1):
        jp.append(jp[-1].mul(j, hi))

    def coeff(s, e):
        i = e - s.val
        return s.coeffs[i] if 0 <= i < len(s.coeffs) else 0

    # power sums s_m as Laurent series in q, exponents from -l*m to top+prec
    lo_e, hi_e = -l * deg, top + prec
    width = hi_e - lo_e + 1
    power_sums = []
    for m in range(1, deg + 1):
        s = [0] * width
        for e in range(lo_e, hi_e + 1):
            acc = 0
            # sum over the l conjugates of j(q^(1/l))^m: exponent e*l terms, times l
            acc += l * coeff(jp[m], e * l)
            # j(q^l)^m: exponent e must be divisible by l
            if e % l == 0:
                acc += coeff(jp[m], e // l)
            s[e - lo_e] = acc
        power_sums.append(s)
    # Newton identities -> elementary symmetric functions (as series)
    elem = [[0] * width for _ in range(deg + 1)]
    elem[0][-lo_e] = 1

    def smul(a, b):
        out = [0] * width
        for i, x in enumerate(a):
            if x == 0:
                continue
            for k, y in enumerate(b):
                if y == 0:
                    continue
                e = (i + lo_e) + (k + lo_e)
                if lo_e <= e <= hi_e:
                    out[e - lo_e] += x * y
        return out

    for k in range(1, deg + 1):
        acc = [0] * width
        for i in range(1, k + 1):
            term = smul(elem[k - i], power_sums[i - 1])
            sign = 1 if (i - 1) % 2 == 0 else -1
            for t in range(width):
                acc[t] += sign * term[t]
        assert all(x % k == 0 for x in acc[: deg + prec - lo_e])
        elem[k] = [x // k for x in acc]
    # express each e_k as polynomial in j
    jser = []
    for m in range(deg + 1):
        s = [0] * width
        for e in range(lo_e, hi_e + 1):
            s[e - lo_e] = coeff(jp[m], e)
        jser.append(s)
    result = {}
    for k in range(deg + 1):
        rem = list(elem[k])
        poly = {}
        for d in range(deg, -1, -1):
            c = rem[-d - lo_e]
            if c:
                poly[d] = c
                for t in range(width):
                    rem[t] -= c * jser[d][t]
        assert all(x == 0 for x in rem[: deg + prec - lo_e]), (l, k)
        # Phi = sum_k (-1)^k e_k X^(deg-k)
        sign = -1 if k % 2 else 1
        for d, c in poly.items():
            result[(deg - k, d)] = sign * c
    return result


def main():
    ells = [int(a) for a in sys.argv[1:]] or [3, 5, 7, 11, 13]
    print("# Classical modular polynomials Phi_l(X, J), generated by tools/gen_modpoly.py")
    print("# Each monomial line is: i j c  meaning  c * X^i * J^j")
    for l in ells:
        phi = modular_polynomial(l)
        for (i, d), c in phi.items():
            assert phi.get((d, i)) == c, "not symmetric"
        print(f"ell {l}")
        for (i, d) in sorted(phi):
            print(f"{i} {d} {phi[(i, d)]}")


if __name__ == "__main__":
    main()
