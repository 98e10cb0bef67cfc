"""Independent brute-force references.

Everything here builds dense matrices with Kronecker products and never
touches the package's tensor contractions or closed forms.
"""
import itertools

import numpy as np

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)


def site_projector(basis, sign):
    v = {("Z", 1): KET0, ("Z", -1): KET1, ("X", 1): PLUS, ("X", -1): MINUS}[(basis, sign)]
    return np.outer(v, v)


def product_projector(bases, signs):
    # site 0 is the least significant bit, so it goes last in the Kronecker chain
    out = np.array([[1.0]])
    for b, s in zip(reversed(bases), reversed(signs)):
        out = np.kron(out, site_projector(b, s))
    return out


def w_vector(n):
    psi = np.zeros(2**n)
    for i in range(n):
        psi[1 << i] = 1 / np.sqrt(n)
    return psi


def vacuum_vector(n):
    psi = np.zeros(2**n)
    psi[0] = 1.0
    return psi


def pure_probability(psi, bases, signs):
    return float(np.real(np.conj(psi) @ product_projector(bases, signs) @ psi))


def mixed_probability(rho, bases, signs):
    return float(np.real(np.trace(rho @ product_projector(bases, signs))))


def noisy_rho(n, kind, p):
    w = w_vector(n)
    if kind == "white_noise":
        sigma = np.eye(2**n) / 2**n
    else:
        v = vacuum_vector(n)
        sigma = np.outer(v, v)
    return p * np.outer(w, w) + (1 - p) * sigma


def omega_terms(n):
    """Term list written out directly from the inequality, as (sign, bases, signs)."""
    terms = []
    for k in range(n):
        terms.append((1, "Z" * n, tuple(-1 if i == k else 1 for i in range(n))))
    for i, j in itertools.combinations(range(n), 2):
        bases = "".join("X" if s in (i, j) else "Z" for s in range(n))
        for si, sj in ((1, -1), (-1, 1)):
            signs = [1] * n
            signs[i], signs[j] = si, sj
            terms.append((-1, bases, tuple(signs)))
    terms.append((-1, "X" * n, (1,) * n))
    terms.append((-1, "X" * n, (-1,) * n))
    return terms


def brute_lhv_max(n):
    """Max of the inequality over deterministic strategies via itertools.product."""
    terms = omega_terms(n)
    best = None
    for z in itertools.product((1, -1), repeat=n):
        for x in itertools.product((1, -1), repeat=n):
            val = 0
            for sign, bases, signs in terms:
                pre = [z[i] if b == "Z" else x[i] for i, b in enumerate(bases)]
                if tuple(pre) == signs:
                    val += sign
            best = val if best is None else max(best, val)
    return best
