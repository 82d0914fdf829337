"""Brute-force ground truth by enumerating every element of a module.

Nothing here touches lattices or normal forms: elements are rows of an
integer array, maps are applied element by element, and subgroups are
sets of encoded elements.  Every quantity is computed straight from its
definition so that it can be compared against the lattice path.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .errors import CapExceeded
from .gmodule import GModule
from .groups import enumerate_characters, enumerate_subgroups, find_generator_character

DEFAULT_ORACLE_CAP = 4096


class Enumeration:
    """All elements of ``(+) Z/d_i`` as an ``(|M|, k)`` array."""

    def __init__(self, M: GModule, cap: int = DEFAULT_ORACLE_CAP):
        if M.order > cap:
            raise CapExceeded(f"|M| = {M.order} exceeds the oracle cap {cap}")
        self.M = M
        self.d = np.array(M.diag, dtype=np.int64)
        k = M.k
        if k:
            self.elements = np.array(list(product(*(range(x) for x in M.diag))), dtype=np.int64)
        else:
            self.elements = np.zeros((1, 0), dtype=np.int64)
        w = [1] * k
        for i in range(k - 2, -1, -1):
            w[i] = w[i + 1] * M.diag[i + 1]
        self.weights = np.array(w, dtype=np.int64)
        self._T = [np.array(t, dtype=np.int64) for t in M.gens]
        self._Z = np.array(M.zeta, dtype=np.int64)

    def _apply(self, a: np.ndarray, X: np.ndarray) -> np.ndarray:
        if X.shape[1] == 0:
            return X.copy()
        return (X @ a.T) % self.d

    def encode(self, X: np.ndarray) -> np.ndarray:
        if X.shape[1] == 0:
            return np.zeros(len(X), dtype=np.int64)
        return X @ self.weights

    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.zeros((len(codes), self.M.k), dtype=np.int64)
        for i, (w, m) in enumerate(zip(self.weights, self.d)):
            out[:, i] = (codes // w) % m
        return out

    def group_act(self, g, X):
        for t, x in zip(self._T, g):
            for _ in range(x):
                X = self._apply(t, X)
        return X

    def zeta_act(self, k: int, X):
        for _ in range(k % self.M.e):
            X = self._apply(self._Z, X)
        return X

    def image_set(self, Y) -> np.ndarray:
        return np.unique(self.encode(Y))

    def where(self, mask) -> np.ndarray:
        return np.unique(self.encode(self.elements[mask]))

    def same(self, X, Y) -> np.ndarray:
        return np.all(X == Y, axis=1)

    def subgroup_generated(self, candidates: np.ndarray) -> np.ndarray:
        """Subgroup generated by a set of encoded elements."""
        S = np.zeros(1, dtype=np.int64)
        cand = np.unique(candidates)
        while True:
            rest = np.setdiff1d(cand, S, assume_unique=True)
            if len(rest) == 0:
                return S
            c = self.decode(rest[:1])[0]
            base = self.decode(S)
            cosets = [S]
            step = c.copy()
            while True:
                code = self.encode(step[None, :])[0]
                if np.isin(code, S):
                    break
                cosets.append(self.encode((base + step) % self.d))
                step = (step + c) % self.d
            S = np.unique(np.concatenate(cosets))


def oracle(M: GModule, cap: int = DEFAULT_ORACLE_CAP, subgroup_cap: int = 512) -> dict[str, int]:
    """Orders of every subgroup the lattice path computes, by enumeration.

    Keys: ``M``; per character ``a``: ``isotypic[a]``, ``eps_image[a]``,
    ``h0chi[a]``; for cyclic ``G`` and each ``i``: ``S_num[i]``, ``S[i]``;
    per subgroup ``H``: ``fixed[H]``, ``norm_image[H]``, ``norm_kernel[H]``,
    ``augmentation[H]``.
    """
    E = Enumeration(M, cap)
    G = M.group
    X = E.elements
    out: dict[str, int] = {"M": len(X)}
    zero = np.zeros(M.k, dtype=np.int64)
    translates = {g: E.group_act(g, X) for g in G.elements()}

    if M.e % G.exponent == 0:
        for chi in enumerate_characters(G, M.e):
            key = _akey(chi.a)
            mask = np.ones(len(X), dtype=bool)
            for j, a in enumerate(chi.a):
                gj = G.generator(j)
                mask &= E.same(translates[gj], E.zeta_act(a, X))
            iso = E.where(mask)
            eps = np.zeros_like(X)
            for g, Y in translates.items():
                eps = (eps + E.zeta_act(-chi.exponent_at(g), Y)) % E.d
            eps_set = E.image_set(eps)
            out[f"isotypic[{key}]"] = len(iso)
            out[f"eps_image[{key}]"] = len(eps_set)
            out[f"h0chi[{key}]"] = len(iso) // len(eps_set)
        if G.is_cyclic and M.e % G.order == 0:
            n = G.order
            tau = (1,) * G.rank
            chi = find_generator_character(G, tau, M.e)
            step = M.e // n
            for i in range(n):
                psi = chi ** i
                Y = X
                for j in range(i + 1, n):
                    Y = (E.group_act(tau, Y) - E.zeta_act(j * step, Y)) % E.d
                mask = np.ones(len(X), dtype=bool)
                for j, a in enumerate(psi.a):
                    mask &= E.same(translates[G.generator(j)], E.zeta_act(a, X))
                num = np.intersect1d(E.where(mask), E.image_set(Y))
                eps = np.zeros_like(X)
                for g, Yg in translates.items():
                    eps = (eps + E.zeta_act(-psi.exponent_at(g), Yg)) % E.d
                den = E.image_set(eps)
                out[f"S_num[{i}]"] = len(num)
                out[f"S[{i}]"] = len(num) // len(den)

    for H in enumerate_subgroups(G, cap=subgroup_cap):
        key = H.label()
        mask = np.ones(len(X), dtype=bool)
        for h in H.elements:
            mask &= E.same(translates[h], X)
        norm = np.zeros_like(X)
        for h in H.elements:
            norm = (norm + translates[h]) % E.d
        kern = np.all(norm == zero, axis=1)
        diffs = np.concatenate([E.encode((translates[h] - X) % E.d) for h in H.elements])
        out[f"fixed[{key}]"] = int(mask.sum())
        out[f"norm_image[{key}]"] = len(E.image_set(norm))
        out[f"norm_kernel[{key}]"] = int(kern.sum())
        out[f"augmentation[{key}]"] = len(E.subgroup_generated(diffs))
    return out


def _akey(a) -> str:
    return ",".join(map(str, a))
