"""Restricted formulas over finite metric structures and theory fingerprints.

Formulas are syntax trees over atomic relation applications, a lattice family
of connectives (max, min, truncated addition of rationals, rational scaling),
and sup/inf quantifiers tagged with a domain index.  On finite structures the
quantifiers evaluate as max/min over the domain, so every sentence has an
exact value; the canonically enumerated universal sentences give a theory
fingerprint that separates non-isomorphic structures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError
from .metric import FiniteStructure, Signature

#: Clipping bound for the truncated connectives.
CONNECTIVE_BOUND = 16.0


class Formula:
    def free_vars(self) -> tuple:
        raise NotImplementedError

    def key(self):
        """Canonical tuple used for deterministic enumeration order."""
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Formula):
    relation: str
    variables: tuple

    def free_vars(self):
        out = []
        for v in self.variables:
            if v not in out:
                out.append(v)
        return tuple(out)

    def key(self):
        return ("atom", self.relation, self.variables)


@dataclass(frozen=True)
class Max(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        out = list(self.left.free_vars())
        return tuple(out + [v for v in self.right.free_vars() if v not in out])

    def key(self):
        return ("max", self.left.key(), self.right.key())


@dataclass(frozen=True)
class Min(Formula):
    left: Formula
    right: Formula

    def free_vars(self):
        out = list(self.left.free_vars())
        return tuple(out + [v for v in self.right.free_vars() if v not in out])

    def key(self):
        return ("min", self.left.key(), self.right.key())


@dataclass(frozen=True)
class AddConst(Formula):
    """x -> clip(x + q, -bound, bound) for a rational q."""

    const: Fraction
    arg: Formula

    def free_vars(self):
        return self.arg.free_vars()

    def key(self):
        return ("add", str(self.const), self.arg.key())


@dataclass(frozen=True)
class Scale(Formula):
    """x -> clip(q x, -bound, bound) for a rational q."""

    const: Fraction
    arg: Formula

    def free_vars(self):
        return self.arg.free_vars()

    def key(self):
        return ("scale", str(self.const), self.arg.key())


@dataclass(frozen=True)
class Sup(Formula):
    variable: str
    domain: int
    body: Formula

    def free_vars(self):
        return tuple(v for v in self.body.free_vars() if v != self.variable)

    def key(self):
        return ("sup", self.variable, self.domain, self.body.key())


@dataclass(frozen=True)
class Inf(Formula):
    variable: str
    domain: int
    body: Formula

    def free_vars(self):
        return tuple(v for v in self.body.free_vars() if v != self.variable)

    def key(self):
        return ("inf", self.variable, self.domain, self.body.key())


def _clip(v: float) -> float:
    return float(np.clip(v, -CONNECTIVE_BOUND, CONNECTIVE_BOUND))


def eval_formula(phi: Formula, m: FiniteStructure, assignment: dict | None = None) -> float:
    """Compositional evaluation of a formula on a finite structure.

    Quantifiers range over the tagged domain; free variables must be covered
    by the assignment (variable name to point index).
    """
    env = dict(assignment or {})

    def ev(node: Formula, env: dict) -> float:
        if isinstance(node, Atom):
            idx = []
            for v in node.variables:
                if v not in env:
                    raise DimensionError(f"unbound variable {v!r}")
                idx.append(env[v])
            return float(m.table(node.relation)[tuple(idx)])
        if isinstance(node, Max):
            return max(ev(node.left, env), ev(node.right, env))
        if isinstance(node, Min):
            return min(ev(node.left, env), ev(node.right, env))
        if isinstance(node, AddConst):
            return _clip(ev(node.arg, env) + float(node.const))
        if isinstance(node, Scale):
            return _clip(float(node.const) * ev(node.arg, env))
        if isinstance(node, (Sup, Inf)):
            dom = m.domain(node.domain)
            agg = max if isinstance(node, Sup) else min
            return agg(ev(node.body, {**env, node.variable: i}) for i in dom)
        raise DimensionError(f"unknown formula node {type(node).__name__}")

    return ev(phi, env)


def _canonical_tuples(arity: int, max_vars: int):
    """Variable tuples in first-occurrence normal form (x1 appears before x2, ...)."""
    out = []
    for tup in itertools.product(range(1, min(arity, max_vars) + 1), repeat=arity):
        seen: list[int] = []
        ok = True
        for v in tup:
            if v not in seen:
                if v != len(seen) + 1:
                    ok = False
                    break
                seen.append(v)
        if ok:
            out.append(tuple(f"x{v}" for v in tup))
    return out


def _relation_names(signature: Signature | None, m: FiniteStructure | None) -> list:
    if signature is not None:
        names = {"d"} | {r.name for r in signature.relations}
        arities = {r.name: r.arity for r in signature.relations}
    elif m is not None:
        names = {"d"} | set(m.relations)
        arities = {k: t.ndim for k, t in m.relations.items()}
    else:
        names, arities = {"d"}, {}
    arities["d"] = 2
    return sorted((n, arities[n]) for n in names)


def enumerate_universal_terms(signature: Signature | None, depth: int,
                              m: FiniteStructure | None = None,
                              max_vars: int = 3) -> list:
    """Quantifier-free lattice terms up to the given syntactic size.

    Deterministic and nested: the size-d list is a prefix of the size-(d+1)
    list.  Atoms have size 1; each connective adds one.
    """
    if depth < 1:
        raise DimensionError("depth must be at least 1")
    names = _relation_names(signature, m)
    by_size: dict[int, list] = {}
    atoms = []
    for name, arity in names:
        for tup in _canonical_tuples(arity, max_vars):
            atoms.append(Atom(name, tup))
    atoms.sort(key=lambda a: a.key())
    by_size[1] = atoms
    for s in range(2, depth + 1):
        terms: list[Formula] = []
        for t in by_size[s - 1]:
            terms.append(AddConst(Fraction(1), t))
            terms.append(Scale(Fraction(1, 2), t))
        for ls in range(1, s - 1):
            rs = s - 1 - ls
            for a in by_size[ls]:
                for b in by_size[rs]:
                    if a.key() <= b.key():
                        terms.append(Max(a, b))
                        terms.append(Min(a, b))
        terms.sort(key=lambda t: t.key())
        by_size[s] = terms
    out = []
    for s in range(1, depth + 1):
        out.extend(by_size[s])
    return out


def close_universally(term: Formula, domain: int = 1) -> Formula:
    """Sup-quantify every free variable of a term (innermost-last order)."""
    phi = term
    for v in reversed(term.free_vars()):
        phi = Sup(v, domain, phi)
    return phi


def universal_fingerprint(m: FiniteStructure, depth: int = 3) -> np.ndarray:
    """Evaluations of the canonically enumerated restricted universal sentences.

    The enumeration is nested in ``depth``, so a depth-d fingerprint is a
    prefix of the depth-(d+1) one; isomorphic structures have identical
    fingerprints at every depth.
    """
    terms = enumerate_universal_terms(m.signature, depth, m)
    return np.array([eval_formula(close_universally(t), m) for t in terms])
