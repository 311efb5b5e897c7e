"""Syntactically co-safe LTL: parsing, finite-word semantics, DFA compilation.

Formulas are tagged tuples, which keeps them hashable and cheap to compare::

    ("true",)  ("false",)  ("ap", p)  ("not", p)
    ("and", f, g)  ("or", f, g)  ("X", f)  ("U", f, g)  ("F", f)
    ("F<=", k, f)  ("U<=", k, f, g)        # bounded sugar, see expand_bounded

The DFA built by :func:`compile_to_dfa` accepts exactly the finite words that
*strongly* satisfy the formula, i.e. every X/U/F obligation is discharged
inside the word.  For scLTL these words are extension closed, so acceptance
is absorbing.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian

TRUE = ("true",)
FALSE = ("false",)

DEFAULT_AP_CAP = 16


def Atom(p):
    return ("ap", p)


def NegAtom(p):
    return ("not", p)


def And(f, g):
    return ("and", f, g)


def Or(f, g):
    return ("or", f, g)


def Next(f):
    return ("X", f)


def Until(f, g):
    return ("U", f, g)


def Eventually(f):
    return ("F", f)


def BoundedEventually(k, f):
    return ("F<=", k, f)


def BoundedUntil(k, f, g):
    return ("U<=", k, f, g)


class FormulaSyntaxError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<bound>[FU]\s*<=\s*(?P<k>-?\d+))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[!&|()])
""", re.VERBOSE)

_KEYWORDS = {"X", "U", "F", "true", "false"}


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.group("ws"):
            pass
        elif m.group("bound"):
            k = int(m.group("k"))
            out.append(("bound", (m.group("bound")[0], k), pos))
        elif m.group("ident"):
            word = m.group("ident")
            out.append(("kw" if word in _KEYWORDS else "ident", word, pos))
        else:
            out.append(("op", m.group("op"), pos))
        pos = m.end()
    out.append(("eof", None, len(text)))
    return out


class _Parser:
    def __init__(self, text, aps):
        self.toks = _tokenize(text)
        self.i = 0
        self.aps = aps

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind, value):
        tok = self.take()
        if tok[0] != kind or tok[1] != value:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise FormulaSyntaxError(f"expected {value!r}, found {found}", tok[2])

    def parse(self):
        f = self.disjunction()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.until()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            f = And(f, self.until())
        return f

    def until(self):
        left = self.unary()
        tok = self.peek()
        if tok[:2] == ("kw", "U"):
            self.take()
            return Until(left, self.until())
        if tok[0] == "bound" and tok[1][0] == "U":
            self.take()
            k = tok[1][1]
            if k < 0:
                raise FormulaSyntaxError("bound must be non-negative", tok[2])
            return BoundedUntil(k, left, self.until())
        return left

    def unary(self):
        tok = self.peek()
        if tok[:2] == ("op", "!"):
            self.take()
            inner = self.unary()
            if inner[0] == "ap":
                return NegAtom(inner[1])
            if inner == TRUE:
                return FALSE
            if inner == FALSE:
                return TRUE
            raise FormulaSyntaxError(
                "negation only on atomic propositions", tok[2])
        if tok[:2] == ("kw", "X"):
            self.take()
            return Next(self.unary())
        if tok[:2] == ("kw", "F"):
            self.take()
            return Eventually(self.unary())
        if tok[0] == "bound" and tok[1][0] == "F":
            self.take()
            k = tok[1][1]
            if k < 0:
                raise FormulaSyntaxError("bound must be non-negative", tok[2])
            return BoundedEventually(k, self.unary())
        return self.primary()

    def primary(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "ident":
            if self.aps is not None and value not in self.aps:
                raise FormulaSyntaxError(f"unknown proposition {value}", pos)
            return Atom(value)
        if kind == "kw" and value in ("true", "false"):
            return TRUE if value == "true" else FALSE
        if (kind, value) == ("op", "("):
            f = self.disjunction()
            self.expect("op", ")")
            return f
        found = "end of input" if kind == "eof" else repr(value)
        raise FormulaSyntaxError(f"unexpected {found}", pos)


def parse_formula(text: str, ap_set=None):
    """Parse ``text`` into a formula tuple.

    Precedence, tightest first: ``!``, ``X``, ``F``, ``F<=k`` then ``U`` /
    ``U<=k`` (right associative) then ``&`` then ``|``.  When ``ap_set`` is
    given every atom must belong to it.
    """
    aps = None if ap_set is None else frozenset(ap_set)
    return _Parser(text, aps).parse()


def to_text(f) -> str:
    """Render a formula back into the concrete grammar (fully parenthesized)."""
    tag = f[0]
    if tag == "true" or tag == "false":
        return tag
    if tag == "ap":
        return f[1]
    if tag == "not":
        return f"!{f[1]}"
    if tag == "and":
        return f"({to_text(f[1])} & {to_text(f[2])})"
    if tag == "or":
        return f"({to_text(f[1])} | {to_text(f[2])})"
    if tag == "X":
        return f"X {_wrap(f[1])}"
    if tag == "F":
        return f"F {_wrap(f[1])}"
    if tag == "U":
        return f"({to_text(f[1])} U {to_text(f[2])})"
    if tag == "F<=":
        return f"F<={f[1]} {_wrap(f[2])}"
    if tag == "U<=":
        return f"({to_text(f[2])} U<={f[1]} {to_text(f[3])})"
    raise ValueError(f"not a formula: {f!r}")


def _wrap(f):
    s = to_text(f)
    return s if f[0] in ("ap", "not", "true", "false") or s.startswith("(") else f"({s})"


def atoms(f) -> set:
    tag = f[0]
    if tag in ("ap", "not"):
        return {f[1]}
    if tag in ("true", "false"):
        return set()
    if tag in ("F<=", "U<="):
        return set().union(*(atoms(g) for g in f[2:]))
    return set().union(*(atoms(g) for g in f[1:]))


def is_sugar_free(f) -> bool:
    tag = f[0]
    if tag in ("F<=", "U<="):
        return False
    if tag in ("ap", "not", "true", "false"):
        return True
    return all(is_sugar_free(g) for g in f[1:])


def expand_bounded(f):
    """Rewrite ``F<=k`` and ``U<=k`` into nested X, innermost first.

    ``F<=0 p`` is ``p``; ``F<=k p`` is ``p | X(F<=(k-1) p)``; ``p U<=k q`` is
    ``q | (p & X(p U<=(k-1) q))``.
    """
    tag = f[0]
    if tag in ("ap", "not", "true", "false"):
        return f
    if tag == "F<=":
        k, g = f[1], expand_bounded(f[2])
        if k < 0:
            raise ValueError("bound must be non-negative")
        out = g
        for _ in range(k):
            out = Or(g, Next(out))
        return out
    if tag == "U<=":
        k, g, h = f[1], expand_bounded(f[2]), expand_bounded(f[3])
        if k < 0:
            raise ValueError("bound must be non-negative")
        out = h
        for _ in range(k):
            out = Or(h, And(g, Next(out)))
        return out
    return (tag,) + tuple(expand_bounded(g) for g in f[1:])


# --------------------------------------------------------------------------
# finite-word semantics (independent of the automaton construction)

def holds_strong(word, f, i: int = 0) -> bool:
    """Strong satisfaction of ``f`` by ``word[i:]``.

    Atoms need a letter to exist and X needs a current letter.  The witness
    of U and F lies inside the word or at its very end; only formulas that
    need no letter (such as ``true``) hold at the end, which matches the
    unfolding ``F f = f | X F f``.  Bounded operators are evaluated directly,
    without expansion.
    """
    word = [frozenset(x) for x in word]
    n = len(word)

    @lru_cache(maxsize=None)
    def sat(g, j):
        tag = g[0]
        if tag == "true":
            return True
        if tag == "false":
            return False
        if tag == "ap":
            return j < n and g[1] in word[j]
        if tag == "not":
            return j < n and g[1] not in word[j]
        if tag == "and":
            return sat(g[1], j) and sat(g[2], j)
        if tag == "or":
            return sat(g[1], j) or sat(g[2], j)
        if tag == "X":
            return j < n and sat(g[1], j + 1)
        if tag == "F":
            return any(sat(g[1], t) for t in range(j, n + 1))
        if tag == "U":
            for t in range(j, n + 1):
                if sat(g[2], t):
                    return True
                if not sat(g[1], t):
                    return False
            return False
        if tag == "F<=":
            return any(sat(g[2], t) for t in range(j, min(n, j + g[1]) + 1))
        if tag == "U<=":
            for t in range(j, min(n, j + g[1]) + 1):
                if sat(g[3], t):
                    return True
                if not sat(g[2], t):
                    return False
            return False
        raise ValueError(f"not a formula: {g!r}")

    return sat(f, i)


# --------------------------------------------------------------------------
# derivatives over DNF residuals

# A residual is a frozenset of clauses; a clause is a frozenset of obligations
# (atoms, negated atoms, X/U/F nodes).  {} is false, {frozenset()} is true.
_DNF_FALSE = frozenset()
_DNF_TRUE = frozenset([frozenset()])


def _minimal(clauses):
    clauses = set(clauses)
    out = []
    for c in sorted(clauses, key=len):
        if any(d <= c for d in out):
            continue
        out.append(c)
    return frozenset(out)


def _consistent(clause):
    pos = {g[1] for g in clause if g[0] == "ap"}
    return not any(g[0] == "not" and g[1] in pos for g in clause)


def _dnf_or(a, b):
    return _minimal(a | b)


def _dnf_and(a, b):
    return _minimal(c | d for c in a for d in b if _consistent(c | d))


def dnf(f):
    tag = f[0]
    if tag == "true":
        return _DNF_TRUE
    if tag == "false":
        return _DNF_FALSE
    if tag == "and":
        return _dnf_and(dnf(f[1]), dnf(f[2]))
    if tag == "or":
        return _dnf_or(dnf(f[1]), dnf(f[2]))
    if tag in ("F<=", "U<="):
        return dnf(expand_bounded(f))
    # unfold once so that a witness needing no letter is visible right away
    if tag == "F":
        return _dnf_or(dnf(f[1]), frozenset([frozenset([f])]))
    if tag == "U":
        return _dnf_or(dnf(f[2]), _dnf_and(dnf(f[1]), frozenset([frozenset([f])])))
    return frozenset([frozenset([f])])


def _derive_obligation(g, letter):
    tag = g[0]
    if tag == "ap":
        return _DNF_TRUE if g[1] in letter else _DNF_FALSE
    if tag == "not":
        return _DNF_FALSE if g[1] in letter else _DNF_TRUE
    if tag == "X":
        return dnf(g[1])
    if tag == "F":
        return _dnf_or(derive(dnf(g[1]), letter), dnf(g))
    if tag == "U":
        keep = _dnf_and(derive(dnf(g[1]), letter), dnf(g))
        return _dnf_or(derive(dnf(g[2]), letter), keep)
    raise ValueError(f"unexpected obligation {g!r}")


def derive(residual, letter):
    """Residual left after reading ``letter`` (a frozenset of propositions)."""
    out = _DNF_FALSE
    for clause in residual:
        acc = _DNF_TRUE
        for g in sorted(clause):
            acc = _dnf_and(acc, _derive_obligation(g, letter))
            if not acc:
                break
        out = _dnf_or(out, acc)
    return out


# --------------------------------------------------------------------------
# automata

def alphabet(aps) -> tuple:
    """All subsets of ``aps`` as frozensets, in bitmask order."""
    aps = tuple(aps)
    return tuple(frozenset(p for j, p in enumerate(aps) if mask >> j & 1)
                 for mask in range(1 << len(aps)))


@dataclass(frozen=True)
class Dfa:
    """Complete DFA over ``2^aps``; ``delta[q][i]`` reads ``alphabet[i]``."""

    aps: tuple
    alphabet: tuple
    delta: tuple
    init: int
    accepting: frozenset

    @property
    def states(self):
        return range(len(self.delta))

    def letter_index(self, letter) -> int:
        letter = frozenset(letter)
        idx = 0
        for j, p in enumerate(self.aps):
            if p in letter:
                idx |= 1 << j
        return idx

    def step(self, q, letter) -> int:
        return self.delta[q][self.letter_index(letter)]

    def run(self, word):
        q = self.init
        for x in word:
            q = self.step(q, x)
        return q

    def accepts(self, word) -> bool:
        return self.run(word) in self.accepting


def _explore(start, aps, letters):
    index = {start: 0}
    order = [start]
    delta = []
    queue = deque([start])
    while queue:
        r = queue.popleft()
        row = []
        for x in letters:
            nxt = derive(r, x)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(index[nxt])
        delta.append(row)
    accepting = {i for i, r in enumerate(order) if frozenset() in r}
    return delta, accepting


def hopcroft_partition(delta, accepting, n_letters):
    """Coarsest partition of states stable under ``delta`` that respects
    acceptance.  Returns a block id per state."""
    n = len(delta)
    inverse = [[[] for _ in range(n)] for _ in range(n_letters)]
    for q in range(n):
        for a in range(n_letters):
            inverse[a][delta[q][a]].append(q)

    acc = set(accepting)
    rej = set(range(n)) - acc
    blocks = [b for b in (acc, rej) if b]
    block_of = [0] * n
    for i, b in enumerate(blocks):
        for q in b:
            block_of[q] = i
    work = deque()
    if len(blocks) == 2:
        work.append(0 if len(blocks[0]) <= len(blocks[1]) else 1)
    elif blocks:
        work.append(0)
    in_work = set(work)

    while work:
        splitter = work.popleft()
        in_work.discard(splitter)
        members = set(blocks[splitter])
        for a in range(n_letters):
            pre = set()
            for q in members:
                pre.update(inverse[a][q])
            touched = {}
            for q in pre:
                touched.setdefault(block_of[q], set()).add(q)
            for bi, inside in touched.items():
                block = blocks[bi]
                if len(inside) == len(block):
                    continue
                outside = block - inside
                blocks[bi] = inside
                blocks.append(outside)
                ni = len(blocks) - 1
                for q in outside:
                    block_of[q] = ni
                if bi in in_work:
                    work.append(ni)
                    in_work.add(ni)
                else:
                    pick = bi if len(inside) <= len(outside) else ni
                    work.append(pick)
                    in_work.add(pick)
    return block_of


def minimize(delta, accepting, init, n_letters):
    """Quotient by :func:`hopcroft_partition` and renumber in BFS order."""
    block_of = hopcroft_partition(delta, accepting, n_letters)
    start = block_of[init]
    rep = {}
    for q in range(len(delta)):
        rep.setdefault(block_of[q], q)
    order, seen, queue = [start], {start: 0}, deque([start])
    while queue:
        b = queue.popleft()
        q = rep[b]
        for a in range(n_letters):
            nb = block_of[delta[q][a]]
            if nb not in seen:
                seen[nb] = len(order)
                order.append(nb)
                queue.append(nb)
    new_delta = tuple(tuple(seen[block_of[delta[rep[b]][a]]] for a in range(n_letters))
                      for b in order)
    new_acc = frozenset(seen[block_of[q]] for q in accepting if block_of[q] in seen)
    return new_delta, new_acc


def compile_to_dfa(f, aps, max_aps: int = DEFAULT_AP_CAP) -> Dfa:
    """Minimal DFA for the strong finite-word language of ``f`` over ``2^aps``."""
    aps = tuple(aps)
    if len(aps) > max_aps:
        raise ValueError(f"{len(aps)} atomic propositions exceed the cap of {max_aps}")
    unknown = atoms(f) - set(aps)
    if unknown:
        raise ValueError(f"unknown proposition {sorted(unknown)[0]}")
    letters = alphabet(aps)
    delta, accepting = _explore(dnf(f), aps, letters)
    delta, accepting = minimize(delta, accepting, 0, len(letters))
    return Dfa(aps=aps, alphabet=letters, delta=delta, init=0, accepting=accepting)


def is_extension_closed(dfa: Dfa) -> bool:
    return all(dfa.delta[q][a] in dfa.accepting
               for q in dfa.accepting for a in range(len(dfa.alphabet)))


def words(aps, max_len):
    """Every word over ``2^aps`` of length 0..max_len."""
    letters = alphabet(aps)
    for n in range(max_len + 1):
        yield from _cartesian(letters, repeat=n)


def dfa_to_json(dfa: Dfa) -> dict:
    return {
        "aps": list(dfa.aps),
        "states": len(dfa.delta),
        "init": dfa.init,
        "accepting": sorted(dfa.accepting),
        "transitions": [
            {"from": q, "letter": sorted(dfa.alphabet[a]), "to": dfa.delta[q][a]}
            for q in dfa.states for a in range(len(dfa.alphabet))],
    }


def dfa_to_dot(dfa: Dfa) -> str:
    lines = ["digraph dfa {", "  rankdir=LR;", '  __start [shape=point];']
    for q in dfa.states:
        shape = "doublecircle" if q in dfa.accepting else "circle"
        lines.append(f'  q{q} [shape={shape}, label="q{q}"];')
    lines.append(f"  __start -> q{dfa.init};")
    for q in dfa.states:
        grouped = {}
        for a, x in enumerate(dfa.alphabet):
            grouped.setdefault(dfa.delta[q][a], []).append(
                "{" + ",".join(sorted(x)) + "}")
        for t, labels in grouped.items():
            lines.append(f'  q{q} -> q{t} [label="{" ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
