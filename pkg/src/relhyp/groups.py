"""Finitely generated groups with decidable normal forms.

Supported kinds:

* ``free`` -- free reduction.
* ``free-abelian`` -- exponent vectors, written in generator order.
* ``free-product-of-cyclics`` -- syllable normal form; ``orders[i] == 0`` means
  an infinite cyclic factor.
* ``table`` -- a user-supplied finite rewriting system (shortlex-decreasing
  rules).  Confluence is the user's responsibility.

Generator labels are lowercase identifiers; the formal inverse of ``a`` is
``A``.  Normal forms are always words in the base generators; optional extra
generators (named words such as ``c = a b``) only change the Cayley graph and
hence the word metric.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import yaml

KINDS = ("free", "free-abelian", "free-product-of-cyclics", "table")

_LABEL = re.compile(r"^[a-z][a-z0-9_]*$")


class GroupSpecError(ValueError):
    """Invalid group specification; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownSymbolError(ValueError):
    def __init__(self, symbol: str, position: int):
        self.symbol = symbol
        self.position = position
        super().__init__(f"unknown symbol {symbol!r} at position {position}")


class BudgetError(RuntimeError):
    """Raised when a construction would exceed its vertex budget."""

    def __init__(self, what: str, projected: int, budget: int):
        self.projected = projected
        self.budget = budget
        super().__init__(f"{what}: projected {projected} vertices exceeds budget {budget}")


def inverse_symbol(sym: str) -> str:
    return sym.lower() if sym[0].isupper() else sym.upper()


def invert_word(word: Sequence[str]) -> tuple[str, ...]:
    return tuple(inverse_symbol(s) for s in reversed(word))


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    generators: tuple[str, ...]
    orders: tuple[int, ...] = ()
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = ()
    extra_generators: tuple[tuple[str, tuple[str, ...]], ...] = ()
    peripherals: tuple[tuple[str, ...], ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GroupSpecError(f"unknown kind {self.kind!r}; expected one of {KINDS}", field="kind")
        labels = list(self.generators) + [n for n, _ in self.extra_generators]
        for lab in labels:
            if not _LABEL.match(lab):
                raise GroupSpecError(f"generator label {lab!r} must match {_LABEL.pattern}", field="generators")
        if len(set(labels)) != len(labels):
            raise GroupSpecError("generator labels must be distinct", field="generators")
        if self.kind == "free-product-of-cyclics":
            if len(self.orders) != len(self.generators):
                raise GroupSpecError("orders must list one order per generator", field="orders")
            if any(n == 1 or n < 0 for n in self.orders):
                raise GroupSpecError("cyclic orders must be 0 (infinite) or >= 2", field="orders")
        elif self.orders:
            raise GroupSpecError("orders are only meaningful for free-product-of-cyclics", field="orders")
        if self.relations and self.kind != "table":
            raise GroupSpecError("relations are only meaningful for the table kind", field="relations")
        base = set(self.generators) | {s.upper() for s in self.generators}
        for lhs, rhs in self.relations:
            for s in lhs + rhs:
                if s not in base:
                    raise GroupSpecError(f"relation uses unknown symbol {s!r}", field="relations")
            if not lhs:
                raise GroupSpecError("rewriting rule with empty left side", field="relations")
            if shortlex_key(self, rhs) >= shortlex_key(self, lhs):
                raise GroupSpecError(
                    f"rule {' '.join(lhs)} -> {' '.join(rhs)} is not shortlex-decreasing",
                    field="relations",
                )
        for _, w in self.extra_generators:
            for s in w:
                if s not in base:
                    raise GroupSpecError(f"extra generator uses unknown symbol {s!r}", field="extra_generators")
        for p in self.peripherals:
            if not p:
                raise GroupSpecError("empty peripheral", field="peripherals")
            for s in p:
                if s not in self.generators:
                    raise GroupSpecError(f"peripheral generator {s!r} is not a base generator", field="peripherals")

    # symbols -----------------------------------------------------------
    @property
    def symbols(self) -> tuple[str, ...]:
        """Base alphabet in lexicographic order: a < A < b < B < ..."""
        out = []
        for g in self.generators:
            out += [g, g.upper()]
        return tuple(out)

    @property
    def cayley_generators(self) -> tuple[tuple[str, ...], ...]:
        """Words (over the base alphabet) labelling Cayley graph edges."""
        words = [(s,) for s in self.generators]
        words += [w for _, w in self.extra_generators]
        return tuple(words)

    @property
    def has_extras(self) -> bool:
        return bool(self.extra_generators)

    def peripheral_infinite_index(self, index: int) -> bool:
        """Proper generator subsets have infinite index for every catalog kind."""
        if self.kind == "table":
            return True  # asserted by the user
        return bool(set(self.generators) - set(self.peripherals[index]))

    def hyperbolicity_note(self) -> str:
        """'known' for catalog combinations known to be relatively hyperbolic."""
        if self.kind == "table":
            return "unverified hyperbolicity"
        if self.kind == "free-abelian":
            n = len(self.generators)
            if n <= 1:
                return "known"
            if not self.peripherals:
                return "unverified hyperbolicity"
            if any(set(p) == set(self.generators) for p in self.peripherals):
                return "known"
            return "unverified hyperbolicity"
        # free groups and free products of cyclics are hyperbolic relative to any
        # collection of free factors generated by subsets of the basis
        return "known"


def shortlex_key(spec: GroupSpec, word: Sequence[str]) -> tuple:
    order = _symbol_order(spec.generators)
    return (len(word), tuple(order[s] for s in word))


@lru_cache(maxsize=None)
def _symbol_order(generators: tuple[str, ...]) -> dict[str, int]:
    order = {}
    for i, g in enumerate(generators):
        order[g] = 2 * i
        order[g.upper()] = 2 * i + 1
    return order


@dataclass(frozen=True, order=False)
class Element:
    word: tuple[str, ...]
    length: int

    def __str__(self):
        return " ".join(self.word) if self.word else "e"


@dataclass(frozen=True)
class CosetId:
    peripheral: int
    rep: Element

    def __str__(self):
        return f"{self.rep}H{self.peripheral}"


def element_key(spec: GroupSpec, el: Element) -> tuple:
    """Deterministic ordering: word length, then lexicographic on normal form."""
    order = _symbol_order(spec.generators)
    return (el.length, tuple(order[s] for s in el.word))


def coset_key(spec: GroupSpec, cid: CosetId) -> tuple:
    return (cid.peripheral, element_key(spec, cid.rep))


# -- parsing words ---------------------------------------------------------

def parse_word(spec: GroupSpec, word: str | Sequence[str]) -> tuple[str, ...]:
    """Tokenize and expand extra generators; returns a word over the base alphabet.

    Strings are split on whitespace; a whitespace-free string is split into
    characters when every label is a single character.  ``e`` or ``""`` is the
    empty word.
    """
    if isinstance(word, str):
        s = word.strip()
        if s in ("", "e", "1"):
            tokens: list[str] = []
        elif any(c.isspace() for c in s):
            tokens = s.split()
        elif all(len(lab) == 1 for lab in spec.generators) and all(
            len(n) == 1 for n, _ in spec.extra_generators
        ):
            tokens = list(s)
        else:
            tokens = [s]
    else:
        tokens = list(word)
    base = set(spec.symbols)
    extras = dict(spec.extra_generators)
    out: list[str] = []
    for pos, tok in enumerate(tokens):
        if tok in base:
            out.append(tok)
        elif tok in extras:
            out.extend(extras[tok])
        elif tok.lower() in extras and tok != tok.lower():
            out.extend(invert_word(extras[tok.lower()]))
        else:
            raise UnknownSymbolError(tok, pos)
    return tuple(out)


# -- normal forms ------------------------------------------------------------

def normal_form(spec: GroupSpec, word: Sequence[str]) -> tuple[str, ...]:
    """Normal form of a word over the base alphabet (no validation)."""
    if spec.kind == "free":
        return _free_reduce(word)
    if spec.kind == "free-abelian":
        return _abelian_normal(spec, word)
    if spec.kind == "free-product-of-cyclics":
        return _syllable_normal(spec, word)
    return _rewrite(spec, word)


def _free_reduce(word: Iterable[str]) -> tuple[str, ...]:
    stack: list[str] = []
    for s in word:
        if stack and stack[-1] == inverse_symbol(s):
            stack.pop()
        else:
            stack.append(s)
    return tuple(stack)


def _abelian_normal(spec: GroupSpec, word: Iterable[str]) -> tuple[str, ...]:
    exps = _exponents(spec, word)
    out: list[str] = []
    for g, e in zip(spec.generators, exps):
        out += [g] * e if e > 0 else [g.upper()] * (-e)
    return tuple(out)


def _exponents(spec: GroupSpec, word: Iterable[str]) -> list[int]:
    idx = {g: i for i, g in enumerate(spec.generators)}
    exps = [0] * len(spec.generators)
    for s in word:
        if s in idx:
            exps[idx[s]] += 1
        else:
            exps[idx[s.lower()]] -= 1
    return exps


def _syllable_power(k: int, n: int) -> int:
    if n == 0:
        return k
    k %= n
    return k - n if 2 * k > n else k


def _syllable_normal(spec: GroupSpec, word: Iterable[str]) -> tuple[str, ...]:
    idx = {g: i for i, g in enumerate(spec.generators)}
    stack: list[list[int]] = []
    for s in word:
        i = idx.get(s)
        step = 1
        if i is None:
            i, step = idx[s.lower()], -1
        n = spec.orders[i]
        if stack and stack[-1][0] == i:
            stack[-1][1] = _syllable_power(stack[-1][1] + step, n)
            if stack[-1][1] == 0:
                stack.pop()
        else:
            p = _syllable_power(step, n)
            if p:
                stack.append([i, p])
    out: list[str] = []
    for i, p in stack:
        g = spec.generators[i]
        out += [g] * p if p > 0 else [g.upper()] * (-p)
    return tuple(out)


_REWRITE_LIMIT = 100_000


def _rewrite(spec: GroupSpec, word: Sequence[str]) -> tuple[str, ...]:
    w = list(_free_reduce(word))
    rules = spec.relations
    for _ in range(_REWRITE_LIMIT):
        for lhs, rhs in rules:
            k = len(lhs)
            hit = next((i for i in range(len(w) - k + 1) if tuple(w[i:i + k]) == lhs), None)
            if hit is not None:
                w[hit:hit + k] = rhs
                w = list(_free_reduce(w))
                break
        else:
            return tuple(w)
    raise RuntimeError("rewriting system did not terminate")


# -- public operations ---------------------------------------------------------

def reduce_word(spec: GroupSpec, word: str | Sequence[str]) -> Element:
    """Normal form of ``word`` as an Element with its word length.

    Unknown symbols raise UnknownSymbolError carrying the offending position.
    """
    nf = normal_form(spec, parse_word(spec, word))
    return Element(nf, word_length(spec, nf))


def word_length(spec: GroupSpec, nf: tuple[str, ...]) -> int:
    """Word length of a normal form in the full Cayley generating set."""
    if not spec.has_extras:
        return len(nf)
    return _extended_lengths(spec, len(nf)).get(nf, len(nf))


_EXT_CACHE: dict[GroupSpec, tuple[int, dict]] = {}


def _extended_lengths(spec: GroupSpec, radius: int) -> dict:
    cached = _EXT_CACHE.get(spec)
    if cached is not None and cached[0] >= radius:
        return cached[1]
    lengths = {el.word: el.length for el in _bfs_ball(spec, radius, budget=2_000_000)}
    _EXT_CACHE[spec] = (radius, lengths)
    return lengths


def multiply(spec: GroupSpec, g: Element, h: Element) -> Element:
    nf = normal_form(spec, g.word + h.word)
    return Element(nf, word_length(spec, nf))


def inverse(spec: GroupSpec, g: Element) -> Element:
    nf = normal_form(spec, invert_word(g.word))
    return Element(nf, g.length)


def distance(spec: GroupSpec, g: Element, h: Element) -> int:
    """Word metric d_G(g, h) = |g^-1 h|."""
    return word_length(spec, normal_form(spec, invert_word(g.word) + h.word))


def projected_ball_size(spec: GroupSpec, radius: int) -> int | None:
    """Closed-form ball size where available (no extra generators)."""
    if spec.has_extras:
        return None
    n = len(spec.generators)
    if spec.kind == "free":
        if n == 0:
            return 1
        if n == 1:
            return 2 * radius + 1
        return 1 + 2 * n * ((2 * n - 1) ** radius - 1) // (2 * n - 2)
    if spec.kind == "free-abelian":
        # lattice points of the l1 ball in Z^n
        from math import comb
        return sum(comb(n, k) * comb(radius, k) * 2 ** k for k in range(n + 1))
    return None


def enumerate_ball(spec: GroupSpec, radius: int, budget: int = 500_000) -> list[Element]:
    """All elements of word length <= radius, ordered by (length, lex)."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    projected = projected_ball_size(spec, radius)
    if projected is not None and projected > budget:
        raise BudgetError(f"ball of radius {radius}", projected, budget)
    return _bfs_ball(spec, radius, budget)


def _bfs_ball(spec: GroupSpec, radius: int, budget: int) -> list[Element]:
    gens = spec.cayley_generators
    steps = [g for g in gens] + [invert_word(g) for g in gens]
    seen = {(): 0}
    sphere = [()]
    sizes = [1]
    for r in range(1, radius + 1):
        nxt = []
        for w in sphere:
            for s in steps:
                v = normal_form(spec, w + s)
                if v not in seen:
                    seen[v] = r
                    nxt.append(v)
        sizes.append(len(nxt))
        if len(seen) > budget:
            growth = sizes[-1] / max(sizes[-2], 1)
            projected = len(seen) + int(sum(sizes[-1] * growth ** k for k in range(1, radius - r + 1)))
            raise BudgetError(f"ball of radius {radius}", projected, budget)
        sphere = nxt
        if not nxt:
            break
    els = [Element(w, r) for w, r in seen.items()]
    order = _symbol_order(spec.generators)
    els.sort(key=lambda e: (e.length, tuple(order[s] for s in e.word)))
    return els


def coset_rep_word(spec: GroupSpec, nf: tuple[str, ...], index: int) -> tuple[str, ...]:
    """Normal form of the shortlex-least member of nf*H_index (base-alphabet length)."""
    pset = set(spec.peripherals[index])
    if spec.kind in ("free", "free-product-of-cyclics"):
        k = len(nf)
        while k > 0 and nf[k - 1].lower() in pset:
            k -= 1
        return nf[:k]
    if spec.kind == "free-abelian":
        return tuple(s for s in nf if s.lower() not in pset)
    return _table_coset_rep(spec, nf, index)


def _table_coset_rep(spec: GroupSpec, nf: tuple[str, ...], index: int) -> tuple[str, ...]:
    # search h in H up to length 2|g| (members of length <= |g| are g*h with |h|_G <= 2|g|)
    pgens = []
    for s in spec.peripherals[index]:
        pgens += [s, s.upper()]
    best = nf
    bkey = shortlex_key(spec, nf)
    frontier = [()]
    seen = {()}
    for _ in range(2 * len(nf)):
        nxt = []
        for h in frontier:
            for s in pgens:
                h2 = normal_form(spec, h + (s,))
                if h2 in seen:
                    continue
                seen.add(h2)
                nxt.append(h2)
                cand = normal_form(spec, nf + h2)
                ck = shortlex_key(spec, cand)
                if ck < bkey:
                    best, bkey = cand, ck
        frontier = nxt
    return best


def coset_of(spec: GroupSpec, g: Element, index: int) -> CosetId:
    """Left coset g*H_index, keyed by its shortlex-least member."""
    if not 0 <= index < len(spec.peripherals):
        raise IndexError(f"peripheral index {index} out of range")
    rep = coset_rep_word(spec, g.word, index)
    return CosetId(index, Element(rep, word_length(spec, rep)))


def peripheral_distance(spec: GroupSpec, g: tuple[str, ...], h: tuple[str, ...]) -> int:
    """Intrinsic word metric of the peripheral subgroup between coset members.

    For catalog kinds the normal form of g^-1 h is a word in the peripheral's
    own generators, so its length is the peripheral word length.
    """
    return len(normal_form(spec, invert_word(g) + h))


# -- spec files ----------------------------------------------------------------

_SPEC_KEYS = {"name", "kind", "generators", "orders", "relations", "extra_generators", "peripherals"}


def _line(node) -> int:
    return node.start_mark.line + 1


def _scalar_list(node, what: str) -> list[str]:
    if not isinstance(node, yaml.SequenceNode):
        raise GroupSpecError(f"{what} must be a list", _line(node))
    out = []
    for item in node.value:
        if not isinstance(item, yaml.ScalarNode):
            raise GroupSpecError(f"{what} entries must be scalars", _line(item))
        out.append(item.value)
    return out


def _word_tokens(text: str) -> tuple[str, ...]:
    return tuple(text.split())


def parse_group_spec(text: str) -> GroupSpec:
    """Parse a YAML group spec.  Errors cite 1-based line numbers."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise GroupSpecError(f"malformed YAML: {getattr(exc, 'problem', exc)}",
                             mark.line + 1 if mark else None) from None
    if not isinstance(root, yaml.MappingNode):
        raise GroupSpecError("group spec must be a mapping", _line(root) if root else 1)
    fields: dict[str, object] = {}
    lines: dict[str, int] = {}
    for knode, vnode in root.value:
        key = knode.value
        if key not in _SPEC_KEYS:
            raise GroupSpecError(f"unknown key {key!r}", _line(knode))
        lines[key] = _line(knode)
        if key in ("name", "kind"):
            if not isinstance(vnode, yaml.ScalarNode):
                raise GroupSpecError(f"{key} must be a string", _line(vnode))
            fields[key] = vnode.value
        elif key == "generators":
            fields[key] = tuple(_scalar_list(vnode, key))
        elif key == "orders":
            vals = _scalar_list(vnode, key)
            try:
                fields[key] = tuple(int(v) for v in vals)
            except ValueError:
                raise GroupSpecError("orders must be integers", _line(vnode)) from None
        elif key == "relations":
            rules = []
            for item in _scalar_list(vnode, key):
                if "->" not in item:
                    raise GroupSpecError(f"relation {item!r} must have the form 'lhs -> rhs'", _line(vnode))
                lhs, rhs = item.split("->", 1)
                rules.append((_word_tokens(lhs), _word_tokens(rhs)))
            fields[key] = tuple(rules)
        elif key == "extra_generators":
            if not isinstance(vnode, yaml.MappingNode):
                raise GroupSpecError("extra_generators must be a mapping name: word", _line(vnode))
            fields[key] = tuple((k.value, _word_tokens(v.value)) for k, v in vnode.value)
        elif key == "peripherals":
            if not isinstance(vnode, yaml.SequenceNode):
                raise GroupSpecError("peripherals must be a list of generator lists", _line(vnode))
            fields[key] = tuple(tuple(_scalar_list(p, "peripheral")) for p in vnode.value)
    for req in ("kind", "generators"):
        if req not in fields:
            raise GroupSpecError(f"missing required key {req!r}", 1)
    try:
        return GroupSpec(**fields)  # type: ignore[arg-type]
    except GroupSpecError as exc:
        line = lines.get(exc.field or "", lines.get("kind", 1))
        raise GroupSpecError(str(exc), line, exc.field) from None


def load_group_spec(path: str | Path) -> GroupSpec:
    return parse_group_spec(Path(path).read_text())


def dump_group_spec(spec: GroupSpec) -> str:
    data: dict[str, object] = {}
    if spec.name:
        data["name"] = spec.name
    data["kind"] = spec.kind
    data["generators"] = list(spec.generators)
    if spec.orders:
        data["orders"] = list(spec.orders)
    if spec.relations:
        data["relations"] = [f"{' '.join(l)} -> {' '.join(r)}" for l, r in spec.relations]
    if spec.extra_generators:
        data["extra_generators"] = {n: " ".join(w) for n, w in spec.extra_generators}
    if spec.peripherals:
        data["peripherals"] = [list(p) for p in spec.peripherals]
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


# -- catalog -------------------------------------------------------------------

def free_group(*gens: str, peripherals: Sequence[Sequence[str]] = (),
               extras: dict[str, str] | None = None, name: str = "") -> GroupSpec:
    return GroupSpec(
        "free", tuple(gens),
        extra_generators=tuple((k, tuple(v.split())) for k, v in (extras or {}).items()),
        peripherals=tuple(tuple(p) for p in peripherals), name=name,
    )


def free_abelian_group(*gens: str, peripherals: Sequence[Sequence[str]] = (), name: str = "") -> GroupSpec:
    return GroupSpec("free-abelian", tuple(gens), peripherals=tuple(tuple(p) for p in peripherals), name=name)


def free_product_of_cyclics(orders: dict[str, int], peripherals: Sequence[Sequence[str]] = (),
                            name: str = "") -> GroupSpec:
    return GroupSpec("free-product-of-cyclics", tuple(orders), orders=tuple(orders.values()),
                     peripherals=tuple(tuple(p) for p in peripherals), name=name)
