"""Automorphisms of the d-regular tree with exact word arithmetic.

The tree is realized as the Cayley graph of the free product of d copies of
Z/2: vertices are reduced words over the letters 1..d (tuples of ints, no
two equal adjacent letters, empty word = basepoint), and w is adjacent to
w*c for each letter c.  Graph distance is the length of the reduced
quotient word, so all metric questions reduce to word arithmetic.

The implemented group is generated by

  * left translations  x -> u * x  for a reduced word u, and
  * finitary portraits: automorphisms fixing the basepoint whose local
    action at each vertex, written in order coordinates (children listed in
    increasing letter order on both sides), is the identity below a finite
    depth.  A portrait is stored sparsely as the map from vertices to their
    non-identity local permutations.

Every element is kept in the canonical factored form x |-> u * p(x); the
composition rule is

    (u1, p1) (u2, p2) = (u1 * p1(u2),  p1|_{u2} . p2)

where p1|_{u2} (y) = p1(u2)^-1 * p1(u2 * y) is the section of p1 at u2.
Sections of finitary portraits are finitary, so the form is closed under
the group operations and equality is structural.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation, ParseError

__all__ = [
    "Classification",
    "HalfTree",
    "Portrait",
    "StarReport",
    "TreeAut",
    "TreeMovesCase",
    "axis_contains",
    "ball",
    "branch",
    "check_star_tree",
    "classify",
    "commutator",
    "conjugate",
    "distance_to_axis",
    "format_treeaut",
    "format_vertex",
    "halftree_into",
    "is_supported_in_halftree",
    "is_type_preserving",
    "neighbors",
    "parse_treeaut",
    "parse_vertex",
    "random_element",
    "random_supported",
    "reduce_word",
    "swap_portrait_in_branch",
    "translation_length",
    "tree_moves_case",
    "wdist",
    "winv",
    "wmul",
]

Word = tuple


# ---------------------------------------------------------------------------
# reduced words
# ---------------------------------------------------------------------------

def reduce_word(letters) -> Word:
    """Reduce a letter sequence by cancelling equal adjacent letters."""
    out = []
    for c in letters:
        if out and out[-1] == c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def wmul(a: Word, b: Word) -> Word:
    """Product of two reduced words (cancellation only at the junction)."""
    if not a:
        return b
    if not b:
        return a
    out = list(a)
    for c in b:
        if out and out[-1] == c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def winv(a: Word) -> Word:
    """Inverse word; every letter is an involution, so just reverse."""
    return a[::-1]


def wdist(a: Word, b: Word) -> int:
    """Graph distance between the vertices a and b."""
    i = 0
    n = len(a) if len(a) < len(b) else len(b)
    while i < n and a[i] == b[i]:
        i += 1
    return (len(a) - i) + (len(b) - i)


def parse_vertex(text: str, d: int) -> Word:
    """Parse a vertex literal: a digit string like "132", or "e" for the basepoint."""
    s = text.strip()
    if s in ("e", ""):
        return ()
    letters = []
    for ch in s:
        if not ch.isdigit() or not 1 <= int(ch) <= d:
            raise ParseError(f"bad vertex letter {ch!r} for degree {d}")
        letters.append(int(ch))
    word = tuple(letters)
    if reduce_word(word) != word:
        raise ParseError(f"vertex {text!r} is not a reduced word")
    return word


def format_vertex(w: Word) -> str:
    return "".join(str(c) for c in w) if w else "e"


def neighbors(v: Word, d: int):
    """The d neighbours v * c of a vertex."""
    out = []
    last = v[-1] if v else 0
    for c in range(1, d + 1):
        out.append(v[:-1] if c == last else v + (c,))
    return out


def ball(d: int, radius: int):
    """All vertices within the given distance of the basepoint, by BFS layer."""
    layer = [()]
    out = [()]
    for _ in range(radius):
        nxt = []
        for v in layer:
            last = v[-1] if v else 0
            for c in range(1, d + 1):
                if c != last:
                    nxt.append(v + (c,))
        out.extend(nxt)
        layer = nxt
    return out


def _letter_at(i: int, excluded: int) -> int:
    """The i-th letter (0-based) of 1..d with `excluded` removed; 0 = none."""
    c = i + 1
    if excluded and c >= excluded:
        c += 1
    return c


def _letter_index(c: int, excluded: int) -> int:
    i = c - 1
    if excluded and c > excluded:
        i -= 1
    return i


def _perm_inverse(perm):
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)


# ---------------------------------------------------------------------------
# portraits
# ---------------------------------------------------------------------------

class Portrait:
    """An automorphism fixing the basepoint, trivial below a finite depth.

    `acts` maps a vertex v to the permutation (in order coordinates) that
    the automorphism induces from the children of v to the children of its
    image; identity permutations are never stored, so equality of portraits
    is equality of these dictionaries.
    """

    __slots__ = ("d", "acts")

    def __init__(self, d: int, acts=None):
        if d < 3:
            raise ValueError("tree degree must be at least 3")
        self.d = d
        clean = {}
        for v, perm in (acts or {}).items():
            n = d if not v else d - 1
            if len(perm) != n or sorted(perm) != list(range(n)):
                raise ValueError(f"bad local permutation {perm} at {format_vertex(v)}")
            if any(perm[i] != i for i in range(n)):
                clean[tuple(v)] = tuple(perm)
        self.acts = clean

    @classmethod
    def identity(cls, d: int) -> "Portrait":
        return cls(d)

    def is_trivial(self) -> bool:
        return not self.acts

    @property
    def depth(self) -> int:
        if not self.acts:
            return 0
        return 1 + max(len(v) for v in self.acts)

    def apply(self, v: Word) -> Word:
        if not self.acts:
            return v
        acts = self.acts
        src = ()
        out = []
        ex_t = 0
        for c in v:
            ex_s = src[-1] if src else 0
            perm = acts.get(src)
            i = _letter_index(c, ex_s)
            j = perm[i] if perm is not None else i
            cp = _letter_at(j, ex_t)
            out.append(cp)
            src = src + (c,)
            ex_t = cp
        return tuple(out)

    def inverse(self) -> "Portrait":
        if not self.acts:
            return self
        inv_acts = {}
        for v, perm in self.acts.items():
            inv_acts[self.apply(v)] = _perm_inverse(perm)
        return Portrait(self.d, inv_acts)

    def compose(self, other: "Portrait") -> "Portrait":
        """self after other."""
        if not self.acts:
            return other
        if not other.acts:
            return self
        oinv = other.inverse()
        cand = set(other.acts)
        cand.update(oinv.apply(k) for k in self.acts)
        acts = {}
        for v in cand:
            n = self.d if not v else self.d - 1
            p_outer = self.acts.get(other.apply(v))
            p_inner = other.acts.get(v)
            if p_outer is None:
                perm = p_inner
            elif p_inner is None:
                perm = p_outer
            else:
                perm = tuple(p_outer[p_inner[i]] for i in range(n))
            if perm is not None and any(perm[i] != i for i in range(n)):
                acts[v] = tuple(perm)
        return Portrait(self.d, acts)

    def section(self, u: Word) -> "Portrait":
        """The portrait y -> self(u)^-1 * self(u * y)."""
        if not u or not self.acts:
            return self
        d = self.d
        uin = winv(u)
        pu_inv = winv(self.apply(u))

        def q(y):
            return wmul(pu_inv, self.apply(wmul(u, y)))

        ups = {uin[:i] for i in range(len(uin) + 1)}
        acts = {}
        for y in ups:
            qy = q(y)
            ex_s = y[-1] if y else 0
            ex_t = qy[-1] if qy else 0
            n = d if not y else d - 1
            perm = []
            for i in range(n):
                c = _letter_at(i, ex_s)
                qyc = q(y + (c,))
                assert qyc[:-1] == qy, "section image is not a child"
                perm.append(_letter_index(qyc[-1], ex_t))
            if any(perm[i] != i for i in range(n)):
                acts[y] = tuple(perm)
        # away from the cancellation zone the local action is transported
        # unchanged: the excluded letters on both sides agree there.
        for k, perm in self.acts.items():
            y = wmul(uin, k)
            if y not in ups:
                acts[y] = perm
        return Portrait(d, acts)

    def __eq__(self, other):
        if not isinstance(other, Portrait):
            return NotImplemented
        return self.d == other.d and self.acts == other.acts

    def __hash__(self):
        return hash((self.d, frozenset(self.acts.items())))

    def __repr__(self):
        return f"Portrait(d={self.d}, keys={len(self.acts)})"


# ---------------------------------------------------------------------------
# tree automorphisms
# ---------------------------------------------------------------------------

class TreeAut:
    """An automorphism x |-> translation * portrait(x) in canonical form."""

    __slots__ = ("d", "translation", "portrait")

    def __init__(self, d: int, translation: Word = (), portrait: Portrait = None):
        translation = tuple(translation)
        if reduce_word(translation) != translation:
            raise ValueError("translation must be a reduced word")
        if any(not 1 <= c <= d for c in translation):
            raise ValueError("translation letter out of range")
        if portrait is None:
            portrait = Portrait(d)
        if portrait.d != d:
            raise ValueError("portrait degree mismatch")
        self.d = d
        self.translation = translation
        self.portrait = portrait

    @classmethod
    def identity(cls, d: int) -> "TreeAut":
        return cls(d)

    @classmethod
    def from_translation(cls, d: int, word) -> "TreeAut":
        return cls(d, reduce_word(word))

    @classmethod
    def from_portrait(cls, portrait: Portrait) -> "TreeAut":
        return cls(portrait.d, (), portrait)

    def apply(self, v: Word) -> Word:
        return wmul(self.translation, self.portrait.apply(v))

    def displacement(self, v: Word) -> int:
        return wdist(v, self.apply(v))

    def compose(self, other: "TreeAut") -> "TreeAut":
        """self after other."""
        if self.d != other.d:
            raise ValueError("degree mismatch")
        u = wmul(self.translation, self.portrait.apply(other.translation))
        p = self.portrait.section(other.translation).compose(other.portrait)
        return TreeAut(self.d, u, p)

    def inverse(self) -> "TreeAut":
        pi = self.portrait.inverse()
        uin = winv(self.translation)
        return TreeAut(self.d, pi.apply(uin), pi.section(uin))

    def is_identity(self) -> bool:
        return not self.translation and self.portrait.is_trivial()

    def image_halftree(self, ht: "HalfTree") -> "HalfTree":
        return HalfTree(self.d, self.apply(ht.tail), self.apply(ht.head))

    def __eq__(self, other):
        if not isinstance(other, TreeAut):
            return NotImplemented
        return (
            self.d == other.d
            and self.translation == other.translation
            and self.portrait == other.portrait
        )

    def __hash__(self):
        return hash((self.d, self.translation, self.portrait))

    def __repr__(self):
        return f"TreeAut(d={self.d}, u={format_vertex(self.translation)}, keys={len(self.portrait.acts)})"


def conjugate(x: TreeAut, g: TreeAut, ginv: TreeAut = None) -> TreeAut:
    """x^g = g x g^-1."""
    if ginv is None:
        ginv = g.inverse()
    return g.compose(x).compose(ginv)


def commutator(a: TreeAut, b: TreeAut) -> TreeAut:
    """[a, b] = a b a^-1 b^-1."""
    return a.compose(b).compose(a.inverse()).compose(b.inverse())


# ---------------------------------------------------------------------------
# classification: elliptic / inversion / hyperbolic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    kind: str                      # "elliptic" | "inversion" | "hyperbolic"
    vertex: Word | None = None     # a fixed vertex, when elliptic
    edge: tuple | None = None      # the inverted edge, when an inversion
    length: int = 0                # translation length, when hyperbolic


def _descend_to_min(g: TreeAut):
    """Walk from the basepoint down the displacement function to its minimum.

    Displacement of a tree automorphism is 2*d(v, M) + min over the minimal
    set M (fixed subtree, inverted edge, or axis), so any local minimum is
    global and steepest descent is exact.
    """
    v = ()
    dv = len(g.apply(v))
    while dv:
        nxt = None
        for w in neighbors(v, g.d):
            dw = g.displacement(w)
            if dw < dv:
                nxt = (w, dw)
                break
        if nxt is None:
            break
        v, dv = nxt
    # stabilization re-check: nothing within distance 2 may do better
    for w1 in neighbors(v, g.d):
        if g.displacement(w1) < dv:
            raise InvariantViolation("displacement descent missed a minimum")
        for w2 in neighbors(w1, g.d):
            if g.displacement(w2) < dv:
                raise InvariantViolation("displacement descent missed a minimum")
    return v, dv


def classify(g: TreeAut) -> Classification:
    """Elliptic with a fixed vertex, an edge inversion, or hyperbolic."""
    v, dv = _descend_to_min(g)
    if dv == 0:
        return Classification("elliptic", vertex=v)
    w = g.apply(v)
    if dv == 1 and g.apply(w) == v:
        edge = (v, w) if (len(v), v) <= (len(w), w) else (w, v)
        return Classification("inversion", edge=edge)
    return Classification("hyperbolic", length=dv)


def translation_length(g: TreeAut) -> int:
    cls = classify(g)
    return cls.length if cls.kind == "hyperbolic" else 0


def axis_contains(g: TreeAut, v: Word) -> bool:
    cls = classify(g)
    if cls.kind != "hyperbolic":
        raise ValueError("axis queries need a hyperbolic automorphism")
    return g.displacement(v) == cls.length


def distance_to_axis(g: TreeAut, v: Word) -> int:
    cls = classify(g)
    if cls.kind != "hyperbolic":
        raise ValueError("axis queries need a hyperbolic automorphism")
    diff = g.displacement(v) - cls.length
    if diff < 0 or diff % 2:
        raise InvariantViolation("displacement is not 2*distance + length")
    return diff // 2


def is_type_preserving(g: TreeAut) -> bool:
    """Whether g preserves the bipartition of the vertex set.

    All displacements of one automorphism have the same parity, so the
    parity of the basepoint displacement |translation| decides.
    """
    return len(g.translation) % 2 == 0


# ---------------------------------------------------------------------------
# half-trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfTree:
    """The vertices strictly closer to `head` than to the adjacent `tail`."""

    d: int
    tail: Word
    head: Word

    def __post_init__(self):
        if wdist(self.tail, self.head) != 1:
            raise ValueError("half-tree needs adjacent tail and head")

    def contains_vertex(self, v: Word) -> bool:
        return wdist(v, self.head) < wdist(v, self.tail)

    def complement(self) -> "HalfTree":
        return HalfTree(self.d, self.head, self.tail)

    def contains(self, other: "HalfTree") -> bool:
        """other is a subset of self (decided on defining edges)."""
        return self.contains_vertex(other.head) and not other.contains_vertex(self.tail)

    def disjoint_from(self, other: "HalfTree") -> bool:
        return not self.contains_vertex(other.head) and not other.contains_vertex(self.head)

    def __str__(self):
        return f"({format_vertex(self.tail)}->{format_vertex(self.head)})"


def branch(d: int, head) -> HalfTree:
    """The half-tree of all vertices having the nonempty word `head` as prefix."""
    head = tuple(head)
    if not head:
        raise ValueError("branch needs a nonempty vertex")
    return HalfTree(d, head[:-1], head)


def is_supported_in_halftree(g: TreeAut, ht: HalfTree) -> bool:
    """Whether g fixes the complement of `ht` pointwise (decided structurally)."""
    if g.d != ht.d:
        raise ValueError("degree mismatch")
    comp = ht.complement()
    if len(comp.head) == len(comp.tail) + 1:
        # the complement is the prefix branch at b
        b = comp.head
        pb = g.portrait.apply(b)
        if wmul(g.translation, pb) != b:
            return False
        if pb[-1] != b[-1]:
            return False
        lb = len(b)
        return all(k[:lb] != b for k in g.portrait.acts)
    # the complement is everything outside the prefix branch at t
    t = comp.tail
    if g.translation:
        return False
    lt = len(t)
    return all(k[:lt] == t for k in g.portrait.acts)


# ---------------------------------------------------------------------------
# moving half-trees around
# ---------------------------------------------------------------------------

def _axis_translation_in(ht: HalfTree) -> TreeAut:
    """A translation of length 2 whose axis lies inside `ht`.

    Such an element maps the whole complement of `ht` into `ht`: the
    complement projects to a single axis vertex, and the translation moves
    that branch to a different one, necessarily inside `ht`.
    """
    d = ht.d
    h = ht.head
    gamma0 = ht.tail[-1] if len(ht.tail) == len(h) + 1 else h[-1]
    alpha = next(c for c in range(1, d + 1) if c != gamma0)
    beta = next(c for c in range(1, d + 1) if c not in (gamma0, alpha))
    u = wmul(wmul(h, (alpha, beta)), winv(h))
    return TreeAut.from_translation(d, u)


def halftree_into(a: HalfTree, b: HalfTree) -> TreeAut:
    """A group element g with g(a) contained in b, verified on defining edges."""
    if a.d != b.d:
        raise ValueError("degree mismatch")
    if a.d < 3:
        raise ValueError("needs degree at least 3")
    if b.contains(a):
        g = TreeAut.identity(a.d)
    elif a.disjoint_from(b):
        g = _axis_translation_in(b)
    elif b.contains(a.complement()):
        g = _axis_translation_in(a.complement())
    else:
        # b is strictly inside a: first push a off itself, then into b
        g1 = _axis_translation_in(a.complement())
        g2 = _axis_translation_in(b)
        g = g2.compose(g1)
    if not b.contains(g.image_halftree(a)):
        raise InvariantViolation("half-tree transport failed verification")
    return g


@dataclass(frozen=True)
class TreeMovesCase:
    kind: str            # "some_disjoint" | "preserves_all"
    index: int | None    # 1-based index of the half-tree moved off itself


def tree_moves_case(a1: HalfTree, a2: HalfTree, a3: HalfTree, g: TreeAut) -> TreeMovesCase:
    """For disjoint half-trees, either some g(A_i) misses A_i or g fixes all three.

    The two outcomes are exclusive; failing both raises InvariantViolation.
    """
    trees = (a1, a2, a3)
    for i in range(3):
        for j in range(i + 1, 3):
            if not trees[i].disjoint_from(trees[j]):
                raise ValueError("half-trees must be pairwise disjoint")
    for i, ht in enumerate(trees):
        if g.image_halftree(ht).disjoint_from(ht):
            return TreeMovesCase("some_disjoint", i + 1)
    for ht in trees:
        if g.image_halftree(ht) != ht:
            raise InvariantViolation("no half-tree moved off itself, yet not all are preserved")
    return TreeMovesCase("preserves_all", None)


@dataclass(frozen=True)
class StarReport:
    case: int                       # 1: some [g_i^g, g_i] = 1;  2: all cross pairs commute
    index: int | None               # the witnessing i in case 1
    verified: tuple                 # (i, j) pairs whose commutator was checked trivial


def check_star_tree(g1: TreeAut, g2: TreeAut, g3: TreeAut, halftrees, g: TreeAut) -> StarReport:
    """Commutation dichotomy for conjugates of elements with disjoint supports.

    g1, g2, g3 must be supported in the pairwise disjoint half-trees given;
    the report says which commutators [g_i^g, g_j] were verified to be the
    identity.  Verification failure raises InvariantViolation.
    """
    gs = (g1, g2, g3)
    a1, a2, a3 = halftrees
    for gi, ht in zip(gs, halftrees):
        if not is_supported_in_halftree(gi, ht):
            raise ValueError("element is not supported in its half-tree")
    case = tree_moves_case(a1, a2, a3, g)
    ginv = g.inverse()
    if case.kind == "some_disjoint":
        i = case.index
        gi = gs[i - 1]
        if not commutator(conjugate(gi, g, ginv), gi).is_identity():
            raise InvariantViolation(f"[g{i}^g, g{i}] expected trivial")
        return StarReport(1, i, ((i, i),))
    checked = []
    conjs = [conjugate(gi, g, ginv) for gi in gs]
    for i in range(1, 4):
        for j in range(1, 4):
            if i == j:
                continue
            if not commutator(conjs[i - 1], gs[j - 1]).is_identity():
                raise InvariantViolation(f"[g{i}^g, g{j}] expected trivial")
            checked.append((i, j))
    return StarReport(2, None, tuple(checked))


# ---------------------------------------------------------------------------
# element builders and samplers
# ---------------------------------------------------------------------------

def swap_portrait_in_branch(d: int, head) -> TreeAut:
    """A nontrivial finitary element supported in the branch at `head`:
    it swaps the first two subtrees hanging below that vertex."""
    head = tuple(head)
    n = d if not head else d - 1
    perm = (1, 0) + tuple(range(2, n))
    return TreeAut.from_portrait(Portrait(d, {head: perm}))


def random_element(rng, d: int = 3, max_translation: int = 6, max_depth: int = 3,
                   key_density: float = 0.35) -> TreeAut:
    """A seeded random element: random reduced translation word and portrait."""
    length = rng.randint(0, max_translation)
    letters = []
    for _ in range(length):
        c = rng.randint(1, d)
        while letters and letters[-1] == c:
            c = rng.randint(1, d)
        letters.append(c)
    acts = {}
    for v in ball(d, max_depth - 1) if max_depth > 0 else []:
        if rng.random() < key_density:
            n = d if not v else d - 1
            perm = list(range(n))
            while perm == list(range(n)):
                rng.shuffle(perm)
            acts[v] = tuple(perm)
    return TreeAut(d, tuple(letters), Portrait(d, acts))


def random_supported(rng, ht: HalfTree, extra_depth: int = 2) -> TreeAut:
    """A seeded random nontrivial element supported in a prefix-branch half-tree."""
    if len(ht.head) != len(ht.tail) + 1:
        raise ValueError("random_supported needs a prefix-branch half-tree")
    d = ht.d
    base = ht.head
    candidates = [wmul(base, v) for v in ball(d, extra_depth)
                  if not v or v[0] != base[-1]]
    acts = {}
    for v in candidates:
        if rng.random() < 0.4:
            n = d - 1
            perm = list(range(n))
            while perm == list(range(n)):
                rng.shuffle(perm)
            acts[v] = tuple(perm)
    if not acts:
        n = d - 1
        acts[base] = (1, 0) + tuple(range(2, n))
    g = TreeAut.from_portrait(Portrait(d, acts))
    if not is_supported_in_halftree(g, ht):
        raise InvariantViolation("sampler produced an unsupported element")
    return g


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def format_treeaut(g: TreeAut) -> str:
    lines = [f"treeaut {g.d}", f"translation {format_vertex(g.translation)}"]
    for v in sorted(g.portrait.acts, key=lambda w: (len(w), w)):
        perm = g.portrait.acts[v]
        lines.append(f"portrait {format_vertex(v)} " + " ".join(str(i + 1) for i in perm))
    return "\n".join(lines) + "\n"


def parse_treeaut(text: str) -> TreeAut:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("treeaut"):
        raise ParseError("expected a 'treeaut <d>' header", line=1)
    try:
        d = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ParseError("bad treeaut header", line=1) from None
    translation = ()
    acts = {}
    for idx, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if parts[0] == "translation":
            if len(parts) != 2:
                raise ParseError("bad translation line", line=idx)
            translation = parse_vertex(parts[1], d)
        elif parts[0] == "portrait":
            if len(parts) < 3:
                raise ParseError("bad portrait line", line=idx)
            v = parse_vertex(parts[1], d)
            try:
                perm = tuple(int(p) - 1 for p in parts[2:])
            except ValueError:
                raise ParseError("bad permutation entry", line=idx) from None
            acts[v] = perm
        else:
            raise ParseError(f"unknown record {parts[0]!r}", line=idx)
    try:
        return TreeAut(d, translation, Portrait(d, acts))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
