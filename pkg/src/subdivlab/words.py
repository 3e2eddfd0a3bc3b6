"""Words, canonical normal forms and the predecessor map.

Elements are represented internally by a stack state ("piling"): one stack
per generator, holding that generator's own letters as +1/-1 entries and a 0
placeholder for every letter of a non-commuting generator.  Pushing a letter
cancels eagerly against its inverse when nothing non-commuting sits between
them, so the state is a complete invariant: two words give the same state
iff they define the same group element.

The human-facing normal form decomposes an element into *syllables*:
maximal blocks lying in a spherical subgroup, extracted greedily in
generator order.  Each syllable with exponent vector e expands into a chain
of diagonal generators t_{S_m} ... t_{S_1} with S_r = {g : |e_g| >= r}
(smallest set first), so S_m <= ... <= S_1 are nested.  The total chain
length is `tlen`; dropping the leftmost chain entry of the first syllable
gives the predecessor.
"""

from __future__ import annotations

import re

from .graphs import DefiningGraph, make_cell

# Letter: (generator index, sign).  Word: tuple of letters.
# State: tuple over generators of tuples of {+1,-1,0}.
# Syllable: tuple of (generator index, nonzero exponent), sorted by index.
# NormalForm: tuple of syllables.

IDENTITY_NF = ()


class WordError(ValueError):
    pass


_TOKEN = re.compile(r"^([^\^\s]+)(?:\^(-?\d+))?$")


def parse_word(graph: DefiningGraph, text: str):
    """Parse word literals like "a^5 b^-2 c^3" into a letter tuple."""
    letters = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise WordError("bad token %r" % tok)
        name, exp = m.group(1), m.group(2)
        if name not in graph.index:
            raise WordError("unknown generator %r" % name)
        k = int(exp) if exp is not None else 1
        if k == 0:
            raise WordError("zero exponent in %r" % tok)
        sign = 1 if k > 0 else -1
        letters.extend([(graph.index[name], sign)] * abs(k))
    return tuple(letters)


def empty_state(graph: DefiningGraph):
    return tuple(() for _ in range(graph.d))


def push_letter(piles, graph: DefiningGraph, i, s):
    """Push one letter onto mutable piles (lists), cancelling eagerly."""
    p = piles[i]
    if p and p[-1] == -s:
        p.pop()
        for j in graph.noncommuters[i]:
            piles[j].pop()
    else:
        p.append(s)
        for j in graph.noncommuters[i]:
            piles[j].append(0)


def state_of_word(graph: DefiningGraph, word):
    piles = [[] for _ in range(graph.d)]
    for i, s in word:
        push_letter(piles, graph, i, s)
    return tuple(map(tuple, piles))


def apply_letters(state, graph: DefiningGraph, letters):
    """Right-multiply a state by a letter sequence; returns a new state."""
    piles = [list(p) for p in state]
    for i, s in letters:
        push_letter(piles, graph, i, s)
    return tuple(map(tuple, piles))


def cell_letters(cell):
    """Letters of a diagonal generator t_S (order irrelevant: S is a clique)."""
    return cell


def inverse_cell(cell):
    return tuple((i, -s) for i, s in cell)


def state_length(state) -> int:
    """Number of genuine letters (word length of the reduced word)."""
    return sum(1 for p in state for x in p if x)


def syllables_of_state(graph: DefiningGraph, state):
    """Greedy maximal spherical decomposition of a piling state.

    Scans front-available letters in generator order; a letter joins the
    current syllable iff its generator commutes with every generator already
    admitted (or is one of them), repeating until the syllable stops growing.
    """
    piles = [list(p) for p in state]
    head = [0] * graph.d
    remaining = state_length(state)
    adj = graph.adj

    def pop_front(i):
        head[i] += 1
        for j in graph.noncommuters[i]:
            # the front of a blocked pile is necessarily a 0 marker
            assert piles[j][head[j]] == 0
            head[j] += 1

    out = []
    while remaining:
        exps = {}
        mask = 0
        changed = True
        while changed:
            changed = False
            for i in range(graph.d):
                while head[i] < len(piles[i]) and piles[i][head[i]] != 0:
                    s = piles[i][head[i]]
                    if i in exps:
                        # same-sign absorption; an opposite sign cannot be
                        # front-available inside one syllable
                        assert s * exps[i] > 0
                    elif mask & ~adj[i] & ~(1 << i):
                        break  # fails to commute with an admitted generator
                    exps[i] = exps.get(i, 0) + s
                    mask |= 1 << i
                    pop_front(i)
                    remaining -= 1
                    changed = True
        out.append(tuple(sorted(exps.items())))
    return tuple(out)


def normalize(graph: DefiningGraph, word):
    """Canonical normal form; equal exactly on words of the same element."""
    return syllables_of_state(graph, state_of_word(graph, word))


def nf_to_word(nf):
    letters = []
    for syll in nf:
        for i, e in syll:
            letters.extend([(i, 1 if e > 0 else -1)] * abs(e))
    return tuple(letters)


def state_of_nf(graph: DefiningGraph, nf):
    return state_of_word(graph, nf_to_word(nf))


def equals(graph: DefiningGraph, u, v) -> bool:
    return state_of_word(graph, u) == state_of_word(graph, v)


def syllable_chain(syll):
    """Diagonal-generator chain of one syllable, smallest set first."""
    m = max(abs(e) for _, e in syll)
    chain = []
    for r in range(m, 0, -1):
        chain.append(tuple((i, 1 if e > 0 else -1) for i, e in syll if abs(e) >= r))
    return chain


def t_chain(nf):
    """Full diagonal-generator chain of a normal form."""
    out = []
    for syll in nf:
        out.extend(syllable_chain(syll))
    return out


def tlen(nf) -> int:
    return sum(max(abs(e) for _, e in syll) for syll in nf)


def word_length(nf) -> int:
    return sum(abs(e) for syll in nf for _, e in syll)


def nf_key(nf):
    """Total canonical order on elements used for every tie-break."""
    return (word_length(nf), len(nf), nf)


def predecessor(graph: DefiningGraph, nf):
    """Drop the leftmost diagonal generator of the first syllable's chain,
    i.e. decrement every exponent of maximal absolute value by one."""
    if not nf:
        raise WordError("identity has no predecessor")
    first = nf[0]
    m = max(abs(e) for _, e in first)
    new_first = tuple(
        (i, e - (1 if e > 0 else -1)) if abs(e) == m else (i, e) for i, e in first)
    new_first = tuple((i, e) for i, e in new_first if e != 0)
    rest = ((new_first,) if new_first else ()) + nf[1:]
    # re-normalize: dropping a chain entry may let syllables merge
    return normalize(graph, nf_to_word(rest))


def translate(graph: DefiningGraph, nf, cell):
    """Normal form of (element * t_cell) for a spherical signed set."""
    from .graphs import cell_is_ideal
    cell = make_cell(cell)
    if cell_is_ideal(graph, cell):
        raise WordError("not a spherical set: %r" % (cell,))
    return normalize(graph, nf_to_word(nf) + tuple(cell))


def nf_str(graph: DefiningGraph, nf) -> str:
    if not nf:
        return "1"
    parts = []
    for syll in nf:
        factors = []
        for i, e in syll:
            factors.append(graph.generators[i] + ("" if e == 1 else "^%d" % e))
        parts.append(" ".join(factors))
    return " | ".join(parts)


def nf_parse(graph: DefiningGraph, text: str):
    """Inverse of nf_str (used by the level cache)."""
    if text == "1":
        return IDENTITY_NF
    word = []
    for part in text.split(" | "):
        word.extend(parse_word(graph, part))
    return normalize(graph, tuple(word))
