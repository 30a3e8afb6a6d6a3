"""Triviality tests and constraint-satisfying matchings between diagrams.

Two diagrams are compared per homological dimension.  A class [b, d) of the
left diagram may match [b', d') of the right diagram when

    b' <= b < d' <= d,   b <= alpha(b'),   inverse_alpha(d) <= d',

and a certificate requires every class not trivial at slack alpha to be
matched on both sides.  The search saturates the required classes of each
side by augmenting paths and merges the two matchings so both stay covered;
a certificate is therefore found whenever one exists.
"""

from dataclasses import dataclass

from .persistence import PersistenceDiagram
from .translations import TranslationFunction, evaluate, translation_inverse


@dataclass(frozen=True)
class MatchingCertificate:
    """An injective constraint-satisfying matching covering all nontrivial classes.

    pairs holds (left index, right index) into the diagrams' class lists;
    the unmatched lists hold the remaining class indices, all alpha-trivial.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_trivial_left: tuple[int, ...]
    unmatched_trivial_right: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return True


@dataclass(frozen=True)
class MatchingFailure:
    """An alpha-nontrivial class that no constraint-satisfying matching covers."""

    side: str
    index: int
    cls: tuple[int, float, float]

    @property
    def ok(self) -> bool:
        return False


def alpha_trivial(birth: float, death: float, alpha: TranslationFunction) -> bool:
    """True iff the interval [birth, death) dies within slack alpha of its birth."""
    if not birth < death:
        raise ValueError(f"require birth < death, got [{birth},{death})")
    return death <= evaluate(alpha, birth)


def _augment(u0, adj, match_l, match_r):
    """BFS augmenting path from unmatched left u0; True if matching grew."""
    parent_right = {}
    frontier = [u0]
    visited_left = {u0}
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v in parent_right:
                    continue
                parent_right[v] = u
                w = match_r.get(v)
                if w is None:
                    while True:
                        u_prev = parent_right[v]
                        old = match_l.get(u_prev)
                        match_l[u_prev] = v
                        match_r[v] = u_prev
                        if u_prev == u0:
                            return True
                        v = old
                elif w not in visited_left:
                    visited_left.add(w)
                    nxt.append(w)
        frontier = nxt
    return False


def _saturate(required, adj):
    """Matching (left -> right) covering every required left, or a witness."""
    match_l: dict = {}
    match_r: dict = {}
    for u in required:
        if not _augment(u, adj, match_l, match_r):
            return None, u
    return match_l, None


def _merge_covering(match_a: dict, match_b_rl: dict) -> dict:
    """Combine a left-saturating and a right-saturating matching.

    Starts from match_a (left -> right) and walks alternating paths to pull
    in every required right vertex of match_b_rl (right -> left) without
    ever unmatching a matched left vertex or a required right vertex.
    """
    match_l = dict(match_a)
    covered_right = set(match_l.values())
    for r0 in match_b_rl:
        if r0 in covered_right:
            continue
        r = r0
        while True:
            x = match_b_rl.get(r)
            if x is None:
                break  # r is not required after all; safe to leave uncovered
            old = match_l.get(x)
            match_l[x] = r
            covered_right.add(r)
            if old is None:
                break
            covered_right.discard(old)
            r = old
    return match_l


def find_matching(d1: PersistenceDiagram, d2: PersistenceDiagram,
                  alpha: TranslationFunction):
    """Search for a certificate matching between two diagrams under slack alpha.

    Returns a MatchingCertificate, or a MatchingFailure naming an unmatched
    alpha-nontrivial class when no constraint-satisfying matching covers it.
    """
    if not isinstance(alpha, TranslationFunction):
        raise TypeError("alpha must be a TranslationFunction with an exact generalized inverse")
    pairs = []
    matched_left: set = set()
    matched_right: set = set()
    dims = sorted({c[0] for c in d1.classes} | {c[0] for c in d2.classes})
    for dim in dims:
        lefts = [i for i, c in enumerate(d1.classes) if c[0] == dim]
        rights = [j for j, c in enumerate(d2.classes) if c[0] == dim]
        lb = [d1.classes[i][1] for i in lefts]
        ld = [d1.classes[i][2] for i in lefts]
        rb = [d2.classes[j][1] for j in rights]
        rd = [d2.classes[j][2] for j in rights]
        l_inv_d = [translation_inverse(alpha, d) for d in ld]
        r_alpha_b = [evaluate(alpha, b) for b in rb]

        adj = []
        for a in range(len(lefts)):
            adj.append([v for v in range(len(rights))
                        if rb[v] <= lb[a] < rd[v] <= ld[a]
                        and lb[a] <= r_alpha_b[v]
                        and l_inv_d[a] <= rd[v]])

        req_left = [a for a in range(len(lefts)) if not ld[a] <= evaluate(alpha, lb[a])]
        req_right = [v for v in range(len(rights)) if not rd[v] <= r_alpha_b[v]]

        ml, bad = _saturate(req_left, adj)
        if ml is None:
            i = lefts[bad]
            return MatchingFailure("left", i, d1.classes[i])
        adj_t = [[] for _ in range(len(rights))]
        for a, vs in enumerate(adj):
            for v in vs:
                adj_t[v].append(a)
        mr, bad = _saturate(req_right, adj_t)
        if mr is None:
            j = rights[bad]
            return MatchingFailure("right", j, d2.classes[j])

        merged = _merge_covering(ml, mr)
        for a, v in merged.items():
            pairs.append((lefts[a], rights[v]))
            matched_left.add(lefts[a])
            matched_right.add(rights[v])

    pairs.sort()
    un_left = tuple(i for i in range(len(d1.classes)) if i not in matched_left)
    un_right = tuple(j for j in range(len(d2.classes)) if j not in matched_right)
    return MatchingCertificate(tuple(pairs), un_left, un_right)


def check_certificate(d1: PersistenceDiagram, d2: PersistenceDiagram,
                      alpha: TranslationFunction, cert: MatchingCertificate) -> str | None:
    """Independent validation of a certificate; None if sound, else a message.

    Re-checks injectivity, the three interval constraints with equal
    dimensions on every pair, the exact partition of both class lists, and
    alpha-triviality of everything unmatched.
    """
    seen_l = set()
    seen_r = set()
    for i, j in cert.pairs:
        if i in seen_l:
            return f"left index {i} matched twice"
        if j in seen_r:
            return f"right index {j} matched twice"
        seen_l.add(i)
        seen_r.add(j)
        dim, b, d = d1.classes[i]
        dimp, bp, dp = d2.classes[j]
        if dim != dimp:
            return f"pair ({i},{j}) crosses dimensions {dim} != {dimp}"
        if not (bp <= b < dp <= d):
            return f"pair ({i},{j}) violates interval containment"
        if not b <= evaluate(alpha, bp):
            return f"pair ({i},{j}) violates the birth bound"
        if not translation_inverse(alpha, d) <= dp:
            return f"pair ({i},{j}) violates the death bound"
    if sorted(seen_l | set(cert.unmatched_trivial_left)) != list(range(len(d1.classes))) \
            or seen_l & set(cert.unmatched_trivial_left):
        return "left indices are not partitioned between pairs and unmatched"
    if sorted(seen_r | set(cert.unmatched_trivial_right)) != list(range(len(d2.classes))) \
            or seen_r & set(cert.unmatched_trivial_right):
        return "right indices are not partitioned between pairs and unmatched"
    for i in cert.unmatched_trivial_left:
        _, b, d = d1.classes[i]
        if not alpha_trivial(b, d, alpha):
            return f"unmatched left class {i} is not trivial at this slack"
    for j in cert.unmatched_trivial_right:
        _, b, d = d2.classes[j]
        if not alpha_trivial(b, d, alpha):
            return f"unmatched right class {j} is not trivial at this slack"
    return None
