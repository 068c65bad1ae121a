"""The modular group PSL2(Z), its principal congruence subgroups, coset tables
and Reidemeister-Schreier generators.

Generator names follow S = [[1,1],[0,1]] (translation) and T = [[0,-1],[1,0]]
(inversion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Optional, Sequence

from .arith import prime_factors

ENUMERATION_BOUND = 30


class InconsistentOracle(RuntimeError):
    """A membership oracle contradicted itself or a claimed coset list."""


@dataclass(frozen=True, slots=True)
class UniMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1")

    def __matmul__(self, o: "UniMatrix") -> "UniMatrix":
        return UniMatrix(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self):
        return UniMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "UniMatrix":
        return UniMatrix(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "UniMatrix":
        base = self if k >= 0 else self.inverse()
        out = I
        for _ in range(abs(k)):
            out = out @ base
        return out

    def normalized(self) -> "UniMatrix":
        """Projective representative: first nonzero entry of (c, d, a, b) positive."""
        for x in (self.c, self.d, self.a, self.b):
            if x:
                return self if x > 0 else -self
        return self

    def proj_eq(self, other: "UniMatrix") -> bool:
        return self == other or self == -other

    def is_identity(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def mod(self, n: int) -> "MatModN":
        return MatModN(n, self.a, self.b, self.c, self.d)

    def congruent_identity(self, n: int) -> bool:
        """A == I (mod n), literally."""
        return (self.a - 1) % n == 0 and self.b % n == 0 and self.c % n == 0 and (self.d - 1) % n == 0

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def to_json(self):
        return self.rows()

    @classmethod
    def from_json(cls, rows) -> "UniMatrix":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def max_entry(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def __repr__(self):
        return f"UniMatrix{self.rows()}"


I = UniMatrix(1, 0, 0, 1)
S = UniMatrix(1, 1, 0, 1)
T = UniMatrix(0, -1, 1, 0)
MINUS_I = UniMatrix(-1, 0, 0, -1)


@dataclass(frozen=True, slots=True)
class MatModN:
    modulus: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        n = self.modulus
        if n < 1:
            raise ValueError("modulus must be positive")
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % n)
        if (self.a * self.d - self.b * self.c - 1) % n:
            raise ValueError(f"determinant not 1 mod {n}")

    def __matmul__(self, o: "MatModN") -> "MatModN":
        if o.modulus != self.modulus:
            raise ValueError("moduli differ")
        return MatModN(
            self.modulus,
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self):
        return MatModN(self.modulus, -self.a, -self.b, -self.c, -self.d)

    def key(self) -> tuple:
        """Projective class key: the smaller of (c, d, a, b) for m and -m."""
        n = self.modulus
        t = (self.c, self.d, self.a, self.b)
        u = tuple((-x) % n for x in t)
        return min(t, u)

    def proj_eq(self, other: "MatModN") -> bool:
        return self.key() == other.key()

    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]


def proj_key_mod(m: UniMatrix, n: int) -> tuple:
    """Projective key of m reduced mod n, without building a MatModN."""
    t = (m.c % n, m.d % n, m.a % n, m.b % n)
    u = tuple((-x) % n for x in t)
    return min(t, u)


# ---------------------------------------------------------------------------
# index, enumeration, lifting

def index_gamma(N: int) -> int:
    """[PSL2(Z) : Gamma(N)]."""
    if N <= 0:
        raise ValueError("level must be a positive integer")
    if N == 1:
        return 1
    if N == 2:
        # -I = I mod 2, so the +-I quotient is trivial
        return 6
    num, den = N**3, 2
    for p in prime_factors(N):
        num *= p * p - 1
        den *= p * p
    return num // den


def enumerate_psl2_modn(N: int) -> list[MatModN]:
    """One representative per +-class of SL2(Z/NZ), by a direct scan of entries."""
    if N < 1:
        raise ValueError("level must be a positive integer")
    if N > ENUMERATION_BOUND:
        raise ValueError(f"enumeration bound exceeded: N={N} > {ENUMERATION_BOUND}")
    out = []
    for c in range(N):
        for d in range(N):
            for a in range(N):
                for b in range(N):
                    if (a * d - b * c - 1) % N:
                        continue
                    t = (c, d, a, b)
                    if t <= tuple((-x) % N for x in t):
                        out.append(MatModN(N, a, b, c, d))
    return out


def lift_modn(m: MatModN) -> UniMatrix:
    """An integer matrix of determinant 1 reducing to m mod N.

    The bottom row is (c0, d0 + t*N) with c0 in [1, N] and t the product of the
    primes dividing c0 but not d0, which makes the row coprime; the top row is
    then fixed by a unipotent correction and shortened by multiples of N times
    the bottom row.  All entries are O(N^3), typically O(N^2).
    """
    N = m.modulus
    if N == 1:
        return I
    c0 = m.c if m.c else N
    d0 = m.d
    t = 1
    for p in prime_factors(c0):
        if d0 % p:
            t *= p
    d1 = d0 + t * N
    _, x, y = _ext_gcd(d1, c0)  # x*d1 + y*c0 = 1
    base = UniMatrix(x, -y, c0, d1)
    inv = base.inverse()
    # m * base^-1 = [[1, k], [0, 1]] (mod N)
    k = (m.a * inv.b + m.b * inv.d) % N
    a1, b1 = x + k * c0, -y + k * d1
    q = round((a1 * c0 + b1 * d1) / (N * (c0 * c0 + d1 * d1)))
    return UniMatrix(a1 - q * N * c0, b1 - q * N * d1, c0, d1)


def _ext_gcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def coset_reps_gamma(N: int) -> list[UniMatrix]:
    """Lifts of PSL2(Z/NZ): a complete set of representatives for Gamma/Gamma(N)."""
    return [lift_modn(m) for m in enumerate_psl2_modn(N)]


# ---------------------------------------------------------------------------
# words in S and T

Word = list  # list of (letter, power) with letter in {"S", "T"}


def signed_st_word(A: UniMatrix) -> tuple[Word, int]:
    """Word w and sign s with product(w) = s*A, by continued-fraction descent."""
    word: Word = []
    M = A
    while M.c != 0:
        k = M.a // M.c
        if k:
            word.append(("S", k))
            M = UniMatrix(M.a - k * M.c, M.b - k * M.d, M.c, M.d)
        # M = T * (T^-1 M), T^-1 = [[0,1],[-1,0]]
        word.append(("T", 1))
        M = UniMatrix(M.c, M.d, -M.a, -M.b)
    sign = M.a  # M = sign * [[1, m], [0, 1]]
    m = M.b * sign
    if m:
        word.append(("S", m))
    return word, sign


def decompose_st(A: UniMatrix) -> Word:
    """A word over S^k and T multiplying out to +-A."""
    return signed_st_word(A)[0]


def exact_st_word(A: UniMatrix) -> Word:
    """A word multiplying out to A exactly (T^2 = -I absorbs the sign)."""
    word, sign = signed_st_word(A)
    if sign < 0:
        word = word + [("T", 1), ("T", 1)]
    return word


def word_matrix(word: Word) -> UniMatrix:
    out = I
    for letter, k in word:
        if letter == "S":
            out = out @ UniMatrix(1, k, 0, 1)
        elif letter == "T":
            out = out @ (T ** k)
        else:
            raise ValueError(f"unknown letter {letter!r}")
    return out


def format_word(word: Word) -> str:
    return " ".join(l if k == 1 else f"{l}^{k}" for l, k in word)


def parse_word(text: str) -> Word:
    word = []
    for tok in text.split():
        letter, _, power = tok.partition("^")
        if letter not in ("S", "T"):
            raise ValueError(f"unknown letter in word token {tok!r}")
        word.append((letter, int(power) if power else 1))
    return word


# ---------------------------------------------------------------------------
# subgroups

@dataclass
class SubgroupHandle:
    """A finite-index subgroup of PSL2(Z) given by a projective membership predicate.

    `coset_key`, when present, maps A to a hashable key with
    key(A) == key(B) iff A B^-1 is a member; it lets coset tables be built in
    linear rather than quadratic time.
    """

    modulus_hint: int
    member: Callable[[UniMatrix], bool]
    index_hint: Optional[int] = None
    coset_key: Optional[Callable[[UniMatrix], Hashable]] = None
    name: str = "H"
    principal_level: Optional[int] = None
    _table: Optional["CosetTable"] = field(default=None, repr=False, compare=False)

    def __contains__(self, A: UniMatrix) -> bool:
        return self.member(A)

    def table(self) -> "CosetTable":
        if self._table is None:
            self._table = coset_table(self)
        return self._table

    @property
    def index(self) -> int:
        if self.index_hint is not None:
            return self.index_hint
        return len(self.table().reps)


def gamma(N: int) -> SubgroupHandle:
    """Principal congruence subgroup Gamma(N)."""
    if N < 1:
        raise ValueError("level must be positive")
    return SubgroupHandle(
        modulus_hint=N,
        member=lambda A: A.congruent_identity(N) or (-A).congruent_identity(N),
        index_hint=index_gamma(N),
        coset_key=lambda A: proj_key_mod(A, N),
        name=f"Gamma({N})",
        principal_level=N,
    )


def full_group() -> SubgroupHandle:
    return gamma(1)


def gamma0(N: int) -> SubgroupHandle:
    units = [u for u in range(1, N + 1) if math.gcd(u, N) == 1]

    def key(A):
        return min(((u * A.c) % N, (u * A.d) % N) for u in units) if N > 1 else ()

    idx = N
    for p in prime_factors(N):
        idx = idx * (p + 1) // p
    return SubgroupHandle(N, lambda A: A.c % N == 0, idx, key, f"Gamma0({N})")


def gamma1(N: int) -> SubgroupHandle:
    def member(A):
        return A.c % N == 0 and ((A.a - 1) % N == 0 and (A.d - 1) % N == 0
                                 or (A.a + 1) % N == 0 and (A.d + 1) % N == 0)

    def key(A):
        t = (A.c % N, A.d % N)
        return min(t, ((-A.c) % N, (-A.d) % N))

    idx = index_gamma(N) // N if N > 2 else (1 if N == 1 else 3)
    return SubgroupHandle(N, member, idx, key, f"Gamma1({N})")


# ---------------------------------------------------------------------------
# coset tables

@dataclass
class CosetTable:
    """Right cosets H r_i with the right action of S and T as index permutations."""

    reps: list[UniMatrix]
    act_S: list[int]
    act_T: list[int]

    def __len__(self):
        return len(self.reps)


def _locate(H: SubgroupHandle, x: UniMatrix, reps, key_index) -> Optional[int]:
    if H.coset_key is not None:
        return key_index.get(H.coset_key(x))
    found = None
    for i, r in enumerate(reps):
        if H.member(x @ r.inverse()):
            if found is not None:
                raise InconsistentOracle(f"{x} lies in two listed cosets ({found}, {i})")
            found = i
            if H.coset_key is None:
                break
    return found


def coset_table(H: SubgroupHandle, limit: int = 10**6) -> CosetTable:
    """Breadth-first enumeration of H\\Gamma from the identity coset."""
    reps = [I]
    key_index = {}
    if H.coset_key is not None:
        key_index[H.coset_key(I)] = 0
    act = {"S": [], "T": []}
    gens = (("S", S), ("T", T))
    i = 0
    while i < len(reps):
        for name, g in gens:
            x = reps[i] @ g
            j = _locate(H, x, reps, key_index)
            if j is None:
                j = len(reps)
                reps.append(x)
                if H.coset_key is not None:
                    key_index[H.coset_key(x)] = j
                if len(reps) > limit:
                    raise RuntimeError(f"coset enumeration exceeded {limit} cosets")
            act[name].append(j)
        i += 1
    if H.index_hint is not None and len(reps) != H.index_hint:
        raise InconsistentOracle(f"{H.name}: found {len(reps)} cosets, index hint {H.index_hint}")
    return CosetTable(reps, act["S"], act["T"])


def check_coset_reps(H: SubgroupHandle, reps: Sequence[UniMatrix]) -> None:
    """Raise InconsistentOracle unless reps are pairwise inequivalent."""
    if H.coset_key is not None:
        keys = [H.coset_key(r) for r in reps]
        if len(set(keys)) != len(keys):
            raise InconsistentOracle("two representatives share a coset key")
        for r in reps[: min(len(reps), 64)]:
            for s in reps[: min(len(reps), 64)]:
                same = H.member(r @ s.inverse())
                if same != (H.coset_key(r) == H.coset_key(s)):
                    raise InconsistentOracle("coset key disagrees with membership")
        return
    for i, r in enumerate(reps):
        for s in reps[i + 1:]:
            if H.member(r @ s.inverse()):
                raise InconsistentOracle(f"representatives {r} and {s} lie in the same coset")


def schreier_generators(
    H: SubgroupHandle, ambient_reps: Optional[Sequence[UniMatrix]] = None
) -> list[UniMatrix]:
    """Schreier generators r g (rep(r g))^-1 over coset reps r and g in {S, T}.

    Trivial and repeated (up to sign) generators are dropped.  Every output is
    checked against the membership predicate.
    """
    if ambient_reps is None:
        reps = H.table().reps
    else:
        reps = list(ambient_reps)
        check_coset_reps(H, reps)
        if H.index_hint is not None and len(reps) != H.index_hint:
            raise InconsistentOracle(f"{len(reps)} representatives for index {H.index_hint}")
    key_index = {}
    if H.coset_key is not None:
        key_index = {H.coset_key(r): i for i, r in enumerate(reps)}
    out, seen = [], set()
    for r in reps:
        for g in (S, T):
            x = r @ g
            j = _locate(H, x, reps, key_index)
            if j is None:
                raise InconsistentOracle(f"{x} lies in no listed coset; representative list incomplete")
            s = x @ reps[j].inverse()
            if s.is_identity():
                continue
            s = s.normalized()
            if s in seen:
                continue
            if not H.member(s):
                raise InconsistentOracle(f"Schreier generator {s} fails membership")
            seen.add(s)
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# Todd-Coxeter over PSL2(Z) = < S, T | T^2, (S T)^3 >

_GENS = 4  # columns: S, S^-1, T, T^-1
_INV = (1, 0, 3, 2)
_RELATORS = ((2, 2), (0, 2, 0, 2, 0, 2))


def _word_letters(word: Word) -> list[int]:
    out = []
    for letter, k in word:
        if letter == "S":
            out.extend([0 if k > 0 else 1] * abs(k))
        else:
            out.extend([2 if k > 0 else 3] * abs(k))
    return out


def todd_coxeter_index(subgroup_words: Sequence[Word], max_cosets: int = 2_000_000) -> int:
    """Index in PSL2(Z) of the subgroup generated by the given words (HLT strategy)."""
    table: list[list[Optional[int]]] = [[None] * _GENS]
    parent = [0]

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    def define(c, x):
        d = len(table)
        if d >= max_cosets:
            raise RuntimeError("Todd-Coxeter exceeded coset limit")
        table.append([None] * _GENS)
        parent.append(d)
        table[c][x] = d
        table[d][_INV[x]] = c

    def merge(k, l, queue):
        k, l = find(k), find(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        parent[l] = k
        queue.append(l)

    def coincidence(a, b):
        queue = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(_GENS):
                f = table[e][x]
                if f is None:
                    continue
                if table[f][_INV[x]] == e:
                    table[f][_INV[x]] = None
                e1, f1 = find(e), find(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][_INV[x]] is not None:
                    merge(e1, table[f1][_INV[x]], queue)
                else:
                    table[e1][x] = f1
                    table[f1][_INV[x]] = e1

    def scan_and_fill(c, w):
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][_INV[w[j]]] is not None:
                b = table[b][_INV[w[j]]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][_INV[w[i]]] = f
                return
            define(f, w[i])

    for w in subgroup_words:
        letters = _word_letters(w)
        if letters:
            scan_and_fill(0, letters)
    c = 0
    while c < len(table):
        for rel in _RELATORS:
            if parent[c] != c:
                break
            scan_and_fill(c, rel)
        if parent[c] == c:
            for x in range(_GENS):
                if table[c][x] is None:
                    define(c, x)
        c += 1
    return sum(1 for c in range(len(table)) if parent[c] == c)
