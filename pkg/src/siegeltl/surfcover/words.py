"""Free-group words, the closed-surface presentation and automorphisms of pi_1.

A word is a tuple of nonzero integers: ``k`` is generator ``k`` (1-based),
``-k`` its inverse. For genus ``g`` the generators are ``a_1..a_g`` (indices
``1..g``) followed by ``b_1..b_g`` (indices ``g+1..2g``), and the single
relator is ``[a_1, b_1] ... [a_g, b_g]`` with ``[a, b] = a b a^-1 b^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import InputError, ValidationError

MAX_GENUS = 5


class Word(tuple):
    """Freely reduced word; construction reduces its input."""

    def __new__(cls, letters=()):
        out = []
        for x in letters:
            x = int(x)
            if x == 0:
                raise InputError("0 is not a letter")
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return super().__new__(cls, out)

    def __mul__(self, other):
        return Word(tuple(self) + tuple(other))

    def inverse(self) -> "Word":
        return Word(-x for x in reversed(self))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(tuple(base) * abs(k))

    def __repr__(self):
        return f"Word({list(self)})"


def cyclic_core(w: Word) -> tuple:
    """Split ``w = u c u^-1`` with ``c`` cyclically reduced; returns ``(u, c)``."""
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return Word(w[:i]), Word(w[i:j + 1])


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int

    def __post_init__(self):
        if self.genus < 2:
            raise InputError(f"genus must be at least 2, got {self.genus}")

    @property
    def rank(self) -> int:
        return 2 * self.genus

    @property
    def relator(self) -> Word:
        g = self.genus
        letters = []
        for i in range(1, g + 1):
            letters += [i, g + i, -i, -(g + i)]
        return Word(letters)

    def names(self) -> list:
        g = self.genus
        return [f"a{i}" for i in range(1, g + 1)] + [f"b{i}" for i in range(1, g + 1)]

    def letter(self, name: str) -> int:
        m = re.fullmatch(r"([aAbB])(\d+)", name)
        if not m:
            raise InputError(f"bad generator token {name!r}")
        i = int(m.group(2))
        if not 1 <= i <= self.genus:
            raise InputError(f"generator {name!r} outside genus {self.genus}")
        idx = i if m.group(1) in "aA" else self.genus + i
        return -idx if m.group(1).isupper() else idx

    def parse_word(self, text: str) -> Word:
        """Tokens ``a1 b2 A1 ...``; capitals are inverses; ``1`` or ``e`` is the empty word."""
        text = text.strip()
        if text in ("", "1", "e"):
            return Word()
        compact = re.sub(r"\s+", "", text)
        if not re.fullmatch(r"([aAbB]\d+)+", compact):
            raise InputError(f"cannot parse word {text!r}")
        return Word(self.letter(t) for t in re.findall(r"[aAbB]\d+", compact))

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        names = self.names()
        return " ".join(names[abs(x) - 1] if x > 0 else names[abs(x) - 1].upper() for x in w)


def surface_presentation(g: int) -> SurfacePresentation:
    if g < 2:
        raise InputError(f"genus must be at least 2, got {g}")
    return SurfacePresentation(g)


def apply_images(images, w: Word) -> Word:
    """Image of ``w`` under the endomorphism sending generator ``k`` to ``images[k-1]``."""
    out = []
    for x in w:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else img.inverse())
    return Word(out)


@dataclass(frozen=True)
class SurfaceAutomorphism:
    """Automorphism of pi_1 given by generator images.

    ``conjugator`` and ``sign`` witness ``f(relator) = w relator^sign w^-1``
    in the free group; only ``sign = +1`` is accepted.
    """

    presentation: SurfacePresentation
    images: tuple
    conjugator: Word
    sign: int = 1

    def __call__(self, w: Word) -> Word:
        return apply_images(self.images, w)

    def compose(self, other: "SurfaceAutomorphism") -> "SurfaceAutomorphism":
        """``self o other``: apply ``other`` first."""
        if other.presentation != self.presentation:
            raise InputError("automorphisms of different surfaces")
        return validate_automorphism(self.presentation, [self(img) for img in other.images])

    def is_identity(self) -> bool:
        return all(img == Word([k]) for k, img in enumerate(self.images, 1))


def conjugacy_witness(w: Word, r: Word):
    """Return ``x`` with ``w = x r x^-1`` (``r`` cyclically reduced), or ``None``."""
    u, c = cyclic_core(w)
    if len(c) != len(r):
        return None
    n = len(r)
    for k in range(n):
        if tuple(c) == tuple(r[k:]) + tuple(r[:k]):
            # c = t^-1 r t with t = r[:k]
            return u * Word(r[:k]).inverse()
    return None


def validate_automorphism(pres: SurfacePresentation, images, conjugator: Word | None = None) -> SurfaceAutomorphism:
    """Check that ``images`` define an orientation-preserving automorphism of pi_1(S).

    The relator must go to a conjugate of itself in the free group; this
    makes the induced map of degree one, hence an automorphism of the
    surface group.
    """
    images = tuple(Word(img) for img in images)
    if len(images) != pres.rank:
        raise InputError(f"expected {pres.rank} generator images, got {len(images)}")
    if any(len(img) == 0 for img in images):
        raise ValidationError("a generator maps to the identity; not a surface automorphism at pi_1 level")
    rel = pres.relator
    image = apply_images(images, rel)
    sign, witness = 1, conjugacy_witness(image, rel)
    if witness is None:
        sign, witness = -1, conjugacy_witness(image, rel.inverse())
    if witness is None:
        raise ValidationError("image of the relator is not conjugate to the relator^{+-1}: "
                              "not a surface automorphism at pi_1 level")
    if sign == -1:
        raise ValidationError("orientation-reversing: relator maps to a conjugate of its inverse")
    if conjugator is not None:
        conjugator = Word(conjugator)
        if conjugator * rel * conjugator.inverse() != image:
            raise ValidationError("supplied conjugator does not conjugate the relator onto its image")
        witness = conjugator
    return SurfaceAutomorphism(pres, images, witness, sign)


def identity_automorphism(pres: SurfacePresentation) -> SurfaceAutomorphism:
    return validate_automorphism(pres, [Word([k]) for k in range(1, pres.rank + 1)])


def letter_counts(w: Word, rank: int) -> np.ndarray:
    v = np.zeros(rank, dtype=np.int64)
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return v


def homology_action(auto: SurfaceAutomorphism) -> np.ndarray:
    """Integer matrix of ``f_*`` on H_1 in the basis a_1..a_g, b_1..b_g (columns are images)."""
    n = auto.presentation.rank
    M = np.column_stack([letter_counts(img, n) for img in auto.images]).astype(np.int64)
    g = auto.presentation.genus
    J = np.zeros((n, n), dtype=np.int64)
    J[:g, g:] = np.eye(g, dtype=np.int64)
    J[g:, :g] = -np.eye(g, dtype=np.int64)
    if not np.array_equal(M.T @ J @ M, J):
        raise ValidationError("homology action is not symplectic; automorphism encoding is wrong")
    return M


def intersection(u, v, genus: int) -> int:
    """Algebraic intersection with ``a_i . b_i = +1``."""
    u, v = np.asarray(u), np.asarray(v)
    g = genus
    return int(np.dot(u[:g], v[g:]) - np.dot(u[g:], v[:g]))


def transvection(c, genus: int) -> np.ndarray:
    """``x -> x + <c, x> c``: homology action of a positive Dehn twist along class ``c``."""
    n = 2 * genus
    c = np.asarray(c, dtype=np.int64)
    E = np.eye(n, dtype=np.int64)
    return np.column_stack([E[:, j] + intersection(c, E[:, j], genus) * c for j in range(n)])


# ---------------------------------------------------------------------------
# text format


def parse_automorphism(text: str) -> SurfaceAutomorphism:
    """Parse ``genus G`` then ``a1 -> <word>`` lines, optional ``conjugator <word>``."""
    rows = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln]
    if not rows:
        raise InputError("empty automorphism file")
    lineno, first = rows[0]
    m = re.fullmatch(r"genus\s+(\d+)", first)
    if not m:
        raise InputError("first line must be 'genus G'", lineno, 1)
    g = int(m.group(1))
    if g < 2:
        raise InputError("genus must be at least 2", lineno, 1)
    if g > MAX_GENUS:
        raise InputError(f"genus {g} exceeds the cap {MAX_GENUS}", lineno, 1)
    pres = SurfacePresentation(g)
    images = {}
    conj = None
    for lineno, ln in rows[1:]:
        if ln.startswith("conjugator"):
            conj = pres.parse_word(ln[len("conjugator"):])
            continue
        mm = re.fullmatch(r"([ab]\d+)\s*->\s*(.*)", ln)
        if not mm:
            raise InputError(f"expected 'a1 -> <word>', got {ln!r}", lineno, 1)
        try:
            k = pres.letter(mm.group(1))
            img = pres.parse_word(mm.group(2))
        except InputError as exc:
            raise InputError(str(exc), lineno, 1) from None
        if k in images:
            raise InputError(f"generator {mm.group(1)} given twice", lineno, 1)
        images[k] = img
    missing = [pres.names()[k - 1] for k in range(1, pres.rank + 1) if k not in images]
    if missing:
        raise InputError(f"missing images for {', '.join(missing)}")
    return validate_automorphism(pres, [images[k] for k in range(1, pres.rank + 1)], conj)


def format_automorphism(auto: SurfaceAutomorphism, comment: str | None = None) -> str:
    pres = auto.presentation
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"genus {pres.genus}")
    for name, img in zip(pres.names(), auto.images):
        lines.append(f"{name} -> {pres.format_word(img)}")
    lines.append(f"conjugator {pres.format_word(auto.conjugator)}")
    return "\n".join(lines) + "\n"
