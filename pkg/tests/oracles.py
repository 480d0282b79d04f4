"""Independent reference implementations used to verify the real ones.

Everything here is written for transparency, not speed: exact rational
arithmetic where possible (fractions), arbitrary precision where square roots
or logarithms are unavoidable (mpmath), and naive scanning algorithms whose
correctness is obvious by inspection.  None of it imports from profcat.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpf
from mpmath import log as mp_log
from mpmath import sqrt as mp_sqrt

mp.dps = 40


# ---------------------------------------------------------------------------
# Log-likelihood statistic (arbitrary precision)
# ---------------------------------------------------------------------------


def oracle_g2(a: int, b: int, c: int, d: int) -> mpf:
    """2 * (a*ln(a/E1) + b*ln(b/E2)) with E_i the expected cell counts under
    independence; zero observed cells contribute zero."""
    rate = (mpf(a) + b) / (mpf(c) + d)
    ll = mpf(0)
    if a > 0:
        ll += a * mp_log(a / (c * rate))
    if b > 0:
        ll += b * mp_log(b / (d * rate))
    return 2 * ll


# ---------------------------------------------------------------------------
# Cosine ranking (exact ordering, high-precision weights)
# ---------------------------------------------------------------------------


def oracle_rank(
    doc: dict[str, int],
    profiles: dict[str, dict[str, Fraction]],
    k: int,
) -> list[tuple[str, float]]:
    """Rank profiles against a document by cosine similarity.

    Ordering is decided exactly: cosines are compared through their squares,
    which are rational (dot^2 / (|d|^2 * |p|^2)), so no rounding is involved.
    Reported weights are computed at 40 significant digits and rounded to
    float at the end.
    """
    d2 = Fraction(0)
    for count in doc.values():
        d2 += Fraction(count) ** 2
    scored: list[tuple[Fraction, str, Fraction, Fraction]] = []
    for code, associates in profiles.items():
        dot = Fraction(0)
        p2 = Fraction(0)
        for feature, weight in associates.items():
            p2 += weight * weight
            if feature in doc:
                dot += doc[feature] * weight
        if dot == 0:
            continue
        cos_sq = dot * dot / (d2 * p2)
        scored.append((cos_sq, code, dot, p2))
    scored.sort(key=lambda t: (-t[0], t[1]))
    out: list[tuple[str, float]] = []
    for cos_sq, code, dot, p2 in scored[:k]:
        weight = mpf(dot.numerator) / dot.denominator / mp_sqrt(
            mpf((d2 * p2).numerator) / (d2 * p2).denominator
        )
        out.append((code, min(1.0, float(weight))))
    return out


# ---------------------------------------------------------------------------
# Tokenisation (character scanner, no regex)
# ---------------------------------------------------------------------------

_JOINERS = ("-", "'", "’")


def _word_char(ch: str) -> bool:
    return ch != "_" and (ch.isalpha() or ch.isdigit())


def oracle_tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        if not _word_char(text[i]):
            i += 1
            continue
        j = i
        while True:
            while j < n and _word_char(text[j]):
                j += 1
            if j < n and text[j] in _JOINERS and j + 1 < n and _word_char(text[j + 1]):
                j += 1
                continue
            break
        token = text[i:j]
        i = j
        if any(ch.isalpha() for ch in token):
            tokens.append(token.lower())
    return tokens


# ---------------------------------------------------------------------------
# Stop filtering (two explicit passes)
# ---------------------------------------------------------------------------


def oracle_stop_filter(
    tokens: list[str],
    single: set[str],
    multi: set[tuple[str, ...]],
) -> list[str]:
    """Pass 1: scan left to right, removing at each position the longest
    matching phrase (matches never overlap).  Pass 2: drop single stops."""
    kept: list[str] = []
    i = 0
    while i < len(tokens):
        longest = 0
        for phrase in multi:
            size = len(phrase)
            if size > longest and tuple(tokens[i : i + size]) == phrase:
                longest = size
        if longest:
            i += longest
        else:
            kept.append(tokens[i])
            i += 1
    return [t for t in kept if t not in single]


# ---------------------------------------------------------------------------
# Micro metrics (exact rationals)
# ---------------------------------------------------------------------------


def oracle_micro(
    counts: list[tuple[int, int, int]],  # (tp, precision denominator, gold size)
) -> tuple[Fraction, Fraction, Fraction]:
    tp = sum(t for t, _, _ in counts)
    assigned = sum(a for _, a, _ in counts)
    gold = sum(g for _, _, g in counts)
    precision = Fraction(tp, assigned) if assigned else Fraction(0)
    recall = Fraction(tp, gold)
    if precision + recall == 0:
        return precision, recall, Fraction(0)
    f1 = 2 * precision * recall / (precision + recall)
    return precision, recall, f1


# ---------------------------------------------------------------------------
# Fold size accounting
# ---------------------------------------------------------------------------


def oracle_fold_sizes(n_docs: int, n_folds: int) -> list[int]:
    """Round-robin assignment sizes: the first (n_docs mod n_folds) folds get
    one extra document."""
    base = n_docs // n_folds
    extra = n_docs % n_folds
    return [base + 1 if i < extra else base for i in range(n_folds)]
