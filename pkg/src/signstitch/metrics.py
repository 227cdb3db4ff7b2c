"""Corpus-level BLEU-1..4 and ROUGE-L for token sequences.

BLEU uses clipped n-gram counts summed over the corpus and a brevity
penalty from total lengths; a zero precision at any order up to ``k`` makes
BLEU-k zero unless ``smooth`` is set. ROUGE-L is the mean per-sentence F1 of
longest-common-subsequence precision and recall.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInputError

Pair = tuple[Sequence[str], Sequence[str]]


@dataclass(frozen=True)
class ScoreReport:
    bleu: tuple[float, ...]
    rouge_l: float | None
    brevity_penalty: float
    precisions: tuple[float, ...]
    hyp_length: int
    ref_length: int

    def as_dict(self) -> dict:
        out = {f"bleu_{i + 1}": v for i, v in enumerate(self.bleu)}
        out.update(
            bleu=list(self.bleu),
            rouge_l=self.rouge_l,
            brevity_penalty=self.brevity_penalty,
            precisions=list(self.precisions),
            hyp_length=self.hyp_length,
            ref_length=self.ref_length,
        )
        return out


def tokenize(line: str) -> list[str]:
    return line.split()


def _check(corpus: Sequence[Pair]) -> None:
    if not corpus:
        raise InvalidInputError("cannot score an empty corpus")
    for i, (_, ref) in enumerate(corpus):
        if len(ref) == 0:
            raise InvalidInputError(f"pair {i} has an empty reference")


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(corpus: Sequence[Pair], max_n: int = 4, smooth: bool = False) -> ScoreReport:
    """Corpus BLEU-1..``max_n`` on a 0-100 scale.

    ``smooth`` adds one to the match and total counts for orders n >= 2.
    """
    _check(corpus)
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in corpus:
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            h = ngrams(hyp, n)
            r = ngrams(ref, n)
            matches[n - 1] += sum(min(c, r[g]) for g, c in h.items())
            totals[n - 1] += max(len(hyp) - n + 1, 0)

    precisions = []
    for n in range(1, max_n + 1):
        m, t = matches[n - 1], totals[n - 1]
        if smooth and n > 1:
            m, t = m + 1, t + 1
        precisions.append(m / t if t else 0.0)

    if hyp_len == 0:
        bp = 0.0
    else:
        bp = min(1.0, math.exp(1.0 - ref_len / hyp_len))

    scores = []
    log_sum = 0.0
    zero = False
    for k in range(1, max_n + 1):
        p = precisions[k - 1]
        if p == 0.0:
            zero = True
        if zero or bp == 0.0:
            scores.append(0.0)
            continue
        log_sum += math.log(p)
        scores.append(100.0 * bp * math.exp(log_sum / k))
    return ScoreReport(tuple(scores), None, bp, tuple(precisions), hyp_len, ref_len)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l_pair(hyp: Sequence[str], ref: Sequence[str]) -> float:
    lcs = lcs_length(hyp, ref)
    if lcs == 0:
        return 0.0
    p = lcs / len(hyp)
    r = lcs / len(ref)
    return 2 * p * r / (p + r)


def rouge_l(corpus: Sequence[Pair]) -> float:
    _check(corpus)
    return math.fsum(rouge_l_pair(h, r) for h, r in corpus) / len(corpus)


def score(corpus: Sequence[Pair], max_n: int = 4, smooth: bool = False) -> ScoreReport:
    report = bleu(corpus, max_n=max_n, smooth=smooth)
    return ScoreReport(report.bleu, rouge_l(corpus), report.brevity_penalty, report.precisions,
                       report.hyp_length, report.ref_length)


def score_lines(hypotheses: Sequence[str], references: Sequence[str], **kwargs) -> ScoreReport:
    if len(hypotheses) != len(references):
        raise InvalidInputError(
            f"{len(hypotheses)} hypotheses but {len(references)} references"
        )
    return score([(tokenize(h), tokenize(r)) for h, r in zip(hypotheses, references)], **kwargs)
