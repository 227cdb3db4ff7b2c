"""Independent reference implementations used by several test modules."""

from __future__ import annotations

import itertools
import math

import numpy as np


def cosine_argmax(query, candidates: dict):
    """Cosine argmax with plain Python sums, smallest gloss on ties."""
    def cos(u, v):
        dot = sum(a * b for a, b in zip(u, v))
        return dot / (math.sqrt(sum(a * a for a in u)) * math.sqrt(sum(b * b for b in v)))

    best, best_sim = None, -2.0
    for gloss in sorted(candidates):
        s = cos(query, candidates[gloss])
        if s > best_sim:
            best, best_sim = gloss, s
    return best, best_sim


def count_ngram(tokens, gram):
    n = len(gram)
    return sum(1 for i in range(len(tokens) - n + 1) if tuple(tokens[i:i + n]) == gram)


def bleu_scores(corpus, max_n=4):
    """Clipped corpus BLEU using list scans only."""
    matches, totals = [0] * max_n, [0] * max_n
    c = sum(len(h) for h, _ in corpus)
    r = sum(len(ref) for _, ref in corpus)
    for hyp, ref in corpus:
        for n in range(1, max_n + 1):
            seen = set()
            for i in range(len(hyp) - n + 1):
                gram = tuple(hyp[i:i + n])
                totals[n - 1] += 1
                if gram not in seen:
                    seen.add(gram)
                    matches[n - 1] += min(count_ngram(hyp, gram), count_ngram(ref, gram))
    bp = 0.0 if c == 0 else min(1.0, math.exp(1 - r / c))
    out = []
    for k in range(1, max_n + 1):
        ps = [matches[n] / totals[n] if totals[n] else 0.0 for n in range(k)]
        if bp == 0 or min(ps) == 0:
            out.append(0.0)
        else:
            out.append(100 * bp * math.exp(sum(math.log(p) for p in ps) / k))
    return out


def lcs_exhaustive(a, b):
    """Longest common subsequence by trying subsequences of ``a``, longest first."""
    for k in range(min(len(a), len(b)), 0, -1):
        for idx in itertools.combinations(range(len(a)), k):
            it = iter(b)
            if all(a[i] in it for i in idx):
                return k
    return 0


def rouge_l_mean(corpus):
    total = 0.0
    for hyp, ref in corpus:
        lcs = lcs_exhaustive(hyp, ref)
        if lcs:
            p, r = lcs / len(hyp), lcs / len(ref)
            total += 2 * p * r / (p + r)
    return total / len(corpus)


def random_corpus(rnd, pairs=None, vocab="abcde", max_len=8):
    out = []
    for _ in range(pairs or rnd.randint(1, 6)):
        hyp = [rnd.choice(vocab) for _ in range(rnd.randint(0, max_len))]
        ref = [rnd.choice(vocab) for _ in range(rnd.randint(1, max_len))]
        out.append((hyp, ref))
    return out


def analog_gain(f, fc, order):
    """Forward-backward Butterworth amplitude gain, |H|^2 = 1 / (1 + (f/fc)^(2n))."""
    return 1.0 / (1.0 + (f / fc) ** (2 * order))


def bilinear_gain(f, fc, order, fs):
    """Same, with the frequency warping of the bilinear transform."""
    ratio = math.tan(math.pi * f / fs) / math.tan(math.pi * fc / fs)
    return 1.0 / (1.0 + ratio ** (2 * order))


def sine_amplitude(t, y, f):
    """Least-squares amplitude of the ``f`` Hz component of ``y``."""
    basis = np.stack([np.sin(2 * np.pi * f * t), np.cos(2 * np.pi * f * t)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(np.hypot(*coef))
