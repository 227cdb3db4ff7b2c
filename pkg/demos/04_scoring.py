"""
Scoring translations
====================

Corpus BLEU-1..4 and ROUGE-L on a handful of whitespace-tokenised lines.
"""

import json

from signstitch.metrics import score_lines

refs = [
    "am tag scheint die sonne",
    "morgen gibt es im norden regen",
    "der wind weht schwach aus west",
]
hyps = [
    "am tag scheint sonne",
    "morgen im norden regen",
    "der wind weht aus west",
]

# %%
# Shorter hypotheses trigger the brevity penalty; higher-order precisions
# fall off quickly on short lines.
report = score_lines(hyps, refs)
print(json.dumps(report.as_dict(), indent=1))

# %%
# With tiny corpora a single missing 4-gram zeroes BLEU-4; add-one
# smoothing on the higher orders keeps the score informative.
print("single line, plain:   ", score_lines(hyps[:1], refs[:1]).bleu)
print("single line, smoothed:", score_lines(hyps[:1], refs[:1], smooth=True).bleu)
