# metrics.py - formula recognition metrics
# coding: utf-8
#
# Copyright (C) 2024-2025 The python-cdm developers
#
# This library is free software; you can redistribute it and/or
# modify it under the terms of the GNU Lesser General Public
# License as published by the Free Software Foundation; either
# version 2.1 of the License, or (at your option) any later version.
#
# This library is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public
# License along with this library; if not, write to the Free Software
# Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA
# 02110-1301 USA

"""Formula recognition metrics.

The CDM score of a formula pair is the F1 score over the matched glyphs:
pairs that survive validation are true positives, leftover predicted glyphs
false positives and leftover ground truth glyphs false negatives.

>>> from cdm.matcher import MatchSet
>>> score = cdm_score(MatchSet(pairs=[None] * 16, unmatched_gt=[None], unmatched_pred=[None]))
>>> round(score.f1, 4)
0.9412
>>> cdm_score(MatchSet()).f1
1.0
>>> cdm_score(MatchSet(pairs=[None] * 3), render_ok=False, failure='CompileError').f1
0.0

ExpRate@CDM counts the formulas that match perfectly:

>>> exprate_at_cdm([1.0, 1.0, 0.5, 0.0])
0.5
>>> exprate_at_cdm([0.9999])
0.0

The text baselines compare the normalized token sequences:

>>> bleu('x + y'.split(), 'x + y'.split())
1.0
>>> edit_distance(list('abcdefghij'), list('abcdefghiX'))
0.1
>>> edit_distance('a b'.split(), [])
1.0
"""

import collections
import dataclasses
import math

from cdm.exceptions import *


@dataclasses.dataclass(frozen=True)
class CdmScore():
    """The CDM counts and F1 score of a formula pair."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    f1: float = 1.0
    render_ok: bool = True
    failure: str = None
    failed_side: str = None

    @property
    def precision(self):
        """The fraction of predicted glyphs that were matched."""
        if self.tp + self.fp == 0:
            return 1.0 if self.render_ok and not self.fn else 0.0
        return self.tp / (self.tp + self.fp)

    @property
    def recall(self):
        """The fraction of ground truth glyphs that were matched."""
        if self.tp + self.fn == 0:
            return 1.0 if self.render_ok and not self.fp else 0.0
        return self.tp / (self.tp + self.fn)

    def to_dict(self):
        """Return the score as a JSON compatible dict."""
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class BaselineScores():
    """The text based metrics of a formula pair, None when disabled."""

    bleu: float = None
    edit_distance: float = None
    exact_match: bool = None

    def to_dict(self):
        """Return the scores as a JSON compatible dict."""
        return dataclasses.asdict(self)


def f1_score(tp, fp, fn):
    """Return 2 tp / (2 tp + fp + fn), 1 when all counts are 0."""
    if tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def cdm_score(validated, render_ok=True, failure=None, failed_side=None):
    """Compute the CDM score of the validated matching.

    When either side failed to render the score is 0 and all glyphs are
    counted as errors."""
    pairs = len(validated.pairs) if validated is not None else 0
    fp = len(validated.unmatched_pred) if validated is not None else 0
    fn = len(validated.unmatched_gt) if validated is not None else 0
    if not render_ok:
        return CdmScore(
            tp=0, fp=fp + pairs, fn=fn + pairs, f1=0.0, render_ok=False,
            failure=failure or 'CompileError', failed_side=failed_side or 'pred')
    return CdmScore(tp=pairs, fp=fp, fn=fn, f1=f1_score(pairs, fp, fn))


def _value(score):
    return getattr(score, 'f1', score)


def exprate_at_cdm(scores):
    """Return the fraction of scores that are exactly 1."""
    scores = list(scores)
    if not scores:
        raise EmptyInput()
    return sum(1 for score in scores if _value(score) == 1) / len(scores)


def exprate(matches):
    """Return the fraction of exact text matches."""
    matches = list(matches)
    if not matches:
        raise EmptyInput()
    return sum(1 for match in matches if match) / len(matches)


def _texts(seq):
    return [getattr(token, 'text', token) for token in seq]


def _ngrams(tokens, n):
    return collections.Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(gt, pred, smoothing=False, max_order=4):
    """Compute the sentence BLEU score of the prediction against the
    ground truth with uniform weights and a brevity penalty.

    Sequences shorter than max_order are scored over the n-gram orders
    they have. Without smoothing the score is 0 when any order has no
    match, with smoothing such orders count as 0.1 matches.

    >>> round(bleu('a b c d e'.split(), 'a b c d f'.split()), 4)
    0.6687
    >>> bleu('a b'.split(), 'a b'.split())
    1.0
    >>> bleu('a b'.split(), [])
    0.0
    """
    gt = _texts(gt)
    pred = _texts(pred)
    if not gt and not pred:
        return 1.0
    if not gt or not pred:
        return 0.0
    orders = min(max_order, len(pred))
    log_sum = 0.0
    for n in range(1, orders + 1):
        reference = _ngrams(gt, n)
        candidate = _ngrams(pred, n)
        matches = sum(min(count, reference[gram]) for gram, count in candidate.items())
        total = len(pred) - n + 1
        if matches == 0:
            if not smoothing:
                return 0.0
            matches = 0.1
        log_sum += math.log(matches / total)
    if len(pred) >= len(gt):
        penalty = 1.0
    else:
        penalty = math.exp(1 - len(gt) / len(pred))
    return penalty * math.exp(log_sum / orders)


def levenshtein(a, b):
    """Return the number of insertions, deletions and substitutions needed
    to turn sequence a into sequence b.

    >>> levenshtein('kitten', 'sitting')
    3
    """
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        current = [i]
        for j, y in enumerate(b, 1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (x != y)))
        previous = current
    return previous[-1]


def edit_distance(gt, pred, level='token'):
    """Return the Levenshtein distance divided by the longest length.

    With level='char' the token texts are concatenated and compared
    character by character."""
    gt = _texts(gt)
    pred = _texts(pred)
    if level == 'char':
        gt = ''.join(gt)
        pred = ''.join(pred)
    elif level != 'token':
        raise ConfigError('Unknown edit distance level %r.' % level)
    longest = max(len(gt), len(pred))
    if not longest:
        return 0.0
    return levenshtein(gt, pred) / longest


# score ranges used to compare systems
HISTOGRAM_BUCKETS = ('0', '(0,0.6)', '[0.6,0.9)', '[0.9,1)', '1')


def cdm_histogram(scores):
    """Count the scores per range.

    >>> cdm_histogram([0.0, 0.3, 0.6, 0.95, 1.0, 1.0])
    {'0': 1, '(0,0.6)': 1, '[0.6,0.9)': 1, '[0.9,1)': 1, '1': 2}
    """
    counts = dict((bucket, 0) for bucket in HISTOGRAM_BUCKETS)
    for score in scores:
        value = _value(score)
        if value == 0:
            counts['0'] += 1
        elif value < 0.6:
            counts['(0,0.6)'] += 1
        elif value < 0.9:
            counts['[0.6,0.9)'] += 1
        elif value < 1:
            counts['[0.9,1)'] += 1
        else:
            counts['1'] += 1
    return counts
