# matcher.py - pair predicted glyphs with ground truth glyphs
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

"""Pair predicted glyphs with ground truth glyphs.

The cost of pairing two elements is a weighted sum of three terms: the
token cost (0 for identical tokens, 0.05 for tokens that render the same
and 1 otherwise), the position cost (mean absolute difference of the
normalized bounding boxes) and the order cost (difference of the normalized
position in the token sequence). The pairing with the lowest total cost is
found with the Hungarian algorithm.

>>> from cdm.latex import tokenize
>>> a = tokenize('(').tokens[0]
>>> b = tokenize('\\\\left(').tokens[0]
>>> from cdm.localize import Element, BBox
>>> gt = Element(a, BBox(0, 0, 7, 11), (0.1, 0.2, 0.3, 0.4), 0.25)
>>> pred = Element(b, BBox(0, 0, 7, 11), (0.2, 0.2, 0.3, 0.4), 0.75)
>>> token_cost(gt, pred)
0.05
>>> round(position_cost(gt, pred), 6)
0.025
>>> order_cost(gt, pred)
0.5
>>> m = assign([gt], [pred])
>>> len(m.pairs), round(m.pairs[0].cost, 6)
(1, 0.18125)
"""

import dataclasses

import numpy as np
from scipy.optimize import linear_sum_assignment

from cdm import equiv as equivdb
from cdm.equiv import Equivalence
from cdm.exceptions import *


TOKEN_COSTS = {
    Equivalence.Identical: 0.0,
    Equivalence.RenderEquivalent: 0.05,
    Equivalence.Different: 1.0,
}


@dataclasses.dataclass(frozen=True)
class CostWeights():
    """Weights of the token, position and order cost."""

    w_t: float = 1.0
    w_p: float = 0.25
    w_o: float = 0.25

    def __post_init__(self):
        if min(self.w_t, self.w_p, self.w_o) < 0:
            raise ConfigError('Cost weights cannot be negative.')
        if self.w_t + self.w_p + self.w_o <= 0:
            raise ConfigError('At least one cost weight must be positive.')

    @property
    def total(self):
        """The highest possible cost of a pair."""
        return self.w_t + self.w_p + self.w_o


@dataclasses.dataclass(frozen=True)
class MatchPair():
    """A ground truth element paired with a predicted element."""

    gt: object
    pred: object
    cost: float
    cost_parts: tuple


@dataclasses.dataclass
class MatchSet():
    """The result of matching: pairs and the leftover elements.

    Pairs removed by validation are kept in eliminated for inspection."""

    pairs: list = dataclasses.field(default_factory=list)
    unmatched_gt: list = dataclasses.field(default_factory=list)
    unmatched_pred: list = dataclasses.field(default_factory=list)
    eliminated: list = dataclasses.field(default_factory=list)

    def without(self, dropped):
        """Return a new MatchSet with the given pairs moved to the
        unmatched lists."""
        if not dropped:
            return self
        dropped_ids = set(id(pair) for pair in dropped)
        return MatchSet(
            pairs=[p for p in self.pairs if id(p) not in dropped_ids],
            unmatched_gt=self.unmatched_gt + [p.gt for p in dropped],
            unmatched_pred=self.unmatched_pred + [p.pred for p in dropped],
            eliminated=self.eliminated + list(dropped))


def token_cost(gt, pred, table=None):
    """Return the token cost of pairing the two elements."""
    return TOKEN_COSTS[equivdb.equiv(gt.token, pred.token, table)]


def position_cost(gt, pred):
    """Return the mean absolute difference of the normalized boxes."""
    return sum(abs(a - b) for a, b in zip(gt.norm_bbox, pred.norm_bbox)) / 4


def order_cost(gt, pred):
    """Return the difference of the normalized token order."""
    return abs(gt.norm_order - pred.norm_order)


def _parts(gt, pred, table):
    return (token_cost(gt, pred, table), position_cost(gt, pred), order_cost(gt, pred))


def _cost(parts, w):
    return w.w_t * parts[0] + w.w_p * parts[1] + w.w_o * parts[2]


def cost_matrix(gt, pred, w=None, table=None):
    """Return the matrix of pairing costs, rows are ground truth elements
    and columns predicted elements."""
    if w is None:
        w = CostWeights()
    if table is None:
        table = equivdb.get()
    matrix = np.zeros((len(gt), len(pred)))
    for i, a in enumerate(gt):
        for j, b in enumerate(pred):
            matrix[i, j] = _cost(_parts(a, b, table), w)
    return matrix


def _by_order(elements):
    return sorted(elements, key=lambda e: e.token.order_index)


def assign(gt, pred, w=None, table=None):
    """Find the pairing with the lowest total cost.

    Exactly min(len(gt), len(pred)) pairs are formed, the remaining
    elements end up in the unmatched lists."""
    if w is None:
        w = CostWeights()
    if table is None:
        table = equivdb.get()
    gt = _by_order(gt)
    pred = _by_order(pred)
    if not gt or not pred:
        return MatchSet([], gt, pred)
    size = max(len(gt), len(pred))
    # pad to a square matrix with a cost above any real pairing
    matrix = np.full((size, size), w.total + 1.0)
    matrix[:len(gt), :len(pred)] = cost_matrix(gt, pred, w, table)
    rows, cols = linear_sum_assignment(matrix)
    pairs = []
    used_gt = set()
    used_pred = set()
    for i, j in zip(rows, cols):
        if i < len(gt) and j < len(pred):
            parts = _parts(gt[i], pred[j], table)
            pairs.append(MatchPair(gt[i], pred[j], _cost(parts, w), parts))
            used_gt.add(i)
            used_pred.add(j)
    return MatchSet(
        pairs=pairs,
        unmatched_gt=[e for i, e in enumerate(gt) if i not in used_gt],
        unmatched_pred=[e for j, e in enumerate(pred) if j not in used_pred])
