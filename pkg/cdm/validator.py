# validator.py - remove invalid pairs from a matching
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

"""Remove invalid pairs from a matching.

The assignment always pairs up as many elements as possible, even when the
tokens differ or the positions make no sense. Two checks remove such pairs.
First, pairs of tokens that do not render the same are dropped. Second, the
remaining pairs must agree with a common transformation of the ground
truth image onto the predicted image. Only translation and scaling are
considered (no rotation). The transformation is estimated with RANSAC in
several rounds, so a formula that broke over two lines can still match
with one model per line.

>>> AffineTS(sx=2.0, tx=0.125).apply((0.25, 0.5, 0.5, 0.75))
(0.625, 0.5, 1.125, 0.75)
"""

import dataclasses
import itertools
import logging

import numpy as np

from cdm import equiv as equivdb
from cdm.equiv import Equivalence
from cdm.exceptions import *


_log = logging.getLogger(__name__)

# variance below which an axis is considered to have no extent
_EPSILON = 1e-12


@dataclasses.dataclass(frozen=True)
class AffineTS():
    """Per-axis scale and translation in normalized image coordinates."""

    sx: float = 1.0
    sy: float = 1.0
    tx: float = 0.0
    ty: float = 0.0

    def apply(self, box):
        """Map a normalized (x1, y1, x2, y2) box."""
        x1, y1, x2, y2 = box
        return (
            self.sx * x1 + self.tx, self.sy * y1 + self.ty,
            self.sx * x2 + self.tx, self.sy * y2 + self.ty)


@dataclasses.dataclass(frozen=True)
class RansacParams():
    """Settings of the geometric verification."""

    inlier_tol: float = 0.05
    min_inliers: int = 2
    iterations: int = 200
    max_rounds: int = 4
    seed: int = 0
    exhaustive_limit: int = 12

    def __post_init__(self):
        if self.inlier_tol <= 0:
            raise ConfigError('The inlier tolerance must be positive.')
        if self.iterations < 1 or self.max_rounds < 1 or self.min_inliers < 1:
            raise ConfigError('RANSAC iterations, rounds and inliers must be at least 1.')


def token_filter(m, table=None):
    """Move pairs of tokens that do not render the same to the unmatched
    lists."""
    if table is None:
        table = equivdb.get()
    return m.without([
        pair for pair in m.pairs
        if equivdb.equiv(pair.gt.token, pair.pred.token, table) == Equivalence.Different])


def _boxes(pairs):
    gt = np.array([pair.gt.norm_bbox for pair in pairs], dtype=float).reshape(-1, 4)
    pred = np.array([pair.pred.norm_bbox for pair in pairs], dtype=float).reshape(-1, 4)
    return gt, pred


def _fit_axis(g, p):
    """Fit p = s * g + t along the last axis, returns the scale,
    translation and whether the axis was degenerate.

    The scale is the ratio of the standard deviations with the sign of
    the covariance, so fitting g on p gives exactly the inverse model."""
    mg = g.mean(axis=-1, keepdims=True)
    mp = p.mean(axis=-1, keepdims=True)
    var_g = ((g - mg) ** 2).sum(axis=-1)
    var_p = ((p - mp) ** 2).sum(axis=-1)
    cov = ((g - mg) * (p - mp)).sum(axis=-1)
    degenerate = (var_g < _EPSILON) | (var_p < _EPSILON)
    ratio = np.sqrt(var_p / np.where(degenerate, 1.0, var_g))
    scale = np.where(degenerate, 1.0, np.sign(cov) * ratio)
    shift = mp[..., 0] - scale * mg[..., 0]
    return scale, shift, degenerate


def _fit(gt, pred):
    """Fit models for a stack of samples, gt and pred are (..., n, 4)."""
    shape = gt.shape[:-2] + (-1,)
    sx, tx, dx = _fit_axis(gt[..., [0, 2]].reshape(shape), pred[..., [0, 2]].reshape(shape))
    sy, ty, dy = _fit_axis(gt[..., [1, 3]].reshape(shape), pred[..., [1, 3]].reshape(shape))
    valid = ~(dx & dy) & (sx > 0) & (sy > 0)
    return sx, sy, tx, ty, valid


def fit_ts(pairs):
    """Fit a translation and scale per axis to the pairs.

    An axis without extent gets scale 1 and the mean offset. Raises
    DegenerateSample when both axes lack extent or the scale is not
    positive."""
    gt, pred = _boxes(pairs)
    if not len(gt):
        raise DegenerateSample()
    sx, sy, tx, ty, valid = _fit(gt, pred)
    if not valid:
        raise DegenerateSample()
    return AffineTS(float(sx), float(sy), float(tx), float(ty))


def _residuals(gt, pred, sx, sy, tx, ty):
    """Return the residual of every pair under every model as a
    (models, pairs) array.

    The error on each axis is weighted with max(1, 1/scale) so the result
    is the same when ground truth and prediction are swapped."""
    sx, sy, tx, ty = (np.asarray(v, dtype=float)[:, None, None] for v in (sx, sy, tx, ty))
    ex = np.abs(sx * gt[None, :, [0, 2]] + tx - pred[None, :, [0, 2]]).sum(axis=-1)
    ey = np.abs(sy * gt[None, :, [1, 3]] + ty - pred[None, :, [1, 3]]).sum(axis=-1)
    return (
        ex * np.maximum(1.0, 1.0 / sx[..., 0]) +
        ey * np.maximum(1.0, 1.0 / sy[..., 0])) / 4


def _samples(count, p, rng):
    """Return the index pairs to fit models on."""
    if count <= p.exhaustive_limit:
        return np.array(list(itertools.combinations(range(count), 2)), dtype=int).reshape(-1, 2)
    return np.array([rng.choice(count, size=2, replace=False) for _i in range(p.iterations)])


def _best_inliers(gt, pred, p, rng):
    """Return the mask of inliers of the best model."""
    samples = _samples(len(gt), p, rng)
    sx, sy, tx, ty, valid = _fit(gt[samples], pred[samples])
    if not valid.any():
        return np.zeros(len(gt), dtype=bool)
    sx, sy, tx, ty = sx[valid], sy[valid], tx[valid], ty[valid]
    residuals = _residuals(gt, pred, sx, sy, tx, ty)
    inliers = residuals <= p.inlier_tol + _EPSILON
    counts = inliers.sum(axis=1)
    spread = np.where(inliers, residuals, 0.0).sum(axis=1)
    # most inliers, then lowest residual, then first sample
    best = np.lexsort((np.arange(len(counts)), spread, -counts))[0]
    mask = inliers[best]
    if not mask.any():
        return mask
    # refine the model on all its inliers
    rsx, rsy, rtx, rty, rvalid = _fit(gt[mask][None], pred[mask][None])
    if rvalid[0]:
        refined = _residuals(gt, pred, rsx, rsy, rtx, rty)[0] <= p.inlier_tol + _EPSILON
        if refined.sum() >= mask.sum():
            mask = refined
    return mask


def _pair_key(pair):
    return (
        sorted((pair.gt.token.order_index, pair.pred.token.order_index)),
        sorted((tuple(pair.gt.norm_bbox), tuple(pair.pred.norm_bbox))))


def ransac_filter(m, p=None):
    """Keep the pairs that agree with a translation and scale model.

    Each round fits the best model on the remaining pairs and accepts its
    inliers. Rounds stop when a model has fewer than p.min_inliers
    inliers. Pairs that are not accepted in any round are moved to the
    unmatched lists."""
    if p is None:
        p = RansacParams()
    # the visiting order must not depend on which side is the ground truth
    pairs = sorted(m.pairs, key=_pair_key)
    if len(pairs) == 1:
        # a lone pair only determines a translation
        gt, pred = _boxes(pairs)
        shift = (pred - gt).mean(axis=0)
        tx, ty = (shift[0] + shift[2]) / 2, (shift[1] + shift[3]) / 2
        if _residuals(gt, pred, [1.0], [1.0], [tx], [ty])[0, 0] <= p.inlier_tol + _EPSILON:
            return m
        return m.without(pairs)
    if len(pairs) < max(2, p.min_inliers):
        return m
    rng = np.random.default_rng(p.seed)
    remaining = np.arange(len(pairs))
    gt, pred = _boxes(pairs)
    for round_number in range(p.max_rounds):
        if len(remaining) < 2:
            break
        mask = _best_inliers(gt[remaining], pred[remaining], p, rng)
        if mask.sum() < p.min_inliers:
            break
        _log.debug('round %d accepted %d of %d pairs', round_number + 1, mask.sum(), len(remaining))
        remaining = remaining[~mask]
    return m.without([pairs[i] for i in remaining])


def validate(m, p=None, table=None):
    """Apply the token check and the geometric check."""
    return ransac_filter(token_filter(m, table), p)
