# test_style_invariance.py - formulas that are written differently but typeset the same
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

"""Check that differently written but identically typeset formulas get
a perfect CDM score while the text metrics are spread out."""

import unittest

from cdm.config import read_config
from cdm.pipeline import evaluate_batch


# pairs of formulas that typeset identically
STYLE_PAIRS = (
    # script order and shorthand arguments
    (r'x_a^b', r'x^{b}_{a}'),
    (r'x^b_a', r'x_{a}^{b}'),
    (r'a^{2}_{n}', r'a_n^2'),
    (r'x_{i_j}', r'x_{i_{j}}'),
    (r'\frac12', r'\frac{1}{2}'),
    (r'\frac a b', r'\frac{a}{b}'),
    (r'\sqrt2', r'\sqrt{2}'),
    (r'\sqrt[3]x', r'\sqrt[3]{x}'),
    (r'\binom nk', r'\binom{n}{k}'),
    (r'\hat x', r'\hat{x}'),
    (r'\mathbf x', r'\mathbf{x}'),
    (r'\mathrm{d}x', r'\mathrm d x'),
    (r'\overline{AB}', r'\overline {A B}'),
    (r'e^{i\pi}', r'e^{ i \pi }'),
    (u'a − b', r'a-b'),
    (u'x≤y', r'x \le y'),
    # delimiter sizes and families
    (r'\left(a+b\right)', r'(a+b)'),
    (r'\left[x\right]', r'[x]'),
    (r'\left\{x\right\}', r'\{x\}'),
    (r'\lbrace x \rbrace', r'\{ x \}'),
    (r'\big( x \big)', r'( x )'),
    (r'\Bigl[ x \Bigr]', r'[ x ]'),
    (r'\left| x \right|', r'| x |'),
    (r'\vert x \vert', r'| x |'),
    (r'\left\langle u,v \right\rangle', r'\langle u,v \rangle'),
    (r'\left\lfloor x \right\rfloor', r'\lfloor x \rfloor'),
    (r'\langle x \rangle', r'\left\langle x \right\rangle'),
    (r'\left\Vert v \right\Vert', r'\| v \|'),
    (r'\{ x \mid x > 0 \}', r'\{ x | x > 0 \}'),
    (r'f(x) = x^2', r'f \left( x \right) = x^{2}'),
    (r'\Bigg( \frac{1}{2} \Bigg)', r'\left( \frac12 \right)'),
    (r'\left. \frac{df}{dx} \right|_{x=0}', r'\frac{df}{dx} \Big|_{x=0}'),
    # spellings of the same symbol
    (r'a \le b', r'a \leq b'),
    (r'a \ge b', r'a \geq b'),
    (r'a \ne b', r'a \neq b'),
    (r'a < b', r'a \lt b'),
    (r'x \to 0', r'x \rightarrow 0'),
    (r'A \iff B', r'A \Longleftrightarrow B'),
    (r'p \land q', r'p \wedge q'),
    (r'p \lor q', r'p \vee q'),
    (r'\lnot p', r'\neg p'),
    (r'1, \ldots, n', r'1, \dots, n'),
    (r'a + \cdots + z', r'a + \dotsb + z'),
    (r'a * b', r'a \ast b'),
    # spacing, grouping and invisible commands
    (r'a\,b', r'ab'),
    (r'a \quad b', r'a b'),
    (r'a~b', r'a b'),
    (r'{a}+{b}', r'a+b'),
    (r'\displaystyle \sum x', r'\sum x'),
    (r'x \nonumber', r'x'),
    (r'x \label{eq:1}', r'x'),
)


class TestStyleInvariance(unittest.TestCase):
    """Test formulas that differ in writing style only."""

    @classmethod
    def setUpClass(cls):
        """Evaluate the samples shared by the tests."""
        cls.cfg = read_config(render_engine='stub')
        samples = [(str(i), gt, pred) for i, (gt, pred) in enumerate(STYLE_PAIRS)]
        cls.records, cls.summary = evaluate_batch(samples, cls.cfg)

    def test_pair_count(self):
        """Test that there are at least 50 distinct pairs."""
        self.assertGreaterEqual(len(set(STYLE_PAIRS)), 50)
        for gt, pred in STYLE_PAIRS:
            self.assertNotEqual(gt, pred)

    def test_cdm(self):
        """Test that every pair scores exactly 1."""
        for record in self.records:
            self.assertEqual(record.cdm.f1, 1.0, '%s vs %s: %r' % (record.gt, record.pred, record.cdm))
        self.assertEqual(self.summary.exprate_at_cdm, 1.0)
        self.assertEqual(self.summary.render_success_rate, 1.0)

    def test_bleu_spread(self):
        """Test that the text metrics do not see these as equal."""
        low = [r for r in self.records if r.baselines.bleu < 0.9]
        self.assertGreaterEqual(len(low), 20)
        self.assertLess(self.summary.mean_bleu, 1.0)
        self.assertLess(self.summary.exprate, 1.0)
