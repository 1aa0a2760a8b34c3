# -*- coding: utf-8 -*-
# vim: ts=4 sw=4 et ai si
#
# License: GPLv2
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License, version 2,
# as published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
# General Public License for more details.

"""
This test runs small replicated benchmarks (50 replications instead of 500)
and verifies the detection properties of the geometric approach: spikes are
found with high-order Lp measures, shifts with MDS, shape outliers hidden by
vertical shifts are found on the derivatives, embedding keeps the LOF
ranking and wide ISOMAP neighborhoods do not lose against narrow ones.

These tests take a couple of minutes.
"""

# Disable the following pylint recommendations:
#   * Too many public methods (R0904)
# pylint: disable=R0904

import unittest
import numpy
from fgeomtools import Bench, Generate

# Replications of every benchmark
REPLICATIONS = 50


def _medians(dgp, methods, r, B=REPLICATIONS, base_seed=2024):
    """
    Run 'methods' on 'B' replications of 'DgpConfig' object 'dgp' with
    outlier ratio 'r'. Returns the median AUC by method name and the
    result.
    """

    cfg = Bench.BenchmarkConfig([dgp], methods, [r], B=B,
                                base_seed=base_seed)
    result = Bench.run_benchmark(cfg, jobs=4)
    medians = {}
    for entry in result.summary:
        if entry["errors"]:
            raise AssertionError("%d failed cells for method '%s'"
                                 % (entry["errors"], entry["method"]))
        medians[entry["method"]] = entry["median"]
    return medians, result


class TestDetection(unittest.TestCase):
    """Median AUCs of the scoring pipelines."""

    def test_isolated_outliers(self):
        """Spikes: L10 is almost perfect and beats L2."""

        medians, _ = _medians(Generate.DgpConfig("sim-2", n=100, m=50),
                              ["lp:10+mds:5", "lp:2+mds:5"], 0.05)
        self.assertGreaterEqual(medians["lp:10+mds:5"], 0.95)
        self.assertGreaterEqual(medians["lp:10+mds:5"] -
                                medians["lp:2+mds:5"], 0.05)

    def test_shift_outliers(self):
        """Shifts are found on the L2 MDS embedding."""

        medians, _ = _medians(Generate.DgpConfig("sim-1", n=100, m=50),
                              ["lp:2+mds:5"], 0.1)
        self.assertGreaterEqual(medians["lp:2+mds:5"], 0.9)

    def test_derivatives(self):
        """Shape outliers among shifted curves are found on derivatives."""

        dgp = Generate.DgpConfig("sim-shape", n=100, m=50,
                                 params={"shift_sd": 4})
        medians, _ = _medians(dgp, ["lp:2+mds:5+deriv", "lp:2+mds:5"], 0.1)
        self.assertGreaterEqual(medians["lp:2+mds:5+deriv"],
                                medians["lp:2+mds:5"])
        self.assertGreaterEqual(medians["lp:2+mds:5+deriv"], 0.9)

    def test_isomap_neighborhoods(self):
        """Wide neighborhoods do at least as well as narrow ones."""

        methods = ["lp:2+isomap:90:5", "lp:2+isomap:5:5",
                   "lp:2+isomap:max:5", "lp:2+mds:5"]
        medians, _ = _medians(Generate.DgpConfig("mixture-1", n=100, m=50),
                              methods, 0.1)
        self.assertGreaterEqual(medians["lp:2+isomap:90:5"],
                                medians["lp:2+isomap:5:5"])
        self.assertLessEqual(abs(medians["lp:2+isomap:max:5"] -
                                 medians["lp:2+mds:5"]), 0.02)


class TestRankAgreement(unittest.TestCase):
    """Scores on embeddings agree with scores on the raw distances."""

    def test_raw_versus_mds(self):
        """The median Spearman correlation over 20 seeds is at least 0.95."""

        _, result = _medians(Generate.DgpConfig("mixture-2", n=200, m=50),
                             ["lp:2+raw", "lp:2+mds:5"], 0.1, B=20)
        rhos = [record.spearman_raw for record in result.records
                if record.method == "lp:2+mds:5"]
        self.assertEqual(len(rhos), 20)
        self.assertGreaterEqual(numpy.median(rhos), 0.95)
