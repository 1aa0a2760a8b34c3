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
This test verifies LOF scoring against a brute-force evaluation of the LOF
definitions.
"""

# Disable the following pylint recommendations:
#   * Too many public methods (R0904)
# pylint: disable=R0904

import io
import unittest
import numpy
from tests import helpers
from fgeomtools import Distance, Embed, Lof


def _cluster_and_outlier():
    """Ten points at mutual distance 1 and one point at distance 50."""

    d = numpy.ones((11, 11))
    d[10, :] = d[:, 10] = 50
    numpy.fill_diagonal(d, 0)
    return Distance.DistanceMatrix(d, "fixture")


class TestMinPts(unittest.TestCase):
    """The neighborhood size."""

    def test_default(self):
        """0.75 n, halves rounded up, clamped to n - 1."""

        self.assertEqual(Lof.default_min_pts(100), 75)
        self.assertEqual(Lof.default_min_pts(4), 3)
        self.assertEqual(Lof.default_min_pts(10), 8)
        self.assertEqual(Lof.default_min_pts(6), 5)
        self.assertRaises(Lof.Error, Lof.default_min_pts, 3)

    def test_config(self):
        """Explicit values have to fit the observations count."""

        self.assertEqual(Lof.LofConfig().resolve(200), 150)
        self.assertEqual(Lof.LofConfig(5).resolve(10), 5)
        self.assertRaises(Lof.Error, Lof.LofConfig(1).resolve, 10)
        self.assertRaises(Lof.Error, Lof.LofConfig(10).resolve, 10)
        self.assertRaises(Lof.Error, Lof.LofConfig, 0)
        self.assertRaises(Lof.Error, Lof.LofConfig, 2.5)


class TestLof(unittest.TestCase):
    """LOF scores."""

    def test_equidistant(self):
        """Homogeneous data sets score 1 everywhere."""

        d = numpy.ones((7, 7)) - numpy.eye(7)
        scores = Lof.lof_from_distances(Distance.DistanceMatrix(d, "eq"),
                                        Lof.LofConfig(3))
        self.assertTrue(numpy.allclose(scores.scores, 1, rtol=0, atol=1e-9))

    def test_cluster_and_outlier(self):
        """The isolated point scores far above the cluster."""

        matrix = _cluster_and_outlier()
        scores = Lof.lof_from_distances(matrix, Lof.LofConfig(3))
        oracle = helpers.brute_force_lof(matrix.d, 3)

        self.assertTrue(numpy.allclose(scores.scores, oracle, rtol=0,
                                       atol=1e-9))
        self.assertGreater(scores.scores[10], 10 * numpy.max(scores.scores[:10]))
        self.assertEqual(scores.method_tag, "lof:3(fixture)")

    def test_duplicates(self):
        """Exact duplicates get equal, finite scores."""

        # The reachability sums of the triplicate point are zero
        matrix = Distance.euclidean([[0], [0], [0], [4], [5]])
        scores = Lof.lof_from_distances(matrix, Lof.LofConfig(2))

        self.assertTrue(numpy.all(numpy.isfinite(scores.scores)))
        self.assertEqual(scores.scores[0], scores.scores[1])
        self.assertEqual(scores.scores[0], scores.scores[2])
        self.assertAlmostEqual(scores.scores[0], 1, places=9)

    def test_small_line(self):
        """Points 0, 0.1, 0.2 and 5 on a line with minPts 2."""

        coords = [[0], [0.1], [0.2], [5]]
        embedding = Embed.Embedding(coords, [1, 0, 0, 0], 1)
        scores = Lof.lof_on_embedding(embedding, Lof.LofConfig(2))
        oracle = helpers.brute_force_lof(helpers.euclidean_matrix(
            numpy.array(coords)), 2)

        self.assertTrue(numpy.allclose(scores.scores, oracle, rtol=0,
                                       atol=1e-9))
        self.assertEqual(numpy.argmax(scores.scores), 3)

    def test_simplex_embedding(self):
        """The vertices of a regular simplex score 1."""

        embedding = Embed.Embedding(numpy.eye(5), [1, 1, 1, 1, 0], 5)
        scores = Lof.lof_on_embedding(embedding, Lof.LofConfig(3))
        self.assertTrue(numpy.allclose(scores.scores, 1, rtol=0, atol=1e-9))

    def test_embedding_delegates(self):
        """Scoring coordinates equals scoring their Euclidean distances."""

        gen = numpy.random.default_rng(5)
        coords = gen.normal(0, 1, (11, 2))
        embedding = Embed.Embedding(coords, numpy.zeros(11), 2)
        direct = Lof.lof_from_distances(Distance.euclidean(coords),
                                        Lof.LofConfig(3))
        delegated = Lof.lof_on_embedding(embedding, Lof.LofConfig(3))
        self.assertTrue(numpy.array_equal(direct.scores, delegated.scores))

    def test_oracle_random(self):
        """Random instances agree with the brute-force oracle."""

        gen = numpy.random.default_rng(17)
        specs = [Distance.MetricSpec.parse(text)
                 for text in ("lp:1", "lp:2", "dtw")]

        for _ in range(200):
            n = int(gen.integers(5, 31))
            dataset = helpers.random_dataset(gen, n, 8)
            spec = specs[int(gen.integers(0, 3))]
            min_pts = int(gen.integers(2, n))

            matrix = Distance.pairwise(dataset, spec)
            scores = Lof.lof_from_distances(matrix, Lof.LofConfig(min_pts))
            oracle = helpers.brute_force_lof(matrix.d, min_pts)
            self.assertTrue(numpy.allclose(scores.scores, oracle, rtol=0,
                                           atol=1e-9))

    def test_scale_invariance(self):
        """Scaling all the distances keeps the scores."""

        gen = numpy.random.default_rng(18)
        matrix = Distance.euclidean(gen.normal(0, 1, (20, 3)))
        scores = Lof.lof_from_distances(matrix, Lof.LofConfig())
        scaled = Lof.lof_from_distances(matrix.scaled(37.5), Lof.LofConfig())
        self.assertTrue(numpy.allclose(scores.scores, scaled.scores, rtol=0,
                                       atol=1e-9))

    def test_permutation(self):
        """Permuting observations permutes the scores."""

        gen = numpy.random.default_rng(19)
        coords = gen.normal(0, 1, (15, 2))
        order = gen.permutation(15)

        scores = Lof.lof_from_distances(Distance.euclidean(coords),
                                        Lof.LofConfig(4))
        permuted = Lof.lof_from_distances(Distance.euclidean(coords[order]),
                                          Lof.LofConfig(4))
        self.assertTrue(numpy.allclose(permuted.scores, scores.scores[order],
                                       rtol=0, atol=1e-12))


class TestScoreCsv(unittest.TestCase):
    """The score CSV file."""

    def test_write_then_read(self):
        """Scores read back exactly."""

        scores = Lof.lof_from_distances(_cluster_and_outlier(),
                                        Lof.LofConfig(3))
        with helpers.TempDir() as tmp:
            path = tmp.join("scores.csv")
            with io.open(path, "w", newline="") as file_obj:
                Lof.write_csv(scores, file_obj)
            header = tmp.read("scores.csv").splitlines()[0]
            loaded = Lof.read_csv(path)
            bad = tmp.write("bad.csv", "index,value\n0,1\n")
            self.assertRaises(Lof.Error, Lof.read_csv, bad)

        self.assertEqual(header, "index,score")
        self.assertTrue(numpy.array_equal(loaded.scores, scores.scores))
