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
This test verifies the data generating processes: label counts, seeding,
the shapes of the generated curves and the building blocks.
"""

# Disable the following pylint recommendations:
#   * Too many public methods (R0904)
# pylint: disable=R0904

import io
import json
import unittest
import numpy
from scipy import integrate, stats
from fgeomtools import Functional, Generate


def _generate(name, **kwargs):
    """Generate a data set of DGP 'name'."""
    return Generate.generate(Generate.DgpConfig(name, **kwargs))


def _outlier_rows(dataset):
    """Values of the labeled outliers."""
    return dataset.values[dataset.labels.flags]


def _inlier_rows(dataset):
    """Values of the curves which are not labeled."""
    return dataset.values[~dataset.labels.flags]


class TestSeeding(unittest.TestCase):
    """Random streams and configurations."""

    def test_derive_seed(self):
        """Derived seeds depend on the keys only."""

        self.assertEqual(Generate.derive_seed(7, 1, 2),
                         Generate.derive_seed(7, 1, 2))
        self.assertNotEqual(Generate.derive_seed(7, 1, 2),
                            Generate.derive_seed(7, 2, 1))
        self.assertNotEqual(Generate.derive_seed(7, 0),
                            Generate.derive_seed(8, 0))
        self.assertLess(Generate.derive_seed(7, 3), 2 ** 64)
        self.assertRaises(Generate.Error, Generate.derive_seed, 7, -1)

    def test_rng(self):
        """Identical seeds give identical streams."""

        first = Generate.Rng(42).generator.normal(size=5)
        second = Generate.Rng(42).generator.normal(size=5)
        other = Generate.Rng(42).substream(1).generator.normal(size=5)
        self.assertTrue(numpy.array_equal(first, second))
        self.assertFalse(numpy.array_equal(first, other))
        self.assertEqual(Generate.Rng(1).algorithm, "PCG64")

    def test_config_validation(self):
        """Out-of-range configurations are rejected."""

        self.assertRaises(Generate.Error, Generate.DgpConfig, "sim-1", r=0.2)
        self.assertRaises(Generate.Error, Generate.DgpConfig, "sim-1", r=-0.1)
        self.assertRaises(Generate.Error, Generate.DgpConfig, "sim-1", m=5)
        self.assertRaises(Generate.Error, Generate.DgpConfig, "sim-1", n=1)
        self.assertRaises(Generate.Error, Generate.DgpConfig, "sim-1",
                          seed=-1)
        self.assertRaises(Generate.Error, Generate.DgpConfig.from_dict,
                          {"name": "sim-1", "size": 3})
        self.assertRaises(Generate.Error, _generate, "sim-7")
        self.assertRaises(Generate.Error, _generate, "sim-1",
                          params={"amplitude": 3})

    def test_config_dict(self):
        """Configurations survive the dictionary form."""

        cfg = Generate.DgpConfig("beta-shift", n=30, r=0.05, m=20, seed=9,
                                 params={"shift_high": 0.3}, n_rule=False)
        copy = Generate.DgpConfig.from_dict(json.loads(json.dumps(
            cfg.to_dict())))
        self.assertEqual(copy.to_dict(), cfg.to_dict())
        self.assertEqual(cfg.replace(r=0.1).outliers_cnt, 3)


class TestAllGenerators(unittest.TestCase):
    """Contracts shared by every generator."""

    def test_counts_and_determinism(self):
        """round(r n) outliers, requested sizes, identical reruns."""

        for name in sorted(Generate.GENERATORS):
            first = _generate(name, n=57, r=0.07, m=30, seed=11)
            second = _generate(name, n=57, r=0.07, m=30, seed=11)
            expected = 0 if name == "phase-1" else 4

            self.assertEqual((first.n, first.m), (57, 30), name)
            self.assertEqual(first.labels.outliers_cnt, expected, name)
            self.assertTrue(numpy.array_equal(first.values, second.values),
                            name)
            self.assertTrue(numpy.array_equal(first.labels.flags,
                                              second.labels.flags), name)
            self.assertEqual(first.meta["dgp"], name)
            self.assertEqual(first.meta["seed"], 11)
            self.assertIn("d2", first.meta["params"])

            tags = first.meta["kinds"]
            self.assertEqual(len(tags), 57)
            for tag, flag in zip(tags, first.labels.flags):
                self.assertEqual(tag != "inlier", bool(flag), name)

    def test_zero_ratio(self):
        """Without outliers nothing is labeled."""

        for name in sorted(Generate.GENERATORS):
            dataset = _generate(name, n=20, r=0, m=15, seed=1)
            self.assertEqual(dataset.labels.outliers_cnt, 0, name)

    def test_outliers_are_shuffled(self):
        """Outliers are not simply appended at the end."""

        positions = []
        for seed in range(5):
            dataset = _generate("sim-1", n=50, r=0.1, seed=seed)
            positions.extend(numpy.flatnonzero(dataset.labels.flags))
        self.assertLess(min(positions), 45)

    def test_meta_record(self):
        """The provenance record is written as JSON."""

        dataset = _generate("taxonomy-shape", n=10, r=0.1, seed=3)
        output = io.StringIO()
        Generate.write_meta(dataset, output)
        meta = json.loads(output.getvalue())
        self.assertEqual(meta["rng"], "PCG64")
        self.assertEqual(meta["outliers"], 1)


class TestManifoldExamples(unittest.TestCase):
    """The taxonomy and Beta density examples."""

    def test_taxonomy_counts(self):
        """54 curves with r = 0.09 give 5 outliers."""

        dataset = _generate("taxonomy-shape", n=54, r=0.09, seed=1)
        self.assertEqual(dataset.labels.outliers_cnt, 5)
        self.assertEqual(len(_inlier_rows(dataset)), 49)

    def test_taxonomy_shapes(self):
        """Inliers oscillate around their level, outliers do not."""

        dataset = _generate("taxonomy-shape", n=30, r=0.1, m=200, seed=2)
        t = dataset.grid.points
        for row in _inlier_rows(dataset):
            residual = row - 0.05 * t - numpy.cos(20 * numpy.pi * t)
            self.assertLess(numpy.ptp(residual), 1e-9)
        for row in _outlier_rows(dataset):
            residual = row - 0.05 * t - numpy.sin(numpy.pi * t ** 2)
            self.assertLess(numpy.ptp(residual), 1e-9)

    def test_beta_densities(self):
        """Inliers are densities, outliers are shifted densities."""

        dataset = _generate("beta-shift", n=100, r=0.1, m=1001, seed=3)
        t = dataset.grid.points
        self.assertEqual(dataset.labels.outliers_cnt, 10)

        for row in _inlier_rows(dataset):
            self.assertAlmostEqual(integrate.trapezoid(row, t), 1,
                                   delta=0.01)
        for row in _outlier_rows(dataset):
            mass = integrate.trapezoid(row, t)
            self.assertGreaterEqual(mass, 1 - 0.01)
            self.assertLessEqual(mass, 1.5 + 0.01)

    def test_unshifted_outliers(self):
        """Without a shift, outliers lie on the density manifold."""

        dataset = _generate("beta-shift", n=50, r=0.1, m=1001, seed=4,
                            params={"shift_low": 0, "shift_high": 0})
        t = dataset.grid.points
        for row in _outlier_rows(dataset):
            self.assertAlmostEqual(integrate.trapezoid(row, t), 1,
                                   delta=0.01)


class TestPhase(unittest.TestCase):
    """The phase variation cases."""

    def test_case_one(self):
        """A single manifold: nothing is labeled whatever the ratio."""

        dataset = Generate.gen_phase_case("I", Generate.DgpConfig(
            "phase-1", n=40, r=0.1, m=81, seed=1))
        self.assertEqual(dataset.labels.outliers_cnt, 0)

        peaks = dataset.grid.points[numpy.argmax(dataset.values, axis=1)]
        self.assertTrue(numpy.all(numpy.abs(peaks) <= 2 + 0.1))

    def test_case_two(self):
        """Outliers peak at 0, inliers at -1."""

        dataset = Generate.gen_phase_case("II", Generate.DgpConfig(
            "phase-2", n=100, r=0.05, m=81, seed=2))
        t = dataset.grid.points
        self.assertEqual(dataset.labels.outliers_cnt, 5)

        for row in _inlier_rows(dataset):
            self.assertAlmostEqual(t[numpy.argmax(row)], -1, delta=0.05)
        for row in _outlier_rows(dataset):
            self.assertAlmostEqual(t[numpy.argmax(row)], 0, delta=0.05)

    def test_case_three(self):
        """Peaks lie in the phase ranges of the two manifolds."""

        dataset = Generate.gen_phase_case("III", Generate.DgpConfig(
            "phase-3", n=100, r=0.1, m=161, seed=3))
        t = dataset.grid.points
        step = t[1] - t[0]

        for row in _inlier_rows(dataset):
            peak = t[numpy.argmax(row)]
            self.assertTrue(-1.3 - step <= peak <= -0.7 + step)
        for row in _outlier_rows(dataset):
            peak = t[numpy.argmax(row)]
            self.assertTrue(-0.5 - step <= peak <= 0.1 + step)

    def test_bad_case(self):
        """Unknown cases are errors."""

        self.assertRaises(Generate.Error, Generate.gen_phase_case, "IV",
                          Generate.DgpConfig("phase-1"))


class TestTemplates(unittest.TestCase):
    """Warped template curves and their building blocks."""

    def test_partition_of_unity(self):
        """B-spline basis functions sum to 1."""

        x = numpy.linspace(0, 1, 97)
        for n_basis in (4, 15, 25):
            basis = Generate.bspline_basis(x, n_basis)
            self.assertEqual(basis.shape, (97, n_basis))
            self.assertTrue(numpy.allclose(basis.sum(axis=1), 1, rtol=0,
                                           atol=1e-9))
            self.assertTrue(numpy.all(basis >= -1e-12))
        self.assertRaises(Generate.Error, Generate.bspline_basis, x, 3)

    def test_warps(self):
        """Beta CDF warps fix the endpoints and are monotone."""

        t = numpy.linspace(0, 1, 50)
        gen = numpy.random.default_rng(6)
        for a, b in gen.uniform(0.1, 8, (30, 2)):
            warp = Generate.beta_ecdf(t, a, b)
            self.assertEqual(warp[0], 0)
            self.assertAlmostEqual(warp[-1], 1, places=12)
            self.assertTrue(numpy.all(numpy.diff(warp) >= -1e-12))

        for a in (0.5, 3, 7.5):
            self.assertAlmostEqual(Generate.beta_ecdf(0.5, a, a), 0.5,
                                   delta=1e-9)

    def test_warps_against_integration(self):
        """The Beta CDF equals the integrated Beta density."""

        for a, b in ((3, 4), (4.5, 5.5), (2, 7)):
            for point in (0.1, 0.35, 0.5, 0.8):
                value, _ = integrate.quad(stats.beta.pdf, 0, point,
                                          args=(a, b), epsabs=1e-12,
                                          epsrel=1e-12)
                self.assertAlmostEqual(Generate.beta_ecdf(point, a, b),
                                       value, delta=1e-8)

    def test_template_variants(self):
        """Counts, seeds and invalid variants."""

        for variant in (3, 4):
            cfg = Generate.DgpConfig("templates-%d" % variant, n=40, r=0.1,
                                     seed=5)
            first = Generate.gen_dgp_templates(variant, cfg)
            other = Generate.gen_dgp_templates(variant, cfg.replace(seed=6))

            self.assertEqual(first.labels.outliers_cnt, 4)
            self.assertGreater(numpy.max(numpy.abs(first.values -
                                                   other.values)), 0)
            self.assertEqual(first.meta["params"]["n_basis"],
                             15 if variant == 3 else 25)

        self.assertRaises(Generate.Error, Generate.gen_dgp_templates, 5,
                          Generate.DgpConfig("templates-3"))


class TestGaussianProcess(unittest.TestCase):
    """The noise process of the sim models."""

    def test_covariance(self):
        """Empirical covariances approach exp(-|s - t|)."""

        gen = numpy.random.default_rng(13)
        grid = Functional.Grid.uniform(0, 1, 10)
        paths = Generate.sample_gp(gen, grid, 2000)
        t = grid.points
        target = numpy.exp(-numpy.abs(t[:, numpy.newaxis] - t))
        empirical = numpy.cov(paths, rowvar=False)

        error = numpy.linalg.norm(empirical - target) / \
                numpy.linalg.norm(target)
        self.assertLessEqual(error, 0.15)
        self.assertLess(numpy.max(numpy.abs(paths.mean(axis=0))), 0.15)

    def test_variance(self):
        """The pointwise variance is 1."""

        gen = numpy.random.default_rng(14)
        grid = Functional.Grid.uniform(0, 1, 50)
        paths = Generate.sample_gp(gen, grid, 2000)
        for idx in (0, 25, 49):
            self.assertAlmostEqual(numpy.var(paths[:, idx]), 1, delta=0.1)


class TestSimModels(unittest.TestCase):
    """The linear trend models and their mixtures."""

    def _deviations(self, name, param, **kwargs):
        """
        Generate DGP 'name' twice with the same seed, once with the outlier
        parameter 'param' set to zero, and return the difference and the
        labels.
        """

        cfg = Generate.DgpConfig(name, seed=21, **kwargs)
        full = Generate.generate(cfg)
        flat = Generate.generate(cfg.replace(params={param: 0}))
        return full.values - flat.values, full.labels.flags

    def test_shift_outliers(self):
        """Shift outliers are moved by 8 in either direction."""

        diff, labels = self._deviations("sim-1", "shift", n=100, r=0.1)
        self.assertTrue(numpy.all(diff[~labels] == 0))
        for row in diff[labels]:
            self.assertTrue(numpy.allclose(numpy.abs(row), 8, atol=1e-9))

    def test_shift_levels(self):
        """The average outlier level is 8 away from the trend."""

        levels = []
        for seed in range(200):
            dataset = _generate("sim-1", n=20, r=0.1, seed=seed)
            t = dataset.grid.points
            for row in _outlier_rows(dataset):
                levels.append(abs(numpy.mean(row - 4 * t)))
        self.assertAlmostEqual(numpy.mean(levels), 8, delta=0.5)

    def test_isolated_outliers(self):
        """Spikes cover at most 5% of the grid."""

        diff, labels = self._deviations("sim-2", "spike", n=60, r=0.1, m=100)
        self.assertTrue(numpy.all(diff[~labels] == 0))
        for row in diff[labels]:
            support = numpy.flatnonzero(numpy.abs(row) > 1e-9)
            self.assertGreater(len(support), 0)
            self.assertLessEqual(len(support), 5)
            self.assertTrue(numpy.allclose(numpy.abs(row[support]), 6,
                                           atol=1e-9))

    def test_isolated_outliers_coarse_grid(self):
        """Every spike hits a grid point even when the grid is sparse."""

        diff, labels = self._deviations("sim-2", "spike", n=1000, r=0.1,
                                        m=10)
        self.assertEqual(numpy.count_nonzero(labels), 100)
        self.assertTrue(numpy.all(diff[~labels] == 0))
        for row in diff[labels]:
            support = numpy.flatnonzero(numpy.abs(row) > 1e-9)
            self.assertEqual(len(support), 1)
            self.assertAlmostEqual(abs(row[support[0]]), 6, places=9)

    def test_shape_outliers(self):
        """Shape deviations are periodic with amplitude 2."""

        diff, labels = self._deviations("sim-shape", "shape_amp", n=50,
                                        r=0.1, m=200)
        self.assertTrue(numpy.all(diff[~labels] == 0))
        for row in diff[labels]:
            self.assertLessEqual(numpy.max(numpy.abs(row)), 2 + 1e-9)
            self.assertGreater(numpy.max(numpy.abs(row)), 1.9)

    def test_shift_dispersion(self):
        """The vertical shift dispersion spreads all the curves."""

        plain = _generate("sim-shape", n=100, r=0.1, seed=3)
        spread = _generate("sim-shape", n=100, r=0.1, seed=3,
                           params={"shift_sd": 4})
        self.assertGreater(numpy.std(spread.values.mean(axis=1)),
                           2 * numpy.std(plain.values.mean(axis=1)))
        self.assertEqual(spread.meta["params"]["d2"], 1)
        self.assertEqual(plain.meta["params"]["d2"], 0)

    def test_mixture_kinds(self):
        """Mixtures record the kind of every outlier."""

        dataset = Generate.gen_dgp_mixture(2, Generate.DgpConfig(
            "mixture-2", n=100, r=0.1, seed=4))
        kinds = [tag for tag in dataset.meta["kinds"] if tag != "inlier"]
        self.assertEqual(len(kinds), 10)
        self.assertTrue(set(kinds) <= set(("shift", "isolated", "shape")))

        dataset = Generate.gen_dgp_mixture(1, Generate.DgpConfig(
            "mixture-1", n=100, r=0.1, seed=4))
        kinds = [tag for tag in dataset.meta["kinds"] if tag != "inlier"]
        self.assertEqual(kinds.count("shift"), 5)
        self.assertEqual(kinds.count("shape"), 5)

        self.assertRaises(Generate.Error, Generate.gen_dgp_mixture, 3,
                          Generate.DgpConfig("mixture-1"))

    def test_rare_outliers(self):
        """r = 0.01 with n = 1000 gives 10 outliers."""

        dataset = _generate("dgp-2", n=1000, r=0.01, m=20, seed=5)
        self.assertEqual(dataset.labels.outliers_cnt, 10)

    def test_bad_model(self):
        """Unknown model ids are errors."""

        self.assertRaises(Generate.Error, Generate.gen_sim_model, "4",
                          Generate.DgpConfig("sim-1"))
