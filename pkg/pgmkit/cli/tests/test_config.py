import logging

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from cli.base import apply_verbosity
from cli.config import (RunConfig, parse_lambdas, parse_normalization,
                        parse_paths, parse_size, parse_weights)
from core.exceptions import UsageError
from losses.terms import LossWeights


class ParseTests(SimpleTestCase):

    def test_size(self):
        self.assertEqual(parse_size('64x48'), (64, 48))
        self.assertEqual(parse_size('640X480'), (640, 480))
        for text in ('0x0', '64', 'axb', '-1x5', '3x4x5'):
            with self.subTest(text=text):
                with self.assertRaises(UsageError):
                    parse_size(text)

    def test_lambdas(self):
        self.assertEqual(parse_lambdas('1,5,10,20'), (1.0, 5.0, 10.0, 20.0))
        self.assertEqual(parse_lambdas('3'), (3.0,))
        for text in ('5,1', '0', '1,,2', 'x', '1,1', 'inf'):
            with self.subTest(text=text):
                with self.assertRaises(UsageError):
                    parse_lambdas(text)

    def test_paths_and_normalization(self):
        self.assertEqual(parse_paths('exact,fft'), ('exact', 'fft'))
        self.assertEqual(parse_normalization('max'), 'max_one')
        self.assertEqual(parse_normalization('raw'), 'raw')
        with self.assertRaises(UsageError):
            parse_paths('exact,gpu')
        with self.assertRaises(UsageError):
            parse_paths('fft,fft')
        with self.assertRaises(UsageError):
            parse_normalization('sum')

    def test_weights(self):
        self.assertEqual(parse_weights(None), LossWeights())
        self.assertEqual(parse_weights('1,2,3,4,5'),
                         LossWeights(1.0, 2.0, 3.0, 4.0, 5.0))
        self.assertEqual(parse_weights('gh=0.5').w_gh, 0.5)
        self.assertEqual(parse_weights('gh=0.5').w_cls, 0.2)
        for text in ('1,2', 'box=1', 'cls=-1', '1,2,3,4,x'):
            with self.subTest(text=text):
                with self.assertRaises(UsageError):
                    parse_weights(text)


class RunConfigTests(SimpleTestCase):

    @override_settings(PGM_DEFAULT_LAMBDAS=[2, 4], PGMKIT_WORKERS=3)
    def test_defaults_from_settings(self):
        cfg = RunConfig.from_options('heatmap', {})
        self.assertEqual(cfg.lambdas, (2.0, 4.0))
        self.assertEqual(cfg.path, 'separable')
        self.assertEqual(cfg.normalization, 'max_one')
        self.assertEqual(cfg.workers, 3)
        self.assertEqual(cfg.fan.rho0, 0.25)

    def test_options(self):
        cfg = RunConfig.from_options('heatmap', {
            'lambdas': '1,5', 'path': 'fft', 'normalize': 'raw',
            'threads': '2', 'alpha': '0.5',
        })
        self.assertEqual(cfg.lambdas, (1.0, 5.0))
        self.assertEqual(cfg.path, 'fft')
        self.assertEqual(cfg.normalization, 'raw')
        self.assertEqual(cfg.workers, 2)
        self.assertEqual(cfg.fan.alpha, 0.5)

    def test_invalid_fan(self):
        with self.assertRaises(UsageError):
            RunConfig.from_options('fan', {'rho0': '0.9'})


class VerbosityTests(SimpleTestCase):

    def configured_levels(self):
        return {
            name: logging.getLevelName(config['level'])
            for name, config in settings.LOGGING['loggers'].items()
        }

    def tearDown(self):
        apply_verbosity(1)

    def test_levels_are_restored(self):
        """После -v 2 уровень 1 возвращает уровни из LOGGING."""
        apply_verbosity(2)
        self.assertEqual(logging.getLogger('pgm_core').level, logging.DEBUG)
        apply_verbosity(0)
        self.assertEqual(logging.getLogger('metrics').level, logging.WARNING)
        apply_verbosity(1)
        for name, level in self.configured_levels().items():
            with self.subTest(logger=name):
                self.assertEqual(logging.getLogger(name).level, level)
