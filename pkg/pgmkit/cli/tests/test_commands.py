import json
import os
import shutil
import tempfile
from io import StringIO

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from mask_io.annotations import (ImageInfo, dump_annotations,
                                 load_annotations)
from mask_io.grids import BinaryMask, Detection, InstanceAnnotation
from mask_io.netpbm import (parse_p5, read_mask, read_pfm, write_grid,
                            write_mask)

TEMP_ROOT = tempfile.mkdtemp(dir=settings.BASE_DIR)


def square_mask(height=12, width=16):
    bits = np.zeros((height, width), dtype=bool)
    bits[3:8, 4:11] = True
    return BinaryMask(bits)


class CommandTestCase(SimpleTestCase):

    @classmethod
    def tearDownClass(cls):
        super().tearDownClass()
        shutil.rmtree(TEMP_ROOT, ignore_errors=True)

    def setUp(self):
        os.makedirs(TEMP_ROOT, exist_ok=True)
        self.workdir = tempfile.mkdtemp(dir=TEMP_ROOT)
        self.mask_path = os.path.join(self.workdir, 'mask.pgm')
        write_mask(square_mask(), self.mask_path)

    def run_command(self, name, **options):
        out = StringIO()
        call_command(name, stdout=out, **options)
        return out.getvalue()

    def assert_exit_code(self, code, name, **options):
        with self.assertRaises(CommandError) as caught:
            self.run_command(name, **options)
        self.assertEqual(caught.exception.returncode, code)


class HeatmapCommandTests(CommandTestCase):

    def test_four_lambdas(self):
        out_dir = os.path.join(self.workdir, 'out')
        self.run_command('heatmap', mask=self.mask_path, lambdas='1,5,10,20',
                         path='separable', normalize='max', out_dir=out_dir)
        self.assertEqual(sorted(os.listdir(out_dir)), [
            'heatmap.json', 'heatmap_lambda1.pfm', 'heatmap_lambda10.pfm',
            'heatmap_lambda20.pfm', 'heatmap_lambda5.pfm',
        ])
        with open(os.path.join(out_dir, 'heatmap.json')) as stream:
            sidecar = json.load(stream)
        self.assertEqual(sidecar['lambdas'], [1.0, 5.0, 10.0, 20.0])
        self.assertEqual(sidecar['path'], 'separable')
        self.assertEqual(sidecar['normalization'], 'max_one')
        self.assertEqual(len(sidecar['seconds']), 4)
        values = read_pfm(os.path.join(out_dir, 'heatmap_lambda5.pfm'))
        self.assertEqual(values.shape, (12, 16))
        self.assertEqual(values.max(), 1.0)

    def test_single_lambda(self):
        out_dir = os.path.join(self.workdir, 'single')
        self.run_command('heatmap', mask=self.mask_path, lambdas='3',
                         out_dir=out_dir)
        self.assertEqual(sorted(os.listdir(out_dir)),
                         ['heatmap.json', 'heatmap_lambda3.pfm'])

    def test_unreadable_mask_writes_nothing(self):
        out_dir = os.path.join(self.workdir, 'missing')
        self.assert_exit_code(2, 'heatmap', mask='/nonexistent/mask.pgm',
                              lambdas='1', out_dir=out_dir)
        self.assertFalse(os.path.exists(out_dir))

    def test_bad_lambdas(self):
        out_dir = os.path.join(self.workdir, 'bad')
        self.assert_exit_code(2, 'heatmap', mask=self.mask_path,
                              lambdas='5,1', out_dir=out_dir)
        self.assertFalse(os.path.exists(out_dir))

    def test_kind_choices(self):
        """Форматы чтения и записи ограничены известными видами."""
        out_dir = os.path.join(self.workdir, 'kinds')
        for flag in ('--input-kind=jpeg', '--format=netpbm_gray'):
            with self.subTest(flag=flag):
                with self.assertRaises(CommandError):
                    call_command('heatmap', flag, f'--mask={self.mask_path}',
                                 f'--out-dir={out_dir}', stdout=StringIO())
        self.run_command('heatmap', mask=self.mask_path, lambdas='2',
                         normalize='max_one', format='netpbm_gray16',
                         out_dir=out_dir)
        self.assertIn('heatmap_lambda2.pgm', os.listdir(out_dir))


class BenchCommandTests(CommandTestCase):

    def test_paths_agree_with_exact(self):
        report = json.loads(self.run_command(
            'bench', size='16x16', lam='1', paths='exact,separable,fft'
        ))
        self.assertEqual(report['seed'], settings.BENCH_SEED)
        self.assertEqual(report['reference'], 'exact')
        self.assertEqual(set(report['paths']), {'exact', 'separable', 'fft'})
        self.assertEqual(len(report['paths']['fft']['seconds']), 5)
        self.assertLess(report['max_relative_deviation'], 1e-3)
        self.assertNotIn('exact_extrapolated_seconds', report)

    def test_fast_paths_agree(self):
        report = json.loads(self.run_command(
            'bench', size='48x32', lam='3', paths='separable,fft'
        ))
        self.assertLess(report['max_relative_deviation'], 1e-4)
        self.assertGreater(report['exact_extrapolated_seconds'], 0.0)

    def test_exact_refused_above_budget(self):
        report = json.loads(self.run_command(
            'bench', size='200x100', lam='1', paths='exact,separable'
        ))
        self.assertTrue(report['exact_refused'])
        self.assertEqual(list(report['paths']), ['separable'])
        self.assertIn('exact_extrapolated_seconds', report)

    def test_usage_errors(self):
        cases = ({'size': '0x0'}, {'size': '8x8', 'repeats': '3'},
                 {'size': '8x8', 'paths': 'gpu'}, {'size': '8x8', 'lam': '0'})
        for options in cases:
            with self.subTest(options=options):
                self.assert_exit_code(2, 'bench', **options)


class FanCommandTests(CommandTestCase):

    def test_outputs(self):
        out_dir = os.path.join(self.workdir, 'fan')
        self.run_command('fan', input=self.mask_path, out_dir=out_dir)
        gain = read_pfm(os.path.join(out_dir, 'fan_gain.pfm'))
        filtered = read_pfm(os.path.join(out_dir, 'fan_filtered.pfm'))
        self.assertEqual(gain.shape, (12, 16))
        self.assertEqual(filtered.shape, (12, 16))
        self.assertLessEqual(np.abs(gain).max(), 1.0)

    def test_constant_input(self):
        path = os.path.join(self.workdir, 'flat.pfm')
        write_grid(np.full((8, 8), 0.5), path)
        out_dir = os.path.join(self.workdir, 'flat')
        self.run_command('fan', input=path, input_kind='pfm_float',
                         out_dir=out_dir)
        gain = read_pfm(os.path.join(out_dir, 'fan_gain.pfm'))
        self.assertFalse(gain.any())

    def test_invalid_rho(self):
        self.assert_exit_code(2, 'fan', input=self.mask_path, rho0='0.8',
                              out_dir=os.path.join(self.workdir, 'x'))


class LossCommandTests(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.heatmap_dir = os.path.join(self.workdir, 'maps')
        self.run_command('heatmap', mask=self.mask_path, lambdas='1,2',
                         out_dir=self.heatmap_dir)
        self.pred_mask = os.path.join(self.workdir, 'pred.pfm')
        write_grid(square_mask().to_grid(), self.pred_mask)
        self.heatmaps = ','.join(
            os.path.join(self.heatmap_dir, f'heatmap_lambda{lam}.pfm')
            for lam in (1, 2)
        )

    def test_prediction_equals_truth(self):
        """При совпадении с эталоном итог не больше 1e-5."""
        breakdown = json.loads(self.run_command(
            'loss', pred_mask=self.pred_mask, gt_mask=self.mask_path,
            pred_heatmaps=self.heatmaps, lambdas='1,2', logits='10,-10',
            class_label='0',
        ))
        self.assertEqual(
            list(breakdown), ['cls', 'obj', 'mask', 'dice', 'gh', 'total']
        )
        self.assertLessEqual(breakdown['total'], 1e-5)

    def test_heatmap_count_mismatch(self):
        self.assert_exit_code(
            2, 'loss', pred_mask=self.pred_mask, gt_mask=self.mask_path,
            pred_heatmaps=self.heatmaps, lambdas='1', logits='0,0',
            class_label='0',
        )

    def test_custom_weights(self):
        breakdown = json.loads(self.run_command(
            'loss', pred_mask=self.pred_mask, gt_mask=self.mask_path,
            pred_heatmaps=self.heatmaps, lambdas='1,2', logits='0,0',
            class_label='1', weights='1,0,0,0,0',
        ))
        self.assertAlmostEqual(breakdown['total'], np.log(2), places=9)


class EvalCommandTests(CommandTestCase):

    def setUp(self):
        super().setUp()
        images = [ImageInfo(1, 16, 12)]
        gts = [(1, [InstanceAnnotation(2, square_mask())])]
        dets = [(1, [Detection(2, 0.9, square_mask())])]
        self.gt_path = os.path.join(self.workdir, 'gt.json')
        self.pred_path = os.path.join(self.workdir, 'pred.json')
        dump_annotations(self.gt_path, images, gts)
        dump_annotations(self.pred_path, images, dets)

    def test_identical_predictions(self):
        pr_dir = os.path.join(self.workdir, 'pr')
        result = json.loads(self.run_command(
            'eval', predictions=self.pred_path, ground_truth=self.gt_path,
            pr_dir=pr_dir,
        ))
        self.assertEqual(result['mAP'], 1.0)
        self.assertEqual(result['AP_M'], -1.0)
        self.assertEqual(result['per_category']['2']['AP50'], 1.0)
        self.assertEqual(sorted(os.listdir(pr_dir)),
                         ['pr_cat2_iou50.csv', 'pr_cat2_iou75.csv'])
        with open(os.path.join(pr_dir, 'pr_cat2_iou50.csv')) as stream:
            lines = stream.read().splitlines()
        self.assertEqual(lines[0], 'recall,precision')
        self.assertEqual(len(lines), 102)

    def test_baseline_delta(self):
        baseline = os.path.join(self.workdir, 'baseline.json')
        with open(baseline, 'w') as stream:
            stream.write(self.run_command(
                'eval', predictions=self.pred_path, ground_truth=self.gt_path
            ))
        result = json.loads(self.run_command(
            'eval', predictions=self.pred_path, ground_truth=self.gt_path,
            baseline=baseline,
        ))
        self.assertEqual(result['delta']['mAP'], 0.0)
        self.assertIsNone(result['delta']['AP_L'])

    def test_export_predictions(self):
        """Маски предсказаний сохраняются в P5 и в JSON с RLE."""
        export_dir = os.path.join(self.workdir, 'export')
        self.run_command('eval', predictions=self.pred_path,
                         ground_truth=self.gt_path, export_dir=export_dir)
        self.assertEqual(sorted(os.listdir(export_dir)),
                         ['pred_img1_0.pgm', 'predictions.json'])
        self.assertEqual(
            read_mask(os.path.join(export_dir, 'pred_img1_0.pgm')),
            square_mask(),
        )
        [(image_id, [det])] = load_annotations(
            os.path.join(export_dir, 'predictions.json'), predictions=True)
        self.assertEqual(image_id, 1)
        self.assertEqual((det.category_id, det.score), (2, 0.9))
        self.assertEqual(det.mask, square_mask())

    def test_export_dir_is_file(self):
        self.assert_exit_code(2, 'eval', predictions=self.pred_path,
                              ground_truth=self.gt_path,
                              export_dir=self.mask_path)

    def test_broken_inputs(self):
        broken = os.path.join(self.workdir, 'broken.json')
        with open(broken, 'w') as stream:
            stream.write('{"images": [')
        self.assert_exit_code(2, 'eval', predictions=broken,
                              ground_truth=self.gt_path)
        self.assert_exit_code(2, 'eval', predictions=self.pred_path,
                              ground_truth=self.gt_path, baseline=broken)


class VizCommandTests(CommandTestCase):

    def test_panel_layout(self):
        """Четыре карты на маске WxH дают панель 4W+6 на H."""
        out = os.path.join(self.workdir, 'panel.pgm')
        self.run_command('viz', mask=self.mask_path, lambdas='1,5,10,20',
                         out=out)
        with open(out, 'rb') as stream:
            samples, maxval = parse_p5(stream.read())
        self.assertEqual(maxval, 65535)
        self.assertEqual(samples.shape, (12, 4 * 16 + 6))
        self.assertFalse(samples[:, 16:18].any())
        self.assertEqual(samples[:, :16].max(), 65535)
