"""Независимые эталонные реализации для приёмочных тестов.

Модуль не импортирует код проекта: все вычисления написаны заново,
в лоб и с квадратичной сложностью.
"""
import math

import numpy as np

RECALL_GRID = np.linspace(0.0, 1.0, 101)
IOU_THRESHOLDS = [t / 100 for t in range(50, 100, 5)]
AREA_RANGES = {
    'small': (0, 32 ** 2),
    'medium': (32 ** 2, 96 ** 2),
    'large': (96 ** 2, float('inf')),
}
SUMMARY_KEYS = ('mAP', 'AP50', 'AP75', 'AP_S', 'AP_M', 'AP_L')


def peak_relative(actual, expected):
    """max|a - b| / max|b|."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    peak = np.abs(expected).max()
    diff = np.abs(actual - expected).max()
    return diff / peak if peak > 0 else diff


def pgm_double_sum(values, lam):
    """Σ_u I(u) exp(-|x - u|^2 / 2λ^2) по всем парам пикселей."""
    values = np.asarray(values, dtype=np.float64)
    height, width = values.shape
    ys, xs = np.mgrid[0:height, 0:width]
    points = np.stack([ys.ravel(), xs.ravel()], axis=1).astype(np.float64)
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    weights = np.exp(-d2 / (2.0 * lam * lam))
    return (weights @ values.ravel()).reshape(height, width)


def dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def dft_quadratic(values):
    """Прямое двумерное ДПФ через матрицы Фурье."""
    values = np.asarray(values, dtype=np.complex128)
    height, width = values.shape
    return dft_matrix(height) @ values @ dft_matrix(width)


def idft_quadratic(spectrum):
    height, width = spectrum.shape
    return (np.conj(dft_matrix(height)) @ spectrum
            @ np.conj(dft_matrix(width))) / (height * width)


def highpass_gain_reference(values, rho0=0.25, sharpness=2.0):
    """Re(ОДПФ(W · ДПФ(f - mean))) / max|.| с весом Баттерворта."""
    values = np.asarray(values, dtype=np.float64)
    height, width = values.shape
    centered = values - values.mean()
    if not np.any(centered):
        return np.zeros_like(values)
    weight = np.zeros((height, width))
    for k in range(height):
        for m in range(width):
            fy = min(k, height - k) / height
            fx = min(m, width - m) / width
            rho = math.hypot(fx, fy)
            if rho > 0:
                weight[k, m] = 1.0 / (1.0 + (rho0 / rho) ** (2 * sharpness))
    gain = idft_quadratic(dft_quadratic(centered) * weight).real
    return gain / np.abs(gain).max()


def rle_reference(bits):
    """Длины серий по столбцам, первая серия фоновая."""
    flat = [bool(bit) for column in np.asarray(bits).T for bit in column]
    counts = []
    current = False
    run = 0
    for bit in flat:
        if bit == current:
            run += 1
        else:
            counts.append(run)
            current = bit
            run = 1
    counts.append(run)
    return counts


def iou_reference(a, b):
    inter = int(np.logical_and(a, b).sum())
    union = int(np.logical_or(a, b).sum())
    return inter / union if union else 0.0


def _evaluate_image(dets, gts, threshold, area_range, max_dets):
    """Флаги (score, tp, ignore) детекций и число учитываемых эталонов."""
    low, high = area_range
    dets = sorted(dets, key=lambda det: -det['score'])[:max_dets]
    gt_ignore = [not (low <= gt['area'] < high) for gt in gts]
    gt_order = ([g for g in range(len(gts)) if not gt_ignore[g]]
                + [g for g in range(len(gts)) if gt_ignore[g]])
    taken = [False] * len(gts)
    rows = []
    for det in dets:
        best = None
        best_iou = min(threshold, 1 - 1e-10)
        for g in gt_order:
            if taken[g]:
                continue
            if best is not None and not gt_ignore[best] and gt_ignore[g]:
                break
            iou = iou_reference(det['bits'], gts[g]['bits'])
            if best is None:
                if iou < best_iou:
                    continue
            elif iou <= best_iou:
                continue
            best, best_iou = g, iou
        if best is None:
            ignore = not (low <= det['area'] < high)
            rows.append((det['score'], False, ignore))
        else:
            taken[best] = True
            rows.append((det['score'], True, gt_ignore[best]))
    return rows, sum(1 for flag in gt_ignore if not flag)


def _ap_reference(images, threshold, area_range, max_dets):
    rows = []
    n_gt = 0
    for dets, gts in images:
        image_rows, count = _evaluate_image(dets, gts, threshold,
                                            area_range, max_dets)
        rows.extend(image_rows)
        n_gt += count
    if n_gt == 0:
        return -1.0
    rows = sorted(rows, key=lambda row: -row[0])
    tp = fp = 0
    recall, precision = [], []
    for _, is_tp, ignore in rows:
        if ignore:
            continue
        if is_tp:
            tp += 1
        else:
            fp += 1
        recall.append(tp / n_gt)
        precision.append(tp / (tp + fp))
    for i in range(len(precision) - 1, 0, -1):
        precision[i - 1] = max(precision[i - 1], precision[i])
    total = 0.0
    for point in RECALL_GRID:
        for i, value in enumerate(recall):
            if value >= point:
                total += precision[i]
                break
    return total / len(RECALL_GRID)


def _mean_over(values):
    if any(value == -1.0 for value in values):
        return -1.0
    return sum(values) / len(values)


def coco_reference(dets, gts, area_ranges=None, max_dets=100):
    """Эталонный подсчёт mAP по плоским спискам словарей.

    Запись: image, category, bits, для детекций также score.
    """
    area_ranges = area_ranges or AREA_RANGES
    for record in list(dets) + list(gts):
        record['area'] = int(np.count_nonzero(record['bits']))
    categories = sorted({r['category'] for r in list(dets) + list(gts)})
    image_ids = sorted({r['image'] for r in list(dets) + list(gts)})
    per_category = {}
    for category in categories:
        images = [
            ([d for d in dets
              if d['image'] == image and d['category'] == category],
             [g for g in gts
              if g['image'] == image and g['category'] == category])
            for image in image_ids
        ]

        def ap(threshold, area_range):
            return _ap_reference(images, threshold, area_range, max_dets)

        overall = [ap(t, (0, float('inf'))) for t in IOU_THRESHOLDS]
        if overall[0] == -1.0:
            continue
        summary = {
            'mAP': _mean_over(overall),
            'AP50': overall[0],
            'AP75': overall[5],
        }
        for key, label in (('AP_S', 'small'), ('AP_M', 'medium'),
                           ('AP_L', 'large')):
            summary[key] = _mean_over(
                [ap(t, area_ranges[label]) for t in IOU_THRESHOLDS]
            )
        per_category[str(category)] = summary
    result = {}
    for key in SUMMARY_KEYS:
        defined = [s[key] for s in per_category.values() if s[key] != -1.0]
        result[key] = sum(defined) / len(defined) if defined else -1.0
    result['per_category'] = per_category
    return result
