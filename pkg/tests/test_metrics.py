"""Scoring metric and loss functionals."""

import math

import numpy as np
import pytest

from srzoo.data import augment8
from srzoo.evaluation.metrics import LossSpec, MetricError, PsnrScore, loss, psnr

RNG = np.random.default_rng(31)


def img(h=16, w=16, value=None):
    if value is not None:
        return np.full((1, 3, h, w), float(value), np.float32)
    return RNG.integers(0, 256, (1, 3, h, w)).astype(np.float32)


# --------------------------------------------------------------------- PSNR

def test_psnr_closed_form_half_scale_error():
    gt = img(value=0)
    sr = img(value=128)
    got = psnr(sr, gt).value
    want = 10.0 * math.log10(255.0**2 / 128.0**2)
    assert got == pytest.approx(want, abs=1e-3)
    assert got == pytest.approx(5.9866, abs=1e-3)


def test_psnr_single_unit_error():
    gt = img(value=100)
    sr = gt.copy()
    sr[0, 0, 8, 8] += 1.0
    score = psnr(sr, gt)
    n = 3 * 8 * 8  # values inside the 4-pixel border
    assert score.value == pytest.approx(10 * math.log10(255.0**2 * n), abs=1e-6)


def test_psnr_lossless_is_infinite_verdict():
    gt = img()
    score = psnr(gt.copy(), gt)
    assert score.infinite
    assert str(score) == "inf"
    assert score.to_json() == "inf"
    with pytest.raises(MetricError, match="no finite dB"):
        score.value


def test_psnr_border_excluded():
    gt = img(value=50)
    sr = gt.copy()
    # corrupt only the border ring; the scored region is untouched
    sr[:, :, :4, :] = 0
    sr[:, :, -4:, :] = 0
    sr[:, :, :, :4] = 0
    sr[:, :, :, -4:] = 0
    assert psnr(sr, gt).infinite
    # the same corruption with border=0 is very lossy
    assert psnr(sr, gt, border=0).value < 20


def test_psnr_quantizes_before_comparing():
    gt = img(value=100)
    sr = gt + 0.3  # rounds back to 100
    assert psnr(sr, gt).infinite


def test_psnr_symmetry_and_augment_invariance():
    a, b = img(), img()
    assert psnr(a, b).value == pytest.approx(psnr(b, a).value, abs=1e-12)
    for i in range(8):
        assert psnr(augment8(a, i), augment8(b, i), border=0).value == pytest.approx(
            psnr(a, b, border=0).value, abs=1e-12
        )


def test_psnr_decreases_with_noise():
    gt = img()
    small = np.clip(gt + RNG.normal(0, 2, gt.shape), 0, 255)
    large = np.clip(gt + RNG.normal(0, 20, gt.shape), 0, 255)
    assert psnr(small, gt).value > psnr(large, gt).value


def test_psnr_validation():
    with pytest.raises(MetricError, match="shape mismatch"):
        psnr(img(16, 16), img(16, 20))
    with pytest.raises(MetricError, match="too small"):
        psnr(img(8, 8), img(8, 8), border=4)
    with pytest.raises(MetricError, match="non-negative"):
        psnr(img(), img(), border=-1)


# ------------------------------------------------------------------- losses

def test_l1_loss_value():
    a = np.zeros((2, 3, 4, 4), np.float32)
    b = np.full((2, 3, 4, 4), 0.5, np.float32)
    assert loss(a, b, LossSpec("l1")) == pytest.approx(0.5)
    assert loss(a, a, LossSpec("l1")) == 0.0


def test_focal_l1_upweights_hard_items():
    # two items with per-item mean errors 0.1 and 0.4:
    # focal = (0.01 + 0.16) / 0.5 = 0.34 > plain mean 0.25
    a = np.zeros((2, 1, 2, 2), np.float32)
    b = a.copy()
    b[0] += 0.1
    b[1] += 0.4
    spec = LossSpec("focal_l1")
    assert loss(a, b, spec) == pytest.approx(0.34)
    assert loss(a, b, LossSpec("l1")) == pytest.approx(0.25)
    assert loss(a, a, spec) == 0.0


def test_focal_l1_pixel_granularity():
    a = np.zeros((1, 1, 1, 2), np.float32)
    b = np.array([0.1, 0.3], np.float32).reshape(1, 1, 1, 2)
    spec = LossSpec("focal_l1", granularity="pixel")
    want = (0.1**2 + 0.3**2) / 0.4
    assert loss(a, b, spec) == pytest.approx(want)


def test_l1_tv_reduces_to_l1_at_zero_lambda():
    a, b = RNG.random((1, 3, 6, 6)), RNG.random((1, 3, 6, 6))
    assert loss(a, b, LossSpec("l1_tv", lam=0.0)) == pytest.approx(
        loss(a, b, LossSpec("l1"))
    )


def test_l1_tv_monotone_in_lambda_and_smoothness():
    gt = np.zeros((1, 1, 8, 8), np.float32)
    noisy = RNG.random((1, 1, 8, 8)).astype(np.float32)
    lo = loss(noisy, gt, LossSpec("l1_tv", lam=1e-4))
    hi = loss(noisy, gt, LossSpec("l1_tv", lam=1e-2))
    assert hi > lo
    flat = np.full((1, 1, 8, 8), 0.5, np.float32)
    # constant output has zero TV: both lambdas give the same loss
    assert loss(flat, gt, LossSpec("l1_tv", lam=1e-2)) == pytest.approx(
        loss(flat, gt, LossSpec("l1"))
    )


def test_loss_spec_validation():
    with pytest.raises(MetricError, match="unknown loss kind"):
        LossSpec("l2")
    with pytest.raises(MetricError, match="non-negative"):
        LossSpec("l1_tv", lam=-1e-4)
    with pytest.raises(MetricError, match="granularity"):
        LossSpec("focal_l1", granularity="batch")
    with pytest.raises(MetricError, match="shape mismatch"):
        loss(np.zeros((1, 1, 2, 2)), np.zeros((1, 1, 2, 3)), LossSpec("l1"))


def test_psnr_score_formatting():
    assert str(PsnrScore(db=28.7012)) == "28.7012"
    assert PsnrScore(db=28.7012).to_json() == pytest.approx(28.7012)
