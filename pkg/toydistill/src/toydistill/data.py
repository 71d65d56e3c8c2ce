"""Procedurally generated 10-class small-image dataset.

Each class is an oriented sinusoidal grating (orientations 18 degrees
apart) with per-sample random phase, frequency jitter, per-channel gain
and additive Gaussian noise. Fully seeded, so every run sees the same
images without downloading anything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

N_CLASSES = 10


@dataclass(frozen=True)
class DataBundle:
    """eval_x/eval_y is the fixed slice of the training set used to
    score candidate ops and architectures; test_x/test_y is held out."""

    train_x: torch.Tensor
    train_y: torch.Tensor
    eval_x: torch.Tensor
    eval_y: torch.Tensor
    test_x: torch.Tensor
    test_y: torch.Tensor


def _gratings(rng: np.ndarray, n: int, image_size: int) -> tuple[np.ndarray, np.ndarray]:
    labels = rng.integers(0, N_CLASSES, size=n)
    coords = np.linspace(-1.0, 1.0, image_size, dtype=np.float32)
    yy, xx = np.meshgrid(coords, coords, indexing="ij")
    images = np.empty((n, 3, image_size, image_size), dtype=np.float32)
    for i in range(n):
        theta = np.pi * labels[i] / N_CLASSES
        freq = rng.uniform(2.0, 6.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.4, 1.0)
        wave = amp * np.sin(2.0 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
        gains = rng.uniform(0.6, 1.4, size=3).astype(np.float32)
        noise = rng.normal(0.0, 1.1, size=(3, image_size, image_size)).astype(np.float32)
        images[i] = wave[None, :, :] * gains[:, None, None] + noise
    return images, labels.astype(np.int64)


def make_dataset(
    seed: int,
    n_train: int = 2048,
    n_eval: int = 512,
    n_test: int = 512,
    image_size: int = 32,
) -> DataBundle:
    """The eval subset is the first n_eval training images (a fixed
    train slice, identical across runs), not held-out data."""
    if n_eval > n_train:
        raise ValueError("n_eval is a slice of the training set")
    rng = np.random.default_rng(seed)
    x, y = _gratings(rng, n_train + n_test, image_size)
    train_x = torch.from_numpy(x[:n_train])
    train_y = torch.from_numpy(y[:n_train])
    return DataBundle(
        train_x=train_x,
        train_y=train_y,
        eval_x=train_x[:n_eval],
        eval_y=train_y[:n_eval],
        test_x=torch.from_numpy(x[n_train:]),
        test_y=torch.from_numpy(y[n_train:]),
    )
