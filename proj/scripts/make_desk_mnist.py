#!/usr/bin/env python3
"""Build the bundled desk-scale MNIST subset under data/mnist/.

Reads the per-digit JSON files shipped with the `mnist` npm package
(https://www.npmjs.com/package/mnist, 10,000 genuine MNIST samples) and
re-encodes them as standard big-endian IDX files: a 9,000-example training
split and a 1,000-example test split, class-interleaved with a fixed seed.

Usage: make_desk_mnist.py <path-to-npm-mnist>/src/digits <output-dir>
"""

import json
import struct
import sys
from pathlib import Path

import numpy as np

SEED = 12345
TEST_COUNT = 1000


def load_digits(digit_dir: Path):
    images, labels = [], []
    for d in range(10):
        data = json.loads((digit_dir / f"{d}.json").read_text())["data"]
        arr = np.asarray(data, dtype=np.float64).reshape(-1, 784)
        images.append(np.rint(arr * 255.0).astype(np.uint8))
        labels.append(np.full(arr.shape[0], d, dtype=np.uint8))
    return np.concatenate(images), np.concatenate(labels)


def write_idx_images(path: Path, images: np.ndarray):
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", 0x00000803, images.shape[0], 28, 28))
        f.write(images.tobytes())


def write_idx_labels(path: Path, labels: np.ndarray):
    with open(path, "wb") as f:
        f.write(struct.pack(">ii", 0x00000801, labels.shape[0]))
        f.write(labels.tobytes())


def main():
    digit_dir, out_dir = Path(sys.argv[1]), Path(sys.argv[2])
    out_dir.mkdir(parents=True, exist_ok=True)

    images, labels = load_digits(digit_dir)
    order = np.random.RandomState(SEED).permutation(len(labels))
    images, labels = images[order], labels[order]

    train_n = len(labels) - TEST_COUNT
    write_idx_images(out_dir / "train-images-idx3-ubyte", images[:train_n])
    write_idx_labels(out_dir / "train-labels-idx1-ubyte", labels[:train_n])
    write_idx_images(out_dir / "test-images-idx3-ubyte", images[train_n:])
    write_idx_labels(out_dir / "test-labels-idx1-ubyte", labels[train_n:])

    print(f"train: {train_n}  test: {TEST_COUNT}")
    for split, ls in (("train", labels[:train_n]), ("test", labels[train_n:])):
        counts = np.bincount(ls, minlength=10)
        print(f"{split} class counts: {counts.tolist()}")


if __name__ == "__main__":
    main()
