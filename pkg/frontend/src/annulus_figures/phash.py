"""Difference-hash fingerprints for golden-image regression tests.

Byte equality is only stable within one platform/toolchain; a perceptual
hash over the downscaled grayscale image survives benign rasterization
drift while still catching layout changes.
"""
from __future__ import annotations

from pathlib import Path

from PIL import Image

HASH_SIZE = 16  # (HASH_SIZE+1) x HASH_SIZE grid -> 256-bit hash


def dhash(path: str | Path, size: int = HASH_SIZE) -> str:
    """Horizontal-gradient hash of the image, as a hex string."""
    with Image.open(path) as img:
        gray = img.convert("L").resize(
            (size + 1, size), Image.Resampling.LANCZOS
        )
    pixels = list(gray.getdata())
    bits = 0
    for row in range(size):
        for col in range(size):
            left = pixels[row * (size + 1) + col]
            right = pixels[row * (size + 1) + col + 1]
            bits = (bits << 1) | (left > right)
    return f"{bits:0{size * size // 4}x}"


def hamming(a: str, b: str) -> int:
    return bin(int(a, 16) ^ int(b, 16)).count("1")
