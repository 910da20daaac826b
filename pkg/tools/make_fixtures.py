"""Regenerate the bundled PNG fixtures from closed-form pixel formulas.

Run from the repository root:

    python tools/make_fixtures.py

The outputs are deterministic (no randomness), so re-running must leave
the committed files unchanged.
"""

from pathlib import Path

import numpy as np
from PIL import Image

SIZE = 96
OUT = Path(__file__).resolve().parent.parent / "src" / "dexp" / "extlibs" / "fixtures"


def shadow() -> np.ndarray:
    """Radial gradient with a dark off-centre disc."""

    y, x = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64)
    cx, cy = SIZE * 0.42, SIZE * 0.38
    dist = np.sqrt((x - cx) ** 2 + (y - cy) ** 2)
    base = np.clip(255 - dist * 2.2, 0, 255)
    disc = dist < SIZE * 0.18
    img = np.zeros((SIZE, SIZE, 3))
    img[..., 0] = base * 0.9
    img[..., 1] = base * 0.7 + 20
    img[..., 2] = np.clip(base * 0.5 + x * 0.4, 0, 255)
    img[disc] = img[disc] * 0.35
    return np.rint(img).astype(np.uint8)


def poppe() -> np.ndarray:
    """Diagonal stripes over a two-axis gradient."""

    y, x = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64)
    stripes = ((x + y) // 12 % 2) * 70
    img = np.zeros((SIZE, SIZE, 3))
    img[..., 0] = np.clip(x * 2.0 + stripes, 0, 255)
    img[..., 1] = np.clip(255 - y * 2.0 - stripes * 0.5, 0, 255)
    img[..., 2] = np.clip(120 + stripes - x * 0.6, 0, 255)
    return np.rint(img).astype(np.uint8)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, pixels in (("shadow.png", shadow()), ("poppe.png", poppe())):
        Image.fromarray(pixels, "RGB").save(OUT / name)
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
