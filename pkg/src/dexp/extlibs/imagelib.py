"""Image loading and pixel transforms.

Root: `image`, whose load member reads a PNG from the configured asset
directory.  Images support greyScale (channel average), blur (box blur of
integer radius, edge windows shrink rather than pad) and combine (linear
per-pixel mix, ratio 0..100 giving the weight of the receiver).

All arithmetic is exact: window sums stay below 2^53 so the float64
integral image introduces no rounding before the final round-to-uint8.
"""

from __future__ import annotations

import base64
import io
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

from ..objects import ApplyFn, ImageData, Obj, bottom, is_bottom, module
from ..typecheck import (ErrorType, MemberSig, NUM, ObjType, TEXT, Type,
                         TypedLibrary)

IMAGE = ObjType("image")
IMAGE.members.update({
    "greyScale": MemberSig((), IMAGE),
    "blur": MemberSig((NUM,), IMAGE),
    "combine": MemberSig((IMAGE, NUM), IMAGE),
})

IMAGE_MODULE = ObjType("image module", {
    "load": MemberSig((TEXT,), IMAGE),
})


def default_asset_dir() -> Path:
    return Path(__file__).resolve().parent / "fixtures"


def _channels(data: ImageData) -> np.ndarray:
    depth = 1 if data.mode == "L" else 3
    arr = np.frombuffer(data.pixels, dtype=np.uint8)
    return arr.reshape(data.height, data.width, depth)


def _image_obj(mode: str, arr: np.ndarray) -> Obj:
    h, w = arr.shape[:2]
    return Obj("image", ImageData(w, h, mode, arr.astype(np.uint8).tobytes()))


def _whole(value, minimum: Optional[int] = None) -> Optional[int]:
    if not (isinstance(value, Obj) and value.tag == "num"):
        return None
    n = value.payload
    if isinstance(n, float):
        if not n.is_integer():
            return None
        n = int(n)
    if minimum is not None and n < minimum:
        return None
    return n


def grey_scale(data: ImageData) -> ImageData:
    if data.mode == "L":
        return data
    arr = _channels(data).astype(np.uint16)
    return ImageData(data.width, data.height, "L",
                     (arr.sum(axis=2) // 3).astype(np.uint8).tobytes())


def box_blur(data: ImageData, radius: int) -> ImageData:
    arr = _channels(data).astype(np.float64)
    h, w = arr.shape[:2]
    integral = np.zeros((h + 1, w + 1, arr.shape[2]))
    integral[1:, 1:] = arr.cumsum(axis=0).cumsum(axis=1)
    ys, xs = np.arange(h), np.arange(w)
    y0, y1 = np.clip(ys - radius, 0, None), np.clip(ys + radius, None, h - 1)
    x0, x1 = np.clip(xs - radius, 0, None), np.clip(xs + radius, None, w - 1)
    y0c, y1c = y0[:, None], y1[:, None]
    x0c, x1c = x0[None, :], x1[None, :]
    sums = (integral[y1c + 1, x1c + 1] - integral[y0c, x1c + 1]
            - integral[y1c + 1, x0c] + integral[y0c, x0c])
    area = ((y1 - y0 + 1)[:, None] * (x1 - x0 + 1)[None, :])[..., None]
    out = np.rint(sums / area).astype(np.uint8)
    return ImageData(data.width, data.height, data.mode, out.tobytes())


def _to_rgb(data: ImageData) -> ImageData:
    if data.mode == "RGB":
        return data
    grey = _channels(data)
    return ImageData(data.width, data.height, "RGB",
                     np.repeat(grey, 3, axis=2).tobytes())


def mix(first: ImageData, second: ImageData, ratio: float) -> ImageData:
    if first.mode != second.mode:
        first, second = _to_rgb(first), _to_rgb(second)
    weight = ratio / 100.0
    a = _channels(first).astype(np.float64)
    b = _channels(second).astype(np.float64)
    out = np.rint(weight * a + (1.0 - weight) * b).astype(np.uint8)
    return ImageData(first.width, first.height, first.mode, out.tobytes())


def encode_png_base64(data: ImageData) -> str:
    img = PILImage.frombytes(data.mode, (data.width, data.height), data.pixels)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


class ImageLib(TypedLibrary):
    def __init__(self, asset_dir=None):
        self.asset_dir = Path(asset_dir) if asset_dir else default_asset_dir()

    @property
    def root_bindings(self) -> Mapping[str, Obj]:
        return {"image": module("image")}

    @property
    def root_types(self) -> Mapping[str, Type]:
        return {"image": IMAGE_MODULE}

    def owns(self, receiver: Obj) -> bool:
        if not isinstance(receiver, Obj):
            return False
        if receiver.tag == "image":
            return True
        return receiver.tag == "module" and receiver.payload == "image"

    def type_of(self, obj: Obj) -> Optional[Type]:
        if is_bottom(obj):
            return ErrorType(obj.payload or "failed computation")
        if obj.tag == "image":
            return IMAGE
        if obj.tag == "module" and obj.payload == "image":
            return IMAGE_MODULE
        return None

    def eval_member(self, receiver: Obj, member: str, args, apply: ApplyFn) -> Obj:
        if not isinstance(receiver, Obj):  # a bare closure value
            return bottom(f"a function has no member {member!r}")
        if is_bottom(receiver):
            return receiver
        for a in args:
            if isinstance(a, Obj) and is_bottom(a):
                return a

        if receiver.tag == "module" and receiver.payload == "image":
            if member == "load":
                return self._load(args)
            return bottom(f"image module has no member {member!r}")
        if receiver.tag != "image":
            return bottom(f"{receiver.tag} has no member {member!r}")

        data: ImageData = receiver.payload
        if member == "greyScale":
            if args:
                return bottom("greyScale expects no arguments")
            return Obj("image", grey_scale(data))
        if member == "blur":
            if len(args) != 1:
                return bottom("blur expects one radius")
            radius = _whole(args[0], minimum=0)
            if radius is None:
                return bottom("blur expects a whole radius >= 0")
            return Obj("image", box_blur(data, radius))
        if member == "combine":
            return self._combine(data, args)
        return bottom(f"an image has no member {member!r}")

    def _load(self, args) -> Obj:
        if len(args) != 1 or not (isinstance(args[0], Obj)
                                  and args[0].tag == "str"):
            return bottom("load expects one file name")
        name = args[0].payload
        if Path(name).name != name:
            return bottom(f"load expects a bare file name, got {name!r}")
        path = self.asset_dir / name
        try:
            with PILImage.open(path) as img:
                mode = "L" if img.mode == "L" else "RGB"
                converted = img.convert(mode)
                return Obj("image", ImageData(converted.width, converted.height,
                                              mode, converted.tobytes()))
        except FileNotFoundError:
            return bottom(f"cannot load image: {name}")
        except (UnidentifiedImageError, OSError, ValueError):
            return bottom(f"not an image: {name}")

    def _combine(self, data: ImageData, args) -> Obj:
        if len(args) != 2:
            return bottom("combine expects an image and a ratio")
        other = args[0]
        if not (isinstance(other, Obj) and other.tag == "image"):
            return bottom("combine expects an image as its first argument")
        if not (isinstance(args[1], Obj) and args[1].tag == "num"):
            return bottom("combine expects a numeric ratio")
        ratio = args[1].payload
        if not 0 <= ratio <= 100:
            return bottom("combine ratio must be between 0 and 100")
        second: ImageData = other.payload
        if (data.width, data.height) != (second.width, second.height):
            return bottom("combine: image sizes differ")
        return Obj("image", mix(data, second, float(ratio)))
