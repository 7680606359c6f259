#!/usr/bin/env python3
"""Regenerates the third-party-encoder image fixtures used by the parser tests.

Pillow and OpenCV encode these, so the parser sees encoder output it did not
write itself. Output is deterministic for a fixed library version.
"""
import io
import pathlib

import cv2
import numpy as np
from PIL import Image, PngImagePlugin

HERE = pathlib.Path(__file__).resolve().parent


def scene(w=96, h=64):
    rng = np.random.default_rng(1234)
    y, x = np.mgrid[0:h, 0:w]
    r = (x * 255 // (w - 1)).astype(np.uint8)
    g = (y * 255 // (h - 1)).astype(np.uint8)
    b = ((np.sin(x / 6.0) * np.cos(y / 5.0) + 1) * 110).astype(np.uint8)
    img = np.stack([r, g, b], axis=-1)
    noise = rng.integers(-12, 13, img.shape)
    return np.clip(img.astype(int) + noise, 0, 255).astype(np.uint8)


def exif_bytes():
    exif = Image.Exif()
    exif[0x010F] = "FixtureCam"   # Make
    exif[0x0110] = "Model 1"      # Model
    exif[0x0131] = "generate_fixtures.py"
    return exif.tobytes()


def main():
    rgb = scene()
    img = Image.fromarray(rgb, "RGB")
    out = {}

    def save(name, **kw):
        buf = io.BytesIO()
        img_ = kw.pop("image", img)
        img_.save(buf, **kw)
        out[name] = buf.getvalue()

    save("baseline.jpg", format="JPEG", quality=85)
    save("progressive.jpg", format="JPEG", quality=80, progressive=True)
    save("exif.jpg", format="JPEG", quality=90, exif=exif_bytes())
    save("gray_optimized.jpg", format="JPEG", quality=70, optimize=True, image=img.convert("L"))
    save("subsampled_420.jpg", format="JPEG", quality=60, subsampling=2,
         icc_profile=b"\x00" * 128, comment=b"fixture comment")

    ok, enc = cv2.imencode(".jpg", cv2.cvtColor(rgb, cv2.COLOR_RGB2BGR),
                           [cv2.IMWRITE_JPEG_QUALITY, 75, cv2.IMWRITE_JPEG_RST_INTERVAL, 2])
    assert ok
    out["restart.jpg"] = enc.tobytes()

    meta = PngImagePlugin.PngInfo()
    meta.add_text("Comment", "fixture")
    save("text.png", format="PNG", pnginfo=meta)
    save("palette.gif", format="GIF", image=img.convert("P", palette=Image.ADAPTIVE, colors=32),
         comment=b"fixture")
    save("rgb.bmp", format="BMP")

    for name, data in out.items():
        (HERE / name).write_bytes(data)
        print(f"{name}\t{len(data)}")


if __name__ == "__main__":
    main()
