#!/usr/bin/env python3
"""Convert published torchvision checkpoints into mribench .mrbw archives.

Downloads (or reuses the torch hub cache of) the pinned IMAGENET1K_V1
checkpoints, verifies them against weights.lock.json, and writes one
<model>.mrbw per backbone into the output directory. Point
MRIBENCH_WEIGHTS_DIR (or pass --out) at that directory when running with
model.init = pretrained.

Requires torch + torchvision and network access to download.pytorch.org
(or a pre-populated ~/.cache/torch/hub/checkpoints).
"""

import argparse
import hashlib
import json
import struct
import sys
from pathlib import Path

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK = 0xFFFFFFFFFFFFFFFF

MODELS = ["mobilenet_v2", "resnet18", "efficientnet_b0", "vgg16"]


def fnv1a(data: bytes, h: int) -> int:
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK
    return h


def write_archive(path: Path, model_id: str, tensors):
    digest = FNV_OFFSET
    with open(path, "wb") as out:
        out.write(b"MRBW")
        out.write(struct.pack("<I", 1))
        ident = model_id.encode()
        out.write(struct.pack("<I", len(ident)))
        out.write(ident)
        out.write(struct.pack("<Q", len(tensors)))
        for name, array in tensors:
            encoded = name.encode()
            out.write(struct.pack("<I", len(encoded)))
            out.write(encoded)
            out.write(struct.pack("<I", len(array.shape)))
            for dim in array.shape:
                out.write(struct.pack("<I", dim))
            payload = array.astype("<f4").tobytes()
            out.write(payload)
            digest = fnv1a(payload, digest)
            digest = fnv1a(encoded, digest)
        out.write(struct.pack("<Q", digest))


def export(model_id: str, out_dir: Path, lock: dict) -> Path:
    import torch
    from torchvision import models as tvm

    builders = {
        "mobilenet_v2": (tvm.mobilenet_v2, tvm.MobileNet_V2_Weights),
        "resnet18": (tvm.resnet18, tvm.ResNet18_Weights),
        "efficientnet_b0": (tvm.efficientnet_b0, tvm.EfficientNet_B0_Weights),
        "vgg16": (tvm.vgg16, tvm.VGG16_Weights),
    }
    builder, weights_enum = builders[model_id]
    weights = weights_enum.IMAGENET1K_V1

    pin = lock["models"][model_id]
    if weights.url != pin["url"]:
        raise SystemExit(
            f"{model_id}: torchvision resolves {weights.url}, lockfile pins "
            f"{pin['url']}; refusing to export an unpinned checkpoint"
        )

    model = builder(weights=weights)
    model.eval()

    cached = Path(torch.hub.get_dir()) / "checkpoints" / Path(pin["url"]).name
    if cached.exists():
        sha = hashlib.sha256(cached.read_bytes()).hexdigest()
        if not sha.startswith(pin["sha256_prefix"]):
            raise SystemExit(
                f"{model_id}: checkpoint sha256 {sha[:8]} does not match the "
                f"pinned prefix {pin['sha256_prefix']}"
            )

    tensors = []
    state = model.state_dict()
    for name, tensor in state.items():
        if name.endswith("num_batches_tracked"):
            continue
        tensors.append((name, tensor.detach().numpy()))

    out_path = out_dir / f"{model_id}.mrbw"
    write_archive(out_path, model_id, tensors)
    return out_path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="weights", help="output directory")
    parser.add_argument(
        "--models", nargs="*", default=MODELS, choices=MODELS,
        help="subset of backbones to export"
    )
    args = parser.parse_args()

    lock_path = Path(__file__).parent / "weights.lock.json"
    lock = json.loads(lock_path.read_text())

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for model_id in args.models:
        path = export(model_id, out_dir, lock)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
