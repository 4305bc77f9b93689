"""Physically based reflection tuple synthesis (I, T, R~, R and optionally T~)."""

import json
import pathlib

from ._core import (
    MANIFEST_FILE_NAME,
    TEST_TUPLE_COUNT,
    TRAIN_TUPLE_COUNT,
    baseline_blend,
    beer_lambert,
    build_heightfield,
    defocus_variance_profile,
    fresnel_dielectric,
    interact_slab,
    psnr,
    read_exr,
    render_tuple,
    run_dataset_job,
    sample_pairs,
    scale_depth,
    sha256_file,
    ssim,
    validate_manifest,
    write_exr,
)


def load_tuples(manifest_path, roles=("I", "T", "Rtilde", "R")):
    """Yield {role: HxWx3 float32 array} for every successfully rendered tuple in a manifest."""
    manifest_path = pathlib.Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    root = manifest_path.parent
    for record in manifest["tuples"]:
        if record["status"] != "ok":
            continue
        files = {f["role"]: f["path"] for f in record["files"]}
        yield {role: read_exr(root / files[role]) for role in roles}
