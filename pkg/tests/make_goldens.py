"""Regenerate the frozen golden files under tests/data/.

Run ``python tests/make_goldens.py`` only when a deliberate behaviour change
invalidates the recorded outputs; commit the result together with the change
that caused it.
"""

from pathlib import Path

import numpy as np

from evaug.rng import derive_rng
from evaug.shapes import SimConfig, simulate_trajectories
from evaug.transforms import shape_aug

DATA_DIR = Path(__file__).parent / "data"

KIND_CODE = {"circle": 0, "rectangle": 1, "ellipse": 2}

TRAJECTORY_SEED = 1234
TRAJECTORY_DIMS = (8, 32, 32)  # T, H, W

SHAPE_AUG_SEED = 42
SHAPE_AUG_SHAPE = (10, 2, 64, 64)


def field_to_array(field):
    rows = []
    for t, frame in enumerate(field.frames):
        for k, s in enumerate(frame):
            rows.append(
                [t, k, KIND_CODE[s.kind.value], s.x, s.y, s.w, s.h, s.speed, s.angle]
            )
    return np.array(rows, dtype=np.float64)


def golden_input_volume():
    rng = np.random.default_rng(2024)
    T, P, H, W = SHAPE_AUG_SHAPE
    vol = (rng.random(SHAPE_AUG_SHAPE) < 0.05) * rng.integers(1, 5, SHAPE_AUG_SHAPE)
    return np.ascontiguousarray(vol, dtype=np.float32)


def main():
    DATA_DIR.mkdir(exist_ok=True)

    T, H, W = TRAJECTORY_DIMS
    field = simulate_trajectories(
        derive_rng(TRAJECTORY_SEED, 0, "shape"), SimConfig(), T, H, W
    )
    np.savez_compressed(
        DATA_DIR / "golden_trajectory.npz",
        rows=field_to_array(field),
        dims=np.array(TRAJECTORY_DIMS),
    )

    vol = golden_input_volume()
    out = shape_aug(vol, SimConfig(), derive_rng(SHAPE_AUG_SEED, 0, "shape"))
    np.savez_compressed(
        DATA_DIR / "golden_shape_aug.npz", input=vol, output=out
    )
    print(f"wrote goldens to {DATA_DIR}")


if __name__ == "__main__":
    main()
