import numpy as np

# Fixed stream ids so every stage draws from its own reproducible stream.
STREAMS = {
    "eigenvalues": 0,
    "eigenvectors": 1,
    "postprocess": 2,
    "noise-fm": 3,
    "pool": 4,
    "sampling": 10,
    "dataset": 20,
    "split": 21,
    "evaluation": 30,
}

RngState = np.random.Generator


def make_rng(seed: int, *stream: int) -> RngState:
    """Counter-based (Philox) generator for `seed`, split by stream indices.

    make_rng(seed, s1, s2) is independent of make_rng(seed, s1, s3) and
    identical on every platform for the same arguments.
    """
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))


def stage_rng(seed: int, stage: str, *stream: int) -> RngState:
    return make_rng(seed, STREAMS[stage], *stream)


def gaussian_matrix(rows: int, cols: int, rng: RngState) -> np.ndarray:
    """rows x cols i.i.d. standard normals; advances `rng`."""
    if rows < 1 or cols < 1:
        raise ValueError(f"gaussian_matrix needs positive shape, got {(rows, cols)}")
    return rng.standard_normal((rows, cols))
