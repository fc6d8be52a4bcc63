"""Central table of numerical knobs: ball approximants and tolerances."""

# vertices used to approximate unit balls, keyed by ball dimension
BALL_VERTICES = {1: 2, 2: 64, 3: 162, 4: 320}

# tolerances that are widened when ball approximants enter an equality body
EQUALITY_TOL_POLYTOPAL = 1e-6
EQUALITY_TOL_BALL = 5e-3

# default refinement of sampled profiles, as a fraction of the diameter
PROFILE_REFINEMENT = 0.05
MAX_AFFINIZE_SAMPLES = 2000

# slack used for ">= 0" centroid conclusions
CENTROID_SLACK = 1e-8


def ball_vertices(dim: int, M: int | None = None) -> int:
    if M is not None:
        return M
    return BALL_VERTICES.get(dim, 64 * dim)
