"""Learning the illumination pupil from preferred edge orientations.

The edge response of a DPC system peaks along 1/f ridges in the spectrum, so
a pupil that should detect edges at angles {theta_k} can be scored without
ever simulating images: antisymmetrize the candidate Q, build its transfer
profile P conv (P * (Q - Q(-f))), weight each bin by the rotated, clamped
1/|f_proj| edge spectrum, and sum the fourth power,

    J(Q) = sum_k w_k sum_f | E_k(f) * (P conv (P (Q - Q(-f))))(f) |^4.

J is invariant under adding any even field to Q (antisymmetrization kills
it), scales as c^4 under Q -> cQ, and is exactly zero for symmetric
illumination. learn_pupil runs projected gradient ascent on J under the
max-abs constraint ||Q||_inf = 1, with an analytic gradient (the operator
chain is self-adjoint because P is even) and backtracking halving so the
cost trace never decreases.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import forward_transform, index_negate, inverse_transform
from .pupils import SourcePattern
from .validation import check_real_image

__all__ = [
    "LearnConfig",
    "LearnTrace",
    "edge_cost",
    "grad_edge_cost",
    "learn_pupil",
    "edge_angles_from_image",
]


@dataclass(frozen=True, eq=False)
class LearnConfig:
    """Configuration of a pupil-learning run.

    edge_angles is a sequence of (angle, weight) pairs with nonnegative
    weights summing to 1 (use from_angles to normalize a raw list). fx_floor
    clamps the 1/f edge weight at that many frequency bins from the ridge.
    """

    grid: object
    pupil: object
    edge_angles: tuple
    iters: int = 25
    step: float = 1.0
    seed: int = 0
    fx_floor: int = 1
    snapshot_iters: tuple = (1, 5, 10, 25)

    def __post_init__(self):
        if self.iters < 1:
            raise ValueError("iters must be >= 1")
        if self.fx_floor < 1:
            raise ValueError("fx_floor must be >= 1 bin")
        if self.step <= 0:
            raise ValueError("step must be positive")
        weights = np.array([w for _, w in self.edge_angles], dtype=np.float64)
        if weights.size == 0:
            raise ValueError("edge_angles must not be empty")
        if (weights < 0).any():
            raise ValueError("edge weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(
                f"edge weights must sum to 1, got {weights.sum()!r} "
                "(use LearnConfig.from_angles to normalize)"
            )

    @classmethod
    def from_angles(cls, grid, pupil, angles, **kwargs):
        """Build a config from raw (angle, weight) pairs or bare angles."""
        pairs = []
        for entry in angles:
            if np.isscalar(entry):
                pairs.append((float(entry), 1.0))
            else:
                angle, weight = entry
                pairs.append((float(angle), float(weight)))
        total = sum(w for _, w in pairs)
        if total <= 0:
            raise ValueError("edge weights must have positive sum")
        pairs = tuple((a, w / total) for a, w in pairs)
        return cls(grid=grid, pupil=pupil, edge_angles=pairs, **kwargs)


@dataclass(frozen=True, eq=False)
class LearnTrace:
    """Cost per iteration and Q snapshots at the configured iterations."""

    costs: np.ndarray
    snapshots: dict = field(default_factory=dict)


def _edge_weight(cfg):
    """sum_k w_k E_k^4, the fixed spectral weight of the cost.

    A step edge with normal at ``angle`` concentrates its spectrum on the
    frequency line through ``angle``, so the weight's singular ridge must
    lie on that line: it blows up (to the clamp) where the perpendicular
    component of f vanishes, and decays away from the line.
    """
    grid = cfg.grid
    floor = cfg.fx_floor * grid.df_x
    weight = np.zeros(grid.shape)
    for angle, w in cfg.edge_angles:
        perp = grid.f_y * np.cos(angle) - grid.f_x * np.sin(angle)
        e = 1.0 / np.maximum(np.abs(perp), floor)
        weight += w * e ** 4
    return weight


def _profile(q, cfg):
    """P conv (P * (q - q(-f))), the odd transfer profile of a candidate Q."""
    masked = cfg.pupil.data * (q - index_negate(q))
    return inverse_transform(
        forward_transform(cfg.pupil.data) * forward_transform(masked)
    ).real


def edge_cost(q, cfg, normalize=True):
    """Edge-alignment cost J of a candidate illumination pattern.

    With normalize=True (the default, matching the ||Q||_inf = 1 constraint)
    q is max-abs normalized before evaluation; normalize=False evaluates the
    raw, differentiable cost the analytic gradient refers to.
    """
    q = check_real_image(q, cfg.grid, "candidate Q")
    if normalize:
        peak = np.abs(q).max()
        if peak > 0:
            q = q / peak
    c = _profile(q, cfg)
    return float((_edge_weight(cfg) * c ** 4).sum())


def grad_edge_cost(q, cfg):
    """Analytic gradient of the raw (unnormalized) cost at q.

    dJ/dC = 4 K C^3 is pulled back through the linear chain
    C = conv(P, P (q - q(-f))): convolution with the even P and the pupil
    mask are self-adjoint, antisymmetrization is its own transpose.
    """
    q = check_real_image(q, cfg.grid, "candidate Q")
    c = _profile(q, cfg)
    gc = 4.0 * _edge_weight(cfg) * c ** 3
    back = inverse_transform(
        forward_transform(cfg.pupil.data) * forward_transform(gc)
    ).real
    masked = cfg.pupil.data * back
    return masked - index_negate(masked)


def _project(q):
    peak = np.abs(q).max()
    return q / peak if peak > 0 else q


def learn_pupil(cfg):
    """Projected gradient ascent on the edge cost; returns (pattern, trace).

    Q starts from seeded standard-normal noise projected to ||Q||_inf = 1.
    Each iteration steps along the analytic gradient, re-projects, and halves
    the step (at most 20 times) until the cost does not decrease; if no step
    helps, Q is kept and the trace stays flat. A zero gradient at the start
    triggers one reseed, then failure. The returned pattern is the final Q
    restricted to the pupil support; it is signed by construction.
    """
    rng = np.random.default_rng(cfg.seed)
    q = _project(rng.standard_normal(cfg.grid.shape))
    if np.abs(grad_edge_cost(q, cfg)).max() == 0.0:
        rng = np.random.default_rng(cfg.seed + 1)
        q = _project(rng.standard_normal(cfg.grid.shape))
        if np.abs(grad_edge_cost(q, cfg)).max() == 0.0:
            raise RuntimeError(
                "edge cost gradient is identically zero at two random starts; "
                "check the pupil and edge angles"
            )
    cost = edge_cost(q, cfg, normalize=False)
    costs = []
    snapshots = {}
    for it in range(1, cfg.iters + 1):
        g = grad_edge_cost(q, cfg)
        step = cfg.step / max(np.abs(g).max(), 1e-300)
        for _ in range(21):
            candidate = _project(q + step * g)
            cand_cost = edge_cost(candidate, cfg, normalize=False)
            if cand_cost >= cost:
                q, cost = candidate, cand_cost
                break
            step *= 0.5
        costs.append(cost)
        if it in cfg.snapshot_iters:
            snapshots[it] = q.copy()
    pattern = SourcePattern(grid=cfg.grid, data=q * (cfg.pupil.data > 0),
                            theta0=0.0)
    return pattern, LearnTrace(costs=np.asarray(costs), snapshots=snapshots)


def edge_angles_from_image(image, n_bins=8):
    """(angle, weight) pairs from a guide image's gradient orientations.

    Orientations are folded to [0, pi) (the cost cannot tell an edge from its
    reverse), quantized to n_bins, and weighted by total gradient magnitude;
    empty bins are dropped and weights normalized to sum 1.
    """
    image = check_real_image(image, None, "guide image")
    gy, gx = np.gradient(image)
    mag = np.hypot(gx, gy)
    theta = np.mod(np.arctan2(gy, gx), np.pi)
    edges = np.linspace(0.0, np.pi, n_bins + 1)
    hist, _ = np.histogram(theta, bins=edges, weights=mag)
    total = hist.sum()
    if total == 0:
        raise ValueError("guide image has no gradients to derive angles from")
    centers = 0.5 * (edges[:-1] + edges[1:])
    return [(float(c), float(h / total)) for c, h in zip(centers, hist) if h > 0]
