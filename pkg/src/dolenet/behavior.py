"""Worker-level behavioural kernel and the firm's adaptive strategy.

Workers carry one of four value types on two preference axes: a desire for
autonomy (openness-to-change high, conservatism low) and a preference for
individual over pooled rewards (self-enhancement high, self-transcendence
low). Fit between those preferences and the employer's monitoring level
and reward mix sets base satisfaction; satisfaction drives time allocation
between personal tasks, cooperation and shirking, and scales productivity.
Caught shirkers collect written warnings. Co-worker interaction builds a
pairwise intensity that shields embedded workers from firing and quitting.

All functions accept and return numpy arrays and draw randomness only from
an explicitly passed generator, in a fixed order, so replicates are
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ConfigError

VALUE_TYPES = ("O", "C", "SE", "ST")
TYPE_O, TYPE_C, TYPE_SE, TYPE_ST = range(4)


@dataclass
class ManagementStrategy:
    """The levers a firm controls: monitoring, reward mix, bonus rate."""

    monitoring: float      # probability a shirker beyond tolerance is caught
    reward_mix: float      # 1 = fully pooled pay, 0 = fully individual
    bonus_rate: float      # bonus per unit of (mixed) output
    base_wage: float
    kappa: float           # task interdependence, exogenous


def draw_value_profiles(n: int, rng: np.random.Generator,
                        shares: tuple[float, float, float, float] =
                        (0.25, 0.25, 0.25, 0.25)):
    """Assign value types and the two preference coordinates.

    Types fill deterministic proportional blocks of the id range (uniform
    quarters by default) so firm rosters built by dealing ids round-robin
    start type-balanced. The axis a type pins is set to its pole; the
    orthogonal axis is drawn uniform per agent.

    Returns (value_type, autonomy_preference, reward_individualism).
    """
    if abs(sum(shares) - 1.0) > 1e-9:
        raise ConfigError("value-type shares must sum to 1")
    counts = np.floor(np.asarray(shares) * n).astype(int)
    counts[: n - counts.sum()] += 1
    vtype = np.repeat(np.arange(4, dtype=np.int8), counts)
    # Interleave so consecutive ids cycle through the types.
    order = np.argsort(np.argsort(vtype, kind="stable") % counts.max(),
                       kind="stable")
    vtype = vtype[order]

    autonomy = rng.uniform(0.0, 1.0, n)
    reward_ind = rng.uniform(0.0, 1.0, n)
    autonomy[vtype == TYPE_O] = 1.0
    autonomy[vtype == TYPE_C] = 0.0
    reward_ind[vtype == TYPE_SE] = 1.0
    reward_ind[vtype == TYPE_ST] = 0.0
    return vtype, autonomy, reward_ind


def build_friendship_network(vtype: np.ndarray, same_type_weights,
                             cross_weight: float, mean_degree: float,
                             rng: np.random.Generator) -> np.ndarray:
    """Sample the fixed friendship adjacency matrix.

    Pair-formation probability is proportional to a type-pair weight:
    ``same_type_weights[k]`` for two type-k agents, ``cross_weight``
    otherwise. Probabilities are scaled so the expected degree equals
    ``mean_degree``. Self-enhancement and conservatism must be less likely
    to pair with their own type than across types.
    """
    n = len(vtype)
    if mean_degree >= n:
        raise ConfigError("mean_degree must be smaller than the population")
    same = np.asarray(same_type_weights, dtype=float)
    if same[TYPE_SE] >= cross_weight or same[TYPE_C] >= cross_weight:
        raise ConfigError(
            "SE and C same-type weights must be strictly below the "
            "cross-type weight")
    adj = np.zeros((n, n), dtype=bool)
    if mean_degree <= 0 or n < 2:
        return adj

    weights = np.full((n, n), cross_weight)
    same_mask = vtype[:, None] == vtype[None, :]
    weights[same_mask] = same[vtype[np.nonzero(same_mask)[0]]]
    iu = np.triu_indices(n, k=1)
    w = weights[iu]
    scale = (n * mean_degree / 2.0) / w.sum()
    p = np.minimum(w * scale, 1.0)
    draws = rng.random(len(p)) < p
    adj[iu] = draws
    adj |= adj.T
    return adj


def base_satisfaction(autonomy: np.ndarray, reward_ind: np.ndarray,
                      monitoring: float, reward_mix: float,
                      w_autonomy: float = 0.5) -> np.ndarray:
    """Person-organisation fit in [0, 1].

    Perfect fit (1) when granted autonomy ``1 - m`` matches the autonomy
    preference and the individual share of pay ``1 - reward_mix`` matches
    the reward-individualism preference; linear penalty on both distances.
    """
    w_reward = 1.0 - w_autonomy
    return (1.0
            - w_autonomy * np.abs(autonomy - (1.0 - monitoring))
            - w_reward * np.abs(reward_ind - (1.0 - reward_mix)))


def shirk_level(satisfaction, base_satisfaction=None, monitoring=0.0,
                shirk_max: float = 0.5, deterrence: float = 1.0):
    """Desired shirking time.

    Falls with current satisfaction, and with monitoring in proportion to
    how much the job could satisfy the worker: oversight deters those with
    something to lose, while a worker whose fit is hopeless ignores it.
    Floored at zero.
    """
    if base_satisfaction is None:
        base_satisfaction = satisfaction
    stake = np.maximum(satisfaction, base_satisfaction)
    raw = (shirk_max * (1.0 - satisfaction)
           * np.maximum(1.0 - deterrence * monitoring * stake, 0.0))
    return np.maximum(raw, 0.0)


def allocate_time(satisfaction: np.ndarray, reward_mix: float,
                  cooperation_norm: float, shirk_max: float = 0.5,
                  monitoring: float = 0.0, deterrence: float = 1.0,
                  base_satisfaction=None):
    """Split the unit time endowment into (personal, cooperative, shirk).

    The non-shirked remainder is split towards cooperation by the average
    of the firm's reward pooling and its lagged cooperation norm.
    """
    shirk = shirk_level(satisfaction, base_satisfaction, monitoring,
                        shirk_max, deterrence)
    coop_weight = 0.5 * (reward_mix + cooperation_norm)
    c = (1.0 - shirk) * coop_weight
    p = (1.0 - shirk) - c
    return p, c, shirk


def solve_cooperation_norm(reward_mix: float,
                           mean_active_time: float) -> float:
    """Stationary cooperation norm for a roster with fixed time budgets.

    With ``M`` the roster mean of (1 - shirk), the norm fixed point of
    ``norm = mean(c)`` under :func:`allocate_time` is ``M * mix / (2 - M)``.
    """
    m = mean_active_time
    return m * reward_mix / (2.0 - m) if m > 0 else 0.0


def individual_output(productivity, personal_share, team_cooperation,
                      kappa: float):
    """Output of one worker: productivity times a Cobb-Douglas effort mix.

    ``kappa`` interpolates between purely personal effort (0) and effort
    fully leveraged through team cooperation (1). Zero bases with zero
    exponents count as 1, so kappa = 0 ignores cooperation entirely.
    """
    p = np.asarray(personal_share, dtype=float)
    cbar = np.asarray(team_cooperation, dtype=float)
    p_term = np.ones_like(p) if kappa == 1.0 else p ** (1.0 - kappa)
    c_term = np.ones_like(cbar) if kappa == 0.0 else cbar ** kappa
    return productivity * p_term * c_term


def reward(output: np.ndarray, strategy: ManagementStrategy) -> np.ndarray:
    """Pay for every member of one team.

    Base wage plus a bonus on the mix of own output and the team mean,
    weighted by the reward pooling.
    """
    out = np.asarray(output, dtype=float)
    if out.size == 0:
        return out.copy()
    lam = strategy.reward_mix
    bonus_base = (1.0 - lam) * out + lam * out.mean()
    return strategy.base_wage + strategy.bonus_rate * bonus_base


def relax_satisfaction(satisfaction: np.ndarray, base: np.ndarray,
                       rho: float) -> np.ndarray:
    """Move satisfaction a fraction ``rho`` of the way to its base level."""
    return satisfaction + rho * (base - satisfaction)


def apply_warning_penalty(satisfaction: np.ndarray, warned: np.ndarray,
                          penalty: float) -> np.ndarray:
    """One-off satisfaction hit per fresh warning, floored at zero."""
    return np.maximum(0.0, satisfaction - penalty * warned)


def monitor_and_warn(shirk: np.ndarray, monitoring: float,
                     tolerance: float, rng: np.random.Generator) -> np.ndarray:
    """Catch shirkers beyond tolerance with probability ``monitoring``.

    Returns a boolean warned mask over the team. The engine applies the
    same Bernoulli rule vectorized over all employed workers in household
    order, one draw batch per step, so replicates stay reproducible.
    """
    over = shirk > tolerance
    if monitoring <= 0.0 or not over.any():
        return np.zeros_like(over)
    caught = rng.random(len(shirk)) < monitoring
    return over & caught


def hill_climb(value: float, direction: int, step: float,
               lo: float, hi: float) -> float:
    """One clipped hill-climb move of a strategy lever."""
    return float(np.clip(value + direction * step, lo, hi))


def update_interaction_intensity(intensity: np.ndarray,
                                 rosters: list[np.ndarray],
                                 cooperation: np.ndarray,
                                 rho: float) -> None:
    """Decay all pair intensities and rebuild co-worker pairs in place.

    Pairs currently employed at the same firm move towards the smaller of
    the two cooperation shares; separated pairs decay geometrically to 0 at
    the same rate. The diagonal stays 0.
    """
    n = intensity.shape[0]
    employer = np.full(n, -1, dtype=np.int32)
    for f, roster in enumerate(rosters):
        employer[roster] = f
    coop = cooperation.astype(intensity.dtype, copy=False)
    target = np.minimum.outer(coop, coop)
    same_firm = (employer[:, None] == employer[None, :]) & (employer >= 0)[:, None]
    target *= same_firm
    intensity *= (1.0 - rho)
    intensity += intensity.dtype.type(rho) * target
    np.fill_diagonal(intensity, 0.0)


def mean_intensity(intensity: np.ndarray, roster: np.ndarray) -> np.ndarray:
    """Each roster member's mean interaction intensity with co-workers."""
    if len(roster) < 2:
        return np.zeros(len(roster))
    block = intensity[np.ix_(roster, roster)]
    return block.sum(axis=1) / (len(roster) - 1)
