"""
Buying cooperation in a three-player prisoner's dilemma
=======================================================

Everyone defecting is the only equilibrium and pays each player 2. The
manipulator can do better: keep defecting herself while rewriting the
learners' payoffs so that cooperating becomes dominant for both of them.
"""

import numpy as np

from coopetition.arena import ExperimentConfig, run_experiment
from coopetition.games import ipd3, ipd3_fixture
from coopetition.polymatrix import realized_utilities
from coopetition.synth import synthesize_max_margin

game = ipd3()
print("all defect:", realized_utilities(game, (1, 1, 1)))

# The hand-built construction from the worked example.
fx = ipd3_fixture(0.1)
print("worked policy utilities:", np.round(fx.utilities(), 3), "cost", fx.cost)

# The LP finds a cheaper split of the same idea: the cooperate entry goes up
# and the defect entry goes down by the same amount.
cert = synthesize_max_margin(game, eps=0.1)
print("best target:", cert.triples[0], "margin", round(cert.margin, 4))
print("manipulated A21 row D:", cert.policy.first.A21[1])

# Learners with a fast exponential-weights rate lock on within a few rounds.
cfg = ExperimentConfig(game, cert.policy, "mwu:20", "ftrl:20", T=1000)
stats = run_experiment(cfg, N=20)
print(f"win rate {stats.win_rate:.0%}, mean margin {stats.mean_margin:.3f}")
