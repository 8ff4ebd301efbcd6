"""
Why no constant action wins electric vs petrol
==============================================

Petrol is strictly dominant for both car makers, and against petrol the
energy company earns at most 1.74 while each maker earns at least 1.75.
Paying to make electric dominant flips the outcome.
"""

from coopetition.arena import ExperimentConfig, best_constant_baseline, run_experiment, run_game
from coopetition.games import electric_petrol
from coopetition.synth import synthesize_min_cost

game = electric_petrol()

base = best_constant_baseline(game, "mwu:20", "ftrl:20", T=100, N=50)
print(f"best constant action {base.extras['action']}: win rate {base.win_rate:.0%}")

cert = synthesize_min_cost(game, eps=0.1)
print("target", cert.triples[0], "cost", round(cert.cost, 3),
      "utilities", [round(u, 3) for u in cert.utilities[0]])
print(cert.report)

stats = run_experiment(ExperimentConfig(game, cert.policy, "mwu:20", "ftrl:20", 100), N=50)
print(f"manipulated: win rate {stats.win_rate:.0%}, margin {stats.mean_margin:.3f}")

# Slow linear learners are still mixing after 100 rounds, so some games are lost.
trace = run_game(game, cert.policy, "lmwu:0.12", "lmwu:0.12", 100, seed=0)
print("player 2 P(E) every 20 rounds:", trace.y[::20, 1].round(3))
