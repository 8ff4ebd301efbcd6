"""Payoff-manipulation policies for three-player polymatrix games.

Player 1 (the manipulator) picks a pure action and may rewrite the payoff
matrices of players 2 and 3, paying the infinity-norm deviation. The
package synthesizes such policies by linear programming and tests them
against no-regret learners in simulation.
"""

from .linsolve import DegenerateLPError, LinearProgram, LpSolution, solve
from .polymatrix import (
    ActionProfile,
    CompleteStrategy,
    GameShapeError,
    PolymatrixGame,
    check_type1_dominance,
    check_type2_dominance,
    counterfactual_payoffs,
    expected_utility,
    manipulation_cost,
    realized_utility,
    realized_utilities,
)
from .synth import (
    ManipulatorPolicy,
    PolicyCertificate,
    SynthesisRequest,
    build_batch_lp,
    build_type1_lp,
    build_type2_lp,
    optimize_target,
    synthesize,
    synthesize_max_egalitarian,
    synthesize_max_margin,
    synthesize_min_cost,
    synthesize_min_inefficiency,
    verify_certificate,
)

__version__ = "0.1.0"
