from .encode import EncodedProblem, EncodingError, MilpEncoder, assemble
from .index import DecisionIndex
from .scenario import (
    BIG_M_LITERAL,
    BIG_M_TIGHT,
    PAPER_A_D,
    PAPER_B_D,
    AgentSpec,
    ChannelConfig,
    Polytope,
    Scenario,
    ScenarioError,
    rect_faces,
    scenario_from_dict,
    scenario_from_json,
)

__all__ = [
    "AgentSpec",
    "BIG_M_LITERAL",
    "BIG_M_TIGHT",
    "ChannelConfig",
    "DecisionIndex",
    "EncodedProblem",
    "EncodingError",
    "MilpEncoder",
    "PAPER_A_D",
    "PAPER_B_D",
    "Polytope",
    "Scenario",
    "ScenarioError",
    "assemble",
    "rect_faces",
    "scenario_from_dict",
    "scenario_from_json",
]
