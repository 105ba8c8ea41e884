from nematiclab.cli.main import build_parser, main
from nematiclab.cli.scenarios import SCENARIO_REGISTRY, InitialData, Scenario, scenario

__all__ = ["SCENARIO_REGISTRY", "InitialData", "Scenario", "build_parser", "main", "scenario"]
