from nematiclab.solver.ledger import delta_U, x_norm_ledger, y_norm_ledger
from nematiclab.solver.picard import picard_solve, regularize_data
from nematiclab.solver.state import StateSnapshot, Trajectory, load_trajectory, save_trajectory
from nematiclab.solver.steps import director_step, velocity_step
from nematiclab.solver.transport import transport_step, transport_trajectory
from nematiclab.solver.weak_form import TestFunction, default_test_functions, weak_form_residual

__all__ = [
    "StateSnapshot",
    "TestFunction",
    "Trajectory",
    "default_test_functions",
    "delta_U",
    "director_step",
    "load_trajectory",
    "picard_solve",
    "regularize_data",
    "save_trajectory",
    "transport_step",
    "transport_trajectory",
    "velocity_step",
    "weak_form_residual",
    "x_norm_ledger",
    "y_norm_ledger",
]
