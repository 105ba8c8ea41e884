from nematiclab.diagnostics.energy import energy_is_nonincreasing, energy_profile, energy_report
from nematiclab.diagnostics.refinement import refinement_study, refinement_suites
from nematiclab.diagnostics.scaling import ScalingReport, rescale_trajectory, scaling_check
from nematiclab.diagnostics.verdict import diagnostics_verdict, write_verdict

__all__ = [
    "ScalingReport",
    "diagnostics_verdict",
    "energy_is_nonincreasing",
    "energy_profile",
    "energy_report",
    "refinement_study",
    "refinement_suites",
    "rescale_trajectory",
    "scaling_check",
    "write_verdict",
]
