import logging
import os

from nematiclab.config.settings.defaults import LAB_DISABLE_AUTOWIRING_VARIABLE
from nematiclab.config.setup import wire_lab_dependencies

__version__ = "0.1.0"

if os.environ.get(LAB_DISABLE_AUTOWIRING_VARIABLE, "false").lower() == "false":
    # Spectral fields resolve their FFT backend through the container, so it is wired on import
    wire_lab_dependencies()
    logging.info("[LAB] Dependencies automatically wired.")
