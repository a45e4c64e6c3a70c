# TODO PEP 440 version string once releases are tagged
VERSION = (0, 1, 0, 'alpha', 0)

from .bff import Scenario, entropy_bound
from .model import BehaviorTable
from .runner import KeyRateReport, SweepSpec
