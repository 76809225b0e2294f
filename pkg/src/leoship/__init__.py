"""
Success probability and rate capacity of shore-to-ship links with a LEO
satellite relay, with Monte Carlo estimators to check them.

Submodules: ``model`` (records and link budgets), ``geometry`` (constellation
and distance laws), ``fading`` (Rician and Shadowed Rician laws),
``analysis`` (closed forms and quadrature), ``montecarlo`` (simulation),
``config`` / ``sweep`` / ``cli`` (experiments and CSV output).
"""
from .analysis import c_s, evaluate, p_bd, p_esd, p_s
from .errors import ConfigError, InvalidArgumentError, NumericFailure
from .model import ConstellationSpec, LinkBudget, Scenario, default_scenario

__all__ = [
    "ConfigError",
    "ConstellationSpec",
    "InvalidArgumentError",
    "LinkBudget",
    "NumericFailure",
    "Scenario",
    "c_s",
    "default_scenario",
    "evaluate",
    "p_bd",
    "p_esd",
    "p_s",
]
__version__ = "0.1.0"
