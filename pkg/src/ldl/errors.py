"""Exception hierarchy shared by every module.

Each error carries an ``exit_code`` so the command-line frontend can map it
without a lookup table: 1 for usage/shape problems, 2 for infeasible inputs,
3 for resource caps.
"""


class LdlError(Exception):
    exit_code = 1

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class ScenarioMismatch(LdlError):
    """Inputs describe incompatible scenarios, or the scenario is unsupported."""


class ZeroEfficiency(LdlError):
    """Some input tuple has no all-detected mass, so postselection is undefined."""

    exit_code = 2

    def __init__(self, x, message=None):
        self.x = tuple(x)
        one_based = [i + 1 for i in self.x]
        super().__init__(message or f"zero all-detected probability at input {one_based}")


class InconsistentEfficiencies(LdlError):
    """Observed efficiencies cannot arise under the given detection bounds."""

    exit_code = 2


class SizeOverflow(LdlError):
    exit_code = 3

    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"enumeration would produce {count} vertices (cap {cap})")


class DegenerateTau(LdlError):
    """Hardy construction requested at a product or maximally entangled state."""


class SignallingInput(LdlError):
    """A correlation's marginals depend on the remote input."""


class ZeroEtaMin(LdlError):
    """Ratios of detection bounds need a strictly positive lower bound."""


class NoFeasibleSample(LdlError):
    """The sliced polytope admitted no sampled point."""

    exit_code = 2
