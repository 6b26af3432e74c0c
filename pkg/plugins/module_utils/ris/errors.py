# -*- coding: utf-8 -*-
"""Error hierarchy shared by the library, the CLI and the Ansible modules.

Every error carries the process exit code the CLI returns for it.
"""


class RisError(Exception):
    exit_code = 1


class InputError(RisError):
    exit_code = 2


class ConfigError(InputError):
    pass


class EmptyPatternError(InputError):
    def __init__(self, detail=None):
        msg = "empty pattern"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class NonPassiveNetworkError(InputError):
    def __init__(self, eigenvalue):
        self.eigenvalue = eigenvalue
        super().__init__(f"non-passive network: smallest eigenvalue of Re(Z) is {eigenvalue:.6g} ohm")


class IncidenceMatrixError(InputError):
    def __init__(self, detail):
        super().__init__(f"incidence matrix invalid: {detail}")


class IncompatibleTracesError(InputError):
    def __init__(self, detail):
        super().__init__(f"incompatible traces: {detail}")


class EmptyPhaseTableError(InputError):
    def __init__(self):
        super().__init__("empty phase table")


class InfeasibleError(RisError):
    exit_code = 3


class InfeasiblePopulationError(InfeasibleError):
    def __init__(self, attempts):
        self.attempts = attempts
        super().__init__(f"infeasible population: no feasible geometry found in {attempts} attempts")


class NumericalError(RisError):
    exit_code = 4


class SingularNetworkError(NumericalError):
    def __init__(self, condition):
        self.condition = condition
        super().__init__(f"singular network: condition estimate {condition:.3e}")


class NullFieldError(NumericalError):
    def __init__(self, state, magnitude):
        self.state = state
        self.magnitude = magnitude
        super().__init__(f"null field, phase undefined (state {state}, |E_s| = {magnitude:.3e})")
