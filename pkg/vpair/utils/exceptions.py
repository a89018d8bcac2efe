"""
Exception classes shared by the vpair sub-packages
"""

class VStateError(Exception):
    pass

class ConfigError(VStateError):
    """
    Invalid configuration value. The offending key is stored in .key
    """
    def __init__(self, key, msg):
        self.key = key
        VStateError.__init__(self, '%s: %s'%(key, msg))

class DegenerateLinearizationError(ConfigError):
    pass

class AliasingError(VStateError):
    pass

class StateOutOfBallError(VStateError):
    pass

class GeometryOverlapError(VStateError):
    pass

class DegenerateMapError(VStateError):
    pass

class ConvergenceError(VStateError):
    pass

class SingularJacobianError(ConvergenceError):
    pass

class EmptyBranchError(ConvergenceError):
    pass

class FitError(VStateError):
    pass
