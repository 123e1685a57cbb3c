"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Exceptions raised by diffnev, and the warnings used to report flags that
do not stop a computation.
"""


class DiffnevError(Exception):
    pass


class ExprSyntaxError(DiffnevError, ValueError):
    def __init__(self, message, position):
        super().__init__('{} (at position {})'.format(message, position))
        self.position = position


class SingularPoint(DiffnevError, ArithmeticError):
    pass


class SingularGridPoint(SingularPoint):
    pass


class NonIntegerWinding(DiffnevError, ArithmeticError):
    pass


class PoleOnCircle(DiffnevError, ValueError):
    pass


class OriginPoleSmallRadius(DiffnevError, ValueError):
    pass


class IncompleteLedger(DiffnevError, ValueError):
    pass


class ZeroCharacteristic(DiffnevError, ArithmeticError):
    pass


class DegenerateDenominator(DiffnevError, ArithmeticError):
    pass


class DegenerateSample(DiffnevError, ValueError):
    pass


class NonPeriodicKappa(DiffnevError, ValueError):
    pass


class UnknownEntry(DiffnevError, KeyError):
    pass


class ParameterConstraintViolation(DiffnevError, ValueError):
    pass


class ConfigError(DiffnevError, ValueError):
    pass


class NonConvergentWarning(UserWarning):
    pass


class ResidualUnderflowWarning(UserWarning):
    pass


class NoConsistentConstantWarning(UserWarning):
    pass


class CrowdedCellWarning(UserWarning):
    pass


class NonFiniteSampleWarning(UserWarning):
    pass


class DiscrepancyWarning(UserWarning):
    pass
