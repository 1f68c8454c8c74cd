"""Discrete Grassmann coherent-state path integrals with time-indexed partners.

Modules
-------
algebra
    Exterior algebra, Berezin integration and de-Grassmannization.
models
    Spin-in-field and Jaynes-Cummings parameters, fields and slice kernels.
recursion
    Single-exponential recursion, direct composition and stationary path.
brackets
    Bracket-function recursions, ODE chains and kernel assembly.
oracle
    Hilbert-space reference propagators.
cli
    ``grasspath`` command-line driver.
"""

from grasspath._backend import BACKEND
from grasspath.algebra import (
    AlgebraElement,
    GeneratorId,
    GeneratorKind,
    Monomial,
    berezin_integrate_pair,
    degrassmannize,
    exp_element,
    make_generator,
)
from grasspath.models import (
    ConstantField,
    JaynesCummingsModel,
    SampledField,
    SinusoidField,
    SpinFieldModel,
    TimeGrid,
)
from grasspath.oracle import JcKernelTable, SpinKernel

__all__ = [
    "BACKEND",
    "AlgebraElement",
    "GeneratorId",
    "GeneratorKind",
    "Monomial",
    "berezin_integrate_pair",
    "degrassmannize",
    "exp_element",
    "make_generator",
    "ConstantField",
    "JaynesCummingsModel",
    "SampledField",
    "SinusoidField",
    "SpinFieldModel",
    "TimeGrid",
    "JcKernelTable",
    "SpinKernel",
]

__version__ = "0.1.0"
