"""Communication-aware multi-agent motion planning from bounded-time STL.

Pipeline: STL task formulas and discretised dynamics are compiled
together with a Gaussian-process wireless channel cost into one
mixed-integer linear program, solved either by the embedded
branch-and-bound or an external MPS-consuming solver, then decoded and
verified against the STL monitor.
"""

__version__ = "0.1.0"
