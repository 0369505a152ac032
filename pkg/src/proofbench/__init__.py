"""proofbench: a workbench for developing per-function memory-safety proofs
with a bounded model checker.

The library scaffolds proof harnesses, orchestrates the checker, diagnoses
its reports into ranked interventions, tracks sessions across refine-and-
rerun iterations, and computes cost/characteristics analytics. The ``cli``
and ``service`` modules expose the same operations to the terminal and to
the browser dashboard.
"""

__version__ = "0.1.0"
