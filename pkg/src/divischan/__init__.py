"""Divisibility analysis of qubit channels and one-mode Gaussian channels.

The package is organised in layers:

* :mod:`divischan.chanrep` -- Pauli transfer matrices, Choi states, Kraus sets.
* :mod:`divischan.normalform` -- special orthogonal and Lorentz normal forms.
* :mod:`divischan.lindblad` -- real logarithms, generators and the ccp test.
* :mod:`divischan.divisibility` -- the divisibility hierarchy and EB status.
* :mod:`divischan.dynmaps` -- the collision and Jaynes-Cummings models.
* :mod:`divischan.gaussian` -- one-mode Gaussian channels in position space.
* :mod:`divischan.cli` -- command line front end.
"""

__version__ = "0.1.0"

TOL = 1e-9
RANK_TOL = 1e-8
