"""Built-in circuit templates.

Six ansätze ship with the package:

==========  ======  ====================================================
name        qubits  structure
==========  ======  ====================================================
``rx1``       1     one RX rotation
``cnot2``     2     RX on each qubit, then CNOT 0 -> 1
``cz2``       2     RX on each qubit, CZ, then H on each qubit
``p4``        4     one RX per qubit, 4-CNOT entangling network
``p9``        9     one RX per qubit, 12-CNOT entangling network
``p16``      16     one RX per qubit, 24-CNOT entangling network
==========  ======  ====================================================

``cz2`` is a deliberate negative control: because CZ is diagonal, the
post-rotation Hadamards leave every measured bit an unbiased coin flip for
all parameter values, so its features carry no information about the input.
"""

from __future__ import annotations

from functools import lru_cache

from .quil import CircuitTemplate, parse_template

_SOURCES = {
    "rx1": """\
DEFCIRCUIT RX1(%theta0):
    RX(%theta0) 0
""",
    "cnot2": """\
DEFCIRCUIT CNOT2(%theta0, %theta1):
    RX(%theta0) 0
    RX(%theta1) 1
    CNOT 0 1
""",
    "cz2": """\
DEFCIRCUIT CZ2(%theta0, %theta1):
    RX(%theta0) 0
    RX(%theta1) 1
    CZ 0 1
    H 0
    H 1
""",
    "p4": """\
DEFCIRCUIT P4(%theta0, %theta1, %theta2, %theta3):
    RX(%theta0) 0
    RX(%theta1) 1
    RX(%theta2) 2
    RX(%theta3) 3
    CNOT 0 2
    CNOT 1 3
    CNOT 0 1
    CNOT 2 3
""",
    "p9": """\
DEFCIRCUIT P9(%theta0, %theta1, %theta2, %theta3, %theta4, %theta5, %theta6, %theta7, %theta8):
    RX(%theta0) 0
    RX(%theta1) 1
    RX(%theta2) 2
    RX(%theta3) 3
    RX(%theta4) 4
    RX(%theta5) 5
    RX(%theta6) 6
    RX(%theta7) 7
    RX(%theta8) 8
    CNOT 0 3
    CNOT 1 4
    CNOT 2 5
    CNOT 3 6
    CNOT 0 1
    CNOT 3 4
    CNOT 5 8
    CNOT 6 7
    CNOT 1 2
    CNOT 4 7
    CNOT 4 5
    CNOT 7 8
""",
    "p16": """\
DEFCIRCUIT P16(%theta0, %theta1, %theta2, %theta3, %theta4, %theta5, %theta6, %theta7, %theta8, %theta9, %theta10, %theta11, %theta12, %theta13, %theta14, %theta15):
    RX(%theta0) 0
    RX(%theta1) 1
    RX(%theta2) 2
    RX(%theta3) 3
    RX(%theta4) 4
    RX(%theta5) 5
    RX(%theta6) 6
    RX(%theta7) 7
    RX(%theta8) 8
    RX(%theta9) 9
    RX(%theta10) 10
    RX(%theta11) 11
    RX(%theta12) 12
    RX(%theta13) 13
    RX(%theta14) 14
    RX(%theta15) 15
    CNOT 0 4
    CNOT 1 5
    CNOT 2 6
    CNOT 3 7
    CNOT 8 12
    CNOT 9 13
    CNOT 10 14
    CNOT 11 15
    CNOT 0 1
    CNOT 2 3
    CNOT 4 5
    CNOT 6 7
    CNOT 8 9
    CNOT 10 11
    CNOT 12 13
    CNOT 14 15
    CNOT 1 2
    CNOT 4 8
    CNOT 5 9
    CNOT 6 10
    CNOT 5 6
    CNOT 7 11
    CNOT 9 10
    CNOT 13 14
""",
}


def ansatz_names() -> list[str]:
    """Names of the built-in templates, in a stable order."""
    return list(_SOURCES)


def ansatz_source(name: str) -> str:
    """Raw circuit source text for a built-in template."""
    try:
        return _SOURCES[name]
    except KeyError:
        raise ValueError(
            f"unknown ansatz {name!r}; choose from {', '.join(_SOURCES)}"
        ) from None


@lru_cache(maxsize=None)
def get_ansatz(name: str) -> CircuitTemplate:
    """Parse and cache a built-in template by name."""
    return parse_template(ansatz_source(name))
