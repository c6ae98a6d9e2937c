__all__ = [
    "SOLVERS",
    "Mapg",
    "Niapg",
    "Nmapg",
    "Npiht",
    "Piht",
    "Solver",
    "Vmepiht",
    "check_stop",
    "get_solver_class",
    "solve_mapg",
    "solve_niapg",
    "solve_nmapg",
    "solve_npiht",
    "solve_piht",
    "solve_vmepiht",
]


from typing import Type

from l0forge.exceptions import UnknownMethod
from l0forge.solvers.base import Solver, check_stop
from l0forge.solvers.niapg import Niapg, solve_niapg
from l0forge.solvers.nmapg import Mapg, Nmapg, solve_mapg, solve_nmapg
from l0forge.solvers.npiht import Npiht, solve_npiht
from l0forge.solvers.piht import Piht, solve_piht
from l0forge.solvers.vmepiht import Vmepiht, solve_vmepiht

SOLVERS: dict[str, Type[Solver]] = {cls.name: cls for cls in (Vmepiht, Piht, Npiht, Nmapg, Mapg, Niapg)}


def get_solver_class(method: str) -> Type[Solver]:
    try:
        return SOLVERS[method.lower()]
    except KeyError:
        raise UnknownMethod(f"unknown method {method!r}, valid methods: {', '.join(SOLVERS)}")
