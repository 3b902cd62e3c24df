"""Point counts and genera of Atkin-Lehner quotients of Borel-Cartan modular curves."""
from .curves import ALSubgroup, BorelCartanLevel, QuotientCurve, enumerate_subgroups
from .multiplicity import decompose
from .newforms import NewformRecord, NewformStore, default_store, load_fixtures
from .points import count_points, hws_bound

__all__ = [
    "ALSubgroup", "BorelCartanLevel", "QuotientCurve", "enumerate_subgroups", "decompose",
    "NewformRecord", "NewformStore", "default_store", "load_fixtures", "count_points", "hws_bound",
]
__version__ = "0.1.0"
