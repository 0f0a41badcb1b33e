"""Positive relational algebra over partially ordered relations, with accumulation,
possibility and certainty of query answers."""

from .algebra import (
    Accum,
    AccumGroupBy,
    ChainConst,
    CompleteFailure,
    Concat,
    DupElim,
    ProdDir,
    ProdLex,
    Project,
    RelationRef,
    Select,
    Singleton,
    Union,
    eval_query,
)
from .core import (
    BudgetExceeded,
    InvalidRelation,
    ListRelation,
    PoDatabase,
    PoRelation,
    is_possible_world_oracle,
    linear_extensions,
    possible_worlds,
    underlying_bag,
)
from .dbfile import load_database, parse_database, serialize_database
from .decision import Answer, DecisionConfig, accumulation_results, cert, poss
from .order import ia_partition, ia_width, min_chain_partition, width
from .query import ParseError, parse_query, to_text

__version__ = "0.1.0"
