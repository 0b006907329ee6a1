"""Figure rendering for chargesim sweep CSVs: a pure view layer."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, FigureSpec, FilterError, render  # noqa: F401
from .schema import SWEEP_COLUMNS, SchemaError, load_rows  # noqa: F401
