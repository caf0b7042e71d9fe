"""Order and window selection, Taylor families, change of variables."""
from .family import (ChangeOfVariablesResult, VariablePolyFamily, change_of_variables,
                     select_order, select_window, taylor_family, window_error)

__all__ = ["ChangeOfVariablesResult", "VariablePolyFamily", "change_of_variables",
           "select_order", "select_window", "taylor_family", "window_error"]
