"""
精灵参数搜索模块
"""

from .param_search import SearchOptions, SearchOutcome, SEARCHABLE_BOUNDS, minimize_genie, minimize_bound, feasibility

__all__ = ["SearchOptions", "SearchOutcome", "SEARCHABLE_BOUNDS", "minimize_genie", "minimize_bound", "feasibility"]
