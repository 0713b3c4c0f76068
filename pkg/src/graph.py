"""
Replicate Graph - LangGraph Orchestration

Creates the state graph that runs one replicate end to end.
"""

from functools import lru_cache

from langgraph.graph import END, StateGraph

from .nodes import (
    align_node,
    evaluate_node,
    fit_node,
    kernel_node,
    landmark_node,
    prepare_node,
)
from .state import ReplicateState


@lru_cache(maxsize=1)
def create_replicate_graph():
    """
    Create the replicate workflow

    Compiled once per process and reused for every replicate it runs.

    Returns:
        Compiled StateGraph ready for execution
    """
    workflow = StateGraph(ReplicateState)

    workflow.add_node("prepare", prepare_node)
    workflow.add_node("fit", fit_node)
    workflow.add_node("kernel", kernel_node)
    workflow.add_node("align", align_node)
    workflow.add_node("landmark", landmark_node)
    workflow.add_node("evaluate", evaluate_node)

    workflow.set_entry_point("prepare")
    workflow.add_edge("prepare", "fit")
    workflow.add_edge("fit", "kernel")
    workflow.add_edge("kernel", "align")
    workflow.add_edge("align", "landmark")
    workflow.add_edge("landmark", "evaluate")
    workflow.add_edge("evaluate", END)

    return workflow.compile()
