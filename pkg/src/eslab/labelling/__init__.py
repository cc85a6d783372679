"""Nice labelling strategies and the verifier."""

from eslab.labelling.basic import (
    Labelling,
    StratifyingFunction,
    compact,
    exact_class_labeller,
    label_dilworth,
    label_exact,
    label_greedy,
    label_quotient,
    label_stratified,
    optimal_stratifier,
    quotient_graph,
    skewness,
    verify_labelling,
)
from eslab.labelling.forest import (
    LinearOrder,
    choose_tree_order,
    is_forest,
    label_forest,
    label_tree,
)
from eslab.labelling.simple import decompose, is_simple, label_simple, simplicity_failure

STRATEGIES = ("exact", "dilworth", "stratified", "forest", "simple", "greedy")


def label(es, strategy: str, **kwargs) -> Labelling:
    """Dispatch on a strategy name."""
    fn = {
        "exact": label_exact,
        "dilworth": label_dilworth,
        "stratified": label_stratified,
        "forest": label_forest,
        "simple": label_simple,
        "greedy": label_greedy,
    }[strategy]
    return fn(es, **kwargs)


__all__ = [
    "Labelling",
    "LinearOrder",
    "STRATEGIES",
    "StratifyingFunction",
    "choose_tree_order",
    "compact",
    "decompose",
    "exact_class_labeller",
    "is_forest",
    "is_simple",
    "label",
    "label_dilworth",
    "label_exact",
    "label_forest",
    "label_greedy",
    "label_quotient",
    "label_simple",
    "label_stratified",
    "label_tree",
    "optimal_stratifier",
    "quotient_graph",
    "simplicity_failure",
    "skewness",
    "verify_labelling",
]
