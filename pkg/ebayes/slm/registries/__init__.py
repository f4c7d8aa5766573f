from . import biclustering, explicit, multitask, sparse_regression
from .biclustering import BiclusteringRegistry, make_biclustering_registry
from .explicit import ExplicitRegistry, make_explicit_registry
from .multitask import MultitaskRegistry, make_multitask_registry
from .sparse_regression import SparseRegressionRegistry, make_sparse_regression_registry

name_to_factory = {
    BiclusteringRegistry.registry_name: make_biclustering_registry,
    SparseRegressionRegistry.registry_name: make_sparse_regression_registry,
    MultitaskRegistry.registry_name: make_multitask_registry,
    ExplicitRegistry.registry_name: make_explicit_registry,
}
