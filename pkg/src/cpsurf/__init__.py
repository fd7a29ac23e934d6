"""Surfaces immersed in su(N) built from CP^{N-1} sigma-model fields.

The pipeline: evaluate a field candidate to order-3 jets (`solution`),
certify it against the model equations (`model`), build the tangent form,
metric and curvature and integrate the immersion (`immersion`), construct
moving frames with their structure matrices (`frame`), and drive it all
from JSON configs with delimited/figure reports (`cli`).
"""

from .config import RunConfig, load_config, parse_config
from .frame import (Frame, GWData, MeanCurvature, WillmoreResult, alt_normals,
                    build_frame, build_phi, gauss_codazzi_residual,
                    gw_coefficients, mean_curvature, normalization_table,
                    second_fundamental_form, su_basis, su_coordinates,
                    willmore)
from .immersion import (ImmersionGrid, MetricSample, Regularity, TangentPair,
                        classify_regularity, closedness_residual,
                        gaussian_curvature, induced_metric, integrate_grid,
                        integrate_to, metric_from_traces, tangent_form)
from .jets import Jet2, apply_function
from .model import (ProjectorJet, action_density, apply_gauge, apply_global,
                    currents, el_residual, el_residual_matrix,
                    el_residual_norm, parity_swap, projector, reparametrize)
from .solution import (FieldJet, SolutionSpec, builtin_catalog, cp1_embedded,
                       cp1_example, eval_field, make_builtin)

__version__ = "0.1.0"

__all__ = [
    "FieldJet", "Frame", "GWData", "ImmersionGrid", "Jet2", "MeanCurvature",
    "MetricSample", "ProjectorJet", "Regularity", "RunConfig", "SolutionSpec",
    "TangentPair", "WillmoreResult", "action_density", "alt_normals",
    "apply_function", "apply_gauge", "apply_global", "build_frame",
    "build_phi", "builtin_catalog", "classify_regularity",
    "closedness_residual", "cp1_embedded", "cp1_example", "currents",
    "el_residual", "el_residual_matrix", "el_residual_norm", "eval_field",
    "gauss_codazzi_residual", "gaussian_curvature", "gw_coefficients",
    "induced_metric", "integrate_grid", "integrate_to", "load_config",
    "make_builtin", "mean_curvature", "metric_from_traces",
    "normalization_table", "parity_swap", "parse_config", "projector",
    "reparametrize", "second_fundamental_form", "su_basis", "su_coordinates",
    "tangent_form", "willmore",
]
