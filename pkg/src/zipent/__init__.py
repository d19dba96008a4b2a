"""Zip shift spaces: measures, entropies, variational checks and a baker's map model."""

from importlib import import_module

__version__ = "0.1.0"

_EXPORTS = {
    "AlphabetPair": "alphabets",
    "ProbabilityVector": "alphabets",
    "validate_transition": "alphabets",
    "induce_z_distribution": "alphabets",
    "check_invariance_condition": "alphabets",
    "shannon_entropy": "alphabets",
    "CylinderSpec": "space",
    "WindowPoint": "space",
    "SubZipShift": "space",
    "ForbiddenWord": "space",
    "apply_zip_shift": "space",
    "preimages": "space",
    "distance": "space",
    "enumerate_words": "space",
    "MeasureSpec": "measure",
    "cylinder_measure": "measure",
    "verify_invariance": "measure",
    "mixing_correlation": "measure",
    "good_image_partition": "measure",
    "square_measure_entropy": "entropy",
    "square_topological_entropy": "entropy",
    "topological_entropy_side": "entropy",
    "fekete_estimate": "entropy",
    "maximize_square_entropy": "variational",
    "variational_gap": "variational",
    "classify_uniform": "variational",
    "BakerSpec": "baker",
    "SquarePoint": "baker",
    "load_spec": "specfile",
    "ZipShiftEntropyEstimator": "estimators",
    "TopologicalEntropyEstimator": "estimators",
    "SquareEntropyMaximizer": "estimators",
}

__all__ = sorted(_EXPORTS)


def __getattr__(name):
    # lazy so that the CLI does not pay for scikit-learn on every call
    if name in _EXPORTS:
        return getattr(import_module(f".{_EXPORTS[name]}", __name__), name)
    raise AttributeError(f"module 'zipent' has no attribute {name!r}")
