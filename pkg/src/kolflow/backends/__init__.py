from kolflow.backends.local import (
    AlgorithmDescriptor,
    fnv1a32,
    invoke_local,
    known_algorithms,
    mock_background,
    mock_makeup,
    mock_object,
    mock_tryon,
    prompt_color,
    register_algorithm,
    unregister_algorithm,
)

__all__ = [
    "AlgorithmDescriptor",
    "fnv1a32",
    "invoke_local",
    "known_algorithms",
    "mock_background",
    "mock_makeup",
    "mock_object",
    "mock_tryon",
    "prompt_color",
    "register_algorithm",
    "unregister_algorithm",
]
