"""pidgraph: P&ID XML to labeled property graphs, condensation, and graph-grounded chat."""

from .chain import (
    DEFAULT_SYSTEM_TEMPLATE,
    BudgetError,
    ChatMessage,
    ChatSession,
    SessionBusyError,
    ask,
    ask_text,
    build_prompt,
    new_session,
)
from .condense import (
    CondensationPolicy,
    CondensationReport,
    PolicyError,
    collapse_chains,
    condense,
    prune_structural,
    strip_properties,
)
from .graph import (
    GraphBuildError,
    GraphEdge,
    GraphNode,
    PropertyGraph,
    build_graph,
    graph_equal,
)
from .graphio import (
    GraphMLExportError,
    GraphMLImportError,
    TokenEstimate,
    estimate_tokens,
    export_graphml,
    export_json,
    import_graphml,
    import_json,
    load_graph,
    register_tokenizer,
)
from .model import Diagnostic, PidModel, PlantItem, Severity
from .parser import DexpiParseError, parse_dexpi, validate
from .providers import (
    Provider,
    ProviderAuthError,
    ProviderError,
    ProviderSpec,
    ScriptedProvider,
    create_provider,
    default_credential_env,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ChatMessage",
    "ChatSession",
    "CondensationPolicy",
    "CondensationReport",
    "DEFAULT_SYSTEM_TEMPLATE",
    "DexpiParseError",
    "Diagnostic",
    "GraphBuildError",
    "GraphEdge",
    "GraphMLExportError",
    "GraphMLImportError",
    "GraphNode",
    "PidModel",
    "PlantItem",
    "PolicyError",
    "Provider",
    "ProviderAuthError",
    "ProviderError",
    "ProviderSpec",
    "PropertyGraph",
    "ScriptedProvider",
    "SessionBusyError",
    "Severity",
    "TokenEstimate",
    "ask",
    "ask_text",
    "build_graph",
    "build_prompt",
    "collapse_chains",
    "condense",
    "create_provider",
    "default_credential_env",
    "estimate_tokens",
    "export_graphml",
    "export_json",
    "graph_equal",
    "import_graphml",
    "import_json",
    "load_graph",
    "new_session",
    "parse_dexpi",
    "prune_structural",
    "register_tokenizer",
    "strip_properties",
    "validate",
    "__version__",
]
