# Module-level knobs. Read at call time (settings.NAME), so tests and
# callers can override them with monkeypatch or plain assignment.

# Largest agent count for operations that enumerate all 2^n coalitions.
MAX_ENUMERATION_AGENTS = 24

# Largest agent count for the explicit core LP with one row per coalition.
MAX_FULL_LP_AGENTS = 20

# Exhaustive SAT referee.
MAX_SAT_VARIABLES = 26

# brute_solve caps.
BRUTE_VERTEX_LIMIT = 16
BRUTE_EDGE_LIMIT = 16
BRUTE_TREE_VERTEX_LIMIT = 9

# Prefix of vertices and agents invented by gadget constructions.
# User-supplied names may not start with it.
AUX_PREFIX = "__aux_"
