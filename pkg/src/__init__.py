# Exact genus engine
