"""Case documents, symbol workspace, assembly and the equation solver."""
