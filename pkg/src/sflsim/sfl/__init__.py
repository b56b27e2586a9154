"""Symbolic Form Language: tokenizer, parser, expression nodes and function table."""
