"""Service boundary: HTTP/WS endpoints, wire protocol, persistence, CLI."""
