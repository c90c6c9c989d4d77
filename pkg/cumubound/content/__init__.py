"""
Content package for cumubound.

Holds static files shipped with the package, currently the JSON schema
that every `--format json` document conforms to.
"""
