"""HTTP service exposing the toolkit's operations.

The ASGI application lives in mcsp.service.app (uvicorn target
"mcsp.service.app:app"); mcsp.service.ops holds the report builders
shared with the command line, and mcsp.service.models the request and
response models.  Nothing is re-exported here so that importing the
sibling modules stays cheap for the CLI.
"""
