from .gateway import (
    API_KEY_ENV, Completion, Gateway, GatewayConfig, GatewayError, Prompt, ReplayStore, fingerprint,
)
from .templates import Template, TemplateError, load_template, render_template

__all__ = [
    "API_KEY_ENV", "Completion", "Gateway", "GatewayConfig", "GatewayError", "Prompt",
    "ReplayStore", "Template", "TemplateError", "fingerprint", "load_template", "render_template",
]
