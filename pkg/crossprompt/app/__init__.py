from django.apps import AppConfig


class CrossPromptAppConfig(AppConfig):
    """Entry point for the crossprompt application."""

    name = "crossprompt.app"
    label = "crossprompt"
