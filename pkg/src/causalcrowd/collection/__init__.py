from .service import ServiceConfig, StudyService, Stage  # noqa: F401
