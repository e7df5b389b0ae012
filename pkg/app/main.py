from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.api.v1.router import api_router
from app.config.settings import settings
from app.core.exceptions import HazdepError
from app.core.logging import configure_logging, get_logger

configure_logging()
logger = get_logger("api")

app = FastAPI(title=settings.app_name, version=settings.version, debug=settings.debug)


@app.exception_handler(HazdepError)
async def hazdep_error_handler(request: Request, exc: HazdepError) -> JSONResponse:
    logger.warning("%s %s -> %s : %s", request.method, request.url.path, type(exc).__name__, exc.detail)
    return JSONResponse(status_code=exc.status_code, content=exc.to_dict())


app.include_router(api_router, prefix=settings.api_prefix)


@app.get("/health")
async def health():
    return {"status": "ok", "version": settings.version}
