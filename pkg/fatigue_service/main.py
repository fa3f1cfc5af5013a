from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from fatigue_errors import FatigueModelError, UnknownModelError
from .service import router

app = FastAPI(title="Muscle Fatigue API")
app.include_router(router)


@app.exception_handler(UnknownModelError)
async def unknown_model_handler(request: Request, exc: UnknownModelError) -> JSONResponse:
    return JSONResponse(status_code=404, content={"error": "not_found", "detail": str(exc)})


@app.exception_handler(FatigueModelError)
@app.exception_handler(ValueError)
async def model_error_handler(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=422, content={"error": type(exc).__name__, "detail": str(exc)})
