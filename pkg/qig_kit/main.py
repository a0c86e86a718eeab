import logging
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from qig_kit.core.config import settings
from qig_kit.core.logging import configure_logging
from qig_kit.routers import geometry, scans, vqe

configure_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    Path(settings.OUTPUT_DIR).mkdir(parents=True, exist_ok=True)
    logger.info(
        "%s ready: metric=%s scale=%g seed=%d workers=%d",
        settings.PROJECT_NAME, settings.METRIC, settings.METRIC_SCALE, settings.SEED, settings.MAX_WORKERS,
    )
    yield


app = FastAPI(
    title=settings.PROJECT_NAME,
    openapi_url=f"{settings.API_V1_STR}/openapi.json",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(geometry.router, prefix=f"{settings.API_V1_STR}/geometry", tags=["geometry"])
app.include_router(scans.router, prefix=f"{settings.API_V1_STR}/scans", tags=["scans"])
app.include_router(vqe.router, prefix=f"{settings.API_V1_STR}/vqe", tags=["vqe"])


@app.get("/")
def root():
    return {"message": f"Welcome to the {settings.PROJECT_NAME} API"}
