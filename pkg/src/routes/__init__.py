from routes.motional import router as motional_router
