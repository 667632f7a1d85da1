from schemas.motional import (
    GatePlanRequestSchema,
    GatePlanResponseSchema,
    LayoutSolveRequestSchema,
    LayoutSolveResponseSchema,
    RunDetailSchema,
    RunListResponseSchema,
    RunSummarySchema,
    SpectrumRequestSchema,
    SpectrumResponseSchema
)
