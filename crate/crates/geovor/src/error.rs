use thiserror::Error;

/// Errors produced by construction and maintenance operations.
#[derive(Debug, Error)]
pub enum GeovorError {
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    NonSimplePolygon(usize, usize),
    #[error("polygon must be counterclockwise")]
    NotCounterClockwise,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("duplicate consecutive vertices at index {0}")]
    DuplicateVertex(usize),
    #[error("collinear consecutive vertices at index {0}")]
    CollinearVertices(usize),
    #[error("non-finite coordinate")]
    NonFiniteCoordinate,
    #[error("point ({0}, {1}) lies outside the polygon")]
    PointOutsidePolygon(f64, f64),
    #[error("site ({0}, {1}) lies on the polygon boundary")]
    SiteOnBoundary(f64, f64),
    #[error("both anchors and additive constants coincide; locus is the whole plane")]
    IdenticalDistanceFields,
    #[error("a polygon vertex is equidistant to the two sites")]
    DegenerateEquidistantVertex,
    #[error("sites are geodesically cocircular or collinear; center is not isolated")]
    DegenerateCollinearCocircular,
    #[error("cocircular sites at construction time")]
    DegenerateCocircularSites,
    #[error("event at t={0} is stale; structure already advanced past it")]
    StaleEvent(f64),
    #[error("site {0} exits the polygon at t={1}")]
    SiteExitsPolygon(usize, f64),
    #[error("event budget of {0} exceeded")]
    EventBudgetExceeded(usize),
    #[error("degeneracy detected at t={0}: {1}")]
    DegeneracyDetected(f64, String),
    #[error("event point is not present in the tournament")]
    UnknownEventPoint,
    #[error("link would create a cycle")]
    LinkCycle,
    #[error("cannot cut a root node")]
    CutRoot,
    #[error("oracle sampling resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("scenario validation failed: {0}")]
    InvalidScenario(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GeovorError>;
