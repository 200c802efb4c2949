//! Routes and wire types. Coordinates, moves and paths use the text
//! notation (`b3`, `NE,N`); roles are `A` and `B`; outcomes are `ongoing`,
//! `A` or `B`.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use phutball_core::corpus::{Checksum, Corpus, Erratum};
use phutball_core::notation::{
    format_move, format_path, parse_move, parse_position, serialize_position,
};
use phutball_core::script::{format_script, StatementKind};
use phutball_core::tactics::{self, Solver};
use phutball_core::verify::{verify_all, verify_script, ScriptReport, Summary, VerifyOptions};
use phutball_core::{legal_jumps, Landing, Move, Outcome, Position, Role};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::trace::TraceLayer;

use crate::error::ApiError;
use crate::policy::{self, Reason};
use crate::store::{Session, Store};
use crate::Config;

pub struct AppState {
    pub store: Store,
    pub config: Config,
}

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/corpus", get(corpus))
        .route("/corpus/positions/{name}", get(corpus_position))
        .route("/corpus/scripts/{name}", get(corpus_script))
        .route("/corpus/scripts/{name}/verify", post(verify_one))
        .route("/verify", post(verify_every))
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(session_state).delete(delete))
        .route("/sessions/{id}/moves", get(moves).post(apply))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/analysis", get(analysis))
        .route("/sessions/{id}/engine-move", post(engine_move))
        .layer(CorsLayer::permissive())
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

/// Runs engine work off the async workers.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

fn role_token(r: Role) -> String {
    r.letter().to_string()
}

fn outcome_token(o: Outcome) -> String {
    match o {
        Outcome::Ongoing => "ongoing".into(),
        Outcome::Win(r) => role_token(r),
    }
}

fn parse_role(text: &str) -> Result<Role, ApiError> {
    Role::from_letter(text)
        .ok_or_else(|| ApiError::bad_request(format!("role must be A or B, not {text:?}")))
}

fn parse_move_for(pos: &Position, text: &str) -> Result<Move, ApiError> {
    Ok(parse_move(text, pos.geometry())?)
}

#[derive(Serialize)]
pub struct Board {
    pub rows: u8,
    pub cols: u8,
    pub ball: String,
    pub chaps: Vec<String>,
    pub to_move: String,
}

impl Board {
    fn of(pos: &Position) -> Board {
        Board {
            rows: pos.geometry().rows(),
            cols: pos.geometry().cols(),
            ball: pos.ball().to_string(),
            chaps: pos.chaps().map(|c| c.to_string()).collect(),
            to_move: role_token(pos.to_move()),
        }
    }
}

#[derive(Serialize)]
pub struct PlyView {
    #[serde(rename = "move")]
    pub mv: String,
    pub role: String,
    pub outcome: String,
}

#[derive(Serialize)]
pub struct StateView {
    pub id: u64,
    pub revision: u64,
    pub created: u64,
    pub source: Option<String>,
    #[serde(flatten)]
    pub board: Board,
    pub outcome: String,
    pub history: Vec<PlyView>,
    /// Current position in the canonical text format.
    pub position: String,
}

impl StateView {
    fn of(s: &Session) -> StateView {
        let mut mover = s.base.to_move();
        let history = s
            .history
            .iter()
            .map(|p| {
                let v = PlyView {
                    mv: format_move(&p.mv),
                    role: role_token(mover),
                    outcome: outcome_token(p.outcome),
                };
                mover = p.after.to_move();
                v
            })
            .collect();
        StateView {
            id: s.id,
            revision: s.revision,
            created: s.created,
            source: s.source.clone(),
            board: Board::of(s.current()),
            outcome: outcome_token(s.outcome()),
            history,
            position: serialize_position(s.current()),
        }
    }
}

#[derive(Deserialize)]
pub struct CreateRequest {
    /// Corpus position name, such as `fig3`.
    pub corpus: Option<String>,
    /// Position text in the canonical format.
    pub position: Option<String>,
    /// Moves to play before the session is returned.
    #[serde(default)]
    pub moves: Vec<String>,
}

async fn create(
    State(app): Shared,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<StateView>), ApiError> {
    let (base, source) = match (req.corpus, req.position) {
        (Some(name), None) => (Corpus::builtin().position(&name)?, Some(name)),
        (None, Some(text)) => (parse_position(&text)?, None),
        _ => {
            return Err(ApiError::bad_request(
                "give exactly one of \"corpus\" and \"position\"",
            ))
        }
    };
    let mut at = base.clone();
    let mut moves = Vec::new();
    for text in &req.moves {
        let mv = parse_move_for(&at, text)?;
        at = at.apply_move(&mv)?.0;
        moves.push(mv);
    }
    let session = app.store.create(base, source, moves)?;
    Ok((StatusCode::CREATED, Json(StateView::of(&session))))
}

#[derive(Serialize)]
pub struct SessionSummary {
    pub id: u64,
    pub revision: u64,
    pub created: u64,
    pub source: Option<String>,
    pub plies: usize,
}

async fn list(State(app): Shared) -> Json<Vec<SessionSummary>> {
    Json(
        app.store
            .list()
            .iter()
            .map(|s| SessionSummary {
                id: s.id,
                revision: s.revision,
                created: s.created,
                source: s.source.clone(),
                plies: s.history.len(),
            })
            .collect(),
    )
}

async fn session_state(State(app): Shared, Path(id): Path<u64>) -> ApiResult<StateView> {
    Ok(Json(StateView::of(&app.store.get(id)?)))
}

async fn delete(State(app): Shared, Path(id): Path<u64>) -> Result<StatusCode, ApiError> {
    app.store.remove(id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Serialize)]
pub struct MoveView {
    #[serde(rename = "move")]
    pub mv: String,
    pub outcome: String,
    /// Strength of the mover's threat afterwards; absent when the move ends the game.
    pub annotation: Option<String>,
    /// Jumps only: where the ball stops (`top`/`bottom` for a goal).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landing: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub removed: Vec<String>,
}

#[derive(Serialize)]
pub struct MovesView {
    pub id: u64,
    pub revision: u64,
    pub to_move: String,
    pub placements: Vec<MoveView>,
    pub jumps: Vec<MoveView>,
}

fn annotation_of(pos: &Position, mv: &Move) -> Result<Option<String>, ApiError> {
    match tactics::annotate(pos, mv) {
        Ok(r) => Ok(Some(r.annotation.to_string())),
        Err(phutball_core::TacticsError::TerminalAfterMove) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn list_moves(pos: &Position) -> Result<(Vec<MoveView>, Vec<MoveView>), ApiError> {
    if pos.is_terminal() {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut placements = Vec::new();
    for at in pos.legal_placements()? {
        let mv = Move::Place(at);
        placements.push(MoveView {
            mv: at.to_string(),
            outcome: outcome_token(Outcome::Ongoing),
            annotation: annotation_of(pos, &mv)?,
            landing: None,
            removed: Vec::new(),
        });
    }
    let mut jumps = Vec::new();
    for line in legal_jumps(pos)? {
        let landing = line.trace.segments.last().map(|s| match s.landing {
            Landing::Point(c) => c.to_string(),
            Landing::Exit(side) => format!("{side:?}").to_lowercase(),
        });
        let removed = line
            .trace
            .segments
            .iter()
            .flat_map(|s| s.removed.iter().map(|c| c.to_string()))
            .collect();
        let mv = Move::Jump(line.path.clone());
        jumps.push(MoveView {
            mv: format_path(&line.path),
            outcome: outcome_token(line.outcome),
            annotation: annotation_of(pos, &mv)?,
            landing,
            removed,
        });
    }
    Ok((placements, jumps))
}

async fn moves(State(app): Shared, Path(id): Path<u64>) -> ApiResult<MovesView> {
    let session = app.store.get(id)?;
    blocking(move || {
        let pos = session.current();
        let (placements, jumps) = list_moves(pos)?;
        Ok(Json(MovesView {
            id,
            revision: session.revision,
            to_move: role_token(pos.to_move()),
            placements,
            jumps,
        }))
    })
    .await
}

#[derive(Deserialize)]
pub struct ApplyRequest {
    #[serde(rename = "move")]
    pub mv: String,
    pub revision: Option<u64>,
}

async fn apply(
    State(app): Shared,
    Path(id): Path<u64>,
    Json(req): Json<ApplyRequest>,
) -> ApiResult<StateView> {
    app.store.update(id, |s| {
        s.check_revision(req.revision)?;
        let mv = parse_move_for(s.current(), &req.mv)?;
        s.apply(mv)?;
        Ok(Json(StateView::of(s)))
    })
}

#[derive(Deserialize, Default)]
pub struct RevisionRequest {
    pub revision: Option<u64>,
}

async fn undo(
    State(app): Shared,
    Path(id): Path<u64>,
    body: Option<Json<RevisionRequest>>,
) -> ApiResult<StateView> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    app.store.update(id, |s| {
        s.check_revision(req.revision)?;
        s.undo()?;
        Ok(Json(StateView::of(s)))
    })
}

#[derive(Deserialize)]
pub struct AnalysisQuery {
    /// Attacker, default the side to move.
    pub role: Option<String>,
    /// Depth for the forced-win search; omitted means no search.
    pub plies: Option<u32>,
}

#[derive(Serialize)]
pub struct WinWithin {
    pub plies: u32,
    pub wins: bool,
    /// A winning line when `wins`, in canonical move order.
    pub line: Vec<String>,
}

#[derive(Serialize)]
pub struct AnalysisView {
    pub id: u64,
    pub revision: u64,
    pub role: String,
    pub annotation: String,
    pub shot_witnesses: Vec<String>,
    pub unjottable: bool,
    pub untackleable: bool,
    pub win_in_one: bool,
    /// Defender placements that stop every shot; empty without a shot.
    pub tackles: Vec<String>,
    /// Defender jumps that escape every shot, one per resulting state; empty without a shot.
    pub jots: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub win_within: Option<WinWithin>,
}

async fn analysis(
    State(app): Shared,
    Path(id): Path<u64>,
    Query(q): Query<AnalysisQuery>,
) -> ApiResult<AnalysisView> {
    let session = app.store.get(id)?;
    let pos = session.current().clone();
    let role = match &q.role {
        Some(r) => parse_role(r)?,
        None => pos.to_move(),
    };
    let max = app.config.max_plies;
    if let Some(p) = q.plies.filter(|&p| p > max) {
        return Err(ApiError::engine(
            "depth-limit",
            format!("plies {p} exceeds the cap of {max}"),
        ));
    }
    let node_limit = app.config.node_limit;
    blocking(move || {
        let report = tactics::report(&pos, role)?;
        let has_shot = !report.shot_witnesses.is_empty();
        let (tackles, jots) = if has_shot {
            (
                tactics::tackles(&pos, role)?
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
                tactics::jots(&pos, role)?
                    .iter()
                    .map(|p| format_path(p))
                    .collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        let win_within = match q.plies {
            Some(plies) => {
                let line = Solver::new(node_limit).principal_line(&pos, role, plies)?;
                Some(WinWithin {
                    plies,
                    wins: line.is_some(),
                    line: line.unwrap_or_default().iter().map(format_move).collect(),
                })
            }
            None => None,
        };
        Ok(Json(AnalysisView {
            id,
            revision: session.revision,
            role: role_token(role),
            annotation: report.annotation.to_string(),
            shot_witnesses: report
                .shot_witnesses
                .iter()
                .map(|p| format_path(p))
                .collect(),
            unjottable: report.unjottable,
            untackleable: report.untackleable,
            win_in_one: report.win_in_one,
            tackles,
            jots,
            win_within,
        }))
    })
    .await
}

#[derive(Serialize)]
pub struct EngineMoveView {
    #[serde(rename = "move")]
    pub mv: String,
    pub reason: Reason,
    pub state: StateView,
}

async fn engine_move(
    State(app): Shared,
    Path(id): Path<u64>,
    body: Option<Json<RevisionRequest>>,
) -> ApiResult<EngineMoveView> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let session = app.store.get(id)?;
    session.check_revision(req.revision)?;
    let revision = session.revision;
    let (plies, nodes) = (app.config.max_plies, app.config.node_limit);
    let (mv, reason) =
        blocking(move || Ok(policy::choose(session.current(), plies, nodes)?)).await?;
    // The session may have moved on while the search ran.
    app.store.update(id, |s| {
        s.check_revision(Some(revision))?;
        s.apply(mv.clone())?;
        Ok(Json(EngineMoveView {
            mv: format_move(&mv),
            reason,
            state: StateView::of(s),
        }))
    })
}

#[derive(Serialize)]
pub struct PositionSummary {
    pub name: String,
    pub note: String,
    pub checksum: Checksum,
}

#[derive(Serialize)]
pub struct ScriptSummary {
    pub name: String,
    pub alias: String,
    pub title: String,
}

#[derive(Serialize)]
pub struct CorpusView {
    pub positions: Vec<PositionSummary>,
    pub scripts: Vec<ScriptSummary>,
    pub errata: Vec<Erratum>,
}

async fn corpus() -> Json<CorpusView> {
    let c = Corpus::builtin();
    Json(CorpusView {
        positions: c
            .positions
            .iter()
            .map(|e| PositionSummary {
                name: e.name.clone(),
                note: e.note.clone(),
                checksum: e.checksum,
            })
            .collect(),
        scripts: c
            .scripts
            .iter()
            .map(|e| ScriptSummary {
                name: e.name.clone(),
                alias: e.alias.clone(),
                title: e.title.clone(),
            })
            .collect(),
        errata: c.errata.clone(),
    })
}

#[derive(Serialize)]
pub struct CorpusPosition {
    pub name: String,
    pub note: String,
    #[serde(flatten)]
    pub board: Board,
    pub position: String,
}

async fn corpus_position(Path(name): Path<String>) -> ApiResult<CorpusPosition> {
    let corpus = Corpus::builtin();
    let pos = corpus.position(&name)?;
    let note = corpus
        .positions
        .iter()
        .find(|e| e.name == name)
        .map(|e| e.note.clone())
        .unwrap_or_default();
    Ok(Json(CorpusPosition {
        name,
        note,
        board: Board::of(&pos),
        position: serialize_position(&pos),
    }))
}

#[derive(Serialize)]
pub struct LineStep {
    #[serde(rename = "move")]
    pub mv: String,
    pub role: String,
    pub outcome: String,
    #[serde(flatten)]
    pub board: Board,
}

#[derive(Serialize)]
pub struct CorpusScript {
    pub name: String,
    pub alias: String,
    pub title: String,
    pub base: String,
    pub source: String,
    /// Positions after each move of the main line, branches excluded.
    pub line: Vec<LineStep>,
}

async fn corpus_script(Path(name): Path<String>) -> ApiResult<CorpusScript> {
    let corpus = Corpus::builtin();
    let entry = corpus.script_entry(&name).ok_or_else(|| {
        ApiError::not_found("unknown-entry", format!("unknown corpus entry {name:?}"))
    })?;
    let script = corpus.script(&entry.name)?;
    let mut pos = script.position.clone();
    let mut line = Vec::new();
    for st in &script.body {
        if let StatementKind::Move(step) = &st.kind {
            // Claims may hand the tempo to the other side.
            if step.role != pos.to_move() {
                pos = pos.with_to_move(step.role);
            }
            let (after, outcome) = pos.apply_move(&step.mv)?;
            pos = after;
            line.push(LineStep {
                mv: format_move(&step.mv),
                role: role_token(step.role),
                outcome: outcome_token(outcome),
                board: Board::of(&pos),
            });
        }
    }
    Ok(Json(CorpusScript {
        name: entry.name.clone(),
        alias: entry.alias.clone(),
        title: entry.title.clone(),
        base: script.base.clone(),
        source: format_script(&script),
        line,
    }))
}

#[derive(Deserialize)]
pub struct VerifyQuery {
    #[serde(default)]
    pub strict: bool,
}

async fn verify_one(
    Path(name): Path<String>,
    Query(q): Query<VerifyQuery>,
) -> ApiResult<ScriptReport> {
    let corpus = Corpus::builtin();
    let entry = corpus.script_entry(&name).ok_or_else(|| {
        ApiError::not_found("unknown-entry", format!("unknown corpus entry {name:?}"))
    })?;
    let name = entry.name.clone();
    blocking(move || {
        Ok(Json(verify_script(
            corpus,
            &name,
            VerifyOptions { strict: q.strict },
        )))
    })
    .await
}

async fn verify_every(Query(q): Query<VerifyQuery>) -> ApiResult<Summary> {
    blocking(move || {
        Ok(Json(verify_all(
            Corpus::builtin(),
            VerifyOptions { strict: q.strict },
        )))
    })
    .await
}
