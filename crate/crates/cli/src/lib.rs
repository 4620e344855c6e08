//! Driver behind the `cartan-skel` binary: reads a problem file, runs its tasks
//! in order and renders the reports.

pub mod error;
pub mod problem;
pub mod report;
pub mod tasks;

use error::CliError;
use problem::{parse_problem, resolve, ProblemFile, TaskSpec};
use report::Report;
use tasks::{run_task, Options};

/// Accepted in place of a file path: runs the built-in worked example.
pub const EXAMPLE_SO3: &str = "example-so3";

fn example_problem() -> ProblemFile {
    ProblemFile {
        format_version: problem::FORMAT_VERSION.into(),
        lie_algebras: Default::default(),
        klein_models: Default::default(),
        skeletons: Default::default(),
        morphisms: Default::default(),
        s_subspaces: Default::default(),
        tasks: vec![TaskSpec {
            kind: EXAMPLE_SO3.into(),
            name: None,
            skeleton: None,
            morphism: None,
            klein: None,
            s: None,
        }],
    }
}

/// Loads `path` (or the built-in example) and runs the selected tasks.
///
/// Reports for tasks that finished before a failure are returned alongside the error.
pub fn run(path: &str, task: Option<&str>, opts: Options) -> (Vec<Report>, Result<(), CliError>) {
    let problem = if path == EXAMPLE_SO3 {
        example_problem()
    } else {
        match std::fs::read_to_string(path).map_err(CliError::from).and_then(|t| parse_problem(&t)) {
            Ok(p) => p,
            Err(e) => return (vec![], Err(e)),
        }
    };
    let res = match resolve(&problem) {
        Ok(r) => r,
        Err(e) => return (vec![], Err(e)),
    };
    let selected: Vec<&TaskSpec> = problem
        .tasks
        .iter()
        .filter(|t| task.map_or(true, |n| t.display_name() == n || t.kind == n))
        .collect();
    if let Some(n) = task {
        if selected.is_empty() {
            return (vec![], Err(CliError::Parse(format!("no task named `{n}`"))));
        }
    }
    let mut out = Vec::new();
    for t in selected {
        match run_task(&problem, &res, t, opts) {
            Ok(r) => out.push(r),
            Err(e) => return (out, Err(e)),
        }
    }
    (out, Ok(()))
}

pub fn render_text(reports: &[Report]) -> String {
    reports.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n")
}

pub fn render_json(reports: &[Report]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}
